//! Frame difference families: construction, lifting, search and verification,
//! together with the resolvable designs and codes built from them.

pub mod algebra;
pub mod families;
pub mod lifting;
pub mod catalog;
pub mod search;
pub mod designs;
pub mod codes;
