//! Finite fields, finite abelian groups, cyclotomic classes and CRT isomorphisms.

pub mod crt;
pub mod cyclotomic;
pub mod field;
pub mod group;
pub mod numtheory;
pub mod poly;

pub use crt::CrtIso;
pub use cyclotomic::CyclotomicIndexer;
pub use field::{FieldDescriptor, FieldElement, FieldRef, FiniteField};
pub use group::{AbelianGroup, GroupDescriptor, GroupElement, GroupKind, Subgroup};

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("field order exceeds the supported range")]
    FieldTooLarge,
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("modulus is irreducible but not primitive")]
    ImprimitiveModulus,
    #[error("element {0} is not a primitive element")]
    NotPrimitiveElement(u32),
    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,
    #[error("division by zero")]
    ZeroDivision,
    #[error("value {0} out of range for order {1}")]
    ElementOutOfRange(i64, u64),
    #[error("bad element encoding: {0}")]
    BadEncoding(String),
    #[error("class count {e} does not divide q-1 for q = {q}")]
    ClassCount { e: u64, q: u64 },
    #[error("zero member in a cyclotomic multiset")]
    ZeroInMultiset,
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("factor orders {0} and {1} are not coprime")]
    NonCoprimeFactors(u64, u64),
    #[error("factor {0} is not cyclic")]
    NonCyclicFactor(String),
}
