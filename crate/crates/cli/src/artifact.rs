use std::fmt;
use std::path::Path;

use serde_json::Value;

use fdf_core::codes::{Ccc, Fhs};
use fdf_core::designs::ResolvableDesign;
use fdf_core::families::{DesignFamily, DifferenceMatrix};
use fdf_core::lifting::LiftingData;

use crate::{usage, CliError};

/// What a step produces, kept in memory for later steps and written as JSON.
#[derive(Clone, Debug)]
pub enum Artifact {
    Family(DesignFamily),
    Lifting(LiftingData),
    Design(ResolvableDesign),
    Matrix(DifferenceMatrix),
    Ccc(Ccc),
    Fhs(Fhs),
    Report(Value),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Family,
    Lifting,
    Design,
    Matrix,
    Ccc,
    Fhs,
    Report,
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArtifactKind::Family => "family",
            ArtifactKind::Lifting => "lifting datum",
            ArtifactKind::Design => "design",
            ArtifactKind::Matrix => "difference matrix",
            ArtifactKind::Ccc => "CCC",
            ArtifactKind::Fhs => "FHS",
            ArtifactKind::Report => "report",
        };
        f.write_str(s)
    }
}

impl Artifact {
    pub fn kind(&self) -> ArtifactKind {
        match self {
            Artifact::Family(_) => ArtifactKind::Family,
            Artifact::Lifting(_) => ArtifactKind::Lifting,
            Artifact::Design(_) => ArtifactKind::Design,
            Artifact::Matrix(_) => ArtifactKind::Matrix,
            Artifact::Ccc(_) => ArtifactKind::Ccc,
            Artifact::Fhs(_) => ArtifactKind::Fhs,
            Artifact::Report(_) => ArtifactKind::Report,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Artifact::Family(f) => f.to_json(),
            Artifact::Lifting(l) => l.to_json(),
            Artifact::Design(d) => d.to_json(),
            Artifact::Matrix(m) => m.to_json(),
            Artifact::Ccc(c) => c.to_json(),
            Artifact::Fhs(x) => x.to_json(),
            Artifact::Report(v) => v.clone(),
        }
    }

    pub fn parse(kind: ArtifactKind, v: &Value) -> Result<Self, CliError> {
        Ok(match kind {
            ArtifactKind::Family => Artifact::Family(DesignFamily::from_json(v)?),
            ArtifactKind::Lifting => Artifact::Lifting(LiftingData::from_json(v).map_err(|e| usage(e.to_string()))?),
            ArtifactKind::Design => Artifact::Design(ResolvableDesign::from_json(v)?),
            ArtifactKind::Matrix => Artifact::Matrix(DifferenceMatrix::from_json(v)?),
            ArtifactKind::Ccc => Artifact::Ccc(Ccc::from_json(v)?),
            ArtifactKind::Fhs => Artifact::Fhs(Fhs::from_json(v).map_err(|e| usage(e.to_string()))?),
            ArtifactKind::Report => Artifact::Report(v.clone()),
        })
    }

    pub fn read(kind: ArtifactKind, path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Artifact::parse(kind, &v).map_err(|e| e.context(&path.display().to_string()))
    }

    /// Pretty JSON with a trailing newline. Field order is fixed, so equal
    /// artifacts give equal bytes.
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
        }
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("artifacts serialize");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
    }

    /// A few words on size and shape for the summary table.
    pub fn describe(&self) -> String {
        match self {
            Artifact::Family(f) => {
                let k = f.block_size().map_or("mixed".into(), |k| k.to_string());
                format!("{:?} over |G|={}, {} blocks, k={k}", f.kind, f.group.order(), f.blocks.len())
            }
            Artifact::Lifting(l) => format!("lifting datum over GF({}), {} rows", l.field.order(), l.phi.len()),
            Artifact::Design(d) => format!(
                "({},{},{}) design, {} blocks, {} classes",
                d.design.v,
                d.design.k,
                d.design.lambda,
                d.design.blocks.len(),
                d.resolution.classes.len()
            ),
            Artifact::Matrix(m) => format!("{} x {} difference matrix", m.rows.len(), m.columns()),
            Artifact::Ccc(c) => format!("({},{},{})_{} CCC", c.n, c.size(), c.d(), c.q),
            Artifact::Fhs(x) => format!("FHS of length {} over {} symbols", x.n(), x.alphabet_size),
            Artifact::Report(_) => "report".into(),
        }
    }
}
