//! Recipes: an ordered list of steps, each naming an op, its parameters and
//! its inputs. An input is an earlier step or a file, so the step graph is
//! acyclic by construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::artifact::Artifact;
use crate::ops::{InputRef, OpRegistry, StepContext};
use crate::{usage, CliError};

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub id: String,
    pub op: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub inputs: BTreeMap<String, InputSpec>,
    /// File the step's artifact is written to, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum InputSpec {
    Step(String),
    File { file: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub id: String,
    pub op: String,
    pub object: String,
    pub params: Value,
    pub verified: Option<bool>,
    pub millis: u128,
    pub out: Option<PathBuf>,
    pub report: Value,
    #[serde(skip)]
    pub text: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunSummary {
    pub steps: Vec<StepRecord>,
}

impl RunSummary {
    /// No step reported a failed verification.
    pub fn ok(&self) -> bool {
        self.steps.iter().all(|s| s.verified != Some(false))
    }

    pub fn to_json(&self) -> Value {
        json!({ "ok": self.ok(), "steps": self.steps })
    }

    /// One row per step: object, parameters, verified, timing.
    pub fn table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .steps
            .iter()
            .map(|s| {
                [
                    s.id.clone(),
                    s.object.clone(),
                    compact(&s.params),
                    match s.verified {
                        Some(true) => "yes".into(),
                        Some(false) => "NO".into(),
                        None => "-".into(),
                    },
                    format!("{:.2}s", s.millis as f64 / 1000.0),
                ]
            })
            .collect();
        let header = ["step", "object", "parameters", "verified", "time"];
        let mut width = header.map(str::len);
        for r in &rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: [&str; 5]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                s.push_str(&format!("{c:<w$}  ", w = width[i]));
            }
            s.trim_end().to_string()
        };
        let mut out = vec![line(header)];
        out.extend(rows.iter().map(|r| line([&r[0], &r[1], &r[2], &r[3], &r[4]])));
        out.push(format!("verified: {}", self.ok()));
        out.join("\n")
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Object(m) if m.is_empty() => "-".into(),
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

impl Recipe {
    pub fn from_json_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| usage(format!("malformed recipe: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Recipe::from_json_str(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    /// Ids are unique, ops exist, and every step input names an earlier step.
    pub fn validate(&self, ops: &OpRegistry) -> Result<(), CliError> {
        let mut seen = HashSet::new();
        let mut outs = HashSet::new();
        for s in &self.steps {
            if ops.get(&s.op).is_none() {
                return Err(usage(format!("step {:?}: unknown op {:?}", s.id, s.op)));
            }
            for (name, input) in &s.inputs {
                if let InputSpec::Step(id) = input {
                    if !seen.contains(id.as_str()) {
                        return Err(usage(format!(
                            "step {:?}: input {name:?} refers to {id:?}, which is not an earlier step",
                            s.id
                        )));
                    }
                }
            }
            if !seen.insert(s.id.as_str()) {
                return Err(usage(format!("duplicate step id {:?}", s.id)));
            }
            if let Some(o) = &s.out {
                if !outs.insert(o.as_str()) {
                    return Err(usage(format!("two steps write {o:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Runs every step in order. File inputs are read relative to `base_dir` and
/// artifacts are written under `out_dir`. Stops at the first step that errors;
/// failed verifications are recorded and the run continues.
pub fn run_recipe(
    recipe: &Recipe,
    base_dir: &Path,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<RunSummary, CliError> {
    let ops = OpRegistry::standard();
    recipe.validate(ops)?;
    let seed = seed.unwrap_or(recipe.seed);
    let mut artifacts: HashMap<String, Artifact> = HashMap::new();
    let mut summary = RunSummary::default();
    for step in &recipe.steps {
        let op = ops.get(&step.op).expect("validated");
        let inputs: BTreeMap<String, InputRef> = step
            .inputs
            .iter()
            .map(|(k, v)| {
                let r = match v {
                    InputSpec::Step(id) => InputRef::Step(id.clone()),
                    InputSpec::File { file } => InputRef::File(base_dir.join(file)),
                };
                (k.clone(), r)
            })
            .collect();
        let ctx = StepContext {
            id: &step.id,
            params: &step.params,
            inputs: &inputs,
            artifacts: &artifacts,
            base_dir,
            seed,
        };
        let start = Instant::now();
        let out = op.run(&ctx).map_err(|e| e.context(&format!("step {} ({})", step.id, step.op)))?;
        let millis = start.elapsed().as_millis();
        let object = match &out.artifact {
            Some(a) if !matches!(a, Artifact::Report(_)) => a.describe(),
            _ => out.text.lines().next().unwrap_or("").to_string(),
        };
        let path = match (&step.out, &out.artifact) {
            (Some(o), Some(a)) => {
                let p = out_dir.join(o);
                a.write(&p)?;
                Some(p)
            }
            (Some(o), None) => {
                let p = out_dir.join(o);
                Artifact::Report(out.report.clone()).write(&p)?;
                Some(p)
            }
            (None, _) => None,
        };
        summary.steps.push(StepRecord {
            id: step.id.clone(),
            op: step.op.clone(),
            object,
            params: Value::Object(step.params.clone()),
            verified: out.verified,
            millis,
            out: path,
            report: out.report,
            text: out.text,
        });
        if let Some(a) = out.artifact {
            artifacts.insert(step.id.clone(), a);
        }
    }
    Ok(summary)
}
