//! Named operations. Recipes and subcommands both run through this registry.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use fdf_core::algebra::numtheory::prime_power;
use fdf_core::algebra::{CrtIso, FiniteField};
use fdf_core::catalog::Catalog;
use fdf_core::codes::{
    ccc_from_pdf, cyclic_image, fhs_from_elementary_fdf, verify_ccc, verify_strictly_optimal, Ccc, Fhs,
};
use fdf_core::designs::{
    affine_plane, import_rbibd, rbibd_from_fdf, recursion_params, trivial_rbibd, verify_bibd,
    verify_one_rotational, verify_one_rotational_full, verify_resolution, ResolvableDesign, RecursionRule,
    RotationalStructure,
};
use fdf_core::families::{
    verify_fdf, verify_pdf, verify_relative_df, verify_sdf, DesignFamily, DifferenceMatrix, FamilyKind,
};
use fdf_core::lifting::{
    check_lifting_conditions, compose_fdf_dm, fdf_to_pdf, homogenize, lift_sdf, mul_table_dm, LiftingData,
};
use fdf_core::search::{
    q_bound, repair_block, solve, solve_any, widen_to_blocks, SearchError, SolveStatus, SystemRegistry,
    SystemRequest, DEFAULT_BUDGET,
};

use crate::artifact::{Artifact, ArtifactKind};
use crate::{failed, usage, CliError};

/// Where a step input comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputRef {
    /// The artifact of an earlier step.
    Step(String),
    File(PathBuf),
}

pub struct StepContext<'a> {
    pub id: &'a str,
    pub params: &'a Map<String, Value>,
    pub inputs: &'a BTreeMap<String, InputRef>,
    pub artifacts: &'a HashMap<String, Artifact>,
    /// Relative paths in parameters are read from here.
    pub base_dir: &'a Path,
    /// Seed for steps that do not set their own.
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct StepOutput {
    pub artifact: Option<Artifact>,
    /// `None` for steps that only construct.
    pub verified: Option<bool>,
    pub report: Value,
    /// Human-readable lines for `--format text`.
    pub text: String,
}

impl StepOutput {
    fn new(artifact: Option<Artifact>, verified: Option<bool>, report: Value, text: impl Into<String>) -> Self {
        StepOutput { artifact, verified, report, text: text.into() }
    }
}

pub trait Op: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError>;
}

pub struct OpRegistry {
    ops: Vec<Box<dyn Op>>,
}

impl OpRegistry {
    pub fn new() -> Self {
        OpRegistry { ops: Vec::new() }
    }

    pub fn standard() -> &'static OpRegistry {
        static STANDARD: OnceLock<OpRegistry> = OnceLock::new();
        STANDARD.get_or_init(|| {
            let mut r = OpRegistry::new();
            r.register(Box::new(CatalogList));
            r.register(Box::new(CatalogShow));
            r.register(Box::new(LiftingOf));
            r.register(Box::new(CheckLifting));
            r.register(Box::new(Lift));
            r.register(Box::new(Search));
            r.register(Box::new(Repair));
            r.register(Box::new(VerifyFamily));
            r.register(Box::new(FdfToPdf));
            r.register(Box::new(ComposeDm));
            r.register(Box::new(TrivialRbibd));
            r.register(Box::new(AffinePlane));
            r.register(Box::new(Assemble));
            r.register(Box::new(VerifyDesign));
            r.register(Box::new(Import));
            r.register(Box::new(CccFromPdf));
            r.register(Box::new(VerifyCcc));
            r.register(Box::new(FhsFromFdf));
            r.register(Box::new(VerifyFhs));
            r.register(Box::new(QBoundOp));
            r.register(Box::new(Recursion));
            r
        })
    }

    pub fn register(&mut self, op: Box<dyn Op>) {
        assert!(self.get(op.name()).is_none(), "duplicate op {}", op.name());
        self.ops.push(op);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Op> {
        self.ops.iter().find(|o| o.name() == name).map(|o| o.as_ref())
    }

    pub fn ops(&self) -> impl Iterator<Item = &dyn Op> {
        self.ops.iter().map(|o| o.as_ref())
    }
}

impl Default for OpRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl StepContext<'_> {
    fn param(&self, key: &str) -> Option<&Value> {
        self.params.get(key).filter(|v| !v.is_null())
    }

    fn u64_param(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.param(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| usage(format!("parameter {key:?} must be a nonnegative integer"))),
        }
    }

    fn require_u64(&self, key: &str) -> Result<u64, CliError> {
        self.u64_param(key)?.ok_or_else(|| usage(format!("missing parameter {key:?}")))
    }

    fn str_param(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.param(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| usage(format!("parameter {key:?} must be a string"))),
        }
    }

    fn bool_param(&self, key: &str) -> Result<bool, CliError> {
        match self.param(key) {
            None => Ok(false),
            Some(v) => v.as_bool().ok_or_else(|| usage(format!("parameter {key:?} must be true or false"))),
        }
    }

    pub fn resolve_path(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn input(&self, name: &str, kind: ArtifactKind) -> Result<Option<Artifact>, CliError> {
        let Some(r) = self.inputs.get(name) else { return Ok(None) };
        let a = match r {
            InputRef::Step(id) => {
                self.artifacts.get(id).cloned().ok_or_else(|| usage(format!("input {name:?}: step {id:?} has no output")))?
            }
            InputRef::File(path) => Artifact::read(kind, path)?,
        };
        if a.kind() != kind {
            return Err(usage(format!("input {name:?} is a {}, expected a {kind}", a.kind())));
        }
        Ok(Some(a))
    }

    fn family_input(&self, name: &str) -> Result<Option<DesignFamily>, CliError> {
        Ok(match self.input(name, ArtifactKind::Family)? {
            Some(Artifact::Family(f)) => Some(f),
            _ => None,
        })
    }

    /// The family from input `name`, or the catalog entry named by `catalog`.
    fn family_source(&self, name: &str) -> Result<DesignFamily, CliError> {
        if let Some(f) = self.family_input(name)? {
            return Ok(f);
        }
        match self.str_param("catalog")? {
            Some(r) => Ok(Catalog::standard().family(r)?),
            None => Err(usage(format!("needs input {name:?} or parameter \"catalog\""))),
        }
    }

    /// Lifting datum from input `data`, or the catalog entry named by `catalog`.
    fn lifting_source(&self) -> Result<LiftingData, CliError> {
        if let Some(Artifact::Lifting(l)) = self.input("data", ArtifactKind::Lifting)? {
            return Ok(l);
        }
        match self.str_param("catalog")? {
            Some(r) => Ok(Catalog::standard().lifting(r)?),
            None => Err(usage("needs input \"data\" or parameter \"catalog\"")),
        }
    }

    fn design_input(&self, name: &str) -> Result<Option<ResolvableDesign>, CliError> {
        Ok(match self.input(name, ArtifactKind::Design)? {
            Some(Artifact::Design(d)) => Some(d),
            _ => None,
        })
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Runs the verifier that matches the family's kind.
fn verify_by_kind(f: &DesignFamily) -> Result<(bool, Value), CliError> {
    Ok(match f.kind {
        FamilyKind::Sdf => {
            let r = verify_sdf(f)?;
            (r.ok, json!({ "ok": r.ok, "mu": r.mu, "violations": r.violations.len() }))
        }
        FamilyKind::RelativeDf => {
            let r = verify_relative_df(f)?;
            (r.ok, json!({ "ok": r.ok, "lambda": r.lambda, "violations": r.violations.len() }))
        }
        FamilyKind::Fdf => {
            let r = verify_fdf(f)?;
            (
                r.ok,
                json!({
                    "ok": r.ok,
                    "relativeOk": r.relative_ok,
                    "partitionOk": r.partition_ok,
                    "violations": r.violations.len(),
                    "partitionIssues": r.partition_issues,
                }),
            )
        }
        FamilyKind::Pdf => {
            let r = verify_pdf(f)?;
            (r.ok, json!({ "ok": r.ok, "lambda": r.lambda, "composition": r.composition, "violations": r.violations.len() }))
        }
    })
}

fn family_facts(f: &DesignFamily) -> Value {
    json!({
        "kind": f.kind,
        "groupOrder": f.group.order(),
        "subgroupOrder": f.subgroup.as_ref().map(|n| n.order()),
        "blocks": f.blocks.len(),
        "blockSize": f.block_size(),
        "lambda": f.lambda,
        "provenance": f.provenance,
    })
}

struct CatalogList;

impl Op for CatalogList {
    fn name(&self) -> &'static str {
        "catalog-list"
    }
    fn description(&self) -> &'static str {
        "every catalog entry with its default parameters, provenance and verification status"
    }
    fn run(&self, _ctx: &StepContext) -> Result<StepOutput, CliError> {
        let cat = Catalog::standard();
        let entries: Vec<_> = cat.entries().collect();
        let rows: Vec<Value> = entries
            .par_iter()
            .map(|e| {
                let fam = e.family(e.default_params());
                let (verified, facts) = match &fam {
                    Ok(f) => (verify_by_kind(f).map(|r| r.0).ok(), family_facts(f)),
                    Err(err) => (None, json!({ "error": err.to_string() })),
                };
                json!({
                    "name": e.name(),
                    "params": e.params(),
                    "defaults": e.default_params(),
                    "description": e.description(),
                    "hasLifting": e.has_lifting(),
                    "verified": verified,
                    "family": facts,
                })
            })
            .collect();
        let mut text = String::new();
        for r in &rows {
            let defaults = r["defaults"].as_array().map(|a| a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
            let name = match defaults.as_deref() {
                Some(d) if !d.is_empty() => format!("{}:{d}", r["name"].as_str().unwrap_or("")),
                _ => r["name"].as_str().unwrap_or("").to_string(),
            };
            let verified = match r["verified"].as_bool() {
                Some(b) => yes_no(b),
                None => "-",
            };
            text.push_str(&format!(
                "{name:<16} {:>5} blocks  verified: {verified:<3}  {}\n",
                r["family"]["blocks"],
                r["description"].as_str().unwrap_or("")
            ));
        }
        Ok(StepOutput::new(None, None, json!({ "entries": rows }), text.trim_end()))
    }
}

struct CatalogShow;

impl Op for CatalogShow {
    fn name(&self) -> &'static str {
        "catalog"
    }
    fn description(&self) -> &'static str {
        "one catalog family, verified according to its kind (parameter name, e.g. \"paley3:37\")"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let name = ctx.str_param("name")?.ok_or_else(|| usage("missing parameter \"name\""))?;
        let cat = Catalog::standard();
        let (entry, params) = cat.resolve(name)?;
        let fam = entry.family(&params)?;
        let (ok, verification) = verify_by_kind(&fam)?;
        let report = json!({
            "name": entry.name(),
            "params": params,
            "description": entry.description(),
            "family": family_facts(&fam),
            "verification": verification,
        });
        let text = format!(
            "{}: {} blocks of size {}, |G| = {}, lambda = {}\nprovenance: {}\nverified: {}",
            entry.name(),
            fam.blocks.len(),
            fam.block_size().map_or("mixed".into(), |k| k.to_string()),
            fam.group.order(),
            fam.lambda,
            fam.provenance,
            yes_no(ok)
        );
        Ok(StepOutput::new(Some(Artifact::Family(fam)), Some(ok), report, text))
    }
}

struct LiftingOf;

impl Op for LiftingOf {
    fn name(&self) -> &'static str {
        "lifting"
    }
    fn description(&self) -> &'static str {
        "the lifting datum behind a catalog frame (parameter catalog)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let data = ctx.lifting_source()?;
        let a = Artifact::Lifting(data);
        let text = a.describe();
        Ok(StepOutput::new(Some(a), None, json!({ "object": text }), text))
    }
}

fn condition_summary(data: &LiftingData) -> Result<(bool, Value, String), CliError> {
    let r = check_lifting_conditions(data)?;
    let parts = r.failing_parts();
    let diffs = r.failing_differences();
    let report = json!({
        "ok": r.ok,
        "failingDifferences": diffs.iter().map(|&h| data.sdf.group.encode(h)).collect::<Vec<_>>(),
        "failingParts": parts,
        "zeroPhi": r.zero_phi,
    });
    let text = format!(
        "lifting conditions: {} ({} failing differences, {} failing parts, {} zero values)",
        if r.ok { "pass" } else { "FAIL" },
        diffs.len(),
        parts.len(),
        r.zero_phi.len()
    );
    Ok((r.ok, report, text))
}

struct CheckLifting;

impl Op for CheckLifting {
    fn name(&self) -> &'static str {
        "check-lifting"
    }
    fn description(&self) -> &'static str {
        "the two cyclotomic conditions of a lifting datum (input data or parameter catalog)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let data = ctx.lifting_source()?;
        let (ok, report, text) = condition_summary(&data)?;
        Ok(StepOutput::new(None, Some(ok), report, text))
    }
}

struct Lift;

impl Op for Lift {
    fn name(&self) -> &'static str {
        "lift"
    }
    fn description(&self) -> &'static str {
        "the frame difference family of a lifting datum (input data or parameter catalog)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let data = ctx.lifting_source()?;
        let fam = lift_sdf(&data)?;
        let (ok, verification) = verify_by_kind(&fam)?;
        let a = Artifact::Family(fam);
        let text = format!("{}\nverified: {}", a.describe(), yes_no(ok));
        Ok(StepOutput::new(Some(a), Some(ok), json!({ "verification": verification }), text))
    }
}

struct Search;

impl Op for Search {
    fn name(&self) -> &'static str {
        "search"
    }
    fn description(&self) -> &'static str {
        "solves a constraint system (generic, paired, paley3, z125) for a lifting datum"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let system = ctx.str_param("system")?.ok_or_else(|| usage("missing parameter \"system\""))?;
        let sdf = match ctx.family_input("sdf")? {
            Some(f) => Some(f),
            None => match ctx.str_param("sdf")? {
                Some(r) => Some(Catalog::standard().family(r)?),
                None => None,
            },
        };
        let partition = match ctx.param("partition") {
            None => None,
            Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| usage(format!("partition: {e}")))?),
        };
        let req = SystemRequest {
            sdf,
            q: ctx.require_u64("q")?,
            e: ctx.u64_param("e")?,
            d: ctx.u64_param("d")?,
            lambda: ctx.u64_param("lambda")?,
            partition,
            p: ctx.u64_param("p")?,
            tie_duplicates: ctx.bool_param("tie_duplicates")?,
        };
        let sys = SystemRegistry::standard().build(system, &req)?;
        let budget = ctx.u64_param("budget")?.unwrap_or(DEFAULT_BUDGET);
        let outcome = match ctx.param("seeds") {
            Some(v) => {
                let seeds: Vec<u64> = serde_json::from_value(v.clone()).map_err(|e| usage(format!("seeds: {e}")))?;
                solve_any(&sys, &seeds, budget)?
            }
            None => solve(&sys, ctx.u64_param("seed")?.unwrap_or(ctx.seed), budget)?,
        };
        match outcome.status {
            SolveStatus::Solved => {}
            SolveStatus::BudgetExceeded => return Err(CliError::Budget(outcome.nodes)),
            SolveStatus::Exhausted => {
                return Err(failed(format!("{}: no assignment exists ({} values tried)", sys.name, outcome.nodes)))
            }
        }
        let values = outcome.assignment.as_ref().expect("solved outcomes carry an assignment");
        let data = outcome.lifting_data(&sys).ok_or_else(|| failed("the solution does not assemble a lifting datum"))?;
        let (ok, conditions, check) = condition_summary(&data)?;
        let summary = sys.summary();
        let report = json!({
            "system": sys.name,
            "unknowns": summary.unknowns,
            "seed": outcome.seed,
            "nodes": outcome.nodes,
            "attempts": outcome.attempts,
            "assignment": values.to_json(&sys),
            "conditions": conditions,
        });
        let text = format!(
            "{}: solved with seed {} after {} values ({} unknowns)\n{check}",
            sys.name, outcome.seed, outcome.nodes, summary.unknowns
        );
        Ok(StepOutput::new(Some(Artifact::Lifting(data)), Some(ok), report, text))
    }
}

struct Repair;

impl Op for Repair {
    fn name(&self) -> &'static str {
        "repair"
    }
    fn description(&self) -> &'static str {
        "re-solves suspect phi positions (\"zeros\" or a list of [block, position]); widen: never, always or on-failure"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let data = ctx.lifting_source()?;
        let suspects: Vec<(usize, usize)> = match ctx.param("suspects") {
            None => check_lifting_conditions(&data)?.zero_phi,
            Some(Value::String(s)) if s == "zeros" => check_lifting_conditions(&data)?.zero_phi,
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("suspects: {e}")))?,
        };
        let widen = ctx.str_param("widen")?.unwrap_or("on-failure");
        let budget = ctx.u64_param("budget")?.unwrap_or(DEFAULT_BUDGET);
        let mut attempts = Vec::new();
        let outcome = match widen {
            "always" => repair_block(&data, &widen_to_blocks(&data, &suspects), budget)?,
            "never" => repair_block(&data, &suspects, budget)?,
            "on-failure" => match repair_block(&data, &suspects, budget) {
                Ok(o) => o,
                Err(SearchError::NoCompletion) => {
                    attempts.push(json!({ "positions": suspects, "result": "no completion" }));
                    repair_block(&data, &widen_to_blocks(&data, &suspects), budget)?
                }
                Err(e) => return Err(e.into()),
            },
            other => return Err(usage(format!("widen must be never, always or on-failure, not {other:?}"))),
        };
        let (ok, conditions, check) = condition_summary(&outcome.data)?;
        let report = json!({
            "suspects": suspects,
            "failedAttempts": attempts,
            "positions": outcome.positions,
            "nodes": outcome.nodes,
            "conditions": conditions,
        });
        let mut text = String::new();
        if !attempts.is_empty() {
            text.push_str(&format!("suspects {suspects:?}: no completion, widened to whole blocks\n"));
        }
        text.push_str(&format!("repaired {} positions after {} values\n{check}", outcome.positions.len(), outcome.nodes));
        Ok(StepOutput::new(Some(Artifact::Lifting(outcome.data)), Some(ok), report, text))
    }
}

struct VerifyFamily;

impl Op for VerifyFamily {
    fn name(&self) -> &'static str {
        "verify-family"
    }
    fn description(&self) -> &'static str {
        "checks an SDF, relative DF, FDF or PDF according to its kind (input family or parameter catalog)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let fam = ctx.family_source("family")?;
        let (ok, verification) = verify_by_kind(&fam)?;
        let text = format!("{}\nverified: {}", Artifact::Family(fam.clone()).describe(), yes_no(ok));
        Ok(StepOutput::new(None, Some(ok), json!({ "family": family_facts(&fam), "verification": verification }), text))
    }
}

struct FdfToPdf;

impl Op for FdfToPdf {
    fn name(&self) -> &'static str {
        "fdf-to-pdf"
    }
    fn description(&self) -> &'static str {
        "the partitioned difference family of an elementary FDF (input fdf or parameter catalog)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let fdf = ctx.family_source("fdf")?;
        let pdf = fdf_to_pdf(&fdf)?;
        let (ok, verification) = verify_by_kind(&pdf)?;
        let a = Artifact::Family(pdf);
        let text = format!("{}\nverified: {}", a.describe(), yes_no(ok));
        Ok(StepOutput::new(Some(a), Some(ok), json!({ "verification": verification }), text))
    }
}

struct ComposeDm;

impl Op for ComposeDm {
    fn name(&self) -> &'static str {
        "compose-dm"
    }
    fn description(&self) -> &'static str {
        "an FDF over G x H from an FDF over G and a homogeneous matrix over H (input dm, or parameter field for the homogenized multiplication table of GF(q))"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let fdf = ctx.family_source("fdf")?;
        let dm: DifferenceMatrix = match ctx.input("dm", ArtifactKind::Matrix)? {
            Some(Artifact::Matrix(m)) => m,
            _ => {
                let q = ctx.require_u64("field")?;
                let (p, m) = prime_power(q).ok_or_else(|| usage(format!("{q} is not a prime power")))?;
                let f = FiniteField::new(p, m).map_err(|e| usage(e.to_string()))?;
                homogenize(&mul_table_dm(&f))?
            }
        };
        let out = compose_fdf_dm(&fdf, &dm)?;
        let (ok, verification) = verify_by_kind(&out)?;
        let a = Artifact::Family(out);
        let text = format!("{}\nverified: {}", a.describe(), yes_no(ok));
        Ok(StepOutput::new(Some(a), Some(ok), json!({ "verification": verification }), text))
    }
}

fn design_checks(d: &ResolvableDesign) -> (bool, Value, String) {
    let b = verify_bibd(&d.design);
    let r = verify_resolution(&d.design, &d.resolution);
    let ok = b.ok && r.ok;
    let report = json!({
        "v": d.design.v,
        "k": d.design.k,
        "lambda": d.design.lambda,
        "blocks": d.design.blocks.len(),
        "classes": d.resolution.classes.len(),
        "pairsChecked": b.pairs_checked,
        "deficientPairs": b.deficient_pairs,
        "bibdIssues": b.issues,
        "resolutionOk": r.ok,
        "resolutionIssues": r.issues.iter().take(20).collect::<Vec<_>>(),
    });
    let text = format!(
        "({},{},{}) design: {} blocks, {} classes; pairs checked {}, deficient {}; resolution {}",
        d.design.v,
        d.design.k,
        d.design.lambda,
        d.design.blocks.len(),
        d.resolution.classes.len(),
        b.pairs_checked,
        b.deficient_pairs,
        if r.ok { "ok" } else { "FAILS" }
    );
    (ok, report, text)
}

struct TrivialRbibd;

impl Op for TrivialRbibd {
    fn name(&self) -> &'static str {
        "trivial-rbibd"
    }
    fn description(&self) -> &'static str {
        "the (k,k,1) design with one block (parameter k)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let d = trivial_rbibd(ctx.require_u64("k")? as usize).map_err(|e| usage(e.to_string()))?;
        let (ok, report, text) = design_checks(&d);
        Ok(StepOutput::new(Some(Artifact::Design(d)), Some(ok), report, text))
    }
}

struct AffinePlane;

impl Op for AffinePlane {
    fn name(&self) -> &'static str {
        "affine-plane"
    }
    fn description(&self) -> &'static str {
        "the affine plane of order q as a (q^2,q,1)-RBIBD (parameter q)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let d = affine_plane(ctx.require_u64("q")?).map_err(|e| usage(e.to_string()))?;
        let (ok, report, text) = design_checks(&d);
        Ok(StepOutput::new(Some(Artifact::Design(d)), Some(ok), report, text))
    }
}

struct Assemble;

impl Op for Assemble {
    fn name(&self) -> &'static str {
        "assemble"
    }
    fn description(&self) -> &'static str {
        "the RBIBD on G and a point at infinity from an FDF and an ingredient RBIBD (input ingredient, or parameter ingredient: trivial or affine)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let fdf = ctx.family_source("fdf")?;
        let k = fdf.block_size().ok_or_else(|| failed("the family has blocks of different sizes"))?;
        let ingredient = match ctx.design_input("ingredient")? {
            Some(d) => d,
            None => match ctx.str_param("ingredient")?.unwrap_or("trivial") {
                "trivial" => trivial_rbibd(k)?,
                "affine" => affine_plane(k as u64)?,
                other => return Err(usage(format!("ingredient must be trivial or affine, not {other:?}"))),
            },
        };
        let d = rbibd_from_fdf(&fdf, &ingredient)?;
        let a = Artifact::Design(d);
        let text = a.describe();
        Ok(StepOutput::new(Some(a), None, json!({ "object": text }), text))
    }
}

struct VerifyDesign;

impl Op for VerifyDesign {
    fn name(&self) -> &'static str {
        "verify-design"
    }
    fn description(&self) -> &'static str {
        "pair coverage and resolution of a design; rotational: group or cyclic checks the action of the group of input fdf"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let d = ctx.design_input("design")?.ok_or_else(|| usage("needs input \"design\""))?;
        let (mut ok, mut report, mut text) = design_checks(&d);
        let rotational = ctx.str_param("rotational")?.unwrap_or("none");
        if rotational != "none" {
            let fdf = ctx.family_source("fdf")?;
            let rot = match rotational {
                "group" => RotationalStructure::of_group(&fdf.group),
                "cyclic" => RotationalStructure::through(&CrtIso::new(&fdf.group).map_err(|e| failed(e.to_string()))?),
                other => return Err(usage(format!("rotational must be none, group or cyclic, not {other:?}"))),
            };
            let r = if ctx.bool_param("full")? {
                verify_one_rotational_full(&d.design, &d.resolution, &rot)
            } else {
                verify_one_rotational(&d.design, &d.resolution, &rot)
            };
            ok &= r.ok;
            report["rotational"] = json!({
                "group": rot.group.descriptor(),
                "ok": r.ok,
                "elementsChecked": r.elements_checked,
                "issues": r.issues.iter().take(20).collect::<Vec<_>>(),
            });
            text.push_str(&format!(
                "\n1-rotational under a group of order {}: {} ({} elements checked)",
                rot.group.order(),
                if r.ok { "ok" } else { "FAILS" },
                r.elements_checked
            ));
        }
        report["ok"] = json!(ok);
        text.push_str(&format!("\nverified: {}", yes_no(ok)));
        Ok(StepOutput::new(None, Some(ok), report, text))
    }
}

struct Import;

impl Op for Import {
    fn name(&self) -> &'static str {
        "import"
    }
    fn description(&self) -> &'static str {
        "reads an RBIBD file (parameter path) and accepts it only if it verifies"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let path = ctx.resolve_path(ctx.str_param("path")?.ok_or_else(|| usage("missing parameter \"path\""))?);
        let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let d = import_rbibd(&text).map_err(|e| match e {
            fdf_core::designs::DesignError::Json(j) => usage(format!("{}: {j}", path.display())),
            other => failed(other.to_string()),
        })?;
        let (ok, report, summary) = design_checks(&d);
        Ok(StepOutput::new(Some(Artifact::Design(d)), Some(ok), report, summary))
    }
}

fn ccc_facts(c: &Ccc) -> Value {
    json!({
        "n": c.n,
        "M": c.size(),
        "q": c.q,
        "d": c.d(),
        "distanceExhaustive": c.distance.exhaustive,
        "composition": c.composition_profile(),
    })
}

struct CccFromPdf;

impl Op for CccFromPdf {
    fn name(&self) -> &'static str {
        "ccc-from-pdf"
    }
    fn description(&self) -> &'static str {
        "the constant composition code of a PDF (input pdf, or input fdf / parameter catalog converted first)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let pdf = match ctx.family_input("pdf")? {
            Some(p) => p,
            None => fdf_to_pdf(&ctx.family_source("fdf")?)?,
        };
        let c = ccc_from_pdf(&pdf)?;
        let report = ccc_facts(&c);
        let a = Artifact::Ccc(c);
        let text = a.describe();
        Ok(StepOutput::new(Some(a), None, report, text))
    }
}

struct VerifyCcc;

impl Op for VerifyCcc {
    fn name(&self) -> &'static str {
        "verify-ccc"
    }
    fn description(&self) -> &'static str {
        "recomputes composition and distances of a CCC; optimal: true also requires M to meet the bound"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let c = match ctx.input("ccc", ArtifactKind::Ccc)? {
            Some(Artifact::Ccc(c)) => c,
            _ => return Err(usage("needs input \"ccc\"")),
        };
        let r = verify_ccc(&c);
        let optimal = ctx.bool_param("optimal")?;
        let ok = r.ok && (!optimal || r.meets_bound);
        let text = format!(
            "({},{},{})_{} CCC: composition and distance {}; bound {}, met: {}\nverified: {}",
            r.n,
            r.m,
            r.d,
            r.q,
            if r.ok { "ok" } else { "FAIL" },
            r.bound.as_deref().unwrap_or("inapplicable"),
            yes_no(r.meets_bound),
            yes_no(ok)
        );
        let report = serde_json::to_value(&r).expect("report serializes");
        Ok(StepOutput::new(None, Some(ok), report, text))
    }
}

struct FhsFromFdf;

impl Op for FhsFromFdf {
    fn name(&self) -> &'static str {
        "fhs-from-fdf"
    }
    fn description(&self) -> &'static str {
        "the frequency-hopping sequence of an elementary FDF, read over the cyclic image of its group"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let fdf = cyclic_image(&ctx.family_source("fdf")?)?;
        let x = fhs_from_elementary_fdf(&fdf)?;
        let report = json!({ "n": x.n(), "l": x.alphabet_size });
        let a = Artifact::Fhs(x);
        let text = a.describe();
        Ok(StepOutput::new(Some(a), None, report, text))
    }
}

struct VerifyFhs;

impl Op for VerifyFhs {
    fn name(&self) -> &'static str {
        "verify-fhs"
    }
    fn description(&self) -> &'static str {
        "compares H(X;L) with the bound for every window length L"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let x: Fhs = match ctx.input("fhs", ArtifactKind::Fhs)? {
            Some(Artifact::Fhs(x)) => x,
            _ => return Err(usage("needs input \"fhs\"")),
        };
        let r = verify_strictly_optimal(&x)?;
        let report = json!({
            "ok": r.ok,
            "n": r.n,
            "l": r.alphabet_size,
            "failing": r.failing.len(),
            "firstFailing": r.failing.first().map(|&(l, h, b)| json!({ "L": l, "H": h, "bound": b })),
        });
        let text = match r.failing.first() {
            None => format!("FHS of length {} over {} symbols: strictly optimal for every L\nverified: yes", r.n, r.alphabet_size),
            Some(&(l, h, b)) => format!(
                "FHS of length {} over {} symbols: {} window lengths fail, first L = {l} with H = {h}, bound {b}\nverified: no",
                r.n,
                r.alphabet_size,
                r.failing.len()
            ),
        };
        Ok(StepOutput::new(None, Some(r.ok), report, text))
    }
}

struct QBoundOp;

impl Op for QBoundOp {
    fn name(&self) -> &'static str {
        "qbound"
    }
    fn description(&self) -> &'static str {
        "the threshold Q(d,m) (parameters d, m, optional digits)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let d = ctx.require_u64("d")?;
        let m = ctx.require_u64("m")?;
        if d == 0 || m == 0 {
            return Err(usage("Q(d,m) needs d, m >= 1"));
        }
        let digits = ctx.u64_param("digits")?.unwrap_or(6).clamp(1, 60) as usize;
        let b = q_bound(d, m);
        let value = b.format_sig(digits);
        let report = json!({
            "d": d,
            "m": m,
            "U": b.u().to_string(),
            "value": value,
            "floor": b.floor_u128().map(|x| x.to_string()),
        });
        Ok(StepOutput::new(Some(Artifact::Report(report.clone())), None, report, format!("Q({d},{m}) = {value}")))
    }
}

struct Recursion;

impl Op for Recursion {
    fn name(&self) -> &'static str {
        "recursion"
    }
    fn description(&self) -> &'static str {
        "point count and ingredients of a recursive (v,8,1)-RBIBD rule (parameters rule: aGre or aGreBis, m, n)"
    }
    fn run(&self, ctx: &StepContext) -> Result<StepOutput, CliError> {
        let rule: RecursionRule = ctx
            .str_param("rule")?
            .ok_or_else(|| usage("missing parameter \"rule\""))?
            .parse()
            .map_err(|e: fdf_core::designs::DesignError| usage(e.to_string()))?;
        let p = recursion_params(rule, ctx.require_u64("m")?, ctx.require_u64("n")?).map_err(|e| usage(e.to_string()))?;
        let report = serde_json::to_value(&p).expect("parameters serialize");
        let text = format!(
            "v = {}: ingredients {:?}-point RBIBDs and TD({}, {})",
            p.v, p.ingredients, p.transversal_design.0, p.transversal_design.1
        );
        Ok(StepOutput::new(Some(Artifact::Report(report.clone())), None, report, text))
    }
}
