use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fdf_cli::ops::{InputRef, OpRegistry, StepContext};
use fdf_cli::{run_recipe, usage, CliError, Recipe, EXIT_VERIFICATION};

#[derive(Parser)]
#[command(name = "fdf", version, about = "Frame difference families, the designs and codes built from them, and their verification")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Where a family comes from: a file or a catalog reference.
#[derive(clap::Args)]
struct FamilySource {
    /// Family JSON file.
    file: Option<PathBuf>,
    /// Catalog reference such as `fdf_z7xF89` or `paley3:37`.
    #[arg(long, conflicts_with = "file")]
    catalog: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Browse the built-in families.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Expand a lifting datum into its frame difference family.
    Lift {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the cyclotomic conditions of a lifting datum.
    CheckLifting {
        #[command(flatten)]
        source: FamilySource,
    },
    /// Solve a constraint system for a lifting datum.
    Search {
        /// generic, paired, paley3 or z125.
        #[arg(long)]
        system: String,
        #[arg(long)]
        q: u64,
        /// SDF for the generic and paired systems, as a catalog reference.
        #[arg(long)]
        sdf: Option<String>,
        /// SDF for the generic and paired systems, as a file.
        #[arg(long, conflicts_with = "sdf")]
        sdf_file: Option<PathBuf>,
        #[arg(long)]
        e: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        lambda: Option<u64>,
        /// Parameter of the third-type Paley system.
        #[arg(long)]
        p: Option<u64>,
        /// Give repeated SDF blocks the negated values of their earlier copy.
        #[arg(long)]
        tie_duplicates: bool,
        /// Values tried before giving up (exit 3).
        #[arg(long)]
        budget: Option<u64>,
        /// Race several seeds; the smallest successful seed wins.
        #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-solve suspect positions of a lifting datum.
    Repair {
        #[command(flatten)]
        source: FamilySource,
        /// `zeros`, or a JSON list of [block, position] pairs.
        #[arg(long, default_value = "zeros")]
        suspects: String,
        /// never, always or on-failure.
        #[arg(long, default_value = "on-failure")]
        widen: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a family according to its kind.
    VerifyFamily {
        #[command(flatten)]
        source: FamilySource,
    },
    /// The partitioned difference family of an elementary FDF.
    FdfToPdf {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compose an FDF with the homogenized multiplication table of GF(field).
    ComposeDm {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long)]
        field: Option<u64>,
        /// Homogeneous difference matrix file, instead of --field.
        #[arg(long, conflicts_with = "field")]
        dm: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the RBIBD of an FDF and an ingredient design.
    Assemble {
        #[command(flatten)]
        source: FamilySource,
        /// Ingredient RBIBD file.
        #[arg(long)]
        ingredient: Option<PathBuf>,
        /// Built-in ingredient when no file is given: trivial or affine.
        #[arg(long, conflicts_with = "ingredient")]
        ingredient_kind: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify pair coverage, the resolution and optionally a 1-rotational action.
    VerifyDesign {
        design: PathBuf,
        /// none, group or cyclic; the group is that of --fdf or --catalog.
        #[arg(long, default_value = "none")]
        rotational: String,
        #[arg(long)]
        fdf: Option<PathBuf>,
        #[arg(long, conflicts_with = "fdf")]
        catalog: Option<String>,
        /// Check every group element, not only the generators.
        #[arg(long)]
        full: bool,
    },
    /// Import an RBIBD file, accepting it only if it verifies.
    Import {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The constant composition code of a PDF (or of the PDF of an FDF).
    CccFromPdf {
        /// PDF file.
        pdf: Option<PathBuf>,
        #[arg(long, conflicts_with = "pdf")]
        fdf: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["pdf", "fdf"])]
        catalog: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute composition and distances of a CCC file.
    VerifyCcc {
        ccc: PathBuf,
        /// Also require M to meet the bound.
        #[arg(long)]
        optimal: bool,
    },
    /// The frequency-hopping sequence of an elementary FDF.
    FhsFromFdf {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check strict optimality of a frequency-hopping sequence.
    VerifyFhs { fhs: PathBuf },
    /// The threshold Q(d,m).
    Qbound {
        d: u64,
        m: u64,
        #[arg(long, default_value_t = 6)]
        digits: u64,
    },
    /// Parameters of a recursive (v,8,1)-RBIBD rule.
    Recursion { rule: String, m: u64, n: u64 },
    /// Run a recipe file.
    Run {
        recipe: PathBuf,
        /// Directory for the recipe's artifacts.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// List the operations available to recipes.
    Ops,
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

/// Prints a line; a closed pipe is not an error worth a panic.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// A single op invocation assembled from command-line arguments.
struct Invocation {
    op: &'static str,
    params: Map<String, Value>,
    inputs: BTreeMap<String, InputRef>,
    out: Option<PathBuf>,
}

impl Invocation {
    fn new(op: &'static str) -> Self {
        Invocation { op, params: Map::new(), inputs: BTreeMap::new(), out: None }
    }

    fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    fn opt(self, key: &str, v: Option<impl Into<Value>>) -> Self {
        match v {
            Some(v) => self.param(key, v),
            None => self,
        }
    }

    fn file(mut self, key: &str, path: Option<PathBuf>) -> Self {
        if let Some(p) = path {
            self.inputs.insert(key.into(), InputRef::File(p));
        }
        self
    }

    fn source(self, key: &str, s: FamilySource) -> Self {
        self.file(key, s.file).opt("catalog", s.catalog)
    }

    fn out(mut self, out: Option<PathBuf>) -> Self {
        self.out = out;
        self
    }
}

fn invocation(command: Command) -> Result<Invocation, CliError> {
    Ok(match command {
        Command::Catalog { action: CatalogAction::List } => Invocation::new("catalog-list"),
        Command::Catalog { action: CatalogAction::Show { name } } => Invocation::new("catalog").param("name", name),
        Command::Lift { source, out } => Invocation::new("lift").source("data", source).out(out),
        Command::CheckLifting { source } => Invocation::new("check-lifting").source("data", source),
        Command::Search { system, q, sdf, sdf_file, e, d, lambda, p, tie_duplicates, budget, seeds, out } => {
            let mut inv = Invocation::new("search")
                .param("system", system)
                .param("q", q)
                .opt("sdf", sdf)
                .file("sdf", sdf_file)
                .opt("e", e)
                .opt("d", d)
                .opt("lambda", lambda)
                .opt("p", p)
                .param("tie_duplicates", tie_duplicates)
                .opt("budget", budget)
                .out(out);
            if !seeds.is_empty() {
                inv = inv.param("seeds", seeds);
            }
            inv
        }
        Command::Repair { source, suspects, widen, budget, out } => {
            let suspects: Value = if suspects == "zeros" {
                json!("zeros")
            } else {
                serde_json::from_str(&suspects).map_err(|e| usage(format!("--suspects: {e}")))?
            };
            Invocation::new("repair")
                .source("data", source)
                .param("suspects", suspects)
                .param("widen", widen)
                .opt("budget", budget)
                .out(out)
        }
        Command::VerifyFamily { source } => Invocation::new("verify-family").source("family", source),
        Command::FdfToPdf { source, out } => Invocation::new("fdf-to-pdf").source("fdf", source).out(out),
        Command::ComposeDm { source, field, dm, out } => {
            if field.is_none() && dm.is_none() {
                return Err(usage("compose-dm needs --field or --dm"));
            }
            Invocation::new("compose-dm").source("fdf", source).opt("field", field).file("dm", dm).out(out)
        }
        Command::Assemble { source, ingredient, ingredient_kind, out } => Invocation::new("assemble")
            .source("fdf", source)
            .file("ingredient", ingredient)
            .opt("ingredient", ingredient_kind)
            .out(out),
        Command::VerifyDesign { design, rotational, fdf, catalog, full } => Invocation::new("verify-design")
            .file("design", Some(design))
            .param("rotational", rotational)
            .file("fdf", fdf)
            .opt("catalog", catalog)
            .param("full", full),
        Command::Import { path, out } => {
            Invocation::new("import").param("path", path.to_string_lossy().into_owned()).out(out)
        }
        Command::CccFromPdf { pdf, fdf, catalog, out } => {
            Invocation::new("ccc-from-pdf").file("pdf", pdf).file("fdf", fdf).opt("catalog", catalog).out(out)
        }
        Command::VerifyCcc { ccc, optimal } => {
            Invocation::new("verify-ccc").file("ccc", Some(ccc)).param("optimal", optimal)
        }
        Command::FhsFromFdf { source, out } => Invocation::new("fhs-from-fdf").source("fdf", source).out(out),
        Command::VerifyFhs { fhs } => Invocation::new("verify-fhs").file("fhs", Some(fhs)),
        Command::Qbound { d, m, digits } => Invocation::new("qbound").param("d", d).param("m", m).param("digits", digits),
        Command::Recursion { rule, m, n } => Invocation::new("recursion").param("rule", rule).param("m", m).param("n", n),
        Command::Run { .. } | Command::Ops => unreachable!("handled before"),
    })
}

fn run_single(inv: Invocation, format: Format, seed: u64) -> Result<i32, CliError> {
    let op = OpRegistry::standard().get(inv.op).expect("every subcommand maps to a registered op");
    let artifacts = HashMap::new();
    let ctx = StepContext {
        id: inv.op,
        params: &inv.params,
        inputs: &inv.inputs,
        artifacts: &artifacts,
        base_dir: Path::new("."),
        seed,
    };
    let out = op.run(&ctx)?;
    if let (Some(path), Some(a)) = (&inv.out, &out.artifact) {
        a.write(path)?;
    }
    match format {
        Format::Text => {
            emit(&out.text);
            if let Some(p) = &inv.out {
                emit(&format!("wrote {}", p.display()));
            }
        }
        Format::Json => {
            let v = json!({
                "op": inv.op,
                "verified": out.verified,
                "report": out.report,
                "out": inv.out.as_ref().map(|p| p.display().to_string()),
            });
            emit(&serde_json::to_string_pretty(&v).expect("reports serialize"));
        }
    }
    Ok(if out.verified == Some(false) { EXIT_VERIFICATION } else { 0 })
}

fn run_file(recipe: &Path, out_dir: &Path, format: Format, seed: Option<u64>) -> Result<i32, CliError> {
    let r = Recipe::read(recipe)?;
    let base = recipe.parent().unwrap_or(Path::new("."));
    let summary = run_recipe(&r, base, out_dir, seed)?;
    match format {
        Format::Text => {
            for s in &summary.steps {
                emit(&format!("[{}] {}", s.id, s.text.replace('\n', &format!("\n[{}] ", s.id))));
            }
            emit(&summary.table());
        }
        Format::Json => emit(&serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes")),
    }
    Ok(if summary.ok() { 0 } else { EXIT_VERIFICATION })
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Run { recipe, out_dir } => run_file(&recipe, &out_dir, cli.format, cli.seed),
        Command::Ops => {
            for op in OpRegistry::standard().ops() {
                emit(&format!("{:<16} {}", op.name(), op.description()));
            }
            Ok(0)
        }
        other => run_single(invocation(other)?, cli.format, cli.seed.unwrap_or(0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
