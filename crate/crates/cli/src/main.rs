//! Command-line front end: JSON in, JSON out.
//!
//! Exit codes: 0 on success or a passing verification, 1 when a hypothesis
//! or a verification fails (the message names the condition), 2 on I/O,
//! format or usage errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperdetach::constructors::baranyai::baranyai_connected;
use hyperdetach::constructors::nonuniform::{factorize_nonuniform, FactorizationProblem};
use hyperdetach::constructors::partial::{embed_partial_r, PartialProblem};
use hyperdetach::constructors::pieces::{embed_friendly, embed_minus_v, PiecesProblem};
use hyperdetach::constructors::regular::{embed_r_to_s, RegularProblem};
use hyperdetach::constructors::{ConditionCheck, Construction};
use hyperdetach::verify::{verify_detachment, verify_extension, verify_factorization, ClassSpec, CompleteTarget};
use hyperdetach::wings::WingKind;
use hyperdetach::{detach_with, wing_decomposition, DetachOptions, Hypergraph, VertexId};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hyperdetach", version, about = "Fair detachments and connected factorizations of hypergraphs")]
struct Cli {
    /// Print every checked condition with its values to stderr.
    #[arg(long, global = true)]
    explain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split one vertex into fair, connectivity-preserving parts.
    Detach {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vertex: u32,
        #[arg(long)]
        parts: u32,
        /// Re-check the step invariants after every step.
        #[arg(long)]
        verify_steps: bool,
        /// Include the hinge families of every step in the output.
        #[arg(long)]
        dump_families: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Wing decomposition at a vertex, for one color or all edges.
    Wings {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vertex: u32,
        #[arg(long)]
        color: Option<u32>,
        #[command(flatten)]
        out: Output,
    },
    /// Decompose lambda K_n^h into almost regular classes of the given sizes.
    Baranyai {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Extend an r-factorization of lambda K_m^h to lambda K_n^h.
    EmbedPartial {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Extend a colored hypergraph with edges of size at most h to lambda K_n^h.
    EmbedMinusV {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Remove vertices from a factorization and embed what is left.
    EmbedFriendly {
        #[arg(long)]
        input: PathBuf,
        /// Vertices to remove.
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<u32>,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Extend an r-factorization of lambda K_m^h to an s-factorization of lambda K_n^h.
    EmbedRs {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        s: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Factorize the complete hypergraph with edge sizes H and multiplicities Lambda.
    Rfactor {
        #[arg(long)]
        n: u64,
        #[arg(long = "h", value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<u64>,
        /// Class degrees, or the upper ends of the degree windows with --q.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        /// Lower ends of the degree windows.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<u64>>,
        /// Classes (1-based) that must be connected.
        #[arg(long, value_delimiter = ',')]
        connected: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a detachment, a factorization or an extension.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Params {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    #[arg(long)]
    h: u64,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Detachment,
    Factorization,
    Extension,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// The hypergraph before detachment or extension.
    #[arg(long)]
    original: Option<PathBuf>,
    /// The hypergraph to check; for detachments, the output of `detach`.
    #[arg(long)]
    input: PathBuf,
    /// Edge sizes of the complete target.
    #[arg(long = "h", value_delimiter = ',')]
    sizes: Vec<u32>,
    /// Multiplicity of each edge size of the complete target.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<u64>,
    /// Class degrees, or the upper ends of the degree windows with --q.
    #[arg(long, value_delimiter = ',')]
    r: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    /// Class sizes of an almost regular decomposition.
    #[arg(long = "class-sizes", value_delimiter = ',')]
    class_sizes: Vec<u64>,
}

/// Detachment as written by `detach`.
#[derive(Deserialize)]
struct DetachmentFile {
    hypergraph: Hypergraph,
    parts: Vec<VertexId>,
    psi: BTreeMap<VertexId, VertexId>,
}

enum Failure {
    /// A hypothesis or a verification failed.
    Unmet(String),
    /// I/O, format or usage error.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Unmet(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<hyperdetach::Error> for Failure {
    fn from(e: hyperdetach::Error) -> Self {
        Failure::Unmet(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Unmet(m) | Failure::Input(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}

/// Reads a bare hypergraph or any output of this tool holding one under
/// `hypergraph`.
fn read_hypergraph(path: &Path) -> Result<Hypergraph, Failure> {
    let text = read(path)?;
    let bad = |e: String| Failure::Input(format!("{}: {e}", path.display()));
    let mut value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if let Some(inner) = value.get_mut("hypergraph") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| bad(format!("invalid hypergraph: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(value: &impl Serialize, out: &Output) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    text.push('\n');
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => to_stdout(&text),
    }
}

fn to_stdout(text: &str) -> Outcome {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Input(format!("cannot write to stdout: {e}")))
}

fn explain(on: bool, checks: &[ConditionCheck]) {
    if on {
        for c in checks {
            eprintln!("{} {}: {}", if c.holds { "holds" } else { "fails" }, c.name, c.detail);
        }
    }
}

fn construction(cli: &Cli, c: Construction, out: &Output) -> Outcome {
    explain(cli.explain, &c.checks);
    emit(&c, out)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Detach { input, vertex, parts, verify_steps, dump_families, out } => {
            let g = read_hypergraph(input)?;
            let opts = DetachOptions { verify_steps: *verify_steps, record_families: *dump_families };
            let res = detach_with(&g, VertexId(*vertex), *parts, opts)?;
            let mut value = serde_json::to_value(&res).map_err(|e| Failure::Input(e.to_string()))?;
            if *dump_families {
                value["families"] = serde_json::to_value(&res.families).map_err(|e| Failure::Input(e.to_string()))?;
            }
            emit(&value, out)
        }
        Command::Wings { input, vertex, color, out } => {
            let g = read_hypergraph(input)?;
            let d = wing_decomposition(&g, VertexId(*vertex), *color)?;
            let wings: Vec<Value> = d
                .wings
                .iter()
                .map(|w| {
                    json!({
                        "kind": if w.kind == WingKind::Small { "small" } else { "large" },
                        "degree": w.degree(),
                        "edges": w.edges,
                        "vertices": w.vertices,
                        "hinges": w.hinges,
                    })
                })
                .collect();
            let value = json!({
                "alpha": d.alpha,
                "color": d.color,
                "omega": d.omega(),
                "margin": d.margin(),
                "wings": wings,
                "remote": d.remote,
            });
            emit(&value, out)
        }
        Command::Baranyai { n, h, lambda, sizes, out } => {
            construction(cli, baranyai_connected(*n, *h, *lambda, sizes)?, out)
        }
        Command::EmbedPartial { input, params, out } => {
            let g = read_hypergraph(input)?;
            let p = PartialProblem { n: params.n, r: params.r, lambda: params.lambda, h: params.h };
            construction(cli, embed_partial_r(&g, p)?, out)
        }
        Command::EmbedMinusV { input, params, out } => {
            let g = read_hypergraph(input)?;
            construction(cli, embed_minus_v(&g, pieces(params))?, out)
        }
        Command::EmbedFriendly { input, remove, params, out } => {
            let g = read_hypergraph(input)?;
            let removed: BTreeSet<VertexId> = remove.iter().map(|&x| VertexId(x)).collect();
            let res = embed_friendly(&g, &removed, pieces(params))?;
            explain(cli.explain, &res.construction.checks);
            emit(&res, out)
        }
        Command::EmbedRs { input, params, s, out } => {
            let g = read_hypergraph(input)?;
            let p = RegularProblem { n: params.n, r: params.r, s: *s, lambda: params.lambda, h: params.h };
            construction(cli, embed_r_to_s(&g, p)?, out)
        }
        Command::Rfactor { n, sizes, lambda, r, q, connected, out } => {
            let k = r.len();
            if let Some(&bad) = connected.iter().find(|&&i| i == 0 || i > k) {
                return Err(Failure::Input(format!("class {bad} is not in 1..={k}")));
            }
            let mask: Vec<bool> = (1..=k).map(|i| connected.contains(&i)).collect();
            let p = FactorizationProblem { n: *n, lambda: lambda.clone(), h: sizes.clone(), r: r.clone(), q: q.clone() };
            construction(cli, factorize_nonuniform(&p, &mask)?, out)
        }
        Command::Verify(args) => verify(args),
    }
}

fn pieces(p: &Params) -> PiecesProblem {
    PiecesProblem { n: p.n, r: p.r, lambda: p.lambda, h: p.h }
}

fn original(args: &VerifyArgs) -> Result<Hypergraph, Failure> {
    let path = args.original.as_ref().ok_or_else(|| Failure::Input("--original is required for this mode".into()))?;
    read_hypergraph(path)
}

fn verdict(passed: bool, report: &impl Serialize, what: &str) -> Outcome {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::Input(e.to_string()))?;
    text.push('\n');
    to_stdout(&text)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Unmet(format!("{what} check failed")))
    }
}

fn verify(args: &VerifyArgs) -> Outcome {
    match args.mode {
        Mode::Detachment => {
            let h = original(args)?;
            let text = read(&args.input)?;
            let f: DetachmentFile =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
            let report = verify_detachment(&h, &f.hypergraph, &f.parts, &f.psi)?;
            verdict(report.passed(), &report, "detachment")
        }
        Mode::Factorization => {
            let g = read_hypergraph(&args.input)?;
            if args.sizes.is_empty() || args.sizes.len() != args.lambda.len() {
                return Err(Failure::Input("--h and --lambda must be non-empty lists of equal length".into()));
            }
            let target = CompleteTarget { layers: args.sizes.iter().copied().zip(args.lambda.iter().copied()).collect() };
            let spec = class_spec(args)?;
            let report = verify_factorization(&g, &target, &spec);
            verdict(report.passed(), &report, "factorization")
        }
        Mode::Extension => {
            let g = original(args)?;
            let extended = read_hypergraph(&args.input)?;
            let report = verify_extension(&g, &extended);
            verdict(report.ok, &report, "extension")
        }
    }
}

fn class_spec(args: &VerifyArgs) -> Result<ClassSpec, Failure> {
    match (args.r.is_empty(), args.q.is_empty(), args.class_sizes.is_empty()) {
        (false, true, true) => Ok(ClassSpec::Regular(args.r.clone())),
        (false, false, true) if args.q.len() == args.r.len() => {
            Ok(ClassSpec::Windows(args.q.iter().copied().zip(args.r.iter().copied()).collect()))
        }
        (true, true, false) if args.sizes.len() == 1 => {
            Ok(ClassSpec::AlmostRegular { h: args.sizes[0] as u64, sizes: args.class_sizes.clone() })
        }
        _ => Err(Failure::Input(
            "give --r, or --q and --r of equal length, or --class-sizes with a single --h".into(),
        )),
    }
}
