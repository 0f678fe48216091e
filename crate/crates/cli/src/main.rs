mod shorthand;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};
use topoadv::adversary::MessageAdversary;
use topoadv::chr::{iterate_chr, iterate_chr_geometric, GeoComplex, Subdivision, DEFAULT_FACET_BUDGET};
use topoadv::complex::{AbstractComplex, ChromaticComplex, Simplex, ValueOrder};
use topoadv::geometry::{geo_limit, geo_prefix, standard_positions, BaryGeometry, DEFAULT_LIMIT_ROUNDS};
use topoadv::rational::{format_rational, parse_rational, to_f64};
use topoadv::solvability::{build_u, decide, is_maximal, DEFAULT_SEARCH_BUDGET};
use topoadv::{enumerate_ims, ColorlessTask, Condition, Decision, Delta, ProcSet};

use shorthand::ConditionParams;

const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Input(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
        }
    }
}

impl From<topoadv::Error> for CliError {
    fn from(e: topoadv::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Exact combinatorial topology for colorless tasks under message adversaries.
///
/// Outputs are JSON on stdout unless `--out` is given. Arguments starting
/// with `@` name JSON files.
#[derive(Parser, Debug)]
#[command(name = "topoadv", version)]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Maximum number of facets any subdivision may produce.
    #[arg(long, global = true, env = "TOPOADV_BUDGET", default_value_t = DEFAULT_FACET_BUDGET as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    facet_budget: u64,

    /// Maximum number of search nodes for `decide` and `maximal`.
    #[arg(long, global = true, env = "TOPOADV_BUDGET", default_value_t = DEFAULT_SEARCH_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    search_budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Immediate-snapshot instant graphs.
    #[command(subcommand)]
    Ims(ImsCommand),
    /// Standard chromatic subdivision.
    #[command(subcommand)]
    Chr(ChrCommand),
    /// Geometrization of executions.
    #[command(subcommand)]
    Geo(GeoCommand),
    /// Colorless tasks.
    #[command(subcommand)]
    Task(TaskCommand),
    /// Input conditions.
    #[command(subcommand)]
    Condition(ConditionCommand),
    /// The condition complex U: chains of condition members.
    BuildU(SolveArgs),
    /// Decide solvability on U. Exit 0 solvable, 1 unsolvable, 2 budget.
    Decide(SolveArgs),
    /// Check whether a condition is maximal for the task.
    Maximal(SolveArgs),
    /// Dump a geometric subdivision for external viewers.
    Export(ExportArgs),
}

#[derive(Subcommand, Debug)]
enum ImsCommand {
    /// All instant graphs on processes 0..=n.
    Enum {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ChrCommand {
    /// Iterated subdivision of the standard n-simplex or a complex file.
    Subdivide(BaseArgs),
}

#[derive(Args, Debug)]
struct BaseArgs {
    /// Dimension of the standard simplex, or @FILE with a chromatic complex.
    #[arg(long)]
    base: String,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Include exact vertex coordinates.
    #[arg(long)]
    geometric: bool,
}

#[derive(Subcommand, Debug)]
enum GeoCommand {
    /// Positions after a finite prefix, given or sampled from an adversary.
    Prefix {
        /// Letters such as `2|0|1;0,1,2` (ordered partitions), or @FILE.
        #[arg(long, conflicts_with = "adversary", required_unless_present = "adversary")]
        prefix: Option<String>,
        /// Sample the prefix: `iis`, `t=T`, `t=T;r=R`, `core=0|1,2`, or @FILE.
        #[arg(long)]
        adversary: Option<String>,
        /// Number of processes minus one, for sampling.
        #[arg(long, requires = "adversary")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Limit point of an ultimately periodic word.
    Limit {
        /// `head/cycle` with `;`-separated letters, or @FILE.
        #[arg(long)]
        word: String,
        /// Radius bound, as a rational.
        #[arg(long, default_value = "1/1000000")]
        eps: String,
    },
    /// Radial retraction of a point.
    Retract {
        /// Barycentric coordinates, comma separated rationals.
        #[arg(long)]
        point: String,
        /// Retract from these cells of the standard simplex in order; each
        /// cell is a comma separated vertex list.
        #[arg(long, conflicts_with = "condition", required_unless_present = "condition")]
        center: Vec<String>,
        /// Retract onto |U| of this condition; coordinates follow the
        /// ambient vertex ids.
        #[arg(long)]
        condition: Option<String>,
        #[command(flatten)]
        params: ConditionArgs,
    },
}

#[derive(Subcommand, Debug)]
enum TaskCommand {
    /// k-set agreement on the given values.
    Kset {
        #[arg(long)]
        values: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args, Debug)]
struct ConditionArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "0,1")]
    values: String,
}

#[derive(Subcommand, Debug)]
enum ConditionCommand {
    C1(ConditionArgs),
    C2(ConditionArgs),
    /// Validate and normalize a condition file.
    File {
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// `kset:VALUES:k=K` or @FILE.
    #[arg(long, default_value = "kset:0,1:k=1")]
    task: String,
    /// `c1`, `c2`, `full`, `empty`, or @FILE.
    #[arg(long)]
    condition: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Agreement parameter of c1/c2; defaults to the task's k.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Obj,
    Json,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    base: BaseArgs,
}

struct Budgets {
    facets: usize,
    search: u64,
}

enum Outcome {
    Done(String),
    /// Output plus a nonzero exit status that is not an error.
    Status(String, u8),
}

fn pretty(value: &Json) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn to_json(value: &impl serde::Serialize) -> Json {
    serde_json::to_value(value).expect("library types serialize")
}

fn base_complex(base: &str) -> Result<ChromaticComplex, CliError> {
    match base.strip_prefix('@') {
        Some(path) => shorthand::read_json(path.as_ref()),
        None => {
            let n = base.parse::<usize>().map_err(|_| CliError::Usage(format!("--base {base:?} is neither a dimension nor @FILE")))?;
            Ok(AbstractComplex::standard_simplex(n))
        }
    }
}

fn subdivide(args: &BaseArgs, budgets: &Budgets, geometric: bool) -> Result<Subdivision, CliError> {
    let base = base_complex(&args.base)?;
    Ok(if geometric {
        iterate_chr_geometric(&GeoComplex::embed(base), args.rounds, budgets.facets)?
    } else {
        iterate_chr(&base, args.rounds, budgets.facets)?
    })
}

fn subdivision_json(sub: &Subdivision) -> Json {
    let mut out = json!({"complex": to_json(&sub.complex), "carriers": to_json(&sub.carriers)});
    if let Some(coords) = &sub.coords {
        out["coords"] = to_json(coords);
    }
    out
}

/// Regular-simplex positions of the first four barycentric axes; the first
/// three match the planar figure embedding.
fn embed_3d(weights: &[f64]) -> [f64; 3] {
    let corners = [
        [0.0, 0.0, 0.0],
        [0.5, 3f64.sqrt() / 2.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 3f64.sqrt() / 6.0, (2.0f64 / 3.0).sqrt()],
    ];
    let mut p = [0.0; 3];
    for (w, corner) in weights.iter().zip(&corners) {
        for axis in 0..3 {
            p[axis] += w * corner[axis];
        }
    }
    p
}

fn obj(geo: &GeoComplex) -> Result<String, CliError> {
    let ids: Vec<_> = geo.complex.vertex_ids().collect();
    if geo.point(ids[0]).len() > 4 {
        return Err(CliError::Usage("obj export supports dimension at most 3".into()));
    }
    let index: BTreeMap<_, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i + 1)).collect();
    let mut text = String::from("# topoadv chromatic subdivision\n");
    for v in &ids {
        let weights: Vec<f64> = geo.point(*v).weights().iter().map(to_f64).collect();
        let [x, y, z] = embed_3d(&weights);
        writeln!(text, "v {x:.9} {y:.9} {z:.9}").unwrap();
    }
    let mut faces = std::collections::BTreeSet::new();
    for facet in geo.complex.facets() {
        match facet.len() {
            1 => {
                writeln!(text, "p {}", index[&facet.vertices()[0]]).unwrap();
            }
            2 => {
                writeln!(text, "l {} {}", index[&facet.vertices()[0]], index[&facet.vertices()[1]]).unwrap();
            }
            _ => faces.extend(facet.faces().into_iter().filter(|f| f.len() == 3)),
        }
    }
    for face in faces {
        let [a, b, c] = [0, 1, 2].map(|i| index[&face.vertices()[i]]);
        writeln!(text, "f {a} {b} {c}").unwrap();
    }
    Ok(text)
}

fn value_order(list: &str) -> Result<ValueOrder, CliError> {
    Ok(ValueOrder::new(shorthand::values(list)?)?)
}

fn task_k(task: &ColorlessTask) -> Option<usize> {
    match task.delta_spec() {
        Delta::KSet { k } => Some(*k),
        _ => None,
    }
}

fn solve_setup(args: &SolveArgs) -> Result<(ColorlessTask, Condition), CliError> {
    let task = shorthand::task(&args.task)?;
    let k = args
        .k
        .or_else(|| task_k(&task))
        .ok_or_else(|| CliError::Usage("--k is required when the task is not k-set agreement".into()))?;
    let values = ValueOrder::new(task.input().vertex_ids().map(|v| task.input().value(v)))?;
    let params = ConditionParams { n: args.n, t: args.t, k, values: &values };
    let condition = shorthand::condition(&args.condition, &params)?;
    Ok((task, condition))
}

fn pairs_json(condition: &Condition, simplex: &Simplex) -> Json {
    let pairs: Vec<Json> = condition
        .pairs(simplex)
        .into_iter()
        .map(|(p, v)| match p {
            Some(p) => json!({"proc": p, "value": v}),
            None => json!({"value": v}),
        })
        .collect();
    Json::Array(pairs)
}

fn run_geo(command: GeoCommand) -> Result<Outcome, CliError> {
    match command {
        GeoCommand::Prefix { prefix, adversary, n, rounds, seed } => {
            let letters = match (prefix, adversary) {
                (Some(text), _) => shorthand::prefix(&text)?,
                (None, Some(text)) => {
                    let n = n.ok_or_else(|| CliError::Usage("--n is required with --adversary".into()))?;
                    let adversary = MessageAdversary::new(n, shorthand::adversary(&text)?)?;
                    adversary.sample_prefix(None, rounds, seed)?.prefix
                }
                (None, None) => unreachable!("clap requires one of --prefix and --adversary"),
            };
            let n = match letters.first() {
                Some(g) => g.participants().len() - 1,
                None => n.ok_or_else(|| CliError::Usage("an empty prefix needs --n".into()))?,
            };
            if letters.iter().any(|g| g.participants() != ProcSet::full(n)) {
                return Err(CliError::Usage("every letter must have participants 0..=n".into()));
            }
            let positions = geo_prefix(&letters, &standard_positions(n))?;
            let figure: BTreeMap<usize, Json> = positions
                .iter()
                .filter_map(|(p, point)| {
                    point.to_figure().map(|(x, y)| (*p, json!([format_rational(&x), format_rational(&y)])))
                })
                .collect();
            let mut out = json!({"prefix": to_json(&letters), "positions": to_json(&positions)});
            if !figure.is_empty() {
                out["figure"] = to_json(&figure);
            }
            Ok(Outcome::Done(pretty(&out)))
        }
        GeoCommand::Limit { word, eps } => {
            let w = shorthand::word(&word)?;
            let eps = parse_rational(&eps)?;
            let (point, radius) = geo_limit(&w, &eps, DEFAULT_LIMIT_ROUNDS)?;
            let out = json!({"word": to_json(&w), "point": to_json(&point), "radius": format_rational(&radius)});
            Ok(Outcome::Done(pretty(&out)))
        }
        GeoCommand::Retract { point, center, condition, params } => {
            let p = shorthand::point(&point)?;
            let out = match condition {
                None => {
                    let geometry = BaryGeometry::new(AbstractComplex::standard_simplex(p.weights().len() - 1).into_complex());
                    let chain = center.iter().map(|c| shorthand::simplex(c)).collect::<Result<Vec<_>, _>>()?;
                    let retracted = geometry.chain_retract(&p, &chain)?;
                    json!({"point": to_json(&retracted)})
                }
                Some(text) => {
                    let values = value_order(&params.values)?;
                    let k = params.k.unwrap_or(1);
                    let condition = shorthand::condition(&text, &ConditionParams { n: params.n, t: params.t, k, values: &values })?;
                    let geometry = BaryGeometry::new(condition.ambient().clone());
                    let retracted = geometry.retract_outside(&p, |c| !condition.contains(c))?;
                    let in_u = geometry.in_kept_part(&retracted, |c| condition.contains(c))?;
                    json!({"point": to_json(&retracted), "in_u": in_u})
                }
            };
            Ok(Outcome::Done(pretty(&out)))
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let budgets = Budgets {
        facets: usize::try_from(cli.facet_budget).unwrap_or(usize::MAX),
        search: cli.search_budget,
    };
    match cli.command {
        Command::Ims(ImsCommand::Enum { n }) => {
            if n >= topoadv::graph::MAX_PROCESSES {
                return Err(CliError::Usage(format!("n = {n} is too large")));
            }
            let count = topoadv::chr::fubini(n + 1);
            if count > budgets.facets {
                return Err(topoadv::Error::FacetBudget { needed: count, budget: budgets.facets }.into());
            }
            let graphs = enumerate_ims(ProcSet::full(n))?;
            Ok(Outcome::Done(pretty(&json!({"n": n, "count": graphs.len(), "graphs": to_json(&graphs)}))))
        }
        Command::Chr(ChrCommand::Subdivide(args)) => {
            let sub = subdivide(&args, &budgets, args.geometric)?;
            Ok(Outcome::Done(pretty(&subdivision_json(&sub))))
        }
        Command::Geo(command) => run_geo(command),
        Command::Task(TaskCommand::Kset { values, k }) => {
            let task = topoadv::task::make_kset(&shorthand::values(&values)?, k)?;
            Ok(Outcome::Done(pretty(&to_json(&task))))
        }
        Command::Condition(command) => {
            let condition = match command {
                ConditionCommand::C1(args) | ConditionCommand::C2(args) if args.t > args.n => {
                    return Err(CliError::Usage(format!("t = {} exceeds n = {}", args.t, args.n)));
                }
                ConditionCommand::C1(args) => {
                    Condition::c1(args.n, args.t, args.k.unwrap_or(1), &value_order(&args.values)?)?
                }
                ConditionCommand::C2(args) => {
                    Condition::c2(args.n, args.t, args.k.unwrap_or(1), &value_order(&args.values)?)?
                }
                ConditionCommand::File { path } => shorthand::read_json(&path)?,
            };
            Ok(Outcome::Done(pretty(&to_json(&condition))))
        }
        Command::BuildU(args) => {
            let (_, condition) = solve_setup(&args)?;
            let u = build_u(&condition);
            Ok(Outcome::Done(pretty(&to_json(&u.complex))))
        }
        Command::Decide(args) => {
            let (task, condition) = solve_setup(&args)?;
            let u = build_u(&condition);
            let decision = decide(&task, &u, budgets.search)?;
            let text = pretty(&decision.to_json(&task, &u));
            Ok(match decision {
                Decision::Solvable(_) => Outcome::Done(text),
                Decision::Unsolvable => Outcome::Status(text, 1),
                Decision::Budget => Outcome::Status(text, 2),
            })
        }
        Command::Maximal(args) => {
            let (task, condition) = solve_setup(&args)?;
            let result = is_maximal(&task, &condition, budgets.search)?;
            let counterexample = match &result.counterexample {
                Some(c) => pairs_json(&condition, c),
                None => Json::Null,
            };
            Ok(Outcome::Done(pretty(&json!({"maximal": result.maximal, "counterexample": counterexample}))))
        }
        Command::Export(args) => {
            let sub = subdivide(&args.base, &budgets, true)?;
            let geo = sub.geo().expect("geometric subdivision has coordinates");
            Ok(Outcome::Done(match args.format {
                Format::Obj => obj(&geo)?,
                Format::Json => pretty(&subdivision_json(&sub)),
            }))
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    let result = std::panic::catch_unwind(move || run(cli));
    let (text, code) = match result {
        Err(_) => return ExitCode::from(EXIT_INTERNAL),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
        Ok(Ok(Outcome::Done(text))) => (text, 0),
        Ok(Ok(Outcome::Status(text, code))) => (text, code),
    };
    if let Err(e) = emit(&text, out.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    ExitCode::from(code)
}
