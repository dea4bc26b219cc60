use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use paracoherent::algorithms::{self, AlgorithmKind, AlgorithmOptions, OneOf};
use paracoherent::bench::{self, BenchConfig, Instance, InstanceSource};
use paracoherent::engine::{self, Enumerator, SolveStats, SolverOptions};
use paracoherent::oracle::{self, OracleBudget};
use paracoherent::program::{parse, print, Interpretation, Program, Signature};
use paracoherent::transform::{transform, TransformKind};
use paracoherent::Error;

const SCHEMA_VERSION: u32 = 1;

const EXIT_SOLVED: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_MODEL: u8 = 10;
const EXIT_TIMEOUT: u8 = 20;

/// Semi-stable and semi-equilibrium models of ground disjunctive programs.
#[derive(Parser, Debug)]
#[command(name = "paraco", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for the branching order and for random choices.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Wall-clock limit in milliseconds (per instance and algorithm for `bench`).
    #[arg(long = "timeout-ms", global = true)]
    timeout_ms: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Kappa,
    Ht,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Semantics {
    Sst,
    Seq,
}

impl Semantics {
    fn kind(self) -> TransformKind {
        match self {
            Semantics::Sst => TransformKind::Kappa,
            Semantics::Seq => TransformKind::Ht,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Filtering,
    Gc,
    Minimize,
    Split,
    Weak,
}

impl Algorithm {
    fn kind(self) -> AlgorithmKind {
        match self {
            Algorithm::Filtering => AlgorithmKind::Filtering,
            Algorithm::Gc => AlgorithmKind::GuessCheck,
            Algorithm::Minimize => AlgorithmKind::Minimize,
            Algorithm::Split => AlgorithmKind::Split,
            Algorithm::Weak => AlgorithmKind::Weak,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OneOfArg {
    Lowest,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleTarget {
    /// Answer sets of the program itself.
    As,
    Sst,
    Seq,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the epistemic transformation of a program.
    Transform {
        /// Program file, or `-` for standard input.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Kappa)]
        kind: Kind,
        /// Append the gap rules (default).
        #[arg(long = "with-gap", overrides_with = "no_gap")]
        with_gap: bool,
        /// Leave the gap rules out.
        #[arg(long = "no-gap")]
        no_gap: bool,
    },
    /// Compute answer sets (an optimum one when weak constraints are present).
    Solve {
        file: PathBuf,
        /// Enumerate every answer set.
        #[arg(long)]
        all: bool,
        /// Stop after this many answer sets.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compute paracoherent answer sets.
    Paracoherent {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Semantics::Sst)]
        semantics: Semantics,
        #[arg(long, value_enum, default_value_t = Algorithm::Split)]
        algorithm: Algorithm,
        /// List every paracoherent answer set instead of one.
        #[arg(long)]
        all: bool,
        /// How Split picks the next gap atom.
        #[arg(long, value_enum, default_value_t = OneOfArg::Lowest)]
        oneof: OneOfArg,
    },
    /// Exhaustive reference computation.
    #[command(hide = true)]
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleTarget::Sst)]
        semantics: OracleTarget,
        #[arg(long, default_value_t = 16)]
        max_atoms: usize,
    },
    /// Run algorithms side by side; writes report.json and scatter.csv.
    Bench {
        #[command(flatten)]
        instances: InstanceArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [
            Algorithm::Filtering, Algorithm::Gc, Algorithm::Minimize, Algorithm::Split, Algorithm::Weak,
        ])]
        algorithms: Vec<Algorithm>,
        #[arg(long, value_enum, default_value_t = Semantics::Sst)]
        semantics: Semantics,
        /// Directory for report.json and scatter.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Atom and rule counts of a program and its two transformations.
    Sizes {
        #[command(flatten)]
        instances: InstanceArgs,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance files; when absent, programs are generated.
    files: Vec<PathBuf>,
    /// Number of generated programs.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 6)]
    max_atoms: usize,
    #[arg(long, default_value_t = 10)]
    max_rules: usize,
    /// Keep generated programs that have answer sets.
    #[arg(long)]
    include_coherent: bool,
}

impl InstanceArgs {
    fn source(&self) -> InstanceSource {
        if self.files.is_empty() {
            InstanceSource::Generated {
                count: self.count,
                max_atoms: self.max_atoms,
                max_rules: self.max_rules,
                incoherent_only: !self.include_coherent,
            }
        } else {
            InstanceSource::Files(self.files.clone())
        }
    }
}

/// What a command produced: a JSON body, its text rendering and the exit code.
struct Report {
    json: Value,
    text: String,
    code: u8,
}

fn read_program(path: &Path) -> Result<Program> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading standard input")?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
    };
    Ok(parse(&text)?)
}

fn solver_options(cli: &Cli) -> SolverOptions {
    SolverOptions {
        seed: cli.seed,
        deadline: cli.timeout_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
    }
}

fn names(m: &Interpretation, sig: &Signature) -> Vec<String> {
    m.names(sig)
}

fn braces(atoms: &[String]) -> String {
    format!("{{{}}}", atoms.join(", "))
}

fn stats_json(stats: &SolveStats) -> Value {
    serde_json::to_value(stats).expect("plain struct")
}

fn stats_line(stats: &SolveStats) -> String {
    format!(
        "calls {}, models {}, decisions {}, conflicts {}, {:.3} ms",
        stats.solver_calls,
        stats.models_enumerated,
        stats.decisions,
        stats.conflicts,
        stats.elapsed.as_secs_f64() * 1e3
    )
}

fn status_only(status: &str, code: u8, message: &str) -> Report {
    Report {
        json: json!({ "status": status }),
        text: message.to_string(),
        code,
    }
}

fn cmd_transform(file: &Path, kind: Kind, no_gap: bool) -> Result<Report> {
    let p = read_program(file)?;
    let kind = match kind {
        Kind::Kappa => TransformKind::Kappa,
        Kind::Ht => TransformKind::Ht,
    };
    let tp = transform(&p, kind, !no_gap)?;
    let text = print(&tp.program);
    Ok(Report {
        json: json!({
            "kind": kind,
            "with_gap": !no_gap,
            "atoms": tp.program.atoms_of().len(),
            "rules": tp.program.rules().len(),
            "program": text,
        }),
        text,
        code: EXIT_SOLVED,
    })
}

fn cmd_solve(cli: &Cli, file: &Path, all: bool, limit: Option<usize>) -> Result<Report> {
    let p = read_program(file)?;
    let sig = p.signature();
    let options = solver_options(cli);
    let start = Instant::now();
    if !all && limit.is_none() && !p.weak_constraints().is_empty() {
        let mut stats = SolveStats::default();
        let best = match engine::optimum_answer_set(&p, options, &mut stats) {
            Err(Error::Timeout) => return Ok(status_only("timeout", EXIT_TIMEOUT, "TIMEOUT")),
            other => other?,
        };
        stats.elapsed = start.elapsed();
        return Ok(match best {
            Some(best) => {
                let model = names(&best.model, sig);
                Report {
                    text: format!("{}\ncost {}\nOPTIMUM\n{}", braces(&model), best.cost, stats_line(&stats)),
                    json: json!({
                        "status": "optimum",
                        "answer_sets": [model],
                        "cost": best.cost,
                        "stats": stats_json(&stats),
                    }),
                    code: EXIT_SOLVED,
                }
            }
            None => incoherent(&stats),
        });
    }
    let limit = if all { limit } else { Some(limit.unwrap_or(1)) };
    let mut enumerator = Enumerator::new(&p, options);
    let mut found = Vec::new();
    let mut timed_out = false;
    while limit.is_none_or(|l| found.len() < l) {
        match enumerator.next_answer_set() {
            Ok(Some(m)) => found.push(names(&m, sig)),
            Ok(None) => break,
            Err(Error::Timeout) => {
                timed_out = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut stats = enumerator.stats.clone();
    stats.elapsed = start.elapsed();
    if found.is_empty() {
        return Ok(if timed_out {
            status_only("timeout", EXIT_TIMEOUT, "TIMEOUT")
        } else {
            incoherent(&stats)
        });
    }
    let mut text = String::new();
    for (i, m) in found.iter().enumerate() {
        text.push_str(&format!("Answer {}: {}\n", i + 1, braces(m)));
    }
    text.push_str(if timed_out { "TIMEOUT\n" } else { "COHERENT\n" });
    text.push_str(&stats_line(&stats));
    Ok(Report {
        json: json!({
            "status": if timed_out { "timeout" } else { "coherent" },
            "answer_sets": found,
            "stats": stats_json(&stats),
        }),
        text,
        code: if timed_out { EXIT_TIMEOUT } else { EXIT_SOLVED },
    })
}

fn incoherent(stats: &SolveStats) -> Report {
    Report {
        json: json!({ "status": "incoherent", "answer_sets": [], "stats": stats_json(stats) }),
        text: format!("INCOHERENT\n{}", stats_line(stats)),
        code: EXIT_NO_MODEL,
    }
}

fn cmd_paracoherent(
    cli: &Cli,
    file: &Path,
    semantics: Semantics,
    algorithm: Algorithm,
    all: bool,
    oneof: OneOfArg,
) -> Result<Report> {
    let p = read_program(file)?;
    let tp = transform(&p, semantics.kind(), true)?;
    let sig = tp.program.signature();
    let opts = AlgorithmOptions {
        solver: solver_options(cli),
        oneof: match oneof {
            OneOfArg::Lowest => OneOf::Lowest,
            OneOfArg::Random => OneOf::Random(cli.seed.unwrap_or(0)),
        },
    };
    let sem = tp.kind.semantics_name();
    if all {
        let e = match algorithms::enumerate_all(&tp, &opts) {
            Err(Error::Timeout) => return Ok(status_only("timeout", EXIT_TIMEOUT, "TIMEOUT")),
            other => other?,
        };
        if e.models.is_empty() {
            return Ok(Report {
                json: json!({ "status": "no-model", "semantics": sem, "models": [], "stats": stats_json(&e.stats) }),
                text: format!("NO PARACOHERENT MODEL\n{}", stats_line(&e.stats)),
                code: EXIT_NO_MODEL,
            });
        }
        let models: Vec<Value> = e
            .models
            .iter()
            .map(|m| json!({ "model": names(&m.model, sig), "gap": m.gap.names(sig) }))
            .collect();
        let mut text = String::new();
        for (i, m) in e.models.iter().enumerate() {
            text.push_str(&format!(
                "{} {}: {}  gap {}\n",
                sem.to_uppercase(),
                i + 1,
                braces(&names(&m.model, sig)),
                braces(&m.gap.names(sig))
            ));
        }
        text.push_str(&stats_line(&e.stats));
        return Ok(Report {
            json: json!({
                "status": "solved",
                "semantics": sem,
                "models": models,
                "answer_sets": e.answer_sets,
                "stats": stats_json(&e.stats),
            }),
            text,
            code: EXIT_SOLVED,
        });
    }
    match algorithms::run(algorithm.kind(), &tp, &opts) {
        Ok(r) => {
            let model = names(&r.model, sig);
            let gap = r.gap.names(sig);
            let mut json = json!({
                "status": "solved",
                "semantics": sem,
                "algorithm": r.algorithm.name(),
                "model": model,
                "gap": gap,
                "stats": stats_json(&r.stats),
            });
            if let Some(asserted) = &r.asserted {
                json["asserted"] = json!(asserted.names(sig));
            }
            Ok(Report {
                text: format!(
                    "{} ({}): {}\ngap {}\n{}",
                    sem.to_uppercase(),
                    r.algorithm.name(),
                    braces(&model),
                    braces(&gap),
                    stats_line(&r.stats)
                ),
                json,
                code: EXIT_SOLVED,
            })
        }
        Err(Error::NoParacoherentModel) => Ok(status_only("no-model", EXIT_NO_MODEL, "NO PARACOHERENT MODEL")),
        Err(Error::Timeout) => Ok(status_only("timeout", EXIT_TIMEOUT, "TIMEOUT")),
        Err(e) => Err(e.into()),
    }
}

fn cmd_oracle(file: &Path, target: OracleTarget, max_atoms: usize) -> Result<Report> {
    let p = read_program(file)?;
    let budget = OracleBudget {
        max_atoms,
        ..OracleBudget::default()
    };
    let (label, sig, models) = match target {
        OracleTarget::As => ("as", p.signature().clone(), oracle::oracle_answer_sets(&p, &budget)?),
        OracleTarget::Sst | OracleTarget::Seq => {
            let kind = if target == OracleTarget::Sst {
                TransformKind::Kappa
            } else {
                TransformKind::Ht
            };
            let sem = oracle::oracle_semantics(&p, kind, &budget)?;
            (kind.semantics_name(), sem.signature().clone(), sem.models)
        }
    };
    let mut listed: Vec<Vec<String>> = models.iter().map(|m| names(m, &sig)).collect();
    listed.sort();
    let text = listed.iter().map(|m| braces(m)).collect::<Vec<_>>().join("\n");
    Ok(Report {
        json: json!({ "semantics": label, "models": listed }),
        text: if text.is_empty() { "NONE".into() } else { text },
        code: if models.is_empty() { EXIT_NO_MODEL } else { EXIT_SOLVED },
    })
}

fn cmd_bench(cli: &Cli, instances: &InstanceArgs, algorithms: &[Algorithm], semantics: Semantics, out: &Path) -> Result<Report> {
    let cfg = BenchConfig {
        instances: instances.source(),
        algorithms: algorithms.iter().map(|a| a.kind()).collect(),
        semantics: semantics.kind(),
        timeout: Duration::from_millis(cli.timeout_ms.unwrap_or(10_000)),
        seed: cli.seed.unwrap_or(0),
    };
    let report = bench::run_bench(&cfg)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let body = serde_json::to_value(&report)?;
    let with_version = envelope("bench", body.clone());
    let report_path = out.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&with_version)?)
        .with_context(|| format!("writing {}", report_path.display()))?;
    let scatter_path = out.join("scatter.csv");
    let file = std::fs::File::create(&scatter_path).with_context(|| format!("writing {}", scatter_path.display()))?;
    report.write_scatter(file)?;
    Ok(Report {
        json: json!({
            "report": report_path.display().to_string(),
            "scatter": scatter_path.display().to_string(),
            "totals": body["totals"],
        }),
        text: format!(
            "{}wrote {} and {}",
            report.summary(),
            report_path.display(),
            scatter_path.display()
        ),
        code: EXIT_SOLVED,
    })
}

fn cmd_sizes(cli: &Cli, instances: &InstanceArgs) -> Result<Report> {
    let loaded: Vec<Instance> = bench::load_instances(&instances.source(), cli.seed.unwrap_or(0))?;
    let report = bench::report_transform_sizes(&loaded)?;
    Ok(Report {
        json: serde_json::to_value(&report)?,
        text: report.table().trim_end().to_string(),
        code: EXIT_SOLVED,
    })
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(target), Value::Object(fields)) = (&mut out, body) {
        target.extend(fields);
    }
    out
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Transform { .. } => "transform",
        Command::Solve { .. } => "solve",
        Command::Paracoherent { .. } => "paracoherent",
        Command::Oracle { .. } => "oracle",
        Command::Bench { .. } => "bench",
        Command::Sizes { .. } => "sizes",
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Transform {
            file, kind, no_gap, ..
        } => cmd_transform(file, *kind, *no_gap),
        Command::Solve { file, all, limit } => cmd_solve(cli, file, *all, *limit),
        Command::Paracoherent {
            file,
            semantics,
            algorithm,
            all,
            oneof,
        } => cmd_paracoherent(cli, file, *semantics, *algorithm, *all, *oneof),
        Command::Oracle {
            file,
            semantics,
            max_atoms,
        } => cmd_oracle(file, *semantics, *max_atoms),
        Command::Bench {
            instances,
            algorithms,
            semantics,
            out,
        } => cmd_bench(cli, instances, algorithms, *semantics, out),
        Command::Sizes { instances } => cmd_sizes(cli, instances),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Syntax { .. })
        | Some(Error::ReservedAtom(_))
        | Some(Error::WeakConstraintsUnsupported(_))
        | Some(Error::Config(_))
        | Some(Error::Io { .. }) => EXIT_USAGE,
        Some(Error::NoParacoherentModel) => EXIT_NO_MODEL,
        Some(Error::Timeout) => EXIT_TIMEOUT,
        _ => EXIT_FAILURE,
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    status: &'a str,
    error: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match dispatch(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", envelope(name, report.json)),
                Format::Text => println!("{}", report.text),
            }
            ExitCode::from(report.code)
        }
        Err(err) => {
            let code = exit_code(&err);
            match cli.format {
                Format::Json => {
                    let body = ErrorBody {
                        status: "error",
                        error: format!("{err:#}"),
                    };
                    println!("{}", envelope(name, serde_json::to_value(body).expect("plain struct")));
                }
                Format::Text => eprintln!("error: {err:#}"),
            }
            ExitCode::from(code)
        }
    }
}
