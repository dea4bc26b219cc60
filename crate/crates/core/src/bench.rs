//! Running the algorithms side by side and sizing the transformations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algorithms::{self, AlgorithmKind, AlgorithmOptions, OneOf};
use crate::engine::{SolveStats, SolverOptions};
use crate::error::{Error, Result};
use crate::oracle::{self, OracleBudget};
use crate::program::{parse, Program};
use crate::transform::{transform, TransformKind};

/// Where bench instances come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    /// Programs from [`oracle::random_suite`]; with `incoherent_only`, seeds
    /// are drawn until `count` programs without answer sets are found.
    Generated {
        count: usize,
        max_atoms: usize,
        max_rules: usize,
        incoherent_only: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub instances: InstanceSource,
    pub algorithms: Vec<AlgorithmKind>,
    pub semantics: TransformKind,
    /// Per cell.
    pub timeout: Duration,
    pub seed: u64,
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        if self.timeout.is_zero() {
            return Err(Error::Config("the timeout must be positive".into()));
        }
        Ok(())
    }
}

/// A named program.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub program: Program,
}

/// Instances named by `cfg.instances`, in a fixed order.
pub fn load_instances(source: &InstanceSource, seed: u64) -> Result<Vec<Instance>> {
    match source {
        InstanceSource::Files(paths) => paths
            .iter()
            .map(|path| {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                Ok(Instance {
                    name: path.display().to_string(),
                    program: parse(&text)?,
                })
            })
            .collect(),
        &InstanceSource::Generated {
            count,
            max_atoms,
            max_rules,
            incoherent_only,
        } => {
            let budget = OracleBudget::default();
            let mut instances = Vec::with_capacity(count);
            let mut round = 0u64;
            while instances.len() < count {
                // a fresh batch per round keeps earlier picks stable
                let batch = oracle::random_suite(count.max(16), max_atoms, max_rules, seed.wrapping_add(round));
                for params in batch {
                    if instances.len() == count {
                        break;
                    }
                    let generated = oracle::random_instance(&params, &budget)?;
                    if incoherent_only && generated.coherent {
                        continue;
                    }
                    instances.push(Instance {
                        name: format!("random-{}", params.seed),
                        program: generated.program,
                    });
                }
                round += 1;
                if round > 1000 && instances.is_empty() {
                    return Err(Error::Config("the generator produced no matching instance".into()));
                }
            }
            Ok(instances)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solved,
    Timeout,
    NoModel,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchCell {
    pub instance: String,
    pub algorithm: AlgorithmKind,
    pub outcome: Outcome,
    #[serde(rename = "elapsed_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
    pub stats: SolveStats,
    /// Atom names of the model found, when solved.
    pub model: Option<Vec<String>>,
    /// Whether the model passed the paracoherence check afterwards.
    pub audited: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub solved: usize,
    pub timeout: usize,
    pub no_model: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub semantics: TransformKind,
    #[serde(rename = "timeout_ms", serialize_with = "as_millis")]
    pub timeout: Duration,
    pub seed: u64,
    pub instances: Vec<String>,
    pub cells: Vec<BenchCell>,
    pub totals: BTreeMap<AlgorithmKind, Tally>,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

fn run_cell(instance: &Instance, kind: AlgorithmKind, cfg: &BenchConfig) -> Result<BenchCell> {
    let tp = transform(&instance.program, cfg.semantics, true)?;
    let opts = AlgorithmOptions {
        solver: SolverOptions {
            seed: None,
            deadline: Some(Instant::now() + cfg.timeout),
        },
        oneof: OneOf::Lowest,
    };
    let start = Instant::now();
    let result = algorithms::run(kind, &tp, &opts);
    let elapsed = start.elapsed();
    let (outcome, stats, model, audited) = match result {
        Ok(r) => {
            let mut audit = SolveStats::default();
            let ok = algorithms::is_paracoherent(&tp, &r.answer_set, &AlgorithmOptions::default(), &mut audit)?;
            (Outcome::Solved, r.stats, Some(r.model.names(tp.program.signature())), Some(ok))
        }
        Err(Error::Timeout) => (Outcome::Timeout, SolveStats::default(), None, None),
        Err(Error::NoParacoherentModel) => (Outcome::NoModel, SolveStats::default(), None, None),
        Err(e) => return Err(e),
    };
    Ok(BenchCell {
        instance: instance.name.clone(),
        algorithm: kind,
        outcome,
        elapsed,
        stats,
        model,
        audited,
    })
}

/// Runs every algorithm of `cfg` on every instance, one cell at a time.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let instances = load_instances(&cfg.instances, cfg.seed)?;
    run_bench_on(cfg, &instances)
}

/// Like [`run_bench`] on instances already loaded.
pub fn run_bench_on(cfg: &BenchConfig, instances: &[Instance]) -> Result<BenchReport> {
    cfg.validate()?;
    let mut cells = Vec::with_capacity(instances.len() * cfg.algorithms.len());
    let mut totals: BTreeMap<AlgorithmKind, Tally> = cfg.algorithms.iter().map(|&k| (k, Tally::default())).collect();
    for instance in instances {
        for &kind in &cfg.algorithms {
            let cell = run_cell(instance, kind, cfg)?;
            let tally = totals.get_mut(&kind).expect("listed algorithm");
            match cell.outcome {
                Outcome::Solved => tally.solved += 1,
                Outcome::Timeout => tally.timeout += 1,
                Outcome::NoModel => tally.no_model += 1,
            }
            cells.push(cell);
        }
    }
    Ok(BenchReport {
        semantics: cfg.semantics,
        timeout: cfg.timeout,
        seed: cfg.seed,
        instances: instances.iter().map(|i| i.name.clone()).collect(),
        cells,
        totals,
    })
}

impl BenchReport {
    fn cell(&self, instance: &str, kind: AlgorithmKind) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.instance == instance && c.algorithm == kind)
    }

    /// One row per instance and ordered pair of distinct algorithms, with
    /// both times in milliseconds. Cells that did not solve are charged the
    /// timeout.
    pub fn write_scatter<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io {
            path: "scatter.csv".into(),
            message: e.to_string(),
        };
        w.write_record(["instance", "x", "y", "x_ms", "y_ms"]).map_err(io)?;
        let algorithms: Vec<AlgorithmKind> = self.totals.keys().copied().collect();
        let time = |c: &BenchCell| match c.outcome {
            Outcome::Timeout => self.timeout.as_secs_f64() * 1e3,
            _ => c.elapsed.as_secs_f64() * 1e3,
        };
        for instance in &self.instances {
            for &x in &algorithms {
                for &y in &algorithms {
                    if x == y {
                        continue;
                    }
                    let (Some(cx), Some(cy)) = (self.cell(instance, x), self.cell(instance, y)) else {
                        continue;
                    };
                    w.write_record([
                        instance.as_str(),
                        x.name(),
                        y.name(),
                        &format!("{:.3}", time(cx)),
                        &format!("{:.3}", time(cy)),
                    ])
                    .map_err(io)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Io {
            path: "scatter.csv".into(),
            message: e.to_string(),
        })
    }

    /// Solved, timeout and no-model counts per algorithm.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>7} {:>8} {:>9}", "algorithm", "solved", "timeout", "no-model");
        for (kind, t) in &self.totals {
            let _ = writeln!(out, "{:<10} {:>7} {:>8} {:>9}", kind.name(), t.solved, t.timeout, t.no_model);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Size {
    pub atoms: usize,
    pub rules: usize,
}

impl Size {
    fn of(p: &Program) -> Size {
        Size {
            atoms: p.atoms_of().len(),
            rules: p.rules().len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeRow {
    pub instance: String,
    pub program: Size,
    /// `P^κ ∪ P_g`.
    pub kappa: Size,
    /// `P^HT ∪ P_g`.
    pub ht: Size,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeReport {
    pub rows: Vec<SizeRow>,
    /// Mean HT rule count over mean kappa rule count.
    pub rule_ratio: f64,
    pub atom_ratio: f64,
}

/// Atom and rule counts of `P`, `P^κ ∪ P_g` and `P^HT ∪ P_g` per instance.
pub fn report_transform_sizes(instances: &[Instance]) -> Result<SizeReport> {
    let mut rows = Vec::with_capacity(instances.len());
    for instance in instances {
        rows.push(SizeRow {
            instance: instance.name.clone(),
            program: Size::of(&instance.program),
            kappa: Size::of(&transform(&instance.program, TransformKind::Kappa, true)?.program),
            ht: Size::of(&transform(&instance.program, TransformKind::Ht, true)?.program),
        });
    }
    let ratio = |f: fn(&SizeRow) -> (usize, usize)| {
        let (ht, kappa) = rows.iter().map(f).fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
        if kappa == 0 {
            f64::NAN
        } else {
            ht as f64 / kappa as f64
        }
    };
    Ok(SizeReport {
        rule_ratio: ratio(|r| (r.ht.rules, r.kappa.rules)),
        atom_ratio: ratio(|r| (r.ht.atoms, r.kappa.atoms)),
        rows,
    })
}

impl SizeReport {
    /// Plain-text table, one line per instance plus the ratios.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.instance.len()).max().unwrap_or(0).max(8);
        let _ = writeln!(
            out,
            "{:<width$} | {:>6} {:>6} | {:>6} {:>6} | {:>6} {:>6}",
            "instance", "P at", "P ru", "κ at", "κ ru", "HT at", "HT ru"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$} | {:>6} {:>6} | {:>6} {:>6} | {:>6} {:>6}",
                r.instance, r.program.atoms, r.program.rules, r.kappa.atoms, r.kappa.rules, r.ht.atoms, r.ht.rules
            );
        }
        let _ = writeln!(out, "HT/κ rules {:.2}, atoms {:.2}", self.rule_ratio, self.atom_ratio);
        out
    }
}
