//! Computing one paracoherent answer set of `Π = P^χ ∪ P_g`.
//!
//! An answer set `M` of `Π` is paracoherent exactly when no answer set of
//! `Π` has a gap strictly inside `gap(M)`; equivalently when `Π ∪ Π_M` has no
//! answer set. The strategies differ in how they reach such an `M`:
//!
//! * Filtering enumerates every answer set and keeps a gap-minimal one.
//! * Guess&Check enumerates answer sets and stops at the first that passes
//!   the `Π ∪ Π_M` check.
//! * Minimize keeps adding `Π_M` for the latest model and re-solving until
//!   the program becomes incoherent.
//! * Split additionally tests one gap atom at a time with `:- a`, fixing it
//!   with `:- not a` when it cannot be dropped.
//! * The weak-constraint method asks for an answer set violating the fewest
//!   `:~ gap_k_a.` constraints, which is cardinality-minimal and hence
//!   subset-minimal.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{self, Enumerator, SolveStats, SolverOptions};
use crate::error::{Error, Result};
use crate::program::{AtomId, Interpretation, Program, Rule, Signature};
use crate::transform::{self, project_paracoherent, TransformKind, TransformedProgram};

/// Gap markers `gap_k_a` true in an interpretation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapSet(BTreeSet<AtomId>);

impl GapSet {
    pub fn new(atoms: impl IntoIterator<Item = AtomId>) -> Self {
        GapSet(atoms.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.0.contains(&atom)
    }

    pub fn is_subset(&self, other: &GapSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_strict_subset(&self, other: &GapSet) -> bool {
        self.0.len() < other.0.len() && self.0.is_subset(&other.0)
    }

    pub fn names(&self, signature: &Signature) -> Vec<String> {
        let mut names: Vec<String> = self.iter().map(|a| signature.name(a).to_string()).collect();
        names.sort();
        names
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Filtering,
    #[serde(rename = "gc")]
    GuessCheck,
    Minimize,
    Split,
    Weak,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::Filtering,
        AlgorithmKind::GuessCheck,
        AlgorithmKind::Minimize,
        AlgorithmKind::Split,
        AlgorithmKind::Weak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Filtering => "filtering",
            AlgorithmKind::GuessCheck => "gc",
            AlgorithmKind::Minimize => "minimize",
            AlgorithmKind::Split => "split",
            AlgorithmKind::Weak => "weak",
        }
    }
}

/// How Split picks the next gap atom to test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OneOf {
    /// The gap atom with the smallest id.
    #[default]
    Lowest,
    /// Uniformly at random from a stream seeded with the given value.
    Random(u64),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AlgorithmOptions {
    pub solver: SolverOptions,
    pub oneof: OneOf,
}

/// One paracoherent answer set as returned by an algorithm.
#[derive(Clone, Debug)]
pub struct ParacoherentResult {
    /// The answer set restricted to base and belief atoms.
    pub model: Interpretation,
    pub gap: GapSet,
    /// The full answer set of `Π` the model was read from.
    pub answer_set: Interpretation,
    pub semantics: TransformKind,
    pub algorithm: AlgorithmKind,
    pub stats: SolveStats,
    /// Gap atoms Split fixed with `:- not a` (Split only).
    pub asserted: Option<GapSet>,
}

/// A member of `SST(P)` or `SEQ(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParacoherentModel {
    pub model: Interpretation,
    pub gap: GapSet,
    pub answer_set: Interpretation,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Distinct projected models, sorted by their atom names.
    pub models: Vec<ParacoherentModel>,
    /// `|AS(Π)|`.
    pub answer_sets: usize,
    pub stats: SolveStats,
}

fn solve(program: &Program, opts: &AlgorithmOptions, stats: &mut SolveStats) -> Result<Option<Interpretation>> {
    engine::solve_one(program, opts.solver, stats)
}

fn finish(
    tp: &TransformedProgram,
    m: Interpretation,
    algorithm: AlgorithmKind,
    mut stats: SolveStats,
    start: Instant,
    asserted: Option<GapSet>,
) -> ParacoherentResult {
    stats.elapsed = start.elapsed();
    ParacoherentResult {
        model: project_paracoherent(&m, tp),
        gap: tp.gap_of(&m),
        answer_set: m,
        semantics: tp.kind,
        algorithm,
        stats,
        asserted,
    }
}

fn check_stats(stats: &mut SolveStats, opts: &AlgorithmOptions, tp: &TransformedProgram, m: &Interpretation) -> Result<bool> {
    let gap = tp.gap_of(m);
    if gap.is_empty() {
        return Ok(true);
    }
    let check = tp.program.with_rules(transform::pi_m(tp, m));
    Ok(solve(&check, opts, stats)?.is_none())
}

/// Whether the answer set `m` of `Π` is paracoherent: `Π ∪ Π_M` has no
/// answer set. A model without gap is accepted without calling the solver.
pub fn is_paracoherent(
    tp: &TransformedProgram,
    m: &Interpretation,
    opts: &AlgorithmOptions,
    stats: &mut SolveStats,
) -> Result<bool> {
    debug_assert!(engine::is_answer_set(&tp.program, m), "not an answer set of the transformed program");
    check_stats(stats, opts, tp, m)
}

pub fn filtering(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    let start = Instant::now();
    let mut enumerator = Enumerator::new(&tp.program, opts.solver);
    let mut best: Option<(Interpretation, GapSet)> = None;
    let outcome = loop {
        match enumerator.next_answer_set() {
            Ok(Some(m)) => {
                let gap = tp.gap_of(&m);
                match &best {
                    Some((_, best_gap)) if !gap.is_strict_subset(best_gap) => {}
                    _ => best = Some((m, gap)),
                }
            }
            Ok(None) => break Ok(()),
            Err(e) => break Err(e),
        }
    };
    let mut stats = SolveStats::default();
    stats.absorb(&enumerator.stats);
    outcome?;
    let (m, _) = best.ok_or(Error::NoParacoherentModel)?;
    Ok(finish(tp, m, AlgorithmKind::Filtering, stats, start, None))
}

pub fn guess_check(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    let start = Instant::now();
    let mut enumerator = Enumerator::new(&tp.program, opts.solver);
    let mut stats = SolveStats::default();
    let outcome = loop {
        let guess = match enumerator.next_answer_set() {
            Ok(Some(m)) => m,
            Ok(None) => break Err(Error::NoParacoherentModel),
            Err(e) => break Err(e),
        };
        match check_stats(&mut stats, opts, tp, &guess) {
            Ok(true) => break Ok(guess),
            Ok(false) => {}
            Err(e) => break Err(e),
        }
    };
    stats.absorb(&enumerator.stats);
    let m = outcome?;
    Ok(finish(tp, m, AlgorithmKind::GuessCheck, stats, start, None))
}

pub fn minimize(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let mut program = tp.program.clone();
    let mut m = solve(&program, opts, &mut stats)?.ok_or(Error::NoParacoherentModel)?;
    loop {
        if tp.gap_of(&m).is_empty() {
            break;
        }
        program = program.with_rules(transform::pi_m(tp, &m));
        match solve(&program, opts, &mut stats)? {
            Some(smaller) => m = smaller,
            None => break,
        }
    }
    Ok(finish(tp, m, AlgorithmKind::Minimize, stats, start, None))
}

pub fn split(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let mut rng = match opts.oneof {
        OneOf::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        OneOf::Lowest => None,
    };
    let mut program = tp.program.clone();
    let mut m = solve(&program, opts, &mut stats)?.ok_or(Error::NoParacoherentModel)?;
    let mut fixed: BTreeSet<AtomId> = BTreeSet::new();
    let mut candidates: BTreeSet<AtomId> = tp.gap_of(&m).iter().collect();
    let mut constrained_for = None;
    while !candidates.is_empty() {
        if constrained_for.as_ref() != Some(&m) {
            program = program.with_rules(transform::pi_m(tp, &m));
            constrained_for = Some(m.clone());
        }
        let a = match rng.as_mut() {
            Some(rng) => *candidates.iter().choose(rng).expect("nonempty"),
            None => *candidates.first().expect("nonempty"),
        };
        let probe = program.with_rules([Rule::constraint([a], [])]);
        match solve(&probe, opts, &mut stats)? {
            None => {
                program = program.with_rules([Rule::constraint([], [a])]);
                fixed.insert(a);
                candidates.remove(&a);
            }
            Some(smaller) => {
                // fixed atoms stay in every later model; testing them again can only fail
                candidates = tp.gap_of(&smaller).iter().filter(|g| !fixed.contains(g)).collect();
                m = smaller;
            }
        }
    }
    let asserted = GapSet::new(fixed);
    Ok(finish(tp, m, AlgorithmKind::Split, stats, start, Some(asserted)))
}

pub fn weak_method(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let mut signature = tp.program.signature().clone();
    let weak = transform::weak_gap_constraints(&mut signature, &tp.base_atoms);
    debug_assert_eq!(signature.len(), tp.program.signature().len());
    let program = tp.program.with_weak(weak);
    let best = engine::optimum_answer_set(&program, opts.solver, &mut stats)?.ok_or(Error::NoParacoherentModel)?;
    Ok(finish(tp, best.model, AlgorithmKind::Weak, stats, start, None))
}

pub fn run(kind: AlgorithmKind, tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<ParacoherentResult> {
    match kind {
        AlgorithmKind::Filtering => filtering(tp, opts),
        AlgorithmKind::GuessCheck => guess_check(tp, opts),
        AlgorithmKind::Minimize => minimize(tp, opts),
        AlgorithmKind::Split => split(tp, opts),
        AlgorithmKind::Weak => weak_method(tp, opts),
    }
}

/// Members of `answer_sets` whose gap has no strict subset among the others'.
pub fn maximal_canonical(
    answer_sets: &[Interpretation],
    gap: impl Fn(&Interpretation) -> GapSet,
) -> Vec<&Interpretation> {
    let gaps: Vec<GapSet> = answer_sets.iter().map(gap).collect();
    answer_sets
        .iter()
        .zip(&gaps)
        .filter(|(_, g)| !gaps.iter().any(|other| other.is_strict_subset(g)))
        .map(|(m, _)| m)
        .collect()
}

/// Every paracoherent answer set: the maximal canonical answer sets of `Π`,
/// projected and deduplicated.
pub fn enumerate_all(tp: &TransformedProgram, opts: &AlgorithmOptions) -> Result<Enumeration> {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let answer_sets = engine::all_answer_sets(&tp.program, opts.solver, &mut stats)?;
    let sig = tp.program.signature();
    let mut models: Vec<ParacoherentModel> = Vec::new();
    for m in maximal_canonical(&answer_sets, |m| tp.gap_of(m)) {
        let model = project_paracoherent(m, tp);
        if !models.iter().any(|known| known.model == model) {
            models.push(ParacoherentModel {
                model,
                gap: tp.gap_of(m),
                answer_set: m.clone(),
            });
        }
    }
    models.sort_by_key(|m| m.model.names(sig));
    stats.elapsed = start.elapsed();
    Ok(Enumeration {
        models,
        answer_sets: answer_sets.len(),
        stats,
    })
}
