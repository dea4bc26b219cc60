//! Answer sets of ground disjunctive programs.
//!
//! `I` is an answer set of `P` when it is a minimal model of the
//! Gelfond-Lifschitz reduct `P^I`. The search enumerates supported models in
//! a fixed branching order (positive branch first) and keeps those that pass
//! the minimality check on the reduct. Enumeration blocks every emitted model
//! with a constraint describing it exactly and re-solves.

mod search;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::program::{AtomId, Interpretation, Program, Rule};
use search::{Control, Search};

/// Counters collected over one run. All fields only grow.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub solver_calls: u64,
    pub models_enumerated: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
    /// Largest number of rules in any program handed to the solver.
    pub peak_program_size: usize,
    pub decisions: u64,
    pub conflicts: u64,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

impl SolveStats {
    /// Adds the counters of `other` (elapsed time excluded).
    pub fn absorb(&mut self, other: &SolveStats) {
        self.solver_calls += other.solver_calls;
        self.models_enumerated += other.models_enumerated;
        self.peak_program_size = self.peak_program_size.max(other.peak_program_size);
        self.decisions += other.decisions;
        self.conflicts += other.conflicts;
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolverOptions {
    /// Permutes the branching order; `None` branches in atom id order.
    pub seed: Option<u64>,
    pub deadline: Option<Instant>,
}

impl SolverOptions {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }
}

/// `P^I`: the rules whose negative body is disjoint from `I`, with the
/// negative body removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub rules: Vec<Rule>,
    atoms: usize,
}

impl Reduct {
    pub fn to_program(&self, signature: &crate::program::Signature) -> Program {
        Program::new(signature.clone()).with_rules(self.rules.iter().cloned())
    }

    /// Whether `interp` is a subset-minimal model of the reduct.
    pub fn is_minimal_model(&self, interp: &Interpretation) -> bool {
        self.rules.iter().all(|r| r.satisfied_by(interp)) && !has_smaller_model(&self.rules, self.atoms, interp)
    }
}

pub fn gl_reduct(p: &Program, interp: &Interpretation) -> Reduct {
    let rules = p
        .rules()
        .iter()
        .filter(|r| r.negative_body().iter().all(|&b| !interp.contains(b)))
        .map(|r| Rule::new(r.head().iter().copied(), r.positive_body().iter().copied(), []))
        .collect();
    Reduct {
        rules,
        atoms: p.signature().len(),
    }
}

pub fn is_model(p: &Program, interp: &Interpretation) -> bool {
    p.is_model(interp)
}

fn has_smaller_model(rules: &[Rule], atoms: usize, interp: &Interpretation) -> bool {
    let inside: Vec<bool> = (0..atoms).map(|a| interp.contains(AtomId::from_index(a))).collect();
    let clauses: Vec<_> = rules
        .iter()
        .map(|r| search::compile(r.head(), r.positive_body(), r.negative_body()))
        .collect();
    Search::has_smaller_model(atoms, clauses.iter(), &inside)
}

/// Whether `interp` is a minimal model of the positive program `p`.
pub fn is_minimal_model(p: &Program, interp: &Interpretation) -> Result<bool> {
    if !p.classify().positive {
        return Err(Error::Precondition("minimal model check needs a positive program".into()));
    }
    if !p.is_model(interp) {
        return Err(Error::Precondition("interpretation is not a model".into()));
    }
    Ok(!has_smaller_model(p.rules(), p.signature().len(), interp))
}

pub fn is_answer_set(p: &Program, interp: &Interpretation) -> bool {
    p.is_model(interp) && !has_smaller_model(&gl_reduct(p, interp).rules, p.signature().len(), interp)
}

/// Whether some interpretation over `At(p)` satisfies every rule.
pub fn has_classical_model(p: &Program) -> bool {
    let mut search = Search::with_rules(p.signature().len(), false, p.rules());
    let mut found = false;
    search
        .run(&mut |_| {
            found = true;
            Ok(Control::Stop)
        })
        .expect("no deadline");
    found
}

fn branching_order(atoms: usize, seed: Option<u64>) -> Vec<u32> {
    let mut order: Vec<u32> = (0..atoms as u32).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

fn interpretation_of(search: &Search) -> Interpretation {
    Interpretation::from_atoms(search.atoms(), search.true_atoms().map(AtomId::from_index))
}

/// First answer set of the rules loaded in `search`, in branching order.
fn first_answer_set(search: &mut Search) -> Result<Option<Interpretation>> {
    let mut found = None;
    search.run(&mut |s| {
        if s.is_stable() {
            found = Some(interpretation_of(s));
            Ok(Control::Stop)
        } else {
            Ok(Control::Continue)
        }
    })?;
    Ok(found)
}

/// Stateful `nextAnswerSet`: every call returns an answer set not returned
/// before, or `None` once all are exhausted.
#[derive(Clone, Debug)]
pub struct Enumerator {
    program: Program,
    search: Search,
    blocked: Vec<Rule>,
    exhausted: bool,
    pub stats: SolveStats,
}

impl Enumerator {
    pub fn new(program: &Program, options: SolverOptions) -> Self {
        let mut search = Search::with_rules(program.signature().len(), true, program.rules());
        search.set_order(branching_order(program.signature().len(), options.seed));
        search.set_deadline(options.deadline);
        Enumerator {
            program: program.clone(),
            search,
            blocked: Vec::new(),
            exhausted: false,
            stats: SolveStats::default(),
        }
    }

    /// The constraint removing exactly `m` from the answer sets: every atom
    /// of `At(Π)` appears, positively when in `m`.
    pub fn blocking_constraint(program: &Program, m: &Interpretation) -> Rule {
        let atoms = program.atoms_of();
        Rule::constraint(
            atoms.iter().copied().filter(|&a| m.contains(a)),
            atoms.iter().copied().filter(|&a| !m.contains(a)),
        )
    }

    pub fn next_answer_set(&mut self) -> Result<Option<Interpretation>> {
        if self.exhausted {
            return Ok(None);
        }
        let start = Instant::now();
        self.stats.solver_calls += 1;
        self.stats.peak_program_size = self
            .stats
            .peak_program_size
            .max(self.program.rules().len() + self.blocked.len());
        let before = self.search.counters.clone();
        let result = first_answer_set(&mut self.search);
        self.stats.decisions += self.search.counters.decisions - before.decisions;
        self.stats.conflicts += self.search.counters.conflicts - before.conflicts;
        self.stats.elapsed += start.elapsed();
        match result? {
            Some(m) => {
                if self.program.atoms_of().is_empty() {
                    // the empty interpretation was the only candidate
                    self.exhausted = true;
                } else {
                    let block = Self::blocking_constraint(&self.program, &m);
                    self.search.add_rule(&block);
                    self.blocked.push(block);
                }
                self.stats.models_enumerated += 1;
                Ok(Some(m))
            }
            None => {
                self.exhausted = true;
                Ok(None)
            }
        }
    }

    /// The base program with the blocking constraints added so far.
    pub fn current_program(&self) -> Program {
        self.program.with_rules(self.blocked.iter().cloned())
    }
}

/// Convenience: first answer set of `p`, recording the call in `stats`.
pub fn solve_one(p: &Program, options: SolverOptions, stats: &mut SolveStats) -> Result<Option<Interpretation>> {
    let mut enumerator = Enumerator::new(p, options);
    let result = enumerator.next_answer_set();
    stats.absorb(&enumerator.stats);
    stats.elapsed += enumerator.stats.elapsed;
    result
}

/// All answer sets, in emission order.
pub fn all_answer_sets(p: &Program, options: SolverOptions, stats: &mut SolveStats) -> Result<Vec<Interpretation>> {
    let mut enumerator = Enumerator::new(p, options);
    let mut models = Vec::new();
    let result = loop {
        match enumerator.next_answer_set() {
            Ok(Some(m)) => models.push(m),
            Ok(None) => break Ok(models),
            Err(e) => break Err(e),
        }
    };
    stats.absorb(&enumerator.stats);
    stats.elapsed += enumerator.stats.elapsed;
    result
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub model: Interpretation,
    /// Number of violated weak constraints.
    pub cost: usize,
}

/// An answer set of the rules of `p` violating as few of its weak
/// constraints as possible. Each round asks for an answer set strictly
/// cheaper than the best so far, pruning branches whose violated count
/// already reaches the bound, until no such answer set exists.
pub fn optimum_answer_set(p: &Program, options: SolverOptions, stats: &mut SolveStats) -> Result<Option<Optimum>> {
    let start = Instant::now();
    let rules = p.without_weak();
    let mut search = Search::with_rules(p.signature().len(), true, rules.rules());
    for w in p.weak_constraints() {
        search.add_weak(w);
    }
    search.set_order(branching_order(p.signature().len(), options.seed));
    search.set_deadline(options.deadline);
    stats.peak_program_size = stats.peak_program_size.max(p.rules().len() + p.weak_constraints().len());
    let mut best: Option<Optimum> = None;
    let outcome = loop {
        stats.solver_calls += 1;
        search.set_cost_bound(best.as_ref().map(|b| b.cost));
        match first_answer_set(&mut search) {
            Ok(Some(m)) => {
                stats.models_enumerated += 1;
                let cost = p.cost(&m);
                let done = cost == 0;
                best = Some(Optimum { model: m, cost });
                if done {
                    break Ok(());
                }
            }
            Ok(None) => break Ok(()),
            Err(e) => break Err(e),
        }
    };
    stats.decisions += search.counters.decisions;
    stats.conflicts += search.counters.conflicts;
    stats.elapsed += start.elapsed();
    outcome.map(|_| best)
}
