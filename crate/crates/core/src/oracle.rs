//! Exhaustive reference implementations.
//!
//! Nothing here calls into [`crate::engine`]: models, reducts and minimality
//! are recomputed from scratch over bitmasks so that agreement between the
//! two is evidence rather than a tautology.
//!
//! Plain programs are handled by scanning all `2^|At(P)|` interpretations.
//! Transformed programs are too large for that, so their answer sets are
//! computed as follows. `P^χ` is positive, so its answer sets are its minimal
//! models. Every fresh `lam_*` atom occurs only in rules of the expansion of
//! one source rule (its *block*), so once the base and belief atoms are fixed
//! each block can be settled on its own: only its subset-minimal admissible
//! assignments can appear in a minimal model. The scan therefore runs over
//! base and belief atoms only, and the candidates are then reduced to the
//! subset-minimal ones. Gap atoms are added last, straight from their
//! definition `gap_k_a ⟺ k_a ∧ ¬a`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{AtomId, AtomKind, Interpretation, Program, Rule, Signature};
use crate::transform::{transform, RuleOrigin, TransformKind, TransformedProgram};

/// Limits on the exhaustive scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    /// Largest number of atoms the scan may range over.
    pub max_atoms: usize,
    /// Largest number of interpretations the scan may visit.
    pub max_interpretations: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_atoms: 16,
            max_interpretations: 1 << 16,
        }
    }
}

impl OracleBudget {
    fn admit(&self, atoms: usize) -> Result<()> {
        if atoms > self.max_atoms || atoms >= 64 || (1u64 << atoms) > self.max_interpretations {
            return Err(Error::BudgetExceeded {
                atoms,
                max_atoms: self.max_atoms.min(63),
            });
        }
        Ok(())
    }
}

type Mask = u128;

const MASK_BITS: usize = Mask::BITS as usize;

#[derive(Clone, Copy, Debug)]
struct Clause {
    head: Mask,
    pos: Mask,
    neg: Mask,
}

impl Clause {
    fn satisfied(&self, i: Mask) -> bool {
        self.pos & !i != 0 || self.neg & i != 0 || self.head & i != 0
    }
}

fn bits(atoms: &[AtomId], local: &impl Fn(AtomId) -> usize) -> Mask {
    atoms.iter().fold(0, |m, &a| m | (1 << local(a)))
}

fn clause(rule: &Rule, local: &impl Fn(AtomId) -> usize) -> Clause {
    Clause {
        head: bits(rule.head(), local),
        pos: bits(rule.positive_body(), local),
        neg: bits(rule.negative_body(), local),
    }
}

fn to_interpretation(mask: Mask, atoms: &[AtomId], universe: usize) -> Interpretation {
    Interpretation::from_atoms(
        universe,
        atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a),
    )
}

fn submasks(i: u64) -> impl Iterator<Item = u64> {
    // proper submasks of i, largest first
    let mut next = Some(i);
    std::iter::from_fn(move || {
        let current = next?;
        if current == 0 {
            next = None;
            return None;
        }
        let j = (current - 1) & i;
        next = Some(j);
        Some(j)
    })
}

struct Plain {
    atoms: Vec<AtomId>,
    clauses: Vec<Clause>,
    universe: usize,
}

impl Plain {
    fn new(p: &Program, budget: &OracleBudget) -> Result<Self> {
        let atoms: Vec<AtomId> = p.atoms_of().into_iter().collect();
        budget.admit(atoms.len())?;
        let index: BTreeMap<AtomId, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let local = |a: AtomId| index[&a];
        Ok(Plain {
            clauses: p.rules().iter().map(|r| clause(r, &local)).collect(),
            atoms,
            universe: p.signature().len(),
        })
    }

    fn space(&self) -> u64 {
        1u64 << self.atoms.len()
    }

    fn is_model(&self, i: Mask) -> bool {
        self.clauses.iter().all(|c| c.satisfied(i))
    }

    fn is_answer_set(&self, i: Mask) -> bool {
        if !self.is_model(i) {
            return false;
        }
        // reduct: drop rules blocked by i, then drop negative bodies
        let reduct: Vec<Clause> = self
            .clauses
            .iter()
            .filter(|c| c.neg & i == 0)
            .map(|c| Clause { neg: 0, ..*c })
            .collect();
        !submasks(i as u64).any(|j| reduct.iter().all(|c| c.satisfied(j as Mask)))
    }

    fn collect(&self, mut keep: impl FnMut(Mask) -> bool) -> Vec<Interpretation> {
        (0..self.space())
            .map(|i| i as Mask)
            .filter(|&i| keep(i))
            .map(|i| to_interpretation(i, &self.atoms, self.universe))
            .collect()
    }
}

/// `AS(P)` by exhaustive search over `2^|At(P)|` interpretations. Weak
/// constraints are ignored.
pub fn oracle_answer_sets(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    let plain = Plain::new(p, budget)?;
    Ok(plain.collect(|i| plain.is_answer_set(i)))
}

/// All classical models of `P` over `At(P)`.
pub fn oracle_models(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    let plain = Plain::new(p, budget)?;
    Ok(plain.collect(|i| plain.is_model(i)))
}

/// Subset-minimal classical models of `P`.
pub fn oracle_minimal_models(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    let plain = Plain::new(p, budget)?;
    Ok(plain.collect(|i| plain.is_model(i) && !submasks(i as u64).any(|j| plain.is_model(j as Mask))))
}

pub fn oracle_has_classical_model(p: &Program, budget: &OracleBudget) -> Result<bool> {
    let plain = Plain::new(p, budget)?;
    Ok((0..plain.space()).any(|i| plain.is_model(i as Mask)))
}

/// Answer sets of `P` violating the fewest weak constraints, with that count.
pub fn oracle_optimum(p: &Program, budget: &OracleBudget) -> Result<Option<(usize, Vec<Interpretation>)>> {
    let answer_sets = oracle_answer_sets(p, budget)?;
    let cost = |m: &Interpretation| {
        p.weak_constraints()
            .iter()
            .filter(|w| w.positive_body().iter().all(|&a| m.contains(a)) && !w.negative_body().iter().any(|&a| m.contains(a)))
            .count()
    };
    let Some(best) = answer_sets.iter().map(cost).min() else {
        return Ok(None);
    };
    Ok(Some((best, answer_sets.into_iter().filter(|m| cost(m) == best).collect())))
}

/// One group of `lam_*` atoms and the rules mentioning them.
struct Block {
    bits: Vec<Mask>,
    clauses: Vec<Clause>,
}

impl Block {
    /// Subset-minimal assignments of the block's atoms satisfying its rules,
    /// given the rest of the interpretation.
    fn minimal_choices(&self, rest: Mask) -> Vec<Mask> {
        let mut valid: Vec<Mask> = Vec::new();
        let mut subsets: Vec<(u32, Mask)> = (0..1u64 << self.bits.len())
            .map(|s| {
                let m = self.bits.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(0, |m, (_, &b)| m | b);
                (s.count_ones(), m)
            })
            .collect();
        subsets.sort();
        for (_, s) in subsets {
            if valid.iter().any(|&v| v & !s == 0) {
                continue;
            }
            if self.clauses.iter().all(|c| c.satisfied(rest | s)) {
                valid.push(s);
            }
        }
        valid
    }
}

/// `AS(Π)` for `Π = P^χ ∪ P_g` as produced by [`transform`] with gap rules.
///
/// Interpretations use the ids of `tp`. Programs with constraints appended
/// after the transformation are rejected.
pub fn oracle_transformed_answer_sets(tp: &TransformedProgram, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    let sig = tp.program.signature();
    let universe = sig.len();
    if universe > MASK_BITS {
        return Err(Error::BudgetExceeded {
            atoms: universe,
            max_atoms: MASK_BITS,
        });
    }
    if tp.origin.iter().any(|o| matches!(o, RuleOrigin::Added)) {
        return Err(Error::Precondition("the oracle takes unmodified transformed programs".into()));
    }
    let local = |a: AtomId| a.index();

    let free: Vec<AtomId> = sig
        .iter()
        .filter(|a| matches!(a.kind, AtomKind::Base | AtomKind::Belief(_)))
        .map(|a| a.id)
        .collect();
    budget.admit(free.len())?;

    let mut groups: BTreeMap<usize, Vec<AtomId>> = BTreeMap::new();
    for atom in sig.iter() {
        if let AtomKind::Lambda { rule, .. } = atom.kind {
            groups.entry(rule).or_default().push(atom.id);
        }
    }
    let block_of: BTreeMap<AtomId, usize> = groups
        .values()
        .enumerate()
        .flat_map(|(b, atoms)| atoms.iter().map(move |&a| (a, b)))
        .collect();
    let mut blocks: Vec<Block> = groups
        .values()
        .map(|atoms| Block {
            bits: atoms.iter().map(|&a| 1 << local(a)).collect(),
            clauses: Vec::new(),
        })
        .collect();
    let mut plain_clauses = Vec::new();
    for (rule, origin) in tp.program.rules().iter().zip(&tp.origin) {
        if matches!(origin, RuleOrigin::Gap { .. }) {
            continue;
        }
        if !rule.negative_body().is_empty() {
            return Err(Error::Precondition("the transformed program is not positive".into()));
        }
        let touched: BTreeSet<usize> = rule.atoms().filter_map(|a| block_of.get(&a).copied()).collect();
        match touched.len() {
            0 => plain_clauses.push(clause(rule, &local)),
            1 => blocks[*touched.first().unwrap()].clauses.push(clause(rule, &local)),
            _ => return Err(Error::Precondition("a rule mixes fresh atoms of different source rules".into())),
        }
    }

    // candidates: each block at one of its minimal admissible assignments
    let mut candidates: Vec<Mask> = Vec::new();
    for x in 0..1u64 << free.len() {
        let rest = free
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .fold(0 as Mask, |m, (_, &a)| m | 1 << local(a));
        if !plain_clauses.iter().all(|c| c.satisfied(rest)) {
            continue;
        }
        let mut partial = vec![rest];
        for block in &blocks {
            let choices = block.minimal_choices(rest);
            partial = partial.iter().flat_map(|&p| choices.iter().map(move |&c| p | c)).collect();
            if partial.is_empty() {
                break;
            }
        }
        candidates.extend(partial);
    }
    candidates.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<Mask> = Vec::new();
    for m in candidates {
        if !minimal.iter().any(|&n| n & !m == 0) {
            minimal.push(m);
        }
    }

    let mut gap_bits = Vec::new();
    for &a in &tp.base_atoms {
        let k = sig
            .belief_of(a)
            .ok_or_else(|| Error::Precondition(format!("no belief atom for {}", sig.name(a))))?;
        let g = sig
            .gap_of(a)
            .ok_or_else(|| Error::Precondition(format!("no gap atom for {}", sig.name(a))))?;
        gap_bits.push((local(a), local(k), local(g)));
    }
    let all: Vec<AtomId> = (0..universe).map(AtomId::from_index).collect();
    let mut answer_sets: Vec<Interpretation> = minimal
        .into_iter()
        .map(|m| {
            let with_gap = gap_bits
                .iter()
                .filter(|&&(a, k, _)| m >> k & 1 == 1 && m >> a & 1 == 0)
                .fold(m, |acc, &(_, _, g)| acc | 1 << g);
            to_interpretation(with_gap, &all, universe)
        })
        .collect();
    answer_sets.sort_by_key(|m| m.iter().collect::<Vec<_>>());
    Ok(answer_sets)
}

/// Members of `answer_sets` with a subset-minimal gap, projected to base and
/// belief atoms and deduplicated.
fn maximal_canonical(tp: &TransformedProgram, answer_sets: &[Interpretation]) -> Vec<Interpretation> {
    let sig = tp.program.signature();
    let gap: Vec<BTreeSet<AtomId>> = answer_sets
        .iter()
        .map(|m| {
            m.iter()
                .filter(|&a| matches!(sig.kind(a), AtomKind::Gap(_)))
                .collect()
        })
        .collect();
    let mut models: Vec<Interpretation> = Vec::new();
    for (m, g) in answer_sets.iter().zip(&gap) {
        if gap.iter().any(|h| h.len() < g.len() && h.is_subset(g)) {
            continue;
        }
        let projected = m.filtered(|a| matches!(sig.kind(a), AtomKind::Base | AtomKind::Belief(_)));
        if !models.contains(&projected) {
            models.push(projected);
        }
    }
    models.sort_by_key(|m| m.names(sig));
    models
}

/// Reference semantics for one program: the transformed program it was read
/// from, `AS(Π)`, and the paracoherent models.
#[derive(Clone, Debug)]
pub struct OracleSemantics {
    pub transformed: TransformedProgram,
    pub answer_sets: Vec<Interpretation>,
    /// Sorted by atom names.
    pub models: Vec<Interpretation>,
}

impl OracleSemantics {
    pub fn signature(&self) -> &Signature {
        self.transformed.program.signature()
    }

    pub fn model_names(&self) -> Vec<Vec<String>> {
        self.models.iter().map(|m| m.names(self.signature())).collect()
    }
}

pub fn oracle_semantics(p: &Program, kind: TransformKind, budget: &OracleBudget) -> Result<OracleSemantics> {
    let transformed = transform(p, kind, true)?;
    let answer_sets = oracle_transformed_answer_sets(&transformed, budget)?;
    let models = maximal_canonical(&transformed, &answer_sets);
    Ok(OracleSemantics {
        transformed,
        answer_sets,
        models,
    })
}

/// `SST(P)`; ids are those of `transform(p, Kappa, true)`.
pub fn oracle_sst(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    Ok(oracle_semantics(p, TransformKind::Kappa, budget)?.models)
}

/// `SEQ(P)`; ids are those of `transform(p, Ht, true)`.
pub fn oracle_seq(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    Ok(oracle_semantics(p, TransformKind::Ht, budget)?.models)
}

/// Shape of generated programs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub atoms: usize,
    pub rules: usize,
    pub max_head: usize,
    pub max_body: usize,
    /// Probability that a body literal is negated.
    pub neg_prob: f64,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            atoms: 5,
            rules: 8,
            max_head: 2,
            max_body: 3,
            neg_prob: 0.5,
            seed: 0,
        }
    }
}

/// Share of generated rules that are constraints.
const CONSTRAINT_PROB: f64 = 0.1;

fn atom_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("p{i}")
    }
}

/// A program drawn from `params`; the same parameters give the same program.
///
/// Atoms are named `a`, `b`, ... and interned in order of first occurrence.
/// Atoms not drawn by any rule do not appear.
pub fn random_program(params: &RandomParams) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut program = Program::new(Signature::new());
    if params.atoms == 0 {
        return program;
    }
    for _ in 0..params.rules {
        let head_len = if params.max_head == 0 || rng.gen_bool(CONSTRAINT_PROB) {
            0
        } else {
            rng.gen_range(1..=params.max_head)
        };
        let min_body = usize::from(head_len == 0).min(params.max_body);
        let body_len = rng.gen_range(min_body..=params.max_body);
        if head_len + body_len == 0 {
            continue;
        }
        let head: Vec<usize> = (0..head_len).map(|_| rng.gen_range(0..params.atoms)).collect();
        let body: Vec<(usize, bool)> = (0..body_len)
            .map(|_| (rng.gen_range(0..params.atoms), rng.gen_bool(params.neg_prob)))
            .collect();
        let sig = program.signature_mut();
        let mut id = |i: usize| sig.intern(&atom_name(i));
        let head: Vec<AtomId> = head.into_iter().map(&mut id).collect();
        let pos: Vec<AtomId> = body.iter().filter(|b| !b.1).map(|b| id(b.0)).collect();
        let neg: Vec<AtomId> = body.iter().filter(|b| b.1).map(|b| id(b.0)).collect();
        program.push_rule(Rule::new(head, pos, neg));
    }
    program
}

/// Parameters for `count` programs of mixed shape: 2 to `max_atoms` atoms,
/// 1 to `max_rules` rules, heads of up to 2 atoms, bodies of up to 3
/// literals, and negation probabilities from 0.1 to 0.9.
pub fn random_suite(count: usize, max_atoms: usize, max_rules: usize, seed: u64) -> Vec<RandomParams> {
    const NEG_PROBS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| RandomParams {
            atoms: rng.gen_range(2.min(max_atoms)..=max_atoms),
            rules: rng.gen_range(1.min(max_rules)..=max_rules),
            max_head: rng.gen_range(1..=2),
            max_body: rng.gen_range(1..=3),
            neg_prob: NEG_PROBS[rng.gen_range(0..NEG_PROBS.len())],
            seed: rng.gen(),
        })
        .collect()
}

/// A generated program together with what the oracle says about it.
#[derive(Clone, Debug)]
pub struct GeneratedProgram {
    pub params: RandomParams,
    pub program: Program,
    /// `AS(P) ≠ ∅`.
    pub coherent: bool,
    pub has_classical_model: bool,
}

pub fn random_instance(params: &RandomParams, budget: &OracleBudget) -> Result<GeneratedProgram> {
    let program = random_program(params);
    Ok(GeneratedProgram {
        params: *params,
        coherent: !oracle_answer_sets(&program, budget)?.is_empty(),
        has_classical_model: oracle_has_classical_model(&program, budget)?,
        program,
    })
}
