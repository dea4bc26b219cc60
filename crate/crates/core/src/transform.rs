//! Epistemic transformations and the auxiliary rules driving the search for
//! gap-minimal answer sets.
//!
//! The kappa transformation replaces every rule
//! `a1 | ... | al :- b1..bm, not bm+1..not bn` that has a negative body by
//!
//! ```text
//! lam_1 | ... | lam_l | k_bm+1 | ... | k_bn :- b1, ..., bm.
//! ai :- lam_i.                      (1 <= i <= l)
//! :- lam_i, bj.                     (1 <= i <= l, m < j <= n)
//! lam_i :- ai, lam_k.               (1 <= i, k <= l)
//! ```
//!
//! and keeps positive rules as they are. The HT transformation adds
//! `k_a :- a.` for every atom and a copy of each source rule lifted to belief
//! atoms (`k_a1 | ... | k_al | k_bm+1 | ... :- k_b1, ..., k_bm.`).
//!
//! Gap rules `gap_k_a :- k_a, not a.` reify the gap: a belief without the
//! corresponding truth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algorithms::GapSet;
use crate::error::{Error, Result};
use crate::program::{
    is_reserved_name, AtomId, AtomKind, Interpretation, Program, Rule, Signature, WeakConstraint, BELIEF_PREFIX,
    GAP_PREFIX, LAMBDA_PREFIX,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// Epistemic kappa transformation: semi-stable models.
    Kappa,
    /// Epistemic HT transformation: semi-equilibrium models.
    Ht,
}

impl TransformKind {
    pub fn semantics_name(self) -> &'static str {
        match self {
            TransformKind::Kappa => "sst",
            TransformKind::Ht => "seq",
        }
    }
}

/// Which part of a kappa expansion a generated rule is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaPart {
    /// `lam_1 | ... | lam_l | k_b... :- b+`
    Guess,
    /// `a_i :- lam_i`
    Derive { head_pos: usize },
    /// `:- lam_i, b_j`
    Block { head_pos: usize, atom: AtomId },
    /// `lam_i :- a_i, lam_k`
    Propagate { head_pos: usize, other: usize },
}

/// Provenance of each rule of a transformed program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    /// Positive source rule kept verbatim.
    Copied { source: usize },
    Kappa { source: usize, part: KappaPart },
    /// `k_a :- a.`
    Belief { atom: AtomId },
    /// Source rule lifted to belief atoms.
    Lifted { source: usize },
    /// `gap_k_a :- k_a, not a.`
    Gap { atom: AtomId },
    /// Rules appended after the transformation (constraints added by an
    /// algorithm, for instance).
    Added,
}

/// `Π = P^χ ∪ P_g` together with the bookkeeping needed to read results back.
#[derive(Clone, Debug)]
pub struct TransformedProgram {
    pub program: Program,
    pub kind: TransformKind,
    /// One entry per rule of `program`.
    pub origin: Vec<RuleOrigin>,
    /// `At(P)` of the source program; ids are shared with `program`.
    pub base_atoms: BTreeSet<AtomId>,
    /// `gap_k_a` for each base atom, in base atom order. Empty when the gap
    /// rules were not requested.
    pub gap_atoms: Vec<AtomId>,
}

impl TransformedProgram {
    /// `gap(M)`: gap markers true in `m`.
    pub fn gap_of(&self, m: &Interpretation) -> GapSet {
        GapSet::new(self.gap_atoms.iter().copied().filter(|&g| m.contains(g)))
    }

    /// `{Ka ∈ m | a ∉ m}`, the gap read off belief and base atoms directly.
    pub fn belief_gap(&self, m: &Interpretation) -> BTreeSet<AtomId> {
        let sig = self.program.signature();
        self.base_atoms
            .iter()
            .filter(|&&a| !m.contains(a))
            .filter_map(|&a| sig.belief_of(a))
            .filter(|&k| m.contains(k))
            .collect()
    }

    /// Number of rules produced by the transformation itself (gap rules excluded).
    pub fn transform_rule_count(&self) -> usize {
        self.origin
            .iter()
            .filter(|o| !matches!(o, RuleOrigin::Gap { .. } | RuleOrigin::Added))
            .count()
    }
}

struct Builder {
    program: Program,
    origin: Vec<RuleOrigin>,
}

impl Builder {
    fn push(&mut self, rule: Rule, origin: RuleOrigin) {
        self.program.push_rule(rule);
        self.origin.push(origin);
    }

    fn sig(&mut self) -> &mut Signature {
        self.program.signature_mut()
    }

    fn belief(&mut self, base: AtomId) -> AtomId {
        let name = format!("{BELIEF_PREFIX}{}", self.program.signature().name(base));
        self.sig().add(&name, AtomKind::Belief(base))
    }
}

fn check_input(p: &Program) -> Result<()> {
    if !p.weak_constraints().is_empty() {
        return Err(Error::WeakConstraintsUnsupported(p.weak_constraints().len()));
    }
    let sig = p.signature();
    if let Some(a) = p.atoms_of().into_iter().find(|&a| is_reserved_name(sig.name(a))) {
        return Err(Error::ReservedAtom(sig.name(a).to_string()));
    }
    Ok(())
}

fn kappa_rules(p: &Program, b: &mut Builder) {
    for (index, rule) in p.rules().iter().enumerate() {
        if rule.is_positive() {
            b.push(rule.clone(), RuleOrigin::Copied { source: index });
            continue;
        }
        let lambdas: Vec<AtomId> = (0..rule.head().len())
            .map(|pos| {
                b.sig().add(
                    &format!("{LAMBDA_PREFIX}{index}_{pos}"),
                    AtomKind::Lambda {
                        rule: index,
                        head_pos: pos,
                    },
                )
            })
            .collect();
        let beliefs: Vec<AtomId> = rule.negative_body().iter().map(|&a| b.belief(a)).collect();
        let source = index;
        b.push(
            Rule::new(lambdas.iter().chain(&beliefs).copied(), rule.positive_body().iter().copied(), []),
            RuleOrigin::Kappa {
                source,
                part: KappaPart::Guess,
            },
        );
        for (i, (&lam, &a)) in lambdas.iter().zip(rule.head()).enumerate() {
            b.push(
                Rule::new([a], [lam], []),
                RuleOrigin::Kappa {
                    source,
                    part: KappaPart::Derive { head_pos: i },
                },
            );
        }
        for (i, &lam) in lambdas.iter().enumerate() {
            for &bj in rule.negative_body() {
                b.push(
                    Rule::constraint([lam, bj], []),
                    RuleOrigin::Kappa {
                        source,
                        part: KappaPart::Block { head_pos: i, atom: bj },
                    },
                );
            }
        }
        // i == k included: the instance is a tautology but part of the schema
        for (i, (&lam_i, &a_i)) in lambdas.iter().zip(rule.head()).enumerate() {
            for (k, &lam_k) in lambdas.iter().enumerate() {
                b.push(
                    Rule::new([lam_i], [a_i, lam_k], []),
                    RuleOrigin::Kappa {
                        source,
                        part: KappaPart::Propagate { head_pos: i, other: k },
                    },
                );
            }
        }
    }
}

fn ht_rules(p: &Program, base: &BTreeSet<AtomId>, b: &mut Builder) {
    for &a in base {
        let k = b.belief(a);
        b.push(Rule::new([k], [a], []), RuleOrigin::Belief { atom: a });
    }
    for (index, rule) in p.rules().iter().enumerate() {
        let head: Vec<AtomId> = rule
            .head()
            .iter()
            .chain(rule.negative_body())
            .map(|&a| b.belief(a))
            .collect();
        let body: Vec<AtomId> = rule.positive_body().iter().map(|&a| b.belief(a)).collect();
        b.push(Rule::new(head, body, []), RuleOrigin::Lifted { source: index });
    }
}

/// `gap_k_a :- k_a, not a.` for every atom of `base`, creating the belief and
/// gap atoms in `signature` when missing.
pub fn gap_rules(signature: &mut Signature, base: &BTreeSet<AtomId>) -> Vec<Rule> {
    base.iter()
        .map(|&a| {
            let name = signature.name(a).to_string();
            let k = signature.add(&format!("{BELIEF_PREFIX}{name}"), AtomKind::Belief(a));
            let g = signature.add(&format!("{GAP_PREFIX}{name}"), AtomKind::Gap(a));
            Rule::new([g], [k], [a])
        })
        .collect()
}

/// `:~ gap_k_a.` for every atom of `base`.
pub fn weak_gap_constraints(signature: &mut Signature, base: &BTreeSet<AtomId>) -> Vec<WeakConstraint> {
    base.iter()
        .map(|&a| {
            let name = format!("{GAP_PREFIX}{}", signature.name(a));
            let g = signature.add(&name, AtomKind::Gap(a));
            WeakConstraint::new([g], []).expect("disjoint bodies")
        })
        .collect()
}

/// Applies `kind` to `p`, appending the gap rules when `with_gap` is set.
pub fn transform(p: &Program, kind: TransformKind, with_gap: bool) -> Result<TransformedProgram> {
    check_input(p)?;
    let base = p.atoms_of();
    let mut b = Builder {
        program: Program::new(p.signature().clone()),
        origin: Vec::new(),
    };
    kappa_rules(p, &mut b);
    if kind == TransformKind::Ht {
        ht_rules(p, &base, &mut b);
    }
    let mut gap_atoms = Vec::new();
    if with_gap {
        let gaps = gap_rules(b.sig(), &base);
        for (rule, &a) in gaps.into_iter().zip(&base) {
            gap_atoms.push(rule.head()[0]);
            b.push(rule, RuleOrigin::Gap { atom: a });
        }
    }
    Ok(TransformedProgram {
        program: b.program,
        kind,
        origin: b.origin,
        base_atoms: base,
        gap_atoms,
    })
}

/// `P^κ ∪ P_g`.
pub fn kappa_transform(p: &Program) -> Result<TransformedProgram> {
    transform(p, TransformKind::Kappa, true)
}

/// `P^HT ∪ P_g`.
pub fn ht_transform(p: &Program) -> Result<TransformedProgram> {
    transform(p, TransformKind::Ht, true)
}

/// `Π_M`: a constraint over all gap atoms of `m` (omitted when `m` has no
/// gap) and a unit constraint for each gap atom false in `m`. Any answer set
/// of `Π ∪ Π_M` has a gap strictly inside `gap(m)`.
pub fn pi_m(tp: &TransformedProgram, m: &Interpretation) -> Vec<Rule> {
    let gap = tp.gap_of(m);
    let mut rules = Vec::with_capacity(tp.gap_atoms.len() + 1);
    if !gap.is_empty() {
        rules.push(Rule::constraint(gap.iter(), []));
    }
    let mut outside: Vec<AtomId> = tp.gap_atoms.iter().copied().filter(|&g| !m.contains(g)).collect();
    outside.sort();
    rules.extend(outside.into_iter().map(|g| Rule::constraint([g], [])));
    rules
}

/// Restriction of `m` to base and belief atoms.
pub fn project_paracoherent(m: &Interpretation, tp: &TransformedProgram) -> Interpretation {
    let sig = tp.program.signature();
    m.filtered(|a| matches!(sig.kind(a), AtomKind::Base | AtomKind::Belief(_)))
}
