//! Ground disjunctive programs: atoms, rules, weak constraints and the
//! textual front end.
//!
//! A rule `a1 | ... | al :- b1, ..., bm, not bm+1, ..., not bn.` is stored
//! as three sorted, duplicate-free atom lists (head, positive body, negative
//! body). Facts have an empty body, constraints an empty head.

mod interp;
mod parse;
mod print;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use interp::{DisplayInterpretation, Interpretation};
pub use parse::parse;
pub use print::print;

/// Prefix of belief atoms `Ka`.
pub const BELIEF_PREFIX: &str = "k_";
/// Prefix of gap markers `gap(Ka)`.
pub const GAP_PREFIX: &str = "gap_k_";
/// Prefix of the fresh atoms introduced by the kappa transformation.
pub const LAMBDA_PREFIX: &str = "lam_";

/// Dense index of an atom inside a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomId(u32);

impl AtomId {
    pub fn from_index(index: usize) -> Self {
        AtomId(u32::try_from(index).expect("more than u32::MAX atoms"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// What an atom stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// An atom of the source signature.
    Base,
    /// `Ka`: the base atom is believed to hold.
    Belief(AtomId),
    /// Fresh atom for head position `head_pos` of source rule `rule`.
    Lambda { rule: usize, head_pos: usize },
    /// `gap(Ka)` for the given base atom.
    Gap(AtomId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub id: AtomId,
    pub name: String,
    pub kind: AtomKind,
}

/// Returns true when `name` starts with one of the prefixes used for
/// generated atoms.
pub fn is_reserved_name(name: &str) -> bool {
    name.starts_with(BELIEF_PREFIX) || name.starts_with(GAP_PREFIX) || name.starts_with(LAMBDA_PREFIX)
}

/// Interned atom table. Ids are assigned densely in insertion order and never
/// change once assigned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    atoms: Vec<Atom>,
    by_name: HashMap<String, AtomId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Id of the base atom `name`, creating it if needed.
    pub fn intern(&mut self, name: &str) -> AtomId {
        self.add(name, AtomKind::Base)
    }

    /// Id of `name`, creating it with `kind` if needed. An existing atom keeps
    /// its original kind.
    pub fn add(&mut self, name: &str, kind: AtomKind) -> AtomId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = AtomId::from_index(self.atoms.len());
        self.atoms.push(Atom {
            id,
            name: name.to_string(),
            kind,
        });
        self.by_name.insert(name.to_string(), id);
        id
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id.index()]
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.atoms[id.index()].name
    }

    pub fn kind(&self, id: AtomId) -> AtomKind {
        self.atoms[id.index()].kind
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// `Ka` for base atom `a`, if present.
    pub fn belief_of(&self, base: AtomId) -> Option<AtomId> {
        self.lookup(&format!("{BELIEF_PREFIX}{}", self.name(base)))
    }

    /// `gap(Ka)` for base atom `a`, if present.
    pub fn gap_of(&self, base: AtomId) -> Option<AtomId> {
        self.lookup(&format!("{GAP_PREFIX}{}", self.name(base)))
    }

    /// Interpretation holding the named atoms, or `None` if a name is unknown.
    pub fn interpretation<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Option<Interpretation> {
        let mut interp = Interpretation::empty(self.len());
        for name in names {
            interp.insert(self.lookup(name)?);
        }
        Some(interp)
    }
}

fn normalize(atoms: impl IntoIterator<Item = AtomId>) -> Vec<AtomId> {
    let mut atoms: Vec<AtomId> = atoms.into_iter().collect();
    atoms.sort_unstable();
    atoms.dedup();
    atoms
}

/// `a1 | ... | al :- b1, ..., bm, not bm+1, ..., not bn.`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    head: Vec<AtomId>,
    positive: Vec<AtomId>,
    negative: Vec<AtomId>,
}

impl Rule {
    pub fn new(
        head: impl IntoIterator<Item = AtomId>,
        positive: impl IntoIterator<Item = AtomId>,
        negative: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        let rule = Rule {
            head: normalize(head),
            positive: normalize(positive),
            negative: normalize(negative),
        };
        debug_assert!(
            !(rule.head.is_empty() && rule.positive.is_empty() && rule.negative.is_empty()),
            "a rule needs at least one literal"
        );
        rule
    }

    pub fn fact(atom: AtomId) -> Self {
        Rule::new([atom], [], [])
    }

    pub fn constraint(
        positive: impl IntoIterator<Item = AtomId>,
        negative: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        Rule::new([], positive, negative)
    }

    pub fn head(&self) -> &[AtomId] {
        &self.head
    }

    pub fn positive_body(&self) -> &[AtomId] {
        &self.positive
    }

    pub fn negative_body(&self) -> &[AtomId] {
        &self.negative
    }

    pub fn is_fact(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.head.len() <= 1
    }

    pub fn is_positive(&self) -> bool {
        self.negative.is_empty()
    }

    /// A head atom also occurs in the positive body, so every interpretation
    /// satisfies the rule.
    pub fn is_tautology(&self) -> bool {
        self.head.iter().any(|h| self.positive.binary_search(h).is_ok())
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.head
            .iter()
            .chain(&self.positive)
            .chain(&self.negative)
            .copied()
    }

    /// Positive body included and negative body disjoint from `interp`.
    pub fn body_holds(&self, interp: &Interpretation) -> bool {
        self.positive.iter().all(|&b| interp.contains(b))
            && self.negative.iter().all(|&b| !interp.contains(b))
    }

    pub fn satisfied_by(&self, interp: &Interpretation) -> bool {
        !self.body_holds(interp) || self.head.iter().any(|&h| interp.contains(h))
    }
}

/// `:~ b1, ..., bm, not bm+1, ..., not bn.` with unit weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeakConstraint {
    positive: Vec<AtomId>,
    negative: Vec<AtomId>,
}

impl WeakConstraint {
    /// Returns `None` when the two bodies overlap: such a constraint can never
    /// be violated.
    pub fn new(
        positive: impl IntoIterator<Item = AtomId>,
        negative: impl IntoIterator<Item = AtomId>,
    ) -> Option<Self> {
        let positive = normalize(positive);
        let negative = normalize(negative);
        if positive.iter().any(|p| negative.binary_search(p).is_ok()) {
            return None;
        }
        Some(WeakConstraint { positive, negative })
    }

    pub fn positive_body(&self) -> &[AtomId] {
        &self.positive
    }

    pub fn negative_body(&self) -> &[AtomId] {
        &self.negative
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.positive.iter().chain(&self.negative).copied()
    }

    pub fn violated_by(&self, interp: &Interpretation) -> bool {
        self.positive.iter().all(|&b| interp.contains(b))
            && self.negative.iter().all(|&b| !interp.contains(b))
    }
}

/// Syntactic class of a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// Every head has at most one atom.
    pub normal: bool,
    /// No rule has a negative body.
    pub positive: bool,
    pub has_constraints: bool,
    /// No two atoms of one head depend positively on each other.
    pub head_cycle_free: bool,
}

/// A finite list of rules and weak constraints over a signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    signature: Signature,
    rules: Vec<Rule>,
    weak: Vec<WeakConstraint>,
    // number of rules stored before each weak constraint, for printing in input order
    weak_at: Vec<usize>,
}

impl Program {
    pub fn new(signature: Signature) -> Self {
        Program {
            signature,
            rules: Vec::new(),
            weak: Vec::new(),
            weak_at: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_mut(&mut self) -> &mut Signature {
        &mut self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn weak_constraints(&self) -> &[WeakConstraint] {
        &self.weak
    }

    /// Weak constraints paired with the number of rules stored before each.
    pub(crate) fn weak_positions(&self) -> impl Iterator<Item = (usize, &WeakConstraint)> {
        self.weak_at.iter().copied().zip(&self.weak)
    }

    pub fn push_rule(&mut self, rule: Rule) {
        debug_assert!(rule.atoms().all(|a| a.index() < self.signature.len()));
        self.rules.push(rule);
    }

    pub fn push_weak(&mut self, weak: WeakConstraint) {
        debug_assert!(weak.atoms().all(|a| a.index() < self.signature.len()));
        self.weak.push(weak);
        self.weak_at.push(self.rules.len());
    }

    /// A copy of this program with `rules` appended.
    pub fn with_rules(&self, rules: impl IntoIterator<Item = Rule>) -> Program {
        let mut extended = self.clone();
        for rule in rules {
            extended.push_rule(rule);
        }
        extended
    }

    /// A copy of this program with `weak` appended.
    pub fn with_weak(&self, weak: impl IntoIterator<Item = WeakConstraint>) -> Program {
        let mut extended = self.clone();
        for w in weak {
            extended.push_weak(w);
        }
        extended
    }

    /// The same rules without weak constraints.
    pub fn without_weak(&self) -> Program {
        Program {
            signature: self.signature.clone(),
            rules: self.rules.clone(),
            weak: Vec::new(),
            weak_at: Vec::new(),
        }
    }

    /// `At(P)`: atoms occurring in some rule or weak constraint.
    pub fn atoms_of(&self) -> BTreeSet<AtomId> {
        self.rules
            .iter()
            .flat_map(Rule::atoms)
            .chain(self.weak.iter().flat_map(WeakConstraint::atoms))
            .collect()
    }

    pub fn is_model(&self, interp: &Interpretation) -> bool {
        self.rules.iter().all(|r| r.satisfied_by(interp))
    }

    /// Number of weak constraints violated by `interp`.
    pub fn cost(&self, interp: &Interpretation) -> usize {
        self.weak.iter().filter(|w| w.violated_by(interp)).count()
    }

    pub fn empty_interpretation(&self) -> Interpretation {
        Interpretation::empty(self.signature.len())
    }

    pub fn classify(&self) -> Classification {
        Classification {
            normal: self.rules.iter().all(Rule::is_normal),
            positive: self.rules.iter().all(Rule::is_positive),
            has_constraints: self.rules.iter().any(Rule::is_constraint),
            head_cycle_free: self.head_cycle_free(),
        }
    }

    fn head_cycle_free(&self) -> bool {
        let n = self.signature.len();
        // depends[a] = atoms occurring in the positive body of a rule with a in the head
        let mut depends: Vec<Vec<usize>> = vec![Vec::new(); n];
        for rule in &self.rules {
            for &h in rule.head() {
                depends[h.index()].extend(rule.positive_body().iter().map(|b| b.index()));
            }
        }
        let reach = |from: usize, to: usize| {
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            while let Some(x) = stack.pop() {
                for &y in &depends[x] {
                    if y == to {
                        return true;
                    }
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            false
        };
        self.rules.iter().all(|rule| {
            let head = rule.head();
            head.iter().enumerate().all(|(i, a)| {
                head[i + 1..]
                    .iter()
                    .all(|b| !(reach(a.index(), b.index()) && reach(b.index(), a.index())))
            })
        })
    }
}
