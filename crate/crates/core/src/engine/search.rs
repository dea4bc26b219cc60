//! Chronological backtracking over atom assignments.
//!
//! Rules are read as clauses `not b+ ∨ b- ∨ H` and propagated with unit
//! resolution. In supported mode every true atom additionally needs a rule
//! whose body holds and whose other head atoms are false; an atom without
//! such a candidate is set false, and an atom with exactly one candidate
//! forces that rule's body. Supported mode is sound for answer sets (an
//! unsupported atom can be removed from any model of the reduct) but not for
//! classical models.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::program::{Rule, WeakConstraint};

const UNASSIGNED: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[derive(Clone, Debug)]
pub(crate) struct Clause {
    head: Vec<u32>,
    pos: Vec<u32>,
    neg: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Counters {
    pub decisions: u64,
    pub conflicts: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct Search {
    atoms: usize,
    rules: Vec<Clause>,
    occurs: Vec<Vec<u32>>,
    // rules that may support the atom: it is in the head and not in the positive body
    supports: Vec<Vec<u32>>,
    weak: Vec<Clause>,
    order: Vec<u32>,
    supported: bool,
    value: Vec<i8>,
    trail: Vec<u32>,
    propagated: usize,
    cost_bound: Option<usize>,
    deadline: Option<Instant>,
    pub counters: Counters,
}

pub(crate) fn compile(head: &[crate::program::AtomId], pos: &[crate::program::AtomId], neg: &[crate::program::AtomId]) -> Clause {
    let ids = |xs: &[crate::program::AtomId]| xs.iter().map(|a| a.index() as u32).collect();
    Clause {
        head: ids(head),
        pos: ids(pos),
        neg: ids(neg),
    }
}

impl Search {
    pub fn new(atoms: usize, supported: bool) -> Self {
        Search {
            atoms,
            rules: Vec::new(),
            occurs: vec![Vec::new(); atoms],
            supports: vec![Vec::new(); atoms],
            weak: Vec::new(),
            order: (0..atoms as u32).collect(),
            supported,
            value: vec![UNASSIGNED; atoms],
            trail: Vec::with_capacity(atoms),
            propagated: 0,
            cost_bound: None,
            deadline: None,
            counters: Counters::default(),
        }
    }

    pub fn with_rules<'a>(atoms: usize, supported: bool, rules: impl IntoIterator<Item = &'a Rule>) -> Self {
        let mut search = Search::new(atoms, supported);
        for rule in rules {
            search.add_rule(rule);
        }
        search
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn add_rule(&mut self, rule: &Rule) {
        self.add_clause(compile(rule.head(), rule.positive_body(), rule.negative_body()));
    }

    fn add_clause(&mut self, clause: Clause) {
        let index = self.rules.len() as u32;
        let mut seen: Vec<u32> = clause.head.iter().chain(&clause.pos).chain(&clause.neg).copied().collect();
        seen.sort_unstable();
        seen.dedup();
        for &a in &seen {
            self.occurs[a as usize].push(index);
        }
        for &h in &clause.head {
            if !clause.pos.contains(&h) {
                self.supports[h as usize].push(index);
            }
        }
        self.rules.push(clause);
    }

    pub fn add_weak(&mut self, weak: &WeakConstraint) {
        self.weak.push(compile(&[], weak.positive_body(), weak.negative_body()));
    }

    pub fn set_order(&mut self, order: Vec<u32>) {
        debug_assert_eq!(order.len(), self.atoms);
        self.order = order;
    }

    pub fn set_cost_bound(&mut self, bound: Option<usize>) {
        self.cost_bound = bound;
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    fn reset(&mut self) {
        self.value.iter_mut().for_each(|v| *v = UNASSIGNED);
        self.trail.clear();
        self.propagated = 0;
    }

    fn assign(&mut self, atom: u32, value: i8) {
        debug_assert_eq!(self.value[atom as usize], UNASSIGNED);
        self.value[atom as usize] = value;
        self.trail.push(atom);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let atom = self.trail.pop().unwrap();
            self.value[atom as usize] = UNASSIGNED;
        }
        self.propagated = self.propagated.min(len);
    }

    /// Unit resolution on one rule. Returns false on conflict.
    fn check_rule(&mut self, index: usize) -> bool {
        let rule = &self.rules[index];
        let mut open: Option<(u32, i8)> = None;
        let mut open_count = 0;
        for &b in &rule.pos {
            match self.value[b as usize] {
                FALSE => return true,
                UNASSIGNED => {
                    open_count += 1;
                    open = Some((b, FALSE));
                }
                _ => {}
            }
        }
        for &b in &rule.neg {
            match self.value[b as usize] {
                TRUE => return true,
                UNASSIGNED => {
                    open_count += 1;
                    open = Some((b, TRUE));
                }
                _ => {}
            }
        }
        for &h in &rule.head {
            match self.value[h as usize] {
                TRUE => return true,
                UNASSIGNED => {
                    open_count += 1;
                    open = Some((h, TRUE));
                }
                _ => {}
            }
        }
        match open_count {
            0 => false,
            1 => {
                let (atom, value) = open.unwrap();
                self.assign(atom, value);
                true
            }
            _ => true,
        }
    }

    fn blocked(&self, rule: &Clause, atom: u32) -> bool {
        rule.pos.iter().any(|&b| self.value[b as usize] == FALSE)
            || rule.neg.iter().any(|&b| self.value[b as usize] == TRUE)
            || rule.head.iter().any(|&h| h != atom && self.value[h as usize] == TRUE)
    }

    /// Support propagation for one atom. Returns false on conflict.
    fn check_support(&mut self, atom: u32) -> bool {
        let value = self.value[atom as usize];
        if value == FALSE {
            return true;
        }
        let mut candidate = None;
        let mut count = 0;
        for &r in &self.supports[atom as usize] {
            if !self.blocked(&self.rules[r as usize], atom) {
                count += 1;
                candidate = Some(r);
                if count > 1 {
                    break;
                }
            }
        }
        match (value, count) {
            (TRUE, 0) => false,
            (TRUE, 1) => {
                let r = candidate.unwrap() as usize;
                for i in 0..self.rules[r].pos.len() {
                    let b = self.rules[r].pos[i];
                    match self.value[b as usize] {
                        FALSE => return false,
                        UNASSIGNED => self.assign(b, TRUE),
                        _ => {}
                    }
                }
                for i in 0..self.rules[r].neg.len() {
                    let b = self.rules[r].neg[i];
                    match self.value[b as usize] {
                        TRUE => return false,
                        UNASSIGNED => self.assign(b, FALSE),
                        _ => {}
                    }
                }
                for i in 0..self.rules[r].head.len() {
                    let h = self.rules[r].head[i];
                    if h != atom {
                        match self.value[h as usize] {
                            TRUE => return false,
                            UNASSIGNED => self.assign(h, FALSE),
                            _ => {}
                        }
                    }
                }
                true
            }
            (UNASSIGNED, 0) => {
                self.assign(atom, FALSE);
                true
            }
            _ => true,
        }
    }

    fn violated_weak(&self) -> usize {
        self.weak
            .iter()
            .filter(|w| {
                w.pos.iter().all(|&b| self.value[b as usize] == TRUE)
                    && w.neg.iter().all(|&b| self.value[b as usize] == FALSE)
            })
            .count()
    }

    fn initial_propagation(&mut self) -> bool {
        for r in 0..self.rules.len() {
            if !self.check_rule(r) {
                return false;
            }
        }
        if self.supported {
            for a in 0..self.atoms as u32 {
                if !self.check_support(a) {
                    return false;
                }
            }
        }
        self.propagate()
    }

    fn propagate(&mut self) -> bool {
        while self.propagated < self.trail.len() {
            let atom = self.trail[self.propagated];
            self.propagated += 1;
            for i in 0..self.occurs[atom as usize].len() {
                let r = self.occurs[atom as usize][i] as usize;
                if !self.check_rule(r) {
                    return false;
                }
                if self.supported {
                    for j in 0..self.rules[r].head.len() {
                        let h = self.rules[r].head[j];
                        if !self.check_support(h) {
                            return false;
                        }
                    }
                }
            }
            if self.supported && !self.check_support(atom) {
                return false;
            }
        }
        match self.cost_bound {
            Some(bound) => self.violated_weak() < bound,
            None => true,
        }
    }

    /// Whether the current complete assignment is a minimal model of the
    /// reduct of the loaded rules, so an answer set of them.
    pub fn is_stable(&self) -> bool {
        let inside: Vec<bool> = self.value.iter().map(|&v| v == TRUE).collect();
        !Search::has_smaller_model(self.atoms, self.rules.iter().filter(|r| r.neg.iter().all(|&b| !inside[b as usize])), &inside)
    }

    /// Searches for a model of the positive parts of `rules` strictly inside
    /// `inside`. Only rules whose positive body lies inside can be violated by
    /// a subset, and only their head atoms inside can repair them.
    pub fn has_smaller_model<'a>(atoms: usize, rules: impl Iterator<Item = &'a Clause>, inside: &[bool]) -> bool {
        let members: Vec<u32> = (0..atoms as u32).filter(|&a| inside[a as usize]).collect();
        if members.is_empty() {
            return false;
        }
        let mut sub = Search::new(atoms, true);
        for rule in rules {
            if rule.pos.iter().all(|&b| inside[b as usize]) {
                sub.add_clause(Clause {
                    head: rule.head.iter().copied().filter(|&h| inside[h as usize]).collect(),
                    pos: rule.pos.clone(),
                    neg: Vec::new(),
                });
            }
        }
        // at least one member must go
        sub.add_clause(Clause {
            head: Vec::new(),
            pos: members,
            neg: Vec::new(),
        });
        let mut found = false;
        sub.run(&mut |_| {
            found = true;
            Ok(Control::Stop)
        })
        .expect("no deadline on the minimality check");
        found
    }

    /// True atoms of the current (complete) assignment.
    pub fn true_atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.value.iter().enumerate().filter(|(_, &v)| v == TRUE).map(|(a, _)| a)
    }

    /// Runs the search from scratch, calling `on_model` on every complete
    /// assignment that survives propagation until it returns `Stop`.
    pub fn run(&mut self, on_model: &mut dyn FnMut(&Search) -> Result<Control>) -> Result<Control> {
        self.reset();
        if !self.initial_propagation() {
            self.counters.conflicts += 1;
            return Ok(Control::Continue);
        }
        self.dfs(on_model)
    }

    fn dfs(&mut self, on_model: &mut dyn FnMut(&Search) -> Result<Control>) -> Result<Control> {
        let Some(&atom) = self.order.iter().find(|&&a| self.value[a as usize] == UNASSIGNED) else {
            return on_model(self);
        };
        self.counters.decisions += 1;
        if self.counters.decisions.is_multiple_of(256) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(Error::Timeout);
                }
            }
        }
        let saved = self.trail.len();
        for value in [TRUE, FALSE] {
            self.assign(atom, value);
            if self.propagate() {
                if self.dfs(on_model)? == Control::Stop {
                    self.undo_to(saved);
                    return Ok(Control::Stop);
                }
            } else {
                self.counters.conflicts += 1;
            }
            self.undo_to(saved);
        }
        Ok(Control::Continue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse;

    fn all_assignments(text: &str, supported: bool) -> Vec<Vec<usize>> {
        let p = parse(text).unwrap();
        let mut search = Search::with_rules(p.signature().len(), supported, p.rules());
        let mut found = Vec::new();
        search
            .run(&mut |s| {
                found.push(s.true_atoms().collect());
                Ok(Control::Continue)
            })
            .unwrap();
        found
    }

    #[test]
    fn classical_models_of_a_disjunction() {
        assert_eq!(all_assignments("a | b.", false), [vec![0, 1], vec![0], vec![1]]);
    }

    #[test]
    fn supported_models_drop_unsupported_atoms() {
        assert_eq!(all_assignments("a | b.", true), [vec![0], vec![1]]);
        // a :- a is not a support for a
        assert_eq!(all_assignments("a :- a.", true), [Vec::<usize>::new()]);
        assert!(all_assignments("a :- not a.", true).is_empty());
    }

    #[test]
    fn constraints_prune() {
        assert!(all_assignments("a. :- a.", false).is_empty());
        assert_eq!(all_assignments(":- not a.", false), [vec![0]]);
    }
}
