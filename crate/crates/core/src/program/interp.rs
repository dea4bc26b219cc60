use std::fmt;

use fixedbitset::FixedBitSet;

use super::{AtomId, Signature};

/// A set of atoms over a signature, stored as a bit set indexed by atom id.
///
/// The bit set is sized to the signature it was created for; two
/// interpretations compare equal only when they range over signatures of the
/// same size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    bits: FixedBitSet,
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

impl Interpretation {
    pub fn empty(universe: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn from_atoms(universe: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut interp = Self::empty(universe);
        for atom in atoms {
            interp.insert(atom);
        }
        interp
    }

    /// Size of the signature this interpretation ranges over.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.bits.contains(atom.index())
    }

    pub fn insert(&mut self, atom: AtomId) {
        assert!(
            atom.index() < self.bits.len(),
            "atom {} outside a universe of {}",
            atom.index(),
            self.bits.len()
        );
        self.bits.insert(atom.index());
    }

    pub fn remove(&mut self, atom: AtomId) {
        if atom.index() < self.bits.len() {
            self.bits.set(atom.index(), false);
        }
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.bits.ones().map(AtomId::from_index)
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.iter().all(|a| other.contains(a))
    }

    /// Same atoms over a universe of `universe` atoms; atoms beyond the new
    /// size are dropped.
    pub fn resized(&self, universe: usize) -> Self {
        Self::from_atoms(universe, self.iter().filter(|a| a.index() < universe))
    }

    /// Keeps the atoms accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(AtomId) -> bool) -> Self {
        Self::from_atoms(self.universe(), self.iter().filter(|&a| keep(a)))
    }

    /// Atom names in lexicographic order.
    pub fn names(&self, signature: &Signature) -> Vec<String> {
        let mut names: Vec<String> = self
            .iter()
            .map(|a| signature.name(a).to_string())
            .collect();
        names.sort();
        names
    }

    pub fn display<'a>(&'a self, signature: &'a Signature) -> DisplayInterpretation<'a> {
        DisplayInterpretation {
            interp: self,
            signature,
        }
    }
}

pub struct DisplayInterpretation<'a> {
    interp: &'a Interpretation,
    signature: &'a Signature,
}

impl fmt::Display for DisplayInterpretation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.interp.names(self.signature).join(", "))
    }
}
