//! Viewfronts: partial maps from locations to timestamps.
//!
//! Fronts form a join-semilattice under pointwise maximum with the empty
//! map as bottom. Every synchronization mechanism in the semantics is some
//! discipline for moving these fronts around.

use std::collections::BTreeMap;
use std::fmt;

use crate::lang::ast::{Loc, Tau};

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Front(BTreeMap<Loc, Tau>);

impl Front {
    /// The empty front (lattice bottom).
    pub fn bottom() -> Self {
        Front(BTreeMap::new())
    }

    pub fn is_bottom(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, loc: &Loc) -> Option<Tau> {
        self.0.get(loc).copied()
    }

    /// Sets `loc` to exactly `tau` (not a join; rules that bump a single
    /// entry overwrite it).
    pub fn set(&self, loc: &Loc, tau: Tau) -> Front {
        let mut m = self.0.clone();
        m.insert(loc.clone(), tau);
        Front(m)
    }

    pub fn singleton(loc: &Loc, tau: Tau) -> Front {
        Front::bottom().set(loc, tau)
    }

    /// Pointwise maximum over the union of domains.
    pub fn join(&self, other: &Front) -> Front {
        let mut m = self.0.clone();
        for (loc, tau) in &other.0 {
            m.entry(loc.clone())
                .and_modify(|t| *t = (*t).max(*tau))
                .or_insert(*tau);
        }
        Front(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Loc, Tau)> {
        self.0.iter().map(|(l, t)| (l, *t))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Front {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (loc, tau)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{loc}:{tau}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<(Loc, Tau)> for Front {
    fn from_iter<T: IntoIterator<Item = (Loc, Tau)>>(iter: T) -> Self {
        Front(iter.into_iter().collect())
    }
}
