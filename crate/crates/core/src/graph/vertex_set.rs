use serde::{Deserialize, Serialize};

use super::VertexId;

/// Sorted vertex ids plus a bitmask for constant-time membership.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawSet", into = "RawSet")]
pub struct VertexSet {
    universe: usize,
    ids: Vec<VertexId>,
    mask: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    universe: usize,
    ids: Vec<VertexId>,
}

impl From<RawSet> for VertexSet {
    fn from(raw: RawSet) -> Self {
        VertexSet::new(raw.universe, raw.ids)
    }
}

impl From<VertexSet> for RawSet {
    fn from(s: VertexSet) -> Self {
        RawSet {
            universe: s.universe,
            ids: s.ids,
        }
    }
}

impl VertexSet {
    /// Builds a set over `0..universe`; ids are sorted and deduplicated.
    /// Ids outside the universe grow it, so callers validate ranges first.
    pub fn new(universe: usize, ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut ids: Vec<VertexId> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self::from_sorted(universe, ids)
    }

    pub(crate) fn from_sorted(universe: usize, ids: Vec<VertexId>) -> Self {
        let universe = universe.max(ids.last().map_or(0, |&x| x + 1));
        let mut mask = vec![0u64; universe.div_ceil(64)];
        for &x in &ids {
            mask[x / 64] |= 1 << (x % 64);
        }
        Self {
            universe,
            ids,
            mask,
        }
    }

    pub fn full(universe: usize) -> Self {
        Self::from_sorted(universe, (0..universe).collect())
    }

    pub fn empty(universe: usize) -> Self {
        Self::from_sorted(universe, Vec::new())
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, x: VertexId) -> bool {
        x < self.universe && self.mask[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexId> {
        self.ids.iter()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn min(&self) -> Option<VertexId> {
        self.ids.first().copied()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let ids = self
            .ids
            .iter()
            .copied()
            .filter(|&x| !other.contains(x))
            .collect();
        Self::from_sorted(self.universe, ids)
    }

    pub fn complement(&self) -> VertexSet {
        let ids = (0..self.universe).filter(|&x| !self.contains(x)).collect();
        Self::from_sorted(self.universe, ids)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.ids.iter().all(|&x| other.contains(x))
    }

    /// Images of the members under `map`, over a new universe.
    pub fn map(&self, universe: usize, map: impl Fn(VertexId) -> VertexId) -> VertexSet {
        VertexSet::new(universe, self.ids.iter().map(|&x| map(x)))
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a VertexId;
    type IntoIter = std::slice::Iter<'a, VertexId>;

    fn into_iter(self) -> Self::IntoIter {
        self.ids.iter()
    }
}
