//! Finite combinatorial model of a one-dimensional topological structure.
//!
//! A [`Space`] is a simple undirected graph (the 1-complex) together with a
//! designated family of basis neighbourhoods. Open connected sets are
//! connected induced subgraphs, and the boundary of a vertex set is its set
//! of external neighbours.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of the space. Ids are dense in `0..n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for PointId {
    fn from(value: usize) -> Self {
        PointId(value)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered set of points. Iteration is always by ascending id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<PointId>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Convenience constructor from raw ids.
    pub fn of(ids: impl IntoIterator<Item = usize>) -> Self {
        ids.into_iter().map(PointId).collect()
    }

    pub fn range(ids: std::ops::Range<usize>) -> Self {
        Self::of(ids)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.contains(&p)
    }

    pub fn insert(&mut self, p: PointId) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: PointId) -> bool {
        self.0.remove(&p)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = PointId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<PointId> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<PointId> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.symmetric_difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn without(&self, p: PointId) -> VertexSet {
        let mut out = self.clone();
        out.remove(p);
        out
    }

    pub fn ids(&self) -> Vec<usize> {
        self.iter().map(PointId::index).collect()
    }

    pub(crate) fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for p in self.iter() {
            mask[p.0] = true;
        }
        mask
    }

    pub(crate) fn from_mask(mask: &[bool]) -> VertexSet {
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| PointId(i))
            .collect()
    }
}

impl FromIterator<PointId> for VertexSet {
    fn from_iter<T: IntoIterator<Item = PointId>>(iter: T) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl Extend<PointId> for VertexSet {
    fn extend<T: IntoIterator<Item = PointId>>(&mut self, iter: T) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = PointId;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, PointId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// How the basis family of a [`Space`] was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    /// Graph balls `B(v, r)` for every vertex `v` and every listed radius.
    Balls { radii: Vec<usize> },
    /// An explicit list of neighbourhood sets.
    Explicit { sets: Vec<Vec<usize>> },
    /// Open id-intervals `{z : a < z < b}` with `2 <= b - a <= window`.
    ShortIntervals { window: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(PointId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(PointId, PointId),
    #[error("vertex {0} has no neighbours")]
    IsolatedVertex(PointId),
    #[error("basis set {0} is empty")]
    EmptyBasisSet(usize),
    #[error("no basis set contains vertex {0}")]
    BasisDoesNotCover(PointId),
    #[error("point {0} is out of range for a space of {1} points")]
    OutOfRange(PointId, usize),
    #[error("removed set is not contained in the ground set")]
    RemovedNotInGround,
}

/// Clopen partition of a vertex set into connected blocks, ordered by minimum id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub blocks: Vec<VertexSet>,
    #[serde(skip)]
    block_of: BTreeMap<PointId, usize>,
}

impl Partition {
    pub fn from_blocks(blocks: Vec<VertexSet>) -> Self {
        let mut block_of = BTreeMap::new();
        for (i, block) in blocks.iter().enumerate() {
            for p in block {
                block_of.insert(p, i);
            }
        }
        Partition { blocks, block_of }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, p: PointId) -> Option<usize> {
        self.block_of.get(&p).copied()
    }

    /// `true` iff both points are covered and lie in the same block.
    pub fn same_block(&self, a: PointId, b: PointId) -> bool {
        match (self.block_of(a), self.block_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn ground(&self) -> VertexSet {
        self.block_of.keys().copied().collect()
    }
}

/// Open connected parts of a set plus the leftover points that touch its outside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalDecomposition {
    pub open_parts: Vec<VertexSet>,
    pub residue: VertexSet,
}

/// The finite model: vertices, adjacency and basis family. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    n: usize,
    adjacency: Vec<Vec<PointId>>,
    edges: Vec<(PointId, PointId)>,
    basis: Vec<VertexSet>,
    basis_spec: BasisSpec,
}

impl Space {
    /// Validates the edge list and materialises the basis family.
    ///
    /// Ball and interval bases are deduplicated keeping the first occurrence,
    /// so basis indices follow `(vertex, radius)` order for balls and
    /// `(left end, width)` order for short intervals.
    pub fn build(n: usize, edges: &[(usize, usize)], basis_spec: BasisSpec) -> Result<Space, SpaceError> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut edge_list = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(SpaceError::OutOfRange(PointId(w), n));
                }
            }
            if u == v {
                return Err(SpaceError::SelfLoop(PointId(u)));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(SpaceError::DuplicateEdge(PointId(key.0), PointId(key.1)));
            }
            adjacency[u].push(PointId(v));
            adjacency[v].push(PointId(u));
            edge_list.push((PointId(key.0), PointId(key.1)));
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            if nbrs.is_empty() {
                return Err(SpaceError::IsolatedVertex(PointId(v)));
            }
            nbrs.sort_unstable();
        }
        edge_list.sort_unstable();

        let mut space = Space {
            n,
            adjacency,
            edges: edge_list,
            basis: Vec::new(),
            basis_spec: basis_spec.clone(),
        };
        space.basis = space.materialize_basis(&basis_spec)?;

        let mut covered = vec![false; n];
        for set in &space.basis {
            for p in set {
                covered[p.0] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(SpaceError::BasisDoesNotCover(PointId(v)));
        }
        Ok(space)
    }

    fn materialize_basis(&self, spec: &BasisSpec) -> Result<Vec<VertexSet>, SpaceError> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut push = |set: VertexSet, out: &mut Vec<VertexSet>| {
            if seen.insert(set.clone()) {
                out.push(set);
            }
        };
        match spec {
            BasisSpec::Balls { radii } => {
                for v in 0..self.n {
                    for &r in radii {
                        push(self.ball(PointId(v), r), &mut out);
                    }
                }
            }
            BasisSpec::Explicit { sets } => {
                for (i, set) in sets.iter().enumerate() {
                    if set.is_empty() {
                        return Err(SpaceError::EmptyBasisSet(i));
                    }
                    if let Some(&bad) = set.iter().find(|&&p| p >= self.n) {
                        return Err(SpaceError::OutOfRange(PointId(bad), self.n));
                    }
                    // Explicit sets keep their positions, duplicates included.
                    out.push(VertexSet::of(set.iter().copied()));
                }
            }
            BasisSpec::ShortIntervals { window } => {
                let n = self.n as isize;
                for a in -1..n {
                    for width in 2..=(*window as isize) {
                        let b = a + width;
                        if b > n {
                            break;
                        }
                        let set = VertexSet::of(((a + 1) as usize)..(b as usize));
                        if !set.is_empty() {
                            push(set, &mut out);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(PointId, PointId)] {
        &self.edges
    }

    pub fn neighbors(&self, p: PointId) -> &[PointId] {
        &self.adjacency[p.0]
    }

    pub fn degree(&self, p: PointId) -> usize {
        self.adjacency[p.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn are_adjacent(&self, a: PointId, b: PointId) -> bool {
        self.adjacency[a.0].binary_search(&b).is_ok()
    }

    pub fn basis(&self) -> &[VertexSet] {
        &self.basis
    }

    pub fn basis_spec(&self) -> &BasisSpec {
        &self.basis_spec
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.n).map(PointId)
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::range(0..self.n)
    }

    pub fn check_point(&self, p: PointId) -> Result<(), SpaceError> {
        if p.0 < self.n {
            Ok(())
        } else {
            Err(SpaceError::OutOfRange(p, self.n))
        }
    }

    pub fn check_set(&self, set: &VertexSet) -> Result<(), SpaceError> {
        match set.last() {
            Some(p) => self.check_point(p),
            None => Ok(()),
        }
    }

    /// Vertices at graph distance at most `radius` from `center`.
    pub fn ball(&self, center: PointId, radius: usize) -> VertexSet {
        let mut dist = vec![usize::MAX; self.n];
        dist[center.0] = 0;
        let mut queue = VecDeque::from([center]);
        while let Some(u) = queue.pop_front() {
            if dist[u.0] == radius {
                continue;
            }
            for &w in &self.adjacency[u.0] {
                if dist[w.0] == usize::MAX {
                    dist[w.0] = dist[u.0] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist.iter()
            .enumerate()
            .filter(|(_, &d)| d != usize::MAX)
            .map(|(i, _)| PointId(i))
            .collect()
    }

    /// External neighbours of `set`.
    pub fn boundary(&self, set: &VertexSet) -> Result<VertexSet, SpaceError> {
        self.check_set(set)?;
        let mask = set.mask(self.n);
        Ok(self.boundary_of_mask(&mask))
    }

    /// Boundary of `set` restricted to `ambient`.
    pub fn boundary_within(&self, set: &VertexSet, ambient: &VertexSet) -> Result<VertexSet, SpaceError> {
        Ok(self.boundary(set)?.intersection(ambient))
    }

    pub(crate) fn boundary_of_mask(&self, mask: &[bool]) -> VertexSet {
        let mut out = vec![false; self.n];
        for (u, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            for &w in &self.adjacency[u] {
                if !mask[w.0] {
                    out[w.0] = true;
                }
            }
        }
        VertexSet::from_mask(&out)
    }

    /// Connected components of the subgraph induced on `ground \ removed`.
    pub fn components(&self, ground: &VertexSet, removed: &VertexSet) -> Result<Partition, SpaceError> {
        self.check_set(ground)?;
        self.check_set(removed)?;
        if !removed.is_subset(ground) {
            return Err(SpaceError::RemovedNotInGround);
        }
        let mut mask = ground.mask(self.n);
        for p in removed {
            mask[p.0] = false;
        }
        Ok(self.partition_mask(&mask))
    }

    /// Components of the induced subgraph on `mask`, blocks ordered by minimum id.
    pub(crate) fn partition_mask(&self, mask: &[bool]) -> Partition {
        let (labels, count) = self.label_components(mask);
        let mut blocks = vec![VertexSet::new(); count];
        for (v, label) in labels.iter().enumerate() {
            if let Some(l) = label {
                blocks[*l].insert(PointId(v));
            }
        }
        Partition::from_blocks(blocks)
    }

    /// Labels each masked vertex with its component index. Components are
    /// discovered by ascending minimum id, so labels follow that order.
    pub(crate) fn label_components(&self, mask: &[bool]) -> (Vec<Option<usize>>, usize) {
        let mut labels = vec![None; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if !mask[start] || labels[start].is_some() {
                continue;
            }
            labels[start] = Some(count);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if mask[w.0] && labels[w.0].is_none() {
                        labels[w.0] = Some(count);
                        queue.push_back(w.0);
                    }
                }
            }
            count += 1;
        }
        (labels, count)
    }

    pub fn is_connected(&self, set: &VertexSet) -> bool {
        if set.is_empty() {
            return false;
        }
        let mask = set.mask(self.n);
        self.label_components(&mask).1 == 1
    }

    /// Number of connected components of `set` (0 for the empty set).
    pub fn component_count(&self, set: &VertexSet) -> usize {
        let mask = set.mask(self.n);
        self.label_components(&mask).1
    }

    /// Vertices of `set` all of whose neighbours lie in `set`.
    pub fn interior(&self, set: &VertexSet) -> VertexSet {
        let mask = set.mask(self.n);
        set.iter()
            .filter(|p| self.adjacency[p.0].iter().all(|w| mask[w.0]))
            .collect()
    }

    /// Splits `set` into the connected components of its interior and the residue.
    pub fn canonical_decomposition(&self, set: &VertexSet) -> Result<CanonicalDecomposition, SpaceError> {
        self.check_set(set)?;
        let interior = self.interior(set);
        let parts = self.components(&interior, &VertexSet::new())?;
        let residue = set.difference(&interior);
        Ok(CanonicalDecomposition {
            open_parts: parts.blocks,
            residue,
        })
    }

    /// Largest boundary size over the basis family.
    pub fn max_basis_boundary(&self) -> usize {
        self.basis
            .iter()
            .map(|b| self.boundary_of_mask(&b.mask(self.n)).len())
            .max()
            .unwrap_or(0)
    }

    /// Indices of basis sets containing `p`, ascending.
    pub fn basis_containing(&self, p: PointId) -> impl Iterator<Item = usize> + '_ {
        self.basis
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.contains(p))
            .map(|(i, _)| i)
    }
}
