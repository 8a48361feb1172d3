//! Splitting behaviour under point removal.
//!
//! For a ground set `G` and a point `x`, `a ~x b` holds when `a` and `b` lie
//! in the same connected component of `G \ {x}`. Everything in this module is
//! computed relative to an explicit ground set; the global relation is the
//! case `G = all points`.

use serde::Serialize;
use thiserror::Error;

use crate::space::{Partition, PointId, Space, SpaceError, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("point {0} is not in the ground set")]
    NotInGround(PointId),
    #[error("ground set is not connected")]
    GroundDisconnected,
    #[error("ground set consists of the single point {0}")]
    SingletonGround(PointId),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("three-part split invariant violated: {0}")]
    LemmaViolated(String),
}

/// `d(G \ {x})` together with the classes of `~x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitProfile {
    pub point: PointId,
    pub count: usize,
    pub classes: Partition,
}

impl SplitProfile {
    pub fn related(&self, a: PointId, b: PointId) -> bool {
        self.classes.same_block(a, b)
    }
}

/// Basis neighbourhood `basis` of `point` and points `a`, `b` such that every
/// point of the neighbourhood (within the ground) separates `a` from `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatWitness {
    pub point: PointId,
    pub a: PointId,
    pub b: PointId,
    pub basis: usize,
}

impl FlatWitness {
    /// Re-checks the witness from scratch.
    pub fn holds(&self, space: &Space, ground: &VertexSet) -> bool {
        let Some(set) = space.basis().get(self.basis) else {
            return false;
        };
        if !is_neighbourhood(space, ground, set, self.point) || !ground.contains(self.a) || !ground.contains(self.b) {
            return false;
        }
        set.intersection(ground).iter().all(|u| {
            space
                .components(ground, &VertexSet::of([u.index()]))
                .map(|p| p.block_of(self.a).is_some() && p.block_of(self.b).is_some() && !p.same_block(self.a, self.b))
                .unwrap_or(false)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Flatness {
    Flat(FlatWitness),
    NotFlat,
}

impl Flatness {
    pub fn is_flat(&self) -> bool {
        matches!(self, Flatness::Flat(_))
    }
}

/// The five pieces `a_side ∪ {a} ∪ middle ∪ {b} ∪ b_side` of a connected set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreePartSplit {
    pub a_side: VertexSet,
    pub a: PointId,
    pub middle: VertexSet,
    pub b: PointId,
    pub b_side: VertexSet,
}

/// Component labels of `G \ {u}` for every `u` in a ground set `G`.
pub(crate) struct SeparationTable {
    labels: Vec<Option<(Vec<Option<usize>>, usize)>>,
}

impl SeparationTable {
    pub(crate) fn new(space: &Space, ground: &VertexSet) -> Self {
        let n = space.len();
        let mut mask = ground.mask(n);
        let mut labels = vec![None; n];
        for u in ground {
            mask[u.index()] = false;
            labels[u.index()] = Some(space.label_components(&mask));
            mask[u.index()] = true;
        }
        SeparationTable { labels }
    }

    /// Number of components of `G \ {u}`.
    pub(crate) fn count(&self, u: PointId) -> usize {
        self.labels[u.index()].as_ref().map_or(0, |(_, c)| *c)
    }

    /// `u` separates `a` from `b`: both survive removal of `u` and land in
    /// different components.
    pub(crate) fn separates(&self, u: PointId, a: PointId, b: PointId) -> bool {
        match &self.labels[u.index()] {
            Some((l, _)) => matches!((l[a.index()], l[b.index()]), (Some(x), Some(y)) if x != y),
            None => false,
        }
    }
}

fn check_ground_point(space: &Space, ground: &VertexSet, x: PointId) -> Result<(), SplitError> {
    space.check_set(ground)?;
    space.check_point(x)?;
    if !ground.contains(x) {
        return Err(SplitError::NotInGround(x));
    }
    Ok(())
}

fn check_split_preconditions(space: &Space, ground: &VertexSet, x: PointId) -> Result<(), SplitError> {
    check_ground_point(space, ground, x)?;
    if ground.len() == 1 {
        return Err(SplitError::SingletonGround(x));
    }
    if !space.is_connected(ground) {
        return Err(SplitError::GroundDisconnected);
    }
    Ok(())
}

/// Number of connected components of `ground \ {x}`.
pub fn split_count(space: &Space, ground: &VertexSet, x: PointId) -> Result<usize, SplitError> {
    Ok(sim_classes(space, ground, x)?.count)
}

/// The classes of `~x` on `ground \ {x}`.
pub fn sim_classes(space: &Space, ground: &VertexSet, x: PointId) -> Result<SplitProfile, SplitError> {
    check_split_preconditions(space, ground, x)?;
    let classes = space.components(ground, &VertexSet::of([x.index()]))?;
    Ok(SplitProfile {
        point: x,
        count: classes.len(),
        classes,
    })
}

/// Searches for a flatness witness for `x`.
///
/// Only basis sets having `x` as an interior point count as neighbourhoods of
/// `x`; a ball around a neighbour that misses the other neighbours of `x`
/// does not. Neighbourhoods are tried in index order and candidate pairs in
/// ascending `(a, b)` order, so the returned witness is the first one found.
pub fn is_locally_flat(space: &Space, ground: &VertexSet, x: PointId) -> Result<Flatness, SplitError> {
    check_ground_point(space, ground, x)?;
    let table = SeparationTable::new(space, ground);
    Ok(flatness_with(space, ground, &table, x))
}

/// `set` is a neighbourhood of `x` inside `ground`: it contains `x` and every
/// neighbour of `x` that lies in the ground.
pub fn is_neighbourhood(space: &Space, ground: &VertexSet, set: &VertexSet, x: PointId) -> bool {
    set.contains(x)
        && space
            .neighbors(x)
            .iter()
            .all(|&w| !ground.contains(w) || set.contains(w))
}

pub(crate) fn flatness_with(space: &Space, ground: &VertexSet, table: &SeparationTable, x: PointId) -> Flatness {
    for index in space.basis_containing(x) {
        if !is_neighbourhood(space, ground, &space.basis()[index], x) {
            continue;
        }
        let local = space.basis()[index].intersection(ground);
        // Every u in `local` must separate a from b, so neither can lie in `local`;
        // in particular x itself must separate them.
        let outside: Vec<PointId> = ground.difference(&local).iter().collect();
        for (i, &a) in outside.iter().enumerate() {
            for &b in &outside[i + 1..] {
                if !table.separates(x, a, b) {
                    continue;
                }
                if local.iter().all(|u| table.separates(u, a, b)) {
                    return Flatness::Flat(FlatWitness {
                        point: x,
                        a,
                        b,
                        basis: index,
                    });
                }
            }
        }
    }
    Flatness::NotFlat
}

/// Points of a connected ground set that admit no flatness witness.
pub fn non_flat_set(space: &Space, ground: &VertexSet) -> Result<VertexSet, SplitError> {
    space.check_set(ground)?;
    if !space.is_connected(ground) {
        return Err(SplitError::GroundDisconnected);
    }
    let table = SeparationTable::new(space, ground);
    Ok(ground
        .iter()
        .filter(|&x| !flatness_with(space, ground, &table, x).is_flat())
        .collect())
}

/// Computes and checks the decomposition of a connected set `c` by two
/// splitting points `a` and `b`.
///
/// Adjacent `a`, `b` are rejected: their middle piece is empty in a finite
/// graph, which is the one place the discrete model has no room for points
/// between them.
pub fn verify_three_part_split(
    space: &Space,
    c: &VertexSet,
    a: PointId,
    b: PointId,
) -> Result<ThreePartSplit, SplitError> {
    space.check_set(c)?;
    space.check_point(a)?;
    space.check_point(b)?;
    let pre = |msg: String| Err(SplitError::PreconditionViolated(msg));
    if a == b {
        return pre(format!("a and b must differ (both {a})"));
    }
    if !c.contains(a) || !c.contains(b) {
        return pre(format!("{a} and {b} must both lie in the set"));
    }
    if !space.is_connected(c) {
        return pre("set is not connected".into());
    }
    if space.are_adjacent(a, b) {
        return pre(format!("{a} and {b} are adjacent"));
    }
    let a_parts = space.components(c, &VertexSet::of([a.index()]))?;
    let b_parts = space.components(c, &VertexSet::of([b.index()]))?;
    if a_parts.len() < 2 || b_parts.len() < 2 {
        return pre(format!(
            "both points must split the set (counts {} and {})",
            a_parts.len(),
            b_parts.len()
        ));
    }

    let a_first = a_parts.block_of(b).expect("b survives removal of a");
    let b_first = b_parts.block_of(a).expect("a survives removal of b");
    let union_except = |parts: &Partition, skip: usize| -> VertexSet {
        parts
            .blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .fold(VertexSet::new(), |acc, (_, block)| acc.union(block))
    };
    let a_side = union_except(&a_parts, a_first);
    let b_side = union_except(&b_parts, b_first);
    let middle = a_parts.blocks[a_first].intersection(&b_parts.blocks[b_first]);

    let violated = |msg: String| Err(SplitError::LemmaViolated(msg));
    let single = |p: PointId| VertexSet::of([p.index()]);
    let bd_a = space.boundary_within(&a_side, c)?;
    if bd_a != single(a) {
        return violated(format!("boundary of the {a}-side is {bd_a}"));
    }
    let bd_b = space.boundary_within(&b_side, c)?;
    if bd_b != single(b) {
        return violated(format!("boundary of the {b}-side is {bd_b}"));
    }
    if middle.is_empty() {
        return violated("middle piece is empty".into());
    }
    let bd_mid = space.boundary_within(&middle, c)?;
    if bd_mid != VertexSet::of([a.index(), b.index()]) {
        return violated(format!("boundary of the middle is {bd_mid}"));
    }
    let pieces = [&a_side, &single(a), &middle, &single(b), &b_side];
    let total: usize = pieces.iter().map(|p| p.len()).sum();
    let union = pieces.iter().fold(VertexSet::new(), |acc, p| acc.union(p));
    if total != union.len() || &union != c {
        return violated("pieces do not form a disjoint cover".into());
    }
    Ok(ThreePartSplit {
        a_side,
        a,
        middle,
        b,
        b_side,
    })
}

/// Points of `d \ {a, b}` whose removal separates `a` from `b` inside `d`.
pub fn separation_region(space: &Space, d: &VertexSet, a: PointId, b: PointId) -> Result<VertexSet, SplitError> {
    space.check_set(d)?;
    space.check_point(a)?;
    space.check_point(b)?;
    if !d.contains(a) || !d.contains(b) {
        return Err(SplitError::PreconditionViolated(format!(
            "{a} and {b} must lie in the domain"
        )));
    }
    if !space.is_connected(d) {
        return Err(SplitError::PreconditionViolated("domain is not connected".into()));
    }
    let table = SeparationTable::new(space, d);
    Ok(d.iter()
        .filter(|&x| x != a && x != b && table.separates(x, a, b))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::BasisSpec;

    fn path(n: usize) -> Space {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Space::build(n, &edges, BasisSpec::Balls { radii: vec![1] }).unwrap()
    }

    fn cycle(n: usize) -> Space {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Space::build(n, &edges, BasisSpec::Balls { radii: vec![1] }).unwrap()
    }

    fn star(arms: usize, len: usize) -> Space {
        let mut edges = Vec::new();
        for arm in 0..arms {
            let mut prev = 0;
            for j in 0..len {
                let v = 1 + arm * len + j;
                edges.push((prev, v));
                prev = v;
            }
        }
        Space::build(1 + arms * len, &edges, BasisSpec::Balls { radii: vec![1] }).unwrap()
    }

    fn p(i: usize) -> PointId {
        PointId(i)
    }

    #[test]
    fn split_count_examples() {
        let s = path(7);
        assert_eq!(split_count(&s, &s.all(), p(3)).unwrap(), 2);
        assert_eq!(split_count(&s, &s.all(), p(0)).unwrap(), 1);
        let st = star(3, 4);
        assert_eq!(split_count(&st, &st.all(), p(0)).unwrap(), 3);
    }

    #[test]
    fn split_count_errors() {
        let s = path(7);
        assert_eq!(
            split_count(&s, &VertexSet::of([0, 1]), p(3)),
            Err(SplitError::NotInGround(p(3)))
        );
        assert_eq!(
            split_count(&s, &VertexSet::of([0, 1, 4]), p(0)),
            Err(SplitError::GroundDisconnected)
        );
        assert_eq!(
            split_count(&s, &VertexSet::of([2]), p(2)),
            Err(SplitError::SingletonGround(p(2)))
        );
    }

    #[test]
    fn sim_classes_examples() {
        let s = path(7);
        let prof = sim_classes(&s, &s.all(), p(3)).unwrap();
        assert_eq!(
            prof.classes.blocks,
            vec![VertexSet::of([0, 1, 2]), VertexSet::of([4, 5, 6])]
        );
        assert!(prof.related(p(0), p(2)));
        assert!(!prof.related(p(2), p(4)));
        let c = cycle(6);
        let prof = sim_classes(&c, &c.all(), p(0)).unwrap();
        assert_eq!(prof.classes.blocks, vec![VertexSet::of([1, 2, 3, 4, 5])]);
    }

    #[test]
    fn flatness_on_path_interior() {
        let s = path(11);
        let all = s.all();
        let Flatness::Flat(w) = is_locally_flat(&s, &all, p(5)).unwrap() else {
            panic!("5 should be flat");
        };
        assert!(w.holds(&s, &all));
        assert!(s.basis()[w.basis].contains(p(5)));
        // B(5, 1) = {4, 5, 6} is the only radius-1 ball with 5 inside; smallest pair is (0, 7)
        assert_eq!(
            w,
            FlatWitness {
                point: p(5),
                a: p(0),
                b: p(7),
                basis: 5
            }
        );
        let inner = FlatWitness { basis: 4, ..w.clone() };
        assert!(!inner.holds(&s, &all));
        // the hand-picked witness B(5, 1) with a = 2, b = 8 is valid as well
        let alt = FlatWitness {
            point: p(5),
            a: p(2),
            b: p(8),
            basis: 5,
        };
        assert_eq!(s.basis()[5], VertexSet::of([4, 5, 6]));
        assert!(alt.holds(&s, &all));
    }

    #[test]
    fn flatness_negative_examples() {
        let s = path(7);
        assert_eq!(is_locally_flat(&s, &s.all(), p(0)).unwrap(), Flatness::NotFlat);
        let st = star(3, 4);
        assert_eq!(is_locally_flat(&st, &st.all(), p(0)).unwrap(), Flatness::NotFlat);
        assert_eq!(
            is_locally_flat(&s, &VertexSet::of([1, 2]), p(0)),
            Err(SplitError::NotInGround(p(0)))
        );
    }

    #[test]
    fn non_flat_set_examples() {
        let s = path(11);
        assert_eq!(non_flat_set(&s, &s.all()).unwrap(), VertexSet::of([0, 1, 9, 10]));
        let st = star(3, 4);
        let nf = non_flat_set(&st, &st.all()).unwrap();
        assert_eq!(nf, VertexSet::of([0, 3, 4, 7, 8, 11, 12]));
        let c = cycle(12);
        assert_eq!(non_flat_set(&c, &c.all()).unwrap(), c.all());
        assert_eq!(
            non_flat_set(&s, &VertexSet::of([0, 2])),
            Err(SplitError::GroundDisconnected)
        );
    }

    #[test]
    fn three_part_split_examples() {
        let s = path(9);
        let split = verify_three_part_split(&s, &s.all(), p(3), p(6)).unwrap();
        assert_eq!(split.a_side, VertexSet::of([0, 1, 2]));
        assert_eq!(split.middle, VertexSet::of([4, 5]));
        assert_eq!(split.b_side, VertexSet::of([7, 8]));

        let s5 = path(5);
        let split = verify_three_part_split(&s5, &s5.all(), p(1), p(3)).unwrap();
        assert_eq!(split.a_side, VertexSet::of([0]));
        assert_eq!(split.middle, VertexSet::of([2]));
        assert_eq!(split.b_side, VertexSet::of([4]));

        for (a, b) in [(3, 3), (3, 4), (0, 4)] {
            assert!(matches!(
                verify_three_part_split(&s, &s.all(), p(a), p(b)),
                Err(SplitError::PreconditionViolated(_))
            ));
        }
    }

    #[test]
    fn separation_region_examples() {
        let s = path(9);
        assert_eq!(
            separation_region(&s, &s.all(), p(2), p(6)).unwrap(),
            VertexSet::of([3, 4, 5])
        );
        assert!(separation_region(&s, &s.all(), p(2), p(3)).unwrap().is_empty());
        let c = cycle(6);
        assert!(separation_region(&c, &c.all(), p(0), p(3)).unwrap().is_empty());
        assert!(matches!(
            separation_region(&s, &VertexSet::of([0, 1]), p(0), p(5)),
            Err(SplitError::PreconditionViolated(_))
        ));
    }
}
