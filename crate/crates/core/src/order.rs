//! Intervals, order charts and the flat-part decomposition.
//!
//! An [`OrderChart`] recovers a linear order on a connected domain `D` from
//! the separation relation alone. Pick an anchor `a` splitting `D` into two
//! sides `D-` and `D+`; then `x < y` when
//!
//! * both lie in `D+` and `x` separates `a` from `y`,
//! * both lie in `D-` and `y` separates `a` from `x`,
//! * `x` is in `D-` and `y` is in `D+`,
//! * `x` is in `D-` and `y = a`, or
//! * `x = a` and `y` is in `D+`.
//!
//! `D-` is the side holding the smallest id, which fixes the orientation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::space::{PointId, Space, SpaceError, VertexSet};
use crate::splitting::{non_flat_set, SeparationTable, SplitError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("anchor {anchor} splits the domain into {count} components, expected 2")]
    AnchorDoesNotSplit { anchor: PointId, count: usize },
    #[error("comparison is not a strict total order: {0}")]
    NotTotalOrder(String),
    #[error("component {component} cannot be charted: {reason}")]
    ComponentNotOrderable { component: VertexSet, reason: String },
    #[error("interval invariant violated: {0}")]
    LemmaViolated(String),
}

/// `I(x, y)`: the points of `ambient` lying between `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub ambient: VertexSet,
    pub x: PointId,
    pub y: PointId,
    pub members: VertexSet,
}

/// A connected domain with a total order given as a rank bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderChart {
    domain: VertexSet,
    anchor: Option<PointId>,
    order: Vec<PointId>,
    rank: BTreeMap<PointId, usize>,
}

impl Serialize for OrderChart {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            domain: &'a VertexSet,
            anchor: Option<PointId>,
            order: &'a [PointId],
        }
        Repr {
            domain: &self.domain,
            anchor: self.anchor,
            order: &self.order,
        }
        .serialize(serializer)
    }
}

/// Relative orientation of two charts on their common points.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Same,
    Reversed,
}

impl OrderChart {
    fn from_order(domain: VertexSet, anchor: Option<PointId>, order: Vec<PointId>) -> Self {
        let rank = order.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        OrderChart {
            domain,
            anchor,
            order,
            rank,
        }
    }

    /// Chart ranking the domain by id; used where no anchor exists.
    pub fn by_id(domain: VertexSet) -> Self {
        let order = domain.iter().collect();
        Self::from_order(domain, None, order)
    }

    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    pub fn anchor(&self) -> Option<PointId> {
        self.anchor
    }

    /// Points listed by ascending rank.
    pub fn order(&self) -> &[PointId] {
        &self.order
    }

    pub fn rank(&self, p: PointId) -> Option<usize> {
        self.rank.get(&p).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Compares the two orders on the shared points. `None` when they disagree
    /// beyond a global reversal; overlaps of fewer than two points count as `Same`.
    pub fn orientation_against(&self, other: &OrderChart) -> Option<Orientation> {
        let mine: Vec<PointId> = self
            .order
            .iter()
            .copied()
            .filter(|p| other.domain.contains(*p))
            .collect();
        if mine.len() < 2 {
            return Some(Orientation::Same);
        }
        let theirs: Vec<PointId> = other
            .order
            .iter()
            .copied()
            .filter(|p| self.domain.contains(*p))
            .collect();
        if mine == theirs {
            Some(Orientation::Same)
        } else if mine.iter().eq(theirs.iter().rev()) {
            Some(Orientation::Reversed)
        } else {
            None
        }
    }
}

/// Outcome of one of the chart laws: how many cases were checked and which failed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl LawReport {
    fn new(law: &str) -> Self {
        LawReport {
            law: law.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flat points removed and the charted components that remain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub removed: VertexSet,
    pub components: Vec<OrderChart>,
}

fn connected_domain(space: &Space, domain: &VertexSet) -> Result<(), OrderError> {
    space.check_set(domain)?;
    if !space.is_connected(domain) {
        return Err(OrderError::PreconditionViolated("domain is not connected".into()));
    }
    Ok(())
}

/// Computes `I(x, y)` inside `ambient`, checking that its boundary in the
/// ambient set is contained in `{x, y}`.
pub fn interval(space: &Space, ambient: &VertexSet, x: PointId, y: PointId) -> Result<Interval, OrderError> {
    connected_domain(space, ambient)?;
    space.check_point(x)?;
    space.check_point(y)?;
    if !ambient.contains(x) || !ambient.contains(y) {
        return Err(OrderError::PreconditionViolated(format!(
            "{x} and {y} must lie in the ambient set"
        )));
    }
    let members = if x == y {
        VertexSet::new()
    } else {
        let without_x = space.components(ambient, &VertexSet::of([x.index()]))?;
        let without_y = space.components(ambient, &VertexSet::of([y.index()]))?;
        let x_side = &without_x.blocks[without_x.block_of(y).expect("y survives")];
        let y_side = &without_y.blocks[without_y.block_of(x).expect("x survives")];
        x_side.intersection(y_side)
    };
    let bd = space.boundary_within(&members, ambient)?;
    if !bd.is_subset(&VertexSet::of([x.index(), y.index()])) {
        return Err(OrderError::LemmaViolated(format!("boundary of I({x},{y}) is {bd}")));
    }
    Ok(Interval {
        ambient: ambient.clone(),
        x,
        y,
        members,
    })
}

/// Ranks `points` by the anchored five-case comparison and checks that it is a
/// strict total order. `negative(p)` tells which side of the anchor `p` is on
/// and `separates(u, p, q)` whether removing `u` separates `p` from `q`.
pub(crate) fn five_case_order(
    points: &[PointId],
    anchor: PointId,
    negative: impl Fn(PointId) -> bool,
    separates: impl Fn(PointId, PointId, PointId) -> bool,
) -> Result<Vec<PointId>, String> {
    let side = |p: PointId| -> i8 {
        if p == anchor {
            0
        } else if negative(p) {
            -1
        } else {
            1
        }
    };
    let less = |x: PointId, y: PointId| -> bool {
        if x == y {
            return false;
        }
        match (side(x), side(y)) {
            (1, 1) => separates(x, anchor, y),
            (-1, -1) => separates(y, anchor, x),
            (sx, sy) => sx < sy,
        }
    };
    let mut order = vec![None; points.len()];
    for &x in points {
        let mut rank = 0;
        for &y in points {
            if x == y {
                continue;
            }
            match (less(x, y), less(y, x)) {
                (true, true) => return Err(format!("{x} and {y} precede each other")),
                (false, false) => return Err(format!("{x} and {y} are incomparable")),
                (false, true) => rank += 1,
                (true, false) => {}
            }
        }
        // a tournament is transitive iff its scores are distinct
        if order[rank].replace(x).is_some() {
            return Err(format!("comparison is not transitive at {x}"));
        }
    }
    Ok(order.into_iter().map(|p| p.expect("ranks form a bijection")).collect())
}

/// Builds the anchored order on `domain` and verifies it is a strict total order.
pub fn order_chart(space: &Space, domain: &VertexSet, anchor: PointId) -> Result<OrderChart, OrderError> {
    connected_domain(space, domain)?;
    space.check_point(anchor)?;
    if !domain.contains(anchor) {
        return Err(OrderError::PreconditionViolated(format!(
            "anchor {anchor} is not in the domain"
        )));
    }
    let table = SeparationTable::new(space, domain);
    let count = table.count(anchor);
    if count != 2 {
        return Err(OrderError::AnchorDoesNotSplit { anchor, count });
    }
    let sides = space.components(domain, &VertexSet::of([anchor.index()]))?;
    let points: Vec<PointId> = domain.iter().collect();
    // blocks are ordered by minimum id, so block 0 is the negative side
    let order = five_case_order(
        &points,
        anchor,
        |p| sides.block_of(p) == Some(0),
        |u, p, q| table.separates(u, p, q),
    )
    .map_err(OrderError::NotTotalOrder)?;
    Ok(OrderChart::from_order(domain.clone(), Some(anchor), order))
}

/// Checks `I(c, d) = {y : c < y < d}` for every ordered pair of the chart.
pub fn check_subinterval_law(space: &Space, chart: &OrderChart) -> LawReport {
    let mut report = LawReport::new("subinterval");
    let order = chart.order();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            report.checked += 1;
            let expected: VertexSet = order[i + 1..j].iter().copied().collect();
            match interval(space, chart.domain(), order[i], order[j]) {
                Ok(iv) if iv.members == expected => {}
                Ok(iv) => report.violations.push(format!(
                    "I({},{}) = {} but ranks give {}",
                    order[i], order[j], iv.members, expected
                )),
                Err(e) => report.violations.push(format!("I({},{}): {e}", order[i], order[j])),
            }
        }
    }
    report
}

/// Checks that the chart order generates the topology on its domain: each
/// connected piece of a basis set inside the domain is an order interval, and
/// each order interval away from the extremes is some `I(c, d)`.
pub fn check_order_topology(space: &Space, chart: &OrderChart) -> LawReport {
    let mut report = LawReport::new("order-topology");
    let domain = chart.domain();
    for (index, set) in space.basis().iter().enumerate() {
        if !set.is_subset(domain) {
            continue;
        }
        let pieces = space
            .components(set, &VertexSet::new())
            .expect("basis sets are in range");
        for piece in &pieces.blocks {
            report.checked += 1;
            let ranks: Vec<usize> = piece.iter().filter_map(|p| chart.rank(p)).collect();
            let lo = *ranks.iter().min().expect("pieces are nonempty");
            let hi = *ranks.iter().max().expect("pieces are nonempty");
            if hi - lo + 1 != ranks.len() {
                report
                    .violations
                    .push(format!("basis set {index} piece {piece} is not rank-contiguous"));
            }
        }
    }
    let order = chart.order();
    let m = order.len();
    for lo in 1..m.saturating_sub(1) {
        for hi in lo..m - 1 {
            report.checked += 1;
            let run: VertexSet = order[lo..=hi].iter().copied().collect();
            match interval(space, domain, order[lo - 1], order[hi + 1]) {
                Ok(iv) if iv.members == run => {}
                _ => report.violations.push(format!(
                    "order interval {run} is not I({},{})",
                    order[lo - 1],
                    order[hi + 1]
                )),
            }
        }
    }
    report
}

/// Smallest-id point of `component` that splits it into exactly two parts.
pub fn default_anchor(space: &Space, component: &VertexSet) -> Option<PointId> {
    let table = SeparationTable::new(space, component);
    component.iter().find(|&p| table.count(p) == 2)
}

/// Charts a connected component: anchored when possible, by id when it has at
/// most two points.
pub fn chart_component(space: &Space, component: &VertexSet) -> Result<OrderChart, OrderError> {
    match default_anchor(space, component) {
        Some(anchor) => order_chart(space, component, anchor),
        None if component.len() <= 2 => Ok(OrderChart::by_id(component.clone())),
        None => Err(OrderError::ComponentNotOrderable {
            component: component.clone(),
            reason: "no point splits it into two parts".into(),
        }),
    }
}

/// Removes the points without a flatness witness and charts every remaining
/// component.
pub fn decompose(space: &Space, ground: &VertexSet) -> Result<Decomposition, OrderError> {
    let removed = non_flat_set(space, ground)?;
    let rest = space.components(ground, &removed)?;
    let mut components = Vec::with_capacity(rest.len());
    for component in rest.blocks {
        let chart = chart_component(space, &component).map_err(|e| match e {
            OrderError::ComponentNotOrderable { .. } => e,
            other => OrderError::ComponentNotOrderable {
                component: component.clone(),
                reason: other.to_string(),
            },
        })?;
        for report in [
            check_subinterval_law(space, &chart),
            check_order_topology(space, &chart),
        ] {
            if let Some(first) = report.violations.first() {
                return Err(OrderError::ComponentNotOrderable {
                    component: component.clone(),
                    reason: format!("{} law: {first}", report.law),
                });
            }
        }
        components.push(chart);
    }
    Ok(Decomposition { removed, components })
}

/// Settings for checks that sample subsets when exhaustive enumeration is too big.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub samples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { seed: 0, samples: 200 }
    }
}

/// Largest domain whose connected subsets are enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Connected subsets of `domain`: all of them when the domain is small,
/// otherwise `sampling.samples` random ones grown from a random seed point.
pub fn connected_subsets(space: &Space, domain: &VertexSet, sampling: Sampling) -> Vec<VertexSet> {
    let points: Vec<PointId> = domain.iter().collect();
    if points.len() <= EXHAUSTIVE_LIMIT {
        return (1u32..(1 << points.len()))
            .map(|bits| {
                points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .collect::<VertexSet>()
            })
            .filter(|set| space.is_connected(set))
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    (0..sampling.samples)
        .map(|_| grow_connected(space, domain, &points, &mut rng))
        .collect()
}

pub(crate) fn grow_connected(space: &Space, domain: &VertexSet, points: &[PointId], rng: &mut ChaCha8Rng) -> VertexSet {
    let target = rng.gen_range(1..=points.len());
    let start = *points.choose(rng).expect("domain is nonempty");
    let mut set = VertexSet::of([start.index()]);
    while set.len() < target {
        let frontier: Vec<PointId> = space
            .boundary(&set)
            .expect("in range")
            .intersection(domain)
            .iter()
            .collect();
        match frontier.choose(rng) {
            Some(&p) => {
                set.insert(p);
            }
            None => break,
        }
    }
    set
}

/// Within a connected flat domain, no connected subset has more than two
/// boundary points inside the domain.
pub fn boundary_pair_check(space: &Space, domain: &VertexSet, sampling: Sampling) -> Result<LawReport, OrderError> {
    connected_domain(space, domain)?;
    let not_flat = non_flat_set(space, &space.all())?;
    if !not_flat.is_disjoint(domain) {
        return Err(OrderError::PreconditionViolated(format!(
            "domain contains points without a flatness witness: {}",
            not_flat.intersection(domain)
        )));
    }
    let mut report = LawReport::new("boundary-pair");
    for set in connected_subsets(space, domain, sampling) {
        report.checked += 1;
        let bd = space.boundary_within(&set, domain)?;
        if bd.len() > 2 {
            report
                .violations
                .push(format!("{set} has boundary {bd} inside the domain"));
        }
    }
    Ok(report)
}
