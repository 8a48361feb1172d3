//! Local order charts for spaces without global splitting points.
//!
//! When every basis set has exactly two boundary points, each basis set
//! contains a pierceable one: a basis set `V` such that every `x` in `V` is
//! the only point of `V` on the boundary of some basis set. Connected pieces
//! of pierceable sets carry order charts, and overlapping charts assemble into
//! an atlas and, on a circle, a cyclic order.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::order::{chart_component, order_chart, OrderChart, OrderError};
use crate::space::{PointId, Space, SpaceError, VertexSet};
use crate::splitting::SeparationTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("basis index {0} is out of range")]
    NoSuchBasisSet(usize),
    #[error("basis set {basis} has {size} boundary points, expected 2")]
    BoundaryNotTwo { basis: usize, size: usize },
    #[error("no basis subset of basis set {0} is pierceable")]
    NoPierceableSubset(usize),
    #[error("ground set is not connected")]
    GroundDisconnected,
    #[error("charts {first} and {second} disagree on their overlap")]
    OverlapInconsistent { first: usize, second: usize },
    #[error("no value given for point {0}")]
    MissingValue(PointId),
    #[error("value {value} of point {point} lies outside the codomain chart")]
    ValueOutsideCodomain { point: PointId, value: PointId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atlas {
    pub charts: Vec<OrderChart>,
    pub uncovered: VertexSet,
}

/// A cyclic sequence in canonical rotation: smallest id first, followed by
/// its smaller neighbour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicOrder {
    pub cycle: Vec<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Circularity {
    Cyclic(CyclicOrder),
    NotCyclic { reason: String },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

/// Closed rank range `[start, end]` on which the map is monotone.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
}

/// Maximal monotone segments of a map between charts. Consecutive segments
/// share their junction rank, whose point is a breakpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub breakpoints: VertexSet,
    pub segments: Vec<Segment>,
}

struct Boundaries(Vec<VertexSet>);

impl Boundaries {
    fn new(space: &Space) -> Self {
        Boundaries(
            space
                .basis()
                .iter()
                .map(|b| space.boundary(b).expect("basis sets are in range"))
                .collect(),
        )
    }

    /// Some basis set meets `set` on its boundary exactly in `x`.
    fn pierces(&self, set: &VertexSet, x: PointId) -> bool {
        self.0.iter().any(|bd| {
            let mut hits = bd.iter().filter(|p| set.contains(*p));
            hits.next() == Some(x) && hits.next().is_none()
        })
    }

    fn pierceable(&self, set: &VertexSet) -> bool {
        set.iter().all(|x| self.pierces(set, x))
    }
}

/// Pierceable basis subsets of basis set `outer`, best first: those whose
/// closure stays inside `outer`, then smaller sets, then lower index.
fn pierceable_subsets(
    space: &Space,
    boundaries: &Boundaries,
    outer: usize,
    containing: Option<PointId>,
) -> Result<Vec<usize>, AtlasError> {
    let basis = space.basis();
    let u = basis.get(outer).ok_or(AtlasError::NoSuchBasisSet(outer))?;
    let mut candidates = Vec::new();
    for (index, v) in basis.iter().enumerate() {
        if !v.is_subset(u) {
            continue;
        }
        let size = boundaries.0[index].len();
        if size != 2 {
            return Err(AtlasError::BoundaryNotTwo { basis: index, size });
        }
        if containing.is_none_or(|x| v.contains(x)) && boundaries.pierceable(v) {
            let closed_inside = boundaries.0[index].is_subset(u);
            candidates.push((!closed_inside, v.len(), index));
        }
    }
    candidates.sort_unstable();
    Ok(candidates.into_iter().map(|(_, _, i)| i).collect())
}

/// Finds a pierceable basis set inside basis set `outer`.
///
/// Every basis set contained in `outer` (including `outer`) must have exactly
/// two boundary points.
pub fn pierceable_basis(space: &Space, outer: usize) -> Result<usize, AtlasError> {
    let boundaries = Boundaries::new(space);
    pierceable_subsets(space, &boundaries, outer, None)?
        .first()
        .copied()
        .ok_or(AtlasError::NoPierceableSubset(outer))
}

fn chart_with_anchor(space: &Space, domain: &VertexSet, x: PointId) -> Option<OrderChart> {
    let table = SeparationTable::new(space, domain);
    if table.count(x) == 2 {
        order_chart(space, domain, x).ok()
    } else {
        chart_component(space, domain).ok()
    }
}

fn local_chart_within(space: &Space, ground: &VertexSet, boundaries: &Boundaries, x: PointId) -> Option<OrderChart> {
    let mut fallback = None;
    for outer in space.basis_containing(x) {
        let Ok(subsets) = pierceable_subsets(space, boundaries, outer, Some(x)) else {
            continue;
        };
        for v in subsets {
            let local = space.basis()[v].intersection(ground);
            let pieces = space.components(&local, &VertexSet::new()).expect("in range");
            let Some(piece) = pieces.block_of(x).map(|i| &pieces.blocks[i]) else {
                continue;
            };
            let Some(chart) = chart_with_anchor(space, piece, x) else {
                continue;
            };
            let rank = chart.rank(x).expect("x is in its own chart");
            if rank > 0 && rank + 1 < chart.len() {
                return Some(chart);
            }
            fallback.get_or_insert(chart);
        }
    }
    fallback
}

/// Order chart on a pierceable neighbourhood of `x`, or `None`.
///
/// Charts in which `x` is not an end point are preferred.
pub fn local_chart(space: &Space, x: PointId) -> Result<Option<OrderChart>, AtlasError> {
    space.check_point(x)?;
    let boundaries = Boundaries::new(space);
    Ok(local_chart_within(space, &space.all(), &boundaries, x))
}

/// Greedy cover of `ground` by local charts, visiting uncovered points by
/// ascending id. Fails if two charts disagree on an overlap beyond reversal.
pub fn build_atlas(space: &Space, ground: &VertexSet) -> Result<Atlas, AtlasError> {
    space.check_set(ground)?;
    if !space.is_connected(ground) {
        return Err(AtlasError::GroundDisconnected);
    }
    let boundaries = Boundaries::new(space);
    let mut covered = VertexSet::new();
    let mut charts: Vec<OrderChart> = Vec::new();
    for x in ground {
        if covered.contains(x) {
            continue;
        }
        if let Some(chart) = local_chart_within(space, ground, &boundaries, x) {
            covered.extend(chart.domain().iter());
            charts.push(chart);
        }
    }
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            if charts[i].orientation_against(&charts[j]).is_none() {
                return Err(AtlasError::OverlapInconsistent { first: i, second: j });
            }
        }
    }
    Ok(Atlas {
        uncovered: ground.difference(&covered),
        charts,
    })
}

/// Stitches the chart orders into one cycle.
///
/// Consecutive points of every chart are linked; the atlas describes a circle
/// exactly when these links form a single cycle through every covered point.
pub fn circular_order(atlas: &Atlas) -> Circularity {
    let not = |reason: String| Circularity::NotCyclic { reason };
    if !atlas.uncovered.is_empty() {
        return not(format!("atlas leaves {} uncovered", atlas.uncovered));
    }
    let mut links: BTreeMap<PointId, VertexSet> = BTreeMap::new();
    for chart in &atlas.charts {
        for pair in chart.order().windows(2) {
            links.entry(pair[0]).or_default().insert(pair[1]);
            links.entry(pair[1]).or_default().insert(pair[0]);
        }
    }
    if links.len() < 3 {
        return not("fewer than three linked points".into());
    }
    if let Some((p, nbrs)) = links.iter().find(|(_, nbrs)| nbrs.len() != 2) {
        return not(format!("point {p} has {} stitched neighbours", nbrs.len()));
    }
    let (&start, nbrs) = links.iter().next().expect("nonempty");
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = nbrs.first().expect("two neighbours");
    while cur != start {
        cycle.push(cur);
        let next = links[&cur].iter().find(|&q| q != prev).expect("two neighbours");
        prev = cur;
        cur = next;
    }
    if cycle.len() != links.len() {
        return not(format!(
            "stitching closes after {} of {} points",
            cycle.len(),
            links.len()
        ));
    }
    Circularity::Cyclic(CyclicOrder { cycle })
}

fn step_direction(from: usize, to: usize) -> Direction {
    match to.cmp(&from) {
        std::cmp::Ordering::Greater => Direction::Increasing,
        std::cmp::Ordering::Less => Direction::Decreasing,
        std::cmp::Ordering::Equal => Direction::Constant,
    }
}

/// Splits `f`, read through the chart ranks of `dom` and `cod`, into the
/// fewest maximal monotone segments.
pub fn monotone_decomposition(
    f: &BTreeMap<PointId, PointId>,
    dom: &OrderChart,
    cod: &OrderChart,
) -> Result<MonotoneReport, AtlasError> {
    let values = dom
        .order()
        .iter()
        .map(|&p| {
            let value = *f.get(&p).ok_or(AtlasError::MissingValue(p))?;
            cod.rank(value)
                .ok_or(AtlasError::ValueOutsideCodomain { point: p, value })
        })
        .collect::<Result<Vec<usize>, _>>()?;
    if values.is_empty() {
        return Ok(MonotoneReport {
            breakpoints: VertexSet::new(),
            segments: Vec::new(),
        });
    }

    let mut segments = Vec::new();
    let mut breakpoints = VertexSet::new();
    let mut current = Segment {
        start: 0,
        end: 0,
        direction: Direction::Constant,
    };
    for i in 0..values.len() - 1 {
        let step = step_direction(values[i], values[i + 1]);
        let fits = match current.direction {
            Direction::Constant => true,
            dir => step == dir || step == Direction::Constant,
        };
        if fits {
            if current.direction == Direction::Constant {
                current.direction = step;
            }
        } else {
            segments.push(current);
            breakpoints.insert(dom.order()[i]);
            current = Segment {
                start: i,
                end: i,
                direction: step,
            };
        }
        current.end = i + 1;
    }
    segments.push(current);
    Ok(MonotoneReport { breakpoints, segments })
}
