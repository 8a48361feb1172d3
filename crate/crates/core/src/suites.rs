//! Seeded verification suites run by `linetop verify`.
//!
//! Each suite runs a group of structural checks against one space and returns
//! a [`CheckReport`] per check. A check that cannot apply to the space (for
//! example a family too large to enumerate) is reported as skipped rather than
//! failed.

use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atlas::build_atlas;
use crate::bounds::{component_bound_check, family_component_bound, random_subset, Family, DEFAULT_FAMILY_CAP};
use crate::order::{
    boundary_pair_check, check_order_topology, check_subinterval_law, decompose, grow_connected, interval, order_chart,
    LawReport, OrderChart, Sampling,
};
use crate::space::{PointId, Space, VertexSet};
use crate::splitting::{
    is_locally_flat, non_flat_set, separation_region, sim_classes, split_count, verify_three_part_split, SplitError,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Bounds,
    Order,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "bounds" => Ok(Suite::Bounds),
            "order" => Ok(Suite::Order),
            other => Err(format!("unknown suite {other:?} (expected lemmas, bounds or order)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub violations: Vec<String>,
}

impl CheckReport {
    fn new(check: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            ..Default::default()
        }
    }

    fn skipped(check: &str, why: impl Into<String>) -> Self {
        CheckReport {
            check: check.to_string(),
            skipped: Some(why.into()),
            ..Default::default()
        }
    }

    fn absorb(&mut self, law: LawReport) {
        self.checked += law.checked;
        self.violations.extend(law.violations);
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs `suite` on `space` with all randomness drawn from `sampling.seed`.
pub fn run_suite(space: &Space, suite: Suite, sampling: Sampling) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    match suite {
        Suite::Lemmas => lemma_suite(space, sampling, &mut rng),
        Suite::Bounds => bounds_suite(space, sampling, &mut rng),
        Suite::Order => order_suite(space, sampling),
    }
}

/// Separation classes recomputed by union-find over the edges avoiding `x`.
pub fn separation_oracle(space: &Space, ground: &VertexSet, x: PointId) -> Vec<VertexSet> {
    let mut uf = UnionFind::<usize>::new(space.len());
    for &(u, v) in space.edges() {
        if u != x && v != x && ground.contains(u) && ground.contains(v) {
            uf.union(u.index(), v.index());
        }
    }
    let mut classes: Vec<(usize, VertexSet)> = Vec::new();
    for p in ground.iter().filter(|&p| p != x) {
        let root = uf.find(p.index());
        match classes.iter_mut().find(|(r, _)| *r == root) {
            Some((_, class)) => {
                class.insert(p);
            }
            None => classes.push((root, VertexSet::of([p.index()]))),
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}

fn lemma_suite(space: &Space, sampling: Sampling, rng: &mut ChaCha8Rng) -> Vec<CheckReport> {
    let all = space.all();
    let points: Vec<PointId> = all.iter().collect();
    let mut reports = Vec::new();
    let connected = space.is_connected(&all);

    let mut oracle = CheckReport::new("separation-oracle");
    if connected && points.len() > 1 {
        for &x in &points {
            oracle.checked += 1;
            let profile = sim_classes(space, &all, x).expect("connected ground");
            let expected = separation_oracle(space, &all, x);
            if profile.classes.blocks != expected {
                oracle
                    .violations
                    .push(format!("classes at {x} differ from the union-find oracle"));
            }
            for &(u, v) in space.edges() {
                if u != x && v != x && !profile.related(u, v) {
                    oracle.violations.push(format!("adjacent {u} and {v} separated by {x}"));
                }
            }
        }
        reports.push(oracle);
    } else {
        reports.push(CheckReport::skipped("separation-oracle", "space is not connected"));
    }

    let mut split = CheckReport::new("three-part-split");
    if connected {
        let cut: Vec<PointId> = points
            .iter()
            .copied()
            .filter(|&p| split_count(space, &all, p).is_ok_and(|c| c >= 2))
            .collect();
        let mut pairs: Vec<(PointId, PointId)> = cut
            .iter()
            .flat_map(|&a| cut.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| a != b && !space.are_adjacent(a, b))
            .collect();
        pairs.shuffle(rng);
        for (a, b) in pairs.into_iter().take(sampling.samples) {
            split.checked += 1;
            if let Err(e) = verify_three_part_split(space, &all, a, b) {
                split.violations.push(format!("({a},{b}): {e}"));
            }
        }
    }
    reports.push(split);

    let mut flat_two = CheckReport::new("flat-two-components");
    if connected {
        for &x in &points {
            if !is_locally_flat(space, &all, x).is_ok_and(|f| f.is_flat()) {
                continue;
            }
            for _ in 0..sampling.samples.max(1).div_ceil(points.len().max(1)) {
                let d = grow_connected_through(space, &all, &points, x, rng);
                match split_count(space, &d, x) {
                    Ok(c) if c >= 2 => {
                        flat_two.checked += 1;
                        if c != 2 {
                            flat_two.violations.push(format!("flat {x} splits {d} into {c}"));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    reports.push(flat_two);

    let mut same_bd = CheckReport::new("connected-same-boundary");
    let mut canon = CheckReport::new("canonical-decomposition");
    for _ in 0..sampling.samples {
        let u = grow_connected(space, &all, &points, rng);
        let v = grow_connected(space, &all, &points, rng);
        same_bd.checked += 1;
        let bu = space.boundary(&u).expect("in range");
        let bv = space.boundary(&v).expect("in range");
        if u != v && bu.is_disjoint(&v) && bv.is_disjoint(&u) && !u.is_disjoint(&v) {
            same_bd
                .violations
                .push(format!("{u} and {v} overlap with disjoint boundaries"));
        }

        let x = random_subset(space, rng);
        canon.checked += 1;
        let dec = space.canonical_decomposition(&x).expect("in range");
        let union = dec.open_parts.iter().fold(dec.residue.clone(), |acc, p| acc.union(p));
        let sizes: usize = dec.open_parts.iter().map(VertexSet::len).sum::<usize>() + dec.residue.len();
        if union != x || sizes != x.len() {
            canon.violations.push(format!("pieces of {x} do not reassemble it"));
        }
        let interior = space.interior(&x);
        for part in &dec.open_parts {
            if !space.is_connected(part) || !part.is_subset(&interior) {
                canon
                    .violations
                    .push(format!("part {part} of {x} is not an open connected piece"));
            }
        }
        if !dec.residue.is_disjoint(&interior) {
            canon
                .violations
                .push(format!("residue of {x} contains an interior point"));
        }
    }
    reports.push(same_bd);
    reports.push(canon);

    let mut pairs = CheckReport::new("boundary-pair");
    let mut contiguity = CheckReport::new("separation-region-contiguity");
    if connected {
        let removed = non_flat_set(space, &all).expect("connected");
        let flat_parts = space.components(&all, &removed).expect("in range");
        for part in &flat_parts.blocks {
            match boundary_pair_check(space, part, sampling) {
                Ok(report) => pairs.absorb(report),
                Err(e) => pairs.violations.push(format!("{part}: {e}")),
            }
            let members: Vec<PointId> = part.iter().collect();
            for _ in 0..sampling.samples.div_ceil(flat_parts.len().max(1)) {
                let (Some(&a), Some(&b)) = (members.choose(rng), members.choose(rng)) else {
                    break;
                };
                contiguity.checked += 1;
                match separation_region(space, part, a, b) {
                    Ok(region) if region.is_empty() || space.is_connected(&region) => {}
                    Ok(region) => contiguity
                        .violations
                        .push(format!("separation region of ({a},{b}) in {part} is {region}")),
                    Err(e) => contiguity.violations.push(e.to_string()),
                }
            }
        }
    }
    reports.push(pairs);
    reports.push(contiguity);
    reports
}

fn grow_connected_through(
    space: &Space,
    ground: &VertexSet,
    points: &[PointId],
    x: PointId,
    rng: &mut ChaCha8Rng,
) -> VertexSet {
    let mut set = grow_connected(space, ground, points, rng);
    // extend towards x so the sampled set contains it
    while !set.contains(x) {
        let frontier: Vec<PointId> = space.boundary(&set).expect("in range").iter().collect();
        match frontier.choose(rng) {
            Some(&p) => {
                set.insert(p);
            }
            None => return VertexSet::of([x.index()]),
        }
    }
    set
}

fn bounds_suite(space: &Space, sampling: Sampling, rng: &mut ChaCha8Rng) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let samples: Vec<VertexSet> = (0..sampling.samples).map(|_| random_subset(space, rng)).collect();
    match component_bound_check(space, &samples) {
        Ok(r) => reports.push(CheckReport {
            check: "component-bound".into(),
            checked: r.checked,
            skipped: None,
            violations: r.violations,
        }),
        Err(e) => reports.push(CheckReport::skipped("component-bound", e.to_string())),
    }
    let families = [
        ("family-basis", Family::BasisSets),
        ("family-complements", Family::Complements),
        ("family-intervals", Family::Intervals),
        ("family-symmetric-differences", Family::SymmetricDifferences),
        ("family-boolean-2", Family::BooleanCombinations { depth: 2 }),
    ];
    let mut previous_max = 0;
    for (name, family) in families {
        match family_component_bound(space, family, DEFAULT_FAMILY_CAP) {
            Ok(r) => {
                let mut report = CheckReport {
                    check: name.into(),
                    checked: r.checked,
                    skipped: None,
                    violations: r.violations,
                };
                if matches!(family, Family::BooleanCombinations { .. }) && r.observed_max < previous_max {
                    report.violations.push(format!(
                        "boolean family observed {} below sub-family {previous_max}",
                        r.observed_max
                    ));
                }
                if family == Family::BasisSets || family == Family::Complements {
                    previous_max = previous_max.max(r.observed_max);
                }
                reports.push(report);
            }
            Err(e) => reports.push(CheckReport::skipped(name, e.to_string())),
        }
    }
    reports
}

/// Every pair of valid anchors gives the same chart up to reversal.
pub fn anchor_robustness(space: &Space, chart: &OrderChart) -> LawReport {
    let mut report = LawReport {
        law: "anchor-robustness".into(),
        ..Default::default()
    };
    for anchor in chart.domain() {
        let Ok(other) = order_chart(space, chart.domain(), anchor) else {
            continue;
        };
        report.checked += 1;
        if chart.orientation_against(&other).is_none() {
            report
                .violations
                .push(format!("anchor {anchor} gives an order that is not a reversal"));
        }
    }
    report
}

/// Middle of the three-part split equals the interval, for every non-adjacent
/// pair strictly inside the chart; intervals are symmetric.
pub fn three_part_coherence(space: &Space, chart: &OrderChart) -> LawReport {
    let mut report = LawReport {
        law: "three-part-coherence".into(),
        ..Default::default()
    };
    let order = chart.order();
    let domain = chart.domain();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            let (x, y) = (order[i], order[j]);
            let (Ok(forward), Ok(backward)) = (interval(space, domain, x, y), interval(space, domain, y, x)) else {
                report.violations.push(format!("interval ({x},{y}) failed"));
                continue;
            };
            report.checked += 1;
            if forward.members != backward.members {
                report.violations.push(format!("I({x},{y}) != I({y},{x})"));
            }
            match verify_three_part_split(space, domain, x, y) {
                Ok(split) if split.middle == forward.members => {}
                Ok(split) => report.violations.push(format!(
                    "middle {} of ({x},{y}) differs from I = {}",
                    split.middle, forward.members
                )),
                Err(SplitError::PreconditionViolated(_)) => {}
                Err(e) => report.violations.push(format!("({x},{y}): {e}")),
            }
        }
    }
    report
}

fn order_suite(space: &Space, sampling: Sampling) -> Vec<CheckReport> {
    let all = space.all();
    let mut reports = Vec::new();
    if !space.is_connected(&all) {
        reports.push(CheckReport::skipped("decompose", "space is not connected"));
        return reports;
    }
    let mut charts = Vec::new();
    match decompose(space, &all) {
        Ok(d) => {
            reports.push(CheckReport {
                check: "decompose".into(),
                checked: d.components.len(),
                ..Default::default()
            });
            charts.extend(d.components);
        }
        Err(e) => reports.push(CheckReport {
            check: "decompose".into(),
            checked: 1,
            skipped: None,
            violations: vec![e.to_string()],
        }),
    }
    let mut atlas_report = CheckReport::new("atlas");
    match build_atlas(space, &all) {
        Ok(atlas) => {
            atlas_report.checked = atlas.charts.len();
            charts.extend(atlas.charts);
        }
        Err(e) => atlas_report.violations.push(e.to_string()),
    }
    reports.push(atlas_report);

    let mut sub = CheckReport::new("subinterval-law");
    let mut topo = CheckReport::new("order-topology");
    let mut robust = CheckReport::new("anchor-robustness");
    let mut coherence = CheckReport::new("three-part-coherence");
    for chart in charts.iter().take(sampling.samples.max(1)) {
        sub.absorb(check_subinterval_law(space, chart));
        topo.absorb(check_order_topology(space, chart));
        robust.absorb(anchor_robustness(space, chart));
        coherence.absorb(three_part_coherence(space, chart));
    }
    reports.extend([sub, topo, robust, coherence]);
    reports
}
