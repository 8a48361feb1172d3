//! Structural invariants over randomly generated fixtures.

mod common;

use linetop::atlas::{build_atlas, local_chart};
use linetop::bounds::{component_bound_check, family_component_bound, Family, DEFAULT_FAMILY_CAP};
use linetop::cli::dot::export_dot;
use linetop::generators::{from_betweenness, gen_standard, restricted_interval_structure, BetweennessRelation, Shape};
use linetop::order::{check_order_topology, check_subinterval_law, decompose, interval, order_chart, Orientation};
use linetop::splitting::{
    is_locally_flat, non_flat_set, separation_region, sim_classes, split_count, verify_three_part_split, Flatness,
    SplitError,
};
use linetop::suites::{anchor_robustness, three_part_coherence};
use linetop::{PointId, Space, VertexSet};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (3usize..24).prop_map(|n| Shape::Path { n }),
        (3usize..24).prop_map(|n| Shape::Cycle { n }),
        (3usize..6, 1usize..6).prop_map(|(arms, len)| Shape::Star { arms, len }),
        (2usize..6, 2usize..6, 2usize..6).prop_map(|(a, b, c)| Shape::Theta { lengths: [a, b, c] }),
        (2usize..30, any::<u64>()).prop_map(|(n, seed)| Shape::RandomTree { n, seed }),
    ]
}

fn space() -> impl Strategy<Value = Space> {
    (shape(), prop_oneof![Just(vec![1]), Just(vec![1, 2])]).prop_map(|(s, radii)| gen_standard(&s, &radii).unwrap())
}

/// A space together with a subset of its points, chosen by a bit mask.
fn space_and_subset() -> impl Strategy<Value = (Space, VertexSet)> {
    (space(), prop::collection::vec(any::<bool>(), 64)).prop_map(|(s, bits)| {
        let set = s.points().filter(|p| bits[p.index() % 64]).collect();
        (s, set)
    })
}

/// Connected set grown from `start` by repeatedly absorbing the boundary
/// point picked by the next choice.
fn grow(space: &Space, start: PointId, choices: &[usize]) -> VertexSet {
    let mut set = VertexSet::of([start.index()]);
    for &c in choices {
        let frontier: Vec<PointId> = space.boundary(&set).unwrap().iter().collect();
        if frontier.is_empty() {
            break;
        }
        set.insert(frontier[c % frontier.len()]);
    }
    set
}

fn connected_pair() -> impl Strategy<Value = (Space, VertexSet, VertexSet)> {
    (
        space(),
        any::<usize>(),
        any::<usize>(),
        prop::collection::vec(any::<usize>(), 0..20),
        prop::collection::vec(any::<usize>(), 0..20),
    )
        .prop_map(|(s, a, b, ca, cb)| {
            let n = s.len();
            let u = grow(&s, PointId(a % n), &ca);
            let v = grow(&s, PointId(b % n), &cb);
            (s, u, v)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn boundary_is_outside_and_adjacent((s, x) in space_and_subset()) {
        let bd = s.boundary(&x).unwrap();
        prop_assert!(bd.is_disjoint(&x));
        for p in bd.iter() {
            prop_assert!(s.neighbors(p).iter().any(|w| x.contains(*w)));
        }
        for p in s.points().filter(|p| !x.contains(*p) && !bd.contains(*p)) {
            prop_assert!(s.neighbors(p).iter().all(|w| !x.contains(*w)));
        }
    }

    #[test]
    fn components_partition_the_rest((s, removed) in space_and_subset()) {
        let all = s.all();
        let parts = s.components(&all, &removed).unwrap();
        let rest = all.difference(&removed);
        prop_assert_eq!(parts.ground(), rest.clone());
        let total: usize = parts.blocks.iter().map(VertexSet::len).sum();
        prop_assert_eq!(total, rest.len());
        for (i, block) in parts.blocks.iter().enumerate() {
            prop_assert!(!block.is_empty());
            prop_assert!(s.is_connected(block));
            prop_assert!(s.boundary(block).unwrap().is_subset(&removed));
            for p in block.iter() {
                prop_assert_eq!(parts.block_of(p), Some(i));
            }
        }
        prop_assert_eq!(s.component_count(&rest), parts.len());
    }

    #[test]
    fn canonical_decomposition_reassembles((s, x) in space_and_subset()) {
        let dec = s.canonical_decomposition(&x).unwrap();
        let mut union = dec.residue.clone();
        for (i, part) in dec.open_parts.iter().enumerate() {
            prop_assert!(s.is_connected(part));
            prop_assert!(part.is_subset(&s.interior(&x)));
            prop_assert!(part.is_disjoint(&dec.residue));
            for other in &dec.open_parts[i + 1..] {
                prop_assert!(part.is_disjoint(other));
                // distinct parts of an open set never touch
                prop_assert!(s.boundary(part).unwrap().is_disjoint(other));
            }
            union = union.union(part);
        }
        prop_assert_eq!(union, x.clone());
        prop_assert!(dec.residue.is_disjoint(&s.interior(&x)));
    }

    #[test]
    fn overlapping_connected_sets_with_same_boundary_coincide((s, u, v) in connected_pair()) {
        let bu = s.boundary(&u).unwrap();
        let bv = s.boundary(&v).unwrap();
        if !u.is_disjoint(&v) && bu == bv {
            prop_assert_eq!(&u, &v);
        }
        // a connected set meeting u but avoiding its boundary stays inside u
        if !u.is_disjoint(&v) && bu.is_disjoint(&v) {
            prop_assert!(v.is_subset(&u));
        }
    }

    #[test]
    fn split_profiles_are_consistent(s in space()) {
        let all = s.all();
        for x in s.points() {
            let profile = sim_classes(&s, &all, x).unwrap();
            prop_assert_eq!(profile.count, profile.classes.len());
            prop_assert_eq!(split_count(&s, &all, x).unwrap(), profile.count);
            prop_assert!(profile.count <= s.degree(x).max(1));
            prop_assert!(profile.count >= 1 || s.len() == 1);
        }
    }

    #[test]
    fn flat_witnesses_hold_and_flat_points_have_two_sides(s in space()) {
        let all = s.all();
        let removed = non_flat_set(&s, &all).unwrap();
        for x in s.points() {
            match is_locally_flat(&s, &all, x).unwrap() {
                Flatness::Flat(w) => {
                    prop_assert!(w.holds(&s, &all));
                    prop_assert!(!removed.contains(x));
                    prop_assert_eq!(split_count(&s, &all, x).unwrap(), 2);
                    prop_assert_eq!(s.degree(x), 2);
                }
                Flatness::NotFlat => prop_assert!(removed.contains(x)),
            }
        }
    }

    #[test]
    fn flat_points_split_connected_sets_in_two((s, _, d) in connected_pair()) {
        prop_assume!(d.len() > 1);
        let all = s.all();
        for x in d.iter() {
            if is_locally_flat(&s, &all, x).unwrap().is_flat() {
                let c = split_count(&s, &d, x).unwrap();
                prop_assert!(c <= 2, "flat {} splits {} into {}", x, d, c);
            }
        }
    }

    #[test]
    fn three_part_split_partitions(s in space(), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 1..20)) {
        let all = s.all();
        let n = s.len();
        for (i, j) in picks {
            let (a, b) = (PointId(i % n), PointId(j % n));
            match verify_three_part_split(&s, &all, a, b) {
                Ok(split) => {
                    let pieces = [&split.a_side, &split.middle, &split.b_side];
                    let total: usize = pieces.iter().map(|p| p.len()).sum::<usize>() + 2;
                    prop_assert_eq!(total, n);
                    let union = split.a_side.union(&split.middle).union(&split.b_side).union(&VertexSet::of([a.0, b.0]));
                    prop_assert_eq!(union, all.clone());
                    prop_assert_eq!(s.boundary_within(&split.middle, &all).unwrap(), VertexSet::of([a.0, b.0]));
                }
                Err(SplitError::PreconditionViolated(_)) => {}
                Err(e) => prop_assert!(false, "({}, {}): {}", a, b, e),
            }
        }
    }

    #[test]
    fn intervals_are_symmetric(s in space(), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 1..20)) {
        let all = s.all();
        let n = s.len();
        for (i, j) in picks {
            let (x, y) = (PointId(i % n), PointId(j % n));
            let (Ok(f), Ok(g)) = (interval(&s, &all, x, y), interval(&s, &all, y, x)) else { continue };
            prop_assert_eq!(&f.members, &g.members);
            prop_assert!(!f.members.contains(x) && !f.members.contains(y));
            if x == y {
                prop_assert!(f.members.is_empty());
            }
        }
    }

    #[test]
    fn decomposition_charts_obey_the_laws(s in space()) {
        let all = s.all();
        let Ok(d) = decompose(&s, &all) else { return Ok(()) };
        prop_assert_eq!(&d.removed, &non_flat_set(&s, &all).unwrap());
        let domains: Vec<VertexSet> = d.components.iter().map(|c| c.domain().clone()).collect();
        prop_assert_eq!(domains, s.components(&all, &d.removed).unwrap().blocks);
        for chart in &d.components {
            prop_assert!(check_subinterval_law(&s, chart).passed());
            prop_assert!(check_order_topology(&s, chart).passed());
            prop_assert!(anchor_robustness(&s, chart).passed());
            prop_assert!(three_part_coherence(&s, chart).passed());
        }
    }

    #[test]
    fn separation_regions_are_contiguous(s in space(), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 1..10)) {
        let all = s.all();
        let Ok(d) = decompose(&s, &all) else { return Ok(()) };
        for chart in &d.components {
            let order = chart.order();
            for &(i, j) in &picks {
                let (a, b) = (order[i % order.len()], order[j % order.len()]);
                let region = separation_region(&s, chart.domain(), a, b).unwrap();
                let ranks: Vec<usize> = region.iter().map(|p| chart.rank(p).unwrap()).collect();
                if let (Some(lo), Some(hi)) = (ranks.iter().min(), ranks.iter().max()) {
                    prop_assert_eq!(hi - lo + 1, ranks.len());
                }
                // the region is exactly the points strictly between a and b
                let (ra, rb) = (chart.rank(a).unwrap(), chart.rank(b).unwrap());
                let between = (ra.min(rb) + 1..ra.max(rb)).count();
                prop_assert_eq!(region.len(), between);
            }
        }
    }

    #[test]
    fn anchors_agree_on_paths(n in 5usize..30) {
        let s = gen_standard(&Shape::Path { n }, &[1]).unwrap();
        let d = VertexSet::range(1..n - 1);
        let base = order_chart(&s, &d, PointId(n / 2)).unwrap();
        for a in d.iter() {
            if let Ok(chart) = order_chart(&s, &d, a) {
                prop_assert!(chart.orientation_against(&base).is_some());
            }
        }
        prop_assert_eq!(base.orientation_against(&base), Some(Orientation::Same));
    }

    #[test]
    fn component_bound_when_boundaries_are_large_enough((s, x) in space_and_subset()) {
        prop_assume!(s.max_basis_boundary() >= s.max_degree());
        let report = component_bound_check(&s, &[x]).unwrap();
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn generators_are_deterministic(sh in shape()) {
        let a = gen_standard(&sh, &[1]).unwrap();
        let b = gen_standard(&sh, &[1]).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(a.basis(), b.basis());
        prop_assert!(a.is_connected(&a.all()));
        if let Shape::RandomTree { n, .. } = sh {
            prop_assert_eq!(a.edges().len(), n - 1);
        }
    }

    #[test]
    fn short_interval_sets_have_two_boundary_points(w in 2usize..5, extra in 0usize..10) {
        let s = restricted_interval_structure(2 * w + 2 + extra, w).unwrap();
        prop_assert!(s.max_basis_boundary() <= 2);
        for b in s.basis() {
            prop_assert!(s.is_connected(b));
        }
    }

    #[test]
    fn local_charts_obey_the_laws(n in 6usize..30, radii in prop_oneof![Just(vec![1]), Just(vec![1, 2])], cyclic in any::<bool>()) {
        let sh = if cyclic { Shape::Cycle { n } } else { Shape::Path { n } };
        let s = gen_standard(&sh, &radii).unwrap();
        for x in s.points() {
            if let Some(chart) = local_chart(&s, x).unwrap() {
                prop_assert!(chart.domain().contains(x));
                prop_assert!(check_subinterval_law(&s, &chart).passed());
                prop_assert!(check_order_topology(&s, &chart).passed());
            }
        }
        let atlas = build_atlas(&s, &s.all()).unwrap();
        let covered = atlas.charts.iter().fold(atlas.uncovered.clone(), |acc, c| acc.union(c.domain()));
        prop_assert_eq!(covered, s.all());
    }

    #[test]
    fn betweenness_round_trips(order in Just((0..12).map(PointId).collect::<Vec<_>>()).prop_shuffle(), n in 3usize..12) {
        let order: Vec<PointId> = order.into_iter().filter(|p| p.0 < n).collect();
        let rel = BetweennessRelation::of_order(&order);
        let (_, chart) = from_betweenness(&rel).unwrap();
        let back: Vec<PointId> = chart.order().iter().rev().copied().collect();
        prop_assert!(chart.order() == order.as_slice() || back == order);
    }

    #[test]
    fn dot_has_a_line_per_node_and_edge(s in space()) {
        let text = export_dot(&s, None);
        let edges = text.lines().filter(|l| l.contains(" -- ")).count();
        let nodes = text.lines().filter(|l| {
            let t = l.trim();
            t.ends_with(';') && t.chars().next().is_some_and(|c| c.is_ascii_digit()) && !t.contains("--")
        }).count();
        prop_assert_eq!(edges, s.edges().len());
        prop_assert_eq!(nodes, s.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boolean_family_dominates_its_generators(sh in prop_oneof![
        (3usize..10).prop_map(|n| Shape::Path { n }),
        (3usize..10).prop_map(|n| Shape::Cycle { n }),
        (3usize..4, 1usize..3).prop_map(|(arms, len)| Shape::Star { arms, len }),
    ]) {
        let s = gen_standard(&sh, &[1]).unwrap();
        let basis = family_component_bound(&s, Family::BasisSets, DEFAULT_FAMILY_CAP).unwrap();
        let complements = family_component_bound(&s, Family::Complements, DEFAULT_FAMILY_CAP).unwrap();
        let boolean = family_component_bound(&s, Family::BooleanCombinations { depth: 2 }, DEFAULT_FAMILY_CAP).unwrap();
        prop_assert!(boolean.observed_max >= basis.observed_max);
        prop_assert!(boolean.observed_max >= complements.observed_max);
        prop_assert!(boolean.checked >= basis.checked);
        for r in [&basis, &complements, &boolean] {
            prop_assert!(r.observed_max <= r.bound);
        }
    }
}
