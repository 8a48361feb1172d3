#![allow(dead_code)]

use std::path::PathBuf;

use linetop::generators::{gen_standard, restricted_interval_structure, Shape};
use linetop::{PointId, Space, VertexSet};
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::visit::{Bfs, NodeFiltered};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn path(n: usize) -> Space {
    gen_standard(&Shape::Path { n }, &[1]).unwrap()
}

pub fn cycle(n: usize, radii: &[usize]) -> Space {
    gen_standard(&Shape::Cycle { n }, radii).unwrap()
}

pub fn star(arms: usize, len: usize) -> Space {
    gen_standard(&Shape::Star { arms, len }, &[1]).unwrap()
}

pub fn random_tree(n: usize, seed: u64) -> Space {
    gen_standard(&Shape::RandomTree { n, seed }, &[1]).unwrap()
}

/// Every connected fixture the generators produce with at most `max_n` points.
pub fn small_fixtures(max_n: usize) -> Vec<(String, Space)> {
    let mut out = Vec::new();
    for n in 3..=max_n {
        out.push((format!("path({n})"), path(n)));
        for radii in [vec![1], vec![1, 2]] {
            out.push((format!("cycle({n},{radii:?})"), cycle(n, &radii)));
        }
        for seed in 0..40 {
            out.push((format!("tree({n},{seed})"), random_tree(n, seed)));
        }
    }
    for arms in 3..max_n {
        for len in 1..max_n {
            if arms * len < max_n {
                out.push((format!("star({arms},{len})"), star(arms, len)));
            }
        }
    }
    for a in 2..max_n {
        for b in a..max_n {
            for c in b..max_n {
                if 2 + (a - 1) + (b - 1) + (c - 1) <= max_n {
                    let s = gen_standard(&Shape::Theta { lengths: [a, b, c] }, &[1]).unwrap();
                    out.push((format!("theta({a},{b},{c})"), s));
                }
            }
        }
    }
    for w in 2..max_n {
        for n in 2 * w + 2..=max_n {
            out.push((
                format!("intervals({n},{w})"),
                restricted_interval_structure(n, w).unwrap(),
            ));
        }
    }
    out
}

pub fn graph_of(space: &Space) -> UnGraph<(), ()> {
    let edges: Vec<(u32, u32)> = space
        .edges()
        .iter()
        .map(|&(u, v)| (u.index() as u32, v.index() as u32))
        .collect();
    let mut g = UnGraph::<(), ()>::with_capacity(space.len(), edges.len());
    for _ in 0..space.len() {
        g.add_node(());
    }
    for (u, v) in edges {
        g.add_edge(NodeIndex::new(u as usize), NodeIndex::new(v as usize), ());
    }
    g
}

/// Components of `ground \ {removed}` found by breadth-first search, listed by
/// smallest member.
pub fn bfs_components(space: &Space, ground: &VertexSet, removed: PointId) -> Vec<VertexSet> {
    let g = graph_of(space);
    let keep = |n: NodeIndex| n.index() != removed.index() && ground.contains(PointId(n.index()));
    let filtered = NodeFiltered::from_fn(&g, keep);
    let mut seen = VertexSet::new();
    let mut blocks = Vec::new();
    for p in ground.iter().filter(|&p| p != removed) {
        if seen.contains(p) {
            continue;
        }
        let mut block = VertexSet::new();
        let mut bfs = Bfs::new(&filtered, NodeIndex::new(p.index()));
        while let Some(n) = bfs.next(&filtered) {
            block.insert(PointId(n.index()));
        }
        seen.extend(block.iter());
        blocks.push(block);
    }
    blocks
}
