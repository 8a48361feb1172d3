//! Graphviz export.

use std::fmt::Write;

use crate::atlas::Atlas;
use crate::order::{Decomposition, OrderChart};
use crate::space::{PointId, Space, VertexSet};

/// Extra structure drawn on top of the bare graph.
#[derive(Copy, Clone, Debug)]
pub enum Annotation<'a> {
    Decomposition(&'a Decomposition),
    Atlas(&'a Atlas),
}

/// Renders `space` as an undirected DOT graph, one line per node and per edge.
///
/// Removed points are shaded; each chart becomes a cluster labelled with its
/// order. Atlas charts overlap, so a point is drawn in the first chart that
/// covers it.
pub fn export_dot(space: &Space, annotation: Option<Annotation<'_>>) -> String {
    let mut out = String::from("graph space {\n  node [shape=circle];\n");
    let (removed, charts): (VertexSet, &[OrderChart]) = match annotation {
        None => (VertexSet::new(), &[]),
        Some(Annotation::Decomposition(d)) => (d.removed.clone(), &d.components),
        Some(Annotation::Atlas(a)) => (a.uncovered.clone(), &a.charts),
    };
    let mut placed = VertexSet::new();
    for (i, chart) in charts.iter().enumerate() {
        let order: Vec<String> = chart.order().iter().map(PointId::to_string).collect();
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"chart {i}: {}\";", order.join(" < "));
        for p in chart.order() {
            if placed.insert(*p) {
                let _ = writeln!(out, "    {p};");
            }
        }
        out.push_str("  }\n");
    }
    for p in space.points() {
        if placed.contains(p) {
            continue;
        }
        if removed.contains(p) {
            let _ = writeln!(out, "  {p} [style=filled, fillcolor=lightgray];");
        } else {
            let _ = writeln!(out, "  {p};");
        }
    }
    for (u, v) in space.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
