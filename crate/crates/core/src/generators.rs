//! Fixture builders: standard 1-complexes, betweenness decoding and the
//! short-interval structure.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{five_case_order, order_chart, OrderChart};
use crate::space::{BasisSpec, PointId, Space, SpaceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("relation is not the betweenness of a total order: {0}")]
    NotBetweennessRealizable(String),
}

/// Shape of a generated fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `0 - 1 - ... - (n-1)`.
    Path { n: usize },
    /// `0 - 1 - ... - (n-1) - 0`.
    Cycle { n: usize },
    /// Centre `0`; arm `i` holds `1 + i*len ..= (i+1)*len`, ordered outwards.
    Star { arms: usize, len: usize },
    /// Branch points `0` and `1` joined by three paths with the given lengths
    /// (edge counts); interior points are numbered path by path from `0` to `1`.
    Theta { lengths: [usize; 3] },
    /// Labelled tree decoded from a seeded Prüfer sequence.
    RandomTree { n: usize, seed: u64 },
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParams(msg.into())
}

impl Shape {
    /// Vertex count and edge list.
    pub fn edges(&self) -> Result<(usize, Vec<(usize, usize)>), GenError> {
        match *self {
            Shape::Path { n } => {
                if n < 3 {
                    return Err(bad("path needs at least 3 points"));
                }
                Ok((n, (0..n - 1).map(|i| (i, i + 1)).collect()))
            }
            Shape::Cycle { n } => {
                if n < 3 {
                    return Err(bad("cycle needs at least 3 points"));
                }
                Ok((n, (0..n).map(|i| (i, (i + 1) % n)).collect()))
            }
            Shape::Star { arms, len } => {
                if arms < 3 || len < 1 {
                    return Err(bad("star needs at least 3 arms of length at least 1"));
                }
                let mut edges = Vec::with_capacity(arms * len);
                for arm in 0..arms {
                    let mut prev = 0;
                    for j in 0..len {
                        let v = 1 + arm * len + j;
                        edges.push((prev, v));
                        prev = v;
                    }
                }
                Ok((1 + arms * len, edges))
            }
            Shape::Theta { lengths } => {
                if lengths.iter().any(|&l| l < 2) {
                    return Err(bad("theta paths need length at least 2"));
                }
                let mut edges = Vec::new();
                let mut next = 2;
                for len in lengths {
                    let mut prev = 0;
                    for _ in 0..len - 1 {
                        edges.push((prev, next));
                        prev = next;
                        next += 1;
                    }
                    edges.push((prev, 1));
                }
                Ok((next, edges))
            }
            Shape::RandomTree { n, seed } => {
                if n < 2 {
                    return Err(bad("random tree needs at least 2 points"));
                }
                Ok((n, random_tree_edges(n, seed)))
            }
        }
    }
}

/// Uniform labelled tree on `n >= 2` points via Prüfer decoding.
fn random_tree_edges(n: usize, seed: u64) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = leaves.pop_first().expect("a Prüfer sequence always leaves a leaf");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    edges.sort_unstable();
    edges
}

/// Builds a fixture with a ball basis of the given radii.
pub fn gen_standard(shape: &Shape, radii: &[usize]) -> Result<Space, GenError> {
    if radii.is_empty() {
        return Err(bad("at least one radius is required"));
    }
    let (n, edges) = shape.edges()?;
    Ok(Space::build(n, &edges, BasisSpec::Balls { radii: radii.to_vec() })?)
}

/// Path `0..n` whose basis is the open id-intervals of width at most `window`.
pub fn restricted_interval_structure(n: usize, window: usize) -> Result<Space, GenError> {
    if window < 2 {
        return Err(bad("window must be at least 2"));
    }
    if n < 2 * window + 2 {
        return Err(bad(format!(
            "need at least {} points for window {window}",
            2 * window + 2
        )));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Ok(Space::build(n, &edges, BasisSpec::ShortIntervals { window })?)
}

/// Triples `(x, y, z)` meaning `z` lies strictly between `x` and `y`.
///
/// Stored with `x < y`; the relation is symmetric in its first two slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetweennessRelation {
    n: usize,
    triples: BTreeSet<(PointId, PointId, PointId)>,
}

impl BetweennessRelation {
    pub fn new(n: usize, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self, GenError> {
        let mut set = BTreeSet::new();
        for (x, y, z) in triples {
            if x >= n || y >= n || z >= n {
                return Err(bad(format!("triple ({x},{y},{z}) out of range for {n} points")));
            }
            if x == y || z == x || z == y {
                return Err(bad(format!("triple ({x},{y},{z}) is reflexive")));
            }
            set.insert((PointId(x.min(y)), PointId(x.max(y)), PointId(z)));
        }
        Ok(BetweennessRelation { n, triples: set })
    }

    /// Strict betweenness of the order listing the points in sequence.
    pub fn of_order(order: &[PointId]) -> Self {
        let mut triples = BTreeSet::new();
        for i in 0..order.len() {
            for j in i + 2..order.len() {
                let (x, y) = (order[i].min(order[j]), order[i].max(order[j]));
                for &z in &order[i + 1..j] {
                    triples.insert((x, y, z));
                }
            }
        }
        BetweennessRelation {
            n: order.len(),
            triples,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = (PointId, PointId, PointId)> + '_ {
        self.triples.iter().copied()
    }

    /// `z` lies strictly between `x` and `y`.
    pub fn between(&self, x: PointId, y: PointId, z: PointId) -> bool {
        self.triples.contains(&(x.min(y), x.max(y), z))
    }

    /// Classes of `a ~x b <=> not between(a, b, x)` on the points other than
    /// `x`, or `None` when that relation is not an equivalence.
    fn classes(&self, x: PointId) -> Option<Vec<Vec<PointId>>> {
        let others: Vec<PointId> = (0..self.n).map(PointId).filter(|&p| p != x).collect();
        let mut label = vec![usize::MAX; self.n];
        let mut classes = Vec::new();
        for &start in &others {
            if label[start.index()] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut class = vec![start];
            label[start.index()] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                for &b in &others {
                    if label[b.index()] == usize::MAX && !self.between(a, b, x) {
                        label[b.index()] = id;
                        class.push(b);
                        queue.push_back(b);
                    }
                }
            }
            classes.push(class);
        }
        let transitive = others.iter().enumerate().all(|(i, &a)| {
            others[i + 1..]
                .iter()
                .all(|&b| (label[a.index()] == label[b.index()]) != self.between(a, b, x))
        });
        transitive.then_some(classes)
    }
}

/// Recovers a total order from its strict betweenness relation.
///
/// Separation is read off the relation (`a ~x b` iff `x` is not between them),
/// the smallest point splitting the rest into two classes becomes the anchor,
/// and the anchored five-case comparison orders the points. The result must
/// re-encode to exactly the input relation. Returns the path through the
/// recovered order together with its chart.
pub fn from_betweenness(rel: &BetweennessRelation) -> Result<(Space, OrderChart), GenError> {
    let fail = |msg: String| Err(GenError::NotBetweennessRealizable(msg));
    if rel.len() < 3 {
        return Err(bad("betweenness needs at least 3 points"));
    }
    if rel.is_empty() {
        return fail("relation is empty".into());
    }
    let mut anchor = None;
    for x in (0..rel.len()).map(PointId) {
        match rel.classes(x) {
            None => return fail(format!("separation at {x} is not an equivalence")),
            Some(classes) if classes.len() == 2 && anchor.is_none() => anchor = Some((x, classes)),
            Some(_) => {}
        }
    }
    let Some((anchor, classes)) = anchor else {
        return fail("no point splits the others into two classes".into());
    };
    // classes are discovered from ascending starts, so class 0 holds the smallest id
    let negative: BTreeSet<PointId> = classes[0].iter().copied().collect();
    let points: Vec<PointId> = (0..rel.len()).map(PointId).collect();
    let order = match five_case_order(
        &points,
        anchor,
        |p| negative.contains(&p),
        |u, p, q| p != u && q != u && rel.between(p, q, u),
    ) {
        Ok(order) => order,
        Err(e) => return fail(e),
    };
    if BetweennessRelation::of_order(&order) != *rel {
        return fail("recovered order does not reproduce the relation".into());
    }
    let edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0].index(), w[1].index())).collect();
    let space = Space::build(rel.len(), &edges, BasisSpec::Balls { radii: vec![1] })?;
    let chart =
        order_chart(&space, &space.all(), anchor).map_err(|e| GenError::NotBetweennessRealizable(e.to_string()))?;
    if chart.order() != order.as_slice() {
        return fail("path chart disagrees with the recovered order".into());
    }
    Ok((space, chart))
}
