//! Component-count bounds in terms of boundary sizes.
//!
//! With `K` the largest boundary of a basis set, a set `X` with `n` boundary
//! points has at most `n * K` components; over a family whose members have at
//! most `n` boundary points the uniform bound is `C = d * K * n`, `d` being
//! the number of components of the whole space. A boundaryless set in a
//! connected space is empty or everything, so a zero bound is read as 1.

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::order::interval;
use crate::space::{Space, SpaceError, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("space is not connected")]
    GroundDisconnected,
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("family has {size} members, more than the cap of {cap}")]
    FamilyTooLarge { size: usize, cap: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    /// Largest admissible component count over the checked sets.
    pub bound: usize,
    pub k: usize,
    /// Largest boundary size seen.
    pub n: usize,
    pub checked: usize,
    pub observed_max: usize,
    pub witnesses: Vec<(String, usize)>,
    pub violations: Vec<String>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const DEFAULT_FAMILY_CAP: usize = 100_000;

/// A family of sets enumerated by [`family_component_bound`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    BasisSets,
    Complements,
    Intervals,
    SymmetricDifferences,
    /// All boolean combinations of at most `depth` basis sets (`depth` is 1 or 2).
    BooleanCombinations {
        depth: usize,
    },
}

impl FromStr for Family {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basis" => Ok(Family::BasisSets),
            "complements" => Ok(Family::Complements),
            "intervals" => Ok(Family::Intervals),
            "symmetric-differences" => Ok(Family::SymmetricDifferences),
            "boolean:1" => Ok(Family::BooleanCombinations { depth: 1 }),
            "boolean:2" => Ok(Family::BooleanCombinations { depth: 2 }),
            other => Err(BoundsError::UnknownFamily(other.to_string())),
        }
    }
}

impl Family {
    fn size(self, space: &Space) -> usize {
        let m = space.basis().len();
        let n = space.len();
        match self {
            Family::BasisSets | Family::Complements => m,
            Family::Intervals => n * n,
            Family::SymmetricDifferences => m * m.saturating_sub(1) / 2,
            Family::BooleanCombinations { depth: 1 } => 4 * m,
            Family::BooleanCombinations { .. } => 4 * m + 16 * (m * m.saturating_sub(1) / 2),
        }
    }

    fn members(self, space: &Space) -> Result<Vec<(String, VertexSet)>, BoundsError> {
        let basis = space.basis();
        let all = space.all();
        let mut out = Vec::new();
        match self {
            Family::BasisSets => {
                out.extend(basis.iter().enumerate().map(|(i, b)| (format!("B{i}"), b.clone())));
            }
            Family::Complements => {
                out.extend(
                    basis
                        .iter()
                        .enumerate()
                        .map(|(i, b)| (format!("~B{i}"), all.difference(b))),
                );
            }
            Family::Intervals => {
                if !space.is_connected(&all) {
                    return Err(BoundsError::GroundDisconnected);
                }
                for x in space.points() {
                    for y in space.points() {
                        let iv = interval(space, &all, x, y).map_err(|_| BoundsError::GroundDisconnected)?;
                        out.push((format!("I({x},{y})"), iv.members));
                    }
                }
            }
            Family::SymmetricDifferences => {
                for i in 0..basis.len() {
                    for j in i + 1..basis.len() {
                        out.push((format!("B{i}^B{j}"), basis[i].symmetric_difference(&basis[j])));
                    }
                }
            }
            Family::BooleanCombinations { depth } => {
                for (i, b) in basis.iter().enumerate() {
                    for (tag, set) in [
                        ("0", VertexSet::new()),
                        ("", b.clone()),
                        ("~", all.difference(b)),
                        ("1", all.clone()),
                    ] {
                        out.push((format!("{tag}B{i}"), set));
                    }
                }
                if depth >= 2 {
                    for i in 0..basis.len() {
                        for j in i + 1..basis.len() {
                            let atoms = [
                                basis[i].intersection(&basis[j]),
                                basis[i].difference(&basis[j]),
                                basis[j].difference(&basis[i]),
                                all.difference(&basis[i].union(&basis[j])),
                            ];
                            // each of the 16 truth tables picks a union of atoms
                            for table in 0u8..16 {
                                let set = (0..4)
                                    .filter(|bit| table & (1 << bit) != 0)
                                    .fold(VertexSet::new(), |acc, bit| acc.union(&atoms[bit]));
                                out.push((format!("f{table}(B{i},B{j})"), set));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn allowed(bound: usize) -> usize {
    bound.max(1)
}

/// Checks `d(X) <= |bd(X)| * K` for every sample.
pub fn component_bound_check(space: &Space, samples: &[VertexSet]) -> Result<BoundReport, BoundsError> {
    if !space.is_connected(&space.all()) {
        return Err(BoundsError::GroundDisconnected);
    }
    let k = space.max_basis_boundary();
    let mut report = BoundReport {
        k,
        ..Default::default()
    };
    for set in samples {
        let n = space.boundary(set)?.len();
        let d = space.component_count(set);
        let limit = allowed(n * k);
        report.checked += 1;
        report.n = report.n.max(n);
        report.bound = report.bound.max(limit);
        if d > report.observed_max || report.witnesses.is_empty() {
            report.observed_max = d;
            report.witnesses = vec![(set.to_string(), d)];
        }
        if d > limit {
            report
                .violations
                .push(format!("{set}: {d} components with {n} boundary points (K = {k})"));
        }
    }
    Ok(report)
}

/// Enumerates `family` and checks every member against `C = d * K * n`.
pub fn family_component_bound(space: &Space, family: Family, cap: usize) -> Result<BoundReport, BoundsError> {
    if let Family::BooleanCombinations { depth } = family {
        if !(1..=2).contains(&depth) {
            return Err(BoundsError::UnknownFamily(format!("boolean:{depth}")));
        }
    }
    let size = family.size(space);
    if size > cap {
        return Err(BoundsError::FamilyTooLarge { size, cap });
    }
    let members = family.members(space)?;
    let k = space.max_basis_boundary();
    let d = space.component_count(&space.all());
    let mut counts = Vec::with_capacity(members.len());
    let mut n = 0;
    for (_, set) in &members {
        n = n.max(space.boundary(set)?.len());
        counts.push(space.component_count(set));
    }
    let c = d * k * n;
    let limit = allowed(c);
    let mut report = BoundReport {
        bound: limit,
        k,
        n,
        checked: members.len(),
        ..Default::default()
    };
    for ((name, set), count) in members.iter().zip(counts) {
        if count > report.observed_max || report.witnesses.is_empty() {
            report.observed_max = count;
            report.witnesses = vec![(name.clone(), count)];
        }
        if count > limit {
            report
                .violations
                .push(format!("{name} = {set}: {count} components exceeds C = {c}"));
        }
    }
    Ok(report)
}

/// Points of `space` as a set, for sampling helpers.
pub(crate) fn random_subset(space: &Space, rng: &mut impl rand::Rng) -> VertexSet {
    space.points().filter(|_| rng.gen_bool(0.5)).collect::<VertexSet>()
}
