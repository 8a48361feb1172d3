//! On-disk JSON formats read and written by the command-line tool.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{BetweennessRelation, GenError};
use crate::space::{BasisSpec, Space, SpaceError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("invalid space: {0}")]
    Space(#[from] SpaceError),
    #[error("invalid relation: {0}")]
    Relation(#[from] GenError),
}

/// A space: point count, undirected edges and the basis recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub version: u32,
    pub points: usize,
    pub edges: Vec<[usize; 2]>,
    pub basis: BasisSpec,
}

impl SpaceFile {
    pub fn from_space(space: &Space) -> Self {
        SpaceFile {
            version: FORMAT_VERSION,
            points: space.len(),
            edges: space.edges().iter().map(|&(u, v)| [u.index(), v.index()]).collect(),
            basis: space.basis_spec().clone(),
        }
    }

    pub fn into_space(self) -> Result<Space, InputError> {
        check_version(self.version)?;
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        Ok(Space::build(self.points, &edges, self.basis)?)
    }

    /// Pretty JSON with each edge list and the basis kept on one line.
    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"version\": {},\n  \"points\": {},\n  \"edges\": {},\n  \"basis\": {}\n}}\n",
            self.version,
            self.points,
            compact(&self.edges),
            compact(&self.basis),
        )
    }
}

/// A ternary relation: `[x, y, z]` means `z` lies strictly between `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetweennessFile {
    pub version: u32,
    pub points: usize,
    pub triples: Vec<[usize; 3]>,
}

impl BetweennessFile {
    pub fn into_relation(self) -> Result<BetweennessRelation, InputError> {
        check_version(self.version)?;
        Ok(BetweennessRelation::new(
            self.points,
            self.triples.iter().map(|&[x, y, z]| (x, y, z)),
        )?)
    }
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn check_version(version: u32) -> Result<(), InputError> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(InputError::Version(version))
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_space(text: &str) -> Result<Space, InputError> {
    serde_json::from_str::<SpaceFile>(text)?.into_space()
}

pub fn read_space(path: &Path) -> Result<Space, InputError> {
    parse_space(&read(path)?)
}

pub fn read_betweenness(path: &Path) -> Result<BetweennessRelation, InputError> {
    serde_json::from_str::<BetweennessFile>(&read(path)?)?.into_relation()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"version":1,"points":3,"edges":[[0,1],[1,2]],"basis":{"kind":"balls","radii":[1]}}"#;
        let space = parse_space(text).unwrap();
        let again = parse_space(&SpaceFile::from_space(&space).to_json()).unwrap();
        assert_eq!(space.basis(), again.basis());
        assert_eq!(space.edges(), again.edges());
    }

    #[test]
    fn strict_fields() {
        let extra = r#"{"version":1,"points":2,"edges":[[0,1]],"basis":{"kind":"balls","radii":[1]},"x":0}"#;
        assert!(matches!(parse_space(extra), Err(InputError::Json(_))));
        let nested = r#"{"version":1,"points":2,"edges":[[0,1]],"basis":{"kind":"balls","radii":[1],"y":2}}"#;
        assert!(matches!(parse_space(nested), Err(InputError::Json(_))));
        let version = r#"{"version":2,"points":2,"edges":[[0,1]],"basis":{"kind":"balls","radii":[1]}}"#;
        assert!(matches!(parse_space(version), Err(InputError::Version(2))));
        let range = r#"{"version":1,"points":2,"edges":[[0,5]],"basis":{"kind":"balls","radii":[1]}}"#;
        assert!(matches!(parse_space(range), Err(InputError::Space(_))));
    }
}
