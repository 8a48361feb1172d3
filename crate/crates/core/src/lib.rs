//! Splitting analysis and order reconstruction for finite models of
//! one-dimensional topological structures.
//!
//! A [`space::Space`] is a finite graph carrying a basis family of
//! neighbourhoods. From connectivity alone the crate computes how points
//! split the space, which points are locally flat, linear orders on the flat
//! parts ([`order`]), local charts and cyclic orders where nothing splits
//! ([`atlas`]), and the component-count bounds of [`bounds`].

#![forbid(unsafe_code)]

pub mod atlas;
pub mod bounds;
pub mod cli;
pub mod generators;
pub mod order;
pub mod space;
pub mod splitting;
pub mod suites;

pub use space::{BasisSpec, PointId, Space, VertexSet};
