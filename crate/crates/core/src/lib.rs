//! Community detection in temporal networks through spectral analysis of
//! space-time Laplacians.
//!
//! A temporal network is a sequence of graph slices over a shared vertex set.
//! Copies of each vertex in consecutive slices are coupled with strength
//! `a^2`, producing one large space-time graph whose Laplacian spectrum
//! encodes both the community structure inside slices and its evolution
//! across them. This crate assembles those operators, computes and labels
//! their low eigenpairs, extracts sparse cluster indicators from eigenvector
//! bundles, scores the results with cut ratios, and classifies how clusters
//! split, merge, appear, and disappear over time.
//!
//! Entry points:
//! - [`graph`]: network model and operator assembly,
//! - [`spectral`]: eigensolvers, eigenvector labelling, balance strengths,
//! - [`seba`]: sparse basis rotation turning eigenvectors into indicators,
//! - [`cheeger`]: cut ratios, packings, and quality guarantees,
//! - [`partition`]: the end-to-end clustering pipelines and event detection,
//! - [`matching`]: linking independently clustered slices through time,
//! - [`netgen`]: synthetic benchmark networks with planted structure,
//! - [`ingest`]: building networks from roll-call vote records,
//! - [`io`]: file formats and deterministic exports,
//! - [`config`]: shared tuning knobs.

pub mod cheeger;
pub mod config;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod io;
pub mod matching;
pub mod netgen;
pub mod partition;
pub mod seba;
pub mod spectral;
pub mod supra;

pub use error::{Error, Result};
