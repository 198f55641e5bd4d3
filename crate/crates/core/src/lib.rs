//! Normalized distance Laplacian spectra, distance-based Cheeger
//! constants, closed-form spectra of abelian Cayley graphs, and numerical
//! checks of the certificates that bound them.
//!
//! ```
//! use distgap::graph::{bfs_apsp, Graph};
//! use distgap::spectral::{ndl_spectrum, spectral_gap, DEFAULT_TOL};
//!
//! let d = bfs_apsp(&Graph::cycle(4)).unwrap();
//! let s = ndl_spectrum(&d, DEFAULT_TOL).unwrap();
//! assert!((spectral_gap(&s) - 1.0).abs() < 1e-12);
//! ```

pub mod cayley;
pub mod certify;
pub mod cheeger;
pub mod constants;
pub mod error;
pub mod graph;
pub mod harness;
pub mod metric;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;
pub use metric::{DistanceMatrix, FiniteMetricSpace, Value};
pub use spectral::Spectrum;
