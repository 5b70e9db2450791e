//! Bayesian optimization with Voronoi-boundary candidate sets.
//!
//! The expected-improvement surface of a Gaussian process tends to peak in
//! the gaps between evaluated points. This crate builds finite candidate
//! sets on the boundaries of the nearest-neighbor cells of the design by
//! bisecting along random rays ([`vorcands`]), and scores them with a
//! squared-exponential GP ([`gp`]) and expected improvement
//! ([`acquisition`]). [`driver`] runs the optimization loop on the
//! synthetic problems in [`bench`] and compares against Latin hypercube,
//! Sobol and multistart-gradient acquisition.
//!
//! ```
//! use vorcands::{rng::substream, sampling::lhs, vorcands::{direct_sample, Strategy}, Metric};
//!
//! let mut rng = substream(7, &[0]);
//! let design = lhs(20, 3, &mut rng);
//! let cands = direct_sample(&design, 500, Strategy::Unif, Metric::L2, 0, &mut rng).unwrap();
//! assert_eq!(cands.len(), 500);
//! ```

pub mod acquisition;
pub mod bench;
pub mod cli;
pub mod driver;
pub mod error;
pub mod gp;
pub mod metrics;
pub mod nn_index;
pub mod optim;
pub mod points;
pub mod rng;
pub mod sampling;
pub mod vorcands;

pub use error::{Error, Result};
pub use metrics::Metric;
pub use nn_index::NnIndex;
pub use points::Points;
