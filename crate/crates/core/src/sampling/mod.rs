//! Space-filling and directional samplers: Latin hypercubes, Sobol points and
//! uniform directions on the sphere. Used for initial designs, baseline
//! candidate sets, projection precandidates and multistart seeds.

mod lhs;
mod sobol;
mod sobol_table;
mod sphere;

pub use lhs::{lhs, stratum_bounds};
pub use sobol::{sobol, SobolSequence, SOBOL_MAX_DIM};
pub use sphere::sphere_direction;
