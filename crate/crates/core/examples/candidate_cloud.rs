//! Dump a design with Voronoi, Sobol and LHS candidates for plotting.
//!
//! ```bash
//! cargo run --example candidate_cloud > cloud.csv
//! ```

use vorcands::driver::{candidate_cloud, write_cloud, CloudScheme, CloudSettings};
use vorcands::Result;

fn main() -> Result<()> {
    let cfg = CloudSettings {
        n: Some(12),
        count: Some(400),
        scheme: Some(vec![CloudScheme::Vor, CloudScheme::Sobol, CloudScheme::Lhs]),
        iteration: Some(1),
        ..Default::default()
    }
    .resolve()?;
    let cloud = candidate_cloud(&cfg)?;
    write_cloud(std::io::stdout().lock(), &cloud)
}
