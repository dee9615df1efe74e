//! Loads a map spec from JSON and prints its analysis report.
//!
//! ```sh
//! cargo run --example analyze_map -- crates/core/maps/quadratic_z2_minus_1.json
//! ```

use stirling::classification::analyze;
use stirling::report::{AnalysisReport, MapSpecFile};

fn main() -> stirling::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/maps/quadratic_z2_minus_1.json").into());
    let spec = MapSpecFile::load(path.as_ref())?;
    let analysis = analyze(&spec)?;

    eprintln!(
        "{} map of degree {}: {} fixed point(s), {} free critical point(s), at most {} Herman ring(s)",
        spec.method,
        analysis.degree(),
        analysis.fixed_points.len(),
        analysis.free_critical.len(),
        analysis.census.herman_upper
    );
    println!("{}", AnalysisReport::new(&analysis).to_json());
    Ok(())
}
