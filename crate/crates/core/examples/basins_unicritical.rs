//! Basins of Stirling's map for `z^2 + beta`, with `beta = -4` and `beta = 4`.
//!
//! Both zeros are superattracting and infinity is a parabolic fixed point.
//! The map has real coefficients, so each raster is checked for mirror
//! symmetry across the real axis before it is written.
//!
//! ```sh
//! cargo run --release --example basins_unicritical -- out_dir
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use stirling::classification::analyze;
use stirling::dynamics::{classify_grid, AttractorTable, Budgets, Viewport};
use stirling::iterators::{MapSpec, Target};
use stirling::render::{write_image, Palette};
use stirling::verify::free_critical_pair;

fn main() -> stirling::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| ".".into());

    for (beta, name) in [(-4.0, "unicritical_beta_minus_4.png"), (4.0, "unicritical_beta_4.png")] {
        let beta = Complex64::new(beta, 0.0);
        let spec = MapSpec::stirling(Target::Unicritical {
            lambda: Complex64::ONE,
            alpha: Complex64::ZERO,
            beta,
        })?;
        let analysis = analyze(&spec)?;
        let (plus, minus) = free_critical_pair(beta);
        println!("beta = {}: free critical points {plus:.6} and {minus:.6}", beta.re);
        for r in &analysis.free_critical {
            println!("  computed {:.6} (multiplicity {})", r.location, r.multiplicity);
        }

        let table = AttractorTable::from_analysis(&analysis);
        let viewport = Viewport::new(Complex64::ZERO, 8.0)?;
        let budgets = Budgets::default().with_eps_par(0.01);
        let raster = classify_grid(&analysis.map, &table, viewport, 800, 800, budgets);
        let sigma = table.conjugation_permutation().expect("real map gives a closed table");
        println!("  mirror mismatches: {}", raster.mirror_mismatches(&sigma));

        let path = dir.join(name);
        write_image(&raster, &Palette::for_table(&table, raster.max_iter()), &path)?;
        println!("  wrote {}", path.display());
    }
    Ok(())
}
