//! Basins of Stirling's map for the rational function `f(z) = (2z - 1) / z`.
//!
//! The root `1/2` is superattracting, the pole's image `1` is a parabolic
//! fixed point with three petals, and infinity is superattracting.
//!
//! ```sh
//! cargo run --release --example basins_rational -- basins_rational.png
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use stirling::dynamics::{classify_grid, AttractorTable, Budgets, Viewport};
use stirling::polynomial::Poly;
use stirling::render::{write_image, Palette};
use stirling::classification::analyze;
use stirling::iterators::{MapSpec, Target};

fn main() -> stirling::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "basins_rational.png".into());

    let spec = MapSpec::stirling(Target::Rational {
        num: Poly::from_real(&[-1.0, 2.0]),
        den: Poly::from_real(&[0.0, 1.0]),
    })?;
    let analysis = analyze(&spec)?;
    for r in &analysis.fixed_points {
        println!("fixed point {:.4}: {} (multiplicity {})", r.location, r.class, r.multiplicity);
    }

    // The petals at 1 are slow, so the parabolic capture radius is widened.
    let budgets = Budgets::default().with_eps_par(0.1);
    let table = AttractorTable::from_analysis(&analysis);
    let viewport = Viewport::new(Complex64::new(0.75, 0.0), 3.0)?;
    let raster = classify_grid(&analysis.map, &table, viewport, 800, 600, budgets);

    let counts = raster.histogram(table.len());
    let total = (raster.width() * raster.height()) as f64;
    for (entry, n) in table.entries().iter().zip(&counts) {
        println!("{:.4} {}: {:.2}%", entry.location, entry.class, 100.0 * *n as f64 / total);
    }
    println!("undetermined: {:.2}%", 100.0 * counts[table.len() + 1] as f64 / total);

    write_image(&raster, &Palette::for_table(&table, raster.max_iter()), &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
