//! Basins of Stirling's map for two Mobius transformations.
//!
//! With `f = i / (iz + 1)` infinity is attracting and the two extraneous
//! fixed points `i +- 1` are parabolic. With `f = z / (z + 1)` both zero and
//! infinity are superattracting and the extraneous fixed points are the
//! primitive cube roots of unity.
//!
//! ```sh
//! cargo run --release --example basins_mobius -- out_dir
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use stirling::classification::analyze;
use stirling::dynamics::{classify_grid, AttractorTable, Budgets, Viewport};
use stirling::iterators::{MapSpec, Target};
use stirling::render::{write_image, Palette};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> stirling::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| ".".into());

    let cases = [
        ("mobius_a_zero.png", [c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)], c(0.0, 1.0), 6.0),
        ("mobius_a_nonzero.png", [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], c(-0.5, 0.0), 4.0),
    ];
    for (name, [a, b, cc, d], center, width) in cases {
        let analysis = analyze(&MapSpec::stirling(Target::Mobius { a, b, c: cc, d })?)?;
        println!("{name}: degree {}", analysis.degree());
        for r in &analysis.fixed_points {
            let tag = if r.extraneous { "extraneous" } else { "zero" };
            println!("  {:.6} {tag}: {} multiplier {:.3e}", r.location, r.class, r.multiplier.norm());
        }
        println!("  herman rings at most {}", analysis.census.herman_upper);

        let table = AttractorTable::from_analysis(&analysis);
        let budgets = Budgets::default().with_eps_par(0.01);
        let raster = classify_grid(&analysis.map, &table, Viewport::new(center, width)?, 800, 800, budgets);
        let path = dir.join(name);
        write_image(&raster, &Palette::for_table(&table, raster.max_iter()), &path)?;
        println!("  wrote {}", path.display());
    }
    Ok(())
}
