//! Side-by-side comparison of Newton's and Stirling's maps for `z^2 - 1` and
//! two Mobius transformations.
//!
//! ```sh
//! cargo run --release --example newton_vs_stirling
//! ```

use num_complex::Complex64;
use stirling::cli::compare_methods;
use stirling::iterators::{MapSpec, Target};
use stirling::polynomial::Poly;

fn main() -> stirling::Result<()> {
    let c = |re, im| Complex64::new(re, im);
    let targets = [
        ("z^2 - 1", Target::Polynomial(Poly::from_real(&[-1.0, 0.0, 1.0]))),
        (
            "i / (iz + 1)",
            Target::Mobius {
                a: c(0.0, 0.0),
                b: c(0.0, 1.0),
                c: c(0.0, 1.0),
                d: c(1.0, 0.0),
            },
        ),
        (
            "z / (z + 1)",
            Target::Mobius {
                a: c(1.0, 0.0),
                b: c(0.0, 0.0),
                c: c(1.0, 0.0),
                d: c(1.0, 0.0),
            },
        ),
    ];
    for (name, target) in targets {
        let comparison = compare_methods(&MapSpec::stirling(target)?)?;
        println!("f(z) = {name}");
        for row in &comparison.rows {
            println!("  {:<28} newton:   {}", row.property, row.newton);
            println!("  {:<28} stirling: {}", "", row.stirling);
        }
        println!();
    }
    Ok(())
}
