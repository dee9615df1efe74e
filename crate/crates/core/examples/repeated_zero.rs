//! At a zero of multiplicity `n` Stirling's method loses quadratic
//! convergence: the multiplier there is `1 - 1/n`, the same as Newton's.
//!
//! ```sh
//! cargo run --example repeated_zero
//! ```

use num_complex::Complex64;
use stirling::polynomial::Poly;
use stirling::verify::repeated_zero_multiplier;

fn main() -> stirling::Result<()> {
    let alpha = Complex64::ONE;
    for g in [Poly::one(), Poly::from_real(&[3.0, 0.0, 1.0])] {
        for n in 1..=5 {
            let check = repeated_zero_multiplier(&g, alpha, n)?;
            println!(
                "g = {:?}, n = {n}: measured {:.8}, expected {:.8}",
                g.coeffs().iter().map(|c| c.re).collect::<Vec<_>>(),
                check.observed.re,
                check.expected.re
            );
        }
    }
    Ok(())
}
