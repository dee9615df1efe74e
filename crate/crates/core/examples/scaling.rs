//! Conjugating Stirling's map of `g(z) = lambda f(az + b)` back by `az + b`
//! gives `z - f(z) / f'(z - a lambda f(z))`, which is Stirling's map of `f`
//! only when `a lambda = 1`. Newton's method has no such restriction.
//!
//! ```sh
//! cargo run --example scaling
//! ```

use num_complex::Complex64;
use stirling::polynomial::Poly;
use stirling::verify::scaling_check;

fn main() -> stirling::Result<()> {
    let f = Poly::from_real(&[-2.0, 1.0, 0.0, 1.0]);
    let c = |re, im| Complex64::new(re, im);
    let cases = [
        (c(2.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)),
        (c(2.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)),
        (c(0.0, 1.0), c(1.0, -1.0), c(0.0, -1.0)),
        (c(1.5, 0.5), c(0.0, 0.0), c(-0.3, 0.7)),
    ];
    println!("f(z) = z^3 + z - 2");
    for (a, b, lambda) in cases {
        let check = scaling_check(&f, a, b, lambda)?;
        println!(
            "a = {a}, b = {b}, lambda = {lambda}: closed form off by {:.1e}, St_f off by {:.1e} -> {}",
            check.closed_form_distance,
            check.st_f_distance,
            if check.matches_st_f { "same map" } else { "different map" }
        );
    }
    Ok(())
}
