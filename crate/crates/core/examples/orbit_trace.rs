//! Follows single orbits of Stirling's map of `z^2 - 1` and reports where
//! each one ends up.
//!
//! ```sh
//! cargo run --example orbit_trace -- 0.3,0.8
//! ```

use num_complex::Complex64;
use stirling::classification::analyze;
use stirling::dynamics::{iterate_orbit, AttractorTable, Budgets, Verdict};
use stirling::iterators::{MapSpec, Target};
use stirling::polynomial::Poly;
use stirling::rational::SpherePoint;

fn parse(s: &str) -> Option<Complex64> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
}

fn main() -> stirling::Result<()> {
    let starts: Vec<Complex64> = match std::env::args().nth(1) {
        Some(arg) => vec![parse(&arg).expect("start as RE,IM")],
        None => vec![Complex64::new(0.3, 0.8), Complex64::new(-2.0, 0.1), Complex64::new(0.0, 3.0)],
    };

    let analysis = analyze(&MapSpec::stirling(Target::Polynomial(Poly::from_real(&[-1.0, 0.0, 1.0])))?)?;
    let table = AttractorTable::from_analysis(&analysis);
    // Infinity is parabolic here; a larger capture radius keeps the demo short.
    let budgets = Budgets::with_max_iter(500).with_eps_par(0.05);

    for z0 in starts {
        let orbit = iterate_orbit(&analysis.map, SpherePoint::Finite(z0), &table, budgets);
        println!("start {z0:.4}");
        for (k, z) in orbit.iterates.iter().enumerate().take(8) {
            println!("  {k:>3}  {z:.10}");
        }
        if orbit.iterates.len() > 8 {
            println!("  ... {} iterates in total", orbit.iterates.len());
        }
        let fate = match orbit.verdict {
            Verdict::Converged { attractor, iterations } => {
                format!("converged to {:.6} after {iterations} steps", table.entries()[attractor].location)
            }
            Verdict::Parabolic { attractor, iterations } => {
                format!("captured by parabolic {:.6} after {iterations} steps", table.entries()[attractor].location)
            }
            Verdict::EscapedToInfinity { iterations } => format!("escaped after {iterations} steps"),
            Verdict::Undetermined => "undetermined".into(),
        };
        println!("  {fate}");
        if let Some(d) = orbit.diagnostic {
            println!("  note: {d}");
        }
    }
    Ok(())
}
