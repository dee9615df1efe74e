//! Runs every built-in verification suite and prints a line per check.
//!
//! ```sh
//! cargo run --release --example verify_theorems
//! ```

use stirling::verify::{paper_case_suite, scaling_suite, symmetry_suite, VerificationReport};

type Suite = fn() -> Vec<VerificationReport>;

fn main() {
    let suites: [(&str, Suite); 3] = [
        ("worked cases", paper_case_suite),
        ("scaling", scaling_suite),
        ("conjugation symmetry", symmetry_suite),
    ];
    let mut failed = 0;
    for (name, suite) in suites {
        println!("== {name}");
        for report in suite() {
            let status = if report.passed { "ok  " } else { "FAIL" };
            println!("{status} {} ({} witnesses)", report.check, report.witnesses.len());
            for w in report.failures() {
                println!("     {}: expected {}, observed {}", w.input, w.expected, w.observed);
            }
            failed += usize::from(!report.passed);
        }
    }
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        std::process::exit(1);
    }
}
