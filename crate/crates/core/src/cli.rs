//! The `stirling` command line: analyze, render, orbit, verify, compare.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::classification::{analyze, Analysis, FixedClass, FixedPointReport};
use crate::dynamics::{classify_grid, iterate_orbit, AttractorTable, Budgets, Viewport};
use crate::iterators::{build_newton, MapSpec, Method, Target};
use crate::rational::{Affine, SpherePoint};
use crate::render::{write_image, Palette};
use crate::report::{attractor_legend, orbit_steps, verdict_label, AnalysisReport, MapSpecFile, OrbitJson, VerificationJson};
use crate::verify::{paper_case_suite, scaling_check, scaling_suite, symmetry_suite, VerificationReport};
use crate::{Error, Result};

/// Exit status when every command step worked but some verification failed.
pub const EXIT_CHECKS_FAILED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "stirling", version, about = "Stirling's root-finding method as a rational map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the iteration map and write its fixed/critical point analysis as JSON.
    Analyze {
        #[arg(long)]
        map: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a grid of starting points and write a basin image (.ppm or .png).
    Render {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: ComplexArg,
        /// Real extent of the view.
        #[arg(long, default_value_t = 4.0)]
        width: f64,
        #[arg(long, default_value = "400x400")]
        resolution: Resolution,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Capture radius for parabolic points; slow petals need more than the default 1e-3.
        #[arg(long)]
        eps_par: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the orbit of one starting point and its fate.
    Orbit {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: ComplexArg,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        json: bool,
    },
    /// Analyze Newton's and Stirling's maps of the same function side by side.
    Compare {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Scaling,
    Symmetry,
    PaperCases,
    All,
}

/// `RE,IM` or just `RE`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct ComplexArg(Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        match s.split_once(',') {
            Some((re, im)) => Ok(ComplexArg(Complex64::new(parse(re)?, parse(im)?))),
            None => Ok(ComplexArg(Complex64::new(parse(s)?, 0.0))),
        }
    }
}

/// `WIDTHxHEIGHT`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Resolution(usize, usize);

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
        let w: usize = w.trim().parse().map_err(|e| format!("width: {e}"))?;
        let h: usize = h.trim().parse().map_err(|e| format!("height: {e}"))?;
        if w == 0 || h == 0 {
            return Err("resolution must be at least 1x1".into());
        }
        Ok(Resolution(w, h))
    }
}

/// Runs the command line with the given arguments (program name first) and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze { map, out: path } => cmd_analyze(&map, path.as_deref(), out),
        Command::Render {
            map,
            center,
            width,
            resolution,
            max_iter,
            eps_par,
            out: path,
        } => cmd_render(&map, center.0, width, resolution, max_iter, eps_par, &path, out),
        Command::Orbit { map, start, iters, json } => cmd_orbit(&map, start.0, iters, json, out, err),
        Command::Verify { suite, json } => cmd_verify(suite, json, out),
        Command::Compare { spec } => cmd_compare(&spec, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn cmd_analyze(map: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let spec = MapSpecFile::load(map)?;
    let report = AnalysisReport::new(&analyze(&spec)?).to_json();
    match out_path {
        Some(path) => std::fs::write(path, report + "\n").map_err(io_err(path))?,
        None => writeln!(out, "{report}").map_err(stdout_err)?,
    }
    Ok(0)
}

fn format_point(p: SpherePoint) -> String {
    match p {
        SpherePoint::Finite(z) => format_complex(z),
        SpherePoint::Infinity => "infinity".into(),
    }
}

fn format_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{re:.10}{:+.10}i", im)
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    map: &Path,
    center: Complex64,
    width: f64,
    resolution: Resolution,
    max_iter: usize,
    eps_par: Option<f64>,
    path: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = MapSpecFile::load(map)?;
    let analysis = analyze(&spec)?;
    let table = AttractorTable::from_analysis(&analysis);
    let mut budgets = Budgets::with_max_iter(max_iter.max(1));
    if let Some(eps) = eps_par {
        budgets = budgets.with_eps_par(eps);
    }
    let viewport = Viewport::new(center, width)?;
    let raster = classify_grid(&analysis.map, &table, viewport, resolution.0, resolution.1, budgets);
    let palette = Palette::for_table(&table, raster.max_iter());
    write_image(&raster, &palette, path)?;

    let counts = raster.histogram(table.len());
    let total = (resolution.0 * resolution.1) as f64;
    let mut text = String::new();
    for (entry, legend) in table.entries().iter().zip(attractor_legend(&table)) {
        let [r, g, b] = palette.attractors[legend.index];
        let _ = writeln!(
            text,
            "attractor {}: {} {} #{r:02x}{g:02x}{b:02x} {:.2}%",
            legend.index,
            format_point(entry.location),
            legend.class,
            100.0 * counts[legend.index] as f64 / total
        );
    }
    let n = table.len();
    let _ = writeln!(text, "escaped: {:.2}%", 100.0 * counts[n] as f64 / total);
    let _ = writeln!(text, "undetermined: {:.2}%", 100.0 * counts[n + 1] as f64 / total);
    let _ = writeln!(text, "wrote {}", path.display());
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(0)
}

fn cmd_orbit(map: &Path, start: Complex64, iters: usize, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let spec = MapSpecFile::load(map)?;
    let analysis = analyze(&spec)?;
    let table = AttractorTable::from_analysis(&analysis);
    let budgets = Budgets {
        parabolic_factor: 1,
        ..Budgets::with_max_iter(iters.max(1))
    };
    let at_pole = analysis.map.den().eval(start) == Complex64::ZERO;
    let mut orbit = iterate_orbit(&analysis.map, SpherePoint::Finite(start), &table, budgets);
    if at_pole {
        orbit.iterates.truncate(1);
        orbit.verdict = crate::dynamics::Verdict::Undetermined;
        orbit.diagnostic = Some(format!("start {} is a pole of the iteration map", format_complex(start)));
    }
    if let Some(d) = &orbit.diagnostic {
        let _ = writeln!(err, "note: {d}");
    }
    if json {
        let text = serde_json::to_string_pretty(&OrbitJson::from(&orbit)).expect("orbit serializes");
        writeln!(out, "{text}").map_err(stdout_err)?;
        return Ok(0);
    }
    let mut text = format!("{:>6} {:>24} {:>24} {:>12}\n", "k", "re", "im", "|step|");
    for (k, z, step) in orbit_steps(&orbit) {
        let step = step.map_or("-".to_string(), |s| format!("{s:.4e}"));
        match z {
            SpherePoint::Finite(z) => {
                let _ = writeln!(text, "{k:>6} {:>24.16e} {:>24.16e} {step:>12}", z.re, z.im);
            }
            SpherePoint::Infinity => {
                let _ = writeln!(text, "{k:>6} {:>24} {:>24} {step:>12}", "inf", "inf");
            }
        }
    }
    let verdict = &orbit.verdict;
    let target = verdict
        .attractor()
        .map(|i| format!(" to attractor {i} at {}", format_point(table.entries()[i].location)))
        .unwrap_or_default();
    let iterations = match verdict {
        crate::dynamics::Verdict::Undetermined => orbit.iterates.len().saturating_sub(1),
        _ => verdict.iterations(),
    };
    let _ = writeln!(text, "verdict: {}{target} after {iterations} iterations", verdict_label(verdict));
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(0)
}

fn cmd_verify(suite: Suite, json: bool, out: &mut dyn Write) -> Result<i32> {
    let mut reports: Vec<VerificationReport> = match suite {
        Suite::Scaling => scaling_suite(),
        Suite::Symmetry => symmetry_suite(),
        Suite::PaperCases => paper_case_suite(),
        Suite::All => {
            let mut all = paper_case_suite();
            all.extend(scaling_suite());
            all.extend(symmetry_suite());
            all.dedup_by(|a, b| a.check == b.check);
            all
        }
    };
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    reports.dedup_by(|a, b| a.check == b.check);
    let all_passed = reports.iter().all(|r| r.passed);
    let text = if json {
        let docs: Vec<VerificationJson> = reports.iter().map(VerificationJson::from).collect();
        serde_json::to_string_pretty(&docs).expect("reports serialize") + "\n"
    } else {
        let mut text = String::new();
        for r in &reports {
            let _ = writeln!(text, "{} {}", if r.passed { "PASS" } else { "FAIL" }, r.check);
            for w in r.failures() {
                let _ = writeln!(
                    text,
                    "    input: {} | expected: {} | observed: {} | tol: {:e}",
                    w.input, w.expected, w.observed, w.tolerance
                );
            }
        }
        let passed = reports.iter().filter(|r| r.passed).count();
        let _ = writeln!(text, "{passed}/{} checks passed", reports.len());
        text
    };
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(if all_passed { 0 } else { EXIT_CHECKS_FAILED })
}

/// One property compared between the two methods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub property: String,
    pub newton: String,
    pub stirling: String,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub newton: Analysis,
    pub stirling: Analysis,
    pub rows: Vec<ComparisonRow>,
}

fn class_summary<'a>(reports: impl Iterator<Item = &'a FixedPointReport>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for r in reports {
        let text = format!("{} {}", format_point(r.location), r.class);
        let text = if r.multiplicity > 1 {
            format!("{text} (multiplicity {})", r.multiplicity)
        } else {
            text
        };
        parts.push(text);
    }
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join("; ")
    }
}

fn infinity_summary(a: &Analysis) -> String {
    match a.infinity() {
        None => "not fixed".into(),
        Some(r) => format!("{}, multiplier {}", r.class, format_complex(r.multiplier)),
    }
}

/// Whether Newton's map satisfies the scaling property on `f` for a sample
/// affine change of variable, computed the same way as for Stirling's map.
fn newton_scaling_holds(f: &crate::polynomial::Poly, a: Complex64, b: Complex64, lambda: Complex64) -> Result<bool> {
    let t = Affine::new(a, b)?;
    let g = f.compose(&t.as_poly()).scale(lambda);
    let one = crate::polynomial::Poly::one();
    let conjugated = build_newton(&g, &one)?.affine_conjugate(&t)?;
    Ok(conjugated.approx_eq(&build_newton(f, &one)?, crate::verify::SCALING_TOL))
}

/// Builds and analyzes both methods' maps for the target of `spec`.
pub fn compare_methods(spec: &MapSpec) -> Result<Comparison> {
    let newton = analyze(&spec.with_method(Method::Newton))?;
    let stirling = analyze(&spec.with_method(Method::Stirling))?;
    let row = |property: &str, newton: String, stirling: String| ComparisonRow {
        property: property.into(),
        newton,
        stirling,
    };
    let zeros = |a: &Analysis| class_summary(a.fixed_points.iter().filter(|r| !r.extraneous));
    let extraneous = |a: &Analysis| class_summary(a.finite_extraneous());
    let mut rows = vec![
        row("degree", newton.degree().to_string(), stirling.degree().to_string()),
        row("order", "2 (cited)".into(), "2 (cited)".into()),
        row("zeros", zeros(&newton), zeros(&stirling)),
        row("infinity", infinity_summary(&newton), infinity_summary(&stirling)),
        row("extraneous fixed points", extraneous(&newton), extraneous(&stirling)),
    ];

    let polynomial = match &spec.target {
        Target::Polynomial(p) => Some(p.clone()),
        Target::Unicritical { .. } => Some(spec.target.as_fraction().0),
        _ => None,
    };
    let verdict = |holds: bool| if holds { "satisfies (computed)" } else { "does not satisfy (computed)" }.to_string();
    match &polynomial {
        Some(p) => {
            let (a, b, lambda) = (Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0), Complex64::ONE);
            let st = scaling_check(p, a, b, lambda)?;
            rows.push(row("scaling theorem", verdict(newton_scaling_holds(p, a, b, lambda)?), verdict(st.matches_st_f)));
            rows.push(row("julia set", "connected (cited)".into(), "connected (cited)".into()));
        }
        None => rows.push(row("scaling theorem", "not computed".into(), "not computed".into())),
    }
    if let Target::Mobius { a, .. } = &spec.target {
        let st_julia = if *a == Complex64::ZERO { "disconnected (cited)" } else { "not computed" };
        rows.push(row("julia set", "connected (cited)".into(), st_julia.into()));
        let parabolic = |x: &Analysis| {
            let n = x.fixed_points.iter().filter(|r| r.class == FixedClass::RationallyIndifferent { q: 1 }).count();
            if n == 0 {
                "none found".to_string()
            } else {
                format!("{n} parabolic fixed point(s)")
            }
        };
        rows.push(row("invariant parabolic domains", parabolic(&newton), parabolic(&stirling)));
    }
    Ok(Comparison { newton, stirling, rows })
}

fn cmd_compare(spec_path: &Path, out: &mut dyn Write) -> Result<i32> {
    let spec = MapSpecFile::load(spec_path)?;
    let comparison = compare_methods(&spec)?;
    let w0 = comparison.rows.iter().map(|r| r.property.len()).max().unwrap_or(0).max("property".len());
    let w1 = comparison.rows.iter().map(|r| r.newton.len()).max().unwrap_or(0).max("newton".len());
    let mut text = format!("{:<w0$} | {:<w1$} | stirling\n", "property", "newton");
    let _ = writeln!(text, "{}", "-".repeat(w0 + w1 + 14));
    for r in &comparison.rows {
        let _ = writeln!(text, "{:<w0$} | {:<w1$} | {}", r.property, r.newton, r.stirling);
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(0)
}
