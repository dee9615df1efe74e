//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed; the process
//! exits nonzero if any criterion fails. Criterion numbers given as arguments
//! restrict the run, e.g. `cargo test --test acceptance -- 2 10`.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use stirling::classification::{analyze, Analysis, FixedClass};
use stirling::cli::compare_methods;
use stirling::dynamics::{classify_grid, AttractorTable, Budgets, Viewport};
use stirling::iterators::{build_stirling_polynomial, MapSpec, Target};
use stirling::polynomial::Poly;
use stirling::rational::RationalMap;
use stirling::render::{ppm_bytes, Palette};
use stirling::verify::{free_critical_pair, repeated_zero_multiplier, scaling_check};

type Outcome = Result<(), Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Collects failed claims for one criterion.
#[derive(Default)]
struct Claims(Vec<String>);

impl Claims {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn within(&mut self, what: &str, observed: f64, tol: f64) {
        self.check(observed <= tol, || format!("{what}: {observed:.3e} exceeds {tol:.0e}"));
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"));
    }

    fn finish(self) -> Outcome {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self.0)
        }
    }
}

fn stirling_of(target: Target) -> Analysis {
    analyze(&MapSpec::stirling(target).expect("valid target")).expect("analysis")
}

fn fixed_near(a: &Analysis, z: Complex64, tol: f64) -> Option<&stirling::classification::FixedPointReport> {
    a.fixed_points
        .iter()
        .find(|r| r.location.finite().is_some_and(|w| (w - z).norm() <= tol))
}

/// `count` points in the square `[-2, 2]^2`, pairwise at least `min_sep` apart
/// and at least `min_sep` from `avoid`.
fn separated_points(rng: &mut ChaCha8Rng, count: usize, avoid: &[Complex64], min_sep: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if out.iter().chain(avoid).all(|w| (z - w).norm() >= min_sep) {
            out.push(z);
        }
    }
    out
}

fn random_scale(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU))
}

/// Polynomials of degree 2 to 4 with simple zeros, with those zeros.
fn polynomial_corpus(seed: u64, count: usize) -> Vec<(Poly, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=4);
            let zeros = separated_points(&mut rng, n, &[], 0.1);
            let p = Poly::from_roots(&zeros).scale(random_scale(&mut rng));
            (p, zeros)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut claims = Claims::default();
    let a = stirling_of(Target::Rational {
        num: Poly::from_real(&[-1.0, 2.0]),
        den: Poly::from_real(&[0.0, 1.0]),
    });
    // z - (z - 1)^4 (2z - 1) / z^3
    let z = Poly::x();
    let cube = z.pow(3);
    let closed = RationalMap::new(&(&z * &cube) - &(&Poly::from_real(&[-1.0, 1.0]).pow(4) * &Poly::from_real(&[-1.0, 2.0])), cube).unwrap();
    claims.within("coefficient distance to closed form", a.map.coefficient_distance(&closed), 1e-10);
    match fixed_near(&a, c(0.5, 0.0), 1e-8) {
        Some(r) => claims.within("|multiplier| at 1/2", r.multiplier.norm(), 1e-8),
        None => claims.0.push("fixed point 1/2 missing".into()),
    }
    match fixed_near(&a, c(1.0, 0.0), 1e-6) {
        Some(r) => claims.within("|multiplier - 1| at 1", (r.multiplier - 1.0).norm(), 1e-6),
        None => claims.0.push("fixed point 1 missing".into()),
    }
    claims.runtime(start.elapsed(), Duration::from_secs(1));
    claims.finish()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut claims = Claims::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..50 {
        let deg_p = rng.random_range(1..=4);
        let deg_q = rng.random_range(0..=3);
        let p_zeros = separated_points(&mut rng, deg_p, &[], 0.1);
        let q_zeros = separated_points(&mut rng, deg_q, &p_zeros, 0.1);
        let p = Poly::from_roots(&p_zeros).scale(random_scale(&mut rng));
        let q = Poly::from_roots(&q_zeros).scale(random_scale(&mut rng));
        let label = format!("trial {trial} (deg P {deg_p}, deg Q {deg_q})");
        let a = match analyze(&MapSpec::stirling(Target::Rational { num: p.clone(), den: q.clone() }).unwrap()) {
            Ok(a) => a,
            Err(e) => {
                claims.0.push(format!("{label}: analysis failed: {e}"));
                continue;
            }
        };
        for &zero in &p_zeros {
            let ok = fixed_near(&a, zero, 1e-6).is_some_and(|r| r.class == FixedClass::Superattracting);
            claims.check(ok, || format!("{label}: zero {zero:.4} not reported superattracting"));
        }
        for r in a.finite_extraneous() {
            let z = r.location.finite().unwrap();
            let q_at = q.eval(z);
            let q_shifted = if q_at == Complex64::ZERO {
                f64::INFINITY
            } else {
                q.eval(z - p.eval(z) / q_at).norm()
            };
            claims.check(q_shifted < 1e-6, || {
                format!("{label}: extraneous {z:.4} has |Q(z - R(z))| = {q_shifted:.3e} ({})", r.class)
            });
            let drift = (r.multiplier - 1.0).norm();
            claims.check(drift < 1e-4, || {
                format!("{label}: extraneous {z:.4} has multiplier {:.6} ({})", r.multiplier, r.class)
            });
        }
    }
    claims.runtime(start.elapsed(), Duration::from_secs(30));
    claims.finish()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut claims = Claims::default();
    for (i, (p, _)) in polynomial_corpus(3, 50).into_iter().enumerate() {
        let a = stirling_of(Target::Polynomial(p));
        match a.infinity() {
            Some(r) => claims.check((r.multiplier - 1.0).norm() <= 1e-6, || {
                format!("polynomial {i}: multiplier at infinity {}", r.multiplier)
            }),
            None => claims.0.push(format!("polynomial {i}: infinity not fixed")),
        }
        let finite = a.finite_extraneous().count();
        claims.check(finite == 0, || format!("polynomial {i}: {finite} finite extraneous fixed points"));
    }
    claims.runtime(start.elapsed(), Duration::from_secs(30));
    claims.finish()
}

fn criterion_4() -> Outcome {
    let mut claims = Claims::default();
    for (i, (p, zeros)) in polynomial_corpus(3, 50).into_iter().enumerate() {
        let n = zeros.len();
        let degree = build_stirling_polynomial(&p).unwrap().degree();
        claims.check(degree == n * n - n + 1, || format!("polynomial {i}: degree {degree} for n = {n}"));
    }
    // z^2 + beta gives (2z^3 - z^2 + 2 beta z + beta) / (2 (z^2 - z + beta)).
    for beta in [-4.0, 4.0, 0.5, -1.25] {
        let map = build_stirling_polynomial(&Poly::from_real(&[beta, 0.0, 1.0])).unwrap();
        let cubic = RationalMap::new(
            Poly::from_real(&[beta, 2.0 * beta, -1.0, 2.0]),
            Poly::from_real(&[2.0 * beta, -2.0, 2.0]),
        )
        .unwrap();
        claims.check(map.degree() == 3, || format!("beta = {beta}: degree {}", map.degree()));
        claims.within(&format!("beta = {beta}: distance to explicit cubic"), map.coefficient_distance(&cubic), 1e-10);
    }
    claims.finish()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut claims = Claims::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let deg = rng.random_range(2..=4);
        let f = Poly::new((0..=deg).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect());
        let a = random_scale(&mut rng);
        let b = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        // Every other draw sits exactly on the unit-scale case.
        let lambda = if trial % 2 == 0 { a.inv() } else { random_scale(&mut rng) };
        let check = match scaling_check(&f, a, b, lambda) {
            Ok(check) => check,
            Err(e) => {
                claims.0.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        claims.within(&format!("trial {trial}: closed form distance"), check.closed_form_distance, 1e-9);
        let unit = (a * lambda - 1.0).norm() < 1e-10;
        claims.check(check.matches_st_f == unit, || {
            format!("trial {trial}: equal to St_f is {}, |a lambda - 1| < 1e-10 is {unit}", check.matches_st_f)
        });
    }
    claims.runtime(start.elapsed(), Duration::from_secs(5));
    claims.finish()
}

fn criterion_6() -> Outcome {
    let mut claims = Claims::default();
    for (beta, zeros) in [(-4.0, [c(-2.0, 0.0), c(2.0, 0.0)]), (4.0, [c(0.0, -2.0), c(0.0, 2.0)])] {
        let a = stirling_of(Target::Unicritical {
            lambda: Complex64::ONE,
            alpha: Complex64::ZERO,
            beta: c(beta, 0.0),
        });
        for z in zeros {
            let ok = fixed_near(&a, z, 1e-10).is_some_and(|r| r.class == FixedClass::Superattracting);
            claims.check(ok, || format!("beta = {beta}: {z} not a superattracting fixed point within 1e-10"));
        }
        let (plus, minus) = free_critical_pair(c(beta, 0.0));
        for z in [plus, minus] {
            let nearest = a.free_critical.iter().map(|r| (r.location - z).norm()).fold(f64::INFINITY, f64::min);
            claims.within(&format!("beta = {beta}: free critical point {z:.6}"), nearest, 1e-8);
        }

        let start = Instant::now();
        let table = AttractorTable::from_analysis(&a);
        let viewport = Viewport::new(Complex64::ZERO, 8.0).unwrap();
        let raster = classify_grid(&a.map, &table, viewport, 400, 400, Budgets::with_max_iter(200));
        let elapsed = start.elapsed();
        match table.conjugation_permutation() {
            Some(sigma) => {
                let bad = raster.mirror_mismatches(&sigma);
                claims.check(bad == 0, || format!("beta = {beta}: {bad} mirror mismatches"));
            }
            None => claims.0.push(format!("beta = {beta}: attractor table not closed under conjugation")),
        }
        claims.runtime(elapsed, Duration::from_secs(60));
    }
    claims.finish()
}

fn mobius_case_1() -> Analysis {
    stirling_of(Target::Mobius {
        a: c(0.0, 0.0),
        b: c(0.0, 1.0),
        c: c(0.0, 1.0),
        d: c(1.0, 0.0),
    })
}

fn mobius_case_2() -> Analysis {
    stirling_of(Target::Mobius {
        a: c(1.0, 0.0),
        b: c(0.0, 0.0),
        c: c(1.0, 0.0),
        d: c(1.0, 0.0),
    })
}

fn criterion_7() -> Outcome {
    let mut claims = Claims::default();
    let a = mobius_case_1();
    claims.check(a.degree() == 4, || format!("degree {}", a.degree()));
    claims.check(a.critical.total() == 6, || format!("critical point count {}", a.critical.total()));
    match a.infinity() {
        Some(r) => claims.within("|multiplier at infinity - 1/2|", (r.multiplier - 0.5).norm(), 1e-9),
        None => claims.0.push("infinity not fixed".into()),
    }
    for z in [c(-1.0, 1.0), c(1.0, 1.0)] {
        match fixed_near(&a, z, 1e-6) {
            Some(r) => {
                claims.check(r.extraneous, || format!("{z} not flagged extraneous"));
                claims.check(r.multiplicity == 2, || format!("{z} multiplicity {}", r.multiplicity));
                claims.within(&format!("|multiplier - 1| at {z}"), (r.multiplier - 1.0).norm(), 1e-6);
            }
            None => claims.0.push(format!("extraneous fixed point {z} missing")),
        }
    }
    claims.check(a.census.herman_upper == 1, || format!("herman_upper {}", a.census.herman_upper));
    claims.finish()
}

fn criterion_8() -> Outcome {
    let mut claims = Claims::default();
    let a = mobius_case_2();
    claims.check(a.degree() == 5, || format!("degree {}", a.degree()));
    // z^2 (1 - z^2 - z^3) / (z + 1)^3
    let closed = RationalMap::new(Poly::from_real(&[0.0, 0.0, 1.0, 0.0, -1.0, -1.0]), Poly::from_real(&[1.0, 1.0]).pow(3)).unwrap();
    claims.within("coefficient distance to closed form", a.map.coefficient_distance(&closed), 1e-10);
    match a.infinity() {
        Some(r) => claims.within("|multiplier at infinity|", r.multiplier.norm(), 1e-9),
        None => claims.0.push("infinity not fixed".into()),
    }
    let (ma, mb, mc, md) = (c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
    let root = (4.0 * (mb * mc - ma * md) + ma * ma).sqrt();
    let closed_form = [(-(2.0 * md - ma) + root) / (2.0 * mc), (-(2.0 * md - ma) - root) / (2.0 * mc)];
    let cube_roots = [c(-0.5, 3f64.sqrt() / 2.0), c(-0.5, -(3f64.sqrt()) / 2.0)];
    let extraneous: Vec<_> = a.finite_extraneous().collect();
    for (z, formula) in cube_roots.into_iter().zip(closed_form) {
        match extraneous.iter().find(|r| (r.location.finite().unwrap() - z).norm() <= 1e-8) {
            Some(r) => {
                claims.within(&format!("|multiplier - 1| at {z:.6}"), (r.multiplier - 1.0).norm(), 1e-6);
                let w = r.location.finite().unwrap();
                let gap = closed_form.iter().map(|f| (w - f).norm()).fold(f64::INFINITY, f64::min);
                claims.within(&format!("{z:.6} against the closed form"), gap, 1e-8);
            }
            None => claims.0.push(format!("extraneous fixed point {z:.6} missing")),
        }
        claims.within("closed form against cube root of unity", (formula - z).norm().min((formula - z.conj()).norm()), 1e-8);
    }
    claims.check(extraneous.len() == 2, || format!("{} finite extraneous points reported", extraneous.len()));
    claims.check(a.census.herman_upper == 2, || format!("herman_upper {}", a.census.herman_upper));
    claims.finish()
}

fn criterion_9() -> Outcome {
    let mut claims = Claims::default();
    for n in [2, 3, 4] {
        match repeated_zero_multiplier(&Poly::one(), Complex64::ONE, n) {
            Ok(check) => {
                let expected = 1.0 - 1.0 / n as f64;
                claims.within(&format!("n = {n}: |measured - (1 - 1/n)|"), (check.observed - expected).norm(), 1e-4);
            }
            Err(e) => claims.0.push(format!("n = {n}: {e}")),
        }
    }
    claims.finish()
}

fn criterion_10() -> Outcome {
    let mut claims = Claims::default();
    let quadratic = Target::Polynomial(Poly::from_real(&[-1.0, 0.0, 1.0]));
    let case_1 = mobius_case_1().spec.target;
    let case_2 = mobius_case_2().spec.target;
    for (name, target) in [("z^2 - 1", quadratic), ("Mobius a = 0", case_1), ("Mobius a != 0", case_2)] {
        let cmp = compare_methods(&MapSpec::stirling(target.clone()).unwrap()).expect("comparison");
        let is_mobius = matches!(target, Target::Mobius { .. });
        for (method, a) in [("newton", &cmp.newton), ("stirling", &cmp.stirling)] {
            for r in a.fixed_points.iter().filter(|r| !r.extraneous) {
                claims.check(r.class == FixedClass::Superattracting, || {
                    format!("{name}, {method}: zero {} is {}", r.location, r.class)
                });
            }
        }
        let newton_inf = cmp.newton.infinity().map(|r| r.class);
        claims.check(newton_inf == Some(FixedClass::Repelling), || {
            format!("{name}, newton: infinity is {}", newton_inf.map_or("not fixed".into(), |c| c.to_string()))
        });
        let stirling_inf = cmp.stirling.infinity().map(|r| r.class);
        let expected_inf = match &target {
            Target::Mobius { a, .. } if *a == Complex64::ZERO => stirling_inf == Some(FixedClass::Attracting),
            Target::Mobius { .. } => stirling_inf == Some(FixedClass::Superattracting),
            _ => stirling_inf.is_some_and(|c| c.is_rationally_indifferent()),
        };
        claims.check(expected_inf, || {
            format!("{name}, stirling: infinity is {}", stirling_inf.map_or("not fixed".into(), |c| c.to_string()))
        });
        let julia = cmp.rows.iter().find(|r| r.property == "julia set");
        if !is_mobius {
            claims.check(julia.is_some_and(|r| r.newton.starts_with("connected") && r.stirling.starts_with("connected")), || {
                format!("{name}: julia set row {julia:?}")
            });
            continue;
        }
        let newton_ext: Vec<_> = cmp.newton.finite_extraneous().collect();
        claims.check(!newton_ext.is_empty(), || format!("{name}, newton: no extraneous fixed points"));
        for r in newton_ext {
            claims.check(r.class == FixedClass::Repelling, || format!("{name}, newton: extraneous {} is {}", r.location, r.class));
        }
        for r in cmp.stirling.finite_extraneous() {
            claims.check(r.class.is_rationally_indifferent(), || {
                format!("{name}, stirling: extraneous {} is {}", r.location, r.class)
            });
        }
    }
    claims.finish()
}

struct RenderRecipe {
    name: &'static str,
    target: Target,
    center: Complex64,
    width: f64,
    eps_par: f64,
    sha256: &'static str,
}

fn render_recipes() -> Vec<RenderRecipe> {
    let unicritical = |beta: f64| Target::Unicritical {
        lambda: Complex64::ONE,
        alpha: Complex64::ZERO,
        beta: c(beta, 0.0),
    };
    vec![
        RenderRecipe {
            name: "rational (2z - 1)/z",
            target: Target::Rational {
                num: Poly::from_real(&[-1.0, 2.0]),
                den: Poly::from_real(&[0.0, 1.0]),
            },
            center: c(0.75, 0.0),
            width: 3.0,
            eps_par: 0.1,
            sha256: "2c3e699fd39afb453a1865804c475a317f98cc34c600df3a791776c35218f6d0",
        },
        RenderRecipe {
            name: "unicritical beta = -4",
            target: unicritical(-4.0),
            center: Complex64::ZERO,
            width: 8.0,
            eps_par: 0.01,
            sha256: "7991ed5eb7eb3f548a6ebe92b510dbd1c453697061bc33f67bf8d5e5883a405e",
        },
        RenderRecipe {
            name: "unicritical beta = 4",
            target: unicritical(4.0),
            center: Complex64::ZERO,
            width: 8.0,
            eps_par: 0.01,
            sha256: "2ce4cf4670d9618771db36969235d7bef383a652d52f7fc2d7c72c5489f0a3f6",
        },
        RenderRecipe {
            name: "Mobius a = 0",
            target: mobius_case_1().spec.target,
            center: c(0.0, 1.0),
            width: 6.0,
            eps_par: 0.01,
            sha256: "3997b2a4fdeadd95ed6dc0a2089e112cf4fe9fd40a0e6217600cff708e9fa364",
        },
        RenderRecipe {
            name: "Mobius a != 0",
            target: mobius_case_2().spec.target,
            center: c(-0.5, 0.0),
            width: 4.0,
            eps_par: 0.01,
            sha256: "bf7173a0260476db7262bd099bcb994161bdc2fe63ff28e2d3074b90497ee693",
        },
    ]
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn criterion_11() -> Outcome {
    let mut claims = Claims::default();
    for (n, result) in [(3, criterion_3()), (7, criterion_7())] {
        if let Err(reasons) = result {
            claims.0.push(format!("fixed-point property suite {n} failed: {}", reasons.join("; ")));
        }
    }
    for recipe in render_recipes() {
        let a = stirling_of(recipe.target);
        let table = AttractorTable::from_analysis(&a);
        let viewport = Viewport::new(recipe.center, recipe.width).unwrap();
        let budgets = Budgets::default().with_eps_par(recipe.eps_par);
        let raster = classify_grid(&a.map, &table, viewport, 96, 72, budgets);
        let bytes = ppm_bytes(&raster, &Palette::for_table(&table, raster.max_iter()));
        let digest = hex(&Sha256::digest(&bytes));
        claims.check(digest == recipe.sha256, || format!("{}: sha256 {digest}", recipe.name));
    }
    claims.finish()
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("worked rational example", criterion_1),
        ("zeros superattracting, extraneous points parabolic (random rationals)", criterion_2),
        ("polynomials: infinity parabolic, no finite extraneous points", criterion_3),
        ("degree law n^2 - n + 1", criterion_4),
        ("scaling identity", criterion_5),
        ("unicritical quadratics: fixed points, free critical points, mirror symmetry", criterion_6),
        ("Mobius with a = 0", criterion_7),
        ("Mobius with a != 0", criterion_8),
        ("multiplier at a repeated zero", criterion_9),
        ("Newton versus Stirling classifications", criterion_10),
        ("fixed-point suites and basin render hashes", criterion_11),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  criterion {:>2}  {name}  ({secs:.2} s)", i + 1),
            Err(reasons) => {
                failed += 1;
                println!("FAIL  criterion {:>2}  {name}  ({secs:.2} s)", i + 1);
                for r in reasons.iter().take(12) {
                    println!("        {r}");
                }
                if reasons.len() > 12 {
                    println!("        ... {} more", reasons.len() - 12);
                }
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
