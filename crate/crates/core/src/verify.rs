//! Executable checks of the method's dynamical properties.

use std::fmt::Display;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classification::{analyze, fixed_points, Analysis, FixedClass};
use crate::dynamics::{classify_grid, AttractorTable, Budgets, Viewport};
use crate::iterators::{
    build_stirling_polynomial, build_stirling_unicritical, stirling_step_with, MapSpec, Method, Target,
};
use crate::polynomial::{c64, Poly};
use crate::rational::{Affine, RationalMap, SpherePoint};
use crate::{Error, Result};

/// Tolerance for the coefficient identities of the scaling check.
pub const SCALING_TOL: f64 = 1e-9;
/// `a * lambda` counts as 1 within this distance.
pub const UNIT_SCALE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub input: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    /// Every comparison made; a failed report has at least one failing entry.
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| !w.ok)
    }
}

struct Check {
    name: String,
    witnesses: Vec<Witness>,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            witnesses: Vec::new(),
        }
    }

    fn claim(&mut self, input: impl Display, expected: impl Display, observed: impl Display, tolerance: f64, ok: bool) -> bool {
        self.witnesses.push(Witness {
            input: input.to_string(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            tolerance,
            ok,
        });
        ok
    }

    fn close(&mut self, input: impl Display, expected: Complex64, observed: Complex64, tolerance: f64) -> bool {
        let ok = (expected - observed).norm() <= tolerance;
        self.claim(input, expected, observed, tolerance, ok)
    }

    fn equal<T: PartialEq + Display>(&mut self, input: impl Display, expected: T, observed: T) -> bool {
        let ok = expected == observed;
        self.claim(input, expected, observed, 0.0, ok)
    }

    fn fail(&mut self, input: impl Display, expected: impl Display, error: &Error) {
        self.claim(input, expected, format!("error: {error}"), 0.0, false);
    }

    fn finish(self) -> VerificationReport {
        VerificationReport {
            passed: self.witnesses.iter().all(|w| w.ok),
            check: self.name,
            witnesses: self.witnesses,
        }
    }
}

/// Outcome of conjugating Stirling's map of `g = lambda f(az + b)` back by
/// `T = az + b`.
#[derive(Clone, Debug)]
pub struct ScalingCheck {
    /// Relative coefficient distance to `z - f(z) / f'(z - a lambda f(z))`.
    pub closed_form_distance: f64,
    /// Relative coefficient distance to Stirling's map of `f`.
    pub st_f_distance: f64,
    pub matches_st_f: bool,
    pub unit_scale: bool,
    pub report: VerificationReport,
}

pub fn scaling_check(f: &Poly, a: Complex64, b: Complex64, lambda: Complex64) -> Result<ScalingCheck> {
    let t = Affine::new(a, b)?;
    if lambda == Complex64::ZERO {
        return Err(Error::InvalidParameters("lambda must be nonzero".into()));
    }
    let g = f.compose(&t.as_poly()).scale(lambda);
    let conjugated = build_stirling_polynomial(&g)?.affine_conjugate(&t)?;

    let z = Poly::x();
    let shifted = f.derivative().compose(&(&z - &f.scale(a * lambda)));
    let closed_form = RationalMap::new(&(&z * &shifted) - f, shifted)?;
    let st_f = build_stirling_polynomial(f)?;

    let closed_form_distance = conjugated.coefficient_distance(&closed_form);
    let st_f_distance = conjugated.coefficient_distance(&st_f);
    let matches_st_f = st_f_distance <= SCALING_TOL;
    let unit_scale = (a * lambda - 1.0).norm() < UNIT_SCALE_TOL;

    let input = format!("a={a}, b={b}, lambda={lambda}");
    let mut check = Check::new("scaling");
    check.claim(
        &input,
        "T St_g T^-1 = z - f/f'(z - a lambda f)",
        format!("distance {closed_form_distance:.3e}"),
        SCALING_TOL,
        closed_form_distance <= SCALING_TOL,
    );
    check.claim(
        &input,
        format!("equal to St_f: {unit_scale}"),
        format!("equal to St_f: {matches_st_f} (distance {st_f_distance:.3e})"),
        SCALING_TOL,
        matches_st_f == unit_scale,
    );
    Ok(ScalingCheck {
        closed_form_distance,
        st_f_distance,
        matches_st_f,
        unit_scale,
        report: check.finish(),
    })
}

/// `F(conj z) = conj F(z)` at random points and mirror symmetry of a small
/// basin raster, for a map with real coefficients.
pub fn symmetry_check(map: &RationalMap, samples: usize) -> Result<VerificationReport> {
    let max_imag = map.max_imag();
    if max_imag >= 1e-12 {
        return Err(Error::NotRealCoefficients { max_imag });
    }
    let map = map.real_part();
    let mut check = Check::new("symmetry");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut worst_at = Complex64::ZERO;
    for _ in 0..samples {
        let z = c64(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let (Ok(SpherePoint::Finite(fz)), Ok(SpherePoint::Finite(fc))) = (map.eval(z), map.eval(z.conj())) else {
            continue;
        };
        let gap = (fc - fz.conj()).norm() / (1.0 + fz.norm());
        if gap >= worst {
            worst = gap;
            worst_at = z;
        }
    }
    check.claim(
        format!("{samples} random points, worst at {worst_at}"),
        "F(conj z) = conj F(z)",
        format!("relative gap {worst:.3e}"),
        1e-12,
        worst <= 1e-12,
    );

    let fixed = fixed_points(&map, &[])?;
    let table = AttractorTable::from_reports(&fixed).conjugation_closed();
    match table.conjugation_permutation() {
        None => {
            check.claim("attractor table", "closed under conjugation", "not closed", 0.0, false);
        }
        Some(sigma) => {
            let view = Viewport::new(Complex64::ZERO, 8.0)?;
            let raster = classify_grid(&map, &table, view, 48, 48, Budgets::with_max_iter(100));
            check.equal("48x48 raster over [-4, 4]^2", 0, raster.mirror_mismatches(&sigma));
        }
    }
    Ok(check.finish())
}

/// `(2 +- sqrt(2 (1 - 2 beta))) / 2`, the free critical points of Stirling's
/// map of `z^2 + beta`.
pub fn free_critical_pair(beta: Complex64) -> (Complex64, Complex64) {
    let root = (2.0 * (1.0 - 2.0 * beta)).sqrt();
    ((2.0 + root) / 2.0, (2.0 - root) / 2.0)
}

/// Orbits of both free critical points under Stirling's map of `z^2 + beta`.
/// Each holds the starting point and up to `n` iterates; an orbit stops early
/// if it reaches infinity.
pub fn free_critical_orbit(beta: Complex64, n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if (beta - 0.25).norm() < 1e-12 {
        return Err(Error::DegenerateBeta);
    }
    let map = build_stirling_unicritical(Complex64::ONE, Complex64::ZERO, beta)?;
    let (plus, minus) = free_critical_pair(beta);
    let orbit = |z0: Complex64| -> Result<Vec<Complex64>> {
        let mut out = vec![z0];
        let mut z = z0;
        for _ in 0..n {
            match map.eval(z)? {
                SpherePoint::Finite(w) => z = w,
                SpherePoint::Infinity => break,
            }
            out.push(z);
        }
        Ok(out)
    };
    Ok((orbit(plus)?, orbit(minus)?))
}

#[derive(Clone, Debug)]
pub struct RepeatedZeroCheck {
    pub observed: Complex64,
    pub expected: Complex64,
    pub report: VerificationReport,
}

/// Multiplier of Stirling's map at a zero of multiplicity `n` of
/// `f = (z - alpha)^n g`, measured by central differences.
pub fn repeated_zero_multiplier(g: &Poly, alpha: Complex64, n: u32) -> Result<RepeatedZeroCheck> {
    if g.eval(alpha).norm() <= 1e-12 * g.abs_scale(alpha) {
        return Err(Error::InvalidParameters("g must not vanish at alpha".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameters("multiplicity must be at least 1".into()));
    }
    let dg = g.derivative();
    // Factored evaluation: expanding (z - alpha)^n would cancel catastrophically near alpha.
    let f = |z: Complex64| -> Result<(Complex64, Complex64)> {
        let e = z - alpha;
        let lower = e.powu(n - 1);
        Ok((lower * e * g.eval(z), lower * (n as f64 * g.eval(z) + e * dg.eval(z))))
    };
    let h = 1e-4 * (1.0 + alpha.norm());
    let forward = stirling_step_with(f, alpha + h)?;
    let backward = stirling_step_with(f, alpha - h)?;
    let observed = (forward - backward) / (2.0 * h);
    let expected = c64(1.0 - 1.0 / n as f64, 0.0);
    let mut check = Check::new(format!("repeated_zero_n{n}"));
    check.close(format!("g={g:?}, alpha={alpha}, n={n}"), expected, observed, 1e-4);
    Ok(RepeatedZeroCheck {
        observed,
        expected,
        report: check.finish(),
    })
}

fn find_fixed(analysis: &Analysis, z: Complex64, tol: f64) -> Option<&crate::classification::FixedPointReport> {
    analysis
        .fixed_points
        .iter()
        .find(|r| r.location.finite().is_some_and(|w| (w - z).norm() <= tol))
}

fn check_fixed(check: &mut Check, analysis: &Analysis, z: Complex64, multiplier: Complex64, multiplicity: Option<usize>) {
    match find_fixed(analysis, z, 1e-8) {
        None => {
            check.claim(format!("fixed point near {z}"), "present", "absent", 1e-8, false);
        }
        Some(r) => {
            check.close(format!("multiplier at {z}"), multiplier, r.multiplier, 1e-6);
            if let Some(m) = multiplicity {
                check.equal(format!("multiplicity at {z}"), m, r.multiplicity);
            }
        }
    }
}

fn check_infinity(check: &mut Check, analysis: &Analysis, multiplier: Complex64, tol: f64) {
    match analysis.infinity() {
        None => {
            check.claim("infinity", "fixed", "not fixed", 0.0, false);
        }
        Some(r) => {
            check.close("multiplier at infinity", multiplier, r.multiplier, tol);
        }
    }
}

fn run_case(name: &str, spec: Result<MapSpec>, body: impl FnOnce(&mut Check, &Analysis)) -> VerificationReport {
    let mut check = Check::new(name);
    match spec.and_then(|s| analyze(&s)) {
        Ok(analysis) => body(&mut check, &analysis),
        Err(e) => check.fail(name, "analysis succeeds", &e),
    }
    check.finish()
}

fn unicritical_case(beta: f64, zeros: [Complex64; 2]) -> VerificationReport {
    let spec = MapSpec::stirling(Target::Unicritical {
        lambda: Complex64::ONE,
        alpha: Complex64::ZERO,
        beta: c64(beta, 0.0),
    });
    run_case(&format!("unicritical_beta_{beta}"), spec, |check, a| {
        check.equal("degree", 3, a.degree());
        for z in zeros {
            check_fixed(check, a, z, Complex64::ZERO, Some(1));
        }
        check_infinity(check, a, Complex64::ONE, 1e-9);
        let (plus, minus) = free_critical_pair(c64(beta, 0.0));
        for z in [plus, minus] {
            let nearest = a
                .free_critical
                .iter()
                .map(|r| (r.location - z).norm())
                .fold(f64::INFINITY, f64::min);
            check.claim(format!("free critical point {z}"), "present", format!("distance {nearest:.3e}"), 1e-8, nearest <= 1e-8);
        }
    })
}

/// Every worked example with a known answer, sorted by check name.
pub fn paper_case_suite() -> Vec<VerificationReport> {
    let i = c64(0.0, 1.0);
    let re = |x: f64| c64(x, 0.0);
    let mut reports = Vec::new();

    reports.push(run_case(
        "rational_2z_minus_1_over_z",
        MapSpec::stirling(Target::Rational {
            num: Poly::from_real(&[-1.0, 2.0]),
            den: Poly::x(),
        }),
        |check, a| {
            let den = Poly::monomial(Complex64::ONE, 3);
            let corr = Poly::from_real(&[-1.0, 1.0]).pow(4) * Poly::from_real(&[-1.0, 2.0]);
            let expected = RationalMap::new(&(&Poly::x() * &den) - &corr, den).unwrap();
            let dist = a.map.coefficient_distance(&expected);
            check.claim("St_f", "z - (z-1)^4 (2z-1)/z^3", format!("distance {dist:.3e}"), 1e-10, dist <= 1e-10);
            check_fixed(check, a, re(0.5), Complex64::ZERO, Some(1));
            check_fixed(check, a, re(1.0), Complex64::ONE, Some(4));
            let extraneous_one = find_fixed(a, re(1.0), 1e-8).is_some_and(|r| r.extraneous);
            check.equal("1 is extraneous", true, extraneous_one);
        },
    ));

    reports.push(unicritical_case(-4.0, [re(2.0), re(-2.0)]));
    reports.push(unicritical_case(4.0, [c64(0.0, 2.0), c64(0.0, -2.0)]));

    reports.push(run_case(
        "polynomial_z2_plus_4",
        MapSpec::stirling(Target::Polynomial(Poly::from_real(&[4.0, 0.0, 1.0]))),
        |check, a| {
            let cubic = RationalMap::new(
                Poly::from_real(&[4.0, 8.0, -1.0, 2.0]),
                Poly::from_real(&[8.0, -2.0, 2.0]),
            )
            .unwrap();
            let dist = a.map.coefficient_distance(&cubic);
            check.claim("St_P", "(2z^3 - z^2 + 8z + 4) / (2z^2 - 2z + 8)", format!("distance {dist:.3e}"), 1e-12, dist <= 1e-12);
            check_fixed(check, a, c64(0.0, 2.0), Complex64::ZERO, Some(1));
            check_fixed(check, a, c64(0.0, -2.0), Complex64::ZERO, Some(1));
            check_infinity(check, a, Complex64::ONE, 1e-9);
            check.equal("finite extraneous fixed points", 0, a.finite_extraneous().count());
        },
    ));

    reports.push(run_case(
        "mobius_case_1",
        MapSpec::stirling(Target::Mobius {
            a: Complex64::ZERO,
            b: i,
            c: i,
            d: Complex64::ONE,
        }),
        |check, a| {
            check.equal("degree", 4, a.degree());
            check.equal("critical points with multiplicity", 6, a.critical.total());
            check_infinity(check, a, re(0.5), 1e-9);
            check_fixed(check, a, i + 1.0, Complex64::ONE, Some(2));
            check_fixed(check, a, i - 1.0, Complex64::ONE, Some(2));
            check.equal("herman_upper", 1, a.census.herman_upper);
        },
    ));

    let (ma, mb, mc, md) = (re(1.0), re(0.0), re(1.0), re(1.0));
    reports.push(run_case(
        "mobius_case_2",
        MapSpec::stirling(Target::Mobius { a: ma, b: mb, c: mc, d: md }),
        |check, a| {
            check.equal("degree", 5, a.degree());
            let expected = RationalMap::new(
                Poly::from_real(&[0.0, 0.0, 1.0, 0.0, -1.0, -1.0]),
                Poly::from_real(&[1.0, 1.0]).pow(3),
            )
            .unwrap();
            let dist = a.map.coefficient_distance(&expected);
            check.claim("St_M", "z^2 (1 - z^2 - z^3) / (z+1)^3", format!("distance {dist:.3e}"), 1e-10, dist <= 1e-10);
            check_infinity(check, a, Complex64::ZERO, 1e-9);
            let disc = (4.0 * (mb * mc - ma * md) + ma * ma).sqrt();
            for sign in [1.0, -1.0] {
                let closed = (-(2.0 * md - ma) + sign * disc) / (2.0 * mc);
                check_fixed(check, a, closed, Complex64::ONE, None);
            }
            let listed = c64(-0.5, 3f64.sqrt() / 2.0);
            for z in [listed, listed.conj()] {
                check_fixed(check, a, z, Complex64::ONE, None);
            }
            check.equal("herman_upper", 2, a.census.herman_upper);
        },
    ));

    reports.push(run_case(
        "newton_z2_minus_1",
        MapSpec::new(Target::Polynomial(Poly::from_real(&[-1.0, 0.0, 1.0])), Method::Newton),
        |check, a| {
            check_infinity(check, a, re(2.0), 1e-9);
            let class = a.infinity().map(|r| r.class.to_string()).unwrap_or_default();
            check.equal("class at infinity", FixedClass::Repelling.to_string(), class);
        },
    ));

    for beta in [-4.0, 4.0] {
        let mut check = Check::new(format!("symmetry_beta_{beta}"));
        match build_stirling_unicritical(Complex64::ONE, Complex64::ZERO, re(beta)).and_then(|m| symmetry_check(&m, 200)) {
            Ok(r) => check.witnesses.extend(r.witnesses),
            Err(e) => check.fail("symmetry", "pass", &e),
        }
        reports.push(check.finish());
    }

    reports.extend(scaling_suite());

    for n in 2..=4 {
        reports.push(match repeated_zero_multiplier(&Poly::one(), Complex64::ONE, n) {
            Ok(r) => r.report,
            Err(e) => {
                let mut check = Check::new(format!("repeated_zero_n{n}"));
                check.fail(n, 1.0 - 1.0 / n as f64, &e);
                check.finish()
            }
        });
    }

    reports.sort_by(|a, b| a.check.cmp(&b.check));
    reports
}

/// The two worked scaling cases plus a seeded batch of random ones.
pub fn scaling_suite() -> Vec<VerificationReport> {
    let f = Poly::from_real(&[-1.0, 0.0, 1.0]);
    let re = |x: f64| c64(x, 0.0);
    let mut cases = vec![
        ("scaling_a2_lambda1", f.clone(), re(2.0), re(0.0), re(1.0)),
        ("scaling_a2_lambda_half", f.clone(), re(2.0), re(0.0), re(0.5)),
        ("scaling_identity", f, re(1.0), re(0.0), re(1.0)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11e);
    for k in 0..6 {
        let deg = 2 + k % 3;
        let p = Poly::new((0..=deg).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
        let a = c64(rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0));
        let b = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let lambda = if k % 2 == 0 { a.inv() } else { c64(rng.random_range(0.5..2.0), 0.3) };
        cases.push(("scaling_random", p, a, b, lambda));
    }
    cases
        .into_iter()
        .enumerate()
        .map(|(k, (name, p, a, b, lambda))| {
            let name = if name == "scaling_random" { format!("{name}_{k}") } else { name.to_string() };
            let mut report = match scaling_check(&p, a, b, lambda) {
                Ok(r) => r.report,
                Err(e) => {
                    let mut check = Check::new("scaling");
                    check.fail(format!("a={a}, b={b}, lambda={lambda}"), "scaling check runs", &e);
                    check.finish()
                }
            };
            report.check = name;
            report
        })
        .collect()
}

/// Reports for the symmetry suite: both unicritical examples and a general
/// real-coefficient rational map.
pub fn symmetry_suite() -> Vec<VerificationReport> {
    let mut maps: Vec<(String, Result<RationalMap>)> = [-4.0, 4.0, 0.5]
        .into_iter()
        .map(|beta| {
            (
                format!("symmetry_beta_{beta}"),
                build_stirling_unicritical(Complex64::ONE, Complex64::ZERO, c64(beta, 0.0)),
            )
        })
        .collect();
    maps.push((
        "symmetry_real_rational".into(),
        MapSpec::stirling(Target::Rational {
            num: Poly::from_real(&[1.0, -1.0, 0.0, 1.0]),
            den: Poly::from_real(&[2.0, 0.0, 1.0]),
        })
        .and_then(|s| s.build()),
    ));
    maps.into_iter()
        .map(|(name, map)| {
            let mut report = match map.and_then(|m| symmetry_check(&m, 200)) {
                Ok(r) => r,
                Err(e) => {
                    let mut check = Check::new("symmetry");
                    check.fail(&name, "pass", &e);
                    check.finish()
                }
            };
            report.check = name;
            report
        })
        .collect()
}
