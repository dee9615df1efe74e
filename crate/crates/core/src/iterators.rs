//! Symbolic construction of Stirling's and Newton's iteration maps.
//!
//! Stirling's method for `f` is `St_f(z) = z - f(z) / f'(z - f(z))`. For a
//! rational `f = P/Q` every intermediate quantity is a polynomial over a power
//! of `Q`, so the builders track those powers explicitly instead of relying on
//! a numerical GCD.

use num_complex::Complex64;

use crate::polynomial::Poly;
use crate::rational::{homogenize, RationalMap};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Stirling,
    Newton,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Stirling => "stirling",
            Method::Newton => "newton",
        })
    }
}

/// The function whose roots are sought.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Polynomial(Poly),
    Rational { num: Poly, den: Poly },
    /// `(a z + b) / (c z + d)`
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `lambda (z - alpha)^2 + beta`
    Unicritical {
        lambda: Complex64,
        alpha: Complex64,
        beta: Complex64,
    },
}

impl Target {
    pub fn kind(&self) -> &'static str {
        match self {
            Target::Polynomial(_) => "polynomial",
            Target::Rational { .. } => "rational",
            Target::Mobius { .. } => "mobius",
            Target::Unicritical { .. } => "unicritical",
        }
    }

    /// `f` as `(P, Q)`.
    pub fn as_fraction(&self) -> (Poly, Poly) {
        match self {
            Target::Polynomial(p) => (p.clone(), Poly::one()),
            Target::Rational { num, den } => (num.clone(), den.clone()),
            Target::Mobius { a, b, c, d } => (Poly::linear(*a, *b), Poly::linear(*c, *d)),
            Target::Unicritical { lambda, alpha, beta } => (unicritical_poly(*lambda, *alpha, *beta), Poly::one()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Target::Polynomial(p) => {
                if p.degree().unwrap_or(0) < 1 {
                    return Err(Error::InvalidParameters("polynomial must be nonconstant".into()));
                }
            }
            Target::Rational { num, den } => {
                if den.is_zero() {
                    return Err(Error::InvalidParameters("denominator is identically zero".into()));
                }
                if num.is_zero() {
                    return Err(Error::InvalidParameters("numerator is identically zero".into()));
                }
            }
            Target::Mobius { a, b, c, d } => validate_mobius(*a, *b, *c, *d)?,
            Target::Unicritical { lambda, beta, .. } => {
                if *lambda == Complex64::ZERO {
                    return Err(Error::InvalidParameters("lambda must be nonzero".into()));
                }
                if *beta == Complex64::ZERO {
                    return Err(Error::InvalidParameters("beta must be nonzero".into()));
                }
            }
        }
        Ok(())
    }

    /// Finite zeros of `f`: the roots of the numerator.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        let (p, _) = self.as_fraction();
        if p.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(p.roots()?.locations().collect())
    }

    /// `(f(z), f'(z))`, failing at poles of `f`.
    pub fn eval_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (p, q) = self.as_fraction();
        let (pv, dp) = p.eval_with_derivative(z);
        let (qv, dq) = q.eval_with_derivative(z);
        if qv == Complex64::ZERO {
            return Err(Error::PoleEncountered { at: z });
        }
        Ok((pv / qv, (dp * qv - pv * dq) / (qv * qv)))
    }

    /// `(f(z), f'(z), f''(z))`, failing at poles of `f`.
    pub fn eval_second_order(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let (p, q) = self.as_fraction();
        let (pv, dp) = p.eval_with_derivative(z);
        let (qv, dq) = q.eval_with_derivative(z);
        if qv == Complex64::ZERO {
            return Err(Error::PoleEncountered { at: z });
        }
        let (ddp, ddq) = (p.nth_derivative(2).eval(z), q.nth_derivative(2).eval(z));
        let w = dp * qv - pv * dq;
        let second = ((ddp * qv - pv * ddq) * qv - 2.0 * dq * w) / (qv * qv * qv);
        Ok((pv / qv, w / (qv * qv), second))
    }
}

/// A target function paired with the root-finding method applied to it.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub target: Target,
    pub method: Method,
}

impl MapSpec {
    pub fn new(target: Target, method: Method) -> Result<Self> {
        target.validate()?;
        Ok(MapSpec { target, method })
    }

    pub fn stirling(target: Target) -> Result<Self> {
        Self::new(target, Method::Stirling)
    }

    pub fn with_method(&self, method: Method) -> MapSpec {
        MapSpec {
            target: self.target.clone(),
            method,
        }
    }

    /// Builds the iteration map symbolically, using the closed forms for the
    /// Möbius and unicritical families.
    pub fn build(&self) -> Result<RationalMap> {
        self.displacement()?.to_map()
    }

    /// The map as `z - C/D` with `C` left factored.
    pub fn displacement(&self) -> Result<Displacement> {
        match (self.method, &self.target) {
            (Method::Stirling, Target::Polynomial(p)) => stirling_polynomial_displacement(p),
            (Method::Stirling, Target::Rational { num, den }) => Ok(stirling_rational_displacement(num, den)?.0),
            (Method::Stirling, Target::Mobius { a, b, c, d }) => stirling_mobius_displacement(*a, *b, *c, *d),
            (Method::Stirling, Target::Unicritical { lambda, alpha, beta }) => {
                stirling_unicritical_displacement(*lambda, *alpha, *beta)
            }
            (Method::Newton, target) => {
                let (p, q) = target.as_fraction();
                newton_displacement(&p, &q)
            }
        }
    }

    /// Derivative of the iteration map at `z`, evaluated from `f` and its
    /// first two derivatives rather than from the expanded map. Fails where
    /// `f` or the step has a pole.
    pub fn multiplier_at(&self, z: Complex64) -> Result<Complex64> {
        let singular = || Error::PoleEncountered { at: z };
        match self.method {
            Method::Stirling => {
                let (f, df, _) = self.target.eval_second_order(z)?;
                let (_, dk, ddk) = self.target.eval_second_order(z - f)?;
                if dk == Complex64::ZERO {
                    return Err(singular());
                }
                Ok(1.0 - (df * dk - f * ddk * (1.0 - df)) / (dk * dk))
            }
            Method::Newton => {
                let (f, df, ddf) = self.target.eval_second_order(z)?;
                if df == Complex64::ZERO {
                    return Err(singular());
                }
                Ok(f * ddf / (df * df))
            }
        }
    }

    /// One step of the method evaluated pointwise from `f`, without building
    /// the global map.
    pub fn step_numeric(&self, z: Complex64) -> Result<Complex64> {
        match self.method {
            Method::Stirling => stirling_step_numeric(self, z),
            Method::Newton => newton_step_numeric(self, z),
        }
    }
}

fn validate_mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<()> {
    if c == Complex64::ZERO {
        return Err(Error::InvalidMobius("c must be nonzero"));
    }
    let det = a * d - b * c;
    if det.norm() <= 1e-14 * ((a * d).norm() + (b * c).norm()) {
        return Err(Error::InvalidMobius("ad - bc must be nonzero"));
    }
    Ok(())
}

fn unicritical_poly(lambda: Complex64, alpha: Complex64, beta: Complex64) -> Poly {
    // lambda z^2 - 2 lambda alpha z + lambda alpha^2 + beta
    Poly::new(vec![lambda * alpha * alpha + beta, -2.0 * lambda * alpha, lambda])
}

/// An iteration map written as `z - C(z) / D(z)`.
///
/// `C` and `D` are kept as products of powers of polynomial factors.
/// Expanding the map to `(z D - C) / D` and subtracting `z D` again to find
/// fixed points loses `C` to cancellation whenever `z D` dominates, while the
/// factors give the fixed points and their multiplicities directly.
#[derive(Clone, Debug, PartialEq)]
pub struct Displacement {
    factors: Vec<(Poly, usize)>,
    den_factors: Vec<(Poly, usize)>,
    den: Poly,
}

fn expand(factors: &[(Poly, usize)]) -> Poly {
    factors.iter().fold(Poly::one(), |acc, (f, m)| &acc * &f.pow(*m as u32))
}

impl Displacement {
    pub fn new(factors: Vec<(Poly, usize)>, den_factors: Vec<(Poly, usize)>) -> Result<Self> {
        let nonzero = |fs: Vec<(Poly, usize)>| -> Result<Vec<(Poly, usize)>> {
            if fs.iter().any(|(f, m)| *m > 0 && f.is_zero()) {
                return Err(Error::InvalidParameters("displacement with a zero factor".into()));
            }
            Ok(fs.into_iter().filter(|(_, m)| *m > 0).collect())
        };
        let factors = nonzero(factors)?;
        let den_factors = nonzero(den_factors)?;
        let den = expand(&den_factors);
        Ok(Displacement {
            factors,
            den_factors,
            den,
        })
    }

    pub fn den_factors(&self) -> &[(Poly, usize)] {
        &self.den_factors
    }

    pub fn factors(&self) -> &[(Poly, usize)] {
        &self.factors
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// `C` expanded.
    pub fn numerator(&self) -> Poly {
        expand(&self.factors)
    }

    /// `C(z)` and `C'(z)` from the factors.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        self.factors.iter().fold((Complex64::ONE, Complex64::ZERO), |(v, dv), (f, m)| {
            let (fv, fd) = f.eval_with_derivative(z);
            let lower = fv.powu(*m as u32 - 1);
            let (pv, pd) = (lower * fv, *m as f64 * lower * fd);
            (v * pv, dv * pv + v * pd)
        })
    }

    pub fn to_map(&self) -> Result<RationalMap> {
        RationalMap::new(&(&Poly::x() * &self.den) - &self.numerator(), self.den.clone())
    }

    /// Wronskian `num' den - num den'` of the expanded map, formed as
    /// `D^2 - C' D + C D'` and reduced by the power of `z` the map cancels.
    pub fn wronskian(&self) -> Poly {
        let c = self.numerator();
        let w = &(&self.den * &self.den) - &(&(&c.derivative() * &self.den) - &(&c * &self.den.derivative()));
        let shift = c.trailing_zeros().min(self.den.trailing_zeros());
        w.shift_down(2 * shift)
    }

    /// `1 - (C/D)'` at `z`.
    pub fn multiplier(&self, z: Complex64) -> Result<Complex64> {
        let (dv, dd) = self.den.eval_with_derivative(z);
        if dv == Complex64::ZERO {
            return Err(Error::PoleEncountered { at: z });
        }
        let (cv, cd) = self.eval_with_derivative(z);
        Ok(1.0 - (cd * dv - cv * dd) / (dv * dv))
    }
}

/// `St_P = (z D - P) / D` with `D = P'(z - P)`.
pub fn build_stirling_polynomial(p: &Poly) -> Result<RationalMap> {
    stirling_polynomial_displacement(p)?.to_map()
}

fn stirling_polynomial_displacement(p: &Poly) -> Result<Displacement> {
    if p.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidParameters("polynomial must be nonconstant".into()));
    }
    let den = p.derivative().compose(&(&Poly::x() - p));
    Displacement::new(vec![(p.clone(), 1)], vec![(den, 1)])
}

/// Stirling's map of `R = P/Q` together with the factor
/// `S = Q(k) P'(k) - P(k) Q'(k)`, `k = z - R`.
#[derive(Clone, Debug)]
pub struct StirlingRational {
    pub map: RationalMap,
    pub s_factor: RationalMap,
}

/// `St_R(z) = z - P(z) Q(k)^2 / (Q(z) S(z))`.
pub fn build_stirling_rational(p: &Poly, q: &Poly) -> Result<RationalMap> {
    Ok(stirling_rational_parts(p, q)?.map)
}

pub fn stirling_rational_parts(p: &Poly, q: &Poly) -> Result<StirlingRational> {
    let (displacement, s_factor) = stirling_rational_displacement(p, q)?;
    Ok(StirlingRational {
        map: displacement.to_map()?,
        s_factor,
    })
}

fn stirling_rational_displacement(p: &Poly, q: &Poly) -> Result<(Displacement, RationalMap)> {
    let (Some(n), Some(m)) = (p.degree(), q.degree()) else {
        return Err(Error::InvalidParameters("P and Q must both be nonzero".into()));
    };
    let z = Poly::x();
    // k = (zQ - P) / Q; every composite below is (polynomial) / Q^power.
    let k_num = &(&z * q) - p;
    let q_of_k = homogenize(q, &k_num, q, m);
    let p_of_k = homogenize(p, &k_num, q, n);
    let (np, mp) = (n.saturating_sub(1), m.saturating_sub(1));
    let dp_of_k = homogenize(&p.derivative(), &k_num, q, np);
    let dq_of_k = homogenize(&q.derivative(), &k_num, q, mp);

    let t = (m + np).max(n + mp);
    let s_num = &(&(&q_of_k * &dp_of_k) * &q.pow((t - m - np) as u32))
        - &(&(&p_of_k * &dq_of_k) * &q.pow((t - n - mp) as u32));
    if s_num.is_zero() {
        return Err(Error::InvalidParameters("f is constant".into()));
    }

    // P Q(k)^2 / (Q S) = P A^2 Q^t / (Q^(2m+1) S_num)
    let excess = t as i64 - 2 * m as i64 - 1;
    let mut factors = vec![(p.clone(), 1), (q_of_k, 2)];
    let mut den_factors = vec![(s_num.clone(), 1)];
    if excess >= 0 {
        factors.push((q.clone(), excess as usize));
    } else {
        den_factors.push((q.clone(), (-excess) as usize));
    }
    let s_factor = RationalMap::new(s_num, q.pow(t as u32))?;
    Ok((Displacement::new(factors, den_factors)?, s_factor))
}

/// Closed forms for `M = (az+b)/(cz+d)`: degree 4 when `a = 0`, degree 5 otherwise.
pub fn build_stirling_mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<RationalMap> {
    stirling_mobius_displacement(a, b, c, d)?.to_map()
}

fn stirling_mobius_displacement(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Displacement> {
    validate_mobius(a, b, c, d)?;
    // z - (az+b)(c^2 z^2 + (2cd - ac) z + d^2 - bc)^2 / ((cz+d)^3 (ad-bc)).
    // With a = 0 the linear factor is the constant b and the degree drops to 4.
    let det = a * d - b * c;
    let quad = Poly::new(vec![d * d - b * c, 2.0 * c * d - a * c, c * c]);
    Displacement::new(
        vec![(Poly::linear(a, b), 1), (quad, 2)],
        vec![(Poly::linear(c, d), 3), (Poly::constant(det), 1)],
    )
}

/// Closed form for `f = lambda (z - alpha)^2 + beta`.
pub fn build_stirling_unicritical(lambda: Complex64, alpha: Complex64, beta: Complex64) -> Result<RationalMap> {
    stirling_unicritical_displacement(lambda, alpha, beta)?.to_map()
}

fn stirling_unicritical_displacement(lambda: Complex64, alpha: Complex64, beta: Complex64) -> Result<Displacement> {
    Target::Unicritical { lambda, alpha, beta }.validate()?;
    let f = unicritical_poly(lambda, alpha, beta);
    // z + f / (2 lambda (lambda z^2 - (2 alpha lambda + 1) z + alpha^2 lambda + beta + alpha))
    let quad = Poly::new(vec![
        alpha * alpha * lambda + beta + alpha,
        -(2.0 * alpha * lambda + 1.0),
        lambda,
    ]);
    Displacement::new(vec![(f, 1)], vec![(quad.scale(-2.0 * lambda), 1)])
}

/// Newton's map `z - R/R'` for `R = P/Q`.
pub fn build_newton(p: &Poly, q: &Poly) -> Result<RationalMap> {
    newton_displacement(p, q)?.to_map()
}

fn newton_displacement(p: &Poly, q: &Poly) -> Result<Displacement> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::InvalidParameters("P and Q must both be nonzero".into()));
    }
    let w = &(&p.derivative() * q) - &(p * &q.derivative());
    if w.is_zero() {
        return Err(Error::InvalidParameters("f is constant".into()));
    }
    Displacement::new(vec![(p.clone(), 1), (q.clone(), 1)], vec![(w, 1)])
}

/// `z - f(z) / f'(z - f(z))` evaluated directly; the method field of `spec`
/// is ignored.
pub fn stirling_step_numeric(spec: &MapSpec, z: Complex64) -> Result<Complex64> {
    stirling_step_with(|w| spec.target.eval_with_derivative(w), z)
}

/// Stirling's step for any `f` given as `w -> (f(w), f'(w))`.
pub fn stirling_step_with<F>(f: F, z: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let (fz, _) = f(z)?;
    let (_, slope) = f(z - fz).map_err(|_| Error::PoleEncountered { at: z })?;
    if slope == Complex64::ZERO || !slope.is_finite() {
        return Err(Error::PoleEncountered { at: z });
    }
    Ok(z - fz / slope)
}

/// `z - f(z) / f'(z)` evaluated directly.
pub fn newton_step_numeric(spec: &MapSpec, z: Complex64) -> Result<Complex64> {
    let (fz, slope) = spec.target.eval_with_derivative(z)?;
    if slope == Complex64::ZERO {
        return Err(Error::PoleEncountered { at: z });
    }
    Ok(z - fz / slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::c64;
    use crate::rational::SpherePoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> Complex64 {
        c64(x, 0.0)
    }

    fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
        c64(rng.random_range(-r..r), rng.random_range(-r..r))
    }

    fn rand_poly(rng: &mut ChaCha8Rng, deg: usize) -> Poly {
        loop {
            let mut v: Vec<_> = (0..=deg).map(|_| rand_c(rng, 1.0)).collect();
            let lead = v[deg].norm();
            if lead > 0.3 {
                v[deg] /= lead;
                return Poly::new(v);
            }
        }
    }

    /// Agreement of the symbolic map with the pointwise step at random
    /// sample points away from poles.
    fn assert_symbolic_matches_pointwise(spec: &MapSpec, rng: &mut ChaCha8Rng, radius: f64) {
        let map = spec.build().unwrap();
        let mut checked = 0;
        while checked < 100 {
            let z = rand_c(rng, radius);
            if map.den().eval(z).norm() < 1e-3 * map.den().abs_scale(z) {
                continue;
            }
            let Ok(step) = spec.step_numeric(z) else { continue };
            let SpherePoint::Finite(sym) = map.eval(z).unwrap() else { continue };
            assert!(
                (sym - step).norm() <= 1e-8 * (1.0 + z.norm()) * (1.0 + step.norm()),
                "{spec:?} at {z}: symbolic {sym} vs pointwise {step}"
            );
            checked += 1;
        }
    }

    #[test]
    fn unicritical_quadratic_closed_form() {
        let beta = c64(0.3, -1.1);
        let p = Poly::new(vec![beta, Complex64::ZERO, Complex64::ONE]);
        let st = build_stirling_polynomial(&p).unwrap();
        // (2z^3 - z^2 + 2 beta z + beta) / (2 (z^2 - z + beta))
        let expected = RationalMap::new(
            Poly::new(vec![beta, 2.0 * beta, re(-1.0), re(2.0)]),
            Poly::new(vec![2.0 * beta, re(-2.0), re(2.0)]),
        )
        .unwrap();
        assert!(st.approx_eq(&expected, 1e-14));
        assert_eq!(st.degree(), 3);
    }

    #[test]
    fn linear_polynomial_gives_constant_map() {
        let st = build_stirling_polynomial(&Poly::x()).unwrap();
        assert!(st.num().is_zero());
        assert_eq!(st.degree(), 0);
    }

    #[test]
    fn degree_law_for_z_squared_minus_one() {
        let st = build_stirling_polynomial(&Poly::from_real(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(st.degree(), 3);
    }

    #[test]
    fn rational_example_from_2z_minus_1_over_z() {
        let st = build_stirling_rational(&Poly::from_real(&[-1.0, 2.0]), &Poly::x()).unwrap();
        // z - (z-1)^4 (2z-1) / z^3
        let den = Poly::monomial(Complex64::ONE, 3);
        let corr = Poly::from_real(&[-1.0, 1.0]).pow(4) * Poly::from_real(&[-1.0, 2.0]);
        let expected = RationalMap::new(&(&Poly::x() * &den) - &corr, den).unwrap();
        assert!(st.approx_eq(&expected, 1e-10), "{st:?}");
    }

    #[test]
    fn rational_builder_with_unit_denominator_matches_polynomial_builder() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for deg in 1..=4 {
            let p = rand_poly(&mut rng, deg);
            let a = build_stirling_rational(&p, &Poly::one()).unwrap();
            let b = build_stirling_polynomial(&p).unwrap();
            assert!(a.approx_eq(&b, 1e-12));
        }
    }

    #[test]
    fn rational_example_i_over_iz_plus_1() {
        let i = c64(0.0, 1.0);
        let st = build_stirling_rational(&Poly::constant(i), &Poly::linear(i, Complex64::ONE)).unwrap();
        // z - i (z^2 - 2iz - 2)^2 / (iz + 1)^3
        let den = Poly::linear(i, Complex64::ONE).pow(3);
        let corr = Poly::new(vec![re(-2.0), -2.0 * i, re(1.0)]).pow(2).scale(i);
        let expected = RationalMap::new(&(&Poly::x() * &den) - &corr, den).unwrap();
        assert!(st.approx_eq(&expected, 1e-10));
        assert_eq!(st.degree(), 4);
    }

    #[test]
    fn mobius_closed_forms() {
        let i = c64(0.0, 1.0);
        let case1 = build_stirling_mobius(Complex64::ZERO, i, i, Complex64::ONE).unwrap();
        assert_eq!(case1.degree(), 4);

        let case2 = build_stirling_mobius(re(1.0), re(0.0), re(1.0), re(1.0)).unwrap();
        let expected = RationalMap::new(
            Poly::from_real(&[0.0, 0.0, 1.0, 0.0, -1.0, -1.0]),
            Poly::from_real(&[1.0, 1.0]).pow(3),
        )
        .unwrap();
        assert!(case2.approx_eq(&expected, 1e-10));
        assert_eq!(case2.degree(), 5);
    }

    #[test]
    fn mobius_validation() {
        assert!(matches!(
            build_stirling_mobius(re(1.0), re(2.0), re(1.0), re(2.0)),
            Err(Error::InvalidMobius(_))
        ));
        assert!(matches!(
            build_stirling_mobius(re(1.0), re(2.0), re(0.0), re(2.0)),
            Err(Error::InvalidMobius(_))
        ));
    }

    #[test]
    fn mobius_builders_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let a = if trial % 4 == 0 { Complex64::ZERO } else { rand_c(&mut rng, 1.0) };
            let (b, c, d) = (rand_c(&mut rng, 1.0), rand_c(&mut rng, 1.0), rand_c(&mut rng, 1.0));
            let closed = build_stirling_mobius(a, b, c, d).unwrap();
            let generic = build_stirling_rational(&Poly::linear(a, b), &Poly::linear(c, d)).unwrap();
            assert!(closed.approx_eq(&generic, 1e-10), "a={a} b={b} c={c} d={d}");
            assert_eq!(closed.degree(), if a == Complex64::ZERO { 4 } else { 5 });
        }
    }

    #[test]
    fn unicritical_builder() {
        for beta in [-4.0, 4.0, 0.7] {
            let closed = build_stirling_unicritical(re(1.0), re(0.0), re(beta)).unwrap();
            let generic = build_stirling_polynomial(&Poly::from_real(&[beta, 0.0, 1.0])).unwrap();
            assert!(closed.approx_eq(&generic, 1e-14));
        }
        let st = build_stirling_unicritical(re(1.0), re(0.0), re(-4.0)).unwrap();
        for r in [2.0, -2.0] {
            let v = st.eval(re(r)).unwrap().finite().unwrap();
            assert!((v - r).norm() < 1e-14);
        }
        let st = build_stirling_unicritical(re(1.0), re(0.0), re(4.0)).unwrap();
        for r in [c64(0.0, 2.0), c64(0.0, -2.0)] {
            let v = st.eval(r).unwrap().finite().unwrap();
            assert!((v - r).norm() < 1e-14);
        }
        let lam = c64(0.5, 0.25);
        let (alpha, beta) = (c64(-0.3, 0.1), c64(1.2, 0.4));
        let closed = build_stirling_unicritical(lam, alpha, beta).unwrap();
        let generic = build_stirling_polynomial(&unicritical_poly(lam, alpha, beta)).unwrap();
        assert!(closed.approx_eq(&generic, 1e-12));
        assert!(matches!(
            build_stirling_unicritical(Complex64::ZERO, alpha, beta),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn newton_examples() {
        let n = build_newton(&Poly::from_real(&[-1.0, 0.0, 1.0]), &Poly::one()).unwrap();
        let expected = RationalMap::new(Poly::from_real(&[1.0, 0.0, 1.0]), Poly::from_real(&[0.0, 2.0])).unwrap();
        assert!(n.approx_eq(&expected, 1e-15));

        let n = build_newton(&Poly::monomial(Complex64::ONE, 2), &Poly::one()).unwrap();
        assert!(n.approx_eq(&RationalMap::from_poly(Poly::from_real(&[0.0, 0.5])), 1e-15));

        // z^2 + 4: roots superattracting; infinity has multiplier 2 in the reciprocal chart.
        let n = build_newton(&Poly::from_real(&[4.0, 0.0, 1.0]), &Poly::one()).unwrap();
        for r in [c64(0.0, 2.0), c64(0.0, -2.0)] {
            assert!(n.derivative_at(r).unwrap().norm() < 1e-14);
        }
        let g = n.conjugate_reciprocal().unwrap();
        assert!((g.derivative_at(Complex64::ZERO).unwrap() - 2.0).norm() < 1e-14);
    }

    #[test]
    fn pointwise_step_examples() {
        let spec = MapSpec::stirling(Target::Polynomial(Poly::from_real(&[-4.0, 0.0, 1.0]))).unwrap();
        assert_eq!(stirling_step_numeric(&spec, re(2.0)).unwrap(), re(2.0));

        let spec = MapSpec::stirling(Target::Polynomial(Poly::from_real(&[4.0, 0.0, 1.0]))).unwrap();
        assert!((stirling_step_numeric(&spec, re(1.0)).unwrap() - 1.625).norm() < 1e-15);

        // f'(z - f(z)) = 2(z - z^2 - 4) vanishes where z^2 - z + 4 = 0.
        let z0 = c64(0.5, 15f64.sqrt() / 2.0);
        let k = z0 - (z0 * z0 + 4.0);
        assert!(k.norm() < 1e-14);
    }

    #[test]
    fn step_reports_pole() {
        let spec = MapSpec::stirling(Target::Polynomial(Poly::from_real(&[-1.0, 0.0, 1.0]))).unwrap();
        // k = z - (z^2 - 1) = 0 at the golden-ratio roots of z^2 - z - 1.
        let z = re((1.0 - 5f64.sqrt()) / 2.0);
        let k = z - (z * z - 1.0);
        if k == Complex64::ZERO {
            assert!(matches!(stirling_step_numeric(&spec, z), Err(Error::PoleEncountered { .. })));
        }
        let rational = MapSpec::stirling(Target::Rational { num: Poly::one(), den: Poly::x() }).unwrap();
        assert!(matches!(stirling_step_numeric(&rational, Complex64::ZERO), Err(Error::PoleEncountered { .. })));
    }

    #[test]
    fn symbolic_and_pointwise_agree_for_every_builder() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for deg in 1..=5 {
            let spec = MapSpec::stirling(Target::Polynomial(rand_poly(&mut rng, deg))).unwrap();
            assert_symbolic_matches_pointwise(&spec, &mut rng, 1.5);
            assert_symbolic_matches_pointwise(&spec.with_method(Method::Newton), &mut rng, 1.5);
        }
        for (n, m) in [(1, 1), (2, 1), (3, 2), (4, 3), (2, 3), (4, 1)] {
            let spec = MapSpec::stirling(Target::Rational {
                num: rand_poly(&mut rng, n),
                den: rand_poly(&mut rng, m),
            })
            .unwrap();
            assert_symbolic_matches_pointwise(&spec, &mut rng, 1.5);
            assert_symbolic_matches_pointwise(&spec.with_method(Method::Newton), &mut rng, 1.5);
        }
        for trial in 0..4 {
            let a = if trial % 2 == 0 { Complex64::ZERO } else { rand_c(&mut rng, 1.0) };
            let target = Target::Mobius {
                a,
                b: rand_c(&mut rng, 1.0),
                c: rand_c(&mut rng, 1.0),
                d: rand_c(&mut rng, 1.0),
            };
            let spec = MapSpec::stirling(target).unwrap();
            assert_symbolic_matches_pointwise(&spec, &mut rng, 1.5);
            assert_symbolic_matches_pointwise(&spec.with_method(Method::Newton), &mut rng, 1.5);
        }
        let spec = MapSpec::stirling(Target::Unicritical {
            lambda: c64(0.8, -0.2),
            alpha: c64(0.1, 0.3),
            beta: c64(-1.0, 0.5),
        })
        .unwrap();
        assert_symbolic_matches_pointwise(&spec, &mut rng, 2.0);
    }

    #[test]
    fn degree_law_for_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            for _ in 0..10 {
                let p = rand_poly(&mut rng, n);
                let st = build_stirling_polynomial(&p).unwrap();
                assert_eq!(st.degree(), n * n - n + 1);
            }
        }
    }
}
