//! Rational maps on the Riemann sphere.

use num_complex::Complex64;

use crate::polynomial::Poly;
use crate::{Error, Result};

/// A finite root of the denominator is flagged as a common root when the
/// numerator there is below this fraction of its coefficient scale.
pub const COMMON_ROOT_TOL: f64 = 1e-8;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// `1/z` with `1/0 = inf` and `1/inf = 0`.
    pub fn reciprocal(self) -> SpherePoint {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(Complex64::ZERO),
            SpherePoint::Finite(z) if z == Complex64::ZERO => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(safe_inv(z)),
        }
    }

    pub fn conj(self) -> SpherePoint {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Chordal distance on the sphere of diameter 1, so the result is in `[0, 1]`.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        match (*self, *other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                1.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

/// `1/z` without forming `|z|^2`, which overflows for `|z|` beyond about 1e154.
pub(crate) fn safe_inv(z: Complex64) -> Complex64 {
    let s = z.norm();
    (z / s).conj() / s
}

impl std::fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpherePoint::Finite(z) => std::fmt::Display::fmt(z, f),
            SpherePoint::Infinity => f.write_str("infinity"),
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

/// Affine map `a z + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub a: Complex64,
    pub b: Complex64,
}

impl Affine {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        if a == Complex64::ZERO {
            return Err(Error::DegenerateAffine);
        }
        Ok(Affine { a, b })
    }

    pub fn identity() -> Self {
        Affine {
            a: Complex64::ONE,
            b: Complex64::ZERO,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    pub fn inverse(&self) -> Affine {
        let inv = self.a.inv();
        Affine { a: inv, b: -self.b * inv }
    }

    pub fn as_poly(&self) -> Poly {
        Poly::linear(self.a, self.b)
    }
}

/// `num / den` with a monic denominator and no common power of `z`.
///
/// No polynomial GCD is taken: only exact monomial factors cancel.
/// [`RationalMap::common_root_audit`] reports approximate common roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
}

impl RationalMap {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameters("rational map with zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalMap { num, den: Poly::one() });
        }
        let k = num.trailing_zeros().min(den.trailing_zeros());
        let (num, den) = (num.shift_down(k), den.shift_down(k));
        let lead = den.leading().expect("nonzero").inv();
        Ok(RationalMap {
            num: num.scale(lead),
            den: den.scale(lead),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalMap::new(p, Poly::one()).expect("unit denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// `max(deg num, deg den)`; the zero map has degree 0.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, z: Complex64) -> Result<SpherePoint> {
        let n = self.num.eval(z);
        let d = self.den.eval(z);
        if !n.is_finite() || !d.is_finite() {
            return Ok(self.eval_far(z));
        }
        let num_floor = f64::EPSILON * self.num.abs_scale(z);
        let den_floor = f64::EPSILON * self.den.abs_scale(z);
        if d == Complex64::ZERO {
            return if n.norm() <= num_floor {
                Err(Error::Indeterminate { at: z })
            } else {
                Ok(SpherePoint::Infinity)
            };
        }
        if !self.num.is_zero() && n.norm() <= num_floor && d.norm() <= den_floor && self.den.degree() > Some(0) {
            return Err(Error::Indeterminate { at: z });
        }
        let q = n / d;
        Ok(if q.is_finite() { SpherePoint::Finite(q) } else { SpherePoint::Infinity })
    }

    // num(z)/den(z) = z^(dn-dd) * rev(num)(1/z) / rev(den)(1/z), for |z| so
    // large that direct Horner overflows.
    fn eval_far(&self, z: Complex64) -> SpherePoint {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let w = safe_inv(z);
        let ratio = self.num.reversed(dn).eval(w) / self.den.reversed(dd).eval(w);
        let shift = dn as i32 - dd as i32;
        let value = ratio * z.powi(shift);
        if value.is_finite() {
            SpherePoint::Finite(value)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn eval_sphere(&self, z: SpherePoint) -> Result<SpherePoint> {
        match z {
            SpherePoint::Finite(z) => self.eval(z),
            SpherePoint::Infinity => Ok(self.value_at_infinity()),
        }
    }

    pub fn value_at_infinity(&self) -> SpherePoint {
        if self.num.is_zero() {
            return SpherePoint::Finite(Complex64::ZERO);
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        match dn.cmp(&dd) {
            std::cmp::Ordering::Greater => SpherePoint::Infinity,
            std::cmp::Ordering::Less => SpherePoint::Finite(Complex64::ZERO),
            std::cmp::Ordering::Equal => SpherePoint::Finite(self.num.leading().unwrap() / self.den.leading().unwrap()),
        }
    }

    /// `F'(z)` by the quotient rule at a finite non-pole point.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        let (n, dn) = self.num.eval_with_derivative(z);
        let (d, dd) = self.den.eval_with_derivative(z);
        if d == Complex64::ZERO {
            return Err(Error::PoleEncountered { at: z });
        }
        Ok((dn * d - n * dd) / (d * d))
    }

    /// `num' den - num den'`, without cancelling anything: its roots are the
    /// finite critical points, a pole of order `r` counting `r - 1` times.
    pub fn wronskian(&self) -> Poly {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    pub fn derivative_map(&self) -> RationalMap {
        RationalMap::new(self.wronskian(), &self.den * &self.den).expect("nonzero denominator")
    }

    /// `G(w) = 1 / F(1/w)`, the map in the chart at infinity.
    pub fn conjugate_reciprocal(&self) -> Result<RationalMap> {
        if self.num.is_zero() {
            return Err(Error::InvalidParameters(
                "the zero map has no reciprocal chart representation".into(),
            ));
        }
        let d = self.degree();
        RationalMap::new(self.den.reversed(d), self.num.reversed(d))
    }

    /// `T o F o T^-1`.
    pub fn affine_conjugate(&self, t: &Affine) -> Result<RationalMap> {
        let t = Affine::new(t.a, t.b)?;
        let inv = t.inverse().as_poly();
        let num = self.num.compose(&inv);
        let den = self.den.compose(&inv);
        RationalMap::new(&num.scale(t.a) + &den.scale(t.b), den)
    }

    /// Roots of the denominator where the numerator is also (nearly) zero.
    pub fn common_root_audit(&self) -> Result<Vec<Complex64>> {
        if self.den.degree().unwrap_or(0) == 0 || self.num.is_zero() {
            return Ok(Vec::new());
        }
        let roots = self.den.roots()?;
        Ok(roots
            .locations()
            .filter(|&r| self.num.eval(r).norm() < COMMON_ROOT_TOL * self.num.abs_scale(r))
            .collect())
    }

    /// Same map up to coefficient noise (both sides are already normalized).
    pub fn approx_eq(&self, other: &RationalMap, tol: f64) -> bool {
        self.coefficient_distance(other) <= tol
    }

    pub fn coefficient_distance(&self, other: &RationalMap) -> f64 {
        self.num.relative_distance(&other.num).max(self.den.relative_distance(&other.den))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.num.is_real(tol) && self.den.is_real(tol)
    }

    pub fn max_imag(&self) -> f64 {
        self.num.max_imag().max(self.den.max_imag())
    }

    pub fn real_part(&self) -> RationalMap {
        RationalMap::new(self.num.real_part(), self.den.real_part()).expect("real part of monic denominator")
    }
}

/// `sum_j p_j n^j d^(h-j)`, i.e. `d^h * p(n/d)`, for `h >= deg p`.
pub(crate) fn homogenize(p: &Poly, n: &Poly, d: &Poly, h: usize) -> Poly {
    let Some(deg) = p.degree() else { return Poly::zero() };
    assert!(h >= deg, "homogenizing degree below polynomial degree");
    // Horner: acc_k = acc_{k+1} * n + p_k * d^(deg-k), then pad to h.
    let mut acc = Poly::constant(p.coeff(deg));
    let mut dpow = Poly::one();
    for k in (0..deg).rev() {
        dpow = &dpow * d;
        acc = &(&acc * n) + &dpow.scale(p.coeff(k));
    }
    if h > deg {
        acc = &acc * &d.pow((h - deg) as u32);
    }
    acc
}

/// `p(N/D)` as a rational map, `sum_j p_j N^j D^(m-j) / D^m` with `m = deg p`.
pub fn compose_poly_rational(p: &Poly, f: &RationalMap) -> RationalMap {
    let Some(m) = p.degree() else {
        return RationalMap::from_poly(Poly::zero());
    };
    let num = homogenize(p, f.num(), f.den(), m);
    RationalMap::new(num, f.den().pow(m as u32)).expect("nonzero denominator power")
}
