//! Dense complex-coefficient polynomials and simultaneous root finding.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Trailing coefficients at or below this fraction of the largest coefficient are dropped.
pub const TRIM_TOL: f64 = 1e-12;
/// Accepted root residual, relative to `sum |a_i| |z|^i`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;
/// Approximate roots closer than this (scaled by `1 + |z|`) are always merged.
pub const CLUSTER_RADIUS: f64 = 1e-6;

const MAX_SWEEPS: usize = 500;
const STEP_TOL: f64 = 1e-13;
const JITTER_SEED: u64 = 0x5717_2b1e;
// Wider clusters are merged only when the Taylor expansion at the refined
// centre vanishes to the cluster's order.
const MULTIPLICITY_LINK: f64 = 1e-2;
const MULTIPLICITY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Polynomial with complex coefficients, `coeffs[i]` multiplying `z^i`.
///
/// The zero polynomial has no coefficients. Every constructor and ring
/// operation trims negligible leading coefficients, so the last stored
/// coefficient is always the (nonzero) leading one.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let scale = max_abs(&coeffs);
        Self::trimmed(coeffs, scale)
    }

    /// Builds from coefficients and trims relative to an explicit magnitude,
    /// used where the result of a cancellation should be judged against the
    /// size of the operands.
    pub fn trimmed(mut coeffs: Vec<Complex64>, scale: f64) -> Self {
        let cutoff = TRIM_TOL * scale;
        while let Some(last) = coeffs.last() {
            if *last == Complex64::ZERO || last.norm() <= cutoff {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| c64(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn x() -> Self {
        Self::new(vec![Complex64::ZERO, Complex64::ONE])
    }

    /// `a * z + b`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![b, a])
    }

    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::ZERO; k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| &acc * &Self::linear(Complex64::ONE, -r))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(Complex64::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::ZERO, |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::ZERO;
        let mut dp = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |a_i| |z|^i`, the natural size of rounding errors in `eval(z)`.
    pub fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * lambda).collect())
    }

    pub fn derivative(&self) -> Self {
        self.nth_derivative(1)
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(i, &c)| {
                let falling: f64 = ((i - k + 1)..=i).map(|m| m as f64).product();
                c * falling
            })
            .collect();
        Self::new(coeffs)
    }

    /// `self(q(z))`, by Horner's scheme in the polynomial ring.
    pub fn compose(&self, q: &Poly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| &(&acc * q) + &Poly::constant(c))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Taylor coefficients at `c`: entry `j` is `p^(j)(c) / j!`.
    pub fn taylor_at(&self, c: Complex64) -> Vec<Complex64> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for k in 0..n.saturating_sub(1) {
            for i in (k..n - 1).rev() {
                let carry = c * b[i + 1];
                b[i] += carry;
            }
        }
        b
    }

    /// Number of exactly zero low-order coefficients, i.e. the power of `z`
    /// dividing the polynomial.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| **c == Complex64::ZERO)
            .count()
            .min(self.coeffs.len().saturating_sub(1))
    }

    /// Divides by `z^k`, discarding the `k` lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Complex64::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    /// `w^d * p(1/w)`; requires `d >= deg p`.
    pub fn reversed(&self, d: usize) -> Self {
        let mut v = vec![Complex64::ZERO; d + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[d - i] = c;
        }
        Self::new(v)
    }

    /// Coefficient-wise closeness: `max |a_i - b_i| <= tol * max(|a|, |b|)`.
    pub fn approx_eq(&self, other: &Poly, tol: f64) -> bool {
        self.relative_distance(other) <= tol
    }

    /// Largest coefficient difference relative to the larger coefficient
    /// scale of the two.
    pub fn relative_distance(&self, other: &Poly) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|i| (self.coeff(i) - other.coeff(i)).norm()).fold(0.0, f64::max) / scale
    }

    /// True when every coefficient's imaginary part is below `tol` relative
    /// to the largest coefficient.
    pub fn is_real(&self, tol: f64) -> bool {
        let cutoff = tol * self.max_abs().max(f64::MIN_POSITIVE);
        self.coeffs.iter().all(|c| c.im.abs() <= cutoff)
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c64(c.re, 0.0)).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// All roots with multiplicities.
    ///
    /// Aberth–Ehrlich iteration from a jittered circle enclosing every root,
    /// Newton polishing, then clustering of approximate roots into multiple
    /// roots. Powers of `z` are factored out exactly first.
    pub fn roots(&self) -> Result<RootSet> {
        let degree = self
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidParameters("root finding needs degree >= 1".into()))?;
        let at_origin = self.trailing_zeros();
        let reduced = self.shift_down(at_origin);

        let mut roots = Vec::new();
        let mut sweeps = 0;
        if reduced.degree().unwrap_or(0) >= 1 {
            let (approx, used) = aberth(&reduced);
            sweeps = used;
            let polished: Vec<_> = approx.into_iter().map(|z| newton_polish(&reduced, z)).collect();
            roots = cluster_roots(&reduced, &polished);
        }
        if at_origin > 0 {
            roots.push(Root {
                location: Complex64::ZERO,
                multiplicity: at_origin,
            });
        }
        roots.sort_by(|a, b| cmp_complex(&a.location, &b.location));
        debug_assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), degree);

        let mut residual: f64 = 0.0;
        for r in &roots {
            let value = self.eval(r.location).norm();
            residual = residual.max(value);
            // Written so that a NaN residual also fails.
            let accepted = value <= ROOT_RESIDUAL_TOL * self.abs_scale(r.location);
            if !accepted {
                return Err(Error::NonConvergence {
                    iterations: sweeps,
                    residual: value,
                });
            }
        }
        Ok(RootSet { roots, residual })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Roots of a polynomial, sorted by real then imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest `|p(root)|` over the reported locations.
    pub residual: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn locations(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().map(|r| r.location)
    }

    /// Root locations repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity))
            .collect()
    }
}

pub(crate) fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn max_abs(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn aberth(p: &Poly) -> (Vec<Complex64>, usize) {
    let n = p.degree().expect("nonzero polynomial");
    let a = p.coeffs();
    let lead = a[n];
    if n == 1 {
        return (vec![-a[0] / lead], 0);
    }
    let mut z = initial_guesses(a);
    let mut done = vec![false; n];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (value, slope) = p.eval_with_derivative(z[i]);
            if value == Complex64::ZERO {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| z[i] - z[j])
                .filter(|d| *d != Complex64::ZERO)
                .map(|d| d.inv())
                .sum();
            // Aberth correction w / (1 - w S) with w = p/p', written to stay
            // finite when p' vanishes.
            let denom = slope - value * repulsion;
            let step = value / denom;
            if !step.is_finite() {
                let nudge = Complex64::from_polar(1e-8 * (1.0 + z[i].norm()), i as f64);
                z[i] += nudge;
                all_done = false;
                continue;
            }
            z[i] -= step;
            if step.norm() < STEP_TOL * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    (z, sweeps)
}

/// Starting points on circles read off the upper convex hull of
/// `(i, log |a_i|)`: each hull edge from `i` to `j` puts `j - i` points on a
/// circle of radius `|a_i / a_j|^(1 / (j - i))`. Coefficient ranges spanning
/// many orders of magnitude get starting points near every root scale this
/// way, where a single enclosing circle leaves the small roots unresolved.
fn initial_guesses(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let points: Vec<(usize, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (o, m) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (m.0 as f64 - o.0 as f64) * (pt.1 - o.1) - (m.1 - o.1) * (pt.0 as f64 - o.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    let mut z = Vec::with_capacity(n);
    for edge in hull.windows(2) {
        let ((i, li), (j, lj)) = (edge[0], edge[1]);
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        let offset: f64 = rng.random_range(0.0..TAU);
        for k in 0..count {
            let jitter: f64 = rng.random_range(-0.2..0.2);
            let angle = offset + TAU * (k as f64 + 0.25 + jitter) / count as f64;
            z.push(Complex64::from_polar(radius, angle));
        }
    }
    debug_assert_eq!(z.len(), n);
    z
}

fn newton_polish(p: &Poly, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = p.eval(z).norm();
    for _ in 0..8 {
        if best == 0.0 {
            break;
        }
        let (value, slope) = p.eval_with_derivative(z);
        let candidate = z - value / slope;
        if !candidate.is_finite() {
            break;
        }
        let size = p.eval(candidate).norm();
        if size < best {
            z = candidate;
            best = size;
        } else {
            break;
        }
    }
    z
}

struct Cluster {
    members: Vec<Complex64>,
    center: Complex64,
}

/// Agglomerates approximate roots: pairs within `CLUSTER_RADIUS` always merge;
/// pairs within `MULTIPLICITY_LINK` merge when the merged cluster passes the
/// Taylor-coefficient multiplicity test.
fn cluster_roots(p: &Poly, approx: &[Complex64]) -> Vec<Root> {
    let mut clusters: Vec<Option<Cluster>> = approx
        .iter()
        .map(|&z| {
            Some(Cluster {
                members: vec![z],
                center: z,
            })
        })
        .collect();
    let mut rejected: HashSet<(usize, usize)> = HashSet::new();

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            let Some(ci) = &clusters[i] else { continue };
            for (j, cj) in clusters.iter().enumerate().skip(i + 1) {
                let Some(cj) = cj else { continue };
                if rejected.contains(&(i, j)) {
                    continue;
                }
                let size = 1.0 + ci.center.norm().max(cj.center.norm());
                let d = (ci.center - cj.center).norm() / size;
                if d < MULTIPLICITY_LINK && best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((d, i, j)) = best else { break };

        let mut members = clusters[i].as_ref().unwrap().members.clone();
        members.extend_from_slice(&clusters[j].as_ref().unwrap().members);
        let center = refine_center(p, &members);
        if d < CLUSTER_RADIUS || is_multiple_root(p, center, members.len()) {
            clusters[i] = Some(Cluster { members, center });
            clusters[j] = None;
            rejected.retain(|&(a, b)| a != i && b != i && a != j && b != j);
        } else {
            rejected.insert((i, j));
        }
    }

    clusters
        .into_iter()
        .flatten()
        .map(|c| Root {
            location: c.center,
            multiplicity: c.members.len(),
        })
        .collect()
}

/// Mean of the cluster, sharpened by Newton's method on `p^(k-1)`, which has
/// a simple root at a root of multiplicity `k`.
fn refine_center(p: &Poly, members: &[Complex64]) -> Complex64 {
    let k = members.len();
    let mean = members.iter().sum::<Complex64>() / k as f64;
    let spread = members.iter().map(|m| (m - mean).norm()).fold(0.0, f64::max);
    let fence = 10.0 * spread + 1e-12 * (1.0 + mean.norm());
    let dp = p.nth_derivative(k - 1);
    let mut z = mean;
    for _ in 0..30 {
        let (value, slope) = dp.eval_with_derivative(z);
        if value == Complex64::ZERO {
            break;
        }
        let step = value / slope;
        let candidate = z - step;
        if !candidate.is_finite() || (candidate - mean).norm() > fence {
            break;
        }
        z = candidate;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn is_multiple_root(p: &Poly, center: Complex64, k: usize) -> bool {
    let t = p.taylor_at(center);
    let abs_poly = Poly::new(p.coeffs().iter().map(|c| c64(c.norm(), 0.0)).collect());
    let bound = abs_poly.taylor_at(c64(center.norm(), 0.0));
    (0..k).all(|j| t[j].norm() <= MULTIPLICITY_TOL * bound[j].norm())
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::trimmed(v, self.max_abs().max(rhs.max_abs()))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::trimmed(v, self.max_abs().max(rhs.max_abs()))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Complex64::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { (&self).$m(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly { (&self).$m(rhs) }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
