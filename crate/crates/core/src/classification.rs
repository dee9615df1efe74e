//! Fixed points, critical points and the Fatou component bookkeeping of an
//! iteration map.

use std::fmt;

use num_complex::Complex64;

use crate::iterators::{Displacement, MapSpec, Method, Target};
use crate::polynomial::{cmp_complex, Poly, Root, RootSet, CLUSTER_RADIUS};
use crate::rational::{RationalMap, SpherePoint};
use crate::{Error, Result};

pub const SUPERATTRACTING_TOL: f64 = 1e-8;
pub const INDIFFERENT_TOL: f64 = 1e-8;
pub const ROOT_OF_UNITY_TOL: f64 = 1e-6;
pub const MAX_ROOT_OF_UNITY_ORDER: u32 = 64;
/// Relative distance under which a point counts as a zero of `f`.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedClass {
    Superattracting,
    Attracting,
    /// The multiplier is a primitive `q`-th root of unity.
    RationallyIndifferent { q: u32 },
    IndifferentUnresolved,
    Repelling,
}

impl FixedClass {
    pub fn from_multiplier(lambda: Complex64) -> FixedClass {
        let r = lambda.norm();
        if r < SUPERATTRACTING_TOL {
            FixedClass::Superattracting
        } else if r < 1.0 - INDIFFERENT_TOL {
            FixedClass::Attracting
        } else if (r - 1.0).abs() <= INDIFFERENT_TOL {
            let mut power = Complex64::ONE;
            for q in 1..=MAX_ROOT_OF_UNITY_ORDER {
                power *= lambda;
                if (power - 1.0).norm() < ROOT_OF_UNITY_TOL {
                    return FixedClass::RationallyIndifferent { q };
                }
            }
            FixedClass::IndifferentUnresolved
        } else {
            FixedClass::Repelling
        }
    }

    /// Superattracting or attracting.
    pub fn is_attracting(&self) -> bool {
        matches!(self, FixedClass::Superattracting | FixedClass::Attracting)
    }

    pub fn is_rationally_indifferent(&self) -> bool {
        matches!(self, FixedClass::RationallyIndifferent { .. })
    }

    pub fn is_indifferent(&self) -> bool {
        matches!(self, FixedClass::RationallyIndifferent { .. } | FixedClass::IndifferentUnresolved)
    }

    pub fn label(&self) -> &'static str {
        match self {
            FixedClass::Superattracting => "superattracting",
            FixedClass::Attracting => "attracting",
            FixedClass::RationallyIndifferent { .. } => "rationally_indifferent",
            FixedClass::IndifferentUnresolved => "indifferent_unresolved",
            FixedClass::Repelling => "repelling",
        }
    }
}

impl fmt::Display for FixedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedClass::RationallyIndifferent { q } => write!(f, "rationally_indifferent(q={q})"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointReport {
    pub location: SpherePoint,
    /// For infinity this is the multiplier in the chart `w = 1/z`.
    pub multiplier: Complex64,
    /// Multiplicity as a root of the fixed-point equation.
    pub multiplicity: usize,
    pub class: FixedClass,
    /// Fixed by the map without being a zero of `f`.
    pub extraneous: bool,
}

fn is_zero_of_f(z: Complex64, zeros: &[Complex64]) -> bool {
    zeros.iter().any(|r| (z - r).norm() <= MATCH_TOL * (1.0 + z.norm()))
}

/// All fixed points of `map` on the sphere, sorted by real then imaginary
/// part with infinity last. `zeros` are the zeros of the underlying `f` and
/// only decide the `extraneous` flag.
pub fn fixed_points(map: &RationalMap, zeros: &[Complex64]) -> Result<Vec<FixedPointReport>> {
    if map.is_constant() {
        return constant_fixed_point(map, zeros);
    }
    let equation = map.num() - &(&Poly::x() * map.den());
    if equation.is_zero() {
        return Err(Error::InvalidParameters("the identity map fixes every point".into()));
    }
    let mut reports = Vec::new();
    if equation.degree() > Some(0) {
        for root in equation.roots()?.roots {
            let multiplier = map.derivative_at(root.location)?;
            reports.push(finite_report(root, multiplier, zeros));
        }
    }
    finish_reports(map, reports)
}

/// A constant map `z -> c` fixes only `c`, with multiplier zero. Infinity is
/// fixed only when `c` is infinite.
fn constant_fixed_point(map: &RationalMap, zeros: &[Complex64]) -> Result<Vec<FixedPointReport>> {
    let location = map.eval(Complex64::ZERO)?;
    let extraneous = match location.finite() {
        Some(c) => !is_zero_of_f(c, zeros),
        None => true,
    };
    Ok(vec![FixedPointReport {
        location,
        multiplier: Complex64::ZERO,
        multiplicity: 1,
        class: FixedClass::Superattracting,
        extraneous,
    }])
}

/// Fixed points of a map given as `z - C/D`, read off the factors of `C`.
/// `map` must be the same map expanded; it supplies the point at infinity.
pub fn displaced_fixed_points(
    displacement: &Displacement,
    map: &RationalMap,
    zeros: &[Complex64],
) -> Result<Vec<FixedPointReport>> {
    if map.is_constant() {
        return constant_fixed_point(map, zeros);
    }
    let den_roots = roots_of_product(displacement.den_factors())?;
    let mut reports = Vec::new();
    for root in roots_of_product(displacement.factors())? {
        // A root shared with D is fixed only if C vanishes to higher order.
        let pole_order = den_roots
            .iter()
            .find(|d| close(d.location, root.location))
            .map_or(0, |d| d.multiplicity);
        if pole_order >= root.multiplicity {
            continue;
        }
        let multiplier = if pole_order == 0 {
            displacement.multiplier(root.location)?
        } else {
            map.derivative_at(root.location)?
        };
        let root = Root {
            location: root.location,
            multiplicity: root.multiplicity - pole_order,
        };
        reports.push(finite_report(root, multiplier, zeros));
    }
    finish_reports(map, reports)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= CLUSTER_RADIUS * (1.0 + a.norm())
}

/// Roots of a product of powers, with coincident roots of different factors
/// merged.
fn roots_of_product(factors: &[(Poly, usize)]) -> Result<Vec<Root>> {
    let mut out: Vec<Root> = Vec::new();
    for (factor, power) in factors {
        if factor.degree().unwrap_or(0) == 0 {
            continue;
        }
        for root in factor.roots()?.roots {
            match out.iter_mut().find(|r| close(r.location, root.location)) {
                Some(r) => r.multiplicity += root.multiplicity * power,
                None => out.push(Root {
                    location: root.location,
                    multiplicity: root.multiplicity * power,
                }),
            }
        }
    }
    Ok(out)
}

fn finite_report(root: Root, multiplier: Complex64, zeros: &[Complex64]) -> FixedPointReport {
    FixedPointReport {
        location: SpherePoint::Finite(root.location),
        multiplier,
        multiplicity: root.multiplicity,
        class: FixedClass::from_multiplier(multiplier),
        extraneous: !is_zero_of_f(root.location, zeros),
    }
}

fn finish_reports(map: &RationalMap, mut reports: Vec<FixedPointReport>) -> Result<Vec<FixedPointReport>> {
    reports.sort_by(|a, b| cmp_complex(&a.location.finite().unwrap(), &b.location.finite().unwrap()));
    if let Some(inf) = classify_infinity(map)? {
        reports.push(inf);
    }
    Ok(reports)
}

/// The fixed point at infinity, if there is one, analysed through
/// `G(w) = 1/F(1/w)`.
pub fn classify_infinity(map: &RationalMap) -> Result<Option<FixedPointReport>> {
    let g = map.conjugate_reciprocal()?;
    match g.eval(Complex64::ZERO)? {
        SpherePoint::Finite(v) if v == Complex64::ZERO => {}
        _ => return Ok(None),
    }
    let multiplier = g.derivative_at(Complex64::ZERO)?;
    let equation = g.num() - &(&Poly::x() * g.den());
    Ok(Some(FixedPointReport {
        location: SpherePoint::Infinity,
        multiplier,
        multiplicity: equation.trailing_zeros().max(1),
        class: FixedClass::from_multiplier(multiplier),
        extraneous: true,
    }))
}

/// Critical points of a rational map with multiplicity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriticalPoints {
    pub finite: Vec<Root>,
    /// Multiplicity of infinity as a critical point, zero if it is not one.
    pub at_infinity: usize,
    /// Largest `|W(c)|` over the finite ones, `W` the Wronskian.
    pub residual: f64,
}

impl CriticalPoints {
    /// Always `2d - 2` for a map of degree `d`.
    pub fn total(&self) -> usize {
        self.finite.iter().map(|r| r.multiplicity).sum::<usize>() + self.at_infinity
    }

    pub fn finite_count(&self) -> usize {
        self.finite.iter().map(|r| r.multiplicity).sum()
    }
}

/// Roots of the Wronskian `num' den - num den'`, which include the poles of
/// order `r >= 2` with multiplicity `r - 1`, plus the multiplicity of
/// infinity read off from its degree.
pub fn critical_points(map: &RationalMap) -> Result<CriticalPoints> {
    critical_points_from_wronskian(&map.wronskian(), map.degree())
}

/// Critical points of a degree `d` map from its Wronskian.
pub fn critical_points_from_wronskian(w: &Poly, d: usize) -> Result<CriticalPoints> {
    if d == 0 {
        return Ok(CriticalPoints {
            finite: Vec::new(),
            at_infinity: 0,
            residual: 0.0,
        });
    }
    let RootSet { roots, residual } = match w.degree() {
        Some(k) if k >= 1 => w.roots()?,
        _ => RootSet {
            roots: Vec::new(),
            residual: 0.0,
        },
    };
    let finite_degree = w.degree().unwrap_or(0);
    Ok(CriticalPoints {
        finite: roots,
        at_infinity: (2 * d - 2).saturating_sub(finite_degree),
        residual,
    })
}

/// Finite critical points that are not zeros of `f`.
pub fn free_critical_points(critical: &CriticalPoints, zeros: &[Complex64]) -> Vec<Root> {
    critical
        .finite
        .iter()
        .filter(|r| !is_zero_of_f(r.location, zeros))
        .cloned()
        .collect()
}

/// Lower bounds on attracting and parabolic basins from the fixed points, and
/// the upper bound on Herman rings they leave in `2d - 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatouCensus {
    pub degree: usize,
    pub n_attracting_lower: usize,
    pub n_parabolic_lower: usize,
    pub herman_upper: usize,
    pub notes: Vec<String>,
}

pub fn herman_ring_bound(reports: &[FixedPointReport], degree: usize) -> FatouCensus {
    let n_attracting_lower = reports.iter().filter(|r| r.class.is_attracting()).count();
    let n_parabolic_lower = reports.iter().filter(|r| r.class.is_rationally_indifferent()).count();
    FatouCensus {
        degree,
        n_attracting_lower,
        n_parabolic_lower,
        herman_upper: herman_upper(degree, n_attracting_lower + n_parabolic_lower),
        notes: Vec::new(),
    }
}

fn herman_upper(degree: usize, used: usize) -> usize {
    (2 * degree).saturating_sub(2).saturating_sub(used) / 2
}

/// Everything the analysis report contains about one map.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub spec: MapSpec,
    pub map: RationalMap,
    pub zeros: Vec<Complex64>,
    pub fixed_points: Vec<FixedPointReport>,
    pub critical: CriticalPoints,
    pub free_critical: Vec<Root>,
    pub census: FatouCensus,
    pub notes: Vec<String>,
}

impl Analysis {
    pub fn degree(&self) -> usize {
        self.map.degree()
    }

    pub fn infinity(&self) -> Option<&FixedPointReport> {
        self.fixed_points.iter().find(|r| r.location.is_infinity())
    }

    pub fn extraneous(&self) -> impl Iterator<Item = &FixedPointReport> {
        self.fixed_points.iter().filter(|r| r.extraneous)
    }

    pub fn finite_extraneous(&self) -> impl Iterator<Item = &FixedPointReport> {
        self.extraneous().filter(|r| !r.location.is_infinity())
    }
}

pub fn analyze(spec: &MapSpec) -> Result<Analysis> {
    let displacement = spec.displacement()?;
    let map = displacement.to_map()?;
    let zeros = spec.target.zeros()?;
    let mut fixed = displaced_fixed_points(&displacement, &map, &zeros)?;
    // At zeros of f the pointwise formula avoids the expanded polynomials.
    for r in fixed.iter_mut().filter(|r| !r.extraneous) {
        if let Some(Ok(m)) = r.location.finite().map(|z| spec.multiplier_at(z)) {
            r.multiplier = m;
            r.class = FixedClass::from_multiplier(m);
        }
    }
    let critical = critical_points_from_wronskian(&displacement.wronskian(), map.degree())?;
    let free_critical = free_critical_points(&critical, &zeros);
    let mut census = herman_ring_bound(&fixed, map.degree());
    let mut notes = Vec::new();

    let common = map.common_root_audit()?;
    if !common.is_empty() {
        notes.push(format!(
            "numerator and denominator share {} approximate root(s); the map was not reduced there",
            common.len()
        ));
    }
    if map.is_constant() {
        notes.push("the map is constant, so every orbit lands on its single fixed point".into());
    } else if critical.total() != 2 * map.degree() - 2 {
        notes.push(format!(
            "critical point count {} differs from 2d - 2 = {}",
            critical.total(),
            2 * map.degree() - 2
        ));
    }
    match (&spec.target, spec.method) {
        (Target::Polynomial(_) | Target::Unicritical { .. }, Method::Stirling) => census.notes.push(
            "the Julia set of Stirling's map of a polynomial is connected, so no Herman rings exist; \
             this is cited, not computed"
                .into(),
        ),
        (Target::Mobius { a, .. }, Method::Stirling) if *a != Complex64::ZERO => {
            let alt = herman_upper(4, census.n_attracting_lower + census.n_parabolic_lower);
            census.notes.push(format!(
                "bound uses the computed degree {}; evaluating it with d = 4 instead gives {alt}",
                map.degree()
            ));
        }
        _ => {}
    }
    Ok(Analysis {
        spec: spec.clone(),
        map,
        zeros,
        fixed_points: fixed,
        critical,
        free_critical,
        census,
        notes,
    })
}
