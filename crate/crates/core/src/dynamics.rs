//! Orbits, their fates, and whole grids of starting points.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classification::{Analysis, FixedClass, FixedPointReport};
use crate::rational::{RationalMap, SpherePoint};
use crate::render::BasinRaster;
use crate::{Error, Result};

/// Iteration budgets and capture thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budgets {
    pub max_iter: usize,
    pub eps_attract: f64,
    /// Consecutive iterates within `eps_attract` needed for capture.
    pub conv_window: usize,
    pub eps_par: f64,
    /// Consecutive non-increasing distances within `eps_par` needed for
    /// parabolic capture.
    pub par_window: usize,
    /// Budget multiplier applied when the table has a parabolic entry.
    pub parabolic_factor: usize,
    /// Beyond this modulus the map is evaluated in the chart `w = 1/z`.
    pub r_switch: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_iter: 200,
            eps_attract: 1e-8,
            conv_window: 3,
            eps_par: 1e-3,
            par_window: 20,
            parabolic_factor: 10,
            r_switch: 1e6,
        }
    }
}

impl Budgets {
    pub fn with_max_iter(max_iter: usize) -> Self {
        Budgets {
            max_iter,
            ..Budgets::default()
        }
    }

    pub fn with_eps_par(self, eps_par: f64) -> Self {
        Budgets { eps_par, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaptureKind {
    Attracting,
    Parabolic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Attractor {
    pub location: SpherePoint,
    pub class: FixedClass,
}

impl Attractor {
    pub fn kind(&self) -> CaptureKind {
        if self.class.is_attracting() {
            CaptureKind::Attracting
        } else {
            CaptureKind::Parabolic
        }
    }

    /// Euclidean distance for a finite attractor, and distance in the chart
    /// `w = 1/z` for infinity.
    fn distance_from(&self, z: SpherePoint) -> f64 {
        match (self.location, z) {
            (SpherePoint::Finite(a), SpherePoint::Finite(v)) => (v - a).norm(),
            (SpherePoint::Finite(_), SpherePoint::Infinity) => f64::INFINITY,
            (SpherePoint::Infinity, SpherePoint::Finite(v)) => {
                if v == Complex64::ZERO {
                    f64::INFINITY
                } else {
                    1.0 / v.norm()
                }
            }
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        }
    }
}

/// The fixed points orbits can be captured by, indexed in report order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttractorTable {
    entries: Vec<Attractor>,
}

impl AttractorTable {
    /// Fails if two entries are within `2 * min_separation` of each other on
    /// the sphere.
    pub fn new(entries: Vec<Attractor>, min_separation: f64) -> Result<Self> {
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if a.location.distance(&b.location) <= 2.0 * min_separation {
                    return Err(Error::InvalidParameters(format!(
                        "attractors {:?} and {:?} are not separated",
                        a.location, b.location
                    )));
                }
            }
        }
        Ok(AttractorTable { entries })
    }

    /// Attracting and rationally indifferent fixed points, in report order.
    pub fn from_reports(reports: &[FixedPointReport]) -> Self {
        let mut entries: Vec<Attractor> = Vec::new();
        for r in reports {
            if !(r.class.is_attracting() || r.class.is_rationally_indifferent()) {
                continue;
            }
            if entries.iter().any(|e| e.location.distance(&r.location) <= 2e-8) {
                continue;
            }
            entries.push(Attractor {
                location: r.location,
                class: r.class,
            });
        }
        AttractorTable { entries }
    }

    /// The table for an analysed map, made exactly closed under conjugation
    /// when the map has real coefficients.
    pub fn from_analysis(analysis: &Analysis) -> Self {
        let table = Self::from_reports(&analysis.fixed_points);
        if analysis.map.is_real(1e-12) {
            table.conjugation_closed()
        } else {
            table
        }
    }

    /// Snaps near-real entries onto the real axis and near-conjugate pairs onto
    /// exact conjugates, so conjugate orbits see identical distances.
    pub fn conjugation_closed(mut self) -> Self {
        const SNAP: f64 = 1e-6;
        for e in &mut self.entries {
            if let SpherePoint::Finite(z) = &mut e.location {
                if z.im.abs() <= SNAP * (1.0 + z.norm()) {
                    z.im = 0.0;
                }
            }
        }
        for i in 0..self.entries.len() {
            let SpherePoint::Finite(z) = self.entries[i].location else { continue };
            if z.im == 0.0 {
                continue;
            }
            for j in i + 1..self.entries.len() {
                if let SpherePoint::Finite(w) = self.entries[j].location {
                    if (w - z.conj()).norm() <= SNAP * (1.0 + z.norm()) {
                        self.entries[j].location = SpherePoint::Finite(z.conj());
                    }
                }
            }
        }
        self
    }

    pub fn entries(&self) -> &[Attractor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_parabolic(&self) -> bool {
        self.entries.iter().any(|e| e.kind() == CaptureKind::Parabolic)
    }

    pub fn contains_infinity(&self) -> bool {
        self.entries.iter().any(|e| e.location.is_infinity())
    }

    /// `sigma[i]` is the index of the conjugate of entry `i`, if the table is
    /// closed under conjugation.
    pub fn conjugation_permutation(&self) -> Option<Vec<usize>> {
        self.entries
            .iter()
            .map(|e| {
                let target = e.location.conj();
                self.entries.iter().position(|f| f.location == target)
            })
            .collect()
    }
}

/// How an orbit ended. Indices refer to the attractor table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Converged { attractor: usize, iterations: usize },
    Parabolic { attractor: usize, iterations: usize },
    EscapedToInfinity { iterations: usize },
    Undetermined,
}

impl Verdict {
    pub fn attractor(&self) -> Option<usize> {
        match self {
            Verdict::Converged { attractor, .. } | Verdict::Parabolic { attractor, .. } => Some(*attractor),
            _ => None,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Verdict::Converged { iterations, .. }
            | Verdict::Parabolic { iterations, .. }
            | Verdict::EscapedToInfinity { iterations } => *iterations,
            Verdict::Undetermined => 0,
        }
    }

    /// The same fate with the attractor index relabelled.
    pub fn relabel(self, sigma: &[usize]) -> Verdict {
        match self {
            Verdict::Converged { attractor, iterations } => Verdict::Converged {
                attractor: sigma[attractor],
                iterations,
            },
            Verdict::Parabolic { attractor, iterations } => Verdict::Parabolic {
                attractor: sigma[attractor],
                iterations,
            },
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult {
    /// Starts with the initial point.
    pub iterates: Vec<SpherePoint>,
    pub verdict: Verdict,
    /// Why the orbit is undetermined, when it stopped on an error.
    pub diagnostic: Option<String>,
}

/// A map prepared for repeated orbit runs.
pub struct Orbiter<'a> {
    map: &'a RationalMap,
    reciprocal: Option<RationalMap>,
    table: &'a AttractorTable,
    budgets: Budgets,
}

impl<'a> Orbiter<'a> {
    pub fn new(map: &'a RationalMap, table: &'a AttractorTable, budgets: Budgets) -> Self {
        Orbiter {
            map,
            reciprocal: map.conjugate_reciprocal().ok(),
            table,
            budgets,
        }
    }

    fn step(&self, z: SpherePoint) -> Result<SpherePoint> {
        match (z, &self.reciprocal) {
            (SpherePoint::Finite(v), _) if v.norm() <= self.budgets.r_switch => self.map.eval(v),
            (other, Some(g)) => Ok(g.eval(other.reciprocal().finite().unwrap())?.reciprocal()),
            (other, None) => self.map.eval_sphere(other),
        }
    }

    pub fn budget(&self) -> usize {
        let base = self.budgets.max_iter.max(1);
        if self.table.has_parabolic() {
            base * self.budgets.parabolic_factor
        } else {
            base
        }
    }

    pub fn fate(&self, z0: SpherePoint) -> Verdict {
        self.run(z0, None).0
    }

    pub fn trace(&self, z0: SpherePoint) -> OrbitResult {
        let mut iterates = Vec::new();
        let (verdict, diagnostic) = self.run(z0, Some(&mut iterates));
        OrbitResult {
            iterates,
            verdict,
            diagnostic,
        }
    }

    fn run(&self, z0: SpherePoint, mut record: Option<&mut Vec<SpherePoint>>) -> (Verdict, Option<String>) {
        let b = &self.budgets;
        let entries = self.table.entries();
        let mut close_run = vec![0usize; entries.len()];
        let mut par_run = vec![0usize; entries.len()];
        let mut par_last = vec![f64::INFINITY; entries.len()];
        let mut escape_run = 0usize;
        let watch_escape = !self.table.contains_infinity();
        let escape_radius = 1.0 / b.eps_attract;
        let budget = self.budget();

        let mut z = z0;
        for k in 0..=budget {
            if let Some(out) = record.as_deref_mut() {
                out.push(z);
            }
            for (i, e) in entries.iter().enumerate() {
                let d = e.distance_from(z);
                match e.kind() {
                    CaptureKind::Attracting => {
                        close_run[i] = if d < b.eps_attract { close_run[i] + 1 } else { 0 };
                        if close_run[i] >= b.conv_window {
                            let iterations = k + 1 - b.conv_window;
                            return (Verdict::Converged { attractor: i, iterations }, None);
                        }
                    }
                    CaptureKind::Parabolic => {
                        par_run[i] = match (d < b.eps_par, d <= par_last[i]) {
                            (true, true) => par_run[i] + 1,
                            (true, false) => 1,
                            (false, _) => 0,
                        };
                        par_last[i] = d;
                        if par_run[i] >= b.par_window {
                            let iterations = k + 1 - b.par_window;
                            return (Verdict::Parabolic { attractor: i, iterations }, None);
                        }
                    }
                }
            }
            if watch_escape {
                let far = match z {
                    SpherePoint::Infinity => true,
                    SpherePoint::Finite(v) => v.norm() > escape_radius,
                };
                escape_run = if far { escape_run + 1 } else { 0 };
                if escape_run >= b.conv_window {
                    let iterations = k + 1 - b.conv_window;
                    return (Verdict::EscapedToInfinity { iterations }, None);
                }
            }
            if k == budget {
                break;
            }
            z = match self.step(z) {
                Ok(SpherePoint::Finite(v)) if !v.is_finite() => {
                    return (Verdict::Undetermined, Some(format!("non-finite iterate after step {k}")));
                }
                Ok(next) => next,
                Err(e) => return (Verdict::Undetermined, Some(format!("step {k}: {e}"))),
            };
        }
        (Verdict::Undetermined, None)
    }
}

/// Follows one orbit, recording every iterate.
pub fn iterate_orbit(map: &RationalMap, z0: SpherePoint, table: &AttractorTable, budgets: Budgets) -> OrbitResult {
    Orbiter::new(map, table, budgets).trace(z0)
}

/// A rectangle of the plane given by its centre and real extent; the
/// imaginary extent follows from the pixel aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
}

impl Viewport {
    pub fn new(center: Complex64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameters(format!("viewport width must be positive, got {width}")));
        }
        Ok(Viewport { center, width })
    }

    /// Centre of pixel `(col, row)`, row 0 on top. Offsets are measured from
    /// the middle of the grid so rows `r` and `h - 1 - r` get exactly opposite
    /// imaginary offsets.
    pub fn pixel_center(&self, col: usize, row: usize, w: usize, h: usize) -> Complex64 {
        let step = self.width / w as f64;
        let dx = (col as f64 - (w as f64 - 1.0) / 2.0) * step;
        let dy = ((h as f64 - 1.0) / 2.0 - row as f64) * step;
        Complex64::new(self.center.re + dx, self.center.im + dy)
    }
}

/// The fate of every pixel centre; rows are evaluated in parallel and the
/// result does not depend on scheduling.
pub fn classify_grid(
    map: &RationalMap,
    table: &AttractorTable,
    viewport: Viewport,
    width: usize,
    height: usize,
    budgets: Budgets,
) -> BasinRaster {
    let orbiter = Orbiter::new(map, table, budgets);
    let mut fates = vec![Verdict::Undetermined; width * height];
    fates.par_chunks_mut(width.max(1)).enumerate().for_each(|(row, out)| {
        for (col, slot) in out.iter_mut().enumerate() {
            let z = viewport.pixel_center(col, row, width, height);
            *slot = orbiter.fate(SpherePoint::Finite(z));
        }
    });
    BasinRaster::new(width, height, fates, viewport, orbiter.budget())
}
