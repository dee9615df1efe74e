//! JSON documents: map specifications in, analysis and verification reports out.
//!
//! Complex numbers are `[re, im]` pairs. Report numbers are written with 17
//! significant digits so they parse back to the same `f64`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::classification::{Analysis, FixedClass};
use crate::dynamics::{AttractorTable, OrbitResult, Verdict};
use crate::iterators::{MapSpec, Method, Target};
use crate::polynomial::{Poly, Root};
use crate::rational::SpherePoint;
use crate::verify::VerificationReport;
use crate::{Error, Result};

/// An `f64` serialized as `d.dddddddddddddddde±x`, or `null` when not finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

pub type ComplexJson = [Real; 2];

fn complex_json(z: Complex64) -> ComplexJson {
    [Real(z.re), Real(z.im)]
}

fn from_complex_json(z: &ComplexJson) -> Complex64 {
    Complex64::new(z[0].0, z[1].0)
}

/// A point of the sphere: `[re, im]` or the string `"infinity"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocationJson {
    Finite(ComplexJson),
    Infinity(String),
}

impl From<SpherePoint> for LocationJson {
    fn from(p: SpherePoint) -> Self {
        match p {
            SpherePoint::Finite(z) => LocationJson::Finite(complex_json(z)),
            SpherePoint::Infinity => LocationJson::Infinity("infinity".into()),
        }
    }
}

impl LocationJson {
    pub fn to_sphere(&self) -> Result<SpherePoint> {
        match self {
            LocationJson::Finite(z) => Ok(SpherePoint::Finite(from_complex_json(z))),
            LocationJson::Infinity(s) if s == "infinity" => Ok(SpherePoint::Infinity),
            LocationJson::Infinity(s) => Err(Error::Spec(format!("unknown location {s:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Map specification files

/// On-disk form of a [`MapSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpecFile {
    #[serde(flatten)]
    pub target: TargetFile,
    #[serde(default)]
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetFile {
    Polynomial {
        coefficients: Vec<[f64; 2]>,
    },
    Rational {
        num: Vec<[f64; 2]>,
        den: Vec<[f64; 2]>,
    },
    Mobius {
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        d: [f64; 2],
    },
    Unicritical {
        lambda: [f64; 2],
        alpha: [f64; 2],
        beta: [f64; 2],
    },
}

fn c(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn poly(v: &[[f64; 2]]) -> Poly {
    Poly::new(v.iter().map(|&z| c(z)).collect())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl MapSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<MapSpec> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)?.to_spec()
    }

    /// Validates and converts into a [`MapSpec`].
    pub fn to_spec(&self) -> Result<MapSpec> {
        let target = match &self.target {
            TargetFile::Polynomial { coefficients } => Target::Polynomial(poly(coefficients)),
            TargetFile::Rational { num, den } => Target::Rational {
                num: poly(num),
                den: poly(den),
            },
            TargetFile::Mobius { a, b, c: cc, d } => Target::Mobius {
                a: c(*a),
                b: c(*b),
                c: c(*cc),
                d: c(*d),
            },
            TargetFile::Unicritical { lambda, alpha, beta } => Target::Unicritical {
                lambda: c(*lambda),
                alpha: c(*alpha),
                beta: c(*beta),
            },
        };
        MapSpec::new(target, self.method)
    }

    pub fn from_spec(spec: &MapSpec) -> Self {
        let coeffs = |p: &Poly| p.coeffs().iter().map(|&z| pair(z)).collect();
        let target = match &spec.target {
            Target::Polynomial(p) => TargetFile::Polynomial { coefficients: coeffs(p) },
            Target::Rational { num, den } => TargetFile::Rational {
                num: coeffs(num),
                den: coeffs(den),
            },
            Target::Mobius { a, b, c, d } => TargetFile::Mobius {
                a: pair(*a),
                b: pair(*b),
                c: pair(*c),
                d: pair(*d),
            },
            Target::Unicritical { lambda, alpha, beta } => TargetFile::Unicritical {
                lambda: pair(*lambda),
                alpha: pair(*alpha),
                beta: pair(*beta),
            },
        };
        MapSpecFile {
            target,
            method: spec.method,
        }
    }
}

// ---------------------------------------------------------------------------
// Analysis report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub num: Vec<ComplexJson>,
    pub den: Vec<ComplexJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointJson {
    pub location: LocationJson,
    pub multiplier: ComplexJson,
    pub abs_multiplier: Real,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub multiplicity: usize,
    pub extraneous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub location: ComplexJson,
    pub multiplicity: usize,
}

impl From<&Root> for RootJson {
    fn from(r: &Root) -> Self {
        RootJson {
            location: complex_json(r.location),
            multiplicity: r.multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalJson {
    pub finite: Vec<RootJson>,
    pub at_infinity: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusJson {
    pub degree: usize,
    #[serde(rename = "n_AB_lower")]
    pub n_attracting_lower: usize,
    #[serde(rename = "n_PB_lower")]
    pub n_parabolic_lower: usize,
    pub herman_upper: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorJson {
    pub index: usize,
    pub location: LocationJson,
    pub class: String,
}

/// Attractor entries in table order; this is also the render legend order.
pub fn attractor_legend(table: &AttractorTable) -> Vec<AttractorJson> {
    table
        .entries()
        .iter()
        .enumerate()
        .map(|(index, e)| AttractorJson {
            index,
            location: e.location.into(),
            class: e.class.to_string(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: MapSpecFile,
    pub map: MapJson,
    pub degree: usize,
    pub zeros: Vec<ComplexJson>,
    pub fixed_points: Vec<FixedPointJson>,
    pub critical_points: CriticalJson,
    pub free_critical_points: Vec<RootJson>,
    pub fatou_census: CensusJson,
    pub attractors: Vec<AttractorJson>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn new(analysis: &Analysis) -> Self {
        let coeffs = |p: &Poly| p.coeffs().iter().map(|&z| complex_json(z)).collect();
        let fixed_points = analysis
            .fixed_points
            .iter()
            .map(|r| FixedPointJson {
                location: r.location.into(),
                multiplier: complex_json(r.multiplier),
                abs_multiplier: Real(r.multiplier.norm()),
                class: r.class.label().to_string(),
                q: match r.class {
                    FixedClass::RationallyIndifferent { q } => Some(q),
                    _ => None,
                },
                multiplicity: r.multiplicity,
                extraneous: r.extraneous,
            })
            .collect();
        let census = &analysis.census;
        AnalysisReport {
            spec: MapSpecFile::from_spec(&analysis.spec),
            map: MapJson {
                num: coeffs(analysis.map.num()),
                den: coeffs(analysis.map.den()),
            },
            degree: analysis.degree(),
            zeros: analysis.zeros.iter().map(|&z| complex_json(z)).collect(),
            fixed_points,
            critical_points: CriticalJson {
                finite: analysis.critical.finite.iter().map(RootJson::from).collect(),
                at_infinity: analysis.critical.at_infinity,
                total: analysis.critical.total(),
            },
            free_critical_points: analysis.free_critical.iter().map(RootJson::from).collect(),
            fatou_census: CensusJson {
                degree: census.degree,
                n_attracting_lower: census.n_attracting_lower,
                n_parabolic_lower: census.n_parabolic_lower,
                herman_upper: census.herman_upper,
                notes: census.notes.clone(),
            },
            attractors: attractor_legend(&AttractorTable::from_analysis(analysis)),
            notes: analysis.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Orbits and verification

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitStepJson {
    pub index: usize,
    pub location: LocationJson,
    /// Distance from the previous iterate, `null` for the start or across infinity.
    pub step: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub iterates: Vec<OrbitStepJson>,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attractor: Option<usize>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

pub fn verdict_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::Converged { .. } => "converged",
        Verdict::Parabolic { .. } => "parabolic",
        Verdict::EscapedToInfinity { .. } => "escaped_to_infinity",
        Verdict::Undetermined => "undetermined",
    }
}

/// Iterate index, location and step length for each point of an orbit.
pub fn orbit_steps(orbit: &OrbitResult) -> Vec<(usize, SpherePoint, Option<f64>)> {
    let mut prev: Option<SpherePoint> = None;
    orbit
        .iterates
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let step = match (prev, z) {
                (Some(SpherePoint::Finite(a)), SpherePoint::Finite(b)) => Some((b - a).norm()),
                _ => None,
            };
            prev = Some(z);
            (k, z, step)
        })
        .collect()
}

impl From<&OrbitResult> for OrbitJson {
    fn from(orbit: &OrbitResult) -> Self {
        OrbitJson {
            iterates: orbit_steps(orbit)
                .into_iter()
                .map(|(index, z, step)| OrbitStepJson {
                    index,
                    location: z.into(),
                    step: Real(step.unwrap_or(f64::NAN)),
                })
                .collect(),
            verdict: verdict_label(&orbit.verdict).to_string(),
            attractor: orbit.verdict.attractor(),
            iterations: orbit.verdict.iterations(),
            diagnostic: orbit.diagnostic.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub input: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: Real,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub check: String,
    pub verdict: String,
    pub witnesses: Vec<WitnessJson>,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        VerificationJson {
            check: r.check.clone(),
            verdict: if r.passed { "pass" } else { "fail" }.into(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    input: w.input.clone(),
                    expected: w.expected.clone(),
                    observed: w.observed.clone(),
                    tolerance: Real(w.tolerance),
                    ok: w.ok,
                })
                .collect(),
        }
    }
}
