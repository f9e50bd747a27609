//! Seeded sampling, per-property classification, identity suites and the
//! implication audit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charts::{axiom_report_for_frame, evaluate_frame, StructuredChart};
use crate::curvature::CurvatureFrame;
use crate::error::{Error, Result};
use crate::identities::{evaluate_suite, PointData, Suite, Tier, IDENTITIES};
use crate::levi_civita::Geometry;

pub const DEFAULT_COUNT: usize = 32;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    AlmostParacontactMetric,
    Paracontact,
    SParacontact,
    EtaClosed,
    XiGeodesic,
    Normal,
    N2Zero,
    N3Zero,
    N4Zero,
    ParaSasakian,
    Flat,
    ConstantCurvatureMinusEps,
    Symmetric,
    SemiSymmetric,
    RicciSymmetric,
    RicciSemisymmetric,
    EinsteinPs,
    EinsteinGeneral,
}

impl Property {
    pub const ALL: [Property; 18] = [
        Property::AlmostParacontactMetric,
        Property::Paracontact,
        Property::SParacontact,
        Property::EtaClosed,
        Property::XiGeodesic,
        Property::Normal,
        Property::N2Zero,
        Property::N3Zero,
        Property::N4Zero,
        Property::ParaSasakian,
        Property::Flat,
        Property::ConstantCurvatureMinusEps,
        Property::Symmetric,
        Property::SemiSymmetric,
        Property::RicciSymmetric,
        Property::RicciSemisymmetric,
        Property::EinsteinPs,
        Property::EinsteinGeneral,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Property::AlmostParacontactMetric => "almost_paracontact_metric",
            Property::Paracontact => "paracontact",
            Property::SParacontact => "s_paracontact",
            Property::EtaClosed => "eta_closed",
            Property::XiGeodesic => "xi_geodesic",
            Property::Normal => "normal",
            Property::N2Zero => "n2_zero",
            Property::N3Zero => "n3_zero",
            Property::N4Zero => "n4_zero",
            Property::ParaSasakian => "para_sasakian",
            Property::Flat => "flat",
            Property::ConstantCurvatureMinusEps => "constant_curvature_minus_eps",
            Property::Symmetric => "symmetric",
            Property::SemiSymmetric => "semi_symmetric",
            Property::RicciSymmetric => "ricci_symmetric",
            Property::RicciSemisymmetric => "ricci_semisymmetric",
            Property::EinsteinPs => "einstein_ps",
            Property::EinsteinGeneral => "einstein_general",
        }
    }

    pub fn from_id(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.id() == s)
    }

    /// Column of this property in `ClassificationReport::residuals`.
    pub fn position(self) -> usize {
        Property::ALL.iter().position(|p| *p == self).expect("listed")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Mixed,
}

impl Status {
    pub fn id(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Mixed => "mixed",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        [Status::Holds, Status::Fails, Status::Mixed].into_iter().find(|s| s.id() == id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyStatus {
    pub property: Property,
    pub status: Status,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub tol_used: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub suite: Suite,
    pub identity: &'static str,
    pub tier: Tier,
    pub applicable: bool,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditFinding {
    pub implication: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
    pub domain: Vec<[f64; 2]>,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub chart: String,
    pub epsilon: i32,
    pub samples: SampleSpec,
    /// Metric index → number of sample points; degenerate eigenvalue tests
    /// are counted under "degenerate".
    pub index_histogram: BTreeMap<String, usize>,
    pub properties: Vec<PropertyStatus>,
    pub identities: Vec<IdentityRow>,
    pub audit: Vec<AuditFinding>,
    /// Accepted sample points.
    #[serde(skip)]
    pub points: Vec<Vec<f64>>,
    /// `residuals[p][k]`: residual of `Property::ALL[k]` at point p.
    #[serde(skip)]
    pub residuals: Vec<[f64; 18]>,
}

impl ClassificationReport {
    pub fn status(&self, p: Property) -> Status {
        self.property(p).status
    }

    pub fn property(&self, p: Property) -> &PropertyStatus {
        &self.properties[p.position()]
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityRow> {
        self.identities.iter().find(|r| r.identity == name)
    }

    /// Status of the pointwise conjunction of two properties.
    pub fn conjunction_status(&self, a: Property, b: Property) -> Status {
        let tol = self.samples.tol;
        status_of(self.residuals.iter().map(|r| r[a.position()].max(r[b.position()])), tol)
    }
}

/// Everything evaluated at one sample point.
pub struct PointEval {
    pub point: Vec<f64>,
    pub index: Option<usize>,
    pub residuals: [f64; 18],
    pub identities: Vec<f64>,
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn evaluate_point(chart: &StructuredChart, point: &[f64], tol: f64) -> Result<PointEval> {
    let frame = evaluate_frame(chart, point)?;
    let axioms = axiom_report_for_frame(&frame);
    let geo = Geometry::from_frame(frame);
    let normality = geo.normality_tensors();
    let structure = geo.structure_residuals();
    let curvature = CurvatureFrame::from_geometry(&geo);
    let class = curvature.classification_residuals();
    let n = chart.dim();
    let mut residuals = [0.0; 18];
    for p in Property::ALL {
        residuals[p.position()] = nan_to_inf(match p {
            Property::AlmostParacontactMetric => axioms.combined(n, tol.min(1e-9)),
            Property::Paracontact => structure.paracontact,
            Property::SParacontact => structure.s_paracontact,
            Property::EtaClosed => structure.eta_closed,
            Property::XiGeodesic => structure.xi_geodesic,
            Property::Normal => normality.n1_residual(),
            Property::N2Zero => normality.n2_residual(),
            Property::N3Zero => normality.n3_residual(),
            Property::N4Zero => normality.n4_residual(),
            Property::ParaSasakian => structure.para_sasakian,
            Property::Flat => class.flat,
            Property::ConstantCurvatureMinusEps => class.constant_curv_eps,
            Property::Symmetric => class.symmetric,
            Property::SemiSymmetric => class.semi_symmetric,
            Property::RicciSymmetric => class.ricci_symmetric,
            Property::RicciSemisymmetric => class.ricci_semisymmetric,
            Property::EinsteinPs => class.einstein_ps,
            Property::EinsteinGeneral => class.einstein_general,
        });
    }
    let data = PointData {
        geo: &geo,
        axioms: &axioms,
        normality: &normality,
        curvature: &curvature,
    };
    let identities = Suite::ALL
        .iter()
        .flat_map(|s| evaluate_suite(*s, &data))
        .map(nan_to_inf)
        .collect();
    Ok(PointEval {
        point: point.to_vec(),
        index: axioms.index,
        residuals,
        identities,
    })
}

/// Draws candidate points and evaluates them until `count` are accepted.
/// Degenerate or unevaluable points are skipped, up to `10 * count` draws.
pub fn sample_points(chart: &StructuredChart, count: usize, seed: u64, tol: f64) -> Result<(Vec<PointEval>, usize)> {
    if count == 0 {
        return Err(Error::InvalidChart("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = count.saturating_mul(10);
    let candidates: Vec<Vec<f64>> = (0..max_attempts)
        .map(|_| chart.domain().iter().map(|(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect())
        .collect();
    let mut accepted = Vec::with_capacity(count);
    let mut attempts = 0;
    for chunk in candidates.chunks(count) {
        let evals: Vec<Result<PointEval>> = chunk.par_iter().map(|p| evaluate_point(chart, p, tol)).collect();
        for e in evals {
            attempts += 1;
            match e {
                Ok(pe) => accepted.push(pe),
                Err(Error::DegenerateMetric { .. } | Error::Eval(_) | Error::Tensor(_)) => {}
                Err(other) => return Err(other),
            }
            if accepted.len() == count {
                return Ok((accepted, attempts));
            }
        }
    }
    Err(Error::InsufficientSamples {
        found: accepted.len(),
        wanted: count,
    })
}

fn status_of(values: impl Iterator<Item = f64>, tol: f64) -> Status {
    let (mut any_pass, mut any_fail) = (false, false);
    for v in values {
        if v <= tol {
            any_pass = true;
        } else {
            any_fail = true;
        }
    }
    match (any_pass, any_fail) {
        (true, false) => Status::Holds,
        (false, true) => Status::Fails,
        _ => Status::Mixed,
    }
}

/// Largest value and the index of its first occurrence.
fn worst(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in values.enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

pub fn classify_chart(chart: &StructuredChart, count: usize, seed: u64, tol: f64) -> Result<ClassificationReport> {
    let (evals, attempts) = sample_points(chart, count, seed, tol)?;
    Ok(build_report(chart, &evals, attempts, seed, tol))
}

fn build_report(chart: &StructuredChart, evals: &[PointEval], attempts: usize, seed: u64, tol: f64) -> ClassificationReport {
    let mut index_histogram = BTreeMap::new();
    for e in evals {
        let key = e.index.map_or_else(|| "degenerate".to_string(), |v| v.to_string());
        *index_histogram.entry(key).or_insert(0) += 1;
    }
    let properties: Vec<PropertyStatus> = Property::ALL
        .iter()
        .map(|p| {
            let k = p.position();
            let (max_residual, at) = worst(evals.iter().map(|e| e.residuals[k]));
            PropertyStatus {
                property: *p,
                status: status_of(evals.iter().map(|e| e.residuals[k]), tol),
                max_residual,
                worst_point: evals[at].point.clone(),
                tol_used: tol,
            }
        })
        .collect();
    let holds = |p: Property| properties[p.position()].status == Status::Holds;
    let identities = IDENTITIES
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let applicable = match d.tier {
                Tier::AnyChart => true,
                Tier::AlmostParacontactMetric => holds(Property::AlmostParacontactMetric),
                Tier::ParaSasakian => holds(Property::ParaSasakian),
                Tier::ConstantCurvature => holds(Property::ParaSasakian) && holds(Property::ConstantCurvatureMinusEps),
            };
            let (max_residual, at) = worst(evals.iter().map(|e| e.identities[k]));
            IdentityRow {
                suite: d.suite,
                identity: d.name,
                tier: d.tier,
                applicable,
                max_residual,
                worst_point: evals[at].point.clone(),
                passes: max_residual <= tol,
            }
        })
        .collect();
    let mut report = ClassificationReport {
        chart: chart.name().to_string(),
        epsilon: chart.epsilon().sign(),
        samples: SampleSpec {
            count: evals.len(),
            seed,
            tol,
            domain: chart.domain().iter().map(|(a, b)| [*a, *b]).collect(),
            attempts,
        },
        index_histogram,
        properties,
        identities,
        audit: Vec::new(),
        points: evals.iter().map(|e| e.point.clone()).collect(),
        residuals: evals.iter().map(|e| e.residuals).collect(),
    };
    report.audit = implication_audit(&report);
    report
}

/// Identity table over explicit points; tiers are decided from the
/// classification of those same points.
pub fn identity_suite(chart: &StructuredChart, points: &[Vec<f64>], tol: f64) -> Result<Vec<IdentityRow>> {
    if points.is_empty() {
        return Err(Error::InvalidChart("identity suite needs at least one point".into()));
    }
    let evals = points
        .par_iter()
        .map(|p| evaluate_point(chart, p, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(chart, &evals, evals.len(), 0, tol).identities)
}

/// Violations of the implications among statuses proved in the paper's
/// theorems. Problem-style open questions (normal ⟹ para-Sasakian?) are not
/// audited.
pub fn implication_audit(report: &ClassificationReport) -> Vec<AuditFinding> {
    use Property::*;
    let st = |p: Property| report.status(p);
    let mut out = Vec::new();
    let mut implies = |a: &[Property], b: Property| {
        if a.iter().all(|p| st(*p) == Status::Holds) && st(b) != Status::Holds {
            let lhs: Vec<&str> = a.iter().map(|p| p.id()).collect();
            out.push(AuditFinding {
                implication: format!("{} => {}", lhs.join(" and "), b.id()),
                detail: format!(
                    "{} but {} {}",
                    a.iter().map(|p| format!("{} holds", p.id())).collect::<Vec<_>>().join(", "),
                    b.id(),
                    st(b).id()
                ),
            });
        }
    };
    implies(&[ParaSasakian], SParacontact);
    implies(&[ParaSasakian], Paracontact);
    implies(&[ParaSasakian], Normal);
    implies(&[SParacontact], Paracontact);
    implies(&[SParacontact], EtaClosed);
    implies(&[Paracontact, EtaClosed], SParacontact);
    implies(&[EtaClosed], XiGeodesic);
    implies(&[Normal], N2Zero);
    implies(&[Normal], N3Zero);
    implies(&[Normal], N4Zero);
    implies(&[N2Zero], N4Zero);
    implies(&[N3Zero], N4Zero);
    if st(ParaSasakian) == Status::Holds && st(Flat) == Status::Holds {
        out.push(AuditFinding {
            implication: "para_sasakian => not flat".into(),
            detail: "para_sasakian holds and flat holds".into(),
        });
    }
    if st(ParaSasakian) == Status::Holds {
        for group in [
            [Symmetric, ConstantCurvatureMinusEps, SemiSymmetric],
            [EinsteinPs, RicciSymmetric, RicciSemisymmetric],
        ] {
            if group.iter().any(|p| st(*p) != st(group[0])) {
                out.push(AuditFinding {
                    implication: format!(
                        "para_sasakian: {} <=> {} <=> {}",
                        group[0].id(),
                        group[1].id(),
                        group[2].id()
                    ),
                    detail: group
                        .iter()
                        .map(|p| format!("{} {}", p.id(), st(*p).id()))
                        .collect::<Vec<_>>()
                        .join(", "),
                });
            }
        }
    }
    out
}

/// Expected statuses that the report does not reproduce.
pub fn expectation_failures(report: &ClassificationReport, expected: &[(Property, Status)]) -> Vec<String> {
    expected
        .iter()
        .filter(|(p, s)| report.status(*p) != *s)
        .map(|(p, s)| format!("{}: expected {}, got {}", p.id(), s.id(), report.status(*p).id()))
        .collect()
}
