//! TOML manifests describing a chart.
//!
//! ```toml
//! version = 1
//! name = "ex5_1_spacelike"
//! epsilon = 1
//! coordinates = ["x", "y", "z"]
//! domain = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
//! metric = [["exp(2*z)"], ["0", "exp(-2*z)"], ["0", "0", "1"]]
//! phi = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "0"]]
//! xi = ["0", "0", "1"]
//! eta = ["0", "0", "1"]
//!
//! [expected]
//! para_sasakian = "holds"
//! ```
//!
//! Metric rows have either `n` entries or `i + 1` (lower triangle). Entries
//! may be strings or plain numbers. `domain` defaults to `[-1, 1]` per axis.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charts::{numerically_equal, probe_points, Epsilon, StructuredChart};
use crate::classify::{Property, Status};
use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::parse::{is_valid_coordinate_name, parse_expression};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Text(String),
    Number(f64),
}

impl Component {
    fn source(&self) -> String {
        match self {
            Component::Text(s) => s.clone(),
            Component::Number(v) => format!("{v:?}"),
        }
    }
}

impl From<&str> for Component {
    fn from(s: &str) -> Self {
        Component::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub name: String,
    pub epsilon: i64,
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[f64; 2]>>,
    pub metric: Vec<Vec<Component>>,
    pub phi: Vec<Vec<Component>>,
    pub xi: Vec<Component>,
    pub eta: Vec<Component>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, String>,
}

/// A chart plus the statuses its author expects.
#[derive(Clone, Debug)]
pub struct LoadedManifest {
    pub chart: StructuredChart,
    pub expected: Vec<(Property, Status)>,
}

fn err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Manifest {
        path: path.into(),
        message: message.into(),
    }
}

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| err("document", e.message().trim().to_string() + &span_hint(text, e.span())))
    }

    pub fn to_toml(&self) -> String {
        // serializing plain data of this shape cannot fail
        toml::to_string(self).expect("manifest serializes")
    }

    /// Writes every component in full-row form.
    pub fn from_chart(chart: &StructuredChart, expected: &[(Property, Status)]) -> Self {
        let n = chart.dim();
        let names = chart.coords();
        let text = |f: &ScalarField| Component::Text(f.display_with(names).to_string());
        Manifest {
            version: MANIFEST_VERSION,
            name: chart.name().to_string(),
            epsilon: chart.epsilon().sign() as i64,
            coordinates: names.to_vec(),
            domain: Some(chart.domain().iter().map(|&(lo, hi)| [lo, hi]).collect()),
            metric: (0..n).map(|i| (0..n).map(|j| text(chart.g(i, j))).collect()).collect(),
            phi: (0..n).map(|i| (0..n).map(|j| text(chart.phi(i, j))).collect()).collect(),
            xi: (0..n).map(|i| text(chart.xi(i))).collect(),
            eta: (0..n).map(|i| text(chart.eta(i))).collect(),
            expected: expected.iter().map(|(p, s)| (p.id().to_string(), s.id().to_string())).collect(),
        }
    }

    pub fn load(&self) -> Result<LoadedManifest> {
        if self.version != MANIFEST_VERSION {
            return Err(err("version", format!("unsupported version {}, expected 1", self.version)));
        }
        let epsilon = Epsilon::from_sign(self.epsilon).ok_or_else(|| err("epsilon", "must be 1 or -1"))?;
        let coords = &self.coordinates;
        let n = coords.len();
        if n == 0 || n > 8 {
            return Err(err("coordinates", format!("{n} coordinates, need 1..=8")));
        }
        for (i, c) in coords.iter().enumerate() {
            if !is_valid_coordinate_name(c) {
                return Err(err(format!("coordinates[{i}]"), format!("`{c}` is not a valid coordinate name")));
            }
            if coords[..i].contains(c) {
                return Err(err(format!("coordinates[{i}]"), format!("duplicate coordinate `{c}`")));
            }
        }
        let domain: Vec<(f64, f64)> = match &self.domain {
            None => vec![(-1.0, 1.0); n],
            Some(d) => {
                if d.len() != n {
                    return Err(err("domain", format!("{} intervals for {n} coordinates", d.len())));
                }
                for (i, [lo, hi]) in d.iter().enumerate() {
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(err(format!("domain[{i}]"), format!("[{lo}, {hi}] is not a finite interval")));
                    }
                }
                d.iter().map(|&[lo, hi]| (lo, hi)).collect()
            }
        };
        let parse = |path: String, c: &Component| {
            parse_expression(&c.source(), coords).map_err(|e| err(path, e.to_string()))
        };
        let vector = |field: &str, v: &[Component]| -> Result<Vec<ScalarField>> {
            if v.len() != n {
                return Err(err(field, format!("has {} entries, expected {n}", v.len())));
            }
            v.iter().enumerate().map(|(i, c)| parse(format!("{field}[{i}]"), c)).collect()
        };

        if self.metric.len() != n {
            return Err(err("metric", format!("has {} rows, expected {n}", self.metric.len())));
        }
        let mut given: Vec<Vec<Option<ScalarField>>> = vec![vec![None; n]; n];
        for (i, row) in self.metric.iter().enumerate() {
            if row.len() != n && row.len() != i + 1 {
                return Err(err(
                    format!("metric[{i}]"),
                    format!("has {} entries, expected {n} or {}", row.len(), i + 1),
                ));
            }
            for (j, c) in row.iter().enumerate() {
                given[i][j] = Some(parse(format!("metric[{i}][{j}]"), c)?);
            }
        }
        let probes = probe_points(&domain);
        let mut metric = vec![vec![ScalarField::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let entry = match (&given[i][j], &given[j][i]) {
                    (Some(a), Some(b)) => {
                        if a != b && !numerically_equal(a, b, &probes) {
                            return Err(err(
                                format!("metric[{i}][{j}]"),
                                format!("inconsistent with metric[{j}][{i}]: the metric must be symmetric"),
                            ));
                        }
                        a.clone()
                    }
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!("row i covers at least columns 0..=i"),
                };
                metric[i][j] = entry;
            }
        }

        if self.phi.len() != n {
            return Err(err("phi", format!("has {} rows, expected {n}", self.phi.len())));
        }
        let phi = self
            .phi
            .iter()
            .enumerate()
            .map(|(i, row)| vector(&format!("phi[{i}]"), row))
            .collect::<Result<Vec<_>>>()?;
        let xi = vector("xi", &self.xi)?;
        let eta = vector("eta", &self.eta)?;

        let mut expected = Vec::new();
        for (k, v) in &self.expected {
            let p = Property::from_id(k).ok_or_else(|| err(format!("expected.{k}"), "unknown property"))?;
            let s = Status::from_id(v)
                .ok_or_else(|| err(format!("expected.{k}"), format!("`{v}` is not holds, fails or mixed")))?;
            expected.push((p, s));
        }

        let chart = StructuredChart::new(self.name.clone(), epsilon, coords.clone(), domain, metric, phi, xi, eta)
            .map_err(|e| err("chart", e.to_string()))?;
        Ok(LoadedManifest { chart, expected })
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

pub fn load_manifest(text: &str) -> Result<LoadedManifest> {
    Manifest::from_toml(text)?.load()
}

pub fn load_manifest_file(path: &Path) -> Result<LoadedManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| err(path.display().to_string(), e.to_string()))?;
    load_manifest(&text)
}

pub fn to_manifest(chart: &StructuredChart, expected: &[(Property, Status)]) -> String {
    Manifest::from_chart(chart, expected).to_toml()
}
