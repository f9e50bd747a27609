//! Coordinate charts carrying a metric and an almost paracontact structure.
//!
//! Component layout: `g[i][j] = g(∂_i, ∂_j)`, `phi[i][j] = φ^i_j` (first
//! index up, so `(φX)^i = φ^i_j X^j`), `xi[i] = ξ^i`, `eta[i] = η_i`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::jets::{eval_jet, Jet};
use crate::residual::Residual;
use crate::tensors::{self, metric_index, min_abs_eigenvalue, numeric_rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Epsilon {
    /// ε = +1: ξ spacelike.
    Spacelike,
    /// ε = −1: ξ timelike.
    Timelike,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Spacelike => 1.0,
            Epsilon::Timelike => -1.0,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Epsilon::Spacelike => 1,
            Epsilon::Timelike => -1,
        }
    }

    pub fn from_sign(s: i64) -> Option<Self> {
        match s {
            1 => Some(Epsilon::Spacelike),
            -1 => Some(Epsilon::Timelike),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StructuredChart {
    name: String,
    epsilon: Epsilon,
    coords: Vec<String>,
    domain: Vec<(f64, f64)>,
    g: Vec<ScalarField>,
    phi: Vec<ScalarField>,
    xi: Vec<ScalarField>,
    eta: Vec<ScalarField>,
}

fn flatten(rows: Vec<Vec<ScalarField>>, n: usize, what: &str) -> Result<Vec<ScalarField>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidChart(format!("{what} must be {n}x{n}")));
    }
    Ok(rows.into_iter().flatten().collect())
}

// Midpoint plus two interior points per axis, taken in a fixed pattern.
pub(crate) fn probe_points(domain: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let at = |t: &dyn Fn(usize) -> f64| -> Vec<f64> {
        domain.iter().enumerate().map(|(i, (lo, hi))| lo + (hi - lo) * t(i)).collect()
    };
    vec![
        at(&|_| 0.5),
        at(&|i| if i % 2 == 0 { 0.23 } else { 0.71 }),
        at(&|i| if i % 3 == 0 { 0.87 } else { 0.19 + 0.1 * i as f64 / domain.len() as f64 }),
    ]
}

pub(crate) fn numerically_equal(a: &ScalarField, b: &ScalarField, probes: &[Vec<f64>]) -> bool {
    probes.iter().all(|x| match (a.eval(x), b.eval(x)) {
        (Ok(u), Ok(v)) => (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0),
        (Err(_), Err(_)) => true,
        _ => false,
    })
}

impl StructuredChart {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        epsilon: Epsilon,
        coords: Vec<String>,
        domain: Vec<(f64, f64)>,
        g: Vec<Vec<ScalarField>>,
        phi: Vec<Vec<ScalarField>>,
        xi: Vec<ScalarField>,
        eta: Vec<ScalarField>,
    ) -> Result<Self> {
        let n = coords.len();
        if n == 0 || n > 8 {
            return Err(Error::InvalidChart(format!("dimension {n} outside 1..=8")));
        }
        if domain.len() != n {
            return Err(Error::InvalidChart(format!(
                "domain has {} intervals for {n} coordinates",
                domain.len()
            )));
        }
        for (i, (lo, hi)) in domain.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidChart(format!(
                    "empty domain interval [{lo}, {hi}] for {}",
                    coords[i]
                )));
            }
        }
        if xi.len() != n || eta.len() != n {
            return Err(Error::InvalidChart(format!("xi and eta must have {n} components")));
        }
        let mut g = flatten(g, n, "metric")?;
        let phi = flatten(phi, n, "phi")?;
        let probes = probe_points(&domain);
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&g[i * n + j], &g[j * n + i]);
                if a != b && !numerically_equal(a, b, &probes) {
                    return Err(Error::InvalidChart(format!("metric[{i}][{j}] and metric[{j}][{i}] differ")));
                }
                // keep a single expression so the stored metric is exactly symmetric
                g[j * n + i] = g[i * n + j].clone();
            }
        }
        let all = g.iter().chain(&phi).chain(&xi).chain(&eta);
        for f in all {
            if let Some(c) = f.max_coord() {
                if c >= n {
                    return Err(Error::InvalidChart(format!("field `{f}` references coordinate {c}")));
                }
            }
        }
        Ok(StructuredChart {
            name: name.into(),
            epsilon,
            coords,
            domain,
            g,
            phi,
            xi,
            eta,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self> {
        if domain.len() != self.dim() || domain.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidChart("bad domain".into()));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn g(&self, i: usize, j: usize) -> &ScalarField {
        &self.g[i * self.dim() + j]
    }

    pub fn phi(&self, i: usize, j: usize) -> &ScalarField {
        &self.phi[i * self.dim() + j]
    }

    pub fn xi(&self, i: usize) -> &ScalarField {
        &self.xi[i]
    }

    pub fn eta(&self, i: usize) -> &ScalarField {
        &self.eta[i]
    }

    /// Every component field, in the order g, φ, ξ, η.
    pub fn fields(&self) -> impl Iterator<Item = (String, &ScalarField)> {
        let n = self.dim();
        let g = self.g.iter().enumerate().map(move |(k, f)| (format!("g[{}][{}]", k / n, k % n), f));
        let phi = self.phi.iter().enumerate().map(move |(k, f)| (format!("phi[{}][{}]", k / n, k % n), f));
        let xi = self.xi.iter().enumerate().map(|(k, f)| (format!("xi[{k}]"), f));
        let eta = self.eta.iter().enumerate().map(|(k, f)| (format!("eta[{k}]"), f));
        g.chain(phi).chain(xi).chain(eta)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && point.iter().zip(&self.domain).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Replaces φ with another field array (for constructing violations).
    pub fn with_phi(mut self, phi: Vec<Vec<ScalarField>>) -> Result<Self> {
        let n = self.dim();
        self.phi = flatten(phi, n, "phi")?;
        Ok(self)
    }

    pub fn with_metric(mut self, g: Vec<Vec<ScalarField>>) -> Result<Self> {
        let n = self.dim();
        let g = flatten(g, n, "metric")?;
        for i in 0..n {
            for j in (i + 1)..n {
                if g[i * n + j] != g[j * n + i] {
                    return Err(Error::InvalidChart(format!("metric[{i}][{j}] and metric[{j}][{i}] differ")));
                }
            }
        }
        self.g = g;
        Ok(self)
    }
}

/// Jets of every structure component at one point, plus the inverse metric.
#[derive(Clone, Debug)]
pub struct Frame {
    point: Vec<f64>,
    n: usize,
    epsilon: f64,
    g: Vec<Jet>,
    ginv: Vec<Jet>,
    phi: Vec<Jet>,
    xi: Vec<Jet>,
    eta: Vec<Jet>,
    det: f64,
}

impl Frame {
    pub fn point(&self) -> &[f64] {
        &self.point
    }
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn g_jet(&self, i: usize, j: usize) -> &Jet {
        &self.g[i * self.n + j]
    }
    /// Inverse metric g^ij as order-3 jets.
    pub fn ginv_jet(&self, i: usize, j: usize) -> &Jet {
        &self.ginv[i * self.n + j]
    }
    pub fn phi_jet(&self, i: usize, j: usize) -> &Jet {
        &self.phi[i * self.n + j]
    }
    pub fn xi_jet(&self, i: usize) -> &Jet {
        &self.xi[i]
    }
    pub fn eta_jet(&self, i: usize) -> &Jet {
        &self.eta[i]
    }
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g_jet(i, j).value()
    }
    pub fn ginv(&self, i: usize, j: usize) -> f64 {
        self.ginv_jet(i, j).value()
    }
    pub fn phi(&self, i: usize, j: usize) -> f64 {
        self.phi_jet(i, j).value()
    }
    pub fn xi(&self, i: usize) -> f64 {
        self.xi[i].value()
    }
    pub fn eta(&self, i: usize) -> f64 {
        self.eta[i].value()
    }
    pub fn abs_det(&self) -> f64 {
        self.det.abs()
    }
    pub fn det(&self) -> f64 {
        self.det
    }
    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.g(i, j))
    }
    pub fn phi_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.phi(i, j))
    }
    pub fn inverse_metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.ginv(i, j))
    }
    /// g(X, Y) for component vectors.
    pub fn g_of(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * self.g(i, j) * y[j];
            }
        }
        s
    }
    /// φX.
    pub fn phi_of(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.phi(i, j) * x[j]).sum()).collect()
    }
    /// η(X).
    pub fn eta_of(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| self.eta(i) * x[i]).sum()
    }
    pub fn xi_vec(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.xi(i)).collect()
    }
}

/// Gauss–Jordan inversion carried out in jet arithmetic, so the inverse
/// metric comes with exact derivatives. Returns `(inverse, det)`, or `None`
/// if a pivot vanishes.
fn invert_jets(a: &[Jet], n: usize) -> Option<(Vec<Jet>, f64)> {
    let order = a[0].order();
    let mut m: Vec<Vec<Jet>> = (0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(n, order, if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&r, &s| m[r][c].value().abs().total_cmp(&m[s][c].value().abs()))?;
        if m[p][c].value() == 0.0 {
            return None;
        }
        if p != c {
            m.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        det *= m[c][c].value();
        let r = m[c][c].recip()?;
        for k in 0..n {
            m[c][k] = m[c][k].mul_jet(&r);
            inv[c][k] = inv[c][k].mul_jet(&r);
        }
        for row in 0..n {
            if row == c {
                continue;
            }
            let factor = m[row][c].clone();
            if factor.value() == 0.0 && factor.gradient().iter().all(|v| *v == 0.0) {
                continue;
            }
            for k in 0..n {
                let t = factor.mul_jet(&m[c][k]);
                m[row][k] = &m[row][k] - &t;
                let u = factor.mul_jet(&inv[c][k]);
                inv[row][k] = &inv[row][k] - &u;
            }
        }
    }
    Some((inv.into_iter().flatten().collect(), det))
}

/// Evaluates all structure fields (through third derivatives) at `point`.
pub fn evaluate_frame(chart: &StructuredChart, point: &[f64]) -> Result<Frame> {
    let n = chart.dim();
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: point.len(),
        });
    }
    if !chart.contains(point) {
        return Err(Error::OutOfDomain { point: point.to_vec() });
    }
    let mut g = vec![Jet::constant(n, 0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let jet = eval_jet(chart.g(i, j), point)?;
            g[j * n + i] = jet.clone();
            g[i * n + j] = jet;
        }
    }
    let phi = chart.phi.iter().map(|f| eval_jet(f, point)).collect::<Result<Vec<_>, _>>()?;
    let xi = chart.xi.iter().map(|f| eval_jet(f, point)).collect::<Result<Vec<_>, _>>()?;
    let eta = chart.eta.iter().map(|f| eval_jet(f, point)).collect::<Result<Vec<_>, _>>()?;

    let scale = g.iter().fold(0.0_f64, |m, j| m.max(j.value().abs())).max(1e-300);
    let degenerate = |det: f64| Error::DegenerateMetric {
        point: point.to_vec(),
        det,
    };
    let (ginv, det) = invert_jets(&g, n).ok_or_else(|| degenerate(0.0))?;
    if !(det.abs() >= 1e-12 * scale.powi(n as i32)) {
        return Err(degenerate(det));
    }
    Ok(Frame {
        point: point.to_vec(),
        n,
        epsilon: chart.epsilon.value(),
        g,
        ginv,
        phi,
        xi,
        eta,
        det,
    })
}

/// Pointwise residuals of the structure axioms and metric compatibility.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    /// φ² − (I − η⊗ξ)
    pub phi_squared: f64,
    /// η(ξ) − 1
    pub eta_xi: f64,
    /// φξ
    pub phi_xi: f64,
    /// η∘φ
    pub eta_phi: f64,
    /// φ³ − φ
    pub phi_cubed: f64,
    /// g(φ·,φ·) − g + εη⊗η
    pub compatibility: f64,
    /// g(·,φ·) − g(φ·,·)
    pub phi_symmetry: f64,
    /// g(·,ξ) − εη
    pub xi_lowering: f64,
    /// g(ξ,ξ) − ε
    pub xi_norm: f64,
    pub rank_phi: usize,
    /// Metric index ν; `None` if the eigenvalue test finds g degenerate.
    pub index: Option<usize>,
    /// Smallest |eigenvalue| of the Gram matrix of a basis of ker η, relative
    /// to that matrix's scale.
    pub ker_eta_min_eig: f64,
}

impl AxiomReport {
    /// Largest of the componentwise structural residuals.
    pub fn max_structural(&self) -> f64 {
        [
            self.phi_squared,
            self.eta_xi,
            self.phi_xi,
            self.eta_phi,
            self.phi_cubed,
            self.compatibility,
            self.phi_symmetry,
            self.xi_lowering,
            self.xi_norm,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn ker_eta_nondegenerate(&self, tol: f64) -> bool {
        self.ker_eta_min_eig > tol
    }

    /// Single residual for the whole axiom suite: structural residuals, with
    /// rank or kernel failures counted as residual 1.
    pub fn combined(&self, n: usize, tol: f64) -> f64 {
        let mut r = self.max_structural();
        if self.rank_phi + 1 != n || !self.ker_eta_nondegenerate(tol) || self.index.is_none() {
            r = r.max(1.0);
        }
        r
    }

    pub fn rows(&self) -> [(&'static str, f64); 9] {
        [
            ("phi_squared", self.phi_squared),
            ("eta_xi", self.eta_xi),
            ("phi_xi", self.phi_xi),
            ("eta_phi", self.eta_phi),
            ("phi_cubed", self.phi_cubed),
            ("compatibility", self.compatibility),
            ("phi_symmetry", self.phi_symmetry),
            ("xi_lowering", self.xi_lowering),
            ("xi_norm", self.xi_norm),
        ]
    }
}

pub fn axiom_report(chart: &StructuredChart, point: &[f64], tol: f64) -> Result<AxiomReport> {
    let frame = evaluate_frame(chart, point)?;
    let _ = tol;
    Ok(axiom_report_for_frame(&frame))
}

pub fn axiom_report_for_frame(frame: &Frame) -> AxiomReport {
    let n = frame.dim();
    let eps = frame.epsilon();
    let phi = frame.phi_matrix();
    let g = frame.metric_matrix();
    let xi: Vec<f64> = frame.xi_vec();
    let eta: Vec<f64> = (0..n).map(|i| frame.eta(i)).collect();
    let phi2 = &phi * &phi;
    let phi3 = &phi2 * &phi;

    let mut phi_squared = Residual::new();
    let mut phi_cubed = Residual::new();
    let mut compatibility = Residual::new();
    let mut phi_symmetry = Residual::new();
    let g_phi = &g * &phi; // g(∂i, φ∂j)
    let phit_g_phi = phi.transpose() * &g * &phi; // g(φ∂i, φ∂j)
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            phi_squared.check(phi2[(i, j)], delta - xi[i] * eta[j]);
            phi_cubed.check(phi3[(i, j)], phi[(i, j)]);
            compatibility.check(phit_g_phi[(i, j)], g[(i, j)] - eps * eta[i] * eta[j]);
            phi_symmetry.check(g_phi[(i, j)], g_phi[(j, i)]);
        }
    }
    let mut eta_xi = Residual::new();
    eta_xi.check(frame.eta_of(&xi), 1.0);
    let mut phi_xi = Residual::new();
    for v in frame.phi_of(&xi) {
        phi_xi.zero(v);
    }
    let mut eta_phi = Residual::new();
    for j in 0..n {
        eta_phi.zero((0..n).map(|i| eta[i] * phi[(i, j)]).sum());
    }
    let mut xi_lowering = Residual::new();
    for i in 0..n {
        let low: f64 = (0..n).map(|a| g[(i, a)] * xi[a]).sum();
        xi_lowering.check(low, eps * eta[i]);
    }
    let mut xi_norm = Residual::new();
    xi_norm.check(frame.g_of(&xi, &xi), eps);

    let rank_phi = numeric_rank(&phi, 1e-9);
    let index = metric_index(&g, tensors::default_tol(&g)).ok();
    let ker_eta_min_eig = kernel_gram_min_eig(&g, &eta);

    AxiomReport {
        phi_squared: phi_squared.value(),
        eta_xi: eta_xi.value(),
        phi_xi: phi_xi.value(),
        eta_phi: eta_phi.value(),
        phi_cubed: phi_cubed.value(),
        compatibility: compatibility.value(),
        phi_symmetry: phi_symmetry.value(),
        xi_lowering: xi_lowering.value(),
        xi_norm: xi_norm.value(),
        rank_phi,
        index,
        ker_eta_min_eig,
    }
}

/// Gram matrix of the basis `e_j − (η_j/η_p) e_p` (j ≠ p) of ker η, with p
/// the component of largest |η_p|; returns its smallest |eigenvalue| divided
/// by `max(1, max-abs)`.
fn kernel_gram_min_eig(g: &DMatrix<f64>, eta: &[f64]) -> f64 {
    let n = eta.len();
    if n == 1 {
        return f64::INFINITY;
    }
    let p = (0..n).max_by(|&a, &b| eta[a].abs().total_cmp(&eta[b].abs())).unwrap_or(0);
    if eta[p] == 0.0 {
        return 0.0;
    }
    let basis: Vec<Vec<f64>> = (0..n)
        .filter(|&j| j != p)
        .map(|j| {
            let mut v = vec![0.0; n];
            v[j] = 1.0;
            v[p] = -eta[j] / eta[p];
            v
        })
        .collect();
    let m = n - 1;
    let gram = DMatrix::from_fn(m, m, |a, b| {
        let (x, y) = (&basis[a], &basis[b]);
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * g[(i, j)] * y[j];
            }
        }
        s
    });
    min_abs_eigenvalue(&gram) / gram.amax().max(1.0)
}

/// Builds the product chart M × R from an almost product structure J with a
/// J-compatible metric G: η = dt, ξ = ∂_t, φ = J ⊕ 0, g = G ⊕ ε dt².
///
/// The preconditions J² = I and G(J·,J·) = G are checked at the center and at
/// the corners of the half-size box inside `[-1, 1]^n`.
pub fn from_almost_product(
    n: usize,
    j: Vec<Vec<ScalarField>>,
    metric: Vec<Vec<ScalarField>>,
    epsilon: Epsilon,
) -> Result<StructuredChart> {
    if j.len() != n || metric.len() != n || j.iter().chain(&metric).any(|r| r.len() != n) {
        return Err(Error::InvalidChart(format!("J and G must be {n}x{n}")));
    }
    let mut points = vec![vec![0.0; n]];
    for mask in 0..(1u32 << n.min(6)) {
        points.push((0..n).map(|i| if mask & (1 << i) != 0 { 0.5 } else { -0.5 }).collect());
    }
    let eval_matrix = |m: &[Vec<ScalarField>], p: &[f64]| -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] = m[a][b].eval(p)?;
            }
        }
        Ok(out)
    };
    for p in &points {
        let jv = eval_matrix(&j, p)?;
        let gv = eval_matrix(&metric, p)?;
        let mut res = Residual::new();
        let j2 = &jv * &jv;
        let jgj = jv.transpose() * &gv * &jv;
        for a in 0..n {
            for b in 0..n {
                res.check(j2[(a, b)], if a == b { 1.0 } else { 0.0 });
                res.check(jgj[(a, b)], gv[(a, b)]);
            }
        }
        if res.value() > 1e-9 {
            return Err(Error::NotAlmostProduct {
                point: p.clone(),
                residual: res.value(),
            });
        }
        let det = gv.determinant();
        if !(det.abs() > 1e-12 * gv.amax().max(1e-300).powi(n as i32)) {
            return Err(Error::DegenerateMetric { point: p.clone(), det });
        }
    }
    let zero = ScalarField::zero;
    let mut g_rows = Vec::with_capacity(n + 1);
    let mut phi_rows = Vec::with_capacity(n + 1);
    for a in 0..n {
        let mut gr = metric[a].clone();
        gr.push(zero());
        g_rows.push(gr);
        let mut pr = j[a].clone();
        pr.push(zero());
        phi_rows.push(pr);
    }
    let mut last = vec![zero(); n];
    last.push(ScalarField::constant(epsilon.value()));
    g_rows.push(last);
    phi_rows.push(vec![zero(); n + 1]);
    let mut xi = vec![zero(); n];
    xi.push(ScalarField::one());
    let eta = xi.clone();
    let mut coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    coords.push("t".into());
    StructuredChart::new(
        format!("product_{n}"),
        epsilon,
        coords,
        vec![(-1.0, 1.0); n + 1],
        g_rows,
        phi_rows,
        xi,
        eta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarField as F;

    fn c(v: f64) -> F {
        F::constant(v)
    }

    fn diag(v: &[f64]) -> Vec<Vec<F>> {
        (0..v.len())
            .map(|i| (0..v.len()).map(|j| c(if i == j { v[i] } else { 0.0 })).collect())
            .collect()
    }

    #[test]
    fn product_examples_pass_axioms() {
        let cases = [
            (diag(&[1.0, -1.0]), Epsilon::Spacelike, 0usize),
            (diag(&[1.0, 1.0]), Epsilon::Timelike, 1),
            (vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]], Epsilon::Spacelike, 0),
        ];
        for (j, eps, nu) in cases {
            let chart = from_almost_product(2, j, diag(&[1.0, 1.0]), eps).unwrap();
            assert_eq!(chart.dim(), 3);
            let r = axiom_report(&chart, &[0.2, -0.4, 0.1], 1e-9).unwrap();
            assert!(r.max_structural() < 1e-12, "{r:?}");
            assert_eq!(r.index, Some(nu));
            assert_eq!(r.rank_phi, 2);
        }
    }

    #[test]
    fn product_rejects_non_involution() {
        let j = vec![vec![c(1.0), c(1.0)], vec![c(0.0), c(1.0)]];
        assert!(matches!(
            from_almost_product(2, j, diag(&[1.0, 1.0]), Epsilon::Spacelike),
            Err(Error::NotAlmostProduct { .. })
        ));
        // J = swap is not an isometry of diag(1, 2)
        let swap = vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]];
        assert!(from_almost_product(2, swap, diag(&[1.0, 2.0]), Epsilon::Spacelike).is_err());
        assert!(matches!(
            from_almost_product(2, diag(&[1.0, 1.0]), diag(&[1.0, 0.0]), Epsilon::Spacelike),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let coords = vec!["x".to_string(), "y".to_string()];
        let g = vec![vec![c(1.0), c(1.0)], vec![c(2.0), c(1.0)]];
        let e = StructuredChart::new(
            "bad",
            Epsilon::Spacelike,
            coords,
            vec![(-1.0, 1.0); 2],
            g,
            diag(&[1.0, 0.0]),
            vec![c(0.0), c(1.0)],
            vec![c(0.0), c(1.0)],
        );
        assert!(matches!(e, Err(Error::InvalidChart(_))));
    }

    #[test]
    fn empty_domain_rejected() {
        let e = StructuredChart::new(
            "bad",
            Epsilon::Spacelike,
            vec!["t".into()],
            vec![(1.0, 1.0)],
            diag(&[1.0]),
            diag(&[0.0]),
            vec![c(1.0)],
            vec![c(1.0)],
        );
        assert!(e.is_err());
    }
}
