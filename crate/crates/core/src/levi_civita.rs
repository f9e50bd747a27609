//! Levi-Civita connection and the first-order differential objects built on
//! it: covariant and Lie derivatives, dη, the Nijenhuis tensor of φ, the four
//! normality tensors and the defining residuals of the structure classes.
//!
//! Conventions: Γ^k_ij is stored at `[k][i][j]`; a covariant derivative adds
//! its differentiation slot first; dη(X,Y) = ½(Xη(Y) − Yη(X) − η([X,Y])).

use serde::Serialize;

use crate::charts::{evaluate_frame, Frame, StructuredChart};
use crate::error::Result;
use crate::expr::ScalarField;
use crate::jets::{eval_jet, Jet};
use crate::residual::Residual;
use crate::tensors::{max_abs, LabeledTensor, Variance};

use Variance::{Down, Up};

/// Everything first-order at one point: the structure jets and the
/// Christoffel symbols as order-2 jets (enough for ∂Γ and ∂²Γ).
#[derive(Clone, Debug)]
pub struct Geometry {
    frame: Frame,
    n: usize,
    gamma: Vec<Jet>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionFrame {
    pub point: Vec<f64>,
    /// Γ^k_ij at `[k][i][j]`.
    pub gamma: LabeledTensor,
    /// ∂_m Γ^k_ij at `[m][k][i][j]`.
    pub dgamma: Vec<f64>,
}

impl ConnectionFrame {
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma.get(&[k, i, j])
    }

    pub fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.gamma.dim();
        self.dgamma[((m * n + k) * n + i) * n + j]
    }
}

/// Tensor field given by component fields, laid out like [`LabeledTensor`].
#[derive(Clone, Debug)]
pub struct TensorField {
    pub variances: Vec<Variance>,
    pub comps: Vec<ScalarField>,
}

impl TensorField {
    pub fn metric(chart: &StructuredChart) -> Self {
        let n = chart.dim();
        let comps = (0..n * n).map(|k| chart.g(k / n, k % n).clone()).collect();
        TensorField { variances: vec![Down, Down], comps }
    }

    pub fn phi(chart: &StructuredChart) -> Self {
        let n = chart.dim();
        let comps = (0..n * n).map(|k| chart.phi(k / n, k % n).clone()).collect();
        TensorField { variances: vec![Up, Down], comps }
    }

    pub fn xi(chart: &StructuredChart) -> Self {
        let comps = (0..chart.dim()).map(|k| chart.xi(k).clone()).collect();
        TensorField { variances: vec![Up], comps }
    }

    pub fn eta(chart: &StructuredChart) -> Self {
        let comps = (0..chart.dim()).map(|k| chart.eta(k).clone()).collect();
        TensorField { variances: vec![Down], comps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieTarget {
    Metric,
    Phi,
    Eta,
}

fn idx3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

impl Geometry {
    pub fn at(chart: &StructuredChart, point: &[f64]) -> Result<Self> {
        let frame = evaluate_frame(chart, point)?;
        Ok(Self::from_frame(frame))
    }

    pub fn from_frame(frame: Frame) -> Self {
        let n = frame.dim();
        // ∂_l g_ij as order-2 jets
        let mut dg = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dg.push(frame.g_jet(i, j).derivative(l));
                }
            }
        }
        // Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut first = vec![Jet::constant(n, 0, 0.0); n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let s = &(&dg[idx3(n, i, j, l)] + &dg[idx3(n, j, i, l)]) - &dg[idx3(n, l, i, j)];
                    let s = s.scale(0.5);
                    first[idx3(n, l, j, i)] = s.clone();
                    first[idx3(n, l, i, j)] = s;
                }
            }
        }
        let mut gamma = vec![Jet::constant(n, 0, 0.0); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let s = Jet::dot(
                        (0..n).map(|l| frame.ginv_jet(k, l)),
                        (0..n).map(|l| &first[idx3(n, l, i, j)]),
                    )
                    .expect("n >= 1");
                    gamma[idx3(n, k, j, i)] = s.clone();
                    gamma[idx3(n, k, i, j)] = s;
                }
            }
        }
        Geometry { frame, n, gamma }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.frame.epsilon()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[idx3(self.n, k, i, j)].value()
    }

    /// Γ^k_ij as an order-2 jet.
    pub fn gamma_jet(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[idx3(self.n, k, i, j)]
    }

    pub fn connection_frame(&self) -> ConnectionFrame {
        let n = self.n;
        let gamma = LabeledTensor::from_fn(n, vec![Up, Down, Down], |ix| self.gamma(ix[0], ix[1], ix[2]));
        let mut dgamma = vec![0.0; n * n * n * n];
        for m in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        dgamma[((m * n + k) * n + i) * n + j] = self.gamma_jet(k, i, j).grad(m);
                    }
                }
            }
        }
        ConnectionFrame {
            point: self.frame.point().to_vec(),
            gamma,
            dgamma,
        }
    }

    /// Component jets and variances of a structure field.
    pub fn structure_jets(&self, which: StructureField) -> (Vec<Variance>, Vec<Jet>) {
        let n = self.n;
        let f = &self.frame;
        match which {
            StructureField::Metric => (vec![Down, Down], (0..n * n).map(|k| f.g_jet(k / n, k % n).clone()).collect()),
            StructureField::Phi => (vec![Up, Down], (0..n * n).map(|k| f.phi_jet(k / n, k % n).clone()).collect()),
            StructureField::Xi => (vec![Up], (0..n).map(|k| f.xi_jet(k).clone()).collect()),
            StructureField::Eta => (vec![Down], (0..n).map(|k| f.eta_jet(k).clone()).collect()),
            StructureField::Fundamental => {
                // Φ_ij = g(∂_i, φ∂_j) = g_ia φ^a_j
                let comps = (0..n * n)
                    .map(|k| {
                        let (i, j) = (k / n, k % n);
                        Jet::dot((0..n).map(|a| f.g_jet(i, a)), (0..n).map(|a| f.phi_jet(a, j))).expect("n >= 1")
                    })
                    .collect();
                (vec![Down, Down], comps)
            }
        }
    }

    /// ∇T with the differentiation slot first, and the largest magnitude of
    /// any term (partial derivative or connection correction) that entered.
    pub fn covariant_derivative_jets(&self, variances: &[Variance], comps: &[Jet]) -> (LabeledTensor, f64) {
        let n = self.n;
        let rank = variances.len();
        let src = LabeledTensor::zeros(n, variances.to_vec());
        let values: Vec<f64> = comps.iter().map(Jet::value).collect();
        let mut out_var = vec![Down];
        out_var.extend_from_slice(variances);
        let mut out = LabeledTensor::zeros(n, out_var);
        let mut scale: f64 = 0.0;
        let mut full = vec![0; rank + 1];
        let mut moved = vec![0; rank];
        for flat in 0..out.data().len() {
            out.unflatten(flat, &mut full);
            let m = full[0];
            let idx = &full[1..];
            let partial = comps[src.flat_index(idx)].grad(m);
            let mut acc = partial;
            scale = scale.max(partial.abs());
            for (s, var) in variances.iter().enumerate() {
                moved.copy_from_slice(idx);
                let mut corr = 0.0;
                for p in 0..n {
                    moved[s] = p;
                    let t = values[src.flat_index(&moved)];
                    corr += match var {
                        Up => self.gamma(idx[s], m, p) * t,
                        Down => -self.gamma(p, m, idx[s]) * t,
                    };
                }
                scale = scale.max(corr.abs());
                acc += corr;
            }
            out.data_mut()[flat] = acc;
        }
        (out, scale)
    }

    pub fn covariant_derivative_structure(&self, which: StructureField) -> (LabeledTensor, f64) {
        let (v, c) = self.structure_jets(which);
        self.covariant_derivative_jets(&v, &c)
    }

    /// Residual of ∇g = 0.
    pub fn metric_compatibility(&self) -> f64 {
        let (t, scale) = self.covariant_derivative_structure(StructureField::Metric);
        let mut r = Residual::new();
        r.scale_by(scale);
        for v in t.data() {
            r.zero(*v);
        }
        r.value()
    }

    /// Lie derivative along ξ of g, φ or η, with the largest term magnitude.
    pub fn lie_derivative_along_xi(&self, which: LieTarget) -> (LabeledTensor, f64) {
        let n = self.n;
        let f = &self.frame;
        let xi = |l: usize| f.xi(l);
        let dxi = |l: usize, i: usize| f.xi_jet(l).grad(i); // ∂_i ξ^l
        let mut scale: f64 = 0.0;
        let mut bump = |v: f64| {
            scale = scale.max(v.abs());
            v
        };
        let t = match which {
            LieTarget::Metric => LabeledTensor::from_fn(n, vec![Down, Down], |ix| {
                let (i, j) = (ix[0], ix[1]);
                let mut s = 0.0;
                for l in 0..n {
                    s += bump(xi(l) * f.g_jet(i, j).grad(l));
                    s += bump(f.g(l, j) * dxi(l, i));
                    s += bump(f.g(i, l) * dxi(l, j));
                }
                s
            }),
            LieTarget::Phi => LabeledTensor::from_fn(n, vec![Up, Down], |ix| {
                let (i, j) = (ix[0], ix[1]);
                let mut s = 0.0;
                for l in 0..n {
                    s += bump(xi(l) * f.phi_jet(i, j).grad(l));
                    s -= bump(f.phi(l, j) * dxi(i, l));
                    s += bump(f.phi(i, l) * dxi(l, j));
                }
                s
            }),
            LieTarget::Eta => LabeledTensor::from_fn(n, vec![Down], |ix| {
                let j = ix[0];
                let mut s = 0.0;
                for l in 0..n {
                    s += bump(xi(l) * f.eta_jet(j).grad(l));
                    s += bump(f.eta(l) * dxi(l, j));
                }
                s
            }),
        };
        (t, scale)
    }

    /// dη_ij = ½(∂_i η_j − ∂_j η_i).
    pub fn exterior_derivative_eta(&self) -> (LabeledTensor, f64) {
        let f = &self.frame;
        let mut scale: f64 = 0.0;
        let t = LabeledTensor::from_fn(self.n, vec![Down, Down], |ix| {
            let (a, b) = (f.eta_jet(ix[1]).grad(ix[0]), f.eta_jet(ix[0]).grad(ix[1]));
            scale = scale.max(a.abs()).max(b.abs());
            0.5 * (a - b)
        });
        (t, 0.5 * scale)
    }

    /// [φ,φ]^k_ij from coordinate partials, with term scale.
    pub fn nijenhuis_phi(&self) -> (LabeledTensor, f64) {
        let f = &self.frame;
        let dphi = |l: usize, k: usize, j: usize| f.phi_jet(k, j).grad(l);
        self.nijenhuis_with(&dphi)
    }

    /// [φ,φ] with partials replaced by covariant derivatives; equal to the
    /// coordinate form because the connection is torsion-free.
    pub fn nijenhuis_phi_covariant(&self) -> (LabeledTensor, f64) {
        let (nabla_phi, _) = self.covariant_derivative_structure(StructureField::Phi);
        let dphi = |l: usize, k: usize, j: usize| nabla_phi.get(&[l, k, j]);
        self.nijenhuis_with(&dphi)
    }

    fn nijenhuis_with(&self, dphi: &dyn Fn(usize, usize, usize) -> f64) -> (LabeledTensor, f64) {
        let n = self.n;
        let f = &self.frame;
        let mut scale: f64 = 0.0;
        let t = LabeledTensor::from_fn(n, vec![Up, Down, Down], |ix| {
            let (k, i, j) = (ix[0], ix[1], ix[2]);
            let mut s = 0.0;
            for l in 0..n {
                let terms = [
                    f.phi(l, i) * dphi(l, k, j),
                    -f.phi(l, j) * dphi(l, k, i),
                    f.phi(k, l) * dphi(j, l, i),
                    -f.phi(k, l) * dphi(i, l, j),
                ];
                for t in terms {
                    scale = scale.max(t.abs());
                    s += t;
                }
            }
            s
        });
        (t, scale)
    }

    pub fn normality_tensors(&self) -> NormalityTensors {
        let n = self.n;
        let f = &self.frame;
        let (nij_phi, nij_scale) = self.nijenhuis_phi();
        let (d_eta, d_scale) = self.exterior_derivative_eta();
        let n1 = LabeledTensor::from_fn(n, vec![Up, Down, Down], |ix| {
            nij_phi.get(ix) - 2.0 * d_eta.get(&ix[1..]) * f.xi(ix[0])
        });
        let mut n2_scale: f64 = 0.0;
        let n2 = LabeledTensor::from_fn(n, vec![Down, Down], |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut s = 0.0;
            for l in 0..n {
                let terms = [
                    f.phi(l, i) * f.eta_jet(j).grad(l),
                    f.eta(l) * f.phi_jet(l, i).grad(j),
                    -f.phi(l, j) * f.eta_jet(i).grad(l),
                    -f.eta(l) * f.phi_jet(l, j).grad(i),
                ];
                for t in terms {
                    n2_scale = n2_scale.max(t.abs());
                    s += t;
                }
            }
            s
        });
        let (n3, n3_scale) = self.lie_derivative_along_xi(LieTarget::Phi);
        let (n4, n4_scale) = self.lie_derivative_along_xi(LieTarget::Eta);
        let xi_scale = max_abs(&f.xi_vec());
        NormalityTensors {
            n1_scale: nij_scale.max(2.0 * d_scale * xi_scale),
            n1,
            n2,
            n2_scale,
            n3,
            n3_scale,
            n4,
            n4_scale,
            d_eta,
            d_eta_scale: d_scale,
            nij_phi,
        }
    }

    pub fn structure_residuals(&self) -> StructureResiduals {
        let n = self.n;
        let f = &self.frame;
        let eps = self.epsilon();
        let (nabla_eta, s_eta) = self.covariant_derivative_structure(StructureField::Eta);
        let (nabla_xi, s_xi) = self.covariant_derivative_structure(StructureField::Xi);
        let (nabla_phi, s_phi) = self.covariant_derivative_structure(StructureField::Phi);
        let (lie_g, s_lie) = self.lie_derivative_along_xi(LieTarget::Metric);
        let (d_eta, s_d) = self.exterior_derivative_eta();
        let fund = |i: usize, j: usize| -> f64 { (0..n).map(|a| f.g(i, a) * f.phi(a, j)).sum() };

        // 2Φ(X,Y) = (∇_X η)Y + (∇_Y η)X
        let mut paracontact = Residual::new();
        paracontact.scale_by(s_eta);
        // 2Φ = ε £_ξ g
        let mut lie_paracontact = Residual::new();
        lie_paracontact.scale_by(s_lie);
        for i in 0..n {
            for j in 0..n {
                let two_phi = 2.0 * fund(i, j);
                paracontact.check(two_phi, nabla_eta.get(&[i, j]) + nabla_eta.get(&[j, i]));
                lie_paracontact.check(two_phi, eps * lie_g.get(&[i, j]));
            }
        }
        // ∇ξ = εφ: (∇_i ξ)^k = ε φ^k_i
        let mut s_paracontact = Residual::new();
        s_paracontact.scale_by(s_xi);
        for i in 0..n {
            for k in 0..n {
                s_paracontact.check(nabla_xi.get(&[i, k]), eps * f.phi(k, i));
            }
        }
        // (∇_X φ)Y = −g(φX,φY)ξ − εη(Y)φ²X
        let mut para_sasakian = Residual::new();
        para_sasakian.scale_by(s_phi);
        let phi_col = |i: usize| -> Vec<f64> { (0..n).map(|a| f.phi(a, i)).collect() };
        for i in 0..n {
            let phi_x = phi_col(i);
            let phi2_x = f.phi_of(&phi_x);
            for j in 0..n {
                let gpp = f.g_of(&phi_x, &phi_col(j));
                for k in 0..n {
                    let rhs = -gpp * f.xi(k) - eps * f.eta(j) * phi2_x[k];
                    para_sasakian.check(nabla_phi.get(&[i, k, j]), rhs);
                }
            }
        }
        let mut eta_closed = Residual::new();
        eta_closed.scale_by(s_d);
        for v in d_eta.data() {
            eta_closed.zero(*v);
        }
        // ∇_ξ ξ
        let mut xi_geodesic = Residual::new();
        xi_geodesic.scale_by(s_xi * max_abs(&f.xi_vec()));
        for k in 0..n {
            xi_geodesic.zero((0..n).map(|i| f.xi(i) * nabla_xi.get(&[i, k])).sum());
        }
        StructureResiduals {
            paracontact: paracontact.value(),
            lie_paracontact: lie_paracontact.value(),
            s_paracontact: s_paracontact.value(),
            para_sasakian: para_sasakian.value(),
            eta_closed: eta_closed.value(),
            xi_geodesic: xi_geodesic.value(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureField {
    Metric,
    Phi,
    Xi,
    Eta,
    /// Φ(X,Y) = g(X, φY).
    Fundamental,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityTensors {
    /// N1^k_ij = [φ,φ]^k_ij − 2 dη_ij ξ^k
    pub n1: LabeledTensor,
    /// N2_ij = (£_{φ∂i} η)(∂j) − (£_{φ∂j} η)(∂i)
    pub n2: LabeledTensor,
    /// N3^k_j = (£_ξ φ)^k_j
    pub n3: LabeledTensor,
    /// N4_j = (£_ξ η)_j
    pub n4: LabeledTensor,
    pub d_eta: LabeledTensor,
    pub nij_phi: LabeledTensor,
    pub n1_scale: f64,
    pub n2_scale: f64,
    pub n3_scale: f64,
    pub n4_scale: f64,
    pub d_eta_scale: f64,
}

impl NormalityTensors {
    fn vanishing(t: &LabeledTensor, scale: f64) -> f64 {
        let mut r = Residual::new();
        r.scale_by(scale);
        for v in t.data() {
            r.zero(*v);
        }
        r.value()
    }

    pub fn n1_residual(&self) -> f64 {
        Self::vanishing(&self.n1, self.n1_scale)
    }
    pub fn n2_residual(&self) -> f64 {
        Self::vanishing(&self.n2, self.n2_scale)
    }
    pub fn n3_residual(&self) -> f64 {
        Self::vanishing(&self.n3, self.n3_scale)
    }
    pub fn n4_residual(&self) -> f64 {
        Self::vanishing(&self.n4, self.n4_scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureResiduals {
    pub paracontact: f64,
    pub lie_paracontact: f64,
    pub s_paracontact: f64,
    pub para_sasakian: f64,
    pub eta_closed: f64,
    pub xi_geodesic: f64,
}

pub fn christoffel(chart: &StructuredChart, point: &[f64]) -> Result<ConnectionFrame> {
    Ok(Geometry::at(chart, point)?.connection_frame())
}

/// ∇T for an arbitrary tensor field; the new down slot comes first.
pub fn covariant_derivative(chart: &StructuredChart, point: &[f64], field: &TensorField) -> Result<LabeledTensor> {
    let geo = Geometry::at(chart, point)?;
    let comps = field.comps.iter().map(|c| eval_jet(c, point)).collect::<Result<Vec<_>, _>>()?;
    Ok(geo.covariant_derivative_jets(&field.variances, &comps).0)
}

pub fn lie_derivative_along_xi(chart: &StructuredChart, point: &[f64], which: LieTarget) -> Result<LabeledTensor> {
    Ok(Geometry::at(chart, point)?.lie_derivative_along_xi(which).0)
}

pub fn exterior_derivative_eta(chart: &StructuredChart, point: &[f64]) -> Result<LabeledTensor> {
    Ok(Geometry::at(chart, point)?.exterior_derivative_eta().0)
}

pub fn nijenhuis_phi(chart: &StructuredChart, point: &[f64]) -> Result<LabeledTensor> {
    Ok(Geometry::at(chart, point)?.nijenhuis_phi().0)
}

pub fn normality_tensors(chart: &StructuredChart, point: &[f64]) -> Result<NormalityTensors> {
    Ok(Geometry::at(chart, point)?.normality_tensors())
}

pub fn structure_residuals(chart: &StructuredChart, point: &[f64]) -> Result<StructureResiduals> {
    Ok(Geometry::at(chart, point)?.structure_residuals())
}
