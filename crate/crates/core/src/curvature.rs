//! Riemann, Ricci, scalar and sectional curvature, ∇R and ∇S, and the
//! curvature residuals used for classification.
//!
//! Conventions: R(X,Y)Z = ∇_X∇_YZ − ∇_Y∇_XZ − ∇_{[X,Y]}Z, stored as
//! `r_up[l][i][j][k] = [R(∂i,∂j)∂k]^l`; `r_down[i][j][k][l] = g(R(∂i,∂j)∂k, ∂l)`;
//! S(Y,Z) = trace(X ↦ R(X,Y)Z).

use serde::Serialize;

use crate::charts::StructuredChart;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::levi_civita::Geometry;
use crate::residual::Residual;
use crate::tensors::{max_abs, LabeledTensor, Variance};

use Variance::{Down, Up};

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureFrame {
    pub point: Vec<f64>,
    pub epsilon: f64,
    /// g_ij values.
    pub g: LabeledTensor,
    pub r_up: LabeledTensor,
    pub r_down: LabeledTensor,
    pub ricci: LabeledTensor,
    pub scalar: f64,
    /// (∇_m R)(i,j,k,l) at `[m][i][j][k][l]`.
    pub nabla_r: LabeledTensor,
    /// (∇_m S)(j,k) at `[m][j][k]`.
    pub nabla_s: LabeledTensor,
    /// Largest term magnitude that entered R.
    pub r_scale: f64,
    pub s_scale: f64,
    pub nabla_r_scale: f64,
    pub nabla_s_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrenceTarget {
    Riemann,
    Ricci,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceFit {
    pub alpha_hat: Vec<f64>,
    pub residual: f64,
    pub target: RecurrenceTarget,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassificationResiduals {
    pub flat: f64,
    pub constant_curv_eps: f64,
    pub symmetric: f64,
    pub ricci_symmetric: f64,
    pub semi_symmetric: f64,
    pub ricci_semisymmetric: f64,
    pub einstein_ps: f64,
    pub einstein_general: f64,
}

fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

impl CurvatureFrame {
    pub fn from_geometry(geo: &Geometry) -> Self {
        let n = geo.dim();
        let frame = geo.frame();
        let mut r_scale: f64 = 0.0;
        // R^l_ijk as order-1 jets
        let zero = Jet::constant(n, 1, 0.0);
        let mut r_up_jets = vec![zero.clone(); n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for k in 0..n {
                        let a = geo.gamma_jet(l, j, k).derivative(i);
                        let b = geo.gamma_jet(l, i, k).derivative(j);
                        r_scale = r_scale.max(a.value().abs()).max(b.value().abs());
                        let mut acc = &a - &b;
                        for p in 0..n {
                            let c = geo.gamma_jet(l, i, p) * geo.gamma_jet(p, j, k);
                            let d = geo.gamma_jet(l, j, p) * geo.gamma_jet(p, i, k);
                            r_scale = r_scale.max(c.value().abs()).max(d.value().abs());
                            acc = &(&acc + &c) - &d;
                        }
                        r_up_jets[idx4(n, l, i, j, k)] = acc.truncate(1);
                    }
                }
            }
        }
        // R_ijkl = g_lm R^m_ijk
        let mut r_down_jets = vec![zero.clone(); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = Jet::dot((0..n).map(|m| frame.g_jet(l, m)), (0..n).map(|m| &r_up_jets[idx4(n, m, i, j, k)]))
                            .expect("n >= 1");
                        for m in 0..n {
                            r_scale = r_scale.max((frame.g(l, m) * r_up_jets[idx4(n, m, i, j, k)].value()).abs());
                        }
                        r_down_jets[idx4(n, i, j, k, l)] = v;
                    }
                }
            }
        }
        // S_jk = R^i_ijk
        let mut s_scale: f64 = 0.0;
        let mut s_jets = vec![zero.clone(); n * n];
        for j in 0..n {
            for k in 0..n {
                let mut acc = zero.clone();
                for i in 0..n {
                    let t = &r_up_jets[idx4(n, i, i, j, k)];
                    s_scale = s_scale.max(t.value().abs());
                    acc = &acc + t;
                }
                s_jets[j * n + k] = acc;
            }
        }
        let mut scalar = 0.0;
        for j in 0..n {
            for k in 0..n {
                let t = frame.ginv(j, k) * s_jets[j * n + k].value();
                s_scale = s_scale.max(t.abs());
                scalar += t;
            }
        }
        let values = |jets: &[Jet]| jets.iter().map(Jet::value).collect::<Vec<_>>();
        let r_up = LabeledTensor::new(n, vec![Up, Down, Down, Down], values(&r_up_jets)).expect("finite curvature");
        let r_down = LabeledTensor::new(n, vec![Down; 4], values(&r_down_jets)).expect("finite curvature");
        let ricci = LabeledTensor::new(n, vec![Down, Down], values(&s_jets)).expect("finite curvature");
        let (nabla_r, nabla_r_scale) = geo.covariant_derivative_jets(&[Down; 4], &r_down_jets);
        let (nabla_s, nabla_s_scale) = geo.covariant_derivative_jets(&[Down, Down], &s_jets);
        let g = LabeledTensor::from_fn(n, vec![Down, Down], |ix| frame.g(ix[0], ix[1]));
        CurvatureFrame {
            point: frame.point().to_vec(),
            epsilon: frame.epsilon(),
            g,
            r_up,
            r_down,
            ricci,
            scalar,
            nabla_r,
            nabla_s,
            r_scale,
            s_scale,
            nabla_r_scale,
            nabla_s_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// [R(∂i,∂j)∂k]^l
    pub fn r(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.r_up.get(&[l, i, j, k])
    }

    pub fn rd(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r_down.get(&[i, j, k, l])
    }

    pub fn s(&self, j: usize, k: usize) -> f64 {
        self.ricci.get(&[j, k])
    }

    fn g(&self, i: usize, j: usize) -> f64 {
        self.g.get(&[i, j])
    }

    /// R(X,Y,Z,W) for arbitrary vectors.
    pub fn r_down_of(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += x[i] * y[j] * z[k] * w[l] * self.rd(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    /// K = R(X,Y,Y,X) / (g(X,X)g(Y,Y) − g(X,Y)²).
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let n = self.dim();
        let gv = |a: &[f64], b: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += a[i] * self.g(i, j) * b[j];
                }
            }
            s
        };
        let (xx, yy, xy) = (gv(x, x), gv(y, y), gv(x, y));
        let denom = xx * yy - xy * xy;
        let scale = (xx * yy).abs().max(xy * xy).max(1e-300);
        if !(denom.abs() > 1e-10 * scale) {
            return Err(Error::DegeneratePlane { denominator: denom.abs() });
        }
        Ok(self.r_down_of(x, y, y, x) / denom)
    }

    /// Largest violation of R_ijkl = −R_jikl = −R_ijlk = R_klij.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        res.scale_by(self.r_scale);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.rd(i, j, k, l);
                        res.check(v, -self.rd(j, i, k, l));
                        res.check(v, -self.rd(i, j, l, k));
                        res.check(v, self.rd(k, l, i, j));
                    }
                }
            }
        }
        res.value()
    }

    pub fn first_bianchi(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        res.scale_by(self.r_scale);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        res.zero(self.rd(i, j, k, l) + self.rd(j, k, i, l) + self.rd(k, i, j, l));
                    }
                }
            }
        }
        res.value()
    }

    /// Cyclic sum of ∇R over the differentiation slot and the first pair.
    pub fn second_bianchi(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        res.scale_by(self.nabla_r_scale);
        let nr = |m: usize, i: usize, j: usize, k: usize, l: usize| self.nabla_r.get(&[m, i, j, k, l]);
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            res.zero(nr(m, i, j, k, l) + nr(i, j, m, k, l) + nr(j, m, i, k, l));
                        }
                    }
                }
            }
        }
        res.value()
    }

    pub fn ricci_symmetry(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        res.scale_by(self.s_scale);
        for j in 0..n {
            for k in 0..n {
                res.check(self.s(j, k), self.s(k, j));
            }
        }
        res.value()
    }

    /// R0(X,Y,Z,W) = g(Y,Z)g(X,W) − g(X,Z)g(Y,W).
    pub fn r0(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.g(j, k) * self.g(i, l) - self.g(i, k) * self.g(j, l)
    }

    pub fn classification_residuals(&self) -> ClassificationResiduals {
        let n = self.dim();
        let eps = self.epsilon;
        // These compare R and S against model tensors, so they are scaled by
        // the compared components rather than by the terms that built R.
        let mut flat = Residual::new();
        let mut cc = Residual::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.rd(i, j, k, l);
                        flat.zero(v);
                        cc.check(v, -eps * self.r0(i, j, k, l));
                    }
                }
            }
        }
        let vanishing = |t: &LabeledTensor, scale: f64| {
            let mut r = Residual::new();
            r.scale_by(scale);
            for v in t.data() {
                r.zero(*v);
            }
            r.value()
        };
        let mut ein_ps = Residual::new();
        let mut ein_gen = Residual::new();
        for j in 0..n {
            for k in 0..n {
                ein_ps.check(self.s(j, k), -eps * (n as f64 - 1.0) * self.g(j, k));
                ein_gen.check(self.s(j, k), self.scalar / n as f64 * self.g(j, k));
            }
        }
        ClassificationResiduals {
            flat: flat.value(),
            constant_curv_eps: cc.value(),
            symmetric: vanishing(&self.nabla_r, self.nabla_r_scale),
            ricci_symmetric: vanishing(&self.nabla_s, self.nabla_s_scale),
            semi_symmetric: self.r_dot_r(),
            ricci_semisymmetric: self.r_dot_s(),
            einstein_ps: ein_ps.value(),
            einstein_general: ein_gen.value(),
        }
    }

    /// max over all index tuples of (R(∂a,∂b)·R)(∂c,∂d)∂e, curvature acting
    /// as a derivation.
    pub fn r_dot_r(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                // A^l_k = [R(∂a,∂b)∂k]^l
                let am = |l: usize, k: usize| self.r(l, a, b, k);
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            for l in 0..n {
                                let mut total = 0.0;
                                for p in 0..n {
                                    let terms = [
                                        am(l, p) * self.r(p, c, d, e),
                                        -self.r(l, c, d, p) * am(p, e),
                                        -am(p, c) * self.r(l, p, d, e),
                                        -am(p, d) * self.r(l, c, p, e),
                                    ];
                                    for t in terms {
                                        res.scale_by(t);
                                        total += t;
                                    }
                                }
                                res.zero(total);
                            }
                        }
                    }
                }
            }
        }
        res.value()
    }

    /// max over all index tuples of (R(∂a,∂b)·S)(∂c,∂d).
    pub fn r_dot_s(&self) -> f64 {
        let n = self.dim();
        let mut res = Residual::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        let mut total = 0.0;
                        for p in 0..n {
                            let t1 = -self.r(p, a, b, c) * self.s(p, d);
                            let t2 = -self.r(p, a, b, d) * self.s(c, p);
                            res.scale_by(t1);
                            res.scale_by(t2);
                            total += t1 + t2;
                        }
                        res.zero(total);
                    }
                }
            }
        }
        res.value()
    }

    /// Least-squares α with ∇_W T ≈ α(W) T in the Euclidean component inner
    /// product. Errors when T vanishes.
    pub fn recurrence_fit(&self, target: RecurrenceTarget) -> Result<RecurrenceFit> {
        let n = self.dim();
        let (t, nt) = match target {
            RecurrenceTarget::Riemann => (&self.r_down, &self.nabla_r),
            RecurrenceTarget::Ricci => (&self.ricci, &self.nabla_s),
        };
        let tn = t.max_abs();
        if tn <= 1e-9 {
            return Err(Error::IllPosed { max_abs: tn });
        }
        let len = t.data().len();
        let tt: f64 = t.data().iter().map(|v| v * v).sum();
        let mut alpha = vec![0.0; n];
        let mut residual: f64 = 0.0;
        for (w, a) in alpha.iter_mut().enumerate() {
            let slice = &nt.data()[w * len..(w + 1) * len];
            *a = slice.iter().zip(t.data()).map(|(x, y)| x * y).sum::<f64>() / tt;
            for (x, y) in slice.iter().zip(t.data()) {
                residual = residual.max((x - *a * y).abs());
            }
        }
        Ok(RecurrenceFit {
            alpha_hat: alpha,
            residual,
            target,
        })
    }
}

pub fn riemann(chart: &StructuredChart, point: &[f64]) -> Result<CurvatureFrame> {
    Ok(CurvatureFrame::from_geometry(&Geometry::at(chart, point)?))
}

/// Ricci tensor and scalar curvature.
pub fn ricci(chart: &StructuredChart, point: &[f64]) -> Result<(LabeledTensor, f64)> {
    let c = riemann(chart, point)?;
    Ok((c.ricci, c.scalar))
}

pub fn sectional(chart: &StructuredChart, point: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    let n = chart.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if x.len() != n { x.len() } else { y.len() },
        });
    }
    riemann(chart, point)?.sectional(x, y)
}

pub fn classification_residuals(chart: &StructuredChart, point: &[f64]) -> Result<ClassificationResiduals> {
    Ok(riemann(chart, point)?.classification_residuals())
}

pub fn recurrence_fit(chart: &StructuredChart, point: &[f64], target: RecurrenceTarget) -> Result<RecurrenceFit> {
    riemann(chart, point)?.recurrence_fit(target)
}

/// max-abs of α, for deciding whether a fit is proper.
pub fn alpha_norm(fit: &RecurrenceFit) -> f64 {
    max_abs(&fit.alpha_hat)
}
