//! Dense small-dimension tensors with explicit index variance.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMove {
    Raise,
    Lower,
}

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("slot {slot} out of range for a tensor with {rank} slots")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot {slot} has variance {found:?}, expected {expected:?}")]
    VarianceMismatch {
        slot: usize,
        expected: Variance,
        found: Variance,
    },
    #[error("contraction needs two distinct slots")]
    SameSlot,
    #[error("expected {expected} components, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite tensor component")]
    NonFinite,
    #[error("metric is not a nonsingular symmetric rank-2 tensor of matching variance")]
    BadMetric,
    #[error("degenerate metric: eigenvalue {eigenvalue:e} within tolerance {tol:e} of zero")]
    DegenerateMetric { eigenvalue: f64, tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTensor {
    dim: usize,
    variances: Vec<Variance>,
    data: Vec<f64>,
}

impl LabeledTensor {
    pub fn new(dim: usize, variances: Vec<Variance>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected = dim.pow(variances.len() as u32);
        if data.len() != expected {
            return Err(TensorError::ShapeMismatch {
                expected,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite);
        }
        Ok(LabeledTensor { dim, variances, data })
    }

    pub fn zeros(dim: usize, variances: Vec<Variance>) -> Self {
        let len = dim.pow(variances.len() as u32);
        LabeledTensor {
            dim,
            variances,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(dim: usize, v: f64) -> Self {
        LabeledTensor {
            dim,
            variances: Vec::new(),
            data: vec![v],
        }
    }

    /// The (1,1) identity δ^i_j.
    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim, vec![Variance::Up, Variance::Down]);
        for i in 0..dim {
            t.data[i * dim + i] = 1.0;
        }
        t
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dim: usize, variances: Vec<Variance>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dim, variances);
        let mut idx = vec![0; t.rank()];
        for flat in 0..t.data.len() {
            t.unflatten(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variances.len()
    }

    pub fn variances(&self) -> &[Variance] {
        &self.variances
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.flat_index(idx);
        self.data[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Componentwise zero test against `tol · max(1, scale)`.
    ///
    /// A g-norm is never used: with an indefinite metric nonzero tensors can
    /// have zero norm.
    pub fn is_zero(&self, tol: f64, scale: f64) -> bool {
        self.max_abs() <= tol * scale.max(1.0)
    }

    pub fn as_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.rank(), 2, "as_matrix needs a rank-2 tensor");
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot >= self.rank() {
            Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    fn expect_variance(&self, slot: usize, expected: Variance) -> Result<(), TensorError> {
        self.check_slot(slot)?;
        let found = self.variances[slot];
        if found != expected {
            return Err(TensorError::VarianceMismatch { slot, expected, found });
        }
        Ok(())
    }

    /// Trace over an up slot and a down slot.
    pub fn contract(&self, up_slot: usize, down_slot: usize) -> Result<LabeledTensor, TensorError> {
        self.expect_variance(up_slot, Variance::Up)?;
        self.expect_variance(down_slot, Variance::Down)?;
        if up_slot == down_slot {
            return Err(TensorError::SameSlot);
        }
        let variances: Vec<Variance> = self
            .variances
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != up_slot && *s != down_slot)
            .map(|(_, v)| *v)
            .collect();
        let mut out = LabeledTensor::zeros(self.dim, variances);
        let mut idx = vec![0; self.rank()];
        let mut out_idx = vec![0; out.rank()];
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            if idx[up_slot] != idx[down_slot] {
                continue;
            }
            let mut k = 0;
            for (s, &i) in idx.iter().enumerate() {
                if s != up_slot && s != down_slot {
                    out_idx[k] = i;
                    k += 1;
                }
            }
            let o = out.flat_index(&out_idx);
            out.data[o] += self.data[flat];
        }
        Ok(out)
    }

    /// Raises or lowers one slot. For `Lower` the metric is g_ij (two down
    /// slots); for `Raise` it is the inverse g^ij (two up slots).
    pub fn move_index(
        &self,
        slot: usize,
        metric: &LabeledTensor,
        direction: IndexMove,
    ) -> Result<LabeledTensor, TensorError> {
        let (from, to) = match direction {
            IndexMove::Lower => (Variance::Up, Variance::Down),
            IndexMove::Raise => (Variance::Down, Variance::Up),
        };
        self.expect_variance(slot, from)?;
        if metric.dim != self.dim || metric.variances != [to, to] {
            return Err(TensorError::BadMetric);
        }
        let m = metric.as_matrix();
        if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
            return Err(TensorError::BadMetric);
        }
        let det = m.determinant();
        if !(det.abs() > 1e-12 * m.amax().max(1.0).powi(self.dim as i32)) {
            return Err(TensorError::DegenerateMetric {
                eigenvalue: det,
                tol: 1e-12,
            });
        }
        let mut variances = self.variances.clone();
        variances[slot] = to;
        let n = self.dim;
        let mut out = LabeledTensor::zeros(n, variances);
        let mut idx = vec![0; self.rank()];
        let mut src = vec![0; self.rank()];
        for flat in 0..out.data.len() {
            out.unflatten(flat, &mut idx);
            src.copy_from_slice(&idx);
            let a = idx[slot];
            let mut acc = 0.0;
            for b in 0..n {
                src[slot] = b;
                acc += m[(a, b)] * self.get(&src);
            }
            out.data[flat] = acc;
        }
        Ok(out)
    }

    /// Reorders slots: slot `s` of the result is slot `perm[s]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> LabeledTensor {
        assert_eq!(perm.len(), self.rank());
        let variances = perm.iter().map(|&p| self.variances[p]).collect();
        let mut src = vec![0; self.rank()];
        LabeledTensor::from_fn(self.dim, variances, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.get(&src)
        })
    }

    pub fn sub(&self, other: &LabeledTensor) -> LabeledTensor {
        assert_eq!(self.variances, other.variances);
        LabeledTensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v.abs())
        }
    })
}

/// Default query tolerance: `1e-9 · max(1, max_abs)`.
pub fn default_tol(m: &DMatrix<f64>) -> f64 {
    1e-9 * m.amax().max(1.0)
}

/// Number of negative eigenvalues of a symmetric matrix.
///
/// Errors if the matrix is asymmetric beyond `tol` or has an eigenvalue in
/// `(-tol, tol)`.
pub fn metric_index(m: &DMatrix<f64>, tol: f64) -> Result<usize, TensorError> {
    if !m.is_square() || (m - m.transpose()).amax() > tol {
        return Err(TensorError::BadMetric);
    }
    let eig = m.clone().symmetric_eigen();
    let mut negative = 0;
    for &e in eig.eigenvalues.iter() {
        if e.abs() < tol {
            return Err(TensorError::DegenerateMetric { eigenvalue: e, tol });
        }
        if e < 0.0 {
            negative += 1;
        }
    }
    Ok(negative)
}

/// Smallest |eigenvalue| of a symmetric matrix.
pub fn min_abs_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, e| a.min(e.abs()))
}

/// Rank from singular values, counting those above `tol · max_abs(m)`.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let scale = m.amax();
    if scale == 0.0 {
        return 0;
    }
    m.clone()
        .singular_values()
        .iter()
        .filter(|s| **s > tol * scale)
        .count()
}
