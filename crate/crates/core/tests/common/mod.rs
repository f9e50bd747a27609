//! Finite-difference oracles. They only call plain `ScalarField::eval`, never
//! the jet engine.

#![allow(dead_code)]

use nalgebra::DMatrix;
use paralab::charts::StructuredChart;
use paralab::expr::ScalarField;

/// Mixed partial ∂_{idx} f by nested central differences.
pub fn fd_partial(f: &dyn Fn(&[f64]) -> f64, point: &[f64], idx: &[usize], h: f64) -> f64 {
    match idx.split_first() {
        None => f(point),
        Some((&i, rest)) => {
            let mut p = point.to_vec();
            p[i] = point[i] + h;
            let plus = fd_partial(f, &p, rest, h);
            p[i] = point[i] - h;
            let minus = fd_partial(f, &p, rest, h);
            (plus - minus) / (2.0 * h)
        }
    }
}

pub fn field_fn(f: &ScalarField) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| f.eval(x).expect("oracle evaluation inside the domain")
}

pub fn metric_at(chart: &StructuredChart, x: &[f64]) -> DMatrix<f64> {
    let n = chart.dim();
    DMatrix::from_fn(n, n, |i, j| chart.g(i, j).eval(x).unwrap())
}

/// gamma[k][i][j] from central differences of the metric components.
pub fn fd_christoffel(chart: &StructuredChart, x: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let n = chart.dim();
    let ginv = metric_at(chart, x).try_inverse().expect("nondegenerate");
    let dg = |k: usize, i: usize, j: usize| fd_partial(&field_fn(chart.g(i, j)), x, &[k], h);
    let mut d = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[k][i][j] = dg(k, i, j);
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[k][i][j] = 0.5
                    * (0..n)
                        .map(|l| ginv[(k, l)] * (d[i][j][l] + d[j][i][l] - d[l][i][j]))
                        .sum::<f64>();
            }
        }
    }
    gamma
}

/// r[l][i][j][k] = (R(∂_i, ∂_j) ∂_k)^l with R(X,Y) = [∇_X, ∇_Y] − ∇_[X,Y],
/// from finite differences of `fd_christoffel`.
pub fn fd_riemann(chart: &StructuredChart, x: &[f64], h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = chart.dim();
    let g0 = fd_christoffel(chart, x, h);
    let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for m in 0..n {
        let mut p = x.to_vec();
        p[m] = x[m] + h;
        let plus = fd_christoffel(chart, &p, h);
        p[m] = x[m] - h;
        let minus = fd_christoffel(chart, &p, h);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dgamma[m][k][i][j] = (plus[k][i][j] - minus[k][i][j]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..n {
                        v += g0[l][i][m] * g0[m][j][k] - g0[l][j][m] * g0[m][i][k];
                    }
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    r
}

/// Sectional curvature of the coordinate plane (a, b) from the FD Riemann tensor.
pub fn fd_sectional(chart: &StructuredChart, x: &[f64], a: usize, b: usize, h: f64) -> f64 {
    let n = chart.dim();
    let g = metric_at(chart, x);
    let r = fd_riemann(chart, x, h);
    // R(X,Y,Y,X) = g(R(X,Y)Y, X)
    let num: f64 = (0..n).map(|l| g[(l, a)] * r[l][a][b][b]).sum();
    num / (g[(a, a)] * g[(b, b)] - g[(a, b)] * g[(a, b)])
}

/// Deterministic interior points of a chart's domain.
pub fn interior_points(chart: &StructuredChart, count: usize) -> Vec<Vec<f64>> {
    let d = chart.domain();
    (0..count)
        .map(|s| {
            d.iter()
                .enumerate()
                .map(|(i, (lo, hi))| {
                    // golden-ratio sequence per axis, kept away from the boundary
                    let t = ((s as f64 + 1.0) * 0.618_033_988_75 * (i as f64 + 1.3)).fract();
                    lo + (hi - lo) * (0.1 + 0.8 * t)
                })
                .collect()
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
