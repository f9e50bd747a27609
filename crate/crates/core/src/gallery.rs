//! Built-in charts: the worked coordinate examples plus two constant
//! curvature para-Sasakian charts used as references.

use crate::charts::{Epsilon, StructuredChart};
use crate::classify::{Property, Status};
use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::parse::parse_expression;

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub chart: StructuredChart,
    /// Statuses the classifier must reproduce at default settings.
    pub expected: Vec<(Property, Status)>,
    pub description: String,
    pub notes: String,
}

const NAMES: [&str; 12] = [
    "ex2_1_g1",
    "ex2_1_g2",
    "ex2_2_g1",
    "ex2_2_g2",
    "ex2_2_g3",
    "ex2_3_g1",
    "ex2_3_g2",
    "ex4_1_default",
    "ex5_1_spacelike",
    "ex5_1_timelike",
    "hyperbolic_ps",
    "pseudosphere_ps",
];

pub fn list_charts() -> Vec<&'static str> {
    NAMES.to_vec()
}

pub fn get_chart(name: &str) -> Result<GalleryEntry> {
    use Property::*;
    use Status::{Fails, Holds};
    let entry = match name {
        "ex2_1_g1" | "ex2_1_g2" => {
            let timelike = name == "ex2_1_g1";
            let (eps, g) = if timelike {
                (Epsilon::Timelike, ["1", "-1", "1"])
            } else {
                (Epsilon::Spacelike, ["-1", "1", "-1"])
            };
            let chart = build(
                name,
                eps,
                &["x", "y", "z"],
                &[(-1.0, 1.0); 3],
                &diag(&g),
                &[&["0", "0", "1"], &["0", "0", "0"], &["1", "0", "0"]],
                &["0", "1", "0"],
                &["0", "1", "0"],
            );
            GalleryEntry {
                chart,
                expected: vec![
                    (AlmostParacontactMetric, Holds),
                    (Paracontact, Fails),
                    (SParacontact, Fails),
                    (ParaSasakian, Fails),
                    (EtaClosed, Holds),
                    (Normal, Holds),
                    (Flat, Holds),
                ],
                description: if timelike {
                    "eta = dy, phi swaps dx and dz, g1 = dx^2 - dy^2 + dz^2 (timelike Lorentzian)".into()
                } else {
                    "eta = dy, phi swaps dx and dz, g2 = -dx^2 + dy^2 - dz^2 (spacelike, index 2)".into()
                },
                notes: String::new(),
            }
        }
        "ex2_2_g1" | "ex2_2_g2" | "ex2_2_g3" => {
            let phi: [&[&str]; 3] = [&["-1", "0", "0"], &["0", "-1", "0"], &["-y", "0", "0"]];
            let (eps, g, domain, description, notes): (_, [&[&str]; 3], _, &str, &str) = match name {
                "ex2_2_g1" => (
                    Epsilon::Timelike,
                    [&["1 - y^2", "0", "y"], &["0", "1", "0"], &["y", "0", "-1"]],
                    [(-1.0, 1.0); 3],
                    "eta = dz - y dx, g1 = dx^2 + dy^2 - eta*eta (timelike Lorentzian, eta not closed)",
                    "",
                ),
                "ex2_2_g2" => (
                    Epsilon::Spacelike,
                    [&["1", "0", "-y"], &["0", "1", "0"], &["-y", "0", "1"]],
                    [(-1.0, 1.0), (1.25, 2.0), (-1.0, 1.0)],
                    "eta = dz - y dx, g2 = dx^2 + dy^2 + dz^2 - y(dx dz + dz dx)",
                    "det g2 = 1 - y^2: g2 is Lorentzian only where |y| > 1 and degenerate at |y| = 1, \
                     so the sampling box is restricted to y in [1.25, 2].",
                ),
                _ => (
                    Epsilon::Spacelike,
                    [&["-1", "0", "-y"], &["0", "1", "0"], &["-y", "0", "1"]],
                    [(-1.0, 1.0); 3],
                    "eta = dz - y dx, g3 = -dx^2 + dy^2 + dz^2 - y(dx dz + dz dx)",
                    "The claimed index of g3 is 2. The eigenvalues of g3 give index 1 at every point \
                     (the (x,z) block has determinant -1 - y^2 < 0); the computed index is reported.",
                ),
            };
            let chart = build(name, eps, &["x", "y", "z"], &domain, &g, &phi, &["0", "0", "1"], &["-y", "0", "1"]);
            let mut expected = vec![(AlmostParacontactMetric, Holds)];
            if name == "ex2_2_g1" {
                expected.extend([(EtaClosed, Fails), (XiGeodesic, Holds)]);
            }
            GalleryEntry {
                chart,
                expected,
                description: description.into(),
                notes: notes.into(),
            }
        }
        "ex2_3_g1" | "ex2_3_g2" => {
            let coords = ["x", "y", "z", "t", "s"];
            let phi: [&[&str]; 5] = [
                &["-1", "0", "0", "0", "0"],
                &["0", "-1", "0", "0", "0"],
                &["0", "0", "-1", "0", "0"],
                &["0", "0", "0", "-1", "0"],
                &["-y", "0", "-t", "0", "0"],
            ];
            let eta = ["-y", "0", "-t", "0", "1"];
            let (eps, g, description, notes): (_, [&[&str]; 5], &str, &str) = if name == "ex2_3_g1" {
                (
                    Epsilon::Timelike,
                    [
                        &["1 - y^2", "0", "-y*t", "0", "y"],
                        &["0", "1", "0", "0", "0"],
                        &["-y*t", "0", "1 - t^2", "0", "t"],
                        &["0", "0", "0", "1", "0"],
                        &["y", "0", "t", "0", "-1"],
                    ],
                    "eta = ds - y dx - t dz, g1 = dx^2 + dy^2 + dz^2 + dt^2 - eta*eta (timelike Lorentzian)",
                    "",
                )
            } else {
                (
                    Epsilon::Spacelike,
                    [
                        &["-1", "0", "0", "0", "-y"],
                        &["0", "-1", "0", "0", "0"],
                        &["0", "0", "1", "0", "-t"],
                        &["0", "0", "0", "1", "0"],
                        &["-y", "0", "-t", "0", "1"],
                    ],
                    "eta = ds - y dx - t dz, g2 = -dx^2 - dy^2 + dz^2 + dt^2 + ds^2 - t(dz ds + ds dz) - y(dx ds + ds dx)",
                    "The claimed index of g2 is 3. The eigenvalue count gives 2 at the origin; the computed \
                     index is reported.",
                )
            };
            let chart = build(name, eps, &coords, &[(-1.0, 1.0); 5], &g, &phi, &["0", "0", "0", "0", "1"], &eta);
            GalleryEntry {
                chart,
                expected: vec![(AlmostParacontactMetric, Holds)],
                description: description.into(),
                notes: notes.into(),
            }
        }
        "ex4_1_default" => {
            let coords: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
            let chart = warped_chart_with_coords(name, 1, 1, &["y", "x"], &["1", "1"], coords)
                .expect("built-in chart is valid");
            GalleryEntry {
                chart,
                expected: vec![
                    (AlmostParacontactMetric, Holds),
                    (SParacontact, Holds),
                    (Paracontact, Holds),
                    (EtaClosed, Holds),
                ],
                description: "p = q = 1, theta = x*y, F = 1: timelike Lorentzian s-paracontact".into(),
                notes: "The double sum in the metric runs over all i, j, so g_ii = F_i exp(-+2z) - theta_i^2 and \
                        g = sum_i F_i exp(-+2z) (dx^i)^2 - eta*eta."
                    .into(),
            }
        }
        "ex5_1_spacelike" | "ex5_1_timelike" => {
            let spacelike = name == "ex5_1_spacelike";
            let (eps, g) = if spacelike {
                (Epsilon::Spacelike, ["exp(2*z)", "exp(-2*z)", "1"])
            } else {
                (Epsilon::Timelike, ["exp(-2*z)", "exp(2*z)", "-1"])
            };
            let chart = build(
                name,
                eps,
                &["x", "y", "z"],
                &[(-1.0, 1.0); 3],
                &diag(&g),
                &diag(&["1", "-1", "0"]),
                &["0", "0", "1"],
                &["0", "0", "1"],
            );
            GalleryEntry {
                chart,
                expected: vec![
                    (AlmostParacontactMetric, Holds),
                    (ParaSasakian, Holds),
                    (SParacontact, Holds),
                    (Paracontact, Holds),
                    (EtaClosed, Holds),
                    (XiGeodesic, Holds),
                    (Normal, Holds),
                    (N2Zero, Holds),
                    (N3Zero, Holds),
                    (N4Zero, Holds),
                    (Flat, Fails),
                    (ConstantCurvatureMinusEps, Fails),
                    (Symmetric, Fails),
                    (SemiSymmetric, Fails),
                    (EinsteinPs, Fails),
                ],
                description: format!(
                    "g = exp(2 eps z) dx^2 + exp(-2 eps z) dy^2 + eps dz^2, phi = diag(1,-1,0), eps = {}",
                    eps.sign()
                ),
                notes: "The exponent x^3 is read as the third coordinate z.".into(),
            }
        }
        "hyperbolic_ps" | "pseudosphere_ps" => {
            let hyperbolic = name == "hyperbolic_ps";
            let (eps, g, description) = if hyperbolic {
                (
                    Epsilon::Spacelike,
                    ["exp(2*z)", "exp(2*z)", "1"],
                    "g = exp(2z)(dx^2 + dy^2) + dz^2, phi = diag(1,1,0), eps = 1: constant curvature -1",
                )
            } else {
                (
                    Epsilon::Timelike,
                    ["exp(-2*z)", "exp(-2*z)", "-1"],
                    "g = exp(-2z)(dx^2 + dy^2) - dz^2, phi = diag(1,1,0), eps = -1: constant curvature +1",
                )
            };
            let chart = build(
                name,
                eps,
                &["x", "y", "z"],
                &[(-1.0, 1.0); 3],
                &diag(&g),
                &diag(&["1", "1", "0"]),
                &["0", "0", "1"],
                &["0", "0", "1"],
            );
            GalleryEntry {
                chart,
                expected: vec![
                    (AlmostParacontactMetric, Holds),
                    (ParaSasakian, Holds),
                    (SParacontact, Holds),
                    (Normal, Holds),
                    (Flat, Fails),
                    (ConstantCurvatureMinusEps, Holds),
                    (Symmetric, Holds),
                    (SemiSymmetric, Holds),
                    (EinsteinPs, Holds),
                    (RicciSymmetric, Holds),
                    (RicciSemisymmetric, Holds),
                    (EinsteinGeneral, Holds),
                ],
                description: description.into(),
                notes: String::new(),
            }
        }
        _ => return Err(Error::UnknownChart(name.to_string())),
    };
    Ok(entry)
}

/// The construction with p + q coordinates split by φ into +1 and −1
/// eigendirections, plus x^n = ξ-coordinate. `theta_grad[i]` is ∂θ/∂x^i and
/// `f[i]` the positive factor F_i, both as expressions in x1..xn.
pub fn warped_chart(p: usize, q: usize, theta_grad: &[&str], f: &[&str]) -> Result<StructuredChart> {
    let n = p + q + 1;
    let coords = (1..=n).map(|i| format!("x{i}")).collect();
    warped_chart_with_coords(&format!("warped_{p}_{q}"), p, q, theta_grad, f, coords)
}

fn warped_chart_with_coords(
    name: &str,
    p: usize,
    q: usize,
    theta_grad: &[&str],
    f: &[&str],
    coords: Vec<String>,
) -> Result<StructuredChart> {
    let m = p + q;
    let n = m + 1;
    if p + q == 0 || theta_grad.len() != m || f.len() != m {
        return Err(Error::InvalidChart(format!(
            "need p + q >= 1 and {m} theta derivatives and F factors"
        )));
    }
    let parse = |s: &str| {
        parse_expression(s, &coords).map_err(|e| Error::InvalidChart(format!("`{s}`: {e}")))
    };
    let theta: Vec<ScalarField> = theta_grad.iter().map(|s| parse(s)).collect::<Result<_>>()?;
    let big_f: Vec<ScalarField> = f.iter().map(|s| parse(s)).collect::<Result<_>>()?;
    let last = ScalarField::coord(m);
    let zero = ScalarField::zero;
    let mut g = vec![vec![zero(); n]; n];
    let mut phi = vec![vec![zero(); n]; n];
    for i in 0..m {
        let sign = if i < p { -2.0 } else { 2.0 };
        let e = (ScalarField::constant(sign) * last.clone()).exp();
        let fe = match big_f[i].constant_value() {
            Some(1.0) => e,
            _ => big_f[i].clone() * e,
        };
        g[i][i] = fe - &theta[i] * &theta[i];
        for j in 0..m {
            if i != j {
                g[i][j] = -(&theta[i] * &theta[j]);
            }
        }
        g[i][m] = -theta[i].clone();
        g[m][i] = -theta[i].clone();
        if i < p {
            phi[i][i] = ScalarField::one();
            phi[m][i] = -theta[i].clone();
        } else {
            phi[i][i] = ScalarField::constant(-1.0);
            phi[m][i] = theta[i].clone();
        }
    }
    g[m][m] = ScalarField::constant(-1.0);
    let mut xi = vec![zero(); n];
    xi[m] = ScalarField::one();
    let mut eta = theta;
    eta.push(ScalarField::one());
    StructuredChart::new(name, Epsilon::Timelike, coords, vec![(-1.0, 1.0); n], g, phi, xi, eta)
}

fn diag<'a>(d: &[&'a str]) -> Vec<Vec<&'a str>> {
    (0..d.len())
        .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { "0" }).collect())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build<R: AsRef<[&'static str]>, S: AsRef<[&'static str]>>(
    name: &str,
    eps: Epsilon,
    coords: &[&str],
    domain: &[(f64, f64)],
    g: &[R],
    phi: &[S],
    xi: &[&str],
    eta: &[&str],
) -> StructuredChart {
    let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    let p = |s: &str| parse_expression(s, &coords).expect("built-in expression parses");
    let rows = |m: Vec<&[&str]>| -> Vec<Vec<ScalarField>> { m.into_iter().map(|r| r.iter().map(|s| p(s)).collect()).collect() };
    let g = rows(g.iter().map(|r| r.as_ref()).collect());
    let phi = rows(phi.iter().map(|r| r.as_ref()).collect());
    let xi = xi.iter().map(|s| p(s)).collect();
    let eta = eta.iter().map(|s| p(s)).collect();
    StructuredChart::new(name, eps, coords.clone(), domain.to_vec(), g, phi, xi, eta).expect("built-in chart is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{axiom_report, evaluate_frame};

    #[test]
    fn every_listed_chart_builds() {
        for name in list_charts() {
            let e = get_chart(name).unwrap();
            assert_eq!(e.chart.name(), name);
        }
        assert!(matches!(get_chart("nope"), Err(Error::UnknownChart(_))));
    }

    #[test]
    fn frame_values_at_origin() {
        let f = evaluate_frame(&get_chart("ex5_1_spacelike").unwrap().chart, &[0.0; 3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.g(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!((f.phi(0, 0), f.phi(1, 1), f.phi(2, 2)), (1.0, -1.0, 0.0));
        let f = evaluate_frame(&get_chart("ex2_2_g1").unwrap().chart, &[0.0; 3]).unwrap();
        assert_eq!((f.eta(0), f.eta(1), f.eta(2)), (0.0, 0.0, 1.0));
    }

    #[test]
    fn ex2_2_g2_determinant() {
        // evaluated outside the sampling box on purpose
        let chart = get_chart("ex2_2_g2").unwrap().chart.with_domain(vec![(-3.0, 3.0); 3]).unwrap();
        let f = evaluate_frame(&chart, &[0.0, 2.0, 0.0]).unwrap();
        assert!((f.det() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn stated_indices() {
        let idx = |name: &str, p: &[f64]| axiom_report(&get_chart(name).unwrap().chart, p, 1e-9).unwrap().index;
        assert_eq!(idx("ex2_1_g1", &[0.1, 0.2, 0.3]), Some(1));
        assert_eq!(idx("ex2_1_g2", &[0.1, 0.2, 0.3]), Some(2));
        assert_eq!(idx("ex2_2_g3", &[0.0, 0.5, 0.0]), Some(1));
        assert_eq!(idx("ex2_3_g2", &[0.0; 5]), Some(2));
        assert_eq!(idx("ex4_1_default", &[0.3, -0.2, 0.5]), Some(1));
    }

    #[test]
    fn warped_chart_general() {
        let c = warped_chart(2, 1, &["x2", "x1", "0"], &["1", "2", "1 + x1^2"]).unwrap();
        assert_eq!(c.dim(), 4);
        let r = axiom_report(&c, &[0.1, 0.2, -0.3, 0.4], 1e-9).unwrap();
        assert!(r.max_structural() < 1e-12, "{r:?}");
        assert_eq!(r.index, Some(1));
        assert!(warped_chart(1, 1, &["y"], &["1", "1"]).is_err());
    }
}
