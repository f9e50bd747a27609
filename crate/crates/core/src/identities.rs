//! Pointwise identity checks on coordinate basis vectors. Multilinearity makes
//! this equivalent to checking all vector arguments.

use serde::Serialize;

use crate::charts::{AxiomReport, Frame};
use crate::curvature::CurvatureFrame;
use crate::levi_civita::{Geometry, NormalityTensors, StructureField};
use crate::residual::Residual;
use crate::tensors::LabeledTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Normality,
    Phi,
    Curvature,
    Ricci,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Axioms, Suite::Normality, Suite::Phi, Suite::Curvature, Suite::Ricci];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Normality => "normality",
            Suite::Phi => "phi",
            Suite::Curvature => "curvature",
            Suite::Ricci => "ricci",
        }
    }

    pub fn from_id(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.id() == s)
    }
}

/// Which charts an identity is claimed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Any almost paracontact structure.
    AnyChart,
    /// Charts whose metric axioms hold.
    AlmostParacontactMetric,
    ParaSasakian,
    /// Para-Sasakian charts of constant curvature −ε.
    ConstantCurvature,
}

impl Tier {
    pub fn id(self) -> &'static str {
        match self {
            Tier::AnyChart => "any_chart",
            Tier::AlmostParacontactMetric => "almost_paracontact_metric",
            Tier::ParaSasakian => "para_sasakian",
            Tier::ConstantCurvature => "constant_curvature",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityDef {
    pub suite: Suite,
    pub name: &'static str,
    pub tier: Tier,
    pub statement: &'static str,
}

const fn def(suite: Suite, name: &'static str, tier: Tier, statement: &'static str) -> IdentityDef {
    IdentityDef {
        suite,
        name,
        tier,
        statement,
    }
}

use Suite::*;
use Tier::*;

/// Every identity in evaluation order.
pub const IDENTITIES: &[IdentityDef] = &[
    def(Axioms, "phi_squared", AnyChart, "phi^2 = I - eta(x)xi"),
    def(Axioms, "eta_xi", AnyChart, "eta(xi) = 1"),
    def(Axioms, "phi_xi", AnyChart, "phi xi = 0"),
    def(Axioms, "eta_phi", AnyChart, "eta o phi = 0"),
    def(Axioms, "phi_cubed", AnyChart, "phi^3 = phi"),
    def(Axioms, "rank_phi", AnyChart, "rank phi = n - 1"),
    def(Axioms, "compatibility", AnyChart, "g(phi X, phi Y) = g(X,Y) - eps eta(X) eta(Y)"),
    def(Axioms, "phi_symmetry", AnyChart, "g(X, phi Y) = g(phi X, Y)"),
    def(Axioms, "xi_lowering", AnyChart, "g(X, xi) = eps eta(X)"),
    def(Axioms, "xi_norm", AnyChart, "g(xi, xi) = eps"),
    def(Axioms, "ker_eta_nondegenerate", AnyChart, "g restricted to ker eta is nondegenerate"),
    def(Normality, "n4_deta", AnyChart, "N4(X) = 2 deta(xi, X)"),
    def(Normality, "n2_deta", AnyChart, "N2(X,Y) = 2(deta(phi X, Y) + deta(X, phi Y))"),
    def(Normality, "n1_x_xi", AnyChart, "N1(X, xi) = -N3(phi X)"),
    def(Normality, "n1_phi_x_y", AnyChart, "N1(phi X, Y) = -phi[phi,phi](X,Y) - N2(X,Y) xi - eta(X) N3(Y)"),
    def(Normality, "n2_x_phi_y", AnyChart, "N2(X, phi Y) = 2(deta(phi X, phi Y) + deta(X,Y)) + eta(Y) N4(X)"),
    def(Normality, "n4_chain", AnyChart, "N4(X) = eta(N1(X, xi)) = N2(xi, phi X) = -eta(N3(phi X))"),
    def(Normality, "n4_phi_x", AnyChart, "N4(phi X) = -eta(N3(X))"),
    def(Normality, "phi_n1_x_xi", AnyChart, "phi(N1(X, xi)) = N3(X) + N4(phi X) xi"),
    def(Normality, "eta_n1_phi_x_y", AnyChart, "eta(N1(phi X, Y)) = -N2(X,Y) + eta(X) N4(phi Y)"),
    def(
        Normality,
        "n1_connection_form",
        AlmostParacontactMetric,
        "N1(X,Y) = (D_X phi)phi Y - (D_Y phi)phi X + (D_{phi X} phi)Y - (D_{phi Y} phi)X - eta(X) D_Y xi + eta(Y) D_X xi",
    ),
    def(Phi, "fundamental_symmetric", AlmostParacontactMetric, "Phi(X,Y) = Phi(Y,X)"),
    def(Phi, "nabla_fundamental", AlmostParacontactMetric, "(D_X Phi)(Y,Z) = g((D_X phi)Y, Z)"),
    def(Phi, "nabla_fundamental_symmetric", AlmostParacontactMetric, "(D_X Phi)(Y,Z) = (D_X Phi)(Z,Y)"),
    def(
        Phi,
        "nabla_fundamental_phi",
        AlmostParacontactMetric,
        "(D_X Phi)(phi Y, phi Z) = -(D_X Phi)(Y,Z) + eta(Y)(D_X Phi)(xi,Z) + eta(Z)(D_X Phi)(Y,xi)",
    ),
    def(Curvature, "r_xy_xi", ParaSasakian, "R(X,Y)xi = eta(X)Y - eta(Y)X"),
    def(Curvature, "r_xyz_xi", ParaSasakian, "R(X,Y,Z,xi) = -eta(X)g(Y,Z) + eta(Y)g(X,Z)"),
    def(Curvature, "eta_r_xyz", ParaSasakian, "eta(R(X,Y)Z) = -eps eta(X)g(Y,Z) + eps eta(Y)g(X,Z)"),
    def(Curvature, "r_xi_x_y", ParaSasakian, "R(xi,X)Y = -eps g(X,Y)xi + eta(Y)X"),
    def(
        Curvature,
        "r_phi_z_w",
        ParaSasakian,
        "R(X,Y,phi Z,W) - R(X,Y,Z,phi W) = eps Phi(Y,Z)g(phi X,phi W) - ... (twelve terms)",
    ),
    def(
        Curvature,
        "r_phi_z_phi_w",
        ParaSasakian,
        "R(X,Y,phi Z,phi W) - R(X,Y,Z,W) = eps Phi(Y,Z)Phi(X,W) - ... (eight terms)",
    ),
    def(Curvature, "r_phi_pairs", ParaSasakian, "R(X,Y,phi Z,phi W) = R(phi X,phi Y,Z,W)"),
    def(Curvature, "r_phi_all", ParaSasakian, "R(phi X,phi Y,phi Z,phi W) = R(X,Y,Z,W) + eta terms"),
    def(
        Curvature,
        "constant_curvature_phi",
        ConstantCurvature,
        "Phi(Y,Z)Phi(X,W) - Phi(X,Z)Phi(Y,W) = -g(phi Y,phi Z)g(phi X,phi W) + g(phi X,phi Z)g(phi Y,phi W)",
    ),
    def(
        Curvature,
        "constant_curvature_phi_plus",
        ConstantCurvature,
        "Phi(Y,Z)Phi(X,W) - Phi(X,Z)Phi(Y,W) = g(phi Y,phi Z)g(phi X,phi W) - g(phi X,phi Z)g(phi Y,phi W)",
    ),
    def(Ricci, "s_phi_phi", ParaSasakian, "S(phi Y, phi Z) = S(Y,Z) + (n-1) eta(Y) eta(Z)"),
    def(Ricci, "s_phi_symmetric", ParaSasakian, "S(phi Y, Z) = S(Y, phi Z)"),
    def(Ricci, "s_xi", ParaSasakian, "S(Y, xi) = -(n-1) eta(Y)"),
    def(Ricci, "nabla_s_xi", ParaSasakian, "(D_X S)(Y, xi) = (n-1)(D_X eta)Y - eps S(Y, phi X)"),
    def(Ricci, "nabla_s_xi_minus", ParaSasakian, "(D_X S)(Y, xi) = -(n-1)(D_X eta)Y - eps S(Y, phi X)"),
];

/// Everything needed to evaluate the identities at one point.
pub struct PointData<'a> {
    pub geo: &'a Geometry,
    pub axioms: &'a AxiomReport,
    pub normality: &'a NormalityTensors,
    pub curvature: &'a CurvatureFrame,
}

/// Residual accumulator fed with the individual terms of each side.
struct Check(Residual);

impl Check {
    fn new() -> Self {
        Check(Residual::new())
    }

    fn terms(&mut self, lhs: &[f64], rhs: &[f64]) {
        for t in lhs.iter().chain(rhs) {
            self.0.scale_by(*t);
        }
        self.0.check(lhs.iter().sum(), rhs.iter().sum());
    }

    fn eq(&mut self, lhs: f64, rhs: f64) {
        self.0.check(lhs, rhs);
    }

    fn value(&self) -> f64 {
        self.0.value()
    }
}

struct Ops<'a> {
    n: usize,
    f: &'a Frame,
}

impl Ops<'_> {
    fn e(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        v[i] = 1.0;
        v
    }

    fn phi_e(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|a| self.f.phi(a, i)).collect()
    }

    /// Contract the down slots of `t` (whose first `ups` slots are up) with
    /// the given vectors; returns the remaining up components (or a scalar in
    /// slot 0 when there are none).
    fn apply(&self, t: &LabeledTensor, ups: usize, args: &[&[f64]]) -> Vec<f64> {
        let n = self.n;
        let outer = if ups == 0 { 1 } else { n };
        let mut out = vec![0.0; outer];
        let rank = t.rank();
        let mut idx = vec![0; rank];
        for (flat, v) in t.data().iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            t.unflatten(flat, &mut idx);
            let mut w = *v;
            for (s, a) in args.iter().enumerate() {
                w *= a[idx[ups + s]];
                if w == 0.0 {
                    break;
                }
            }
            out[if ups == 0 { 0 } else { idx[0] }] += w;
        }
        out
    }

    fn scalar(&self, t: &LabeledTensor, args: &[&[f64]]) -> f64 {
        self.apply(t, 0, args)[0]
    }

    fn vector(&self, t: &LabeledTensor, args: &[&[f64]]) -> Vec<f64> {
        self.apply(t, 1, args)
    }

    fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        self.f.g_of(x, y)
    }

    fn eta(&self, x: &[f64]) -> f64 {
        self.f.eta_of(x)
    }

    fn phi(&self, x: &[f64]) -> Vec<f64> {
        self.f.phi_of(x)
    }

    fn xi(&self) -> Vec<f64> {
        self.f.xi_vec()
    }

    /// Φ(X,Y) = g(X, φY)
    fn fund(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g(x, &self.phi(y))
    }

    fn gpp(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g(&self.phi(x), &self.phi(y))
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Residual of every identity of `suite` at one point, in [`IDENTITIES`] order.
pub fn evaluate_suite(suite: Suite, d: &PointData<'_>) -> Vec<f64> {
    match suite {
        Suite::Axioms => axioms(d),
        Suite::Normality => normality(d),
        Suite::Phi => phi_suite(d),
        Suite::Curvature => ps_curvature(d),
        Suite::Ricci => ricci_suite(d),
    }
}

fn axioms(d: &PointData<'_>) -> Vec<f64> {
    let a = d.axioms;
    let n = d.geo.dim();
    let rank_ok = if a.rank_phi + 1 == n { 0.0 } else { 1.0 };
    let ker_ok = if a.ker_eta_nondegenerate(1e-9) && a.index.is_some() { 0.0 } else { 1.0 };
    vec![
        a.phi_squared,
        a.eta_xi,
        a.phi_xi,
        a.eta_phi,
        a.phi_cubed,
        rank_ok,
        a.compatibility,
        a.phi_symmetry,
        a.xi_lowering,
        a.xi_norm,
        ker_ok,
    ]
}

fn normality(d: &PointData<'_>) -> Vec<f64> {
    let o = Ops {
        n: d.geo.dim(),
        f: d.geo.frame(),
    };
    let n = o.n;
    let nt = d.normality;
    let xi = o.xi();
    let n1 = |x: &[f64], y: &[f64]| o.vector(&nt.n1, &[x, y]);
    let n2 = |x: &[f64], y: &[f64]| o.scalar(&nt.n2, &[x, y]);
    let n3 = |x: &[f64]| o.vector(&nt.n3, &[x]);
    let n4 = |x: &[f64]| o.scalar(&nt.n4, &[x]);
    let de = |x: &[f64], y: &[f64]| o.scalar(&nt.d_eta, &[x, y]);
    let nij = |x: &[f64], y: &[f64]| o.vector(&nt.nij_phi, &[x, y]);

    let mut r_n4 = Check::new();
    let mut r_n2 = Check::new();
    let mut r_n1xi = Check::new();
    let mut r_n1phi = Check::new();
    let mut r_n2phi = Check::new();
    let mut r_chain = Check::new();
    let mut r_n4phi = Check::new();
    let mut r_phin1 = Check::new();
    let mut r_etan1 = Check::new();
    let mut r_conn = Check::new();

    let (nabla_phi, _) = d.geo.covariant_derivative_structure(StructureField::Phi);
    let (nabla_xi, _) = d.geo.covariant_derivative_structure(StructureField::Xi);
    // (∇_X φ)Y
    let dphi = |x: &[f64], y: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for m in 0..n {
                    for j in 0..n {
                        s += x[m] * y[j] * nabla_phi.get(&[m, k, j]);
                    }
                }
                s
            })
            .collect()
    };
    let dxi = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|k| (0..n).map(|m| x[m] * nabla_xi.get(&[m, k])).sum()).collect()
    };

    for i in 0..n {
        let x = o.e(i);
        let px = o.phi_e(i);
        r_n4.terms(&[n4(&x)], &[2.0 * de(&xi, &x)]);
        let n1x = n1(&x, &xi);
        let n3px = n3(&px);
        for k in 0..n {
            r_n1xi.terms(&[n1x[k]], &[-n3px[k]]);
        }
        let n4x = n4(&x);
        r_chain.eq(n4x, o.eta(&n1x));
        r_chain.eq(n4x, n2(&xi, &px));
        r_chain.eq(n4x, -o.eta(&n3px));
        let n3x = n3(&x);
        r_n4phi.eq(n4(&px), -o.eta(&n3x));
        let phin1 = o.phi(&n1x);
        let n4px = n4(&px);
        for k in 0..n {
            r_phin1.terms(&[phin1[k]], &[n3x[k], n4px * xi[k]]);
        }
        for j in 0..n {
            let y = o.e(j);
            let py = o.phi_e(j);
            r_n2.terms(&[n2(&x, &y)], &[2.0 * de(&px, &y), 2.0 * de(&x, &py)]);
            let n1pxy = n1(&px, &y);
            let phinij = o.phi(&nij(&x, &y));
            let n2xy = n2(&x, &y);
            let n3y = n3(&y);
            let eta_x = o.eta(&x);
            for k in 0..n {
                r_n1phi.terms(&[n1pxy[k]], &[-phinij[k], -n2xy * xi[k], -eta_x * n3y[k]]);
            }
            r_n2phi.terms(
                &[n2(&x, &py)],
                &[2.0 * de(&px, &py), 2.0 * de(&x, &y), o.eta(&y) * n4x],
            );
            r_etan1.terms(&[o.eta(&n1pxy)], &[-n2xy, eta_x * n4(&py)]);
            let lhs = n1(&x, &y);
            let parts = [
                dphi(&x, &py),
                scaled(&dphi(&y, &px), -1.0),
                dphi(&px, &y),
                scaled(&dphi(&py, &x), -1.0),
                scaled(&dxi(&y), -eta_x),
                scaled(&dxi(&x), o.eta(&y)),
            ];
            for k in 0..n {
                let rhs: Vec<f64> = parts.iter().map(|p| p[k]).collect();
                r_conn.terms(&[lhs[k]], &rhs);
            }
        }
    }
    vec![
        r_n4.value(),
        r_n2.value(),
        r_n1xi.value(),
        r_n1phi.value(),
        r_n2phi.value(),
        r_chain.value(),
        r_n4phi.value(),
        r_phin1.value(),
        r_etan1.value(),
        r_conn.value(),
    ]
}

fn phi_suite(d: &PointData<'_>) -> Vec<f64> {
    let o = Ops {
        n: d.geo.dim(),
        f: d.geo.frame(),
    };
    let n = o.n;
    let (nabla_fund, _) = d.geo.covariant_derivative_structure(StructureField::Fundamental);
    let (nabla_phi, _) = d.geo.covariant_derivative_structure(StructureField::Phi);
    let xi = o.xi();
    // (∇_m Φ)(Y,Z)
    let nf = |m: usize, y: &[f64], z: &[f64]| -> f64 {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += y[a] * z[b] * nabla_fund.get(&[m, a, b]);
            }
        }
        s
    };
    let mut sym = Check::new();
    let mut form = Check::new();
    let mut nsym = Check::new();
    let mut nphi = Check::new();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (o.e(i), o.e(j));
            sym.eq(o.fund(&x, &y), o.fund(&y, &x));
        }
    }
    for m in 0..n {
        for i in 0..n {
            let y = o.e(i);
            let py = o.phi_e(i);
            // (∇_m φ)∂i
            let dphi_y: Vec<f64> = (0..n).map(|k| nabla_phi.get(&[m, k, i])).collect();
            for j in 0..n {
                let z = o.e(j);
                let pz = o.phi_e(j);
                let v = nabla_fund.get(&[m, i, j]);
                form.eq(v, o.g(&dphi_y, &z));
                nsym.eq(v, nabla_fund.get(&[m, j, i]));
                nphi.terms(
                    &[nf(m, &py, &pz)],
                    &[-v, o.eta(&y) * nf(m, &xi, &z), o.eta(&z) * nf(m, &y, &xi)],
                );
            }
        }
    }
    vec![sym.value(), form.value(), nsym.value(), nphi.value()]
}

fn ps_curvature(d: &PointData<'_>) -> Vec<f64> {
    let o = Ops {
        n: d.geo.dim(),
        f: d.geo.frame(),
    };
    let n = o.n;
    let c = d.curvature;
    let eps = d.geo.epsilon();
    let xi = o.xi();
    let r_vec = |x: &[f64], y: &[f64], z: &[f64]| o.vector(&c.r_up, &[x, y, z]);
    let rd = |x: &[f64], y: &[f64], z: &[f64], w: &[f64]| c.r_down_of(x, y, z, w);

    let mut rxyxi = Check::new();
    let mut rxyzxi = Check::new();
    let mut etar = Check::new();
    let mut rxix = Check::new();
    let mut r1 = Check::new();
    let mut r2 = Check::new();
    let mut r3 = Check::new();
    let mut r4 = Check::new();
    let mut cc = Check::new();
    let mut cc_plus = Check::new();

    for i in 0..n {
        let x = o.e(i);
        let px = o.phi_e(i);
        for j in 0..n {
            let y = o.e(j);
            let py = o.phi_e(j);
            let lhs = r_vec(&x, &y, &xi);
            let rhs = sub(&scaled(&y, o.eta(&x)), &scaled(&x, o.eta(&y)));
            for k in 0..n {
                rxyxi.eq(lhs[k], rhs[k]);
            }
            // R(ξ, X)Y with X = ∂i, Y = ∂j
            let lhs = r_vec(&xi, &x, &y);
            for k in 0..n {
                rxix.terms(&[lhs[k]], &[-eps * o.g(&x, &y) * xi[k], o.eta(&y) * x[k]]);
            }
            for k in 0..n {
                let z = o.e(k);
                let pz = o.phi_e(k);
                rxyzxi.terms(
                    &[rd(&x, &y, &z, &xi)],
                    &[-o.eta(&x) * o.g(&y, &z), o.eta(&y) * o.g(&x, &z)],
                );
                etar.terms(
                    &[o.eta(&r_vec(&x, &y, &z))],
                    &[-eps * o.eta(&x) * o.g(&y, &z), eps * o.eta(&y) * o.g(&x, &z)],
                );
                for l in 0..n {
                    let w = o.e(l);
                    let pw = o.phi_e(l);
                    let (ex, ey, ez, ew) = (o.eta(&x), o.eta(&y), o.eta(&z), o.eta(&w));
                    let rxyzw = rd(&x, &y, &z, &w);
                    let rxypzpw = rd(&x, &y, &pz, &pw);
                    r1.terms(
                        &[rd(&x, &y, &pz, &w), -rd(&x, &y, &z, &pw)],
                        &[
                            eps * o.fund(&y, &z) * o.gpp(&x, &w),
                            -eps * o.fund(&x, &z) * o.gpp(&y, &w),
                            eps * o.fund(&y, &w) * o.gpp(&x, &z),
                            -eps * o.fund(&x, &w) * o.gpp(&y, &z),
                            ey * ez * o.fund(&x, &w),
                            -ex * ez * o.fund(&y, &w),
                            ey * ew * o.fund(&x, &z),
                            -ex * ew * o.fund(&y, &z),
                        ],
                    );
                    let eta_terms = [
                        ez * ey * o.g(&x, &w),
                        -ez * ex * o.g(&y, &w),
                        -ew * ey * o.g(&x, &z),
                        ew * ex * o.g(&y, &z),
                    ];
                    let mut rhs2 = vec![
                        eps * o.fund(&y, &z) * o.fund(&x, &w),
                        -eps * o.fund(&x, &z) * o.fund(&y, &w),
                        eps * o.gpp(&x, &z) * o.gpp(&y, &w),
                        -eps * o.gpp(&y, &z) * o.gpp(&x, &w),
                    ];
                    rhs2.extend(eta_terms);
                    r2.terms(&[rxypzpw, -rxyzw], &rhs2);
                    r3.terms(&[rxypzpw], &[rd(&px, &py, &z, &w)]);
                    let mut rhs4 = vec![rxyzw];
                    rhs4.extend(eta_terms);
                    r4.terms(&[rd(&px, &py, &pz, &pw)], &rhs4);
                    let lhs_cc = [o.fund(&y, &z) * o.fund(&x, &w), -o.fund(&x, &z) * o.fund(&y, &w)];
                    let g1 = o.gpp(&y, &z) * o.gpp(&x, &w);
                    let g2 = o.gpp(&x, &z) * o.gpp(&y, &w);
                    cc.terms(&lhs_cc, &[-g1, g2]);
                    cc_plus.terms(&lhs_cc, &[g1, -g2]);
                }
            }
        }
    }
    vec![
        rxyxi.value(),
        rxyzxi.value(),
        etar.value(),
        rxix.value(),
        r1.value(),
        r2.value(),
        r3.value(),
        r4.value(),
        cc.value(),
        cc_plus.value(),
    ]
}

fn ricci_suite(d: &PointData<'_>) -> Vec<f64> {
    let o = Ops {
        n: d.geo.dim(),
        f: d.geo.frame(),
    };
    let n = o.n;
    let c = d.curvature;
    let eps = d.geo.epsilon();
    let nm1 = n as f64 - 1.0;
    let xi = o.xi();
    let s = |x: &[f64], y: &[f64]| o.scalar(&c.ricci, &[x, y]);
    let (nabla_eta, _) = d.geo.covariant_derivative_structure(StructureField::Eta);
    let mut sphi = Check::new();
    let mut ssym = Check::new();
    let mut sxi = Check::new();
    let mut nsxi = Check::new();
    let mut nsxi_minus = Check::new();
    for i in 0..n {
        let y = o.e(i);
        let py = o.phi_e(i);
        sxi.terms(&[s(&y, &xi)], &[-nm1 * o.eta(&y)]);
        for j in 0..n {
            let z = o.e(j);
            let pz = o.phi_e(j);
            sphi.terms(&[s(&py, &pz)], &[s(&y, &z), nm1 * o.eta(&y) * o.eta(&z)]);
            ssym.eq(s(&py, &z), s(&y, &pz));
        }
    }
    for m in 0..n {
        let pxm = o.phi_e(m);
        for i in 0..n {
            let y = o.e(i);
            let lhs: f64 = (0..n).map(|b| xi[b] * c.nabla_s.get(&[m, i, b])).sum();
            nsxi.terms(&[lhs], &[nm1 * nabla_eta.get(&[m, i]), -eps * s(&y, &pxm)]);
            nsxi_minus.terms(&[lhs], &[-nm1 * nabla_eta.get(&[m, i]), -eps * s(&y, &pxm)]);
        }
    }
    vec![sphi.value(), ssym.value(), sxi.value(), nsxi.value(), nsxi_minus.value()]
}
