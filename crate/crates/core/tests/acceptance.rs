//! Acceptance suite. Prints one PASS/FAIL line per criterion, then asserts
//! every clause that is not waived. A waived clause still makes its line
//! FAIL; the reason is printed next to it.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::catch_unwind;

use common::*;
use paralab::charts::{axiom_report, evaluate_frame, StructuredChart};
use paralab::classify::{
    classify_chart, evaluate_point, ClassificationReport, Property, Status, DEFAULT_COUNT, DEFAULT_SEED, DEFAULT_TOL,
};
use paralab::cli::run_cli;
use paralab::curvature::{alpha_norm, riemann, RecurrenceTarget};
use paralab::gallery::{get_chart, list_charts, warped_chart};
use paralab::identities::Suite;
use paralab::jets::eval_jet;
use paralab::json::to_stable_json;
use paralab::levi_civita::Geometry;
use paralab::manifest::load_manifest;
use paralab::parse::parse_expression;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EX5_1: &str = r#"
version = 1
name = "ex5_1_spacelike"
epsilon = 1
coordinates = ["x", "y", "z"]
domain = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
metric = [
  ["exp(2*z)"],
  ["0", "exp(-2*z)"],
  ["0", "0", "1"],
]
phi = [
  ["1", "0", "0"],
  ["0", "-1", "0"],
  ["0", "0", "0"],
]
xi = ["0", "0", "1"]
eta = ["0", "0", "1"]
"#;

struct Clause {
    ok: bool,
    detail: String,
    waiver: Option<&'static str>,
}

#[derive(Default)]
struct Criterion {
    clauses: Vec<Clause>,
}

impl Criterion {
    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.clauses.push(Clause {
            ok,
            detail: detail.into(),
            waiver: None,
        });
    }

    fn waived(&mut self, ok: bool, detail: impl Into<String>, reason: &'static str) {
        self.clauses.push(Clause {
            ok,
            detail: detail.into(),
            waiver: Some(reason),
        });
    }

    fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.ok)
    }

    /// Failing clauses that are not waived.
    fn hard_failures(&self) -> Vec<&str> {
        self.clauses
            .iter()
            .filter(|c| !c.ok && c.waiver.is_none())
            .map(|c| c.detail.as_str())
            .collect()
    }

    fn summary(&self) -> String {
        let failing: Vec<String> = self
            .clauses
            .iter()
            .filter(|c| !c.ok)
            .map(|c| match c.waiver {
                Some(w) => format!("{} [waived: {w}]", c.detail),
                None => c.detail.clone(),
            })
            .collect();
        if failing.is_empty() {
            format!("{} checks", self.clauses.len())
        } else {
            failing.join("; ")
        }
    }
}

fn report(chart: &StructuredChart) -> ClassificationReport {
    classify_chart(chart, DEFAULT_COUNT, DEFAULT_SEED, DEFAULT_TOL).unwrap()
}

fn suite_rows<'a>(r: &'a ClassificationReport, suite: Suite) -> impl Iterator<Item = (&'static str, f64)> + 'a {
    r.identities
        .iter()
        .filter(move |row| row.suite == suite)
        .map(|row| (row.identity, row.max_residual))
}

fn row(r: &ClassificationReport, name: &str) -> f64 {
    r.identity(name).unwrap_or_else(|| panic!("no identity row {name}")).max_residual
}

fn axis(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn criterion_1(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    for (name, r) in reports {
        let chart = get_chart(name).unwrap().chart;
        let n = chart.dim();
        c.check(r.points.len() == 32, format!("{name}: {} samples", r.points.len()));
        let (mut worst, mut bad_rank, mut bad_kernel) = (0.0f64, 0, 0);
        for p in &r.points {
            let a = axiom_report(&chart, p, 1e-9).unwrap();
            worst = worst.max(a.max_structural());
            bad_rank += usize::from(a.rank_phi + 1 != n);
            bad_kernel += usize::from(!a.ker_eta_nondegenerate(1e-9) || a.index.is_none());
        }
        c.check(worst < 1e-9, format!("{name}: structural residual {worst:.2e}"));
        c.check(bad_rank == 0, format!("{name}: rank phi != n-1 at {bad_rank} points"));
        c.check(bad_kernel == 0, format!("{name}: degenerate metric or ker eta at {bad_kernel} points"));
    }
    for (name, nu) in [("ex2_1_g1", "1"), ("ex2_1_g2", "2")] {
        let hist = &reports[name].index_histogram;
        c.check(
            hist.len() == 1 && hist.get(nu) == Some(&32),
            format!("{name}: index histogram {hist:?}, want nu = {nu}"),
        );
    }
    c
}

fn criterion_2(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    c.check(reports.contains_key("ex2_2_g1"), "ex2_2_g1 present");
    for (name, r) in reports {
        for (id, res) in suite_rows(r, Suite::Normality) {
            c.check(res < 1e-8, format!("{name}: {id} residual {res:.2e}"));
        }
    }
    c
}

/// Charts near the gallery: warped charts with random θ and F,
/// and diagonal metrics diag(e^{2cz}, e^{-2dz}, ε) with random c, d.
fn perturbations() -> Vec<StructuredChart> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    for k in 0..10 {
        let a: f64 = rng.gen_range(-1.5..1.5);
        let b: f64 = if k % 2 == 0 { a } else { rng.gen_range(-1.5..1.5) };
        let f1: f64 = rng.gen_range(0.5..2.0);
        let f2: f64 = rng.gen_range(0.0..0.8);
        // θ_x = a*y, θ_y = b*x is a gradient exactly when a = b
        let theta = [format!("{a}*x2"), format!("{b}*x1")];
        let f = [format!("{f1}"), format!("1 + {f2}*x1^2")];
        let chart = warped_chart(1, 1, &[&theta[0], &theta[1]], &[&f[0], &f[1]]).unwrap();
        out.push(chart.with_name(format!("warped_perturbed_{k}")));
    }
    for k in 0..10 {
        let eps: i64 = if k % 2 == 0 { 1 } else { -1 };
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.5) {
                eps as f64
            } else {
                rng.gen_range(-1.5..1.5)
            }
        };
        let (cc, d) = (pick(&mut rng), pick(&mut rng));
        let text = format!(
            r#"
version = 1
name = "diag_perturbed_{k}"
epsilon = {eps}
coordinates = ["x", "y", "z"]
metric = [["exp({}*z)"], ["0", "exp({}*z)"], ["0", "0", "{eps}"]]
phi = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "0"]]
xi = ["0", "0", "1"]
eta = ["0", "0", "1"]
"#,
            2.0 * cc,
            -2.0 * d
        );
        out.push(load_manifest(&text).unwrap().chart);
    }
    out
}

fn criterion_3(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    let extra: Vec<(String, ClassificationReport)> =
        perturbations().iter().map(|ch| (ch.name().to_string(), report(ch))).collect();
    c.check(extra.len() == 20, format!("{} perturbations", extra.len()));
    let all = reports.iter().map(|(n, r)| (n.to_string(), r)).chain(extra.iter().map(|(n, r)| (n.clone(), r)));
    let (closed_col, geodesic_col) = (Property::EtaClosed.position(), Property::XiGeodesic.position());
    let mut distinct = std::collections::BTreeSet::new();
    for (name, r) in all {
        let s = r.status(Property::SParacontact);
        let conj = r.conjunction_status(Property::Paracontact, Property::EtaClosed);
        distinct.insert(s.id());
        c.check(s == conj, format!("{name}: s_paracontact {} vs paracontact AND eta_closed {}", s.id(), conj.id()));
        for (p, res) in r.points.iter().zip(&r.residuals) {
            if res[closed_col] < DEFAULT_TOL {
                c.check(
                    res[geodesic_col] < 1e-9,
                    format!("{name}: xi_geodesic {:.2e} at {p:?} with eta closed", res[geodesic_col]),
                );
            }
        }
    }
    // the perturbations must exercise both outcomes
    c.check(distinct.contains("holds") && distinct.contains("fails"), format!("statuses seen {distinct:?}"));
    c
}

fn criterion_4(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    let r = &reports["ex4_1_default"];
    let col = Property::SParacontact.position();
    let worst = r.residuals.iter().map(|x| x[col]).fold(0.0, f64::max);
    c.check(worst < 1e-8, format!("ex4_1_default: s_paracontact residual {worst:.2e}"));
    c.check(r.epsilon == -1, format!("ex4_1_default: epsilon {}", r.epsilon));
    let hist = &r.index_histogram;
    c.check(hist.len() == 1 && hist.get("1") == Some(&32), format!("ex4_1_default: index histogram {hist:?}"));
    c
}

fn criterion_5(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    for name in ["ex5_1_spacelike", "ex5_1_timelike"] {
        let r = &reports[name];
        let chart = get_chart(name).unwrap().chart;
        let eps = chart.epsilon().value();
        for p in [Property::ParaSasakian, Property::SParacontact, Property::Paracontact, Property::Normal] {
            let s = r.property(p);
            c.check(
                s.status == Status::Holds && s.max_residual < 1e-8,
                format!("{name}: {} {} ({:.2e})", p.id(), s.status.id(), s.max_residual),
            );
        }
        let origin = [0.0; 3];
        let at0 = evaluate_point(&chart, &origin, DEFAULT_TOL).unwrap();
        for p in [Property::Flat, Property::ConstantCurvatureMinusEps] {
            let v = at0.residuals[p.position()];
            c.check(v > 0.5, format!("{name}: {} residual at origin {v:.3}", p.id()));
        }
        let frame = riemann(&chart, &origin).unwrap();
        let sxx = frame.s(2, 2);
        c.check((sxx + 2.0).abs() < 1e-8, format!("{name}: S(xi,xi) = {sxx}"));
        for (a, b, want) in [(0, 2, -eps), (1, 2, -eps), (0, 1, eps)] {
            let k = frame.sectional(&axis(3, a), &axis(3, b)).unwrap();
            c.check((k - want).abs() < 1e-8, format!("{name}: K(d{},d{}) = {k}, want {want}", a + 1, b + 1));
            let fd = fd_sectional(&chart, &origin, a, b, 1e-3);
            c.check((fd - want).abs() < 1e-5, format!("{name}: oracle K(d{},d{}) = {fd}", a + 1, b + 1));
        }
    }
    c
}

fn criterion_6(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    for name in ["ex5_1_spacelike", "ex5_1_timelike", "hyperbolic_ps"] {
        let r = &reports[name];
        let mut rows: Vec<(&str, f64)> = suite_rows(r, Suite::Curvature)
            .filter(|(id, _)| !id.starts_with("constant_curvature"))
            .collect();
        for id in ["s_phi_phi", "s_phi_symmetric", "s_xi"] {
            rows.push((id, row(r, id)));
        }
        c.check(rows.len() == 11, format!("{name}: {} rows", rows.len()));
        for (id, res) in rows {
            c.check(res < 1e-8, format!("{name}: {id} residual {res:.2e}"));
        }
    }
    c
}

fn criterion_7(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    let r = &reports["hyperbolic_ps"];
    for p in [
        Property::Symmetric,
        Property::ConstantCurvatureMinusEps,
        Property::EinsteinPs,
        Property::SemiSymmetric,
        Property::RicciSemisymmetric,
    ] {
        let s = r.property(p);
        c.check(s.max_residual < 1e-8, format!("hyperbolic_ps: {} residual {:.2e}", p.id(), s.max_residual));
    }
    c.check(r.audit.is_empty(), format!("hyperbolic_ps: {} audit findings", r.audit.len()));
    let printed = row(r, "constant_curvature_phi");
    let corrected = row(r, "constant_curvature_phi_plus");
    c.waived(
        printed < 1e-8,
        format!("hyperbolic_ps: constant-curvature corollary as printed, residual {printed:.2e} (sign-corrected form {corrected:.2e})"),
        "the printed right-hand side has the opposite sign of R = -eps R0 substituted into the Phi identity",
    );
    c.check(corrected < 1e-8, format!("hyperbolic_ps: sign-corrected corollary residual {corrected:.2e}"));
    c
}

fn criterion_8(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    let mut seen = 0;
    for (name, r) in reports {
        if r.status(Property::ParaSasakian) != Status::Holds {
            continue;
        }
        seen += 1;
        let chart = get_chart(name).unwrap().chart;
        let flat = r.property(Property::Flat);
        c.check(
            flat.max_residual > 0.5 && flat.status == Status::Fails,
            format!("{name}: flat {} with residual {:.3}", flat.status.id(), flat.max_residual),
        );
        for p in &r.points {
            match riemann(&chart, p).unwrap().recurrence_fit(RecurrenceTarget::Riemann) {
                Ok(fit) => {
                    let a = alpha_norm(&fit);
                    c.check(
                        a < 1e-6 || fit.residual > 1e-3,
                        format!("{name}: proper recurrence fit at {p:?}: |alpha| {a:.2e}, residual {:.2e}", fit.residual),
                    );
                }
                Err(e) => c.check(false, format!("{name}: recurrence fit at {p:?}: {e}")),
            }
        }
    }
    c.check(seen >= 4, format!("{seen} para-Sasakian charts"));
    c
}

fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|v| (0..n).map(move |i| [v.clone(), vec![i]].concat()))
            .collect();
    }
    out
}

fn criterion_9(reports: &BTreeMap<&str, ClassificationReport>) -> Criterion {
    let mut c = Criterion::default();
    for (name, r) in reports {
        let chart = get_chart(name).unwrap().chart;
        let n = chart.dim();
        let points: Vec<Vec<f64>> = interior_points(&chart, 6)
            .into_iter()
            .filter(|p| evaluate_frame(&chart, p).is_ok())
            .take(3)
            .collect();
        c.check(!points.is_empty(), format!("{name}: no usable interior points"));
        let mut worst = [0.0f64; 3];
        for p in &points {
            for (_, field) in chart.fields() {
                let jet = eval_jet(field, p).unwrap();
                let f = field_fn(field);
                for order in 1..=3 {
                    let h = if order == 3 { 1e-3 } else { 1e-4 };
                    for idx in multi_indices(n, order) {
                        let e = rel_err(jet.partial(&idx), fd_partial(&f, p, &idx, h));
                        worst[order - 1] = worst[order - 1].max(e);
                    }
                }
            }
        }
        c.check(worst[0] < 1e-6, format!("{name}: order-1 jet vs FD {:.2e}", worst[0]));
        c.check(worst[1] < 1e-6, format!("{name}: order-2 jet vs FD {:.2e}", worst[1]));
        c.check(worst[2] < 1e-3, format!("{name}: order-3 jet vs FD {:.2e}", worst[2]));

        let (mut nij, mut b1, mut b2) = (0.0f64, 0.0f64, 0.0f64);
        for p in &r.points {
            let geo = Geometry::at(&chart, p).unwrap();
            let (coord, scale) = geo.nijenhuis_phi();
            let (cov, _) = geo.nijenhuis_phi_covariant();
            let diff = coord.data().iter().zip(cov.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            nij = nij.max(diff / scale.max(1.0));
            let frame = riemann(&chart, p).unwrap();
            b1 = b1.max(frame.first_bianchi());
            b2 = b2.max(frame.second_bianchi());
        }
        c.check(nij < 1e-9, format!("{name}: Nijenhuis coordinate vs covariant {nij:.2e}"));
        c.check(b1 < 1e-7, format!("{name}: first Bianchi {b1:.2e}"));
        c.check(b2 < 1e-7, format!("{name}: second Bianchi {b2:.2e}"));
    }
    c
}

fn criterion_10() -> Criterion {
    let mut c = Criterion::default();
    let authored = to_stable_json(&report(&load_manifest(EX5_1).unwrap().chart));
    let builtin = to_stable_json(&report(&get_chart("ex5_1_spacelike").unwrap().chart));
    c.check(authored == builtin, "ex5_1 manifest report byte-identical to gallery");

    for name in list_charts() {
        let (code, out) = run_cli(["classify", name, "--assert"]);
        let first = out.lines().find(|l| l.starts_with("assertion failed")).unwrap_or("");
        c.check(code == 0, format!("classify {name} --assert exit {code} {first}"));
    }

    let coords: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let alphabet: Vec<char> = "xyzexpsincolgtahqr0123456789.eE+-*/^()  \t_,".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut crashes = 0;
    for case in 0..10_000 {
        let len = rng.gen_range(0..48);
        let s: String = if case % 5 == 0 {
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        };
        let survived = catch_unwind(|| {
            if let Ok(e) = parse_expression(&s, &coords) {
                let _ = e.eval(&[0.3, -0.7, 1.1]);
            }
        });
        crashes += usize::from(survived.is_err());
    }
    c.check(crashes == 0, format!("parser fuzz: {crashes} crashes in 10000 inputs"));
    c
}

#[test]
fn acceptance_criteria() {
    let reports: BTreeMap<&str, ClassificationReport> = list_charts()
        .into_iter()
        .map(|name| (name, report(&get_chart(name).unwrap().chart)))
        .collect();

    let results = [
        criterion_1(&reports),
        criterion_2(&reports),
        criterion_3(&reports),
        criterion_4(&reports),
        criterion_5(&reports),
        criterion_6(&reports),
        criterion_7(&reports),
        criterion_8(&reports),
        criterion_9(&reports),
        criterion_10(),
    ];

    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (i, c) in results.iter().enumerate() {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} criterion {}: {}", i + 1, c.summary()).unwrap();
    }
    drop(out);

    let hard: Vec<String> = results
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.hard_failures().into_iter().map(move |d| format!("criterion {}: {d}", i + 1)))
        .collect();
    assert!(hard.is_empty(), "unwaived failures:\n{}", hard.join("\n"));
}
