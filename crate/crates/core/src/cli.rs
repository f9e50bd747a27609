//! Command-line front end. `run_cli` returns the exit code and everything
//! that would be printed, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 `--assert` failure, 2 usage or manifest error,
//! 3 numeric degeneracy.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::charts::StructuredChart;
use crate::classify::{self, ClassificationReport, Property, Status};
use crate::curvature::CurvatureFrame;
use crate::error::Error;
use crate::gallery;
use crate::identities::Suite;
use crate::json::to_stable_json;
use crate::levi_civita::Geometry;
use crate::manifest::{load_manifest_file, to_manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "paralab", version, about = "Classify charts carrying an almost paracontact metric structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Sampling {
    /// Number of sample points.
    #[arg(long, default_value_t = classify::DEFAULT_COUNT)]
    points: usize,
    #[arg(long, default_value_t = classify::DEFAULT_SEED)]
    seed: u64,
    /// Residual tolerance.
    #[arg(long, default_value_t = classify::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in charts.
    List,
    /// Check a manifest file without classifying it.
    Validate { file: String },
    /// Classify a gallery chart or manifest.
    Classify {
        chart: String,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        json: bool,
        /// Exit 1 if an expected status is not reproduced or the audit is nonempty.
        #[arg(long)]
        assert: bool,
    },
    /// Residual table of the identity suites.
    Identities {
        chart: String,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        json: bool,
    },
    /// Connection and curvature at one point.
    Curvature {
        chart: String,
        /// Comma-separated coordinates, e.g. 0,0,0.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Print a chart as a manifest.
    Export { chart: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Axioms,
    Normality,
    Phi,
    Curvature,
    Ricci,
    All,
}

impl SuiteArg {
    fn suite(self) -> Option<Suite> {
        match self {
            SuiteArg::Axioms => Some(Suite::Axioms),
            SuiteArg::Normality => Some(Suite::Normality),
            SuiteArg::Phi => Some(Suite::Phi),
            SuiteArg::Curvature => Some(Suite::Curvature),
            SuiteArg::Ricci => Some(Suite::Ricci),
            SuiteArg::All => None,
        }
    }
}

/// `args` excludes the program name.
pub fn run_cli<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("paralab".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => {
            let code = if e.is_degeneracy() { EXIT_DEGENERATE } else { EXIT_USAGE };
            (code, format!("error: {e}\n"))
        }
    }
}

struct Resolved {
    chart: StructuredChart,
    expected: Vec<(Property, Status)>,
}

fn resolve(name: &str) -> Result<Resolved, Error> {
    match gallery::get_chart(name) {
        Ok(e) => Ok(Resolved {
            chart: e.chart,
            expected: e.expected,
        }),
        Err(Error::UnknownChart(_)) if Path::new(name).exists() => {
            let m = load_manifest_file(Path::new(name))?;
            Ok(Resolved {
                chart: m.chart,
                expected: m.expected,
            })
        }
        Err(e) => Err(Error::InvalidChart(format!("{e}; no manifest file `{name}` either"))),
    }
}

fn dispatch(cmd: Command) -> Result<(i32, String), Error> {
    let mut out = String::new();
    match cmd {
        Command::List => {
            for name in gallery::list_charts() {
                let e = gallery::get_chart(name)?;
                let _ = writeln!(out, "{name:<18} {}", e.description);
            }
        }
        Command::Validate { file } => {
            let m = load_manifest_file(Path::new(&file))?;
            let c = &m.chart;
            let _ = writeln!(
                out,
                "{file}: ok ({}, n = {}, epsilon = {:+}, {} expected statuses)",
                c.name(),
                c.dim(),
                c.epsilon().sign(),
                m.expected.len()
            );
        }
        Command::Classify {
            chart,
            sampling,
            json,
            assert,
        } => {
            let r = resolve(&chart)?;
            let report = classify::classify_chart(&r.chart, sampling.points, sampling.seed, sampling.tol)?;
            out = if json { to_stable_json(&report) } else { report_text(&report) };
            if assert {
                let mut failures = classify::expectation_failures(&report, &r.expected);
                failures.extend(report.audit.iter().map(|a| format!("audit: {}: {}", a.implication, a.detail)));
                if !failures.is_empty() {
                    for f in &failures {
                        let _ = writeln!(out, "assertion failed: {f}");
                    }
                    return Ok((EXIT_ASSERT, out));
                }
                if !json {
                    let _ = writeln!(out, "assertions: {} expected statuses reproduced, audit empty", r.expected.len());
                }
            }
        }
        Command::Identities {
            chart,
            suite,
            sampling,
            json,
        } => {
            let r = resolve(&chart)?;
            let report = classify::classify_chart(&r.chart, sampling.points, sampling.seed, sampling.tol)?;
            let rows: Vec<_> = report
                .identities
                .iter()
                .filter(|row| suite.suite().is_none_or(|s| row.suite == s))
                .collect();
            if json {
                out = to_stable_json(&rows);
            } else {
                let _ = writeln!(out, "chart {}  ({} points, seed {}, tol {:e})", report.chart, report.samples.count, report.samples.seed, report.samples.tol);
                let _ = writeln!(out, "{:<8} {:<30} {:<26} {:<10} {:>12}  result", "suite", "identity", "tier", "applies", "residual");
                for row in rows {
                    let result = match (row.applicable, row.passes) {
                        (_, true) => "pass",
                        (true, false) => "FAIL",
                        (false, false) => "n/a",
                    };
                    let _ = writeln!(
                        out,
                        "{:<8} {:<30} {:<26} {:<10} {:>12.3e}  {result}",
                        row.suite.id(),
                        row.identity,
                        row.tier.id(),
                        if row.applicable { "yes" } else { "no" },
                        row.max_residual
                    );
                }
            }
        }
        Command::Curvature { chart, at, json } => {
            let r = resolve(&chart)?;
            let point = parse_point(&at, r.chart.dim())?;
            let summary = curvature_summary(&r.chart, &point)?;
            out = if json { to_stable_json(&summary) } else { curvature_text(&summary, r.chart.coords()) };
        }
        Command::Export { chart } => {
            let r = resolve(&chart)?;
            out = to_manifest(&r.chart, &r.expected);
        }
    }
    Ok((EXIT_OK, out))
}

fn parse_point(at: &str, n: usize) -> Result<Vec<f64>, Error> {
    let point: Vec<f64> = at
        .split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidChart(format!("--at `{at}` is not a comma-separated list of numbers")))?;
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: point.len(),
        });
    }
    Ok(point)
}

fn report_text(r: &ClassificationReport) -> String {
    let mut out = String::new();
    let s = &r.samples;
    let _ = writeln!(out, "chart {}  epsilon {:+}", r.chart, r.epsilon);
    let _ = writeln!(out, "samples {} (seed {}, tol {:e}, {} candidates drawn)", s.count, s.seed, s.tol, s.attempts);
    let hist: Vec<String> = r.index_histogram.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    let _ = writeln!(out, "index histogram  {}", hist.join(", "));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<30} {:<6} {:>12}  worst point", "property", "status", "residual");
    for p in &r.properties {
        let _ = writeln!(
            out,
            "{:<30} {:<6} {:>12.3e}  {}",
            p.property.id(),
            p.status.id(),
            p.max_residual,
            fmt_point(&p.worst_point)
        );
    }
    let applicable = r.identities.iter().filter(|i| i.applicable).count();
    let failing: Vec<_> = r.identities.iter().filter(|i| i.applicable && !i.passes).collect();
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "identities: {} rows, {applicable} applicable, {} failing",
        r.identities.len(),
        failing.len()
    );
    for row in failing {
        let _ = writeln!(out, "  FAIL {}/{} residual {:.3e}", row.suite.id(), row.identity, row.max_residual);
    }
    if r.audit.is_empty() {
        let _ = writeln!(out, "audit: no violations");
    } else {
        for a in &r.audit {
            let _ = writeln!(out, "audit: {} violated: {}", a.implication, a.detail);
        }
    }
    out
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", parts.join(", "))
}

#[derive(Serialize)]
struct Sectional {
    i: usize,
    j: usize,
    /// None for a degenerate plane.
    value: Option<f64>,
}

#[derive(Serialize)]
struct CurvatureSummary {
    chart: String,
    point: Vec<f64>,
    epsilon: i32,
    /// christoffel[k][i][j] = Γ^k_ij
    christoffel: Vec<Vec<Vec<f64>>>,
    /// riemann[l][i][j][k] = R^l_ijk
    riemann: Vec<Vec<Vec<Vec<f64>>>>,
    ricci: Vec<Vec<f64>>,
    scalar: f64,
    ricci_xi_xi: f64,
    sectional: Vec<Sectional>,
}

fn curvature_summary(chart: &StructuredChart, point: &[f64]) -> Result<CurvatureSummary, Error> {
    let geo = Geometry::at(chart, point)?;
    let c = CurvatureFrame::from_geometry(&geo);
    let n = chart.dim();
    let xi = geo.frame().xi_vec();
    let ricci_xi_xi = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| xi[a] * xi[b] * c.s(a, b)).sum();
    let mut sectional = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[i] = 1.0;
            y[j] = 1.0;
            sectional.push(Sectional {
                i,
                j,
                value: c.sectional(&x, &y).ok(),
            });
        }
    }
    Ok(CurvatureSummary {
        chart: chart.name().to_string(),
        point: point.to_vec(),
        epsilon: chart.epsilon().sign(),
        christoffel: (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| geo.gamma(k, i, j)).collect()).collect()).collect(),
        riemann: (0..n)
            .map(|l| (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| c.r(l, i, j, k)).collect()).collect()).collect())
            .collect(),
        ricci: (0..n).map(|j| (0..n).map(|k| c.s(j, k)).collect()).collect(),
        scalar: c.scalar,
        ricci_xi_xi,
        sectional,
    })
}

/// The `curvature --json` document for one point.
pub fn curvature_json(chart: &StructuredChart, point: &[f64]) -> Result<String, Error> {
    Ok(to_stable_json(&curvature_summary(chart, point)?))
}

// Prints 0 for values below 1e-14 so text output is not cluttered by roundoff.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

fn curvature_text(s: &CurvatureSummary, coords: &[String]) -> String {
    let mut out = String::new();
    let n = s.point.len();
    let _ = writeln!(out, "chart {} at {}  epsilon {:+}", s.chart, fmt_point(&s.point), s.epsilon);
    let _ = writeln!(out, "Christoffel symbols (nonzero):");
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = clean(s.christoffel[k][i][j]);
                if v != 0.0 {
                    let _ = writeln!(out, "  Gamma^{}_{}{} = {v:.10}", coords[k], coords[i], coords[j]);
                }
            }
        }
    }
    let _ = writeln!(out, "Riemann R^l_ijk (nonzero, i < j):");
    for l in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = clean(s.riemann[l][i][j][k]);
                    if v != 0.0 {
                        let _ = writeln!(out, "  R^{}_{}{}{} = {v:.10}", coords[l], coords[i], coords[j], coords[k]);
                    }
                }
            }
        }
    }
    let _ = writeln!(out, "Ricci S:");
    for row in &s.ricci {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>16.10}", clean(*v))).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
    let _ = writeln!(out, "scalar curvature r = {:.10}", clean(s.scalar));
    let _ = writeln!(out, "S(xi,xi) = {:.10}", clean(s.ricci_xi_xi));
    let _ = writeln!(out, "sectional curvatures of coordinate planes:");
    for k in &s.sectional {
        match k.value {
            Some(v) => {
                let _ = writeln!(out, "  K(d{},d{}) = {:.10}", k.i + 1, k.j + 1, clean(v));
            }
            None => {
                let _ = writeln!(out, "  K(d{},d{}) = degenerate plane", k.i + 1, k.j + 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0, -0.5,1e-3", 3).unwrap(), vec![0.0, -0.5, 1e-3]);
        assert!(parse_point("0,0", 3).is_err());
        assert!(parse_point("0,a,0", 3).is_err());
        assert!(parse_point("0,inf,0", 3).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_cli(["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_cli(["classify", "no_such_chart"]).0, EXIT_USAGE);
        assert_eq!(run_cli(["identities", "ex5_1_spacelike", "--suite", "bogus"]).0, EXIT_USAGE);
        assert_eq!(run_cli(["--help"]).0, EXIT_OK);
    }
}
