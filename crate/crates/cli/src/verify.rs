//! `umbilic verify`: exact identities, closed-form consistency and a quick
//! numeric census, collected into one JSON report.

use std::fmt;

use anyhow::Result;
use clap::Args;
use serde_json::{json, Value};

use umbilic_core::damon::{self, S_MERGE};
use umbilic_core::heat_forms::{f7_expected_residual, sample_forms, FormId, NormalForm};
use umbilic_core::morse::Branch;
use umbilic_core::poly::{damon_family, int, rat, to_f64, Rational};
use umbilic_core::scale_space::{detect, sample, PolySlice, Window};
use umbilic_core::unfolding::{
    critical_points_g, discriminant_section, embedding_line, implicit_residual_exact,
    inside_transition, organizing_center, organizing_center_from_family, UnfoldingParams,
};

use crate::table::{json_text, Output};

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Directory receiving `verify.json`.
    #[arg(long, default_value = "out")]
    pub out: std::path::PathBuf,
}

/// Raised when at least one check fails; exits with status 1.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

struct Suite {
    name: &'static str,
    checks: Vec<(String, bool, String)>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), passed, detail.into()));
    }

    fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.1).count()
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.failures() == 0,
            "checks": self.checks.iter().map(|(n, p, d)| json!({
                "name": n, "passed": p, "detail": d,
            })).collect::<Vec<_>>(),
        })
    }
}

fn heat_forms_suite(catalog: &mut Vec<Value>) -> Suite {
    let mut suite = Suite::new("heat_forms");
    for n in 1..=3 {
        for form in sample_forms(n) {
            let report = match form.verify_heat() {
                Ok(r) => r,
                Err(e) => {
                    suite.check(format!("{} n={n} builds", form.id), false, e.to_string());
                    continue;
                }
            };
            if form.id == FormId::F7 {
                // printed coefficient: a nonzero residual is the expected outcome
                let want = f7_expected_residual(form.sign, &form.quartic);
                let got = form.build().map(|p| p.heat_residual()).ok();
                suite.check(
                    format!("F7 n={n} printed q={} flagged", form.quartic),
                    !report.is_solution && got.as_ref() == Some(&want),
                    format!("residual {}", report.residual),
                );
            } else {
                suite.check(
                    format!("{} n={n} solves the heat equation", form.id),
                    report.is_solution,
                    format!("residual {}", report.residual),
                );
            }
            catalog.push(serde_json::to_value(&report).expect("report serializes"));
        }
    }
    for sign in [1i8, -1] {
        let fixed = NormalForm::f7_corrected(vec![int(1), int(-1)], sign);
        match fixed.verify_heat() {
            Ok(report) => {
                suite.check(
                    format!(
                        "F7 sigma={sign} with q={} solves the heat equation",
                        fixed.quartic
                    ),
                    report.is_solution,
                    format!("residual {}", report.residual),
                );
                catalog.push(serde_json::to_value(&report).expect("report serializes"));
            }
            Err(e) => suite.check("F7 corrected builds", false, e.to_string()),
        }
    }
    suite
}

fn damon_suite() -> Suite {
    let mut suite = Suite::new("damon_example");
    let residual = damon_family().heat_residual();
    suite.check(
        "heat_residual(f) = 0",
        residual.is_zero(),
        format!("residual {residual}"),
    );

    let scales = damon::eigen_signchange_scales();
    suite.check(
        "eigenvalue sign changes at s = 1/72",
        scales.iter().all(|s| *s == rat(1, 72)),
        format!("solutions {} and {}", scales[0], scales[1]),
    );

    let merge = rat(1, 72);
    match damon::critical_values_exact(&merge) {
        Ok(values) => {
            let z1 = values.get(&Branch::Pc1Plus);
            let z2 = values.get(&Branch::Pc2Plus);
            let want = rat(1, 54);
            suite.check(
                "z1(1/72) = z2+(1/72) = 1/54",
                z1 == Some(&want) && z2 == Some(&want),
                format!(
                    "z1 = {:?}, z2+ = {:?}",
                    z1.map(Rational::to_string),
                    z2.map(Rational::to_string)
                ),
            );
        }
        Err(e) => suite.check("z1(1/72) = z2+(1/72) = 1/54", false, e.to_string()),
    }

    // closed forms against numeric eigen-decomposition and evaluation
    let (mut worst_value, mut worst_vector, mut worst_z) = (0.0f64, 0.0f64, 0.0f64);
    let n = 400;
    for k in 0..n {
        let s = -1.0 / 72.0 + (4.0 / 72.0) * (k as f64 + 0.5) / n as f64;
        for cp in damon::critical_points(s) {
            let Ok(analysis) = damon::eigen_analysis(&cp) else {
                continue;
            };
            worst_value = worst_value.max(analysis.value_error.unwrap_or(0.0));
            if (s - S_MERGE).abs() > 1e-9 {
                worst_vector = worst_vector.max(analysis.vector_error.unwrap_or(0.0));
            }
            if let Some(b) = cp.branch {
                if let Ok(z) = damon::critical_value(b, s) {
                    worst_z =
                        worst_z.max((z - damon::value(cp.position[0], cp.position[1], s)).abs());
                }
            }
        }
    }
    suite.check(
        "closed-form eigenvalues match numeric",
        worst_value <= 1e-10,
        format!("max error {worst_value:.3e} over {n} scales"),
    );
    suite.check(
        "closed-form eigenvectors match numeric",
        worst_vector <= 1e-10,
        format!("max error {worst_vector:.3e} over {n} scales"),
    );
    suite.check(
        "critical values match evaluation",
        worst_z <= 1e-12,
        format!("max error {worst_z:.3e} over {n} scales"),
    );
    suite
}

fn unfolding_suite(flags: &mut Vec<Value>) -> Suite {
    let mut suite = Suite::new("unfolding");
    suite.check(
        "organizing centre equals the recentred family at s = 1/72",
        organizing_center() == organizing_center_from_family(),
        organizing_center().to_string(),
    );

    // g(1/2, 1/24, 0) against the worked example at s = 1/144, recentred at x = 1/6
    let s = 1.0 / 144.0;
    let mut ours: Vec<[f64; 2]> = critical_points_g(&UnfoldingParams::new(0.5, 1.0 / 24.0, 0.0))
        .iter()
        .map(|p| [p.position[0] + 1.0 / 6.0, p.position[1]])
        .collect();
    let mut theirs: Vec<[f64; 2]> = Branch::ALL
        .iter()
        .filter_map(|&b| damon::branch_position(b, s))
        .collect();
    let key = |a: &[f64; 2], b: &[f64; 2]| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]));
    ours.sort_by(key);
    theirs.sort_by(key);
    let err = ours
        .iter()
        .zip(&theirs)
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
        .fold(0.0, f64::max);
    suite.check(
        "unfolding points at (1/2, 1/24, 0) equal the example at s = 1/144",
        ours.len() == 4 && theirs.len() == 4 && err <= 1e-12,
        format!("{} points, max error {err:.3e}", ours.len()),
    );

    match discriminant_section(0.5, 720) {
        Ok(curve) => {
            let r6 = 6f64.sqrt() / 32.0;
            let want = [[0.0, 0.0], [3.0 / 32.0, r6], [3.0 / 32.0, -r6]];
            let located = want.iter().all(|w| {
                curve
                    .cusps
                    .iter()
                    .any(|c| (c[0] - w[0]).abs() <= 1e-9 && (c[1] - w[1]).abs() <= 1e-9)
            });
            suite.check(
                "discriminant at w = 1/2 has 3 cusps at (0,0), (3/32, ±√6/32)",
                curve.cusps.len() == 3 && located,
                format!("cusps {:?}", curve.cusps),
            );
            let worst = curve
                .samples
                .iter()
                .map(|smp| {
                    let p = UnfoldingParams::new(0.5, smp.u, smp.v);
                    let g = p.gradient(smp.x, smp.y);
                    g[0].hypot(g[1]).max(p.hessian(smp.x, smp.y).det().abs())
                })
                .fold(0.0, f64::max);
            suite.check(
                "discriminant samples are degenerate critical points",
                worst <= 1e-10,
                format!("max |grad|, |det H| = {worst:.3e}"),
            );
            let crossings: Vec<f64> = curve.fold_axis_crossings.iter().map(|c| c[0]).collect();
            flags.push(json!({
                "topic": "implicit quartic",
                "detail": "the printed quartic (u - 1)u^3 + (486 - 648u + 144u^2)v^2 + 5184v^4 does not vanish on the computed locus",
                "computed_axis_crossings_u": crossings,
                "printed_residual_at_u_1_12": to_f64(&implicit_residual_exact(&rat(1, 12), &int(0))),
                "printed_residual_at_u_1": to_f64(&implicit_residual_exact(&int(1), &int(0))),
            }));
        }
        Err(e) => suite.check("discriminant at w = 1/2", false, e.to_string()),
    }

    let first = inside_transition(-1.0 / 216.0, 1.0 / 216.0, 1e-6);
    let second = inside_transition(1.0 / 216.0, 1.0 / 36.0, 1e-6);
    let near = |b: Option<(f64, f64)>, target: f64| {
        b.is_some_and(|(lo, hi)| lo - 1e-9 <= target && target <= hi + 1e-9)
    };
    suite.check(
        "embedding line census flips at s = 0 and s = 1/72",
        near(first, 0.0) && near(second, S_MERGE),
        format!("brackets {first:?} and {second:?}"),
    );
    let (u0, _) = embedding_line(0.0);
    flags.push(json!({
        "topic": "embedding line at s = 0",
        "detail": "the line enters the discriminant at u = 1/12 when s = 0; a printed value u = 12 disagrees",
        "computed_u": u0,
    }));
    suite
}

fn scale_space_suite() -> Suite {
    let mut suite = Suite::new("scale_space");
    let h = 1.0 / 256.0;
    for (s, want) in [(1.0 / 720.0, 4), (1.0 / 144.0, 4), (1.0 / 36.0, 2)] {
        let result = PolySlice::new(&damon_family(), s)
            .map_err(|e| e.to_string())
            .and_then(|slice| sample(&slice, Window::square(0.5), h, s).map_err(|e| e.to_string()));
        match result {
            Ok(grid) => {
                let found = detect(&grid);
                let worst = found
                    .iter()
                    .map(|cp| {
                        damon::critical_points(s)
                            .iter()
                            .map(|t| t.distance_to(cp.position))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0, f64::max);
                suite.check(
                    format!("census at s = {s:.6}"),
                    found.len() == want && worst < 1e-3,
                    format!(
                        "{} points (expected {want}), worst position error {worst:.2e}",
                        found.len()
                    ),
                );
            }
            Err(e) => suite.check(format!("census at s = {s:.6}"), false, e),
        }
    }
    suite
}

pub fn run(args: &VerifyArgs) -> Result<()> {
    let mut catalog = Vec::new();
    let mut flags = Vec::new();
    let suites = [
        heat_forms_suite(&mut catalog),
        damon_suite(),
        unfolding_suite(&mut flags),
        scale_space_suite(),
    ];
    let failures: usize = suites.iter().map(Suite::failures).sum();
    let report = json!({
        "passed": failures == 0,
        "failures": failures,
        "suites": suites.iter().map(Suite::to_json).collect::<Vec<_>>(),
        "catalog": catalog,
        "flags": flags,
    });
    let mut out = Output::create(&args.out, crate::table::Format::Json)?;
    out.text("verify.json", &json_text(&report))?;

    for suite in &suites {
        for (name, passed, detail) in &suite.checks {
            println!(
                "{} {:<12} {name}: {detail}",
                if *passed { "PASS" } else { "FAIL" },
                suite.name
            );
        }
    }
    println!(
        "verify: {} checks, {failures} failed; report in {}",
        suites.iter().map(|s| s.checks.len()).sum::<usize>(),
        args.out.join("verify.json").display()
    );
    if failures > 0 {
        return Err(VerificationFailed(failures).into());
    }
    Ok(())
}
