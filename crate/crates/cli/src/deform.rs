//! Deformation runs: solve, verify at finite `t`, write artifacts.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use gencx::linalg::CMat;
use gencx::solver::{
    deformed_structure_series, solve_deformation, verify_at_t, DeformationProblem, DeformationSolution, PointwiseReport,
    SolverOptions, SoSeries, SpinorSeries,
};
use gencx::torus::{Freq, MatrixField};
use gencx::{tolerances, Error, Exec};

use crate::config::{ConfigError, ExperimentConfig, VerifySpec};
use crate::report::{complex_string, Report};

pub const DEFAULT_ORDER: usize = 4;

/// Below this the finite-`t` residual is rounding noise and the halving ratio means nothing.
const NOISE_FLOOR: f64 = 1e-14;
const RATIO_BAND: (f64, f64) = (0.75, 1.25);
const POINTWISE_TOL: f64 = 1e-9;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;

pub struct DeformOptions {
    pub order: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

fn default_verify() -> VerifySpec {
    VerifySpec {
        t: 1e-2,
        grid: 4,
        samples: 16,
        seed: 7,
    }
}

/// Report plus the exit code it implies.
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

pub fn run(cfg: &ExperimentConfig, opts: &DeformOptions, exec: Exec) -> Result<Outcome, ConfigError> {
    let order = opts.order.or(cfg.order).unwrap_or(DEFAULT_ORDER);
    if order == 0 || order > crate::config::MAX_ORDER {
        return Err(ConfigError(format!("order must be between 1 and {}, got {order}", crate::config::MAX_ORDER)));
    }
    let residual_tol = opts
        .tol
        .or(cfg.tolerances.map(|t| t.residual))
        .unwrap_or(tolerances::SOLVER_RESIDUAL);
    if !(residual_tol > 0.0) {
        return Err(ConfigError("tolerance must be positive".into()));
    }
    let structure_tol = cfg.tolerances.map_or(tolerances::SOLVER_STRUCTURE, |t| t.structure);
    let verify = cfg.verify.clone().unwrap_or_else(default_verify);
    let out_dir = opts.out.clone().or_else(|| cfg.output.as_ref().map(|o| o.dir.clone()));

    let pair = cfg.pair()?;
    let geom = cfg.geometry()?;
    let family = cfg.family(exec, pair.j1(), order)?;
    let scale = cfg.psi_scale();

    let mut report = Report::new("deform");
    report.param("dimension", cfg.dimension as u64);
    report.param("family", family.name.clone());
    report.param("order", order as u64);
    report.param("residual_tol", residual_tol);
    report.param("structure_tol", structure_tol);
    report.param("integrability_tol", tolerances::INTEGRABILITY);
    report.param("psi_scale", complex_string(scale));
    report.param("flux", json!(cfg.flux.iter().map(|t| json!({"indices": t.indices, "value": t.value})).collect::<Vec<_>>()));
    report.param("verify_t", verify.t);
    report.param("verify_grid", verify.grid as u64);
    report.param("verify_samples", verify.samples as u64);
    report.param("verify_seed", verify.seed);
    report.param("pointwise_tol", POINTWISE_TOL);
    report.param("ratio_band", json!([RATIO_BAND.0, RATIO_BAND.1]));

    let problem = DeformationProblem {
        psi: pair.j2().canonical_generator().clone() * scale,
        pair,
        geom,
        family,
    };
    if let Err(e) = problem.validate() {
        report.fail("preconditions", e.to_string());
        return Ok(Outcome { report, code: EXIT_PRECONDITION });
    }
    let options = SolverOptions {
        order,
        residual_tol,
        structure_tol,
        exec,
        check_integrability: true,
    };
    let solution = match solve_deformation(&problem, &options) {
        Ok(s) => s,
        Err(e @ Error::NotIntegrable { .. }) => {
            report.fail("deformation of J1 is integrable", e.to_string());
            return Ok(Outcome { report, code: EXIT_PRECONDITION });
        }
        Err(e) => {
            report.fail("solver", e.to_string());
            return Ok(Outcome { report, code: EXIT_FAILURE });
        }
    };

    for (j, r) in solution.final_residuals.iter().enumerate() {
        report.bound(format!("order {j} residual |(d^H psi_t)_{j}|/|psi|"), *r, residual_tol);
    }
    let max_beta = solution.beta.iter().map(MatrixField::norm).fold(0.0, f64::max);
    report.info("max |beta_k|", max_beta);
    report.section("orders", orders_section(&solution));

    check_pointwise(&mut report, exec, &problem, &solution, &verify, order);

    if let Some(dir) = out_dir {
        if let Err(e) = write_artifacts(&dir, exec, &problem, &solution, &report) {
            report.fail("write artifacts", format!("{}: {e}", dir.display()));
        }
    }
    let code = if report.passed { 0 } else { EXIT_FAILURE };
    Ok(Outcome { report, code })
}

fn check_pointwise(
    report: &mut Report,
    exec: Exec,
    problem: &DeformationProblem,
    solution: &DeformationSolution,
    verify: &VerifySpec,
    order: usize,
) {
    let at = |t: f64| verify_at_t(exec, problem, solution, t, verify.grid, verify.samples, verify.seed);
    let (full, half) = match (at(verify.t), at(verify.t / 2.0)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.fail("pointwise verification", e.to_string());
            return;
        }
    };
    for (label, r) in [("t", &full), ("t/2", &half)] {
        pointwise_checks(report, label, r);
    }
    if full.dh_rms < NOISE_FLOOR {
        report.info("halving ratio (residual at rounding level)", full.dh_rms);
        return;
    }
    let ratio = full.dh_rms / half.dh_rms;
    let expected = 2f64.powi(order as i32 + 1);
    let ok = (RATIO_BAND.0 * expected..=RATIO_BAND.1 * expected).contains(&ratio);
    if ok {
        report.info(format!("halving ratio (expected {expected})"), ratio);
    } else {
        report.fail(
            format!("halving ratio (expected {expected})"),
            format!("ratio {ratio:.6e} outside [{:.2}, {:.2}]", RATIO_BAND.0 * expected, RATIO_BAND.1 * expected),
        );
    }
}

fn pointwise_checks(report: &mut Report, label: &str, r: &PointwiseReport) {
    report.info(format!("rms |d^H psi_t|/|psi| at {label}"), r.dh_rms);
    report.bound(format!("structure axioms at {label}"), r.axiom_residual, POINTWISE_TOL);
    report.bound(format!("[J1(t), J2(t)] at {label}"), r.commutator, POINTWISE_TOL);
    report.above(format!("min eigenvalue of G(t) at {label}"), r.min_metric_eigenvalue, 0.0);
}

fn orders_section(solution: &DeformationSolution) -> Value {
    Value::Array(
        solution
            .records
            .iter()
            .zip(&solution.beta)
            .map(|(r, beta)| {
                json!({
                    "order": r.order,
                    "residual": solution.final_residuals[r.order],
                    "beta_norm": r.beta_norm,
                    "beta_support": beta.support().iter().map(|k| k.0.clone()).collect::<Vec<_>>(),
                    "rho_norm": r.rho_norm,
                    "rho_leakage": r.rho_leakage,
                    "closedness": r.closedness,
                    "phi_norm": r.phi_norm,
                    "phi_mismatch": r.phi_mismatch,
                    "phi_reconstruction": r.phi_reconstruction,
                    "beta_fit": r.beta_fit,
                    "integrability": solution.integrability[r.order],
                })
            })
            .collect(),
    )
}

fn matrix_json(a: &CMat) -> Value {
    Value::Array(
        (0..a.nrows())
            .map(|i| Value::Array((0..a.ncols()).map(|j| Value::String(complex_string(a[(i, j)]))).collect()))
            .collect(),
    )
}

fn freq_json(k: &Freq) -> Value {
    json!(k.0)
}

fn matrix_field_json(f: &MatrixField) -> Value {
    Value::Array(f.iter().map(|(k, a)| json!({"k": freq_json(k), "matrix": matrix_json(a)})).collect())
}

fn operator_series_json(s: &SoSeries) -> Value {
    Value::Array(
        s.orders()
            .iter()
            .enumerate()
            .map(|(j, f)| json!({"order": j, "terms": matrix_field_json(f)}))
            .collect(),
    )
}

fn spinor_series_json(s: &SpinorSeries) -> Value {
    Value::Array(
        s.orders()
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let terms: Vec<Value> = f
                    .iter()
                    .map(|(k, phi)| {
                        let coeffs: Vec<String> = phi.coeffs().iter().map(|z| complex_string(*z)).collect();
                        json!({"k": freq_json(k), "coeffs": coeffs})
                    })
                    .collect();
                json!({"order": j, "terms": terms})
            })
            .collect(),
    )
}

fn series_document(exec: Exec, problem: &DeformationProblem, solution: &DeformationSolution) -> Value {
    let mut factors = problem.family.truncated(solution.order).factors;
    factors.push(solution.b.clone());
    let j1 = deformed_structure_series(exec, &factors, problem.pair.j1().matrix(), solution.order);
    let j2 = deformed_structure_series(exec, &factors, problem.pair.j2().matrix(), solution.order);
    let beta: Vec<Value> = solution
        .beta
        .iter()
        .enumerate()
        .map(|(i, b)| json!({"order": i + 1, "terms": matrix_field_json(b)}))
        .collect();
    let psi: Vec<String> = solution.psi.coeffs().iter().map(|z| complex_string(*z)).collect();
    json!({
        "schema_version": crate::report::SCHEMA_VERSION,
        "dimension": problem.pair.dim(),
        "family": solution.family,
        "order": solution.order,
        "psi": psi,
        "beta": beta,
        "psi_series": spinor_series_json(&solution.psi_series),
        "j1_series": operator_series_json(&j1),
        "j2_series": operator_series_json(&j2),
    })
}

fn write_artifacts(
    dir: &Path,
    exec: Exec,
    problem: &DeformationProblem,
    solution: &DeformationSolution,
    report: &Report,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut series = serde_json::to_string_pretty(&series_document(exec, problem, solution))?;
    series.push('\n');
    std::fs::write(dir.join("series.json"), series)?;

    let mut csv = csv::Writer::from_path(dir.join("residuals.csv"))?;
    csv.write_record(["order", "residual_norm", "beta_norm", "wall_ms"])?;
    for r in &solution.records {
        csv.write_record([
            r.order.to_string(),
            format!("{:.16e}", solution.final_residuals[r.order]),
            format!("{:.16e}", r.beta_norm),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    csv.flush()?;
    std::fs::write(dir.join("report.json"), report.to_json())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str, order: usize) -> Outcome {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let opts = DeformOptions {
            order: Some(order),
            tol: None,
            out: None,
        };
        run(&cfg, &opts, Exec::Sequential).unwrap()
    }

    #[test]
    fn constant_poisson_on_t4_is_trivial() {
        let out = run_text(
            "dimension = 4\n[background]\nkind = \"kaehler\"\n[[deformation]]\nkind = \"constant-bivector\"\na = 0\nb = 1\ncoeff = [0.5, 0.0]\n[verify]\nt = 0.01\ngrid = 2\nsamples = 4\nseed = 1\n",
            2,
        );
        assert_eq!(out.code, 0, "{}", out.report.to_text());
    }

    #[test]
    fn empty_family_passes() {
        let out = run_text("dimension = 2\n[background]\nkind = \"kaehler\"\n", 1);
        assert_eq!(out.code, 0, "{}", out.report.to_text());
    }
}
