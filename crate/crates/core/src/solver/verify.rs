//! Pointwise checks of a truncated solution at a finite value of `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{drho_matrix_raw, pairing_matrix, Spinor};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{expm, expm_frechet, imag_part_norm, max_abs, real_part, CMat, CVec, C64, I};
use crate::solver::series::SoSeries;
use crate::solver::solve::{DeformationProblem, DeformationSolution};

/// Outcome of [`verify_at_t`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseReport {
    pub t: f64,
    /// Root mean square of `|d^H ψ_t|` over the grid, relative to `|ψ|`.
    pub dh_rms: f64,
    /// Largest violation of `J² = -1`, orthogonality and reality for either structure.
    pub axiom_residual: f64,
    /// Largest `|[J₁(t), J₂(t)]|`.
    pub commutator: f64,
    /// Smallest eigenvalue of the symmetric form `⟨G_t ·, ·⟩`.
    pub min_metric_eigenvalue: f64,
    pub grid_points: usize,
    pub sample_points: usize,
}

/// Value and first derivatives of a generator series at `(t, x)`.
fn generator_at(series: &SoSeries, t: f64, x: &[f64]) -> (CMat, Vec<CMat>) {
    let m = series.dim();
    let size = 2 * m;
    let mut value = CMat::zeros(size, size);
    let mut grads = vec![CMat::zeros(size, size); m];
    for (j, coeff) in series.orders().iter().enumerate() {
        let tj = t.powi(j as i32);
        if tj == 0.0 && j > 0 {
            continue;
        }
        for (k, mat) in coeff.iter() {
            let w = C64::from_polar(tj, k.phase(x));
            value += mat * w;
            for (l, g) in grads.iter_mut().enumerate() {
                if k.0[l] != 0 {
                    *g += mat * (w * I * k.0[l] as f64);
                }
            }
        }
    }
    (value, grads)
}

fn all_generators(problem: &DeformationProblem, solution: &DeformationSolution) -> Vec<SoSeries> {
    let mut gens: Vec<SoSeries> = problem.family.factors.clone();
    gens.push(solution.b.clone());
    gens
}

/// `ψ_t(x)` and `d^H ψ_t(x)` from exact exponentials of the truncated generators.
fn psi_and_dh(problem: &DeformationProblem, gens: &[SoSeries], t: f64, x: &[f64]) -> (Spinor, Spinor) {
    let m = problem.pair.dim();
    let mut exps = Vec::with_capacity(gens.len());
    let mut derivs = Vec::with_capacity(gens.len());
    for g in gens {
        let (val, grads) = generator_at(g, t, x);
        let s = drho_matrix_raw(&val);
        let per_dir: Vec<CMat> = grads.iter().map(|d| expm_frechet(&s, &drho_matrix_raw(d)).1).collect();
        exps.push(expm(&s));
        derivs.push(per_dir);
    }
    let r = gens.len();
    // tails[i] = E_i ⋯ E_r ψ
    let mut tails: Vec<CVec> = vec![problem.psi.coeffs().clone(); r + 1];
    for i in (0..r).rev() {
        tails[i] = &exps[i] * &tails[i + 1];
    }
    let psi_t = tails[0].clone();
    let mut dh: CVec = problem.geom.h_wedge() * &psi_t;
    for l in 0..m {
        let mut head = CMat::identity(psi_t.len(), psi_t.len());
        let mut dl = CVec::zeros(psi_t.len());
        for i in 0..r {
            dl += &head * (&derivs[i][l] * &tails[i + 1]);
            head = head * &exps[i];
        }
        dh += problem.geom.wedge_dx(l) * dl;
    }
    (
        Spinor::from_coeffs(m, psi_t).expect("length 2^m"),
        Spinor::from_coeffs(m, dh).expect("length 2^m"),
    )
}

/// `e^{a_1} ⋯ e^{a_r} e^{b}` on `V ⊕ V*` at `(t, x)`.
fn group_element(gens: &[SoSeries], t: f64, x: &[f64]) -> CMat {
    let size = 2 * gens[0].dim();
    gens.iter()
        .fold(CMat::identity(size, size), |acc, g| acc * expm(&generator_at(g, t, x).0))
}

/// Residuals of the deformed pair at one point.
fn structure_residuals(problem: &DeformationProblem, gens: &[SoSeries], t: f64, x: &[f64]) -> (f64, f64, f64) {
    let o = group_element(gens, t, x);
    let o_inv = o.clone().try_inverse().expect("exponentials are invertible");
    let j1 = &o * problem.pair.j1().matrix() * &o_inv;
    let j2 = &o * problem.pair.j2().matrix() * &o_inv;
    let size = j1.nrows();
    let id = CMat::identity(size, size);
    let p = pairing_matrix(size / 2);
    let mut axiom: f64 = 0.0;
    for j in [&j1, &j2] {
        axiom = axiom
            .max(max_abs(&(j * j + &id)))
            .max(max_abs(&(j.transpose() * &p * j - &p)))
            .max(imag_part_norm(j));
    }
    let comm = max_abs(&(&j1 * &j2 - &j2 * &j1));
    let g = -(&j1 * &j2);
    let form = real_part(&(&p * &g));
    let sym = (&form + form.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    (axiom, comm, min_eig)
}

/// Evaluates `ψ_t` on a uniform grid with `grid` points per direction and
/// checks the deformed pair at `samples` seeded random points.
pub fn verify_at_t(
    exec: Exec,
    problem: &DeformationProblem,
    solution: &DeformationSolution,
    t: f64,
    grid: usize,
    samples: usize,
    seed: u64,
) -> Result<PointwiseReport> {
    if grid == 0 {
        return Err(Error::InvalidInput("grid needs at least one point per direction".into()));
    }
    let m = problem.pair.dim();
    let gens = all_generators(problem, solution);
    let total = grid.pow(m as u32);
    let step = std::f64::consts::TAU / grid as f64;
    let point = |idx: usize| -> Vec<f64> {
        let mut rem = idx;
        (0..m)
            .map(|_| {
                let i = rem % grid;
                rem /= grid;
                i as f64 * step
            })
            .collect()
    };
    let sq = exec.map_range(total, |idx| psi_and_dh(problem, &gens, t, &point(idx)).1.norm().powi(2));
    let dh_rms = (sq.iter().sum::<f64>() / total as f64).sqrt() / problem.psi.norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..m).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect())
        .collect();
    let checks = exec.map(&pts, |x| structure_residuals(problem, &gens, t, x));
    let mut report = PointwiseReport {
        t,
        dh_rms,
        axiom_residual: 0.0,
        commutator: 0.0,
        min_metric_eigenvalue: f64::INFINITY,
        grid_points: total,
        sample_points: samples,
    };
    for (axiom, comm, eig) in checks {
        report.axiom_residual = report.axiom_residual.max(axiom);
        report.commutator = report.commutator.max(comm);
        report.min_metric_eigenvalue = report.min_metric_eigenvalue.min(eig);
    }
    if !(report.min_metric_eigenvalue > 0.0) {
        return Err(Error::PositivityLost { t });
    }
    Ok(report)
}

/// `ψ_t(x)` from exact exponentials of the truncated generators.
pub fn psi_at(problem: &DeformationProblem, solution: &DeformationSolution, t: f64, x: &[f64]) -> Spinor {
    psi_and_dh(problem, &all_generators(problem, solution), t, x).0
}

/// `d^H ψ_t(x)` from exact exponentials of the truncated generators.
pub fn dh_psi_at(problem: &DeformationProblem, solution: &DeformationSolution, t: f64, x: &[f64]) -> Spinor {
    psi_and_dh(problem, &all_generators(problem, solution), t, x).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::families::{exact_b_field_family, OneForm};
    use crate::solver::solve::{solve_deformation, SolverOptions};
    use crate::structures::{standard_complex, HermitianPair};
    use crate::torus::{Freq, TorusGeometry};
    use nalgebra::DMatrix;

    fn solved(order: usize) -> (DeformationProblem, DeformationSolution) {
        let pair = HermitianPair::kaehler(&DMatrix::identity(4, 4), &standard_complex(4)).unwrap();
        let xi = OneForm::cosine(4, Freq(vec![1, 0, 1, 0]), 2, 1.0, 0.2);
        let family = exact_b_field_family(Exec::Sequential, &xi, pair.j1(), order);
        let problem = DeformationProblem::new(pair, TorusGeometry::flat(4), family).unwrap();
        let options = SolverOptions {
            order,
            exec: Exec::Sequential,
            ..Default::default()
        };
        let sol = solve_deformation(&problem, &options).unwrap();
        (problem, sol)
    }

    #[test]
    fn zero_time_reproduces_background() {
        let (problem, sol) = solved(1);
        let r = verify_at_t(Exec::Sequential, &problem, &sol, 0.0, 2, 3, 1).unwrap();
        assert_eq!(r.dh_rms, 0.0);
        assert!(r.axiom_residual < 1e-14 && r.commutator < 1e-14);
        let x = [0.1, 0.2, 0.3, 0.4];
        let psi = psi_at(&problem, &sol, 0.0, &x);
        assert!(crate::linalg::vec_norm(&(psi.coeffs() - problem.psi.coeffs())) < 1e-15);
    }

    #[test]
    fn residual_shrinks_with_the_expected_power() {
        let (problem, sol) = solved(2);
        let a = verify_at_t(Exec::Sequential, &problem, &sol, 2e-2, 3, 2, 1).unwrap();
        let b = verify_at_t(Exec::Sequential, &problem, &sol, 1e-2, 3, 2, 1).unwrap();
        let ratio = a.dh_rms / b.dh_rms;
        assert!((6.0..10.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn empty_grid_is_rejected() {
        let (problem, sol) = solved(1);
        assert!(verify_at_t(Exec::Sequential, &problem, &sol, 0.1, 0, 1, 1).is_err());
    }
}
