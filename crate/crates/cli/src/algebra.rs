//! Seeded property suite for the Clifford and structure layers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gencx::clifford::{
    chevalley_pairing, clifford_act, drho_matrix, natural_pairing, DoubleVector, Orientation, Spinor,
};
use gencx::linalg::{expm, max_abs, vec_norm, CMat};
use gencx::random::{
    random_double_vector, random_hermitian_pair, random_metric, random_real_spinor, random_so, random_spinor,
};
use gencx::structures::HermitianPair;

use crate::report::Report;

pub struct AlgebraOptions {
    pub seed: u64,
    pub n_max: usize,
    pub trials: usize,
    /// Flips the sign of the Hodge star before the star identity check.
    pub corrupt_star: bool,
}

fn diff(a: &Spinor, b: &Spinor) -> f64 {
    vec_norm(&(a.coeffs() - b.coeffs()))
}

/// Expected bidegree shift of each frame returned by `HermitianPair::frames`.
const FRAME_SHIFTS: [(i32, i32); 4] = [(1, 1), (-1, -1), (1, -1), (-1, 1)];

fn frame_shift_mismatches(pair: &HermitianPair) -> usize {
    let mut bad = 0;
    for (frame, expected) in pair.frames().iter().zip(FRAME_SHIFTS) {
        for col in 0..frame.ncols() {
            let v = DoubleVector::from_coords(frame.column(col).into_owned()).expect("even length");
            if pair.clifford_shift(&v) != Some(expected) {
                bad += 1;
            }
        }
    }
    bad
}

pub fn run(opts: &AlgebraOptions) -> Report {
    let mut report = Report::new("verify-algebra");
    report.param("seed", opts.seed);
    report.param("n_max", opts.n_max as u64);
    report.param("trials", opts.trials as u64);
    report.param("corrupt_star", opts.corrupt_star);
    if opts.trials == 0 {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for m in 1..=2 * opts.n_max {
        let mut clifford: f64 = 0.0;
        let mut equivariance: f64 = 0.0;
        let mut invariance: f64 = 0.0;
        let mut positivity = f64::INFINITY;
        for _ in 0..opts.trials {
            let v = random_double_vector(m, &mut rng);
            let phi = random_spinor(m, &mut rng);
            let psi = random_spinor(m, &mut rng);
            let scale = phi.norm();
            let vv = clifford_act(&v, &clifford_act(&v, &phi).unwrap()).unwrap();
            let q = natural_pairing(&v, &v).unwrap();
            clifford = clifford.max(diff(&vv, &(phi.clone() * q)) / scale);

            let alpha = random_so(m, 0.6, &mut rng);
            let spin = expm(&drho_matrix(&alpha));
            let act = |s: &Spinor| Spinor::from_coeffs(m, &spin * s.coeffs()).expect("same length");
            let lhs = act(&clifford_act(&v, &phi).unwrap());
            let moved = DoubleVector::from_coords(alpha.exp() * v.coords()).unwrap();
            let rhs = clifford_act(&moved, &act(&phi)).unwrap();
            equivariance = equivariance.max(diff(&lhs, &rhs) / scale);

            let before = chevalley_pairing(&phi, &psi).unwrap();
            let after = chevalley_pairing(&act(&phi), &act(&psi)).unwrap();
            invariance = invariance.max((after - before).norm() / (scale * psi.norm()));

            let metric = random_metric(m, &mut rng).unwrap();
            let real = random_real_spinor(m, &mut rng);
            let star = metric.hodge_star(Orientation::Positive, &real).unwrap();
            let val = chevalley_pairing(&real, &star).unwrap();
            positivity = positivity.min(val.re / real.norm().powi(2));
        }
        report.bound(format!("m={m} Clifford relation v.v.phi = <v,v>phi"), clifford, 1e-12);
        report.bound(format!("m={m} spin equivariance of Clifford action"), equivariance, 1e-9);
        report.bound(format!("m={m} spin invariance of Chevalley pairing"), invariance, 1e-9);
        report.above(format!("m={m} positivity of (phi, *phi)"), positivity, 0.0);
    }
    for m in (2..=2 * opts.n_max).step_by(2) {
        let mut star_identity: f64 = 0.0;
        let mut axioms: f64 = 0.0;
        let mut shifts = 0;
        let mut failure = None;
        for _ in 0..opts.trials {
            let pair = match random_hermitian_pair(m, &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            };
            let star: CMat = if opts.corrupt_star { -pair.star() } else { pair.star().clone() };
            let jj = pair.j1().form_operator() * pair.j2().form_operator();
            star_identity = star_identity.max(gencx::linalg::op_norm(&(star + jj)));
            let id = CMat::identity(2 * m, 2 * m);
            for j in [pair.j1().matrix(), pair.j2().matrix()] {
                axioms = axioms.max(max_abs(&(j * j + &id)));
            }
            axioms = axioms.max(max_abs(&(pair.j1().matrix() * pair.j2().matrix() - pair.j2().matrix() * pair.j1().matrix())));
            shifts += frame_shift_mismatches(&pair);
        }
        if let Some(e) = failure {
            report.fail(format!("m={m} random Hermitian pair"), e);
            continue;
        }
        report.bound(format!("m={m} star identity * = -J1 J2 on forms"), star_identity, 1e-9);
        report.bound(format!("m={m} structure axioms and commutation"), axioms, 1e-9);
        report.bound(format!("m={m} frame bidegree shifts off pattern"), shifts as f64, 0.0);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_corruption_fails() {
        let mut opts = AlgebraOptions {
            seed: 1,
            n_max: 1,
            trials: 5,
            corrupt_star: false,
        };
        assert!(run(&opts).passed);
        opts.corrupt_star = true;
        let r = run(&opts);
        assert!(!r.passed);
        assert!(r.failures().all(|c| c.name.contains("star identity")));
    }

    #[test]
    fn zero_trials_is_empty_pass() {
        let r = run(&AlgebraOptions {
            seed: 0,
            n_max: 3,
            trials: 0,
            corrupt_star: false,
        });
        assert!(r.passed);
        assert!(r.checks.is_empty());
    }
}
