//! Orthogonal deformations `J ↦ e^a J e^{-a}` and their recovery.

use nalgebra::{DMatrix, DVector};

use crate::clifford::{DoubleVector, SoDouble};
use crate::error::{Error, Result};
use crate::linalg::{c, expm, expm_frechet, max_abs, real_part, CMat};
use crate::structures::complex::GeneralizedComplexStructure;
use crate::tolerances;

/// `e^a J e^{-a}`.
pub fn deform_structure(a: &SoDouble, j: &GeneralizedComplexStructure) -> Result<GeneralizedComplexStructure> {
    if a.dim() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: a.dim(),
        });
    }
    let e = a.exp();
    let e_inv = expm(&(-a.matrix()));
    GeneralizedComplexStructure::from_matrix(&e * j.matrix() * e_inv)
}

/// Splits `α` into the parts anticommuting and commuting with `J`:
/// `α = ½(α + JαJ) + ½(α - JαJ)`.
pub fn split_adapted(alpha: &SoDouble, j: &GeneralizedComplexStructure) -> (SoDouble, SoDouble) {
    let jm = j.matrix();
    let conj = jm * alpha.matrix() * jm;
    let anti = (alpha.matrix() + &conj) * c(0.5);
    let comm = (alpha.matrix() - &conj) * c(0.5);
    (
        SoDouble::from_matrix_unchecked(anti),
        SoDouble::from_matrix_unchecked(comm),
    )
}

/// Orthonormal basis (Frobenius) of the real elements of `so(V ⊕ V*)` that
/// anticommute with `J`.
pub fn anticommuting_basis(j: &GeneralizedComplexStructure) -> Vec<CMat> {
    let m = j.dim();
    let two_m = 2 * m;
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for a in 0..two_m {
        for b in a + 1..two_m {
            let w = SoDouble::from_wedge(&DoubleVector::basis(m, a), &DoubleVector::basis(m, b));
            let (anti, _) = split_adapted(&w, j);
            let mut v = real_part(anti.matrix());
            for e in &basis {
                let proj = e.dot(&v);
                v -= e * proj;
            }
            let nrm = v.norm();
            if nrm > 1e-8 {
                basis.push(v / nrm);
            }
        }
    }
    basis.iter().map(crate::linalg::complexify).collect()
}

/// Finds the real `a ∈ so(V ⊕ V*)` anticommuting with `j` such that
/// `e^a j e^{-a} = target`, by damped Gauss-Newton started at `a = 0`.
/// Converges for targets in a neighbourhood of `j`.
pub fn extract_anticommuting(
    target: &GeneralizedComplexStructure,
    j: &GeneralizedComplexStructure,
) -> Result<SoDouble> {
    if target.dim() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: target.dim(),
        });
    }
    let basis = anticommuting_basis(j);
    let jm = j.matrix();
    let tm = target.matrix();
    let assemble = |x: &DVector<f64>| {
        basis
            .iter()
            .zip(x.iter())
            .fold(CMat::zeros(jm.nrows(), jm.ncols()), |acc, (e, &xi)| acc + e * c(xi))
    };
    let residual_of = |a: &CMat| -> CMat { expm(a) * jm * expm(&(-a)) - tm };
    let flatten = |mat: &CMat| DVector::from_iterator(mat.len(), mat.iter().map(|z| z.re));

    let mut x = DVector::<f64>::zeros(basis.len());
    let mut a = assemble(&x);
    let mut res = residual_of(&a);
    let mut norm = max_abs(&res);
    for _ in 0..tolerances::NEWTON_MAX_ITER {
        if norm < tolerances::NEWTON {
            return Ok(SoDouble::from_matrix_unchecked(a));
        }
        let e_pos = expm(&a);
        let e_neg = expm(&(-&a));
        let mut jac = DMatrix::<f64>::zeros(res.len(), basis.len());
        for (col, e) in basis.iter().enumerate() {
            let (_, d_pos) = expm_frechet(&a, e);
            let (_, d_neg) = expm_frechet(&(-&a), &(-e));
            let d = &d_pos * jm * &e_neg + &e_pos * jm * &d_neg;
            jac.set_column(col, &flatten(&d));
        }
        let rhs = -flatten(&res);
        let step = jac
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|_| Error::NewtonDiverged {
                iterations: 0,
                residual: norm,
            })?;
        let mut lambda = 1.0;
        loop {
            let trial_x = &x + &step * lambda;
            let trial_a = assemble(&trial_x);
            let trial_res = residual_of(&trial_a);
            let trial_norm = max_abs(&trial_res);
            if trial_norm < norm || lambda < 1e-6 {
                x = trial_x;
                a = trial_a;
                res = trial_res;
                norm = trial_norm;
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm < tolerances::NEWTON {
        return Ok(SoDouble::from_matrix_unchecked(a));
    }
    Err(Error::NewtonDiverged {
        iterations: tolerances::NEWTON_MAX_ITER,
        residual: norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::complex::standard_complex;

    fn sample_anti(j: &GeneralizedComplexStructure, scale: f64) -> SoDouble {
        let basis = anticommuting_basis(j);
        let sum = basis
            .iter()
            .enumerate()
            .fold(CMat::zeros(2 * j.dim(), 2 * j.dim()), |acc, (i, e)| {
                acc + e * c(scale * ((i as f64 * 1.7).sin()))
            });
        SoDouble::from_matrix(sum).unwrap()
    }

    #[test]
    fn anticommuting_subspace_dimension() {
        for m in [2, 4] {
            let j = GeneralizedComplexStructure::from_complex(&standard_complex(m)).unwrap();
            assert_eq!(anticommuting_basis(&j).len(), m * (m - 1));
        }
    }

    #[test]
    fn split_reassembles() {
        let j = GeneralizedComplexStructure::from_complex(&standard_complex(2)).unwrap();
        let w = SoDouble::from_wedge(&DoubleVector::basis(2, 0), &DoubleVector::basis(2, 3));
        let (anti, comm) = split_adapted(&w, &j);
        assert!(max_abs(&(anti.add(&comm).matrix() - w.matrix())) < 1e-15);
        let jm = j.matrix();
        assert!(max_abs(&(jm * anti.matrix() + anti.matrix() * jm)) < 1e-14);
        assert!(max_abs(&(jm * comm.matrix() - comm.matrix() * jm)) < 1e-14);
    }

    #[test]
    fn round_trip_recovers_generator() {
        let j = GeneralizedComplexStructure::from_complex(&standard_complex(4)).unwrap();
        let a0 = sample_anti(&j, 0.1);
        let target = deform_structure(&a0, &j).unwrap();
        let a = extract_anticommuting(&target, &j).unwrap();
        assert!(max_abs(&(a.matrix() - a0.matrix())) < 1e-9);
    }

    #[test]
    fn identity_target_gives_zero() {
        let j = GeneralizedComplexStructure::from_complex(&standard_complex(2)).unwrap();
        let a = extract_anticommuting(&j, &j).unwrap();
        assert_eq!(a.norm(), 0.0);
    }
}
