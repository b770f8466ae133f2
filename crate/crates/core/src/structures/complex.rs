//! Generalized complex structures and the grading they induce on forms.

use nalgebra::DMatrix;

use crate::clifford::{drho_matrix_raw, pairing_matrix, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{c, column_basis, complexify, imag_part_norm, lagrange_projectors, max_abs, rank, CMat, C64, I};
use crate::tolerances;

/// An orthogonal `J` of `V ⊕ V*` with `J² = -1`, together with the eigenspace
/// decomposition `∧•V* ⊗ C = ⊕_k U^k` of its spin action (`U^k` is the
/// `ik`-eigenspace).
#[derive(Debug, Clone)]
pub struct GeneralizedComplexStructure {
    m: usize,
    n: usize,
    matrix: CMat,
    drho: CMat,
    /// `projectors[k + n]` projects onto `U^k`.
    projectors: Vec<CMat>,
    canonical: Spinor,
}

impl GeneralizedComplexStructure {
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let two_m = matrix.nrows();
        if matrix.ncols() != two_m || two_m % 2 != 0 {
            return Err(Error::InvalidInput("structure must be a 2m x 2m matrix".into()));
        }
        let m = two_m / 2;
        if m % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "generalized complex structures need even dimension, got {m}"
            )));
        }
        let n = m / 2;
        let p = pairing_matrix(m);
        let id = CMat::identity(two_m, two_m);
        let scale = max_abs(&matrix).max(1.0);
        let checks = [
            ("J is real", imag_part_norm(&matrix)),
            ("J^2 = -Id", max_abs(&(&matrix * &matrix + &id))),
            ("J orthogonal", max_abs(&(matrix.transpose() * &p * &matrix - &p))),
        ];
        for (what, residual) in checks {
            if residual > tolerances::AXIOM * scale * scale {
                return Err(Error::AxiomViolation { what, residual });
            }
        }
        let drho = drho_matrix_raw(&matrix);
        let spectrum: Vec<C64> = (-(n as i32)..=n as i32).map(|k| I * k as f64).collect();
        let projectors = lagrange_projectors(&drho, &spectrum);
        let dim = 1usize << m;
        let recon = projectors
            .iter()
            .zip(&spectrum)
            .fold(CMat::zeros(dim, dim), |acc, (pk, &l)| acc + pk * l);
        let residual = max_abs(&(recon - &drho));
        if residual > tolerances::AXIOM * max_abs(&drho).max(1.0) {
            return Err(Error::AxiomViolation {
                what: "spin action has spectrum in {ik}",
                residual,
            });
        }
        let top = &projectors[2 * n];
        if rank(top, tolerances::RANK) != 1 {
            return Err(Error::AxiomViolation {
                what: "canonical line is one-dimensional",
                residual: rank(top, tolerances::RANK) as f64,
            });
        }
        let line = column_basis(top, tolerances::RANK);
        let canonical = Spinor::from_coeffs(m, line.column(0).into_owned())?.normalized_generator();
        Ok(Self {
            m,
            n,
            matrix,
            drho,
            projectors,
            canonical,
        })
    }

    /// `J = -J_V ⊕ J_Vᵀ` from a complex structure `J_V` on `V`.
    pub fn from_complex(jv: &DMatrix<f64>) -> Result<Self> {
        let m = jv.nrows();
        let sq = jv * jv + DMatrix::<f64>::identity(m, m);
        if sq.abs().max() > tolerances::AXIOM * jv.abs().max().max(1.0).powi(2) {
            return Err(Error::AxiomViolation {
                what: "complex structure squares to -1",
                residual: sq.abs().max(),
            });
        }
        let mut mat = DMatrix::<f64>::zeros(2 * m, 2 * m);
        mat.view_mut((0, 0), (m, m)).copy_from(&(-jv));
        mat.view_mut((m, m), (m, m)).copy_from(&jv.transpose());
        Self::from_matrix(complexify(&mat))
    }

    /// `J = [[0, Ω⁻¹], [-Ω, 0]]` from the skew matrix `Ω` of a symplectic form,
    /// so that `e^{iω}` spans the canonical line.
    pub fn from_symplectic(omega: &DMatrix<f64>) -> Result<Self> {
        let m = omega.nrows();
        let inv = omega
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("symplectic form is degenerate".into()))?;
        let mut mat = DMatrix::<f64>::zeros(2 * m, 2 * m);
        mat.view_mut((0, m), (m, m)).copy_from(&inv);
        mat.view_mut((m, 0), (m, m)).copy_from(&(-omega));
        Self::from_matrix(complexify(&mat))
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Half the real dimension: the grading runs over `-n..=n`.
    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spin_action(&self) -> &CMat {
        &self.drho
    }

    /// Projector onto `U^k`; zero outside `-n..=n`.
    pub fn projector(&self, k: i32) -> CMat {
        let n = self.n as i32;
        if k.abs() > n {
            let d = 1 << self.m;
            return CMat::zeros(d, d);
        }
        self.projectors[(k + n) as usize].clone()
    }

    pub fn projector_ref(&self, k: i32) -> Option<&CMat> {
        let n = self.n as i32;
        (k.abs() <= n).then(|| &self.projectors[(k + n) as usize])
    }

    /// Normalized generator of the canonical line `U^n`.
    pub fn canonical_generator(&self) -> &Spinor {
        &self.canonical
    }

    /// `+i`-eigenspace `L ⊂ (V ⊕ V*) ⊗ C` as columns.
    pub fn l_frame(&self) -> CMat {
        let two_m = 2 * self.m;
        let proj = (CMat::identity(two_m, two_m) - &self.matrix * I) * c(0.5);
        column_basis(&proj, tolerances::RANK)
    }

    /// Degree `k` with `φ ∈ U^k`, if `φ` is homogeneous.
    pub fn grade_of(&self, phi: &Spinor) -> Option<i32> {
        let nrm = phi.norm();
        if nrm == 0.0 {
            return None;
        }
        let n = self.n as i32;
        (-n..=n).find(|&k| {
            let diff = &self.projectors[(k + n) as usize] * phi.coeffs() - phi.coeffs();
            diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 1e-9 * nrm
        })
    }

    /// `Σ_k i^k Π^k`, the generalized complex structure acting on forms.
    pub fn form_operator(&self) -> CMat {
        let n = self.n as i32;
        let d = 1 << self.m;
        (-n..=n).fold(CMat::zeros(d, d), |acc, k| {
            acc + &self.projectors[(k + n) as usize] * I.powi(k)
        })
    }
}

/// The standard complex structure on `R^m`: `∂_{2j-1} ↦ ∂_{2j}`.
pub fn standard_complex(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    for a in 0..m / 2 {
        j[(2 * a + 1, 2 * a)] = 1.0;
        j[(2 * a, 2 * a + 1)] = -1.0;
    }
    j
}

/// Skew matrix of `Σ_j dx_{2j-1} ∧ dx_{2j}`.
pub fn standard_symplectic(m: usize) -> DMatrix<f64> {
    -standard_complex(m)
}
