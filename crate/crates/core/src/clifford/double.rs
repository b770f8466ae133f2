//! The double `V ⊕ V*`, its natural pairing and the Lie algebra `so(V ⊕ V*)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, complexify, expm, fro, imag_part_norm, max_abs, CMat, CVec, C64, ZERO};
use crate::tolerances;

/// `X + ξ` with complex coefficients in the basis `(∂_1..∂_m, dx_1..dx_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleVector {
    m: usize,
    coords: CVec,
}

impl DoubleVector {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            coords: CVec::zeros(2 * m),
        }
    }

    /// Basis element `a` of `V ⊕ V*`: `∂_{a+1}` for `a < m`, `dx_{a-m+1}` otherwise.
    pub fn basis(m: usize, a: usize) -> Self {
        let mut v = Self::zeros(m);
        v.coords[a] = c(1.0);
        v
    }

    pub fn vector(m: usize, i: usize) -> Self {
        Self::basis(m, i)
    }

    pub fn covector(m: usize, i: usize) -> Self {
        Self::basis(m, m + i)
    }

    pub fn from_parts(vector: &[C64], covector: &[C64]) -> Result<Self> {
        if vector.len() != covector.len() {
            return Err(Error::DimensionMismatch {
                expected: vector.len(),
                found: covector.len(),
            });
        }
        let m = vector.len();
        let coords = CVec::from_iterator(2 * m, vector.iter().chain(covector.iter()).copied());
        Ok(Self { m, coords })
    }

    pub fn from_coords(coords: CVec) -> Result<Self> {
        if coords.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "double vector needs an even number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self {
            m: coords.len() / 2,
            coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &CVec {
        &self.coords
    }

    pub fn vector_part(&self) -> &[C64] {
        &self.coords.as_slice()[..self.m]
    }

    pub fn covector_part(&self) -> &[C64] {
        &self.coords.as_slice()[self.m..]
    }

    pub fn conj(&self) -> Self {
        Self {
            m: self.m,
            coords: self.coords.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            m: self.m,
            coords: &self.coords * z,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: self.m,
            coords: &self.coords + &other.coords,
        }
    }
}

/// Gram matrix `P` of the natural pairing: `⟨v, w⟩ = vᵀ P w`.
pub fn pairing_matrix(m: usize) -> CMat {
    let mut p = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        p[(i, m + i)] = c(0.5);
        p[(m + i, i)] = c(0.5);
    }
    p
}

/// `⟨X + ξ, Y + η⟩ = ½(η(X) + ξ(Y))`, complex bilinear.
pub fn natural_pairing(v: &DoubleVector, w: &DoubleVector) -> Result<C64> {
    if v.m != w.m {
        return Err(Error::DimensionMismatch {
            expected: v.m,
            found: w.m,
        });
    }
    let x = v.vector_part();
    let xi = v.covector_part();
    let y = w.vector_part();
    let eta = w.covector_part();
    let mut acc = ZERO;
    for i in 0..v.m {
        acc += eta[i] * x[i] + xi[i] * y[i];
    }
    Ok(acc * 0.5)
}

/// Blocks of an element of `so(V ⊕ V*)`:
/// `α(X + ξ) = (A X + β ξ) + (B X - Aᵀ ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoBlocks {
    pub endo: CMat,
    pub two_form: CMat,
    pub bivector: CMat,
}

/// An endomorphism of `V ⊕ V*` that is antisymmetric for the natural pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct SoDouble {
    m: usize,
    matrix: CMat,
}

/// Relative antisymmetry defect `‖αᵀP + Pα‖ / max(1, ‖α‖)`.
pub fn antisymmetry_residual(matrix: &CMat) -> f64 {
    let m = matrix.nrows() / 2;
    let p = pairing_matrix(m);
    let defect = matrix.transpose() * &p + &p * matrix;
    max_abs(&defect) / max_abs(matrix).max(1.0)
}

impl SoDouble {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            matrix: CMat::zeros(2 * m, 2 * m),
        }
    }

    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "so(V+V*) element needs a square even matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = antisymmetry_residual(&matrix);
        if residual > tolerances::ANTISYMMETRY {
            return Err(Error::NotAntisymmetric { residual });
        }
        Ok(Self {
            m: matrix.nrows() / 2,
            matrix,
        })
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(complexify(matrix))
    }

    /// Used internally on matrices that are antisymmetric by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMat) -> Self {
        Self {
            m: matrix.nrows() / 2,
            matrix,
        }
    }

    pub fn from_blocks(blocks: &SoBlocks) -> Result<Self> {
        let m = blocks.endo.nrows();
        for (name, b) in [("two-form", &blocks.two_form), ("bivector", &blocks.bivector)] {
            if b.nrows() != m || b.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: b.nrows(),
                });
            }
            let skew = max_abs(&(b + b.transpose()));
            if skew > tolerances::ANTISYMMETRY * max_abs(b).max(1.0) {
                return Err(Error::InvalidInput(format!("{name} block is not skew")));
            }
        }
        let mut mat = CMat::zeros(2 * m, 2 * m);
        mat.view_mut((0, 0), (m, m)).copy_from(&blocks.endo);
        mat.view_mut((0, m), (m, m)).copy_from(&blocks.bivector);
        mat.view_mut((m, 0), (m, m)).copy_from(&blocks.two_form);
        mat.view_mut((m, m), (m, m)).copy_from(&(-blocks.endo.transpose()));
        Self::from_matrix(mat)
    }

    /// B-field transform generator: `α(X + ξ) = -i_X B`.
    pub fn b_field(two_form: &CMat) -> Result<Self> {
        let m = two_form.nrows();
        Self::from_blocks(&SoBlocks {
            endo: CMat::zeros(m, m),
            two_form: two_form.clone(),
            bivector: CMat::zeros(m, m),
        })
    }

    /// Bivector generator: `α(X + ξ) = β(ξ)`, upper-right block.
    pub fn bivector_field(bivector: &CMat) -> Result<Self> {
        let m = bivector.nrows();
        Self::from_blocks(&SoBlocks {
            endo: CMat::zeros(m, m),
            two_form: CMat::zeros(m, m),
            bivector: bivector.clone(),
        })
    }

    /// `w ↦ 2⟨v, w⟩u - 2⟨u, w⟩v`, the image of `u ∧ v` in `so(V ⊕ V*)`.
    /// Its spin action is `½(u·v· - v·u·)`.
    pub fn from_wedge(u: &DoubleVector, v: &DoubleVector) -> Self {
        let m = u.m;
        let p = pairing_matrix(m);
        let vp = (v.coords.transpose() * &p) * c(2.0);
        let up = (u.coords.transpose() * &p) * c(2.0);
        Self {
            m,
            matrix: &u.coords * vp - &v.coords * up,
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn decompose(&self) -> SoBlocks {
        let m = self.m;
        SoBlocks {
            endo: self.matrix.view((0, 0), (m, m)).into_owned(),
            bivector: self.matrix.view((0, m), (m, m)).into_owned(),
            two_form: self.matrix.view((m, 0), (m, m)).into_owned(),
        }
    }

    pub fn apply(&self, v: &DoubleVector) -> DoubleVector {
        DoubleVector {
            m: self.m,
            coords: &self.matrix * &v.coords,
        }
    }

    /// Lie bracket `[α, β] = αβ - βα`.
    pub fn bracket(&self, other: &SoDouble) -> SoDouble {
        SoDouble {
            m: self.m,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    pub fn scale(&self, z: C64) -> SoDouble {
        SoDouble {
            m: self.m,
            matrix: &self.matrix * z,
        }
    }

    pub fn add(&self, other: &SoDouble) -> SoDouble {
        SoDouble {
            m: self.m,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn conj(&self) -> SoDouble {
        SoDouble {
            m: self.m,
            matrix: self.matrix.map(|z| z.conj()),
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        imag_part_norm(&self.matrix) <= tol
    }

    pub fn norm(&self) -> f64 {
        fro(&self.matrix)
    }

    /// Group element `e^α ∈ SO(V ⊕ V*)`.
    pub fn exp(&self) -> CMat {
        expm(&self.matrix)
    }
}
