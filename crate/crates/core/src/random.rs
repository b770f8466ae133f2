//! Seeded random inputs for property checks.

use nalgebra::DMatrix;
use rand::Rng;

use crate::clifford::{DoubleVector, SoDouble, Spinor};
use crate::error::Result;
use crate::linalg::{complexify, CMat, CVec, C64};
use crate::structures::{standard_complex, GeneralizedComplexStructure, GeneralizedMetric, HermitianPair};

fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..1.0)
}

fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(uniform(rng), uniform(rng))
}

pub fn random_spinor<R: Rng>(m: usize, rng: &mut R) -> Spinor {
    let coeffs = CVec::from_fn(1 << m, |_, _| complex(rng));
    Spinor::from_coeffs(m, coeffs).expect("length 2^m")
}

pub fn random_real_spinor<R: Rng>(m: usize, rng: &mut R) -> Spinor {
    let coeffs = CVec::from_fn(1 << m, |_, _| C64::new(uniform(rng), 0.0));
    Spinor::from_coeffs(m, coeffs).expect("length 2^m")
}

pub fn random_double_vector<R: Rng>(m: usize, rng: &mut R) -> DoubleVector {
    DoubleVector::from_coords(CVec::from_fn(2 * m, |_, _| complex(rng))).expect("even length")
}

/// Real skew `m × m` matrix with entries in `[-scale, scale]`.
pub fn random_skew<R: Rng>(m: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| scale * uniform(rng));
    (&a - a.transpose()) * 0.5
}

/// Real element of `so(V ⊕ V*)` with blocks of size about `scale`.
pub fn random_so<R: Rng>(m: usize, scale: f64, rng: &mut R) -> SoDouble {
    let a = DMatrix::from_fn(m, m, |_, _| scale * uniform(rng));
    let b = random_skew(m, 2.0 * scale, rng);
    let beta = random_skew(m, 2.0 * scale, rng);
    let mut mat = DMatrix::<f64>::zeros(2 * m, 2 * m);
    mat.view_mut((0, 0), (m, m)).copy_from(&a);
    mat.view_mut((0, m), (m, m)).copy_from(&beta);
    mat.view_mut((m, 0), (m, m)).copy_from(&b);
    mat.view_mut((m, m), (m, m)).copy_from(&(-a.transpose()));
    SoDouble::from_real(&mat).expect("antisymmetric by construction")
}

/// Symmetric positive-definite matrix with spectrum in roughly `[0.5, 2.5]`.
pub fn random_spd<R: Rng>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| uniform(rng));
    &a * a.transpose() * (1.0 / m as f64) + DMatrix::identity(m, m) * 0.5
}

pub fn random_orthogonal<R: Rng>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| uniform(rng));
    let qr = a.qr();
    qr.q()
}

pub fn random_metric<R: Rng>(m: usize, rng: &mut R) -> Result<GeneralizedMetric> {
    let g = random_spd(m, rng);
    let b = random_skew(m, 1.0, rng);
    GeneralizedMetric::from_g_b(&g, &b)
}

/// A complex structure on `R^m` orthogonal for `g`.
pub fn random_orthogonal_complex<R: Rng>(g: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let m = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let inv_sqrt = sqrt.clone().try_inverse().expect("positive definite");
    let o = random_orthogonal(m, rng);
    let j0 = &o * standard_complex(m) * o.transpose();
    inv_sqrt * j0 * sqrt
}

/// Generalized almost Hermitian pair from `(g, b, J₊, J₋)`: `J₁` acts as the
/// `g`-orthogonal complex structure `J±` on `V± ≅ V`.
pub fn random_hermitian_pair<R: Rng>(m: usize, rng: &mut R) -> Result<HermitianPair> {
    let metric = random_metric(m, rng)?;
    let (g, _) = metric.g_b();
    let jp = complexify(&random_orthogonal_complex(&g, rng));
    let jm = complexify(&random_orthogonal_complex(&g, rng));
    let frame = {
        let mut f = CMat::zeros(2 * m, 2 * m);
        f.view_mut((0, 0), (2 * m, m)).copy_from(metric.plus_frame());
        f.view_mut((0, m), (2 * m, m)).copy_from(metric.minus_frame());
        f
    };
    let mut block = CMat::zeros(2 * m, 2 * m);
    block.view_mut((0, 0), (m, m)).copy_from(&jp);
    block.view_mut((m, m), (m, m)).copy_from(&jm);
    let inv = frame.clone().try_inverse().expect("V+ and V- are complementary");
    let mut j1 = &frame * block * inv;
    j1.iter_mut().for_each(|z| z.im = 0.0);
    HermitianPair::new(metric, GeneralizedComplexStructure::from_matrix(j1)?)
}
