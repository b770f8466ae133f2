//! The Hermitian L² product `h(f, g) = Σ_k (f_k, ★ conj(g_k))_Ch` on form fields.

use crate::clifford::{chevalley_matrix, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{c, complexify, real_part, CMat, C64, ZERO};
use crate::structures::HermitianPair;
use crate::torus::SpinorField;

/// Gram matrix `M_{IJ} = (dx_I, ★ dx_J)_Ch` of the pointwise product, with its
/// Cholesky factor `M = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    gram: CMat,
    gram_inv: CMat,
    chol: CMat,
    chol_inv: CMat,
}

impl InnerProduct {
    pub fn new(pair: &HermitianPair) -> Result<Self> {
        let m = pair.dim();
        let pairing = chevalley_matrix(m) * c(pair.orientation().sign());
        let gram_c = pairing * pair.star();
        let gram_r = real_part(&gram_c);
        let sym = (&gram_r + gram_r.transpose()) * 0.5;
        let chol = sym.clone().cholesky().ok_or(Error::SingularGram)?;
        let l = chol.l();
        let l_inv = l.clone().try_inverse().ok_or(Error::SingularGram)?;
        let gram_inv = sym.clone().try_inverse().ok_or(Error::SingularGram)?;
        Ok(Self {
            gram: complexify(&sym),
            gram_inv: complexify(&gram_inv),
            chol: complexify(&l),
            chol_inv: complexify(&l_inv),
        })
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn cholesky(&self) -> (&CMat, &CMat) {
        (&self.chol, &self.chol_inv)
    }

    /// Pointwise `(φ, ★ conj ψ)_Ch = φᵀ M conj(ψ)`.
    pub fn pointwise(&self, phi: &Spinor, psi: &Spinor) -> C64 {
        let mpsi = &self.gram * psi.conj().coeffs();
        phi.coeffs().iter().zip(mpsi.iter()).map(|(a, b)| a * b).sum()
    }

    /// Parseval form of `∫ (f, ★ḡ)_Ch` on the torus of unit volume.
    pub fn l2(&self, f: &SpinorField, g: &SpinorField) -> C64 {
        f.iter().fold(ZERO, |acc, (k, phi)| match g.get(k) {
            Some(psi) => acc + self.pointwise(phi, psi),
            None => acc,
        })
    }

    pub fn l2_norm(&self, f: &SpinorField) -> f64 {
        self.l2(f, f).re.max(0.0).sqrt()
    }

    /// Adjoint of one block for `h`: `A* = M⁻¹ Aᴴ M`.
    pub fn adjoint_block(&self, a: &CMat) -> CMat {
        &self.gram_inv * a.adjoint() * &self.gram
    }
}

/// `h(f, g)` for a Hermitian pair.
pub fn l2_inner(f: &SpinorField, g: &SpinorField, pair: &HermitianPair) -> Result<C64> {
    Ok(InnerProduct::new(pair)?.l2(f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, I, ONE};
    use crate::structures::standard_complex;
    use crate::torus::Freq;
    use nalgebra::DMatrix;

    fn kaehler(m: usize) -> HermitianPair {
        HermitianPair::kaehler(&DMatrix::identity(m, m), &standard_complex(m)).unwrap()
    }

    #[test]
    fn gram_is_identity_for_flat_kaehler_metric() {
        for m in [2, 4] {
            let ip = InnerProduct::new(&kaehler(m)).unwrap();
            let d = 1 << m;
            assert!(max_abs(&(ip.gram() - CMat::identity(d, d))) < 1e-13);
        }
    }

    #[test]
    fn exp_i_omega_norm_in_two_dimensions() {
        let pair = kaehler(2);
        let eio = Spinor::from_terms(2, &[(&[], ONE), (&[0, 1], I)]);
        let f = SpinorField::constant(2, eio);
        // |1|² + |i|² with the unit Gram matrix.
        assert!((l2_inner(&f, &f, &pair).unwrap() - c(2.0)).norm() < 1e-13);
    }

    #[test]
    fn distinct_frequencies_are_orthogonal() {
        let pair = kaehler(2);
        let f = SpinorField::single(Freq(vec![1, 0]), Spinor::one(2));
        let g = SpinorField::single(Freq(vec![0, 1]), Spinor::one(2));
        assert_eq!(l2_inner(&f, &g, &pair).unwrap(), ZERO);
    }

    #[test]
    fn product_is_hermitian() {
        let pair = crate::random::random_hermitian_pair(
            4,
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5),
        )
        .unwrap();
        let ip = InnerProduct::new(&pair).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        let a = crate::random::random_spinor(4, &mut rng);
        let b = crate::random::random_spinor(4, &mut rng);
        assert!((ip.pointwise(&a, &b) - ip.pointwise(&b, &a).conj()).norm() < 1e-12);
        assert!(ip.pointwise(&a, &a).re > 0.0);
    }
}
