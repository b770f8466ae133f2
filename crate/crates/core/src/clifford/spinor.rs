use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMat, CVec, C64, ONE, ZERO};

/// Sign of `i_{∂_j} dx_I`: `(-1)^{#{i ∈ I : i < j}}`.
#[inline]
pub fn contraction_sign(mask: usize, j: usize) -> f64 {
    if (mask & ((1 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of `dx_A ∧ dx_B` relative to the ascending monomial `dx_{A∪B}`
/// (zero if `A ∩ B ≠ ∅`).
#[inline]
pub fn wedge_sign(a: usize, b: usize) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign applied by transposition to a degree-`k` monomial.
#[inline]
pub fn transpose_sign(k: u32) -> f64 {
    if (k * k.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Orientation of `V` (and of the top degree used by the Chevalley pairing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// A complex form in `∧•(R^m)* ⊗ C`, stored densely by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    m: usize,
    coeffs: CVec,
}

impl Spinor {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            coeffs: CVec::zeros(1 << m),
        }
    }

    /// The constant function 1.
    pub fn one(m: usize) -> Self {
        Self::monomial(m, 0)
    }

    /// `dx_I` for the bitmask `I`.
    pub fn monomial(m: usize, mask: usize) -> Self {
        let mut s = Self::zeros(m);
        s.coeffs[mask] = ONE;
        s
    }

    pub fn from_coeffs(m: usize, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != 1 << m {
            return Err(Error::DimensionMismatch {
                expected: 1 << m,
                found: coeffs.len(),
            });
        }
        Ok(Self { m, coeffs })
    }

    /// Builds a form from `(indices, coefficient)` terms with 0-based,
    /// not necessarily sorted indices; `dx_2 ∧ dx_1` is stored as `-dx_1 ∧ dx_2`.
    pub fn from_terms(m: usize, terms: &[(&[usize], C64)]) -> Self {
        let mut s = Self::zeros(m);
        for (idx, z) in terms {
            let mut mono = Spinor::one(m);
            for &i in idx.iter().rev() {
                mono = mono.wedge_basis(i);
            }
            s += &(mono * *z);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVec {
        self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> C64 {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, z: C64) {
        self.coeffs[mask] = z;
    }

    pub fn top_mask(&self) -> usize {
        (1 << self.m) - 1
    }

    /// Homogeneous degree-`k` part.
    pub fn degree_part(&self, k: u32) -> Spinor {
        let mut out = self.clone();
        for (mask, z) in out.coeffs.iter_mut().enumerate() {
            if mask.count_ones() != k {
                *z = ZERO;
            }
        }
        out
    }

    /// Transposition `(θ_1 ∧ … ∧ θ_k)^t = θ_k ∧ … ∧ θ_1`.
    pub fn transpose(&self) -> Spinor {
        let mut out = self.clone();
        for (mask, z) in out.coeffs.iter_mut().enumerate() {
            *z *= transpose_sign(mask.count_ones());
        }
        out
    }

    pub fn conj(&self) -> Spinor {
        Spinor {
            m: self.m,
            coeffs: self.coeffs.map(|z| z.conj()),
        }
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.coeffs)
    }

    /// Imaginary content, zero iff the form is real.
    pub fn imag_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
    }

    pub fn check_dim(&self, other: &Spinor) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        Ok(())
    }

    /// `dx_j ∧ self` for 0-based `j`.
    pub fn wedge_basis(&self, j: usize) -> Spinor {
        let mut out = Spinor::zeros(self.m);
        let bit = 1 << j;
        for (mask, &z) in self.coeffs.iter().enumerate() {
            if mask & bit == 0 && z != ZERO {
                out.coeffs[mask | bit] += z * contraction_sign(mask, j);
            }
        }
        out
    }

    /// `i_{∂_j} self` for 0-based `j`.
    pub fn contract_basis(&self, j: usize) -> Spinor {
        let mut out = Spinor::zeros(self.m);
        let bit = 1 << j;
        for (mask, &z) in self.coeffs.iter().enumerate() {
            if mask & bit != 0 && z != ZERO {
                out.coeffs[mask ^ bit] += z * contraction_sign(mask, j);
            }
        }
        out
    }

    /// `self ∧ other`.
    pub fn wedge(&self, other: &Spinor) -> Result<Spinor> {
        self.check_dim(other)?;
        let mut out = Spinor::zeros(self.m);
        for (a, &za) in self.coeffs.iter().enumerate() {
            if za == ZERO {
                continue;
            }
            for (b, &zb) in other.coeffs.iter().enumerate() {
                if zb == ZERO || a & b != 0 {
                    continue;
                }
                out.coeffs[a | b] += za * zb * wedge_sign(a, b);
            }
        }
        Ok(out)
    }

    /// Matrix of `φ ↦ self ∧ φ` on the `2^m`-dimensional form space.
    pub fn wedge_matrix(&self) -> CMat {
        let n = 1 << self.m;
        let mut mat = CMat::zeros(n, n);
        for (a, &za) in self.coeffs.iter().enumerate() {
            if za == ZERO {
                continue;
            }
            for b in 0..n {
                if a & b == 0 {
                    mat[(a | b, b)] += za * wedge_sign(a, b);
                }
            }
        }
        mat
    }

    /// Coefficient of `dx_1 ∧ … ∧ dx_m`.
    pub fn top(&self) -> C64 {
        self.coeffs[self.top_mask()]
    }

    /// Rescales so the largest-magnitude coefficient (first one on ties) equals 1.
    pub fn normalized_generator(&self) -> Spinor {
        let max = self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let pivot = self
            .coeffs
            .iter()
            .find(|z| z.norm() >= max * (1.0 - 1e-9))
            .copied()
            .unwrap_or(ONE);
        self.clone() * (ONE / pivot)
    }
}

/// Chevalley pairing `(φ, ψ) = -(φ ∧ ψ^t)_top` against the positive top form.
pub fn chevalley_pairing(phi: &Spinor, psi: &Spinor) -> Result<C64> {
    chevalley_pairing_oriented(phi, psi, Orientation::Positive)
}

/// Chevalley pairing with the top component read against `o · dx_1 ∧ … ∧ dx_m`.
pub fn chevalley_pairing_oriented(phi: &Spinor, psi: &Spinor, o: Orientation) -> Result<C64> {
    phi.check_dim(psi)?;
    let top = phi.top_mask();
    let mut acc = ZERO;
    for (a, &za) in phi.coeffs.iter().enumerate() {
        if za == ZERO {
            continue;
        }
        let b = top ^ a;
        let zb = psi.coeffs[b];
        if zb == ZERO {
            continue;
        }
        acc += za * zb * (transpose_sign(b.count_ones()) * wedge_sign(a, b));
    }
    Ok(-acc * o.sign())
}

/// Matrix `C` with `(φ, ψ)_Ch = φᵀ C ψ`.
pub fn chevalley_matrix(m: usize) -> CMat {
    let n = 1 << m;
    let top = n - 1;
    let mut mat = CMat::zeros(n, n);
    for a in 0..n {
        let b = top ^ a;
        mat[(a, b)] = C64::new(-transpose_sign(b.count_ones()) * wedge_sign(a, b), 0.0);
    }
    mat
}

impl Add<&Spinor> for &Spinor {
    type Output = Spinor;
    fn add(self, rhs: &Spinor) -> Spinor {
        assert_eq!(self.m, rhs.m, "spinor dimension mismatch");
        Spinor {
            m: self.m,
            coeffs: &self.coeffs + &rhs.coeffs,
        }
    }
}

impl Sub<&Spinor> for &Spinor {
    type Output = Spinor;
    fn sub(self, rhs: &Spinor) -> Spinor {
        assert_eq!(self.m, rhs.m, "spinor dimension mismatch");
        Spinor {
            m: self.m,
            coeffs: &self.coeffs - &rhs.coeffs,
        }
    }
}

impl AddAssign<&Spinor> for Spinor {
    fn add_assign(&mut self, rhs: &Spinor) {
        assert_eq!(self.m, rhs.m, "spinor dimension mismatch");
        self.coeffs += &rhs.coeffs;
    }
}

impl SubAssign<&Spinor> for Spinor {
    fn sub_assign(&mut self, rhs: &Spinor) {
        assert_eq!(self.m, rhs.m, "spinor dimension mismatch");
        self.coeffs -= &rhs.coeffs;
    }
}

impl Mul<C64> for Spinor {
    type Output = Spinor;
    fn mul(mut self, z: C64) -> Spinor {
        self.coeffs *= z;
        self
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor {
            m: self.m,
            coeffs: -self.coeffs,
        }
    }
}

impl Mul<&Spinor> for &CMat {
    type Output = Spinor;
    fn mul(self, rhs: &Spinor) -> Spinor {
        Spinor {
            m: rhs.m,
            coeffs: self * &rhs.coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn wedge_signs() {
        // dx2 ∧ dx1 = -dx1 ∧ dx2
        let s = Spinor::monomial(2, 0b01).wedge_basis(1);
        assert_eq!(s.coeff(0b11), c(-1.0));
        let t = Spinor::monomial(2, 0b10).wedge_basis(0);
        assert_eq!(t.coeff(0b11), c(1.0));
        let u = Spinor::from_terms(2, &[(&[1, 0], ONE)]);
        assert_eq!(u.coeff(0b11), c(-1.0));
        assert_eq!(wedge_sign(0b10, 0b01), -1.0);
        assert_eq!(wedge_sign(0b01, 0b10), 1.0);
        assert_eq!(wedge_sign(0b01, 0b01), 0.0);
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative() {
        let m = 4;
        let a = Spinor::from_terms(m, &[(&[0], c(1.0)), (&[1, 2], c(2.0))]);
        let b = Spinor::from_terms(m, &[(&[3], c(-1.0)), (&[0, 3], c(0.5))]);
        let d = Spinor::from_terms(m, &[(&[2], c(3.0))]);
        let l = a.wedge(&b).unwrap().wedge(&d).unwrap();
        let r = a.wedge(&b.wedge(&d).unwrap()).unwrap();
        assert!((&l - &r).norm() < 1e-14);
        let x = Spinor::from_terms(m, &[(&[1], c(1.0))]);
        let y = Spinor::from_terms(m, &[(&[2], c(1.0))]);
        let xy = x.wedge(&y).unwrap();
        let yx = y.wedge(&x).unwrap();
        assert!((&xy + &yx).norm() < 1e-15);
    }

    #[test]
    fn wedge_matrix_matches_wedge() {
        let m = 3;
        let a = Spinor::from_terms(m, &[(&[0, 2], c(1.5)), (&[1], c(-0.5))]);
        let b = Spinor::from_terms(m, &[(&[1], c(2.0)), (&[], c(1.0)), (&[0], c(0.25))]);
        let direct = a.wedge(&b).unwrap();
        let via = &a.wedge_matrix() * &b;
        assert!((&direct - &via).norm() < 1e-15);
    }

    #[test]
    fn transpose_is_an_involution() {
        let m = 4;
        let s = Spinor::from_coeffs(m, CVec::from_fn(16, |i, _| c(i as f64 + 1.0))).unwrap();
        assert_eq!(s.transpose().transpose(), s);
        assert_eq!(s.transpose().coeff(0b11), c(-4.0));
        assert_eq!(s.transpose().coeff(0b111), c(-8.0));
        assert_eq!(s.transpose().coeff(0b1111), c(16.0));
    }

    #[test]
    fn chevalley_examples() {
        let one = Spinor::one(2);
        let top = Spinor::monomial(2, 0b11);
        let dx1 = Spinor::monomial(2, 0b01);
        let dx2 = Spinor::monomial(2, 0b10);
        assert_eq!(chevalley_pairing(&one, &top).unwrap(), c(1.0));
        assert_eq!(chevalley_pairing(&dx1, &dx1).unwrap(), c(0.0));
        assert_eq!(chevalley_pairing(&dx1, &dx2).unwrap(), c(-1.0));
        assert_eq!(
            chevalley_pairing_oriented(&dx1, &dx2, Orientation::Negative).unwrap(),
            c(1.0)
        );
    }

    #[test]
    fn chevalley_matrix_matches_pairing() {
        for m in 1..=5 {
            let cm = chevalley_matrix(m);
            let n = 1 << m;
            for a in 0..n {
                for b in 0..n {
                    let p = chevalley_pairing(&Spinor::monomial(m, a), &Spinor::monomial(m, b)).unwrap();
                    assert_eq!(p, cm[(a, b)]);
                }
            }
        }
    }

    #[test]
    fn degree_parts_recover_form() {
        let m = 3;
        let s = Spinor::from_coeffs(m, CVec::from_fn(8, |i, _| c(i as f64))).unwrap();
        let mut sum = Spinor::zeros(m);
        for k in 0..=3 {
            sum += &s.degree_part(k);
        }
        assert_eq!(sum, s);
        assert_eq!(s.degree_part(2).coeff(0b011), c(3.0));
        assert_eq!(s.degree_part(2).coeff(0b111), c(0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Spinor::one(2);
        let b = Spinor::one(3);
        assert!(matches!(
            chevalley_pairing(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Spinor::from_coeffs(2, CVec::zeros(3)).is_err());
    }
}
