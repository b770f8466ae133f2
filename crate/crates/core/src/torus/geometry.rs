//! The flat torus with a constant closed 3-form and the twisted differential.

use crate::clifford::{DoubleVector, Spinor};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{CMat, C64, I, ZERO};
use crate::torus::field::{Freq, SpinorField};

/// `T^m = R^m / 2πZ^m` with a constant 3-form `H` (automatically closed).
#[derive(Debug, Clone)]
pub struct TorusGeometry {
    m: usize,
    h: Spinor,
    h_wedge: CMat,
    wedges: Vec<CMat>,
}

fn wedge_operator(m: usize, form: &Spinor) -> CMat {
    let n = 1 << m;
    let mut mat = CMat::zeros(n, n);
    for mask in 0..n {
        let img = form.wedge(&Spinor::monomial(m, mask)).expect("same dimension");
        mat.set_column(mask, img.coeffs());
    }
    mat
}

impl TorusGeometry {
    pub fn new(m: usize, h: Spinor) -> Result<Self> {
        if h.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: h.dim(),
            });
        }
        let stray = (&h - &h.degree_part(3)).norm();
        if stray > 0.0 {
            return Err(Error::InvalidInput(format!(
                "H must be a pure 3-form (other degrees have norm {stray:.3e})"
            )));
        }
        if h.imag_norm() > 0.0 {
            return Err(Error::InvalidInput("H must be real".into()));
        }
        let wedges = (0..m)
            .map(|j| wedge_operator(m, &Spinor::monomial(m, 1 << j)))
            .collect();
        Ok(Self {
            m,
            h_wedge: wedge_operator(m, &h),
            h,
            wedges,
        })
    }

    pub fn flat(m: usize) -> Self {
        Self::new(m, Spinor::zeros(m)).expect("zero form is a 3-form")
    }

    /// `H = Σ c · dx_i ∧ dx_j ∧ dx_k` from 0-based index triples.
    pub fn from_components(m: usize, terms: &[([usize; 3], f64)]) -> Result<Self> {
        let mut h = Spinor::zeros(m);
        for (idx, val) in terms {
            if idx.iter().any(|&i| i >= m) {
                return Err(Error::InvalidInput(format!("H index {idx:?} out of range for m = {m}")));
            }
            h += &Spinor::from_terms(m, &[(&idx[..], C64::new(*val, 0.0))]);
        }
        Self::new(m, h)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> &Spinor {
        &self.h
    }

    pub fn h_is_zero(&self) -> bool {
        self.h.norm() == 0.0
    }

    /// Matrix of `H ∧ ·`.
    pub fn h_wedge(&self) -> &CMat {
        &self.h_wedge
    }

    /// Matrix of `dx_{j+1} ∧ ·`.
    pub fn wedge_dx(&self, j: usize) -> &CMat {
        &self.wedges[j]
    }

    /// `H(X, Y, Z) = i_Z i_Y i_X H`.
    pub fn h_value(&self, x: &[C64], y: &[C64], z: &[C64]) -> C64 {
        let contract = |form: &Spinor, v: &[C64]| {
            v.iter()
                .enumerate()
                .filter(|(_, &c)| c != ZERO)
                .fold(Spinor::zeros(self.m), |acc, (j, &c)| &acc + &(form.contract_basis(j) * c))
        };
        let f = contract(&contract(&contract(&self.h, x), y), z);
        f.coeff(0)
    }

    /// The 1-form `i_Y i_X H`.
    pub fn h_contract_two(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        (0..self.m)
            .map(|a| {
                let mut e = vec![ZERO; self.m];
                e[a] = C64::new(1.0, 0.0);
                self.h_value(x, y, &e)
            })
            .collect()
    }

    /// Block of `d^H` at frequency `k`: `Σ_j i k_j dx_j ∧ + H ∧`.
    pub fn d_block(&self, k: &Freq) -> CMat {
        let mut mat = self.h_wedge.clone();
        for (j, &kj) in k.as_slice().iter().enumerate() {
            if kj != 0 {
                mat += &self.wedges[j] * (I * kj as f64);
            }
        }
        mat
    }

    /// `d^H f`; the support is unchanged.
    pub fn dh_apply(&self, exec: Exec, f: &SpinorField) -> SpinorField {
        f.map(exec, |k, phi| &self.d_block(k) * phi)
    }

    /// Basis vector `∂_{j+1}` as a section coefficient.
    pub fn vector(&self, j: usize) -> DoubleVector {
        DoubleVector::vector(self.m, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, ONE};

    #[test]
    fn constant_field_is_closed_without_h() {
        let g = TorusGeometry::flat(2);
        let f = SpinorField::constant(2, Spinor::one(2));
        assert_eq!(g.dh_apply(Exec::Sequential, &f).norm(), 0.0);
    }

    #[test]
    fn derivative_of_single_mode() {
        let g = TorusGeometry::flat(2);
        let k = Freq(vec![1, 0]);
        let f = SpinorField::single(k.clone(), Spinor::one(2));
        let df = g.dh_apply(Exec::Sequential, &f);
        let want = Spinor::monomial(2, 0b01) * I;
        assert_eq!(df.get(&k).unwrap(), &want);
    }

    #[test]
    fn twisted_differential_squares_to_zero() {
        let g = TorusGeometry::from_components(4, &[([0, 1, 2], 0.7), ([1, 2, 3], -1.1)]).unwrap();
        for k in [Freq(vec![1, -2, 0, 3]), Freq(vec![0, 0, 0, 0])] {
            let d = g.d_block(&k);
            assert!(max_abs(&(&d * &d)) < 1e-13);
        }
    }

    #[test]
    fn h_value_is_antisymmetric() {
        let g = TorusGeometry::from_components(3, &[([0, 1, 2], 2.0)]).unwrap();
        let e = |i: usize| {
            let mut v = vec![ZERO; 3];
            v[i] = ONE;
            v
        };
        assert_eq!(g.h_value(&e(0), &e(1), &e(2)), c(2.0));
        assert_eq!(g.h_value(&e(1), &e(0), &e(2)), c(-2.0));
        assert_eq!(g.h_contract_two(&e(0), &e(1)), vec![ZERO, ZERO, c(2.0)]);
    }

    #[test]
    fn rejects_non_three_forms() {
        assert!(TorusGeometry::new(3, Spinor::monomial(3, 0b011)).is_err());
    }
}
