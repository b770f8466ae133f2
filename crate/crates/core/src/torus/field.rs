//! Finitely supported Fourier series `Σ_k e^{i⟨k,x⟩} c_k` on the torus `T^m`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg};

use crate::clifford::{DoubleVector, Spinor};
use crate::exec::Exec;
use crate::linalg::{CMat, C64, ZERO};

/// Integer frequency vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Freq(pub Vec<i32>);

impl Freq {
    pub fn zero(m: usize) -> Self {
        Freq(vec![0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    /// `⟨k, x⟩`.
    pub fn phase(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum()
    }

    /// `Σ_j k_j v_j` for a complex vector `v`.
    pub fn pair(&self, v: &[C64]) -> C64 {
        self.0.iter().zip(v).map(|(&k, &z)| z * k as f64).sum()
    }

    pub fn sup_norm(&self) -> i32 {
        self.0.iter().map(|k| k.abs()).max().unwrap_or(0)
    }
}

impl Add for &Freq {
    type Output = Freq;
    fn add(self, rhs: &Freq) -> Freq {
        Freq(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Neg for &Freq {
    type Output = Freq;
    fn neg(self) -> Freq {
        Freq(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<i32>> for Freq {
    fn from(v: Vec<i32>) -> Self {
        Freq(v)
    }
}

/// All frequencies with `‖k‖_∞ ≤ r`, in lexicographic order.
pub fn frequency_box(m: usize, r: i32) -> Vec<Freq> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0; m];
            for slot in v.iter_mut().rev() {
                *slot = (idx % side) as i32 - r;
                idx /= side;
            }
            Freq(v)
        })
        .collect()
}

/// Values a Fourier coefficient can take.
pub trait Coefficient: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn accumulate(&mut self, other: &Self);
    fn scaled(&self, z: C64) -> Self;
    fn conjugate(&self) -> Self;
    fn norm_sqr(&self) -> f64;
}

impl Coefficient for Spinor {
    fn zero_like(&self) -> Self {
        Spinor::zeros(self.dim())
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, z: C64) -> Self {
        self.clone() * z
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn norm_sqr(&self) -> f64 {
        self.coeffs().iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Coefficient for DoubleVector {
    fn zero_like(&self) -> Self {
        DoubleVector::zeros(self.dim())
    }
    fn accumulate(&mut self, other: &Self) {
        *self = self.add(other);
    }
    fn scaled(&self, z: C64) -> Self {
        self.scale(z)
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn norm_sqr(&self) -> f64 {
        self.coords().iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Coefficient for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, z: C64) -> Self {
        self * z
    }
    fn conjugate(&self) -> Self {
        self.map(|z| z.conj())
    }
    fn norm_sqr(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Coefficient for C64 {
    fn zero_like(&self) -> Self {
        ZERO
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, z: C64) -> Self {
        self * z
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn norm_sqr(&self) -> f64 {
        C64::norm_sqr(self)
    }
}

/// A trigonometric polynomial with coefficients in `T`; the support is the
/// explicit key set and is never truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField<T> {
    m: usize,
    terms: BTreeMap<Freq, T>,
}

pub type SpinorField = FourierField<Spinor>;
pub type SectionField = FourierField<DoubleVector>;
/// Matrix-valued field: `so(V ⊕ V*)` elements (`2m × 2m`) or operators on forms (`2^m × 2^m`).
pub type MatrixField = FourierField<CMat>;
pub type ScalarField = FourierField<C64>;

impl<T: Coefficient> FourierField<T> {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, value: T) -> Self {
        Self::single(Freq::zero(m), value)
    }

    pub fn single(k: Freq, value: T) -> Self {
        let mut f = Self::new(k.dim());
        f.terms.insert(k, value);
        f
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Freq, T)>) -> Self {
        let mut f = Self::new(m);
        for (k, v) in terms {
            f.add_term(k, &v);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn add_term(&mut self, k: Freq, value: &T) {
        debug_assert_eq!(k.dim(), self.m);
        match self.terms.get_mut(&k) {
            Some(cur) => cur.accumulate(value),
            None => {
                self.terms.insert(k, value.clone());
            }
        }
    }

    pub fn get(&self, k: &Freq) -> Option<&T> {
        self.terms.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Freq, &T)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<Freq> {
        self.terms.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parseval norm `(Σ_k |c_k|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(Coefficient::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scaled(z))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `x ↦ conj(f(x))`: the coefficient at `k` becomes `conj(c_{-k})`.
    pub fn conj_field(&self) -> Self {
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (-k, v.conjugate())).collect(),
        }
    }

    /// `‖f - conj(f)‖`; zero exactly for real fields.
    pub fn reality_residual(&self) -> f64 {
        self.sub(&self.conj_field()).norm()
    }

    /// Drops coefficients whose norm is at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            m: self.m,
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.norm_sqr().sqrt() > tol)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every coefficient; support unchanged.
    pub fn map<U: Coefficient>(&self, exec: Exec, f: impl Fn(&Freq, &T) -> U + Sync + Send) -> FourierField<U> {
        let entries: Vec<(&Freq, &T)> = self.terms.iter().collect();
        let mapped = exec.map(&entries, |(k, v)| f(k, v));
        FourierField {
            m: self.m,
            terms: entries.into_iter().map(|(k, _)| k.clone()).zip(mapped).collect(),
        }
    }

    /// `f(x) = Σ_k e^{i⟨k,x⟩} c_k`.
    pub fn evaluate(&self, x: &[f64]) -> Option<T> {
        let mut acc: Option<T> = None;
        for (k, v) in &self.terms {
            let term = v.scaled(C64::from_polar(1.0, k.phase(x)));
            match acc.as_mut() {
                Some(a) => a.accumulate(&term),
                None => acc = Some(term),
            }
        }
        acc
    }
}

/// Exact product of trigonometric polynomials: `(Σ a_k e^{ikx})(Σ b_l e^{ilx})`
/// with the pointwise product `mul`. Pair products may run in parallel; they
/// are accumulated in the fixed lexicographic order of `(k, l)`.
pub fn convolve<A, B, C>(
    exec: Exec,
    a: &FourierField<A>,
    b: &FourierField<B>,
    mul: impl Fn(&A, &B) -> C + Sync + Send,
) -> FourierField<C>
where
    A: Coefficient,
    B: Coefficient,
    C: Coefficient,
{
    let pairs: Vec<(&Freq, &A, &Freq, &B)> = a
        .iter()
        .flat_map(|(k, x)| b.iter().map(move |(l, y)| (k, x, l, y)))
        .collect();
    let products = exec.map(&pairs, |(k, x, l, y)| (*k + *l, mul(x, y)));
    let mut out = FourierField::new(a.dim());
    for (k, v) in products {
        out.add_term(k, &v);
    }
    out
}

/// Operator field acting on a form field: `(Σ M_k e^{ikx})(Σ φ_l e^{ilx})`.
pub fn apply_operator_field(exec: Exec, op: &MatrixField, f: &SpinorField) -> SpinorField {
    convolve(exec, op, f, |mat, phi| mat * phi)
}

/// Pointwise matrix product of two matrix fields.
pub fn multiply_matrix_fields(exec: Exec, a: &MatrixField, b: &MatrixField) -> MatrixField {
    convolve(exec, a, b, |x, y| x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, I, ONE};

    #[test]
    fn frequency_box_size_and_order() {
        let b = frequency_box(2, 1);
        assert_eq!(b.len(), 9);
        assert_eq!(b[0], Freq(vec![-1, -1]));
        assert_eq!(b[4], Freq(vec![0, 0]));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn convolution_adds_frequencies() {
        let a = ScalarField::from_terms(1, [(Freq(vec![1]), ONE), (Freq(vec![-1]), ONE)]);
        // (2 cos x)^2 = e^{2ix} + 2 + e^{-2ix}
        let sq = convolve(Exec::Sequential, &a, &a, |x, y| x * y);
        assert_eq!(sq.support(), vec![Freq(vec![-2]), Freq(vec![0]), Freq(vec![2])]);
        assert_eq!(*sq.get(&Freq(vec![0])).unwrap(), c(2.0));
    }

    #[test]
    fn conj_field_of_real_field() {
        let f = ScalarField::from_terms(1, [(Freq(vec![2]), I), (Freq(vec![-2]), -I)]);
        assert_eq!(f.reality_residual(), 0.0);
        let g = ScalarField::single(Freq(vec![2]), I);
        assert!(g.reality_residual() > 1.0);
    }

    #[test]
    fn evaluate_matches_closed_form() {
        let f = ScalarField::from_terms(1, [(Freq(vec![1]), c(0.5)), (Freq(vec![-1]), c(0.5))]);
        let v = f.evaluate(&[0.3]).unwrap();
        assert!((v - c(0.3f64.cos())).norm() < 1e-15);
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let terms: Vec<(Freq, C64)> = (0..20)
            .map(|i| (Freq(vec![i % 5 - 2, i / 5]), C64::new(i as f64 * 0.37, 1.0 / (i as f64 + 1.0))))
            .collect();
        let a = ScalarField::from_terms(2, terms);
        let s = convolve(Exec::Sequential, &a, &a, |x, y| x * y);
        let p = convolve(Exec::Parallel, &a, &a, |x, y| x * y);
        assert_eq!(s, p);
    }
}
