//! Deformation families `a_t` of the first generalized complex structure.

use crate::clifford::SoDouble;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{c, CMat, C64, I};
use crate::solver::series::{exp_matrix_series, multiply_series, Series, SoSeries};
use crate::structures::GeneralizedComplexStructure;
use crate::torus::{Freq, MatrixField};

/// A deformation `e^{a_1(t)} ⋯ e^{a_r(t)}` acting on the first structure.
#[derive(Debug, Clone)]
pub struct DeformationFamily {
    pub name: String,
    pub factors: Vec<SoSeries>,
}

impl DeformationFamily {
    pub fn new(name: impl Into<String>, factors: Vec<SoSeries>) -> Self {
        Self {
            name: name.into(),
            factors,
        }
    }

    /// Appends a factor on the right.
    pub fn with_factor(mut self, factor: SoSeries) -> Self {
        self.factors.push(factor);
        self
    }

    pub fn truncated(&self, order: usize) -> Self {
        Self {
            name: self.name.clone(),
            factors: self.factors.iter().map(|f| f.truncated(order)).collect(),
        }
    }

    /// Largest `‖a + J a J‖ / ‖a‖` over factors and coefficients: zero when
    /// every generator commutes with `J`, one when every generator anticommutes.
    pub fn commuting_fraction(&self, j: &GeneralizedComplexStructure) -> f64 {
        let jm = j.matrix();
        let mut worst: f64 = 0.0;
        for f in &self.factors {
            for coeff in f.orders() {
                for (_, a) in coeff.iter() {
                    let nrm = a.norm();
                    if nrm > 0.0 {
                        worst = worst.max((a - jm * a * jm).norm() / (2.0 * nrm));
                    }
                }
            }
        }
        worst
    }
}

/// Image in `so(V ⊕ V*)` of the bivector `Σ_{i<j} π^{ij} ∂_i ∧ ∂_j`.
pub fn bivector_generator(pi: &CMat) -> CMat {
    let m = pi.nrows();
    let mut mat = CMat::zeros(2 * m, 2 * m);
    mat.view_mut((0, m), (m, m)).copy_from(pi);
    mat
}

/// Image in `so(V ⊕ V*)` of the 2-form with skew matrix `b`.
pub fn two_form_generator(b: &CMat) -> CMat {
    let m = b.nrows();
    let mut mat = CMat::zeros(2 * m, 2 * m);
    mat.view_mut((m, 0), (m, m)).copy_from(b);
    mat
}

/// `∂_{z_a} = ½(∂_{2a} - i ∂_{2a+1})` for the standard complex structure.
fn holomorphic_vector(m: usize, a: usize) -> nalgebra::DVector<C64> {
    let mut v = nalgebra::DVector::zeros(m);
    v[2 * a] = c(0.5);
    v[2 * a + 1] = -I * 0.5;
    v
}

/// Constant holomorphic Poisson deformation `a_t = t(σ + σ̄)` with
/// `σ = coeff · ∂_{z_a} ∧ ∂_{z_b}` for the standard complex structure.
pub fn holomorphic_poisson(m: usize, a: usize, b: usize, coeff: C64, order: usize) -> Result<DeformationFamily> {
    if m % 2 != 0 || a == b || 2 * a.max(b) + 1 >= m {
        return Err(Error::InvalidInput(format!(
            "holomorphic bivector ∂z{a}∧∂z{b} is not defined in real dimension {m}"
        )));
    }
    let u = holomorphic_vector(m, a);
    let v = holomorphic_vector(m, b);
    let sigma = (&u * v.transpose() - &v * u.transpose()) * coeff;
    let real = &sigma + sigma.map(|z| z.conj());
    let gen = bivector_generator(&real);
    Ok(DeformationFamily::new(
        "holomorphic-poisson",
        vec![SoSeries::linear(MatrixField::constant(m, gen), order)],
    ))
}

/// Constant deformation `a_t = t a` for a real `a ∈ so(V ⊕ V*)`.
pub fn constant_family(a: &SoDouble, order: usize) -> Result<DeformationFamily> {
    if !a.is_real(1e-14) {
        return Err(Error::InvalidInput("deformation generator must be real".into()));
    }
    Ok(DeformationFamily::new(
        "constant",
        vec![SoSeries::linear(MatrixField::constant(a.dim(), a.matrix().clone()), order)],
    ))
}

/// A real 1-form `ξ = Σ_k e^{i⟨k,x⟩} ξ_k` given by its Fourier coefficients.
#[derive(Debug, Clone)]
pub struct OneForm {
    m: usize,
    terms: Vec<(Freq, Vec<C64>)>,
}

impl OneForm {
    /// Adds `amplitude · cos(⟨k,x⟩ + phase) dx_{index}` (or `sin` for `phase = -π/2`).
    pub fn cosine(m: usize, k: Freq, index: usize, amplitude: f64, phase: f64) -> Self {
        Self { m, terms: Vec::new() }.plus_cosine(k, index, amplitude, phase)
    }

    pub fn plus_cosine(mut self, k: Freq, index: usize, amplitude: f64, phase: f64) -> Self {
        let mut coeff = vec![c(0.0); self.m];
        coeff[index] = C64::from_polar(0.5 * amplitude, phase);
        let mut conj = vec![c(0.0); self.m];
        conj[index] = C64::from_polar(0.5 * amplitude, -phase);
        self.terms.push((-&k, conj));
        self.terms.push((k, coeff));
        self
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// `dξ` as a field of skew matrices: the coefficient at `k` is `i(k ξ_kᵀ - ξ_k kᵀ)`.
    pub fn exterior_derivative(&self) -> MatrixField {
        let m = self.m;
        let mut out = MatrixField::new(m);
        for (k, xi) in &self.terms {
            if k.is_zero() {
                continue;
            }
            let b = CMat::from_fn(m, m, |j, i| I * (c(k.0[j] as f64) * xi[i] - c(k.0[i] as f64) * xi[j]));
            out.add_term(k.clone(), &b);
        }
        out.pruned(0.0)
    }
}

/// Splits `e^{tB}` for a field of 2-forms into `e^{a_t} e^{c_t}` with every
/// coefficient of `a_t` anticommuting and every coefficient of `c_t` commuting
/// with `J`, order by order up to `order`.
pub fn split_exact_b_field(
    exec: Exec,
    b: &MatrixField,
    j: &GeneralizedComplexStructure,
    order: usize,
) -> (SoSeries, SoSeries) {
    let m = j.dim();
    let jm = j.matrix();
    let generator = b.map(exec, |_, two| two_form_generator(two));
    let mut a = SoSeries::zeros(m, order);
    let mut comm = SoSeries::zeros(m, order);
    for k in 1..=order {
        let ea = exp_matrix_series(exec, &a, 2 * m, k);
        let ec = exp_matrix_series(exec, &comm, 2 * m, k);
        let prod = multiply_series(exec, &ea, &ec, k);
        let mut x = prod.coeff(k).scale(c(-1.0));
        if k == 1 {
            x = x.add(&generator);
        }
        let anti = x.map(exec, |_, mat| (mat + jm * mat * jm) * c(0.5));
        let com = x.map(exec, |_, mat| (mat - jm * mat * jm) * c(0.5));
        a.set(k, anti.pruned(0.0));
        comm.set(k, com.pruned(0.0));
    }
    (a, comm)
}

/// Deformation by the anticommuting part of `e^{t dξ}`.
pub fn exact_b_field_family(
    exec: Exec,
    xi: &OneForm,
    j: &GeneralizedComplexStructure,
    order: usize,
) -> DeformationFamily {
    let (a, _) = split_exact_b_field(exec, &xi.exterior_derivative(), j, order);
    DeformationFamily::new("exact-b-field", vec![a])
}

/// Adds a gauge factor `e^{t g}` with `g` the part of `generator` commuting with `J`.
pub fn with_commuting_gauge(
    exec: Exec,
    family: DeformationFamily,
    generator: &MatrixField,
    j: &GeneralizedComplexStructure,
    order: usize,
) -> DeformationFamily {
    let jm = j.matrix();
    let g = generator.map(exec, |_, mat| (mat - jm * mat * jm) * c(0.5));
    let mut out = family.with_factor(Series::linear(g, order));
    out.name = format!("{}+gauge", out.name);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, max_abs, ONE};
    use crate::structures::standard_complex;

    fn complex4() -> GeneralizedComplexStructure {
        GeneralizedComplexStructure::from_complex(&standard_complex(4)).unwrap()
    }

    #[test]
    fn poisson_generator_anticommutes() {
        let fam = holomorphic_poisson(4, 0, 1, ONE, 2).unwrap();
        let j = complex4();
        let a = fam.factors[0].coeff(1).get(&Freq::zero(4)).unwrap().clone();
        assert!(max_abs(&(&a - j.matrix() * &a * j.matrix())) < 1e-15);
        assert!(crate::clifford::double::antisymmetry_residual(&a) < 1e-15);
        assert!(crate::linalg::imag_part_norm(&a) < 1e-15);
        assert!(holomorphic_poisson(4, 0, 2, ONE, 2).is_err());
    }

    #[test]
    fn exterior_derivative_of_cosine() {
        // ξ = cos(x1) dx2 ⇒ dξ = -sin(x1) dx1∧dx2
        let xi = OneForm::cosine(2, Freq(vec![1, 0]), 1, 1.0, 0.0);
        let db = xi.exterior_derivative();
        let x = [0.7, -0.2];
        let val = db.evaluate(&x).unwrap();
        assert!((val[(0, 1)] - c(-(0.7f64).sin())).norm() < 1e-15);
        assert!((val[(1, 0)] - c((0.7f64).sin())).norm() < 1e-15);
    }

    #[test]
    fn split_reproduces_b_transform() {
        let j = complex4();
        let xi = OneForm::cosine(4, Freq(vec![1, 0, 1, 0]), 2, 1.5, 0.3).plus_cosine(Freq(vec![0, 1, 0, -1]), 0, 1.0, 0.0);
        let b = xi.exterior_derivative();
        let order = 4;
        let (a, comm) = split_exact_b_field(Exec::Sequential, &b, &j, order);
        let x = [0.3, 1.1, -0.4, 2.0];
        let t = 1e-2;
        let a_x = a.evaluate(t, &x).unwrap();
        let c_x = comm.evaluate(t, &x).unwrap();
        let b_x = two_form_generator(&b.evaluate(&x).unwrap()) * c(t);
        let lhs = expm(&a_x) * expm(&c_x);
        let rhs = expm(&b_x);
        assert!(max_abs(&(lhs - rhs)) < 1e-9);
        let jm = j.matrix();
        assert!(max_abs(&(&a_x - jm * &a_x * jm)) < 1e-14);
        assert!(max_abs(&(&c_x + jm * &c_x * jm)) < 1e-14);
        assert!(a.coeff(2).reality_residual() < 1e-14);
    }
}
