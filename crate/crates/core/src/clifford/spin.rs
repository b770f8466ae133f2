//! Clifford action of `V ⊕ V*` on forms and the induced action of `so(V ⊕ V*)`.

use crate::clifford::double::{antisymmetry_residual, DoubleVector, SoDouble};
use crate::clifford::spinor::{contraction_sign, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{c, expm, vec_norm, CMat, ZERO};
use crate::tolerances;

/// Action of basis element `b` of `V ⊕ V*` on the monomial `dx_mask`.
#[inline]
fn gamma_basis(m: usize, b: usize, mask: usize) -> Option<(f64, usize)> {
    if b < m {
        let bit = 1 << b;
        (mask & bit != 0).then(|| (contraction_sign(mask, b), mask ^ bit))
    } else {
        let j = b - m;
        let bit = 1 << j;
        (mask & bit == 0).then(|| (contraction_sign(mask, j), mask | bit))
    }
}

fn check_dims(v: usize, phi: usize) -> Result<()> {
    if v != phi {
        return Err(Error::DimensionMismatch {
            expected: v,
            found: phi,
        });
    }
    Ok(())
}

/// `(X + ξ)·φ = i_X φ + ξ ∧ φ`.
pub fn clifford_act(v: &DoubleVector, phi: &Spinor) -> Result<Spinor> {
    check_dims(v.dim(), phi.dim())?;
    let m = v.dim();
    let mut out = Spinor::zeros(m);
    for (b, &z) in v.coords().iter().enumerate() {
        if z == ZERO {
            continue;
        }
        for (mask, &w) in phi.coeffs().iter().enumerate() {
            if w == ZERO {
                continue;
            }
            if let Some((s, target)) = gamma_basis(m, b, mask) {
                let cur = out.coeff(target);
                out.set(target, cur + z * w * s);
            }
        }
    }
    Ok(out)
}

/// Matrix of `φ ↦ v·φ` on the `2^m`-dimensional form space.
pub fn clifford_matrix(v: &DoubleVector) -> CMat {
    let m = v.dim();
    let n = 1 << m;
    let mut mat = CMat::zeros(n, n);
    for (b, &z) in v.coords().iter().enumerate() {
        if z == ZERO {
            continue;
        }
        for mask in 0..n {
            if let Some((s, target)) = gamma_basis(m, b, mask) {
                mat[(target, mask)] += z * s;
            }
        }
    }
    mat
}

/// Matrix of the spin action `dρ(α) = ¼ Σ_a [(α v_a)·, (v^a)·]`, where `v^a` is
/// the basis dual to `v_a` under `2⟨·,·⟩` (the dual of `∂_i` is `dx_i`).
///
/// No antisymmetry check; callers pass elements of `so(V ⊕ V*)` or `so ⊗ C`.
pub fn drho_matrix_raw(alpha: &CMat) -> CMat {
    let two_m = alpha.nrows();
    let m = two_m / 2;
    let n = 1 << m;
    let mut mat = CMat::zeros(n, n);
    for a in 0..two_m {
        let dual = (a + m) % two_m;
        for b in 0..two_m {
            let coef = alpha[(b, a)];
            if coef == ZERO {
                continue;
            }
            let coef = coef * 0.25;
            for mask in 0..n {
                // γ_b γ_dual - γ_dual γ_b applied to dx_mask
                if let Some((s1, t1)) = gamma_basis(m, dual, mask) {
                    if let Some((s2, t2)) = gamma_basis(m, b, t1) {
                        mat[(t2, mask)] += coef * (s1 * s2);
                    }
                }
                if let Some((s1, t1)) = gamma_basis(m, b, mask) {
                    if let Some((s2, t2)) = gamma_basis(m, dual, t1) {
                        mat[(t2, mask)] -= coef * (s1 * s2);
                    }
                }
            }
        }
    }
    mat
}

/// Checked spin representation matrix of `α ∈ so(V ⊕ V*)`.
pub fn drho_matrix(alpha: &SoDouble) -> CMat {
    drho_matrix_raw(alpha.matrix())
}

/// `dρ(α) φ`.
pub fn spin_lie_action(alpha: &SoDouble, phi: &Spinor) -> Result<Spinor> {
    check_dims(alpha.dim(), phi.dim())?;
    let residual = antisymmetry_residual(alpha.matrix());
    if residual > tolerances::ANTISYMMETRY {
        return Err(Error::NotAntisymmetric { residual });
    }
    Ok(&drho_matrix(alpha) * phi)
}

/// `e^{dρ(α)} φ`. Nilpotent generators (pure two-form or pure bivector) are
/// summed exactly; everything else goes through scaling and squaring.
pub fn spinor_exp(alpha: &SoDouble, phi: &Spinor) -> Result<Spinor> {
    check_dims(alpha.dim(), phi.dim())?;
    Ok(&expm(&drho_matrix(alpha)) * phi)
}

/// `e^{dρ(α)} φ` by the plain Taylor series with at most `terms` terms; fails
/// when the last term is still above tolerance.
pub fn spinor_exp_terms(alpha: &SoDouble, phi: &Spinor, terms: usize) -> Result<Spinor> {
    check_dims(alpha.dim(), phi.dim())?;
    let d = drho_matrix(alpha);
    let mut sum = phi.coeffs().clone();
    let mut term = phi.coeffs().clone();
    let mut last = vec_norm(&term);
    for k in 1..=terms {
        term = &d * &term * c(1.0 / k as f64);
        sum += &term;
        last = vec_norm(&term);
        if last == 0.0 {
            break;
        }
    }
    if last > tolerances::EXP_SERIES * vec_norm(&sum).max(1.0) {
        return Err(Error::ExpNotConverged {
            terms,
            remainder: last,
        });
    }
    Spinor::from_coeffs(phi.dim(), sum)
}

/// Spin action of a general `so(V ⊕ V*) ⊗ C` element written as a Clifford
/// quadratic: used for elements like `ℓ⁻·ℓ⁺`.
pub fn clifford_product_matrix(vectors: &[DoubleVector]) -> CMat {
    let m = vectors.first().map_or(0, |v| v.dim());
    let n = 1 << m;
    vectors
        .iter()
        .fold(CMat::identity(n, n), |acc, v| acc * clifford_matrix(v))
}

/// Identity operator on forms.
pub fn identity(m: usize) -> CMat {
    CMat::identity(1 << m, 1 << m)
}
