//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(c)
}

/// Frobenius norm.
pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute imaginary part.
pub fn imag_part_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMat) -> CMat {
    expm_checked(a, 60).expect("Taylor core with norm <= 1/2 converges in 60 terms")
}

/// Matrix exponential with an explicit term budget for the Taylor core.
///
/// Fails with the norm of the last term when the series has not reached
/// relative size [`crate::tolerances::EXP_SERIES`] within `max_terms`.
pub fn expm_checked(a: &CMat, max_terms: usize) -> Result<CMat> {
    let n = a.nrows();
    if let Some(e) = nilpotent_exp(a) {
        return Ok(e);
    }
    let norm = one_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * c(0.5f64.powi(squarings));
    let mut sum = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    let mut converged = false;
    let mut last = f64::INFINITY;
    for k in 1..=max_terms {
        term = &term * &scaled * c(1.0 / k as f64);
        sum += &term;
        last = one_norm(&term);
        if last <= 1e-17 * one_norm(&sum).max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged && last > crate::tolerances::EXP_SERIES {
        return Err(Error::ExpNotConverged {
            terms: max_terms,
            remainder: last,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Exact exponential of a nilpotent matrix as a finite sum, or `None` when
/// no power up to `a^10` vanishes exactly. Pure `B∧` and bivector-contraction
/// operators have structurally zero powers, so the test is exact for them.
pub fn nilpotent_exp(a: &CMat) -> Option<CMat> {
    let n = a.nrows();
    let mut sum = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=n.min(10) + 1 {
        term = &term * a * c(1.0 / k as f64);
        if is_exact_zero(&term) {
            return Some(sum);
        }
        sum += &term;
    }
    None
}

fn is_exact_zero(m: &CMat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// `exp(a)` together with its Fréchet derivative in direction `e`,
/// read off the block exponential of `[[a, e], [0, a]]`.
pub fn expm_frechet(a: &CMat, e: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let mut block = CMat::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(a);
    block.view_mut((0, n), (n, n)).copy_from(e);
    block.view_mut((n, n), (n, n)).copy_from(a);
    let big = expm(&block);
    (
        big.view((0, 0), (n, n)).into_owned(),
        big.view((0, n), (n, n)).into_owned(),
    )
}

/// Orthonormal (standard Hermitian product) basis of the column space of `p`,
/// chosen by greedy pivoting over the columns so the result is deterministic.
pub fn column_basis(p: &CMat, tol: f64) -> CMat {
    let scale = max_abs(p).max(1e-300);
    let mut basis: Vec<CVec> = Vec::new();
    let mut remaining: Vec<CVec> = (0..p.ncols()).map(|j| p.column(j).into_owned()).collect();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (j, col) in remaining.iter().enumerate() {
            let nrm = vec_norm(col);
            if nrm > tol * scale && best.is_none_or(|(_, b)| nrm > b * (1.0 + 1e-12)) {
                best = Some((j, nrm));
            }
        }
        let Some((j, nrm)) = best else { break };
        let v = remaining[j].clone() / c(nrm);
        for col in remaining.iter_mut() {
            let proj = v.dotc(col);
            *col -= &v * proj;
        }
        basis.push(v);
    }
    let rows = p.nrows();
    let mut out = CMat::zeros(rows, basis.len());
    for (j, v) in basis.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Numerical rank of `p` via singular values.
pub fn rank(p: &CMat, tol: f64) -> usize {
    let sv = p.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Spectral projectors of a diagonalizable `d` whose spectrum is contained in
/// `spectrum`, by Lagrange interpolation: `Π_k = ∏_{j≠k} (d - λ_j)/(λ_k - λ_j)`.
pub fn lagrange_projectors(d: &CMat, spectrum: &[C64]) -> Vec<CMat> {
    let n = d.nrows();
    let id = CMat::identity(n, n);
    let factors: Vec<CMat> = spectrum.iter().map(|&l| d - &id * l).collect();
    let r = spectrum.len();
    // prefix[k] = f_0 ⋯ f_{k-1}, suffix[k] = f_{k+1} ⋯ f_{r-1}; all factors commute.
    let mut prefix = vec![id.clone(); r];
    for k in 1..r {
        prefix[k] = &prefix[k - 1] * &factors[k - 1];
    }
    let mut suffix = vec![id; r];
    for k in (0..r.saturating_sub(1)).rev() {
        suffix[k] = &factors[k + 1] * &suffix[k + 1];
    }
    (0..r)
        .map(|k| {
            let lk = spectrum[k];
            let denom = spectrum
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(ONE, |acc, (_, &lj)| acc * (lk - lj));
            &prefix[k] * &suffix[k] * (ONE / denom)
        })
        .collect()
}

/// Least-squares solve `a x = b` through the SVD; returns `x` and the
/// residual norm `‖a x - b‖`.
pub fn lstsq(a: &CMat, b: &CVec) -> (CVec, f64) {
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let x = svd
        .solve(b, 1e-12 * top.max(1e-300))
        .unwrap_or_else(|_| CVec::zeros(a.ncols()));
    let r = vec_norm(&(a * &x - b));
    (x, r)
}

/// Moore–Penrose pseudo-inverse of a matrix that is self-adjoint for the
/// Hermitian form `⟨x, y⟩ = yᴴ M x`, with `M = L Lᴴ`. Eigenvalues with modulus
/// below `cutoff · max|λ|` are treated as kernel.
pub fn weighted_hermitian_pinv(a: &CMat, chol_l: &CMat, chol_l_inv: &CMat, cutoff: f64) -> CMat {
    let n = a.nrows();
    // Ã = Lᴴ A L⁻ᴴ is Hermitian when A is M-self-adjoint.
    let lh = chol_l.adjoint();
    let lh_inv = chol_l_inv.adjoint();
    let at = &lh * a * &lh_inv;
    let herm = (&at + at.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    let top = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return CMat::zeros(n, n);
    }
    let mut inv_diag = CVec::zeros(n);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > cutoff * top {
            inv_diag[i] = c(1.0 / lam);
        }
    }
    let q = &eig.eigenvectors;
    let pinv_t = q * CMat::from_diagonal(&inv_diag) * q.adjoint();
    &lh_inv * pinv_t * &lh
}
