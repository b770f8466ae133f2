//! Order-by-order construction of `ψ_t = e^{a_t} e^{b_t} ψ` with `d^H ψ_t = O(t^{K+1})`.

use std::time::Instant;

use crate::clifford::{Spinor, SoDouble, DoubleVector, drho_matrix_raw};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hodge::{GreenOperator, LaplacianKind};
use crate::linalg::{c, lstsq, CMat, CVec};
use crate::solver::families::DeformationFamily;
use crate::solver::series::{inverse_factors_apply, series_exp_action, spin_series, exp_apply, SoSeries, SpinorSeries};
use crate::structures::HermitianPair;
use crate::tolerances;
use crate::torus::{
    component_block, MatrixField, Shift, SpinorField, TorusGeometry, DELTA_MINUS, DELTA_MINUS_BAR, DELTA_PLUS,
    DELTA_PLUS_BAR,
};

/// Tolerances and limits for [`solve_deformation`].
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub order: usize,
    /// Bound on `‖(d^H ψ_t)_j‖ / ‖ψ‖` for every order `j ≤ K`.
    pub residual_tol: f64,
    /// Bound on the structural identities checked at each order.
    pub structure_tol: f64,
    pub exec: Exec,
    /// Checks that `J₁` stays integrable through the requested order first.
    pub check_integrability: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            order: 4,
            residual_tol: tolerances::SOLVER_RESIDUAL,
            structure_tol: tolerances::SOLVER_STRUCTURE,
            exec: Exec::default(),
            check_integrability: true,
        }
    }
}

/// Everything needed to run the construction.
#[derive(Debug, Clone)]
pub struct DeformationProblem {
    pub pair: HermitianPair,
    pub geom: TorusGeometry,
    pub family: DeformationFamily,
    /// Constant closed generator of the canonical line of `J₂`.
    pub psi: Spinor,
}

impl DeformationProblem {
    /// Uses the normalized canonical generator of `J₂` as `ψ`.
    pub fn new(pair: HermitianPair, geom: TorusGeometry, family: DeformationFamily) -> Result<Self> {
        let psi = pair.j2().canonical_generator().clone();
        let problem = Self { pair, geom, family, psi };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.pair.dim();
        if self.geom.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.geom.dim(),
            });
        }
        for f in &self.family.factors {
            if f.dim() != m {
                return Err(Error::DimensionMismatch { expected: m, found: f.dim() });
            }
            if !f.starts_at_first_order() {
                return Err(Error::InvalidInput("deformation must vanish at t = 0".into()));
            }
            for coeff in f.orders() {
                if coeff.reality_residual() > 1e-12 * coeff.norm().max(1.0) {
                    return Err(Error::InvalidInput("deformation generator must be a real field".into()));
                }
            }
        }
        let n = self.pair.half_dim() as i32;
        let top = self.pair.j2().projector(n);
        let scale = self.psi.norm();
        if crate::linalg::vec_norm(&((&top * &self.psi).coeffs() - self.psi.coeffs())) > tolerances::AXIOM * scale {
            return Err(Error::InvalidInput("psi does not generate the canonical line of J2".into()));
        }
        if (self.geom.h_wedge() * &self.psi).norm() > tolerances::AXIOM * scale {
            return Err(Error::InvalidInput("psi is not d^H-closed".into()));
        }
        Ok(())
    }
}

/// Diagnostics of one order of the construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrderRecord {
    pub order: usize,
    /// Largest `‖(d^H ψ_t)_j‖ / ‖ψ‖` for `j < k` before the step.
    pub prior_residual: f64,
    pub rho_norm: f64,
    /// Part of `ρ` outside `U^{±1,n-1} ⊕ U^{±1,n-3}`.
    pub rho_leakage: f64,
    /// The four first-order closedness relations and their sum relation.
    pub closedness: [f64; 5],
    /// `‖ρ - [e^{-b}e^{-a} d^H e^a e^b ψ]_k‖`.
    pub rho_crosscheck: f64,
    pub phi_norm: f64,
    /// Difference between the two expressions for `φ`.
    pub phi_mismatch: f64,
    /// `‖d^H φ - ρ‖`.
    pub phi_reconstruction: f64,
    /// Part of `φ` outside `U^{0,n-2}`.
    pub phi_leakage: f64,
    pub beta_norm: f64,
    /// `‖dρ(β_k)ψ + φ‖`.
    pub beta_fit: f64,
    /// Order-`k` residual `‖(d^H ψ_t)_k‖ / ‖ψ‖` after the step.
    pub residual: f64,
    pub wall_ms: f64,
}

/// Output of [`solve_deformation`].
#[derive(Debug, Clone)]
pub struct DeformationSolution {
    pub family: String,
    pub order: usize,
    pub psi: Spinor,
    pub records: Vec<OrderRecord>,
    /// `β_k` for `k = 1..=K`, as fields of complex `so(V ⊕ V*)` elements.
    pub beta: Vec<MatrixField>,
    /// `b_t = Σ t^k (β_k + conj β_k)`.
    pub b: SoSeries,
    /// `ψ_t` through order `K`.
    pub psi_series: SpinorSeries,
    /// `‖(d^H ψ_t)_j‖ / ‖ψ‖` for `j = 0..=K`, recomputed from scratch.
    pub final_residuals: Vec<f64>,
    /// Per-order leakage of `e^{-a}d^H(e^a Ω)` outside `U^{n-1}` of `J₁`.
    pub integrability: Vec<f64>,
}

impl DeformationSolution {
    pub fn max_residual(&self) -> f64 {
        self.final_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

fn project(exec: Exec, p: &CMat, f: &SpinorField) -> SpinorField {
    f.map(exec, |_, phi| p * phi)
}

fn apply_component(exec: Exec, shift: Shift, f: &SpinorField, pair: &HermitianPair, geom: &TorusGeometry) -> SpinorField {
    f.map(exec, |k, phi| &component_block(pair, &geom.d_block(k), shift) * phi)
}

fn dh_series(exec: Exec, geom: &TorusGeometry, s: &SpinorSeries) -> SpinorSeries {
    SpinorSeries::from_orders(s.dim(), s.orders().iter().map(|f| geom.dh_apply(exec, f)).collect())
}

/// The four bidegree pieces `ρ^{1,n-1}, ρ^{-1,n-1}, ρ^{1,n-3}, ρ^{-1,n-3}`
/// and the norm of what is left.
#[derive(Debug, Clone)]
pub struct RhoSplit {
    pub p1_top: SpinorField,
    pub m1_top: SpinorField,
    pub p1_low: SpinorField,
    pub m1_low: SpinorField,
    pub leakage: f64,
}

pub fn split_rho(exec: Exec, rho: &SpinorField, pair: &HermitianPair) -> RhoSplit {
    let n = pair.half_dim() as i32;
    let part = |p: i32, q: i32| project(exec, &pair.projector(p, q), rho);
    let p1_top = part(1, n - 1);
    let m1_top = part(-1, n - 1);
    let p1_low = part(1, n - 3);
    let m1_low = part(-1, n - 3);
    let kept = p1_top.add(&m1_top).add(&p1_low).add(&m1_low);
    RhoSplit {
        leakage: rho.sub(&kept).norm(),
        p1_top,
        m1_top,
        p1_low,
        m1_low,
    }
}

/// Norms of `δ₊ρ^{1,n-1}`, `δ̄₊ρ^{-1,n-3}`, `δ₋ρ^{1,n-3}`, `δ̄₋ρ^{-1,n-1}` and of
/// `δ₋ρ^{-1,n-1} + δ̄₋ρ^{1,n-3} + δ₊ρ^{-1,n-3} + δ̄₊ρ^{1,n-1}`.
pub fn closedness_relations(exec: Exec, split: &RhoSplit, pair: &HermitianPair, geom: &TorusGeometry) -> [f64; 5] {
    let d = |s: Shift, f: &SpinorField| apply_component(exec, s, f, pair, geom);
    let sum = d(DELTA_MINUS, &split.m1_top)
        .add(&d(DELTA_MINUS_BAR, &split.p1_low))
        .add(&d(DELTA_PLUS, &split.m1_low))
        .add(&d(DELTA_PLUS_BAR, &split.p1_top));
    [
        d(DELTA_PLUS, &split.p1_top).norm(),
        d(DELTA_PLUS_BAR, &split.m1_low).norm(),
        d(DELTA_MINUS, &split.p1_low).norm(),
        d(DELTA_MINUS_BAR, &split.m1_top).norm(),
        sum.norm(),
    ]
}

/// `φ = G(δ₋ρ^{-1,n-1} + δ̄₋ρ^{1,n-3})` together with the alternative
/// expression `-G(δ₊ρ^{-1,n-3} + δ̄₊ρ^{1,n-1})`.
pub fn solve_phi(
    exec: Exec,
    split: &RhoSplit,
    pair: &HermitianPair,
    geom: &TorusGeometry,
) -> Result<(SpinorField, SpinorField)> {
    let green = GreenOperator::new(pair, geom, LaplacianKind::DeltaPlus)?;
    let d = |s: Shift, f: &SpinorField| apply_component(exec, s, f, pair, geom);
    let src = d(DELTA_MINUS, &split.m1_top).add(&d(DELTA_MINUS_BAR, &split.p1_low));
    let alt = d(DELTA_PLUS, &split.m1_low).add(&d(DELTA_PLUS_BAR, &split.p1_top));
    Ok((green.apply(exec, &src), green.apply(exec, &alt).scale(c(-1.0))))
}

/// Generators `ℓ⁻_i ∧ ℓ⁺_j` with `ℓ⁻ ∈ V₋^{1,0}` and `ℓ⁺ ∈ V₊^{0,1}`, whose
/// spin action maps `ψ` onto `U^{0,n-2}`.
pub fn beta_generators(pair: &HermitianPair) -> Vec<CMat> {
    let [_, plus_01, minus_10, _] = pair.frames();
    let col = |f: &CMat, i: usize| DoubleVector::from_coords(f.column(i).into_owned()).expect("even length");
    let mut out = Vec::new();
    for i in 0..minus_10.ncols() {
        for j in 0..plus_01.ncols() {
            out.push(SoDouble::from_wedge(&col(&minus_10, i), &col(&plus_01, j)).into_matrix());
        }
    }
    out
}

/// Solves `dρ(β)ψ = -φ` frequency by frequency in the span of [`beta_generators`].
/// Returns `β` and the fit residual `‖dρ(β)ψ + φ‖`.
pub fn beta_from_phi(exec: Exec, phi: &SpinorField, psi: &Spinor, pair: &HermitianPair) -> Result<(MatrixField, f64)> {
    let gens = beta_generators(pair);
    let n = pair.half_dim();
    let dim = psi.len();
    let mut a = CMat::zeros(dim, gens.len());
    for (col, g) in gens.iter().enumerate() {
        let img = &drho_matrix_raw(g) * psi;
        a.set_column(col, img.coeffs());
    }
    let rank = crate::linalg::rank(&a, tolerances::RANK);
    if rank < n * n {
        return Err(Error::SingularBetaSystem { residual: (n * n - rank) as f64 });
    }
    let entries: Vec<_> = phi.iter().collect();
    let solved = exec.map(&entries, |(k, f)| {
        let rhs: CVec = -f.coeffs();
        let (x, r) = lstsq(&a, &rhs);
        let beta = gens
            .iter()
            .zip(x.iter())
            .fold(CMat::zeros(2 * pair.dim(), 2 * pair.dim()), |acc, (g, z)| acc + g * *z);
        ((*k).clone(), beta, r)
    });
    let mut fit: f64 = 0.0;
    let mut beta = MatrixField::new(phi.dim());
    for (k, b, r) in solved {
        fit = fit.hypot(r);
        beta.add_term(k, &b);
    }
    Ok((beta, fit))
}

/// Leakage of `e^{-a}d^H(e^a Ω)` outside `U^{n-1}` of `J₁`, per order in `t`.
pub fn integrability_residuals(
    exec: Exec,
    family: &DeformationFamily,
    pair: &HermitianPair,
    geom: &TorusGeometry,
    order: usize,
) -> Vec<f64> {
    let j1 = pair.j1();
    let n = j1.half_dim() as i32;
    let omega = j1.canonical_generator();
    let field = SpinorField::constant(pair.dim(), omega.clone());
    let zero = SoSeries::zeros(pair.dim(), order);
    let moved = series_exp_action(exec, &family.factors, &zero, &field, order);
    let back = inverse_factors_apply(exec, &family.factors, &dh_series(exec, geom, &moved), order);
    let keep = j1.projector(n - 1);
    let scale = omega.norm();
    back.orders()
        .iter()
        .map(|f| f.sub(&project(exec, &keep, f)).norm() / scale)
        .collect()
}

/// Fails with [`Error::NotIntegrable`] at the first order whose leakage
/// exceeds `tolerances::INTEGRABILITY`.
pub fn check_integrability(residuals: &[f64]) -> Result<()> {
    match residuals.iter().position(|&r| r > tolerances::INTEGRABILITY) {
        Some(order) => Err(Error::NotIntegrable {
            order,
            residual: residuals[order],
        }),
        None => Ok(()),
    }
}

fn check(value: f64, tol: f64, err: impl FnOnce() -> Error) -> Result<()> {
    if value.is_finite() && value <= tol {
        Ok(())
    } else {
        Err(err())
    }
}

/// Runs the construction through `options.order`. Any structural identity
/// failing beyond `options.structure_tol` aborts with the matching error.
pub fn solve_deformation(problem: &DeformationProblem, options: &SolverOptions) -> Result<DeformationSolution> {
    problem.validate()?;
    let exec = options.exec;
    let order = options.order;
    let pair = &problem.pair;
    let geom = &problem.geom;
    let m = pair.dim();
    let family = problem.family.truncated(order);
    let integrability = integrability_residuals(exec, &family, pair, geom, order);
    if options.check_integrability {
        check_integrability(&integrability)?;
    }
    let psi = &problem.psi;
    let scale = psi.norm();
    let psi_field = SpinorField::constant(m, psi.clone());
    let mut b = SoSeries::zeros(m, order);
    let mut betas = Vec::with_capacity(order);
    let mut records = Vec::with_capacity(order);
    let tol = options.structure_tol;

    for k in 1..=order {
        let start = Instant::now();
        let mut rec = OrderRecord { order: k, ..Default::default() };
        let psi_t = series_exp_action(exec, &family.factors, &b, &psi_field, k);
        let d_psi = dh_series(exec, geom, &psi_t);
        rec.prior_residual = (0..k).map(|j| d_psi.coeff(j).norm() / scale).fold(0.0, f64::max);
        check(rec.prior_residual, options.residual_tol, || Error::PriorResidual {
            order: k,
            norm: rec.prior_residual,
        })?;
        let rho = d_psi.coeff(k);
        rec.rho_norm = rho.norm();

        let undone = inverse_factors_apply(exec, &family.factors, &d_psi, k);
        let undone = exp_apply(exec, &spin_series(exec, &b.scale(c(-1.0))), &undone, k);
        rec.rho_crosscheck = undone.coeff(k).sub(&rho).norm();

        let split = split_rho(exec, &rho, pair);
        rec.rho_leakage = split.leakage;
        check(rec.rho_leakage, tol, || Error::RhoLeakage { order: k, norm: rec.rho_leakage })?;

        rec.closedness = closedness_relations(exec, &split, pair, geom);
        const NAMES: [&str; 5] = ["delta+ rho(1,n-1)", "delta+bar rho(-1,n-3)", "delta- rho(1,n-3)", "delta-bar rho(-1,n-1)", "sum"];
        for (value, relation) in rec.closedness.iter().zip(NAMES) {
            check(*value, tol, || Error::ClosednessViolated {
                order: k,
                relation,
                residual: *value,
            })?;
        }

        let (phi, phi_alt) = solve_phi(exec, &split, pair, geom)?;
        rec.phi_norm = phi.norm();
        rec.phi_mismatch = phi.sub(&phi_alt).norm();
        check(rec.phi_mismatch, tol, || Error::PhiMismatch {
            order: k,
            residual: rec.phi_mismatch,
        })?;
        rec.phi_reconstruction = geom.dh_apply(exec, &phi).sub(&rho).norm();
        check(rec.phi_reconstruction, tol, || Error::PhiReconstruction {
            order: k,
            residual: rec.phi_reconstruction,
        })?;
        let n = pair.half_dim() as i32;
        rec.phi_leakage = phi.sub(&project(exec, &pair.projector(0, n - 2), &phi)).norm();
        check(rec.phi_leakage, tol, || Error::PhiGrading {
            order: k,
            norm: rec.phi_leakage,
        })?;

        let (beta, fit) = beta_from_phi(exec, &phi, psi, pair)?;
        rec.beta_fit = fit;
        check(fit, tol, || Error::SingularBetaSystem { residual: fit })?;
        rec.beta_norm = beta.norm();
        let b_k = beta.add(&beta.conj_field()).pruned(0.0);
        let correction = b_k.map(exec, |_, g| &drho_matrix_raw(g) * psi);
        rec.residual = rho.add(&geom.dh_apply(exec, &correction)).norm() / scale;
        b.set(k, b_k);
        betas.push(beta);
        rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        records.push(rec);
    }

    let psi_series = series_exp_action(exec, &family.factors, &b, &psi_field, order);
    let final_residuals = dh_series(exec, geom, &psi_series)
        .orders()
        .iter()
        .map(|f| f.norm() / scale)
        .collect();
    Ok(DeformationSolution {
        family: family.name.clone(),
        order,
        psi: psi.clone(),
        records,
        beta: betas,
        b,
        psi_series,
        final_residuals,
        integrability,
    })
}

/// `e^{a_t} J e^{-a_t}` through `order`, from the factor product.
pub fn deformed_structure_series(exec: Exec, factors: &[SoSeries], j: &CMat, order: usize) -> crate::solver::series::Series<CMat> {
    use crate::solver::series::{exp_matrix_series, multiply_series};
    let m = j.nrows() / 2;
    let mut forward = crate::solver::series::Series::from_orders(m, vec![MatrixField::constant(m, CMat::identity(2 * m, 2 * m))]).truncated(order);
    let mut backward = forward.clone();
    for a in factors {
        forward = multiply_series(exec, &forward, &exp_matrix_series(exec, a, 2 * m, order), order);
        backward = multiply_series(exec, &exp_matrix_series(exec, &a.scale(c(-1.0)), 2 * m, order), &backward, order);
    }
    let jser = crate::solver::series::Series::from_orders(m, vec![MatrixField::constant(m, j.clone())]);
    multiply_series(exec, &multiply_series(exec, &forward, &jser, order), &backward, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::solver::families::{exact_b_field_family, holomorphic_poisson, OneForm};
    use crate::structures::standard_complex;
    use crate::torus::Freq;
    use nalgebra::DMatrix;

    fn kaehler(m: usize) -> HermitianPair {
        HermitianPair::kaehler(&DMatrix::identity(m, m), &standard_complex(m)).unwrap()
    }

    fn options(order: usize) -> SolverOptions {
        SolverOptions {
            order,
            exec: Exec::Sequential,
            ..Default::default()
        }
    }

    #[test]
    fn empty_family_needs_no_correction() {
        let problem = DeformationProblem::new(kaehler(4), TorusGeometry::flat(4), DeformationFamily::new("none", vec![])).unwrap();
        let sol = solve_deformation(&problem, &options(3)).unwrap();
        assert_eq!(sol.beta.len(), 3);
        assert!(sol.beta.iter().all(|b| b.norm() == 0.0));
        assert_eq!(sol.max_residual(), 0.0);
        assert_eq!(sol.psi_series.coeff(0).get(&Freq::zero(4)), Some(&problem.psi));
    }

    #[test]
    fn constant_poisson_needs_no_correction() {
        let family = holomorphic_poisson(4, 0, 1, ONE, 3).unwrap();
        let problem = DeformationProblem::new(kaehler(4), TorusGeometry::flat(4), family).unwrap();
        let sol = solve_deformation(&problem, &options(3)).unwrap();
        assert!(sol.beta.iter().all(|b| b.norm() == 0.0));
        assert!(sol.max_residual() < 1e-14);
        assert!(sol.integrability.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn b_field_first_order_is_corrected() {
        let pair = kaehler(4);
        let xi = OneForm::cosine(4, Freq(vec![1, 0, 1, 0]), 2, 1.0, 0.0);
        let family = exact_b_field_family(Exec::Sequential, &xi, pair.j1(), 2);
        let problem = DeformationProblem::new(pair, TorusGeometry::flat(4), family).unwrap();
        let sol = solve_deformation(&problem, &options(2)).unwrap();
        assert!(sol.records[0].rho_norm > 1e-3);
        assert!(sol.beta[0].norm() > 1e-3);
        assert!(sol.max_residual() < 1e-12);
    }

    #[test]
    fn non_integrable_family_is_rejected() {
        let pair = kaehler(4);
        // cos(x0) times the real part of a holomorphic bivector: not holomorphic.
        let mut a = CMat::zeros(8, 8);
        for (i, j, v) in [(0, 2, 0.5), (1, 3, -0.5)] {
            a[(i, 4 + j)] = c(v);
            a[(j, 4 + i)] = c(-v);
        }
        let field = MatrixField::from_terms(4, [(Freq(vec![1, 0, 0, 0]), &a * c(0.5)), (Freq(vec![-1, 0, 0, 0]), &a * c(0.5))]);
        let family = DeformationFamily::new("bad", vec![SoSeries::linear(field, 2)]);
        let problem = DeformationProblem::new(pair, TorusGeometry::flat(4), family).unwrap();
        match solve_deformation(&problem, &options(2)) {
            Err(Error::NotIntegrable { order, .. }) => assert_eq!(order, 1),
            other => panic!("expected NotIntegrable, got {other:?}"),
        }
    }

    #[test]
    fn psi_outside_canonical_line_is_rejected() {
        let pair = kaehler(4);
        let mut problem = DeformationProblem::new(pair, TorusGeometry::flat(4), DeformationFamily::new("none", vec![])).unwrap();
        problem.psi = Spinor::one(4);
        assert!(problem.validate().is_err());
    }
}
