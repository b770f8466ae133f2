//! Frequency-diagonal operators on form fields.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::exec::Exec;
use crate::hodge::inner::InnerProduct;
use crate::linalg::{max_abs, weighted_hermitian_pinv, CMat, C64};
use crate::structures::HermitianPair;
use crate::tolerances;
use crate::torus::{check_shift, component_block, Freq, Shift, SpinorField, TorusGeometry};

/// One `2^m × 2^m` block per frequency of a declared support.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    label: String,
    blocks: BTreeMap<Freq, CMat>,
}

impl BlockOperator {
    pub fn from_fn(exec: Exec, label: impl Into<String>, support: &[Freq], f: impl Fn(&Freq) -> CMat + Sync + Send) -> Self {
        let blocks = exec.map(support, &f);
        Self {
            label: label.into(),
            blocks: support.iter().cloned().zip(blocks).collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn support(&self) -> Vec<Freq> {
        self.blocks.keys().cloned().collect()
    }

    pub fn block(&self, k: &Freq) -> Option<&CMat> {
        self.blocks.get(k)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Freq, &CMat)> {
        self.blocks.iter()
    }

    fn zip_with(&self, other: &Self, label: String, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        let blocks = self
            .blocks
            .iter()
            .filter_map(|(k, a)| other.blocks.get(k).map(|b| (k.clone(), f(a, b))))
            .collect();
        Self { label, blocks }
    }

    /// `self ∘ other`, blockwise.
    pub fn compose(&self, other: &Self) -> Self {
        self.zip_with(other, format!("{}*{}", self.label, other.label), |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, format!("{}+{}", self.label, other.label), |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, format!("{}-{}", self.label, other.label), |a, b| a - b)
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            label: self.label.clone(),
            blocks: self.blocks.iter().map(|(k, a)| (k.clone(), a * z)).collect(),
        }
    }

    /// Largest entry over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(max_abs).fold(0.0, f64::max)
    }

    /// Largest blockwise entry difference; blocks missing on either side count fully.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, a) in &self.blocks {
            worst = worst.max(match other.blocks.get(k) {
                Some(b) => max_abs(&(a - b)),
                None => max_abs(a),
            });
        }
        for (k, b) in &other.blocks {
            if !self.blocks.contains_key(k) {
                worst = worst.max(max_abs(b));
            }
        }
        worst
    }

    /// Applies the operator; frequencies outside the support are mapped to zero.
    pub fn apply(&self, exec: Exec, f: &SpinorField) -> SpinorField {
        let entries: Vec<_> = f.iter().filter(|(k, _)| self.blocks.contains_key(k)).collect();
        let out = exec.map(&entries, |(k, phi)| ((*k).clone(), &self.blocks[*k] * *phi));
        SpinorField::from_terms(f.dim(), out)
    }

    /// Adjoint for the L² product, blockwise.
    pub fn adjoint(&self, ip: &InnerProduct) -> Self {
        Self {
            label: format!("{}^*", self.label),
            blocks: self
                .blocks
                .iter()
                .map(|(k, a)| (k.clone(), ip.adjoint_block(a)))
                .collect(),
        }
    }
}

/// Blocks of `d^H` over `support`.
pub fn build_dh_operator(exec: Exec, geom: &TorusGeometry, support: &[Freq]) -> BlockOperator {
    BlockOperator::from_fn(exec, "dH", support, |k| geom.d_block(k))
}

/// Blocks of the `(Δp, Δq)` component of `d^H` over `support`.
pub fn build_component_operator(
    exec: Exec,
    shift: Shift,
    pair: &HermitianPair,
    geom: &TorusGeometry,
    support: &[Freq],
) -> Result<BlockOperator> {
    check_shift(shift)?;
    Ok(BlockOperator::from_fn(
        exec,
        format!("d[{},{}]", shift.0, shift.1),
        support,
        |k| component_block(pair, &geom.d_block(k), shift),
    ))
}

/// `op op* + op* op`.
pub fn laplacian(op: &BlockOperator, ip: &InnerProduct) -> BlockOperator {
    let adj = op.adjoint(ip);
    op.compose(&adj)
        .add(&adj.compose(op))
        .with_label(format!("Lap({})", op.label))
}

/// Which Laplacian the Green operator inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    DeltaPlus,
    DeltaPlusBar,
    DeltaMinus,
    DeltaMinusBar,
    Full,
}

impl LaplacianKind {
    pub fn shift(self) -> Option<Shift> {
        use crate::torus::{DELTA_MINUS, DELTA_MINUS_BAR, DELTA_PLUS, DELTA_PLUS_BAR};
        match self {
            LaplacianKind::DeltaPlus => Some(DELTA_PLUS),
            LaplacianKind::DeltaPlusBar => Some(DELTA_PLUS_BAR),
            LaplacianKind::DeltaMinus => Some(DELTA_MINUS),
            LaplacianKind::DeltaMinusBar => Some(DELTA_MINUS_BAR),
            LaplacianKind::Full => None,
        }
    }
}

/// Pseudo-inverse of a Laplacian, built per frequency on demand.
#[derive(Debug, Clone)]
pub struct GreenOperator<'a> {
    pair: &'a HermitianPair,
    geom: &'a TorusGeometry,
    ip: InnerProduct,
    kind: LaplacianKind,
}

impl<'a> GreenOperator<'a> {
    pub fn new(pair: &'a HermitianPair, geom: &'a TorusGeometry, kind: LaplacianKind) -> Result<Self> {
        Ok(Self {
            pair,
            geom,
            ip: InnerProduct::new(pair)?,
            kind,
        })
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn laplacian_block(&self, k: &Freq) -> CMat {
        let d = self.geom.d_block(k);
        let op = match self.kind.shift() {
            Some(s) => component_block(self.pair, &d, s),
            None => d,
        };
        let adj = self.ip.adjoint_block(&op);
        &op * &adj + &adj * &op
    }

    pub fn green_block(&self, k: &Freq) -> CMat {
        let lap = self.laplacian_block(k);
        let (l, l_inv) = self.ip.cholesky();
        weighted_hermitian_pinv(&lap, l, l_inv, tolerances::PINV_CUTOFF)
    }

    /// `G ρ`, zero on the harmonic part.
    pub fn apply(&self, exec: Exec, rho: &SpinorField) -> SpinorField {
        rho.map(exec, |k, phi| &self.green_block(k) * phi)
    }

    /// `ρ - Δ G ρ`.
    pub fn harmonic_part(&self, exec: Exec, rho: &SpinorField) -> SpinorField {
        rho.map(exec, |k, phi| {
            let lap = self.laplacian_block(k);
            phi - &(&(&lap * &self.green_block(k)) * phi)
        })
    }
}

/// `G ρ` with the Green operator of `Δ_{δ₊}`.
pub fn green_apply(exec: Exec, rho: &SpinorField, pair: &HermitianPair, geom: &TorusGeometry) -> Result<SpinorField> {
    Ok(GreenOperator::new(pair, geom, LaplacianKind::DeltaPlus)?.apply(exec, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Spinor;
    use crate::linalg::{c, ONE};
    use crate::structures::standard_complex;
    use crate::torus::{frequency_box, DELTA_MINUS, DELTA_MINUS_BAR, DELTA_PLUS, DELTA_PLUS_BAR};
    use nalgebra::DMatrix;

    fn kaehler(m: usize) -> HermitianPair {
        HermitianPair::kaehler(&DMatrix::identity(m, m), &standard_complex(m)).unwrap()
    }

    #[test]
    fn adjoint_signs_on_kaehler_surface_and_curve() {
        for m in [2, 4] {
            let pair = kaehler(m);
            let geom = TorusGeometry::flat(m);
            let ip = InnerProduct::new(&pair).unwrap();
            let support = frequency_box(m, 1);
            let e = Exec::Parallel;
            let op = |s| build_component_operator(e, s, &pair, &geom, &support).unwrap();
            let dp = op(DELTA_PLUS);
            let dpb = op(DELTA_PLUS_BAR);
            let dm = op(DELTA_MINUS);
            let dmb = op(DELTA_MINUS_BAR);
            assert!(dp.adjoint(&ip).distance(&dpb.scale(c(-1.0))) < 1e-12, "m = {m}");
            assert!(dm.adjoint(&ip).distance(&dmb) < 1e-12, "m = {m}");
            assert!(dp.adjoint(&ip).adjoint(&ip).distance(&dp) < 1e-12);
        }
    }

    #[test]
    fn full_laplacian_is_four_times_partial() {
        let pair = kaehler(2);
        let geom = TorusGeometry::flat(2);
        let ip = InnerProduct::new(&pair).unwrap();
        let support = frequency_box(2, 2);
        let e = Exec::Sequential;
        let full = laplacian(&build_dh_operator(e, &geom, &support), &ip);
        let plus = laplacian(&build_component_operator(e, DELTA_PLUS, &pair, &geom, &support).unwrap(), &ip);
        assert!(full.distance(&plus.scale(c(4.0))) < 1e-12);
    }

    #[test]
    fn green_operator_kills_constants_and_inverts_exact_forms() {
        let pair = kaehler(2);
        let geom = TorusGeometry::flat(2);
        let e = Exec::Sequential;
        let g = GreenOperator::new(&pair, &geom, LaplacianKind::DeltaPlus).unwrap();
        let constant = SpinorField::constant(2, Spinor::one(2));
        assert!(g.apply(e, &constant).norm() < 1e-14);
        let f = SpinorField::from_terms(2, [(Freq(vec![1, 2]), Spinor::one(2)), (Freq(vec![-1, 0]), Spinor::monomial(2, 1) * ONE)]);
        let rho = geom.dh_apply(e, &f);
        assert!(g.harmonic_part(e, &rho).norm() < 1e-12);
    }

    #[test]
    fn unsupported_shift_is_rejected() {
        let pair = kaehler(2);
        let geom = TorusGeometry::flat(2);
        assert!(build_component_operator(Exec::Sequential, (0, 2), &pair, &geom, &[]).is_err());
    }
}
