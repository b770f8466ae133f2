//! Splitting of `d^H` by the bigrading of a Hermitian pair, and integrability tests.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clifford::Spinor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{vec_norm, CMat};
use crate::random::random_spinor;
use crate::structures::{GeneralizedComplexStructure, HermitianPair};
use crate::tolerances;
use crate::torus::field::{Freq, SpinorField};
use crate::torus::geometry::TorusGeometry;

/// Bidegree shift `(Δp, Δq)`.
pub type Shift = (i32, i32);

pub const DELTA_PLUS: Shift = (1, 1);
pub const DELTA_PLUS_BAR: Shift = (-1, -1);
pub const DELTA_MINUS: Shift = (1, -1);
pub const DELTA_MINUS_BAR: Shift = (-1, 1);

/// The sixteen shifts `{±1, ±3}²` that `d^H` can produce.
pub fn admissible_shifts() -> Vec<Shift> {
    let vals = [-3, -1, 1, 3];
    vals.iter()
        .flat_map(|&p| vals.iter().map(move |&q| (p, q)))
        .collect()
}

pub fn check_shift(shift: Shift) -> Result<()> {
    if admissible_shifts().contains(&shift) {
        Ok(())
    } else {
        Err(Error::UnsupportedShift(shift.0, shift.1))
    }
}

/// `Σ_{p,q} Π^{p+Δp, q+Δq} D Π^{p,q}` for one frequency block `D`.
pub fn component_block(pair: &HermitianPair, block: &CMat, shift: Shift) -> CMat {
    let dim = block.nrows();
    let mut out = CMat::zeros(dim, dim);
    for (p, q) in pair.bidegrees() {
        if let (Some(src), Some(dst)) = (
            pair.projector_ref(p, q),
            pair.projector_ref(p + shift.0, q + shift.1),
        ) {
            out += dst * block * src;
        }
    }
    out
}

/// The pieces of `d^H f` sorted by bidegree shift.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    m: usize,
    parts: BTreeMap<Shift, SpinorField>,
}

impl ComponentMap {
    pub fn get(&self, shift: Shift) -> SpinorField {
        self.parts.get(&shift).cloned().unwrap_or_else(|| SpinorField::new(self.m))
    }

    pub fn shifts(&self) -> impl Iterator<Item = Shift> + '_ {
        self.parts.keys().copied()
    }

    pub fn norm(&self, shift: Shift) -> f64 {
        self.parts.get(&shift).map_or(0.0, SpinorField::norm)
    }

    /// Sum of all components.
    pub fn total(&self) -> SpinorField {
        self.parts
            .values()
            .fold(SpinorField::new(self.m), |acc, f| acc.add(f))
    }

    /// Norm of the components whose shift is not in `allowed`.
    pub fn norm_outside(&self, allowed: &[Shift]) -> f64 {
        self.parts
            .iter()
            .filter(|(s, _)| !allowed.contains(s))
            .map(|(_, f)| f.norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Applies `d^H` and splits the image by the shift between the bidegree of
/// each source component and each target component.
pub fn dh_components(exec: Exec, f: &SpinorField, pair: &HermitianPair, geom: &TorusGeometry) -> ComponentMap {
    let degrees: Vec<Shift> = pair.bidegrees().collect();
    let entries: Vec<(&Freq, &Spinor)> = f.iter().collect();
    let pieces = exec.map(&entries, |(k, phi)| {
        let d = geom.d_block(k);
        let mut out: BTreeMap<Shift, Spinor> = BTreeMap::new();
        for &(p, q) in &degrees {
            let src = pair.projector_ref(p, q).expect("listed bidegree");
            let image = &d * &(src * *phi);
            for &(p2, q2) in &degrees {
                let dst = pair.projector_ref(p2, q2).expect("listed bidegree");
                let part = dst * &image;
                if part.norm() > 0.0 {
                    out.entry((p2 - p, q2 - q))
                        .and_modify(|acc| *acc += &part)
                        .or_insert(part);
                }
            }
        }
        ((*k).clone(), out)
    });
    let mut parts: BTreeMap<Shift, SpinorField> = BTreeMap::new();
    for (k, per_shift) in pieces {
        for (shift, phi) in per_shift {
            parts
                .entry(shift)
                .or_insert_with(|| SpinorField::new(f.dim()))
                .add_term(k.clone(), &phi);
        }
    }
    ComponentMap { m: f.dim(), parts }
}

/// Outcome of [`integrability_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub integrable: bool,
    /// Largest relative norm of `d^H` components outside `U^k → U^{k±1}`.
    pub residual: f64,
}

/// Tests `d^H : U^k → U^{k+1} ⊕ U^{k-1}` on the canonical generator and on
/// seeded random `U^k` fields.
pub fn integrability_check(
    j: &GeneralizedComplexStructure,
    geom: &TorusGeometry,
    seed: u64,
    samples: usize,
) -> IntegrabilityReport {
    let n = j.half_dim() as i32;
    let m = j.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outside = |k: i32, block: &CMat, phi: &Spinor| -> f64 {
        let img = block * phi;
        let kept = &(&j.projector(k + 1) * &img) + &(&j.projector(k - 1) * &img);
        let scale = phi.norm().max(1e-300);
        vec_norm(&(img.coeffs() - kept.coeffs())) / scale
    };
    let zero = Freq::zero(m);
    let mut residual = outside(n, &geom.d_block(&zero), j.canonical_generator());
    let freqs: Vec<Freq> = (0..3)
        .map(|s| Freq((0..m).map(|i| ((i as i32 + s) % 3) - 1).collect()))
        .collect();
    for _ in 0..samples {
        for k in -n..=n {
            let phi = &j.projector(k) * &random_spinor(m, &mut rng);
            if phi.norm() < 1e-12 {
                continue;
            }
            for freq in &freqs {
                residual = residual.max(outside(k, &geom.d_block(freq), &phi));
            }
        }
    }
    IntegrabilityReport {
        integrable: residual < tolerances::INTEGRABILITY,
        residual,
    }
}
