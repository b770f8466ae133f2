//! Commuting pairs `(J₁, J₂)` with `-J₁J₂` a generalized metric.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::clifford::{chevalley_pairing_oriented, clifford_matrix, DoubleVector, Orientation, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{c, column_basis, max_abs, op_norm, real_part, CMat, C64, I};
use crate::structures::complex::GeneralizedComplexStructure;
use crate::structures::metric::GeneralizedMetric;
use crate::tolerances;

/// Generalized almost Hermitian structure: a generalized metric `G` and a
/// generalized complex structure `J₁` commuting with it; `J₂ = G J₁`.
///
/// Forms split as `U^{p,q} = U^p_{J₁} ∩ U^q_{J₂}`. `V` is oriented by the
/// complex structure `J₁` induces on `V₊ ≅ V`, and the Hodge star and
/// Chevalley pairing use that orientation, so that `★ = -𝕁₁𝕁₂`.
#[derive(Debug, Clone)]
pub struct HermitianPair {
    metric: GeneralizedMetric,
    j1: GeneralizedComplexStructure,
    j2: GeneralizedComplexStructure,
    orientation: Orientation,
    star: CMat,
    bigraded: BTreeMap<(i32, i32), CMat>,
    /// `Σ_k k Π^k` for `J₁` and `J₂`.
    degree_ops: [CMat; 2],
    star_residual: f64,
}

/// Orientation of `R^m` induced by a complex structure: the sign of
/// `det(u_1, J u_1, …, u_n, J u_n)` for any complex basis `u`.
pub fn complex_orientation(j: &DMatrix<f64>) -> Orientation {
    let m = j.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(m);
    let mut ortho: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(m);
    let residual = |v: &nalgebra::DVector<f64>, ortho: &[nalgebra::DVector<f64>]| {
        let mut r = v.clone();
        for o in ortho {
            r -= o * o.dot(&r);
        }
        r
    };
    while cols.len() < m {
        let best = (0..m)
            .map(|i| {
                let e = nalgebra::DVector::<f64>::from_fn(m, |r, _| if r == i { 1.0 } else { 0.0 });
                let r = residual(&e, &ortho);
                (e, r.norm())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("m > 0");
        let u = best.0;
        let ju = j * &u;
        for v in [u, ju] {
            let r = residual(&v, &ortho);
            ortho.push(&r / r.norm());
            cols.push(v);
        }
    }
    let mat = DMatrix::from_columns(&cols);
    Orientation::from_sign(mat.determinant())
}

impl HermitianPair {
    pub fn new(metric: GeneralizedMetric, j1: GeneralizedComplexStructure) -> Result<Self> {
        if metric.dim() != j1.dim() {
            return Err(Error::DimensionMismatch {
                expected: metric.dim(),
                found: j1.dim(),
            });
        }
        let g = metric.matrix();
        let commutator = g * j1.matrix() - j1.matrix() * g;
        let residual = max_abs(&commutator);
        if residual > tolerances::AXIOM {
            return Err(Error::NotCommuting { residual });
        }
        let j2 = GeneralizedComplexStructure::from_matrix(g * j1.matrix())?;
        let m = metric.dim();
        let n = j1.half_dim() as i32;
        let restricted = real_part(&(j1.matrix() * metric.plus_frame()).rows(0, m).into_owned());
        let orientation = complex_orientation(&restricted);
        let star = metric.star_matrix(orientation);
        let mut bigraded = BTreeMap::new();
        for p in -n..=n {
            // U^{p,q} vanishes unless p + q ≡ n mod 2.
            for q in (-n..=n).filter(|q| (p + q - n) % 2 == 0) {
                let proj = j1.projector(p) * j2.projector(q);
                if max_abs(&proj) > tolerances::RANK {
                    bigraded.insert((p, q), proj);
                }
            }
        }
        let degree = |j: &GeneralizedComplexStructure| {
            let d = 1 << m;
            (-n..=n).fold(CMat::zeros(d, d), |acc, k| acc + j.projector(k) * c(k as f64))
        };
        let degree_ops = [degree(&j1), degree(&j2)];
        let jj = j1.form_operator() * j2.form_operator();
        let star_residual = op_norm(&(&star + &jj));
        let pair = Self {
            metric,
            j1,
            j2,
            orientation,
            star,
            bigraded,
            degree_ops,
            star_residual,
        };
        Ok(pair)
    }

    /// Kähler pair from a Riemannian metric `g` and an orthogonal complex structure `J` on `V`.
    pub fn kaehler(g: &DMatrix<f64>, jv: &DMatrix<f64>) -> Result<Self> {
        let m = g.nrows();
        let metric = GeneralizedMetric::from_g_b(g, &DMatrix::zeros(m, m))?;
        let j1 = GeneralizedComplexStructure::from_complex(jv)?;
        Self::new(metric, j1)
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn half_dim(&self) -> usize {
        self.j1.half_dim()
    }

    pub fn metric(&self) -> &GeneralizedMetric {
        &self.metric
    }

    pub fn j1(&self) -> &GeneralizedComplexStructure {
        &self.j1
    }

    pub fn j2(&self) -> &GeneralizedComplexStructure {
        &self.j2
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Hodge star for the induced orientation.
    pub fn star(&self) -> &CMat {
        &self.star
    }

    /// `‖★ + 𝕁₁𝕁₂‖` in operator norm.
    pub fn star_identity_residual(&self) -> f64 {
        self.star_residual
    }

    /// Residual of the identity `★ = -𝕁₁𝕁₂` for an arbitrary candidate star.
    pub fn check_star(&self, star: &CMat) -> Result<f64> {
        let jj = self.j1.form_operator() * self.j2.form_operator();
        let residual = op_norm(&(star + jj));
        if residual > tolerances::STAR_IDENTITY {
            return Err(Error::StarIdentity { residual });
        }
        Ok(residual)
    }

    pub fn hodge_star(&self, phi: &Spinor) -> Spinor {
        &self.star * phi
    }

    /// Chevalley pairing with the top degree read against the induced orientation.
    pub fn chevalley(&self, phi: &Spinor, psi: &Spinor) -> Result<C64> {
        chevalley_pairing_oriented(phi, psi, self.orientation)
    }

    /// Nonzero bidegrees `(p, q)`.
    pub fn bidegrees(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.bigraded.keys().copied()
    }

    /// Projector onto `U^{p,q}`, zero for an empty bidegree.
    pub fn projector(&self, p: i32, q: i32) -> CMat {
        self.bigraded.get(&(p, q)).cloned().unwrap_or_else(|| {
            let d = 1 << self.dim();
            CMat::zeros(d, d)
        })
    }

    pub fn projector_ref(&self, p: i32, q: i32) -> Option<&CMat> {
        self.bigraded.get(&(p, q))
    }

    /// `V₊^{1,0}`, `V₊^{0,1}`, `V₋^{1,0}`, `V₋^{0,1}` as column frames; the
    /// `(1,0)` parts are the `+i`-eigenspaces of `J₁`.
    pub fn frames(&self) -> [CMat; 4] {
        let two_m = 2 * self.dim();
        let id = CMat::identity(two_m, two_m);
        let g = self.metric.matrix();
        let j = self.j1.matrix();
        let hol = (&id - j * I) * c(0.5);
        let antihol = (&id + j * I) * c(0.5);
        let plus = (&id + g) * c(0.5);
        let minus = (&id - g) * c(0.5);
        [
            column_basis(&(&plus * &hol), tolerances::RANK),
            column_basis(&(&plus * &antihol), tolerances::RANK),
            column_basis(&(&minus * &hol), tolerances::RANK),
            column_basis(&(&minus * &antihol), tolerances::RANK),
        ]
    }

    /// The constant bidegree shift `(Δp, Δq)` of Clifford multiplication by `v`,
    /// or `None` when `v` is not homogeneous.
    pub fn clifford_shift(&self, v: &DoubleVector) -> Option<(i32, i32)> {
        let gamma = clifford_matrix(v);
        let scale = max_abs(&gamma);
        if scale < 1e-12 {
            return None;
        }
        let norm_sq: f64 = gamma.iter().map(|z| z.norm_sqr()).sum();
        let mut shift = [0i32; 2];
        for (s, deg) in shift.iter_mut().zip(&self.degree_ops) {
            let comm = deg * &gamma - &gamma * deg;
            let k = (gamma.dotc(&comm).re / norm_sq).round();
            if max_abs(&(comm - &gamma * c(k))) > 1e-9 * scale {
                return None;
            }
            *s = k as i32;
        }
        Some((shift[0], shift[1]))
    }
}
