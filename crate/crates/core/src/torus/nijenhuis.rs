//! Nijenhuis tensor of a constant generalized complex structure on the torus.

use crate::clifford::{clifford_matrix, natural_pairing, DoubleVector};
use crate::exec::Exec;
use crate::linalg::{c, max_abs, CMat, C64, ZERO};
use crate::structures::GeneralizedComplexStructure;
use crate::torus::courant::courant_bracket;
use crate::torus::field::{Freq, SectionField};
use crate::torus::geometry::TorusGeometry;

/// `N(X, Y, Z) = -2⟨[[X, Y]], Z⟩` on a frame `w` of `L̄`, viewed as an element of
/// `∧³L` through the dual frame `ℓ` of `L` (`2⟨ℓ_i, w_j⟩ = δ_ij`).
#[derive(Debug, Clone)]
pub struct NijenhuisTensor {
    m: usize,
    l_frame: Vec<DoubleVector>,
    lbar_frame: Vec<DoubleVector>,
    components: Vec<C64>,
}

impl NijenhuisTensor {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> C64 {
        self.components[(i * self.m + j) * self.m + k]
    }

    pub fn l_frame(&self) -> &[DoubleVector] {
        &self.l_frame
    }

    pub fn lbar_frame(&self) -> &[DoubleVector] {
        &self.lbar_frame
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest defect of total antisymmetry over all index triples.
    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let n = self.component(i, j, k);
                    worst = worst
                        .max((n + self.component(j, i, k)).norm())
                        .max((n + self.component(i, k, j)).norm());
                }
            }
        }
        worst
    }

    /// Matrix of the Clifford action `Σ_{i<j<k} N(w_i, w_j, w_k) ℓ_i ℓ_j ℓ_k`.
    pub fn clifford_action(&self) -> CMat {
        let m = self.m;
        let dim = 1 << m;
        let gammas: Vec<CMat> = self.l_frame.iter().map(clifford_matrix).collect();
        let mut out = CMat::zeros(dim, dim);
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let n = self.component(i, j, k);
                    if n.norm() > 0.0 {
                        out += &gammas[i] * &gammas[j] * &gammas[k] * n;
                    }
                }
            }
        }
        out
    }
}

/// Frames of `L` and of `L̄` dual to it under `2⟨·,·⟩`.
pub fn dual_frames(j: &GeneralizedComplexStructure) -> (Vec<DoubleVector>, Vec<DoubleVector>) {
    let m = j.dim();
    let l = j.l_frame();
    let lbar = l.map(|z| z.conj());
    let to_vecs = |mat: &CMat| -> Vec<DoubleVector> {
        (0..mat.ncols())
            .map(|col| DoubleVector::from_coords(mat.column(col).into_owned()).expect("even"))
            .collect()
    };
    let lv = to_vecs(&l);
    let lbv = to_vecs(&lbar);
    let gram = CMat::from_fn(m, m, |a, b| natural_pairing(&lv[a], &lbv[b]).expect("dims") * c(2.0));
    let inv = gram.try_inverse().expect("L and its conjugate are dual under the pairing");
    let w = lbar * inv;
    (lv, to_vecs(&w))
}

/// Nijenhuis tensor of a constant structure, through the Courant bracket of constant sections.
pub fn nijenhuis(exec: Exec, j: &GeneralizedComplexStructure, geom: &TorusGeometry) -> NijenhuisTensor {
    let m = j.dim();
    let (l_frame, lbar_frame) = dual_frames(j);
    let zero = Freq::zero(m);
    let sections: Vec<SectionField> = lbar_frame
        .iter()
        .map(|w| SectionField::constant(m, w.clone()))
        .collect();
    let triples: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|a| (0..m).flat_map(move |b| (0..m).map(move |k| (a, b, k))))
        .collect();
    let components = exec.map(&triples, |&(a, b, k)| {
        let br = courant_bracket(Exec::Sequential, &sections[a], &sections[b], geom);
        match br.get(&zero) {
            Some(v) => natural_pairing(v, &lbar_frame[k]).expect("dims") * c(-2.0),
            None => ZERO,
        }
    });
    NijenhuisTensor {
        m,
        l_frame,
        lbar_frame,
        components,
    }
}

/// Largest `|2⟨ℓ_i, w_j⟩ - δ_ij|` for the frames of [`dual_frames`].
pub fn duality_residual(l: &[DoubleVector], w: &[DoubleVector]) -> f64 {
    let m = l.len();
    let mat = CMat::from_fn(m, m, |a, b| {
        let want = if a == b { 1.0 } else { 0.0 };
        natural_pairing(&l[a], &w[b]).expect("dims") * c(2.0) - c(want)
    });
    max_abs(&mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{standard_complex, standard_symplectic};

    #[test]
    fn frames_are_dual() {
        let j = GeneralizedComplexStructure::from_symplectic(&standard_symplectic(4)).unwrap();
        let (l, w) = dual_frames(&j);
        assert!(duality_residual(&l, &w) < 1e-13);
    }

    #[test]
    fn integrable_without_h() {
        let g = TorusGeometry::flat(4);
        for j in [
            GeneralizedComplexStructure::from_complex(&standard_complex(4)).unwrap(),
            GeneralizedComplexStructure::from_symplectic(&standard_symplectic(4)).unwrap(),
        ] {
            assert_eq!(nijenhuis(Exec::Sequential, &j, &g).max_abs(), 0.0);
        }
    }

    #[test]
    fn complex_surface_stays_integrable_with_h() {
        let g = TorusGeometry::from_components(4, &[([0, 1, 2], 1.0), ([1, 2, 3], 0.5)]).unwrap();
        let j = GeneralizedComplexStructure::from_complex(&standard_complex(4)).unwrap();
        assert!(nijenhuis(Exec::Sequential, &j, &g).max_abs() < 1e-14);
    }

    #[test]
    fn symplectic_with_h_is_not_integrable() {
        let g = TorusGeometry::from_components(4, &[([0, 1, 2], 1.0)]).unwrap();
        let j = GeneralizedComplexStructure::from_symplectic(&standard_symplectic(4)).unwrap();
        let n = nijenhuis(Exec::Sequential, &j, &g);
        assert!(n.max_abs() > 0.1);
        assert!(n.antisymmetry_residual() < 1e-13);
    }

    #[test]
    fn complex_threefold_with_30_form_is_not_integrable() {
        // Re(dz1∧dz2∧dz3) has a (3,0) part.
        let g = TorusGeometry::from_components(
            6,
            &[([0, 2, 4], 1.0), ([0, 3, 5], -1.0), ([1, 2, 5], -1.0), ([1, 3, 4], -1.0)],
        )
        .unwrap();
        let j = GeneralizedComplexStructure::from_complex(&standard_complex(6)).unwrap();
        let n = nijenhuis(Exec::Parallel, &j, &g);
        assert!(n.max_abs() > 0.1);
        assert!(n.antisymmetry_residual() < 1e-13);
    }
}
