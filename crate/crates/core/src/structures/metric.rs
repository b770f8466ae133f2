//! Generalized metrics and the generalized Hodge star.

use nalgebra::DMatrix;

use crate::clifford::{clifford_matrix, natural_pairing, pairing_matrix, DoubleVector, Orientation, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{c, column_basis, complexify, max_abs, real_part, CMat, ZERO};
use crate::tolerances;

/// An orthogonal, self-adjoint involution `G` of `V ⊕ V*` with `⟨G·,·⟩ > 0`.
#[derive(Debug, Clone)]
pub struct GeneralizedMetric {
    m: usize,
    matrix: CMat,
    /// Columns `v_i ∈ V₊` with `π_V(v_i) = ∂_i`.
    plus_frame: CMat,
    /// Columns `v_i ∈ V₋` with `π_V(v_i) = ∂_i`.
    minus_frame: CMat,
}

/// Frame of the image of `proj` normalized so that its projection to `V` is the identity.
fn graph_frame(proj: &CMat, m: usize) -> Result<CMat> {
    let basis = column_basis(proj, tolerances::RANK);
    if basis.ncols() != m {
        return Err(Error::AxiomViolation {
            what: "eigenspaces of G have dimension m",
            residual: (basis.ncols() as f64 - m as f64).abs(),
        });
    }
    let top = basis.rows(0, m).into_owned();
    let inv = top.clone().try_inverse().ok_or(Error::AxiomViolation {
        what: "projection of V± to V is invertible",
        residual: 0.0,
    })?;
    let frame = basis * inv;
    Ok(complexify(&real_part(&frame)))
}

impl GeneralizedMetric {
    /// `G` whose `±1` eigenspaces are the graphs of `b ± g : V → V*`.
    pub fn from_g_b(g: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Self> {
        let m = g.nrows();
        if g.ncols() != m || b.nrows() != m || b.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: b.nrows(),
            });
        }
        if (g - g.transpose()).abs().max() > tolerances::AXIOM * g.abs().max().max(1.0) {
            return Err(Error::InvalidInput("g is not symmetric".into()));
        }
        if (b + b.transpose()).abs().max() > tolerances::AXIOM * b.abs().max().max(1.0) {
            return Err(Error::InvalidInput("b is not skew".into()));
        }
        if g.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let gi = g.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
        let mut mat = DMatrix::<f64>::zeros(2 * m, 2 * m);
        mat.view_mut((0, 0), (m, m)).copy_from(&(-&gi * b));
        mat.view_mut((0, m), (m, m)).copy_from(&gi);
        mat.view_mut((m, 0), (m, m)).copy_from(&(g - b * &gi * b));
        mat.view_mut((m, m), (m, m)).copy_from(&(b * &gi));
        Self::from_matrix(complexify(&mat))
    }

    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let m = matrix.nrows() / 2;
        if matrix.nrows() != 2 * m || matrix.ncols() != 2 * m {
            return Err(Error::InvalidInput("metric must be a 2m x 2m matrix".into()));
        }
        let p = pairing_matrix(m);
        let id = CMat::identity(2 * m, 2 * m);
        let scale = max_abs(&matrix).max(1.0);
        let checks = [
            ("G is real", crate::linalg::imag_part_norm(&matrix)),
            ("G^2 = Id", max_abs(&(&matrix * &matrix - &id))),
            ("G orthogonal", max_abs(&(matrix.transpose() * &p * &matrix - &p))),
            ("G self-adjoint", max_abs(&(&p * &matrix - matrix.transpose() * &p))),
        ];
        for (what, residual) in checks {
            if residual > tolerances::AXIOM * scale * scale {
                return Err(Error::AxiomViolation { what, residual });
            }
        }
        let form = real_part(&(matrix.transpose() * &p));
        let sym = (&form + form.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigen().eigenvalues.min();
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let plus = (&id + &matrix) * c(0.5);
        let minus = (&id - &matrix) * c(0.5);
        Ok(Self {
            m,
            plus_frame: graph_frame(&plus, m)?,
            minus_frame: graph_frame(&minus, m)?,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn plus_frame(&self) -> &CMat {
        &self.plus_frame
    }

    pub fn minus_frame(&self) -> &CMat {
        &self.minus_frame
    }

    /// `(g, b)` recovered from the graph `V₊ = {X + (b + g)X}`.
    pub fn g_b(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let m = self.m;
        let plus = real_part(&self.plus_frame.rows(m, m).into_owned());
        let minus = real_part(&self.minus_frame.rows(m, m).into_owned());
        ((&plus - &minus) * 0.5, (&plus + &minus) * 0.5)
    }

    /// `⟨·,·⟩`-orthonormal frame of `V₊` whose projection to `V` has the given orientation.
    pub fn oriented_frame(&self, orientation: Orientation) -> Vec<DoubleVector> {
        let m = self.m;
        let mut frame: Vec<DoubleVector> = Vec::with_capacity(m);
        for i in 0..m {
            let mut v = DoubleVector::from_coords(self.plus_frame.column(i).into_owned()).expect("even");
            for e in &frame {
                let proj = natural_pairing(e, &v).expect("same dim");
                v = v.add(&e.scale(-proj));
            }
            let nrm = natural_pairing(&v, &v).expect("same dim").re.sqrt();
            frame.push(v.scale(c(1.0 / nrm)));
        }
        if orientation == Orientation::Negative {
            let last = frame.pop().expect("m >= 1");
            frame.push(last.scale(c(-1.0)));
        }
        frame
    }

    /// Matrix of `★ = -e_m ⋯ e_2 · e_1` for a positive orthonormal frame of `V₊`.
    pub fn star_matrix(&self, orientation: Orientation) -> CMat {
        star_from_frame(&self.oriented_frame(orientation))
    }

    pub fn hodge_star(&self, orientation: Orientation, phi: &Spinor) -> Result<Spinor> {
        if phi.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: phi.dim(),
            });
        }
        Ok(&self.star_matrix(orientation) * phi)
    }

    /// `★φ` computed from a caller-supplied orthonormal frame of `V₊`, which must
    /// induce `orientation` on `V`.
    pub fn hodge_star_with_frame(
        &self,
        frame: &[DoubleVector],
        orientation: Orientation,
        phi: &Spinor,
    ) -> Result<Spinor> {
        let m = self.m;
        if frame.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: frame.len(),
            });
        }
        for (i, e) in frame.iter().enumerate() {
            let ge = &self.matrix * e.coords();
            let res = max_abs(&CMat::from_column_slice(2 * m, 1, (ge - e.coords()).as_slice()));
            if res > tolerances::AXIOM {
                return Err(Error::AxiomViolation {
                    what: "frame lies in V+",
                    residual: res,
                });
            }
            for (j, f) in frame.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let res = (natural_pairing(e, f)? - c(want)).norm();
                if res > tolerances::AXIOM {
                    return Err(Error::AxiomViolation {
                        what: "frame is orthonormal",
                        residual: res,
                    });
                }
            }
        }
        let proj = DMatrix::<f64>::from_fn(m, m, |r, col| frame[col].vector_part()[r].re);
        if Orientation::from_sign(proj.determinant()) != orientation {
            return Err(Error::OrientationReversed);
        }
        Ok(&star_from_frame(frame) * phi)
    }
}

fn star_from_frame(frame: &[DoubleVector]) -> CMat {
    let m = frame[0].dim();
    let n = 1 << m;
    let mut star = CMat::identity(n, n) * c(-1.0);
    for e in frame {
        star = clifford_matrix(e) * star;
    }
    star.iter_mut().for_each(|z| {
        if z.norm() < 1e-15 {
            *z = ZERO;
        }
    });
    star
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::chevalley_pairing;
    use crate::linalg::ONE;

    fn id2() -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }

    #[test]
    fn v_plus_is_graph_of_g() {
        let g = GeneralizedMetric::from_g_b(&id2(), &DMatrix::zeros(2, 2)).unwrap();
        let f = g.plus_frame();
        // ∂1 + dx1, ∂2 + dx2
        let want = CMat::from_row_slice(4, 2, &[ONE, ZERO, ZERO, ONE, ONE, ZERO, ZERO, ONE]);
        assert!(max_abs(&(f - want)) < 1e-15);
        let sq = g.matrix() * g.matrix();
        assert!(max_abs(&(sq - CMat::identity(4, 4))) < 1e-15);
        // ⟨G ∂1, ∂1⟩ = ⟨dx1, ∂1⟩ = 1/2 > 0
        let gd = DoubleVector::from_coords(g.matrix().column(0).into_owned()).unwrap();
        assert_eq!(natural_pairing(&gd, &DoubleVector::vector(2, 0)).unwrap(), c(0.5));
    }

    #[test]
    fn recovers_g_and_b() {
        let gm = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let bm = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, -0.3, 0.0]);
        let g = GeneralizedMetric::from_g_b(&gm, &bm).unwrap();
        let (g2, b2) = g.g_b();
        assert!((g2 - gm).abs().max() < 1e-13);
        assert!((b2 - bm).abs().max() < 1e-13);
    }

    #[test]
    fn rejects_indefinite_g() {
        let gm = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(
            GeneralizedMetric::from_g_b(&gm, &DMatrix::zeros(2, 2)).unwrap_err(),
            Error::NotPositiveDefinite
        );
    }

    #[test]
    fn star_examples_in_two_dimensions() {
        let g = GeneralizedMetric::from_g_b(&id2(), &DMatrix::zeros(2, 2)).unwrap();
        let s1 = g.hodge_star(Orientation::Positive, &Spinor::one(2)).unwrap();
        assert_eq!(s1, Spinor::monomial(2, 0b11));
        let s2 = g
            .hodge_star(Orientation::Positive, &Spinor::monomial(2, 0b11))
            .unwrap();
        assert_eq!(s2, Spinor::one(2) * c(-1.0));
    }

    #[test]
    fn star_is_positive_for_chevalley() {
        let gm = DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 1.5]);
        let bm = DMatrix::from_row_slice(3, 3, &[0.0, 0.4, -0.1, -0.4, 0.0, 0.7, 0.1, -0.7, 0.0]);
        let g = GeneralizedMetric::from_g_b(&gm, &bm).unwrap();
        for mask in 0..8 {
            let phi = &Spinor::monomial(3, mask) + &Spinor::monomial(3, (mask + 3) % 8);
            let s = g.hodge_star(Orientation::Positive, &phi).unwrap();
            let val = chevalley_pairing(&phi, &s).unwrap();
            assert!(val.re > 0.0 && val.im.abs() < 1e-12, "{val}");
        }
    }

    #[test]
    fn supplied_frame_orientation_is_checked() {
        let g = GeneralizedMetric::from_g_b(&id2(), &DMatrix::zeros(2, 2)).unwrap();
        let frame = g.oriented_frame(Orientation::Positive);
        let phi = Spinor::one(2);
        let a = g.hodge_star_with_frame(&frame, Orientation::Positive, &phi).unwrap();
        assert_eq!(a, g.hodge_star(Orientation::Positive, &phi).unwrap());
        assert_eq!(
            g.hodge_star_with_frame(&frame, Orientation::Negative, &phi).unwrap_err(),
            Error::OrientationReversed
        );
    }
}
