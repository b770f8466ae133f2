//! The `H`-twisted Courant (Dorfman) bracket on trigonometric sections of `T ⊕ T*`.

use crate::clifford::{natural_pairing, DoubleVector};
use crate::exec::Exec;
use crate::linalg::{C64, I};
use crate::torus::field::{convolve, ScalarField, SectionField};
use crate::torus::geometry::TorusGeometry;

/// `[[X + ξ, Y + η]] = [X, Y] + L_X η - i_Y dξ - i_Y i_X H`, computed exactly on
/// Fourier coefficients.
pub fn courant_bracket(exec: Exec, s1: &SectionField, s2: &SectionField, geom: &TorusGeometry) -> SectionField {
    let m = geom.dim();
    let pairs: Vec<_> = s1
        .iter()
        .flat_map(|(k, a)| s2.iter().map(move |(l, b)| (k, a, l, b)))
        .collect();
    let terms = exec.map(&pairs, |(k, a, l, b)| {
        let x = a.vector_part();
        let xi = a.covector_part();
        let y = b.vector_part();
        let eta = b.covector_part();
        let lx = l.pair(x);
        let ky = k.pair(y);
        let eta_x: C64 = eta.iter().zip(x).map(|(e, v)| e * v).sum();
        let xi_y: C64 = xi.iter().zip(y).map(|(e, v)| e * v).sum();
        let hxy = geom.h_contract_two(x, y);
        let vec: Vec<C64> = (0..m).map(|j| I * (lx * y[j] - ky * x[j])).collect();
        let covec: Vec<C64> = (0..m)
            .map(|j| {
                let lie = I * (lx * eta[j] + eta_x * k.0[j] as f64);
                let contraction = I * (ky * xi[j] - xi_y * k.0[j] as f64);
                lie - contraction - hxy[j]
            })
            .collect();
        (*k + *l, DoubleVector::from_parts(&vec, &covec).expect("same length"))
    });
    let mut out = SectionField::new(m);
    for (k, v) in terms {
        out.add_term(k, &v);
    }
    out
}

/// `f · s` for a scalar field `f`.
pub fn scalar_times_section(exec: Exec, f: &ScalarField, s: &SectionField) -> SectionField {
    convolve(exec, f, s, |z, v| v.scale(*z))
}

/// `X f = Σ_j X_j ∂_j f` with `X` the vector part of `s`.
pub fn directional_derivative(exec: Exec, s: &SectionField, f: &ScalarField) -> ScalarField {
    let pairs: Vec<_> = s
        .iter()
        .flat_map(|(k, v)| f.iter().map(move |(l, z)| (k, v, l, z)))
        .collect();
    let terms = exec.map(&pairs, |(k, v, l, z)| (*k + *l, I * l.pair(v.vector_part()) * **z));
    let mut out = ScalarField::new(f.dim());
    for (k, v) in terms {
        out.add_term(k, &v);
    }
    out
}

/// `⟨s1, s2⟩` as a scalar field.
pub fn pairing_field(exec: Exec, s1: &SectionField, s2: &SectionField) -> ScalarField {
    convolve(exec, s1, s2, |a, b| natural_pairing(a, b).expect("same dimension"))
}
