//! Generalized complex linear algebra on `∧•V*` and a flat-torus spectral layer
//! for deforming generalized Kähler structures.
//!
//! The crate is split bottom-up:
//!
//! * [`clifford`]: exterior algebra, Clifford action of `V ⊕ V*`, the Chevalley
//!   pairing and the spin representation of `so(V ⊕ V*)`.
//! * [`structures`]: generalized metrics, generalized complex structures,
//!   Hermitian pairs with their bigraded projectors and the generalized Hodge star.
//! * [`torus`]: finite Fourier fields on `T^m`, the twisted differential
//!   `d^H = d + H∧`, the Courant bracket and the bigraded splitting of `d^H`.
//! * [`hodge`]: the L² inner product, adjoints, Laplacians and the Green operator.
//! * [`solver`]: the order-by-order construction of closed spinors `ψ_t`
//!   compensating a deformation `a_t` of the first structure.
//!
//! Conventions used throughout:
//!
//! * `V = R^m`, basis of `V ⊕ V*` ordered `(∂_1..∂_m, dx_1..dx_m)`.
//! * A form is a coefficient vector indexed by a bitmask; bit `i` is `dx_{i+1}`.
//! * `dx_1 ∧ … ∧ dx_m` is the positive top form.
//! * A 2-form is a skew matrix `B` with `B[(j, i)]` the coefficient of
//!   `dx_{j+1} ∧ dx_{i+1}` for `j < i`; as an element of `so(V ⊕ V*)` it sits in the
//!   lower-left block and acts by `X ↦ -i_X B`.

pub mod clifford;
pub mod error;
pub mod exec;
pub mod hodge;
pub mod linalg;
pub mod random;
pub mod solver;
pub mod structures;
pub mod tolerances;
pub mod torus;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{CMat, CVec, C64};
