//! Exterior algebra, Clifford action and spin representation.

pub mod double;
pub mod spin;
pub mod spinor;

pub use double::{natural_pairing, pairing_matrix, DoubleVector, SoBlocks, SoDouble};
pub use spin::{
    clifford_act, clifford_matrix, drho_matrix, drho_matrix_raw, spin_lie_action, spinor_exp,
    spinor_exp_terms,
};
pub use spinor::{chevalley_matrix, chevalley_pairing, chevalley_pairing_oriented, Orientation, Spinor};
