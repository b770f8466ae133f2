//! Trigonometric fields on the flat torus and the operators built from `d^H`.

pub mod components;
pub mod courant;
pub mod field;
pub mod geometry;
pub mod nijenhuis;

pub use components::{
    admissible_shifts, check_shift, component_block, dh_components, integrability_check, ComponentMap,
    IntegrabilityReport, Shift, DELTA_MINUS, DELTA_MINUS_BAR, DELTA_PLUS, DELTA_PLUS_BAR,
};
pub use courant::{courant_bracket, directional_derivative, pairing_field, scalar_times_section};
pub use field::{
    apply_operator_field, convolve, frequency_box, multiply_matrix_fields, Coefficient, FourierField, Freq,
    MatrixField, ScalarField, SectionField, SpinorField,
};
pub use geometry::TorusGeometry;
pub use nijenhuis::{dual_frames, nijenhuis, NijenhuisTensor};
