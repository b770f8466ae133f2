//! Generalized metrics, generalized complex structures and Hermitian pairs.

pub mod complex;
pub mod deform;
pub mod metric;
pub mod pair;

pub use complex::{standard_complex, standard_symplectic, GeneralizedComplexStructure};
pub use deform::{anticommuting_basis, deform_structure, extract_anticommuting, split_adapted};
pub use metric::GeneralizedMetric;
pub use pair::{complex_orientation, HermitianPair};
