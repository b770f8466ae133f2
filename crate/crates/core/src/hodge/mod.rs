//! L² inner product, adjoints, Laplacians and Green operators over a constant background.

pub mod inner;
pub mod operator;

pub use inner::{l2_inner, InnerProduct};
pub use operator::{
    build_component_operator, build_dh_operator, green_apply, laplacian, BlockOperator, GreenOperator,
    LaplacianKind,
};
