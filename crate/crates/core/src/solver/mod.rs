//! Compensating a deformation of the first structure of a generalized Kähler
//! pair by a closed spinor, order by order in `t`.

pub mod families;
pub mod series;
pub mod solve;
pub mod verify;

pub use families::*;
pub use series::*;
pub use solve::*;
pub use verify::*;
