//! Default numerical tolerances. Everything that gates a check lives here.

/// Axiom checks on endomorphisms of `V ⊕ V*` (relative).
pub const AXIOM: f64 = 1e-9;

/// Antisymmetry check for `so(V ⊕ V*)` elements (relative).
pub const ANTISYMMETRY: f64 = 1e-9;

/// Exponential series truncation.
pub const EXP_SERIES: f64 = 1e-13;

/// Operator identity `★ = -J1 J2`.
pub const STAR_IDENTITY: f64 = 1e-9;

/// Newton iteration on the projected exponential map.
pub const NEWTON: f64 = 1e-11;
pub const NEWTON_MAX_ITER: usize = 50;

/// Relative cutoff below which singular values count as kernel.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Rank decisions for projector images and frames.
pub const RANK: f64 = 1e-8;

/// Per-order residual of the deformation solver, relative to `‖ψ‖`.
pub const SOLVER_RESIDUAL: f64 = 1e-9;

/// Closedness relations on `ρ`, leakage of `ρ`, agreement of the two
/// expressions for `φ`, and the `βψ` reconstruction.
pub const SOLVER_STRUCTURE: f64 = 1e-10;

/// Integrability residual of constant structures.
pub const INTEGRABILITY: f64 = 1e-9;
