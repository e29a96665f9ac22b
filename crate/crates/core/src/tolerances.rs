//! Numerical tolerances shared by every module.
//!
//! All thresholds live here so that tests and the command line refer to the
//! same values.

/// Comparison of canonical wedge fields and lightlike normalization.
pub const EPS_GEOM: f64 = 1e-9;

/// Margin for strict inequalities on exact inputs.
pub const EPS_STRICT: f64 = 0.0;

/// Lorentz condition `Λᵀ g Λ = g`.
pub const EPS_GROUP: f64 = 1e-9;

/// Unit determinant of SL(2,C) elements.
pub const EPS_DET: f64 = 1e-12;

/// Floor applied to eigenvalues of `ΛΛᵀ` before taking square roots.
pub const EIGEN_FLOOR_SQRT: f64 = 1e-14;

/// Condition number above which `1 − Λ` counts as singular.
pub const COCYCLE_COND_MAX: f64 = 1e12;

/// Condition number above which image normals count as degenerate.
pub const NORMALS_COND_MAX: f64 = 1e10;

/// Margin separating "strictly feasible" from "empty" in the feasibility oracle.
pub const FEASIBILITY_MARGIN: f64 = 1e-8;

/// Lorentz check and residual bound for reconstructed elements.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

/// Closure of matrix algebras under products and adjoints.
pub const EPS_ALG: f64 = 1e-10;

/// Span distance below which two algebras are identified.
pub const SPAN_MATCH: f64 = 1e-7;

/// Tomita identities (`JΩ = Ω`, `J² = 1`, ...).
pub const EPS_MODULAR: f64 = 1e-8;

/// Floor applied to eigenvalues of Δ before negative powers.
pub const EIGEN_FLOOR_MODULAR: f64 = 1e-12;

/// Cap on the size of generated permutation groups.
pub const CLOSURE_CAP: usize = 1_000_000;
