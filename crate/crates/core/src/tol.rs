//! Numerical tolerances shared by the simulator, the checks and the tests.
//!
//! Every algorithm here is exact in exact arithmetic, so these only absorb
//! floating-point rounding.

/// Equality of state vectors and norm checks.
pub const STATE: f64 = 1e-9;

/// Scalar identities (closed-form coefficients, parameter arithmetic).
pub const SCALAR: f64 = 1e-12;

/// Slack allowed on every "measured <= bound" comparison.
pub const BOUND_SLACK: f64 = 1e-9;

/// Default stage-fidelity threshold for operators claiming to be exact.
pub const EXACT_STAGE_THRESHOLD: f64 = 1.0 - 1e-9;

/// Default stage-fidelity threshold for pseudo-reflection providers.
pub const PSEUDO_STAGE_THRESHOLD: f64 = 0.99;

/// Number of standard errors added to bounds checked on sampled sweeps.
pub const SAMPLED_SE_MULTIPLIER: f64 = 3.0;
