//! Pinned numerical tolerances shared by solvers, tests and suites.

/// Default absolute tolerance on convex objectives.
pub const OBJECTIVE_TOL: f64 = 1e-6;
/// Relative agreement for closed-form identities (polarization, Parseval, ...).
pub const IDENTITY_REL: f64 = 1e-9;
/// Slack allowed on statistical inequality checks.
pub const INEQUALITY_REL: f64 = 1e-6;
/// Relative agreement between the Calderón optimizer and the closed form.
pub const CALDERON_REL: f64 = 0.05;
/// Largest degree for which the polarization sum (2^m m! terms) is evaluated.
pub const POLARIZATION_MAX_DEGREE: usize = 12;
