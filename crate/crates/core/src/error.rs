use thiserror::Error;

/// Errors raised by the evaluation, calculus and sectioning routines.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates its admissible range.
    #[error("{0}")]
    Config(String),

    /// The point lies on the projection of a principal axis, where the sign field Ĥ jumps.
    #[error("point lies on a principal-axis projection of the deviatoric plane")]
    OnAxis,

    /// The stress is (numerically) hydrostatic, so the Lode angle is undefined.
    #[error("hydrostatic point: deviatoric stress vanishes")]
    HydrostaticPoint,

    /// The Lode angle sits at a corner of the deviatoric section. The payload holds
    /// the one-sided derivatives `(g'₋, g'₊)` that bound the subgradient set.
    #[error("corner at theta = {theta}: one-sided slopes g'- = {left}, g'+ = {right}")]
    CornerPoint { theta: f64, left: f64, right: f64 },

    /// A two-sided derivative was requested at a breakpoint with a slope jump.
    #[error("not differentiable at theta = {theta}")]
    NotDifferentiable { theta: f64 },

    /// `line_restriction_slopes` was called at a smooth interior point.
    #[error("point is a smooth interior point; use the gradient instead")]
    NotSingular,

    /// Round-off exceeded the range a correct computation can produce.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    /// No point with F < 0 could be found to start the ray search from.
    #[error("no interior point with F < 0 found")]
    NoInteriorPoint,

    /// F never changed sign along a ray within the search radius.
    #[error("no sign change of F along ray(s) {rays:?}")]
    NoBracket { rays: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, Error>;
