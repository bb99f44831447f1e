//! Scalar function specifications, the two-operator superquadratic deficit
//! and randomized classification of functions against it.

mod classify;
mod deficit;
pub mod fixtures;
mod spec;

pub use classify::{
    check_propositions, classify, ClassVerdict, ClassificationResult, PropositionCheck,
    PropositionReport, SamplingConfig,
};
pub use deficit::{
    operator_convex_deficit, operator_superquadratic_deficit, scalar_superquadratic_deficit,
    two_point_sides, DeficitReport, InstanceDigest, Sides, TWO_POINT_ID,
};
pub use spec::{
    affine, cube, power, recip, square, tlogt, ClaimedClass, Interval, RealFn, ScalarFunctionSpec,
    BOUNDARY_TOL, BUILTIN_IDS, DEFAULT_OPEN_MARGIN,
};

#[cfg(test)]
mod tests;
