use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("composition degree {degree} exceeds the degree cap {cap}")]
    DegreeCapExceeded { degree: u128, cap: usize },

    #[error("root finder did not converge (worst relative residual {worst_residual:e})")]
    NoConvergence { worst_residual: f64 },

    #[error("Newton step undefined: derivative vanished near {at}")]
    DerivativeVanished { at: Complex64 },

    #[error("Newton iteration stalled near {at} (linear convergence, multiple root suspected)")]
    ConvergenceStall { at: Complex64 },

    #[error("orbit iterate escaped to infinity at step {step}")]
    Escaped { step: usize },

    #[error("orbit grouping ambiguous: match distance {distance:e} exceeds half separation {half_separation:e}")]
    AmbiguousGrouping { distance: f64, half_separation: f64 },

    #[error("period {period}: need {needed} non-multiple orbits, found {found}")]
    InsufficientOrbits { period: usize, needed: usize, found: usize },

    #[error("period {period}: only multiple orbits available")]
    MultipleOrbitOnly { period: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("orbit {orbit} is parabolic (multiplier {multiplier}); implicit differentiation degenerates")]
    ParabolicObstruction { orbit: usize, multiplier: Complex64 },

    #[error("fixed point {index} has multiplier {multiplier} too close to 1")]
    UnitMultiplier { index: usize, multiplier: Complex64 },

    #[error("all certificate trials failed: {taxonomy:?}")]
    AllTrialsFailed { taxonomy: BTreeMap<String, usize> },

    #[error("point {z} too close to the pole of the Blaschke model")]
    PoleProximity { z: Complex64 },

    #[error("value {value} is not in the open unit disk")]
    OutsideDisk { value: Complex64 },

    #[error("Jacobian is singular (sigma_min {sigma_min:e}, sigma_max {sigma_max:e})")]
    SingularJacobian { sigma_min: f64, sigma_max: f64 },

    #[error("Newton inversion exceeded its iteration budget (residual {residual:e})")]
    MaxIterExceeded { residual: f64 },

    #[error("tracked orbit {orbit} was lost during re-refinement")]
    OrbitLost { orbit: usize },

    #[error("continuation stalled at path parameter {reached}")]
    Stalled { reached: f64 },

    #[error("continuation stopped before a parabolic multiplier at path parameter {reached}")]
    ParabolicHit { reached: f64 },

    #[error("no usable seed found after {samples} samples")]
    SeedSearchFailed { samples: usize },

    #[error("satellite orbit of period {period} not found for tracked orbit {orbit}")]
    SatelliteNotFound { orbit: usize, period: usize },

    #[error("attracting orbit {orbit} did not persist under the perturbation search")]
    PersistenceLost { orbit: usize },
}

impl Error {
    /// Short stable label, used in failure taxonomies and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DegreeCapExceeded { .. } => "degree_cap_exceeded",
            Error::NoConvergence { .. } => "no_convergence",
            Error::DerivativeVanished { .. } => "derivative_vanished",
            Error::ConvergenceStall { .. } => "convergence_stall",
            Error::Escaped { .. } => "escaped",
            Error::AmbiguousGrouping { .. } => "ambiguous_grouping",
            Error::InsufficientOrbits { .. } => "insufficient_orbits",
            Error::MultipleOrbitOnly { .. } => "multiple_orbit_only",
            Error::InvalidConfig(_) => "invalid_config",
            Error::ParabolicObstruction { .. } => "parabolic_obstruction",
            Error::UnitMultiplier { .. } => "unit_multiplier",
            Error::AllTrialsFailed { .. } => "all_trials_failed",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::SingularJacobian { .. } => "singular_jacobian",
            Error::MaxIterExceeded { .. } => "max_iter_exceeded",
            Error::OrbitLost { .. } => "orbit_lost",
            Error::Stalled { .. } => "stalled",
            Error::ParabolicHit { .. } => "parabolic_hit",
            Error::SeedSearchFailed { .. } => "seed_search_failed",
            Error::SatelliteNotFound { .. } => "satellite_not_found",
            Error::PersistenceLost { .. } => "persistence_lost",
        }
    }
}
