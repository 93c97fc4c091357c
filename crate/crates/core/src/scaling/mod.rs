//! Power-law fits and the experiments that measure scaling exponents.

pub mod charlen;
pub mod experiment;
pub mod fit;
pub mod near_critical;

pub use charlen::{characteristic_length, crossing_estimate, CharLength, CharLengthParams, Probe};
pub use experiment::{
    measure_front, measure_fronts, run_front_experiment, run_front_experiment_range, EllRule, ExperimentSpec,
    ExperimentTable, FrontFits, FrontRecord, FrontSummary,
};
pub use fit::{fit_exponent, fit_exponent_weighted, fit_scaling, ExponentFit, FitOptions, ScalingFit};
pub use near_critical::{
    check_near_critical_relations, GateCheck, NearCriticalGates, NearCriticalParams, NearCriticalReport,
};
