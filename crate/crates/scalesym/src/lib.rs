//! Numerical toolkit for scaling symmetries of classical mechanical
//! systems with homogeneous potentials.

// Parameter validation deliberately uses negated comparisons such as
// `!(x > 0.0)` so that NaN inputs fail the check instead of slipping
// through an `x <= 0.0` test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bargmann;
pub mod charge;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod integrate;
mod ode;
pub mod scaling;
pub mod scenario;
pub mod virial;

pub use bargmann::{
    chrono_projective_check, geodesic_residual, homothety_charge, homothety_map_worldline,
    lie_derivative_metric, lie_derivative_metric_fd, lift_trajectory, metric_contract,
    null_residual, upstairs_geodesic, upstairs_null_geodesic, worldline_charge, worldline_to_csv,
    write_worldline_csv, BargmannMetric, BargmannWorldline, ChronoProjective, ConformalVector,
    Event, LieDerivative, PPWaveProfile, ProfileFn, Tangent, VectorFieldFn, VectorJacobianFn,
    WorldlineSample,
};
pub use charge::{
    charge_drift_report, free_dilation_charge, kv_split_charge, noether_charge_series,
    ChargeDecomposition, ChargeSeries, DriftReport,
};
pub use dynamics::{DynamicalSystem, HomogeneityReport, PhaseState, Potential};
pub use error::{Error, Result};
pub use hamiltonian::{
    flow_consistency_defect, generator_residual, generator_residual_fd, generator_value,
    partial_conservation_check, PhasePoint,
};
pub use integrate::{
    integrate_trajectory, integrate_with_options, IntegrateOptions, PeriodDetection, Sample,
    StepStats, Trajectory,
};
pub use scaling::{
    apply_scaling, eom_residual, solve_exponents, symmetry_residual, BoundaryTerm, ScalingLaw,
};
pub use scenario::{
    builtin_scenario, list_builtin_scenarios, load_scenario, run_scenario, scenario_from_json,
    scenario_from_toml, Check, CheckReport, OutputFormat, RunOptions, Scenario, ScenarioReport,
    BUILTIN_SCENARIOS,
};
pub use virial::{period_averages, virial_check, virial_report, VirialReport};
