//! Config-driven scenario runner tying the toolkit together.
//!
//! A scenario names a system, initial conditions, a scaling law, and a
//! set of verification checks. Running it integrates the trajectory,
//! executes the checks, writes plot-ready artifacts (`trajectory.csv`,
//! `charge.csv`, `worldline.csv`) plus a machine-readable `report.json`,
//! and reports per-check pass/fail results. Scenarios come either from a
//! TOML/JSON config file or from the built-in catalog.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde::Serialize;

use crate::bargmann::{
    chrono_projective_check, geodesic_residual, homothety_charge, homothety_map_worldline,
    lie_derivative_metric, lift_trajectory, null_residual, worldline_to_csv, BargmannMetric,
    BargmannWorldline, ConformalVector, PPWaveProfile,
};
use crate::charge::{charge_drift_report, noether_charge_series};
use crate::dynamics::{DynamicalSystem, PhaseState, Potential};
use crate::error::{Error, Result};
use crate::hamiltonian::{flow_consistency_defect, generator_residual, PhasePoint};
use crate::integrate::{integrate_trajectory, Trajectory, DEFAULT_TOL};
use crate::ode::StepStats;
use crate::scaling::{apply_scaling, eom_residual, solve_exponents, symmetry_residual, ScalingLaw};
use crate::virial::virial_report;

/// Pass thresholds for the scenario checks, pinned here so reports are
/// reproducible across runs and machines.
pub const CHARGE_DRIFT_TOL: f64 = 1e-7;
pub const SYMMETRY_RESIDUAL_TOL: f64 = 1e-9;
pub const MAPPING_EOM_TOL: f64 = 1e-6;
pub const GENERATOR_RESIDUAL_TOL: f64 = 1e-8;
pub const FLOW_DEFECT_TOL: f64 = 1e-6;
pub const VIRIAL_TOL: f64 = 1e-5;
pub const VIRIAL_PERIOD_TOL: f64 = 1e-6;
pub const NULL_RESIDUAL_TOL: f64 = 1e-8;
pub const GEODESIC_RESIDUAL_TOL: f64 = 1e-6;
pub const LIE_DEFECT_TOL: f64 = 1e-9;
pub const HOMOTHETY_DRIFT_TOL: f64 = 1e-8;

/// One verification pipeline a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Conserved-charge drift along the trajectory.
    Charge,
    /// Period-averaged kinetic/potential ratio against `k/2`.
    Virial,
    /// Lagrangian covariance under the finite rescaling, at sampled
    /// states and each configured `lambda`.
    SymmetryResidual,
    /// Mapped trajectories still solve the equations of motion.
    Mapping,
    /// Phase-space generator residual and flow-consistency derivative.
    Generator,
    /// Null lift, geodesic residual, Lie-derivative conformal factor,
    /// and the chrono-projective exponent.
    Bargmann,
    /// Homothety charge of the lift, plus null preservation under the
    /// transverse homothety for degree-2 potentials.
    Homothety,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Charge,
        Check::Virial,
        Check::SymmetryResidual,
        Check::Mapping,
        Check::Generator,
        Check::Bargmann,
        Check::Homothety,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Charge => "charge",
            Check::Virial => "virial",
            Check::SymmetryResidual => "symmetry_residual",
            Check::Mapping => "mapping",
            Check::Generator => "generator",
            Check::Bargmann => "bargmann",
            Check::Homothety => "homothety",
        }
    }

    pub fn from_name(name: &str) -> Result<Check> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown check '{name}'; available: charge, virial, symmetry_residual, \
                     mapping, generator, bargmann, homothety"
                ))
            })
    }
}

/// File format for the tabular artifacts (`report.json` is always JSON).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Result<OutputFormat> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config(format!(
                "unknown output format '{other}'; available: csv, json"
            ))),
        }
    }
}

/// A fully resolved, runnable scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    /// One-line description shown by catalog listings.
    pub summary: String,
    pub system: DynamicalSystem,
    pub ic: PhaseState,
    pub law: ScalingLaw,
    pub t_end: f64,
    pub tol: f64,
    pub checks: Vec<Check>,
    /// Rescaling factors used by the symmetry, mapping, and homothety
    /// checks.
    pub lambda_values: Vec<f64>,
    /// Vertical offset of the lift.
    pub s0: f64,
    /// Optional wave profile the lift is additionally checked against.
    pub profile: Option<PPWaveProfile>,
    /// Default artifact directory (CLI `--out` takes precedence); when
    /// absent, the scenario name is used as a directory.
    pub output_dir: Option<PathBuf>,
}

/// Overrides supplied at invocation time.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub tol: Option<f64>,
    pub format: OutputFormat,
}

/// Result of one check: a stable name, pass flag, and the measured
/// metrics as structured JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub metrics: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawInfo {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialInfo {
    pub kind: String,
    pub degree: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileInfo {
    pub kind: String,
    /// Trace of the profile matrix at the start time; zero marks a
    /// vacuum wave.
    pub trace: f64,
    pub vacuum: bool,
}

/// Outcome of a scenario run, also serialized to `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub pass: bool,
    pub law: LawInfo,
    pub potential: PotentialInfo,
    pub tol: f64,
    pub t_end: f64,
    pub integration: StepStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileInfo>,
    pub checks: Vec<CheckReport>,
    pub output_dir: String,
    /// Artifact file names (relative to `output_dir`), keyed by role.
    pub artifacts: BTreeMap<String, String>,
}

impl ScenarioReport {
    /// Names of the checks that failed.
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.check.as_str())
            .collect()
    }
}

// ---------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------

/// Names of the built-in scenarios, in catalog order.
pub const BUILTIN_SCENARIOS: [&str; 8] = [
    "free-dilation",
    "inverse-square",
    "kepler-rescale",
    "galilei-drop",
    "oscillator-rescale",
    "oscillator-1d-homothety",
    "brdicka-wave",
    "isotropic-ppwave",
];

/// The full built-in catalog, in a fixed order.
pub fn list_builtin_scenarios() -> Vec<Scenario> {
    BUILTIN_SCENARIOS
        .iter()
        .map(|name| builtin_scenario(name).expect("catalog entries are valid"))
        .collect()
}

/// Looks up one built-in scenario by name.
pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    let sc = match name {
        "free-dilation" => Scenario {
            name: name.to_string(),
            summary: "free particle under the degree-0 dilation (a,b,c) = (1,1,1); \
                      the conserved charge reduces to a·q̇ᵀM(q − t q̇)"
                .to_string(),
            system: DynamicalSystem::free(2)?,
            ic: PhaseState::from_slices(0.0, &[1.0, 0.5], &[2.0, -1.0]),
            law: ScalingLaw::new(1.0, 1.0)?,
            t_end: 3.0,
            tol: DEFAULT_TOL,
            checks: vec![
                Check::Charge,
                Check::SymmetryResidual,
                Check::Mapping,
                Check::Generator,
            ],
            lambda_values: vec![2.0, 0.5],
            s0: 0.0,
            profile: None,
            output_dir: None,
        },
        "inverse-square" => Scenario {
            name: name.to_string(),
            summary: "repulsive inverse-square potential with law (1,2,0): c = 0, so the \
                      charge carries no action term"
                .to_string(),
            system: DynamicalSystem::inverse_square(2, 0.8)?,
            ic: PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.3, 1.2]),
            law: solve_exponents(-2.0, 1.0)?,
            t_end: 4.0,
            tol: DEFAULT_TOL,
            checks: vec![
                Check::Charge,
                Check::SymmetryResidual,
                Check::Mapping,
                Check::Generator,
            ],
            lambda_values: vec![2.0],
            s0: 0.0,
            profile: None,
            output_dir: None,
        },
        "kepler-rescale" => Scenario {
            name: name.to_string(),
            summary: "elliptic inverse-distance orbit under the (2,3,1) rescaling: charge \
                      drift, virial ratio ⟨K⟩ = −½⟨V⟩, orbit mapping with the cubed period \
                      law, generator condition, and the null lift"
                .to_string(),
            system: DynamicalSystem::kepler(2, 1.0)?,
            ic: PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.2]),
            law: ScalingLaw::new(2.0, 3.0)?,
            t_end: 15.0,
            tol: DEFAULT_TOL,
            checks: vec![
                Check::Charge,
                Check::Virial,
                Check::SymmetryResidual,
                Check::Mapping,
                Check::Generator,
                Check::Bargmann,
            ],
            lambda_values: vec![2.0],
            s0: 0.3,
            profile: None,
            output_dir: None,
        },
        "galilei-drop" => Scenario {
            name: name.to_string(),
            summary: "uniform-force drop from rest under the (2,1,3) law; the conserved \
                      charge vanishes identically along the fall"
                .to_string(),
            system: DynamicalSystem::linear_force(1, 2.0)?,
            ic: PhaseState::from_slices(0.0, &[0.0], &[0.0]),
            law: ScalingLaw::new(2.0, 1.0)?,
            t_end: 2.0,
            tol: DEFAULT_TOL,
            checks: vec![
                Check::Charge,
                Check::SymmetryResidual,
                Check::Mapping,
                Check::Generator,
            ],
            lambda_values: vec![2.0],
            s0: 0.0,
            profile: None,
            output_dir: None,
        },
        "oscillator-rescale" => Scenario {
            name: name.to_string(),
            summary: "isotropic harmonic oscillator under the homothety (1,0,2); the charge \
                      equals q(0)ᵀMq̇(0) and the virial ratio is one"
                .to_string(),
            system: DynamicalSystem::oscillator(2, 1.0)?,
            ic: PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.0]),
            law: ScalingLaw::new(1.0, 0.0)?,
            t_end: 4.0 * std::f64::consts::PI,
            tol: DEFAULT_TOL,
            checks: vec![
                Check::Charge,
                Check::Virial,
                Check::SymmetryResidual,
                Check::Mapping,
                Check::Generator,
            ],
            lambda_values: vec![1.5],
            s0: 0.0,
            profile: None,
            output_dir: None,
        },
        "oscillator-1d-homothety" => Scenario {
            name: name.to_string(),
            summary: "one-dimensional oscillator lifted to a three-dimensional spacetime; \
                      the transverse homothety (q,s) → (λq, λ²s) maps the null lift to \
                      another null geodesic"
                .to_string(),
            system: DynamicalSystem::oscillator(1, 1.0)?,
            ic: PhaseState::from_slices(0.0, &[1.0], &[0.3]),
            law: ScalingLaw::new(1.0, 0.0)?,
            t_end: 7.0,
            tol: DEFAULT_TOL,
            checks: vec![Check::Charge, Check::Bargmann, Check::Homothety],
            lambda_values: vec![1.3],
            s0: 0.2,
            profile: None,
            output_dir: None,
        },
        "brdicka-wave" => Scenario {
            name: name.to_string(),
            summary: "anti-isotropic vacuum plane wave (traceless profile diag(−Ω², Ω²)): \
                      null lift of the saddle system, cosine/cosh geodesics, and a \
                      vanishing homothety charge from rest data"
                .to_string(),
            system: DynamicalSystem::saddle(1.0)?,
            ic: PhaseState::from_slices(0.0, &[1.0, 1.0], &[0.0, 0.0]),
            law: ScalingLaw::new(1.0, 0.0)?,
            t_end: 3.0,
            tol: 1e-11,
            checks: vec![Check::Charge, Check::Bargmann, Check::Homothety],
            lambda_values: vec![1.3],
            s0: 0.7,
            profile: Some(PPWaveProfile::brdicka(1.0)),
            output_dir: None,
        },
        "isotropic-ppwave" => Scenario {
            name: name.to_string(),
            summary: "isotropic wave profile K = ½Ω²I (trace Ω², not vacuum): downstairs a \
                      repulsive degree-2 potential; the homothety charge vanishes for \
                      orthogonal initial data"
                .to_string(),
            system: DynamicalSystem::unit_mass(
                2,
                Potential::custom_homogeneous(2.0, |q: &DVector<f64>| -0.25 * q.norm_squared()),
            )?,
            ic: PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.0]),
            law: ScalingLaw::new(1.0, 0.0)?,
            t_end: 3.0,
            tol: 1e-11,
            checks: vec![Check::Charge, Check::Bargmann, Check::Homothety],
            lambda_values: vec![1.2],
            s0: 0.0,
            profile: Some(PPWaveProfile::isotropic_oscillator(1.0)),
            output_dir: None,
        },
        other => {
            return Err(Error::config(format!(
                "unknown built-in scenario '{other}'; available: {}",
                BUILTIN_SCENARIOS.join(", ")
            )))
        }
    };
    validate_scenario(&sc)?;
    Ok(sc)
}

// ---------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    name: String,
    t_end: f64,
    tol: Option<f64>,
    checks: Vec<String>,
    lambda_values: Option<Vec<f64>>,
    output_dir: Option<PathBuf>,
    system: SystemConfig,
    ic: IcConfig,
    law: LawConfig,
    bargmann: Option<BargmannConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemConfig {
    potential: String,
    coupling: Option<f64>,
    omega: Option<f64>,
    /// Row-major dim×dim kinetic matrix; identity when omitted.
    mass_matrix: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IcConfig {
    q: Vec<f64>,
    qdot: Vec<f64>,
    t0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawConfig {
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    k: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BargmannConfig {
    s0: Option<f64>,
    profile: Option<String>,
    omega: Option<f64>,
}

/// Loads a scenario from a TOML or JSON config file (format detected by
/// the file extension; anything that is not `.json` is parsed as TOML).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        scenario_from_json(&text)
    } else {
        scenario_from_toml(&text)
    }
}

/// Parses a scenario from TOML text.
pub fn scenario_from_toml(text: &str) -> Result<Scenario> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| {
        if let Some(span) = e.span() {
            let (line, column) = offset_to_line_column(text, span.start);
            Error::config_at(e.message().to_string(), line, column)
        } else {
            Error::config(e.message().to_string())
        }
    })?;
    scenario_from_config(config)
}

/// Parses a scenario from JSON text.
pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let config: ScenarioConfig = serde_json::from_str(text)
        .map_err(|e| Error::config_at(e.to_string(), e.line(), e.column()))?;
    scenario_from_config(config)
}

fn offset_to_line_column(text: &str, offset: usize) -> (usize, usize) {
    let clamped = offset.min(text.len());
    let head = &text[..clamped];
    let line = head.matches('\n').count() + 1;
    let column = clamped - head.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Turns a usage error from a constructor into a config error: the bad
/// value came from the config file, not from API misuse.
fn as_config(err: Error) -> Error {
    match err {
        Error::Usage(msg) => Error::config(msg),
        other => other,
    }
}

fn scenario_from_config(config: ScenarioConfig) -> Result<Scenario> {
    let dim = config.ic.q.len();
    if dim == 0 || config.ic.qdot.len() != dim {
        return Err(Error::config(format!(
            "ic.q and ic.qdot must be non-empty and equally long (got {} and {})",
            dim,
            config.ic.qdot.len()
        )));
    }

    let require = |field: &str, v: Option<f64>| {
        v.ok_or_else(|| {
            Error::config(format!(
                "potential '{}' needs system.{field}",
                config.system.potential
            ))
        })
    };
    let potential = match config.system.potential.as_str() {
        "zero" => Potential::Zero,
        "kepler" => Potential::Kepler {
            alpha: require("coupling", config.system.coupling)?,
        },
        "inverse-square" => Potential::InverseSquare {
            beta: require("coupling", config.system.coupling)?,
        },
        "linear-force" => Potential::LinearForce {
            g: require("coupling", config.system.coupling)?,
        },
        "harmonic-oscillator" => Potential::HarmonicOscillator {
            omega: require("omega", config.system.omega)?,
        },
        "saddle" => Potential::SaddleOscillator {
            omega: require("omega", config.system.omega)?,
        },
        other => {
            return Err(Error::config(format!(
                "unknown potential '{other}'; available: zero, kepler, inverse-square, \
                 linear-force, harmonic-oscillator, saddle"
            )))
        }
    };
    if matches!(potential, Potential::SaddleOscillator { .. }) && dim != 2 {
        return Err(Error::config(
            "the saddle potential is two-dimensional; ic.q must have length 2",
        ));
    }

    let mass = match &config.system.mass_matrix {
        Some(entries) => {
            if entries.len() != dim * dim {
                return Err(Error::config(format!(
                    "mass_matrix needs {}x{} = {} row-major entries, got {}",
                    dim,
                    dim,
                    dim * dim,
                    entries.len()
                )));
            }
            DMatrix::from_row_slice(dim, dim, entries)
        }
        None => DMatrix::identity(dim, dim),
    };
    let system = DynamicalSystem::new(dim, mass, potential).map_err(as_config)?;

    let law = match (config.law.k, config.law.a, config.law.b, config.law.c) {
        (Some(k), Some(a), None, None) => solve_exponents(k, a).map_err(as_config)?,
        (None, Some(a), Some(b), None) => ScalingLaw::new(a, b).map_err(as_config)?,
        (None, Some(a), Some(b), Some(c)) => ScalingLaw::from_parts(a, b, c).map_err(as_config)?,
        _ => {
            return Err(Error::config(
                "law must give either {k, a} (exponents solved from the degree) or \
                 {a, b} (c derived) or {a, b, c}",
            ))
        }
    };

    let mut checks = Vec::new();
    for name in &config.checks {
        let check = Check::from_name(name)?;
        if !checks.contains(&check) {
            checks.push(check);
        }
    }

    let (s0, profile) = match &config.bargmann {
        None => (0.0, None),
        Some(bc) => {
            let profile = match bc.profile.as_deref() {
                None => None,
                Some(kind) => {
                    let omega = bc.omega.ok_or_else(|| {
                        Error::config(format!("wave profile '{kind}' needs bargmann.omega"))
                    })?;
                    Some(match kind {
                        "brdicka" => PPWaveProfile::brdicka(omega),
                        "isotropic-oscillator" => PPWaveProfile::isotropic_oscillator(omega),
                        other => {
                            return Err(Error::config(format!(
                                "unknown wave profile '{other}'; available: brdicka, \
                                 isotropic-oscillator"
                            )))
                        }
                    })
                }
            };
            (bc.s0.unwrap_or(0.0), profile)
        }
    };

    let sc = Scenario {
        name: config.name,
        summary: String::new(),
        system,
        ic: PhaseState::new(
            config.ic.t0.unwrap_or(0.0),
            DVector::from_row_slice(&config.ic.q),
            DVector::from_row_slice(&config.ic.qdot),
        ),
        law,
        t_end: config.t_end,
        tol: config.tol.unwrap_or(DEFAULT_TOL),
        checks,
        lambda_values: config.lambda_values.unwrap_or_else(|| vec![2.0]),
        s0,
        profile,
        output_dir: config.output_dir,
    };
    validate_scenario(&sc)?;
    Ok(sc)
}

fn validate_scenario(sc: &Scenario) -> Result<()> {
    if sc.name.is_empty() || sc.name.contains(['/', '\\']) {
        return Err(Error::config(
            "scenario name must be non-empty and free of path separators",
        ));
    }
    if sc.checks.is_empty() {
        return Err(Error::config("checks must name at least one check"));
    }
    if !(sc.t_end > sc.ic.t) || !sc.t_end.is_finite() {
        return Err(Error::config(format!(
            "t_end = {} must lie beyond the initial time {}",
            sc.t_end, sc.ic.t
        )));
    }
    if !(sc.tol > 0.0) || !sc.tol.is_finite() {
        return Err(Error::config("tol must be positive"));
    }
    if sc
        .lambda_values
        .iter()
        .any(|l| !(*l > 0.0) || !l.is_finite())
    {
        return Err(Error::config("lambda must be positive"));
    }
    if sc.checks.contains(&Check::Virial) && sc.system.homogeneity_degree().is_none() {
        return Err(Error::config(
            "the virial check needs a potential with a known homogeneity degree",
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------

/// Runs a scenario: integrates the trajectory, executes the requested
/// checks, and writes the artifacts into the output directory. The
/// returned report mirrors the written `report.json`.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<ScenarioReport> {
    let tol = opts.tol.unwrap_or(sc.tol);
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| sc.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(&sc.name));
    std::fs::create_dir_all(&out_dir)?;

    let traj = integrate_trajectory(&sc.system, &sc.ic, sc.t_end, tol)?;

    let mut artifacts = BTreeMap::new();
    artifacts.insert(
        "trajectory".to_string(),
        write_table(&out_dir, "trajectory", &traj.to_csv(), opts.format)?,
    );

    // The lift is shared by the bargmann and homothety checks.
    let needs_lift = sc
        .checks
        .iter()
        .any(|c| matches!(c, Check::Bargmann | Check::Homothety));
    let lift: Option<BargmannWorldline> = needs_lift.then(|| lift_trajectory(&traj, sc.s0));

    let mut checks = Vec::with_capacity(sc.checks.len());
    for check in &sc.checks {
        let report = match check {
            Check::Charge => {
                let (report, series_csv) = check_charge(sc, &traj)?;
                artifacts.insert(
                    "charge".to_string(),
                    write_table(&out_dir, "charge", &series_csv, opts.format)?,
                );
                report
            }
            Check::Virial => check_virial(&traj)?,
            Check::SymmetryResidual => check_symmetry(sc, &traj)?,
            Check::Mapping => check_mapping(sc, &traj)?,
            Check::Generator => check_generator(sc, &traj)?,
            Check::Bargmann => check_bargmann(sc, &traj, lift.as_ref().unwrap())?,
            Check::Homothety => check_homothety(sc, &traj, lift.as_ref().unwrap())?,
        };
        checks.push(report);
    }

    if let Some(wl) = &lift {
        let metric = BargmannMetric::from_system(&sc.system);
        let csv = worldline_to_csv(&metric, wl)?;
        artifacts.insert(
            "worldline".to_string(),
            write_table(&out_dir, "worldline", &csv, opts.format)?,
        );
    }
    artifacts.insert("report".to_string(), "report.json".to_string());

    let pass = checks.iter().all(|c| c.pass);
    let report = ScenarioReport {
        name: sc.name.clone(),
        pass,
        law: LawInfo {
            a: sc.law.a(),
            b: sc.law.b(),
            c: sc.law.c(),
        },
        potential: PotentialInfo {
            kind: sc.system.potential().kind_name().to_string(),
            degree: sc.system.homogeneity_degree(),
        },
        tol,
        t_end: sc.t_end,
        integration: traj.stats(),
        profile: sc.profile.as_ref().map(|p| ProfileInfo {
            kind: p.kind_name().to_string(),
            trace: p.trace(sc.ic.t),
            vacuum: p.is_vacuum(sc.ic.t),
        }),
        checks,
        output_dir: out_dir.display().to_string(),
        artifacts,
    };

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::usage(format!("report serialization failed: {e}")))?;
    std::fs::write(out_dir.join("report.json"), json + "\n")?;
    Ok(report)
}

fn write_table(dir: &Path, base: &str, csv: &str, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let file = format!("{base}.csv");
            std::fs::write(dir.join(&file), csv)?;
            Ok(file)
        }
        OutputFormat::Json => {
            let file = format!("{base}.json");
            let value = table_to_json(csv)?;
            let text = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::usage(format!("table serialization failed: {e}")))?;
            std::fs::write(dir.join(&file), text + "\n")?;
            Ok(file)
        }
    }
}

/// Re-shapes CSV text as `{"columns": [...], "rows": [[...]]}`. The CSV
/// cells are full-precision scientific notation, so the round trip
/// through `f64` is exact.
fn table_to_json(csv: &str) -> Result<serde_json::Value> {
    let mut lines = csv.lines();
    let columns: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::usage("cannot convert an empty table"))?
        .split(',')
        .collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
        rows.push(row.map_err(|e| Error::usage(format!("non-numeric table cell: {e}")))?);
    }
    Ok(serde_json::json!({ "columns": columns, "rows": rows }))
}

fn subsample_states(traj: &Trajectory, target: usize) -> Vec<PhaseState> {
    let step = (traj.samples().len() / target).max(1);
    traj.samples()
        .iter()
        .step_by(step)
        .map(|s| s.phase_state())
        .collect()
}

fn check_charge(sc: &Scenario, traj: &Trajectory) -> Result<(CheckReport, String)> {
    let series = noether_charge_series(&sc.system, &sc.law, traj)?;
    let drift = charge_drift_report(&series)?;
    let pass = drift.drift_rel <= CHARGE_DRIFT_TOL;
    let report = CheckReport {
        check: Check::Charge.name().to_string(),
        pass,
        metrics: serde_json::json!({
            "initial_value": series.initial_value(),
            "drift_abs": drift.drift_abs,
            "drift_rel": drift.drift_rel,
            "worst_t": drift.worst_t,
            "threshold": CHARGE_DRIFT_TOL,
        }),
    };
    Ok((report, series.to_csv()))
}

fn check_virial(traj: &Trajectory) -> Result<CheckReport> {
    let report = virial_report(traj, VIRIAL_PERIOD_TOL, VIRIAL_TOL)?;
    let pass = report.pass;
    let metrics = serde_json::to_value(report)
        .map_err(|e| Error::usage(format!("virial serialization failed: {e}")))?;
    Ok(CheckReport {
        check: Check::Virial.name().to_string(),
        pass,
        metrics,
    })
}

fn check_symmetry(sc: &Scenario, traj: &Trajectory) -> Result<CheckReport> {
    let states = subsample_states(traj, 32);
    let mut worst = 0.0f64;
    for &lambda in &sc.lambda_values {
        worst = worst.max(symmetry_residual(&sc.system, &sc.law, lambda, &states)?);
    }
    Ok(CheckReport {
        check: Check::SymmetryResidual.name().to_string(),
        pass: worst <= SYMMETRY_RESIDUAL_TOL,
        metrics: serde_json::json!({
            "worst_residual": worst,
            "lambda_values": sc.lambda_values,
            "threshold": SYMMETRY_RESIDUAL_TOL,
        }),
    })
}

fn check_mapping(sc: &Scenario, traj: &Trajectory) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for &lambda in &sc.lambda_values {
        let mapped = apply_scaling(traj, &sc.law, lambda)?;
        worst = worst.max(eom_residual(&sc.system, &mapped)?);
    }
    Ok(CheckReport {
        check: Check::Mapping.name().to_string(),
        pass: worst <= MAPPING_EOM_TOL,
        metrics: serde_json::json!({
            "worst_eom_residual": worst,
            "lambda_values": sc.lambda_values,
            "threshold": MAPPING_EOM_TOL,
        }),
    })
}

fn check_generator(sc: &Scenario, traj: &Trajectory) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for state in subsample_states(traj, 64) {
        let pt = PhasePoint::from_state(&sc.system, &state);
        worst = worst.max(generator_residual(&sc.system, &sc.law, &pt)?);
    }
    let flow = flow_consistency_defect(&sc.system, &sc.law, traj)?;
    Ok(CheckReport {
        check: Check::Generator.name().to_string(),
        pass: worst <= GENERATOR_RESIDUAL_TOL && flow <= FLOW_DEFECT_TOL,
        metrics: serde_json::json!({
            "worst_residual": worst,
            "flow_defect": flow,
            "residual_threshold": GENERATOR_RESIDUAL_TOL,
            "flow_threshold": FLOW_DEFECT_TOL,
        }),
    })
}

fn check_bargmann(sc: &Scenario, _traj: &Trajectory, wl: &BargmannWorldline) -> Result<CheckReport> {
    let metric = BargmannMetric::from_system(&sc.system);
    let null_res = null_residual(&metric, wl)?;
    let geodesic = geodesic_residual(&metric, wl)?;

    let y = ConformalVector::scaling(sc.law.a(), sc.law.b())?;
    let mid = &wl.samples()[wl.samples().len() / 2];
    let lie = lie_derivative_metric(&metric, &y, &mid.event())?;
    let psi = chrono_projective_check(&y, sc.system.dim()).psi();

    let expected_two_chi = 2.0 * sc.law.a();
    let expected_psi = sc.law.b() - 2.0 * sc.law.a();
    let mut pass = null_res <= NULL_RESIDUAL_TOL
        && geodesic <= GEODESIC_RESIDUAL_TOL
        && lie.defect <= LIE_DEFECT_TOL
        && (lie.two_chi - expected_two_chi).abs() <= LIE_DEFECT_TOL
        && psi.is_some_and(|p| (p - expected_psi).abs() <= LIE_DEFECT_TOL);

    let mut metrics = serde_json::json!({
        "null_residual": null_res,
        "geodesic_residual": geodesic,
        "lie": {
            "two_chi": lie.two_chi,
            "psi": psi,
            "defect": lie.defect,
        },
        "expected_two_chi": expected_two_chi,
        "expected_psi": expected_psi,
    });
    if let Some(profile) = &sc.profile {
        let wave = BargmannMetric::from_profile(profile.clone());
        let wave_null = null_residual(&wave, wl)?;
        pass = pass && wave_null <= NULL_RESIDUAL_TOL;
        metrics["profile"] = serde_json::json!({
            "kind": profile.kind_name(),
            "trace": profile.trace(sc.ic.t),
            "vacuum": profile.is_vacuum(sc.ic.t),
            "null_residual": wave_null,
        });
    }
    Ok(CheckReport {
        check: Check::Bargmann.name().to_string(),
        pass,
        metrics,
    })
}

fn check_homothety(sc: &Scenario, traj: &Trajectory, wl: &BargmannWorldline) -> Result<CheckReport> {
    let series = homothety_charge(wl, traj)?;
    let drift = series.drift_abs();
    let mut pass = drift <= HOMOTHETY_DRIFT_TOL;

    // For degree-2 potentials the transverse homothety maps null
    // geodesics to null geodesics; verify on the mapped worldlines.
    let quadratic = sc
        .system
        .homogeneity_degree()
        .is_some_and(|k| (k - 2.0).abs() < 1e-12);
    let mut mapped_null = None;
    let mut mapped_geodesic = None;
    if quadratic {
        let metric = BargmannMetric::from_system(&sc.system);
        let mut worst_null = 0.0f64;
        let mut worst_geo = 0.0f64;
        for &lambda in &sc.lambda_values {
            let mapped = homothety_map_worldline(wl, lambda)?;
            // The map multiplies the null defect by exactly λ² and the
            // equation-of-motion defect by exactly λ, so normalize the
            // mapped residuals before comparing against the base
            // thresholds: anything beyond that factor is a map error.
            worst_null = worst_null.max(null_residual(&metric, &mapped)? / (lambda * lambda));
            worst_geo = worst_geo.max(geodesic_residual(&metric, &mapped)? / lambda);
        }
        pass = pass && worst_null <= NULL_RESIDUAL_TOL && worst_geo <= GEODESIC_RESIDUAL_TOL;
        mapped_null = Some(worst_null);
        mapped_geodesic = Some(worst_geo);
    }
    Ok(CheckReport {
        check: Check::Homothety.name().to_string(),
        pass,
        metrics: serde_json::json!({
            "initial_value": series.initial_value(),
            "drift_abs": drift,
            "threshold": HOMOTHETY_DRIFT_TOL,
            "mapped_null_residual": mapped_null,
            "mapped_geodesic_residual": mapped_geodesic,
            "lambda_values": sc.lambda_values,
        }),
    })
}
