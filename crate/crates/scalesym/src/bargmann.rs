//! Null lifts of classical trajectories to (n+2)-dimensional Bargmann
//! (pp-wave) spacetimes and the geometric verifications that live there.
//!
//! A system with kinetic matrix `M` and potential `V(q)` lifts to the
//! Lorentzian metric
//!
//! ```text
//! g = dqᵀ M dq + 2 dt ds − 2 V(q) dt²
//! ```
//!
//! on coordinates `x = (t, q¹..qⁿ, s)`. Plane gravitational waves use the
//! Brinkmann form with `g_tt = K_ij(t) q^i q^j` instead of `−2V`. A
//! trajectory `q(t)` with accumulated action `S(t)` lifts to the curve
//! `x(t) = (t, q(t), s0 − S(t))`, whose tangent `(1, q̇, −L)` is exactly
//! null. The module verifies that picture numerically: null residuals,
//! geodesic residuals of lifted and directly integrated worldlines,
//! Lie-derivative conformal checks for scaling vector fields, the
//! chrono-projective condition on the vertical direction `ξ = ∂_s`, and
//! the homothety charge evaluated both downstairs and upstairs.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::charge::ChargeSeries;
use crate::dynamics::{DynamicalSystem, Potential, SINGULARITY_RADIUS};
use crate::error::{Error, Result};
use crate::integrate::{build_samples, format_float, Trajectory, DEFAULT_DENSE_POINTS};
use crate::ode::{self, OdeOptions, OdeSolution};

/// Central-difference step for profile time derivatives, metric
/// coordinate partials, and vector-field Jacobians when no analytic form
/// is available.
pub const FD_STEP: f64 = 1e-5;

/// A profile trace below this threshold counts as vacuum (Ricci-flat
/// pp-wave).
pub const VACUUM_TRACE_TOL: f64 = 1e-12;

/// Initial tangents for null geodesic runs must satisfy
/// `|g(u,u)| ≤ NULL_IC_TOL` after normalizing to unit `ṫ`.
pub const NULL_IC_TOL: f64 = 1e-10;

/// Stencil spacing for the geodesic residual, as a fraction of the
/// integrated span. Matches the downstairs equation-of-motion residual.
const GEODESIC_STENCIL_FRACTION: f64 = 1.0 / 512.0;

/// Component spread allowed when deciding whether a commutator with
/// `∂_s` is a constant multiple of `∂_s`.
const CHRONO_TOL: f64 = 1e-9;

/// Scalar amplitude of time, used by wave profiles with callable
/// polarization amplitudes.
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Vector-field components `(Y^t, Y^1..Y^n, Y^s)` at an event.
pub type VectorFieldFn = Arc<dyn Fn(&Event) -> DVector<f64> + Send + Sync>;

/// Jacobian `J[α, ν] = ∂Y^α/∂x^ν` at an event.
pub type VectorJacobianFn = Arc<dyn Fn(&Event) -> DMatrix<f64> + Send + Sync>;

/// A point of the lifted spacetime: coordinates `(t, q, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub q: DVector<f64>,
    pub s: f64,
}

impl Event {
    pub fn new(t: f64, q: DVector<f64>, s: f64) -> Self {
        Event { t, q, s }
    }

    pub fn from_slices(t: f64, q: &[f64], s: f64) -> Self {
        Event {
            t,
            q: DVector::from_row_slice(q),
            s,
        }
    }

    fn shifted(&self, alpha: usize, delta: f64) -> Event {
        let mut ev = self.clone();
        let n = self.q.len();
        if alpha == 0 {
            ev.t += delta;
        } else if alpha <= n {
            ev.q[alpha - 1] += delta;
        } else {
            ev.s += delta;
        }
        ev
    }
}

/// A tangent vector `(ṫ, q̇, ṡ)` at an event.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub dt: f64,
    pub dq: DVector<f64>,
    pub ds: f64,
}

impl Tangent {
    pub fn new(dt: f64, dq: DVector<f64>, ds: f64) -> Self {
        Tangent { dt, dq, ds }
    }

    pub fn from_slices(dt: f64, dq: &[f64], ds: f64) -> Self {
        Tangent {
            dt,
            dq: DVector::from_row_slice(dq),
            ds,
        }
    }

    /// The covariantly constant vertical vector `ξ = ∂_s`.
    pub fn vertical(n: usize) -> Self {
        Tangent {
            dt: 0.0,
            dq: DVector::zeros(n),
            ds: 1.0,
        }
    }
}

/// Quadratic wave profile `K_ij(t)` of a plane gravitational wave in
/// Brinkmann coordinates (`g_tt = K_ij(t) q^i q^j`, transverse dimension
/// fixed to two).
#[derive(Clone)]
pub enum PPWaveProfile {
    /// Constant anti-isotropic profile `K = diag(−Ω², +Ω²)`: traceless,
    /// hence a vacuum wave. Geodesics oscillate in the first transverse
    /// direction and grow hyperbolically in the second.
    Brdicka { omega: f64 },
    /// Isotropic profile `K = ½Ω² I` (so `K_ij q^i q^j = ½Ω²|q|²`): trace
    /// `Ω²`, a pp-wave but not a vacuum solution.
    IsotropicOscillator { omega: f64 },
    /// General linearly polarized profile with plus/cross amplitude
    /// callables:
    /// `K = ½ [[−𝒜₊, −𝒜ₓ], [−𝒜ₓ, +𝒜₊]]`, so that constant amplitudes
    /// `𝒜₊ = 2Ω², 𝒜ₓ = 0` reproduce the anti-isotropic vacuum wave.
    Polarized {
        a_plus: ProfileFn,
        a_cross: ProfileFn,
    },
}

impl fmt::Debug for PPWaveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PPWaveProfile::Brdicka { omega } => {
                f.debug_struct("Brdicka").field("omega", omega).finish()
            }
            PPWaveProfile::IsotropicOscillator { omega } => f
                .debug_struct("IsotropicOscillator")
                .field("omega", omega)
                .finish(),
            PPWaveProfile::Polarized { .. } => f
                .debug_struct("Polarized")
                .field("a_plus", &"<callable>")
                .field("a_cross", &"<callable>")
                .finish(),
        }
    }
}

impl PPWaveProfile {
    pub fn brdicka(omega: f64) -> Self {
        PPWaveProfile::Brdicka { omega }
    }

    pub fn isotropic_oscillator(omega: f64) -> Self {
        PPWaveProfile::IsotropicOscillator { omega }
    }

    pub fn polarized(a_plus: ProfileFn, a_cross: ProfileFn) -> Self {
        PPWaveProfile::Polarized { a_plus, a_cross }
    }

    /// The symmetric 2×2 profile matrix `K(t)`.
    pub fn k_matrix(&self, t: f64) -> DMatrix<f64> {
        match self {
            PPWaveProfile::Brdicka { omega } => {
                let w2 = omega * omega;
                DMatrix::from_row_slice(2, 2, &[-w2, 0.0, 0.0, w2])
            }
            PPWaveProfile::IsotropicOscillator { omega } => {
                let half_w2 = 0.5 * omega * omega;
                DMatrix::from_row_slice(2, 2, &[half_w2, 0.0, 0.0, half_w2])
            }
            PPWaveProfile::Polarized { a_plus, a_cross } => {
                let ap = a_plus(t);
                let ax = a_cross(t);
                DMatrix::from_row_slice(2, 2, &[-0.5 * ap, -0.5 * ax, -0.5 * ax, 0.5 * ap])
            }
        }
    }

    /// Time derivative `K'(t)`: exactly zero for the constant built-ins,
    /// central finite differences on the amplitude callables otherwise.
    pub fn k_matrix_dt(&self, t: f64) -> DMatrix<f64> {
        match self {
            PPWaveProfile::Brdicka { .. } | PPWaveProfile::IsotropicOscillator { .. } => {
                DMatrix::zeros(2, 2)
            }
            PPWaveProfile::Polarized { a_plus, a_cross } => {
                let dp = (a_plus(t + FD_STEP) - a_plus(t - FD_STEP)) / (2.0 * FD_STEP);
                let dx = (a_cross(t + FD_STEP) - a_cross(t - FD_STEP)) / (2.0 * FD_STEP);
                DMatrix::from_row_slice(2, 2, &[-0.5 * dp, -0.5 * dx, -0.5 * dx, 0.5 * dp])
            }
        }
    }

    /// Trace of `K(t)`; its vanishing marks a vacuum (Ricci-flat) wave.
    pub fn trace(&self, t: f64) -> f64 {
        self.k_matrix(t).trace()
    }

    /// Whether the profile is a vacuum wave at time `t`
    /// (`|trace K| ≤ VACUUM_TRACE_TOL`).
    pub fn is_vacuum(&self, t: f64) -> bool {
        self.trace(t).abs() <= VACUUM_TRACE_TOL
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PPWaveProfile::Brdicka { .. } => "brdicka",
            PPWaveProfile::IsotropicOscillator { .. } => "isotropic-oscillator",
            PPWaveProfile::Polarized { .. } => "polarized",
        }
    }
}

/// Where the `dt²` coefficient of the metric comes from.
#[derive(Debug, Clone)]
enum MetricSource {
    /// `g_tt = −2V(q)` from a mechanical potential.
    Potential(Potential),
    /// `g_tt = K_ij(t) q^i q^j` from a wave profile.
    Profile(PPWaveProfile),
}

/// The lifted spacetime metric
/// `g = dqᵀ M dq + 2 dt ds + g_tt dt²` on coordinates `(t, q, s)`.
///
/// The coordinate ordering used by matrices and partials is index `0`
/// for `t`, `1..=n` for the transverse block, `n+1` for `s`. The vertical
/// vector `ξ = ∂_s` is null and the metric never depends on `s`, so
/// `g(·, ξ)` reads off the conserved vertical momentum `P_s = ṫ`.
#[derive(Debug, Clone)]
pub struct BargmannMetric {
    n: usize,
    mass: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
    source: MetricSource,
}

impl BargmannMetric {
    /// Lifts a mechanical system: transverse block = its mass matrix,
    /// `g_tt = −2V(q)`.
    pub fn from_system(sys: &DynamicalSystem) -> Self {
        BargmannMetric {
            n: sys.dim(),
            mass: sys.mass_matrix().clone(),
            mass_inv: sys.mass_inverse().clone(),
            source: MetricSource::Potential(sys.potential().clone()),
        }
    }

    /// A plane-wave metric in Brinkmann coordinates: unit transverse
    /// block, `g_tt = K_ij(t) q^i q^j`.
    pub fn from_profile(profile: PPWaveProfile) -> Self {
        BargmannMetric {
            n: 2,
            mass: DMatrix::identity(2, 2),
            mass_inv: DMatrix::identity(2, 2),
            source: MetricSource::Profile(profile),
        }
    }

    /// Transverse dimension `n`; the spacetime dimension is `n + 2`.
    pub fn transverse_dim(&self) -> usize {
        self.n
    }

    pub fn mass_matrix(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// The wave profile, when the metric was built from one.
    pub fn profile(&self) -> Option<&PPWaveProfile> {
        match &self.source {
            MetricSource::Profile(p) => Some(p),
            MetricSource::Potential(_) => None,
        }
    }

    /// The mechanical potential, when the metric was built from one.
    pub fn potential(&self) -> Option<&Potential> {
        match &self.source {
            MetricSource::Potential(pot) => Some(pot),
            MetricSource::Profile(_) => None,
        }
    }

    fn check_event(&self, event: &Event) -> Result<()> {
        if event.q.len() != self.n {
            return Err(Error::usage(format!(
                "event has {} transverse coordinates, metric expects {}",
                event.q.len(),
                self.n
            )));
        }
        if let MetricSource::Potential(pot) = &self.source {
            if pot.singular_at_origin() && event.q.norm() < SINGULARITY_RADIUS {
                return Err(Error::domain(format!(
                    "event within {SINGULARITY_RADIUS:e} of the singular origin of a {} potential",
                    pot.kind_name()
                )));
            }
        }
        Ok(())
    }

    fn check_tangent(&self, u: &Tangent) -> Result<()> {
        if u.dq.len() != self.n {
            return Err(Error::usage(format!(
                "tangent has {} transverse components, metric expects {}",
                u.dq.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `g_tt` without the singularity guard, for integrator right-hand
    /// sides that must not fail mid-step.
    fn g_tt_raw(&self, t: f64, q: &DVector<f64>) -> f64 {
        match &self.source {
            MetricSource::Potential(pot) => -2.0 * pot.value_raw(q),
            MetricSource::Profile(p) => {
                let k = p.k_matrix(t);
                (q.transpose() * k * q)[(0, 0)]
            }
        }
    }

    fn g_tt_grad_raw(&self, t: f64, q: &DVector<f64>) -> DVector<f64> {
        match &self.source {
            MetricSource::Potential(pot) => -2.0 * pot.gradient_raw(q),
            MetricSource::Profile(p) => 2.0 * (p.k_matrix(t) * q),
        }
    }

    fn g_tt_dt_raw(&self, t: f64, q: &DVector<f64>) -> f64 {
        match &self.source {
            MetricSource::Potential(_) => 0.0,
            MetricSource::Profile(p) => {
                let kdot = p.k_matrix_dt(t);
                (q.transpose() * kdot * q)[(0, 0)]
            }
        }
    }

    /// `g_tt` at an event (domain-checked).
    pub fn g_tt(&self, event: &Event) -> Result<f64> {
        self.check_event(event)?;
        Ok(self.g_tt_raw(event.t, &event.q))
    }

    /// The full (n+2)×(n+2) metric matrix at an event.
    pub fn metric_matrix(&self, event: &Event) -> Result<DMatrix<f64>> {
        self.check_event(event)?;
        let n = self.n;
        let mut g = DMatrix::zeros(n + 2, n + 2);
        g[(0, 0)] = self.g_tt_raw(event.t, &event.q);
        g[(0, n + 1)] = 1.0;
        g[(n + 1, 0)] = 1.0;
        g.view_mut((1, 1), (n, n)).copy_from(&self.mass);
        Ok(g)
    }

    /// Coordinate partials `∂_α g` for `α = t, q¹..qⁿ, s`, as a vector of
    /// matrices in coordinate order. Only the `g_tt` entry ever varies,
    /// and the `s`-partial is identically zero — the analytic statement
    /// that `ξ = ∂_s` is covariantly constant.
    pub fn metric_matrix_partials(&self, event: &Event) -> Result<Vec<DMatrix<f64>>> {
        self.check_event(event)?;
        let n = self.n;
        let mut partials = vec![DMatrix::zeros(n + 2, n + 2); n + 2];
        partials[0][(0, 0)] = self.g_tt_dt_raw(event.t, &event.q);
        let grad = self.g_tt_grad_raw(event.t, &event.q);
        for i in 0..n {
            partials[1 + i][(0, 0)] = grad[i];
        }
        Ok(partials)
    }
}

/// Evaluates the bilinear form `g(u, v)` at an event:
/// `u_qᵀ M v_q + u_t v_s + u_s v_t + g_tt u_t v_t`.
pub fn metric_contract(
    metric: &BargmannMetric,
    event: &Event,
    u: &Tangent,
    v: &Tangent,
) -> Result<f64> {
    metric.check_event(event)?;
    metric.check_tangent(u)?;
    metric.check_tangent(v)?;
    let transverse = (u.dq.transpose() * &metric.mass * &v.dq)[(0, 0)];
    let g_tt = metric.g_tt_raw(event.t, &event.q);
    Ok(transverse + u.dt * v.ds + u.ds * v.dt + g_tt * u.dt * v.dt)
}

/// One sample of a worldline parametrized by `t` (so `ṫ = 1`).
#[derive(Debug, Clone)]
pub struct WorldlineSample {
    pub t: f64,
    pub q: DVector<f64>,
    pub s: f64,
    pub qdot: DVector<f64>,
    pub sdot: f64,
}

impl WorldlineSample {
    pub fn event(&self) -> Event {
        Event::new(self.t, self.q.clone(), self.s)
    }

    /// Tangent with respect to the curve parameter `t` (`ṫ = 1`).
    pub fn tangent(&self) -> Tangent {
        Tangent::new(1.0, self.qdot.clone(), self.sdot)
    }
}

/// A curve `t ↦ (t, q(t), s(t))` in the lifted spacetime, parametrized
/// by `t` so the vertical momentum `P_s = g(ẋ, ξ) = ṫ = 1` holds exactly
/// on every sample.
#[derive(Debug, Clone)]
pub struct BargmannWorldline {
    samples: Vec<WorldlineSample>,
    /// Continuous extension of the state `[q, q̇, s]`, when the worldline
    /// came out of an integration (lift or upstairs geodesic).
    pub(crate) solution: Option<OdeSolution>,
}

impl BargmannWorldline {
    /// Builds a worldline from explicit samples (no continuous
    /// extension, so residuals needing one are unavailable).
    pub fn from_samples(samples: Vec<WorldlineSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::usage("worldline needs at least one sample"));
        }
        let n = samples[0].q.len();
        for w in &samples {
            if w.q.len() != n || w.qdot.len() != n {
                return Err(Error::usage(
                    "all worldline samples must share one transverse dimension",
                ));
            }
        }
        if samples.windows(2).any(|p| p[1].t <= p[0].t) {
            return Err(Error::usage(
                "worldline sample times must be strictly increasing",
            ));
        }
        Ok(BargmannWorldline {
            samples,
            solution: None,
        })
    }

    pub fn samples(&self) -> &[WorldlineSample] {
        &self.samples
    }

    pub fn transverse_dim(&self) -> usize {
        self.samples[0].q.len()
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }
}

/// Lifts a trajectory to the worldline `x(t) = (t, q(t), s0 − S(t))`
/// with tangent `(1, q̇, −L)`. The lift of a solution is an exactly null
/// geodesic of the corresponding metric.
pub fn lift_trajectory(traj: &Trajectory, s0: f64) -> BargmannWorldline {
    let sys = traj.system();
    let samples = traj
        .samples()
        .iter()
        .map(|smp| {
            let lagrangian =
                sys.kinetic_energy(&smp.qdot) - sys.potential().value_raw(&smp.q);
            WorldlineSample {
                t: smp.t,
                q: smp.q.clone(),
                s: s0 - smp.action,
                qdot: smp.qdot.clone(),
                sdot: -lagrangian,
            }
        })
        .collect();

    // State layout downstairs is [q, q̇, S]; upstairs it is [q, q̇, s]
    // with s = s0 − S, an exact affine map of the continuous extension.
    let n = traj.system().dim();
    let mut scales = DVector::from_element(2 * n + 1, 1.0);
    scales[2 * n] = -1.0;
    let mut offsets = DVector::zeros(2 * n + 1);
    offsets[2 * n] = s0;
    let solution = traj.solution().affine_transformed(1.0, &scales, &offsets);

    BargmannWorldline {
        samples,
        solution: Some(solution),
    }
}

/// Maximum of `|g(ẋ, ẋ)|` over the worldline samples; vanishes (to
/// rounding) on lifts of solutions and on null geodesics.
pub fn null_residual(metric: &BargmannMetric, wl: &BargmannWorldline) -> Result<f64> {
    let mut worst = 0.0f64;
    for w in wl.samples() {
        let value = metric_contract(metric, &w.event(), &w.tangent(), &w.tangent())?;
        worst = worst.max(value.abs());
    }
    Ok(worst)
}

/// Applies the transverse homothety `(t, q, s) ↦ (t, λq, λ²s)` to a
/// worldline, scaling velocities accordingly. For metrics whose `g_tt`
/// is quadratic in `q` (degree-2 potentials and wave profiles) this maps
/// null geodesics to null geodesics.
pub fn homothety_map_worldline(wl: &BargmannWorldline, lambda: f64) -> Result<BargmannWorldline> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::usage("lambda must be positive"));
    }
    let l2 = lambda * lambda;
    let samples = wl
        .samples()
        .iter()
        .map(|w| WorldlineSample {
            t: w.t,
            q: lambda * &w.q,
            s: l2 * w.s,
            qdot: lambda * &w.qdot,
            sdot: l2 * w.sdot,
        })
        .collect();
    let solution = wl.solution.as_ref().map(|sol| {
        let n = wl.transverse_dim();
        let mut scales = DVector::from_element(2 * n + 1, lambda);
        scales[2 * n] = l2;
        sol.affine_scaled(1.0, &scales)
    });
    Ok(BargmannWorldline { samples, solution })
}

/// Integrates the geodesic equations of the lifted metric, parametrized
/// by `t` (the conserved vertical momentum is normalized to `ṫ = 1`):
///
/// ```text
/// M q̈ = ½ ∇_q g_tt        (= −∇V downstairs, = K(t) q for unit-mass profiles)
/// ṡ   = ½ (C − q̇ᵀ M q̇ − g_tt)
/// ```
///
/// where `C = g(u, u)/ṫ²` is the conserved level of the initial tangent,
/// so the worldline stays on its level set exactly at every sample. The
/// initial tangent must have `ṫ ≠ 0`; it is rescaled to `ṫ = 1`.
pub fn upstairs_geodesic(
    metric: &BargmannMetric,
    event: &Event,
    tangent: &Tangent,
    t_end: f64,
    tol: f64,
) -> Result<BargmannWorldline> {
    metric.check_event(event)?;
    metric.check_tangent(tangent)?;
    if tangent.dt == 0.0 || !tangent.dt.is_finite() {
        return Err(Error::usage(
            "worldlines are parametrized by t, so the initial tangent needs ṫ ≠ 0",
        ));
    }
    let u = Tangent::new(
        1.0,
        &tangent.dq / tangent.dt,
        tangent.ds / tangent.dt,
    );
    let level = metric_contract(metric, event, &u, &u)?;
    integrate_geodesic(metric, event, &u, level, t_end, tol)
}

/// Like [`upstairs_geodesic`] but requires the initial tangent to be
/// null (`|g(u,u)| ≤ NULL_IC_TOL` after `ṫ`-normalization) and then
/// pins the conserved level to exactly zero.
pub fn upstairs_null_geodesic(
    metric: &BargmannMetric,
    event: &Event,
    tangent: &Tangent,
    t_end: f64,
    tol: f64,
) -> Result<BargmannWorldline> {
    metric.check_event(event)?;
    metric.check_tangent(tangent)?;
    if tangent.dt == 0.0 || !tangent.dt.is_finite() {
        return Err(Error::usage(
            "worldlines are parametrized by t, so the initial tangent needs ṫ ≠ 0",
        ));
    }
    let u = Tangent::new(
        1.0,
        &tangent.dq / tangent.dt,
        tangent.ds / tangent.dt,
    );
    let level = metric_contract(metric, event, &u, &u)?;
    if level.abs() > NULL_IC_TOL {
        return Err(Error::usage(format!(
            "initial tangent is not null: g(u,u) = {level:e} exceeds {NULL_IC_TOL:e}"
        )));
    }
    integrate_geodesic(metric, event, &u, 0.0, t_end, tol)
}

fn integrate_geodesic(
    metric: &BargmannMetric,
    event: &Event,
    u: &Tangent,
    level: f64,
    t_end: f64,
    tol: f64,
) -> Result<BargmannWorldline> {
    let n = metric.n;
    let mut y0 = DVector::zeros(2 * n + 1);
    y0.rows_mut(0, n).copy_from(&event.q);
    y0.rows_mut(n, n).copy_from(&u.dq);
    y0[2 * n] = event.s;

    let m = metric.clone();
    let mut grad = DVector::zeros(n);
    let rhs = move |t: f64, y: &DVector<f64>, dy: &mut DVector<f64>| {
        let q = y.rows(0, n).clone_owned();
        let qdot = y.rows(n, n).clone_owned();
        grad.copy_from(&m.g_tt_grad_raw(t, &q));
        let accel = 0.5 * (&m.mass_inv * &grad);
        dy.rows_mut(0, n).copy_from(&qdot);
        dy.rows_mut(n, n).copy_from(&accel);
        let kinetic_form = (qdot.transpose() * &m.mass * &qdot)[(0, 0)];
        dy[2 * n] = 0.5 * (level - kinetic_form - m.g_tt_raw(t, &q));
    };

    let opts = OdeOptions {
        tol,
        max_steps: 2_000_000,
        h_max: None,
    };
    let solution = ode::solve(rhs, event.t, y0, t_end, &opts)?;
    let samples = build_samples(&solution, n, DEFAULT_DENSE_POINTS)
        .into_iter()
        .map(|smp| {
            // Recompute ṡ from the conserved level so every stored sample
            // satisfies g(ẋ,ẋ) = level to rounding.
            let kinetic_form = (smp.qdot.transpose() * &metric.mass * &smp.qdot)[(0, 0)];
            let sdot = 0.5 * (level - kinetic_form - metric.g_tt_raw(smp.t, &smp.q));
            WorldlineSample {
                t: smp.t,
                q: smp.q,
                s: smp.action,
                qdot: smp.qdot,
                sdot,
            }
        })
        .collect();
    Ok(BargmannWorldline {
        samples,
        solution: Some(solution),
    })
}

/// Certifies that a worldline's transverse part solves the geodesic
/// equation `M q̈ = ½ ∇_q g_tt`, by comparing a five-point
/// finite-difference second derivative of the continuous extension
/// against the model acceleration. Returns the worst max-norm mismatch.
pub fn geodesic_residual(metric: &BargmannMetric, wl: &BargmannWorldline) -> Result<f64> {
    let solution = wl.solution.as_ref().ok_or_else(|| {
        Error::usage(
            "geodesic residuals need a continuous extension; build the worldline by \
             lifting a trajectory or integrating upstairs",
        )
    })?;
    let n = wl.transverse_dim();
    let span = solution.span();
    let h = span * GEODESIC_STENCIL_FRACTION;
    let lo = solution.t0 + 2.0 * h;
    let hi = solution.t_end - 2.0 * h;
    let points = 257;

    let mut worst = 0.0f64;
    for j in 0..points {
        let t = lo + (hi - lo) * (j as f64) / ((points - 1) as f64);
        let ym2 = solution.sample(t - 2.0 * h)?;
        let ym1 = solution.sample(t - h)?;
        let y0 = solution.sample(t)?;
        let yp1 = solution.sample(t + h)?;
        let yp2 = solution.sample(t + 2.0 * h)?;
        let q = y0.rows(0, n).clone_owned();
        let accel_model = 0.5 * (&metric.mass_inv * metric.g_tt_grad_raw(t, &q));
        for i in 0..n {
            let second = (-yp2[i] + 16.0 * yp1[i] - 30.0 * y0[i] + 16.0 * ym1[i] - ym2[i])
                / (12.0 * h * h);
            worst = worst.max((second - accel_model[i]).abs());
        }
    }
    Ok(worst)
}

/// The homothety charge `Q_hom = qᵀMq̇ − 2S(t)` of a lifted trajectory,
/// evaluated along both routes — downstairs from `(q, q̇, S)` and
/// upstairs as `g(ẋ, Y_hom) − 2s0 = qᵀMq̇ + 2(s − s0)` — and checked for
/// pointwise agreement before the downstairs series is returned.
///
/// The worldline must be a lift of the given trajectory (same sample
/// grid); anything else is reported as a usage error.
pub fn homothety_charge(wl: &BargmannWorldline, traj: &Trajectory) -> Result<ChargeSeries> {
    let t_samples = traj.samples();
    let w_samples = wl.samples();
    if t_samples.len() != w_samples.len()
        || t_samples
            .iter()
            .zip(w_samples.iter())
            .any(|(ts, ws)| ts.t != ws.t || ts.q.len() != ws.q.len())
    {
        return Err(Error::usage(
            "worldline and trajectory do not share a sample grid; pass the lift of this \
             exact trajectory",
        ));
    }
    let mass = traj.system().mass_matrix();
    let s0 = w_samples[0].s + t_samples[0].action;

    let mut values = Vec::with_capacity(t_samples.len());
    let mut worst_gap = 0.0f64;
    let mut scale = 1.0f64;
    for (ts, ws) in t_samples.iter().zip(w_samples.iter()) {
        let momentum_form = (ts.q.transpose() * mass * &ts.qdot)[(0, 0)];
        let downstairs = momentum_form - 2.0 * ts.action;
        let upstairs = (ws.q.transpose() * mass * &ws.qdot)[(0, 0)] + 2.0 * (ws.s - s0);
        worst_gap = worst_gap.max((downstairs - upstairs).abs());
        scale = scale.max(downstairs.abs()).max(s0.abs());
        values.push((ts.t, downstairs));
    }
    if worst_gap > 1e-9 * scale {
        return Err(Error::usage(format!(
            "downstairs and upstairs homothety charges disagree by {worst_gap:e}; the \
             worldline is not the lift of this trajectory"
        )));
    }
    Ok(ChargeSeries::from_values(values, None))
}

/// A conformal/scaling vector field on the lifted spacetime, with
/// analytic components and Jacobian.
#[derive(Clone)]
pub enum ConformalVector {
    /// `Y = bt ∂_t + a q·∂_q + (2a − b) s ∂_s`, the lift of the
    /// downstairs scaling with exponents `(a, b)`.
    Scaling { a: f64, b: f64 },
    /// Arbitrary components with a caller-supplied analytic Jacobian.
    Custom {
        components: VectorFieldFn,
        jacobian: VectorJacobianFn,
    },
}

impl fmt::Debug for ConformalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalVector::Scaling { a, b } => f
                .debug_struct("Scaling")
                .field("a", a)
                .field("b", b)
                .finish(),
            ConformalVector::Custom { .. } => f
                .debug_struct("Custom")
                .field("components", &"<callable>")
                .finish(),
        }
    }
}

impl ConformalVector {
    pub fn scaling(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::usage("scaling exponents must be finite"));
        }
        Ok(ConformalVector::Scaling { a, b })
    }

    /// The lift of the degree-(−1) (inverse-distance) rescaling:
    /// `Y = 3t ∂_t + 2 q·∂_q + s ∂_s`.
    pub fn kepler_scaling() -> Self {
        ConformalVector::Scaling { a: 2.0, b: 3.0 }
    }

    /// The transverse homothety `Y = q·∂_q + 2 s ∂_s`.
    pub fn homothety() -> Self {
        ConformalVector::Scaling { a: 1.0, b: 0.0 }
    }

    pub fn custom(components: VectorFieldFn, jacobian: VectorJacobianFn) -> Self {
        ConformalVector::Custom {
            components,
            jacobian,
        }
    }

    /// Components `(Y^t, Y^1..Y^n, Y^s)` at an event.
    pub fn components(&self, event: &Event) -> DVector<f64> {
        match self {
            ConformalVector::Scaling { a, b } => {
                let n = event.q.len();
                let mut y = DVector::zeros(n + 2);
                y[0] = b * event.t;
                for i in 0..n {
                    y[1 + i] = a * event.q[i];
                }
                y[n + 1] = (2.0 * a - b) * event.s;
                y
            }
            ConformalVector::Custom { components, .. } => components(event),
        }
    }

    /// Analytic Jacobian `J[α, ν] = ∂Y^α/∂x^ν` at an event.
    pub fn jacobian(&self, event: &Event) -> DMatrix<f64> {
        match self {
            ConformalVector::Scaling { a, b } => {
                let n = event.q.len();
                let mut j = DMatrix::zeros(n + 2, n + 2);
                j[(0, 0)] = *b;
                for i in 0..n {
                    j[(1 + i, 1 + i)] = *a;
                }
                j[(n + 1, n + 1)] = 2.0 * a - b;
                j
            }
            ConformalVector::Custom { jacobian, .. } => jacobian(event),
        }
    }

    /// Central-difference Jacobian with step `step`, for cross-checking
    /// the analytic one.
    pub fn jacobian_fd(&self, event: &Event, step: f64) -> DMatrix<f64> {
        let n = event.q.len();
        let mut j = DMatrix::zeros(n + 2, n + 2);
        for nu in 0..n + 2 {
            let plus = self.components(&event.shifted(nu, step));
            let minus = self.components(&event.shifted(nu, -step));
            let column = (plus - minus) / (2.0 * step);
            j.column_mut(nu).copy_from(&column);
        }
        j
    }
}

/// The Lie derivative of the metric along a vector field at one event,
/// together with the least-squares conformal factor and the residual
/// defect.
#[derive(Debug, Clone)]
pub struct LieDerivative {
    /// `(L_Y g)_{μν} = Y^α ∂_α g_{μν} + g_{αν} ∂_μ Y^α + g_{μα} ∂_ν Y^α`.
    pub tensor: DMatrix<f64>,
    /// Best-fit scalar `2χ` minimizing `‖L_Y g − 2χ g‖_F`, fitted over
    /// the metric components with `|g_{μν}| > 1e−12`.
    pub two_chi: f64,
    /// `‖L_Y g − 2χ g‖_F` over all components. Zero (to rounding) when
    /// `Y` is an exact conformal vector of the metric.
    pub defect: f64,
}

fn lie_from_parts(
    g: &DMatrix<f64>,
    partials: &[DMatrix<f64>],
    y: &DVector<f64>,
    j: &DMatrix<f64>,
) -> LieDerivative {
    let mut tensor = j.transpose() * g + g * j;
    for (alpha, partial) in partials.iter().enumerate() {
        tensor += y[alpha] * partial;
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for (lv, gv) in tensor.iter().zip(g.iter()) {
        if gv.abs() > 1e-12 {
            num += lv * gv;
            den += gv * gv;
        }
    }
    let two_chi = if den > 0.0 { num / den } else { 0.0 };
    let defect = (&tensor - two_chi * g).norm();
    LieDerivative {
        tensor,
        two_chi,
        defect,
    }
}

/// Computes `L_Y g` at an event from the analytic metric partials and
/// the vector field's analytic Jacobian.
pub fn lie_derivative_metric(
    metric: &BargmannMetric,
    y: &ConformalVector,
    event: &Event,
) -> Result<LieDerivative> {
    let g = metric.metric_matrix(event)?;
    let partials = metric.metric_matrix_partials(event)?;
    let yv = y.components(event);
    let j = y.jacobian(event);
    Ok(lie_from_parts(&g, &partials, &yv, &j))
}

/// Finite-difference cross-check of [`lie_derivative_metric`]: metric
/// partials and the vector Jacobian both by central differences with
/// step [`FD_STEP`].
pub fn lie_derivative_metric_fd(
    metric: &BargmannMetric,
    y: &ConformalVector,
    event: &Event,
) -> Result<LieDerivative> {
    let g = metric.metric_matrix(event)?;
    let mut partials = Vec::with_capacity(metric.n + 2);
    for alpha in 0..metric.n + 2 {
        let plus = metric.metric_matrix(&event.shifted(alpha, FD_STEP))?;
        let minus = metric.metric_matrix(&event.shifted(alpha, -FD_STEP))?;
        partials.push((plus - minus) / (2.0 * FD_STEP));
    }
    let yv = y.components(event);
    let j = y.jacobian_fd(event, FD_STEP);
    Ok(lie_from_parts(&g, &partials, &yv, &j))
}

/// Outcome of the chrono-projective test `[Y, ∂_s] = −ψ ∂_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChronoProjective {
    /// The commutator is a constant multiple of the vertical vector:
    /// `L_Y ξ = ψ ξ` with the returned `ψ`.
    Satisfied { psi: f64 },
    /// The commutator has components off the vertical direction, or its
    /// vertical factor varies from event to event.
    Violated,
}

impl ChronoProjective {
    pub fn psi(&self) -> Option<f64> {
        match self {
            ChronoProjective::Satisfied { psi } => Some(*psi),
            ChronoProjective::Violated => None,
        }
    }
}

/// Checks the chrono-projective condition on the vertical direction:
/// `[Y, ∂_s]` must be proportional to `∂_s` with one constant factor, in
/// which case `ψ = −∂Y^s/∂s` is returned. Since
/// `[Y, ∂_s]^α = −∂Y^α/∂s`, the test requires `∂Y^t/∂s = ∂Y^i/∂s = 0`
/// and a constant `∂Y^s/∂s` across a fixed set of probe events of
/// transverse dimension `n`.
pub fn chrono_projective_check(y: &ConformalVector, n: usize) -> ChronoProjective {
    let probes: [(f64, f64, f64, f64); 6] = [
        (0.3, -0.8, 0.7, -0.6),
        (1.7, 1.1, -1.3, 0.9),
        (0.9, 0.4, 2.1, 1.4),
        (2.3, -1.5, 0.5, -2.2),
        (0.1, 2.0, -0.9, 1.7),
        (1.3, 0.6, 1.9, -0.4),
    ];
    let mut psi_values = Vec::with_capacity(probes.len());
    for &(t, s, qa, qb) in &probes {
        let q = DVector::from_fn(n, |i, _| if i % 2 == 0 { qa } else { qb } + 0.1 * i as f64);
        let event = Event::new(t, q, s);
        let j = y.jacobian(&event);
        let s_col = j.column(n + 1);
        // Everything above the s-row must not depend on s.
        if s_col.rows(0, n + 1).amax() > CHRONO_TOL {
            return ChronoProjective::Violated;
        }
        psi_values.push(-s_col[n + 1]);
    }
    let first = psi_values[0];
    if psi_values.iter().any(|p| (p - first).abs() > CHRONO_TOL) {
        return ChronoProjective::Violated;
    }
    ChronoProjective::Satisfied { psi: first }
}

/// The momentum-map value `𝒬(t) = g(ẋ, Y)` of a vector field along a
/// worldline. On the lift of a trajectory with scaling exponents
/// `(a, b)` this evaluates to
/// `a qᵀMq̇ + (2a − b)s − bt H`, i.e. the downstairs charge shifted by
/// `(2a − b)·s0`.
pub fn worldline_charge(
    metric: &BargmannMetric,
    wl: &BargmannWorldline,
    y: &ConformalVector,
) -> Result<ChargeSeries> {
    let mut values = Vec::with_capacity(wl.samples().len());
    for w in wl.samples() {
        let event = w.event();
        let yv = y.components(&event);
        let n = event.q.len();
        let y_tangent = Tangent::new(yv[0], yv.rows(1, n).clone_owned(), yv[n + 1]);
        let value = metric_contract(metric, &event, &w.tangent(), &y_tangent)?;
        values.push((w.t, value));
    }
    Ok(ChargeSeries::from_values(values, None))
}

/// Renders a worldline as CSV with header `t,q1..qn,s,null_residual`,
/// one row per sample, full-precision scientific notation.
pub fn worldline_to_csv(metric: &BargmannMetric, wl: &BargmannWorldline) -> Result<String> {
    let n = wl.transverse_dim();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",q{i}"));
    }
    out.push_str(",s,null_residual\n");
    for w in wl.samples() {
        let residual = metric_contract(metric, &w.event(), &w.tangent(), &w.tangent())?.abs();
        out.push_str(&format_float(w.t));
        for i in 0..n {
            out.push(',');
            out.push_str(&format_float(w.q[i]));
        }
        out.push(',');
        out.push_str(&format_float(w.s));
        out.push(',');
        out.push_str(&format_float(residual));
        out.push('\n');
    }
    Ok(out)
}

/// Writes [`worldline_to_csv`] output to a file.
pub fn write_worldline_csv(
    metric: &BargmannMetric,
    wl: &BargmannWorldline,
    path: &Path,
) -> Result<()> {
    let csv = worldline_to_csv(metric, wl)?;
    std::fs::write(path, csv)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::noether_charge_series;
    use crate::dynamics::PhaseState;
    use crate::integrate::integrate_trajectory;
    use crate::scaling::ScalingLaw;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ic(q: &[f64], qdot: &[f64]) -> PhaseState {
        PhaseState::from_slices(0.0, q, qdot)
    }

    #[test]
    fn profile_catalog_matches_the_closed_forms() {
        let brdicka = PPWaveProfile::brdicka(1.0);
        let k = brdicka.k_matrix(0.4);
        assert_eq!(k[(0, 0)], -1.0);
        assert_eq!(k[(1, 1)], 1.0);
        assert_eq!(k[(0, 1)], 0.0);
        assert_eq!(brdicka.trace(0.4), 0.0);
        assert!(brdicka.is_vacuum(0.4));

        let iso = PPWaveProfile::isotropic_oscillator(1.0);
        assert!((iso.trace(2.0) - 1.0).abs() < 1e-15);
        assert!(!iso.is_vacuum(2.0));
        // K q·q = ½Ω²|q|².
        let q = DVector::from_row_slice(&[1.5, -0.7]);
        let quad = (q.transpose() * iso.k_matrix(0.0) * &q)[(0, 0)];
        assert!((quad - 0.5 * q.norm_squared()).abs() < 1e-15);

        // Constant plus-polarization 2Ω² reproduces the vacuum wave.
        let pol = PPWaveProfile::polarized(Arc::new(|_| 2.0), Arc::new(|_| 0.0));
        assert_eq!(pol.k_matrix(1.0), brdicka.k_matrix(1.0));
        assert!(pol.is_vacuum(1.0));
    }

    #[test]
    fn contract_catalog_vertical_flat_and_wave() {
        // ξ is null in every metric, exactly.
        let kepler = BargmannMetric::from_system(&DynamicalSystem::kepler(2, 1.0).unwrap());
        let xi = Tangent::vertical(2);
        let ev = Event::from_slices(0.3, &[1.0, 0.4], -0.2);
        assert_eq!(metric_contract(&kepler, &ev, &xi, &xi).unwrap(), 0.0);

        // Flat lift: u = (1, (2), −2) has g(u,u) = 4 − 4 = 0.
        let flat = BargmannMetric::from_system(&DynamicalSystem::free(1).unwrap());
        let ev1 = Event::from_slices(0.0, &[1.0], 0.0);
        let u = Tangent::from_slices(1.0, &[2.0], -2.0);
        assert_eq!(metric_contract(&flat, &ev1, &u, &u).unwrap(), 0.0);

        // Anti-isotropic wave at equal coordinates: the dt² coefficient
        // Ω²((q²)² − (q¹)²) vanishes.
        let wave = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        let ev2 = Event::from_slices(0.0, &[1.0, 1.0], 0.0);
        let time = Tangent::from_slices(1.0, &[0.0, 0.0], 0.0);
        assert_eq!(metric_contract(&wave, &ev2, &time, &time).unwrap(), 0.0);
        assert_eq!(wave.g_tt(&ev2).unwrap(), 0.0);
    }

    #[test]
    fn metric_is_lorentzian_and_s_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let metrics = [
            BargmannMetric::from_system(&DynamicalSystem::kepler(2, 1.0).unwrap()),
            BargmannMetric::from_system(&DynamicalSystem::oscillator(2, 1.3).unwrap()),
            BargmannMetric::from_profile(PPWaveProfile::brdicka(0.8)),
        ];
        for metric in &metrics {
            for _ in 0..5 {
                let q = DVector::from_fn(2, |_, _| rng.gen_range(0.5..2.0));
                let ev = Event::new(rng.gen_range(0.0..2.0), q, rng.gen_range(-1.0..1.0));
                let g = metric.metric_matrix(&ev).unwrap();
                let eigen = g.clone().symmetric_eigen().eigenvalues;
                let negatives = eigen.iter().filter(|&&e| e < 0.0).count();
                assert_eq!(negatives, 1, "one timelike direction expected");

                // s-independence, analytically and by displacement.
                let partials = metric.metric_matrix_partials(&ev).unwrap();
                assert_eq!(partials[3].amax(), 0.0);
                let mut shifted = ev.clone();
                shifted.s += 7.7;
                assert_eq!(metric.metric_matrix(&shifted).unwrap(), g);

                // Entries coupling to s are constant (1 on the t row and
                // column, 0 elsewhere), so every partial's s-column is
                // zero: the vertical vector is covariantly constant.
                for p in &partials {
                    assert_eq!(p.column(3).amax(), 0.0);
                    assert_eq!(p.row(3).amax(), 0.0);
                }
            }
        }
    }

    #[test]
    fn free_particle_lift_is_null_with_linear_s() {
        let sys = DynamicalSystem::free(1).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0], &[2.0]), 2.0, 1e-10).unwrap();
        let wl = lift_trajectory(&traj, 0.0);
        let metric = BargmannMetric::from_system(&sys);
        // L = ½q̇² = 2, so s(t) = −S(t) = −2t.
        for w in wl.samples() {
            assert!((w.s + 2.0 * w.t).abs() < 1e-12);
            assert!((w.sdot + 2.0).abs() < 1e-12);
        }
        assert!(null_residual(&metric, &wl).unwrap() <= 1e-12);
    }

    #[test]
    fn oscillator_lift_stays_null_over_three_periods() {
        let sys = DynamicalSystem::oscillator(2, 1.0).unwrap();
        let t_end = 3.0 * 2.0 * std::f64::consts::PI;
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.0, 1.0]), t_end, 1e-10).unwrap();
        let wl = lift_trajectory(&traj, 0.4);
        let metric = BargmannMetric::from_system(&sys);
        assert!(null_residual(&metric, &wl).unwrap() <= 1e-8);
    }

    #[test]
    fn anti_isotropic_wave_lift_matches_the_closed_form_s_line() {
        // Downstairs equivalent of the K = diag(−Ω², Ω²) wave: the saddle
        // potential ½Ω²((q¹)² − (q²)²). From rest at (1,1):
        // q¹ = cos t, q² = cosh t, s − s0 = ¼(sin 2t − sinh 2t).
        let sys = DynamicalSystem::saddle(1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 1.0], &[0.0, 0.0]), 3.0, 1e-12).unwrap();
        let s0 = 0.7;
        let wl = lift_trajectory(&traj, s0);
        let mut worst = 0.0f64;
        for w in wl.samples() {
            let expected = s0 + 0.25 * ((2.0 * w.t).sin() - (2.0 * w.t).sinh());
            worst = worst.max((w.s - expected).abs());
        }
        assert!(worst <= 1e-7, "s-line deviation {worst:e}");

        // The same worldline is null for the wave-profile metric, not
        // just for the potential-form metric it was lifted through.
        let wave = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        assert!(null_residual(&wave, &wl).unwrap() <= 1e-8);
    }

    #[test]
    fn null_residual_detects_a_vertical_velocity_error() {
        let sys = DynamicalSystem::oscillator(1, 1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0], &[0.0]), 2.0, 1e-10).unwrap();
        let metric = BargmannMetric::from_system(&sys);
        let wl = lift_trajectory(&traj, 0.0);

        // ṡ → ṡ + 0.1 adds exactly 2·ṫ·δṡ = 0.2 to g(ẋ,ẋ).
        let perturbed: Vec<WorldlineSample> = wl
            .samples()
            .iter()
            .map(|w| WorldlineSample {
                sdot: w.sdot + 0.1,
                ..w.clone()
            })
            .collect();
        let perturbed = BargmannWorldline::from_samples(perturbed).unwrap();
        let residual = null_residual(&metric, &perturbed).unwrap();
        assert!((residual - 0.2).abs() < 1e-9, "residual {residual}");

        // A vertical translation (s0 shift) changes nothing.
        let shifted: Vec<WorldlineSample> = wl
            .samples()
            .iter()
            .map(|w| WorldlineSample {
                s: w.s + 123.456,
                ..w.clone()
            })
            .collect();
        let shifted = BargmannWorldline::from_samples(shifted).unwrap();
        assert!(
            (null_residual(&metric, &shifted).unwrap()
                - null_residual(&metric, &wl).unwrap())
            .abs()
                < 1e-15
        );
    }

    #[test]
    fn vertical_momentum_is_one_on_every_lift_sample() {
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.0, 1.1]), 5.0, 1e-10).unwrap();
        let metric = BargmannMetric::from_system(&sys);
        let wl = lift_trajectory(&traj, -0.3);
        let xi = Tangent::vertical(2);
        for w in wl.samples() {
            let p_s = metric_contract(&metric, &w.event(), &w.tangent(), &xi).unwrap();
            assert_eq!(p_s, 1.0);
        }
    }

    #[test]
    fn wave_geodesic_reproduces_the_cosine_cosh_closed_form() {
        let metric = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        let event = Event::from_slices(0.0, &[1.0, 1.0], 0.7);
        // From transverse rest, g_tt vanishes at (1,1), so ṡ = 0 makes
        // the tangent null.
        let tangent = Tangent::from_slices(1.0, &[0.0, 0.0], 0.0);
        let wl = upstairs_null_geodesic(&metric, &event, &tangent, 3.0, 1e-12).unwrap();

        let mut worst_q = 0.0f64;
        let mut worst_s = 0.0f64;
        for w in wl.samples() {
            worst_q = worst_q.max((w.q[0] - w.t.cos()).abs());
            worst_q = worst_q.max((w.q[1] - w.t.cosh()).abs());
            let expected_s = 0.7 + 0.25 * ((2.0 * w.t).sin() - (2.0 * w.t).sinh());
            worst_s = worst_s.max((w.s - expected_s).abs());
        }
        assert!(worst_q <= 1e-8, "transverse deviation {worst_q:e}");
        assert!(worst_s <= 1e-7, "vertical deviation {worst_s:e}");
        assert!(null_residual(&metric, &wl).unwrap() <= 1e-12);
        assert!(geodesic_residual(&metric, &wl).unwrap() <= 1e-6);
    }

    #[test]
    fn wave_geodesic_reproduces_the_lift_of_the_downstairs_solution() {
        // Two-route consistency on the saddle system: integrate
        // downstairs and lift, or integrate the geodesic upstairs.
        let sys = DynamicalSystem::saddle(1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 1.0], &[0.0, 0.0]), 3.0, 1e-12).unwrap();
        let s0 = 0.7;
        let lifted = lift_trajectory(&traj, s0);

        let metric = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        let event = Event::from_slices(0.0, &[1.0, 1.0], s0);
        let tangent = Tangent::from_slices(1.0, &[0.0, 0.0], 0.0);
        let geo = upstairs_null_geodesic(&metric, &event, &tangent, 3.0, 1e-12).unwrap();

        let lift_sol = lifted.solution.as_ref().unwrap();
        let mut worst = 0.0f64;
        for w in geo.samples() {
            let reference = lift_sol.sample(w.t).unwrap();
            worst = worst.max((w.q[0] - reference[0]).abs());
            worst = worst.max((w.q[1] - reference[1]).abs());
            worst = worst.max((w.s - reference[4]).abs());
        }
        assert!(worst <= 1e-7, "route disagreement {worst:e}");
    }

    #[test]
    fn circular_orbit_lift_agrees_with_the_direct_geodesic() {
        // Unit-radius circular orbit of the inverse-distance potential:
        // q = (cos t, sin t), L = ½ + 1 = 3/2, so s = s0 − 1.5 t.
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.0, 1.0]), 3.0, 1e-12).unwrap();
        let s0 = 0.25;
        let lifted = lift_trajectory(&traj, s0);
        let metric = BargmannMetric::from_system(&sys);

        let event = Event::from_slices(0.0, &[1.0, 0.0], s0);
        let tangent = Tangent::from_slices(1.0, &[0.0, 1.0], -1.5);
        let geo = upstairs_null_geodesic(&metric, &event, &tangent, 3.0, 1e-12).unwrap();

        let mut worst = 0.0f64;
        for w in geo.samples() {
            worst = worst.max((w.q[0] - w.t.cos()).abs());
            worst = worst.max((w.q[1] - w.t.sin()).abs());
            worst = worst.max((w.s - (s0 - 1.5 * w.t)).abs());
        }
        for w in lifted.samples() {
            worst = worst.max((w.q[0] - w.t.cos()).abs());
            worst = worst.max((w.q[1] - w.t.sin()).abs());
            worst = worst.max((w.s - (s0 - 1.5 * w.t)).abs());
        }
        assert!(worst <= 1e-7, "deviation from closed form {worst:e}");
        assert!(geodesic_residual(&metric, &lifted).unwrap() <= 1e-6);
        assert!(geodesic_residual(&metric, &geo).unwrap() <= 1e-6);
    }

    #[test]
    fn non_null_tangents_are_rejected_for_null_runs() {
        let metric = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        let event = Event::from_slices(0.0, &[1.0, 1.0], 0.0);
        let bad = Tangent::from_slices(1.0, &[0.0, 0.0], 0.3);
        let err = upstairs_null_geodesic(&metric, &event, &bad, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "got {err:?}");

        let vertical = Tangent::vertical(2);
        let err = upstairs_geodesic(&metric, &event, &vertical, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "got {err:?}");

        // Non-null levels are fine for the general integrator, and the
        // level is conserved exactly on samples.
        let timelike = Tangent::from_slices(1.0, &[0.0, 0.0], -0.5);
        let wl = upstairs_geodesic(&metric, &event, &timelike, 1.0, 1e-10).unwrap();
        let level = metric_contract(&metric, &event, &timelike, &timelike).unwrap();
        for w in wl.samples() {
            let g_uu = metric_contract(&metric, &w.event(), &w.tangent(), &w.tangent()).unwrap();
            assert!((g_uu - level).abs() < 1e-12);
        }
    }

    #[test]
    fn homothety_charge_vanishes_for_the_rest_wave_data() {
        // Zero initial transverse velocity makes q·q̇(0) = 0, and the
        // charge is conserved, so it stays zero along the worldline.
        let sys = DynamicalSystem::saddle(1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 1.0], &[0.0, 0.0]), 3.0, 1e-12).unwrap();
        let wl = lift_trajectory(&traj, 0.7);
        let series = homothety_charge(&wl, &traj).unwrap();
        let worst = series
            .values()
            .iter()
            .map(|(_, v)| v.abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-8, "charge magnitude {worst:e}");
    }

    #[test]
    fn homothety_charge_vanishes_for_orthogonal_isotropic_wave_data() {
        // Downstairs equivalent of the isotropic profile K = ½Ω²I is the
        // degree-2 potential V = −¼Ω²|q|². With q(0)·q̇(0) = 0 the
        // conserved homothety charge is exactly zero.
        let sys = DynamicalSystem::unit_mass(
            2,
            Potential::custom_homogeneous(2.0, |q: &DVector<f64>| -0.25 * q.norm_squared()),
        )
        .unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.0, 1.0]), 3.0, 1e-12).unwrap();
        let wl = lift_trajectory(&traj, 0.0);
        let series = homothety_charge(&wl, &traj).unwrap();
        let worst = series
            .values()
            .iter()
            .map(|(_, v)| v.abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-8, "charge magnitude {worst:e}");

        // The lift is null against the profile-form metric too.
        let metric = BargmannMetric::from_profile(PPWaveProfile::isotropic_oscillator(1.0));
        assert!(null_residual(&metric, &wl).unwrap() <= 1e-8);
    }

    #[test]
    fn homothety_charge_routes_agree_and_mismatches_are_rejected() {
        let sys = DynamicalSystem::oscillator(1, 1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0], &[0.4]), 4.0, 1e-10).unwrap();
        let wl = lift_trajectory(&traj, 5.0);
        let series = homothety_charge(&wl, &traj).unwrap();

        // Independent upstairs route through the momentum map:
        // Q_hom = g(ẋ, Y_hom) − 2 s0.
        let metric = BargmannMetric::from_system(&sys);
        let upstairs = worldline_charge(&metric, &wl, &ConformalVector::homothety()).unwrap();
        let mut worst = 0.0f64;
        for ((_, down), (_, up)) in series.values().iter().zip(upstairs.values()) {
            worst = worst.max((down - (up - 2.0 * 5.0)).abs());
        }
        assert!(worst <= 1e-10, "route disagreement {worst:e}");

        // A trajectory with a different grid is not this lift.
        let other = integrate_trajectory(&sys, &ic(&[1.0], &[0.4]), 3.0, 1e-10).unwrap();
        let err = homothety_charge(&wl, &other).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "got {err:?}");
    }

    #[test]
    fn scaling_lifts_are_conformal_exactly_when_exponents_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        // (system, a, b) with (k−2)a + 2b = 0.
        let cases: Vec<(DynamicalSystem, f64, f64)> = vec![
            (DynamicalSystem::kepler(2, 1.0).unwrap(), 2.0, 3.0),
            (DynamicalSystem::oscillator(2, 1.0).unwrap(), 1.0, 0.0),
            (DynamicalSystem::inverse_square(2, 0.8).unwrap(), 1.0, 2.0),
            (DynamicalSystem::linear_force(2, 1.4).unwrap(), 2.0, 1.0),
            (DynamicalSystem::free(2).unwrap(), 1.0, 1.0),
        ];
        for (sys, a, b) in &cases {
            let metric = BargmannMetric::from_system(sys);
            let y = ConformalVector::scaling(*a, *b).unwrap();
            for _ in 0..4 {
                let q = DVector::from_fn(2, |_, _| rng.gen_range(0.4..1.8));
                let ev = Event::new(rng.gen_range(0.1..2.0), q, rng.gen_range(-1.0..1.0));
                let lie = lie_derivative_metric(&metric, &y, &ev).unwrap();
                assert!(
                    (lie.two_chi - 2.0 * a).abs() <= 1e-9,
                    "2χ = {} for a = {a}",
                    lie.two_chi
                );
                assert!(lie.defect <= 1e-9, "defect {:e}", lie.defect);
            }
        }

        // Homothety of the anti-isotropic wave: 2χ = 2 with zero defect
        // at generic events.
        let wave = BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0));
        let ev = Event::from_slices(0.9, &[1.2, -0.5], 0.3);
        let lie = lie_derivative_metric(&wave, &ConformalVector::homothety(), &ev).unwrap();
        assert!((lie.two_chi - 2.0).abs() <= 1e-10);
        assert!(lie.defect <= 1e-10);

        // Mismatched exponents are detected: the inverse-distance metric
        // is NOT conformal under the plain homothety.
        let kepler = BargmannMetric::from_system(&DynamicalSystem::kepler(2, 1.0).unwrap());
        let ev = Event::from_slices(1.3, &[0.8, -0.5], 0.4);
        let lie = lie_derivative_metric(&kepler, &ConformalVector::homothety(), &ev).unwrap();
        assert!(lie.defect > 0.5, "defect {:e}", lie.defect);
    }

    #[test]
    fn flat_metric_homothety_is_an_exact_conformal_rescaling() {
        // For V = 0 the transverse homothety (q, s) → (λq, λ²s) pulls the
        // metric dq² + 2dt ds back to λ²(dq² + 2dt ds): every component
        // picks up the same factor, so the Lie derivative is exactly 2g
        // and the conformal defect vanishes identically.
        let flat = BargmannMetric::from_system(&DynamicalSystem::free(2).unwrap());
        let ev = Event::from_slices(0.7, &[1.1, -0.4], 0.9);
        let lie = lie_derivative_metric(&flat, &ConformalVector::homothety(), &ev).unwrap();
        assert!((lie.two_chi - 2.0).abs() <= 1e-12);
        assert!(lie.defect <= 1e-12, "defect {:e}", lie.defect);
        // Component check: L_qq = 2·I block, L_ts = 2·1.
        assert!((lie.tensor[(1, 1)] - 2.0).abs() <= 1e-15);
        assert!((lie.tensor[(0, 3)] - 2.0).abs() <= 1e-15);
        assert!((lie.tensor[(0, 0)]).abs() <= 1e-15);
    }

    #[test]
    fn analytic_lie_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let wave_t = PPWaveProfile::polarized(
            Arc::new(|t: f64| 2.0 + t.sin()),
            Arc::new(|t: f64| 0.3 * t.cos()),
        );
        let metrics = [
            BargmannMetric::from_system(&DynamicalSystem::kepler(2, 1.0).unwrap()),
            BargmannMetric::from_profile(PPWaveProfile::brdicka(1.0)),
            BargmannMetric::from_profile(wave_t),
        ];
        let vectors = [
            ConformalVector::kepler_scaling(),
            ConformalVector::homothety(),
            ConformalVector::scaling(1.5, -0.5).unwrap(),
        ];
        for metric in &metrics {
            for y in &vectors {
                let q = DVector::from_fn(2, |_, _| rng.gen_range(0.5..1.5));
                let ev = Event::new(rng.gen_range(0.2..1.8), q, rng.gen_range(-0.8..0.8));
                let analytic = lie_derivative_metric(metric, y, &ev).unwrap();
                let numeric = lie_derivative_metric_fd(metric, y, &ev).unwrap();
                let gap = (&analytic.tensor - &numeric.tensor).amax();
                assert!(gap <= 1e-5, "tensor mismatch {gap:e}");
                assert!((analytic.two_chi - numeric.two_chi).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let custom = ConformalVector::custom(
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut y = DVector::zeros(n + 2);
                y[0] = ev.t * ev.t;
                y[1] = ev.q[1] * ev.s;
                y[n + 1] = ev.q[0] * ev.s;
                y
            }),
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut j = DMatrix::zeros(n + 2, n + 2);
                j[(0, 0)] = 2.0 * ev.t;
                j[(1, 2)] = ev.s;
                j[(1, n + 1)] = ev.q[1];
                j[(n + 1, 1)] = ev.s;
                j[(n + 1, n + 1)] = ev.q[0];
                j
            }),
        );
        let vectors = [ConformalVector::kepler_scaling(), custom];
        let ev = Event::from_slices(0.8, &[1.2, -0.7], 0.5);
        for y in &vectors {
            let gap = (y.jacobian(&ev) - y.jacobian_fd(&ev, FD_STEP)).amax();
            assert!(gap <= 1e-7, "jacobian mismatch {gap:e}");
        }
    }

    #[test]
    fn chrono_projective_catalog() {
        // ψ = b − 2a for scaling lifts.
        assert_eq!(
            chrono_projective_check(&ConformalVector::kepler_scaling(), 2).psi(),
            Some(-1.0)
        );
        assert_eq!(
            chrono_projective_check(&ConformalVector::homothety(), 2).psi(),
            Some(-2.0)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let a: f64 = rng.gen_range(-2.0..2.0);
            let b: f64 = rng.gen_range(-2.0..2.0);
            let y = ConformalVector::scaling(a, b).unwrap();
            let psi = chrono_projective_check(&y, 3).psi().unwrap();
            assert!((psi - (b - 2.0 * a)).abs() <= 1e-12);
        }

        // Y^s = q¹·s has an event-dependent vertical factor: violated.
        let skew = ConformalVector::custom(
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut y = DVector::zeros(n + 2);
                y[n + 1] = ev.q[0] * ev.s;
                y
            }),
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut j = DMatrix::zeros(n + 2, n + 2);
                j[(n + 1, 1)] = ev.s;
                j[(n + 1, n + 1)] = ev.q[0];
                j
            }),
        );
        assert_eq!(chrono_projective_check(&skew, 2), ChronoProjective::Violated);

        // A horizontal s-dependence (Y^t depending on s) also violates.
        let tilt = ConformalVector::custom(
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut y = DVector::zeros(n + 2);
                y[0] = ev.s;
                y
            }),
            Arc::new(|ev: &Event| {
                let n = ev.q.len();
                let mut j = DMatrix::zeros(n + 2, n + 2);
                j[(0, n + 1)] = 1.0;
                j
            }),
        );
        assert_eq!(chrono_projective_check(&tilt, 2), ChronoProjective::Violated);
    }

    #[test]
    fn upstairs_charge_is_conserved_and_projects_to_the_downstairs_charge() {
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let law = ScalingLaw::new(2.0, 3.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.0, 1.1]), 6.0, 1e-11).unwrap();
        let s0 = 0.3;
        let wl = lift_trajectory(&traj, s0);
        let metric = BargmannMetric::from_system(&sys);

        let upstairs = worldline_charge(&metric, &wl, &ConformalVector::kepler_scaling()).unwrap();
        assert!(upstairs.drift_abs() <= 1e-8, "drift {:e}", upstairs.drift_abs());

        // 𝒬 − (Y^s/s)·s0 = Q downstairs, pointwise; here Y^s/s = 2a−b = 1.
        let downstairs = noether_charge_series(&sys, &law, &traj).unwrap();
        let mut worst = 0.0f64;
        for ((_, up), (_, down)) in upstairs.values().iter().zip(downstairs.values()) {
            worst = worst.max((up - s0 - down).abs());
        }
        assert!(worst <= 1e-8, "projection gap {worst:e}");
    }

    #[test]
    fn oscillator_homothety_maps_null_geodesics_to_null_geodesics() {
        // The 1d oscillator lifts to a 3d spacetime where the transverse
        // homothety (q, s) → (λq, λ²s) preserves null geodesics because
        // g_tt = −ω²q² is quadratic.
        let sys = DynamicalSystem::oscillator(1, 1.0).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0], &[0.3]), 7.0, 1e-11).unwrap();
        let metric = BargmannMetric::from_system(&sys);
        let wl = lift_trajectory(&traj, 0.2);
        let mapped = homothety_map_worldline(&wl, 1.3).unwrap();
        assert!(null_residual(&metric, &mapped).unwrap() <= 1e-8);
        assert!(geodesic_residual(&metric, &mapped).unwrap() <= 1e-6);

        let err = homothety_map_worldline(&wl, 0.0).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "got {err:?}");
    }

    #[test]
    fn worldline_csv_has_the_documented_shape() {
        let sys = DynamicalSystem::free(2).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[1.0, 0.0], &[0.5, -0.2]), 1.0, 1e-10).unwrap();
        let metric = BargmannMetric::from_system(&sys);
        let wl = lift_trajectory(&traj, 0.0);
        let csv = worldline_to_csv(&metric, &wl).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,q1,q2,s,null_residual");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 5);
        assert_eq!(csv.lines().count(), wl.samples().len() + 1);
    }

    #[test]
    fn geodesic_residual_requires_a_continuous_extension() {
        let sys = DynamicalSystem::free(1).unwrap();
        let traj = integrate_trajectory(&sys, &ic(&[0.0], &[1.0]), 1.0, 1e-10).unwrap();
        let metric = BargmannMetric::from_system(&sys);
        let wl = lift_trajectory(&traj, 0.0);
        let bare = BargmannWorldline::from_samples(wl.samples().to_vec()).unwrap();
        let err = geodesic_residual(&metric, &bare).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "got {err:?}");
    }

    #[test]
    fn singular_events_are_domain_errors() {
        let metric = BargmannMetric::from_system(&DynamicalSystem::kepler(2, 1.0).unwrap());
        let origin = Event::from_slices(0.0, &[0.0, 0.0], 0.0);
        let u = Tangent::vertical(2);
        assert!(matches!(
            metric_contract(&metric, &origin, &u, &u).unwrap_err(),
            Error::Domain(_)
        ));
        assert!(matches!(
            metric.metric_matrix(&origin).unwrap_err(),
            Error::Domain(_)
        ));

        let wrong_dim = Event::from_slices(0.0, &[1.0], 0.0);
        assert!(matches!(
            metric.metric_matrix(&wrong_dim).unwrap_err(),
            Error::Usage(_)
        ));
    }
}
