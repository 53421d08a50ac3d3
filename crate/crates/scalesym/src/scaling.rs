//! Rescaling transformations of mechanical trajectories.
//!
//! A scaling law sends `(q, t) -> (λ^a q, λ^b t)` and multiplies the
//! Lagrangian — hence the action — by `λ^c`. Kinetic consistency forces
//! `c = 2a - b`, and compatibility with a potential homogeneous of degree
//! `k` forces `(k - 2)a + 2b = 0`. This module solves those constraints,
//! applies a law to an integrated trajectory, and measures how badly a
//! candidate law fails to be a symmetry.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::dynamics::{DynamicalSystem, PhaseState};
use crate::error::{Error, Result};
use crate::integrate::{build_samples, Trajectory};

/// Tolerance used when validating the exponent constraints.
pub const EXPONENT_TOL: f64 = 1e-12;

/// Finite-difference step for boundary-term time derivatives.
const BOUNDARY_TERM_STEP: f64 = 1e-6;

/// Optional total-time-derivative term `δf(q, t)` a law may add to the
/// Lagrangian transformation. All built-in laws use none (identically
/// zero).
pub type BoundaryTerm = Arc<dyn Fn(&DVector<f64>, f64) -> f64 + Send + Sync>;

/// Exponents of a rescaling `q -> λ^a q`, `t -> λ^b t`, `L -> λ^c L`.
#[derive(Clone)]
pub struct ScalingLaw {
    a: f64,
    b: f64,
    c: f64,
    k: Option<f64>,
    boundary_term: Option<BoundaryTerm>,
}

impl fmt::Debug for ScalingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalingLaw")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("k", &self.k)
            .field(
                "boundary_term",
                &self.boundary_term.as_ref().map(|_| "<fn>"),
            )
            .finish()
    }
}

impl PartialEq for ScalingLaw {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && self.c == other.c
            && self.k == other.k
            && self.boundary_term.is_none()
            && other.boundary_term.is_none()
    }
}

impl ScalingLaw {
    /// Law from position and time exponents; the Lagrangian exponent is
    /// fixed by kinetic consistency, `c = 2a - b`. No potential degree is
    /// attached.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::usage("scaling exponents must be finite"));
        }
        Ok(ScalingLaw {
            a,
            b,
            c: 2.0 * a - b,
            k: None,
            boundary_term: None,
        })
    }

    /// Law from all three exponents, validating `c = 2a - b`. Useful when
    /// deserializing configurations that spell out every exponent.
    pub fn from_parts(a: f64, b: f64, c: f64) -> Result<Self> {
        let law = ScalingLaw::new(a, b)?;
        if (c - law.c).abs() > EXPONENT_TOL * (1.0 + c.abs()) {
            return Err(Error::usage(format!(
                "inconsistent exponents: c = {c} but kinetic consistency requires c = 2a - b = {}",
                law.c
            )));
        }
        Ok(ScalingLaw { c, ..law })
    }

    /// Attaches a boundary term `δf(q, t)` whose total time derivative is
    /// allowed to appear in the transformed Lagrangian.
    pub fn with_boundary_term(mut self, term: BoundaryTerm) -> Self {
        self.boundary_term = Some(term);
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Potential degree this law was solved for, when it came from
    /// [`solve_exponents`].
    pub fn degree(&self) -> Option<f64> {
        self.k
    }

    /// Dynamical exponent `z = b/a`; undefined for pure-time laws.
    pub fn z(&self) -> Option<f64> {
        if self.a == 0.0 {
            None
        } else {
            Some(self.b / self.a)
        }
    }

    pub fn boundary_term(&self) -> Option<&BoundaryTerm> {
        self.boundary_term.as_ref()
    }

    /// True when this law is compatible with a potential of degree `k`,
    /// i.e. `(k - 2)a + 2b = 0`.
    pub fn matches_degree(&self, k: f64) -> bool {
        ((k - 2.0) * self.a + 2.0 * self.b).abs() <= EXPONENT_TOL * (1.0 + self.a.abs() + self.b.abs())
    }
}

/// Solves the exponent constraints for a potential homogeneous of degree
/// `k`, normalizing the position exponent to `a`: `b = a(2 - k)/2` and
/// `c = a(2 + k)/2`.
pub fn solve_exponents(k: f64, a: f64) -> Result<ScalingLaw> {
    if !k.is_finite() || !a.is_finite() {
        return Err(Error::usage("degree and position exponent must be finite"));
    }
    if a == 0.0 {
        return Err(Error::usage(
            "position exponent a must be nonzero; build pure-time laws with ScalingLaw::new",
        ));
    }
    let b = a * (2.0 - k) / 2.0;
    let c = a * (2.0 + k) / 2.0;
    Ok(ScalingLaw {
        a,
        b,
        c,
        k: Some(k),
        boundary_term: None,
    })
}

/// Maps an integrated trajectory through a scaling law: the returned
/// curve is `t' = λ^b t`, `q'(t') = λ^a q(t)`, `q̇'(t') = λ^(a-b) q̇(t)`,
/// `S'(t') = λ^c S(t)`, carried by an exact affine transformation of the
/// continuous extension and resampled on the transformed grid.
pub fn apply_scaling(traj: &Trajectory, law: &ScalingLaw, lambda: f64) -> Result<Trajectory> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::usage("lambda must be positive"));
    }
    let n = traj.dim();
    let q_scale = lambda.powf(law.a);
    let qdot_scale = lambda.powf(law.a - law.b);
    let s_scale = lambda.powf(law.c);
    let t_scale = lambda.powf(law.b);

    let mut component_scales = DVector::from_element(2 * n + 1, 1.0);
    for i in 0..n {
        component_scales[i] = q_scale;
        component_scales[n + i] = qdot_scale;
    }
    component_scales[2 * n] = s_scale;

    let solution = traj.solution().affine_scaled(t_scale, &component_scales);
    let samples = build_samples(&solution, n, traj.dense_points);
    Ok(Trajectory::from_parts(
        traj.system().clone(),
        samples,
        traj.tol(),
        traj.dense_points,
        solution,
    ))
}

/// Stencil spacing for [`eom_residual`], as a fraction of the trajectory
/// span. Chosen to balance fourth-order stencil truncation (dominant for
/// wide stencils near close approaches) against interpolation noise
/// amplified by 1/h² (dominant for narrow ones); the optimum is flat
/// between roughly 1/300 and 1/1500 for default-tolerance trajectories.
const EOM_STENCIL_FRACTION: f64 = 1.0 / 512.0;

/// Certifies that a curve solves `M q̈ = -∇V` by comparing a five-point
/// finite-difference second derivative of `q` (uniform stencil over the
/// continuous extension) against the model acceleration, returning the
/// worst absolute defect over the evaluation grid.
pub fn eom_residual(sys: &DynamicalSystem, traj: &Trajectory) -> Result<f64> {
    eom_residual_with_spacing(sys, traj, EOM_STENCIL_FRACTION)
}

pub(crate) fn eom_residual_with_spacing(
    sys: &DynamicalSystem,
    traj: &Trajectory,
    stencil_fraction: f64,
) -> Result<f64> {
    if sys.dim() != traj.dim() {
        return Err(Error::usage("system and trajectory dimensions differ"));
    }
    if traj.samples().len() < 5 {
        return Err(Error::usage(
            "equation-of-motion residual needs at least five samples",
        ));
    }
    let t0 = traj.start_time();
    let span = traj.end_time() - t0;
    let h = span * stencil_fraction;
    // Evaluation points keep the full 5-point stencil inside the range.
    let m = 257usize;
    let mut worst = 0.0_f64;
    for j in 0..m {
        let t = t0 + 2.0 * h + (span - 4.0 * h) * (j as f64) / ((m - 1) as f64);
        let qm2 = traj.sample_at(t - 2.0 * h)?.q;
        let qm1 = traj.sample_at(t - h)?.q;
        let s0 = traj.sample_at(t)?;
        let qp1 = traj.sample_at(t + h)?.q;
        let qp2 = traj.sample_at(t + 2.0 * h)?.q;
        let qddot_fd =
            (-&qm2 + 16.0 * &qm1 - 30.0 * &s0.q + 16.0 * &qp1 - &qp2) / (12.0 * h * h);
        let qddot_model = sys.acceleration(&s0.phase_state())?;
        worst = worst.max((qddot_fd - qddot_model).amax());
    }
    Ok(worst)
}

/// Measures how badly a law fails to be a symmetry of the system's
/// Lagrangian: the worst over the given states of
/// `|L(λ^a q, λ^(a-b) q̇) · λ^b − λ^c L(q, q̇) − d(δf)/dt|`.
/// Zero (to rounding) exactly when the law matches the potential degree.
pub fn symmetry_residual(
    sys: &DynamicalSystem,
    law: &ScalingLaw,
    lambda: f64,
    states: &[PhaseState],
) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::usage("lambda must be positive"));
    }
    let q_scale = lambda.powf(law.a);
    let qdot_scale = lambda.powf(law.a - law.b);
    let t_scale = lambda.powf(law.b);
    let l_scale = lambda.powf(law.c);
    let mut worst = 0.0_f64;
    for state in states {
        let l = sys.lagrangian(state)?;
        let mapped = PhaseState::new(
            t_scale * state.t,
            q_scale * &state.q,
            qdot_scale * &state.qdot,
        );
        let l_mapped = sys.lagrangian(&mapped)?;
        let mut residual = l_mapped * t_scale - l_scale * l;
        if let Some(term) = &law.boundary_term {
            residual -= boundary_term_rate(term, state);
        }
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}

/// Total time derivative of `δf(q, t)` along a phase-space state,
/// `∇_q δf · q̇ + ∂_t δf`, by central differences.
fn boundary_term_rate(term: &BoundaryTerm, state: &PhaseState) -> f64 {
    let h = BOUNDARY_TERM_STEP;
    let mut rate = (term(&state.q, state.t + h) - term(&state.q, state.t - h)) / (2.0 * h);
    for i in 0..state.q.len() {
        let mut qp = state.q.clone();
        let mut qm = state.q.clone();
        qp[i] += h;
        qm[i] -= h;
        rate += state.qdot[i] * (term(&qp, state.t) - term(&qm, state.t)) / (2.0 * h);
    }
    rate
}
