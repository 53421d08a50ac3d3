//! Trajectory integration with the action carried along as state.
//!
//! The ODE state is `y = (q, qdot, S)` where `S(t)` integrates the
//! Lagrangian from the start of the run, so every stored sample knows the
//! accumulated action without any post-hoc quadrature. Samples are the
//! union of the accepted adaptive steps and a uniform dense grid; values
//! between accepted steps come from the integrator's own continuous
//! extension.

use std::path::Path;

use nalgebra::DVector;

use crate::dynamics::{DynamicalSystem, PhaseState};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, OdeSolution};

pub use crate::ode::StepStats;

/// Default local error tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default number of uniform dense-grid points added to the samples.
pub const DEFAULT_DENSE_POINTS: usize = 1000;

/// Knobs for [`integrate_with_options`].
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// Mixed absolute/relative local error tolerance, within `[1e-14, 1e-3]`.
    pub tol: f64,
    /// Number of uniform dense-grid points (at least 2).
    pub dense_points: usize,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
    /// Action already accumulated before the start of this run; nonzero
    /// when continuing a trajectory from a checkpoint.
    pub initial_action: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: DEFAULT_TOL,
            dense_points: DEFAULT_DENSE_POINTS,
            max_steps: 2_000_000,
            initial_action: 0.0,
        }
    }
}

/// One stored trajectory sample.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
    /// Accumulated action `S(t)`, the running time integral of `L`.
    pub action: f64,
}

impl Sample {
    pub fn phase_state(&self) -> PhaseState {
        PhaseState::new(self.t, self.q.clone(), self.qdot.clone())
    }
}

/// Outcome of recurrence-based period detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodDetection {
    Periodic {
        period: f64,
        /// Recurrence distance at the detected period, already normalized
        /// by the initial-state scale.
        recurrence: f64,
    },
    Aperiodic,
}

/// A numerically integrated trajectory with dense resampling support.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub(crate) system: DynamicalSystem,
    pub(crate) samples: Vec<Sample>,
    pub(crate) tol: f64,
    pub(crate) dense_points: usize,
    pub(crate) solution: OdeSolution,
}

impl Trajectory {
    pub fn system(&self) -> &DynamicalSystem {
        &self.system
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn stats(&self) -> StepStats {
        self.solution.stats
    }

    pub fn start_time(&self) -> f64 {
        self.solution.t0
    }

    pub fn end_time(&self) -> f64 {
        self.solution.t_end
    }

    pub(crate) fn dim(&self) -> usize {
        self.system.dim()
    }

    pub(crate) fn solution(&self) -> &OdeSolution {
        &self.solution
    }

    pub(crate) fn from_parts(
        system: DynamicalSystem,
        samples: Vec<Sample>,
        tol: f64,
        dense_points: usize,
        solution: OdeSolution,
    ) -> Self {
        Trajectory {
            system,
            samples,
            tol,
            dense_points,
            solution,
        }
    }

    /// State at an arbitrary time inside the integrated range. A time that
    /// exactly matches a stored sample returns that sample unchanged;
    /// anything else is evaluated from the continuous extension.
    pub fn sample_at(&self, t: f64) -> Result<Sample> {
        if let Ok(idx) = self
            .samples
            .binary_search_by(|s| s.t.partial_cmp(&t).expect("sample times are finite"))
        {
            return Ok(self.samples[idx].clone());
        }
        let y = self.solution.sample(t)?;
        Ok(unpack_sample(t, &y, self.dim()))
    }

    /// Recurrence distance `|q(t) - q(0)| + |qdot(t) - qdot(0)|` used by
    /// period detection, normalized by `1 + |q(0)| + |qdot(0)|`.
    fn recurrence_distance(&self, t: f64) -> Result<f64> {
        let s0 = &self.samples[0];
        let s = self.sample_at(t)?;
        let scale = 1.0 + s0.q.norm() + s0.qdot.norm();
        Ok(((&s.q - &s0.q).norm() + (&s.qdot - &s0.qdot).norm()) / scale)
    }

    /// Scans for the first recurrence of the initial state and refines it
    /// by golden-section minimization. Returns `Aperiodic` when no grid
    /// local minimum recurs within `tol_period` (relative to the
    /// initial-state scale).
    pub fn detect_period(&self, tol_period: f64) -> Result<PeriodDetection> {
        if !(tol_period > 0.0) {
            return Err(Error::usage("tol_period must be positive"));
        }
        if self.samples.len() < 5 {
            return Err(Error::usage("trajectory has too few samples for period detection"));
        }
        let d: Vec<f64> = self
            .samples
            .iter()
            .map(|s| self.recurrence_distance(s.t))
            .collect::<Result<_>>()?;
        let d_max = d.iter().cloned().fold(0.0_f64, f64::max);
        if d_max <= 10.0 * tol_period {
            // The state never leaves its initial neighborhood; there is no
            // recurrence structure to resolve.
            return Ok(PeriodDetection::Aperiodic);
        }
        for i in 1..self.samples.len() - 1 {
            if d[i] <= d[i - 1] && d[i] <= d[i + 1] && d[i] < 0.5 * d_max {
                let lo = self.samples[i - 1].t;
                let hi = self.samples[i + 1].t;
                let (t_star, d_star) = self.golden_minimize(lo, hi)?;
                if d_star <= tol_period {
                    return Ok(PeriodDetection::Periodic {
                        period: t_star - self.samples[0].t,
                        recurrence: d_star,
                    });
                }
            }
        }
        Ok(PeriodDetection::Aperiodic)
    }

    fn golden_minimize(&self, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
        const INV_PHI2: f64 = 0.381_966_011_250_105_2; // (3 - sqrt 5) / 2
        let mut x1 = a + INV_PHI2 * (b - a);
        let mut x2 = b - INV_PHI2 * (b - a);
        let mut f1 = self.recurrence_distance(x1)?;
        let mut f2 = self.recurrence_distance(x2)?;
        for _ in 0..200 {
            if (b - a).abs() < 1e-13 * b.abs().max(1.0) {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = a + INV_PHI2 * (b - a);
                f1 = self.recurrence_distance(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = b - INV_PHI2 * (b - a);
                f2 = self.recurrence_distance(x2)?;
            }
        }
        let t = 0.5 * (a + b);
        Ok((t, self.recurrence_distance(t)?))
    }

    /// Worst normalized mismatch between the interpolant's `dS/dt` and the
    /// Lagrangian at the stored samples. This is the differential check
    /// that the action column really integrates `L`: the continuous
    /// extension is differentiated analytically (no finite-difference
    /// truncation), so at accepted steps the defect is zero by
    /// construction and between steps it is bounded by the interpolant's
    /// derivative accuracy, roughly `tol^(4/5)`.
    pub fn action_derivative_defect(&self) -> Result<f64> {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for s in &self.samples {
            let sdot = self.solution.sample_derivative(s.t)?[2 * n];
            let l = self.system.kinetic_energy(&s.qdot)
                - self.system.potential().value_raw(&s.q);
            worst = worst.max((sdot - l).abs() / (1.0 + l.abs()));
        }
        Ok(worst)
    }

    /// CSV rendering: header `t,q1..qn,qd1..qdn,S`, one row per sample,
    /// full double precision.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",q{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",qd{i}"));
        }
        out.push_str(",S\n");
        for s in &self.samples {
            out.push_str(&format_float(s.t));
            for v in s.q.iter() {
                out.push(',');
                out.push_str(&format_float(*v));
            }
            for v in s.qdot.iter() {
                out.push(',');
                out.push_str(&format_float(*v));
            }
            out.push(',');
            out.push_str(&format_float(s.action));
            out.push('\n');
        }
        out
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// 17 significant digits: round-trips f64 exactly and keeps output
/// byte-stable across runs.
pub(crate) fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn pack_state(q: &DVector<f64>, qdot: &DVector<f64>, action: f64) -> DVector<f64> {
    let n = q.len();
    let mut y = DVector::zeros(2 * n + 1);
    y.rows_mut(0, n).copy_from(q);
    y.rows_mut(n, n).copy_from(qdot);
    y[2 * n] = action;
    y
}

pub(crate) fn unpack_sample(t: f64, y: &DVector<f64>, n: usize) -> Sample {
    Sample {
        t,
        q: y.rows(0, n).into_owned(),
        qdot: y.rows(n, n).into_owned(),
        action: y[2 * n],
    }
}

/// Integrates the equations of motion plus `dS/dt = L` with default
/// options (other than the tolerance).
pub fn integrate_trajectory(
    sys: &DynamicalSystem,
    ic: &PhaseState,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let opts = IntegrateOptions {
        tol,
        ..IntegrateOptions::default()
    };
    integrate_with_options(sys, ic, t_end, &opts)
}

/// Integrates from `ic.t` to `t_end`, sampling on the union of accepted
/// steps and a uniform `dense_points` grid.
pub fn integrate_with_options(
    sys: &DynamicalSystem,
    ic: &PhaseState,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if opts.dense_points < 2 {
        return Err(Error::usage("dense_points must be at least 2"));
    }
    // Validates dimensions and rejects singular starting configurations.
    sys.lagrangian(ic)?;

    let n = sys.dim();
    let potential = sys.potential().clone();
    let mass = sys.mass_matrix().clone();
    let mass_inv = sys.mass_inverse().clone();

    let rhs = move |_t: f64, y: &DVector<f64>, dy: &mut DVector<f64>| {
        let q = y.rows(0, n);
        let qdot = y.rows(n, n);
        dy.rows_mut(0, n).copy_from(&qdot);
        let grad = potential.gradient_raw(&q.into_owned());
        dy.rows_mut(n, n).copy_from(&(&mass_inv * (-grad)));
        let kinetic = 0.5 * (qdot.transpose() * &mass * qdot)[(0, 0)];
        dy[2 * n] = kinetic - potential.value_raw(&q.into_owned());
    };

    let y0 = pack_state(&ic.q, &ic.qdot, opts.initial_action);
    let ode_opts = OdeOptions {
        tol: opts.tol,
        max_steps: opts.max_steps,
        h_max: None,
    };
    let solution = ode::solve(rhs, ic.t, y0, t_end, &ode_opts)?;
    let samples = build_samples(&solution, n, opts.dense_points);
    Ok(Trajectory {
        system: sys.clone(),
        samples,
        tol: opts.tol,
        dense_points: opts.dense_points,
        solution,
    })
}

/// Union of accepted step endpoints and a uniform grid, strictly
/// increasing. Step endpoints win ties so stored values stay exactly the
/// integrator's accepted states.
pub(crate) fn build_samples(solution: &OdeSolution, n: usize, dense_points: usize) -> Vec<Sample> {
    let t0 = solution.t0;
    let t_end = solution.t_end;
    let span = t_end - t0;
    let merge_tol = 1e-9 * span.abs().max(1.0);

    let endpoint_ts: Vec<f64> = solution.endpoints.iter().map(|(t, _)| *t).collect();
    let mut times: Vec<f64> = endpoint_ts.clone();
    for j in 0..dense_points {
        let t = t0 + span * (j as f64) / ((dense_points - 1) as f64);
        let pos = endpoint_ts.partition_point(|&e| e < t);
        let near_prev = pos > 0 && (t - endpoint_ts[pos - 1]).abs() <= merge_tol;
        let near_next = pos < endpoint_ts.len() && (endpoint_ts[pos] - t).abs() <= merge_tol;
        if !near_prev && !near_next {
            times.push(t);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));

    let mut samples = Vec::with_capacity(times.len());
    let mut endpoint_iter = solution.endpoints.iter().peekable();
    for &t in &times {
        let from_endpoint = endpoint_iter
            .peek()
            .map(|(te, _)| *te == t)
            .unwrap_or(false);
        let y = if from_endpoint {
            endpoint_iter.next().unwrap().1.clone()
        } else {
            solution.sample(t).expect("grid time inside range")
        };
        samples.push(unpack_sample(t, &y, n));
    }
    samples
}
