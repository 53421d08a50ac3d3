//! Period averages and the generalized virial theorem.
//!
//! For periodic motion in a potential homogeneous of degree `k`, the
//! conservation of the scaling charge forces the period averages of
//! kinetic and potential energy to satisfy `⟨K⟩ = (k/2)⟨V⟩`. The averages
//! here are computed by direct quadrature — not via the conservation law —
//! so the identity is an actual numerical test rather than a tautology.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{PeriodDetection, Trajectory};

/// Number of uniform Simpson intervals used for the period averages.
const AVERAGE_INTERVALS: usize = 2048;

/// Outcome of a virial-theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirialReport {
    /// Period the averages were taken over.
    #[serde(rename = "T")]
    pub period: f64,
    /// `(1/T)∫₀ᵀ K dt`; nonnegative since `K` is.
    #[serde(rename = "avg_K")]
    pub avg_k: f64,
    /// `(1/T)∫₀ᵀ V dt`.
    #[serde(rename = "avg_V")]
    pub avg_v: f64,
    /// `⟨K⟩/⟨V⟩`; absent when `⟨V⟩ = 0`.
    pub ratio: Option<f64>,
    /// `k/2`, the value the ratio must take.
    pub expected_ratio: f64,
    /// `|⟨K⟩ − (k/2)⟨V⟩|`. Scale it against `1 + |E|` when judging
    /// tolerances: both averages are energy-sized quantities.
    pub defect: f64,
    /// Whether `defect ≤ tol`.
    pub pass: bool,
}

/// Period averages `(⟨K⟩, ⟨V⟩)` over `[start, start + T]` by composite
/// Simpson quadrature on a uniform grid through the continuous extension.
pub fn period_averages(traj: &Trajectory, period: f64) -> Result<(f64, f64)> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::usage("period must be positive"));
    }
    let t0 = traj.start_time();
    let span = traj.end_time() - t0;
    // Tiny slack so a detected period landing a rounding error past the
    // end of the trajectory still evaluates.
    if period > span * (1.0 + 1e-12) {
        return Err(Error::usage(format!(
            "period {period} exceeds the integrated span {span}"
        )));
    }
    let period = period.min(span);
    let sys = traj.system().clone();
    let h = period / (AVERAGE_INTERVALS as f64);
    let mut sum_k = 0.0_f64;
    let mut sum_v = 0.0_f64;
    for i in 0..=AVERAGE_INTERVALS {
        let t = t0 + h * (i as f64);
        let s = traj.sample_at(t)?;
        let weight = if i == 0 || i == AVERAGE_INTERVALS {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum_k += weight * sys.kinetic_energy(&s.qdot);
        sum_v += weight * sys.potential_value(&s.q)?;
    }
    let factor = h / 3.0 / period;
    Ok((factor * sum_k, factor * sum_v))
}

/// Checks `⟨K⟩ = (k/2)⟨V⟩` at the given absolute tolerance.
pub fn virial_check(k: f64, period: f64, avgs: (f64, f64), tol: f64) -> VirialReport {
    let (avg_k, avg_v) = avgs;
    let expected_ratio = k / 2.0;
    let defect = (avg_k - expected_ratio * avg_v).abs();
    VirialReport {
        period,
        avg_k,
        avg_v,
        ratio: if avg_v != 0.0 { Some(avg_k / avg_v) } else { None },
        expected_ratio,
        defect,
        pass: defect <= tol,
    }
}

/// One-stop check: detects the period, averages over it, and tests the
/// virial identity for the system's homogeneity degree.
pub fn virial_report(traj: &Trajectory, tol_period: f64, tol: f64) -> Result<VirialReport> {
    let k = traj
        .system()
        .homogeneity_degree()
        .ok_or_else(|| Error::usage("virial check requires a declared homogeneity degree"))?;
    match traj.detect_period(tol_period)? {
        PeriodDetection::Periodic { period, .. } => {
            let avgs = period_averages(traj, period)?;
            Ok(virial_check(k, period, avgs, tol))
        }
        PeriodDetection::Aperiodic => Err(Error::domain(
            "trajectory is not periodic; virial averages need a full period",
        )),
    }
}
