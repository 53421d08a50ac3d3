//! Conserved rescaling charge on an elliptic orbit, and the third law.
//!
//! The inverse-distance potential has degree −1, so the matched law is
//! (a, b, c) = (2, 3, 1): blowing the orbit up by λ² stretches time by
//! λ³ and multiplies the action by λ. Along the motion the charge
//! Q = 2 qᵀMq̇ − 3 t H − S is constant; with the wrong exponents it
//! drifts immediately.
//!
//! Run with: cargo run --example kepler_rescaling

use scalesym::charge::{charge_drift_report, noether_charge_series};
use scalesym::integrate::PeriodDetection;
use scalesym::scaling::{apply_scaling, eom_residual};
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState, ScalingLaw};

fn main() {
    let sys = DynamicalSystem::kepler(2, 1.0).expect("two-dimensional orbit problem");
    let ic = PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.2]);

    // Slightly more than one revolution so the recurrence is visible.
    let traj = integrate_trajectory(&sys, &ic, 15.2, 1e-10).expect("integration succeeds");
    let period = match traj.detect_period(1e-6).unwrap() {
        PeriodDetection::Periodic { period, .. } => period,
        PeriodDetection::Aperiodic => unreachable!("bound orbits recur"),
    };
    println!("orbital period        T  = {period:.9}");

    let matched = ScalingLaw::new(2.0, 3.0).unwrap();
    let series = noether_charge_series(&sys, &matched, &traj).unwrap();
    let drift = charge_drift_report(&series).unwrap();
    println!(
        "matched law (2,3,1):  Q(0) = {:+.9}, relative drift {:.2e}",
        series.initial_value(),
        drift.drift_rel
    );

    let wrong = ScalingLaw::new(1.0, 1.0).unwrap();
    let control = noether_charge_series(&sys, &wrong, &traj).unwrap();
    let control_drift = charge_drift_report(&control).unwrap();
    println!(
        "wrong law   (1,1,1):  relative drift {:.2e}  <- not a symmetry of this potential",
        control_drift.drift_rel
    );

    // The finite map: double the size scale.
    let lambda = 2.0f64;
    let mapped = apply_scaling(&traj, &matched, lambda).unwrap();
    let residual = eom_residual(&sys, &mapped).unwrap();
    let mapped_period = match mapped.detect_period(1e-6).unwrap() {
        PeriodDetection::Periodic { period, .. } => period,
        PeriodDetection::Aperiodic => unreachable!(),
    };
    println!();
    println!("rescaled orbit with lambda = {lambda}:");
    println!("  equations-of-motion residual  {residual:.2e}");
    println!(
        "  period ratio                  {:.9}  (lambda^b = {})",
        mapped_period / period,
        lambda.powf(matched.b())
    );
    let s_end = traj.samples().last().unwrap().action;
    let s_end_mapped = mapped.samples().last().unwrap().action;
    println!(
        "  action ratio                  {:.9}  (lambda^c = {})",
        s_end_mapped / s_end,
        lambda.powf(matched.c())
    );
}
