//! Dilation charges of the free particle.
//!
//! With no potential the admissibility constraint is vacuous: every
//! exponent pair (a, b) generates a symmetry. The charge works out to
//! Q = a·q̇ᵀM(q − t q̇) — independent of b, because the free motion's
//! energy and action terms cancel against each other.
//!
//! Run with: cargo run --example free_dilation

use scalesym::charge::{free_dilation_charge, noether_charge_series};
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState, ScalingLaw};

fn main() {
    let sys = DynamicalSystem::free(2).unwrap();
    let ic = PhaseState::from_slices(0.0, &[1.0, 0.5], &[2.0, -1.0]);
    let traj = integrate_trajectory(&sys, &ic, 3.0, 1e-10).unwrap();

    // Same a, three very different b: the same conserved number.
    println!("charge for a = 1 under different time exponents:");
    for b in [0.0, 1.0, 2.5] {
        let law = ScalingLaw::new(1.0, b).unwrap();
        let series = noether_charge_series(&sys, &law, &traj).unwrap();
        let q0 = series.initial_value();
        println!(
            "  (a, b, c) = (1, {b}, {}):  Q = {q0:+.12}, drift {:.2e}",
            law.c(),
            series.drift_abs()
        );
    }

    // The closed form, evaluated independently of the integration.
    let closed = free_dilation_charge(&traj, 1.0).unwrap();
    println!();
    println!(
        "closed form a·q̇ᵀM(q − t q̇) at t = 0: {:+.12}",
        closed.initial_value()
    );
    let worst = closed
        .values()
        .iter()
        .map(|(_, v)| (v - closed.initial_value()).abs())
        .fold(0.0f64, f64::max);
    println!("largest deviation along the run:      {worst:.2e}");
}
