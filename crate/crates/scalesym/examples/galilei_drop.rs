//! A dropped particle's vanishing rescaling charge.
//!
//! The uniform-force potential V = g·q has degree 1, so the matched law
//! is (a, b, c) = (2, 1, 3). Released from rest, every term of
//! Q = 2 qᵀMq̇ − t H − 3S is individually nonzero during the fall, yet
//! their combination stays pinned at the initial value 0.
//!
//! Run with: cargo run --example galilei_drop

use scalesym::charge::noether_charge_series;
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState, ScalingLaw};

fn main() {
    let g = 2.0;
    let sys = DynamicalSystem::linear_force(1, g).unwrap();
    let ic = PhaseState::from_slices(0.0, &[0.0], &[0.0]);
    let law = ScalingLaw::new(2.0, 1.0).unwrap();

    let traj = integrate_trajectory(&sys, &ic, 2.0, 1e-10).unwrap();
    let series = noether_charge_series(&sys, &law, &traj).unwrap();
    let parts = series.decomposition().expect("built-in laws decompose");

    println!("law (a,b,c) = (2,1,3) on V = {g}·q, dropped from rest:");
    println!();
    println!(
        "{:>6}  {:>14}  {:>14}  {:>14}  {:>12}",
        "t", "2·qᵀMq̇", "−t·H", "−3·S", "Q (sum)"
    );
    let n = series.values().len();
    for i in (0..n).step_by(n / 8) {
        let (t, q_val) = series.values()[i];
        let p = &parts[i];
        println!(
            "{t:>6.3}  {:>14.9}  {:>14.9}  {:>14.9}  {q_val:>12.3e}",
            p.momentum_term, p.energy_term, p.action_term
        );
    }

    let worst = series
        .values()
        .iter()
        .map(|(_, v)| v.abs())
        .fold(0.0f64, f64::max);
    println!();
    println!("largest |Q| along the fall: {worst:.2e}");
    println!("(the terms grow like t³ individually but cancel identically)");
}
