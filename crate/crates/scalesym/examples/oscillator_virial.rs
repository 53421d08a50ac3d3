//! Virial averages and the homothety charge of the oscillator.
//!
//! For a degree-k potential the period averages obey ⟨K⟩ = (k/2)·⟨V⟩ —
//! a direct consequence of the rescaling charge being conserved. The
//! oscillator (k = 2) gives ⟨K⟩ = ⟨V⟩, and its matched law (1, 0, 2)
//! has no time term at all: the charge is qᵀMq̇ − 2S ≡ q(0)ᵀMq̇(0).
//!
//! Run with: cargo run --example oscillator_virial

use scalesym::charge::noether_charge_series;
use scalesym::virial::virial_report;
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState, ScalingLaw};

fn main() {
    let sys = DynamicalSystem::oscillator(2, 1.0).unwrap();
    let ic = PhaseState::from_slices(0.0, &[1.0, 0.3], &[-0.2, 1.1]);
    let traj = integrate_trajectory(&sys, &ic, 4.0 * std::f64::consts::PI, 1e-10).unwrap();

    let report = virial_report(&traj, 1e-6, 1e-6).unwrap();
    println!("detected period  T    = {:.12}", report.period);
    println!("average kinetic  ⟨K⟩  = {:.12}", report.avg_k);
    println!("average potential⟨V⟩  = {:.12}", report.avg_v);
    println!(
        "ratio ⟨K⟩/⟨V⟩         = {:.12}   (expected {})",
        report.ratio.unwrap(),
        report.expected_ratio
    );

    // Same story for an orbit: k = −1 means ⟨K⟩ = −½⟨V⟩.
    let kepler = DynamicalSystem::kepler(2, 1.0).unwrap();
    let kepler_ic = PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.2]);
    let kepler_traj = integrate_trajectory(&kepler, &kepler_ic, 15.0, 1e-10).unwrap();
    let kepler_report = virial_report(&kepler_traj, 1e-6, 1e-5).unwrap();
    println!();
    println!(
        "orbit (k = −1): ⟨K⟩ = {:.9}, −½⟨V⟩ = {:.9}",
        kepler_report.avg_k,
        -0.5 * kepler_report.avg_v
    );

    // The oscillator charge keeps its initial value q(0)·q̇(0).
    let law = ScalingLaw::new(1.0, 0.0).unwrap();
    let series = noether_charge_series(&sys, &law, &traj).unwrap();
    println!();
    println!(
        "homothety charge qᵀMq̇ − 2S: initial {:+.12}, drift {:.2e}",
        series.initial_value(),
        series.drift_abs()
    );
    println!(
        "q(0)ᵀMq̇(0)                : {:+.12}",
        ic.q.dot(&ic.qdot)
    );
}
