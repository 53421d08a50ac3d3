//! A vacuum plane wave and its homothety.
//!
//! The profile K = diag(−Ω², +Ω²) is traceless, so the spacetime
//! dq₁² + dq₂² + 2 dt ds + qᵀKq dt² is a vacuum pp-wave. Its transverse
//! geodesics from rest are a cosine and a hyperbolic cosine, the
//! vertical coordinate follows in closed form, and q∂q + 2s∂s rescales
//! the metric exactly (conformal factor 2, vertical exponent −2),
//! giving every null geodesic a vanishing homothety charge.
//!
//! Run with: cargo run --example brdicka_wave

use scalesym::bargmann::{
    chrono_projective_check, homothety_charge, homothety_map_worldline, lie_derivative_metric,
    lift_trajectory, null_residual, upstairs_null_geodesic, BargmannMetric, ConformalVector,
    Event, PPWaveProfile, Tangent,
};
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState};

fn main() {
    let omega = 1.0f64;
    let profile = PPWaveProfile::brdicka(omega);
    println!(
        "wave profile {}: trace {} (vacuum: {})",
        profile.kind_name(),
        profile.trace(0.0),
        profile.is_vacuum(0.0)
    );

    // Geodesic from rest at q = (1, 1): closed form available.
    let metric = BargmannMetric::from_profile(profile);
    let s0 = 0.7;
    let event = Event::from_slices(0.0, &[1.0, 1.0], s0);
    let tangent = Tangent::from_slices(1.0, &[0.0, 0.0], 0.0);
    let geo = upstairs_null_geodesic(&metric, &event, &tangent, 3.0, 1e-11).unwrap();

    let mut worst_q = 0.0f64;
    let mut worst_s = 0.0f64;
    for w in geo.samples() {
        let t = w.t;
        worst_q = worst_q
            .max((w.q[0] - (omega * t).cos()).abs())
            .max((w.q[1] - (omega * t).cosh()).abs());
        let s_exact = s0 + (omega / 4.0) * ((2.0 * omega * t).sin() - (2.0 * omega * t).sinh());
        worst_s = worst_s.max((w.s - s_exact).abs());
    }
    println!();
    println!("geodesic from rest vs. closed form cos/cosh on t ∈ [0, 3]:");
    println!("  max transverse error = {worst_q:.2e}");
    println!("  max vertical error   = {worst_s:.2e}");

    // The same worldline is the lift of the downstairs saddle system.
    let sys = DynamicalSystem::saddle(omega).unwrap();
    let ic = PhaseState::from_slices(0.0, &[1.0, 1.0], &[0.0, 0.0]);
    let traj = integrate_trajectory(&sys, &ic, 3.0, 1e-11).unwrap();
    let lift = lift_trajectory(&traj, s0);
    println!(
        "  lift of the saddle system: null residual {:.2e}",
        null_residual(&metric, &lift).unwrap()
    );

    // Homothety: exact conformal rescaling, charge identically zero.
    let y = ConformalVector::homothety();
    let lie = lie_derivative_metric(&metric, &y, &Event::from_slices(0.4, &[1.1, 0.8], -0.3))
        .unwrap();
    let psi = chrono_projective_check(&y, 2).psi().unwrap();
    println!();
    println!("homothety q∂q + 2s∂s:");
    println!("  conformal factor 2χ = {}   (defect {:.2e})", lie.two_chi, lie.defect);
    println!("  vertical exponent ψ = {psi}");

    let series = homothety_charge(&lift, &traj).unwrap();
    println!(
        "  charge qᵀMq̇ + 2(s − s₀) along the lift: max |Q| = {:.2e}",
        series
            .values()
            .iter()
            .map(|(_, v)| v.abs())
            .fold(0.0f64, f64::max)
    );

    // And it maps null geodesics to null geodesics.
    let mapped = homothety_map_worldline(&lift, 1.3).unwrap();
    println!(
        "  image under λ = 1.3: null residual {:.2e}",
        null_residual(&metric, &mapped).unwrap()
    );
}
