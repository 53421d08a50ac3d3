//! The charge as a phase-space generator.
//!
//! In Hamiltonian form the charge splits as Q = G − c·S with
//! G = a·p·q − b·t·H. Conservation of Q is equivalent to the bracket
//! condition {G, H} + ∂G/∂t = c·L∘legendre — checkable pointwise, with
//! no trajectory at all. G itself is only "partially conserved": it
//! drifts at the exact rate c·L, which is what the action term repairs.
//!
//! Run with: cargo run --example generator_phase_space

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scalesym::hamiltonian::{flow_consistency_defect, generator_residual, PhasePoint};
use scalesym::{integrate_trajectory, DynamicalSystem, PhaseState, ScalingLaw};

fn main() {
    let pairs = [
        (DynamicalSystem::kepler(2, 1.0).unwrap(), ScalingLaw::new(2.0, 3.0).unwrap()),
        (DynamicalSystem::oscillator(2, 1.0).unwrap(), ScalingLaw::new(1.0, 0.0).unwrap()),
        (DynamicalSystem::inverse_square(2, 0.8).unwrap(), ScalingLaw::new(1.0, 2.0).unwrap()),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!("generator residual |{{G,H}} + ∂G/∂t + c(H − p·∂H/∂p)| at 50 random phase points:");
    for (sys, law) in &pairs {
        let mut worst = 0.0f64;
        let mut worst_wrong = f64::INFINITY;
        let wrong = ScalingLaw::new(law.a(), law.b() + 1.0).unwrap();
        for _ in 0..50 {
            let q: Vec<f64> = (0..2)
                .map(|_| rng.gen_range(0.5..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let qdot: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let state = PhaseState::from_slices(rng.gen_range(0.0..3.0), &q, &qdot);
            let pt = PhasePoint::from_state(sys, &state);
            worst = worst.max(generator_residual(sys, law, &pt).unwrap());
            worst_wrong = worst_wrong.min(generator_residual(sys, &wrong, &pt).unwrap());
        }
        println!(
            "  {:<18} matched ({}, {}): {worst:.2e}   detuned ({}, {}): ≥ {worst_wrong:.2e}",
            sys.potential().kind_name(),
            law.a(),
            law.b(),
            wrong.a(),
            wrong.b(),
        );
    }

    // Along an actual flow, d/dt(G − cS) is zero to integration accuracy.
    println!();
    println!("flow-consistency defect max|d/dt (G − c·S)| along a trajectory:");
    let ics = [
        PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.0, 1.2]),
        PhaseState::from_slices(0.0, &[1.0, 0.2], &[-0.3, 1.0]),
        PhaseState::from_slices(0.0, &[1.0, 0.0], &[0.3, 1.2]),
    ];
    for ((sys, law), ic) in pairs.iter().zip(&ics) {
        let traj = integrate_trajectory(sys, ic, 3.0, 1e-10).unwrap();
        let defect = flow_consistency_defect(sys, law, &traj).unwrap();
        println!("  {:<18} {defect:.2e}", sys.potential().kind_name());
    }
}
