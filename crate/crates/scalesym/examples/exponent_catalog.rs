//! The admissible scaling exponents for homogeneous potentials.
//!
//! A potential with `V(μq) = μᵏ V(q)` admits the rescaling
//! `t → λᵇ t, q → λᵃ q` exactly when `(k − 2)a + 2b = 0`; the conserved
//! charge then carries the action with weight `c = 2a − b`. This example
//! prints the catalog of familiar degrees and verifies the algebra.
//!
//! Run with: cargo run --example exponent_catalog

use scalesym::solve_exponents;

fn main() {
    let catalog = [
        (0.0, 1.0, "free particle / constant"),
        (-2.0, 1.0, "inverse-square"),
        (-1.0, 2.0, "inverse-distance (orbits)"),
        (1.0, 2.0, "uniform force"),
        (2.0, 1.0, "harmonic oscillator"),
        (4.0, 1.0, "quartic well"),
    ];

    println!("{:>6} {:>5} {:>5} {:>5} {:>6}   potential", "k", "a", "b", "c", "z=b/a");
    for (k, a, label) in catalog {
        let law = solve_exponents(k, a).expect("every degree admits a law");
        println!(
            "{:>6} {:>5} {:>5} {:>5} {:>6}   {label}",
            k,
            law.a(),
            law.b(),
            law.c(),
            law.z().unwrap(),
        );
        assert_eq!((k - 2.0) * law.a() + 2.0 * law.b(), 0.0);
        assert_eq!(law.c(), 2.0 * law.a() - law.b());
    }

    println!();
    println!("the degree fixes b/a = (2 − k)/2, so z = b/a is the dynamical exponent:");
    println!("  orbits (k = −1) get z = 3/2 — the cube of the size ratio is the");
    println!("  square of the period ratio — while k = 2 gives z = 0: the");
    println!("  oscillator's period does not change under rescaling at all.");
}
