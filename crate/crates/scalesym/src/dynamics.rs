//! Mechanical systems with homogeneous potentials.
//!
//! A [`DynamicalSystem`] is a natural Lagrangian system
//! `L = (1/2) qdot^T M qdot - V(q)` with a constant symmetric
//! positive-definite mass matrix `M` and a potential that is homogeneous of
//! some degree `k`, i.e. `V(mu q) = mu^k V(q)` for `mu > 0`. The degree is
//! what couples the dynamics to the scaling machinery in the rest of the
//! crate, so it is carried on the system and can be verified numerically
//! with [`DynamicalSystem::homogeneity_check`].

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Configurations closer to a singular origin than this are rejected.
pub const SINGULARITY_RADIUS: f64 = 1e-12;

/// Relative defect allowed by [`DynamicalSystem::homogeneity_check`].
pub const HOMOGENEITY_TOL: f64 = 1e-10;

/// Finite-difference step for gradients of user-supplied potentials.
const CUSTOM_GRADIENT_STEP: f64 = 1e-6;

static CUSTOM_POTENTIAL_IDS: AtomicU64 = AtomicU64::new(1);

type PotentialFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Potential energy function of a mechanical system.
///
/// All built-ins are homogeneous: `Zero` (degree 0 by convention),
/// `Kepler` (-1), `InverseSquare` (-2), `LinearForce` (+1) and the two
/// quadratics (+2). `Custom` wraps an arbitrary callable together with a
/// declared degree (or `None` when the caller makes no homogeneity claim).
#[derive(Clone)]
pub enum Potential {
    /// `V = 0`, free motion.
    Zero,
    /// `V = -alpha / |q|`.
    Kepler { alpha: f64 },
    /// `V = beta / |q|^2`.
    InverseSquare { beta: f64 },
    /// `V = g * (q_1 + ... + q_n)`, a uniform force field.
    LinearForce { g: f64 },
    /// `V = (omega^2 / 2) |q|^2`.
    HarmonicOscillator { omega: f64 },
    /// `V = (omega^2 / 2) (q_1^2 - q_2^2)`; requires a planar system.
    /// This is the transverse potential of a linearly polarized pp-wave.
    SaddleOscillator { omega: f64 },
    /// User-supplied `V(q)` with an optional declared homogeneity degree.
    Custom {
        degree: Option<f64>,
        f: PotentialFn,
        id: u64,
    },
}

impl Potential {
    /// Wraps a callable claiming `V(mu q) = mu^degree V(q)`.
    pub fn custom_homogeneous<F>(degree: f64, f: F) -> Self
    where
        F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        Potential::Custom {
            degree: Some(degree),
            f: Arc::new(f),
            id: CUSTOM_POTENTIAL_IDS.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// Wraps a callable without any homogeneity claim.
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        Potential::Custom {
            degree: None,
            f: Arc::new(f),
            id: CUSTOM_POTENTIAL_IDS.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// Homogeneity degree `k`, if one is known or declared.
    pub fn degree(&self) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::Kepler { .. } => Some(-1.0),
            Potential::InverseSquare { .. } => Some(-2.0),
            Potential::LinearForce { .. } => Some(1.0),
            Potential::HarmonicOscillator { .. } => Some(2.0),
            Potential::SaddleOscillator { .. } => Some(2.0),
            Potential::Custom { degree, .. } => *degree,
        }
    }

    /// True for potentials that blow up at `q = 0`.
    pub fn singular_at_origin(&self) -> bool {
        matches!(
            self,
            Potential::Kepler { .. } | Potential::InverseSquare { .. }
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Potential::Zero => "zero",
            Potential::Kepler { .. } => "kepler",
            Potential::InverseSquare { .. } => "inverse-square",
            Potential::LinearForce { .. } => "linear",
            Potential::HarmonicOscillator { .. } => "oscillator",
            Potential::SaddleOscillator { .. } => "saddle",
            Potential::Custom { .. } => "custom",
        }
    }

    /// Raw evaluation without the singularity guard; may return `inf`.
    pub(crate) fn value_raw(&self, q: &DVector<f64>) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Kepler { alpha } => -alpha / q.norm(),
            Potential::InverseSquare { beta } => beta / q.norm_squared(),
            Potential::LinearForce { g } => g * q.iter().sum::<f64>(),
            Potential::HarmonicOscillator { omega } => 0.5 * omega * omega * q.norm_squared(),
            Potential::SaddleOscillator { omega } => {
                0.5 * omega * omega * (q[0] * q[0] - q[1] * q[1])
            }
            Potential::Custom { f, .. } => f(q),
        }
    }

    /// Raw gradient; analytic for built-ins, central differences for
    /// `Custom`.
    pub(crate) fn gradient_raw(&self, q: &DVector<f64>) -> DVector<f64> {
        match self {
            Potential::Zero => DVector::zeros(q.len()),
            Potential::Kepler { alpha } => {
                let r = q.norm();
                q * (alpha / (r * r * r))
            }
            Potential::InverseSquare { beta } => {
                let r2 = q.norm_squared();
                q * (-2.0 * beta / (r2 * r2))
            }
            Potential::LinearForce { g } => DVector::from_element(q.len(), *g),
            Potential::HarmonicOscillator { omega } => q * (omega * omega),
            Potential::SaddleOscillator { omega } => {
                let w2 = omega * omega;
                DVector::from_vec(vec![w2 * q[0], -w2 * q[1]])
            }
            Potential::Custom { f, .. } => {
                let mut grad = DVector::zeros(q.len());
                let mut probe = q.clone();
                for i in 0..q.len() {
                    let h = CUSTOM_GRADIENT_STEP * (1.0 + q[i].abs());
                    probe[i] = q[i] + h;
                    let plus = f(&probe);
                    probe[i] = q[i] - h;
                    let minus = f(&probe);
                    probe[i] = q[i];
                    grad[i] = (plus - minus) / (2.0 * h);
                }
                grad
            }
        }
    }

    fn hash_descriptor<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Potential::Zero => {}
            Potential::Kepler { alpha } => alpha.to_bits().hash(state),
            Potential::InverseSquare { beta } => beta.to_bits().hash(state),
            Potential::LinearForce { g } => g.to_bits().hash(state),
            Potential::HarmonicOscillator { omega } => omega.to_bits().hash(state),
            Potential::SaddleOscillator { omega } => omega.to_bits().hash(state),
            Potential::Custom { id, .. } => id.hash(state),
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Kepler { alpha } => write!(f, "Kepler {{ alpha: {alpha} }}"),
            Potential::InverseSquare { beta } => write!(f, "InverseSquare {{ beta: {beta} }}"),
            Potential::LinearForce { g } => write!(f, "LinearForce {{ g: {g} }}"),
            Potential::HarmonicOscillator { omega } => {
                write!(f, "HarmonicOscillator {{ omega: {omega} }}")
            }
            Potential::SaddleOscillator { omega } => {
                write!(f, "SaddleOscillator {{ omega: {omega} }}")
            }
            Potential::Custom { degree, id, .. } => {
                write!(f, "Custom {{ degree: {degree:?}, id: {id} }}")
            }
        }
    }
}

/// A point of the velocity phase space together with the time it was
/// reached.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
}

impl PhaseState {
    pub fn new(t: f64, q: DVector<f64>, qdot: DVector<f64>) -> Self {
        PhaseState { t, q, qdot }
    }

    pub fn from_slices(t: f64, q: &[f64], qdot: &[f64]) -> Self {
        PhaseState {
            t,
            q: DVector::from_row_slice(q),
            qdot: DVector::from_row_slice(qdot),
        }
    }
}

/// Natural mechanical system `L = (1/2) qdot^T M qdot - V(q)`.
#[derive(Debug, Clone)]
pub struct DynamicalSystem {
    dim: usize,
    mass: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
    potential: Potential,
}

impl DynamicalSystem {
    /// Builds a system, validating the mass matrix (exactly symmetric,
    /// positive definite) and the potential/dimension pairing.
    pub fn new(dim: usize, mass: DMatrix<f64>, potential: Potential) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("system dimension must be at least 1"));
        }
        if mass.nrows() != dim || mass.ncols() != dim {
            return Err(Error::usage(format!(
                "mass matrix must be {dim}x{dim}, got {}x{}",
                mass.nrows(),
                mass.ncols()
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if mass[(i, j)] != mass[(j, i)] {
                    return Err(Error::usage(format!(
                        "mass matrix must be symmetric: M[{i},{j}] = {} != M[{j},{i}] = {}",
                        mass[(i, j)],
                        mass[(j, i)]
                    )));
                }
            }
        }
        let eigen = mass.clone().symmetric_eigen();
        let max_abs = eigen.eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let min = eigen.eigenvalues.iter().fold(f64::INFINITY, |m, &l| m.min(l));
        if !(min > 1e-12 * max_abs.max(1.0)) {
            return Err(Error::usage(format!(
                "mass matrix must be positive definite (smallest eigenvalue {min:.3e})"
            )));
        }
        if matches!(potential, Potential::SaddleOscillator { .. }) && dim != 2 {
            return Err(Error::usage(
                "the saddle oscillator is defined on a planar system (dim = 2)",
            ));
        }
        let mass_inv = mass
            .clone()
            .cholesky()
            .ok_or_else(|| Error::usage("mass matrix is not positive definite"))?
            .inverse();
        Ok(DynamicalSystem {
            dim,
            mass,
            mass_inv,
            potential,
        })
    }

    /// Unit-mass system with the given potential.
    pub fn unit_mass(dim: usize, potential: Potential) -> Result<Self> {
        DynamicalSystem::new(dim, DMatrix::identity(dim, dim), potential)
    }

    pub fn free(dim: usize) -> Result<Self> {
        DynamicalSystem::unit_mass(dim, Potential::Zero)
    }

    pub fn kepler(dim: usize, alpha: f64) -> Result<Self> {
        DynamicalSystem::unit_mass(dim, Potential::Kepler { alpha })
    }

    pub fn inverse_square(dim: usize, beta: f64) -> Result<Self> {
        DynamicalSystem::unit_mass(dim, Potential::InverseSquare { beta })
    }

    pub fn linear_force(dim: usize, g: f64) -> Result<Self> {
        DynamicalSystem::unit_mass(dim, Potential::LinearForce { g })
    }

    pub fn oscillator(dim: usize, omega: f64) -> Result<Self> {
        DynamicalSystem::unit_mass(dim, Potential::HarmonicOscillator { omega })
    }

    pub fn saddle(omega: f64) -> Result<Self> {
        DynamicalSystem::unit_mass(2, Potential::SaddleOscillator { omega })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass_matrix(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn mass_inverse(&self) -> &DMatrix<f64> {
        &self.mass_inv
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn homogeneity_degree(&self) -> Option<f64> {
        self.potential.degree()
    }

    /// Stable identity used to match trajectories back to the system they
    /// were integrated from.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.dim.hash(&mut h);
        for v in self.mass.iter() {
            v.to_bits().hash(&mut h);
        }
        self.potential.hash_descriptor(&mut h);
        h.finish()
    }

    fn check_state_dim(&self, state: &PhaseState) -> Result<()> {
        if state.q.len() != self.dim || state.qdot.len() != self.dim {
            return Err(Error::usage(format!(
                "state dimension {}/{} does not match system dimension {}",
                state.q.len(),
                state.qdot.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn check_configuration(&self, q: &DVector<f64>) -> Result<()> {
        if self.potential.singular_at_origin() && q.norm() < SINGULARITY_RADIUS {
            return Err(Error::domain(format!(
                "configuration within {SINGULARITY_RADIUS:e} of the singular origin of a {} potential",
                self.potential.kind_name()
            )));
        }
        Ok(())
    }

    /// Potential energy at `q`.
    pub fn potential_value(&self, q: &DVector<f64>) -> Result<f64> {
        if q.len() != self.dim {
            return Err(Error::usage("configuration dimension mismatch"));
        }
        self.check_configuration(q)?;
        Ok(self.potential.value_raw(q))
    }

    /// Gradient of the potential at `q`.
    pub fn potential_gradient(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.dim {
            return Err(Error::usage("configuration dimension mismatch"));
        }
        self.check_configuration(q)?;
        Ok(self.potential.gradient_raw(q))
    }

    /// Kinetic energy `(1/2) qdot^T M qdot`.
    pub fn kinetic_energy(&self, qdot: &DVector<f64>) -> f64 {
        0.5 * (qdot.transpose() * &self.mass * qdot)[(0, 0)]
    }

    /// `L = K - V` at a phase state.
    pub fn lagrangian(&self, state: &PhaseState) -> Result<f64> {
        self.check_state_dim(state)?;
        self.check_configuration(&state.q)?;
        Ok(self.kinetic_energy(&state.qdot) - self.potential.value_raw(&state.q))
    }

    /// `H = K + V` at a phase state.
    pub fn hamiltonian(&self, state: &PhaseState) -> Result<f64> {
        self.check_state_dim(state)?;
        self.check_configuration(&state.q)?;
        Ok(self.kinetic_energy(&state.qdot) + self.potential.value_raw(&state.q))
    }

    /// `qddot = M^{-1} (-grad V)`.
    pub fn acceleration(&self, state: &PhaseState) -> Result<DVector<f64>> {
        self.check_state_dim(state)?;
        self.check_configuration(&state.q)?;
        Ok(&self.mass_inv * (-self.potential.gradient_raw(&state.q)))
    }

    /// Verifies `V(mu q) = mu^k V(q)` on deterministic pseudo-random
    /// samples with `|q|` in `[0.5, 2]` and `mu` cycling `{0.5, 2, 3}`.
    pub fn homogeneity_check(&self, samples: usize, seed: u64) -> Result<HomogeneityReport> {
        let k = self
            .potential
            .degree()
            .ok_or_else(|| Error::usage("homogeneity degree is unset for this potential"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu_cycle = [0.5, 2.0, 3.0];
        let mut max_defect = 0.0_f64;
        for i in 0..samples {
            let mut q = DVector::from_fn(self.dim, |_, _| rng.gen_range(-1.0..1.0));
            let norm = q.norm();
            if norm < 1e-3 {
                q = DVector::from_element(self.dim, 1.0 / (self.dim as f64).sqrt());
            } else {
                q /= norm;
            }
            q *= rng.gen_range(0.5..2.0);
            let mu = mu_cycle[i % mu_cycle.len()];
            let v = self.potential.value_raw(&q);
            let v_scaled = self.potential.value_raw(&(&q * mu));
            let defect = (v_scaled - mu.powf(k) * v).abs() / (1.0 + v.abs());
            max_defect = max_defect.max(defect);
        }
        Ok(HomogeneityReport {
            samples,
            degree: k,
            max_relative_defect: max_defect,
            pass: max_defect <= HOMOGENEITY_TOL,
        })
    }
}

/// Result of a numerical homogeneity verification.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HomogeneityReport {
    pub samples: usize,
    pub degree: f64,
    pub max_relative_defect: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(q: &[f64], qdot: &[f64]) -> PhaseState {
        PhaseState::from_slices(0.0, q, qdot)
    }

    #[test]
    fn free_lagrangian_is_kinetic_energy() {
        let sys = DynamicalSystem::free(2).unwrap();
        let l = sys.lagrangian(&state(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        assert_eq!(l, 12.5);
    }

    #[test]
    fn kepler_lagrangian_at_perihelion_state() {
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let l = sys.lagrangian(&state(&[1.0, 0.0], &[0.0, 1.2])).unwrap();
        assert!((l - 1.72).abs() < 1e-15);
    }

    #[test]
    fn oscillator_hamiltonian_splits_evenly() {
        let sys = DynamicalSystem::oscillator(3, 2.0).unwrap();
        let h = sys
            .hamiltonian(&state(&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]))
            .unwrap();
        assert_eq!(h, 4.0);
    }

    #[test]
    fn inverse_square_hamiltonian_at_rest() {
        let sys = DynamicalSystem::inverse_square(2, 0.5).unwrap();
        let h = sys.hamiltonian(&state(&[1.0, 1.0], &[0.0, 0.0])).unwrap();
        assert!((h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_plus_lagrangian_is_twice_kinetic() {
        let mass = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let sys =
            DynamicalSystem::new(2, mass.clone(), Potential::Kepler { alpha: 1.3 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let st = PhaseState::new(
                0.0,
                DVector::from_fn(2, |_, _| rng.gen_range(0.5..2.0)),
                DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)),
            );
            let h = sys.hamiltonian(&st).unwrap();
            let l = sys.lagrangian(&st).unwrap();
            let two_k = (st.qdot.transpose() * &mass * &st.qdot)[(0, 0)];
            assert!((h + l - two_k).abs() <= 1e-14 * (1.0 + two_k.abs()));
        }
    }

    #[test]
    fn kepler_acceleration_points_inward() {
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let a = sys.acceleration(&state(&[1.0, 0.0], &[0.0, 1.2])).unwrap();
        assert!((a[0] + 1.0).abs() < 1e-15);
        assert!(a[1].abs() < 1e-15);
    }

    #[test]
    fn linear_force_acceleration_is_constant() {
        let sys = DynamicalSystem::linear_force(1, 2.0).unwrap();
        let a = sys.acceleration(&state(&[5.0], &[0.3])).unwrap();
        assert_eq!(a[0], -2.0);
    }

    #[test]
    fn saddle_acceleration_attracts_first_axis_repels_second() {
        let sys = DynamicalSystem::saddle(1.0).unwrap();
        let a = sys.acceleration(&state(&[1.0, 1.0], &[0.0, 0.0])).unwrap();
        assert_eq!(a[0], -1.0);
        assert_eq!(a[1], 1.0);
    }

    #[test]
    fn mass_matrix_enters_acceleration() {
        let mass = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let sys = DynamicalSystem::new(2, mass, Potential::LinearForce { g: 1.0 }).unwrap();
        let a = sys.acceleration(&state(&[0.0, 0.0], &[0.0, 0.0])).unwrap();
        assert!((a[0] + 0.5).abs() < 1e-15);
        assert!((a[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn builtin_potentials_are_homogeneous() {
        let cases: Vec<(DynamicalSystem, f64)> = vec![
            (DynamicalSystem::kepler(2, 1.0).unwrap(), -1.0),
            (DynamicalSystem::inverse_square(3, 0.7).unwrap(), -2.0),
            (DynamicalSystem::linear_force(2, 1.5).unwrap(), 1.0),
            (DynamicalSystem::oscillator(3, 1.3).unwrap(), 2.0),
            (DynamicalSystem::saddle(0.8).unwrap(), 2.0),
        ];
        for (sys, k) in cases {
            let report = sys.homogeneity_check(60, 42).unwrap();
            assert_eq!(report.degree, k);
            assert!(
                report.pass,
                "{} potential failed homogeneity: defect {:.3e}",
                sys.potential().kind_name(),
                report.max_relative_defect
            );
        }
    }

    #[test]
    fn custom_cubic_norm_passes_with_declared_degree_three() {
        let pot = Potential::custom_homogeneous(3.0, |q: &DVector<f64>| q.norm().powi(3));
        let sys = DynamicalSystem::unit_mass(2, pot).unwrap();
        let report = sys.homogeneity_check(60, 3).unwrap();
        assert!(report.pass, "defect {:.3e}", report.max_relative_defect);
    }

    #[test]
    fn custom_cubic_norm_fails_with_declared_degree_two() {
        let pot = Potential::custom_homogeneous(2.0, |q: &DVector<f64>| q.norm().powi(3));
        let sys = DynamicalSystem::unit_mass(2, pot).unwrap();
        let report = sys.homogeneity_check(60, 3).unwrap();
        assert!(!report.pass);
        assert!(report.max_relative_defect > 0.1);
    }

    #[test]
    fn homogeneity_check_requires_declared_degree() {
        let sys = DynamicalSystem::unit_mass(2, Potential::custom(|q| q[0].cos())).unwrap();
        assert!(matches!(
            sys.homogeneity_check(10, 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn custom_gradient_matches_finite_differences_of_builtin() {
        let custom = Potential::custom_homogeneous(-1.0, |q: &DVector<f64>| -1.0 / q.norm());
        let builtin = Potential::Kepler { alpha: 1.0 };
        let q = DVector::from_row_slice(&[0.8, -0.6, 0.3]);
        let g_fd = custom.gradient_raw(&q);
        let g = builtin.gradient_raw(&q);
        assert!((g_fd - g).norm() < 1e-6);
    }

    #[test]
    fn kepler_rejects_the_origin() {
        let sys = DynamicalSystem::kepler(2, 1.0).unwrap();
        let err = sys.lagrangian(&state(&[0.0, 0.0], &[1.0, 0.0]));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn asymmetric_mass_matrix_is_rejected() {
        let mass = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        let err = DynamicalSystem::new(2, mass, Potential::Zero);
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn indefinite_mass_matrix_is_rejected() {
        let mass = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let err = DynamicalSystem::new(2, mass, Potential::Zero);
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn saddle_requires_two_dimensions() {
        let err = DynamicalSystem::unit_mass(3, Potential::SaddleOscillator { omega: 1.0 });
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn fingerprint_distinguishes_parameter_changes() {
        let a = DynamicalSystem::kepler(2, 1.0).unwrap();
        let b = DynamicalSystem::kepler(2, 1.5).unwrap();
        let c = DynamicalSystem::kepler(2, 1.0).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), c.fingerprint());
    }
}
