//! Embedded Dormand-Prince 5(4) solver with a continuous extension.
//!
//! This is deliberately hand-rolled: trajectories in this crate carry the
//! accumulated action as an extra state component, and the scaling maps
//! need direct access to the per-step interpolation coefficients so a
//! transformed trajectory can be resampled without re-integrating.

use nalgebra::DVector;

use crate::error::{Error, Result};

pub(crate) const MIN_TOL: f64 = 1e-14;
pub(crate) const MAX_TOL: f64 = 1e-3;

const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROW_LIMIT: f64 = 5.0;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Weights of the quartic continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integration effort counters.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct StepStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
}

/// One accepted step together with its interpolation coefficients.
///
/// For `theta = (t - t0)/h` in `[0, 1]` the solution is approximated by
/// `c0 + theta*(c1 + (1-theta)*(c2 + theta*(c3 + (1-theta)*c4)))`,
/// which reproduces the step endpoints and endpoint derivatives exactly.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub cont: [DVector<f64>; 5],
}

impl DenseStep {
    pub fn eval(&self, t: f64) -> DVector<f64> {
        let theta = (t - self.t0) / self.h;
        let omt = 1.0 - theta;
        let inner = &self.cont[3] + omt * &self.cont[4];
        let mid = &self.cont[2] + theta * inner;
        &self.cont[0] + theta * (&self.cont[1] + omt * mid)
    }

    /// Exact time derivative of the interpolating polynomial.
    pub fn eval_derivative(&self, t: f64) -> DVector<f64> {
        let th = (t - self.t0) / self.h;
        let dtheta = &self.cont[1]
            + (1.0 - 2.0 * th) * &self.cont[2]
            + (th * (2.0 - 3.0 * th)) * &self.cont[3]
            + (2.0 * th * (1.0 - th) * (1.0 - 2.0 * th)) * &self.cont[4];
        dtheta / self.h
    }
}

#[derive(Debug, Clone)]
pub(crate) struct OdeSolution {
    pub t0: f64,
    pub t_end: f64,
    pub steps: Vec<DenseStep>,
    /// Accepted step endpoints, `(t, y)`, starting with the initial state.
    pub endpoints: Vec<(f64, DVector<f64>)>,
    pub stats: StepStats,
}

impl OdeSolution {
    pub fn span(&self) -> f64 {
        self.t_end - self.t0
    }

    fn locate_step(&self, t: f64) -> Result<(usize, f64)> {
        let slack = 1e-9 * self.span().abs().max(1.0);
        if t < self.t0 - slack || t > self.t_end + slack {
            return Err(Error::usage(format!(
                "sample time {t} outside the integrated range [{}, {}]",
                self.t0, self.t_end
            )));
        }
        let tc = t.clamp(self.t0, self.t_end);
        let idx = self
            .steps
            .partition_point(|s| s.t0 + s.h <= tc)
            .min(self.steps.len() - 1);
        Ok((idx, tc))
    }

    pub fn sample(&self, t: f64) -> Result<DVector<f64>> {
        let (idx, tc) = self.locate_step(t)?;
        Ok(self.steps[idx].eval(tc))
    }

    pub fn sample_derivative(&self, t: f64) -> Result<DVector<f64>> {
        let (idx, tc) = self.locate_step(t)?;
        Ok(self.steps[idx].eval_derivative(tc))
    }

    /// Applies the affine reparametrization `t -> t_scale * t` together
    /// with a componentwise rescaling of the state. The interpolation
    /// parameter `theta` is invariant under the time map, so the
    /// transformed continuous extension stays exact.
    pub fn affine_scaled(&self, t_scale: f64, component_scales: &DVector<f64>) -> OdeSolution {
        let offsets = DVector::zeros(component_scales.len());
        self.affine_transformed(t_scale, component_scales, &offsets)
    }

    /// Like [`OdeSolution::affine_scaled`] with an additional constant
    /// shift per component: the transformed state is
    /// `y'_i(t_scale·t) = scale_i · y_i(t) + offset_i`. Offsets land only
    /// on the constant term of each interpolation polynomial, so
    /// derivatives are unaffected.
    pub fn affine_transformed(
        &self,
        t_scale: f64,
        component_scales: &DVector<f64>,
        component_offsets: &DVector<f64>,
    ) -> OdeSolution {
        let scale_vec = |v: &DVector<f64>| v.component_mul(component_scales);
        OdeSolution {
            t0: self.t0 * t_scale,
            t_end: self.t_end * t_scale,
            steps: self
                .steps
                .iter()
                .map(|s| DenseStep {
                    t0: s.t0 * t_scale,
                    h: s.h * t_scale,
                    cont: [
                        scale_vec(&s.cont[0]) + component_offsets,
                        scale_vec(&s.cont[1]),
                        scale_vec(&s.cont[2]),
                        scale_vec(&s.cont[3]),
                        scale_vec(&s.cont[4]),
                    ],
                })
                .collect(),
            endpoints: self
                .endpoints
                .iter()
                .map(|(t, y)| (t * t_scale, scale_vec(y) + component_offsets))
                .collect(),
            stats: self.stats,
        }
    }
}

pub(crate) struct OdeOptions {
    pub tol: f64,
    pub max_steps: usize,
    pub h_max: Option<f64>,
}

fn weighted_rms(v: &DVector<f64>, y: &DVector<f64>, tol: f64) -> f64 {
    let n = v.len() as f64;
    let sum: f64 = v
        .iter()
        .zip(y.iter())
        .map(|(vi, yi)| {
            let sc = tol * (1.0 + yi.abs());
            (vi / sc) * (vi / sc)
        })
        .sum();
    (sum / n).sqrt()
}

/// Standard two-probe starting step heuristic.
fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y0: &DVector<f64>,
    f0: &DVector<f64>,
    tol: f64,
    span: f64,
    stats: &mut StepStats,
) -> f64
where
    F: FnMut(f64, &DVector<f64>, &mut DVector<f64>),
{
    let d0 = weighted_rms(y0, y0, tol);
    let d1 = weighted_rms(f0, y0, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * (d0 / d1)
    }
    .min(span);

    let y1 = y0 + h0 * f0;
    let mut f1 = DVector::zeros(y0.len());
    rhs(t0 + h0, &y1, &mut f1);
    stats.rhs_evaluations += 1;
    let d2 = weighted_rms(&(&f1 - f0), y0, tol) / h0;

    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`.
pub(crate) fn solve<F>(
    mut rhs: F,
    t0: f64,
    y0: DVector<f64>,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &DVector<f64>, &mut DVector<f64>),
{
    if !(opts.tol >= MIN_TOL && opts.tol <= MAX_TOL) {
        return Err(Error::usage(format!(
            "tolerance {} outside the supported range [{MIN_TOL:e}, {MAX_TOL:e}]",
            opts.tol
        )));
    }
    let span = t_end - t0;
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::usage(format!(
            "integration span must be positive and finite (t0 = {t0}, t_end = {t_end})"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage("initial state contains non-finite components"));
    }

    let n = y0.len();
    let tol = opts.tol;
    let mut stats = StepStats::default();

    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut k5 = DVector::zeros(n);
    let mut k6 = DVector::zeros(n);
    let mut k7 = DVector::zeros(n);

    let mut t = t0;
    let mut y = y0;
    rhs(t, &y, &mut k1);
    stats.rhs_evaluations += 1;
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            message: "right-hand side is not finite at the initial state".into(),
            t_reached: t,
            last_state: y.as_slice().to_vec(),
        });
    }

    let mut h = initial_step(&mut rhs, t, &y, &k1, tol, span, &mut stats);
    if let Some(h_max) = opts.h_max {
        h = h.min(h_max);
    }

    let mut steps = Vec::new();
    let mut endpoints = vec![(t, y.clone())];

    while t < t_end {
        if stats.steps_accepted + stats.steps_rejected >= opts.max_steps {
            return Err(Error::Integration {
                message: format!("step limit {} exceeded", opts.max_steps),
                t_reached: t,
                last_state: y.as_slice().to_vec(),
            });
        }
        let h_floor = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_floor {
            return Err(Error::Integration {
                message: format!("step size underflow (h = {h:.3e})"),
                t_reached: t,
                last_state: y.as_slice().to_vec(),
            });
        }
        let remaining = t_end - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        }

        let yt = &y + (h * A21) * &k1;
        rhs(t + C2 * h, &yt, &mut k2);
        let yt = &y + h * (A31 * &k1 + A32 * &k2);
        rhs(t + C3 * h, &yt, &mut k3);
        let yt = &y + h * (A41 * &k1 + A42 * &k2 + A43 * &k3);
        rhs(t + C4 * h, &yt, &mut k4);
        let yt = &y + h * (A51 * &k1 + A52 * &k2 + A53 * &k3 + A54 * &k4);
        rhs(t + C5 * h, &yt, &mut k5);
        let yt = &y + h * (A61 * &k1 + A62 * &k2 + A63 * &k3 + A64 * &k4 + A65 * &k5);
        rhs(t + h, &yt, &mut k6);
        let y_new = &y + h * (A71 * &k1 + A73 * &k3 + A74 * &k4 + A75 * &k5 + A76 * &k6);
        rhs(t + h, &y_new, &mut k7);
        stats.rhs_evaluations += 6;

        let err = h * (E1 * &k1 + E3 * &k3 + E4 * &k4 + E5 * &k5 + E6 * &k6 + E7 * &k7);
        let mut err_ratio = 0.0_f64;
        for i in 0..n {
            let sc = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err_ratio = err_ratio.max((err[i] / sc).abs());
        }
        if !err_ratio.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            err_ratio = f64::INFINITY;
        }

        if err_ratio <= 1.0 {
            let ydiff = &y_new - &y;
            let bspl = h * &k1 - &ydiff;
            let cont3 = &ydiff - h * &k7 - &bspl;
            let cont4 =
                h * (D1 * &k1 + D3 * &k3 + D4 * &k4 + D5 * &k5 + D6 * &k6 + D7 * &k7);
            steps.push(DenseStep {
                t0: t,
                h,
                cont: [y.clone(), ydiff, bspl, cont3, cont4],
            });
            t = if last { t_end } else { t + h };
            y = y_new;
            k1.copy_from(&k7);
            endpoints.push((t, y.clone()));
            stats.steps_accepted += 1;
            let factor = (SAFETY * err_ratio.powf(-0.2)).clamp(SHRINK_LIMIT, GROW_LIMIT);
            h *= factor;
        } else {
            stats.steps_rejected += 1;
            let factor = (SAFETY * err_ratio.powf(-0.2)).clamp(SHRINK_LIMIT, 1.0);
            h *= factor;
        }
        if let Some(h_max) = opts.h_max {
            h = h.min(h_max);
        }
    }

    Ok(OdeSolution {
        t0,
        t_end,
        steps,
        endpoints,
        stats,
    })
}
