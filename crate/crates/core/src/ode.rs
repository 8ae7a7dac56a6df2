//! Dormand–Prince 5(4) integrator with step-size control and the standard
//! fourth-order continuous extension for sampling between steps.
//!
//! The error norm is the maximum over components, so permuting the state
//! vector permutes the solution without changing a single step decision.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// First-order system `y' = f(t, y)` on a flat real state vector.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|; `None` means the whole interval.
    pub max_step: Option<f64>,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        StepControl { rtol: tol, atol: tol, max_steps: 50_000_000, max_step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeFailure {
    StepUnderflow,
    StepBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeError {
    pub kind: OdeFailure,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

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

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Integrates `sys` from `t0` to `t1` (`t1 > t0`).
///
/// `samples` must be sorted and lie in `[t0, t1]`; `on_sample(i, y)` is called
/// once per sample in order. Samples at `t0` receive `y0` verbatim and samples
/// at `t1` receive the final step endpoint verbatim; interior samples use the
/// dense-output polynomial. Returns the state at `t1`.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t1: f64,
    samples: &[f64],
    ctl: &StepControl,
    mut on_sample: F,
) -> Result<(Vec<f64>, Stats), OdeError>
where
    S: OdeSystem + ?Sized,
    F: FnMut(usize, &[f64]),
{
    let n = sys.dim();
    debug_assert_eq!(y0.len(), n);
    let mut stats = Stats::default();
    let mut next_sample = 0;

    while next_sample < samples.len() && samples[next_sample] <= t0 {
        on_sample(next_sample, y0);
        next_sample += 1;
    }

    let mut y = y0.to_vec();
    if n == 0 || t1 <= t0 {
        while next_sample < samples.len() {
            on_sample(next_sample, &y);
            next_sample += 1;
        }
        return Ok((y, stats));
    }

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut dense = vec![0.0; 5 * n];
    let mut out = vec![0.0; n];

    let h_max = ctl.max_step.unwrap_or(t1 - t0).min(t1 - t0);
    let mut t = t0;
    sys.rhs(t, &y, &mut k1);
    stats.rhs_evals += 1;
    let mut h = initial_step(sys, t, &y, &k1, h_max, ctl, &mut ytmp, &mut k2);
    stats.rhs_evals += 1;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(OdeError { kind: OdeFailure::StepBudget, t });
        }
        let mut last = false;
        if t + h >= t1 {
            h = t1 - t;
            last = true;
        }
        if h <= 16.0 * f64::EPSILON * math::abs(t).max(1e-300) || !h.is_finite() {
            return Err(OdeError { kind: OdeFailure::StepUnderflow, t });
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_end = if last { t1 } else { t + h };
        sys.rhs(t_end, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.rhs(t_end, &ynew, &mut k7);
        stats.rhs_evals += 6;

        let mut err: f64 = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctl.atol + ctl.rtol * math::abs(y[i]).max(math::abs(ynew[i]));
            let r = math::abs(e) / sc;
            // NaN must force a rejection
            if r.is_nan() {
                err = f64::INFINITY;
            } else if r > err {
                err = r;
            }
        }

        if err <= 1.0 {
            stats.accepted += 1;
            if next_sample < samples.len() && samples[next_sample] < t_end {
                for i in 0..n {
                    let dy = ynew[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    dense[i] = y[i];
                    dense[n + i] = dy;
                    dense[2 * n + i] = bspl;
                    dense[3 * n + i] = dy - h * k7[i] - bspl;
                    dense[4 * n + i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                while next_sample < samples.len() && samples[next_sample] < t_end {
                    let theta = (samples[next_sample] - t) / h;
                    let theta1 = 1.0 - theta;
                    for i in 0..n {
                        out[i] = dense[i]
                            + theta
                                * (dense[n + i]
                                    + theta1
                                        * (dense[2 * n + i]
                                            + theta
                                                * (dense[3 * n + i] + theta1 * dense[4 * n + i])));
                    }
                    on_sample(next_sample, &out);
                    next_sample += 1;
                }
            }
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut k1, &mut k7);
            t = t_end;
            if last {
                break;
            }
            let mut fac = SAFETY * libm::pow(err.max(1e-10), -0.2);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() {
                (SAFETY * libm::pow(err, -0.2)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac;
            last_rejected = true;
        }
    }

    while next_sample < samples.len() {
        on_sample(next_sample, &y);
        next_sample += 1;
    }
    Ok((y, stats))
}

/// Starting step from the usual two-derivative estimate.
#[allow(clippy::too_many_arguments)]
fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    h_max: f64,
    ctl: &StepControl,
    ytmp: &mut [f64],
    f1: &mut [f64],
) -> f64 {
    let n = y.len();
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..n {
        let sc = ctl.atol + ctl.rtol * math::abs(y[i]);
        d0 = d0.max(math::abs(y[i]) / sc);
        d1 = d1.max(math::abs(f0[i]) / sc);
    }
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(h_max);
    for i in 0..n {
        ytmp[i] = y[i] + h0 * f0[i];
    }
    sys.rhs(t + h0, ytmp, f1);
    let mut d2: f64 = 0.0;
    for i in 0..n {
        let sc = ctl.atol + ctl.rtol * math::abs(y[i]);
        d2 = d2.max(math::abs(f1[i] - f0[i]) / sc);
    }
    d2 /= h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        libm::pow(0.01 / d1.max(d2), 0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -y[0];
        }
    }

    #[test]
    fn one_period_of_oscillator() {
        let t1 = 2.0 * math::PI;
        let (y, stats) =
            integrate(&Oscillator, 0.0, &[1.0, 0.0], t1, &[], &StepControl::with_tol(1e-10), |_, _| {})
                .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-8, "{}", y[0]);
        assert!(y[1].abs() < 1e-8);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn dense_output_tracks_exact_solution() {
        let samples: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let mut got = vec![0.0; samples.len()];
        integrate(&Decay, 0.0, &[1.0], 4.0, &samples, &StepControl::with_tol(1e-10), |i, y| {
            got[i] = y[0]
        })
        .unwrap();
        for (t, g) in samples.iter().zip(&got) {
            assert!((g - math::exp(-t)).abs() < 1e-9, "t={t}");
        }
        assert_eq!(got[0], 1.0);
    }

    #[test]
    fn step_budget_is_reported() {
        let ctl = StepControl { max_steps: 3, ..StepControl::with_tol(1e-12) };
        let err = integrate(&Oscillator, 0.0, &[1.0, 0.0], 100.0, &[], &ctl, |_, _| {}).unwrap_err();
        assert_eq!(err.kind, OdeFailure::StepBudget);
    }

    struct Blowup;
    impl OdeSystem for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn finite_time_blowup_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1
        let err = integrate(&Blowup, 0.0, &[1.0], 2.0, &[], &StepControl::with_tol(1e-8), |_, _| {})
            .unwrap_err();
        assert_eq!(err.kind, OdeFailure::StepUnderflow);
        assert!((err.t - 1.0).abs() < 1e-3, "{}", err.t);
    }
}
