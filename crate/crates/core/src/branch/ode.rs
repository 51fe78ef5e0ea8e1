//! Adaptive Dormand–Prince 5(4) integration with FSAL and step-size control.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Index ranges `[a, b)` entering the error norm; components of one
    /// group share the scale `atol + rtol · max |y_i|` over the group.
    pub groups: &'static [(usize, usize)],
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Failure {
    /// The step size fell below the resolution of `t`, or the state left
    /// the finite range.
    StepUnderflow {
        t: f64,
    },
    TooManySteps {
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y′ = f(t, y)` from `t0` to `t1 > t0` in place.
///
/// `h` is the initial step on entry and the last proposed step on exit, so
/// consecutive calls over adjacent intervals continue smoothly.
pub(crate) fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y: &mut [f64],
    h: &mut f64,
    tol: &Tolerance,
    stats: &mut Stats,
) -> Result<(), Failure>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y.len();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut t = t0;
    f(t, y, &mut k[0]);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= tol.max_steps {
            return Err(Failure::TooManySteps { t });
        }
        steps += 1;
        let last = t + *h >= t1;
        let step = if last { t1 - t } else { *h };
        if !(step > 0.0) || t + step == t {
            return Err(Failure::StepUnderflow { t });
        }
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                tmp[i] = y[i] + step * acc;
            }
            f(t + C[s] * step, &tmp, &mut k[s]);
        }
        // Stage 7 is evaluated at the fifth-order solution.
        y_new.copy_from_slice(&tmp);
        let mut err = 0.0f64;
        for &(a, b) in tol.groups {
            let size = (a..b).fold(0.0f64, |m, i| m.max(y[i].abs()).max(y_new[i].abs()));
            let sc = tol.atol + tol.rtol * size;
            for i in a..b {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                err = err.max((step * e).abs() / sc);
            }
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            stats.rejected += 1;
            *h = step * 0.2;
            continue;
        }
        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + step };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // A shortened final step says nothing about the natural size.
            *h = if last {
                (*h).max(step * grow)
            } else {
                step * grow
            };
        } else {
            stats.rejected += 1;
            *h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(())
}
