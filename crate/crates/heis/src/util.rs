//! Crate-internal numeric helpers shared across modules.

use crate::interval::Interval;

/// `x^p`, with exact multiplication for the exponents that appear in the
/// evaluators (1, 2, 4). Integer-valued inputs stay exact there, which keeps
/// independently computed sums bit-identical across modules.
#[inline]
pub(crate) fn pow_f(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == 4.0 {
        let s = x * x;
        s * s
    } else {
        x.powf(p)
    }
}

/// Certified bracket of `finite + sum_{t > start} top / t^(1 + q/2)`.
///
/// Adds explicit terms until integral bounds on the remainder (between
/// `(2/q) top (N+1)^(-q/2)` and `(2/q) top N^(-q/2)`) bring the bracket's
/// relative width under `tol`. `start` must be at least 1 and `finite` must
/// already include all terms `t <= start`.
/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`, with Richardson extrapolation on accepted panels.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_panel(f, a, m, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_panel(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_panel(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_panel(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

pub(crate) fn bracket_power_tail(finite: f64, start: u64, top: f64, q: f64, tol: f64) -> Interval {
    if top == 0.0 {
        return Interval::point(finite);
    }
    let weight = |t: u64| pow_f(t as f64, 1.0 + 0.5 * q);
    let remainder = |n: u64| {
        let lo = (2.0 / q) * top * pow_f((n + 1) as f64, -0.5 * q);
        let hi = (2.0 / q) * top * pow_f(n as f64, -0.5 * q);
        (lo, hi)
    };
    let mut n = start.max(1);
    let mut explicit = 0.0;
    loop {
        let (rlo, rhi) = remainder(n);
        let lo = finite + explicit + rlo;
        let hi = finite + explicit + rhi;
        if hi - lo <= tol * hi {
            return Interval::new(lo, hi);
        }
        n += 1;
        explicit += top / weight(n);
    }
}

/// Neumaier compensated accumulator: exact enough that sums of many small
/// nonnegative terms do not drift, which keeps cut enumerations deterministic
/// across chunkings.
#[derive(Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum + self.compensation
    }
}
