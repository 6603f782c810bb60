//! Compression moduli and the integral embedding criterion.

use crate::interval::Interval;
use crate::util::adaptive_simpson;

use super::PoincareError;

/// Absolute quadrature tolerance of [`integral_criterion`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// A nondecreasing compression modulus on `[1, oo)`.
///
/// Three parametric families: `t / d`, `t^(1-eps) / d`, and a tabulated
/// piecewise-linear function clamped to its end values outside the knot
/// range. Construction validates monotonicity, so every value is usable as a
/// lower-bound target for embedding compression.
#[derive(Clone, Debug)]
pub enum Modulus {
    Linear { d: f64 },
    Power { eps: f64, d: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl Modulus {
    pub fn linear(d: f64) -> Result<Modulus, PoincareError> {
        if !(d.is_finite() && d > 0.0) {
            return Err(PoincareError::BadModulus(format!(
                "linear scale must be positive and finite, got {d}"
            )));
        }
        Ok(Modulus::Linear { d })
    }

    pub fn power(eps: f64, d: f64) -> Result<Modulus, PoincareError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(PoincareError::BadModulus(format!(
                "power exponent must lie in (0, 1), got {eps}"
            )));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(PoincareError::BadModulus(format!(
                "power scale must be positive and finite, got {d}"
            )));
        }
        Ok(Modulus::Power { eps, d })
    }

    /// Piecewise-linear modulus through `knots`; abscissae must increase
    /// strictly and ordinates must be finite, nonnegative and nondecreasing.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Modulus, PoincareError> {
        if knots.is_empty() {
            return Err(PoincareError::BadModulus("empty knot list".into()));
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            if !(x.is_finite() && y.is_finite() && y >= 0.0 && x >= 1.0) {
                return Err(PoincareError::BadModulus(format!(
                    "knot {i} must have finite x >= 1 and finite y >= 0"
                )));
            }
            if i > 0 {
                if x <= knots[i - 1].0 {
                    return Err(PoincareError::BadModulus(format!(
                        "knot abscissae must increase strictly (knot {i})"
                    )));
                }
                if y < knots[i - 1].1 {
                    return Err(PoincareError::NonMonotone(i));
                }
            }
        }
        Ok(Modulus::Tabulated { knots })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Modulus::Linear { d } => t / d,
            Modulus::Power { eps, d } => t.powf(1.0 - eps) / d,
            Modulus::Tabulated { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let j = knots.partition_point(|&(x, _)| x <= t);
                let (x0, y0) = knots[j - 1];
                let (x1, y1) = knots[j];
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
        }
    }

    /// Smallest recorded `K` with `omega(t) <= K t` on `[1, oo)`.
    ///
    /// Exact for each family: the linear and power families peak at `t = 1`;
    /// a piecewise-linear `omega(t)/t` attains its maximum at a knot.
    pub fn linear_bound(&self) -> f64 {
        match self {
            Modulus::Linear { d } => 1.0 / d,
            Modulus::Power { d, .. } => 1.0 / d,
            Modulus::Tabulated { knots } => {
                let mut k: f64 = knots[0].1 / knots[0].0.max(1.0);
                for &(x, y) in knots {
                    k = k.max(y / x);
                }
                k
            }
        }
    }

    /// Interior break points of the integrand on `(lo, hi)`, used to split
    /// quadrature panels at the kinks of a tabulated modulus.
    fn break_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Modulus::Tabulated { knots } => knots
                .iter()
                .map(|&(x, _)| x)
                .filter(|&x| x > lo && x < hi)
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// `integral of omega(s)^2 / s^3 over [lo, hi]`, split at modulus kinks.
pub(crate) fn criterion_integral(
    omega: &Modulus,
    lo: f64,
    hi: f64,
    tol: f64,
) -> f64 {
    // (omega(s)/s)^2 / s rather than omega(s)^2 / s^3: the ratio is bounded
    // by the linear bound, so no factor overflows at the large abscissae the
    // improper integral visits.
    let f = |s: f64| {
        let ratio = omega.eval(s) / s;
        ratio * ratio / s
    };
    let mut edges = vec![lo];
    edges.extend(omega.break_points(lo, hi));
    edges.push(hi);
    let panels = (edges.len() - 1) as f64;
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], tol / panels);
    }
    total
}

/// `integral of omega(s)^2 / s^3 over [1, c r]`, the criterion scale that
/// controls how well a ball of radius `r` can sit inside L1 at compression
/// `omega`. Absolute quadrature error at most [`QUADRATURE_TOLERANCE`].
pub fn integral_criterion(omega: &Modulus, r: f64, c: f64) -> Result<f64, PoincareError> {
    if !(r.is_finite() && r >= 2.0) {
        return Err(PoincareError::BadBounds(format!(
            "radius must be finite and at least 2, got {r}"
        )));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(PoincareError::BadBounds(format!(
            "cutoff must lie in (0, 1), got {c}"
        )));
    }
    let hi = c * r;
    if hi <= 1.0 {
        return Err(PoincareError::BadBounds(format!(
            "upper limit c r must exceed 1, got {hi}"
        )));
    }
    Ok(criterion_integral(omega, 1.0, hi, QUADRATURE_TOLERANCE))
}

/// Certified bracket of the improper criterion `integral over [1, oo)`.
///
/// Integrates octave by octave and stops once the octave masses decay
/// geometrically, bounding the remainder by the implied geometric series.
/// The bracket width is at most `tol` plus quadrature error. A modulus whose
/// octave masses fail to decay (growth `omega(t) ~ t` or faster) is rejected
/// as divergent.
pub fn integral_criterion_limit(omega: &Modulus, tol: f64) -> Result<Interval, PoincareError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(PoincareError::BadBounds(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    let mut total = 0.0;
    let mut quad_budget = 0.0;
    let mut prev = f64::INFINITY;
    // Consecutive octave-mass ratios must stay below this for the geometric
    // remainder bound to apply; flatter decay is reported as divergent.
    const Q_CAP: f64 = 0.999;
    const STEADY_OCTAVES: u32 = 3;
    let mut steady = 0;
    let mut q_recent: f64 = 0.0;
    for k in 0..1000u32 {
        let lo = (2.0f64).powi(k as i32);
        let hi = 2.0 * lo;
        if !hi.is_finite() {
            return Err(PoincareError::Divergent);
        }
        // Per-octave quadrature budgets sum to about tol / 5 over all k.
        let oct_tol = (tol / (8.0 * (k as f64 + 1.0).powi(2))).min(QUADRATURE_TOLERANCE);
        let mass = criterion_integral(omega, lo, hi, oct_tol);
        total += mass;
        quad_budget += oct_tol;
        if mass == 0.0 {
            return Ok(Interval::new(total - quad_budget, total + quad_budget));
        }
        if prev.is_finite() {
            let q = mass / prev;
            if q <= Q_CAP {
                steady += 1;
                q_recent = q_recent.max(q);
                if steady >= STEADY_OCTAVES {
                    let remainder = mass * q_recent / (1.0 - q_recent);
                    if remainder <= 0.5 * tol {
                        return Ok(Interval::new(
                            total - quad_budget,
                            total + remainder + quad_budget,
                        ));
                    }
                }
            } else {
                steady = 0;
                q_recent = 0.0;
            }
        }
        prev = mass;
    }
    Err(PoincareError::Divergent)
}
