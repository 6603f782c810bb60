//! Stratified Monte-Carlo over boxes and quasi-norm balls, the normalized
//! vertical perimeter estimator, and its `L2` curve.
//!
//! Quasi-ball volumes are closed form: slicing the ball
//! `{|x1|+|x2|+|y1|+|y2| + 4 sqrt|z| < r}` along the horizontal l1-radius
//! `T` gives a z-extent of `(r-T)^2/8` over an l1-sphere of measure
//! `8 T^3 / 3`, so the volume is `(1/3) Int_0^r T^3 (r-T)^2 dT = r^6/180`;
//! the same computation in the three-dimensional subgroup gives `r^4/24`.
//! The `T`-marginal is therefore an exact Beta law, which is how points are
//! drawn: no rejection, and the stratification variable is the Beta
//! quantile (ball) or the center coordinate (box).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ContinuousError, DEFAULT_COMPARABILITY};
use crate::group::ContinuousPoint;

/// Smallest sample budget accepted by the perimeter estimator.
pub const MIN_VBAR_BUDGET: usize = 1_000;
const DEFAULT_STREAMS: usize = 64;
const MAX_GRID_POINTS: usize = 10_000;

/// Sampling domain. Boxes are axis-aligned and centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Region {
    /// Half-widths in the coordinates `(x1, x2, y1, y2, z)`.
    Box { half: [f64; 5] },
    /// Quasi-norm ball in the five-dimensional group; volume `r^6/180`.
    Ball { radius: f64 },
    /// Quasi-norm ball in the subgroup `{x2 = y2 = 0}`; volume `r^4/24`.
    BallH3 { radius: f64 },
}

impl Region {
    pub fn validate(self) -> Result<Region, ContinuousError> {
        let ok = match self {
            Region::Box { half } => half.iter().all(|h| h.is_finite() && *h > 0.0),
            Region::Ball { radius } | Region::BallH3 { radius } => {
                radius.is_finite() && radius > 0.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(ContinuousError::BadRegion(format!("{self:?}")))
        }
    }

    /// Exact Lebesgue volume (Haar with constant 1).
    pub fn volume(&self) -> f64 {
        match *self {
            Region::Box { half } => 32.0 * half.iter().product::<f64>(),
            Region::Ball { radius } => radius.powi(6) / 180.0,
            Region::BallH3 { radius } => radius.powi(4) / 24.0,
        }
    }

    /// Uniform draw; `stratum` confines the stratification variable to its
    /// quantile slice `[stratum/streams, (stratum+1)/streams)`.
    fn sample_stratified<R: Rng>(&self, stratum: usize, streams: usize, rng: &mut R) -> ContinuousPoint {
        let q = (stratum as f64 + rng.gen::<f64>()) / streams as f64;
        match *self {
            Region::Box { half } => {
                let u = |rng: &mut R, h: f64| h * (2.0 * rng.gen::<f64>() - 1.0);
                let x1 = u(rng, half[0]);
                let x2 = u(rng, half[1]);
                let y1 = u(rng, half[2]);
                let y2 = u(rng, half[3]);
                ContinuousPoint::new(x1, x2, y1, y2, half[4] * (2.0 * q - 1.0))
            }
            Region::Ball { radius } => {
                let t = radius * beta_quantile(q, 4, 3);
                let mut parts = [0.0f64; 4];
                let mut sum = 0.0;
                for p in &mut parts {
                    *p = -(1.0 - rng.gen::<f64>()).ln();
                    sum += *p;
                }
                if sum <= f64::MIN_POSITIVE {
                    parts[0] = 1.0;
                    sum = 1.0;
                }
                let mut coord = [0.0f64; 4];
                for (slot, p) in coord.iter_mut().zip(parts) {
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    *slot = sign * t * p / sum;
                }
                let zr = (radius - t) * (radius - t) / 16.0;
                let z = zr * (2.0 * rng.gen::<f64>() - 1.0);
                ContinuousPoint::new(coord[0], coord[1], coord[2], coord[3], z)
            }
            Region::BallH3 { radius } => {
                let t = radius * beta_quantile(q, 2, 3);
                let v = rng.gen::<f64>();
                let s1 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let s2 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let zr = (radius - t) * (radius - t) / 16.0;
                let z = zr * (2.0 * rng.gen::<f64>() - 1.0);
                ContinuousPoint::new(s1 * t * v, 0.0, s2 * t * (1.0 - v), 0.0, z)
            }
        }
    }

    /// Plain uniform draw from the region.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ContinuousPoint {
        self.sample_stratified(0, 1, rng)
    }
}

/// Regularized incomplete beta function for small integer parameters,
/// written as a binomial tail.
fn beta_cdf(x: f64, a: u32, b: u32) -> f64 {
    let n = a + b - 1;
    let mut total = 0.0;
    for j in a..=n {
        total += binomial(n, j) * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32);
    }
    total
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out *= (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Inverse of `beta_cdf` by bisection; monotone, so 60 halvings pin the
/// quantile to 2^-60.
fn beta_quantile(u: f64, a: u32, b: u32) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if beta_cdf(mid, a, b) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut x = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Membership oracle plus sampling plan: domain, per-call budget, seed, and
/// stream count. Streams double as strata; each stream runs its own
/// generator and the reduction visits streams in index order, so results
/// are byte-stable for a given `(seed, streams)` whatever the thread count.
pub struct RegionSampler<F> {
    set: F,
    region: Region,
    budget: usize,
    streams: usize,
    seed: u64,
}

impl<F: Fn(ContinuousPoint) -> bool + Sync> RegionSampler<F> {
    pub fn new(set: F, region: Region, budget: usize, seed: u64) -> Result<Self, ContinuousError> {
        Self::with_streams(set, region, budget, seed, DEFAULT_STREAMS)
    }

    pub fn with_streams(
        set: F,
        region: Region,
        budget: usize,
        seed: u64,
        streams: usize,
    ) -> Result<Self, ContinuousError> {
        let region = region.validate()?;
        if streams == 0 {
            return Err(ContinuousError::BadParameter("streams must be positive".into()));
        }
        if budget < 2 * streams {
            return Err(ContinuousError::BudgetTooSmall { min: 2 * streams, got: budget });
        }
        Ok(RegionSampler { set, region, budget, streams, seed })
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn volume(&self) -> f64 {
        self.region.volume()
    }

    /// Stratified mean of `g` over the region: strata have equal mass, each
    /// contributes its sample mean, and the standard error combines the
    /// per-stratum variances. Returns `(mean, stderr)`.
    pub(crate) fn stratified_mean<G>(&self, salt: u64, g: G) -> (f64, f64)
    where
        G: Fn(ContinuousPoint) -> f64 + Sync,
    {
        let per = self.budget / self.streams;
        let rem = self.budget % self.streams;
        let stats: Vec<(f64, f64)> = (0..self.streams)
            .into_par_iter()
            .map(|i| {
                let n = per + usize::from(i < rem);
                let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, salt));
                rng.set_stream(i as u64 + 1);
                let mut mean = 0.0;
                let mut m2 = 0.0;
                for k in 0..n {
                    let point = self.region.sample_stratified(i, self.streams, &mut rng);
                    let value = g(point);
                    let delta = value - mean;
                    mean += delta / (k + 1) as f64;
                    m2 += delta * (value - mean);
                }
                (mean, m2 / ((n - 1).max(1) as f64 * n as f64))
            })
            .collect();
        let s = self.streams as f64;
        let mean = stats.iter().map(|(m, _)| m).sum::<f64>() / s;
        let var = stats.iter().map(|(_, v)| v).sum::<f64>() / (s * s);
        (mean, var.sqrt())
    }

    /// Normalized vertical perimeter at scale parameter `s`:
    /// `2^-s Int_U |1_E(u) - 1_E(u Z^-t)| du` with `t = 2^(2s)`.
    /// Returns `(estimate, stderr)`. The estimate never exceeds the trivial
    /// bound `volume / 2^s`, since the integrand is at most 1.
    pub fn vbar(&self, s: f64) -> Result<(f64, f64), ContinuousError> {
        self.vbar_salted(s, 0)
    }

    fn vbar_salted(&self, s: f64, salt: u64) -> Result<(f64, f64), ContinuousError> {
        if self.budget < MIN_VBAR_BUDGET {
            return Err(ContinuousError::BudgetTooSmall {
                min: MIN_VBAR_BUDGET,
                got: self.budget,
            });
        }
        if !s.is_finite() {
            return Err(ContinuousError::BadParameter(format!("scale parameter {s}")));
        }
        let t = (2.0 * s).exp2();
        let scale = self.volume() / s.exp2();
        let (mean, sem) = self.stratified_mean(salt, |u| {
            let here = (self.set)(u);
            let below = (self.set)(u.z_translate(-t));
            if here != below {
                1.0
            } else {
                0.0
            }
        });
        Ok((scale * mean, scale * sem))
    }
}

/// Grid plan for [`vbar_l2`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveGrid {
    pub s_min: f64,
    /// Grid spacing; at most 0.25.
    pub step: f64,
    /// Sets the upper cutoff `log2(comparability * r)`.
    pub comparability: f64,
    /// Optional cap on total samples across the curve; when it runs out the
    /// partial curve is reported inside the error.
    pub total_budget: Option<usize>,
}

impl Default for CurveGrid {
    fn default() -> CurveGrid {
        CurveGrid {
            s_min: -10.0,
            step: 0.25,
            comparability: DEFAULT_COMPARABILITY,
            total_budget: None,
        }
    }
}

/// Sampled perimeter curve with its `L2` norm.
#[derive(Clone, Debug, Serialize)]
pub struct VBarCurve {
    pub s: Vec<f64>,
    pub vbar: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `volume / 2^s`, valid at every scale.
    pub trivial_bound: Vec<f64>,
    /// `sqrt( trapezoid of vbar^2 + tail )`.
    pub l2: f64,
    pub l2_stderr: f64,
    /// Closed-form integral of the squared trivial bound beyond the last
    /// grid point.
    pub tail: f64,
    pub s_max: f64,
    pub comparability: f64,
    pub seed: u64,
    pub budget_per_point: usize,
}

impl VBarCurve {
    /// Rows `s,vbar,stderr,trivial_bound` under a matching header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,vbar,stderr,trivial_bound\n");
        for i in 0..self.s.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.s[i], self.vbar[i], self.stderr[i], self.trivial_bound[i]
            ));
        }
        out
    }

    pub fn respects_trivial_bound(&self) -> bool {
        self.vbar
            .iter()
            .zip(&self.trivial_bound)
            .all(|(v, b)| *v <= b * (1.0 + 1e-12))
    }
}

/// Sweeps `s` from `grid.s_min` to `log2(comparability * r)` in steps of
/// `grid.step`, estimating the perimeter at each grid point with the
/// sampler's per-call budget, and integrates the squared curve by the
/// trapezoid rule plus the closed-form trivial-bound tail. Each grid point
/// uses its own substream, so the per-point error bars combine in
/// quadrature into `l2_stderr`.
pub fn vbar_l2<F: Fn(ContinuousPoint) -> bool + Sync>(
    sampler: &RegionSampler<F>,
    r: f64,
    grid: &CurveGrid,
) -> Result<VBarCurve, ContinuousError> {
    if !(grid.step > 0.0 && grid.step <= 0.25) {
        return Err(ContinuousError::BadGrid(format!(
            "step must lie in (0, 0.25], got {}",
            grid.step
        )));
    }
    if !(r > 0.0 && r.is_finite() && grid.comparability >= 1.0) {
        return Err(ContinuousError::BadGrid(format!(
            "radius {r}, comparability {}",
            grid.comparability
        )));
    }
    let s_max = (grid.comparability * r).log2();
    if !(s_max > grid.s_min) {
        return Err(ContinuousError::BadGrid(format!(
            "upper cutoff {s_max} at or below lower cutoff {}",
            grid.s_min
        )));
    }
    let requested = (((s_max - grid.s_min) / grid.step).ceil() as usize) + 1;
    if requested > MAX_GRID_POINTS {
        return Err(ContinuousError::BadGrid(format!("{requested} grid points")));
    }
    let affordable = grid
        .total_budget
        .map(|t| t / sampler.budget())
        .unwrap_or(usize::MAX);
    let computed = requested.min(affordable);

    let volume = sampler.volume();
    let mut s_grid = Vec::with_capacity(computed);
    let mut values = Vec::with_capacity(computed);
    let mut errs = Vec::with_capacity(computed);
    let mut trivial = Vec::with_capacity(computed);
    for k in 0..computed {
        let s = grid.s_min + grid.step * k as f64;
        let (v, e) = sampler.vbar_salted(s, k as u64 + 1)?;
        s_grid.push(s);
        values.push(v);
        errs.push(e);
        trivial.push(volume / s.exp2());
    }

    let curve = finish_curve(
        s_grid, values, errs, trivial, volume, s_max, grid, sampler.seed(), sampler.budget(),
    );
    if computed < requested {
        return Err(ContinuousError::BudgetExhausted {
            computed,
            requested,
            partial: Box::new(curve),
        });
    }
    Ok(curve)
}

#[allow(clippy::too_many_arguments)]
fn finish_curve(
    s: Vec<f64>,
    vbar: Vec<f64>,
    stderr: Vec<f64>,
    trivial_bound: Vec<f64>,
    volume: f64,
    s_max: f64,
    grid: &CurveGrid,
    seed: u64,
    budget_per_point: usize,
) -> VBarCurve {
    let n = s.len();
    let mut square = 0.0;
    let mut var = 0.0;
    if n >= 2 {
        for k in 0..n {
            let w = if k == 0 || k == n - 1 { 0.5 * grid.step } else { grid.step };
            square += w * vbar[k] * vbar[k];
            let dv = w * 2.0 * vbar[k] * stderr[k];
            var += dv * dv;
        }
    }
    // Beyond the last grid point the squared trivial bound integrates to
    // volume^2 4^-s / (2 ln 2).
    let tail = match s.last() {
        Some(last) => volume * volume * (-2.0 * last).exp2() / (2.0 * std::f64::consts::LN_2),
        None => 0.0,
    };
    let l2 = (square + tail).sqrt();
    let l2_stderr = if l2 > 0.0 { var.sqrt() / (2.0 * l2) } else { 0.0 };
    VBarCurve {
        s,
        vbar,
        stderr,
        trivial_bound,
        l2,
        l2_stderr,
        tail,
        s_max,
        comparability: grid.comparability,
        seed,
        budget_per_point,
    }
}
