//! Vertical-versus-horizontal functional inequalities on the lattice.
//!
//! The left side of the global inequality aggregates, over all center depths
//! `t`, how much an embedding moves under the shift `h -> h Z^t`, weighted by
//! `1/t^2`; the right side sums the displacement across the eight generator
//! edges. On indicator embeddings these reduce to the vertical and horizontal
//! perimeters of the underlying set. The module also evaluates the local
//! (ball-restricted) form, compression moduli with their integral criterion,
//! and a diagnostic that replays the pointwise chain linking a compression
//! lower bound to the criterion integral.
//!
//! Embeddings are finitely supported: outside their domain they take a
//! constant value (the all-zeros vector, or membership in no cut), so every
//! sum below is finite or has a constant tail that is bracketed exactly like
//! the perimeter tails.

pub mod modulus;

pub use modulus::{integral_criterion, integral_criterion_limit, Modulus, QUADRATURE_TOLERANCE};

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{word_ball, DiscretePoint, GroupError, KeyBuildHasher, LatticePoint, WordBand};
use crate::interval::Interval;
use crate::perimeter::{LatticeSet, TAIL_RELATIVE_TOLERANCE};
use crate::util::{bracket_power_tail, pow_f};

use modulus::criterion_integral;

/// Exploration cap for the word balls the evaluators build internally.
const NODE_BUDGET: usize = 20_000_000;

#[derive(Debug, Error)]
pub enum PoincareError {
    #[error("cut member lies outside the embedding domain")]
    CutOutsideDomain,
    #[error("duplicate domain point in embedding")]
    DuplicatePoint,
    #[error("cut weight must be finite and nonnegative, got {0}")]
    BadWeight(f64),
    #[error("every vector must share one dimension")]
    RaggedVectors,
    #[error("vector entries must be finite")]
    NonFiniteVector,
    #[error("domain and vector list lengths differ")]
    LengthMismatch,
    #[error("norm exponent must be finite and at least 1, got {0}")]
    BadNorm(f64),
    #[error("local scale n must be at least 1")]
    ZeroScale,
    #[error("alpha must be finite and at least 1, got {0}")]
    BadAlpha(f64),
    #[error("domain must contain the word ball of radius {0}")]
    DomainMissingBall(u32),
    #[error("tabulated modulus must be nondecreasing (knot {0})")]
    NonMonotone(usize),
    #[error("bad modulus parameter: {0}")]
    BadModulus(String),
    #[error("bad integration bounds: {0}")]
    BadBounds(String),
    #[error("octave masses do not decay geometrically; the integral diverges at this tolerance")]
    Divergent,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finitely supported map from the lattice into a normed space.
///
/// Points outside the domain share one constant value, so differences between
/// two outside points vanish and differences across the domain boundary equal
/// the distance to that constant.
pub trait Embedding: Sync {
    /// Domain points in deterministic coordinate order.
    fn domain(&self) -> &[DiscretePoint];

    fn in_domain(&self, p: DiscretePoint) -> bool;

    /// `|phi(x) - phi(y)|_p^p`, using the outside constant for points off the
    /// domain.
    fn diff_ppow(&self, x: DiscretePoint, y: DiscretePoint, p: f64) -> f64;

    /// `|phi(x) - phi(outside)|_p^p`.
    fn outside_ppow(&self, x: DiscretePoint, p: f64) -> f64;
}

struct Cut {
    weight: f64,
    members: Vec<u64>,
}

impl Cut {
    #[inline]
    fn contains(&self, i: u32) -> bool {
        self.members[(i / 64) as usize] >> (i % 64) & 1 == 1
    }
}

/// An L1 embedding in cut form: coordinates are weighted indicator cuts, so
/// `|phi(x) - phi(y)|_1` is the total weight of cuts separating `x` from `y`.
/// The outside constant is the point lying in no cut.
pub struct CutEmbedding {
    domain: Vec<DiscretePoint>,
    index: HashMap<DiscretePoint, u32, KeyBuildHasher>,
    cuts: Vec<Cut>,
}

impl CutEmbedding {
    /// Builds an embedding from explicit cuts. Every cut member must belong
    /// to the domain and every weight must be finite and nonnegative.
    pub fn new(
        domain: Vec<DiscretePoint>,
        cuts: Vec<(f64, Vec<DiscretePoint>)>,
    ) -> Result<CutEmbedding, PoincareError> {
        let (domain, index) = index_domain(domain)?;
        let blocks = domain.len().div_ceil(64);
        let mut built = Vec::with_capacity(cuts.len());
        for (weight, members) in cuts {
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(PoincareError::BadWeight(weight));
            }
            let mut bits = vec![0u64; blocks];
            for m in members {
                let i = *index.get(&m).ok_or(PoincareError::CutOutsideDomain)?;
                bits[(i / 64) as usize] |= 1 << (i % 64);
            }
            built.push(Cut { weight, members: bits });
        }
        Ok(CutEmbedding { domain, index, cuts: built })
    }

    /// The indicator of a set: one cut of weight 1 containing every point.
    pub fn indicator(set: impl IntoIterator<Item = DiscretePoint>) -> CutEmbedding {
        let members: Vec<DiscretePoint> = set.into_iter().collect();
        CutEmbedding::new(members.clone(), vec![(1.0, members)])
            .expect("indicator cuts lie inside their own domain")
    }

    /// Exact threshold-cut form of a vector embedding: per coordinate, one
    /// cut per gap between consecutive attained values (with 0, the outside
    /// value, always included), weighted by the gap. Gaps above zero become
    /// `value > threshold` cuts and gaps below zero become complements
    /// `value <= threshold`, so the outside constant stays in no cut.
    /// Pairwise L1 distances are reproduced up to rounding in the gap sums.
    pub fn from_vectors(v: &VectorEmbedding) -> CutEmbedding {
        let n = v.domain.len();
        let mut cuts: Vec<(f64, Vec<DiscretePoint>)> = Vec::new();
        for k in 0..v.dim {
            let mut values: Vec<f64> = (0..n).map(|i| v.vectors[i][k]).collect();
            values.push(0.0);
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let members: Vec<DiscretePoint> = if lo >= 0.0 {
                    (0..n)
                        .filter(|&i| v.vectors[i][k] > lo)
                        .map(|i| v.domain[i])
                        .collect()
                } else {
                    (0..n)
                        .filter(|&i| v.vectors[i][k] <= lo)
                        .map(|i| v.domain[i])
                        .collect()
                };
                cuts.push((hi - lo, members));
            }
        }
        CutEmbedding::new(v.domain.clone(), cuts)
            .expect("threshold cuts lie inside the vector domain")
    }

    /// Same cuts with every weight multiplied by `factor >= 0`.
    pub fn scale(&self, factor: f64) -> Result<CutEmbedding, PoincareError> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(PoincareError::BadWeight(factor));
        }
        Ok(CutEmbedding {
            domain: self.domain.clone(),
            index: self.index.clone(),
            cuts: self
                .cuts
                .iter()
                .map(|c| Cut { weight: factor * c.weight, members: c.members.clone() })
                .collect(),
        })
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.len()
    }

    /// `|phi(x) - phi(y)|_1`.
    pub fn l1_dist(&self, x: DiscretePoint, y: DiscretePoint) -> f64 {
        self.diff_ppow(x, y, 1.0)
    }

    fn slot(&self, p: DiscretePoint) -> Option<u32> {
        self.index.get(&p).copied()
    }
}

impl Embedding for CutEmbedding {
    fn domain(&self) -> &[DiscretePoint] {
        &self.domain
    }

    fn in_domain(&self, p: DiscretePoint) -> bool {
        self.index.contains_key(&p)
    }

    fn diff_ppow(&self, x: DiscretePoint, y: DiscretePoint, p: f64) -> f64 {
        let (ix, iy) = (self.slot(x), self.slot(y));
        if ix == iy {
            return 0.0;
        }
        let mut sum = 0.0;
        for cut in &self.cuts {
            let bx = ix.is_some_and(|i| cut.contains(i));
            let by = iy.is_some_and(|i| cut.contains(i));
            if bx != by {
                sum += pow_f(cut.weight, p);
            }
        }
        sum
    }

    fn outside_ppow(&self, x: DiscretePoint, p: f64) -> f64 {
        match self.slot(x) {
            None => 0.0,
            Some(i) => self
                .cuts
                .iter()
                .filter(|c| c.contains(i))
                .map(|c| pow_f(c.weight, p))
                .sum(),
        }
    }
}

/// An embedding into a fixed-dimension coordinate space; the outside constant
/// is the zero vector.
pub struct VectorEmbedding {
    domain: Vec<DiscretePoint>,
    index: HashMap<DiscretePoint, u32, KeyBuildHasher>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl VectorEmbedding {
    /// Pairs `domain[i]` with `vectors[i]`; rows must share one dimension and
    /// hold finite entries.
    pub fn new(
        domain: Vec<DiscretePoint>,
        vectors: Vec<Vec<f64>>,
    ) -> Result<VectorEmbedding, PoincareError> {
        if domain.len() != vectors.len() {
            return Err(PoincareError::LengthMismatch);
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for row in &vectors {
            if row.len() != dim {
                return Err(PoincareError::RaggedVectors);
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(PoincareError::NonFiniteVector);
            }
        }
        let mut paired: Vec<(DiscretePoint, Vec<f64>)> =
            domain.into_iter().zip(vectors).collect();
        paired.sort_by_key(|(p, _)| p.sort_key());
        let (domain, vectors): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        let (domain, index) = index_domain(domain)?;
        Ok(VectorEmbedding { domain, index, vectors, dim })
    }

    /// Evaluates `f` on every point of `domain`.
    pub fn from_fn(
        domain: Vec<DiscretePoint>,
        f: impl Fn(DiscretePoint) -> Vec<f64>,
    ) -> Result<VectorEmbedding, PoincareError> {
        let vectors = domain.iter().map(|&p| f(p)).collect();
        VectorEmbedding::new(domain, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, p: DiscretePoint) -> Option<&[f64]> {
        self.index.get(&p).map(|&i| self.vectors[i as usize].as_slice())
    }
}

impl Embedding for VectorEmbedding {
    fn domain(&self) -> &[DiscretePoint] {
        &self.domain
    }

    fn in_domain(&self, p: DiscretePoint) -> bool {
        self.index.contains_key(&p)
    }

    fn diff_ppow(&self, x: DiscretePoint, y: DiscretePoint, p: f64) -> f64 {
        let (ix, iy) = (self.index.get(&x), self.index.get(&y));
        match (ix, iy) {
            (None, None) => 0.0,
            (Some(&i), None) => self.outside_row(i, p),
            (None, Some(&j)) => self.outside_row(j, p),
            (Some(&i), Some(&j)) => {
                if i == j {
                    return 0.0;
                }
                let (vi, vj) = (&self.vectors[i as usize], &self.vectors[j as usize]);
                vi.iter().zip(vj).map(|(a, b)| pow_f((a - b).abs(), p)).sum()
            }
        }
    }

    fn outside_ppow(&self, x: DiscretePoint, p: f64) -> f64 {
        self.index.get(&x).map_or(0.0, |&i| self.outside_row(i, p))
    }
}

impl VectorEmbedding {
    fn outside_row(&self, i: u32, p: f64) -> f64 {
        self.vectors[i as usize].iter().map(|a| pow_f(a.abs(), p)).sum()
    }
}

fn index_domain(
    mut domain: Vec<DiscretePoint>,
) -> Result<(Vec<DiscretePoint>, HashMap<DiscretePoint, u32, KeyBuildHasher>), PoincareError> {
    domain.sort_by_key(|p| p.sort_key());
    let mut index: HashMap<DiscretePoint, u32, KeyBuildHasher> = HashMap::default();
    for (i, &p) in domain.iter().enumerate() {
        if index.insert(p, i as u32).is_some() {
            return Err(PoincareError::DuplicatePoint);
        }
    }
    Ok((domain, index))
}

fn check_norm(p: f64) -> Result<(), PoincareError> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(PoincareError::BadNorm(p));
    }
    Ok(())
}

/// `sum_h |phi(h Z^t) - phi(h)|_p^p` over the whole lattice, for one `t`.
///
/// Only pairs with an endpoint in the domain contribute: the pair is reached
/// from its domain endpoint, walking up for `h` in the domain and down for
/// the `h` outside whose shift lands inside.
fn vertical_inner_sum(phi: &impl Embedding, p: f64, t: i64) -> f64 {
    let mut sum = 0.0;
    for &x in phi.domain() {
        sum += phi.diff_ppow(x, x.z_shift(t), p);
        if !phi.in_domain(x.z_shift(-t)) {
            sum += phi.outside_ppow(x, p);
        }
    }
    sum
}

/// Inner vertical sums for `t = 1..=t_max`, exposed for linearity checks and
/// diagnostics. The sums are linear in the cut measure of an L1 embedding.
pub fn vertical_difference_sums(
    phi: &impl Embedding,
    p: f64,
    t_max: u32,
) -> Result<Vec<f64>, PoincareError> {
    check_norm(p)?;
    Ok((1..=t_max as i64)
        .into_par_iter()
        .map(|t| vertical_inner_sum(phi, p, t))
        .collect())
}

/// Left side of the global inequality:
/// `(sum_t t^-2 (sum_h |phi(h Z^t) - phi(h)|_p^p)^(2/p))^(1/2)`.
///
/// For `t` beyond the domain's vertical extent every shift crosses the
/// boundary in both directions, so the inner sum is the constant
/// `2 sum_x |phi(x) - outside|_p^p` and the tail is bracketed exactly like
/// the perimeter tails. On an indicator embedding with `p = 1` this equals
/// the vertical perimeter of the set, finite part bit for bit.
pub fn global_lhs(phi: &impl Embedding, p: f64) -> Result<Interval, PoincareError> {
    check_norm(p)?;
    let support = LatticeSet::from_points(phi.domain().iter().copied());
    let t_max = support.z_extent();
    let inners: Vec<f64> = (1..=t_max as i64)
        .into_par_iter()
        .map(|t| vertical_inner_sum(phi, p, t))
        .collect();
    let mut finite = 0.0;
    for (i, &inner) in inners.iter().enumerate() {
        let t = (i + 1) as f64;
        finite += pow_f(inner, 2.0 / p) / pow_f(t, 2.0);
    }
    let m: f64 = 2.0 * phi.domain().iter().map(|&x| phi.outside_ppow(x, p)).sum::<f64>();
    let top = pow_f(m, 2.0 / p);
    let start = if t_max == 0 {
        finite = top / pow_f(1.0, 2.0);
        1
    } else {
        t_max
    };
    Ok(bracket_power_tail(finite, start, top, 2.0, TAIL_RELATIVE_TOLERANCE).sqrt())
}

/// Right side of the global inequality:
/// `sum_h sum_sigma |phi(h sigma) - phi(h)|_p^p` over the whole lattice.
///
/// Each unordered generator edge is counted twice (once per orientation).
/// Edges whose outer endpoint lies off the domain are reached only from the
/// inner side, so they enter with weight 2. On an indicator embedding this
/// equals twice the horizontal boundary count.
pub fn global_rhs(phi: &impl Embedding, p: f64) -> Result<f64, PoincareError> {
    check_norm(p)?;
    let mut sum = 0.0;
    for &x in phi.domain() {
        for y in x.neighbors() {
            let d = phi.diff_ppow(x, y, p);
            sum += if phi.in_domain(y) { d } else { 2.0 * d };
        }
    }
    Ok(sum)
}

/// Left side of the local inequality at scale `n`:
/// `(sum_{t<=n^2} t^-2 (sum_{h in B_n} |phi(h Z^t) - phi(h)|_1)^2)^(1/2)`.
///
/// The sum is finite and exact, so the interval is a point. The domain must
/// contain `B_n`; shifts `h Z^t` landing outside the domain take the outside
/// constant, exactly as in the global evaluator.
pub fn local_lhs(phi: &impl Embedding, n: u32) -> Result<Interval, PoincareError> {
    if n == 0 {
        return Err(PoincareError::ZeroScale);
    }
    let ball = word_ball::<DiscretePoint>(n, NODE_BUDGET)?;
    let members = ball_members_checked(phi, &ball, n)?;
    let mut lhs2 = 0.0;
    for t in 1..=(n as i64) * (n as i64) {
        let inner: f64 = members
            .iter()
            .map(|&h| phi.diff_ppow(h, h.z_shift(t), 1.0))
            .sum();
        lhs2 += pow_f(inner, 2.0) / pow_f(t as f64, 2.0);
    }
    Ok(Interval::point(lhs2.sqrt()))
}

/// Right side of the local inequality:
/// `sum_{h in B_(alpha n)} sum_sigma |phi(h sigma) - phi(h)|_1`.
///
/// Requires the domain to contain `B_(floor(alpha n) + 1)`, since the sum
/// touches all neighbors of the outer ball.
pub fn local_rhs(phi: &impl Embedding, n: u32, alpha: f64) -> Result<f64, PoincareError> {
    if n == 0 {
        return Err(PoincareError::ZeroScale);
    }
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(PoincareError::BadAlpha(alpha));
    }
    let inner_radius = (alpha * n as f64).floor() as u32;
    let outer_radius = inner_radius + 1;
    let ball = word_ball::<DiscretePoint>(outer_radius, NODE_BUDGET)?;
    ball_members_checked(phi, &ball, outer_radius)?;
    let mut sum = 0.0;
    for h in ball.members_within(inner_radius) {
        for y in h.neighbors() {
            sum += phi.diff_ppow(h, y, 1.0);
        }
    }
    Ok(sum)
}

fn ball_members_checked(
    phi: &impl Embedding,
    ball: &crate::group::Ball<DiscretePoint>,
    radius: u32,
) -> Result<Vec<DiscretePoint>, PoincareError> {
    let members: Vec<DiscretePoint> =
        ball.members_sorted().into_iter().map(|(p, _)| p).collect();
    if members.iter().any(|&p| !phi.in_domain(p)) {
        return Err(PoincareError::DomainMissingBall(radius));
    }
    Ok(members)
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareParams {
    pub p: f64,
    pub points: u64,
    pub z_extent: u64,
}

/// Global evaluation summary, serialized by the command-line front end.
#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    pub rhs: f64,
    /// `lhs_hi / rhs`; absent when the right side vanishes.
    pub ratio: Option<f64>,
    pub tail_width: f64,
    pub params: PoincareParams,
}

pub fn report(phi: &impl Embedding, p: f64) -> Result<PoincareReport, PoincareError> {
    let lhs = global_lhs(phi, p)?;
    let rhs = global_rhs(phi, p)?;
    let support = LatticeSet::from_points(phi.domain().iter().copied());
    Ok(PoincareReport {
        lhs_lo: lhs.lo,
        lhs_hi: lhs.hi,
        rhs,
        ratio: (rhs > 0.0).then(|| lhs.hi / rhs),
        tail_width: lhs.hi - lhs.lo,
        params: PoincareParams {
            p,
            points: phi.domain().len() as u64,
            z_extent: support.z_extent(),
        },
    })
}

/// Numeric replay of the chain that turns a compression lower bound into the
/// criterion integral: both sides of the local inequality at the derived
/// scale `n`, the modulus sum `sum_{t<=n^2} (|B_n| omega(beta sqrt t))^2 / t^2`,
/// and its integral minorant after the square-root change of variable.
#[derive(Clone, Debug, Serialize)]
pub struct PassToIntReplay {
    pub n: u32,
    pub alpha: f64,
    /// Measured band constants: `beta sqrt(t) <= d(0, Z^t) <= gamma sqrt(t)`
    /// on the sampled range `t = 1..=n^2`.
    pub beta: f64,
    pub gamma: f64,
    pub ball_size: u64,
    pub local_lhs: f64,
    pub local_rhs: f64,
    /// `local_lhs / local_rhs`; absent when the right side vanishes.
    pub local_ratio: Option<f64>,
    pub modulus_sum: f64,
    pub integral_lower: f64,
}

/// Two-sided compression statistics of an embedding over a word ball.
#[derive(Clone, Debug, Serialize)]
pub struct CompressionReport {
    pub radius: u32,
    pub pairs: u64,
    /// `max |phi(x) - phi(y)|_1 - d(x, y)`; nonpositive for 1-Lipschitz phi.
    pub max_upper_violation: f64,
    /// `min |phi(x) - phi(y)|_1 / omega(d(x, y))` over pairs with
    /// `omega(d) > 0`; infinite when every pair is guarded.
    pub min_lower_ratio: f64,
    /// Pairs skipped by the division guard `omega(d) = 0`.
    pub zero_modulus_pairs: u64,
    /// Present when the ball is large enough to pick a replay scale `n >= 1`.
    pub replay: Option<PassToIntReplay>,
}

struct PairStats {
    pairs: u64,
    max_upper: f64,
    min_ratio: f64,
    zeros: u64,
}

fn pair_stats(
    phi: &CutEmbedding,
    omega: &Modulus,
    pairs: impl IntoParallelIterator<Item = (DiscretePoint, DiscretePoint, f64)>,
) -> PairStats {
    pairs
        .into_par_iter()
        .fold(
            || PairStats { pairs: 0, max_upper: f64::NEG_INFINITY, min_ratio: f64::INFINITY, zeros: 0 },
            |mut acc, (x, y, d)| {
                let l1 = phi.l1_dist(x, y);
                acc.pairs += 1;
                acc.max_upper = acc.max_upper.max(l1 - d);
                let w = omega.eval(d);
                if w > 0.0 {
                    acc.min_ratio = acc.min_ratio.min(l1 / w);
                } else {
                    acc.zeros += 1;
                }
                acc
            },
        )
        .reduce(
            || PairStats { pairs: 0, max_upper: f64::NEG_INFINITY, min_ratio: f64::INFINITY, zeros: 0 },
            |a, b| PairStats {
                pairs: a.pairs + b.pairs,
                max_upper: a.max_upper.max(b.max_upper),
                min_ratio: a.min_ratio.min(b.min_ratio),
                zeros: a.zeros + b.zeros,
            },
        )
}

/// Checks the two-sided compression of `phi` against `omega` over every pair
/// of the word ball of the given radius (the domain must contain it), then
/// replays the local-inequality chain at the scale
/// `n = floor(min(radius / (1 + gamma), (radius - 1) / alpha))` with band
/// constants measured on the exact depth range the replay uses.
pub fn compression_check(
    phi: &CutEmbedding,
    omega: &Modulus,
    radius: u32,
    alpha: f64,
) -> Result<CompressionReport, PoincareError> {
    if radius == 0 {
        return Err(PoincareError::ZeroScale);
    }
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(PoincareError::BadAlpha(alpha));
    }
    let ball = word_ball::<DiscretePoint>(radius, NODE_BUDGET)?;
    let members = ball_members_checked(phi, &ball, radius)?;
    let doubled = word_ball::<DiscretePoint>(2 * radius, NODE_BUDGET)?;
    let dist_lookup = &doubled;
    let member_ref = &members;
    let stats = pair_stats(
        phi,
        omega,
        (0..members.len()).into_par_iter().flat_map_iter(move |i| {
            let x = member_ref[i];
            member_ref[i + 1..].iter().map(move |&y| {
                let d = dist_lookup
                    .dist(x.inv().mul(y))
                    .expect("pair displacement stays within the doubled ball");
                (x, y, d as f64)
            })
        }),
    );

    // Band range: gamma >= 4 forces n <= radius / 5, so depths t <= n^2 are
    // covered by sampling up to ceil(radius^2 / 25).
    let depth_cap = (radius as u64 * radius as u64).div_ceil(25);
    let depths: Vec<u64> = (1..=depth_cap.max(1)).collect();
    let band = WordBand::measure(&depths, NODE_BUDGET)?;
    let n_star = (radius as f64 / (1.0 + band.gamma)).min((radius as f64 - 1.0) / alpha);
    let n = n_star.floor() as i64;
    let replay = if n >= 1 {
        let n = n as u32;
        debug_assert!((n as u64) * (n as u64) <= depth_cap.max(1));
        let small = word_ball::<DiscretePoint>(n, NODE_BUDGET)?;
        let ball_size = small.len() as u64;
        let lhs = local_lhs(phi, n)?.hi;
        let rhs = local_rhs(phi, n, alpha)?;
        let mut modulus_sum = 0.0;
        for t in 1..=(n as u64) * (n as u64) {
            let w = omega.eval(band.beta * (t as f64).sqrt());
            modulus_sum += pow_f(ball_size as f64 * w, 2.0) / pow_f(t as f64, 2.0);
        }
        let lo = band.beta / 2.0f64.sqrt();
        let hi = band.beta * (((n as f64) * (n as f64) + 1.0) / 2.0).sqrt();
        let integral_lower = band.beta
            * band.beta
            * (ball_size * ball_size) as f64
            * criterion_integral(omega, lo, hi, 1e-10);
        Some(PassToIntReplay {
            n,
            alpha,
            beta: band.beta,
            gamma: band.gamma,
            ball_size,
            local_lhs: lhs,
            local_rhs: rhs,
            local_ratio: (rhs > 0.0).then(|| lhs / rhs),
            modulus_sum,
            integral_lower,
        })
    } else {
        None
    };

    Ok(CompressionReport {
        radius,
        pairs: stats.pairs,
        max_upper_violation: stats.max_upper,
        min_lower_ratio: stats.min_ratio,
        zero_modulus_pairs: stats.zeros,
        replay,
    })
}
