//! Discrete perimeters of finite lattice sets.
//!
//! The horizontal boundary pairs a set member with a non-member Cayley
//! neighbor. The vertical boundary at depth `t` pairs a member `x` with a
//! non-member `x Z^{+-t}`; the vertical perimeter aggregates the depth counts
//! as `(sum_t |bd_v^t|^2 / t^2)^(1/2)`. Beyond the set's vertical extent every
//! depth count equals `2 |set|` exactly, so the infinite sum is reported as a
//! certified bracket obtained by partial summation plus integral bounds.

pub mod corpus;

use std::collections::{HashMap, HashSet};

use crate::group::{KeyBuildHasher, LatticePoint};
use crate::interval::Interval;
use crate::util::{bracket_power_tail, pow_f};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerimeterError {
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("vertical depth must be positive, got {0}")]
    BadDepth(i64),
    #[error("exponent must exceed 2, got {0}")]
    BadExponent(f64),
}

/// Relative width at which tail brackets stop refining.
pub const TAIL_RELATIVE_TOLERANCE: f64 = 1e-6;

/// A finite set of lattice points with its fiber structure precomputed.
pub struct LatticeSet<P: LatticePoint> {
    points: HashSet<P, KeyBuildHasher>,
    /// Largest center gap within a fiber: `max { |e_x - e_y| }` over members
    /// of a common fiber; 0 when every fiber is a singleton.
    z_extent: u64,
}

impl<P: LatticePoint> LatticeSet<P> {
    pub fn from_points(points: impl IntoIterator<Item = P>) -> Self {
        let points: HashSet<P, KeyBuildHasher> = points.into_iter().collect();
        let mut fibers: HashMap<u64, (i64, i64), KeyBuildHasher> = HashMap::default();
        for &p in &points {
            let e = p.center();
            let entry = fibers.entry(p.fiber()).or_insert((e, e));
            entry.0 = entry.0.min(e);
            entry.1 = entry.1.max(e);
        }
        let z_extent = fibers
            .values()
            .map(|&(lo, hi)| (hi - lo) as u64)
            .max()
            .unwrap_or(0);
        LatticeSet { points, z_extent }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: P) -> bool {
        self.points.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = P> + '_ {
        self.points.iter().copied()
    }

    /// Members in deterministic coordinate order.
    pub fn members_sorted(&self) -> Vec<P> {
        let mut v: Vec<P> = self.points.iter().copied().collect();
        v.sort_by_key(|p| p.sort_key());
        v
    }

    pub fn z_extent(&self) -> u64 {
        self.z_extent
    }

    /// Ordered boundary pairs `(x, y)` with `x` inside, `y = x s` outside.
    pub fn horizontal_boundary(&self) -> Vec<(P, P)> {
        let mut pairs = Vec::new();
        for &x in &self.points {
            for y in x.neighbors() {
                if !self.points.contains(&y) {
                    pairs.push((x, y));
                }
            }
        }
        pairs.sort_by_key(|&(x, y)| (x.sort_key(), y.sort_key()));
        pairs
    }

    /// `|horizontal_boundary|` without materializing the pairs.
    pub fn horizontal_count(&self) -> u64 {
        let mut count = 0;
        for &x in &self.points {
            for y in x.neighbors() {
                if !self.points.contains(&y) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Number of pairs `(x, x Z^{+-t})` with `x` inside and the shift outside.
    pub fn vertical_t_boundary(&self, t: i64) -> Result<u64, PerimeterError> {
        if t <= 0 {
            return Err(PerimeterError::BadDepth(t));
        }
        if t as u64 > self.z_extent {
            // Both shifts leave the set for every member.
            return Ok(2 * self.points.len() as u64);
        }
        let mut count = 0;
        for &x in &self.points {
            if !self.points.contains(&x.z_shift(t)) {
                count += 1;
            }
            if !self.points.contains(&x.z_shift(-t)) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Depth counts for `t = 1 ..= z_extent` (all deeper counts are `2|set|`).
    pub fn vertical_counts(&self) -> Vec<u64> {
        (1..=self.z_extent as i64)
            .map(|t| self.vertical_t_boundary(t).expect("positive depth"))
            .collect()
    }

    /// Certified bracket of `(sum_t |bd_v^t|^2 / t^2)^(1/2)`.
    pub fn vertical_perimeter(&self) -> Interval {
        self.weighted_vertical_sum(2.0).sqrt()
    }

    /// Certified bracket of `(sum_t |bd_v^t|^p / t^(1+p/2))^(1/p)`, `p > 2`.
    pub fn p_vertical_norm(&self, p: f64) -> Result<Interval, PerimeterError> {
        if !(p > 2.0) {
            return Err(PerimeterError::BadExponent(p));
        }
        Ok(self.weighted_vertical_sum(p).powf(1.0 / p))
    }

    /// Bracket of `sum_t count(t)^p / t^(1+p/2)` for `p >= 2`.
    ///
    /// Terms with `t <= z_extent` are summed exactly; constant terms beyond
    /// are added explicitly until integral bounds on the remainder bring the
    /// bracket under [`TAIL_RELATIVE_TOLERANCE`].
    fn weighted_vertical_sum(&self, p: f64) -> Interval {
        if self.points.is_empty() {
            return Interval::point(0.0);
        }
        let weight = |t: u64| pow_f(t as f64, 1.0 + 0.5 * p);
        let mut finite = 0.0;
        for (i, &cnt) in self.vertical_counts().iter().enumerate() {
            finite += pow_f(cnt as f64, p) / weight(i as u64 + 1);
        }
        let mp = pow_f((2 * self.points.len()) as f64, p);
        let start = if self.z_extent == 0 {
            // No exact part; the t = 1 constant term seeds the bracket.
            finite = mp / weight(1);
            1
        } else {
            self.z_extent
        };
        bracket_power_tail(finite, start, mp, p, TAIL_RELATIVE_TOLERANCE)
    }

    /// Bracket of `vertical_perimeter / |horizontal_boundary|`.
    pub fn iso_ratio(&self) -> Result<Interval, PerimeterError> {
        if self.points.is_empty() {
            return Err(PerimeterError::EmptySet);
        }
        let h = self.horizontal_count() as f64;
        Ok(self.vertical_perimeter().div_scalar(h))
    }

    /// `(t*, max_t |bd_v^t| / sqrt(t))`; the supremum over all depths is
    /// attained at some `t <= z_extent + 1` because deeper counts are the
    /// constant `2|set|` divided by a growing root.
    pub fn sup_vertical_rate(&self) -> Result<(u64, f64), PerimeterError> {
        if self.points.is_empty() {
            return Err(PerimeterError::EmptySet);
        }
        let mut best = (0u64, f64::NEG_INFINITY);
        for t in 1..=self.z_extent + 1 {
            let cnt = self.vertical_t_boundary(t as i64).expect("positive depth") as f64;
            let rate = cnt / (t as f64).sqrt();
            if rate > best.1 {
                best = (t, rate);
            }
        }
        Ok(best)
    }

    /// Full numeric profile of the set.
    pub fn report(&self) -> Result<PerimeterReport, PerimeterError> {
        if self.points.is_empty() {
            return Err(PerimeterError::EmptySet);
        }
        let v = self.vertical_perimeter();
        let h = self.horizontal_count();
        let (sup_t, sup_rate) = self.sup_vertical_rate()?;
        Ok(PerimeterReport {
            size: self.points.len() as u64,
            h_count: h,
            v_perimeter: v,
            iso_ratio: v.div_scalar(h as f64),
            sup_rate_depth: sup_t,
            sup_rate,
            z_extent: self.z_extent,
        })
    }
}

/// Aggregate perimeter quantities of one set.
#[derive(Clone, Debug)]
pub struct PerimeterReport {
    pub size: u64,
    pub h_count: u64,
    pub v_perimeter: Interval,
    pub iso_ratio: Interval,
    pub sup_rate_depth: u64,
    pub sup_rate: f64,
    pub z_extent: u64,
}
