use std::collections::HashMap;

use super::discrete::{KeyBuildHasher, LatticePoint};
use super::{DiscretePoint, GroupError};

type KeyMap = HashMap<u64, u32, KeyBuildHasher>;

/// Closed word-metric ball around the identity, stored as packed keys.
pub struct Ball<P: LatticePoint> {
    pub radius: u32,
    dist: KeyMap,
    /// `sizes[r]` is `|B_r|` for `r = 0..=radius`.
    pub sizes: Vec<u64>,
    _marker: std::marker::PhantomData<P>,
}

impl<P: LatticePoint> Ball<P> {
    /// Word distance to the identity, or `None` outside the ball.
    pub fn dist(&self, p: P) -> Option<u32> {
        let key = p.pack().ok()?;
        self.dist.get(&key).copied()
    }

    pub fn contains(&self, p: P) -> bool {
        self.dist(p).is_some()
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, u32)> + '_ {
        self.dist.iter().map(|(&k, &d)| (P::unpack(k), d))
    }

    /// Members sorted by `(dist, coordinates)`; the order used by exports.
    pub fn members_sorted(&self) -> Vec<(P, u32)> {
        let mut rows: Vec<(P, u32)> = self.iter().collect();
        rows.sort_by_key(|(p, d)| (*d, p.sort_key()));
        rows
    }

    /// Members at distance at most `r`.
    pub fn members_within(&self, r: u32) -> Vec<P> {
        self.iter().filter(|&(_, d)| d <= r).map(|(p, _)| p).collect()
    }
}

/// Breadth-first search of the closed ball `B_R` from the identity.
///
/// `node_budget` caps the number of stored points; exceeding it reports how
/// far the search got.
pub fn word_ball<P: LatticePoint>(radius: u32, node_budget: usize) -> Result<Ball<P>, GroupError> {
    let mut dist = KeyMap::default();
    let mut sizes = Vec::with_capacity(radius as usize + 1);
    let origin = P::identity().pack()?;
    dist.insert(origin, 0);
    sizes.push(1);
    let mut frontier = vec![origin];
    for r in 1..=radius {
        let mut next = Vec::new();
        for &key in &frontier {
            let p = P::unpack(key);
            for q in p.neighbors() {
                let qk = q.pack()?;
                if !dist.contains_key(&qk) {
                    if dist.len() >= node_budget {
                        return Err(GroupError::NodeBudget {
                            budget: node_budget,
                            explored: dist.len(),
                            radius: r - 1,
                        });
                    }
                    dist.insert(qk, r);
                    next.push(qk);
                }
            }
        }
        sizes.push(dist.len() as u64);
        frontier = next;
    }
    Ok(Ball { radius, dist, sizes, _marker: std::marker::PhantomData })
}

/// Exact word distance from the identity to `p` by bidirectional
/// breadth-first search, always expanding the smaller frontier.
///
/// Correctness of the stop rule: once levels `r0` and `r1` are complete, any
/// undiscovered path has length at least `r0 + r1 + 1`, so the best recorded
/// meeting is exact as soon as `best <= r0 + r1`.
pub fn word_dist<P: LatticePoint>(p: P, node_budget: usize) -> Result<u32, GroupError> {
    if p == P::identity() {
        return Ok(0);
    }
    let mut side: [KeyMap; 2] = [KeyMap::default(), KeyMap::default()];
    let start = [P::identity().pack()?, p.pack()?];
    side[0].insert(start[0], 0);
    side[1].insert(start[1], 0);
    let mut frontier = [vec![start[0]], vec![start[1]]];
    let mut level = [0u32, 0u32];
    let mut best = u32::MAX;

    loop {
        if best <= level[0] + level[1] {
            return Ok(best);
        }
        let s = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let o = 1 - s;
        let mut next = Vec::new();
        let froz = std::mem::take(&mut frontier[s]);
        for &key in &froz {
            let u = P::unpack(key);
            for v in u.neighbors() {
                let vk = v.pack()?;
                if !side[s].contains_key(&vk) {
                    if side[0].len() + side[1].len() >= node_budget {
                        return Err(GroupError::NodeBudget {
                            budget: node_budget,
                            explored: side[0].len() + side[1].len(),
                            radius: level[s],
                        });
                    }
                    side[s].insert(vk, level[s] + 1);
                    if let Some(&d) = side[o].get(&vk) {
                        best = best.min(level[s] + 1 + d);
                    }
                    next.push(vk);
                }
            }
        }
        frontier[s] = next;
        level[s] += 1;
        if frontier[s].is_empty() && best == u32::MAX {
            // Cannot happen on a Cayley graph of a group: it is connected.
            unreachable!("frontier died before meeting");
        }
    }
}

/// Measured two-sided comparison between `d(0, Z^n)` and `sqrt(n)`.
#[derive(Clone, Debug)]
pub struct WordBand {
    /// `(n, d(0, Z^n), d / sqrt(n))` per sampled power.
    pub samples: Vec<(u64, u32, f64)>,
    /// Infimum of the measured ratios.
    pub beta: f64,
    /// Supremum of the measured ratios.
    pub gamma: f64,
}

impl WordBand {
    /// Measures `d(0, Z^n)` for each requested power of the center generator.
    pub fn measure(ns: &[u64], node_budget: usize) -> Result<WordBand, GroupError> {
        let mut samples = Vec::with_capacity(ns.len());
        let mut beta = f64::INFINITY;
        let mut gamma: f64 = 0.0;
        for &n in ns {
            let p = DiscretePoint::Z.pow(n as i64);
            let d = word_dist(p, node_budget)?;
            let ratio = d as f64 / (n as f64).sqrt();
            beta = beta.min(ratio);
            gamma = gamma.max(ratio);
            samples.push((n, d, ratio));
        }
        Ok(WordBand { samples, beta, gamma })
    }
}

/// Least-squares slope of `ln size` against `ln radius`.
pub fn growth_exponent(points: &[(u32, u64)]) -> f64 {
    let n = points.len() as f64;
    assert!(n >= 2.0, "need at least two radii for a growth fit");
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(r, size) in points {
        let x = (r as f64).ln();
        let y = (size as f64).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
