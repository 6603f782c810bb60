//! Deterministic families of test sets for perimeter scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LatticeSet;
use crate::group::{word_ball, DiscretePoint, GroupError, LatticePoint};

/// One generated set, labeled for scan output.
pub struct CorpusItem {
    pub family: &'static str,
    pub params: String,
    pub set: LatticeSet<DiscretePoint>,
}

/// Which families a scan draws from; all sizes stay at desk scale.
#[derive(Clone, Debug)]
pub struct CorpusSpec {
    /// Word balls `B_1 ..= B_max`.
    pub ball_max_radius: u32,
    /// Symmetric boxes, one per entry of horizontal half-sides
    /// `(a, b, c, d)`; the center half-extent is `(max side)^2`.
    pub boxes: Vec<(i64, i64, i64, i64)>,
    /// Vertical segments `{Z^i : 0 <= i < n}`, one per length.
    pub segment_lengths: Vec<u64>,
    /// Random connected cell unions: `(count, cells per set)`.
    pub random_unions: (usize, usize),
    /// Tilted half-space cuts of a box: `(count, box half-side)`.
    pub tilted: (usize, i64),
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            ball_max_radius: 5,
            boxes: vec![(1, 1, 1, 1), (2, 2, 2, 2), (3, 1, 3, 1), (4, 2, 1, 2)],
            segment_lengths: vec![2, 4, 8, 16, 32, 64],
            random_unions: (40, 400),
            tilted: (10, 3),
            seed: 7,
        }
    }
}

/// Materializes every set in the spec, deterministically in `seed`.
pub fn corpus(spec: &CorpusSpec) -> Result<Vec<CorpusItem>, GroupError> {
    let mut items = Vec::new();
    for r in 1..=spec.ball_max_radius {
        let ball = word_ball::<DiscretePoint>(r, 1 << 26)?;
        items.push(CorpusItem {
            family: "ball",
            params: format!("R={r}"),
            set: LatticeSet::from_points(ball.iter().map(|(p, _)| p)),
        });
    }
    for &(sa, sb, sc, sd) in &spec.boxes {
        let e = sa.max(sb).max(sc).max(sd).pow(2);
        items.push(CorpusItem {
            family: "box",
            params: format!("a={sa},b={sb},c={sc},d={sd},e={e}"),
            set: box_set(sa, sb, sc, sd, e),
        });
    }
    for &n in &spec.segment_lengths {
        items.push(CorpusItem {
            family: "segment",
            params: format!("n={n}"),
            set: LatticeSet::from_points((0..n as i64).map(|i| DiscretePoint::new(0, 0, 0, 0, i))),
        });
    }
    let (count, cells) = spec.random_unions;
    for i in 0..count {
        let set = random_cellular(cells, spec.seed.wrapping_add(i as u64));
        items.push(CorpusItem {
            family: "random-cellular",
            params: format!("cells={cells},seed={}", spec.seed.wrapping_add(i as u64)),
            set,
        });
    }
    let (tcount, half) = spec.tilted;
    for i in 0..tcount {
        let seed = spec.seed.wrapping_add(1000 + i as u64);
        let (set, params) = tilted_halfspace_box(half, seed);
        items.push(CorpusItem { family: "tilted-box", params, set });
    }
    Ok(items)
}

/// Box `{|a|<=sa, ..., |e|<=se}`.
pub fn box_set(sa: i64, sb: i64, sc: i64, sd: i64, se: i64) -> LatticeSet<DiscretePoint> {
    let mut pts = Vec::new();
    for a in -sa..=sa {
        for b in -sb..=sb {
            for c in -sc..=sc {
                for d in -sd..=sd {
                    for e in -se..=se {
                        pts.push(DiscretePoint::new(a, b, c, d, e));
                    }
                }
            }
        }
    }
    LatticeSet::from_points(pts)
}

/// Connected union grown by seeded random neighbor accretion.
pub fn random_cellular(cells: usize, seed: u64) -> LatticeSet<DiscretePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![DiscretePoint::IDENTITY];
    let mut member: std::collections::HashSet<DiscretePoint> =
        chosen.iter().copied().collect();
    while chosen.len() < cells {
        let base = chosen[rng.gen_range(0..chosen.len())];
        let nbrs = base.neighbors();
        let q = nbrs[rng.gen_range(0..nbrs.len())];
        if member.insert(q) {
            chosen.push(q);
        }
    }
    LatticeSet::from_points(chosen)
}

/// Box cut by a random integer half-space touching the center sheet.
fn tilted_halfspace_box(half: i64, seed: u64) -> (LatticeSet<DiscretePoint>, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: Vec<i64> = (0..5).map(|_| rng.gen_range(-2..=2)).collect();
    let theta = rng.gen_range(0..=half);
    let e_half = half * half;
    let mut pts = Vec::new();
    for a in -half..=half {
        for b in -half..=half {
            for c in -half..=half {
                for d in -half..=half {
                    for e in -e_half..=e_half {
                        if n[0] * a + n[1] * b + n[2] * c + n[3] * d + n[4] * e <= theta {
                            pts.push(DiscretePoint::new(a, b, c, d, e));
                        }
                    }
                }
            }
        }
    }
    let params = format!(
        "half={half},n=({},{},{},{},{}),theta={theta}",
        n[0], n[1], n[2], n[3], n[4]
    );
    // A degenerate draw can reject every point; fall back to the full box.
    if pts.is_empty() {
        return (box_set(half, half, half, half, e_half), params + ",fallback=box");
    }
    (LatticeSet::from_points(pts), params)
}

/// One scan row per corpus item; columns match the scan CSV contract.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub family: &'static str,
    pub params: String,
    pub size: u64,
    pub h_perim: u64,
    pub v_perim_lo: f64,
    pub v_perim_hi: f64,
    pub ratio_hi: f64,
    pub sup_rate: f64,
    pub p4_norm: f64,
}

impl ScanRow {
    pub const CSV_HEADER: &'static str =
        "family,params,size,h_perim,v_perim_lo,v_perim_hi,ratio_hi,sup_rate,p4_norm";

    pub fn to_csv(&self) -> String {
        format!(
            "{},\"{}\",{},{},{},{},{},{},{}",
            self.family,
            self.params,
            self.size,
            self.h_perim,
            self.v_perim_lo,
            self.v_perim_hi,
            self.ratio_hi,
            self.sup_rate,
            self.p4_norm
        )
    }
}

/// Profiles every corpus item. Items are processed in parallel but reported
/// in corpus order, so output is independent of thread count.
pub fn scan(items: &[CorpusItem]) -> Vec<ScanRow> {
    use rayon::prelude::*;
    items
        .par_iter()
        .map(|item| {
            let report = item.set.report().expect("corpus sets are nonempty");
            let p4 = item.set.p_vertical_norm(4.0).expect("p=4 exceeds 2");
            ScanRow {
                family: item.family,
                params: item.params.clone(),
                size: report.size,
                h_perim: report.h_count,
                v_perim_lo: report.v_perimeter.lo,
                v_perim_hi: report.v_perimeter.hi,
                ratio_hi: report.iso_ratio.hi,
                sup_rate: report.sup_rate,
                p4_norm: p4.hi,
            }
        })
        .collect()
}
