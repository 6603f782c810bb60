//! Sparsest-cut instances and their relaxation ladder.
//!
//! An [`Instance`] pairs symmetric capacity and demand matrices. Three
//! solvers bracket its value: [`opt_exact`] enumerates every cut,
//! [`lp_metric`] relaxes cuts to arbitrary semimetrics (a linear program),
//! and [`sdp_neg`] relaxes to negative-type semimetrics (a semidefinite
//! program solved by a first-order projection loop in [`solver`]). The
//! relaxations sandwich the optimum: `lp <= sdp <= opt`. The module also
//! builds instances from word-ball metrics of the discrete Heisenberg
//! groups and replays duality certificates from the embed module.

mod solver;
#[cfg(test)]
mod tests;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{self, EmbedError, FiniteMetric, NegativeType};
use crate::group::{word_ball, GroupError, LatticePoint};
use crate::simplex::{LinearProgram, LpError, LpOutcome, Relation};
use crate::util::CompensatedSum;

/// Exact cut enumeration is refused above this size.
pub const OPT_POINT_CAP: usize = 24;
/// The metric LP is refused above this size.
pub const LP_POINT_CAP: usize = 30;
/// The semidefinite solve is refused above this size.
pub const SDP_POINT_CAP: usize = 12;
/// Every feasibility residual of a returned SDP solution is at most this.
pub const SDP_RESIDUAL_TOL: f64 = 1e-8;

const NODE_BUDGET: usize = 20_000_000;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("matrix must be {n}x{n}, row {row} has {len} entries")]
    BadShape { row: usize, len: usize, n: usize },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("asymmetric entry at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative entry at ({i}, {j})")]
    Negative { i: usize, j: usize },
    #[error("nonzero diagonal entry at {i}")]
    NonzeroDiagonal { i: usize },
    #[error("total demand must be positive")]
    ZeroDemand,
    #[error("no cut carries positive demand")]
    NoCrossingDemand,
    #[error("{op} supports at most {max} points, got {n}")]
    TooManyPoints { op: &'static str, n: usize, max: usize },
    #[error("adjacency entries must be 0 or 1, found {value} at ({i}, {j})")]
    NotAdjacency { i: usize, j: usize, value: f64 },
    #[error(
        "semidefinite solve stopped after {iterations} iterations with residuals \
         psd {:.3e}, triangle {:.3e}, normalization {:.3e}",
        residuals.psd_violation,
        residuals.triangle_violation,
        residuals.normalization_error
    )]
    NonConvergence { residuals: Residuals, iterations: u64 },
    #[error("could not parse instance: {0}")]
    Parse(String),
    #[error("internal solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A sparsest-cut instance: symmetric nonnegative capacities and demands
/// with zero diagonals and positive total demand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    n: usize,
    capacity: Vec<Vec<f64>>,
    demand: Vec<Vec<f64>>,
}

fn validate_matrix(m: &[Vec<f64>], n: usize) -> Result<(), SdpError> {
    for (row, r) in m.iter().enumerate() {
        if r.len() != n {
            return Err(SdpError::BadShape { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        if m[i][i] != 0.0 {
            return Err(SdpError::NonzeroDiagonal { i });
        }
        for j in 0..n {
            if !m[i][j].is_finite() {
                return Err(SdpError::NonFinite { i, j });
            }
            if m[i][j] < 0.0 {
                return Err(SdpError::Negative { i, j });
            }
            if m[i][j] != m[j][i] {
                return Err(SdpError::Asymmetric { i, j });
            }
        }
    }
    Ok(())
}

impl Instance {
    pub fn new(capacity: Vec<Vec<f64>>, demand: Vec<Vec<f64>>) -> Result<Instance, SdpError> {
        let n = capacity.len();
        if demand.len() != n {
            return Err(SdpError::BadShape { row: 0, len: demand.len(), n });
        }
        validate_matrix(&capacity, n)?;
        validate_matrix(&demand, n)?;
        let total: f64 = demand.iter().flatten().sum();
        if total <= 0.0 {
            return Err(SdpError::ZeroDemand);
        }
        Ok(Instance { n, capacity, demand })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> &[Vec<f64>] {
        &self.capacity
    }

    pub fn demand(&self) -> &[Vec<f64>] {
        &self.demand
    }

    pub fn cap(&self, i: usize, j: usize) -> f64 {
        self.capacity[i][j]
    }

    pub fn dem(&self, i: usize, j: usize) -> f64 {
        self.demand[i][j]
    }

    /// Unordered pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    /// Parses the text format: `n`, then `n` rows of capacities, then `n`
    /// rows of demands (a blank separator line is conventional but any
    /// whitespace does).
    pub fn from_text(input: &str) -> Result<Instance, SdpError> {
        let mut tokens = input.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| SdpError::Parse("empty input".into()))?
            .parse()
            .map_err(|e| SdpError::Parse(format!("bad point count: {e}")))?;
        let mut read_matrix = |name: &str| -> Result<Vec<Vec<f64>>, SdpError> {
            let mut m = vec![vec![0.0; n]; n];
            for row in m.iter_mut() {
                for slot in row.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| {
                        SdpError::Parse(format!("{name}: expected {} entries", n * n))
                    })?;
                    *slot = tok
                        .parse()
                        .map_err(|e| SdpError::Parse(format!("{name}: bad entry {tok:?}: {e}")))?;
                }
            }
            Ok(m)
        };
        let capacity = read_matrix("capacity")?;
        let demand = read_matrix("demand")?;
        if let Some(extra) = tokens.next() {
            return Err(SdpError::Parse(format!("trailing token {extra:?}")));
        }
        Instance::new(capacity, demand)
    }

    pub fn to_text(&self) -> String {
        let render = |m: &[Vec<f64>]| {
            m.iter()
                .map(|row| {
                    row.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        format!("{}\n{}\n\n{}\n", self.n, render(&self.capacity), render(&self.demand))
    }

    /// Relabels points: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Instance, SdpError> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || !perm.iter().all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
        {
            return Err(SdpError::Solver("not a permutation".into()));
        }
        let mut capacity = vec![vec![0.0; n]; n];
        let mut demand = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                capacity[perm[i]][perm[j]] = self.capacity[i][j];
                demand[perm[i]][perm[j]] = self.demand[i][j];
            }
        }
        Instance::new(capacity, demand)
    }
}

/// Feasibility residuals of a semidefinite solution, plus the solver's final
/// dual-update magnitude as a stationarity diagnostic.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    pub psd_violation: f64,
    pub triangle_violation: f64,
    pub normalization_error: f64,
    pub stationarity_proxy: f64,
}

/// A converged point of the negative-type relaxation.
#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    /// Centered Gram matrix of the embedding vectors.
    pub gram: Vec<Vec<f64>>,
    /// Squared distances `gram[i][i] + gram[j][j] - 2 gram[i][j]`.
    pub distances: Vec<Vec<f64>>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: u64,
}

/// Squared distances of a Gram matrix.
pub fn gram_distances(gram: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = gram.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = gram[i][i] + gram[j][j] - 2.0 * gram[i][j];
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Magnitude of the most negative eigenvalue, `0` when positive
/// semidefinite. This is the independent check of what the solve loop
/// promises, so it goes through a fresh eigendecomposition.
pub fn psd_violation(gram: &[Vec<f64>]) -> f64 {
    let n = gram.len();
    let m = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    let eig = SymmetricEigen::new(m);
    (-eig.eigenvalues.min()).max(0.0)
}

/// Largest violation of `d_ij <= d_ik + d_kj` over all triples, `0` when the
/// matrix is a semimetric.
pub fn max_triangle_violation(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max(d[i][j] - d[i][k] - d[k][j]);
            }
        }
    }
    worst.max(0.0)
}

/// `|sum_{i<j} D_ij d_ij - 1|`.
pub fn normalization_error(inst: &Instance, d: &[Vec<f64>]) -> f64 {
    let total: f64 = inst.pairs().map(|(i, j)| inst.dem(i, j) * d[i][j]).sum();
    (total - 1.0).abs()
}

/// Whether the cut `mask` separates `i` and `j` (bit set means inside).
fn cut_separates(mask: u32, i: usize, j: usize) -> bool {
    (mask >> i) & 1 != (mask >> j) & 1
}

/// Exact sparsest cut by enumeration: the minimum over proper nonempty cuts
/// of crossing capacity over crossing demand, skipping cuts with zero
/// crossing demand. Returns the value and an optimal cut as a bitmask in
/// which point `n-1` is never set (one representative per complement pair).
pub fn opt_exact(inst: &Instance) -> Result<(f64, u32), SdpError> {
    let n = inst.n();
    if n > OPT_POINT_CAP {
        return Err(SdpError::TooManyPoints { op: "opt_exact", n, max: OPT_POINT_CAP });
    }
    let n_cuts = (1u32 << (n - 1)) - 1;
    let best = (1..=n_cuts)
        .into_par_iter()
        .filter_map(|mask| {
            let mut cap = CompensatedSum::default();
            let mut dem = CompensatedSum::default();
            for i in 0..n {
                for j in i + 1..n {
                    if cut_separates(mask, i, j) {
                        cap.add(inst.cap(i, j));
                        dem.add(inst.dem(i, j));
                    }
                }
            }
            let dem = dem.total();
            if dem > 0.0 {
                Some((cap.total() / dem, mask))
            } else {
                None
            }
        })
        .min_by(|a, b| a.partial_cmp(b).expect("cut ratios are finite"));
    best.ok_or(SdpError::NoCrossingDemand)
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Metric LP relaxation: minimize the capacity functional over all
/// semimetrics with demand functional 1. Small instances materialize every
/// triangle row; larger ones generate violated rows on demand.
pub fn lp_metric(inst: &Instance) -> Result<f64, SdpError> {
    let n = inst.n();
    if n > LP_POINT_CAP {
        return Err(SdpError::TooManyPoints { op: "lp_metric", n, max: LP_POINT_CAP });
    }
    let p = n * (n - 1) / 2;
    let objective: Vec<f64> = inst.pairs().map(|(i, j)| inst.cap(i, j)).collect();
    let normalization: Vec<f64> = inst.pairs().map(|(i, j)| inst.dem(i, j)).collect();

    let triangle_row = |i: usize, j: usize, k: usize| {
        let mut row = vec![0.0; p];
        row[pair_index(n, i, j)] = 1.0;
        row[pair_index(n, i.min(k), i.max(k))] = -1.0;
        row[pair_index(n, k.min(j), k.max(j))] = -1.0;
        row
    };
    let solve_with = |rows: &[(usize, usize, usize)]| -> Result<(f64, Vec<f64>), SdpError> {
        let mut lp = LinearProgram::minimize(objective.clone());
        lp.add_row(normalization.clone(), Relation::Eq, 1.0);
        for &(i, j, k) in rows {
            lp.add_row(triangle_row(i, j, k), Relation::Le, 0.0);
        }
        match lp.solve()? {
            LpOutcome::Optimal(s) => Ok((s.objective, s.x)),
            other => Err(SdpError::Solver(format!("metric LP reported {other:?}"))),
        }
    };
    let all_triples = || {
        let mut t = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if k != i && k != j {
                        t.push((i, j, k));
                    }
                }
            }
        }
        t
    };

    if n <= 16 {
        return solve_with(&all_triples()).map(|(v, _)| v);
    }

    // Row generation: most triangle rows are slack at the optimum. Seed
    // with the triangles through one hub, which already pin the solution
    // close to a metric, then add the worst offenders each round.
    let mut active: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if i != 0 {
                active.push((i, j, 0));
            }
        }
    }
    for _round in 0..200 {
        let (value, d) = solve_with(&active)?;
        let mut violated: Vec<(f64, (usize, usize, usize))> = Vec::new();
        for &(i, j, k) in &all_triples() {
            let viol = d[pair_index(n, i, j)]
                - d[pair_index(n, i.min(k), i.max(k))]
                - d[pair_index(n, k.min(j), k.max(j))];
            if viol > 1e-9 {
                violated.push((viol, (i, j, k)));
            }
        }
        if violated.is_empty() {
            return Ok(value);
        }
        violated.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for (_, t) in violated.into_iter().take(8 * n) {
            if !active.contains(&t) {
                active.push(t);
            }
        }
    }
    Err(SdpError::Solver("triangle row generation did not settle".into()))
}

/// Negative-type semidefinite relaxation; see [`solver`] for the method.
pub fn sdp_neg(inst: &Instance) -> Result<SdpSolution, SdpError> {
    solver::solve(inst)
}

/// Joint report of the relaxation ladder on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub lp: f64,
    pub sdp: f64,
    pub opt: f64,
    pub gap: f64,
    pub residuals: Residuals,
    pub optimal_cut_mask: u32,
}

/// Runs all three solvers and checks the sandwich
/// `lp - 1e-5 <= sdp <= opt + 1e-5` before reporting; a violated sandwich is
/// an error, never a silent report.
pub fn integrality_gap(inst: &Instance) -> Result<GapReport, SdpError> {
    let (opt, mask) = opt_exact(inst)?;
    let lp = lp_metric(inst)?;
    let sol = sdp_neg(inst)?;
    let sdp = sol.objective;
    if lp > sdp + 1e-5 || sdp > opt + 1e-5 {
        return Err(SdpError::Solver(format!(
            "relaxation sandwich violated: lp {lp}, sdp {sdp}, opt {opt}"
        )));
    }
    let gap = if sdp > 1e-12 {
        opt / sdp
    } else if opt <= 1e-12 {
        1.0
    } else {
        f64::INFINITY
    };
    if gap < 1.0 - 1e-5 {
        return Err(SdpError::Solver(format!("integrality gap {gap} fell below 1")));
    }
    Ok(GapReport { n: inst.n(), lp, sdp, opt, gap, residuals: sol.residuals, optimal_cut_mask: mask })
}

/// Uniform-demands instance of a simple graph: capacities are the adjacency
/// matrix, every pair demands one unit.
pub fn uniform_instance(adjacency: &[Vec<f64>]) -> Result<Instance, SdpError> {
    let n = adjacency.len();
    validate_matrix(adjacency, n)?;
    for i in 0..n {
        for j in 0..n {
            let v = adjacency[i][j];
            if v != 0.0 && v != 1.0 {
                return Err(SdpError::NotAdjacency { i, j, value: v });
            }
        }
    }
    let demand = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect();
    Instance::new(adjacency.to_vec(), demand)
}

/// Which discrete Heisenberg lattice a ball lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lattice {
    H3,
    H5,
}

/// Optional transform applied to the word metric before the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Transform {
    Raw,
    Sqrt,
    Snowflake(f64),
}

/// Word-ball pipeline output; stages that exceed their size caps stay
/// `None`, the negative-type verdict is always present.
#[derive(Clone, Debug)]
pub struct HeisReport {
    pub lattice: Lattice,
    pub radius: u32,
    pub transform: Transform,
    pub metric: FiniteMetric,
    pub negative_type: bool,
    /// Witness quadratic form value when negative type fails.
    pub witness_value: Option<f64>,
    /// Exact distortion when the ball has at most [`embed::C1_POINT_CAP`] points.
    pub c1: Option<f64>,
    /// Dual sparsest-cut instance when the certificate pipeline ran.
    pub instance: Option<Instance>,
    /// Full relaxation ladder on that instance when within [`SDP_POINT_CAP`].
    pub gap: Option<GapReport>,
}

fn ball_metric<P: LatticePoint>(radius: u32) -> Result<FiniteMetric, SdpError> {
    let ball = word_ball::<P>(radius, NODE_BUDGET)?;
    let lookup = word_ball::<P>(2 * radius, NODE_BUDGET)?;
    // Sorted member order keeps the metric (and everything downstream)
    // independent of hash iteration order.
    let members: Vec<P> = ball.members_sorted().into_iter().map(|(p, _)| p).collect();
    let n = members.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let rel = members[i].inverse().compose(members[j]);
            let d = lookup
                .dist(rel)
                .ok_or_else(|| SdpError::Solver("doubled ball misses a difference".into()))?;
            dist[i][j] = d as f64;
            dist[j][i] = d as f64;
        }
    }
    Ok(FiniteMetric::new(dist)?)
}

/// Builds the word-ball metric of `B_radius`, applies the transform, records
/// the negative-type verdict, and runs as much of the distortion and
/// integrality-gap pipeline as the size caps allow.
pub fn heis_instance(
    lattice: Lattice,
    radius: u32,
    transform: Transform,
) -> Result<HeisReport, SdpError> {
    let base = match lattice {
        Lattice::H3 => ball_metric::<crate::group::DiscretePoint3>(radius)?,
        Lattice::H5 => ball_metric::<crate::group::DiscretePoint>(radius)?,
    };
    let metric = match transform {
        Transform::Raw => base,
        Transform::Sqrt => base.snowflake(0.5)?,
        Transform::Snowflake(eps) => base.snowflake(eps)?,
    };
    let n = metric.n();
    let (negative_type, witness_value) = match embed::is_negative_type(&metric) {
        NegativeType::Yes => (true, None),
        NegativeType::No { value, .. } => (false, Some(value)),
    };
    let mut c1 = None;
    let mut instance = None;
    let mut gap = None;
    if n <= embed::C1_POINT_CAP {
        c1 = Some(embed::c1_exact(&metric)?.c1);
        if negative_type {
            let cert = embed::gap_certificate(&metric)?;
            let inst = Instance::new(cert.capacity, cert.demand)?;
            if n <= SDP_POINT_CAP {
                gap = Some(integrality_gap(&inst)?);
            }
            instance = Some(inst);
        }
    }
    Ok(HeisReport {
        lattice,
        radius,
        transform,
        metric,
        negative_type,
        witness_value,
        c1,
        instance,
        gap,
    })
}
