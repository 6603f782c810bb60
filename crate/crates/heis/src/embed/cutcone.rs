//! Exact L1 distortion over the cut cone, with duality certificates.
//!
//! The distortion of an n-point metric is computed from the linear program
//!
//! ```text
//! maximize t
//! subject to  sum_S lambda_S delta_S(i,j) <= d(i,j)          for all i < j
//!             sum_S lambda_S delta_S(i,j) >= t * d(i,j)      for all i < j
//!             lambda >= 0
//! ```
//!
//! over all proper nonempty cuts S, where delta_S is the cut semimetric.
//! The optimum satisfies c1 = 1/t. Row duals of the two blocks form
//! capacity and demand matrices whose sparsest-cut value certifies the
//! distortion from below; that conversion is [`gap_certificate`].

use serde::Serialize;

use super::{is_negative_type, EmbedError, FiniteMetric, NegativeType};
use crate::simplex::{LinearProgram, LpOutcome, Relation};

/// Cut enumeration is exponential; past this point the LP is refused.
pub const C1_POINT_CAP: usize = 16;

/// One cut: the subset is the set bits of `mask` (point `n-1` is never a
/// member, fixing one representative per complement pair).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutWeight {
    pub mask: u32,
    pub weight: f64,
}

/// A nonnegative combination of cut semimetrics on `n` points.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct CutMeasure {
    #[serde(skip)]
    n: usize,
    cuts: Vec<CutWeight>,
}

/// Whether the cut `mask` separates points `i` and `j`.
pub fn separates(mask: u32, i: usize, j: usize) -> bool {
    (mask >> i) & 1 != (mask >> j) & 1
}

impl CutMeasure {
    pub fn new(n: usize, cuts: Vec<CutWeight>) -> Result<CutMeasure, EmbedError> {
        if n == 0 || n > 32 {
            return Err(EmbedError::Solver(format!("cut measure on {n} points")));
        }
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        for c in &cuts {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(EmbedError::Solver(format!("bad cut weight {}", c.weight)));
            }
            if c.mask == 0 || c.mask >= full {
                return Err(EmbedError::Solver(format!(
                    "cut {:#x} is not a proper nonempty subset",
                    c.mask
                )));
            }
        }
        Ok(CutMeasure { n, cuts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cuts(&self) -> &[CutWeight] {
        &self.cuts
    }

    /// The combined semimetric at a pair.
    pub fn eval(&self, i: usize, j: usize) -> f64 {
        self.cuts
            .iter()
            .filter(|c| separates(c.mask, i, j))
            .map(|c| c.weight)
            .sum()
    }

    /// Full matrix of the combined semimetric.
    pub fn metric(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.eval(i, j);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }
}

/// Output of [`c1_exact`]: the distortion, an optimal cut measure `rho` with
/// `rho <= d <= c1 * rho` entrywise, and the dual capacity and demand
/// matrices. Serializes as `{c1, cuts, capacity, demand}`.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionCertificate {
    pub c1: f64,
    pub cuts: CutMeasure,
    pub capacity: Vec<Vec<f64>>,
    pub demand: Vec<Vec<f64>>,
}

impl DistortionCertificate {
    /// Re-checks everything the solver promised: primal feasibility of the
    /// cut measure within 1e-8 and agreement of the dual objective with the
    /// LP value within 1e-7.
    pub fn verify(&self, m: &FiniteMetric) -> Result<(), EmbedError> {
        let t = 1.0 / self.c1;
        for (i, j) in m.pairs() {
            let rho = self.cuts.eval(i, j);
            if rho > m.d(i, j) + 1e-8 {
                return Err(EmbedError::Solver(format!(
                    "cut measure exceeds the metric at ({i}, {j}): {rho} > {}",
                    m.d(i, j)
                )));
            }
            if rho < t * m.d(i, j) - 1e-8 {
                return Err(EmbedError::Solver(format!(
                    "cut measure falls below t*d at ({i}, {j}): {rho} < {}",
                    t * m.d(i, j)
                )));
            }
        }
        let dual_obj = sum_weighted(&self.capacity, m);
        if (dual_obj - t).abs() > 1e-7 {
            return Err(EmbedError::Solver(format!(
                "duality gap: capacity side {dual_obj}, LP value {t}"
            )));
        }
        Ok(())
    }
}

/// `sum_{i<j} w[i][j] * d(i,j)`.
fn sum_weighted(w: &[Vec<f64>], m: &FiniteMetric) -> f64 {
    m.pairs().map(|(i, j)| w[i][j] * m.d(i, j)).sum()
}

/// Basis roundoff leaves dual entries around 1e-16 where the true value is
/// zero; anything this far below the dominant entry is flattened so that
/// "zero crossing demand" is a sharp notion downstream.
fn clean_dual(matrix: &mut [Vec<f64>]) {
    let top = matrix
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-9 * top;
    for row in matrix.iter_mut() {
        for v in row.iter_mut() {
            if v.abs() <= floor {
                *v = 0.0;
            }
        }
    }
}

/// Exact L1 distortion of a metric on at most [`C1_POINT_CAP`] points.
///
/// Enumerates all `2^(n-1) - 1` cuts as LP columns and solves the program in
/// the module docs. Distances are normalized by their maximum before the
/// solve, which makes the optimal value scale-free: metrics that differ by
/// an exactly representable factor produce bit-identical LP data and hence
/// bit-identical results. The returned certificate is verified before it is
/// handed back, so a successful return is self-checking.
pub fn c1_exact(m: &FiniteMetric) -> Result<DistortionCertificate, EmbedError> {
    let n = m.n();
    if n > C1_POINT_CAP {
        return Err(EmbedError::TooManyPoints { op: "c1_exact", n, max: C1_POINT_CAP });
    }
    let d_max = m.pairs().map(|(i, j)| m.d(i, j)).fold(0.0f64, f64::max);
    if d_max == 0.0 {
        return Err(EmbedError::DegenerateMetric);
    }
    let pairs: Vec<(usize, usize)> = m.pairs().collect();
    let n_cuts = (1usize << (n - 1)) - 1;

    // Columns: one weight per cut, then t last.
    let mut objective = vec![0.0; n_cuts + 1];
    objective[n_cuts] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for &(i, j) in &pairs {
        let d = m.d(i, j) / d_max;
        let mut upper = vec![0.0; n_cuts + 1];
        let mut lower = vec![0.0; n_cuts + 1];
        for mask in 1..=n_cuts {
            if separates(mask as u32, i, j) {
                upper[mask - 1] = 1.0;
                lower[mask - 1] = 1.0;
            }
        }
        lower[n_cuts] = -d;
        lp.add_row(upper, Relation::Le, d);
        lp.add_row(lower, Relation::Ge, 0.0);
    }
    let solution = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => {
            return Err(EmbedError::Solver("distortion LP reported infeasible".into()))
        }
        LpOutcome::Unbounded => {
            return Err(EmbedError::Solver("distortion LP reported unbounded".into()))
        }
    };
    let t = solution.objective;
    if t <= 1e-12 {
        return Err(EmbedError::Solver(format!("distortion LP value {t} is not positive")));
    }

    // Map back to the caller's scale: cut weights multiply by d_max, dual
    // prices divide by it.
    let cuts: Vec<CutWeight> = (1..=n_cuts)
        .filter(|&mask| solution.x[mask - 1] > 0.0)
        .map(|mask| CutWeight { mask: mask as u32, weight: solution.x[mask - 1] * d_max })
        .collect();
    let mut capacity = vec![vec![0.0; n]; n];
    let mut demand = vec![vec![0.0; n]; n];
    for (r, &(i, j)) in pairs.iter().enumerate() {
        // Upper rows price capacity; lower rows price demand with the
        // opposite sign under the maximization convention.
        let c = solution.duals[2 * r].max(0.0) / d_max;
        let d = (-solution.duals[2 * r + 1]).max(0.0) / d_max;
        capacity[i][j] = c;
        capacity[j][i] = c;
        demand[i][j] = d;
        demand[j][i] = d;
    }
    clean_dual(&mut capacity);
    clean_dual(&mut demand);

    let certificate = DistortionCertificate {
        c1: 1.0 / t,
        cuts: CutMeasure::new(n, cuts)?,
        capacity,
        demand,
    };
    certificate.verify(m)?;
    Ok(certificate)
}

/// Sparsest-cut certificate extracted from the distortion LP dual.
///
/// `gap_lower_bound` is the cut optimum of `(capacity, demand)` divided by
/// the relaxation value that the metric `d` itself achieves, so it lower
/// bounds the integrality gap witnessed by this instance.
#[derive(Clone, Debug, Serialize)]
pub struct GapCertificate {
    pub c1: f64,
    pub capacity: Vec<Vec<f64>>,
    pub demand: Vec<Vec<f64>>,
    pub gap_lower_bound: f64,
}

/// Minimum over proper nonempty cuts of crossing capacity over crossing
/// demand, skipping cuts with zero crossing demand.
fn cut_optimum(
    capacity: &[Vec<f64>],
    demand: &[Vec<f64>],
    n: usize,
) -> Result<f64, EmbedError> {
    let n_cuts = (1usize << (n - 1)) - 1;
    let mut best = f64::INFINITY;
    for mask in 1..=n_cuts as u32 {
        let mut cap = 0.0;
        let mut dem = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if separates(mask, i, j) {
                    cap += capacity[i][j];
                    dem += demand[i][j];
                }
            }
        }
        if dem > 0.0 {
            best = best.min(cap / dem);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(EmbedError::Solver("no cut carries positive demand".into()))
    }
}

/// Converts a negative-type metric into a sparsest-cut instance whose
/// integrality gap is at least the metric's L1 distortion.
///
/// The dual matrices of [`c1_exact`] satisfy, for every cut S, crossing
/// capacity >= crossing demand, while the metric itself achieves relaxation
/// value `sum(C d) / sum(D d) = t = 1/c1`. The checked postcondition is
/// `gap_lower_bound >= c1 - 1e-6`; since `d` has negative type it is
/// feasible for the semidefinite relaxation, which is therefore at most
/// `sum(C d) / sum(D d)`.
pub fn gap_certificate(m: &FiniteMetric) -> Result<GapCertificate, EmbedError> {
    if let NegativeType::No { witness, value } = is_negative_type(m) {
        return Err(EmbedError::NotNegativeType { witness, value });
    }
    let cert = c1_exact(m)?;
    let cap_d = sum_weighted(&cert.capacity, m);
    let dem_d = sum_weighted(&cert.demand, m);
    if dem_d <= 0.0 {
        return Err(EmbedError::Solver("dual demand side vanished".into()));
    }
    let relaxation = cap_d / dem_d;
    let opt = cut_optimum(&cert.capacity, &cert.demand, m.n())?;
    let gap_lower_bound = opt / relaxation;
    if gap_lower_bound < cert.c1 - 1e-6 {
        return Err(EmbedError::Solver(format!(
            "certificate too weak: gap bound {gap_lower_bound} below c1 {}",
            cert.c1
        )));
    }
    Ok(GapCertificate {
        c1: cert.c1,
        capacity: cert.capacity,
        demand: cert.demand,
        gap_lower_bound,
    })
}
