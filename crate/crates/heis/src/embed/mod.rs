//! Finite metric spaces and their L1 geometry.
//!
//! This module validates finite (semi)metrics, tests membership in the
//! negative-type cone via the Schoenberg criterion, produces Hilbertian
//! square-root embeddings, applies snowflake transforms, and computes the
//! exact L1 distortion together with duality certificates (see [`c1_exact`]
//! and [`gap_certificate`]).

mod cutcone;
#[cfg(test)]
mod tests;

pub use cutcone::{
    c1_exact, gap_certificate, CutMeasure, CutWeight, DistortionCertificate, GapCertificate,
    C1_POINT_CAP,
};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use thiserror::Error;

use crate::simplex::LpError;

/// Absolute slack allowed when checking the triangle inequality.
pub const TRIANGLE_TOL: f64 = 1e-9;
/// Eigenvalues of the centered matrix above `-NEG_EIGEN_TOL` count as
/// nonnegative for the Schoenberg test; more negative ones are genuine
/// violations of negative type.
pub const NEG_EIGEN_TOL: f64 = 1e-9;

const GENERATOR_ATTEMPTS: usize = 256;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("distance matrix must be {n}x{n}, row {row} has {len} entries")]
    BadShape { row: usize, len: usize, n: usize },
    #[error("a metric needs at least one point")]
    Empty,
    #[error("non-finite distance at ({i}, {j})")]
    NonFiniteDistance { i: usize, j: usize },
    #[error("asymmetric distances at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("nonzero diagonal entry at {i}")]
    NonzeroDiagonal { i: usize },
    #[error("negative distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("zero distance between distinct points {i} and {j}; use the semimetric constructor if intended")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{j}) exceeds d({i},{k}) + d({k},{j}) by {defect:.3e}")]
    TriangleViolation { i: usize, j: usize, k: usize, defect: f64 },
    #[error("metric is not of negative type (witness quadratic form {value:.6e})")]
    NotNegativeType { witness: Vec<f64>, value: f64 },
    #[error("{op} supports at most {max} points, got {n}")]
    TooManyPoints { op: &'static str, n: usize, max: usize },
    #[error("degenerate metric: every distance is zero")]
    DegenerateMetric,
    #[error("snowflake exponent must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("scale factor must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("could not parse metric: {0}")]
    Parse(String),
    #[error("linear programming failure: {0}")]
    Lp(#[from] LpError),
    #[error("internal solver failure: {0}")]
    Solver(String),
    #[error("exhausted {0} attempts without sampling a negative-type metric")]
    GeneratorExhausted(usize),
}

/// A finite metric space on points `0..n`, stored as a full symmetric
/// distance matrix with zero diagonal. Strict metrics forbid zero distances
/// between distinct points; the semimetric constructor flags them as allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<Vec<f64>>,
    semimetric: bool,
}

impl FiniteMetric {
    /// Validates and wraps a strict metric.
    pub fn new(dist: Vec<Vec<f64>>) -> Result<FiniteMetric, EmbedError> {
        Self::build(dist, false)
    }

    /// Like [`FiniteMetric::new`] but allows zero off-diagonal distances.
    pub fn new_semimetric(dist: Vec<Vec<f64>>) -> Result<FiniteMetric, EmbedError> {
        Self::build(dist, true)
    }

    fn build(dist: Vec<Vec<f64>>, semimetric: bool) -> Result<FiniteMetric, EmbedError> {
        let n = dist.len();
        if n == 0 {
            return Err(EmbedError::Empty);
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(EmbedError::BadShape { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(EmbedError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() {
                    return Err(EmbedError::NonFiniteDistance { i, j });
                }
                if d < 0.0 {
                    return Err(EmbedError::NegativeDistance { i, j });
                }
                if dist[j][i] != d {
                    return Err(EmbedError::Asymmetric { i, j });
                }
                if i != j && d == 0.0 && !semimetric {
                    return Err(EmbedError::ZeroDistance { i: i.min(j), j: i.max(j) });
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let defect = dist[i][j] - dist[i][k] - dist[k][j];
                    if defect > TRIANGLE_TOL {
                        return Err(EmbedError::TriangleViolation { i, j, k, defect });
                    }
                }
            }
        }
        Ok(FiniteMetric { n, dist, semimetric })
    }

    /// L1 distances of an explicit point configuration (rows are points).
    pub fn from_points_l1(points: &[Vec<f64>]) -> Result<FiniteMetric, EmbedError> {
        let n = points.len();
        if n == 0 {
            return Err(EmbedError::Empty);
        }
        let dim = points[0].len();
        for (row, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(EmbedError::BadShape { row, len: p.len(), n: dim });
            }
        }
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d: f64 =
                    points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).abs()).sum();
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        Self::build(dist, false)
    }

    /// Parses the text format: first token is `n`, followed by `n*n` reals
    /// in row-major order.
    pub fn from_text(input: &str, semimetric: bool) -> Result<FiniteMetric, EmbedError> {
        let mut tokens = input.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| EmbedError::Parse("empty input".into()))?
            .parse()
            .map_err(|e| EmbedError::Parse(format!("bad point count: {e}")))?;
        if n == 0 {
            return Err(EmbedError::Empty);
        }
        let mut dist = vec![vec![0.0; n]; n];
        for row in dist.iter_mut() {
            for slot in row.iter_mut() {
                let tok = tokens
                    .next()
                    .ok_or_else(|| EmbedError::Parse(format!("expected {} entries", n * n)))?;
                *slot = tok
                    .parse()
                    .map_err(|e| EmbedError::Parse(format!("bad distance {tok:?}: {e}")))?;
            }
        }
        if let Some(extra) = tokens.next() {
            return Err(EmbedError::Parse(format!("trailing token {extra:?}")));
        }
        Self::build(dist, semimetric)
    }

    /// Inverse of [`FiniteMetric::from_text`]; floats print in shortest
    /// round-trip form, so the encoding is lossless.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in &self.dist {
            let line: Vec<String> = row.iter().map(|d| format!("{d}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn is_semimetric(&self) -> bool {
        self.semimetric
    }

    /// Unordered pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn scale(&self, kappa: f64) -> Result<FiniteMetric, EmbedError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(EmbedError::BadScale(kappa));
        }
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| kappa * d).collect())
            .collect();
        Ok(FiniteMetric { n: self.n, dist, semimetric: self.semimetric })
    }

    /// Entrywise `d^(1-eps)`; a metric again by concavity of the power.
    pub fn snowflake(&self, eps: f64) -> Result<FiniteMetric, EmbedError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(EmbedError::BadEpsilon(eps));
        }
        let q = 1.0 - eps;
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d.powf(q)).collect())
            .collect();
        Ok(FiniteMetric { n: self.n, dist, semimetric: self.semimetric })
    }
}

/// Verdict of the negative-type test. A failing metric carries a mean-zero
/// witness `x` with strictly positive quadratic form `sum x_i x_j d_ij`.
#[derive(Clone, Debug)]
pub enum NegativeType {
    Yes,
    No { witness: Vec<f64>, value: f64 },
}

impl NegativeType {
    pub fn holds(&self) -> bool {
        matches!(self, NegativeType::Yes)
    }
}

/// Doubly centered matrix `-1/2 P d P` with `P = I - J/n`, computed via the
/// row-mean form so it is exactly symmetric.
fn centered_matrix(m: &FiniteMetric) -> DMatrix<f64> {
    let n = m.n();
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| m.d(i, j)).sum::<f64>() / nf)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| -0.5 * (m.d(i, j) - row_mean[i] - row_mean[j] + grand))
}

fn quadratic_form(m: &FiniteMetric, x: &[f64]) -> f64 {
    let n = m.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * x[j] * m.d(i, j);
        }
    }
    acc
}

/// Centers and normalizes an eigenvector into a witness with `sum x = 0` and
/// largest entry magnitude 1.
fn witness_from(column: &[f64]) -> Vec<f64> {
    let mean = column.iter().sum::<f64>() / column.len() as f64;
    let mut x: Vec<f64> = column.iter().map(|v| v - mean).collect();
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale > 0.0 {
        for v in &mut x {
            *v /= scale;
        }
    }
    x
}

/// Schoenberg criterion: `(X, sqrt(d))` embeds in Hilbert space iff the
/// doubly centered matrix is positive semidefinite.
pub fn is_negative_type(m: &FiniteMetric) -> NegativeType {
    let eig = SymmetricEigen::new(centered_matrix(m));
    let mut min_idx = 0;
    for k in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[k] < eig.eigenvalues[min_idx] {
            min_idx = k;
        }
    }
    if eig.eigenvalues[min_idx] >= -NEG_EIGEN_TOL {
        return NegativeType::Yes;
    }
    let column: Vec<f64> = eig.eigenvectors.column(min_idx).iter().copied().collect();
    let witness = witness_from(&column);
    let value = quadratic_form(m, &witness);
    NegativeType::No { witness, value }
}

/// Vectors `v_i` with `|v_i - v_j|^2 = d_ij`, from the eigendecomposition of
/// the centered matrix. Eigenvalues in `[-NEG_EIGEN_TOL, 0)` are clipped to
/// zero; anything lower is a negative-type failure and errors with a witness.
pub fn sqrt_embed(m: &FiniteMetric) -> Result<Vec<Vec<f64>>, EmbedError> {
    let n = m.n();
    let eig = SymmetricEigen::new(centered_matrix(m));
    for k in 0..n {
        if eig.eigenvalues[k] < -NEG_EIGEN_TOL {
            let column: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let witness = witness_from(&column);
            let value = quadratic_form(m, &witness);
            return Err(EmbedError::NotNegativeType { witness, value });
        }
    }
    let roots: Vec<f64> = (0..n).map(|k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| roots[k] * eig.eigenvectors[(i, k)]).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let sq: f64 = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if (sq - m.d(i, j)).abs() > 1e-8 {
                return Err(EmbedError::Solver(format!(
                    "square-root embedding off by {:.3e} at ({i}, {j})",
                    (sq - m.d(i, j)).abs()
                )));
            }
        }
    }
    Ok(vectors)
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Samples a random negative-type metric: Gaussian points, squared Euclidean
/// distances, then shortest-path closure to repair the triangle inequality.
/// The closure can leave the negative-type cone, so the result is re-tested
/// and the sample rejected on failure.
pub fn random_negative_type<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<FiniteMetric, EmbedError> {
    if n == 0 {
        return Err(EmbedError::Empty);
    }
    let dim = 3;
    for _ in 0..GENERATOR_ATTEMPTS {
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| standard_normal(rng)).collect())
            .collect();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let sq: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                dist[i][j] = sq;
                dist[j][i] = sq;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        let Ok(metric) = FiniteMetric::new(dist) else {
            continue;
        };
        if is_negative_type(&metric).holds() {
            return Ok(metric);
        }
    }
    Err(EmbedError::GeneratorExhausted(GENERATOR_ATTEMPTS))
}
