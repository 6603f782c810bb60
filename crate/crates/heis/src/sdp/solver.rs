//! First-order solver for the negative-type relaxation.
//!
//! The variable is the centered Gram matrix `B`; squared distances are read
//! off as `d_ij = B_ii + B_jj - 2 B_ij`. Feasibility splits into two convex
//! pieces: the positive-semidefinite cone, and the polyhedron cut out by
//! triangle rows, nonnegativity rows, and the demand normalization. The
//! solve alternates between them by ADMM with over-relaxation and adaptive
//! penalty: the cone step is a spectral clip (the linear objective folds into
//! its argument), the polyhedron step is a Dykstra sweep over the rows. A
//! final polish alternates exact projections and then rescales; every
//! constraint except the normalization is homogeneous, so the rescale makes
//! the normalization exact without disturbing the rest.
//!
//! Every constraint normal annihilates the all-ones vector, so iterates stay
//! centered and the cone projection never needs an explicit centering step;
//! the clip argument is re-centered each round only to stop roundoff drift.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{
    gram_distances, max_triangle_violation, normalization_error, psd_violation, Instance,
    Residuals, SdpError, SdpSolution, SDP_POINT_CAP, SDP_RESIDUAL_TOL,
};

const MAX_ITERATIONS: u64 = 200_000;
const EPS_ABS: f64 = 1e-12;
const EPS_REL: f64 = 3e-10;
const ALPHA: f64 = 1.6;
const RHO_ADAPT_PERIOD: u64 = 25;
const RHO_RATIO: f64 = 10.0;
const DYKSTRA_CYCLE_CAP: usize = 4_000;
const POLISH_ROUNDS: usize = 5_000;
const POLISH_MOVE_TOL: f64 = 2.5e-10;

/// Row of the feasibility polyhedron, stored structurally so dot products
/// and updates touch a constant number of entries.
#[derive(Clone, Copy)]
enum Row {
    /// `d_ij - d_ik - d_kj <= 0`; squared Frobenius norm 10.
    Triangle { i: usize, j: usize, k: usize },
    /// `d_ij >= 0`; squared Frobenius norm 4.
    NonNeg { i: usize, j: usize },
}

impl Row {
    fn norm_sq(self) -> f64 {
        match self {
            Row::Triangle { .. } => 10.0,
            Row::NonNeg { .. } => 4.0,
        }
    }

    /// `<A, x>` for this row's normal `A`.
    fn dot(self, x: &DMatrix<f64>) -> f64 {
        match self {
            Row::Triangle { i, j, k } => 2.0 * (x[(i, k)] + x[(k, j)] - x[(i, j)] - x[(k, k)]),
            Row::NonNeg { i, j } => 2.0 * x[(i, j)] - x[(i, i)] - x[(j, j)],
        }
    }

    /// `x += coef * A`.
    fn apply(self, x: &mut DMatrix<f64>, coef: f64) {
        match self {
            Row::Triangle { i, j, k } => {
                x[(k, k)] -= 2.0 * coef;
                x[(i, j)] -= coef;
                x[(j, i)] -= coef;
                x[(i, k)] += coef;
                x[(k, i)] += coef;
                x[(k, j)] += coef;
                x[(j, k)] += coef;
            }
            Row::NonNeg { i, j } => {
                x[(i, i)] -= coef;
                x[(j, j)] -= coef;
                x[(i, j)] += coef;
                x[(j, i)] += coef;
            }
        }
    }
}

struct Polyhedron {
    rows: Vec<Row>,
    /// Demand Laplacian: `<l_d, B> = sum_{i<j} D_ij d_ij`.
    l_d: DMatrix<f64>,
    l_d_norm_sq: f64,
}

impl Polyhedron {
    fn build(inst: &Instance) -> Polyhedron {
        let n = inst.n();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if k != i && k != j {
                        rows.push(Row::Triangle { i, j, k });
                    }
                }
                rows.push(Row::NonNeg { i, j });
            }
        }
        let l_d = laplacian(inst.demand());
        let l_d_norm_sq = l_d.dot(&l_d);
        Polyhedron { rows, l_d, l_d_norm_sq }
    }

    /// Largest constraint violation at `x`.
    fn violation(&self, x: &DMatrix<f64>) -> f64 {
        let rows = self
            .rows
            .iter()
            .map(|r| r.dot(x))
            .fold(0.0f64, f64::max);
        rows.max((self.l_d.dot(x) - 1.0).abs())
    }

    /// Dykstra projection onto the polyhedron. Corrections start at zero
    /// (required for the projection guarantee; `corr` is only a reusable
    /// buffer), and the stop rule demands both feasibility and a settled
    /// iterate, since feasibility alone does not certify proximity to the
    /// projection. The normalization hyperplane is affine, so it projects
    /// plainly without a correction term.
    fn project(&self, x: &mut DMatrix<f64>, corr: &mut [f64], tol: f64) {
        debug_assert_eq!(corr.len(), self.rows.len());
        corr.iter_mut().for_each(|p| *p = 0.0);
        let mut prev = x.clone();
        for _cycle in 0..DYKSTRA_CYCLE_CAP {
            for (row, p) in self.rows.iter().zip(corr.iter_mut()) {
                if *p != 0.0 {
                    row.apply(x, *p);
                }
                let theta = (row.dot(x) / row.norm_sq()).max(0.0);
                if theta != 0.0 {
                    row.apply(x, -theta);
                }
                *p = theta;
            }
            let residual = self.l_d.dot(x) - 1.0;
            if residual != 0.0 {
                *x -= &self.l_d * (residual / self.l_d_norm_sq);
            }
            let settled = (&*x - &prev).norm() <= tol;
            if settled && self.violation(x) <= tol {
                return;
            }
            prev.copy_from(x);
        }
    }
}

/// `diag(M 1) - M`; pairs `<laplacian(M), B> = sum_{i<j} M_ij d_ij(B)`.
fn laplacian(m: &[Vec<f64>]) -> DMatrix<f64> {
    let n = m.len();
    let mut l = DMatrix::from_fn(n, n, |i, j| -m[i][j]);
    for i in 0..n {
        l[(i, i)] = m[i].iter().sum();
    }
    l
}

/// Projection onto the positive-semidefinite cone by eigenvalue clipping.
fn clip_psd(x: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let clipped = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(0.0)),
    );
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&clipped);
    let out = scaled * eig.eigenvectors.transpose();
    (&out + out.transpose()) * 0.5
}

/// Subtracts row, column, and grand means in place.
fn recenter(x: &mut DMatrix<f64>) {
    let n = x.nrows();
    let row_means: Vec<f64> = (0..n).map(|i| x.row(i).sum() / n as f64).collect();
    let grand: f64 = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] += grand - row_means[i] - row_means[j];
        }
    }
}

fn to_rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| x[(i, j)]).collect()).collect()
}

/// Alternating exact projections from the polyhedron side, then an exact
/// normalization rescale. Ends on the polyhedron, so the returned matrix has
/// machine-level triangle and normalization residuals and a spectrum dipping
/// below zero by no more than the final inter-projection move.
fn polish(poly: &Polyhedron, w: &DMatrix<f64>) -> DMatrix<f64> {
    let mut x = w.clone();
    let mut corr = vec![0.0; poly.rows.len()];
    for _ in 0..POLISH_ROUNDS {
        let y = clip_psd(&x);
        x = y.clone();
        poly.project(&mut x, &mut corr, 1e-14);
        if (&x - &y).norm() <= POLISH_MOVE_TOL {
            break;
        }
    }
    let scale = poly.l_d.dot(&x);
    if scale > 0.0 {
        x /= scale;
    }
    x
}

pub(crate) fn solve(inst: &Instance) -> Result<SdpSolution, SdpError> {
    let n = inst.n();
    if n > SDP_POINT_CAP {
        return Err(SdpError::TooManyPoints { op: "sdp_neg", n, max: SDP_POINT_CAP });
    }
    let poly = Polyhedron::build(inst);
    let l_c = laplacian(inst.capacity());

    // Equilateral start: distances 1/(total demand) meet the normalization
    // exactly and sit strictly inside the cone and the triangle rows.
    let total_demand: f64 = inst.pairs().map(|(i, j)| inst.dem(i, j)).sum();
    let d0 = 1.0 / total_demand;
    let mut w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            d0 / 2.0 * (1.0 - 1.0 / n as f64)
        } else {
            d0 / 2.0 * (-1.0 / n as f64)
        }
    });
    let mut u = DMatrix::zeros(n, n);
    let mut corr = vec![0.0; poly.rows.len()];
    let mut rho = l_c.norm().max(1.0);
    let mut b = w.clone();
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;

    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        let mut arg = &w - &u - &l_c * (1.0 / rho);
        recenter(&mut arg);
        b = clip_psd(&arg);
        let b_hat = &b * ALPHA + &w * (1.0 - ALPHA);
        let w_prev = w.clone();
        w = &b_hat + &u;
        let inner_tol = (0.01 * primal.min(1.0)).clamp(1e-14, 1e-7);
        poly.project(&mut w, &mut corr, inner_tol);
        u += &b_hat - &w;

        primal = (&b - &w).norm();
        dual = rho * (&w - &w_prev).norm();
        let scale = b.norm().max(w.norm()).max(1.0);
        let eps = EPS_ABS + EPS_REL * scale;
        if primal <= eps && dual <= eps {
            break;
        }
        if iter % RHO_ADAPT_PERIOD == 0 {
            if primal > RHO_RATIO * dual {
                rho *= 2.0;
                u /= 2.0;
            } else if dual > RHO_RATIO * primal {
                rho /= 2.0;
                u *= 2.0;
            }
        }
        if iter == MAX_ITERATIONS {
            let x = polish(&poly, &w);
            let gram = to_rows(&x);
            let distances = gram_distances(&gram);
            let residuals = Residuals {
                psd_violation: psd_violation(&gram),
                triangle_violation: max_triangle_violation(&distances),
                normalization_error: normalization_error(inst, &distances),
                stationarity_proxy: dual,
            };
            return Err(SdpError::NonConvergence { residuals, iterations });
        }
    }

    let midpoint = (&b + &w) * 0.5;
    let x = polish(&poly, &midpoint);
    let gram = to_rows(&x);
    let distances = gram_distances(&gram);
    let residuals = Residuals {
        psd_violation: psd_violation(&gram),
        triangle_violation: max_triangle_violation(&distances),
        normalization_error: normalization_error(inst, &distances),
        stationarity_proxy: dual,
    };
    if residuals.psd_violation > SDP_RESIDUAL_TOL
        || residuals.triangle_violation > SDP_RESIDUAL_TOL
        || residuals.normalization_error > SDP_RESIDUAL_TOL
    {
        return Err(SdpError::NonConvergence { residuals, iterations });
    }
    let objective: f64 = inst
        .pairs()
        .map(|(i, j)| inst.cap(i, j) * distances[i][j])
        .sum();
    Ok(SdpSolution { gram, distances, objective, residuals, iterations })
}
