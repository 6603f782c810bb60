//! Dense two-phase revised simplex for small linear programs.
//!
//! Problems are stated over nonnegative structural variables with rows of
//! any relation; the solver normalizes right-hand sides, adds slack and
//! artificial columns, runs a feasibility phase, and then optimizes with
//! Dantzig pricing, falling back to Bland's rule when the objective stalls
//! on degenerate vertices. The basis inverse is kept explicitly, updated by
//! eta pivots and refactorized periodically to cap drift. Row duals are
//! reported in the caller's row order and sign convention.

use thiserror::Error;

/// Feasibility tolerance: a solution is accepted when every row residual and
/// basic variable is within this of its bound.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Optimality tolerance on reduced costs.
pub const OPTIMALITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-10;
const REFACTOR_PERIOD: u32 = 64;
const STALL_LIMIT: u32 = 60;
const ITERATION_LIMIT: u64 = 200_000;
/// Residual artificial mass above this after the feasibility phase means the
/// constraints are inconsistent.
const PHASE1_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("row {0} has {1} coefficients, expected {2}")]
    RowShape(usize, usize, usize),
    #[error("non-finite coefficient in the problem data")]
    NonFinite,
    #[error("iteration limit reached; the problem may be cycling")]
    IterationLimit,
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

/// Result of a solve: an optimal vertex, or a certificate of why none exists.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Structural variable values.
    pub x: Vec<f64>,
    /// Objective in the caller's sense (maximization values are not negated).
    pub objective: f64,
    /// One dual per input row, in input order. At optimality
    /// `sum_i duals[i] * rhs[i]` equals the objective, duals are nonnegative
    /// on binding `Ge` rows and nonpositive on binding `Le` rows of a
    /// minimization (reversed for maximization), and equality rows are free.
    pub duals: Vec<f64>,
    pub iterations: u64,
}

/// A linear program over nonnegative variables.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    n: usize,
    maximize: bool,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    relations: Vec<Relation>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> LinearProgram {
        LinearProgram {
            n: objective.len(),
            maximize: false,
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>) -> LinearProgram {
        LinearProgram { maximize: true, ..LinearProgram::minimize(objective) }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.n {
                return Err(LpError::RowShape(i, row.len(), self.n));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        if self.objective.iter().any(|v| !v.is_finite())
            || self.rhs.iter().any(|v| !v.is_finite())
        {
            return Err(LpError::NonFinite);
        }
        let costs: Vec<f64> = if self.maximize {
            self.objective.iter().map(|c| -c).collect()
        } else {
            self.objective.clone()
        };
        let outcome = Tableau::new(&self.rows, &self.relations, &self.rhs, &costs)?.run()?;
        Ok(match outcome {
            RawOutcome::Infeasible => LpOutcome::Infeasible,
            RawOutcome::Unbounded => LpOutcome::Unbounded,
            RawOutcome::Optimal { x, mut duals, objective, iterations } => {
                let (objective, flip) =
                    if self.maximize { (-objective, -1.0) } else { (objective, 1.0) };
                for d in &mut duals {
                    *d *= flip;
                }
                LpOutcome::Optimal(LpSolution { x, objective, duals, iterations })
            }
        })
    }
}

enum RawOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<f64>, duals: Vec<f64>, objective: f64, iterations: u64 },
}

/// Working system in standard form: structural columns, then one slack per
/// inequality row, then one artificial per row that lacks a natural basic
/// column. Right-hand sides are normalized nonnegative; `row_sign` remembers
/// flipped rows so duals can be reported in input orientation.
struct Tableau<'a> {
    m: usize,
    n_struct: usize,
    rows: &'a [Vec<f64>],
    row_sign: Vec<f64>,
    b: Vec<f64>,
    slack_row: Vec<usize>,
    slack_dir: Vec<f64>,
    art_row: Vec<usize>,
    n_total: usize,
    costs: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    b_inv: Vec<f64>,
    x_b: Vec<f64>,
    pivots_since_refactor: u32,
    iterations: u64,
}

impl<'a> Tableau<'a> {
    fn new(
        rows: &'a [Vec<f64>],
        relations: &[Relation],
        rhs: &[f64],
        costs: &[f64],
    ) -> Result<Tableau<'a>, LpError> {
        let m = rows.len();
        let n_struct = costs.len();
        let mut row_sign = vec![1.0; m];
        let mut b = rhs.to_vec();
        let mut eff_rel = relations.to_vec();
        for i in 0..m {
            if b[i] < 0.0 {
                b[i] = -b[i];
                row_sign[i] = -1.0;
                eff_rel[i] = match eff_rel[i] {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let mut slack_of_row = vec![None; m];
        let mut slack_row = Vec::new();
        let mut slack_dir = Vec::new();
        for i in 0..m {
            match eff_rel[i] {
                Relation::Le => {
                    slack_of_row[i] = Some((slack_row.len(), 1.0));
                    slack_row.push(i);
                    slack_dir.push(1.0);
                }
                Relation::Ge => {
                    slack_of_row[i] = Some((slack_row.len(), -1.0));
                    slack_row.push(i);
                    slack_dir.push(-1.0);
                }
                Relation::Eq => {}
            }
        }
        // Le rows start basic on their slack; Ge and Eq rows need an
        // artificial to complete the identity basis.
        let mut art_row = Vec::new();
        let mut basis = Vec::with_capacity(m);
        let n_slack = slack_row.len();
        for i in 0..m {
            match slack_of_row[i] {
                Some((k, dir)) if dir > 0.0 => basis.push(n_struct + k),
                _ => {
                    basis.push(n_struct + n_slack + art_row.len());
                    art_row.push(i);
                }
            }
        }
        let n_total = n_struct + n_slack + art_row.len();
        let mut in_basis = vec![false; n_total];
        for &j in &basis {
            in_basis[j] = true;
        }
        let mut b_inv = vec![0.0; m * m];
        for i in 0..m {
            b_inv[i * m + i] = 1.0;
        }
        let x_b = b.clone();
        Ok(Tableau {
            m,
            n_struct,
            rows,
            row_sign,
            b,
            slack_row,
            slack_dir,
            art_row,
            n_total,
            costs: costs.to_vec(),
            basis,
            in_basis,
            b_inv,
            x_b,
            pivots_since_refactor: 0,
            iterations: 0,
        })
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct + self.slack_row.len()
    }

    /// Entry `i` of column `j` in the normalized system.
    fn col_entry(&self, j: usize, i: usize) -> f64 {
        if j < self.n_struct {
            self.row_sign[i] * self.rows[i][j]
        } else if !self.is_artificial(j) {
            let k = j - self.n_struct;
            if self.slack_row[k] == i {
                self.slack_dir[k]
            } else {
                0.0
            }
        } else if self.art_row[j - self.n_struct - self.slack_row.len()] == i {
            1.0
        } else {
            0.0
        }
    }

    /// `y . A_j` for the pricing vector `y`.
    fn price_column(&self, y: &[f64], j: usize) -> f64 {
        if j < self.n_struct {
            let mut acc = 0.0;
            for i in 0..self.m {
                let a = self.rows[i][j];
                if a != 0.0 {
                    acc += y[i] * self.row_sign[i] * a;
                }
            }
            acc
        } else if !self.is_artificial(j) {
            let k = j - self.n_struct;
            y[self.slack_row[k]] * self.slack_dir[k]
        } else {
            y[self.art_row[j - self.n_struct - self.slack_row.len()]]
        }
    }

    fn direction(&self, j: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.m];
        for r in 0..self.m {
            let a = self.col_entry(j, r);
            if a != 0.0 {
                for i in 0..self.m {
                    u[i] += self.b_inv[i * self.m + r] * a;
                }
            }
        }
        u
    }

    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.m;
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        let mut aug = vec![0.0; m * 2 * m];
        for i in 0..m {
            for (r, &j) in self.basis.iter().enumerate() {
                aug[i * 2 * m + r] = self.col_entry(j, i);
            }
            aug[i * 2 * m + m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            for r in col + 1..m {
                if aug[r * 2 * m + col].abs() > aug[piv * 2 * m + col].abs() {
                    piv = r;
                }
            }
            if aug[piv * 2 * m + col].abs() < PIVOT_TOL {
                return Err(LpError::Numerical("singular basis"));
            }
            if piv != col {
                for k in 0..2 * m {
                    aug.swap(col * 2 * m + k, piv * 2 * m + k);
                }
            }
            let inv = 1.0 / aug[col * 2 * m + col];
            for k in 0..2 * m {
                aug[col * 2 * m + k] *= inv;
            }
            for r in 0..m {
                if r != col {
                    let f = aug[r * 2 * m + col];
                    if f != 0.0 {
                        for k in 0..2 * m {
                            aug[r * 2 * m + k] -= f * aug[col * 2 * m + k];
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for k in 0..m {
                self.b_inv[i * m + k] = aug[i * 2 * m + m + k];
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += self.b_inv[i * m + k] * self.b[k];
            }
            self.x_b[i] = acc;
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn run(mut self) -> Result<RawOutcome, LpError> {
        if self.m == 0 {
            // Unconstrained: the origin is optimal unless a cost is negative.
            if self.costs.iter().any(|&c| c < -OPTIMALITY_TOL) {
                return Ok(RawOutcome::Unbounded);
            }
            return Ok(RawOutcome::Optimal {
                x: vec![0.0; self.n_struct],
                duals: Vec::new(),
                objective: 0.0,
                iterations: 0,
            });
        }
        if !self.art_row.is_empty() {
            let n_art = self.art_row.len();
            let mut phase1 = vec![0.0; self.n_total];
            for c in phase1.iter_mut().skip(self.n_total - n_art) {
                *c = 1.0;
            }
            match self.optimize(&phase1, true)? {
                Some(()) => {}
                None => return Err(LpError::Numerical("feasibility phase cannot be unbounded")),
            }
            let residual: f64 = (0..self.m)
                .filter(|&i| self.is_artificial(self.basis[i]))
                .map(|i| self.x_b[i].max(0.0))
                .sum();
            if residual > PHASE1_TOL {
                return Ok(RawOutcome::Infeasible);
            }
        }
        let mut phase2 = vec![0.0; self.n_total];
        phase2[..self.n_struct].copy_from_slice(&self.costs);
        if self.optimize(&phase2, false)?.is_none() {
            return Ok(RawOutcome::Unbounded);
        }

        let mut x = vec![0.0; self.n_struct];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_struct {
                x[j] = self.x_b[i].max(0.0);
            }
        }
        let y = self.pricing_vector(&phase2);
        let duals: Vec<f64> = (0..self.m).map(|i| y[i] * self.row_sign[i]).collect();
        let objective = self
            .basis
            .iter()
            .enumerate()
            .map(|(i, &j)| phase2[j] * self.x_b[i])
            .sum();
        Ok(RawOutcome::Optimal { x, duals, objective, iterations: self.iterations })
    }

    fn pricing_vector(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = costs[j];
            if c != 0.0 {
                for k in 0..m {
                    y[k] += c * self.b_inv[i * m + k];
                }
            }
        }
        y
    }

    /// Minimizes `costs` from the current basis. Returns `Some(())` at
    /// optimality, `None` when an unbounded improving ray is found.
    fn optimize(&mut self, costs: &[f64], phase1: bool) -> Result<Option<()>, LpError> {
        let mut bland = false;
        let mut stall = 0u32;
        let mut last_obj = f64::INFINITY;
        loop {
            self.iterations += 1;
            if self.iterations > ITERATION_LIMIT {
                return Err(LpError::IterationLimit);
            }
            if self.pivots_since_refactor >= REFACTOR_PERIOD {
                self.refactorize()?;
            }
            let y = self.pricing_vector(costs);
            let mut entering = None;
            let mut best = -OPTIMALITY_TOL;
            for j in 0..self.n_total {
                if self.in_basis[j] {
                    continue;
                }
                // Artificials never re-enter once the real objective is in
                // play.
                if !phase1 && self.is_artificial(j) {
                    continue;
                }
                let d = costs[j] - self.price_column(&y, j);
                if bland {
                    if d < -OPTIMALITY_TOL {
                        entering = Some(j);
                        break;
                    }
                } else if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
            let Some(j_in) = entering else {
                return Ok(Some(()));
            };
            let u = self.direction(j_in);

            // Ratio test. Basic artificials at zero must not grow again, so
            // any movement in their row forces them out at ratio zero.
            // Ties go to the smallest basis index under Bland's rule (needed
            // for its termination guarantee), otherwise to the largest pivot.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let basic = self.basis[i];
                let pinned = !phase1 && self.is_artificial(basic);
                let blocking = u[i] > PIVOT_TOL || (pinned && u[i].abs() > PIVOT_TOL);
                if !blocking {
                    continue;
                }
                let ratio = if pinned { 0.0 } else { self.x_b[i].max(0.0) / u[i] };
                let better = match leave {
                    None => true,
                    Some((r, best_ratio)) => {
                        ratio < best_ratio - PIVOT_TOL
                            || (ratio < best_ratio + PIVOT_TOL
                                && if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    u[i].abs() > u[r].abs()
                                })
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, theta)) = leave else {
                return Ok(None);
            };
            if u[r].abs() < PIVOT_TOL {
                self.refactorize()?;
                continue;
            }

            for i in 0..self.m {
                if i != r {
                    self.x_b[i] -= theta * u[i];
                }
            }
            self.x_b[r] = theta;
            let leaving = self.basis[r];
            self.in_basis[leaving] = false;
            self.in_basis[j_in] = true;
            self.basis[r] = j_in;

            // Eta update of the explicit inverse.
            let m = self.m;
            let pivot = u[r];
            for k in 0..m {
                self.b_inv[r * m + k] /= pivot;
            }
            for i in 0..m {
                if i != r && u[i] != 0.0 {
                    let f = u[i];
                    for k in 0..m {
                        self.b_inv[i * m + k] -= f * self.b_inv[r * m + k];
                    }
                }
            }
            self.pivots_since_refactor += 1;

            let obj: f64 = self
                .basis
                .iter()
                .enumerate()
                .map(|(i, &j)| costs[j] * self.x_b[i])
                .sum();
            if obj < last_obj - 1e-12 {
                last_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall >= STALL_LIMIT {
                    bland = true;
                }
            }
        }
    }
}
