//! Homotopy solver for the l1-regularized least-squares problem
//!
//! ```text
//! alpha* = argmin  1/2 ||y - D alpha||_2^2 + lambda ||alpha||_1
//! ```
//!
//! The solver tracks the piecewise-linear solution path from
//! `lambda = ||D^T y||_inf` (where `alpha = 0`) down to the requested value,
//! adding or dropping one dictionary column per breakpoint. The active Gram
//! matrix is maintained as a Cholesky factor with rank-one up/downdates, so a
//! breakpoint costs O(k^2) for k active columns. The number of breakpoints
//! traversed is reported as the iteration count.
//!
//! Every returned solution is certified against the KKT conditions at its
//! terminal lambda; a failed certificate is an error, never a silent answer.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// One sparse-coding instance: dictionary, target, trade-off.
#[derive(Debug, Clone)]
pub struct SparseProblem {
    /// Dictionary, one atom per column. Unit-norm columns expected.
    pub dictionary: DMatrix<f64>,
    /// Target vector of length `dictionary.nrows()`.
    pub target: DVector<f64>,
    /// Error/sparsity trade-off, `>= 0`.
    pub lambda: f64,
}

impl SparseProblem {
    pub fn new(dictionary: DMatrix<f64>, target: DVector<f64>, lambda: f64) -> Result<Self> {
        let p = Self {
            dictionary,
            target,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target.len() != self.dictionary.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.dictionary.nrows(),
                actual: self.target.len(),
            });
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        for j in 0..self.dictionary.ncols() {
            if self.dictionary.column(j).norm() == 0.0 {
                return Err(Error::ZeroNormSample { index: j });
            }
        }
        Ok(())
    }
}

/// Knobs for the homotopy path.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Breakpoint budget; defaults to `4 * N` when unset.
    pub max_iterations: Option<usize>,
    /// Tolerance of the terminal KKT certificate.
    pub kkt_tolerance: f64,
    /// Two breakpoints closer than this are treated as a tie.
    pub tie_tolerance: f64,
    /// Terminal lambda for the equality-constrained path.
    pub min_lambda: f64,
    /// Residual bound for declaring a target representable.
    pub residual_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            kkt_tolerance: 1e-8,
            tie_tolerance: 1e-12,
            min_lambda: 1e-8,
            residual_tolerance: 1e-6,
        }
    }
}

/// A certified point on the LASSO path.
#[derive(Debug, Clone)]
pub struct SparseSolution {
    /// Coefficient vector of length `N`.
    pub coefficients: DVector<f64>,
    /// Columns active at termination (may include boundary entries with
    /// coefficient exactly zero; every nonzero coefficient is listed).
    pub active_set: Vec<usize>,
    /// Number of breakpoints traversed (active-set changes).
    pub iterations: usize,
    /// `1/2 ||y - D alpha||^2 + lambda ||alpha||_1` at the terminal lambda.
    pub objective: f64,
    /// `||y - D alpha||_2`.
    pub residual_norm: f64,
    /// Lambda at which the solution was produced.
    pub lambda: f64,
}

/// Outcome of a KKT check: subgradient violations split by active/inactive.
#[derive(Debug, Clone, Copy)]
pub struct KktReport {
    pub max_active_violation: f64,
    pub max_inactive_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Solves the regularized problem at `problem.lambda`.
pub fn solve_lasso(problem: &SparseProblem, opts: &SolverOptions) -> Result<SparseSolution> {
    problem.validate()?;
    solve_lasso_on(
        &problem.dictionary,
        &problem.target,
        problem.lambda,
        opts,
    )
}

/// Solves the equality-constrained problem as the small-lambda limit of the
/// path: the homotopy runs from `||D^T y||_inf` down to `opts.min_lambda` and
/// the terminal solution is returned. Fails with `NotRepresentable` when the
/// terminal residual exceeds `opts.residual_tolerance`.
pub fn solve_constrained(problem: &SparseProblem, opts: &SolverOptions) -> Result<SparseSolution> {
    problem.validate()?;
    let solution = solve_lasso_on(
        &problem.dictionary,
        &problem.target,
        opts.min_lambda,
        opts,
    )?;
    if solution.residual_norm > opts.residual_tolerance {
        return Err(Error::NotRepresentable {
            residual: solution.residual_norm,
            tolerance: opts.residual_tolerance,
        });
    }
    Ok(solution)
}

/// Checks the LASSO optimality conditions of `solution` at `solution.lambda`:
/// active columns must satisfy `d_i^T (y - D alpha) = lambda * sign(alpha_i)`
/// and inactive ones `|d_j^T (y - D alpha)| <= lambda`, both within `tol`.
pub fn verify_kkt(problem: &SparseProblem, solution: &SparseSolution, tol: f64) -> KktReport {
    let residual = &problem.target - &problem.dictionary * &solution.coefficients;
    let correlation = problem.dictionary.tr_mul(&residual);
    kkt_from_correlation(&correlation, solution, tol)
}

/// Internal entry point that borrows the dictionary; the classifiers call
/// this to avoid copying shared dictionaries per test sample.
pub(crate) fn solve_lasso_on(
    dict: &DMatrix<f64>,
    target: &DVector<f64>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<SparseSolution> {
    let path = run_path(dict, target, lambda, opts)?;
    finish(dict, target, lambda, opts, path)
}

fn trace_enabled() -> bool {
    use std::sync::OnceLock;
    static ENABLED: OnceLock<bool> = OnceLock::new();
    *ENABLED.get_or_init(|| std::env::var_os("SRCKIT_SOLVER_TRACE").is_some())
}

enum Event {
    Reach,
    Enter(usize),
    Drop(usize), // position within the active set
}

struct PathState {
    alpha: DVector<f64>,
    active: Vec<usize>,
    signs: Vec<f64>,
    iterations: usize,
}

fn run_path(
    dict: &DMatrix<f64>,
    target: &DVector<f64>,
    target_lambda: f64,
    opts: &SolverOptions,
) -> Result<PathState> {
    let n = dict.ncols();
    let m = dict.nrows();
    let tie = opts.tie_tolerance;
    let max_iterations = opts.max_iterations.unwrap_or(4 * n.max(1));

    let mut correlation = dict.tr_mul(target);
    let lambda_max = correlation.amax();
    if !lambda_max.is_finite() {
        return Err(Error::InvalidParameter(
            "non-finite correlations in homotopy start".into(),
        ));
    }

    let mut state = PathState {
        alpha: DVector::zeros(n),
        active: Vec::new(),
        signs: Vec::new(),
        iterations: 0,
    };
    // kappa = 0 exactly when the target lambda is at or above the start.
    if target_lambda >= lambda_max || lambda_max == 0.0 {
        return Ok(state);
    }

    let mut is_active = vec![false; n];
    let mut gram = ActiveGram::new(m.min(n));
    let mut cur = lambda_max;

    // First activation: the most correlated column, lowest index on ties.
    let first = (0..n)
        .max_by(|&a, &b| {
            correlation[a]
                .abs()
                .partial_cmp(&correlation[b].abs())
                .unwrap()
                .then(b.cmp(&a)) // prefer the lower index
        })
        .expect("nonempty dictionary");
    enter_column(dict, &mut gram, &mut state, &mut is_active, first, cur, &correlation)?;

    let mut zero_run = 0usize;
    let mut last_dropped: Option<usize> = None;
    let mut since_refresh = 0usize;

    loop {
        if state.iterations > max_iterations {
            return Err(Error::MaxIterationsExceeded {
                max_iterations,
                lambda: cur,
            });
        }

        // Direction of the active coefficients as lambda decreases by gamma:
        // alpha_A(gamma) = alpha_A + gamma * d_A with G_A d_A = s_A.
        let direction = gram.solve(&state.signs);
        let mut velocity = DVector::zeros(m);
        for (pos, &j) in state.active.iter().enumerate() {
            velocity.axpy(direction[pos], &dict.column(j), 1.0);
        }
        // Correlations drift as c_j(gamma) = c_j - gamma * drift_j.
        let drift = dict.tr_mul(&velocity);

        let mut gamma = cur - target_lambda;
        let mut event = Event::Reach;
        let mut event_index = usize::MAX;

        // Entry candidates: |c_j| catches up with the shrinking boundary.
        for j in 0..n {
            if is_active[j] {
                continue;
            }
            let cj = correlation[j];
            let aj = drift[j];
            for (num, den) in [(cur - cj, 1.0 - aj), (cur + cj, 1.0 + aj)] {
                if den <= tie {
                    continue;
                }
                let g = num / den;
                if g < -tie {
                    continue;
                }
                let g = g.max(0.0);
                // a just-dropped column may not re-enter at the drop point
                // itself (the boundary touch is not a crossing)
                if g <= tie && Some(j) == last_dropped {
                    continue;
                }
                if g < gamma - tie || (g <= gamma + tie && j < event_index) {
                    gamma = g;
                    event = Event::Enter(j);
                    event_index = j;
                }
            }
        }
        // Drop candidates: an active coefficient crosses zero.
        for (pos, &i) in state.active.iter().enumerate() {
            let di = direction[pos];
            if di == 0.0 {
                continue;
            }
            let g = -state.alpha[i] / di;
            let moving_to_zero = state.alpha[i] * di < 0.0;
            if !(g > tie || (g >= -tie && moving_to_zero)) {
                continue;
            }
            let g = g.max(0.0);
            if g < gamma - tie || (g <= gamma + tie && i < event_index) {
                gamma = g;
                event = Event::Drop(pos);
                event_index = i;
            }
        }

        if trace_enabled() {
            let ev = match event {
                Event::Reach => "reach".to_string(),
                Event::Enter(j) => format!("enter {j}"),
                Event::Drop(pos) => format!("drop {} (pos {pos})", state.active[pos]),
            };
            eprintln!(
                "iter {} lambda {cur:.6e} gamma {gamma:.6e} event {ev} active {:?}",
                state.iterations, state.active
            );
        }
        // Advance to the breakpoint (or the target).
        for (pos, &i) in state.active.iter().enumerate() {
            state.alpha[i] += gamma * direction[pos];
        }
        cur -= gamma;
        correlation.axpy(-gamma, &drift, 1.0);
        since_refresh += 1;
        if since_refresh >= 16 {
            let residual = target - dict * &state.alpha;
            correlation = dict.tr_mul(&residual);
            since_refresh = 0;
        }

        zero_run = if gamma <= tie { zero_run + 1 } else { 0 };
        if zero_run > n + 1 {
            return Err(Error::DegenerateStep { lambda: cur });
        }
        if gamma > tie {
            last_dropped = None;
        }

        match event {
            Event::Reach => break,
            Event::Enter(j) => {
                enter_column(dict, &mut gram, &mut state, &mut is_active, j, cur, &correlation)?;
            }
            Event::Drop(pos) => {
                let i = state.active[pos];
                state.alpha[i] = 0.0;
                gram.remove(pos);
                state.active.remove(pos);
                state.signs.remove(pos);
                is_active[i] = false;
                last_dropped = Some(i);
                state.iterations += 1;
            }
        }
    }

    Ok(state)
}

fn enter_column(
    dict: &DMatrix<f64>,
    gram: &mut ActiveGram,
    state: &mut PathState,
    is_active: &mut [bool],
    j: usize,
    cur: f64,
    correlation: &DVector<f64>,
) -> Result<()> {
    let col = dict.column(j);
    let gram_col: Vec<f64> = state
        .active
        .iter()
        .map(|&i| dict.column(i).dot(&col))
        .collect();
    if !gram.push(&gram_col, col.norm_squared()) {
        return Err(Error::DegenerateStep { lambda: cur });
    }
    state.active.push(j);
    state
        .signs
        .push(if correlation[j] >= 0.0 { 1.0 } else { -1.0 });
    is_active[j] = true;
    state.iterations += 1;
    Ok(())
}

/// Polishes the terminal point on its active set, certifies it, and packs
/// the solution.
fn finish(
    dict: &DMatrix<f64>,
    target: &DVector<f64>,
    lambda: f64,
    opts: &SolverOptions,
    mut state: PathState,
) -> Result<SparseSolution> {
    let k = state.active.len();
    if k > 0 {
        // Fresh normal equations kill the factor drift accumulated by the
        // up/downdates; accepted only if no coefficient flips sign.
        let mut gram = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        for (p, &i) in state.active.iter().enumerate() {
            let ci = dict.column(i);
            rhs[p] = ci.dot(target) - lambda * state.signs[p];
            for (q, &j) in state.active.iter().enumerate() {
                gram[(p, q)] = ci.dot(&dict.column(j));
            }
        }
        if let Some(chol) = Cholesky::new(gram) {
            let polished = chol.solve(&rhs);
            let consistent = polished
                .iter()
                .zip(&state.signs)
                .all(|(&a, &s)| a * s >= -1e-9);
            if consistent {
                for (p, &i) in state.active.iter().enumerate() {
                    let a = polished[p];
                    state.alpha[i] = if a * state.signs[p] <= 0.0 { 0.0 } else { a };
                }
            }
        }
    }

    let residual = target - dict * &state.alpha;
    let residual_norm = residual.norm();
    let objective = 0.5 * residual_norm * residual_norm + lambda * state.alpha.abs().sum();
    let solution = SparseSolution {
        coefficients: state.alpha,
        active_set: state.active,
        iterations: state.iterations,
        objective,
        residual_norm,
        lambda,
    };

    let correlation = dict.tr_mul(&residual);
    let report = kkt_from_correlation(&correlation, &solution, opts.kkt_tolerance);
    if !report.passed {
        return Err(Error::KktViolation {
            violation: report
                .max_active_violation
                .max(report.max_inactive_violation),
            tolerance: opts.kkt_tolerance,
        });
    }
    Ok(solution)
}

fn kkt_from_correlation(
    correlation: &DVector<f64>,
    solution: &SparseSolution,
    tol: f64,
) -> KktReport {
    let mut in_active = vec![false; correlation.len()];
    for &i in &solution.active_set {
        in_active[i] = true;
    }
    let lambda = solution.lambda;
    let mut max_active = 0.0f64;
    let mut max_inactive = 0.0f64;
    for j in 0..correlation.len() {
        let c = correlation[j];
        let a = solution.coefficients[j];
        if in_active[j] && a != 0.0 {
            max_active = max_active.max((c - lambda * a.signum()).abs());
        } else if in_active[j] {
            max_active = max_active.max((c.abs() - lambda).abs());
        } else {
            max_inactive = max_inactive.max((c.abs() - lambda).max(0.0));
        }
    }
    KktReport {
        max_active_violation: max_active,
        max_inactive_violation: max_inactive,
        tolerance: tol,
        passed: max_active <= tol && max_inactive <= tol,
    }
}

/// Upper-triangular Cholesky factor of the active Gram matrix, maintained
/// under column insertions and removals.
struct ActiveGram {
    r: DMatrix<f64>,
    k: usize,
}

impl ActiveGram {
    fn new(capacity: usize) -> Self {
        Self {
            r: DMatrix::zeros(capacity.max(1), capacity.max(1)),
            k: 0,
        }
    }

    /// Appends a column given its Gram row against the current active set
    /// and its squared norm. Returns false when the column is numerically
    /// dependent on the active set (or capacity is exhausted).
    fn push(&mut self, gram_col: &[f64], sq_norm: f64) -> bool {
        let k = self.k;
        if k >= self.r.ncols() {
            return false;
        }
        // w solves R^T w = gram_col
        let mut w = vec![0.0; k];
        for i in 0..k {
            let mut s = gram_col[i];
            for j in 0..i {
                s -= self.r[(j, i)] * w[j];
            }
            w[i] = s / self.r[(i, i)];
        }
        let rho_sq = sq_norm - w.iter().map(|x| x * x).sum::<f64>();
        if rho_sq <= 1e-12 * sq_norm {
            return false;
        }
        for (i, &wi) in w.iter().enumerate() {
            self.r[(i, k)] = wi;
        }
        self.r[(k, k)] = rho_sq.sqrt();
        self.k += 1;
        true
    }

    /// Deletes the column at `pos` and re-triangularizes with Givens
    /// rotations.
    fn remove(&mut self, pos: usize) {
        let k = self.k;
        for j in pos..k - 1 {
            for i in 0..k {
                self.r[(i, j)] = self.r[(i, j + 1)];
            }
        }
        for i in 0..k {
            self.r[(i, k - 1)] = 0.0;
        }
        for j in pos..k - 1 {
            let a = self.r[(j, j)];
            let b = self.r[(j + 1, j)];
            if b == 0.0 {
                continue;
            }
            let r = a.hypot(b);
            let (c, s) = (a / r, b / r);
            self.r[(j, j)] = r;
            self.r[(j + 1, j)] = 0.0;
            for col in (j + 1)..(k - 1) {
                let t1 = self.r[(j, col)];
                let t2 = self.r[(j + 1, col)];
                self.r[(j, col)] = c * t1 + s * t2;
                self.r[(j + 1, col)] = -s * t1 + c * t2;
            }
        }
        self.k -= 1;
    }

    /// Solves (R^T R) x = b.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = self.k;
        debug_assert_eq!(b.len(), k);
        let mut y = vec![0.0; k];
        for i in 0..k {
            let mut s = b[i];
            for j in 0..i {
                s -= self.r[(j, i)] * y[j];
            }
            y[i] = s / self.r[(i, i)];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s -= self.r[(i, j)] * x[j];
            }
            x[i] = s / self.r[(i, i)];
        }
        x
    }
}
