//! A sparse revised-simplex solver for the equilibrium programs.
//!
//! Solves `min cᵀx  s.t.  Ax = b, x >= 0` from a caller-supplied feasible
//! starting basis. The equilibrium programs built by this crate always have
//! one: every balance row carries a split residual slack and every epigraph
//! row a surplus slack, so no phase-1 is needed and the objective (all costs
//! non-negative) is bounded below by zero.
//!
//! The basis inverse is kept in product form (eta factors) with periodic
//! refactorization. Pricing is Dantzig's rule with deterministic index
//! tie-breaking; after a run of degenerate pivots the solver switches to
//! Bland's rule until it makes progress, which prevents cycling. Two runs on
//! the same input take identical pivot sequences.

use alloc::vec;
use alloc::vec::Vec;

/// Reduced-cost optimality tolerance.
const COST_TOL: f64 = 1e-9;
/// Smallest acceptable ratio-test denominator.
const PIVOT_TOL: f64 = 1e-9;
/// Steps at or below this are treated as degenerate.
const DEGEN_TOL: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 64;
/// Entries smaller than this are dropped from eta factors.
const DROP_TOL: f64 = 1e-13;
/// Eta factors accumulated beyond the base factorization before refactorizing.
const REFRESH_INTERVAL: usize = 96;
/// Base magnitude of the anti-degeneracy right-hand-side perturbation.
const PERT_BASE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("initial basis is invalid: {0}")]
    BadBasis(&'static str),
    #[error("basis matrix is numerically singular")]
    SingularBasis,
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("iteration limit reached after {0} pivots")]
    IterationLimit(usize),
}

/// A linear program in standard computational form.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    num_rows: usize,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    col_starts: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_rows: usize) -> Self {
        LinearProgram {
            num_rows,
            rhs: vec![0.0; num_rows],
            cost: Vec::new(),
            col_starts: vec![0],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.cost.len()
    }

    pub fn set_rhs(&mut self, row: usize, value: f64) {
        self.rhs[row] = value;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// Appends a column and returns its index. Entries must have strictly
    /// increasing row indices.
    pub fn add_column(&mut self, cost: f64, entries: &[(usize, f64)]) -> usize {
        let mut prev: Option<usize> = None;
        for &(r, v) in entries {
            debug_assert!(r < self.num_rows, "row index out of range");
            debug_assert!(prev.is_none_or(|p| p < r), "rows must be strictly increasing");
            prev = Some(r);
            if v != 0.0 {
                self.row_idx.push(r);
                self.values.push(v);
            }
        }
        self.cost.push(cost);
        self.col_starts.push(self.row_idx.len());
        self.cost.len() - 1
    }

    fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let lo = self.col_starts[j];
        let hi = self.col_starts[j + 1];
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    fn col_nnz(&self, j: usize) -> usize {
        self.col_starts[j + 1] - self.col_starts[j]
    }

    /// Largest `|Ax - b|` component for a candidate solution.
    pub fn primal_infeasibility(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.num_rows];
        for j in 0..self.num_cols() {
            let xj = x[j];
            if xj != 0.0 {
                let (rows, vals) = self.col(j);
                for (r, v) in rows.iter().zip(vals) {
                    ax[*r] += v * xj;
                }
            }
        }
        ax.iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Solves from the given starting basis (one column per row).
    pub fn solve(&self, initial_basis: &[usize]) -> Result<LpSolution, LpError> {
        Simplex::new(self, initial_basis)?.run()
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Row multipliers at optimality (simplex duals).
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Row-major copy of the constraint matrix, for pivot-row products.
struct RowMajor {
    row_starts: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl RowMajor {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.num_rows();
        let mut counts = vec![0usize; m];
        for &r in &lp.row_idx {
            counts[r] += 1;
        }
        let mut row_starts = vec![0usize; m + 1];
        for r in 0..m {
            row_starts[r + 1] = row_starts[r] + counts[r];
        }
        let mut fill = row_starts.clone();
        let mut col_idx = vec![0u32; lp.row_idx.len()];
        let mut values = vec![0.0; lp.row_idx.len()];
        for j in 0..lp.num_cols() {
            let (rows, vals) = lp.col(j);
            for (r, v) in rows.iter().zip(vals) {
                let slot = fill[*r];
                col_idx[slot] = j as u32;
                values[slot] = *v;
                fill[*r] += 1;
            }
        }
        RowMajor { row_starts, col_idx, values }
    }
}

struct Eta {
    pivot_row: usize,
    pivot_val: f64,
    rows: Vec<u32>,
    vals: Vec<f64>,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    etas: Vec<Eta>,
    base_etas: usize,
    x_b: Vec<f64>,
    /// Solved right-hand side: the exact rhs plus a deterministic
    /// anti-degeneracy perturbation. The final solution is recomputed from
    /// the exact rhs with the optimal basis.
    rhs_perturbed: Vec<f64>,
    /// Pricing scale per column: 1/sqrt(1 + ||a_j||^2).
    price_scale: Vec<f64>,
    work: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, initial_basis: &[usize]) -> Result<Self, LpError> {
        let m = lp.num_rows();
        if initial_basis.len() != m {
            return Err(LpError::BadBasis("basis size must equal the row count"));
        }
        let mut in_basis = vec![false; lp.num_cols()];
        for &j in initial_basis {
            if j >= lp.num_cols() {
                return Err(LpError::BadBasis("basis column out of range"));
            }
            if in_basis[j] {
                return Err(LpError::BadBasis("duplicate basis column"));
            }
            in_basis[j] = true;
        }

        // Perturb each row in the direction that keeps the starting basis
        // feasible: the designated slack of a row has a single +-1 entry, so
        // the perturbation sign follows that coefficient. Rows whose basis
        // column is not a singleton are left exact.
        let mut rhs_perturbed = lp.rhs.clone();
        for (slot, &j) in initial_basis.iter().enumerate() {
            let (rows, vals) = lp.col(j);
            if let Some(pos) = rows.iter().position(|&r| r == slot) {
                if rows.len() == 1 {
                    let delta = PERT_BASE * (1.0 + (slot * 37 % 101) as f64 / 101.0);
                    rhs_perturbed[slot] += delta * vals[pos].signum();
                }
            }
        }

        let price_scale: Vec<f64> = (0..lp.num_cols())
            .map(|j| {
                let (_, vals) = lp.col(j);
                let n2: f64 = vals.iter().map(|v| v * v).sum();
                1.0 / libm::sqrt(1.0 + n2)
            })
            .collect();

        let mut s = Simplex {
            lp,
            m,
            basis: initial_basis.to_vec(),
            in_basis,
            etas: Vec::new(),
            base_etas: 0,
            x_b: vec![0.0; m],
            rhs_perturbed,
            price_scale,
            work: vec![0.0; m],
            touched: Vec::new(),
        };
        s.refactorize()?;
        Ok(s)
    }

    /// Applies `B^-1` in place using the eta file.
    fn ftran(&self, x: &mut [f64]) {
        for eta in &self.etas {
            let t = x[eta.pivot_row] / eta.pivot_val;
            x[eta.pivot_row] = t;
            if t != 0.0 {
                for (r, v) in eta.rows.iter().zip(&eta.vals) {
                    x[*r as usize] -= v * t;
                }
            }
        }
    }

    /// Like [`Self::ftran`] but records every index it may have written.
    fn ftran_tracked(x: &mut [f64], touched: &mut Vec<usize>, etas: &[Eta]) {
        for eta in etas {
            let xr = x[eta.pivot_row];
            if xr == 0.0 {
                continue;
            }
            let t = xr / eta.pivot_val;
            x[eta.pivot_row] = t;
            touched.push(eta.pivot_row);
            for (r, v) in eta.rows.iter().zip(&eta.vals) {
                x[*r as usize] -= v * t;
                touched.push(*r as usize);
            }
        }
    }

    /// Applies `B^-T` in place using the eta file in reverse.
    fn btran(&self, y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = y[eta.pivot_row];
            for (r, v) in eta.rows.iter().zip(&eta.vals) {
                s -= v * y[*r as usize];
            }
            y[eta.pivot_row] = s / eta.pivot_val;
        }
    }

    /// Rebuilds the eta file from the current basis columns and recomputes
    /// the basic solution.
    fn refactorize(&mut self) -> Result<(), LpError> {
        self.etas.clear();
        // Eliminate sparse columns first; singleton slack columns pivot for free.
        let mut order: Vec<usize> = self.basis.clone();
        order.sort_by_key(|&j| (self.lp.col_nnz(j), j));

        let mut pivoted = vec![false; self.m];
        let mut new_basis = vec![usize::MAX; self.m];
        for &j in &order {
            self.touched.clear();
            let (rows, vals) = self.lp.col(j);
            for (r, v) in rows.iter().zip(vals) {
                self.work[*r] = *v;
                self.touched.push(*r);
            }
            let etas = core::mem::take(&mut self.etas);
            Self::ftran_tracked(&mut self.work, &mut self.touched, &etas);
            self.etas = etas;

            let mut pivot_row = usize::MAX;
            let mut pivot_abs = 0.0;
            for &r in &self.touched {
                if !pivoted[r] {
                    let a = self.work[r].abs();
                    if a > pivot_abs + 1e-15 || (a > pivot_abs - 1e-15 && r < pivot_row) {
                        if a > pivot_abs {
                            pivot_abs = a;
                        }
                        pivot_row = r;
                    }
                }
            }
            if pivot_row == usize::MAX || pivot_abs <= 1e-11 {
                for &r in &self.touched {
                    self.work[r] = 0.0;
                }
                return Err(LpError::SingularBasis);
            }

            let mut eta = Eta {
                pivot_row,
                pivot_val: self.work[pivot_row],
                rows: Vec::new(),
                vals: Vec::new(),
            };
            // Duplicate indices in `touched` read a zeroed cell and are skipped.
            for &r in &self.touched {
                let v = self.work[r];
                self.work[r] = 0.0;
                if r != pivot_row && v.abs() > DROP_TOL {
                    eta.rows.push(r as u32);
                    eta.vals.push(v);
                }
            }
            self.etas.push(eta);
            pivoted[pivot_row] = true;
            new_basis[pivot_row] = j;
        }
        self.basis = new_basis;
        self.base_etas = self.etas.len();

        self.x_b.copy_from_slice(&self.rhs_perturbed);
        let mut xb = core::mem::take(&mut self.x_b);
        self.ftran(&mut xb);
        self.x_b = xb;
        Ok(())
    }

    /// Reduced costs of every column from scratch: `d = c - A^T B^-T c_B`.
    fn recompute_reduced_costs(&self, y: &mut [f64], d: &mut [f64]) {
        for slot in 0..self.m {
            y[slot] = self.lp.cost[self.basis[slot]];
        }
        self.btran(y);
        for j in 0..self.lp.num_cols() {
            let (rows, vals) = self.lp.col(j);
            let mut dj = self.lp.cost[j];
            for (r, v) in rows.iter().zip(vals) {
                dj -= v * y[*r];
            }
            d[j] = dj;
        }
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        let n = self.lp.num_cols();
        let rows_of = RowMajor::build(self.lp);
        let max_iters = 20_000 + 20 * (self.m + n);
        let mut bland = false;
        let mut stall = 0usize;
        let mut iterations = 0usize;
        let mut y = vec![0.0; self.m];
        let mut dir = vec![0.0; self.m];
        let mut rho = vec![0.0; self.m];
        let mut alpha = vec![0.0; n];
        let mut alpha_touched: Vec<u32> = Vec::new();
        // Reduced costs, maintained incrementally through the pivot row and
        // recomputed exactly at every refactorization.
        let mut d = vec![0.0; n];
        self.recompute_reduced_costs(&mut y, &mut d);
        // Devex reference weights, reset on refactorization.
        let mut devex: Vec<f64> = vec![1.0; n];
        // On apparent optimality with incrementally-updated costs, verify
        // once against exact reduced costs before accepting.
        let mut verified = false;

        loop {
            if iterations > max_iters {
                return Err(LpError::IterationLimit(iterations));
            }
            if self.etas.len() > self.base_etas + REFRESH_INTERVAL {
                self.refactorize()?;
                self.recompute_reduced_costs(&mut y, &mut d);
                devex.fill(1.0);
                verified = false;
            }

            // Pricing: Devex (largest d^2 / weight), statically scaled for
            // the mixed magnitudes of force and torque coefficients, or
            // Bland's lowest-index rule when stalled.
            let mut entering = usize::MAX;
            let mut best = 0.0;
            for j in 0..n {
                if self.in_basis[j] || d[j] >= -COST_TOL {
                    continue;
                }
                if bland {
                    entering = j;
                    break;
                }
                let ds = d[j] * self.price_scale[j];
                let merit = ds * ds / devex[j];
                if merit > best {
                    best = merit;
                    entering = j;
                }
            }
            if entering == usize::MAX {
                if verified {
                    for slot in 0..self.m {
                        y[slot] = self.lp.cost[self.basis[slot]];
                    }
                    self.btran(&mut y);
                    return Ok(self.finish(y, iterations));
                }
                self.recompute_reduced_costs(&mut y, &mut d);
                verified = true;
                continue;
            }
            verified = false;

            // Direction w = B^-1 a_q.
            dir.fill(0.0);
            let (rows, vals) = self.lp.col(entering);
            for (r, v) in rows.iter().zip(vals) {
                dir[*r] = *v;
            }
            self.ftran(&mut dir);

            // Ratio test. Ties prefer the larger pivot element for stability
            // (or the lowest basis column under Bland's rule).
            let mut leave = usize::MAX;
            let mut theta = f64::INFINITY;
            let mut leave_piv = 0.0;
            for slot in 0..self.m {
                let wv = dir[slot];
                if wv <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.x_b[slot].max(0.0) / wv;
                let take = if leave == usize::MAX || ratio < theta - 1e-12 {
                    true
                } else if ratio < theta + 1e-12 {
                    if bland {
                        self.basis[slot] < self.basis[leave]
                    } else {
                        wv > leave_piv
                    }
                } else {
                    false
                };
                if take {
                    theta = ratio.max(0.0);
                    leave = slot;
                    leave_piv = wv;
                }
            }
            if leave == usize::MAX {
                return Err(LpError::Unbounded);
            }

            // Pivot row of B^-1 A drives both the reduced-cost update and
            // the Devex weights. Row-major access keeps this proportional to
            // the rows touched by rho.
            rho.fill(0.0);
            rho[leave] = 1.0;
            self.btran(&mut rho);
            for &t in &alpha_touched {
                alpha[t as usize] = 0.0;
            }
            alpha_touched.clear();
            for (slot, &rv) in rho.iter().enumerate() {
                if rv == 0.0 {
                    continue;
                }
                let lo = rows_of.row_starts[slot];
                let hi = rows_of.row_starts[slot + 1];
                for t in lo..hi {
                    let j = rows_of.col_idx[t];
                    if alpha[j as usize] == 0.0 {
                        alpha_touched.push(j);
                    }
                    alpha[j as usize] += rows_of.values[t] * rv;
                }
            }

            let pivot = dir[leave];
            let dq = d[entering];
            let step = dq / pivot;
            let wq = devex[entering].max(1.0);
            for &t in &alpha_touched {
                let j = t as usize;
                if self.in_basis[j] || j == entering {
                    continue;
                }
                let aj = alpha[j];
                if aj == 0.0 {
                    continue;
                }
                d[j] -= step * aj;
                let cand = (aj / pivot) * (aj / pivot) * wq;
                if cand > devex[j] {
                    devex[j] = cand;
                }
            }
            let leaving_col = self.basis[leave];
            d[entering] = 0.0;
            d[leaving_col] = -step;
            devex[leaving_col] = (wq / (pivot * pivot)).max(1.0);
            devex[entering] = 1.0;

            // Update basic values and append the eta factor.
            if theta != 0.0 {
                for slot in 0..self.m {
                    if dir[slot] != 0.0 {
                        self.x_b[slot] -= theta * dir[slot];
                    }
                }
            }
            self.x_b[leave] = theta;

            let mut eta = Eta {
                pivot_row: leave,
                pivot_val: pivot,
                rows: Vec::new(),
                vals: Vec::new(),
            };
            for (slot, &v) in dir.iter().enumerate() {
                if slot != leave && v.abs() > DROP_TOL {
                    eta.rows.push(slot as u32);
                    eta.vals.push(v);
                }
            }
            self.etas.push(eta);

            self.in_basis[leaving_col] = false;
            self.in_basis[entering] = true;
            self.basis[leave] = entering;

            if theta <= DEGEN_TOL {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
            iterations += 1;
        }
    }

    fn finish(self, dual: Vec<f64>, iterations: usize) -> LpSolution {
        // The pivots ran against the perturbed rhs; the optimal basis is
        // optimal for the exact rhs as well (dual feasibility does not
        // depend on it), so recompute the basic values exactly.
        let mut exact = self.lp.rhs.clone();
        self.ftran(&mut exact);
        let mut x = vec![0.0; self.lp.num_cols()];
        for (slot, &j) in self.basis.iter().enumerate() {
            // Tiny negative values are perturbation and ratio-test noise.
            x[j] = exact[slot].max(0.0);
        }
        let objective = x.iter().zip(&self.lp.cost).map(|(a, c)| a * c).sum();
        LpSolution { x, dual, objective, iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds `min cx  s.t.  Gx <= h, x >= 0` in standard form with slack
    /// columns and returns the slack basis. Requires `h >= 0`.
    fn from_inequalities(c: &[f64], g: &[&[f64]], h: &[f64]) -> (LinearProgram, Vec<usize>) {
        let m = g.len();
        let mut lp = LinearProgram::new(m);
        for (i, &hi) in h.iter().enumerate() {
            assert!(hi >= 0.0, "slack basis needs a non-negative rhs");
            lp.set_rhs(i, hi);
        }
        for j in 0..c.len() {
            let entries: Vec<(usize, f64)> =
                (0..m).filter(|&i| g[i][j] != 0.0).map(|i| (i, g[i][j])).collect();
            lp.add_column(c[j], &entries);
        }
        let basis: Vec<usize> = (0..m).map(|i| lp.add_column(0.0, &[(i, 1.0)])).collect();
        (lp, basis)
    }

    fn assert_optimal(lp: &LinearProgram, sol: &LpSolution) {
        assert!(lp.primal_infeasibility(&sol.x) < 1e-7);
        for j in 0..lp.num_cols() {
            assert!(sol.x[j] >= -1e-9);
            let lo = 0.0;
            let mut d = lp.cost()[j] - lo;
            let (rows, vals) = lp.col(j);
            for (r, v) in rows.iter().zip(vals) {
                d -= v * sol.dual[*r];
            }
            // Dual feasibility and complementary slackness.
            assert!(d > -1e-6, "column {j} has reduced cost {d}");
            if sol.x[j] > 1e-7 {
                assert!(d.abs() < 1e-6, "basic column {j} has reduced cost {d}");
            }
        }
    }

    #[test]
    fn maximization_reformulated_as_min() {
        // max 4x + 3y s.t. x - y <= 1, 2x - y <= 3, y <= 5 -> optimum 31 at (4, 5).
        let (lp, basis) = from_inequalities(
            &[-4.0, -3.0],
            &[&[1.0, -1.0], &[2.0, -1.0], &[0.0, 1.0]],
            &[1.0, 3.0, 5.0],
        );
        let sol = lp.solve(&basis).unwrap();
        assert!((sol.objective + 31.0).abs() < 1e-9);
        assert!((sol.x[0] - 4.0).abs() < 1e-9 && (sol.x[1] - 5.0).abs() < 1e-9);
        assert_optimal(&lp, &sol);
    }

    #[test]
    fn classic_three_variable_program() {
        // max 5a + 4b + 3c, optimum 13.
        let (lp, basis) = from_inequalities(
            &[-5.0, -4.0, -3.0],
            &[&[2.0, 3.0, 1.0], &[4.0, 1.0, 2.0], &[3.0, 4.0, 2.0]],
            &[5.0, 11.0, 8.0],
        );
        let sol = lp.solve(&basis).unwrap();
        assert!((sol.objective + 13.0).abs() < 1e-9);
        assert_optimal(&lp, &sol);
    }

    #[test]
    fn degenerate_vertices_do_not_cycle() {
        // Heavily degenerate: many redundant constraints through the origin.
        let (lp, basis) = from_inequalities(
            &[-1.0, -1.0, -1.0],
            &[
                &[1.0, 1.0, 0.0],
                &[1.0, 1.0, 0.0],
                &[0.0, 1.0, 1.0],
                &[0.0, 1.0, 1.0],
                &[1.0, 0.0, 1.0],
                &[1.0, 2.0, 1.0],
            ],
            &[1.0, 1.0, 1.0, 1.0, 1.0, 2.0],
        );
        let sol = lp.solve(&basis).unwrap();
        assert!((sol.objective + 1.5).abs() < 1e-9);
        assert_optimal(&lp, &sol);
    }

    #[test]
    fn unbounded_is_reported() {
        // max x with no finite bound.
        let mut lp = LinearProgram::new(1);
        lp.set_rhs(0, 1.0);
        lp.add_column(-1.0, &[]); // x: no constraint rows at all
        let slack = lp.add_column(0.0, &[(0, 1.0)]);
        assert_eq!(lp.solve(&[slack]).unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn epigraph_shaped_program() {
        // min |r| + 0.001 t  s.t.  x1 + x2 + r_pos - r_neg = 10, t >= x1, t >= x2.
        // Splitting the load x1 = x2 = 5 gives t = 5, objective 0.005.
        let mut lp = LinearProgram::new(3);
        lp.set_rhs(0, 10.0);
        let x1 = lp.add_column(0.0, &[(0, 1.0), (1, -1.0)]);
        let x2 = lp.add_column(0.0, &[(0, 1.0), (2, -1.0)]);
        let _t = lp.add_column(1e-3, &[(1, 1.0), (2, 1.0)]);
        let r_pos = lp.add_column(1.0, &[(0, 1.0)]);
        let _r_neg = lp.add_column(1.0, &[(0, -1.0)]);
        let s1 = lp.add_column(0.0, &[(1, -1.0)]);
        let s2 = lp.add_column(0.0, &[(2, -1.0)]);
        let sol = lp.solve(&[r_pos, s1, s2]).unwrap();
        assert!((sol.objective - 0.005).abs() < 1e-9, "objective {}", sol.objective);
        assert!((sol.x[x1] - 5.0).abs() < 1e-6);
        assert!((sol.x[x2] - 5.0).abs() < 1e-6);
        assert_optimal(&lp, &sol);
    }

    #[test]
    fn deterministic_pivot_sequence() {
        let build = || {
            from_inequalities(
                &[-3.0, -1.0, -2.0, -4.0],
                &[
                    &[1.0, 1.0, 1.0, 1.0],
                    &[2.0, 0.0, 1.0, 3.0],
                    &[0.0, 1.0, 2.0, 1.0],
                ],
                &[10.0, 15.0, 12.0],
            )
        };
        let (lp1, b1) = build();
        let (lp2, b2) = build();
        let s1 = lp1.solve(&b1).unwrap();
        let s2 = lp2.solve(&b2).unwrap();
        assert_eq!(s1.iterations, s2.iterations);
        assert_eq!(s1.x, s2.x);
    }

    #[test]
    fn moderately_sized_random_program_satisfies_kkt() {
        // Pseudo-random sparse LP; optimality is verified through duality,
        // not against a reference solver.
        let m = 60;
        let n = 150;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        // Rows 0..m-1 are random; the last row bounds the variable sum so no
        // negative-cost column can be unbounded.
        let mut lp = LinearProgram::new(m + 1);
        for i in 0..m {
            lp.set_rhs(i, 1.0 + 9.0 * next());
        }
        lp.set_rhs(m, 1000.0);
        for _ in 0..n {
            let mut entries = Vec::new();
            for r in 0..m {
                if next() < 0.08 {
                    entries.push((r, next() * 2.0));
                }
            }
            entries.push((m, 1.0));
            lp.add_column(-next(), &entries);
        }
        let basis: Vec<usize> = (0..=m).map(|i| lp.add_column(0.0, &[(i, 1.0)])).collect();
        let sol = lp.solve(&basis).unwrap();
        assert_optimal(&lp, &sol);
    }
}
