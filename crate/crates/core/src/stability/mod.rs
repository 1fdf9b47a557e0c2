//! Static-equilibrium stability analysis.
//!
//! For each brick the analysis asks whether the candidate forces of the
//! structural force model can cancel gravity in both force and torque. The
//! question is posed as a linear program:
//!
//! ```text
//! min Σ_i ( |ΣF_i|₁ + |Στ_i|₁ + α·D_i_max + β·ΣD_i )
//! ```
//!
//! subject to non-negative magnitudes and Newton pairing, where `D_i` are the
//! drag (clutch tension) forces on brick `i`. Absolute values enter through
//! split slack variables and `D_i_max` through one epigraph variable per
//! brick, so the program is a pure LP with a trivially feasible slack basis.
//! Coexistence constraints (a support and a drag at one knob cannot both act)
//! are kept out of the LP and restored afterwards by an exact pairwise
//! reduction: the two forces oppose each other along the same line at the
//! same point, so subtracting the smaller magnitude from both changes no
//! residual and never increases the objective.
//!
//! A brick scores `(F_T - D_max)/F_T` when it reaches equilibrium within
//! tolerance and its largest drag stays below the friction capacity `F_T`;
//! otherwise it scores zero and the structure is unstable.

mod model;
mod simplex;

pub use model::{
    build_force_model, BrickBody, ForceClass, ForceModel, ForceVar, ParamError, PhysicalParams,
};
pub use simplex::{LinearProgram, LpError, LpSolution};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::brick::BrickStructure;
use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("equilibrium solve failed: {0}")]
    Solver(#[from] LpError),
}

/// Where each variable group lives in the equilibrium LP.
///
/// Columns: force variables first, then per brick twelve split residual
/// slacks (positive/negative per force and torque axis), then one epigraph
/// variable per brick, then one surplus slack per epigraph row. Rows: six
/// balance rows per brick, then the epigraph rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpLayout {
    pub num_force_vars: usize,
    pub num_bricks: usize,
    pub num_epigraph_rows: usize,
}

impl LpLayout {
    pub fn balance_row(&self, brick: usize, axis: usize) -> usize {
        6 * brick + axis
    }

    pub fn residual_pos_col(&self, brick: usize, axis: usize) -> usize {
        self.num_force_vars + 12 * brick + 2 * axis
    }

    pub fn residual_neg_col(&self, brick: usize, axis: usize) -> usize {
        self.residual_pos_col(brick, axis) + 1
    }

    pub fn epigraph_col(&self, brick: usize) -> usize {
        self.num_force_vars + 12 * self.num_bricks + brick
    }

    pub fn epigraph_slack_col(&self, row: usize) -> usize {
        self.num_force_vars + 13 * self.num_bricks + row
    }

    pub fn num_cols(&self) -> usize {
        self.num_force_vars + 13 * self.num_bricks + self.num_epigraph_rows
    }

    /// Human-readable column label for LP dumps.
    pub fn column_name(&self, j: usize) -> String {
        use alloc::format;
        const AXES: [&str; 6] = ["fx", "fy", "fz", "tx", "ty", "tz"];
        if j < self.num_force_vars {
            return format!("f{j}");
        }
        let j = j - self.num_force_vars;
        if j < 12 * self.num_bricks {
            let brick = j / 12;
            let rest = j % 12;
            let sign = if rest % 2 == 0 { "p" } else { "n" };
            return format!("r{sign}_{brick}_{}", AXES[rest / 2]);
        }
        let j = j - 12 * self.num_bricks;
        if j < self.num_bricks {
            return format!("dmax_{j}");
        }
        format!("s{}", j - self.num_bricks)
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Assembles the equilibrium LP for a force model. Returns the program, the
/// feasible starting basis, and the column layout.
pub fn equilibrium_lp(
    model: &ForceModel,
    params: &PhysicalParams,
) -> (LinearProgram, Vec<usize>, LpLayout) {
    let n = model.bodies.len();
    let num_epigraph: usize = model.drags_of.iter().map(Vec::len).sum();
    let layout = LpLayout {
        num_force_vars: model.vars.len(),
        num_bricks: n,
        num_epigraph_rows: num_epigraph,
    };

    let mut lp = LinearProgram::new(6 * n + num_epigraph);

    // Balance rows: Σ coef·f - rp + rn = rhs, with rhs carrying gravity.
    // Gravity acts at the center of mass, so it contributes no torque row.
    for (i, body) in model.bodies.iter().enumerate() {
        lp.set_rhs(layout.balance_row(i, 2), body.mass * params.gravity);
    }

    // Epigraph row index per drag variable, in (brick, drag) order.
    let mut epigraph_row_of: alloc::collections::BTreeMap<usize, usize> =
        alloc::collections::BTreeMap::new();
    let mut next = 6 * n;
    for drags in &model.drags_of {
        for &d in drags {
            epigraph_row_of.insert(d, next);
            next += 1;
        }
    }

    // Force variable columns.
    for (k, var) in model.vars.iter().enumerate() {
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(13);
        let add_body = |entries: &mut Vec<(usize, f64)>, brick: usize, dir: [f64; 3]| {
            let com = model.bodies[brick].center;
            let lever = [
                var.point[0] - com[0],
                var.point[1] - com[1],
                var.point[2] - com[2],
            ];
            let torque = cross(lever, dir);
            for a in 0..3 {
                if dir[a] != 0.0 {
                    entries.push((layout.balance_row(brick, a), dir[a]));
                }
            }
            for a in 0..3 {
                if torque[a] != 0.0 {
                    entries.push((layout.balance_row(brick, 3 + a), torque[a]));
                }
            }
        };
        add_body(&mut entries, var.primary, var.dir);
        if let Some(partner) = var.partner {
            add_body(&mut entries, partner, [-var.dir[0], -var.dir[1], -var.dir[2]]);
        }
        if let Some(&row) = epigraph_row_of.get(&k) {
            entries.push((row, -1.0));
        }
        entries.sort_by_key(|e| e.0);
        let cost = if var.class == ForceClass::Drag { params.beta } else { 0.0 };
        let col = lp.add_column(cost, &entries);
        debug_assert_eq!(col, k);
    }

    // Split residual slacks.
    for i in 0..n {
        for a in 0..6 {
            let row = layout.balance_row(i, a);
            let cp = lp.add_column(1.0, &[(row, -1.0)]);
            let cn = lp.add_column(1.0, &[(row, 1.0)]);
            debug_assert_eq!(cp, layout.residual_pos_col(i, a));
            debug_assert_eq!(cn, layout.residual_neg_col(i, a));
        }
    }

    // Per-brick epigraph variables: dmax_i >= each drag on brick i.
    for (i, drags) in model.drags_of.iter().enumerate() {
        let entries: Vec<(usize, f64)> =
            drags.iter().map(|d| (epigraph_row_of[d], 1.0)).collect();
        let col = lp.add_column(params.alpha, &entries);
        debug_assert_eq!(col, layout.epigraph_col(i));
    }

    // Epigraph surplus slacks and the starting basis.
    let mut basis = Vec::with_capacity(lp.num_rows());
    for i in 0..n {
        for a in 0..6 {
            basis.push(layout.residual_neg_col(i, a));
        }
    }
    for e in 0..num_epigraph {
        let col = lp.add_column(0.0, &[(6 * n + e, -1.0)]);
        debug_assert_eq!(col, layout.epigraph_slack_col(e));
        basis.push(col);
    }

    (lp, basis, layout)
}

/// Solved candidate-force magnitudes plus per-brick residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceSolution {
    /// Post-reduction magnitudes, indexed like `ForceModel::vars`.
    pub magnitudes: Vec<f64>,
    /// Magnitudes as returned by the LP, before pairwise reduction.
    pub raw_magnitudes: Vec<f64>,
    pub force_residuals: Vec<[f64; 3]>,
    pub torque_residuals: Vec<[f64; 3]>,
    /// Largest drag force per brick (`D_i_max`).
    pub max_drag: Vec<f64>,
    /// Objective recomputed from the reduced magnitudes.
    pub objective: f64,
    /// Objective recomputed from the raw magnitudes.
    pub objective_before_reduction: f64,
    pub lp_iterations: usize,
}

/// Residual and complementarity bounds extracted from a solution, used to
/// certify a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveCertificate {
    pub max_force_residual: f64,
    pub max_torque_residual: f64,
    /// Largest product over forbidden (support, drag) pairs.
    pub max_pair_product: f64,
    pub objective_before_reduction: f64,
    pub objective_after_reduction: f64,
}

fn norm_inf(v: [f64; 3]) -> f64 {
    v[0].abs().max(v[1].abs()).max(v[2].abs())
}

fn norm_l1(v: [f64; 3]) -> f64 {
    v[0].abs() + v[1].abs() + v[2].abs()
}

fn residuals_and_objective(
    model: &ForceModel,
    params: &PhysicalParams,
    magnitudes: &[f64],
) -> (Vec<[f64; 3]>, Vec<[f64; 3]>, Vec<f64>, f64) {
    let n = model.bodies.len();
    let mut force = vec![[0.0; 3]; n];
    let mut torque = vec![[0.0; 3]; n];
    for (i, body) in model.bodies.iter().enumerate() {
        force[i][2] -= body.mass * params.gravity;
    }
    for (var, &mag) in model.vars.iter().zip(magnitudes) {
        if mag == 0.0 {
            continue;
        }
        let mut apply = |brick: usize, dir: [f64; 3]| {
            let com = model.bodies[brick].center;
            let lever = [
                var.point[0] - com[0],
                var.point[1] - com[1],
                var.point[2] - com[2],
            ];
            let t = cross(lever, dir);
            for a in 0..3 {
                force[brick][a] += dir[a] * mag;
                torque[brick][a] += t[a] * mag;
            }
        };
        apply(var.primary, var.dir);
        if let Some(partner) = var.partner {
            apply(partner, [-var.dir[0], -var.dir[1], -var.dir[2]]);
        }
    }
    let max_drag: Vec<f64> = model
        .drags_of
        .iter()
        .map(|drags| drags.iter().map(|&d| magnitudes[d]).fold(0.0, f64::max))
        .collect();
    let mut objective = 0.0;
    for i in 0..n {
        objective += norm_l1(force[i]) + norm_l1(torque[i]) + params.alpha * max_drag[i];
    }
    for drags in &model.drags_of {
        for &d in drags {
            objective += params.beta * magnitudes[d];
        }
    }
    (force, torque, max_drag, objective)
}

/// Solves the equilibrium program for a force model.
///
/// The residual slacks make the program feasible for every input, so an
/// unstable structure solves to nonzero residuals rather than an error;
/// errors are reserved for numerical breakdown.
pub fn solve_equilibrium(
    model: &ForceModel,
    params: &PhysicalParams,
) -> Result<ForceSolution, StabilityError> {
    params.validate()?;
    if model.bodies.is_empty() {
        return Ok(ForceSolution {
            magnitudes: Vec::new(),
            raw_magnitudes: Vec::new(),
            force_residuals: Vec::new(),
            torque_residuals: Vec::new(),
            max_drag: Vec::new(),
            objective: 0.0,
            objective_before_reduction: 0.0,
            lp_iterations: 0,
        });
    }

    let (lp, basis, _layout) = equilibrium_lp(model, params);
    let sol = lp.solve(&basis)?;

    let raw_magnitudes: Vec<f64> = sol.x[..model.vars.len()].to_vec();
    let mut magnitudes = raw_magnitudes.clone();
    for &(a, b) in model.knob_pairs.iter().chain(model.shear_pairs.iter()) {
        let reduce = magnitudes[a].min(magnitudes[b]);
        if reduce > 0.0 {
            magnitudes[a] -= reduce;
            magnitudes[b] -= reduce;
        }
    }

    let (_, _, _, objective_before) = residuals_and_objective(model, params, &raw_magnitudes);
    let (force, torque, max_drag, objective) =
        residuals_and_objective(model, params, &magnitudes);

    Ok(ForceSolution {
        magnitudes,
        raw_magnitudes,
        force_residuals: force,
        torque_residuals: torque,
        max_drag,
        objective,
        objective_before_reduction: objective_before,
        lp_iterations: sol.iterations,
    })
}

impl ForceSolution {
    /// Residual and complementarity bounds for this solution.
    pub fn certificate(&self, model: &ForceModel) -> SolveCertificate {
        let max_force_residual =
            self.force_residuals.iter().map(|&r| norm_inf(r)).fold(0.0, f64::max);
        let max_torque_residual =
            self.torque_residuals.iter().map(|&r| norm_inf(r)).fold(0.0, f64::max);
        let max_pair_product = model
            .knob_pairs
            .iter()
            .map(|&(a, b)| self.magnitudes[a] * self.magnitudes[b])
            .fold(0.0, f64::max);
        SolveCertificate {
            max_force_residual,
            max_torque_residual,
            max_pair_product,
            objective_before_reduction: self.objective_before_reduction,
            objective_after_reduction: self.objective,
        }
    }
}

/// Per-brick stability scores for one structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `s_i` in `[0, 1]`; zero marks an unstable brick.
    pub scores: Vec<f64>,
    /// Indices of all zero-score bricks, ascending.
    pub unstable: Vec<usize>,
    /// Largest drag per brick, in newtons.
    pub max_drag: Vec<f64>,
    /// True iff every score is positive.
    pub stable: bool,
    /// Wall-clock solve time in seconds; zero when timing is unavailable.
    pub solve_seconds: f64,
    pub solver_iterations: usize,
}

impl StabilityReport {
    pub fn empty() -> Self {
        StabilityReport {
            scores: Vec::new(),
            unstable: Vec::new(),
            max_drag: Vec::new(),
            stable: true,
            solve_seconds: 0.0,
            solver_iterations: 0,
        }
    }

    pub fn min_score(&self) -> f64 {
        self.scores.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Scores a solved structure: zero when equilibrium is out of tolerance or
/// the largest drag exceeds the friction capacity, `(F_T - D_max)/F_T`
/// otherwise.
pub fn stability_scores(sol: &ForceSolution, params: &PhysicalParams) -> StabilityReport {
    let n = sol.force_residuals.len();
    let mut scores = Vec::with_capacity(n);
    let mut unstable = Vec::new();
    for i in 0..n {
        let fr = norm_inf(sol.force_residuals[i]);
        let tr = norm_inf(sol.torque_residuals[i]);
        let d = sol.max_drag[i];
        let s = if fr > params.eq_tolerance || tr > params.eq_tolerance || d > params.friction_capacity
        {
            0.0
        } else {
            (params.friction_capacity - d) / params.friction_capacity
        };
        if s == 0.0 {
            unstable.push(i);
        }
        scores.push(s);
    }
    StabilityReport {
        stable: unstable.is_empty(),
        scores,
        unstable,
        max_drag: sol.max_drag.clone(),
        solve_seconds: 0.0,
        solver_iterations: sol.lp_iterations,
    }
}

/// Full analysis of one structure: model, solve, reduce, score.
pub fn analyze(s: &BrickStructure, params: &PhysicalParams) -> Result<StabilityReport, StabilityError> {
    params.validate()?;
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();
    let model = build_force_model(s, params)?;
    let sol = solve_equilibrium(&model, params)?;
    #[allow(unused_mut)]
    let mut report = stability_scores(&sol, params);
    #[cfg(feature = "std")]
    {
        report.solve_seconds = start.elapsed().as_secs_f64();
    }
    Ok(report)
}

/// Outcome of the prefix-stability buildability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Buildability {
    AllStable,
    /// Length of the shortest unstable prefix.
    UnstablePrefix(usize),
}

/// Finds the smallest `k` such that the prefix `[b_1 .. b_k]` is unstable,
/// confirming whether the structure can be assembled in emission order.
pub fn check_buildability(
    s: &BrickStructure,
    params: &PhysicalParams,
) -> Result<Buildability, StabilityError> {
    for k in 1..=s.len() {
        let prefix = s.prefix(k);
        let report = analyze(&prefix, params)?;
        if !report.stable {
            return Ok(Buildability::UnstablePrefix(k));
        }
    }
    Ok(Buildability::AllStable)
}
