//! Independent equilibrium oracle.
//!
//! The LP solver's residual-feasibility verdict is cross-checked against a
//! dense non-negative least-squares solve (Lawson–Hanson active set) of the
//! same balance equations. The oracle shares the force model construction
//! but none of the solver path: a structure can reach equilibrium iff
//! `min ‖Ax − b‖` over `x >= 0` is (numerically) zero.

use brickforge_core::brick::{new_brick, BrickStructure, GridWorld};
use brickforge_core::stability::{
    build_force_model, solve_equilibrium, ForceModel, PhysicalParams,
};

/// Dense column-major matrix for the oracle.
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl Dense {
    fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![0.0; rows * cols] }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Balance system `Ax = b` of a force model: six rows per brick, one column
/// per candidate force, gravity on the right-hand side.
fn balance_system(model: &ForceModel, params: &PhysicalParams) -> (Dense, Vec<f64>) {
    let n = model.bodies.len();
    let mut a = Dense::zeros(6 * n, model.vars.len());
    let mut b = vec![0.0; 6 * n];
    for (i, body) in model.bodies.iter().enumerate() {
        b[6 * i + 2] = body.mass * params.gravity;
    }
    for (k, var) in model.vars.iter().enumerate() {
        let mut add = |brick: usize, dir: [f64; 3], a: &mut Dense| {
            let com = model.bodies[brick].center;
            let lever = [
                var.point[0] - com[0],
                var.point[1] - com[1],
                var.point[2] - com[2],
            ];
            let torque = cross(lever, dir);
            for axis in 0..3 {
                *a.at_mut(6 * brick + axis, k) += dir[axis];
                *a.at_mut(6 * brick + 3 + axis, k) += torque[axis];
            }
        };
        add(var.primary, var.dir, &mut a);
        if let Some(partner) = var.partner {
            add(partner, [-var.dir[0], -var.dir[1], -var.dir[2]], &mut a);
        }
    }
    (a, b)
}

/// Solves the unconstrained least squares `min ‖A_P z − b‖` over the passive
/// columns via normal equations with partial pivoting. Near-singular pivots
/// zero the corresponding unknown.
fn ls_on_passive(a: &Dense, b: &[f64], passive: &[usize]) -> Vec<f64> {
    let m = passive.len();
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    for (i, &ci) in passive.iter().enumerate() {
        for (j, &cj) in passive.iter().enumerate() {
            let mut s = 0.0;
            for r in 0..a.rows {
                s += a.at(r, ci) * a.at(r, cj);
            }
            ata[i * m + j] = s;
        }
        let mut s = 0.0;
        for r in 0..a.rows {
            s += a.at(r, ci) * b[r];
        }
        atb[i] = s;
    }
    // Gaussian elimination with partial pivoting.
    let mut perm: Vec<usize> = (0..m).collect();
    for col in 0..m {
        let mut best = col;
        for r in col + 1..m {
            if ata[perm[r] * m + col].abs() > ata[perm[best] * m + col].abs() {
                best = r;
            }
        }
        perm.swap(col, best);
        let p = ata[perm[col] * m + col];
        if p.abs() < 1e-12 {
            continue;
        }
        for r in col + 1..m {
            let f = ata[perm[r] * m + col] / p;
            if f != 0.0 {
                for c in col..m {
                    ata[perm[r] * m + c] -= f * ata[perm[col] * m + c];
                }
                atb[perm[r]] -= f * atb[perm[col]];
            }
        }
    }
    let mut z = vec![0.0; m];
    for col in (0..m).rev() {
        let p = ata[perm[col] * m + col];
        if p.abs() < 1e-12 {
            z[col] = 0.0;
            continue;
        }
        let mut s = atb[perm[col]];
        for c in col + 1..m {
            s -= ata[perm[col] * m + c] * z[c];
        }
        z[col] = s / p;
    }
    z
}

/// Lawson–Hanson non-negative least squares. Returns the residual infinity
/// norm at the solution.
fn nnls_residual(a: &Dense, b: &[f64]) -> f64 {
    let n = a.cols;
    let mut x = vec![0.0; n];
    let mut passive: Vec<usize> = Vec::new();

    for _outer in 0..(3 * n + 30) {
        // Gradient w = A^T (b - Ax).
        let mut resid = b.to_vec();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for r in 0..a.rows {
                    resid[r] -= a.at(r, j) * xj;
                }
            }
        }
        let mut best = None;
        for j in 0..n {
            if passive.contains(&j) {
                continue;
            }
            let mut w = 0.0;
            for r in 0..a.rows {
                w += a.at(r, j) * resid[r];
            }
            if w > 1e-10 && best.map_or(true, |(_, bw)| w > bw) {
                best = Some((j, w));
            }
        }
        let Some((enter, _)) = best else { break };
        passive.push(enter);

        loop {
            let z = ls_on_passive(a, b, &passive);
            if z.iter().all(|&v| v > 1e-12) {
                for (i, &c) in passive.iter().enumerate() {
                    x[c] = z[i];
                }
                break;
            }
            // Step toward z until the first passive variable hits zero.
            let mut alpha = 1.0f64;
            for (i, &c) in passive.iter().enumerate() {
                if z[i] <= 1e-12 {
                    let xi = x[c];
                    if xi - z[i] > 1e-15 {
                        alpha = alpha.min(xi / (xi - z[i]));
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (i, &c) in passive.iter().enumerate() {
                x[c] += alpha * (z[i] - x[c]);
            }
            let before = passive.len();
            passive.retain(|&c| x[c] > 1e-12);
            if passive.len() == before {
                // No progress is possible; accept the current iterate.
                break;
            }
        }
    }

    let mut resid = b.to_vec();
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            for r in 0..a.rows {
                resid[r] -= a.at(r, j) * xj;
            }
        }
    }
    resid.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn structure(bricks: &[(u32, u32, u32, u32, u32)]) -> BrickStructure {
    let g = GridWorld::default();
    BrickStructure::with_bricks(
        g,
        bricks.iter().map(|&(h, w, x, y, z)| new_brick(h, w, x, y, z, &g).unwrap()).collect(),
    )
}

#[test]
fn solver_feasibility_matches_nnls_oracle_on_small_structures() {
    let params = PhysicalParams::default();
    let cases: Vec<(&str, BrickStructure)> = vec![
        ("single 1x1", structure(&[(1, 1, 5, 5, 0)])),
        ("single 2x4", structure(&[(2, 4, 3, 3, 0)])),
        ("floating", structure(&[(1, 1, 5, 5, 3)])),
        ("two stacked", structure(&[(2, 2, 0, 0, 0), (2, 2, 0, 0, 1)])),
        ("offset pair", structure(&[(2, 2, 0, 0, 0), (2, 2, 1, 0, 1)])),
        ("single-knob cantilever", structure(&[(1, 1, 0, 0, 0), (1, 8, 0, 0, 1)])),
        ("two-knob counterweight", structure(&[(1, 2, 0, 0, 0), (1, 8, 0, 0, 1)])),
        ("bridge", structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 3, 0), (1, 4, 0, 0, 1)])),
        ("tower of three", structure(&[(2, 2, 4, 4, 0), (2, 2, 4, 4, 1), (2, 2, 4, 4, 2)])),
        ("side by side", structure(&[(1, 2, 0, 0, 0), (1, 2, 1, 0, 0)])),
        ("step with float", structure(&[(2, 2, 0, 0, 0), (1, 1, 9, 9, 2)])),
        (
            "staircase pair",
            structure(&[(2, 4, 0, 0, 0), (2, 4, 0, 2, 1), (1, 1, 15, 15, 0)]),
        ),
    ];

    for (name, s) in cases {
        let model = build_force_model(&s, &params).unwrap();
        let sol = solve_equilibrium(&model, &params).unwrap();
        let solver_feasible = sol
            .force_residuals
            .iter()
            .chain(sol.torque_residuals.iter())
            .all(|r| r.iter().all(|c| c.abs() <= params.eq_tolerance));

        let (a, b) = balance_system(&model, &params);
        let oracle_residual = if a.cols == 0 {
            b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
        } else {
            nnls_residual(&a, &b)
        };
        let oracle_feasible = oracle_residual <= params.eq_tolerance;

        assert_eq!(
            solver_feasible, oracle_feasible,
            "{name}: solver {solver_feasible} vs oracle {oracle_feasible} (residual {oracle_residual:.3e})"
        );
    }
}
