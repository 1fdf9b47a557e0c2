//! Construction of the per-structure force model.
//!
//! Every brick is a rigid body loaded by gravity at its geometric center.
//! Candidate forces connect bodies pairwise and share one magnitude variable
//! per Newton pair:
//!
//! - per knob of every stud interface: one *support* (up on the upper brick,
//!   down on the lower), one *drag* (clutch tension: down on the upper brick,
//!   up on the lower), and four *shear* directions (±x, ±y) modelling the
//!   rigid interlock of the studs;
//! - per shared face cell of side-adjacent bricks on the same layer: one
//!   compressive contact normal.
//!
//! The baseplate is an immovable body: it terminates Newton pairs but
//! contributes no equilibrium equations. Supports and drags at the same knob
//! oppose each other along the same line and may not coexist; the solver
//! enforces that with an exact pairwise-reduction pass after the solve.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::brick::BrickStructure;
use crate::geometry::{self, GeometryError, SupportRef};

/// Physical constants of the stability analysis. All values must be positive.
///
/// `friction_capacity` (`F_T`) and the objective weights `alpha`/`beta` follow
/// the published setup (0.98 N, 1e-3, 1e-6). The per-stud mass is not given
/// there; the default 0.29 g/stud makes a 2×4 brick weigh about 2.3 g, which
/// matches the real part. All of these are configuration, not constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalParams {
    /// Friction capacity of one stud connection, in newtons.
    pub friction_capacity: f64,
    /// Objective weight of the per-brick maximum drag force.
    pub alpha: f64,
    /// Objective weight of the total drag force.
    pub beta: f64,
    /// Mass per stud in kilograms.
    pub stud_mass: f64,
    /// Gravitational acceleration in m/s².
    pub gravity: f64,
    /// Equilibrium tolerance: residual force (N) and torque (N·m) above this
    /// mark a brick unstable.
    pub eq_tolerance: f64,
    /// Maximum allowed product of the magnitudes of a forbidden force pair.
    pub complementarity_tolerance: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            friction_capacity: 0.98,
            alpha: 1e-3,
            beta: 1e-6,
            stud_mass: 0.29e-3,
            gravity: 9.8,
            eq_tolerance: 1e-6,
            complementarity_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("physical parameter {name} must be positive")]
    NotPositive { name: &'static str },
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let checks = [
            ("friction_capacity", self.friction_capacity),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("stud_mass", self.stud_mass),
            ("gravity", self.gravity),
            ("eq_tolerance", self.eq_tolerance),
            ("complementarity_tolerance", self.complementarity_tolerance),
        ];
        for (name, v) in checks {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ParamError::NotPositive { name });
            }
        }
        Ok(())
    }
}

/// Role of a candidate force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForceClass {
    Support,
    Drag,
    ShearXPos,
    ShearXNeg,
    ShearYPos,
    ShearYNeg,
    SideContact,
}

/// One Newton-paired candidate force variable.
///
/// The magnitude acts on `primary` along `dir` and, when `partner` is a
/// brick, on the partner along `-dir` at the same application point. A
/// `partner` of `None` is the baseplate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceVar {
    pub class: ForceClass,
    pub point: [f64; 3],
    pub dir: [f64; 3],
    pub primary: usize,
    pub partner: Option<usize>,
}

/// A rigid body in the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrickBody {
    pub mass: f64,
    pub center: [f64; 3],
}

/// The structural force model: bodies, shared candidate variables, drag sets
/// and the forbidden (coexistence) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceModel {
    pub bodies: Vec<BrickBody>,
    pub vars: Vec<ForceVar>,
    /// Per brick: indices of the drag variables acting on it (its bottom
    /// connections). Each drag variable belongs to exactly one such set.
    pub drags_of: Vec<Vec<usize>>,
    /// Forbidden pairs: (support, drag) at one knob.
    pub knob_pairs: Vec<(usize, usize)>,
    /// Opposing shear pairs at one knob: (+x, -x) and (+y, -y).
    pub shear_pairs: Vec<(usize, usize)>,
}

impl ForceModel {
    /// Candidate-force count `M_i` for one brick, gravity included.
    pub fn candidate_count(&self, brick: usize) -> usize {
        1 + self
            .vars
            .iter()
            .filter(|v| v.primary == brick || v.partner == Some(brick))
            .count()
    }

    pub fn weight(&self, brick: usize, params: &PhysicalParams) -> f64 {
        self.bodies[brick].mass * params.gravity
    }
}

/// Builds the force model of a collision-free structure.
pub fn build_force_model(
    s: &BrickStructure,
    params: &PhysicalParams,
) -> Result<ForceModel, GeometryError> {
    let pitch = s.grid.stud_pitch_mm * 1e-3;
    let layer = s.grid.layer_height_mm * 1e-3;

    let bodies: Vec<BrickBody> = s
        .bricks
        .iter()
        .map(|b| BrickBody {
            mass: params.stud_mass * b.dims.area() as f64,
            center: [
                (b.x as f64 + b.h() as f64 / 2.0) * pitch,
                (b.y as f64 + b.w() as f64 / 2.0) * pitch,
                (b.z as f64 + 0.5) * layer,
            ],
        })
        .collect();

    let mut vars = Vec::new();
    let mut drags_of = alloc::vec![Vec::new(); s.len()];
    let mut knob_pairs = Vec::new();
    let mut shear_pairs = Vec::new();

    for conn in geometry::connections(s)? {
        let upper = conn.upper;
        let partner = match conn.lower {
            SupportRef::Baseplate => None,
            SupportRef::Brick(j) => Some(j),
        };
        let interface_z = s.bricks[upper].z as f64 * layer;
        for &(kx, ky) in &conn.knobs {
            let point = [(kx as f64 + 0.5) * pitch, (ky as f64 + 0.5) * pitch, interface_z];
            let support = vars.len();
            vars.push(ForceVar {
                class: ForceClass::Support,
                point,
                dir: [0.0, 0.0, 1.0],
                primary: upper,
                partner,
            });
            let drag = vars.len();
            vars.push(ForceVar {
                class: ForceClass::Drag,
                point,
                dir: [0.0, 0.0, -1.0],
                primary: upper,
                partner,
            });
            drags_of[upper].push(drag);
            knob_pairs.push((support, drag));

            let shear = [
                (ForceClass::ShearXPos, [1.0, 0.0, 0.0]),
                (ForceClass::ShearXNeg, [-1.0, 0.0, 0.0]),
                (ForceClass::ShearYPos, [0.0, 1.0, 0.0]),
                (ForceClass::ShearYNeg, [0.0, -1.0, 0.0]),
            ];
            let first = vars.len();
            for (class, dir) in shear {
                vars.push(ForceVar { class, point, dir, primary: upper, partner });
            }
            shear_pairs.push((first, first + 1));
            shear_pairs.push((first + 2, first + 3));
        }
    }

    // Side contacts: one compressive normal per shared face cell between
    // same-layer neighbors, scanned once from the lower-coordinate side.
    let occ = geometry::occupancy_index(s)?;
    for (i, b) in s.bricks.iter().enumerate() {
        for (vx, vy, vz) in b.voxels() {
            let zc = (vz as f64 + 0.5) * layer;
            if let Some(j) = occ.owner_at(vx + 1, vy, vz) {
                if j != i {
                    vars.push(ForceVar {
                        class: ForceClass::SideContact,
                        point: [(vx + 1) as f64 * pitch, (vy as f64 + 0.5) * pitch, zc],
                        // Push-apart normal on the -x side brick.
                        dir: [-1.0, 0.0, 0.0],
                        primary: i,
                        partner: Some(j),
                    });
                }
            }
            if let Some(j) = occ.owner_at(vx, vy + 1, vz) {
                if j != i {
                    vars.push(ForceVar {
                        class: ForceClass::SideContact,
                        point: [(vx as f64 + 0.5) * pitch, (vy + 1) as f64 * pitch, zc],
                        dir: [0.0, -1.0, 0.0],
                        primary: i,
                        partner: Some(j),
                    });
                }
            }
        }
    }

    Ok(ForceModel { bodies, vars, drags_of, knob_pairs, shear_pairs })
}
