//! Solid voxelization of triangle meshes onto the grid world.
//!
//! The mesh is scaled uniformly (aspect ratio preserved) so that it fits the
//! grid, centered in X/Y, and rested on `z = 0`. Surface cells come from
//! conservative rasterization: a cell is surface-occupied iff its box
//! intersects any triangle. The interior is the complement of a 6-connected
//! flood fill started outside a one-cell padding, so no diagonal leaks.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::brick::GridWorld;
use crate::geometry::VoxelGrid;

/// A triangle soup. Triangles index into `vertices`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VoxelizeError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("mesh coordinates are not finite")]
    NonFiniteCoordinate,
    #[error("triangle {triangle} references a missing vertex")]
    BadIndex { triangle: usize },
    #[error("mesh has no spatial extent")]
    DegenerateExtent,
}

impl Mesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> Self {
        Mesh { vertices, triangles }
    }

    fn validate(&self) -> Result<(), VoxelizeError> {
        if self.triangles.is_empty() {
            return Err(VoxelizeError::EmptyMesh);
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i as usize >= self.vertices.len() {
                    return Err(VoxelizeError::BadIndex { triangle: t });
                }
            }
        }
        if self
            .vertices
            .iter()
            .any(|v| v.iter().any(|c| !c.is_finite()))
        {
            return Err(VoxelizeError::NonFiniteCoordinate);
        }
        Ok(())
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Separating-axis test between a triangle and an axis-aligned box.
/// Closed: touching counts as overlap (conservative rasterization).
pub fn triangle_box_overlap(center: [f64; 3], half: [f64; 3], tri: [[f64; 3]; 3]) -> bool {
    const EPS: f64 = 1e-12;
    let v0 = sub(tri[0], center);
    let v1 = sub(tri[1], center);
    let v2 = sub(tri[2], center);

    // Box axes.
    for a in 0..3 {
        let lo = v0[a].min(v1[a]).min(v2[a]);
        let hi = v0[a].max(v1[a]).max(v2[a]);
        if lo > half[a] + EPS || hi < -half[a] - EPS {
            return false;
        }
    }

    // Triangle plane.
    let e0 = sub(v1, v0);
    let e1 = sub(v2, v1);
    let e2 = sub(v0, v2);
    let n = cross(e0, e1);
    let r = half[0] * n[0].abs() + half[1] * n[1].abs() + half[2] * n[2].abs();
    if dot(n, v0).abs() > r + EPS {
        return false;
    }

    // Nine edge cross axes.
    let edges = [e0, e1, e2];
    for a in 0..3 {
        for e in &edges {
            // axis = unit(a) x e, written out per component.
            let axis = match a {
                0 => [0.0, -e[2], e[1]],
                1 => [e[2], 0.0, -e[0]],
                _ => [-e[1], e[0], 0.0],
            };
            let p0 = dot(axis, v0);
            let p1 = dot(axis, v1);
            let p2 = dot(axis, v2);
            let lo = p0.min(p1).min(p2);
            let hi = p0.max(p1).max(p2);
            let r = half[0] * axis[0].abs() + half[1] * axis[1].abs() + half[2] * axis[2].abs();
            if lo > r + EPS || hi < -r - EPS {
                return false;
            }
        }
    }
    true
}

/// Voxelizes a mesh into the grid world's cell lattice.
pub fn voxelize_mesh(mesh: &Mesh, grid: &GridWorld) -> Result<VoxelGrid, VoxelizeError> {
    mesh.validate()?;

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for tri in &mesh.triangles {
        for &i in tri {
            let v = mesh.vertices[i as usize];
            for a in 0..3 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
    }
    let extent = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let dims = [grid.h as f64, grid.w as f64, grid.d as f64];
    let mut scale = f64::INFINITY;
    for a in 0..3 {
        if extent[a] > 1e-12 {
            scale = scale.min(dims[a] / extent[a]);
        }
    }
    if !scale.is_finite() {
        return Err(VoxelizeError::DegenerateExtent);
    }

    // Center in X/Y, rest on z = 0.
    let map = |v: [f64; 3]| {
        [
            (v[0] - (lo[0] + hi[0]) / 2.0) * scale + dims[0] / 2.0,
            (v[1] - (lo[1] + hi[1]) / 2.0) * scale + dims[1] / 2.0,
            (v[2] - lo[2]) * scale,
        ]
    };

    let (h, w, d) = (grid.h, grid.w, grid.d);
    let mut surface = VoxelGrid::new(h, w, d);
    for tri in &mesh.triangles {
        let t = [
            map(mesh.vertices[tri[0] as usize]),
            map(mesh.vertices[tri[1] as usize]),
            map(mesh.vertices[tri[2] as usize]),
        ];
        let mut tlo = [f64::INFINITY; 3];
        let mut thi = [f64::NEG_INFINITY; 3];
        for v in &t {
            for a in 0..3 {
                tlo[a] = tlo[a].min(v[a]);
                thi[a] = thi[a].max(v[a]);
            }
        }
        let cell_range = |lo: f64, hi: f64, n: u32| {
            let a = (libm::floor(lo) as i64).clamp(0, n as i64 - 1) as u32;
            let b = (libm::floor(hi) as i64).clamp(0, n as i64 - 1) as u32;
            a..=b
        };
        for cz in cell_range(tlo[2], thi[2], d) {
            for cy in cell_range(tlo[1], thi[1], w) {
                for cx in cell_range(tlo[0], thi[0], h) {
                    if surface.get(cx, cy, cz) {
                        continue;
                    }
                    let center = [cx as f64 + 0.5, cy as f64 + 0.5, cz as f64 + 0.5];
                    if triangle_box_overlap(center, [0.5; 3], t) {
                        surface.set(cx, cy, cz, true);
                    }
                }
            }
        }
    }

    // Exterior flood fill over a one-cell padding; what it cannot reach and
    // is not surface is interior.
    let (ph, pw, pd) = (h as i64 + 2, w as i64 + 2, d as i64 + 2);
    let pidx = |x: i64, y: i64, z: i64| (x + ph * (y + pw * z)) as usize;
    let mut visited = vec![false; (ph * pw * pd) as usize];
    let mut queue = VecDeque::new();
    visited[pidx(0, 0, 0)] = true;
    queue.push_back((0i64, 0i64, 0i64));
    while let Some((x, y, z)) = queue.pop_front() {
        for (dx, dy, dz) in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)] {
            let (nx, ny, nz) = (x + dx, y + dy, z + dz);
            if nx < 0 || ny < 0 || nz < 0 || nx >= ph || ny >= pw || nz >= pd {
                continue;
            }
            if visited[pidx(nx, ny, nz)] {
                continue;
            }
            // Padded coordinates are grid coordinates + 1.
            let in_grid = nx >= 1 && ny >= 1 && nz >= 1 && nx <= h as i64 && ny <= w as i64 && nz <= d as i64;
            if in_grid && surface.get(nx as u32 - 1, ny as u32 - 1, nz as u32 - 1) {
                continue;
            }
            visited[pidx(nx, ny, nz)] = true;
            queue.push_back((nx, ny, nz));
        }
    }

    let mut out = surface.clone();
    for z in 0..d {
        for y in 0..w {
            for x in 0..h {
                if !surface.get(x, y, z) && !visited[pidx(x as i64 + 1, y as i64 + 1, z as i64 + 1)] {
                    out.set(x, y, z, true);
                }
            }
        }
    }
    Ok(out)
}

/// The twelve triangles of an axis-aligned cuboid, for tests and demos.
pub fn cuboid_mesh(lo: [f64; 3], hi: [f64; 3]) -> Mesh {
    let v = |m: u8| {
        [
            if m & 1 == 0 { lo[0] } else { hi[0] },
            if m & 2 == 0 { lo[1] } else { hi[1] },
            if m & 4 == 0 { lo[2] } else { hi[2] },
        ]
    };
    let vertices: Vec<[f64; 3]> = (0..8).map(v).collect();
    // Two triangles per face, outward winding not required by the voxelizer.
    let triangles = vec![
        [0, 1, 2],
        [1, 3, 2],
        [4, 6, 5],
        [5, 6, 7],
        [0, 4, 1],
        [1, 4, 5],
        [2, 3, 6],
        [3, 7, 6],
        [0, 2, 4],
        [2, 6, 4],
        [1, 5, 3],
        [3, 5, 7],
    ];
    Mesh::new(vertices, triangles)
}
