//! Chamfer distance between voxel grids.
//!
//! The distance is the symmetric sum of Euclidean nearest-neighbor distances
//! over occupied voxel centers:
//! `Σ_{p∈a} min_{q∈b} ‖p−q‖₂ + Σ_{q∈b} min_{p∈a} ‖q−p‖₂`.
//! Sums (not means) and the L2 norm are fixed conventions of this crate.
//!
//! Equal-sized grids go through an exact three-pass squared Euclidean
//! distance transform (lower envelope of parabolas per axis), which makes a
//! full grid-to-grid distance O(cells). Mismatched grids fall back to the
//! pairwise scan.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::VoxelGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ChamferError {
    #[error("chamfer distance requires non-empty grids")]
    EmptyGrid,
}

const FAR: f64 = 1e18;

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn dt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = -FAR;
    z[1] = FAR;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        loop {
            let p = v[k];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = FAR;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = dq * dq + f[v[k]];
    }
}

/// Exact squared Euclidean distance from every cell to the nearest occupied
/// cell. All values stay at the sentinel `1e18` when the grid is empty.
pub fn squared_distance_field(grid: &VoxelGrid) -> Vec<f64> {
    let (h, w, d) = grid.dims();
    let (h, w, d) = (h as usize, w as usize, d as usize);
    let idx = |x: usize, y: usize, z: usize| x + h * (y + w * z);

    let mut field = vec![FAR; h * w * d];
    for (x, y, z) in grid.iter_occupied() {
        field[idx(x as usize, y as usize, z as usize)] = 0.0;
    }

    let longest = h.max(w).max(d);
    let mut f = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut v = vec![0usize; longest];
    let mut zbuf = vec![0.0; longest + 1];

    for z in 0..d {
        for y in 0..w {
            for x in 0..h {
                f[x] = field[idx(x, y, z)];
            }
            dt_1d(&f[..h], &mut out[..h], &mut v, &mut zbuf);
            for x in 0..h {
                field[idx(x, y, z)] = out[x];
            }
        }
    }
    for z in 0..d {
        for x in 0..h {
            for y in 0..w {
                f[y] = field[idx(x, y, z)];
            }
            dt_1d(&f[..w], &mut out[..w], &mut v, &mut zbuf);
            for y in 0..w {
                field[idx(x, y, z)] = out[y];
            }
        }
    }
    for y in 0..w {
        for x in 0..h {
            for z in 0..d {
                f[z] = field[idx(x, y, z)];
            }
            dt_1d(&f[..d], &mut out[..d], &mut v, &mut zbuf);
            for z in 0..d {
                field[idx(x, y, z)] = out[z];
            }
        }
    }
    field
}

fn one_sided_via_field(from: &VoxelGrid, to_field: &[f64], dims: (u32, u32, u32)) -> f64 {
    let (h, w) = (dims.0 as usize, dims.1 as usize);
    from.iter_occupied()
        .map(|(x, y, z)| {
            let i = x as usize + h * (y as usize + w * z as usize);
            libm::sqrt(to_field[i])
        })
        .sum()
}

fn one_sided_brute(from: &[(u32, u32, u32)], to: &[(u32, u32, u32)]) -> f64 {
    from.iter()
        .map(|&(ax, ay, az)| {
            let mut best = f64::INFINITY;
            for &(bx, by, bz) in to {
                let dx = ax as f64 - bx as f64;
                let dy = ay as f64 - by as f64;
                let dz = az as f64 - bz as f64;
                let d2 = dx * dx + dy * dy + dz * dz;
                if d2 < best {
                    best = d2;
                }
            }
            libm::sqrt(best)
        })
        .sum()
}

/// Symmetric Chamfer distance between two non-empty grids.
pub fn chamfer_distance(a: &VoxelGrid, b: &VoxelGrid) -> Result<f64, ChamferError> {
    if a.is_empty() || b.is_empty() {
        return Err(ChamferError::EmptyGrid);
    }
    if a.dims() == b.dims() {
        let fa = squared_distance_field(a);
        let fb = squared_distance_field(b);
        Ok(one_sided_via_field(a, &fb, b.dims()) + one_sided_via_field(b, &fa, a.dims()))
    } else {
        let pa: Vec<_> = a.iter_occupied().collect();
        let pb: Vec<_> = b.iter_occupied().collect();
        Ok(one_sided_brute(&pa, &pb) + one_sided_brute(&pb, &pa))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_with(cells: &[(u32, u32, u32)]) -> VoxelGrid {
        let mut g = VoxelGrid::new(20, 20, 20);
        for &(x, y, z) in cells {
            g.set(x, y, z, true);
        }
        g
    }

    #[test]
    fn identical_grids_have_zero_distance() {
        let g = grid_with(&[(0, 0, 0), (5, 5, 5), (19, 19, 19)]);
        assert_eq!(chamfer_distance(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn unit_shift_is_two() {
        let a = grid_with(&[(0, 0, 0)]);
        let b = grid_with(&[(1, 0, 0)]);
        assert!((chamfer_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let a = grid_with(&[(0, 0, 0)]);
        let empty = VoxelGrid::new(20, 20, 20);
        assert_eq!(chamfer_distance(&a, &empty), Err(ChamferError::EmptyGrid));
        assert_eq!(chamfer_distance(&empty, &a), Err(ChamferError::EmptyGrid));
    }

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    fn random_grid(seed: u64, fill: u64) -> VoxelGrid {
        let mut g = VoxelGrid::new(12, 12, 12);
        let mut s = seed | 1;
        for z in 0..12 {
            for y in 0..12 {
                for x in 0..12 {
                    if xorshift(&mut s) % 100 < fill {
                        g.set(x, y, z, true);
                    }
                }
            }
        }
        g
    }

    #[test]
    fn symmetric_and_nonnegative() {
        for seed in 1..6u64 {
            let a = random_grid(seed, 10);
            let b = random_grid(seed + 100, 10);
            let ab = chamfer_distance(&a, &b).unwrap();
            let ba = chamfer_distance(&b, &a).unwrap();
            assert!(ab >= 0.0);
            assert!((ab - ba).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_iff_equal() {
        let a = random_grid(7, 15);
        let mut b = a.clone();
        assert_eq!(chamfer_distance(&a, &b).unwrap(), 0.0);
        // Flip one far-away bit: distance strictly positive.
        b.set(0, 0, 11, !b.get(0, 0, 11));
        assert!(chamfer_distance(&a, &b).unwrap() > 0.0);
    }

    #[test]
    fn field_route_matches_pairwise_scan() {
        for seed in 1..8u64 {
            let a = random_grid(seed * 3, 8);
            let b = random_grid(seed * 7 + 1, 8);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let fast = chamfer_distance(&a, &b).unwrap();
            let pa: alloc::vec::Vec<_> = a.iter_occupied().collect();
            let pb: alloc::vec::Vec<_> = b.iter_occupied().collect();
            let brute = one_sided_brute(&pa, &pb) + one_sided_brute(&pb, &pa);
            assert!((fast - brute).abs() < 1e-6, "seed {seed}: {fast} vs {brute}");
        }
    }

    #[test]
    fn mismatched_dims_take_the_pairwise_path() {
        let a = grid_with(&[(1, 1, 1)]);
        let mut b = VoxelGrid::new(5, 5, 5);
        b.set(1, 1, 2, true);
        assert!((chamfer_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
    }
}
