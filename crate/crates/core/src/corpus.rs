//! A bundled corpus of procedural voxel shapes on the default 20³ grid.
//!
//! Every shape is connected and grounded. The corpus feeds the layout and
//! generation test suites and doubles as demo input for the command line.

use alloc::vec::Vec;

use crate::geometry::VoxelGrid;

pub const GRID: u32 = 20;

fn grid() -> VoxelGrid {
    VoxelGrid::new(GRID, GRID, GRID)
}

fn fill_box(g: &mut VoxelGrid, x: core::ops::Range<u32>, y: core::ops::Range<u32>, z: core::ops::Range<u32>) {
    for zz in z {
        for yy in y.clone() {
            for xx in x.clone() {
                g.set(xx, yy, zz, true);
            }
        }
    }
}

fn cube() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 6..13, 6..13, 0..7);
    g
}

fn plate() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 4..16, 4..16, 0..2);
    g
}

fn tower() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 8..12, 8..12, 0..16);
    g
}

fn pyramid() -> VoxelGrid {
    let mut g = grid();
    for step in 0..6u32 {
        let inset = 2 + step;
        fill_box(&mut g, inset..20 - inset, inset..20 - inset, step..step + 1);
    }
    g
}

fn chair() -> VoxelGrid {
    let mut g = grid();
    // Four legs, a seat, and a backrest.
    for &(x, y) in &[(5u32, 5u32), (5, 10), (10, 5), (10, 10)] {
        fill_box(&mut g, x..x + 2, y..y + 2, 0..4);
    }
    fill_box(&mut g, 5..12, 5..12, 4..6);
    fill_box(&mut g, 5..7, 5..12, 6..12);
    g
}

fn table() -> VoxelGrid {
    let mut g = grid();
    for &(x, y) in &[(4u32, 4u32), (4, 13), (13, 4), (13, 13)] {
        fill_box(&mut g, x..x + 2, y..y + 2, 0..5);
    }
    fill_box(&mut g, 3..17, 3..17, 5..7);
    g
}

fn arch() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 8..12, 2..5, 0..8);
    fill_box(&mut g, 8..12, 15..18, 0..8);
    fill_box(&mut g, 8..12, 2..18, 8..10);
    g
}

fn letter_t() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 9..12, 8..12, 0..10);
    fill_box(&mut g, 9..12, 3..17, 10..13);
    g
}

fn letter_h() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 8..11, 4..7, 0..12);
    fill_box(&mut g, 8..11, 13..16, 0..12);
    fill_box(&mut g, 8..11, 7..13, 5..8);
    g
}

fn staircase() -> VoxelGrid {
    let mut g = grid();
    for step in 0..6u32 {
        fill_box(&mut g, 6..12, 2 + step * 3..2 + step * 3 + 3, 0..(step + 1) * 2);
    }
    g
}

fn hollow_box() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 4..16, 4..16, 0..9);
    // Carve the inside, keep the floor.
    for z in 2..9 {
        for y in 6..14 {
            for x in 6..14 {
                g.set(x, y, z, false);
            }
        }
    }
    g
}

fn cross() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 8..12, 2..18, 0..5);
    fill_box(&mut g, 2..18, 8..12, 0..5);
    g
}

fn cylinder() -> VoxelGrid {
    let mut g = grid();
    let (cx, cy, r) = (9.5f64, 9.5f64, 5.5f64);
    for z in 0..11 {
        for y in 0..GRID {
            for x in 0..GRID {
                let dx = x as f64 + 0.5 - (cx + 0.5);
                let dy = y as f64 + 0.5 - (cy + 0.5);
                if dx * dx + dy * dy <= r * r {
                    g.set(x, y, z, true);
                }
            }
        }
    }
    g
}

fn dome() -> VoxelGrid {
    let mut g = grid();
    let (c, r) = (9.5f64, 8.5f64);
    for z in 0..9 {
        for y in 0..GRID {
            for x in 0..GRID {
                let dx = x as f64 - c;
                let dy = y as f64 - c;
                let dz = z as f64;
                if dx * dx + dy * dy + dz * dz <= r * r {
                    g.set(x, y, z, true);
                }
            }
        }
    }
    g
}

fn bowl() -> VoxelGrid {
    let mut g = grid();
    let c = 9.5f64;
    for z in 0..7u32 {
        let outer = 4.5 + z as f64;
        let inner = (outer - 2.5).max(0.0);
        for y in 0..GRID {
            for x in 0..GRID {
                let dx = x as f64 - c;
                let dy = y as f64 - c;
                let d = libm::sqrt(dx * dx + dy * dy);
                if d <= outer && (z == 0 || d >= inner) {
                    g.set(x, y, z, true);
                }
            }
        }
    }
    g
}

fn zigzag_wall() -> VoxelGrid {
    let mut g = grid();
    for seg in 0..5u32 {
        let x = 4 + seg * 2;
        let y0 = if seg % 2 == 0 { 4 } else { 7 };
        fill_box(&mut g, x..x + 2, y0..y0 + 8, 0..8);
    }
    g
}

fn torus() -> VoxelGrid {
    let mut g = grid();
    let (c, big_r, small_r) = (9.5f64, 6.0f64, 2.4f64);
    for z in 0..5 {
        for y in 0..GRID {
            for x in 0..GRID {
                let dx = x as f64 - c;
                let dy = y as f64 - c;
                let ring = libm::sqrt(dx * dx + dy * dy) - big_r;
                let dz = z as f64 - 2.0;
                if ring * ring + dz * dz <= small_r * small_r {
                    g.set(x, y, z, true);
                }
            }
        }
    }
    g
}

fn mushroom() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 8..12, 8..12, 0..7);
    let c = 9.5f64;
    for z in 7..10 {
        let r = 6.0 - (z - 7) as f64 * 1.5;
        for y in 0..GRID {
            for x in 0..GRID {
                let dx = x as f64 - c;
                let dy = y as f64 - c;
                if dx * dx + dy * dy <= r * r {
                    g.set(x, y, z, true);
                }
            }
        }
    }
    g
}

fn dumbbell() -> VoxelGrid {
    let mut g = grid();
    fill_box(&mut g, 7..13, 2..6, 0..6);
    fill_box(&mut g, 7..13, 14..18, 0..6);
    fill_box(&mut g, 8..12, 5..15, 3..6);
    g
}

fn blob() -> VoxelGrid {
    let mut g = grid();
    // Deterministic lumpy shape: union of a few spheres resting on z=0.
    let spheres = [
        (9.0f64, 9.0f64, 2.0f64, 5.0f64),
        (6.0, 12.0, 4.0, 4.0),
        (13.0, 8.0, 5.0, 3.5),
        (10.0, 11.0, 7.0, 3.0),
    ];
    for z in 0..12 {
        for y in 0..GRID {
            for x in 0..GRID {
                for &(sx, sy, sz, r) in &spheres {
                    let dx = x as f64 - sx;
                    let dy = y as f64 - sy;
                    let dz = z as f64 - sz;
                    if dx * dx + dy * dy + dz * dz <= r * r {
                        g.set(x, y, z, true);
                    }
                }
            }
        }
    }
    g
}

/// All bundled shapes, name plus grid, in a fixed order.
pub fn corpus() -> Vec<(&'static str, VoxelGrid)> {
    alloc::vec![
        ("cube", cube()),
        ("plate", plate()),
        ("tower", tower()),
        ("pyramid", pyramid()),
        ("chair", chair()),
        ("table", table()),
        ("arch", arch()),
        ("letter_t", letter_t()),
        ("letter_h", letter_h()),
        ("staircase", staircase()),
        ("hollow_box", hollow_box()),
        ("cross", cross()),
        ("cylinder", cylinder()),
        ("dome", dome()),
        ("bowl", bowl()),
        ("zigzag_wall", zigzag_wall()),
        ("torus", torus()),
        ("mushroom", mushroom()),
        ("dumbbell", dumbbell()),
        ("blob", blob()),
    ]
}

/// Looks a shape up by name.
pub fn shape(name: &str) -> Option<VoxelGrid> {
    corpus().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}
