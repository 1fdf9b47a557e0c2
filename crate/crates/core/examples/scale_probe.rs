use brickforge_core::brick::{new_brick, BrickStructure, GridWorld};
use brickforge_core::stability::{analyze, PhysicalParams};
use std::time::Instant;

fn main() {
    let params = PhysicalParams::default();
    let g = GridWorld::default();
    for layers in [1u32, 2, 3, 4] {
        let mut bricks = Vec::new();
        for z in 0..layers {
            if z % 2 == 0 {
                for x in (0..20).step_by(2) {
                    for y in (0..20).step_by(4) {
                        bricks.push(new_brick(2, 4, x, y, z, &g).unwrap());
                    }
                }
            } else {
                for x in (0..20).step_by(4) {
                    for y in (0..20).step_by(2) {
                        bricks.push(new_brick(4, 2, x, y, z, &g).unwrap());
                    }
                }
            }
        }
        let s = BrickStructure::with_bricks(g, bricks);
        let t = Instant::now();
        let report = analyze(&s, &params).unwrap();
        println!(
            "bricks={} stable={} lp_iters={} time={:.3}s",
            s.len(), report.stable, report.solver_iterations, t.elapsed().as_secs_f64()
        );
    }
}
