use brickforge_core::brick::{new_brick, BrickStructure, GridWorld};
use brickforge_core::stability::{analyze, PhysicalParams};

fn main() {
    let g = GridWorld::default();
    let bricks: Vec<_> = (0..10).map(|z| new_brick(2, 2, 4, 4, z, &g).unwrap()).collect();
    let s = BrickStructure::with_bricks(g, bricks);
    match analyze(&s, &PhysicalParams::default()) {
        Ok(r) => println!("ok stable={} iters={}", r.stable, r.solver_iterations),
        Err(e) => println!("error: {e}"),
    }
}
