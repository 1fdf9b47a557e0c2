//! Voxel-to-brick conversion: greedy layer-by-layer fill plus stochastic
//! delete-and-rebuild repair.
//!
//! The greedy fill walks layers bottom to top. At each step the candidate set
//! is every library footprint placed so that it covers the lowest-index
//! uncovered cell of the current layer while staying inside the occupied
//! cells. Candidates are ranked lexicographically:
//!
//! 1. partially supported by bricks on the layer below (bridging placements
//!    first),
//! 2. touching more distinct bricks on the layer below,
//! 3. larger footprint,
//! 4. more touched below-bricks of the opposite orientation.
//!
//! Rebuild after deleting a weak region ranks by (1) how many disconnected
//! components the brick joins and (2) footprint size. All remaining ties
//! break uniformly at random, which is what makes layout variants diverse.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::brick::{Brick, BrickDims, BrickLibrary, BrickStructure, GridWorld};
use crate::geometry::{self, GeometryError, SupportRef, VoxelGrid};
use crate::stability::{self, PhysicalParams, StabilityError, StabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LegolizeConfig {
    pub seed: u64,
    /// Delete-and-rebuild iterations before giving up.
    pub max_iterations: u32,
    /// Independent layouts per shape.
    pub variants: u32,
    /// Hops by which a weak region grows into its neighborhood.
    pub weak_region_radius: u32,
    /// Scores at or below this value count as weak; zero selects exactly the
    /// unstable bricks.
    pub weak_score_threshold: f64,
}

impl Default for LegolizeConfig {
    fn default() -> Self {
        LegolizeConfig {
            seed: 0,
            max_iterations: 20,
            variants: 2,
            weak_region_radius: 1,
            weak_score_threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LegolizeError {
    #[error("voxel grid is empty")]
    EmptyGrid,
    #[error("voxel grid is {got:?} but the grid world is {want:?}")]
    GridMismatch { got: (u32, u32, u32), want: (u32, u32, u32) },
    #[error("cell ({x},{y},{z}) cannot be covered by any library brick")]
    UnfillableVoxel { x: u32, y: u32, z: u32 },
    #[error("structure has no weak bricks")]
    NoWeakRegion,
    #[error("max_iterations must be at least 1")]
    BadConfig,
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegolizeResult {
    pub structure: BrickStructure,
    pub report: StabilityReport,
    /// Delete-and-rebuild iterations actually used.
    pub iterations: u32,
    /// True iff the returned structure is stable.
    pub converged: bool,
}

/// Cell-ownership bookkeeping for a fill in progress.
struct FillState<'a> {
    target: &'a VoxelGrid,
    world: GridWorld,
    covered: Vec<bool>,
    /// Brick index per cell, `u32::MAX` when free.
    owner: Vec<u32>,
}

impl<'a> FillState<'a> {
    fn new(target: &'a VoxelGrid, world: GridWorld) -> Self {
        let cells = world.voxel_count();
        FillState {
            target,
            world,
            covered: alloc::vec![false; cells],
            owner: alloc::vec![u32::MAX; cells],
        }
    }

    fn idx(&self, x: u32, y: u32, z: u32) -> usize {
        self.world.index(x, y, z)
    }

    fn owner_at(&self, x: u32, y: u32, z: u32) -> Option<usize> {
        if !self.world.contains_cell(x, y, z) {
            return None;
        }
        match self.owner[self.idx(x, y, z)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// True iff the footprint lies entirely on target cells that are still
    /// uncovered.
    fn fits(&self, dims: BrickDims, ax: u32, ay: u32, z: u32) -> bool {
        if ax + dims.h() > self.world.h || ay + dims.w() > self.world.w {
            return false;
        }
        for cx in ax..ax + dims.h() {
            for cy in ay..ay + dims.w() {
                if !self.target.get(cx, cy, z) || self.covered[self.idx(cx, cy, z)] {
                    return false;
                }
            }
        }
        true
    }

    fn place(&mut self, brick: &Brick, index: usize) {
        for (x, y, z) in brick.voxels() {
            let i = self.idx(x, y, z);
            self.covered[i] = true;
            self.owner[i] = index as u32;
        }
    }
}

/// Distinct placed bricks directly under a footprint, in index order.
fn bricks_below(state: &FillState, dims: BrickDims, ax: u32, ay: u32, z: u32) -> Vec<usize> {
    let mut out = BTreeSet::new();
    if z == 0 {
        return Vec::new();
    }
    for cx in ax..ax + dims.h() {
        for cy in ay..ay + dims.w() {
            if let Some(i) = state.owner_at(cx, cy, z - 1) {
                out.insert(i);
            }
        }
    }
    out.into_iter().collect()
}

fn supported_studs(state: &FillState, dims: BrickDims, ax: u32, ay: u32, z: u32) -> u32 {
    if z == 0 {
        return dims.area();
    }
    let mut n = 0;
    for cx in ax..ax + dims.h() {
        for cy in ay..ay + dims.w() {
            if state.owner_at(cx, cy, z - 1).is_some() {
                n += 1;
            }
        }
    }
    n
}

/// All placements of library footprints that cover the target cell and fit.
fn candidates_at(
    state: &FillState,
    library: &BrickLibrary,
    tx: u32,
    ty: u32,
    z: u32,
) -> Vec<(BrickDims, u32, u32)> {
    let mut out = Vec::new();
    for dims in library.oriented_dims() {
        let x0 = tx.saturating_sub(dims.h() - 1);
        let y0 = ty.saturating_sub(dims.w() - 1);
        for ax in x0..=tx {
            for ay in y0..=ty {
                if state.fits(dims, ax, ay, z) {
                    out.push((dims, ax, ay));
                }
            }
        }
    }
    out
}

fn pick_max_by_key<T, K: Ord>(
    items: Vec<T>,
    rng: &mut impl Rng,
    mut key: impl FnMut(&T) -> K,
) -> Option<T> {
    let mut best: Vec<T> = Vec::new();
    let mut best_key: Option<K> = None;
    for item in items {
        let k = key(&item);
        match &best_key {
            None => {
                best_key = Some(k);
                best.push(item);
            }
            Some(bk) => {
                if k > *bk {
                    best_key = Some(k);
                    best.clear();
                    best.push(item);
                } else if k == *bk {
                    best.push(item);
                }
            }
        }
    }
    if best.is_empty() {
        None
    } else {
        let i = rng.random_range(0..best.len());
        Some(best.swap_remove(i))
    }
}

/// Greedy layer-by-layer fill of an occupancy grid.
pub fn greedy_fill(
    target: &VoxelGrid,
    world: &GridWorld,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    greedy_fill_with(target, world, &BrickLibrary::standard(), rng)
}

pub fn greedy_fill_with(
    target: &VoxelGrid,
    world: &GridWorld,
    library: &BrickLibrary,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    if target.is_empty() {
        return Err(LegolizeError::EmptyGrid);
    }
    if target.dims() != (world.h, world.w, world.d) {
        return Err(LegolizeError::GridMismatch {
            got: target.dims(),
            want: (world.h, world.w, world.d),
        });
    }
    let mut state = FillState::new(target, *world);
    let mut structure = BrickStructure::new(*world);

    for z in 0..world.d {
        loop {
            // Lowest-index uncovered occupied cell of this layer.
            let mut next_cell = None;
            'scan: for y in 0..world.w {
                for x in 0..world.h {
                    if target.get(x, y, z) && !state.covered[state.idx(x, y, z)] {
                        next_cell = Some((x, y));
                        break 'scan;
                    }
                }
            }
            let Some((tx, ty)) = next_cell else { break };

            let candidates = candidates_at(&state, library, tx, ty, z);
            let chosen = pick_max_by_key(candidates, rng, |&(dims, ax, ay)| {
                let below = bricks_below(&state, dims, ax, ay, z);
                let supported = supported_studs(&state, dims, ax, ay, z);
                let partial = u32::from(supported > 0 && supported < dims.area());
                let opposite = below
                    .iter()
                    .filter(|&&i| {
                        let other = structure.bricks[i].dims.long_axis();
                        match (dims.long_axis(), other) {
                            (Some(a), Some(b)) => a != b,
                            _ => false,
                        }
                    })
                    .count();
                (partial, below.len(), dims.area(), opposite)
            });
            match chosen {
                Some((dims, ax, ay)) => {
                    let brick = Brick::new(dims, ax, ay, z, world)
                        .expect("candidate placements are in bounds");
                    let index = structure.len();
                    state.place(&brick, index);
                    structure.push(brick);
                }
                // Unreachable while a 1x1 brick is in the library.
                None => return Err(LegolizeError::UnfillableVoxel { x: tx, y: ty, z }),
            }
        }
    }
    Ok(structure)
}

/// Connected components of the weak-brick set, expanded by `radius` hops in
/// the full connection graph; one component is picked uniformly at random.
pub fn find_weak_region(
    s: &BrickStructure,
    report: &StabilityReport,
    rng: &mut impl Rng,
    cfg: &LegolizeConfig,
) -> Result<BTreeSet<usize>, LegolizeError> {
    let weak: BTreeSet<usize> = report
        .scores
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cfg.weak_score_threshold)
        .map(|(i, _)| i)
        .collect();
    if weak.is_empty() {
        return Err(LegolizeError::NoWeakRegion);
    }

    // Brick-to-brick adjacency from stud connections.
    let mut adjacent: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in geometry::connections(s)? {
        if let SupportRef::Brick(lower) = c.lower {
            adjacent.entry(c.upper).or_default().push(lower);
            adjacent.entry(lower).or_default().push(c.upper);
        }
    }

    // Components of the subgraph induced by the weak set.
    let mut components: Vec<BTreeSet<usize>> = Vec::new();
    let mut seen = BTreeSet::new();
    for &start in &weak {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(i) = queue.pop_front() {
            comp.insert(i);
            for &j in adjacent.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
                if weak.contains(&j) && seen.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        components.push(comp);
    }

    let mut region = components.swap_remove(rng.random_range(0..components.len()));

    // Expand by radius hops over all connections.
    for _ in 0..cfg.weak_region_radius {
        let mut grown = region.clone();
        for &i in &region {
            for &j in adjacent.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
                grown.insert(j);
            }
        }
        if grown.len() == region.len() {
            break;
        }
        region = grown;
    }
    Ok(region)
}

/// Removes the region's bricks and refills their cells greedily, preferring
/// bricks that join disconnected components, then large bricks.
pub fn rebuild_region(
    s: &BrickStructure,
    region: &BTreeSet<usize>,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    rebuild_region_with(s, region, &BrickLibrary::standard(), rng)
}

pub fn rebuild_region_with(
    s: &BrickStructure,
    region: &BTreeSet<usize>,
    library: &BrickLibrary,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    // The fill target is every cell of the original structure; kept bricks
    // pre-cover theirs, so only the freed cells get refilled.
    let target = geometry::occupancy_grid(s)?;
    let kept = BrickStructure::with_bricks(
        s.grid,
        s.bricks
            .iter()
            .enumerate()
            .filter(|(i, _)| !region.contains(i))
            .map(|(_, b)| *b)
            .collect(),
    );
    refill_around_with(&kept, &target, library, rng)
}

/// Greedily covers the uncovered cells of `target` around an existing
/// structure using the rebuild priorities (join components, then large
/// bricks). Returns the existing bricks followed by the new ones. Existing
/// bricks must occupy target cells.
pub fn refill_around(
    existing: &BrickStructure,
    target: &VoxelGrid,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    refill_around_with(existing, target, &BrickLibrary::standard(), rng)
}

pub fn refill_around_with(
    existing: &BrickStructure,
    target: &VoxelGrid,
    library: &BrickLibrary,
    rng: &mut impl Rng,
) -> Result<BrickStructure, LegolizeError> {
    let world = existing.grid;
    if target.dims() != (world.h, world.w, world.d) {
        return Err(LegolizeError::GridMismatch {
            got: target.dims(),
            want: (world.h, world.w, world.d),
        });
    }
    let mut state = FillState::new(target, world);
    for (i, b) in existing.bricks.iter().enumerate() {
        state.place(b, i);
    }

    // Union-find over existing + new bricks, seeded with connections.
    fn find_ro(parent: &[usize], mut i: usize) -> usize {
        while parent[i] != i {
            i = parent[i];
        }
        i
    }
    fn union(parent: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (find_ro(parent, a), find_ro(parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }
    let mut parent: Vec<usize> = (0..existing.len()).collect();
    for c in geometry::connections(existing)? {
        if let SupportRef::Brick(lower) = c.lower {
            union(&mut parent, c.upper, lower);
        }
    }

    let mut out = existing.clone();
    for z in 0..world.d {
        loop {
            let mut next_cell = None;
            'scan: for y in 0..world.w {
                for x in 0..world.h {
                    if state.target.get(x, y, z) && !state.covered[state.idx(x, y, z)] {
                        next_cell = Some((x, y));
                        break 'scan;
                    }
                }
            }
            let Some((tx, ty)) = next_cell else { break };

            let candidates = candidates_at(&state, library, tx, ty, z);
            let chosen = pick_max_by_key(candidates, rng, |&(dims, ax, ay)| {
                // Components this placement would join, looking both down and up.
                let mut roots = BTreeSet::new();
                for cx in ax..ax + dims.h() {
                    for cy in ay..ay + dims.w() {
                        if z > 0 {
                            if let Some(i) = state.owner_at(cx, cy, z - 1) {
                                roots.insert(find_ro(&parent, i));
                            }
                        }
                        if z + 1 < world.d {
                            if let Some(i) = state.owner_at(cx, cy, z + 1) {
                                roots.insert(find_ro(&parent, i));
                            }
                        }
                    }
                }
                (roots.len(), dims.area())
            });
            match chosen {
                Some((dims, ax, ay)) => {
                    let brick =
                        Brick::new(dims, ax, ay, z, &world).expect("candidate placements are in bounds");
                    let index = out.len();
                    parent.push(index);
                    for (cx, cy, cz) in brick.voxels() {
                        for nz in [cz.checked_sub(1), cz.checked_add(1)] {
                            if let Some(nz) = nz {
                                if let Some(j) = state.owner_at(cx, cy, nz) {
                                    union(&mut parent, index, j);
                                }
                            }
                        }
                    }
                    state.place(&brick, index);
                    out.push(brick);
                }
                None => return Err(LegolizeError::UnfillableVoxel { x: tx, y: ty, z }),
            }
        }
    }
    Ok(out)
}

/// Converts a voxel grid into a stable brick layout, repairing weak regions
/// for up to `max_iterations` rounds. Unconverged runs return the best
/// iterate seen (highest minimum score, then fewest unstable bricks). The
/// returned structure is re-sorted into raster-scan order.
pub fn legolize(
    target: &VoxelGrid,
    world: &GridWorld,
    params: &PhysicalParams,
    cfg: &LegolizeConfig,
) -> Result<LegolizeResult, LegolizeError> {
    if cfg.max_iterations < 1 {
        return Err(LegolizeError::BadConfig);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut structure = greedy_fill(target, world, &mut rng)?;
    let mut best: Option<(f64, usize, BrickStructure, StabilityReport, u32)> = None;

    for iteration in 0..=cfg.max_iterations {
        let report = stability::analyze(&structure, params)?;
        if report.stable {
            return Ok(finalize(structure, report, iteration, true));
        }
        let key = (report.min_score(), report.scores.len() - report.unstable.len());
        let replace = match &best {
            None => true,
            Some((bs, bk, ..)) => key.0 > *bs || (key.0 == *bs && key.1 > *bk),
        };
        if replace {
            best = Some((key.0, key.1, structure.clone(), report.clone(), iteration));
        }
        if iteration == cfg.max_iterations {
            break;
        }
        let region = find_weak_region(&structure, &report, &mut rng, cfg)?;
        structure = rebuild_region(&structure, &region, &mut rng)?;
    }

    let (_, _, structure, report, iterations) = best.expect("at least one iterate was recorded");
    Ok(finalize(structure, report, iterations, false))
}

/// Raster-sorts the structure and permutes the report to match.
fn finalize(
    mut structure: BrickStructure,
    report: StabilityReport,
    iterations: u32,
    converged: bool,
) -> LegolizeResult {
    let mut order: Vec<usize> = (0..structure.len()).collect();
    order.sort_by_key(|&i| structure.bricks[i].raster_key());
    let scores: Vec<f64> = order.iter().map(|&i| report.scores[i]).collect();
    let max_drag: Vec<f64> = order.iter().map(|&i| report.max_drag[i]).collect();
    let unstable: Vec<usize> =
        scores.iter().enumerate().filter(|(_, s)| **s == 0.0).map(|(i, _)| i).collect();
    structure.bricks = order.iter().map(|&i| structure.bricks[i]).collect();
    LegolizeResult {
        structure,
        report: StabilityReport {
            stable: report.stable,
            scores,
            unstable,
            max_drag,
            solve_seconds: report.solve_seconds,
            solver_iterations: report.solver_iterations,
        },
        iterations,
        converged,
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Runs `cfg.variants` independent layouts with derived seeds and drops
/// duplicates (identical brick sets).
pub fn generate_variants(
    target: &VoxelGrid,
    world: &GridWorld,
    params: &PhysicalParams,
    cfg: &LegolizeConfig,
) -> Result<Vec<LegolizeResult>, LegolizeError> {
    let mut out: Vec<LegolizeResult> = Vec::new();
    for v in 0..cfg.variants {
        let mut vcfg = *cfg;
        vcfg.seed = splitmix64(cfg.seed ^ u64::from(v));
        let result = legolize(target, world, params, &vcfg)?;
        let duplicate = out.iter().any(|r| {
            let mut a = r.structure.bricks.clone();
            let mut b = result.structure.bricks.clone();
            a.sort();
            b.sort();
            a == b
        });
        if !duplicate {
            out.push(result);
        }
    }
    Ok(out)
}
