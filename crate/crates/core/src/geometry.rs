//! Voxel occupancy, validity checking, stud connections, and connected
//! components.
//!
//! Validity deliberately covers only format, library membership, bounds and
//! collision; connectivity and stability are separate concerns handled by
//! rejection sampling and rollback respectively. A floating brick is valid.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::brick::{Axis, Brick, BrickDims, BrickError, BrickLibrary, BrickStructure, GridWorld};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("bricks {first} and {second} collide")]
    Collision { first: usize, second: usize },
    #[error("brick {index}: {error}")]
    InvalidBrick { index: usize, error: BrickError },
}

/// A dense boolean occupancy grid over `h × w × d` cells.
///
/// Cells are indexed x-fastest, then y, then z; the packed bit order of the
/// on-disk formats follows the same convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoxelGrid {
    h: u32,
    w: u32,
    d: u32,
    words: Vec<u64>,
}

impl VoxelGrid {
    pub fn new(h: u32, w: u32, d: u32) -> Self {
        assert!(h >= 1 && w >= 1 && d >= 1, "grid dimensions must be >= 1");
        let cells = h as usize * w as usize * d as usize;
        VoxelGrid { h, w, d, words: vec![0; cells.div_ceil(64)] }
    }

    pub fn from_grid_world(grid: &GridWorld) -> Self {
        VoxelGrid::new(grid.h, grid.w, grid.d)
    }

    pub fn dims(&self) -> (u32, u32, u32) {
        (self.h, self.w, self.d)
    }

    pub fn len(&self) -> usize {
        self.h as usize * self.w as usize * self.d as usize
    }

    fn index(&self, x: u32, y: u32, z: u32) -> usize {
        debug_assert!(x < self.h && y < self.w && z < self.d);
        x as usize + self.h as usize * (y as usize + self.w as usize * z as usize)
    }

    pub fn get(&self, x: u32, y: u32, z: u32) -> bool {
        let i = self.index(x, y, z);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u32, y: u32, z: u32, value: bool) {
        let i = self.index(x, y, z);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Number of occupied cells.
    pub fn count_occupied(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Occupied cells in x-fastest raster order.
    pub fn iter_occupied(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        let (h, w) = (self.h as usize, self.w as usize);
        (0..self.len()).filter_map(move |i| {
            if self.words[i / 64] >> (i % 64) & 1 == 1 {
                let x = (i % h) as u32;
                let y = ((i / h) % w) as u32;
                let z = (i / (h * w)) as u32;
                Some((x, y, z))
            } else {
                None
            }
        })
    }

    /// The z-extent actually used: one past the highest occupied layer.
    pub fn occupied_height(&self) -> u32 {
        (0..self.d)
            .rev()
            .find(|&z| (0..self.h).any(|x| (0..self.w).any(|y| self.get(x, y, z))))
            .map_or(0, |z| z + 1)
    }
}

impl fmt::Display for VoxelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VoxelGrid {}x{}x{} ({} occupied)", self.h, self.w, self.d, self.count_occupied())
    }
}

/// Tracks which brick owns each cell; supports incremental checks during
/// generation and brick removal during rebuild.
#[derive(Debug, Clone)]
pub struct OccupancyIndex {
    h: u32,
    w: u32,
    d: u32,
    owner: Vec<u32>,
}

pub const NO_OWNER: u32 = u32::MAX;

impl OccupancyIndex {
    pub fn new(grid: &GridWorld) -> Self {
        OccupancyIndex {
            h: grid.h,
            w: grid.w,
            d: grid.d,
            owner: vec![NO_OWNER; grid.voxel_count()],
        }
    }

    fn index(&self, x: u32, y: u32, z: u32) -> usize {
        x as usize + self.h as usize * (y as usize + self.w as usize * z as usize)
    }

    /// Owner of a cell, if any. Out-of-grid cells have no owner.
    pub fn owner_at(&self, x: u32, y: u32, z: u32) -> Option<usize> {
        if x >= self.h || y >= self.w || z >= self.d {
            return None;
        }
        match self.owner[self.index(x, y, z)] {
            NO_OWNER => None,
            i => Some(i as usize),
        }
    }

    /// First existing brick the candidate would collide with, if any.
    pub fn collision(&self, brick: &Brick) -> Option<usize> {
        brick.voxels().find_map(|(x, y, z)| self.owner_at(x, y, z))
    }

    /// Inserts a brick with the given index, failing on the first collision.
    pub fn insert(&mut self, index: usize, brick: &Brick) -> Result<(), GeometryError> {
        if let Some(first) = self.collision(brick) {
            return Err(GeometryError::Collision { first, second: index });
        }
        for (x, y, z) in brick.voxels() {
            let i = self.index(x, y, z);
            self.owner[i] = index as u32;
        }
        Ok(())
    }

    /// Clears the cells of a brick previously inserted with `index`.
    pub fn remove(&mut self, index: usize, brick: &Brick) {
        for (x, y, z) in brick.voxels() {
            let i = self.index(x, y, z);
            debug_assert_eq!(self.owner[i], index as u32);
            self.owner[i] = NO_OWNER;
        }
    }
}

/// Builds the occupancy grid of a structure, reporting the first colliding
/// brick pair if any two voxel sets intersect.
pub fn occupancy_grid(s: &BrickStructure) -> Result<VoxelGrid, GeometryError> {
    let occ = occupancy_index(s)?;
    let mut grid = VoxelGrid::new(occ.h, occ.w, occ.d);
    for b in &s.bricks {
        for (x, y, z) in b.voxels() {
            grid.set(x, y, z, true);
        }
    }
    Ok(grid)
}

/// Builds the owner index of a structure, reporting the first collision.
pub fn occupancy_index(s: &BrickStructure) -> Result<OccupancyIndex, GeometryError> {
    let mut occ = OccupancyIndex::new(&s.grid);
    for (i, b) in s.bricks.iter().enumerate() {
        occ.insert(i, b)?;
    }
    Ok(occ)
}

/// Why a proposed brick is invalid. Checks run in a fixed order — format,
/// library, bounds, collision — and the first failure is reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub enum ValidityFailure {
    #[error("malformed: {detail}")]
    Malformed { detail: String },
    #[error("dimensions {h}\u{d7}{w} not in library")]
    NotInLibrary { h: u32, w: u32 },
    #[error("out of bounds along {axis}")]
    OutOfBounds { axis: Axis },
    #[error("collides with brick {existing}")]
    Collision { existing: usize },
}

pub type ValidityResult = Result<(), ValidityFailure>;

/// Checks a raw `(h, w, x, y, z)` candidate against a library, the grid
/// bounds, and an occupancy index, in that order. Failures are values.
pub fn check_candidate(
    h: u32,
    w: u32,
    x: u32,
    y: u32,
    z: u32,
    grid: &GridWorld,
    library: &BrickLibrary,
    occ: &OccupancyIndex,
) -> ValidityResult {
    if !library.contains(h, w) {
        return Err(ValidityFailure::NotInLibrary { h, w });
    }
    let brick = match Brick::new(BrickDims::new_unchecked(h, w), x, y, z, grid) {
        Ok(b) => b,
        Err(BrickError::OutOfBounds { axis, .. }) => {
            return Err(ValidityFailure::OutOfBounds { axis })
        }
        Err(BrickError::DimensionNotInLibrary { h, w }) => {
            return Err(ValidityFailure::NotInLibrary { h, w })
        }
    };
    match occ.collision(&brick) {
        Some(existing) => Err(ValidityFailure::Collision { existing }),
        None => Ok(()),
    }
}

/// Convenience form of [`check_candidate`] that builds the occupancy of the
/// current structure on the fly and uses the standard library.
pub fn check_brick_validity(brick: &Brick, current: &BrickStructure) -> ValidityResult {
    let occ = match occupancy_index(current) {
        Ok(occ) => occ,
        Err(GeometryError::Collision { first, .. }) => {
            // The existing structure is already broken; report against it.
            return Err(ValidityFailure::Collision { existing: first });
        }
        Err(GeometryError::InvalidBrick { .. }) => unreachable!(),
    };
    check_candidate(
        brick.h(),
        brick.w(),
        brick.x,
        brick.y,
        brick.z,
        &current.grid,
        &BrickLibrary::standard(),
        &occ,
    )
}

/// What a brick rests on through one interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SupportRef {
    Baseplate,
    Brick(usize),
}

/// A stud interface between a brick and the brick (or baseplate) directly
/// below it. `knobs` lists the shared stud columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub upper: usize,
    pub lower: SupportRef,
    pub knobs: Vec<(u32, u32)>,
}

/// All stud connections of a collision-free structure. Bricks at `z = 0`
/// connect to the baseplate at every stud of their footprint.
pub fn connections(s: &BrickStructure) -> Result<Vec<Connection>, GeometryError> {
    let occ = occupancy_index(s)?;
    let mut grouped: BTreeMap<(usize, SupportRef), Vec<(u32, u32)>> = BTreeMap::new();
    for (i, b) in s.bricks.iter().enumerate() {
        if b.z == 0 {
            grouped.insert((i, SupportRef::Baseplate), b.studs().collect());
            continue;
        }
        for (sx, sy) in b.studs() {
            if let Some(j) = occ.owner_at(sx, sy, b.z - 1) {
                grouped.entry((i, SupportRef::Brick(j))).or_default().push((sx, sy));
            }
        }
    }
    Ok(grouped
        .into_iter()
        .map(|((upper, lower), knobs)| Connection { upper, lower, knobs })
        .collect())
}

/// Disjoint-set forest over brick indices.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Deterministic: smaller root wins.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Partition of brick indices under the symmetric closure of the connection
/// relation. The baseplate is not a connector between bricks. Components are
/// sorted by their smallest member; members are sorted ascending.
pub fn connected_components(s: &BrickStructure) -> Result<Vec<Vec<usize>>, GeometryError> {
    let conns = connections(s)?;
    let mut uf = UnionFind::new(s.len());
    for c in &conns {
        if let SupportRef::Brick(lower) = c.lower {
            uf.union(c.upper, lower);
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..s.len() {
        let root = uf.find(i);
        by_root.entry(root).or_default().push(i);
    }
    Ok(by_root.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick::new_brick;

    fn grid20() -> GridWorld {
        GridWorld::default()
    }

    fn structure(bricks: &[(u32, u32, u32, u32, u32)]) -> BrickStructure {
        let g = grid20();
        BrickStructure::with_bricks(
            g,
            bricks.iter().map(|&(h, w, x, y, z)| new_brick(h, w, x, y, z, &g).unwrap()).collect(),
        )
    }

    #[test]
    fn occupancy_counts_and_collisions() {
        let s = structure(&[(2, 4, 0, 0, 0)]);
        assert_eq!(occupancy_grid(&s).unwrap().count_occupied(), 8);

        let s = structure(&[(2, 4, 0, 0, 0), (1, 1, 1, 1, 0)]);
        assert_eq!(
            occupancy_grid(&s).unwrap_err(),
            GeometryError::Collision { first: 0, second: 1 }
        );

        let s = structure(&[(2, 4, 0, 0, 0), (2, 4, 0, 0, 1)]);
        let g = occupancy_grid(&s).unwrap();
        assert_eq!(g.count_occupied(), 16);
        assert_eq!(g.count_occupied() as u64, s.total_area());
    }

    #[test]
    fn validity_order_and_outcomes() {
        let lib = BrickLibrary::standard();
        let s = structure(&[(2, 2, 0, 0, 0)]);
        let occ = occupancy_index(&s).unwrap();

        // Supported placement above.
        assert_eq!(check_candidate(1, 2, 0, 0, 1, &s.grid, &lib, &occ), Ok(()));
        // Floating is a stability issue, not a validity issue.
        assert_eq!(check_candidate(1, 2, 0, 0, 5, &s.grid, &lib, &occ), Ok(()));
        // Library check precedes bounds: 9x9 anywhere reports NotInLibrary.
        assert_eq!(
            check_candidate(9, 9, 19, 19, 0, &s.grid, &lib, &occ),
            Err(ValidityFailure::NotInLibrary { h: 9, w: 9 })
        );
        // Bounds.
        assert_eq!(
            check_candidate(6, 2, 18, 0, 0, &s.grid, &lib, &occ),
            Err(ValidityFailure::OutOfBounds { axis: Axis::X })
        );
        // Collision reports the existing brick.
        assert_eq!(
            check_candidate(1, 1, 1, 1, 0, &s.grid, &lib, &occ),
            Err(ValidityFailure::Collision { existing: 0 })
        );
    }

    #[test]
    fn valid_candidate_extends_structure_consistently() {
        // check == Ok implies occupancy_grid succeeds on the extended structure.
        let mut s = structure(&[(2, 2, 0, 0, 0), (1, 4, 4, 4, 0)]);
        let cand = new_brick(2, 2, 0, 1, 1, &s.grid).unwrap();
        assert_eq!(check_brick_validity(&cand, &s), Ok(()));
        s.push(cand);
        assert!(occupancy_grid(&s).is_ok());
    }

    #[test]
    fn baseplate_connection_covers_all_studs() {
        let s = structure(&[(2, 4, 3, 3, 0)]);
        let conns = connections(&s).unwrap();
        assert_eq!(conns.len(), 1);
        assert_eq!(conns[0].lower, SupportRef::Baseplate);
        assert_eq!(conns[0].knobs.len(), 8);
    }

    #[test]
    fn knobs_are_the_shared_studs() {
        let s = structure(&[(1, 1, 0, 0, 0), (1, 4, 0, 0, 1)]);
        let conns = connections(&s).unwrap();
        assert_eq!(conns.len(), 2); // baseplate for lower, one interface for upper
        let up = conns.iter().find(|c| c.upper == 1).unwrap();
        assert_eq!(up.lower, SupportRef::Brick(0));
        assert_eq!(up.knobs, alloc::vec![(0, 0)]);

        // Floating brick has no connection at all.
        let s = structure(&[(1, 4, 0, 0, 1)]);
        assert!(connections(&s).unwrap().is_empty());
    }

    #[test]
    fn knob_count_bounded_by_smaller_footprint() {
        let s = structure(&[(2, 6, 0, 0, 0), (2, 4, 0, 1, 1)]);
        let conns = connections(&s).unwrap();
        let up = conns.iter().find(|c| c.upper == 1).unwrap();
        assert!(up.knobs.len() as u32 <= 8.min(12));
        // Every knob lies in both footprints.
        let (a, b) = (&s.bricks[1], &s.bricks[0]);
        for &(x, y) in &up.knobs {
            assert!(a.studs().any(|s| s == (x, y)));
            assert!(b.studs().any(|s| s == (x, y)));
        }
    }

    #[test]
    fn components_ignore_baseplate() {
        // Two stacked bricks: one component.
        let s = structure(&[(2, 2, 0, 0, 0), (2, 2, 0, 0, 1)]);
        assert_eq!(connected_components(&s).unwrap(), alloc::vec![alloc::vec![0, 1]]);

        // Two far-apart bricks on the baseplate: two components.
        let s = structure(&[(2, 2, 0, 0, 0), (2, 2, 10, 10, 0)]);
        assert_eq!(connected_components(&s).unwrap().len(), 2);

        // U-shape: transitively one component.
        let s = structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 2, 0), (1, 4, 0, 0, 1)]);
        assert_eq!(connected_components(&s).unwrap(), alloc::vec![alloc::vec![0, 1, 2]]);
    }

    #[test]
    fn occupied_height_tracks_top_layer() {
        let mut v = VoxelGrid::new(4, 4, 6);
        assert_eq!(v.occupied_height(), 0);
        v.set(1, 1, 0, true);
        v.set(2, 3, 4, true);
        assert_eq!(v.occupied_height(), 5);
        assert_eq!(v.iter_occupied().collect::<Vec<_>>(), alloc::vec![(1, 1, 0), (2, 3, 4)]);
    }
}
