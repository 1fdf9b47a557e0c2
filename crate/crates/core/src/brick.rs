//! Domain types for bricks, structures, the brick library, and the grid world.
//!
//! A brick is an axis-aligned, 1-unit-tall cuboid described by its stud
//! footprint `h × w` and the grid position `(x, y, z)` of the stud closest to
//! the origin. `h` spans the X axis and `w` spans the Y axis, so the order of
//! `h` and `w` encodes the brick's orientation about the vertical axis; there
//! is no separate orientation field.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// The eight canonical brick footprints, `(h, w)` with `h <= w`, in studs.
pub const CANONICAL_DIMS: [(u32, u32); 8] =
    [(1, 1), (1, 2), (1, 4), (1, 6), (1, 8), (2, 2), (2, 4), (2, 6)];

/// LDraw part numbers for the canonical footprints, in [`CANONICAL_DIMS`] order.
const CANONICAL_PARTS: [&str; 8] = ["3005", "3004", "3010", "3009", "3008", "3003", "3001", "2456"];

/// A grid axis. `Z` is the layer axis (one layer = one brick height).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
            Axis::Z => f.write_str("z"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrickError {
    #[error("brick dimensions {h}\u{d7}{w} are not in the brick library")]
    DimensionNotInLibrary { h: u32, w: u32 },
    #[error("brick extends out of bounds along {axis}: extent {extent} exceeds grid size {limit}")]
    OutOfBounds { axis: Axis, extent: u64, limit: u32 },
}

/// A brick footprint in studs: `h` along X, `w` along Y.
///
/// Footprints are validated against the standard library (the eight canonical
/// bricks and their 90-degree rotations, 14 oriented pairs in total) unless
/// constructed through a custom [`BrickLibrary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BrickDims {
    h: u32,
    w: u32,
}

impl BrickDims {
    /// Validates `(h, w)` against the standard library.
    pub fn new(h: u32, w: u32) -> Result<Self, BrickError> {
        if Self::in_standard_library(h, w) {
            Ok(BrickDims { h, w })
        } else {
            Err(BrickError::DimensionNotInLibrary { h, w })
        }
    }

    /// Builds a footprint without any library check. Intended for extended
    /// libraries loaded from a manifest; prefer [`BrickDims::new`].
    pub fn new_unchecked(h: u32, w: u32) -> Self {
        BrickDims { h, w }
    }

    fn in_standard_library(h: u32, w: u32) -> bool {
        let lo = h.min(w);
        let hi = h.max(w);
        CANONICAL_DIMS.iter().any(|&(a, b)| (lo, hi) == (a, b))
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    /// Stud count of the footprint.
    pub fn area(&self) -> u32 {
        self.h * self.w
    }

    pub fn is_square(&self) -> bool {
        self.h == self.w
    }

    /// The same footprint rotated 90 degrees about the vertical axis.
    pub fn rotated(&self) -> Self {
        BrickDims { h: self.w, w: self.h }
    }

    /// Canonical `(min, max)` pair identifying the physical part.
    pub fn canonical(&self) -> (u32, u32) {
        (self.h.min(self.w), self.h.max(self.w))
    }

    /// Axis the longer side runs along, or `None` for square footprints.
    pub fn long_axis(&self) -> Option<Axis> {
        use core::cmp::Ordering::*;
        match self.h.cmp(&self.w) {
            Greater => Some(Axis::X),
            Less => Some(Axis::Y),
            Equal => None,
        }
    }
}

impl fmt::Display for BrickDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\u{d7}{}", self.h, self.w)
    }
}

/// The discretized build volume, plus the physical size of one grid cell.
///
/// `h`, `w`, `d` are the stud extents along X, Y and the layer count along Z.
/// Physical lengths are configuration, not constants of the format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridWorld {
    pub h: u32,
    pub w: u32,
    pub d: u32,
    /// Horizontal stud pitch in millimetres.
    pub stud_pitch_mm: f64,
    /// Height of one brick layer in millimetres.
    pub layer_height_mm: f64,
}

impl GridWorld {
    pub const DEFAULT_STUD_PITCH_MM: f64 = 8.0;
    pub const DEFAULT_LAYER_HEIGHT_MM: f64 = 9.6;

    /// A grid with the given stud extents and default physical cell size.
    pub fn new(h: u32, w: u32, d: u32) -> Self {
        assert!(h >= 1 && w >= 1 && d >= 1, "grid dimensions must be >= 1");
        GridWorld {
            h,
            w,
            d,
            stud_pitch_mm: Self::DEFAULT_STUD_PITCH_MM,
            layer_height_mm: Self::DEFAULT_LAYER_HEIGHT_MM,
        }
    }

    pub fn voxel_count(&self) -> usize {
        self.h as usize * self.w as usize * self.d as usize
    }

    /// Linear cell index, x-fastest then y then z.
    pub fn index(&self, x: u32, y: u32, z: u32) -> usize {
        debug_assert!(x < self.h && y < self.w && z < self.d);
        x as usize + self.h as usize * (y as usize + self.w as usize * z as usize)
    }

    pub fn contains_cell(&self, x: u32, y: u32, z: u32) -> bool {
        x < self.h && y < self.w && z < self.d
    }
}

impl Default for GridWorld {
    fn default() -> Self {
        GridWorld::new(20, 20, 20)
    }
}

/// One placed brick: footprint plus the grid position of its origin stud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Brick {
    pub dims: BrickDims,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Brick {
    /// Places a validated footprint, checking grid bounds.
    pub fn new(dims: BrickDims, x: u32, y: u32, z: u32, grid: &GridWorld) -> Result<Self, BrickError> {
        let xe = x as u64 + dims.h as u64;
        if xe > grid.h as u64 {
            return Err(BrickError::OutOfBounds { axis: Axis::X, extent: xe, limit: grid.h });
        }
        let ye = y as u64 + dims.w as u64;
        if ye > grid.w as u64 {
            return Err(BrickError::OutOfBounds { axis: Axis::Y, extent: ye, limit: grid.w });
        }
        let ze = z as u64 + 1;
        if ze > grid.d as u64 {
            return Err(BrickError::OutOfBounds { axis: Axis::Z, extent: ze, limit: grid.d });
        }
        Ok(Brick { dims, x, y, z })
    }

    pub fn h(&self) -> u32 {
        self.dims.h()
    }

    pub fn w(&self) -> u32 {
        self.dims.w()
    }

    /// The voxels occupied by this brick: `{(x+i, y+j, z) : 0<=i<h, 0<=j<w}`.
    pub fn voxels(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        let (x, y, z) = (self.x, self.y, self.z);
        let w = self.dims.w();
        (0..self.dims.h()).flat_map(move |i| (0..w).map(move |j| (x + i, y + j, z)))
    }

    /// Stud columns `(x, y)` of the footprint, top and bottom faces alike.
    pub fn studs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let (x, y) = (self.x, self.y);
        let w = self.dims.w();
        (0..self.dims.h()).flat_map(move |i| (0..w).map(move |j| (x + i, y + j)))
    }

    /// Raster-scan sort key: layer bottom-up, then row, then column.
    pub fn raster_key(&self) -> (u32, u32, u32, u32, u32) {
        (self.z, self.y, self.x, self.dims.h(), self.dims.w())
    }
}

/// Validates footprint membership in the standard library and grid bounds.
pub fn new_brick(h: u32, w: u32, x: u32, y: u32, z: u32, grid: &GridWorld) -> Result<Brick, BrickError> {
    let dims = BrickDims::new(h, w)?;
    Brick::new(dims, x, y, z, grid)
}

/// An ordered sequence of bricks in a grid world.
///
/// Order is meaningful: index `i` is generation/assembly order. Collision
/// freedom is not an invariant of this type; it is checked by the geometry
/// module where operations require it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrickStructure {
    pub grid: GridWorld,
    pub bricks: Vec<Brick>,
}

impl BrickStructure {
    pub fn new(grid: GridWorld) -> Self {
        BrickStructure { grid, bricks: Vec::new() }
    }

    pub fn with_bricks(grid: GridWorld, bricks: Vec<Brick>) -> Self {
        BrickStructure { grid, bricks }
    }

    pub fn len(&self) -> usize {
        self.bricks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bricks.is_empty()
    }

    pub fn push(&mut self, brick: Brick) {
        self.bricks.push(brick);
    }

    /// The prefix `[b_1 .. b_k]` as a new structure.
    pub fn prefix(&self, k: usize) -> Self {
        BrickStructure { grid: self.grid, bricks: self.bricks[..k].to_vec() }
    }

    /// Re-sorts bricks into raster-scan order, bottom to top.
    pub fn sort_raster(&mut self) {
        self.bricks.sort_by_key(|b| b.raster_key());
    }

    /// Total stud count over all bricks.
    pub fn total_area(&self) -> u64 {
        self.bricks.iter().map(|b| b.dims.area() as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LibraryError {
    #[error("library manifest is empty")]
    Empty,
    #[error("library entry {index}: dimensions must be positive")]
    ZeroDims { index: usize },
    #[error("library entry {index}: duplicate footprint {h}\u{d7}{w}")]
    Duplicate { index: usize, h: u32, w: u32 },
    #[error("library entry {index}: part id is empty")]
    EmptyPartId { index: usize },
}

/// A catalogue entry: canonical footprint plus LDraw part metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub canonical_h: u32,
    pub canonical_w: u32,
    pub ldraw_part_id: String,
}

/// The set of available brick footprints with per-part metadata.
///
/// The library is data-driven: the standard catalogue ships as a manifest and
/// can be extended without type changes. A footprint `(h, w)` is a member if
/// it matches an entry as listed or rotated 90 degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickLibrary {
    entries: Vec<LibraryEntry>,
}

impl BrickLibrary {
    /// The standard eight-brick catalogue.
    pub fn standard() -> Self {
        let entries = CANONICAL_DIMS
            .iter()
            .zip(CANONICAL_PARTS.iter())
            .map(|(&(h, w), &part)| LibraryEntry {
                canonical_h: h,
                canonical_w: w,
                ldraw_part_id: String::from(part),
            })
            .collect();
        BrickLibrary { entries }
    }

    /// Builds a library from manifest entries, validating basic invariants.
    pub fn from_entries(entries: Vec<LibraryEntry>) -> Result<Self, LibraryError> {
        if entries.is_empty() {
            return Err(LibraryError::Empty);
        }
        for (index, e) in entries.iter().enumerate() {
            if e.canonical_h == 0 || e.canonical_w == 0 {
                return Err(LibraryError::ZeroDims { index });
            }
            if e.ldraw_part_id.is_empty() {
                return Err(LibraryError::EmptyPartId { index });
            }
            let key = (e.canonical_h.min(e.canonical_w), e.canonical_h.max(e.canonical_w));
            if entries[..index]
                .iter()
                .any(|p| (p.canonical_h.min(p.canonical_w), p.canonical_h.max(p.canonical_w)) == key)
            {
                return Err(LibraryError::Duplicate { index, h: e.canonical_h, w: e.canonical_w });
            }
        }
        Ok(BrickLibrary { entries })
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    /// Looks up a footprint; `rotated` is true when `(h, w)` matches the
    /// entry rotated 90 degrees about the vertical axis.
    pub fn lookup(&self, dims: BrickDims) -> Option<(&LibraryEntry, bool)> {
        for e in &self.entries {
            if dims.h() == e.canonical_h && dims.w() == e.canonical_w {
                return Some((e, false));
            }
            if dims.h() == e.canonical_w && dims.w() == e.canonical_h {
                return Some((e, true));
            }
        }
        None
    }

    pub fn contains(&self, h: u32, w: u32) -> bool {
        self.lookup(BrickDims::new_unchecked(h, w)).is_some()
    }

    /// All oriented footprints in deterministic order: each entry as listed,
    /// then rotated when not square.
    pub fn oriented_dims(&self) -> Vec<BrickDims> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.push(BrickDims::new_unchecked(e.canonical_h, e.canonical_w));
            if e.canonical_h != e.canonical_w {
                out.push(BrickDims::new_unchecked(e.canonical_w, e.canonical_h));
            }
        }
        out
    }
}

impl Default for BrickLibrary {
    fn default() -> Self {
        BrickLibrary::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn grid20() -> GridWorld {
        GridWorld::default()
    }

    #[test]
    fn new_brick_accepts_library_bricks_in_bounds() {
        let b = new_brick(2, 4, 0, 0, 0, &grid20()).unwrap();
        assert_eq!((b.h(), b.w(), b.x, b.y, b.z), (2, 4, 0, 0, 0));
        // max corner
        let b = new_brick(1, 1, 19, 19, 19, &grid20()).unwrap();
        assert_eq!((b.x, b.y, b.z), (19, 19, 19));
    }

    #[test]
    fn new_brick_reports_axis_out_of_bounds() {
        let err = new_brick(2, 4, 19, 0, 0, &grid20()).unwrap_err();
        assert_eq!(err, BrickError::OutOfBounds { axis: Axis::X, extent: 21, limit: 20 });
        let err = new_brick(1, 4, 0, 18, 0, &grid20()).unwrap_err();
        assert_eq!(err, BrickError::OutOfBounds { axis: Axis::Y, extent: 22, limit: 20 });
        let err = new_brick(1, 1, 0, 0, 20, &grid20()).unwrap_err();
        assert_eq!(err, BrickError::OutOfBounds { axis: Axis::Z, extent: 21, limit: 20 });
    }

    #[test]
    fn new_brick_rejects_unknown_dims() {
        let err = new_brick(3, 3, 0, 0, 0, &grid20()).unwrap_err();
        assert_eq!(err, BrickError::DimensionNotInLibrary { h: 3, w: 3 });
        assert!(new_brick(2, 8, 0, 0, 0, &grid20()).is_err());
        assert!(new_brick(0, 1, 0, 0, 0, &grid20()).is_err());
    }

    #[test]
    fn all_fourteen_oriented_pairs_are_members() {
        let lib = BrickLibrary::standard();
        let oriented = lib.oriented_dims();
        assert_eq!(oriented.len(), 14);
        for d in &oriented {
            assert!(BrickDims::new(d.h(), d.w()).is_ok());
        }
    }

    #[test]
    fn voxels_enumerate_footprint() {
        let g = grid20();
        let b = new_brick(1, 1, 0, 0, 0, &g).unwrap();
        assert_eq!(b.voxels().collect::<Vec<_>>(), [(0, 0, 0)]);

        let b = new_brick(2, 2, 3, 4, 5, &g).unwrap();
        let got: BTreeSet<_> = b.voxels().collect();
        let want: BTreeSet<_> = [(3, 4, 5), (4, 4, 5), (3, 5, 5), (4, 5, 5)].into_iter().collect();
        assert_eq!(got, want);

        // h spans X: an 8x1 brick runs along X, a 1x8 brick along Y.
        let b = new_brick(8, 1, 0, 0, 0, &g).unwrap();
        let got: Vec<_> = b.voxels().collect();
        assert_eq!(got.len(), 8);
        assert!(got.iter().all(|&(_, y, z)| y == 0 && z == 0));
        let b = new_brick(1, 8, 0, 0, 0, &g).unwrap();
        assert!(b.voxels().all(|(x, _, z)| x == 0 && z == 0));
    }

    #[test]
    fn voxel_count_equals_area() {
        let g = grid20();
        for d in BrickLibrary::standard().oriented_dims() {
            let b = Brick::new(d, 1, 2, 3, &g).unwrap();
            assert_eq!(b.voxels().count() as u32, d.area());
        }
    }

    #[test]
    fn rotation_changes_voxels_iff_not_square() {
        let g = grid20();
        for d in BrickLibrary::standard().oriented_dims() {
            let a = Brick::new(d, 0, 0, 0, &g).unwrap();
            let b = Brick::new(d.rotated(), 0, 0, 0, &g).unwrap();
            let va: BTreeSet<_> = a.voxels().collect();
            let vb: BTreeSet<_> = b.voxels().collect();
            assert_eq!(va == vb, d.is_square());
        }
    }

    #[test]
    fn library_lookup_resolves_rotation() {
        let lib = BrickLibrary::standard();
        let (e, rot) = lib.lookup(BrickDims::new(2, 4).unwrap()).unwrap();
        assert_eq!((e.ldraw_part_id.as_str(), rot), ("3001", false));
        let (e, rot) = lib.lookup(BrickDims::new(4, 2).unwrap()).unwrap();
        assert_eq!((e.ldraw_part_id.as_str(), rot), ("3001", true));
        assert!(lib.lookup(BrickDims::new_unchecked(3, 3)).is_none());
    }

    #[test]
    fn library_manifest_validation() {
        let ok = LibraryEntry { canonical_h: 1, canonical_w: 3, ldraw_part_id: "3622".into() };
        let lib = BrickLibrary::from_entries(alloc::vec![ok.clone()]).unwrap();
        assert!(lib.contains(3, 1));
        assert!(matches!(
            BrickLibrary::from_entries(alloc::vec![]),
            Err(LibraryError::Empty)
        ));
        assert!(matches!(
            BrickLibrary::from_entries(alloc::vec![ok.clone(), ok.clone()]),
            Err(LibraryError::Duplicate { .. })
        ));
        let zero = LibraryEntry { canonical_h: 0, canonical_w: 1, ldraw_part_id: "x".into() };
        assert!(matches!(
            BrickLibrary::from_entries(alloc::vec![zero]),
            Err(LibraryError::ZeroDims { .. })
        ));
    }

    #[test]
    fn raster_sort_orders_bottom_up_then_rows() {
        let g = grid20();
        let mut s = BrickStructure::new(g);
        s.push(new_brick(1, 1, 5, 5, 1, &g).unwrap());
        s.push(new_brick(1, 1, 3, 0, 0, &g).unwrap());
        s.push(new_brick(1, 1, 0, 0, 0, &g).unwrap());
        s.sort_raster();
        let keys: Vec<_> = s.bricks.iter().map(|b| (b.z, b.y, b.x)).collect();
        assert_eq!(keys, [(0, 0, 0), (0, 0, 3), (1, 5, 5)]);
    }
}
