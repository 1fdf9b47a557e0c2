//! Uniform brick color assignment from a texture image.
//!
//! Every visible voxel face owns a square cell in a generated atlas. Colors
//! aggregate by plain means: face color over its atlas cell, voxel color
//! over its visible faces, brick color over its voxels that have visible
//! faces. Fully occluded bricks keep a sentinel "inherit default" color —
//! they are also the bricks a texturing pipeline may drop entirely. The
//! final palette snap picks the nearest entry in CIELAB space.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::brick::BrickStructure;
use crate::geometry::{self, GeometryError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColorOptions {
    /// Treat the baseplate as covering bottom faces at `z = 0`.
    pub baseplate_covers_bottom: bool,
    /// Pixel size of one face cell in the atlas.
    pub cell_size: u32,
}

impl Default for ColorOptions {
    fn default() -> Self {
        ColorOptions { baseplate_covers_bottom: true, cell_size: 16 }
    }
}

/// Face directions in fixed atlas order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceDir {
    XNeg,
    XPos,
    YNeg,
    YPos,
    ZNeg,
    ZPos,
}

impl FaceDir {
    pub const ALL: [FaceDir; 6] =
        [FaceDir::XNeg, FaceDir::XPos, FaceDir::YNeg, FaceDir::YPos, FaceDir::ZNeg, FaceDir::ZPos];

    pub fn offset(self) -> (i64, i64, i64) {
        match self {
            FaceDir::XNeg => (-1, 0, 0),
            FaceDir::XPos => (1, 0, 0),
            FaceDir::YNeg => (0, -1, 0),
            FaceDir::YPos => (0, 1, 0),
            FaceDir::ZNeg => (0, 0, -1),
            FaceDir::ZPos => (0, 0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ColorError {
    #[error("texture is {got_w}x{got_h} but the atlas needs {want_w}x{want_h}")]
    DimensionMismatch { got_w: u32, got_h: u32, want_w: u32, want_h: u32 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Bricks whose entire cuboid boundary abuts occupied cells. The baseplate
/// does not count as cover, so ground-layer bricks are never occluded.
pub fn occluded_bricks(s: &BrickStructure) -> Result<Vec<usize>, GeometryError> {
    let occ = geometry::occupancy_grid(s)?;
    let mut out = Vec::new();
    'bricks: for (i, b) in s.bricks.iter().enumerate() {
        for (x, y, z) in b.voxels() {
            for dir in FaceDir::ALL {
                let (dx, dy, dz) = dir.offset();
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                let nz = z as i64 + dz;
                // Faces interior to the brick's own cuboid are not boundary.
                let inside_self = nx >= b.x as i64
                    && nx < (b.x + b.h()) as i64
                    && ny >= b.y as i64
                    && ny < (b.y + b.w()) as i64
                    && nz == b.z as i64;
                if inside_self {
                    continue;
                }
                let covered = nx >= 0
                    && ny >= 0
                    && nz >= 0
                    && geometry_get(&occ, nx, ny, nz);
                if !covered {
                    continue 'bricks;
                }
            }
        }
        out.push(i);
    }
    Ok(out)
}

fn geometry_get(g: &geometry::VoxelGrid, x: i64, y: i64, z: i64) -> bool {
    let (h, w, d) = g.dims();
    x >= 0
        && y >= 0
        && z >= 0
        && (x as u32) < h
        && (y as u32) < w
        && (z as u32) < d
        && g.get(x as u32, y as u32, z as u32)
}

/// Visible faces per occupied voxel, in raster order. A face is visible when
/// the adjacent cell is unoccupied and inside or above the grid; faces on
/// the lateral grid boundary are treated as hidden, and bottom faces at
/// `z = 0` follow [`ColorOptions::baseplate_covers_bottom`].
pub fn visible_faces(
    s: &BrickStructure,
    opts: &ColorOptions,
) -> Result<Vec<((u32, u32, u32), Vec<FaceDir>)>, GeometryError> {
    let occ = geometry::occupancy_grid(s)?;
    let (h, w, d) = occ.dims();
    let mut out = Vec::new();
    for (x, y, z) in occ.iter_occupied() {
        let mut faces = Vec::new();
        for dir in FaceDir::ALL {
            let (dx, dy, dz) = dir.offset();
            let nx = x as i64 + dx;
            let ny = y as i64 + dy;
            let nz = z as i64 + dz;
            let visible = if nx < 0 || ny < 0 || nx >= h as i64 || ny >= w as i64 {
                false
            } else if nz < 0 {
                !opts.baseplate_covers_bottom
            } else if nz >= d as i64 {
                true
            } else {
                !occ.get(nx as u32, ny as u32, nz as u32)
            };
            if visible {
                faces.push(dir);
            }
        }
        out.push(((x, y, z), faces));
    }
    Ok(out)
}

/// One face's pixel region in the atlas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRegion {
    pub voxel: (u32, u32, u32),
    pub face: FaceDir,
    pub x0: u32,
    pub y0: u32,
}

/// A packed atlas of square cells, one per visible face. Layout depends only
/// on the covered voxel set, not on how bricks partition it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceAtlas {
    pub cell_size: u32,
    pub width: u32,
    pub height: u32,
    pub faces: Vec<FaceRegion>,
}

impl FaceAtlas {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
}

/// Packs every visible face into a near-square atlas, row-major in
/// (voxel raster order, face order).
pub fn build_face_atlas(s: &BrickStructure, opts: &ColorOptions) -> Result<FaceAtlas, GeometryError> {
    let per_voxel = visible_faces(s, opts)?;
    let total: usize = per_voxel.iter().map(|(_, f)| f.len()).sum();
    if total == 0 {
        return Ok(FaceAtlas { cell_size: opts.cell_size, width: 0, height: 0, faces: Vec::new() });
    }
    let cols = int_sqrt_ceil(total);
    let rows = total.div_ceil(cols);
    let mut faces = Vec::with_capacity(total);
    let mut i = 0usize;
    for (voxel, dirs) in per_voxel {
        for face in dirs {
            let col = (i % cols) as u32;
            let row = (i / cols) as u32;
            faces.push(FaceRegion {
                voxel,
                face,
                x0: col * opts.cell_size,
                y0: row * opts.cell_size,
            });
            i += 1;
        }
    }
    Ok(FaceAtlas {
        cell_size: opts.cell_size,
        width: cols as u32 * opts.cell_size,
        height: rows as u32 * opts.cell_size,
        faces,
    })
}

fn int_sqrt_ceil(n: usize) -> usize {
    let mut r = 1usize;
    while r * r < n {
        r += 1;
    }
    r
}

/// An sRGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<[f64; 3]>,
}

impl TextureImage {
    pub fn solid(width: u32, height: u32, rgb: [f64; 3]) -> Self {
        TextureImage { width, height, pixels: alloc::vec![rgb; (width * height) as usize] }
    }

    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [f64; 3]) {
        self.pixels[(y * self.width + x) as usize] = rgb;
    }
}

/// A brick's aggregated color, or the sentinel for fully occluded bricks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BrickColor {
    Rgb([f64; 3]),
    InheritDefault,
}

/// Aggregates texture colors down to one color per brick.
pub fn aggregate_colors(
    s: &BrickStructure,
    texture: &TextureImage,
    atlas: &FaceAtlas,
) -> Result<Vec<BrickColor>, ColorError> {
    if (texture.width, texture.height) != (atlas.width, atlas.height) {
        return Err(ColorError::DimensionMismatch {
            got_w: texture.width,
            got_h: texture.height,
            want_w: atlas.width,
            want_h: atlas.height,
        });
    }
    // Voxel color = mean over its visible faces' cell means.
    let mut voxel_acc: BTreeMap<(u32, u32, u32), ([f64; 3], usize)> = BTreeMap::new();
    let c = atlas.cell_size;
    for region in &atlas.faces {
        let mut sum = [0.0; 3];
        for dy in 0..c {
            for dx in 0..c {
                let p = texture.get(region.x0 + dx, region.y0 + dy);
                for k in 0..3 {
                    sum[k] += p[k];
                }
            }
        }
        let n = (c * c) as f64;
        let face_color = [sum[0] / n, sum[1] / n, sum[2] / n];
        let acc = voxel_acc.entry(region.voxel).or_insert(([0.0; 3], 0));
        for k in 0..3 {
            acc.0[k] += face_color[k];
        }
        acc.1 += 1;
    }

    let mut out = Vec::with_capacity(s.len());
    for b in &s.bricks {
        let mut sum = [0.0; 3];
        let mut n = 0usize;
        for v in b.voxels() {
            if let Some((acc, count)) = voxel_acc.get(&v) {
                for k in 0..3 {
                    sum[k] += acc[k] / *count as f64;
                }
                n += 1;
            }
        }
        if n == 0 {
            out.push(BrickColor::InheritDefault);
        } else {
            out.push(BrickColor::Rgb([sum[0] / n as f64, sum[1] / n as f64, sum[2] / n as f64]));
        }
    }
    Ok(out)
}

/// One palette color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub id: u32,
    pub name: String,
    pub rgb: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PaletteError {
    #[error("palette is empty")]
    Empty,
    #[error("palette entry {index} duplicates id {id}")]
    DuplicateId { index: usize, id: u32 },
}

/// A color library with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

impl Palette {
    pub fn new(entries: Vec<PaletteEntry>) -> Result<Self, PaletteError> {
        if entries.is_empty() {
            return Err(PaletteError::Empty);
        }
        for (index, e) in entries.iter().enumerate() {
            if entries[..index].iter().any(|p| p.id == e.id) {
                return Err(PaletteError::DuplicateId { index, id: e.id });
            }
        }
        Ok(Palette { entries })
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }
}

/// sRGB (0..1) to CIELAB under the D65 white point.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    fn linearize(c: f64) -> f64 {
        if c <= 0.04045 {
            c / 12.92
        } else {
            libm::pow((c + 0.055) / 1.055, 2.4)
        }
    }
    let r = linearize(rgb[0]);
    let g = linearize(rgb[1]);
    let b = linearize(rgb[2]);
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let (xn, yn, zn) = (0.95047, 1.0, 1.08883);
    fn f(t: f64) -> f64 {
        const DELTA3: f64 = 216.0 / 24389.0; // (6/29)^3
        if t > DELTA3 {
            libm::cbrt(t)
        } else {
            t * (841.0 / 108.0) + 4.0 / 29.0
        }
    }
    let fx = f(x / xn);
    let fy = f(y / yn);
    let fz = f(z / zn);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

fn lab_dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Nearest palette entry under CIELAB Euclidean distance; exact ties go to
/// the lowest id.
pub fn snap_to_palette(rgb: [f64; 3], palette: &Palette) -> &PaletteEntry {
    let lab = srgb_to_lab(rgb);
    let mut best: Option<(&PaletteEntry, f64)> = None;
    for e in &palette.entries {
        let elab = srgb_to_lab([
            e.rgb[0] as f64 / 255.0,
            e.rgb[1] as f64 / 255.0,
            e.rgb[2] as f64 / 255.0,
        ]);
        let d = lab_dist2(lab, elab);
        let better = match best {
            None => true,
            Some((be, bd)) => d < bd || (d == bd && e.id < be.id),
        };
        if better {
            best = Some((e, d));
        }
    }
    best.expect("palette is non-empty").0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick::{new_brick, GridWorld};

    fn structure(bricks: &[(u32, u32, u32, u32, u32)]) -> BrickStructure {
        let g = GridWorld::default();
        BrickStructure::with_bricks(
            g,
            bricks.iter().map(|&(h, w, x, y, z)| new_brick(h, w, x, y, z, &g).unwrap()).collect(),
        )
    }

    fn opts() -> ColorOptions {
        ColorOptions::default()
    }

    #[test]
    fn center_of_solid_block_is_occluded() {
        // 3x3x3 block of 1x1 bricks; only the center brick is fully covered.
        let mut bricks = Vec::new();
        for z in 0..3 {
            for y in 5..8 {
                for x in 5..8 {
                    bricks.push((1, 1, x, y, z));
                }
            }
        }
        let s = structure(&bricks);
        let occluded = occluded_bricks(&s).unwrap();
        // Center of the block: (6,6,1) — also z=0 bricks are never occluded
        // because the baseplate does not count as cover.
        let center = s.bricks.iter().position(|b| (b.x, b.y, b.z) == (6, 6, 1)).unwrap();
        assert_eq!(occluded, alloc::vec![center]);
        // Visible set complement covers all exposed faces.
        let faces = visible_faces(&s, &opts()).unwrap();
        let exposed: usize = faces.iter().map(|(_, f)| f.len()).sum();
        assert!(exposed > 0);
        for ((x, y, z), dirs) in &faces {
            if (x, y, z) == (&6, &6, &1) {
                assert!(dirs.is_empty());
            }
        }
    }

    #[test]
    fn face_visibility_counts() {
        // Isolated cell above ground: all six faces.
        let s = structure(&[(1, 1, 5, 5, 1)]);
        let faces = visible_faces(&s, &opts()).unwrap();
        assert_eq!(faces[0].1.len(), 6);

        // On the baseplate: five.
        let s = structure(&[(1, 1, 5, 5, 0)]);
        let faces = visible_faces(&s, &opts()).unwrap();
        assert_eq!(faces[0].1.len(), 5);
        assert!(!faces[0].1.contains(&FaceDir::ZNeg));

        // Toggle: bottom face counts when the baseplate is not a cover.
        let mut o = opts();
        o.baseplate_covers_bottom = false;
        let faces = visible_faces(&s, &o).unwrap();
        assert_eq!(faces[0].1.len(), 6);
    }

    #[test]
    fn lateral_grid_boundary_hides_faces() {
        let s = structure(&[(1, 1, 0, 0, 1)]);
        let faces = visible_faces(&s, &opts()).unwrap();
        let dirs = &faces[0].1;
        assert!(!dirs.contains(&FaceDir::XNeg));
        assert!(!dirs.contains(&FaceDir::YNeg));
        assert!(dirs.contains(&FaceDir::ZPos));
        assert_eq!(dirs.len(), 4);
    }

    #[test]
    fn atlas_layout_is_keyed_on_voxels_not_bricks() {
        // Same covered cells, different brick partitions.
        let a = structure(&[(1, 2, 5, 5, 0)]);
        let b = structure(&[(1, 1, 5, 5, 0), (1, 1, 5, 6, 0)]);
        let atlas_a = build_face_atlas(&a, &opts()).unwrap();
        let atlas_b = build_face_atlas(&b, &opts()).unwrap();
        assert_eq!(atlas_a, atlas_b);

        // One isolated voxel: six cells.
        let s = structure(&[(1, 1, 5, 5, 1)]);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        assert_eq!(atlas.face_count(), 6);

        // Empty structure: empty atlas.
        let empty = BrickStructure::new(GridWorld::default());
        assert_eq!(build_face_atlas(&empty, &opts()).unwrap().face_count(), 0);
    }

    #[test]
    fn uniform_texture_colors_every_visible_brick() {
        let s = structure(&[(2, 4, 4, 4, 0), (2, 2, 4, 4, 1)]);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        let red = [1.0, 0.0, 0.0];
        let tex = TextureImage::solid(atlas.width, atlas.height, red);
        let colors = aggregate_colors(&s, &tex, &atlas).unwrap();
        for c in &colors {
            assert_eq!(*c, BrickColor::Rgb(red));
        }
    }

    #[test]
    fn half_and_half_texture_splits_bricks() {
        let s = structure(&[(1, 1, 5, 5, 0), (1, 1, 5, 6, 0)]);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        let mut tex = TextureImage::solid(atlas.width, atlas.height, [0.0; 3]);
        // Paint all regions belonging to the second voxel white.
        for region in &atlas.faces {
            if region.voxel == (5, 6, 0) {
                for dy in 0..atlas.cell_size {
                    for dx in 0..atlas.cell_size {
                        tex.set(region.x0 + dx, region.y0 + dy, [1.0; 3]);
                    }
                }
            }
        }
        let colors = aggregate_colors(&s, &tex, &atlas).unwrap();
        assert_eq!(colors[0], BrickColor::Rgb([0.0; 3]));
        assert_eq!(colors[1], BrickColor::Rgb([1.0; 3]));
    }

    #[test]
    fn occluded_bricks_take_the_sentinel() {
        let mut bricks = Vec::new();
        for z in 0..3 {
            for y in 5..8 {
                for x in 5..8 {
                    bricks.push((1, 1, x, y, z));
                }
            }
        }
        let s = structure(&bricks);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        let tex = TextureImage::solid(atlas.width, atlas.height, [0.5; 3]);
        let colors = aggregate_colors(&s, &tex, &atlas).unwrap();
        let center = s.bricks.iter().position(|b| (b.x, b.y, b.z) == (6, 6, 1)).unwrap();
        assert_eq!(colors[center], BrickColor::InheritDefault);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = structure(&[(1, 1, 5, 5, 0)]);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        let tex = TextureImage::solid(atlas.width + 1, atlas.height, [0.0; 3]);
        assert!(matches!(
            aggregate_colors(&s, &tex, &atlas),
            Err(ColorError::DimensionMismatch { .. })
        ));
    }

    fn small_palette() -> Palette {
        Palette::new(alloc::vec![
            PaletteEntry { id: 0, name: "black".into(), rgb: [5, 19, 29] },
            PaletteEntry { id: 4, name: "red".into(), rgb: [201, 26, 9] },
            PaletteEntry { id: 15, name: "white".into(), rgb: [255, 255, 255] },
            PaletteEntry { id: 72, name: "dark_gray".into(), rgb: [108, 110, 104] },
        ])
        .unwrap()
    }

    #[test]
    fn snap_identity_and_idempotence() {
        let p = small_palette();
        for e in p.entries() {
            let rgb = [
                e.rgb[0] as f64 / 255.0,
                e.rgb[1] as f64 / 255.0,
                e.rgb[2] as f64 / 255.0,
            ];
            let snapped = snap_to_palette(rgb, &p);
            assert_eq!(snapped.id, e.id, "palette color must snap to itself");
            // Idempotence.
            let rgb2 = [
                snapped.rgb[0] as f64 / 255.0,
                snapped.rgb[1] as f64 / 255.0,
                snapped.rgb[2] as f64 / 255.0,
            ];
            assert_eq!(snap_to_palette(rgb2, &p).id, e.id);
        }
    }

    #[test]
    fn black_is_closer_to_dark_gray_than_white() {
        let p = Palette::new(alloc::vec![
            PaletteEntry { id: 15, name: "white".into(), rgb: [255, 255, 255] },
            PaletteEntry { id: 72, name: "dark_gray".into(), rgb: [108, 110, 104] },
        ])
        .unwrap();
        assert_eq!(snap_to_palette([0.0; 3], &p).id, 72);
    }

    #[test]
    fn ties_break_to_the_lowest_id() {
        let p = Palette::new(alloc::vec![
            PaletteEntry { id: 9, name: "a".into(), rgb: [100, 100, 100] },
            PaletteEntry { id: 3, name: "b".into(), rgb: [100, 100, 100] },
        ])
        .unwrap();
        assert_eq!(snap_to_palette([0.4, 0.4, 0.4], &p).id, 3);
    }

    #[test]
    fn palette_validation() {
        assert!(matches!(Palette::new(alloc::vec![]), Err(PaletteError::Empty)));
        let dup = alloc::vec![
            PaletteEntry { id: 1, name: "a".into(), rgb: [0; 3] },
            PaletteEntry { id: 1, name: "b".into(), rgb: [1; 3] },
        ];
        assert!(matches!(Palette::new(dup), Err(PaletteError::DuplicateId { index: 1, id: 1 })));
    }

    #[test]
    fn monochrome_texture_snaps_to_one_entry() {
        let s = structure(&[(2, 4, 4, 4, 0), (1, 2, 4, 4, 1), (2, 2, 10, 10, 0)]);
        let atlas = build_face_atlas(&s, &opts()).unwrap();
        let tex = TextureImage::solid(atlas.width, atlas.height, [0.8, 0.1, 0.05]);
        let colors = aggregate_colors(&s, &tex, &atlas).unwrap();
        let p = small_palette();
        let mut ids = alloc::collections::BTreeSet::new();
        for c in colors {
            if let BrickColor::Rgb(rgb) = c {
                ids.insert(snap_to_palette(rgb, &p).id);
            }
        }
        assert_eq!(ids.len(), 1);
    }
}
