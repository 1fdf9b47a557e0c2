//! Core engine for interlocking toy-brick structures.
//!
//! The crate models brick structures on a fixed baseplate inside a discrete
//! grid world and provides everything needed to reason about them offline:
//!
//! - [`brick`]: domain types — brick footprints, the brick library, the grid
//!   world, and ordered brick structures.
//! - [`text`]: the compact one-brick-per-line text format, instruction prompt
//!   construction, and LDraw export.
//! - [`geometry`]: voxel occupancy, validity checking, stud connections, and
//!   connected components.
//! - [`voxelize`]: solid voxelization of triangle meshes onto the grid.
//! - [`chamfer`]: Chamfer distance between voxel grids.
//! - [`stability`]: the static-equilibrium force model, the bundled LP
//!   solver, and per-brick stability scores.
//! - [`legolize`]: voxels-to-bricks conversion with greedy fill and
//!   delete-and-rebuild repair.
//! - [`generate`]: autoregressive brick generation with rejection sampling
//!   and physics-aware rollback over a pluggable generator.
//! - [`color`]: face visibility, atlas construction, and uniform brick color
//!   assignment from a texture image.
//! - [`metrics`]: evaluation metrics and nearest-neighbor novelty search.
//! - [`corpus`]: a bundled set of procedural voxel shapes used by tests and
//!   the command-line demo.
//!
//! All types are plain immutable values; nothing in this crate performs IO.
//! The crate is `no_std`-compatible (with `alloc`) when built without the
//! default `std` feature; `std` only adds wall-clock timings and
//! `std::error::Error` integration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod brick;
pub mod chamfer;
pub mod color;
pub mod corpus;
pub mod generate;
pub mod geometry;
pub mod legolize;
pub mod metrics;
pub mod stability;
pub mod text;
pub mod voxelize;

pub use brick::{new_brick, Axis, Brick, BrickDims, BrickError, BrickLibrary, BrickStructure, GridWorld};
pub use geometry::VoxelGrid;
pub use stability::{PhysicalParams, StabilityReport};
