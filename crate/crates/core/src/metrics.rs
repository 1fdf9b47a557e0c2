//! Evaluation metrics over generated structures and voxel-space novelty
//! search.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::brick::BrickStructure;
use crate::chamfer::{self, ChamferError};
use crate::geometry::{self, GeometryError, VoxelGrid};

/// One evaluated item: either invalid (bad format, out-of-library,
/// out-of-bounds, or colliding bricks) or valid with per-brick scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EvalResult {
    Invalid,
    Valid { scores: Vec<f64> },
}

impl EvalResult {
    fn is_valid(&self) -> bool {
        matches!(self, EvalResult::Valid { .. })
    }

    fn is_stable(&self) -> bool {
        match self {
            EvalResult::Invalid => false,
            EvalResult::Valid { scores } => scores.iter().all(|s| *s > 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("metrics need at least one result")]
    EmptyInput,
}

/// Aggregate metrics. Percentages are over all items; the per-structure
/// stability statistics average over valid structures only (and skip valid
/// structures with zero bricks, which have no scores to average). Both
/// stable denominators are emitted: `pct_stable` is over all items,
/// `pct_stable_of_valid` over the valid ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub total: usize,
    pub valid: usize,
    pub stable: usize,
    pub pct_valid: f64,
    pub pct_stable: f64,
    pub pct_stable_of_valid: f64,
    /// Mean over valid structures of the per-structure mean score.
    pub mean_stability: Option<f64>,
    /// Mean over valid structures of the per-structure minimum score.
    pub min_stability: Option<f64>,
}

pub fn compute_metrics(results: &[EvalResult]) -> Result<MetricsReport, MetricsError> {
    if results.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let total = results.len();
    let valid = results.iter().filter(|r| r.is_valid()).count();
    let stable = results.iter().filter(|r| r.is_stable()).count();

    let mut mean_sum = 0.0;
    let mut min_sum = 0.0;
    let mut scored = 0usize;
    for r in results {
        if let EvalResult::Valid { scores } = r {
            if scores.is_empty() {
                continue;
            }
            let mean: f64 = scores.iter().sum::<f64>() / scores.len() as f64;
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            mean_sum += mean;
            min_sum += min;
            scored += 1;
        }
    }

    Ok(MetricsReport {
        total,
        valid,
        stable,
        pct_valid: 100.0 * valid as f64 / total as f64,
        pct_stable: 100.0 * stable as f64 / total as f64,
        pct_stable_of_valid: if valid == 0 { 0.0 } else { 100.0 * stable as f64 / valid as f64 },
        mean_stability: (scored > 0).then(|| mean_sum / scored as f64),
        min_stability: (scored > 0).then(|| min_sum / scored as f64),
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NoveltyError {
    #[error("the reference set is empty")]
    EmptyTrainSet,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Chamfer(#[from] ChamferError),
}

/// Exact nearest neighbor of a query structure over a reference set of
/// `(record id, occupancy grid)` pairs, by Chamfer distance in voxel space.
/// Distance ties break to the lexicographically smallest id.
pub fn novelty_report<'a>(
    query: &BrickStructure,
    train: &'a [(String, VoxelGrid)],
) -> Result<(&'a str, f64), NoveltyError> {
    if train.is_empty() {
        return Err(NoveltyError::EmptyTrainSet);
    }
    let query_grid = geometry::occupancy_grid(query)?;
    let mut best: Option<(&str, f64)> = None;
    for (id, grid) in train {
        let d = chamfer::chamfer_distance(&query_grid, grid)?;
        let better = match best {
            None => true,
            Some((bid, bd)) => d < bd || (d == bd && id.as_str() < bid),
        };
        if better {
            best = Some((id.as_str(), d));
        }
    }
    Ok(best.expect("train set is non-empty"))
}
