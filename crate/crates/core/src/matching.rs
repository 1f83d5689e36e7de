//! Radius-bounded nearest-node matching between feature point clouds.
//!
//! A node of one cloud is *matched* when its nearest node in the other
//! cloud lies within the matching radius (inclusive). Matching is
//! many-to-one: several nodes may share the same nearest counterpart. The
//! result is the four counts the scoring formulas consume.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::features::TopoFeature;

/// Matching configuration: the acceptance radius in metric units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub radius: f64,
}

impl MatchConfig {
    pub fn new(radius: f64) -> Self {
        MatchConfig { radius }
    }

    pub fn is_valid(&self) -> bool {
        self.radius.is_finite() && self.radius > 0.0
    }
}

impl Default for MatchConfig {
    /// Matching radius of 10 voxels.
    fn default() -> Self {
        MatchConfig { radius: 10.0 }
    }
}

/// Matched/unmatched node counts for one (ground truth, prediction) feature
/// pair. `tp_gt + fn_gt` is the ground-truth node count; `tp_pred + fp_pred`
/// is the prediction node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    /// Ground-truth nodes with a prediction node within the radius.
    pub tp_gt: usize,
    /// Ground-truth nodes with no prediction node in range (false negatives).
    pub fn_gt: usize,
    /// Prediction nodes with a ground-truth node within the radius.
    pub tp_pred: usize,
    /// Prediction nodes with no ground-truth node in range (false positives).
    pub fp_pred: usize,
}

impl MatchCounts {
    /// The same matching viewed from the other side: ground truth and
    /// prediction exchange roles.
    pub fn swapped(self) -> MatchCounts {
        MatchCounts {
            tp_gt: self.tp_pred,
            fn_gt: self.fp_pred,
            tp_pred: self.tp_gt,
            fp_pred: self.fn_gt,
        }
    }
}

/// Uniform grid over a point cloud with cell edge = radius, so any point
/// within `radius` of a query lies in one of the 27 cells around the
/// query's cell. Exact (no approximation): only the within-radius predicate
/// is needed, not the nearest neighbor itself.
struct RadiusGrid<'a> {
    cells: HashMap<[i64; 3], Vec<usize>>,
    points: &'a [[f64; 3]],
    radius: f64,
}

impl<'a> RadiusGrid<'a> {
    fn build(points: &'a [[f64; 3]], radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::cell(p, radius)).or_default().push(i);
        }
        RadiusGrid {
            cells,
            points,
            radius,
        }
    }

    fn cell(p: &[f64; 3], radius: f64) -> [i64; 3] {
        [
            (p[0] / radius).floor() as i64,
            (p[1] / radius).floor() as i64,
            (p[2] / radius).floor() as i64,
        ]
    }

    /// Whether any stored point lies within `radius` of `q` (inclusive).
    fn has_point_within_radius(&self, q: &[f64; 3]) -> bool {
        let c = Self::cell(q, self.radius);
        let r2 = self.radius * self.radius;
        for dz in -1..=1 {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let key = [c[0] + dx, c[1] + dy, c[2] + dz];
                    let Some(bucket) = self.cells.get(&key) else {
                        continue;
                    };
                    for &i in bucket {
                        let p = self.points[i];
                        let d2 = (p[0] - q[0]).powi(2)
                            + (p[1] - q[1]).powi(2)
                            + (p[2] - q[2]).powi(2);
                        if d2 <= r2 {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Match two raw point clouds within `radius`.
pub fn match_point_clouds(gt: &[[f64; 3]], pred: &[[f64; 3]], radius: f64) -> MatchCounts {
    let gt_grid = RadiusGrid::build(gt, radius);
    let pred_grid = RadiusGrid::build(pred, radius);
    let tp_gt = gt
        .iter()
        .filter(|p| pred_grid.has_point_within_radius(p))
        .count();
    let tp_pred = pred
        .iter()
        .filter(|p| gt_grid.has_point_within_radius(p))
        .count();
    MatchCounts {
        tp_gt,
        fn_gt: gt.len() - tp_gt,
        tp_pred,
        fp_pred: pred.len() - tp_pred,
    }
}

/// Match the node clouds of two features.
pub fn match_features(gt: &TopoFeature, pred: &TopoFeature, cfg: &MatchConfig) -> MatchCounts {
    match_point_clouds(&gt.positions(), &pred.positions(), cfg.radius)
}
