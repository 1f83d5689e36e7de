//! The scoring core: point-cloud IoU, thresholded score matrices, clipped
//! row/column aggregation, and the final topology score.
//!
//! The point-cloud IoU normalizes each side's counts by that side's cloud
//! size before combining them, which makes the value independent of node
//! density: doubling every node of one cloud scales its numerator and
//! denominator terms together. The naive pooled ratio, kept here as a foil,
//! does not have that property.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{decompose, FeatureKind, TopoFeature};
use crate::matching::{match_features, MatchConfig, MatchCounts};
use crate::skeleton::SkeletonGraph;

/// Full scoring configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Matrix entries strictly below this become 0.
    pub t_low: f64,
    /// Matrix entries strictly above this become 1.
    pub t_high: f64,
    pub matching: MatchConfig,
    /// Skeleton components with fewer nodes than this are ignored.
    pub min_component_size: usize,
}

impl Default for ScoreConfig {
    /// The reference configuration: matching radius 10, thresholds 0.3 and
    /// 0.7, minimum component size 5.
    fn default() -> Self {
        ScoreConfig {
            t_low: 0.3,
            t_high: 0.7,
            matching: MatchConfig::default(),
            min_component_size: 5,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_low.is_finite() && self.t_high.is_finite()) {
            return Err(Error::invalid("thresholds must be finite"));
        }
        if !(0.0 <= self.t_low && self.t_low < self.t_high && self.t_high <= 1.0) {
            return Err(Error::invalid(format!(
                "need 0 <= t_low < t_high <= 1, got t_low={}, t_high={}",
                self.t_low, self.t_high
            )));
        }
        if !self.matching.is_valid() {
            return Err(Error::invalid(format!(
                "matching radius must be positive and finite, got {}",
                self.matching.radius
            )));
        }
        if self.min_component_size == 0 {
            return Err(Error::invalid("min_component_size must be at least 1"));
        }
        Ok(())
    }
}

/// Density-robust overlap of two matched point clouds, in [0, 1].
///
/// With g = tp_gt + fn_gt and p = tp_pred + fp_pred:
///
/// ```text
///         tp_gt/g + tp_pred/p
/// ---------------------------------------
/// (tp_gt + 2 fn_gt)/g + (tp_pred + 2 fp_pred)/p
/// ```
///
/// Perfect matching gives exactly 1, zero matching exactly 0. Symmetric
/// under exchanging the two sides, bit-for-bit.
pub fn point_cloud_iou(c: MatchCounts) -> Result<f64> {
    let g = c.tp_gt + c.fn_gt;
    let p = c.tp_pred + c.fp_pred;
    if g == 0 {
        return Err(Error::EmptyFeature { side: "ground truth" });
    }
    if p == 0 {
        return Err(Error::EmptyFeature { side: "prediction" });
    }
    let (g, p) = (g as f64, p as f64);
    let num = c.tp_gt as f64 / g + c.tp_pred as f64 / p;
    let den = (c.tp_gt + 2 * c.fn_gt) as f64 / g + (c.tp_pred + 2 * c.fp_pred) as f64 / p;
    Ok(num / den)
}

/// The pooled-count overlap ratio: (TP_gt + TP_pred) over the same plus
/// twice the mismatches. Sensitive to node density; kept for comparison
/// against [`point_cloud_iou`].
pub fn naive_iou(c: MatchCounts) -> Result<f64> {
    let tp = c.tp_gt + c.tp_pred;
    let total = tp + 2 * (c.fp_pred + c.fn_gt);
    if total == 0 {
        return Err(Error::ZeroCounts);
    }
    Ok(tp as f64 / total as f64)
}

/// Soft thresholding: values strictly below `t_low` become 0, strictly
/// above `t_high` become 1, anything else passes through.
pub fn threshold_value(x: f64, t_low: f64, t_high: f64) -> f64 {
    if x < t_low {
        0.0
    } else if x > t_high {
        1.0
    } else {
        x
    }
}

/// Thresholded pairwise score matrix for one feature kind, with clipped
/// per-row (ground truth) and per-column (prediction) aggregate scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub kind: FeatureKind,
    /// Rows are ground-truth features, columns prediction features.
    pub entries: Vec<Vec<f64>>,
    /// Per ground-truth feature: min(1, row sum). Recall analog.
    pub gt_scores: Vec<f64>,
    /// Per prediction feature: min(1, column sum). Precision analog.
    pub pred_scores: Vec<f64>,
}

/// Build the thresholded score matrix between two feature lists of the same
/// kind. Rows follow `gt`, columns follow `pred`, in their given order.
pub fn build_score_matrix(
    gt: &[TopoFeature],
    pred: &[TopoFeature],
    kind: FeatureKind,
    cfg: &ScoreConfig,
) -> ScoreMatrix {
    let entries: Vec<Vec<f64>> = gt
        .par_iter()
        .map(|gf| {
            pred.iter()
                .map(|pf| {
                    let iou = point_cloud_iou(match_features(gf, pf, &cfg.matching))
                        .expect("extracted features are never empty");
                    threshold_value(iou, cfg.t_low, cfg.t_high)
                })
                .collect()
        })
        .collect();
    let gt_scores: Vec<f64> = entries
        .iter()
        .map(|row| row.iter().sum::<f64>().min(1.0))
        .collect();
    let pred_scores: Vec<f64> = (0..pred.len())
        .map(|j| entries.iter().map(|row| row[j]).sum::<f64>().min(1.0))
        .collect();
    ScoreMatrix {
        kind,
        entries,
        gt_scores,
        pred_scores,
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Aggregate one score matrix into a single value in [0, 1].
///
/// With features on both sides this is the mean of the two clipped-mean
/// scores. With features on neither side the structures agree trivially and
/// the score is 1. With features on exactly one side, every one of those
/// k features is an error and the score is 1/(1+k).
pub fn score_side(m: &ScoreMatrix) -> f64 {
    let n_gt = m.gt_scores.len();
    let n_pred = m.pred_scores.len();
    match (n_gt, n_pred) {
        (0, 0) => 1.0,
        (0, k) | (k, 0) => 1.0 / (1.0 + k as f64),
        _ => (mean(&m.gt_scores) + mean(&m.pred_scores)) / 2.0,
    }
}

/// Feature counts on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoCounts {
    pub gt_components: usize,
    pub gt_loops: usize,
    pub pred_components: usize,
    pub pred_loops: usize,
}

/// Complete scoring result: the final score, its two halves, all diagnostic
/// matrices and counts, and the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoReport {
    pub topology_score: f64,
    pub loop_score: f64,
    pub component_score: f64,
    /// Standard voxel IoU, when the inputs came from volumes.
    pub voxel_iou: Option<f64>,
    pub counts: TopoCounts,
    pub loop_matrix: ScoreMatrix,
    pub component_matrix: ScoreMatrix,
    pub config: ScoreConfig,
}

/// Score a predicted skeleton against a ground-truth skeleton.
///
/// Pipeline: decompose both graphs into components and loops, build the two
/// thresholded score matrices, aggregate each side, and average the loop
/// and component scores. Exactly symmetric in its two graph arguments.
pub fn topology_score(
    gt: &SkeletonGraph,
    pred: &SkeletonGraph,
    cfg: &ScoreConfig,
) -> Result<TopoReport> {
    cfg.validate()?;
    let gt_d = decompose(gt.clone(), cfg.min_component_size);
    let pred_d = decompose(pred.clone(), cfg.min_component_size);

    let loop_matrix = build_score_matrix(&gt_d.loops, &pred_d.loops, FeatureKind::Loop, cfg);
    let component_matrix = build_score_matrix(
        &gt_d.components,
        &pred_d.components,
        FeatureKind::Component,
        cfg,
    );
    let loop_score = score_side(&loop_matrix);
    let component_score = score_side(&component_matrix);

    Ok(TopoReport {
        topology_score: (loop_score + component_score) / 2.0,
        loop_score,
        component_score,
        voxel_iou: None,
        counts: TopoCounts {
            gt_components: gt_d.components.len(),
            gt_loops: gt_d.loops.len(),
            pred_components: pred_d.components.len(),
            pred_loops: pred_d.loops.len(),
        },
        loop_matrix,
        component_matrix,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn counts(tp_gt: usize, fn_gt: usize, tp_pred: usize, fp_pred: usize) -> MatchCounts {
        MatchCounts {
            tp_gt,
            fn_gt,
            tp_pred,
            fp_pred,
        }
    }

    #[test]
    fn point_cloud_iou_hand_value() {
        let x = point_cloud_iou(counts(3, 0, 2, 1)).unwrap();
        assert!((x - 5.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn point_cloud_iou_perfect_is_exactly_one() {
        for n in 1..=20 {
            assert_eq!(point_cloud_iou(counts(n, 0, n, 0)).unwrap(), 1.0);
        }
        // Also perfect with unequal cloud sizes (many-to-one matching).
        assert_eq!(point_cloud_iou(counts(7, 0, 3, 0)).unwrap(), 1.0);
    }

    #[test]
    fn point_cloud_iou_no_matches_is_exactly_zero() {
        assert_eq!(point_cloud_iou(counts(0, 5, 0, 3)).unwrap(), 0.0);
    }

    #[test]
    fn point_cloud_iou_rejects_empty_sides() {
        assert!(matches!(
            point_cloud_iou(counts(0, 0, 2, 1)).unwrap_err(),
            Error::EmptyFeature { side: "ground truth" }
        ));
        assert!(matches!(
            point_cloud_iou(counts(2, 1, 0, 0)).unwrap_err(),
            Error::EmptyFeature { side: "prediction" }
        ));
    }

    #[test]
    fn point_cloud_iou_is_bit_exact_symmetric() {
        for (a, b, c, d) in [(3, 0, 2, 1), (5, 2, 7, 1), (1, 9, 4, 4), (0, 3, 0, 8)] {
            let fwd = point_cloud_iou(counts(a, b, c, d)).unwrap();
            let rev = point_cloud_iou(counts(a, b, c, d).swapped()).unwrap();
            assert_eq!(fwd.to_bits(), rev.to_bits());
        }
    }

    #[test]
    fn point_cloud_iou_is_density_invariant_where_naive_is_not() {
        // Same geometry, prediction nodes duplicated: (3,0,4,2) doubles the
        // prediction side of (3,0,2,1).
        let thin = counts(3, 0, 2, 1);
        let dense = counts(3, 0, 4, 2);
        assert_eq!(
            point_cloud_iou(thin).unwrap().to_bits(),
            point_cloud_iou(dense).unwrap().to_bits()
        );
        let naive_thin = naive_iou(thin).unwrap();
        let naive_dense = naive_iou(dense).unwrap();
        assert!((naive_thin - 5.0 / 7.0).abs() < 1e-12);
        assert!((naive_dense - 7.0 / 11.0).abs() < 1e-12);
        assert_ne!(naive_thin, naive_dense);
    }

    #[test]
    fn naive_iou_values() {
        assert_eq!(naive_iou(counts(4, 0, 4, 0)).unwrap(), 1.0);
        assert!((naive_iou(counts(3, 0, 2, 1)).unwrap() - 5.0 / 7.0).abs() < 1e-12);
        assert!(matches!(
            naive_iou(counts(0, 0, 0, 0)).unwrap_err(),
            Error::ZeroCounts
        ));
    }

    #[test]
    fn threshold_boundaries_are_strict() {
        let (lo, hi) = (0.3, 0.7);
        assert_eq!(threshold_value(0.299, lo, hi), 0.0);
        assert_eq!(threshold_value(0.3, lo, hi), 0.3);
        assert_eq!(threshold_value(0.5, lo, hi), 0.5);
        assert_eq!(threshold_value(0.7, lo, hi), 0.7);
        assert_eq!(threshold_value(0.701, lo, hi), 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(ScoreConfig::default().validate().is_ok());
        let bad = ScoreConfig {
            t_low: 0.8, // above t_high
            ..ScoreConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ScoreConfig {
            matching: MatchConfig::new(0.0),
            ..ScoreConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ScoreConfig {
            min_component_size: 0,
            ..ScoreConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    /// A cycle graph whose nodes sit at the given positions.
    fn cycle_graph(positions: &[[f64; 3]]) -> SkeletonGraph {
        let n = positions.len() as u32;
        let edges: Vec<[u32; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
        SkeletonGraph::new(positions.to_vec(), edges).unwrap()
    }

    fn shifted(base: &[[f64; 3]], offset: [f64; 3]) -> Vec<[f64; 3]> {
        base.iter()
            .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
            .collect()
    }

    #[test]
    fn matrix_thresholds_strong_and_weak_overlaps() {
        // One GT loop; two prediction loops: a perfect copy and a distant
        // one. Raw IoUs 1.0 and 0.0 become entries 1 and 0.
        let ring: Vec<[f64; 3]> = (0..8).map(|i| [i as f64 * 4.0, 0.0, 0.0]).collect();
        let gt = Arc::new(cycle_graph(&ring));
        let mut pred_nodes = ring.clone();
        pred_nodes.extend(shifted(&ring, [1000.0, 0.0, 0.0]));
        let mut pred_edges: Vec<[u32; 2]> = (0..8).map(|i| [i, (i + 1) % 8]).collect();
        pred_edges.extend((0..8u32).map(|i| [8 + i, 8 + (i + 1) % 8]));
        let pred = Arc::new(SkeletonGraph::new(pred_nodes, pred_edges).unwrap());

        let cfg = ScoreConfig::default();
        let gt_d = decompose((*gt).clone(), 1);
        let pred_d = decompose((*pred).clone(), 1);
        let m = build_score_matrix(&gt_d.loops, &pred_d.loops, FeatureKind::Loop, &cfg);
        assert_eq!(m.entries, vec![vec![1.0, 0.0]]);
        assert_eq!(m.gt_scores, vec![1.0]);
        assert_eq!(m.pred_scores, vec![1.0, 0.0]);
        assert_eq!(score_side(&m), 0.75);
    }

    #[test]
    fn row_sums_clip_at_one() {
        // One GT loop of 8 nodes spaced far apart; two prediction loops
        // each matching 6 of the 8 (and each carrying 2 stray nodes), so
        // each raw IoU is (6/8 + 6/8) / (10/8 + 10/8) = 0.6. The GT row sum
        // 1.2 clips to 1.
        let xs = |ids: &[i32]| -> Vec<[f64; 3]> {
            ids.iter().map(|&i| [i as f64 * 100.0, 0.0, 0.0]).collect()
        };
        let gt = Arc::new(cycle_graph(&xs(&[0, 1, 2, 3, 4, 5, 6, 7])));
        // First prediction loop: matches GT nodes 0-5, strays at 100, 101.
        let p1 = xs(&[0, 1, 2, 3, 4, 5, 100, 101]);
        // Second: matches GT nodes 2-7, strays at 200, 201.
        let p2 = xs(&[2, 3, 4, 5, 6, 7, 200, 201]);
        let mut pred_nodes = p1;
        pred_nodes.extend(p2);
        let mut pred_edges: Vec<[u32; 2]> = (0..8).map(|i| [i, (i + 1) % 8]).collect();
        pred_edges.extend((0..8u32).map(|i| [8 + i, 8 + (i + 1) % 8]));
        let pred = Arc::new(SkeletonGraph::new(pred_nodes, pred_edges).unwrap());

        let cfg = ScoreConfig::default();
        let gt_d = decompose((*gt).clone(), 1);
        let pred_d = decompose((*pred).clone(), 1);
        let m = build_score_matrix(&gt_d.loops, &pred_d.loops, FeatureKind::Loop, &cfg);
        for row in &m.entries {
            for &e in row {
                assert!((e - 0.6).abs() < 1e-12, "entry {e}");
            }
        }
        assert_eq!(m.gt_scores, vec![1.0]);
        assert!((m.pred_scores[0] - 0.6).abs() < 1e-12);
        assert!((m.pred_scores[1] - 0.6).abs() < 1e-12);
    }

    fn empty_matrix(n_gt: usize, n_pred: usize) -> ScoreMatrix {
        ScoreMatrix {
            kind: FeatureKind::Loop,
            entries: vec![vec![0.0; n_pred]; n_gt],
            gt_scores: vec![0.0; n_gt],
            pred_scores: vec![0.0; n_pred],
        }
    }

    #[test]
    fn score_side_edge_cases() {
        assert_eq!(score_side(&empty_matrix(0, 0)), 1.0);
        for k in 1..=3 {
            assert_eq!(score_side(&empty_matrix(0, k)), 1.0 / (1.0 + k as f64));
            assert_eq!(score_side(&empty_matrix(k, 0)), 1.0 / (1.0 + k as f64));
        }
    }

    #[test]
    fn identical_skeletons_score_exactly_one() {
        let ring: Vec<[f64; 3]> = (0..12)
            .map(|i| {
                let a = i as f64 / 12.0 * std::f64::consts::TAU;
                [20.0 * a.cos(), 20.0 * a.sin(), 0.0]
            })
            .collect();
        let g = cycle_graph(&ring);
        let report = topology_score(&g, &g, &ScoreConfig::default()).unwrap();
        assert_eq!(report.topology_score, 1.0);
        assert_eq!(report.loop_score, 1.0);
        assert_eq!(report.component_score, 1.0);
        assert_eq!(report.counts.gt_loops, 1);
        assert_eq!(report.counts.pred_loops, 1);
    }

    #[test]
    fn topology_score_averages_loop_and_component_scores() {
        // GT: one 8-cycle. Prediction: the same 8-cycle plus a distant
        // 8-node path (extra component, no extra loop).
        let ring: Vec<[f64; 3]> = (0..8).map(|i| [i as f64 * 4.0, 0.0, 0.0]).collect();
        let gt = cycle_graph(&ring);
        let mut pred_nodes = ring.clone();
        pred_nodes.extend((0..8).map(|i| [i as f64 * 4.0, 1000.0, 0.0]));
        let mut pred_edges: Vec<[u32; 2]> = (0..8).map(|i| [i, (i + 1) % 8]).collect();
        pred_edges.extend((8..15u32).map(|i| [i, i + 1]));
        let pred = SkeletonGraph::new(pred_nodes, pred_edges).unwrap();

        let report = topology_score(&gt, &pred, &ScoreConfig::default()).unwrap();
        // Loops: 1 vs 1, perfect → 1. Components: 1 vs 2, the matching one
        // perfect, the stray one unmatched → (1 + (1 + 0)/2)/2 = 0.75.
        assert_eq!(report.loop_score, 1.0);
        assert_eq!(report.component_score, 0.75);
        assert_eq!(report.topology_score, 0.875);
        assert_eq!(
            report.counts,
            TopoCounts {
                gt_components: 1,
                gt_loops: 1,
                pred_components: 2,
                pred_loops: 1
            }
        );
    }

    #[test]
    fn min_component_size_drops_debris_from_scoring() {
        // Prediction has a 3-node fragment; with the default min size 5 it
        // is ignored and the score stays 1.
        let line: Vec<[f64; 3]> = (0..8).map(|i| [i as f64 * 2.0, 0.0, 0.0]).collect();
        let path_edges: Vec<[u32; 2]> = (0..7).map(|i| [i, i + 1]).collect();
        let gt = SkeletonGraph::new(line.clone(), path_edges.clone()).unwrap();
        let mut pred_nodes = line;
        pred_nodes.extend([[500.0, 0.0, 0.0], [502.0, 0.0, 0.0], [504.0, 0.0, 0.0]]);
        let mut pred_edges = path_edges;
        pred_edges.extend([[8, 9], [9, 10]]);
        let pred = SkeletonGraph::new(pred_nodes, pred_edges).unwrap();

        let report = topology_score(&gt, &pred, &ScoreConfig::default()).unwrap();
        assert_eq!(report.topology_score, 1.0);
        assert_eq!(report.counts.pred_components, 1);
    }

    #[test]
    fn report_serializes_and_roundtrips() {
        let ring: Vec<[f64; 3]> = (0..8).map(|i| [i as f64 * 4.0, 0.0, 0.0]).collect();
        let g = cycle_graph(&ring);
        let report = topology_score(&g, &g, &ScoreConfig::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: TopoReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("\"topology_score\":1.0"));
    }

    #[test]
    fn empty_graphs_score_one() {
        let empty = SkeletonGraph::new(vec![], vec![]).unwrap();
        let report = topology_score(&empty, &empty, &ScoreConfig::default()).unwrap();
        assert_eq!(report.topology_score, 1.0);
    }
}
