//! Threshold-sweep model selection.
//!
//! Given probability maps and their ground truths, binarize each map at
//! every threshold in a grid, score the result, and report which threshold
//! maximizes the chosen metric. Ground truth may be a voxel volume (it is
//! skeletonized once and cached) or an already-extracted skeleton (in which
//! case voxel IoU is unavailable and left blank).
//!
//! The sweep is a pure function of its spec and input files: items are
//! scored in manifest order, thresholds ascending, and ties in the argmax
//! go to the lower threshold (lower thresholds keep more foreground, the
//! conservative direction). Re-running produces identical bytes.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{topology_score, ScoreConfig, TopoReport};
use crate::skeleton::{load_volume_or_skeleton, SkeletonGraph, VolumeOrSkeleton};
use crate::thinning::skeletonize;
use crate::volume::{binarize, load_volume, mean_entropy, voxel_iou, Volume};

/// Which metric the sweep optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    VoxelIou,
    TopologyScore,
    Both,
}

impl SweepMetric {
    fn wants_voxel(self) -> bool {
        matches!(self, SweepMetric::VoxelIou | SweepMetric::Both)
    }

    fn wants_topology(self) -> bool {
        matches!(self, SweepMetric::TopologyScore | SweepMetric::Both)
    }
}

/// One dataset entry: a probability map and its ground truth (volume
/// header or skeleton JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepItem {
    pub probability_map: PathBuf,
    pub ground_truth: PathBuf,
}

/// Full description of a sweep, loadable from a JSON manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    pub metric: SweepMetric,
    pub dataset: Vec<SweepItem>,
    #[serde(default)]
    pub cfg: ScoreConfig,
}

/// The canonical grid: 0.1, 0.2, …, 0.9.
pub fn default_thresholds() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dataset.is_empty() {
            return Err(Error::invalid("sweep dataset must not be empty"));
        }
        if self.thresholds.is_empty() {
            return Err(Error::invalid("sweep needs at least one threshold"));
        }
        for &t in &self.thresholds {
            if !(t.is_finite() && 0.0 < t && t < 1.0) {
                return Err(Error::invalid(format!(
                    "sweep thresholds must lie strictly inside (0, 1), got {t}"
                )));
            }
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "sweep thresholds must be strictly increasing",
            ));
        }
        self.cfg.validate()
    }
}

/// Load a sweep spec from a JSON manifest. Relative dataset paths are
/// resolved against the manifest's directory.
pub fn load_sweep_spec(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spec: SweepSpec = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        what: "sweep manifest",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    if let Some(dir) = path.parent() {
        for item in &mut spec.dataset {
            if item.probability_map.is_relative() {
                item.probability_map = dir.join(&item.probability_map);
            }
            if item.ground_truth.is_relative() {
                item.ground_truth = dir.join(&item.ground_truth);
            }
        }
    }
    Ok(spec)
}

/// Scores for one (item, threshold) cell. Optional fields are absent when
/// the metric did not request them or the inputs cannot supply them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub item: String,
    pub threshold: f64,
    pub voxel_iou: Option<f64>,
    pub topology_score: Option<f64>,
    pub loop_score: Option<f64>,
    pub component_score: Option<f64>,
    /// Mean voxelwise entropy of the probability map (threshold-free, so
    /// repeated across this item's rows).
    pub entropy: f64,
}

/// Mean and population standard deviation of one column of cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

fn stat_of(values: &[f64]) -> Option<Stat> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some(Stat {
        mean,
        std: var.sqrt(),
        n: values.len(),
    })
}

/// Per-threshold aggregates over the items that produced each score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAggregate {
    pub threshold: f64,
    pub voxel_iou: Option<Stat>,
    pub topology_score: Option<Stat>,
}

/// An item the sweep had to skip, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub item: String,
    pub error: String,
}

/// Everything a sweep produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub thresholds: Vec<f64>,
    pub metric: SweepMetric,
    /// Item-major, thresholds ascending within an item.
    pub cells: Vec<SweepCell>,
    pub aggregates: Vec<ThresholdAggregate>,
    /// Threshold maximizing mean voxel IoU (ties go low).
    pub best_voxel_threshold: Option<f64>,
    /// Threshold maximizing mean topology score (ties go low).
    pub best_topology_threshold: Option<f64>,
    /// Items skipped because they failed to load or score; they contribute
    /// to no aggregate.
    pub failures: Vec<ItemFailure>,
}

struct LoadedItem {
    name: String,
    prob: Volume,
    entropy: f64,
    gt_volume: Option<Volume>,
    gt_skeleton: Option<SkeletonGraph>,
}

fn load_item(item: &SweepItem, metric: SweepMetric) -> Result<LoadedItem> {
    let prob = load_volume(&item.probability_map)?;
    let entropy = mean_entropy(&prob)?;
    let (gt_volume, gt_skeleton) = match load_volume_or_skeleton(&item.ground_truth)? {
        VolumeOrSkeleton::Volume(v) => {
            let skel = if metric.wants_topology() {
                Some(skeletonize(&v)?)
            } else {
                None
            };
            (Some(v), skel)
        }
        VolumeOrSkeleton::Skeleton(g) => {
            if metric == SweepMetric::VoxelIou {
                return Err(Error::invalid(format!(
                    "{}: voxel IoU needs the ground truth as a volume, got a skeleton",
                    item.ground_truth.display()
                )));
            }
            (None, Some(g))
        }
    };
    Ok(LoadedItem {
        name: item.probability_map.display().to_string(),
        prob,
        entropy,
        gt_volume,
        gt_skeleton,
    })
}

fn score_cell(it: &LoadedItem, threshold: f64, spec: &SweepSpec) -> Result<SweepCell> {
    let bin = binarize(&it.prob, threshold)?;
    let vi = match (&it.gt_volume, spec.metric.wants_voxel()) {
        (Some(gt), true) => Some(voxel_iou(gt, &bin)?),
        _ => None,
    };
    let topo: Option<TopoReport> = if spec.metric.wants_topology() {
        let gt = it
            .gt_skeleton
            .as_ref()
            .expect("topology metrics always cache a ground-truth skeleton");
        let pred = skeletonize(&bin)?;
        Some(topology_score(gt, &pred, &spec.cfg)?)
    } else {
        None
    };
    Ok(SweepCell {
        item: it.name.clone(),
        threshold,
        voxel_iou: vi,
        topology_score: topo.as_ref().map(|r| r.topology_score),
        loop_score: topo.as_ref().map(|r| r.loop_score),
        component_score: topo.as_ref().map(|r| r.component_score),
        entropy: it.entropy,
    })
}

/// Argmax with ties broken toward the lower threshold; `None` when no
/// threshold has any value.
fn best_threshold(
    thresholds: &[f64],
    aggregates: &[ThresholdAggregate],
    pick: impl Fn(&ThresholdAggregate) -> Option<Stat>,
) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for (t, agg) in thresholds.iter().zip(aggregates) {
        let Some(stat) = pick(agg) else { continue };
        match best {
            Some((_, m)) if stat.mean <= m => {}
            _ => best = Some((*t, stat.mean)),
        }
    }
    best.map(|(t, _)| t)
}

/// Run a full sweep. Items that fail to load or score are recorded in
/// `failures` and excluded from every aggregate; the sweep itself fails
/// only on an invalid spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;

    // Load every item up front (ground-truth skeletons are the expensive
    // part and are shared across thresholds).
    let loaded: Vec<(String, Result<LoadedItem>)> = spec
        .dataset
        .par_iter()
        .map(|item| {
            (
                item.probability_map.display().to_string(),
                load_item(item, spec.metric),
            )
        })
        .collect();

    let mut failures = Vec::new();
    let mut items = Vec::new();
    for (name, r) in loaded {
        match r {
            Ok(it) => items.push(it),
            Err(e) => failures.push(ItemFailure {
                item: name,
                error: e.to_string(),
            }),
        }
    }

    // Score all cells; a failure at any threshold drops the whole item so
    // that every surviving item contributes to every aggregate.
    let scored: Vec<(String, Result<Vec<SweepCell>>)> = items
        .par_iter()
        .map(|it| {
            let cells: Result<Vec<SweepCell>> = spec
                .thresholds
                .iter()
                .map(|&t| score_cell(it, t, spec))
                .collect();
            (it.name.clone(), cells)
        })
        .collect();

    let mut cells = Vec::new();
    for (name, r) in scored {
        match r {
            Ok(mut c) => cells.append(&mut c),
            Err(e) => failures.push(ItemFailure {
                item: name,
                error: e.to_string(),
            }),
        }
    }

    let aggregates: Vec<ThresholdAggregate> = spec
        .thresholds
        .iter()
        .map(|&t| {
            let at_t: Vec<&SweepCell> = cells.iter().filter(|c| c.threshold == t).collect();
            let collect = |get: fn(&SweepCell) -> Option<f64>| -> Vec<f64> {
                at_t.iter().filter_map(|c| get(c)).collect()
            };
            ThresholdAggregate {
                threshold: t,
                voxel_iou: stat_of(&collect(|c| c.voxel_iou)),
                topology_score: stat_of(&collect(|c| c.topology_score)),
            }
        })
        .collect();

    let best_voxel_threshold = if spec.metric.wants_voxel() {
        best_threshold(&spec.thresholds, &aggregates, |a| a.voxel_iou)
    } else {
        None
    };
    let best_topology_threshold = if spec.metric.wants_topology() {
        best_threshold(&spec.thresholds, &aggregates, |a| a.topology_score)
    } else {
        None
    };

    Ok(SweepResult {
        thresholds: spec.thresholds.clone(),
        metric: spec.metric,
        cells,
        aggregates,
        best_voxel_threshold,
        best_topology_threshold,
        failures,
    })
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write a sweep result as `<prefix>.csv` (one row per cell) and
/// `<prefix>.json` (the full result, aggregates included).
pub fn emit_report(r: &SweepResult, prefix: impl AsRef<Path>) -> Result<()> {
    let prefix = prefix.as_ref();
    let csv_path = prefix.with_extension("csv");
    let json_path = prefix.with_extension("json");

    let mut csv = String::new();
    csv.push_str("item,threshold,voxel_iou,topo_score,loop_score,component_score,entropy\n");
    for c in &r.cells {
        let item = if c.item.contains([',', '"', '\n']) {
            format!("\"{}\"", c.item.replace('"', "\"\""))
        } else {
            c.item.clone()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            item,
            c.threshold,
            csv_field(c.voxel_iou),
            csv_field(c.topology_score),
            csv_field(c.loop_score),
            csv_field(c.component_score),
            c.entropy,
        ));
    }
    let mut f = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    f.write_all(csv.as_bytes()).map_err(|e| Error::io(&csv_path, e))?;

    let json = serde_json::to_string_pretty(r).expect("sweep result serializes");
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{corrupt_phantom, generate_phantom, CorruptOp, PhantomSpec};
    use crate::volume::save_volume;
    use tempfile::tempdir;

    fn phantom_spec(seed: u64) -> PhantomSpec {
        PhantomSpec {
            seed,
            dims: [48, 48, 48],
            loops_per_component: vec![1],
            tube_radius: 2.5,
            jitter: 0.0,
        }
    }

    fn write_prob(dir: &Path, name: &str, v: &Volume) -> PathBuf {
        let data = v.as_u8().unwrap().iter().map(|&b| b as f32).collect();
        let prob = Volume::from_f32(v.dims(), v.spacing(), data).unwrap();
        let path = dir.join(name);
        save_volume(&prob, &path).unwrap();
        path
    }

    #[test]
    fn default_grid_is_the_nine_tenths() {
        let t = default_thresholds();
        assert_eq!(t.len(), 9);
        for (i, v) in t.iter().enumerate() {
            assert!((v - (i + 1) as f64 / 10.0).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_validation_rejects_bad_grids() {
        let item = SweepItem {
            probability_map: "p.json".into(),
            ground_truth: "g.json".into(),
        };
        let base = SweepSpec {
            thresholds: default_thresholds(),
            metric: SweepMetric::Both,
            dataset: vec![item],
            cfg: ScoreConfig::default(),
        };
        assert!(base.validate().is_ok());

        let mut s = base.clone();
        s.thresholds = vec![0.5, 0.5];
        assert!(s.validate().is_err());
        s.thresholds = vec![0.7, 0.3];
        assert!(s.validate().is_err());
        s.thresholds = vec![0.0, 0.5];
        assert!(s.validate().is_err());
        s.thresholds = vec![0.5, 1.0];
        assert!(s.validate().is_err());
        s.thresholds.clear();
        assert!(s.validate().is_err());

        let mut s = base.clone();
        s.dataset.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn identity_probability_map_scores_one_everywhere() {
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(21)).unwrap();
        let gt_path = dir.path().join("gt.json");
        save_volume(&truth.volume, &gt_path).unwrap();
        let prob_path = write_prob(dir.path(), "prob.json", &truth.volume);

        let spec = SweepSpec {
            thresholds: vec![0.25, 0.5, 0.75],
            metric: SweepMetric::Both,
            dataset: vec![SweepItem {
                probability_map: prob_path,
                ground_truth: gt_path,
            }],
            cfg: ScoreConfig {
                matching: crate::matching::MatchConfig::new(4.0),
                ..ScoreConfig::default()
            },
        };
        let r = run_sweep(&spec).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.cells.len(), 3);
        for c in &r.cells {
            assert_eq!(c.voxel_iou, Some(1.0));
            assert_eq!(c.topology_score, Some(1.0));
            assert_eq!(c.entropy, 0.0);
        }
        // All thresholds tie at 1; the tie rule picks the lowest.
        assert_eq!(r.best_voxel_threshold, Some(0.25));
        assert_eq!(r.best_topology_threshold, Some(0.25));
    }

    #[test]
    fn corruption_visible_only_at_low_thresholds_pushes_the_argmax_up() {
        // Probability map = GT at 0.95, corruption blob at 0.55: thresholds
        // at or below 0.55 include the corruption, higher ones do not.
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(22)).unwrap();
        let broken = corrupt_phantom(&truth, &[CorruptOp::AddBridge], 5).unwrap();

        let t_data = truth.volume.as_u8().unwrap();
        let b_data = broken.volume.as_u8().unwrap();
        let prob: Vec<f32> = t_data
            .iter()
            .zip(b_data)
            .map(|(&t, &b)| if t == 1 { 0.95 } else if b == 1 { 0.55 } else { 0.0 })
            .collect();
        let prob = Volume::from_f32(truth.volume.dims(), [1.0; 3], prob).unwrap();
        let prob_path = dir.path().join("prob.json");
        save_volume(&prob, &prob_path).unwrap();
        let gt_path = dir.path().join("gt.json");
        save_volume(&truth.volume, &gt_path).unwrap();

        let spec = SweepSpec {
            thresholds: default_thresholds(),
            metric: SweepMetric::TopologyScore,
            dataset: vec![SweepItem {
                probability_map: prob_path,
                ground_truth: gt_path,
            }],
            cfg: ScoreConfig {
                matching: crate::matching::MatchConfig::new(4.0),
                ..ScoreConfig::default()
            },
        };
        let r = run_sweep(&spec).unwrap();
        assert!(r.failures.is_empty());
        let best = r.best_topology_threshold.unwrap();
        assert!(best > 0.55, "argmax {best} should sit above the corruption level");
        // At a clean threshold the score is perfect.
        let clean = r
            .cells
            .iter()
            .find(|c| c.threshold == best)
            .unwrap()
            .topology_score
            .unwrap();
        assert_eq!(clean, 1.0);
        // At 0.5 the bridge is present and costs loop score.
        let dirty = r
            .cells
            .iter()
            .find(|c| c.threshold == 0.5)
            .unwrap()
            .topology_score
            .unwrap();
        assert!(dirty < 1.0);
    }

    #[test]
    fn unreadable_items_are_skipped_with_a_failure_record() {
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(23)).unwrap();
        let gt_path = dir.path().join("gt.json");
        save_volume(&truth.volume, &gt_path).unwrap();
        let prob_path = write_prob(dir.path(), "prob.json", &truth.volume);

        let spec = SweepSpec {
            thresholds: vec![0.5],
            metric: SweepMetric::VoxelIou,
            dataset: vec![
                SweepItem {
                    probability_map: dir.path().join("missing.json"),
                    ground_truth: gt_path.clone(),
                },
                SweepItem {
                    probability_map: prob_path,
                    ground_truth: gt_path,
                },
            ],
        cfg: ScoreConfig::default(),
        };
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].item.contains("missing"));
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.aggregates[0].voxel_iou.unwrap().n, 1);
        assert_eq!(r.best_voxel_threshold, Some(0.5));
    }

    #[test]
    fn skeleton_ground_truth_disables_voxel_iou() {
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(24)).unwrap();
        let gt_path = dir.path().join("gt_skel.json");
        crate::skeleton::save_skeleton(&truth.skeleton, &gt_path).unwrap();
        let prob_path = write_prob(dir.path(), "prob.json", &truth.volume);

        let mk = |metric| SweepSpec {
            thresholds: vec![0.5],
            metric,
            dataset: vec![SweepItem {
                probability_map: prob_path.clone(),
                ground_truth: gt_path.clone(),
            }],
            cfg: ScoreConfig {
                matching: crate::matching::MatchConfig::new(4.0),
                ..ScoreConfig::default()
            },
        };

        let r = run_sweep(&mk(SweepMetric::TopologyScore)).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.cells[0].voxel_iou, None);
        assert!(r.cells[0].topology_score.is_some());
        assert_eq!(r.best_voxel_threshold, None);

        // Asking for voxel IoU against a skeleton is a per-item failure.
        let r = run_sweep(&mk(SweepMetric::VoxelIou)).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.cells.is_empty());
    }

    #[test]
    fn sweep_output_is_byte_deterministic() {
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(25)).unwrap();
        let gt_path = dir.path().join("gt.json");
        save_volume(&truth.volume, &gt_path).unwrap();
        let prob_path = write_prob(dir.path(), "prob.json", &truth.volume);

        let spec = SweepSpec {
            thresholds: vec![0.3, 0.7],
            metric: SweepMetric::Both,
            dataset: vec![SweepItem {
                probability_map: prob_path,
                ground_truth: gt_path,
            }],
            cfg: ScoreConfig {
                matching: crate::matching::MatchConfig::new(4.0),
                ..ScoreConfig::default()
            },
        };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        emit_report(&a, dir.path().join("ra")).unwrap();
        emit_report(&b, dir.path().join("rb")).unwrap();
        let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
        assert_eq!(read("ra.csv"), read("rb.csv"));
        assert_eq!(read("ra.json"), read("rb.json"));
    }

    #[test]
    fn report_rows_match_cells_and_aggregates_recompute() {
        let dir = tempdir().unwrap();
        let truth = generate_phantom(&phantom_spec(26)).unwrap();
        let gt_path = dir.path().join("gt.json");
        save_volume(&truth.volume, &gt_path).unwrap();
        let p1 = write_prob(dir.path(), "p1.json", &truth.volume);
        let p2 = write_prob(dir.path(), "p2.json", &truth.volume);

        let spec = SweepSpec {
            thresholds: vec![0.2, 0.5, 0.8],
            metric: SweepMetric::VoxelIou,
            dataset: vec![
                SweepItem {
                    probability_map: p1,
                    ground_truth: gt_path.clone(),
                },
                SweepItem {
                    probability_map: p2,
                    ground_truth: gt_path,
                },
            ],
            cfg: ScoreConfig::default(),
        };
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.cells.len(), 6);

        emit_report(&r, dir.path().join("report")).unwrap();
        let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(
            lines[0],
            "item,threshold,voxel_iou,topo_score,loop_score,component_score,entropy"
        );

        // Aggregates recompute from the per-item values.
        for agg in &r.aggregates {
            let vals: Vec<f64> = r
                .cells
                .iter()
                .filter(|c| c.threshold == agg.threshold)
                .filter_map(|c| c.voxel_iou)
                .collect();
            let expect = stat_of(&vals).unwrap();
            let got = agg.voxel_iou.unwrap();
            assert_eq!(got.n, expect.n);
            assert!((got.mean - expect.mean).abs() < 1e-15);
            assert!((got.std - expect.std).abs() < 1e-15);
        }

        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
                .unwrap();
        assert_eq!(json["cells"].as_array().unwrap().len(), 6);
        assert_eq!(json["best_voxel_threshold"], serde_json::json!(0.2));
    }

    #[test]
    fn manifest_roundtrip_resolves_relative_paths() {
        let dir = tempdir().unwrap();
        let manifest = dir.path().join("sweep.json");
        fs::write(
            &manifest,
            r#"{
              "metric": "both",
              "dataset": [
                {"probability_map": "p.json", "ground_truth": "g.json"}
              ]
            }"#,
        )
        .unwrap();
        let spec = load_sweep_spec(&manifest).unwrap();
        assert_eq!(spec.thresholds, default_thresholds());
        assert_eq!(spec.metric, SweepMetric::Both);
        assert_eq!(spec.dataset[0].probability_map, dir.path().join("p.json"));
        assert_eq!(spec.dataset[0].ground_truth, dir.path().join("g.json"));
        assert_eq!(spec.cfg, ScoreConfig::default());
    }
}
