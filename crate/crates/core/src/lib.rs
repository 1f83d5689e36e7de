//! Topology-aware evaluation of tubular segmentations.
//!
//! Voxelwise overlap scores ignore what vessels, airways, and roots are
//! *for*: carrying flow through a connected network. A prediction can have
//! excellent voxel IoU while severing branches or hallucinating shortcuts
//! that change the network's wiring entirely. This crate scores a predicted
//! segmentation by comparing the *topology* of its skeleton against the
//! ground truth's:
//!
//! 1. [`thinning`] reduces each binary mask to a 1-voxel-wide skeleton that
//!    preserves connectivity, and [`skeleton`] turns it into a spatial graph.
//! 2. [`features`] decomposes each graph into connected components and
//!    independent loops.
//! 3. [`matching`] pairs up nodes between a ground-truth feature and a
//!    predicted feature within a spatial radius, and [`scoring`] turns the
//!    match counts into a point-cloud IoU, assembles thresholded score
//!    matrices over all feature pairs, and aggregates them into the final
//!    topology score in `[0, 1]`.
//!
//! [`volume`] handles volume I/O and preprocessing (standardization,
//! binarization, voxel IoU, entropy), [`sweep`] picks binarization
//! thresholds by maximizing either metric over a grid, and [`phantom`]
//! generates synthetic tubular volumes with exactly known topology for
//! validation.
//!
//! The commonly used items are re-exported at the crate root:
//!
//! ```
//! use tubetopo_core::{generate_phantom, skeletonize, topology_score};
//! use tubetopo_core::{PhantomSpec, ScoreConfig};
//!
//! let spec = PhantomSpec {
//!     seed: 7,
//!     dims: [48, 48, 48],
//!     loops_per_component: vec![1],
//!     tube_radius: 2.5,
//!     jitter: 0.0,
//! };
//! let truth = generate_phantom(&spec).unwrap();
//! let skel = skeletonize(&truth.volume).unwrap();
//! let cfg = ScoreConfig::default();
//! let report = topology_score(&truth.skeleton, &skel, &cfg).unwrap();
//! assert_eq!(report.topology_score, 1.0);
//! ```

pub mod error;
pub mod features;
pub mod matching;
pub mod phantom;
pub mod scoring;
pub mod skeleton;
pub mod sweep;
pub mod thinning;
pub mod volume;

pub use error::{Error, Result};
pub use features::{
    decompose, extract_components, extract_loops, graph_counts, FeatureKind, TopoDecomposition,
    TopoFeature,
};
pub use matching::{match_features, match_point_clouds, MatchConfig, MatchCounts};
pub use phantom::{corrupt_phantom, generate_phantom, CorruptOp, PhantomSpec, PhantomTruth};
pub use scoring::{
    build_score_matrix, naive_iou, point_cloud_iou, score_side, threshold_value, topology_score,
    ScoreConfig, ScoreMatrix, TopoCounts, TopoReport,
};
pub use skeleton::{
    graph_from_skeleton_voxels, load_skeleton, load_volume_or_skeleton, save_skeleton,
    SkeletonGraph, VolumeOrSkeleton,
};
pub use sweep::{
    default_thresholds, emit_report, load_sweep_spec, run_sweep, SweepItem, SweepMetric,
    SweepResult, SweepSpec,
};
pub use thinning::{is_thin, skeletonize, thin_volume};
pub use volume::{
    binarize, load_volume, mean_entropy, save_volume, standardize, voxel_iou, Dtype, Volume,
    VolumeData,
};
