//! `tubetopo`: topology-aware scoring of tubular segmentations.
//!
//! Exit codes: 0 success, 1 invalid flags or invalid input content,
//! 2 operating-system I/O failure (missing file, permissions, short write).
//! Machine-readable output goes to files named by `--out`; standard output
//! carries only a short human-readable summary.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tubetopo_core::matching::MatchConfig;
use tubetopo_core::phantom::{corrupt_phantom, generate_phantom, CorruptOp, PhantomSpec};
use tubetopo_core::scoring::{topology_score, ScoreConfig};
use tubetopo_core::skeleton::{
    load_volume_or_skeleton, save_skeleton, SkeletonGraph, VolumeOrSkeleton,
};
use tubetopo_core::sweep::{emit_report, load_sweep_spec, run_sweep};
use tubetopo_core::thinning::skeletonize;
use tubetopo_core::volume::{binarize, load_volume, mean_entropy, save_volume, voxel_iou, Dtype, Volume};
use tubetopo_core::{features, Error};

#[derive(Parser)]
#[command(
    name = "tubetopo",
    version,
    about = "Topology-aware evaluation of tubular segmentations",
    after_help = "Volumes are JSON headers next to raw little-endian payloads; \
                  skeletons are JSON graphs. Inputs marked volume-or-skeleton are \
                  told apart by their top-level keys (\"dims\" vs \"nodes\")."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Thin a volume to a skeleton graph and write it as JSON.
    Skeletonize(SkeletonizeArgs),
    /// Score a prediction against a ground truth (volumes or skeletons).
    Score(ScoreArgs),
    /// Sweep binarization thresholds over a dataset and pick the best.
    Sweep(SweepArgs),
    /// Generate a synthetic tubular phantom with known topology.
    Phantom(PhantomArgs),
    /// Plain voxel intersection-over-union of two volumes.
    VoxelIou(VoxelIouArgs),
    /// Mean voxelwise entropy of a probability map.
    Entropy(EntropyArgs),
}

#[derive(Args)]
struct SkeletonizeArgs {
    /// Input volume header (binary mask, or probability map with --threshold).
    input: PathBuf,
    /// Binarization threshold, required for float probability maps.
    #[arg(long)]
    threshold: Option<f64>,
    /// Where to write the skeleton JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Ground truth: volume header or skeleton JSON.
    #[arg(long)]
    gt: PathBuf,
    /// Prediction: volume header or skeleton JSON.
    #[arg(long)]
    pred: PathBuf,
    /// Node-matching radius (world units).
    #[arg(long, default_value_t = ScoreConfig::default().matching.radius)]
    radius: f64,
    /// Pairwise scores strictly below this count as 0.
    #[arg(long, default_value_t = ScoreConfig::default().t_low)]
    t_low: f64,
    /// Pairwise scores strictly above this count as 1.
    #[arg(long, default_value_t = ScoreConfig::default().t_high)]
    t_high: f64,
    /// Skeleton components smaller than this many nodes are ignored.
    #[arg(long, default_value_t = ScoreConfig::default().min_component_size)]
    min_component: usize,
    /// Binarization threshold applied to float volume inputs.
    #[arg(long)]
    threshold: Option<f64>,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep description: thresholds, metric, dataset, scoring config.
    #[arg(long)]
    manifest: PathBuf,
    /// Report prefix; writes <out>.csv and <out>.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PhantomArgs {
    /// RNG seed; the same seed reproduces the phantom bit for bit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of connected components.
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Total number of loops, distributed round-robin over components.
    #[arg(long, default_value_t = 0)]
    loops: usize,
    /// Volume dimensions as X,Y,Z.
    #[arg(long, value_parser = parse_dims, default_value = "128,96,96")]
    dims: [usize; 3],
    /// Tube radius in voxels.
    #[arg(long, default_value_t = 3.0)]
    tube_radius: f64,
    /// Maximum per-axis waypoint displacement in voxels. Zero (the default)
    /// keeps tubes axis-aligned so thinning recovers the truth counts
    /// exactly; nonzero values trade that guarantee for realism.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Corruptions applied in order: break-edge, add-spur, add-bridge.
    #[arg(long, value_delimiter = ',')]
    corrupt: Vec<String>,
    /// Translation DX,DY,DZ applied after the other corruptions.
    #[arg(long, value_parser = parse_shift)]
    shift: Option<[f64; 3]>,
    /// RNG seed for the corruption choices.
    #[arg(long, default_value_t = 0)]
    corrupt_seed: u64,
    /// Output directory for volume.json/.raw, skeleton.json, truth.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VoxelIouArgs {
    /// Ground-truth volume header.
    #[arg(long)]
    gt: PathBuf,
    /// Predicted volume header.
    #[arg(long)]
    pred: PathBuf,
    /// Binarization threshold applied to float inputs.
    #[arg(long)]
    threshold: Option<f64>,
    /// Optionally write {"voxel_iou": ...} here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// Probability-map volume header.
    input: PathBuf,
    /// Optionally write {"mean_entropy": ...} here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z, got {s:?}"));
    }
    let mut d = [0usize; 3];
    for (slot, p) in d.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|e| format!("bad dimension {p:?}: {e}"))?;
    }
    Ok(d)
}

fn parse_shift(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected DX,DY,DZ, got {s:?}"));
    }
    let mut d = [0.0f64; 3];
    for (slot, p) in d.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|e| format!("bad offset {p:?}: {e}"))?;
    }
    Ok(d)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Skeletonize(a) => cmd_skeletonize(a),
        Cmd::Score(a) => cmd_score(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Phantom(a) => cmd_phantom(a),
        Cmd::VoxelIou(a) => cmd_voxel_iou(a),
        Cmd::Entropy(a) => cmd_entropy(a),
    }
}

/// Turn a volume into a binary mask, binarizing float data at `threshold`.
fn to_mask(v: Volume, threshold: Option<f64>, what: &str) -> Result<Volume, Error> {
    match v.dtype() {
        Dtype::U8 => Ok(v),
        Dtype::F32 => match threshold {
            Some(t) => binarize(&v, t),
            None => Err(Error::Invalid(format!(
                "{what} is a float probability map; pass --threshold to binarize it"
            ))),
        },
    }
}

fn cmd_skeletonize(a: SkeletonizeArgs) -> Result<(), Error> {
    let mask = to_mask(load_volume(&a.input)?, a.threshold, "input")?;
    let g = skeletonize(&mask)?;
    let (components, loops) = features::graph_counts(&g);
    save_skeleton(&g, &a.out)?;
    println!(
        "skeleton: {} nodes, {} edges, {} components, {} loops",
        g.node_count(),
        g.edge_count(),
        components,
        loops
    );
    println!("wrote {}", a.out.display());
    Ok(())
}

/// A scoring input reduced to its skeleton, remembering the mask when the
/// input was volumetric so voxel IoU can be reported too.
struct ScoreInput {
    graph: SkeletonGraph,
    mask: Option<Volume>,
}

fn load_score_input(path: &PathBuf, threshold: Option<f64>, what: &str) -> Result<ScoreInput, Error> {
    match load_volume_or_skeleton(path)? {
        VolumeOrSkeleton::Skeleton(graph) => Ok(ScoreInput { graph, mask: None }),
        VolumeOrSkeleton::Volume(v) => {
            let mask = to_mask(v, threshold, what)?;
            Ok(ScoreInput {
                graph: skeletonize(&mask)?,
                mask: Some(mask),
            })
        }
    }
}

fn cmd_score(a: ScoreArgs) -> Result<(), Error> {
    let cfg = ScoreConfig {
        t_low: a.t_low,
        t_high: a.t_high,
        matching: MatchConfig::new(a.radius),
        min_component_size: a.min_component,
    };
    cfg.validate()?;

    let gt = load_score_input(&a.gt, a.threshold, "--gt")?;
    let pred = load_score_input(&a.pred, a.threshold, "--pred")?;

    let mut report = topology_score(&gt.graph, &pred.graph, &cfg)?;
    if let (Some(g), Some(p)) = (&gt.mask, &pred.mask) {
        report.voxel_iou = Some(voxel_iou(g, p)?);
    }

    println!("topology score: {}", report.topology_score);
    println!("  loop score:      {}", report.loop_score);
    println!("  component score: {}", report.component_score);
    if let Some(vi) = report.voxel_iou {
        println!("voxel IoU: {vi}");
    }
    println!(
        "ground truth: {} components, {} loops | prediction: {} components, {} loops",
        report.counts.gt_components,
        report.counts.gt_loops,
        report.counts.pred_components,
        report.counts.pred_loops
    );
    println!(
        "config: radius {}, t_low {}, t_high {}, min component size {}",
        cfg.matching.radius, cfg.t_low, cfg.t_high, cfg.min_component_size
    );

    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(out, json).map_err(|e| io_err(out, e))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Error> {
    let spec = load_sweep_spec(&a.manifest)?;
    let result = run_sweep(&spec)?;
    for f in &result.failures {
        eprintln!("warning: skipped {}: {}", f.item, f.error);
    }
    println!("threshold  voxel_iou  topo_score");
    for agg in &result.aggregates {
        let fmt = |s: Option<tubetopo_core::sweep::Stat>| match s {
            Some(s) => format!("{:.4}±{:.4}", s.mean, s.std),
            None => "-".to_string(),
        };
        println!(
            "{:<10} {:<16} {}",
            agg.threshold,
            fmt(agg.voxel_iou),
            fmt(agg.topology_score)
        );
    }
    if let Some(t) = result.best_voxel_threshold {
        println!("best threshold by voxel IoU: {t}");
    }
    if let Some(t) = result.best_topology_threshold {
        println!("best threshold by topology score: {t}");
    }
    emit_report(&result, &a.out)?;
    println!(
        "wrote {}.csv and {}.json",
        a.out.display(),
        a.out.display()
    );
    Ok(())
}

fn parse_corrupt_ops(names: &[String]) -> Result<Vec<CorruptOp>, Error> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "break-edge" => Ok(CorruptOp::BreakEdge),
            "add-spur" => Ok(CorruptOp::AddSpur),
            "add-bridge" => Ok(CorruptOp::AddBridge),
            other => Err(Error::Invalid(format!(
                "unknown corruption {other:?}; expected break-edge, add-spur, or add-bridge"
            ))),
        })
        .collect()
}

fn cmd_phantom(a: PhantomArgs) -> Result<(), Error> {
    if a.components == 0 {
        return Err(Error::Invalid("--components must be at least 1".into()));
    }
    // Round-robin distribution of the loop total: components get ceil or
    // floor of loops/components, earlier components first.
    let mut loops_per_component = vec![0usize; a.components];
    for i in 0..a.loops {
        loops_per_component[i % a.components] += 1;
    }
    let spec = PhantomSpec {
        seed: a.seed,
        dims: a.dims,
        loops_per_component,
        tube_radius: a.tube_radius,
        jitter: a.jitter,
    };
    let mut truth = generate_phantom(&spec)?;

    let mut ops = parse_corrupt_ops(&a.corrupt)?;
    if let Some(delta) = a.shift {
        ops.push(CorruptOp::Shift(delta));
    }
    if !ops.is_empty() {
        truth = corrupt_phantom(&truth, &ops, a.corrupt_seed)?;
    }

    std::fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    save_volume(&truth.volume, a.out.join("volume.json"))?;
    save_skeleton(&truth.skeleton, a.out.join("skeleton.json"))?;
    let truth_json = serde_json::json!({
        "components": truth.components,
        "loops": truth.loops,
        "seed": a.seed,
    });
    let truth_path = a.out.join("truth.json");
    std::fs::write(
        &truth_path,
        serde_json::to_string_pretty(&truth_json).expect("truth serializes"),
    )
    .map_err(|e| io_err(&truth_path, e))?;

    println!(
        "phantom: {} components, {} loops, {} skeleton nodes, {} foreground voxels",
        truth.components,
        truth.loops,
        truth.skeleton.node_count(),
        truth.volume.foreground_count()?
    );
    println!("wrote {}", a.out.join("volume.json").display());
    println!("wrote {}", a.out.join("skeleton.json").display());
    println!("wrote {}", truth_path.display());
    Ok(())
}

fn cmd_voxel_iou(a: VoxelIouArgs) -> Result<(), Error> {
    let gt = to_mask(load_volume(&a.gt)?, a.threshold, "--gt")?;
    let pred = to_mask(load_volume(&a.pred)?, a.threshold, "--pred")?;
    let v = voxel_iou(&gt, &pred)?;
    println!("voxel IoU: {v}");
    if let Some(out) = &a.out {
        let json = serde_json::json!({ "voxel_iou": v });
        std::fs::write(out, serde_json::to_string_pretty(&json).expect("serializes"))
            .map_err(|e| io_err(out, e))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_entropy(a: EntropyArgs) -> Result<(), Error> {
    let v = load_volume(&a.input)?;
    let e = mean_entropy(&v)?;
    println!("mean entropy: {e}");
    if let Some(out) = &a.out {
        let json = serde_json::json!({ "mean_entropy": e });
        std::fs::write(out, serde_json::to_string_pretty(&json).expect("serializes"))
            .map_err(|e| io_err(out, e))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}
