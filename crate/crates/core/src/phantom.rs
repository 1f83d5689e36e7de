//! Synthetic tubular phantoms with exactly known topology.
//!
//! A phantom is built from a coarse lattice of centerline waypoints. Each
//! component lives in its own slab of the volume, far enough from its
//! neighbors that rasterized tubes can never touch across components. Within
//! a slab, the requested loop count is realized as a "ladder" (a chain of
//! lattice rectangles: L rectangles = cycle rank L), decorated with randomly
//! grown tree arms for variety. Lattice geometry keeps every junction mild:
//! vertex degree at most 3, incident edges on at most 2 distinct axes, and
//! all parallel runs a full lattice cell apart — the regimes in which
//! thinning a rasterized tube network reproduces the centerline topology
//! voxel-exactly.
//!
//! Corruptions edit the centerline layout (never raw voxels) and then
//! re-rasterize, so the corrupted truth counts are exact as well.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::graph_counts;
use crate::skeleton::SkeletonGraph;
use crate::volume::Volume;

/// Maximum spacing (voxels) between consecutive skeleton nodes along a
/// centerline edge.
const SUBDIV_STEP: f64 = 2.0;

/// Extra centerline-to-centerline clearance (voxels) beyond the tube
/// diameter, enough that two tube surfaces can never become 26-adjacent
/// after rasterization.
const SURFACE_GAP: f64 = 2.5;

const SQRT3: f64 = 1.732_050_807_568_877_3;

/// Request for one synthetic phantom.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub seed: u64,
    pub dims: [usize; 3],
    /// One entry per component: how many independent loops it carries.
    pub loops_per_component: Vec<usize>,
    /// Tube radius in voxels.
    pub tube_radius: f64,
    /// Maximum per-axis random displacement of centerline waypoints.
    /// Zero keeps every tube axis-aligned, which is the regime where
    /// thinning provably recovers the exact component and loop counts;
    /// nonzero values add realism but let tube junctions meet at angles
    /// that can leave tiny spurious cycles in the thinned graph.
    pub jitter: f64,
}

impl PhantomSpec {
    pub fn n_components(&self) -> usize {
        self.loops_per_component.len()
    }

    fn validate(&self) -> Result<()> {
        if self.loops_per_component.is_empty() {
            return Err(Error::invalid("at least one component is required"));
        }
        if self.dims.contains(&0) {
            return Err(Error::invalid("phantom dims must be positive"));
        }
        if !(self.tube_radius.is_finite() && self.tube_radius >= 1.0) {
            return Err(Error::invalid(format!(
                "tube_radius must be at least 1 voxel, got {}",
                self.tube_radius
            )));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(Error::invalid(format!(
                "jitter must be non-negative, got {}",
                self.jitter
            )));
        }
        Ok(())
    }
}

/// A phantom with its exact ground truth.
#[derive(Debug, Clone)]
pub struct PhantomTruth {
    pub volume: Volume,
    pub skeleton: SkeletonGraph,
    /// Connected components of the skeleton.
    pub components: usize,
    /// Cycle rank of the skeleton.
    pub loops: usize,
    /// Centerline layout, kept so corruptions can edit and re-rasterize.
    layout: Layout,
}

impl PhantomTruth {
    pub fn counts(&self) -> (usize, usize) {
        (self.components, self.loops)
    }
}

/// A corruption applied to the centerline layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptOp {
    /// Remove one bridge edge, splitting a component in two.
    BreakEdge,
    /// Grow one extra dead-end arm segment.
    AddSpur,
    /// Close one extra cycle (a direct chord between nearby waypoints, or a
    /// rectangular handle over an existing edge).
    AddBridge,
    /// Translate the whole structure by this offset (voxels). Integer
    /// offsets translate the rasterization exactly; fractional offsets
    /// re-rasterize off-grid, with the same junction caveat as jitter.
    Shift([f64; 3]),
}

#[derive(Debug, Clone)]
struct LayoutVertex {
    /// Unjittered lattice position (voxel coordinates, multiples of the
    /// cell pitch apart). Adjacency and occupancy reason on this.
    lat: [i64; 3],
    /// Actual (jittered, possibly shifted) centerline position.
    pos: [f64; 3],
    /// Which component's slab this vertex belongs to; new geometry anchored
    /// at this vertex must stay inside that slab.
    box_id: usize,
}

#[derive(Debug, Clone, Copy)]
struct Box3 {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Box3 {
    fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| self.lo[a] <= p[a] && p[a] <= self.hi[a])
    }
}

#[derive(Debug, Clone)]
struct Layout {
    dims: [usize; 3],
    tube_radius: f64,
    jitter: f64,
    /// Lattice pitch in voxels.
    cell: i64,
    vertices: Vec<LayoutVertex>,
    edges: Vec<[usize; 2]>,
    /// Lattice site -> vertex id.
    occupied: HashMap<[i64; 3], usize>,
    boxes: Vec<Box3>,
}

const AXIS_DIRS: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

impl Layout {
    fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    fn edge_axis(&self, e: [usize; 2]) -> usize {
        let (a, b) = (&self.vertices[e[0]].lat, &self.vertices[e[1]].lat);
        (0..3).find(|&i| a[i] != b[i]).expect("distinct lattice sites")
    }

    /// Axes already used by edges at `v`, as a 3-bit set.
    fn axes_at(&self, v: usize) -> u8 {
        let mut axes = 0u8;
        for &e in &self.edges {
            if e.contains(&v) {
                axes |= 1 << self.edge_axis(e);
            }
        }
        axes
    }

    /// Whether `v` can accept one more edge along `axis` (degree cap 3,
    /// at most 2 distinct axes — keeps junctions thinning-safe).
    fn can_attach(&self, v: usize, axis: usize) -> bool {
        if self.degree(v) >= 3 {
            return false;
        }
        (self.axes_at(v) | 1 << axis).count_ones() <= 2
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&[a, b]) || self.edges.contains(&[b, a])
    }

    fn jittered(&self, lat: [i64; 3], rng: &mut ChaCha8Rng) -> [f64; 3] {
        let mut pos = [lat[0] as f64, lat[1] as f64, lat[2] as f64];
        if self.jitter > 0.0 {
            for c in &mut pos {
                *c += rng.gen_range(-self.jitter..=self.jitter);
            }
        }
        pos
    }

    fn add_vertex(&mut self, lat: [i64; 3], box_id: usize, rng: &mut ChaCha8Rng) -> usize {
        let id = self.vertices.len();
        let pos = self.jittered(lat, rng);
        self.vertices.push(LayoutVertex { lat, pos, box_id });
        self.occupied.insert(lat, id);
        id
    }

    /// Grow a fresh degree-1 arm segment from `v` in lattice direction
    /// `dir`, if the constraints allow. Returns the new vertex id.
    fn try_grow(&mut self, v: usize, dir: [i64; 3], rng: &mut ChaCha8Rng) -> Option<usize> {
        let axis = (0..3).find(|&i| dir[i] != 0).unwrap();
        if !self.can_attach(v, axis) {
            return None;
        }
        let from = self.vertices[v].lat;
        let site = [
            from[0] + dir[0] * self.cell,
            from[1] + dir[1] * self.cell,
            from[2] + dir[2] * self.cell,
        ];
        if self.occupied.contains_key(&site) {
            return None;
        }
        let box_id = self.vertices[v].box_id;
        let site_pos = [site[0] as f64, site[1] as f64, site[2] as f64];
        if !self.boxes[box_id].contains(site_pos) {
            return None;
        }
        let u = self.add_vertex(site, box_id, rng);
        self.edges.push([v, u]);
        Some(u)
    }

    /// Union-find roots for every vertex, skipping one optional edge.
    fn component_roots(&self, skip_edge: Option<usize>) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (idx, &[a, b]) in self.edges.iter().enumerate() {
            if Some(idx) == skip_edge {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.vertices.len())
            .map(|i| find(&mut parent, i))
            .collect()
    }

    fn component_count(&self, skip_edge: Option<usize>) -> usize {
        let roots = self.component_roots(skip_edge);
        let mut distinct: Vec<usize> = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.len()
    }
}

/// Integer lattice pitch guaranteeing tube separation: diameter plus jitter
/// slack on both lines plus the surface gap.
fn lattice_cell(tube_radius: f64, jitter: f64) -> i64 {
    (2.0 * tube_radius + 2.0 * SQRT3 * jitter + SURFACE_GAP).ceil() as i64
}

/// Lattice sites available on `[lo, hi]` with pitch `cell`: site count and
/// integer origin (centered).
fn lattice_span(lo: f64, hi: f64, cell: i64) -> (usize, i64) {
    let lo_i = lo.ceil() as i64;
    let hi_i = hi.floor() as i64;
    if hi_i < lo_i {
        return (0, lo_i);
    }
    let count = (hi_i - lo_i) / cell + 1;
    let spare = (hi_i - lo_i) - (count - 1) * cell;
    (count as usize, lo_i + spare / 2)
}

/// Generate a phantom. Deterministic: the same spec (seed included) yields
/// a bit-identical result.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<PhantomTruth> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_components();
    let cell = lattice_cell(spec.tube_radius, spec.jitter);

    // Clearances: `outer` keeps tubes inside the volume; `sep` is the
    // per-side inset from a slab boundary, giving cross-component centerline
    // gaps of at least 4 r + slack (tube surfaces at least 2 r apart).
    let outer = spec.tube_radius + SQRT3 * spec.jitter + 1.5;
    let sep = 2.0 * spec.tube_radius + SQRT3 * spec.jitter + 1.5;

    let split_axis = (0..3).max_by_key(|&a| spec.dims[a]).unwrap();
    let extent = spec.dims[split_axis] as f64 - 1.0;
    let slab_w = extent / n as f64;

    let mut layout = Layout {
        dims: spec.dims,
        tube_radius: spec.tube_radius,
        jitter: spec.jitter,
        cell,
        vertices: Vec::new(),
        edges: Vec::new(),
        occupied: HashMap::new(),
        boxes: Vec::new(),
    };

    for (comp, &n_loops) in spec.loops_per_component.iter().enumerate() {
        // The component's slab, inset on every face.
        let mut lo = [0.0f64; 3];
        let mut hi = [0.0f64; 3];
        for a in 0..3 {
            if a == split_axis {
                let slab_lo = comp as f64 * slab_w;
                let slab_hi = (comp + 1) as f64 * slab_w;
                lo[a] = slab_lo + if comp == 0 { outer } else { sep };
                hi[a] = slab_hi - if comp + 1 == n { outer } else { sep };
            } else {
                lo[a] = outer;
                hi[a] = spec.dims[a] as f64 - 1.0 - outer;
            }
        }
        let spans: Vec<(usize, i64)> = (0..3).map(|a| lattice_span(lo[a], hi[a], cell)).collect();
        let counts = [spans[0].0, spans[1].0, spans[2].0];

        // Ladder axes: u (rails) gets the roomiest axis, w (rungs) the next.
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&a| std::cmp::Reverse(counts[a]));
        let (u, w, t) = (order[0], order[1], order[2]);

        // Two rows of `cols` columns. Rungs close the first n_loops
        // rectangles (rank is exactly n_loops); the minimum of two columns
        // keeps a rail edge available even in the tree case. The +2 on the
        // u requirement reserves room for the tail arm below.
        let cols = (n_loops + 1).max(2);
        if counts[u] < cols + 2 || counts[w] < 3 || counts[t] < 1 {
            return Err(Error::GeometryDoesNotFit(format!(
                "component {comp}: need a {}x3 lattice for {n_loops} loops, \
                 slab offers {}x{} (cell {cell}, dims {:?})",
                cols + 2,
                counts[u],
                counts[w],
                spec.dims
            )));
        }

        // Random placement inside the slab's lattice; base_w starts at 1 so
        // the row below row0 stays available for a bridge handle.
        let base_u = rng.gen_range(0..=counts[u] - cols - 2);
        let base_w = rng.gen_range(1..=counts[w] - 2);
        let base_t = rng.gen_range(0..counts[t]);

        let site = |iu: i64, iw: i64| -> [i64; 3] {
            let mut s = [0i64; 3];
            s[u] = spans[u].1 + (base_u as i64 + iu) * cell;
            s[w] = spans[w].1 + (base_w as i64 + iw) * cell;
            s[t] = spans[t].1 + base_t as i64 * cell;
            s
        };

        let mut row0 = Vec::with_capacity(cols);
        let mut row1 = Vec::with_capacity(cols);
        layout.boxes.push(Box3 { lo, hi });
        for i in 0..cols {
            row0.push(layout.add_vertex(site(i as i64, 0), comp, &mut rng));
            row1.push(layout.add_vertex(site(i as i64, 1), comp, &mut rng));
        }
        for i in 0..cols - 1 {
            layout.edges.push([row0[i], row0[i + 1]]); // rails
            layout.edges.push([row1[i], row1[i + 1]]);
        }
        for i in 0..=n_loops.min(cols - 1) {
            layout.edges.push([row0[i], row1[i]]); // rungs
        }

        // Tail: a two-cell arm off the far top corner. Guarantees a bridge
        // edge whose removal leaves two or more waypoints on each side, so
        // the break-edge corruption always has a candidate.
        let u_dir = {
            let mut d = [0i64; 3];
            d[u] = 1;
            d
        };
        let mid = layout
            .try_grow(row1[cols - 1], u_dir, &mut rng)
            .expect("tail room was reserved in the fit check");
        layout
            .try_grow(mid, u_dir, &mut rng)
            .expect("tail room was reserved in the fit check");

        // Sites and attachment points reserved for the add-bridge handle:
        // the tail's outer edge can always be lifted down to row 0, because
        // its endpoints carry at most two edges on one axis and the sites
        // under it stay free.
        let reserved_sites = [site(cols as i64, 0), site(cols as i64 + 1, 0)];
        let reserved_vertices = [mid, layout.vertices.len() - 1];

        // Decorative tree arms: random walks on free lattice sites, kept
        // away from the reserved handle. They change neither the component
        // count nor the cycle rank.
        let first_vertex = row0[0];
        let n_arms = rng.gen_range(1..=3);
        for _ in 0..n_arms {
            let starts: Vec<usize> = (first_vertex..layout.vertices.len())
                .filter(|&v| layout.degree(v) < 3 && !reserved_vertices.contains(&v))
                .collect();
            if starts.is_empty() {
                break;
            }
            let mut cur = starts[rng.gen_range(0..starts.len())];
            let steps = rng.gen_range(1..=3);
            for _ in 0..steps {
                let dirs: Vec<[i64; 3]> = AXIS_DIRS
                    .iter()
                    .copied()
                    .filter(|&d| {
                        let axis = (0..3).find(|&i| d[i] != 0).unwrap();
                        let from = layout.vertices[cur].lat;
                        let s = [
                            from[0] + d[0] * cell,
                            from[1] + d[1] * cell,
                            from[2] + d[2] * cell,
                        ];
                        layout.can_attach(cur, axis)
                            && !layout.occupied.contains_key(&s)
                            && !reserved_sites.contains(&s)
                            && layout.boxes[comp].contains([s[0] as f64, s[1] as f64, s[2] as f64])
                    })
                    .collect();
                if dirs.is_empty() {
                    break;
                }
                let d = dirs[rng.gen_range(0..dirs.len())];
                match layout.try_grow(cur, d, &mut rng) {
                    Some(next) => cur = next,
                    None => break,
                }
            }
        }
    }

    realize(layout)
}

/// Apply corruptions to a phantom's centerline layout and re-rasterize.
/// Deterministic given the seed. Returned counts are recomputed from the
/// corrupted skeleton.
pub fn corrupt_phantom(truth: &PhantomTruth, ops: &[CorruptOp], seed: u64) -> Result<PhantomTruth> {
    let mut layout = truth.layout.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &op in ops {
        apply_op(&mut layout, op, &mut rng)?;
    }
    realize(layout)
}

fn apply_op(layout: &mut Layout, op: CorruptOp, rng: &mut ChaCha8Rng) -> Result<()> {
    match op {
        CorruptOp::BreakEdge => {
            let base = layout.component_count(None);
            // Bridges whose removal leaves at least two vertices on each
            // side, so neither half degenerates to a lone ball.
            let candidates: Vec<usize> = (0..layout.edges.len())
                .filter(|&e| {
                    if layout.component_count(Some(e)) <= base {
                        return false;
                    }
                    let roots = layout.component_roots(Some(e));
                    let [a, b] = layout.edges[e];
                    let size = |v: usize| roots.iter().filter(|&&r| r == roots[v]).count();
                    size(a) >= 2 && size(b) >= 2
                })
                .collect();
            if candidates.is_empty() {
                return Err(Error::CorruptionImpossible(
                    "no breakable bridge edge (every bridge would strand a lone vertex)".into(),
                ));
            }
            let e = candidates[rng.gen_range(0..candidates.len())];
            layout.edges.remove(e);
            Ok(())
        }
        CorruptOp::AddSpur => {
            let candidates = growth_candidates(layout);
            if candidates.is_empty() {
                return Err(Error::CorruptionImpossible(
                    "no room to grow a spur anywhere".into(),
                ));
            }
            let (v, d) = candidates[rng.gen_range(0..candidates.len())];
            layout.try_grow(v, d, rng).expect("candidate was validated");
            Ok(())
        }
        CorruptOp::AddBridge => add_bridge(layout, rng),
        CorruptOp::Shift(delta) => {
            let r = layout.tube_radius;
            for v in &layout.vertices {
                for (a, &d) in delta.iter().enumerate() {
                    let p = v.pos[a] + d;
                    if p < r + 1.0 || p > layout.dims[a] as f64 - 2.0 - r {
                        return Err(Error::CorruptionImpossible(format!(
                            "shift {delta:?} pushes the tube outside the volume"
                        )));
                    }
                }
            }
            for v in &mut layout.vertices {
                for (p, d) in v.pos.iter_mut().zip(delta) {
                    *p += d;
                }
            }
            for b in &mut layout.boxes {
                for (lo, d) in b.lo.iter_mut().zip(delta) {
                    *lo += d;
                }
                for (hi, d) in b.hi.iter_mut().zip(delta) {
                    *hi += d;
                }
            }
            Ok(())
        }
    }
}

/// All (vertex, direction) pairs where a one-cell arm can grow.
fn growth_candidates(layout: &Layout) -> Vec<(usize, [i64; 3])> {
    let mut out = Vec::new();
    for v in 0..layout.vertices.len() {
        for &d in &AXIS_DIRS {
            let axis = (0..3).find(|&i| d[i] != 0).unwrap();
            if !layout.can_attach(v, axis) {
                continue;
            }
            let from = layout.vertices[v].lat;
            let cell = layout.cell;
            let s = [from[0] + d[0] * cell, from[1] + d[1] * cell, from[2] + d[2] * cell];
            let box_id = layout.vertices[v].box_id;
            if !layout.occupied.contains_key(&s)
                && layout.boxes[box_id].contains([s[0] as f64, s[1] as f64, s[2] as f64])
            {
                out.push((v, d));
            }
        }
    }
    out
}

enum BridgeForm {
    /// New edge between two already-adjacent lattice vertices.
    Chord(usize, usize),
    /// Rectangle raised over an existing edge: two new vertices, three new
    /// edges, one new cycle.
    Handle(usize, [i64; 3]),
}

fn add_bridge(layout: &mut Layout, rng: &mut ChaCha8Rng) -> Result<()> {
    let roots = layout.component_roots(None);
    let mut candidates: Vec<BridgeForm> = Vec::new();

    // Direct chords: same component, lattice-adjacent, not already joined,
    // and both endpoints can take the edge.
    for v in 0..layout.vertices.len() {
        for axis in 0..3 {
            let mut s = layout.vertices[v].lat;
            s[axis] += layout.cell;
            let Some(&u) = layout.occupied.get(&s) else {
                continue;
            };
            if roots[v] == roots[u]
                && !layout.has_edge(v, u)
                && layout.can_attach(v, axis)
                && layout.can_attach(u, axis)
            {
                candidates.push(BridgeForm::Chord(v, u));
            }
        }
    }

    // Handles: lift an existing edge sideways into a rectangle.
    for e in 0..layout.edges.len() {
        let [a, b] = layout.edges[e];
        let edge_axis = layout.edge_axis([a, b]);
        for &d in &AXIS_DIRS {
            let axis = (0..3).find(|&i| d[i] != 0).unwrap();
            if axis == edge_axis {
                continue;
            }
            if !(layout.can_attach(a, axis) && layout.can_attach(b, axis)) {
                continue;
            }
            let cell = layout.cell;
            let lift = |lat: [i64; 3]| {
                [
                    lat[0] + d[0] * cell,
                    lat[1] + d[1] * cell,
                    lat[2] + d[2] * cell,
                ]
            };
            let (sa, sb) = (lift(layout.vertices[a].lat), lift(layout.vertices[b].lat));
            let box_id = layout.vertices[a].box_id;
            let inside = |s: [i64; 3]| {
                layout.boxes[box_id].contains([s[0] as f64, s[1] as f64, s[2] as f64])
            };
            if !layout.occupied.contains_key(&sa)
                && !layout.occupied.contains_key(&sb)
                && inside(sa)
                && inside(sb)
            {
                candidates.push(BridgeForm::Handle(e, d));
            }
        }
    }

    if candidates.is_empty() {
        return Err(Error::CorruptionImpossible(
            "no feasible chord or handle to close a new cycle".into(),
        ));
    }
    match candidates[rng.gen_range(0..candidates.len())] {
        BridgeForm::Chord(v, u) => layout.edges.push([v, u]),
        BridgeForm::Handle(e, d) => {
            let [a, b] = layout.edges[e];
            let cell = layout.cell;
            let lift = |lat: [i64; 3]| {
                [
                    lat[0] + d[0] * cell,
                    lat[1] + d[1] * cell,
                    lat[2] + d[2] * cell,
                ]
            };
            let box_id = layout.vertices[a].box_id;
            let c = layout.add_vertex(lift(layout.vertices[a].lat), box_id, rng);
            let dd = layout.add_vertex(lift(layout.vertices[b].lat), box_id, rng);
            layout.edges.push([a, c]);
            layout.edges.push([c, dd]);
            layout.edges.push([dd, b]);
        }
    }
    Ok(())
}

/// Turn a layout into its truth triple: subdivided skeleton graph,
/// rasterized volume, recomputed counts.
fn realize(layout: Layout) -> Result<PhantomTruth> {
    let r = layout.tube_radius;
    for v in &layout.vertices {
        for a in 0..3 {
            if v.pos[a] < r || v.pos[a] > layout.dims[a] as f64 - 1.0 - r {
                return Err(Error::GeometryDoesNotFit(format!(
                    "centerline point {:?} leaves no room for a radius-{r} tube in dims {:?}",
                    v.pos, layout.dims
                )));
            }
        }
    }

    // Skeleton: layout vertices plus interior subdivision points.
    let mut nodes: Vec<[f64; 3]> = layout.vertices.iter().map(|v| v.pos).collect();
    let mut edges: Vec<[u32; 2]> = Vec::new();
    for &[a, b] in &layout.edges {
        let (pa, pb) = (layout.vertices[a].pos, layout.vertices[b].pos);
        let len = dist(pa, pb);
        let segs = (len / SUBDIV_STEP).ceil().max(1.0) as usize;
        let mut prev = a as u32;
        for k in 1..segs {
            let t = k as f64 / segs as f64;
            let p = [
                pa[0] + t * (pb[0] - pa[0]),
                pa[1] + t * (pb[1] - pa[1]),
                pa[2] + t * (pb[2] - pa[2]),
            ];
            let id = nodes.len() as u32;
            nodes.push(p);
            edges.push([prev, id]);
            prev = id;
        }
        edges.push([prev, b as u32]);
    }
    let skeleton = SkeletonGraph::new(nodes, edges)?;
    let (components, loops) = graph_counts(&skeleton);

    // Volume: union of capsules around the layout edges (and balls around
    // any isolated vertices, which corruption can in principle produce).
    let [nx, ny, nz] = layout.dims;
    let mut data = vec![0u8; nx * ny * nz];
    let mut paint_capsule = |p: [f64; 3], q: [f64; 3]| {
        let lo = |a: usize| ((p[a].min(q[a]) - r).floor().max(0.0)) as usize;
        let hi = |a: usize, n: usize| ((p[a].max(q[a]) + r).ceil() as usize).min(n - 1);
        for z in lo(2)..=hi(2, nz) {
            for y in lo(1)..=hi(1, ny) {
                for x in lo(0)..=hi(0, nx) {
                    let c = [x as f64, y as f64, z as f64];
                    if point_segment_dist2(c, p, q) <= r * r {
                        data[x + nx * (y + ny * z)] = 1;
                    }
                }
            }
        }
    };
    let mut isolated = vec![true; layout.vertices.len()];
    for &[a, b] in &layout.edges {
        isolated[a] = false;
        isolated[b] = false;
        paint_capsule(layout.vertices[a].pos, layout.vertices[b].pos);
    }
    for (v, iso) in isolated.iter().enumerate() {
        if *iso {
            let p = layout.vertices[v].pos;
            paint_capsule(p, p);
        }
    }
    let volume = Volume::from_u8(layout.dims, [1.0; 3], data)?;

    Ok(PhantomTruth {
        volume,
        skeleton,
        components,
        loops,
        layout,
    })
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Squared distance from point `c` to segment `pq`.
fn point_segment_dist2(c: [f64; 3], p: [f64; 3], q: [f64; 3]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let w = [c[0] - p[0], c[1] - p[1], c[2] - p[2]];
    let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let t = if dd > 0.0 {
        ((w[0] * d[0] + w[1] * d[1] + w[2] * d[2]) / dd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let e = [w[0] - t * d[0], w[1] - t * d[1], w[2] - t * d[2]];
    e[0] * e[0] + e[1] * e[1] + e[2] * e[2]
}
