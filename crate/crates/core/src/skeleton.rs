//! Skeleton graphs: spatial nodes joined by undirected edges.
//!
//! A skeleton is the 1-voxel-wide residue of a tubular mask, viewed as a
//! graph. Nodes carry world coordinates (voxel index times spacing); edges
//! join voxels that touch in the 26-neighborhood sense. The JSON form is
//!
//! ```json
//! {"nodes":[[x,y,z], ...], "edges":[[i,j], ...]}
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::Volume;

/// Undirected spatial graph. Edges are stored with the smaller endpoint
/// first, deduplicated, and sorted; adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonGraph {
    nodes: Vec<[f64; 3]>,
    edges: Vec<[u32; 2]>,
    adjacency: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct SkeletonFile {
    nodes: Vec<[f64; 3]>,
    edges: Vec<[u32; 2]>,
}

impl SkeletonGraph {
    /// Build a graph from node positions and edge pairs. Self-edges and
    /// out-of-range endpoints are rejected; duplicate edges (in either
    /// orientation) collapse to one.
    pub fn new(nodes: Vec<[f64; 3]>, edges: Vec<[u32; 2]>) -> Result<Self> {
        let n = nodes.len();
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("too many nodes: {n}")));
        }
        for pos in &nodes {
            if pos.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("non-finite node position {pos:?}")));
            }
        }
        let mut normalized: Vec<[u32; 2]> = Vec::with_capacity(edges.len());
        for &[a, b] in &edges {
            if a == b {
                return Err(Error::SelfEdge(a));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::DanglingEdge { a, b, nodes: n });
            }
            normalized.push(if a < b { [a, b] } else { [b, a] });
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); n];
        for &[a, b] in &normalized {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(SkeletonGraph {
            nodes,
            edges: normalized,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn position(&self, node: u32) -> [f64; 3] {
        self.nodes[node as usize]
    }

    /// Neighbors of `node`, ascending.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: u32) -> usize {
        self.adjacency[node as usize].len()
    }
}

/// Load a skeleton graph from JSON.
pub fn load_skeleton(path: impl AsRef<Path>) -> Result<SkeletonGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SkeletonFile = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        what: "skeleton",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    SkeletonGraph::new(file.nodes, file.edges)
}

/// Either of the two on-disk input shapes the pipeline accepts.
#[derive(Debug, Clone)]
pub enum VolumeOrSkeleton {
    Volume(Volume),
    Skeleton(SkeletonGraph),
}

/// Load a JSON file that is either a volume header or a skeleton graph,
/// deciding by its top-level keys (`dims` vs `nodes`).
pub fn load_volume_or_skeleton(path: impl AsRef<Path>) -> Result<VolumeOrSkeleton> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        what: "volume or skeleton",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let malformed = |detail: &str| Error::Malformed {
        what: "volume or skeleton",
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let obj = value.as_object().ok_or_else(|| malformed("not a JSON object"))?;
    if obj.contains_key("nodes") {
        Ok(VolumeOrSkeleton::Skeleton(load_skeleton(path)?))
    } else if obj.contains_key("dims") {
        Ok(VolumeOrSkeleton::Volume(crate::volume::load_volume(path)?))
    } else {
        Err(malformed(
            "expected a volume header (with \"dims\") or a skeleton (with \"nodes\")",
        ))
    }
}

/// Save a skeleton graph as JSON.
pub fn save_skeleton(g: &SkeletonGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = SkeletonFile {
        nodes: g.nodes.clone(),
        edges: g.edges.clone(),
    };
    let text = serde_json::to_string(&file).expect("skeleton serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Offsets covering half of the 26-neighborhood: exactly one of {o, -o}
/// appears for every nonzero offset, so scanning voxels in order and probing
/// only these yields each adjacency once.
const HALF_NEIGHBORHOOD: [[i32; 3]; 13] = [
    [1, 0, 0],
    [-1, 1, 0],
    [0, 1, 0],
    [1, 1, 0],
    [-1, -1, 1],
    [0, -1, 1],
    [1, -1, 1],
    [-1, 0, 1],
    [0, 0, 1],
    [1, 0, 1],
    [-1, 1, 1],
    [0, 1, 1],
    [1, 1, 1],
];

/// Convert a thinned binary volume into a skeleton graph: one node per
/// foreground voxel at its spacing-scaled position, one edge per
/// 26-adjacent foreground pair. Node order follows the flat scan order of
/// the volume.
pub fn graph_from_skeleton_voxels(v: &Volume) -> Result<SkeletonGraph> {
    let data = v.as_u8()?;
    let [nx, ny, nz] = v.dims();
    let [sx, sy, sz] = v.spacing();

    // Dense map from flat voxel index to node id (u32::MAX = background).
    let mut node_of = vec![u32::MAX; data.len()];
    let mut nodes = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = v.index(x, y, z);
                if data[i] == 1 {
                    node_of[i] = nodes.len() as u32;
                    nodes.push([x as f64 * sx, y as f64 * sy, z as f64 * sz]);
                }
            }
        }
    }

    let mut edges = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = v.index(x, y, z);
                let a = node_of[i];
                if a == u32::MAX {
                    continue;
                }
                for [dx, dy, dz] in HALF_NEIGHBORHOOD {
                    let (qx, qy, qz) = (x as i32 + dx, y as i32 + dy, z as i32 + dz);
                    if qx < 0
                        || qy < 0
                        || qz < 0
                        || qx >= nx as i32
                        || qy >= ny as i32
                        || qz >= nz as i32
                    {
                        continue;
                    }
                    let b = node_of[v.index(qx as usize, qy as usize, qz as usize)];
                    if b != u32::MAX {
                        edges.push([a, b]);
                    }
                }
            }
        }
    }
    SkeletonGraph::new(nodes, edges)
}

/// Debug check used in tests: true iff each undirected adjacency appears
/// exactly once in `edges`.
#[doc(hidden)]
pub fn edges_are_unique(g: &SkeletonGraph) -> bool {
    let set: HashSet<[u32; 2]> = g.edges.iter().copied().collect();
    set.len() == g.edges.len()
}
