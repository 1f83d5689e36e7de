//! Topological features of a skeleton graph: connected components and loops.
//!
//! Components below a minimum node count are discarded (they are almost
//! always reconstruction debris) and take no part in loop search or
//! matching. Loops are compact cycles, one per independent cycle of each
//! surviving component, so the loop count always equals the component's
//! cycle rank E - V + 1.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::skeleton::SkeletonGraph;

/// What a [`TopoFeature`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Component,
    Loop,
}

/// A set of nodes in a shared skeleton graph: one connected component, or
/// the node set of one loop.
#[derive(Debug, Clone)]
pub struct TopoFeature {
    kind: FeatureKind,
    /// Sorted ascending, never empty.
    node_ids: Vec<u32>,
    owner: Arc<SkeletonGraph>,
}

impl TopoFeature {
    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    /// Node indices into the owning graph, ascending.
    pub fn node_ids(&self) -> &[u32] {
        &self.node_ids
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn graph(&self) -> &Arc<SkeletonGraph> {
        &self.owner
    }

    /// World positions of this feature's nodes, in node-id order.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.node_ids
            .iter()
            .map(|&i| self.owner.position(i))
            .collect()
    }
}

/// A graph decomposed into its surviving components and their loops.
#[derive(Debug, Clone)]
pub struct TopoDecomposition {
    pub components: Vec<TopoFeature>,
    pub loops: Vec<TopoFeature>,
}

impl TopoDecomposition {
    /// (number of components, number of loops).
    pub fn counts(&self) -> (usize, usize) {
        (self.components.len(), self.loops.len())
    }
}

/// Connected components with at least `min_size` nodes, ordered by
/// descending size and then by smallest contained node id. A `min_size` of
/// 0 behaves like 1 (features are never empty).
pub fn extract_components(g: &Arc<SkeletonGraph>, min_size: usize) -> Vec<TopoFeature> {
    let n = g.node_count();
    let min_size = min_size.max(1);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut nodes = vec![start];
        seen[start as usize] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    nodes.push(v);
                    queue.push_back(v);
                }
            }
        }
        if nodes.len() >= min_size {
            nodes.sort_unstable();
            out.push(TopoFeature {
                kind: FeatureKind::Component,
                node_ids: nodes,
                owner: Arc::clone(g),
            });
        }
    }
    // Scan order already yields ascending smallest-node-id; make the full
    // ordering explicit and stable.
    out.sort_by(|a, b| {
        b.node_ids
            .len()
            .cmp(&a.node_ids.len())
            .then(a.node_ids[0].cmp(&b.node_ids[0]))
    });
    out
}

/// Breadth-first spanning tree rooted at `root`, restricted to one
/// component. Returns parent links (parent[root] = root) and the set of
/// tree edges, normalized smaller-id-first.
fn bfs_tree(g: &SkeletonGraph, root: u32) -> (Vec<(u32, u32)>, HashSet<[u32; 2]>) {
    let mut parent: Vec<(u32, u32)> = Vec::new(); // (node, parent)
    let mut parent_of = std::collections::HashMap::new();
    parent_of.insert(root, root);
    parent.push((root, root));
    let mut tree_edges = HashSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(slot) = parent_of.entry(v) {
                slot.insert(u);
                parent.push((v, u));
                tree_edges.insert(if u < v { [u, v] } else { [v, u] });
                queue.push_back(v);
            }
        }
    }
    (parent, tree_edges)
}

/// Shortest path from `a` to `b` avoiding the single edge (a, b), by BFS
/// with ascending-neighbor tie-breaking. Returns the node sequence a..=b.
fn shortest_detour(g: &SkeletonGraph, a: u32, b: u32) -> Option<Vec<u32>> {
    let mut prev = std::collections::HashMap::new();
    prev.insert(a, a);
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if (u == a && v == b) || (u == b && v == a) {
                continue; // the chord itself is off limits
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = prev.entry(v) {
                slot.insert(u);
                if v == b {
                    let mut path = vec![b];
                    let mut cur = b;
                    while cur != a {
                        cur = prev[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

/// Node set of the cycle formed by the tree paths root→a and root→b plus
/// the chord (a, b).
fn fundamental_cycle_nodes(parent_of: &std::collections::HashMap<u32, u32>, a: u32, b: u32) -> Vec<u32> {
    let ancestors = |mut x: u32| {
        let mut path = vec![x];
        while parent_of[&x] != x {
            x = parent_of[&x];
            path.push(x);
        }
        path
    };
    let pa = ancestors(a);
    let pb = ancestors(b);
    let set_a: HashSet<u32> = pa.iter().copied().collect();
    // Walk b's ancestry until it meets a's; the meet is the lowest common
    // ancestor, and the cycle is both partial paths joined there.
    let mut nodes: Vec<u32> = Vec::new();
    let mut lca = b;
    for &x in &pb {
        if set_a.contains(&x) {
            lca = x;
            break;
        }
        nodes.push(x);
    }
    for &x in &pa {
        nodes.push(x);
        if x == lca {
            break;
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Loops of the surviving components: per component, one compact cycle per
/// independent cycle (exactly cycle-rank many).
///
/// Construction: breadth-first spanning tree from the component's smallest
/// node id; each non-tree edge, taken in sorted order, contributes the
/// shortest cycle through it (shortest detour between its endpoints plus
/// the edge). Duplicate node sets fall back to the edge's fundamental tree
/// cycle; in the degenerate case where that also repeats, the duplicate is
/// kept so the count stays equal to the cycle rank.
pub fn extract_loops(g: &Arc<SkeletonGraph>, components: &[TopoFeature]) -> Vec<TopoFeature> {
    let mut out = Vec::new();
    for comp in components {
        let nodes = &comp.node_ids;
        let in_comp: HashSet<u32> = nodes.iter().copied().collect();
        let edge_count = g
            .edges()
            .iter()
            .filter(|[a, _]| in_comp.contains(a))
            .count();
        if edge_count < nodes.len() {
            continue; // a tree: cycle rank 0
        }

        let root = nodes[0];
        let (parent_pairs, tree_edges) = bfs_tree(g, root);
        let parent_of: std::collections::HashMap<u32, u32> = parent_pairs.into_iter().collect();

        let mut seen_sets: HashSet<Vec<u32>> = HashSet::new();
        for &[a, b] in g.edges() {
            if !in_comp.contains(&a) || tree_edges.contains(&[a, b]) {
                continue;
            }
            let mut nodes = shortest_detour(g, a, b)
                .expect("chord endpoints stay connected without the chord");
            nodes.sort_unstable();
            if seen_sets.contains(&nodes) {
                nodes = fundamental_cycle_nodes(&parent_of, a, b);
            }
            seen_sets.insert(nodes.clone());
            out.push(TopoFeature {
                kind: FeatureKind::Loop,
                node_ids: nodes,
                owner: Arc::clone(g),
            });
        }
    }
    out
}

/// Decompose a graph into components (at least `min_size` nodes) and their
/// loops.
pub fn decompose(g: SkeletonGraph, min_size: usize) -> TopoDecomposition {
    let g = Arc::new(g);
    let components = extract_components(&g, min_size);
    let loops = extract_loops(&g, &components);
    TopoDecomposition { components, loops }
}

/// Unfiltered topology of a graph: (connected component count, cycle rank).
/// Cycle rank is E - V + C, the number of independent cycles.
pub fn graph_counts(g: &SkeletonGraph) -> (usize, usize) {
    let n = g.node_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    for &[a, b] in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra as usize] = rb;
        }
    }
    let components = (0..n as u32).filter(|&i| find(&mut parent, i) == i).count();
    let rank = g.edge_count() + components - n;
    (components, rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[[u32; 2]]) -> Arc<SkeletonGraph> {
        // Node positions are irrelevant for extraction; spread them on a line.
        let nodes = (0..n).map(|i| [i as f64, 0.0, 0.0]).collect();
        Arc::new(SkeletonGraph::new(nodes, edges.to_vec()).unwrap())
    }

    fn path_edges(ids: &[u32]) -> Vec<[u32; 2]> {
        ids.windows(2).map(|w| [w[0], w[1]]).collect()
    }

    /// Oracle: all node sets that form a single simple cycle, found by
    /// checking every node subset for 2-regularity plus connectedness.
    fn all_cycle_node_sets(g: &SkeletonGraph) -> HashSet<Vec<u32>> {
        let n = g.node_count();
        assert!(n <= 20, "oracle is exponential");
        let mut out = HashSet::new();
        for subset in 1u32..(1 << n) {
            let members: Vec<u32> =
                (0..n as u32).filter(|i| subset & (1 << i) != 0).collect();
            if members.len() < 3 {
                continue;
            }
            let in_set = |x: u32| subset & (1 << x) != 0;
            let two_regular = members
                .iter()
                .all(|&m| g.neighbors(m).iter().filter(|&&v| in_set(v)).count() == 2);
            if !two_regular {
                continue;
            }
            // Connectivity walk inside the subset.
            let mut seen = HashSet::from([members[0]]);
            let mut stack = vec![members[0]];
            while let Some(u) = stack.pop() {
                for &v in g.neighbors(u) {
                    if in_set(v) && seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            if seen.len() == members.len() {
                out.insert(members);
            }
        }
        out
    }

    #[test]
    fn min_size_filter_drops_small_components() {
        // Disjoint paths of 6 and 3 nodes.
        let mut edges = path_edges(&[0, 1, 2, 3, 4, 5]);
        edges.extend(path_edges(&[6, 7, 8]));
        let g = graph(9, &edges);
        let comps = extract_components(&g, 5);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].node_ids(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn min_size_one_partitions_all_nodes() {
        let mut edges = path_edges(&[0, 1, 2]);
        edges.extend(path_edges(&[5, 6]));
        let g = graph(8, &edges); // nodes 3, 4, 7 are isolated
        let comps = extract_components(&g, 1);
        let mut all: Vec<u32> = comps.iter().flat_map(|c| c.node_ids().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
        let total: usize = comps.iter().map(|c| c.len()).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn components_ordered_by_size_then_smallest_id() {
        let mut edges = path_edges(&[0, 1]); // size 2, min id 0
        edges.extend(path_edges(&[2, 3, 4])); // size 3, min id 2
        edges.extend(path_edges(&[5, 6])); // size 2, min id 5
        let g = graph(7, &edges);
        let comps = extract_components(&g, 1);
        let firsts: Vec<u32> = comps.iter().map(|c| c.node_ids()[0]).collect();
        assert_eq!(firsts, vec![2, 0, 5]);
    }

    #[test]
    fn tree_has_no_loops() {
        let g = graph(6, &[[0, 1], [1, 2], [1, 3], [3, 4], [3, 5]]);
        let comps = extract_components(&g, 1);
        assert!(extract_loops(&g, &comps).is_empty());
    }

    #[test]
    fn single_cycle_is_one_loop_with_all_nodes() {
        let mut edges = path_edges(&[0, 1, 2, 3, 4, 5, 6, 7]);
        edges.push([7, 0]);
        let g = graph(8, &edges);
        let comps = extract_components(&g, 1);
        let loops = extract_loops(&g, &comps);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].node_ids(), &(0..8).collect::<Vec<u32>>()[..]);
        assert_eq!(loops[0].kind(), FeatureKind::Loop);
    }

    /// Two junctions joined by three disjoint paths of 3, 3, and 4 edges.
    fn theta_graph() -> Arc<SkeletonGraph> {
        // Junctions 0 and 1; path A: 0-2-3-1, path B: 0-4-5-1,
        // path C: 0-6-7-8-1.
        graph(
            9,
            &[
                [0, 2],
                [2, 3],
                [3, 1],
                [0, 4],
                [4, 5],
                [5, 1],
                [0, 6],
                [6, 7],
                [7, 8],
                [8, 1],
            ],
        )
    }

    #[test]
    fn theta_graph_yields_the_two_compact_cycles() {
        let g = theta_graph();
        let comps = extract_components(&g, 1);
        let loops = extract_loops(&g, &comps);
        assert_eq!(loops.len(), 2, "cycle rank of the theta graph is 2");

        let mut sizes: Vec<usize> = loops.iter().map(|l| l.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![6, 7]);

        // Every returned node set must be a genuine simple cycle.
        let oracle = all_cycle_node_sets(&g);
        assert_eq!(oracle.len(), 3, "theta graph has exactly three cycles");
        for l in &loops {
            assert!(oracle.contains(l.node_ids()));
        }
        // And the two returned sets must differ.
        assert_ne!(loops[0].node_ids(), loops[1].node_ids());
    }

    #[test]
    fn loop_count_matches_cycle_rank_on_a_dense_component() {
        // A 3x3 king-graph-like mesh: rank = E - V + 1.
        let edges = [
            [0u32, 1],
            [1, 2],
            [3, 4],
            [4, 5],
            [6, 7],
            [7, 8],
            [0, 3],
            [3, 6],
            [1, 4],
            [4, 7],
            [2, 5],
            [5, 8],
        ];
        let g = graph(9, &edges);
        let comps = extract_components(&g, 1);
        let loops = extract_loops(&g, &comps);
        assert_eq!(loops.len(), edges.len() - 9 + 1);
        let oracle = all_cycle_node_sets(&g);
        for l in &loops {
            assert!(oracle.contains(l.node_ids()), "{:?}", l.node_ids());
        }
    }

    #[test]
    fn loops_have_min_induced_degree_two() {
        let g = theta_graph();
        let comps = extract_components(&g, 1);
        for l in extract_loops(&g, &comps) {
            let set: HashSet<u32> = l.node_ids().iter().copied().collect();
            for &m in l.node_ids() {
                let deg = g.neighbors(m).iter().filter(|&&v| set.contains(&v)).count();
                assert!(deg >= 2, "node {m} has induced degree {deg}");
            }
        }
    }

    #[test]
    fn loops_skipped_in_filtered_out_components() {
        // A triangle (3 nodes, has a loop) plus a 6-node path; with
        // min_size 5 the triangle is debris and contributes nothing.
        let mut edges = vec![[0u32, 1], [1, 2], [2, 0]];
        edges.extend(path_edges(&[3, 4, 5, 6, 7, 8]));
        let g = graph(9, &edges);
        let comps = extract_components(&g, 5);
        assert_eq!(comps.len(), 1);
        assert!(extract_loops(&g, &comps).is_empty());
        let d = decompose((*g).clone(), 5);
        assert_eq!(d.counts(), (1, 0));
    }

    #[test]
    fn fundamental_cycle_walks_both_tree_branches() {
        // Tree: 0-1-2 and 0-3; chord (2, 3) closes the cycle {0,1,2,3}.
        let parent_of: std::collections::HashMap<u32, u32> =
            [(0, 0), (1, 0), (2, 1), (3, 0)].into_iter().collect();
        assert_eq!(fundamental_cycle_nodes(&parent_of, 2, 3), vec![0, 1, 2, 3]);
        // A chord between siblings meets at their common parent.
        assert_eq!(fundamental_cycle_nodes(&parent_of, 1, 3), vec![0, 1, 3]);
    }

    #[test]
    fn relabeling_preserves_counts_and_sizes() {
        let g1 = theta_graph();
        // Relabel i -> 8 - i.
        let relabeled: Vec<[u32; 2]> = g1
            .edges()
            .iter()
            .map(|&[a, b]| [8 - a, 8 - b])
            .collect();
        let g2 = graph(9, &relabeled);
        let d1 = decompose((*g1).clone(), 1);
        let d2 = decompose((*g2).clone(), 1);
        assert_eq!(d1.counts(), d2.counts());
        let sizes = |d: &TopoDecomposition| {
            let mut s: Vec<usize> = d.loops.iter().map(|l| l.len()).collect();
            s.sort_unstable();
            s
        };
        assert_eq!(sizes(&d1), sizes(&d2));
    }

    #[test]
    fn parallel_equal_length_paths_still_yield_rank_many_distinct_loops() {
        // Two junctions joined by three paths of equal length 3: every
        // cycle has the same length, so only the tie-breaking rules keep
        // the two reported loops apart.
        let g = graph(
            8,
            &[
                [0, 2],
                [2, 3],
                [3, 1],
                [0, 4],
                [4, 5],
                [5, 1],
                [0, 6],
                [6, 7],
                [7, 1],
            ],
        );
        let comps = extract_components(&g, 1);
        let loops = extract_loops(&g, &comps);
        assert_eq!(loops.len(), 2);
        assert_ne!(loops[0].node_ids(), loops[1].node_ids());
        let oracle = all_cycle_node_sets(&g);
        for l in &loops {
            assert!(oracle.contains(l.node_ids()));
        }
    }
}
