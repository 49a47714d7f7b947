//! Expansion certificates: proper edge subdivision, the disjoint-edge-pair
//! graph and its acyclicity, and bounded valence by vertex-type closure.

use super::complex::CellComplex;
use super::rule::{SideRef, SubdivisionRule, TileTypeId};
use std::collections::BTreeSet;

/// Smallest `n ≤ n_max` at which every edge type's iterated subdivision has
/// length at least 2, or `None` when no such level exists within the cap.
pub fn condition1(rule: &SubdivisionRule, n_max: u32) -> Option<u32> {
    let n_types = rule.edge_types.len();
    // Saturating lengths; 2 is enough to witness "properly subdivides".
    let mut len: Vec<u64> = vec![1; n_types];
    for level in 1..=n_max {
        let mut next = vec![0u64; n_types];
        for (i, e) in rule.edge_types.iter().enumerate() {
            let mut total = 0u64;
            for piece in &e.subdivision {
                total = (total + len[piece.edge]).min(1_000_000);
            }
            next[i] = total;
        }
        len = next;
        if len.iter().all(|&l| l >= 2) {
            return Some(level);
        }
    }
    None
}

/// The directed graph on ordered pairs of disjoint closed edges of each tile
/// type. Disjoint means sharing no vertex: for a k-gon that excludes equal
/// and cyclically adjacent positions, leaving k(k-3) ordered pairs.
#[derive(Debug, Clone)]
pub struct PairGraph {
    /// Vertices `(tile, word position, word position)`.
    pub nodes: Vec<(TileTypeId, usize, usize)>,
    /// Adjacency by node index.
    pub succ: Vec<Vec<usize>>,
}

impl PairGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Depth-first acyclicity check with a witness cycle if one exists.
    pub fn find_cycle(&self) -> Option<Vec<(TileTypeId, usize, usize)>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let mut color = vec![Color::White; self.nodes.len()];
        let mut stack_trace: Vec<usize> = Vec::new();

        // Iterative DFS keeping the gray path for witness extraction.
        for start in 0..self.nodes.len() {
            if color[start] != Color::White {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = Color::Gray;
            stack_trace.push(start);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next < self.succ[node].len() {
                    let child = self.succ[node][*next];
                    *next += 1;
                    match color[child] {
                        Color::White => {
                            color[child] = Color::Gray;
                            stack.push((child, 0));
                            stack_trace.push(child);
                        }
                        Color::Gray => {
                            // Witness: the cycle from child through the path.
                            let pos = stack_trace.iter().position(|&n| n == child).unwrap();
                            return Some(
                                stack_trace[pos..].iter().map(|&n| self.nodes[n]).collect(),
                            );
                        }
                        Color::Black => {}
                    }
                } else {
                    color[node] = Color::Black;
                    stack.pop();
                    stack_trace.pop();
                }
            }
        }
        None
    }
}

fn disjoint(len: usize, i: usize, j: usize) -> bool {
    if i == j {
        return false;
    }
    let adj = (i + 1) % len == j || (j + 1) % len == i;
    !adj
}

/// Build the pair graph from the level-one charts and decide acyclicity.
/// Returns the graph, whether it is acyclic, and a witness cycle otherwise.
pub fn condition2_acyclic(
    rule: &SubdivisionRule,
) -> (PairGraph, bool, Option<Vec<(TileTypeId, usize, usize)>>) {
    let mut nodes = Vec::new();
    let mut node_id = std::collections::BTreeMap::new();
    for t in &rule.tile_types {
        let k = t.word_len();
        for i in 0..k {
            for j in 0..k {
                if disjoint(k, i, j) {
                    node_id.insert((t.id, i, j), nodes.len());
                    nodes.push((t.id, i, j));
                }
            }
        }
    }
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for t in &rule.tile_types {
        // Per subtile: which parent positions it touches, at which own slots.
        for s in &t.subtiles {
            let k_sub = rule.tile_types[s.tile].word_len();
            let touches: Vec<(usize, usize)> = s
                .sides
                .iter()
                .enumerate()
                .filter_map(|(slot, side)| match side {
                    SideRef::Parent { pos, .. } => Some((*pos, slot)),
                    SideRef::Inner { .. } => None,
                })
                .collect();
            for &(p1, slot1) in &touches {
                for &(p2, slot2) in &touches {
                    if !disjoint(t.word_len(), p1, p2) {
                        continue;
                    }
                    let from = node_id[&(t.id, p1, p2)];
                    // Two sides of an embedded subtile inside disjoint parent
                    // edges are themselves disjoint.
                    debug_assert!(disjoint(k_sub, slot1, slot2));
                    let to = node_id[&(s.tile, slot1, slot2)];
                    succ[from].insert(to);
                }
            }
        }
    }
    let graph = PairGraph {
        nodes,
        succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
    };
    let witness = graph.find_cycle();
    let acyclic = witness.is_none();
    (graph, acyclic, witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValenceVerdict {
    /// The vertex-type set closed; the maximum valence over it.
    Bounded(usize),
    /// The closure did not stabilize within the caps.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ValenceReport {
    pub verdict: ValenceVerdict,
    pub levels_inspected: u32,
    pub types_seen: usize,
}

/// Decide bounded valence by vertex-type closure: subdivide the quotient
/// complex until the set of vertex local types (cyclic face-corner words)
/// stops growing. A vertex's next type is a function of its current type and
/// every type creatable by subdivision already appears at level one, so a
/// stable set is closed forever. A non-closing run within the caps reports
/// `Unknown`, never a bound.
pub fn bounded_valence(rule: &SubdivisionRule) -> Result<ValenceReport, super::FsrError> {
    const MAX_LEVELS: u32 = 4;
    const MAX_TYPES: usize = 50;
    const MAX_FACES: usize = 2_000_000;

    let mut complex = CellComplex::base_complex(rule)?;
    let mut seen: BTreeSet<Vec<(TileTypeId, usize)>> = complex.vertex_types()?.into_iter().collect();
    let mut levels = 0;
    for _ in 0..MAX_LEVELS {
        let next_faces = complex
            .faces
            .iter()
            .map(|f| rule.tile_types[f.tile.unwrap_or(0)].subtiles.len())
            .sum::<usize>();
        if next_faces > MAX_FACES {
            return Ok(ValenceReport {
                verdict: ValenceVerdict::Unknown,
                levels_inspected: levels,
                types_seen: seen.len(),
            });
        }
        complex = complex.subdivide(rule)?;
        levels += 1;
        let types = complex.vertex_types()?;
        let before = seen.len();
        seen.extend(types);
        if seen.len() > MAX_TYPES {
            return Ok(ValenceReport {
                verdict: ValenceVerdict::Unknown,
                levels_inspected: levels,
                types_seen: seen.len(),
            });
        }
        if seen.len() == before {
            let max = seen.iter().map(|t| t.len()).max().unwrap_or(0);
            return Ok(ValenceReport {
                verdict: ValenceVerdict::Bounded(max),
                levels_inspected: levels,
                types_seen: seen.len(),
            });
        }
    }
    Ok(ValenceReport {
        verdict: ValenceVerdict::Unknown,
        levels_inspected: levels,
        types_seen: seen.len(),
    })
}

/// Combined mesh verdict: the subdivision rule's mesh approaches zero
/// combinatorially when the pair graph is acyclic and every edge eventually
/// subdivides properly.
#[derive(Debug, Clone)]
pub struct MeshVerdict {
    pub satisfied: bool,
    pub condition1_level: Option<u32>,
    pub condition2_acyclic: bool,
    pub condition2_witness: Option<Vec<(TileTypeId, usize, usize)>>,
    pub pair_graph_nodes: usize,
    /// Set when acyclicity held and proper subdivision followed, confirming
    /// the implication between the two conditions on this instance.
    pub implication_confirmed: bool,
}

pub fn mesh_approaches_zero(rule: &SubdivisionRule, n_max: u32) -> MeshVerdict {
    let (graph, acyclic, witness) = condition2_acyclic(rule);
    let level = condition1(rule, n_max);
    MeshVerdict {
        satisfied: acyclic && level.is_some(),
        condition1_level: level,
        condition2_acyclic: acyclic,
        condition2_witness: witness,
        pair_graph_nodes: graph.node_count(),
        implication_confirmed: acyclic && level.is_some(),
    }
}
