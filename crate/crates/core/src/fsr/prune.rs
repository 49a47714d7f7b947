//! Pruning of tree 1-skeletons and classification of the five marked-tree
//! shapes.

use super::complex::{CellComplex, Dart, EdgeData, FaceData, VertexData};
use super::rule::VertexMark;
use super::FsrError;
use std::collections::{BTreeMap, BTreeSet};

/// The five shapes of a pruned tree with four marked vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShape {
    /// Type 1: a path carrying all four marked vertices.
    Path,
    /// Type 2: a 3-star whose center is marked.
    StarMarkedCenter,
    /// Type 3: a 4-star with an accidental valence-4 center.
    FourStar,
    /// Type 4: a 3-star with an accidental center and one marked valence-2
    /// vertex on an arm.
    ThreeStarWithInnerMark,
    /// Type 5: two accidental valence-3 vertices and four marked leaves.
    HTree,
}

impl TreeShape {
    pub fn type_number(&self) -> u8 {
        match self {
            TreeShape::Path => 1,
            TreeShape::StarMarkedCenter => 2,
            TreeShape::FourStar => 3,
            TreeShape::ThreeStarWithInnerMark => 4,
            TreeShape::HTree => 5,
        }
    }
}

/// Undirected skeleton adjacency: vertex -> (neighbor, edge id) list.
fn skeleton(c: &CellComplex) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); c.vertices.len()];
    for (ei, e) in c.edges.iter().enumerate() {
        adj[e.tail].push((e.head, ei));
        adj[e.head].push((e.tail, ei));
    }
    adj
}

fn check_tree(c: &CellComplex) -> Result<(), FsrError> {
    if c.vertices.is_empty() {
        return Err(FsrError::NotATree("empty skeleton".to_string()));
    }
    if c.edges.len() + 1 != c.vertices.len() {
        return Err(FsrError::NotATree(format!(
            "{} edges on {} vertices",
            c.edges.len(),
            c.vertices.len()
        )));
    }
    // Connectivity.
    let adj = skeleton(c);
    let mut seen = vec![false; c.vertices.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    if count != c.vertices.len() {
        return Err(FsrError::NotATree("skeleton is disconnected".to_string()));
    }
    Ok(())
}

/// Prune a complex whose 1-skeleton is a tree: replace the skeleton by the
/// minimal subtree spanning the marked vertices, with vertices exactly at
/// marked points and branch points; unmarked valence-2 vertices are
/// smoothed. The result has a single face (the tree's double traversal) and
/// is idempotent.
pub fn prune(c: &CellComplex, marked: &BTreeSet<usize>) -> Result<CellComplex, FsrError> {
    check_tree(c)?;
    if marked.is_empty() {
        return Err(FsrError::BadComplex("marked set is empty".to_string()));
    }
    if let Some(&v) = marked.iter().find(|&&v| v >= c.vertices.len()) {
        return Err(FsrError::BadComplex(format!("marked vertex {v} out of range")));
    }

    // Keep exactly the union of paths between marked vertices: peel unmarked
    // leaves.
    let adj = skeleton(c);
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut alive_vertex = vec![true; c.vertices.len()];
    let mut alive_edge = vec![true; c.edges.len()];
    let mut queue: Vec<usize> = (0..c.vertices.len())
        .filter(|v| degree[*v] <= 1 && !marked.contains(v))
        .collect();
    while let Some(v) = queue.pop() {
        if !alive_vertex[v] || marked.contains(&v) || degree[v] > 1 {
            continue;
        }
        alive_vertex[v] = false;
        for &(w, ei) in &adj[v] {
            if alive_edge[ei] && alive_vertex[w] {
                alive_edge[ei] = false;
                degree[w] -= 1;
                degree[v] -= 1;
                if degree[w] <= 1 && !marked.contains(&w) {
                    queue.push(w);
                }
            }
        }
    }

    // Smooth unmarked valence-2 vertices by walking maximal chains between
    // kept vertices (marked or branch points).
    let keep: BTreeSet<usize> = (0..c.vertices.len())
        .filter(|&v| alive_vertex[v] && (marked.contains(&v) || degree[v] != 2))
        .collect();
    if keep.is_empty() {
        // Everything marked sits on a cycle-free chain of valence-2 marked
        // vertices only; keep marked set as-is (possible only for a single
        // marked vertex spanning tree of one vertex).
        return Err(FsrError::BadComplex(
            "pruned skeleton has no kept vertices".to_string(),
        ));
    }

    let mut new_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    for &v in &keep {
        new_id.insert(v, vertices.len());
        vertices.push(VertexData {
            mark: if marked.contains(&v) {
                c.vertices[v].mark
            } else {
                VertexMark::Accidental
            },
        });
    }

    // Walk chains.
    let mut edges: Vec<EdgeData> = Vec::new();
    let mut seen_half: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &v in &keep {
        for &(w0, e0) in &adj[v] {
            if !alive_edge[e0] {
                continue;
            }
            if seen_half.contains(&(v, e0)) {
                continue;
            }
            // Walk from v through w0 until the next kept vertex.
            let mut prev = v;
            let mut cur = w0;
            let mut last_edge = e0;
            while !keep.contains(&cur) {
                let next = adj[cur]
                    .iter()
                    .find(|&&(n, ei)| alive_edge[ei] && n != prev)
                    .copied();
                match next {
                    Some((n, ei)) => {
                        prev = cur;
                        cur = n;
                        last_edge = ei;
                    }
                    None => break,
                }
            }
            seen_half.insert((v, e0));
            seen_half.insert((cur, last_edge));
            // Record each chain once, from the smaller endpoint id.
            if new_id[&v] <= new_id[&cur] {
                edges.push(EdgeData {
                    tail: new_id[&v],
                    head: new_id[&cur],
                    etype: None,
                });
            }
        }
    }

    // Single face: the double traversal of the tree (an Euler tour of darts).
    let tour = euler_tour(vertices.len(), &edges)?;
    Ok(CellComplex {
        schema_version: 1,
        vertices,
        edges,
        faces: vec![FaceData { tile: None, darts: tour }],
    })
}

/// Dart cycle traversing each edge once in each direction: the boundary of
/// the single complementary face of a planar tree.
fn euler_tour(n_vertices: usize, edges: &[EdgeData]) -> Result<Vec<Dart>, FsrError> {
    if edges.is_empty() {
        return Err(FsrError::BadComplex("cannot build a face on no edges".to_string()));
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_vertices];
    for (ei, e) in edges.iter().enumerate() {
        adj[e.tail].push((e.head, ei));
        adj[e.head].push((e.tail, ei));
    }
    let mut tour = Vec::with_capacity(2 * edges.len());
    fn dfs(v: usize, from_edge: Option<usize>, adj: &[Vec<(usize, usize)>], edges: &[EdgeData], tour: &mut Vec<Dart>) {
        for &(w, ei) in &adj[v] {
            if Some(ei) == from_edge {
                continue;
            }
            // Each tree edge is entered exactly once from its parent side.
            if edges[ei].tail == v {
                tour.push(Dart::fwd(ei));
                dfs(w, Some(ei), adj, edges, tour);
                tour.push(Dart::rev(ei));
            } else if edges[ei].head == v {
                tour.push(Dart::rev(ei));
                dfs(w, Some(ei), adj, edges, tour);
                tour.push(Dart::fwd(ei));
            }
        }
    }
    // A tree: the walk from vertex 0 visits everything.
    dfs(edges[0].tail, None, &adj, edges, &mut tour);
    if tour.len() != 2 * edges.len() {
        return Err(FsrError::NotATree("tour does not cover the skeleton".to_string()));
    }
    Ok(tour)
}

/// Classify a pruned tree with exactly four marked vertices into one of the
/// five shapes.
pub fn classify_tree(c: &CellComplex) -> Result<TreeShape, FsrError> {
    check_tree(c)?;
    let valences = c.vertex_valences();
    let marked: Vec<bool> = c
        .vertices
        .iter()
        .map(|v| matches!(v.mark, VertexMark::Postcritical(_)))
        .collect();
    let n_marked = marked.iter().filter(|&&m| m).count();
    if n_marked != 4 {
        return Err(FsrError::BadComplex(format!("expected 4 marked vertices, got {n_marked}")));
    }
    // Pruned: every valence-1 or valence-2 vertex is marked.
    for (v, &val) in valences.iter().enumerate() {
        if val <= 2 && !marked[v] {
            return Err(FsrError::BadComplex(format!(
                "vertex {v} has valence {val} but is not marked; prune first"
            )));
        }
    }
    let max_val = *valences.iter().max().unwrap();
    let accidental: Vec<usize> = (0..c.vertices.len()).filter(|&v| !marked[v]).collect();

    if max_val <= 2 {
        return Ok(TreeShape::Path);
    }
    if max_val == 4 && accidental.len() == 1 && valences[accidental[0]] == 4 {
        return Ok(TreeShape::FourStar);
    }
    if max_val == 3 && accidental.is_empty() {
        return Ok(TreeShape::StarMarkedCenter);
    }
    if max_val == 3 && accidental.len() == 1 {
        return Ok(TreeShape::ThreeStarWithInnerMark);
    }
    if max_val == 3 && accidental.len() == 2 {
        return Ok(TreeShape::HTree);
    }
    Err(FsrError::BadComplex(
        "tree is not among the five pruned shapes".to_string(),
    ))
}
