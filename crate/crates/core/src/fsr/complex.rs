//! Cell complexes modeled on a subdivision rule: vertices with marks,
//! directed edges with a reversal involution, faces as cyclic dart lists.

use super::rule::{CornerRef, EdgeTypeId, SideRef, SubdivisionRule, TileTypeId, VertexMark};
use super::FsrError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexData {
    pub mark: VertexMark,
}

/// An undirected edge, stored directed along the intrinsic direction of its
/// positive-side edge type (`etype` is `None` only for pruned complexes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeData {
    pub tail: usize,
    pub head: usize,
    pub etype: Option<EdgeTypeId>,
}

/// A directed edge: `forward` means tail → head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn fwd(edge: usize) -> Dart {
        Dart { edge, forward: true }
    }

    pub fn rev(edge: usize) -> Dart {
        Dart { edge, forward: false }
    }

    pub fn reversed(self) -> Dart {
        Dart { edge: self.edge, forward: !self.forward }
    }
}

/// A face: a tile type and its counterclockwise dart cycle; dart `i`
/// occupies word position `i` of the tile type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceData {
    pub tile: Option<TileTypeId>,
    pub darts: Vec<Dart>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellComplex {
    pub schema_version: u32,
    pub vertices: Vec<VertexData>,
    pub edges: Vec<EdgeData>,
    pub faces: Vec<FaceData>,
}

/// Canonicalized cyclic sequence of face corners around a vertex.
pub type VertexType = Vec<(TileTypeId, usize)>;

impl CellComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn dart_start(&self, d: Dart) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.tail
        } else {
            e.head
        }
    }

    pub fn dart_end(&self, d: Dart) -> usize {
        self.dart_start(d.reversed())
    }

    /// Map each dart to its unique (face, position); errors if some dart is
    /// missing or duplicated (the complex would not be a closed surface).
    pub fn dart_locations(&self) -> Result<BTreeMap<(usize, bool), (usize, usize)>, FsrError> {
        let mut map = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (i, d) in f.darts.iter().enumerate() {
                if map.insert((d.edge, d.forward), (fi, i)).is_some() {
                    return Err(FsrError::BadComplex(format!(
                        "dart ({}, {}) appears twice",
                        d.edge, d.forward
                    )));
                }
            }
        }
        if map.len() != 2 * self.edges.len() {
            return Err(FsrError::BadComplex(format!(
                "{} darts placed, expected {}",
                map.len(),
                2 * self.edges.len()
            )));
        }
        Ok(map)
    }

    /// Structural validation: closed surface, connected face cycles, and
    /// (when the rule is supplied and faces are typed) type consistency of
    /// every word slot.
    pub fn validate(&self, rule: &SubdivisionRule) -> Result<(), FsrError> {
        for (fi, f) in self.faces.iter().enumerate() {
            for (i, d) in f.darts.iter().enumerate() {
                if d.edge >= self.edges.len() {
                    return Err(FsrError::BadComplex(format!("face {fi} references edge {}", d.edge)));
                }
                let next = f.darts[(i + 1) % f.darts.len()];
                if self.dart_end(*d) != self.dart_start(next) {
                    return Err(FsrError::BadComplex(format!(
                        "face {fi} boundary breaks between positions {i} and {}",
                        (i + 1) % f.darts.len()
                    )));
                }
            }
            if let Some(tile) = f.tile {
                let t = rule
                    .tile_types
                    .get(tile)
                    .ok_or(FsrError::TileTypeMismatch(fi, tile))?;
                if t.word_len() != f.darts.len() {
                    return Err(FsrError::BadComplex(format!(
                        "face {fi} has {} darts for tile type {} of length {}",
                        f.darts.len(),
                        tile,
                        t.word_len()
                    )));
                }
                let sigma = rule.pairing_map().ok_or_else(|| {
                    FsrError::BadComplex("rule pairing is malformed".to_string())
                })?;
                for (i, d) in f.darts.iter().enumerate() {
                    let slot = t.boundary[i];
                    let Some(et) = self.edges[d.edge].etype else {
                        return Err(FsrError::BadComplex(format!(
                            "face {fi} uses an untyped edge in a typed complex"
                        )));
                    };
                    // The stored edge type is the type of the positive slot,
                    // whose dart runs forward; the paired slot runs backward.
                    let ok = if slot.forward {
                        d.forward && slot.edge == et
                    } else {
                        !d.forward && sigma[slot.edge] == et
                    };
                    if !ok {
                        return Err(FsrError::BadComplex(format!(
                            "face {fi} slot {i}: word ({}, {}) against dart ({}, {})",
                            slot.edge, slot.forward, et, d.forward
                        )));
                    }
                }
            }
        }
        self.dart_locations()?;
        Ok(())
    }

    /// The quotient complex of a rule: one face per tile type, glued along
    /// the pairing involution.
    pub fn base_complex(rule: &SubdivisionRule) -> Result<CellComplex, FsrError> {
        let sigma = rule
            .pairing_map()
            .ok_or_else(|| FsrError::BadComplex("malformed pairing".to_string()))?;
        let locations = rule
            .edge_locations()
            .ok_or_else(|| FsrError::BadComplex("malformed boundary words".to_string()))?;

        // Union-find on corner slots (tile, corner index).
        let mut slot_ids = BTreeMap::new();
        let mut parent: Vec<usize> = Vec::new();
        for t in &rule.tile_types {
            for i in 0..t.word_len() {
                slot_ids.insert((t.id, i), parent.len());
                parent.push(parent.len());
            }
        }
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        };

        // Gluing along each pairing: the start of one slot is the end of the
        // other, because paired slots traverse the shared edge oppositely.
        for p in &rule.pairings {
            let (t1, i1, _) = locations[p.a];
            let (t2, i2, _) = locations[p.b];
            let l1 = rule.tile_types[t1].word_len();
            let l2 = rule.tile_types[t2].word_len();
            let s1 = slot_ids[&(t1, i1)];
            let e1 = slot_ids[&(t1, (i1 + 1) % l1)];
            let s2 = slot_ids[&(t2, i2)];
            let e2 = slot_ids[&(t2, (i2 + 1) % l2)];
            union(&mut parent, s1, e2);
            union(&mut parent, e1, s2);
        }

        // Vertex ids in deterministic order of first occurrence.
        let mut vertex_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertices: Vec<VertexData> = Vec::new();
        let mut slot_vertex: BTreeMap<(TileTypeId, usize), usize> = BTreeMap::new();
        for t in &rule.tile_types {
            for i in 0..t.word_len() {
                let root = find(&mut parent, slot_ids[&(t.id, i)]);
                let vid = *vertex_of_root.entry(root).or_insert_with(|| {
                    vertices.push(VertexData { mark: t.corner_marks[i] });
                    vertices.len() - 1
                });
                // Marks must agree across the class.
                if vertices[vid].mark != t.corner_marks[i] {
                    return Err(FsrError::BadComplex(format!(
                        "corner marks disagree at glued vertex (tile {}, corner {i})",
                        t.id
                    )));
                }
                slot_vertex.insert((t.id, i), vid);
            }
        }

        // One edge per pairing pair; stored type = the positive slot's type.
        let mut edge_of_pair: BTreeMap<(EdgeTypeId, EdgeTypeId), usize> = BTreeMap::new();
        let mut edges: Vec<EdgeData> = Vec::new();
        let mut sorted_pairs: Vec<(EdgeTypeId, EdgeTypeId)> = rule
            .pairings
            .iter()
            .map(|p| (p.a.min(p.b), p.a.max(p.b)))
            .collect();
        sorted_pairs.sort_unstable();
        for (lo, hi) in sorted_pairs {
            // Find the member whose slot sign is positive.
            let (pos_type, _neg_type) = if locations[lo].2 { (lo, hi) } else { (hi, lo) };
            let (t, i, f) = locations[pos_type];
            debug_assert!(f);
            let l = rule.tile_types[t].word_len();
            let tail = slot_vertex[&(t, i)];
            let head = slot_vertex[&(t, (i + 1) % l)];
            edge_of_pair.insert((lo, hi), edges.len());
            edges.push(EdgeData { tail, head, etype: Some(pos_type) });
        }

        let faces = rule
            .tile_types
            .iter()
            .map(|t| FaceData {
                tile: Some(t.id),
                darts: t
                    .boundary
                    .iter()
                    .map(|oe| {
                        let pair = (oe.edge.min(sigma[oe.edge]), oe.edge.max(sigma[oe.edge]));
                        Dart { edge: edge_of_pair[&pair], forward: oe.forward }
                    })
                    .collect(),
            })
            .collect();

        Ok(CellComplex {
            schema_version: 1,
            vertices,
            edges,
            faces,
        })
    }

    /// One level of subdivision. Every face must carry a tile type of the
    /// rule.
    pub fn subdivide(&self, rule: &SubdivisionRule) -> Result<CellComplex, FsrError> {
        let sigma = rule
            .pairing_map()
            .ok_or_else(|| FsrError::BadComplex("malformed pairing".to_string()))?;
        let mut vertices = self.vertices.clone();
        let mut edges: Vec<EdgeData> = Vec::new();
        let mut faces: Vec<FaceData> = Vec::new();

        // Split every edge. children[e] = (vertex chain, child edge ids),
        // both along the stored type's intrinsic direction.
        struct SplitEdge {
            verts: Vec<usize>,
            children: Vec<usize>,
        }
        let mut split: Vec<SplitEdge> = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let et = e
                .etype
                .ok_or_else(|| FsrError::BadComplex("untyped edge cannot subdivide".to_string()))?;
            let data = &rule.edge_types[et];
            let m = data.subdivision.len();
            let mut verts = vec![e.tail];
            for k in 0..m - 1 {
                vertices.push(VertexData { mark: data.split_marks[k] });
                verts.push(vertices.len() - 1);
            }
            verts.push(e.head);
            let mut children = Vec::with_capacity(m);
            for (k, piece) in data.subdivision.iter().enumerate() {
                // The positive side of the child: the parent's positive side
                // when the piece runs forward, the paired side otherwise.
                let (etype, tail, head) = if piece.forward {
                    (piece.edge, verts[k], verts[k + 1])
                } else {
                    (sigma[piece.edge], verts[k + 1], verts[k])
                };
                children.push(edges.len());
                edges.push(EdgeData { tail, head, etype: Some(etype) });
            }
            split.push(SplitEdge { verts, children });
        }

        for (fi, f) in self.faces.iter().enumerate() {
            let tile = f
                .tile
                .ok_or_else(|| FsrError::BadComplex("untyped face cannot subdivide".to_string()))?;
            let t = rule
                .tile_types
                .get(tile)
                .ok_or(FsrError::TileTypeMismatch(fi, tile))?;
            if t.word_len() != f.darts.len() {
                return Err(FsrError::BadComplex(format!(
                    "face {fi}: word length mismatch during subdivision"
                )));
            }

            // Inner vertices of the chart.
            let inner_vertex_base = vertices.len();
            for mark in &t.inner_vertex_marks {
                vertices.push(VertexData { mark: *mark });
            }

            // Inner edges: resolve each from its positive user.
            let mut inner_users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.inner_edges];
            for (si, s) in t.subtiles.iter().enumerate() {
                for (k, side) in s.sides.iter().enumerate() {
                    if let SideRef::Inner { id } = side {
                        inner_users[*id].push((si, k));
                    }
                }
            }
            let resolve_corner = |c: &CornerRef| -> usize {
                match c {
                    CornerRef::ParentCorner { i } => self.dart_start(f.darts[*i]),
                    CornerRef::ParentSplit { pos, idx } => {
                        let d = f.darts[*pos];
                        let chain = &split[d.edge].verts;
                        // Chart indices follow the slot type's intrinsic
                        // direction, which is the stored chain direction.
                        let _ = d;
                        chain[*idx + 1]
                    }
                    CornerRef::Inner { id } => inner_vertex_base + id,
                }
            };

            let mut inner_edge_ids: Vec<usize> = Vec::with_capacity(t.inner_edges);
            for users in &inner_users {
                if users.len() != 2 {
                    return Err(FsrError::BadComplex("interior edge without two users".to_string()));
                }
                // Pick the user whose word slot is positive.
                let pick = users
                    .iter()
                    .copied()
                    .find(|&(si, k)| rule.tile_types[t.subtiles[si].tile].boundary[k].forward)
                    .ok_or_else(|| {
                        FsrError::BadComplex("interior edge has no positive side".to_string())
                    })?;
                let (si, k) = pick;
                let s = &t.subtiles[si];
                let sub_t = &rule.tile_types[s.tile];
                let tail = resolve_corner(&s.corners[k]);
                let head = resolve_corner(&s.corners[(k + 1) % sub_t.word_len()]);
                let etype = sub_t.boundary[k].edge;
                inner_edge_ids.push(edges.len());
                edges.push(EdgeData { tail, head, etype: Some(etype) });
            }

            // Child faces.
            for s in &t.subtiles {
                let sub_t = &rule.tile_types[s.tile];
                let mut darts = Vec::with_capacity(s.sides.len());
                for (k, side) in s.sides.iter().enumerate() {
                    let slot = sub_t.boundary[k];
                    let edge_id = match side {
                        SideRef::Inner { id } => inner_edge_ids[*id],
                        SideRef::Parent { pos, idx } => {
                            let d = f.darts[*pos];
                            split[d.edge].children[*idx]
                        }
                    };
                    darts.push(Dart { edge: edge_id, forward: slot.forward });
                }
                faces.push(FaceData { tile: Some(s.tile), darts });
            }
        }

        Ok(CellComplex {
            schema_version: 1,
            vertices,
            edges,
            faces,
        })
    }

    /// Subdivide `n` times; `n = 0` returns the input unchanged.
    pub fn subdivide_n(&self, rule: &SubdivisionRule, n: u32) -> Result<CellComplex, FsrError> {
        let mut c = self.clone();
        for _ in 0..n {
            c = c.subdivide(rule)?;
        }
        Ok(c)
    }

    /// Number of edge ends at each vertex (a loop edge counts twice).
    pub fn vertex_valences(&self) -> Vec<usize> {
        let mut val = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            val[e.tail] += 1;
            val[e.head] += 1;
        }
        val
    }

    /// The cyclic face-corner sequence around every vertex, canonicalized to
    /// the lexicographically minimal rotation.
    pub fn vertex_types(&self) -> Result<Vec<VertexType>, FsrError> {
        let locations = self.dart_locations()?;
        // Out-darts per vertex.
        let mut out_darts: Vec<Vec<Dart>> = vec![Vec::new(); self.vertices.len()];
        for (ei, _) in self.edges.iter().enumerate() {
            for forward in [true, false] {
                let d = Dart { edge: ei, forward };
                out_darts[self.dart_start(d)].push(d);
            }
        }
        let mut types = Vec::with_capacity(self.vertices.len());
        for (vi, outs) in out_darts.iter().enumerate() {
            if outs.is_empty() {
                return Err(FsrError::BadComplex(format!("isolated vertex {vi}")));
            }
            let mut cycle: Vec<(TileTypeId, usize)> = Vec::new();
            let start = outs[0];
            let mut d = start;
            loop {
                // The face to the left of d; its corner at this vertex.
                let (fi, i) = locations[&(d.edge, d.forward)];
                let f = &self.faces[fi];
                cycle.push((f.tile.unwrap_or(usize::MAX), i));
                // Rotate: previous dart in the face, reversed, leaves vi.
                let prev = f.darts[(i + f.darts.len() - 1) % f.darts.len()];
                d = prev.reversed();
                debug_assert_eq!(self.dart_start(d), vi);
                if d == start {
                    break;
                }
                if cycle.len() > 2 * self.edges.len() + 2 {
                    return Err(FsrError::BadComplex(format!(
                        "rotation walk at vertex {vi} does not close"
                    )));
                }
            }
            types.push(canonical_rotation(cycle));
        }
        Ok(types)
    }

    /// Faces per tile type.
    pub fn face_counts(&self, n_tiles: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n_tiles];
        for f in &self.faces {
            if let Some(t) = f.tile {
                counts[t] += 1;
            }
        }
        counts
    }
}

fn canonical_rotation(cycle: Vec<(TileTypeId, usize)>) -> Vec<(TileTypeId, usize)> {
    let n = cycle.len();
    let mut best: Option<Vec<(TileTypeId, usize)>> = None;
    for s in 0..n {
        let rot: Vec<_> = (0..n).map(|i| cycle[(s + i) % n]).collect();
        if best.as_ref().map_or(true, |b| &rot < b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}
