//! Subdivision rule data: edge types with their subdivision sequences, the
//! pairing involution, tile types with boundary words and subdivision charts.

use crate::hexplane::PcClass;
use serde::{Deserialize, Serialize};

pub type EdgeTypeId = usize;
pub type TileTypeId = usize;

/// An edge type together with a traversal direction relative to the type's
/// intrinsic direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub edge: EdgeTypeId,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn fwd(edge: EdgeTypeId) -> OrientedEdge {
        OrientedEdge { edge, forward: true }
    }

    pub fn rev(edge: EdgeTypeId) -> OrientedEdge {
        OrientedEdge { edge, forward: false }
    }
}

/// Vertex label: a postcritical class or an accidental vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexMark {
    Postcritical(PcClass),
    Accidental,
}

impl Serialize for VertexMark {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = match self {
            VertexMark::Accidental => "acc",
            VertexMark::Postcritical(c) => c.label(),
        };
        s.serialize_str(text)
    }
}

impl<'de> Deserialize<'de> for VertexMark {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Ok(match text.as_str() {
            "acc" => VertexMark::Accidental,
            "0" => VertexMark::Postcritical(PcClass::Zero),
            "1" => VertexMark::Postcritical(PcClass::One),
            "tau" => VertexMark::Postcritical(PcClass::Tau),
            "1+tau" => VertexMark::Postcritical(PcClass::OnePlusTau),
            other => {
                return Err(serde::de::Error::custom(format!("unknown vertex mark {other}")))
            }
        })
    }
}

/// An edge type: its subdivision sequence (along the intrinsic direction)
/// and the marks of the interior split vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTypeData {
    pub id: EdgeTypeId,
    pub subdivision: Vec<OrientedEdge>,
    pub split_marks: Vec<VertexMark>,
}

/// The tag of the group element matching a paired edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "class")]
pub enum GammaTag {
    /// Order-2 rotation about the named postcritical class.
    Rotation(PcClass),
    /// Translation.
    Translation,
    /// The two sides of one interior edge of the complex.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub a: EdgeTypeId,
    pub b: EdgeTypeId,
    pub tag: GammaTag,
}

/// A side of a subtile: either a piece of the parent's boundary or an
/// interior edge of the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SideRef {
    /// Piece `idx` (along the parent edge type's intrinsic direction) of the
    /// parent boundary edge at word position `pos`.
    Parent { pos: usize, idx: usize },
    Inner { id: usize },
}

/// A corner of a subtile, resolved against the parent tile's chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CornerRef {
    /// Corner `i` of the parent tile (the start vertex of word position `i`).
    ParentCorner { i: usize },
    /// Split vertex `idx` (between pieces `idx` and `idx+1` along the edge
    /// type's intrinsic direction) on the parent edge at word position `pos`.
    ParentSplit { pos: usize, idx: usize },
    Inner { id: usize },
}

/// One subtile of a chart: its tile type, and its sides and corners in
/// counterclockwise order (side `k` runs from corner `k` to corner `k+1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtileSpec {
    pub tile: TileTypeId,
    pub sides: Vec<SideRef>,
    pub corners: Vec<CornerRef>,
}

/// A tile type: counterclockwise boundary word, corner classes (corner `i`
/// sits between word positions `i-1` and `i`), and the level-one chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileTypeData {
    pub id: TileTypeId,
    pub name: String,
    pub boundary: Vec<OrientedEdge>,
    pub corner_marks: Vec<VertexMark>,
    pub subtiles: Vec<SubtileSpec>,
    pub inner_edges: usize,
    pub inner_vertex_marks: Vec<VertexMark>,
}

impl TileTypeData {
    pub fn word_len(&self) -> usize {
        self.boundary.len()
    }
}

/// A finite subdivision rule with the combinatorics the engine needs:
/// oriented edge subdivision sequences, the pairing involution on edge
/// types, and per-tile subdivision charts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionRule {
    pub schema_version: u32,
    pub edge_types: Vec<EdgeTypeData>,
    pub pairings: Vec<PairingEntry>,
    pub tile_types: Vec<TileTypeData>,
    /// Optional geometric realization (used for rendering), carried opaquely.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, detail: String) -> Violation {
        Violation { code, detail }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl SubdivisionRule {
    /// Total the pairing as an involution map; `None` when malformed.
    pub fn pairing_map(&self) -> Option<Vec<EdgeTypeId>> {
        let n = self.edge_types.len();
        let mut map = vec![usize::MAX; n];
        for p in &self.pairings {
            if p.a >= n || p.b >= n || p.a == p.b {
                return None;
            }
            if map[p.a] != usize::MAX || map[p.b] != usize::MAX {
                return None;
            }
            map[p.a] = p.b;
            map[p.b] = p.a;
        }
        if map.iter().any(|&x| x == usize::MAX) {
            return None;
        }
        Some(map)
    }

    /// The paired edge type.
    pub fn sigma(&self, e: EdgeTypeId) -> EdgeTypeId {
        self.pairing_map().expect("validated rule")[e]
    }

    /// Where each edge type sits: `(tile, word position, word sign)`.
    pub fn edge_locations(&self) -> Option<Vec<(TileTypeId, usize, bool)>> {
        let mut loc = vec![None; self.edge_types.len()];
        for t in &self.tile_types {
            for (pos, oe) in t.boundary.iter().enumerate() {
                if oe.edge >= loc.len() {
                    return None;
                }
                if loc[oe.edge].is_some() {
                    return None;
                }
                loc[oe.edge] = Some((t.id, pos, oe.forward));
            }
        }
        loc.into_iter().collect()
    }

    /// Structural validation. An empty list means every invariant holds and
    /// the induced subdivision of the quotient sphere complex is itself a
    /// sphere complex.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();

        for (i, e) in self.edge_types.iter().enumerate() {
            if e.id != i {
                v.push(Violation::new("edge_type_id", format!("edge type {i} has id {}", e.id)));
            }
            if e.subdivision.is_empty() {
                v.push(Violation::new("empty_subdivision", format!("edge type {i}")));
            }
            if e.split_marks.len() + 1 != e.subdivision.len() {
                v.push(Violation::new(
                    "split_marks_len",
                    format!(
                        "edge type {i}: {} marks for {} pieces",
                        e.split_marks.len(),
                        e.subdivision.len()
                    ),
                ));
            }
            for oe in &e.subdivision {
                if oe.edge >= self.edge_types.len() {
                    v.push(Violation::new("bad_edge_ref", format!("edge type {i}")));
                }
            }
        }
        for (i, t) in self.tile_types.iter().enumerate() {
            if t.id != i {
                v.push(Violation::new("tile_type_id", format!("tile type {i} has id {}", t.id)));
            }
            if t.word_len() < 3 {
                v.push(Violation::new(
                    "short_boundary",
                    format!("tile type {i} has boundary word length {}", t.word_len()),
                ));
            }
            if t.corner_marks.len() != t.word_len() {
                v.push(Violation::new("corner_marks_len", format!("tile type {i}")));
            }
        }
        if !v.is_empty() {
            return v;
        }

        let sigma = match self.pairing_map() {
            Some(s) => s,
            None => {
                v.push(Violation::new(
                    "pairing",
                    "pairing is not a fixed-point-free involution covering every edge type".into(),
                ));
                return v;
            }
        };
        let locations = match self.edge_locations() {
            Some(l) => l,
            None => {
                v.push(Violation::new(
                    "edge_locations",
                    "every edge type must appear exactly once among the boundary words".into(),
                ));
                return v;
            }
        };

        // Paired word slots traverse their shared edge oppositely.
        for p in &self.pairings {
            let (_, _, fa) = locations[p.a];
            let (_, _, fb) = locations[p.b];
            if fa == fb {
                v.push(Violation::new(
                    "pairing_orientation",
                    format!("paired edge types {} and {} carry equal word signs", p.a, p.b),
                ));
            }
        }

        // Paired edge types subdivide compatibly: entry k of the partner is
        // the pairing image of entry k, with the same direction flag, and
        // split marks agree.
        for e in &self.edge_types {
            let f = &self.edge_types[sigma[e.id]];
            if e.subdivision.len() != f.subdivision.len() {
                v.push(Violation::new(
                    "pairing_subdivision_len",
                    format!("edge types {} and {}", e.id, f.id),
                ));
                continue;
            }
            for (k, (ea, fa)) in e.subdivision.iter().zip(&f.subdivision).enumerate() {
                if fa.edge != sigma[ea.edge] || fa.forward != ea.forward {
                    v.push(Violation::new(
                        "pairing_subdivision",
                        format!(
                            "edge pair ({}, {}) disagrees at piece {k}: ({}, {}) vs ({}, {})",
                            e.id, f.id, ea.edge, ea.forward, fa.edge, fa.forward
                        ),
                    ));
                }
            }
            if e.split_marks != f.split_marks {
                v.push(Violation::new(
                    "pairing_split_marks",
                    format!("edge pair ({}, {})", e.id, f.id),
                ));
            }
        }

        // Chart consistency per tile type.
        for t in &self.tile_types {
            self.validate_chart(t, &sigma, &mut v);
        }
        if !v.is_empty() {
            return v;
        }

        // The quotient complex and its subdivision must both be spheres.
        match crate::fsr::complex::CellComplex::base_complex(self) {
            Err(e) => v.push(Violation::new("base_complex", e.to_string())),
            Ok(base) => {
                if let Err(e) = base.validate(self) {
                    v.push(Violation::new("base_complex", e.to_string()));
                } else if base.euler_characteristic() != 2 {
                    v.push(Violation::new(
                        "base_not_sphere",
                        format!("Euler characteristic {}", base.euler_characteristic()),
                    ));
                } else {
                    match base.subdivide(self) {
                        Err(e) => v.push(Violation::new("subdivision_complex", e.to_string())),
                        Ok(sub) => {
                            if let Err(e) = sub.validate(self) {
                                v.push(Violation::new("subdivision_complex", e.to_string()));
                            } else if sub.euler_characteristic() != 2 {
                                v.push(Violation::new(
                                    "subdivision_not_sphere",
                                    format!("Euler characteristic {}", sub.euler_characteristic()),
                                ));
                            }
                        }
                    }
                }
            }
        }
        v
    }

    fn validate_chart(&self, t: &TileTypeData, sigma: &[EdgeTypeId], v: &mut Vec<Violation>) {
        let word = &t.boundary;
        // Parent piece coverage and inner-edge usage.
        let mut parent_seen: Vec<Vec<usize>> = word
            .iter()
            .map(|oe| vec![0; self.edge_types[oe.edge].subdivision.len()])
            .collect();
        let mut inner_users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.inner_edges];

        for (si, s) in t.subtiles.iter().enumerate() {
            let Some(sub_t) = self.tile_types.get(s.tile) else {
                v.push(Violation::new("subtile_tile", format!("tile {} subtile {si}", t.id)));
                continue;
            };
            if s.sides.len() != sub_t.word_len() || s.corners.len() != sub_t.word_len() {
                v.push(Violation::new(
                    "subtile_word_len",
                    format!("tile {} subtile {si}", t.id),
                ));
                continue;
            }
            for (k, side) in s.sides.iter().enumerate() {
                let slot = sub_t.boundary[k];
                match side {
                    SideRef::Parent { pos, idx } => {
                        let Some(parent) = word.get(*pos) else {
                            v.push(Violation::new(
                                "parent_pos",
                                format!("tile {} subtile {si} side {k}", t.id),
                            ));
                            continue;
                        };
                        let pieces = &self.edge_types[parent.edge].subdivision;
                        let Some(piece) = pieces.get(*idx) else {
                            v.push(Violation::new(
                                "parent_idx",
                                format!("tile {} subtile {si} side {k}", t.id),
                            ));
                            continue;
                        };
                        parent_seen[*pos][*idx] += 1;
                        // The slot type must match the subdivision entry,
                        // with the orientation algebra
                        // `piece.forward == (slot sign == parent sign)`.
                        if piece.edge != slot.edge {
                            v.push(Violation::new(
                                "piece_type",
                                format!(
                                    "tile {} subtile {si} side {k}: chart says {}, word says {}",
                                    t.id, piece.edge, slot.edge
                                ),
                            ));
                        }
                        if piece.forward != (slot.forward == parent.forward) {
                            v.push(Violation::new(
                                "piece_orientation",
                                format!("tile {} subtile {si} side {k}", t.id),
                            ));
                        }
                    }
                    SideRef::Inner { id } => {
                        if *id >= t.inner_edges {
                            v.push(Violation::new(
                                "inner_id",
                                format!("tile {} subtile {si} side {k}", t.id),
                            ));
                        } else {
                            inner_users[*id].push((si, k));
                        }
                    }
                }
            }
            for (k, c) in s.corners.iter().enumerate() {
                let ok = match c {
                    CornerRef::ParentCorner { i } => *i < word.len(),
                    CornerRef::ParentSplit { pos, idx } => word
                        .get(*pos)
                        .map(|oe| *idx + 1 < self.edge_types[oe.edge].subdivision.len())
                        .unwrap_or(false),
                    CornerRef::Inner { id } => *id < t.inner_vertex_marks.len(),
                };
                if !ok {
                    v.push(Violation::new(
                        "corner_ref",
                        format!("tile {} subtile {si} corner {k}", t.id),
                    ));
                    continue;
                }
                // Split and inner corners must carry the subtile's corner class.
                let expected = sub_t.corner_marks[k];
                let actual = match c {
                    CornerRef::ParentCorner { .. } => None,
                    CornerRef::ParentSplit { pos, idx } => {
                        Some(self.edge_types[word[*pos].edge].split_marks[*idx])
                    }
                    CornerRef::Inner { id } => Some(t.inner_vertex_marks[*id]),
                };
                if let Some(actual) = actual {
                    if actual != expected {
                        v.push(Violation::new(
                            "corner_mark",
                            format!(
                                "tile {} subtile {si} corner {k}: chart mark {actual:?}, subtile class {expected:?}",
                                t.id
                            ),
                        ));
                    }
                }
            }
        }

        for (pos, seen) in parent_seen.iter().enumerate() {
            for (idx, &count) in seen.iter().enumerate() {
                if count != 1 {
                    v.push(Violation::new(
                        "parent_coverage",
                        format!("tile {}: boundary position {pos} piece {idx} used {count} times", t.id),
                    ));
                }
            }
        }
        for (id, users) in inner_users.iter().enumerate() {
            if users.len() != 2 {
                v.push(Violation::new(
                    "inner_usage",
                    format!("tile {}: interior edge {id} used {} times", t.id, users.len()),
                ));
                continue;
            }
            let (s1, k1) = users[0];
            let (s2, k2) = users[1];
            let w1 = self.tile_types[t.subtiles[s1].tile].boundary[k1];
            let w2 = self.tile_types[t.subtiles[s2].tile].boundary[k2];
            if w2.edge != sigma[w1.edge] || w2.forward == w1.forward {
                v.push(Violation::new(
                    "inner_gluing",
                    format!(
                        "tile {}: interior edge {id} glues ({}, {}) to ({}, {})",
                        t.id, w1.edge, w1.forward, w2.edge, w2.forward
                    ),
                ));
            }
        }
    }
}

/// Validate a rule; alias for [`SubdivisionRule::validate`].
pub fn validate_rule(rule: &SubdivisionRule) -> Vec<Violation> {
    rule.validate()
}
