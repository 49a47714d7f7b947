//! The parallelogram fundamental domain of a nonrigid map `z ↦ nz + β`:
//! an `n × n` array of grid tiles with two marked midpoint vertices, and its
//! one-tile subdivision rule.
//!
//! Everything is combinatorial over the lattice `Z + Zτ`; points are integer
//! pairs `(x, y)` meaning `x + yτ`. The tile is the hexagon with corners
//! `(t,0), (t+2,0), (t+2,1), (t,1)` and valence-2 marks at `(t+1, 0)` and
//! `(t+1, 1)`, where `t = 1` exactly when the translation class has odd
//! real part.

use super::{DomainReport, FundomError};
use crate::fsr::{
    CornerRef, EdgeTypeData, GammaTag, OrientedEdge, PairingEntry, SideRef, SubdivisionRule,
    SubtileSpec, TileTypeData, VertexMark,
};
use crate::hexplane::PcClass;
use crate::lattes::TauValue;
use std::collections::BTreeMap;

/// Word signs of the six edge types: intrinsic directions point toward the
/// marks on the marked sides and up the left/right sides.
pub const PAR_WORD_SIGNS: [bool; 6] = [true, false, true, true, false, false];

pub type GridPt = (i64, i64);

/// A directed unit piece of the grid skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridPiece {
    pub a: GridPt,
    pub b: GridPt,
}

impl GridPiece {
    fn key(&self) -> (GridPt, GridPt) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

/// The assembled parallelogram domain.
#[derive(Debug, Clone)]
pub struct GridDomainData {
    pub n: i64,
    pub beta: (i64, i64),
    /// X-translation of the tile (1 when the class has odd real part).
    pub translate: i64,
    pub tau: TauValue,
    /// The six boundary edges, counterclockwise from the corner before the
    /// bottom mark.
    pub boundary: Vec<Vec<GridPiece>>,
    pub pairing: Vec<PairingEntry>,
    /// Subtile corner points (the cell at `(x0, y0)` spans `[x0, x0+2] ×
    /// [y0, y0+1]`).
    pub subtiles: Vec<GridPt>,
    pub report: DomainReport,
}

/// Build the combinatorial parallelogram domain for multiplier `n ≥ 2` and a
/// translation class in `{0, 1, τ, 1+τ}`.
pub fn build_parallelogram_domain(
    n: i64,
    tau: TauValue,
    beta: (i64, i64),
) -> Result<GridDomainData, FundomError> {
    if n < 2 {
        return Err(FundomError::InvalidInput(format!("multiplier {n} must be at least 2")));
    }
    let beta = (beta.0.rem_euclid(2), beta.1.rem_euclid(2));
    let t = beta.0; // tile translated by 1 exactly when the class is odd
    let (b1, b2) = beta;

    // F = n·P + β spans [b1, b1+2n] × [b2, b2+n]; its six boundary edges cut
    // at the corners and the two side midpoints (b1+n, b2) and (b1+n, b2+n).
    let bl = (b1, b2);
    let br = (b1 + 2 * n, b2);
    let tr = (b1 + 2 * n, b2 + n);
    let tl = (b1, b2 + n);
    let bm = (b1 + n, b2);
    let tm = (b1 + n, b2 + n);

    let hrun = |from: GridPt, to_x: i64| -> Vec<GridPiece> {
        let step = if to_x > from.0 { 1 } else { -1 };
        let mut v = Vec::new();
        let mut x = from.0;
        while x != to_x {
            v.push(GridPiece { a: (x, from.1), b: (x + step, from.1) });
            x += step;
        }
        v
    };
    let vrun = |from: GridPt, to_y: i64| -> Vec<GridPiece> {
        let step = if to_y > from.1 { 1 } else { -1 };
        let mut v = Vec::new();
        let mut y = from.1;
        while y != to_y {
            v.push(GridPiece { a: (from.0, y), b: (from.0, y + step) });
            y += step;
        }
        v
    };

    let boundary = vec![
        hrun(bl, bm.0),  // edge 1: bottom-left corner to bottom mark
        hrun(bm, br.0),  // edge 2: bottom mark to bottom-right corner
        vrun(br, tr.1),  // edge 3: right side, upward
        hrun(tr, tm.0),  // edge 4: top-right corner to top mark
        hrun(tm, tl.0),  // edge 5: top mark to top-left corner
        vrun(tl, bl.1),  // edge 6: left side, downward
    ];

    let class = |p: GridPt| PcClass::from_pair(p.0, p.1);
    let pairing = vec![
        PairingEntry { a: 0, b: 1, tag: GammaTag::Rotation(class(bm)) },
        PairingEntry { a: 2, b: 5, tag: GammaTag::Translation },
        PairingEntry { a: 3, b: 4, tag: GammaTag::Rotation(class(tm)) },
    ];

    let mut subtiles = Vec::with_capacity((n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            subtiles.push((b1 + 2 * i, b2 + j));
        }
    }

    let mut report = DomainReport::new();
    report.push(
        "subtile_count",
        subtiles.len() as i64 == n * n,
        format!("{} cells", subtiles.len()),
    );
    // Every cell is a tile of the translated tiling: x-offsets share the
    // tile parity.
    report.push(
        "cells_on_grid",
        subtiles.iter().all(|&(x, _)| (x - t).rem_euclid(2) == 0),
        "",
    );
    // The translation class is a full-valence vertex of the tiling.
    report.push("beta_full_valence", (b1 - t).rem_euclid(2) == 0, "");

    Ok(GridDomainData {
        n,
        beta,
        translate: t,
        tau,
        boundary,
        pairing,
        subtiles,
        report,
    })
}

/// Extract the one-tile rule: the hexagon tile with six edge types, each
/// subtile anchored by the translation or rotation matching it to the tile.
pub fn extract_par_rule(d: &GridDomainData) -> Result<SubdivisionRule, FundomError> {
    let (b1, b2) = d.beta;
    let n = d.n;
    let class = |p: GridPt| VertexMark::Postcritical(PcClass::from_pair(p.0, p.1));

    // Subtile cells, counterclockwise from the cell corner: bottom-left
    // half, bottom-right half, right side, top-right half, top-left half,
    // left side (downward).
    let cells_of = |&(x0, y0): &GridPt| -> [GridPiece; 6] {
        [
            GridPiece { a: (x0, y0), b: (x0 + 1, y0) },
            GridPiece { a: (x0 + 1, y0), b: (x0 + 2, y0) },
            GridPiece { a: (x0 + 2, y0), b: (x0 + 2, y0 + 1) },
            GridPiece { a: (x0 + 2, y0 + 1), b: (x0 + 1, y0 + 1) },
            GridPiece { a: (x0 + 1, y0 + 1), b: (x0, y0 + 1) },
            GridPiece { a: (x0, y0 + 1), b: (x0, y0) },
        ]
    };
    let corners_of = |&(x0, y0): &GridPt| -> [GridPt; 6] {
        [
            (x0, y0),
            (x0 + 1, y0),
            (x0 + 2, y0),
            (x0 + 2, y0 + 1),
            (x0 + 1, y0 + 1),
            (x0, y0 + 1),
        ]
    };
    // Anchor: cell k maps to word position (k + r) mod 6; the identity for
    // translation-matched cells, the half-turn for rotation-matched ones.
    // The tile sits on row 0, so the matching element is a translation
    // exactly when the cell's row is even.
    let anchor_of = |&(_, y0): &GridPt| -> usize {
        if y0.rem_euclid(2) == 0 {
            0
        } else {
            3
        }
    };

    // Piece users.
    let mut users: BTreeMap<(GridPt, GridPt), Vec<(usize, usize)>> = BTreeMap::new();
    for (si, s) in d.subtiles.iter().enumerate() {
        for (k, cell) in cells_of(s).iter().enumerate() {
            users.entry(cell.key()).or_default().push((si, k));
        }
    }

    // Boundary pieces: lookup and subdivision sequences.
    let mut boundary_lookup: BTreeMap<(GridPt, GridPt), (usize, usize)> = BTreeMap::new();
    let mut edge_types: Vec<EdgeTypeData> = Vec::new();
    for (j, be) in d.boundary.iter().enumerate() {
        let m = be.len();
        let mut subdivision = vec![OrientedEdge::fwd(0); m];
        let mut split_marks = vec![VertexMark::Accidental; m.saturating_sub(1)];
        for (idx_ccw, piece) in be.iter().enumerate() {
            let u = users
                .get(&piece.key())
                .map(Vec::as_slice)
                .and_then(|s| if let [one] = s { Some(*one) } else { None })
                .ok_or_else(|| {
                    FundomError::Extraction(format!("boundary piece of edge {} unmatched", j + 1))
                })?;
            let (si, k) = u;
            let slot = (k + anchor_of(&d.subtiles[si])) % 6;
            let o_p = PAR_WORD_SIGNS[slot];
            let o_j = PAR_WORD_SIGNS[j];
            let idx = if o_j { idx_ccw } else { m - 1 - idx_ccw };
            subdivision[idx] = OrientedEdge { edge: slot, forward: o_p == o_j };
            boundary_lookup.insert(piece.key(), (j, idx));
        }
        for t in 0..m.saturating_sub(1) {
            let ccw_junction = if PAR_WORD_SIGNS[j] { t } else { m - 2 - t };
            split_marks[t] = class(be[ccw_junction].b);
        }
        edge_types.push(EdgeTypeData { id: j, subdivision, split_marks });
    }

    // Interior edges and interior vertices.
    let mut inner_edge_ids: BTreeMap<(GridPt, GridPt), usize> = BTreeMap::new();
    for (key, u) in &users {
        if boundary_lookup.contains_key(key) {
            continue;
        }
        if u.len() != 2 {
            return Err(FundomError::Extraction(format!(
                "interior piece {key:?} has {} users",
                u.len()
            )));
        }
        let id = inner_edge_ids.len();
        inner_edge_ids.insert(*key, id);
    }

    let corner_points: Vec<GridPt> = {
        let bl = (b1, b2);
        let br = (b1 + 2 * n, b2);
        let tr = (b1 + 2 * n, b2 + n);
        let tl = (b1, b2 + n);
        let bm = (b1 + n, b2);
        let tm = (b1 + n, b2 + n);
        vec![bl, bm, br, tr, tm, tl]
    };
    let corner_index: BTreeMap<GridPt, usize> = corner_points
        .iter()
        .enumerate()
        .map(|(i, p)| (*p, i))
        .collect();
    let mut boundary_split_index: BTreeMap<GridPt, (usize, usize)> = BTreeMap::new();
    for (j, be) in d.boundary.iter().enumerate() {
        let m = be.len();
        for t in 0..m.saturating_sub(1) {
            let ccw_junction = if PAR_WORD_SIGNS[j] { t } else { m - 2 - t };
            boundary_split_index.insert(be[ccw_junction].b, (j, t));
        }
    }
    let mut inner_vertex_ids: BTreeMap<GridPt, usize> = BTreeMap::new();
    let mut inner_vertex_marks: Vec<VertexMark> = Vec::new();
    for s in &d.subtiles {
        for v in corners_of(s) {
            if corner_index.contains_key(&v) || boundary_split_index.contains_key(&v) {
                continue;
            }
            inner_vertex_ids.entry(v).or_insert_with(|| {
                inner_vertex_marks.push(class(v));
                inner_vertex_marks.len() - 1
            });
        }
    }

    let mut specs = Vec::with_capacity(d.subtiles.len());
    for s in &d.subtiles {
        let cells = cells_of(s);
        let corners = corners_of(s);
        let r = anchor_of(s);
        let mut sides = Vec::with_capacity(6);
        let mut corner_refs = Vec::with_capacity(6);
        for p in 0..6 {
            let k = (p + 6 - r) % 6;
            let side = match boundary_lookup.get(&cells[k].key()) {
                Some(&(pos, idx)) => SideRef::Parent { pos, idx },
                None => SideRef::Inner { id: inner_edge_ids[&cells[k].key()] },
            };
            sides.push(side);
            let v = corners[k];
            let c = if let Some(&i) = corner_index.get(&v) {
                CornerRef::ParentCorner { i }
            } else if let Some(&(pos, idx)) = boundary_split_index.get(&v) {
                CornerRef::ParentSplit { pos, idx }
            } else {
                CornerRef::Inner { id: inner_vertex_ids[&v] }
            };
            corner_refs.push(c);
        }
        specs.push(SubtileSpec { tile: 0, sides, corners: corner_refs });
    }

    // Tile corner marks: all lattice points.
    let t = d.translate;
    let tile_corners = [(t, 0), (t + 1, 0), (t + 2, 0), (t + 2, 1), (t + 1, 1), (t, 1)];
    let corner_marks: Vec<VertexMark> = tile_corners.iter().map(|&p| class(p)).collect();

    let tile = TileTypeData {
        id: 0,
        name: "parallelogram".to_string(),
        boundary: (0..6)
            .map(|j| OrientedEdge { edge: j, forward: PAR_WORD_SIGNS[j] })
            .collect(),
        corner_marks,
        subtiles: specs,
        inner_edges: inner_edge_ids.len(),
        inner_vertex_marks,
    };

    Ok(SubdivisionRule {
        schema_version: 1,
        edge_types,
        pairings: d.pairing.clone(),
        tile_types: vec![tile],
        geometry: Some(par_geometry(d)),
    })
}

fn par_geometry(d: &GridDomainData) -> serde_json::Value {
    let tau = d.tau.value();
    serde_json::json!({
        "kind": "parallelogram",
        "n": d.n,
        "beta": [d.beta.0, d.beta.1],
        "translate": d.translate,
        "tau": {
            "m": tau.radicand(),
            "x": format!("{}/{}", tau.rational_part().numer(), tau.rational_part().denom()),
            "y": format!("{}/{}", tau.radical_part().numer(), tau.radical_part().denom()),
        },
        "cells": d.subtiles.iter().map(|&(x, y)| serde_json::json!([x, y])).collect::<Vec<_>>(),
        "boundary": d
            .boundary
            .iter()
            .map(|e| {
                let mut pts: Vec<serde_json::Value> =
                    e.iter().map(|p| serde_json::json!([p.a.0, p.a.1])).collect();
                if let Some(last) = e.last() {
                    pts.push(serde_json::json!([last.b.0, last.b.1]));
                }
                serde_json::Value::Array(pts)
            })
            .collect::<Vec<_>>(),
    })
}
