//! The ten-edge hexagonal fundamental domain: construction from edge path
//! approximations, per-instance validity checks, assembly from explicit
//! hexagon sets (templates), and rule extraction.

use super::{DomainReport, FundomError};
use crate::exact::{rat, rat_int, Rat};
use crate::fsr::{
    CornerRef, EdgeTypeData, GammaTag, OrientedEdge, PairingEntry, SideRef, SubdivisionRule,
    SubtileSpec, TileTypeData, VertexMark,
};
use crate::hexplane::{
    edge_path_points, gamma_reduce, hex_cross, midpoint_lattice_coords,
    EdgePath, GridEdge, HexBox, HexPoint, LatticeEmbedding, MarkedLatticePoint, PathSymmetry,
    PcClass, TriVertex,
};
use crate::lattes::{beta_representatives, MultiplierMatrix};
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// Which part of a tile edge a boundary piece occupies. `HalfA`/`HalfB` name
/// the half containing the first/second canonical tile endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PiecePart {
    Whole,
    HalfA,
    HalfB,
}

/// Canonical identity of a cell-boundary piece (a tile edge or half-edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PieceKey {
    pub edge: GridEdge,
    pub part: PiecePart,
}

/// A directed piece `a → b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub key: PieceKey,
    pub a: HexPoint,
    pub b: HexPoint,
}

/// One of the ten boundary edges: a directed run of pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub pieces: Vec<Piece>,
}

impl BoundaryEdge {
    pub fn start(&self) -> &HexPoint {
        &self.pieces.first().expect("nonempty edge").a
    }

    pub fn end(&self) -> &HexPoint {
        &self.pieces.last().expect("nonempty edge").b
    }

    /// The unordered segment set, for exact pairing comparisons.
    fn segment_set(&self) -> BTreeSet<(HexPoint, HexPoint)> {
        self.pieces
            .iter()
            .map(|p| {
                if p.a < p.b {
                    (p.a.clone(), p.b.clone())
                } else {
                    (p.b.clone(), p.a.clone())
                }
            })
            .collect()
    }
}

/// Word signs of the ten edge types in counterclockwise order: the intrinsic
/// directions point toward the marks (rotation pairs) or along the
/// translation (edges 5 and 10).
pub const HEX_WORD_SIGNS: [bool; 10] =
    [true, false, true, false, true, true, false, true, false, false];

/// Corner indices of the four marked vertices in the ten-cycle.
const MARK_CORNERS: [usize; 4] = [1, 3, 6, 8];

/// An assembled hexagonal fundamental domain.
#[derive(Debug, Clone)]
pub struct HexDomainData {
    pub matrix: MultiplierMatrix,
    pub beta: (i64, i64),
    /// The ten boundary edges in counterclockwise order, starting with the
    /// edge into the first mark.
    pub boundary: Vec<BoundaryEdge>,
    /// The ten cut points: corners and marks, `corners[k]` starts edge `k`.
    pub cycle_points: Vec<HexPoint>,
    /// Lattice translates marked on the boundary, in corner order 1, 3, 6, 8.
    pub marks: [(PcClass, MarkedLatticePoint); 4],
    pub pairing: Vec<PairingEntry>,
    /// Constituent hexagons.
    pub hexes: Vec<TriVertex>,
    pub report: DomainReport,
    /// Full edge paths when built from lines (used by the validity checks).
    pub paths: Option<Box<HexPaths>>,
}

#[derive(Debug, Clone)]
pub struct HexPaths {
    pub l1: EdgePath,
    pub l2: EdgePath,
    pub l3: EdgePath,
    pub p1: HexPoint,
    pub q1: HexPoint,
    pub r1: HexPoint,
    pub p2: HexPoint,
    pub q2: HexPoint,
    pub r2: HexPoint,
}

impl HexDomainData {
    pub fn degree(&self) -> i64 {
        self.matrix.degree()
    }

    pub fn corners(&self) -> [&HexPoint; 6] {
        [
            &self.cycle_points[0],
            &self.cycle_points[2],
            &self.cycle_points[4],
            &self.cycle_points[5],
            &self.cycle_points[7],
            &self.cycle_points[9],
        ]
    }

    /// Closed vertex cycle of the boundary (no repeated final point).
    pub fn boundary_cycle(&self) -> Vec<HexPoint> {
        let mut out = Vec::new();
        for e in &self.boundary {
            for p in &e.pieces {
                out.push(p.a.clone());
            }
        }
        out
    }
}

fn embedding_of(matrix: &MultiplierMatrix) -> LatticeEmbedding {
    LatticeEmbedding::new(*matrix)
}

fn exceptional(matrix: &MultiplierMatrix) -> bool {
    matrix.c == 1 && (0..=2).contains(&matrix.a)
}

/// Split a directed tile edge at its midpoint when the midpoint is marked.
fn split_directed_edge(e: &GridEdge, a: &HexPoint, b: &HexPoint) -> Vec<Piece> {
    let mid = e.midpoint();
    let (a0, _b0) = e.tile_endpoints();
    if midpoint_lattice_coords(&mid).is_some() {
        let part_of = |p: &HexPoint| if *p == a0 { PiecePart::HalfA } else { PiecePart::HalfB };
        vec![
            Piece { key: PieceKey { edge: *e, part: part_of(a) }, a: a.clone(), b: mid.clone() },
            Piece { key: PieceKey { edge: *e, part: part_of(b) }, a: mid, b: b.clone() },
        ]
    } else {
        vec![Piece {
            key: PieceKey { edge: *e, part: PiecePart::Whole },
            a: a.clone(),
            b: b.clone(),
        }]
    }
}

/// Directed edge run of a path between two of its vertices.
fn path_arc(
    path: &EdgePath,
    from: &HexPoint,
    to: &HexPoint,
) -> Option<Vec<(GridEdge, HexPoint, HexPoint)>> {
    let i = path.vertex_index(from)?;
    let j = path.vertex_index(to)?;
    let (lo, hi) = (i.min(j), i.max(j));
    let (edges, verts) = path.segment(lo, hi);
    let mut run: Vec<(GridEdge, HexPoint, HexPoint)> = edges
        .iter()
        .enumerate()
        .map(|(k, e)| (*e, verts[k].clone(), verts[k + 1].clone()))
        .collect();
    if i > j {
        run.reverse();
        for r in &mut run {
            std::mem::swap(&mut r.1, &mut r.2);
        }
    }
    Some(run)
}

fn signed_area2(cycle: &[HexPoint]) -> Rat {
    let mut s = Rat::zero();
    for (i, p) in cycle.iter().enumerate() {
        let q = &cycle[(i + 1) % cycle.len()];
        s += hex_cross(p, q);
    }
    s
}

fn point_in_polygon(pt: &HexPoint, cycle: &[HexPoint]) -> bool {
    let mut inside = false;
    for (i, a) in cycle.iter().enumerate() {
        let b = &cycle[(i + 1) % cycle.len()];
        let above_a = a.ys > pt.ys;
        let above_b = b.ys > pt.ys;
        if above_a != above_b {
            // x-coordinate where the segment crosses the horizontal line.
            let t = (&pt.ys - &a.ys) / (&b.ys - &a.ys);
            let x = &a.x + t * (&b.x - &a.x);
            if x > pt.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Hexagons whose closed tiles meet an arc: the union of the hexagons at
/// each arc vertex (every tile meeting the arc contains one of its
/// vertices).
fn hexes_meeting(verts: &[HexPoint]) -> BTreeSet<TriVertex> {
    let mut set = BTreeSet::new();
    for v in verts {
        set.extend(crate::hexplane::hexagons_at_vertex(v));
    }
    set
}

/// Build the hexagonal fundamental domain for a normalized matrix and coset
/// representative.
pub fn build_hex_domain(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
) -> Result<HexDomainData, FundomError> {
    if !matrix.is_normalized() {
        return Err(FundomError::InvalidInput(format!(
            "matrix ({}, {}, {}, {}) is not normalized",
            matrix.a, matrix.b, matrix.c, matrix.d
        )));
    }
    // The construction is only proved away from the three smallest
    // multipliers; when a bundled template covers the case, direct there.
    // Without a template the generic machinery still runs and reports which
    // checks fail.
    if exceptional(matrix) && super::template::template_for(matrix, beta).is_some() {
        return Err(FundomError::ExceptionalAlpha { a: matrix.a, c: matrix.c });
    }
    if !beta_representatives(matrix).representatives.contains(&beta) {
        return Err(FundomError::InvalidInput(format!(
            "beta {beta:?} is not one of the coset representatives"
        )));
    }

    let emb = embedding_of(matrix);
    // Window seeded from the marked translates with a three-hexagon margin.
    let seed: Vec<HexPoint> = [
        (-1, 0),
        (0, 0),
        (1, 0),
        (2, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
        (2, 1),
    ]
    .into_iter()
    .map(|(x, y)| emb.embed((beta.0 + x, beta.1 + y)))
    .collect();
    let mut window = HexBox::around(&seed, 3);

    let mut last_err: FundomError = FundomError::WindowExhausted;
    for _ in 0..=4 {
        match build_attempt(matrix, beta, &emb, &window) {
            Ok(d) => return Ok(d),
            Err(e @ FundomError::ValidityCheckFailed(_)) => return Err(e),
            Err(e @ FundomError::ExceptionalAlpha { .. }) => return Err(e),
            Err(e) => {
                last_err = e;
                window = window.doubled();
            }
        }
    }
    let _ = last_err;
    Err(FundomError::WindowExhausted)
}

fn build_attempt(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
    emb: &LatticeEmbedding,
    window: &HexBox,
) -> Result<HexDomainData, FundomError> {
    let lp = |x: i64, y: i64| emb.lattice_coords((beta.0 + x, beta.1 + y));
    let pt = |x: i64, y: i64| lp(x, y).point();

    let psi1 = emb.embed((1, 0));
    let two_psi1 = psi1.scale(&rat_int(2));

    // Lines 1 and 2 through consecutive marks, with rotation symmetry at
    // every lattice translate; line 3 through the half-offset points.
    let l1 = edge_path_points(
        &pt(0, 0),
        &pt(1, 0),
        window,
        &[lp(-1, 0), lp(0, 0), lp(1, 0), lp(2, 0)],
        &PathSymmetry::rotations(pt(0, 0), psi1.clone()),
    )?;
    let l2 = edge_path_points(
        &pt(0, 1),
        &pt(1, 1),
        window,
        &[lp(-1, 1), lp(0, 1), lp(1, 1), lp(2, 1)],
        &PathSymmetry::rotations(pt(0, 1), psi1.clone()),
    )?;
    let half = emb.embed_half((1, 0));
    let l3_p0 = pt(0, 0).sub(&half);
    let l3_p1 = pt(0, 1).sub(&half);
    let l3 = edge_path_points(&l3_p0, &l3_p1, window, &[], &PathSymmetry::none())?;

    // Select the junction pair: shared vertices of line 3 with lines 1 and
    // 2, minimizing the run along line 3 subject to the open run avoiding
    // both paths.
    let mut report = DomainReport::new();
    let shared13: Vec<usize> = l3
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| l1.vertex_index(v).is_some())
        .map(|(i, _)| i)
        .collect();
    let shared23: Vec<usize> = l3
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| l2.vertex_index(v).is_some())
        .map(|(i, _)| i)
        .collect();
    let mut best: Option<(usize, usize, usize)> = None;
    for &i1 in &shared13 {
        for &i2 in &shared23 {
            let (lo, hi) = (i1.min(i2), i1.max(i2));
            if hi - lo == 0 {
                continue;
            }
            // The open run must avoid both paths.
            let (edges, verts) = l3.segment(lo, hi);
            let interior_ok = verts[1..verts.len() - 1]
                .iter()
                .all(|v| l1.vertex_index(v).is_none() && l2.vertex_index(v).is_none())
                && edges
                    .iter()
                    .all(|e| !l1.contains_edge(e) && !l2.contains_edge(e));
            if !interior_ok {
                continue;
            }
            let dist = hi - lo;
            let key = (dist, i1, i2);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    let Some((_, i1, i2)) = best else {
        report.push(
            "p_selection",
            false,
            format!(
                "no junction pair: {} vertices shared with line 1, {} with line 2",
                shared13.len(),
                shared23.len()
            ),
        );
        return Err(FundomError::ValidityCheckFailed(report));
    };
    report.push("p_selection", true, "");
    let p1 = l3.vertices()[i1].clone();
    let p2 = l3.vertices()[i2].clone();

    // Derived corner points; all must lie on their paths.
    let q1 = pt(0, 0).scale(&rat_int(2)).sub(&p1);
    let r1 = p1.add(&two_psi1);
    let q2 = pt(0, 1).scale(&rat_int(2)).sub(&p2);
    let r2 = p2.add(&two_psi1);
    for (label, point, path) in [
        ("q1", &q1, &l1),
        ("r1", &r1, &l1),
        ("q2", &q2, &l2),
        ("r2", &r2, &l2),
    ] {
        if path.vertex_index(point).is_none() {
            return Err(FundomError::Hex(crate::hexplane::HexError::WindowTooSmall(
                format!("derived corner {label} not on its path"),
            )));
        }
    }

    // Boundary arcs.
    let a1 = path_arc(&l1, &p1, &r1).expect("arc on line 1");
    let a3 = path_arc(&l3, &p1, &p2).expect("arc on line 3");
    let a4: Vec<(GridEdge, HexPoint, HexPoint)> = a3
        .iter()
        .map(|(e, a, b)| {
            let shifted = shift_edge(e, &two_psi1)
                .ok_or_else(|| {
                    FundomError::Extraction("translated edge leaves the grid".to_string())
                })
                .expect("lattice translation preserves the tiling");
            (shifted, a.add(&two_psi1), b.add(&two_psi1))
        })
        .collect();
    let a2 = path_arc(&l2, &r2, &p2).expect("arc on line 2");
    let mut cycle_edges: Vec<(GridEdge, HexPoint, HexPoint)> = Vec::new();
    cycle_edges.extend(a1.clone());
    cycle_edges.extend(a4.clone());
    cycle_edges.extend(a2.clone());
    let mut a3_rev = a3.clone();
    a3_rev.reverse();
    for r in &mut a3_rev {
        std::mem::swap(&mut r.1, &mut r.2);
    }
    cycle_edges.extend(a3_rev);

    // Closure and orientation.
    for i in 0..cycle_edges.len() {
        let next = &cycle_edges[(i + 1) % cycle_edges.len()];
        if cycle_edges[i].2 != next.1 {
            return Err(FundomError::Extraction("boundary cycle does not close".to_string()));
        }
    }
    let cycle_verts: Vec<HexPoint> = cycle_edges.iter().map(|(_, a, _)| a.clone()).collect();
    if signed_area2(&cycle_verts) <= Rat::zero() {
        return Err(FundomError::Extraction(
            "boundary cycle is not counterclockwise".to_string(),
        ));
    }

    // Subtiles: hexagons inside the boundary polygon.
    let hexes = hexes_inside(&cycle_verts)?;

    let paths = HexPaths {
        l1,
        l2,
        l3,
        p1: p1.clone(),
        q1,
        r1,
        p2: p2.clone(),
        q2,
        r2,
    };
    let mut domain = assemble_domain(matrix, beta, emb, cycle_edges, hexes, &p1, &p2, report)?;
    domain.paths = Some(Box::new(paths));
    domain.report = verify_domain(&domain);
    if domain.report.all_pass() {
        Ok(domain)
    } else {
        Err(FundomError::ValidityCheckFailed(domain.report))
    }
}

/// Translate a grid edge by a vector that preserves the center lattice.
fn shift_edge(e: &GridEdge, by: &HexPoint) -> Option<GridEdge> {
    let c = e.base.center().add(by);
    let w2 = &c.ys * rat_int(2);
    if !w2.is_integer() {
        return None;
    }
    let u2 = &c.x - rat(1, 2) - &c.ys;
    if !u2.is_integer() {
        return None;
    }
    Some(GridEdge::new(
        TriVertex::new(
            i64::try_from(u2.to_integer()).ok()?,
            i64::try_from(w2.to_integer()).ok()?,
        ),
        e.dir,
    ))
}

fn hexes_inside(cycle_verts: &[HexPoint]) -> Result<Vec<TriVertex>, FundomError> {
    let bbox = HexBox::around(cycle_verts, 1);
    let w_lo = i64::try_from((&bbox.ys0 * rat_int(2)).floor().to_integer())
        .map_err(|_| FundomError::Extraction("window overflow".to_string()))?;
    let w_hi = i64::try_from((&bbox.ys1 * rat_int(2)).ceil().to_integer())
        .map_err(|_| FundomError::Extraction("window overflow".to_string()))?;
    let mut out = Vec::new();
    for w in w_lo..=w_hi {
        let u_lo = i64::try_from((&bbox.x0 - rat(1 + w, 2)).floor().to_integer())
            .map_err(|_| FundomError::Extraction("window overflow".to_string()))?;
        let u_hi = i64::try_from((&bbox.x1 - rat(1 + w, 2)).ceil().to_integer())
            .map_err(|_| FundomError::Extraction("window overflow".to_string()))?;
        for u in u_lo..=u_hi {
            let h = TriVertex::new(u, w);
            if point_in_polygon(&h.center(), cycle_verts) {
                out.push(h);
            }
        }
    }
    Ok(out)
}

/// Cut the boundary cycle at the corner and mark points and assemble the
/// ten edges, the pairing, and the subtile list into a domain.
#[allow(clippy::too_many_arguments)]
fn assemble_domain(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
    emb: &LatticeEmbedding,
    cycle_edges: Vec<(GridEdge, HexPoint, HexPoint)>,
    hexes: Vec<TriVertex>,
    p1: &HexPoint,
    p2: &HexPoint,
    mut report: DomainReport,
) -> Result<HexDomainData, FundomError> {
    // Pieces of the whole boundary, counterclockwise.
    let mut pieces: Vec<Piece> = Vec::new();
    for (e, a, b) in &cycle_edges {
        pieces.extend(split_directed_edge(e, a, b));
    }

    // The ten cut points in counterclockwise order.
    let mark_of = |x: i64, y: i64| emb.embed((beta.0 + x, beta.1 + y));
    let m_beta = mark_of(0, 0);
    let m_1beta = mark_of(1, 0);
    let m_tbeta = mark_of(0, 1);
    let m_1tbeta = mark_of(1, 1);
    let q1 = m_beta.scale(&rat_int(2)).sub(p1);
    let r1 = p1.add(&emb.embed((1, 0)).scale(&rat_int(2)));
    let q2 = m_tbeta.scale(&rat_int(2)).sub(p2);
    let r2 = p2.add(&emb.embed((1, 0)).scale(&rat_int(2)));
    let cuts: Vec<HexPoint> = vec![
        p1.clone(),
        m_beta.clone(),
        q1,
        m_1beta.clone(),
        r1,
        r2,
        m_1tbeta.clone(),
        q2,
        m_tbeta.clone(),
        p2.clone(),
    ];

    // Junction index of each piece start.
    let mut junction_index: BTreeMap<HexPoint, usize> = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        junction_index.insert(p.a.clone(), i);
    }
    let mut cut_positions = Vec::with_capacity(10);
    for c in &cuts {
        match junction_index.get(c) {
            Some(&i) => cut_positions.push(i),
            None => {
                report.push(
                    "boundary_cuts",
                    false,
                    format!("cut point {c} is not a boundary junction"),
                );
                return Err(FundomError::ValidityCheckFailed(report));
            }
        }
    }
    // Counterclockwise order starting at the first junction.
    let n = pieces.len();
    let base = cut_positions[0];
    let rel: Vec<usize> = cut_positions.iter().map(|&i| (i + n - base) % n).collect();
    if !rel.windows(2).all(|w| w[0] < w[1]) {
        report.push(
            "boundary_cuts",
            false,
            format!("cut points out of cyclic order: {rel:?}"),
        );
        return Err(FundomError::ValidityCheckFailed(report));
    }
    report.push("boundary_cuts", true, "");

    let rotated: Vec<Piece> = (0..n).map(|i| pieces[(base + i) % n].clone()).collect();
    let mut boundary = Vec::with_capacity(10);
    for k in 0..10 {
        let from = rel[k];
        let to = if k == 9 { n } else { rel[k + 1] };
        boundary.push(BoundaryEdge {
            pieces: rotated[from..to].to_vec(),
        });
    }

    let pairing = vec![
        PairingEntry { a: 0, b: 1, tag: GammaTag::Rotation(gamma_reduce(beta)) },
        PairingEntry { a: 2, b: 3, tag: GammaTag::Rotation(gamma_reduce((beta.0 + 1, beta.1))) },
        PairingEntry { a: 4, b: 9, tag: GammaTag::Translation },
        PairingEntry {
            a: 5,
            b: 6,
            tag: GammaTag::Rotation(gamma_reduce((beta.0 + 1, beta.1 + 1))),
        },
        PairingEntry { a: 7, b: 8, tag: GammaTag::Rotation(gamma_reduce((beta.0, beta.1 + 1))) },
    ];

    let marks = [
        (gamma_reduce(beta), emb.lattice_coords(beta)),
        (
            gamma_reduce((beta.0 + 1, beta.1)),
            emb.lattice_coords((beta.0 + 1, beta.1)),
        ),
        (
            gamma_reduce((beta.0 + 1, beta.1 + 1)),
            emb.lattice_coords((beta.0 + 1, beta.1 + 1)),
        ),
        (
            gamma_reduce((beta.0, beta.1 + 1)),
            emb.lattice_coords((beta.0, beta.1 + 1)),
        ),
    ];

    let mut hexes = hexes;
    hexes.sort_unstable();
    Ok(HexDomainData {
        matrix: *matrix,
        beta,
        boundary,
        cycle_points: cuts,
        marks,
        pairing,
        hexes,
        report,
        paths: None,
    })
}

/// Assemble a domain from an explicit hexagon set and the two junction
/// corners (the template path). The boundary is the edge cycle of the union.
pub fn assemble_from_hexes(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
    hexes: &[TriVertex],
    p1: &HexPoint,
    p2: &HexPoint,
) -> Result<HexDomainData, FundomError> {
    let emb = embedding_of(matrix);
    let hex_set: BTreeSet<TriVertex> = hexes.iter().copied().collect();
    if hex_set.len() != hexes.len() {
        return Err(FundomError::InvalidInput("duplicate hexagons".to_string()));
    }

    // Boundary edges: tile edges with exactly one side inside.
    let mut boundary_edges: Vec<GridEdge> = Vec::new();
    for h in &hex_set {
        for e in hexagon_edges(h) {
            let (s0, s1) = e.adjacent_hexes();
            let inside = hex_set.contains(&s0) as u8 + hex_set.contains(&s1) as u8;
            if inside == 1 {
                boundary_edges.push(e);
            }
        }
    }
    boundary_edges.sort_unstable();
    boundary_edges.dedup();

    // Chain the cycle.
    let mut incidence: BTreeMap<HexPoint, Vec<usize>> = BTreeMap::new();
    for (i, e) in boundary_edges.iter().enumerate() {
        let (a, b) = e.tile_endpoints();
        incidence.entry(a).or_default().push(i);
        incidence.entry(b).or_default().push(i);
    }
    for (v, inc) in &incidence {
        if inc.len() != 2 {
            return Err(FundomError::InvalidInput(format!(
                "tile union is not simply bounded at {v} ({} boundary edges)",
                inc.len()
            )));
        }
    }
    let mut cycle: Vec<(GridEdge, HexPoint, HexPoint)> = Vec::new();
    let mut used = vec![false; boundary_edges.len()];
    let first = boundary_edges[0];
    let (fa, fb) = first.tile_endpoints();
    cycle.push((first, fa, fb));
    used[0] = true;
    loop {
        let tail = cycle.last().unwrap().2.clone();
        if tail == cycle[0].1 {
            break;
        }
        let next = incidence[&tail].iter().copied().find(|&i| !used[i]);
        let Some(i) = next else {
            return Err(FundomError::InvalidInput("boundary does not close".to_string()));
        };
        used[i] = true;
        let e = boundary_edges[i];
        let (a, b) = e.tile_endpoints();
        if a == tail {
            cycle.push((e, a, b));
        } else {
            cycle.push((e, b, a));
        }
    }
    if used.iter().any(|&u| !u) {
        return Err(FundomError::InvalidInput(
            "tile union boundary is disconnected".to_string(),
        ));
    }
    let verts: Vec<HexPoint> = cycle.iter().map(|(_, a, _)| a.clone()).collect();
    if signed_area2(&verts) < Rat::zero() {
        cycle.reverse();
        for r in &mut cycle {
            std::mem::swap(&mut r.1, &mut r.2);
        }
    }

    let report = DomainReport::new();
    let mut domain = assemble_domain(
        matrix,
        beta,
        &emb,
        cycle,
        hex_set.into_iter().collect(),
        p1,
        p2,
        report,
    )?;
    domain.report = verify_domain(&domain);
    Ok(domain)
}

fn hexagon_edges(h: &TriVertex) -> [GridEdge; 6] {
    [
        GridEdge::new(*h, 0),
        GridEdge::new(*h, 1),
        GridEdge::new(*h, 2),
        GridEdge::new(TriVertex::new(h.u - 1, h.w), 0),
        GridEdge::new(TriVertex::new(h.u, h.w - 1), 1),
        GridEdge::new(TriVertex::new(h.u + 1, h.w - 1), 2),
    ]
}

/// The per-instance validity report.
///
/// With the construction paths available the checks are: (c1) the paths of
/// lines 1 and 2 are disjoint; (c2)/(c3) the junction corners sit strictly
/// between the neighboring marked translates and are not cell-adjacent to
/// them; (c4) the two translation-paired runs are disjoint; (c5)/(c6) no
/// tile meets both of the named runs; (c7) the boundary is simple; (c8) the
/// recorded group elements match paired edges exactly. Without paths (the
/// bundled templates) the geometric checks are replaced by exact pairing,
/// counting, and orbit checks.
pub fn verify_domain(d: &HexDomainData) -> DomainReport {
    let mut report = DomainReport::new();
    for c in &d.report.checks {
        report.checks.push(c.clone());
    }
    let emb = embedding_of(&d.matrix);
    let beta = d.beta;

    if let Some(paths) = &d.paths {
        // c1: one translation period plus margin is covered because both
        // windowed paths span the whole construction window.
        report.push(
            "c1_paths_disjoint",
            paths.l1.disjoint_from(&paths.l2),
            "paths of lines 1 and 2 share no vertex and no edge",
        );

        // c2/c3: position of the junction corner between the neighboring
        // marks: strictly between and not cell-adjacent means the corner
        // index is in [lo+2, hi-1] for the marked edge indices lo < hi.
        let position_check = |path: &EdgePath, pm1: &HexPoint, pm2: &HexPoint, p: &HexPoint| {
            let e1 = path.midpoint_index(pm1);
            let e2 = path.midpoint_index(pm2);
            let ip = path.vertex_index(p);
            match (e1, e2, ip) {
                (Some(e1), Some(e2), Some(ip)) => {
                    let (lo, hi) = (e1.min(e2), e1.max(e2));
                    let pass = ip >= lo + 2 && ip + 1 <= hi;
                    (pass, format!("marks at edges {lo},{hi}; corner at vertex {ip}"))
                }
                _ => (false, "mark or corner missing from the path".to_string()),
            }
        };
        let (pass, detail) = position_check(
            &paths.l1,
            &emb.embed((beta.0 - 1, beta.1)),
            &emb.embed(beta),
            &paths.p1,
        );
        report.push("c2_p1_position", pass, detail);
        let (pass, detail) = position_check(
            &paths.l2,
            &emb.embed((beta.0 - 1, beta.1 + 1)),
            &emb.embed((beta.0, beta.1 + 1)),
            &paths.p2,
        );
        report.push("c3_p2_position", pass, detail);

        // c4: the run of line 3 between the junctions is disjoint from its
        // translate (edges 5 and 10 of the boundary).
        let e5 = &d.boundary[4];
        let e10 = &d.boundary[9];
        let disjoint = e5.segment_set().is_disjoint(&e10.segment_set()) && {
            let v5: BTreeSet<HexPoint> = e5
                .pieces
                .iter()
                .flat_map(|p| [p.a.clone(), p.b.clone()])
                .collect();
            let v10: BTreeSet<HexPoint> = e10
                .pieces
                .iter()
                .flat_map(|p| [p.a.clone(), p.b.clone()])
                .collect();
            v5.is_disjoint(&v10)
        };
        report.push("c4_segments_disjoint", disjoint, "translation pair shares no point");

        // c5: no tile meets both the run of line 3 (edge 10) and the run of
        // line 1 between the second and third corners (edges 3 and 4).
        let arc_vertices = |edges: &[&BoundaryEdge]| -> Vec<HexPoint> {
            let mut v = Vec::new();
            for e in edges {
                for p in &e.pieces {
                    v.push(p.a.clone());
                }
            }
            if let Some(last) = edges.last().and_then(|e| e.pieces.last()) {
                v.push(last.b.clone());
            }
            v
        };
        let l3_run = arc_vertices(&[&d.boundary[9]]);
        let l4_run = arc_vertices(&[&d.boundary[4]]);
        let l1_qr = arc_vertices(&[&d.boundary[2], &d.boundary[3]]);
        let l1_pq = arc_vertices(&[&d.boundary[0], &d.boundary[1]]);
        let c5 = hexes_meeting(&l3_run).is_disjoint(&hexes_meeting(&l1_qr));
        report.push("c5_no_tile_meets_l3_and_l1qr", c5, "");
        let c6 = hexes_meeting(&l4_run).is_disjoint(&hexes_meeting(&l1_pq));
        report.push("c6_no_tile_meets_l4_and_l1pq", c6, "");
    } else {
        // Template checks: one hexagon per group orbit.
        let mut ok = true;
        let mut detail = String::new();
        for (i, h1) in d.hexes.iter().enumerate() {
            for h2 in &d.hexes[i + 1..] {
                if hexes_equivalent(&d.matrix, h1, h2) {
                    ok = false;
                    detail = format!("{h1:?} and {h2:?} are equivalent");
                }
            }
        }
        report.push("t_one_per_orbit", ok, detail);
    }

    // c7: the boundary cycle is simple.
    let cycle = d.boundary_cycle();
    let distinct: BTreeSet<&HexPoint> = cycle.iter().collect();
    report.push(
        "c7_boundary_simple",
        distinct.len() == cycle.len(),
        format!("{} points, {} distinct", cycle.len(), distinct.len()),
    );

    // c8: paired edges match exactly under the recorded group elements.
    let mut pairing_ok = true;
    let mut pairing_detail = String::new();
    for p in &d.pairing {
        let ea = &d.boundary[p.a];
        let eb = &d.boundary[p.b];
        let image: BTreeSet<(HexPoint, HexPoint)> = match p.tag {
            GammaTag::Rotation(_) => {
                // Rotation about the shared mark: the mark is the common
                // endpoint of the two edges.
                let m = ea.end().clone();
                let m2 = m.scale(&rat_int(2));
                ea.segment_set()
                    .into_iter()
                    .map(|(a, b)| {
                        let (ra, rb) = (m2.sub(&a), m2.sub(&b));
                        if ra < rb {
                            (ra, rb)
                        } else {
                            (rb, ra)
                        }
                    })
                    .collect()
            }
            GammaTag::Translation => {
                let t = emb.embed((2, 0));
                eb.segment_set()
                    .into_iter()
                    .map(|(a, b)| {
                        let (ta, tb) = (a.add(&t), b.add(&t));
                        if ta < tb {
                            (ta, tb)
                        } else {
                            (tb, ta)
                        }
                    })
                    .collect()
            }
            GammaTag::Interior => continue,
        };
        let target = match p.tag {
            GammaTag::Rotation(_) => eb.segment_set(),
            _ => ea.segment_set(),
        };
        if image != target {
            pairing_ok = false;
            pairing_detail = format!("edges {} and {} do not match", p.a + 1, p.b + 1);
        }
    }
    report.push("c8_pairing_consistent", pairing_ok, pairing_detail);

    // Area identity: subtile count equals the degree.
    report.push(
        "subtile_count",
        d.hexes.len() as i64 == d.matrix.degree(),
        format!("{} tiles for degree {}", d.hexes.len(), d.matrix.degree()),
    );

    report
}

/// Whether two hexagons lie in one orbit of the orbifold group.
pub(crate) fn hexes_equivalent(matrix: &MultiplierMatrix, h1: &TriVertex, h2: &TriVertex) -> bool {
    let base = |h: &TriVertex| (h.u - h.w, h.u + h.w);
    let (p1, q1) = base(h1);
    let (p2, q2) = base(h2);
    // Translation by 2λ: difference in twice the embedded lattice.
    let in_2l = |v: (i64, i64)| -> bool {
        // v = 2(x·(a,c) + y·(b,d)) over the integers.
        let MultiplierMatrix { a, b, c, d } = *matrix;
        let det = a * d - b * c;
        let num_x = v.0 * d - v.1 * b;
        let num_y = -v.0 * c + v.1 * a;
        num_x % (2 * det) == 0 && num_y % (2 * det) == 0
    };
    if in_2l((p2 - p1, q2 - q1)) {
        return true;
    }
    // Rotation: the base squares satisfy v1 + v2 + (1,1) ∈ 2L.
    in_2l((p1 + p2 + 1, q1 + q2 + 1))
}

// --- rule extraction --------------------------------------------------------

/// The ten boundary cells of a hexagon-with-marks, counterclockwise,
/// starting just after one of the two unmarked whole edges. Cell `k` runs
/// from corner `k` to corner `k+1`; the marked vertices are corners 1, 3,
/// 6, 8 and carry the returned lattice coordinates.
fn subtile_cells(h: &TriVertex) -> ([Piece; 10], [HexPoint; 10], [MarkedLatticePoint; 4]) {
    let c = h.center();
    let at = |xn: i64, xd: i64, yn: i64, yd: i64| c.add(&HexPoint::new(rat(xn, xd), rat(yn, yd)));
    let v330 = at(1, 2, -1, 6);
    let v30 = at(1, 2, 1, 6);
    let v90 = at(0, 1, 1, 3);
    let v150 = at(-1, 2, 1, 6);
    let v210 = at(-1, 2, -1, 6);
    let v270 = at(0, 1, -1, 3);
    let m0 = at(1, 2, 0, 1);
    let m60 = at(1, 4, 1, 4);
    let m180 = at(-1, 2, 0, 1);
    let m240 = at(-1, 4, -1, 4);

    let e_right = GridEdge::new(*h, 0);
    let e_upright = GridEdge::new(*h, 1);
    let e_upleft = GridEdge::new(*h, 2);
    let e_left = GridEdge::new(TriVertex::new(h.u - 1, h.w), 0);
    let e_downleft = GridEdge::new(TriVertex::new(h.u, h.w - 1), 1);
    let e_downright = GridEdge::new(TriVertex::new(h.u + 1, h.w - 1), 2);

    let piece = |edge: GridEdge, part: PiecePart, a: &HexPoint, b: &HexPoint| Piece {
        key: PieceKey { edge, part },
        a: a.clone(),
        b: b.clone(),
    };
    let cells = [
        piece(e_right, PiecePart::HalfB, &v330, &m0),
        piece(e_right, PiecePart::HalfA, &m0, &v30),
        piece(e_upright, PiecePart::HalfB, &v30, &m60),
        piece(e_upright, PiecePart::HalfA, &m60, &v90),
        piece(e_upleft, PiecePart::Whole, &v90, &v150),
        piece(e_left, PiecePart::HalfA, &v150, &m180),
        piece(e_left, PiecePart::HalfB, &m180, &v210),
        piece(e_downleft, PiecePart::HalfA, &v210, &m240),
        piece(e_downleft, PiecePart::HalfB, &m240, &v270),
        piece(e_downright, PiecePart::Whole, &v270, &v330),
    ];
    let corners = [
        v330.clone(),
        m0,
        v30,
        m60,
        v90,
        v150,
        m180,
        v210,
        m240,
        v270,
    ];
    let p0 = h.u - h.w;
    let q0 = h.u + h.w;
    // Marked corners 1, 3, 6, 8 in order.
    let marks = [
        MarkedLatticePoint::new(p0 + 1, q0 + 1),
        MarkedLatticePoint::new(p0, q0 + 1),
        MarkedLatticePoint::new(p0, q0),
        MarkedLatticePoint::new(p0 + 1, q0),
    ];
    (cells, corners, marks)
}

/// Extract the one-tile subdivision rule of a hexagonal domain.
pub fn extract_hex_rule(d: &HexDomainData) -> Result<SubdivisionRule, FundomError> {
    let beta = d.beta;
    let fwd_class = |m: &MarkedLatticePoint| gamma_reduce((m.p + beta.0, m.q + beta.1));

    // The tile type's corner marks.
    let mark_class = |k: usize| -> PcClass {
        match k {
            1 => gamma_reduce(beta),
            3 => gamma_reduce((beta.0 + 1, beta.1)),
            6 => gamma_reduce((beta.0 + 1, beta.1 + 1)),
            8 => gamma_reduce((beta.0, beta.1 + 1)),
            _ => unreachable!(),
        }
    };
    let corner_marks: Vec<VertexMark> = (0..10)
        .map(|k| {
            if MARK_CORNERS.contains(&k) {
                VertexMark::Postcritical(mark_class(k))
            } else {
                VertexMark::Accidental
            }
        })
        .collect();

    // Anchor each subtile: the cyclic shift matching the four marked
    // corners by forward class.
    struct Subtile {
        cells: [Piece; 10],
        corners: [HexPoint; 10],
        anchor: usize,
    }
    let mut subtiles = Vec::with_capacity(d.hexes.len());
    for h in &d.hexes {
        let (cells, corners, marks) = subtile_cells(h);
        let mut anchors = Vec::new();
        for r in [0usize, 5] {
            let ok = MARK_CORNERS.iter().zip(&marks).all(|(&j, m)| {
                let target = (j + r) % 10;
                MARK_CORNERS.contains(&target) && mark_class(target) == fwd_class(m)
            });
            if ok {
                anchors.push(r);
            }
        }
        match anchors.as_slice() {
            [r] => subtiles.push(Subtile { cells, corners, anchor: *r }),
            other => {
                return Err(FundomError::Extraction(format!(
                    "subtile at {h:?} admits {} anchorings",
                    other.len()
                )))
            }
        }
    }

    // Index every cell by its piece key.
    let mut users: BTreeMap<PieceKey, Vec<(usize, usize)>> = BTreeMap::new();
    for (si, s) in subtiles.iter().enumerate() {
        for (k, cell) in s.cells.iter().enumerate() {
            users.entry(cell.key).or_default().push((si, k));
        }
    }

    // Boundary piece lookup: key -> (edge position, intrinsic index), and
    // split vertices along each boundary edge.
    let mut boundary_lookup: BTreeMap<PieceKey, (usize, usize)> = BTreeMap::new();
    let mut edge_types: Vec<EdgeTypeData> = Vec::new();
    for (j, be) in d.boundary.iter().enumerate() {
        let m = be.pieces.len();
        let mut subdivision = vec![OrientedEdge::fwd(0); m];
        let mut split_marks = vec![VertexMark::Accidental; m.saturating_sub(1)];
        for (idx_ccw, piece) in be.pieces.iter().enumerate() {
            let user = match users.get(&piece.key).map(Vec::as_slice) {
                Some([u]) => *u,
                other => {
                    return Err(FundomError::Extraction(format!(
                        "boundary piece of edge {} has {} inner tiles",
                        j + 1,
                        other.map_or(0, <[(usize, usize)]>::len)
                    )))
                }
            };
            let (si, k) = user;
            let slot = (k + subtiles[si].anchor) % 10;
            let o_p = HEX_WORD_SIGNS[slot];
            let o_j = HEX_WORD_SIGNS[j];
            let idx = if o_j { idx_ccw } else { m - 1 - idx_ccw };
            subdivision[idx] = OrientedEdge { edge: slot, forward: o_p == o_j };
            boundary_lookup.insert(piece.key, (j, idx));
        }
        for t in 0..m.saturating_sub(1) {
            let ccw_junction = if HEX_WORD_SIGNS[j] { t } else { m - 2 - t };
            let v = &be.pieces[ccw_junction].b;
            split_marks[t] = vertex_mark_at(v, beta);
        }
        edge_types.push(EdgeTypeData { id: j, subdivision, split_marks });
    }

    // Interior edges and vertices.
    let mut inner_edge_ids: BTreeMap<PieceKey, usize> = BTreeMap::new();
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

    // Interior vertices: subtile corners that are neither domain cut points
    // nor boundary junctions.
    let corner_index: BTreeMap<HexPoint, usize> = d
        .cycle_points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let mut boundary_split_index: BTreeMap<HexPoint, (usize, usize)> = BTreeMap::new();
    for (j, be) in d.boundary.iter().enumerate() {
        let m = be.pieces.len();
        for t in 0..m.saturating_sub(1) {
            let ccw_junction = if HEX_WORD_SIGNS[j] { t } else { m - 2 - t };
            boundary_split_index.insert(be.pieces[ccw_junction].b.clone(), (j, t));
        }
    }
    let mut inner_vertex_ids: BTreeMap<HexPoint, usize> = BTreeMap::new();
    let mut inner_vertex_marks: Vec<VertexMark> = Vec::new();
    for s in &subtiles {
        for v in &s.corners {
            if corner_index.contains_key(v) || boundary_split_index.contains_key(v) {
                continue;
            }
            if !inner_vertex_ids.contains_key(v) {
                inner_vertex_ids.insert(v.clone(), inner_vertex_marks.len());
                inner_vertex_marks.push(vertex_mark_at(v, beta));
            }
        }
    }

    // Subtile specs in type order.
    let mut specs = Vec::with_capacity(subtiles.len());
    for s in &subtiles {
        let mut sides = Vec::with_capacity(10);
        let mut corners = Vec::with_capacity(10);
        for p in 0..10 {
            let k = (p + 10 - s.anchor) % 10;
            let cell = &s.cells[k];
            let side = match boundary_lookup.get(&cell.key) {
                Some(&(pos, idx)) => SideRef::Parent { pos, idx },
                None => SideRef::Inner { id: inner_edge_ids[&cell.key] },
            };
            sides.push(side);
            let v = &s.corners[k];
            let corner = if let Some(&i) = corner_index.get(v) {
                CornerRef::ParentCorner { i }
            } else if let Some(&(pos, idx)) = boundary_split_index.get(v) {
                CornerRef::ParentSplit { pos, idx }
            } else {
                CornerRef::Inner { id: inner_vertex_ids[v] }
            };
            corners.push(corner);
        }
        specs.push(SubtileSpec { tile: 0, sides, corners });
    }

    let tile = TileTypeData {
        id: 0,
        name: "decagon".to_string(),
        boundary: (0..10)
            .map(|j| OrientedEdge { edge: j, forward: HEX_WORD_SIGNS[j] })
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
        geometry: Some(hex_geometry(d)),
    })
}

/// The vertex mark of a boundary junction or interior vertex: marked
/// midpoints carry the class of their forward image, tile vertices are
/// accidental.
fn vertex_mark_at(v: &HexPoint, beta: (i64, i64)) -> VertexMark {
    match midpoint_lattice_coords(v) {
        Some(m) => VertexMark::Postcritical(gamma_reduce((m.p + beta.0, m.q + beta.1))),
        None => VertexMark::Accidental,
    }
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn point_json(p: &HexPoint) -> serde_json::Value {
    serde_json::json!([rat_str(&p.x), rat_str(&p.ys)])
}

fn hex_geometry(d: &HexDomainData) -> serde_json::Value {
    serde_json::json!({
        "kind": "hex",
        "matrix": [d.matrix.a, d.matrix.b, d.matrix.c, d.matrix.d],
        "beta": [d.beta.0, d.beta.1],
        "hexes": d.hexes.iter().map(|h| serde_json::json!([h.u, h.w])).collect::<Vec<_>>(),
        "boundary": d
            .boundary
            .iter()
            .map(|e| {
                let mut pts: Vec<serde_json::Value> =
                    e.pieces.iter().map(|p| point_json(&p.a)).collect();
                if let Some(last) = e.pieces.last() {
                    pts.push(point_json(&last.b));
                }
                serde_json::Value::Array(pts)
            })
            .collect::<Vec<_>>(),
        "marks": d
            .marks
            .iter()
            .map(|(c, m)| serde_json::json!({"class": c.label(), "point": point_json(&m.point())}))
            .collect::<Vec<_>>(),
        "corners": d.corners().iter().map(|p| point_json(p)).collect::<Vec<_>>(),
    })
}
