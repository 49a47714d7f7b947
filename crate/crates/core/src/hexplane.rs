//! The standard hexagon tiling `T`, its dual triangulation `T*`, the
//! embedding of lattice data onto edge midpoints, and edge path
//! approximations of lines.
//!
//! Concrete instantiation: the dual vertices (hexagon centers) sit at
//! `(1/2, 0) + Z·a1 + Z·a2` with `a1 = (1, 0)`, `a2 = (1/2, √3/2)`. The
//! marked midpoint lattice is `Z·m1 + Z·m2` with `m1 = (1/4, -√3/4)` and
//! `m2 = (3/4, √3/4)`; the images of `α⁻¹` and `α⁻¹τ` land on `m1` and `m2`.
//!
//! Every y-coordinate in sight is a rational multiple of `√3`, so points are
//! stored as rational pairs `(x, ys)` meaning `(x, ys·√3)`; all predicates
//! reduce to exact rational arithmetic.

use crate::exact::{rat, rat_int, Crossing, ExactLine, PlanePoint, QuadExt, Rat, Sign};
use crate::lattes::MultiplierMatrix;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexError {
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraint(String),
    #[error("edge path is not a simple chain: {0}")]
    NotSimplePath(String),
    #[error("line coordinates are not of the form (rational, rational·√3)")]
    OffGridLine,
}

/// Point `(x, ys·√3)` of the hexagon plane.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexPoint {
    pub x: Rat,
    pub ys: Rat,
}

impl HexPoint {
    pub fn new(x: Rat, ys: Rat) -> HexPoint {
        HexPoint { x, ys }
    }

    pub fn from_ints(x: i64, ys: i64) -> HexPoint {
        HexPoint::new(rat_int(x), rat_int(ys))
    }

    pub fn add(&self, o: &HexPoint) -> HexPoint {
        HexPoint::new(&self.x + &o.x, &self.ys + &o.ys)
    }

    pub fn sub(&self, o: &HexPoint) -> HexPoint {
        HexPoint::new(&self.x - &o.x, &self.ys - &o.ys)
    }

    pub fn neg(&self) -> HexPoint {
        HexPoint::new(-self.x.clone(), -self.ys.clone())
    }

    pub fn scale(&self, r: &Rat) -> HexPoint {
        HexPoint::new(&self.x * r, &self.ys * r)
    }

    pub fn midpoint(&self, o: &HexPoint) -> HexPoint {
        self.add(o).scale(&rat(1, 2))
    }

    pub fn to_plane_point(&self) -> PlanePoint {
        PlanePoint {
            px: QuadExt::rational(3, self.x.clone()),
            py: QuadExt::from_parts(3, Rat::zero(), self.ys.clone()),
        }
    }

    /// Exact conversion from a `PlanePoint` whose x is rational and whose y
    /// is a rational multiple of `√3`.
    pub fn from_plane_point(p: &PlanePoint) -> Option<HexPoint> {
        if !p.px.radical_part().is_zero() || !p.py.rational_part().is_zero() {
            return None;
        }
        Some(HexPoint::new(
            p.px.rational_part().clone(),
            p.py.radical_part().clone(),
        ))
    }
}

impl fmt::Display for HexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}√3)", self.x, self.ys)
    }
}

/// Cross product up to the positive factor `√3`; the sign agrees with the
/// true determinant.
pub fn hex_cross(a: &HexPoint, b: &HexPoint) -> Rat {
    &a.x * &b.ys - &a.ys * &b.x
}

/// Euclidean dot product (`y₁y₂ = 3·ys₁·ys₂`).
pub fn hex_dot(a: &HexPoint, b: &HexPoint) -> Rat {
    &a.x * &b.x + rat_int(3) * &a.ys * &b.ys
}

/// A vertex of the dual triangulation, i.e. the center of a hexagon tile:
/// `(1/2, 0) + u·a1 + w·a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct TriVertex {
    pub u: i64,
    pub w: i64,
}

impl TriVertex {
    pub fn new(u: i64, w: i64) -> TriVertex {
        TriVertex { u, w }
    }

    /// Center of the hexagon: `(1/2 + u + w/2, (w/2)·√3)`.
    pub fn center(&self) -> HexPoint {
        HexPoint::new(rat(1 + 2 * self.u + self.w, 2), rat(self.w, 2))
    }
}

/// Directions of dual edges out of a base vertex.
pub const DIRS: [u8; 3] = [0, 1, 2];

fn dir_step(dir: u8) -> HexPoint {
    match dir {
        0 => HexPoint::new(rat_int(1), rat_int(0)),
        1 => HexPoint::new(rat(1, 2), rat(1, 2)),
        2 => HexPoint::new(rat(-1, 2), rat(1, 2)),
        _ => unreachable!(),
    }
}

/// Half-vector from a tile-edge midpoint to a tile-edge endpoint; the tile
/// edge is perpendicular to the dual edge through the same midpoint.
fn dual_half(dir: u8) -> HexPoint {
    match dir {
        0 => HexPoint::new(rat_int(0), rat(1, 6)),
        1 => HexPoint::new(rat(-1, 4), rat(1, 12)),
        2 => HexPoint::new(rat(-1, 4), rat(-1, 12)),
        _ => unreachable!(),
    }
}

/// An edge of the dual triangulation from `base` toward `base + a1` (dir 0),
/// `base + a2` (dir 1), or `base + (a2 - a1)` (dir 2); equivalently the tile
/// edge of `T` through the same midpoint. The duality is the identity on
/// this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct GridEdge {
    pub base: TriVertex,
    pub dir: u8,
}

impl GridEdge {
    pub fn new(base: TriVertex, dir: u8) -> GridEdge {
        assert!(dir < 3);
        GridEdge { base, dir }
    }

    /// The two dual-triangulation endpoints (hexagon centers).
    pub fn tri_endpoints(&self) -> (HexPoint, HexPoint) {
        let c = self.base.center();
        let s = dir_step(self.dir);
        (c.clone(), c.add(&s))
    }

    /// Shared midpoint of the dual edge and the tile edge.
    pub fn midpoint(&self) -> HexPoint {
        let c = self.base.center();
        c.add(&dir_step(self.dir).scale(&rat(1, 2)))
    }

    /// The two tile-edge endpoints (vertices of `T`), in canonical order.
    pub fn tile_endpoints(&self) -> (HexPoint, HexPoint) {
        let m = self.midpoint();
        let h = dual_half(self.dir);
        (m.add(&h), m.sub(&h))
    }

    /// The hexagons on the two sides of the tile edge (= the dual endpoints).
    pub fn adjacent_hexes(&self) -> (TriVertex, TriVertex) {
        let other = match self.dir {
            0 => TriVertex::new(self.base.u + 1, self.base.w),
            1 => TriVertex::new(self.base.u, self.base.w + 1),
            2 => TriVertex::new(self.base.u - 1, self.base.w + 1),
            _ => unreachable!(),
        };
        (self.base, other)
    }
}

/// The hexagons incident to a vertex of `T` (exactly three for a true tile
/// vertex, fewer for points that are not tile vertices).
pub fn hexagons_at_vertex(v: &HexPoint) -> Vec<TriVertex> {
    let offsets = [
        HexPoint::new(rat(1, 2), rat(1, 6)),
        HexPoint::new(rat(-1, 2), rat(1, 6)),
        HexPoint::new(rat(1, 2), rat(-1, 6)),
        HexPoint::new(rat(-1, 2), rat(-1, 6)),
        HexPoint::new(rat_int(0), rat(1, 3)),
        HexPoint::new(rat_int(0), rat(-1, 3)),
    ];
    let mut out = Vec::new();
    for off in &offsets {
        let c = v.add(off);
        // Valid center: ys = w/2 with integer w, x = 1/2 + u + w/2.
        let w2 = &c.ys * rat_int(2);
        if !w2.is_integer() {
            continue;
        }
        let u2 = &c.x - rat(1, 2) - &c.ys;
        if !u2.is_integer() {
            continue;
        }
        let w = i64::try_from(w2.to_integer()).unwrap();
        let u = i64::try_from(u2.to_integer()).unwrap();
        out.push(TriVertex::new(u, w));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A point of the marked midpoint lattice `Z·m1 + Z·m2`, with coordinates
/// `(p, q)`: the image of `p·α⁻¹ + q·α⁻¹τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct MarkedLatticePoint {
    pub p: i64,
    pub q: i64,
}

impl MarkedLatticePoint {
    pub fn new(p: i64, q: i64) -> MarkedLatticePoint {
        MarkedLatticePoint { p, q }
    }

    /// `p·m1 + q·m2 = ((p + 3q)/4, ((q - p)/4)·√3)`.
    pub fn point(&self) -> HexPoint {
        HexPoint::new(rat(self.p + 3 * self.q, 4), rat(self.q - self.p, 4))
    }
}

/// Embed lattice coordinates onto the marked midpoint lattice (the public
/// exact-plane form).
pub fn psi_embed(p: i64, q: i64) -> PlanePoint {
    MarkedLatticePoint::new(p, q).point().to_plane_point()
}

/// Inverse of the midpoint embedding: coordinates exist if and only if the
/// point is a marked midpoint.
pub fn midpoint_lattice_coords(pt: &HexPoint) -> Option<MarkedLatticePoint> {
    let p = &pt.x - rat_int(3) * &pt.ys;
    let q = &pt.x + &pt.ys;
    if p.is_integer() && q.is_integer() {
        Some(MarkedLatticePoint::new(
            i64::try_from(p.to_integer()).ok()?,
            i64::try_from(q.to_integer()).ok()?,
        ))
    } else {
        None
    }
}

/// The four marked midpoints of a hexagon. The base coordinates of hexagon
/// `(u, w)` are `(u - w, u + w)` and the four marks form the unit square on
/// that corner.
pub fn marked_midpoints(h: &TriVertex) -> [MarkedLatticePoint; 4] {
    let p0 = h.u - h.w;
    let q0 = h.u + h.w;
    [
        MarkedLatticePoint::new(p0, q0),
        MarkedLatticePoint::new(p0 + 1, q0),
        MarkedLatticePoint::new(p0, q0 + 1),
        MarkedLatticePoint::new(p0 + 1, q0 + 1),
    ]
}

/// Postcritical class: a lattice point mod `2Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum PcClass {
    Zero,
    One,
    Tau,
    OnePlusTau,
}

impl PcClass {
    pub fn from_pair(x: i64, y: i64) -> PcClass {
        match (x.rem_euclid(2), y.rem_euclid(2)) {
            (0, 0) => PcClass::Zero,
            (1, 0) => PcClass::One,
            (0, 1) => PcClass::Tau,
            (1, 1) => PcClass::OnePlusTau,
            _ => unreachable!(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PcClass::Zero => "0",
            PcClass::One => "1",
            PcClass::Tau => "tau",
            PcClass::OnePlusTau => "1+tau",
        }
    }
}

impl fmt::Display for PcClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Reduce a lattice point (basis `(1, τ)`) to its postcritical class.
pub fn gamma_reduce(lambda: (i64, i64)) -> PcClass {
    PcClass::from_pair(lambda.0, lambda.1)
}

/// An element `z ↦ ±z + 2λ` of the orbifold group, with `λ` in basis `(1, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaElement {
    pub negate: bool,
    pub lambda: (i64, i64),
}

impl GammaElement {
    /// The order-2 rotation about `λ`.
    pub fn rotation_about(lambda: (i64, i64)) -> GammaElement {
        GammaElement { negate: true, lambda }
    }

    pub fn translation_by_twice(lambda: (i64, i64)) -> GammaElement {
        GammaElement { negate: false, lambda }
    }
}

/// The embedding of the full lattice `Λ = Z + Zτ` into the hexagon plane,
/// determined by a multiplier matrix: `1 = a·α⁻¹ + c·α⁻¹τ` and
/// `τ = b·α⁻¹ + d·α⁻¹τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeEmbedding {
    pub matrix: MultiplierMatrix,
}

impl LatticeEmbedding {
    pub fn new(matrix: MultiplierMatrix) -> LatticeEmbedding {
        LatticeEmbedding { matrix }
    }

    /// Marked-lattice coordinates of `λ = x + yτ`.
    pub fn lattice_coords(&self, lambda: (i64, i64)) -> MarkedLatticePoint {
        let MultiplierMatrix { a, b, c, d } = self.matrix;
        MarkedLatticePoint::new(lambda.0 * a + lambda.1 * b, lambda.0 * c + lambda.1 * d)
    }

    pub fn embed(&self, lambda: (i64, i64)) -> HexPoint {
        self.lattice_coords(lambda).point()
    }

    /// The image of a half-lattice point `λ/2`.
    pub fn embed_half(&self, lambda: (i64, i64)) -> HexPoint {
        self.embed(lambda).scale(&rat(1, 2))
    }

    /// Apply `z ↦ ±z + 2λ` in plane coordinates.
    pub fn gamma_apply(&self, g: &GammaElement, p: &HexPoint) -> HexPoint {
        let t = self.embed(g.lambda).scale(&rat_int(2));
        if g.negate {
            t.sub(p)
        } else {
            t.add(p)
        }
    }

    /// The scaled dynamics on marked-lattice points: `p·α⁻¹ + q·α⁻¹τ` maps to
    /// `(p + β₁) + (q + β₂)τ`, returned in basis `(1, τ)`.
    pub fn forward_lattice(&self, m: &MarkedLatticePoint, beta: (i64, i64)) -> (i64, i64) {
        (m.p + beta.0, m.q + beta.1)
    }
}

/// How a line meets the dual edge of a grid edge.
pub fn line_crosses_dual(line: &ExactLine, e: &GridEdge) -> Crossing {
    let (v0, v1) = e.tri_endpoints();
    crate::exact::segment_crosses_line(line, &v0.to_plane_point(), &v1.to_plane_point())
}

/// Axis-aligned window in `(x, ys)` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HexBox {
    pub x0: Rat,
    pub x1: Rat,
    pub ys0: Rat,
    pub ys1: Rat,
}

impl HexBox {
    pub fn around(points: &[HexPoint], margin: i64) -> HexBox {
        assert!(!points.is_empty());
        let mut x0 = points[0].x.clone();
        let mut x1 = points[0].x.clone();
        let mut ys0 = points[0].ys.clone();
        let mut ys1 = points[0].ys.clone();
        for p in points {
            if p.x < x0 {
                x0 = p.x.clone();
            }
            if p.x > x1 {
                x1 = p.x.clone();
            }
            if p.ys < ys0 {
                ys0 = p.ys.clone();
            }
            if p.ys > ys1 {
                ys1 = p.ys.clone();
            }
        }
        let m = rat_int(margin);
        HexBox {
            x0: x0 - &m,
            x1: x1 + &m,
            ys0: ys0 - &m,
            ys1: ys1 + &m,
        }
    }

    pub fn contains(&self, p: &HexPoint) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.ys >= self.ys0 && p.ys <= self.ys1
    }

    pub fn shrunk(&self, margin: i64) -> HexBox {
        let m = rat_int(margin);
        HexBox {
            x0: &self.x0 + &m,
            x1: &self.x1 - &m,
            ys0: &self.ys0 + &m,
            ys1: &self.ys1 - &m,
        }
    }

    /// Double the half-widths about the center.
    pub fn doubled(&self) -> HexBox {
        let two = rat_int(2);
        let cx = (&self.x0 + &self.x1) / &two;
        let cys = (&self.ys0 + &self.ys1) / &two;
        HexBox {
            x0: &cx - (&cx - &self.x0) * &two,
            x1: &cx + (&self.x1 - &cx) * &two,
            ys0: &cys - (&cys - &self.ys0) * &two,
            ys1: &cys + (&self.ys1 - &cys) * &two,
        }
    }
}

/// Symmetry constraint for an edge path: order-2 rotation centers at
/// `anchor + Z·spacing`, all on the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSymmetry {
    pub rotation_centers: Option<(HexPoint, HexPoint)>,
}

impl PathSymmetry {
    pub fn none() -> PathSymmetry {
        PathSymmetry { rotation_centers: None }
    }

    pub fn rotations(anchor: HexPoint, spacing: HexPoint) -> PathSymmetry {
        PathSymmetry {
            rotation_centers: Some((anchor, spacing)),
        }
    }
}

/// A finite window of the edge path approximation of a line: an ordered
/// chain of tile edges whose dual edges the (possibly symbolically
/// perturbed) line crosses.
#[derive(Debug, Clone)]
pub struct EdgePath {
    edges: Vec<GridEdge>,
    /// Chain vertices; `vertices[i]`, `vertices[i+1]` bound `edges[i]`.
    vertices: Vec<HexPoint>,
    midpoints: Vec<HexPoint>,
    vertex_index: BTreeMap<HexPoint, usize>,
    midpoint_index: BTreeMap<HexPoint, usize>,
    edge_set: BTreeSet<GridEdge>,
    pub window: HexBox,
}

impl EdgePath {
    fn from_chain(edges: Vec<GridEdge>, vertices: Vec<HexPoint>, window: HexBox) -> EdgePath {
        let midpoints: Vec<HexPoint> = edges.iter().map(|e| e.midpoint()).collect();
        let vertex_index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let midpoint_index = midpoints
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let edge_set = edges.iter().copied().collect();
        EdgePath {
            edges,
            vertices,
            midpoints,
            vertex_index,
            midpoint_index,
            edge_set,
            window,
        }
    }

    pub fn edges(&self) -> &[GridEdge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[HexPoint] {
        &self.vertices
    }

    pub fn midpoints(&self) -> &[HexPoint] {
        &self.midpoints
    }

    pub fn vertex_index(&self, p: &HexPoint) -> Option<usize> {
        self.vertex_index.get(p).copied()
    }

    pub fn midpoint_index(&self, p: &HexPoint) -> Option<usize> {
        self.midpoint_index.get(p).copied()
    }

    pub fn contains_edge(&self, e: &GridEdge) -> bool {
        self.edge_set.contains(e)
    }

    pub fn edge_set(&self) -> &BTreeSet<GridEdge> {
        &self.edge_set
    }

    pub fn vertex_set(&self) -> BTreeSet<HexPoint> {
        self.vertices.iter().cloned().collect()
    }

    /// The subchain between vertex indices `i ≤ j`: edges and the closed
    /// vertex run.
    pub fn segment(&self, i: usize, j: usize) -> (&[GridEdge], &[HexPoint]) {
        assert!(i <= j && j < self.vertices.len());
        (&self.edges[i..j], &self.vertices[i..=j])
    }

    /// True when the two paths share no vertex and no edge. Tile edges that
    /// neither coincide nor share an endpoint are disjoint point sets, so
    /// this decides point-set disjointness.
    pub fn disjoint_from(&self, other: &EdgePath) -> bool {
        if self.edges.iter().any(|e| other.contains_edge(e)) {
            return false;
        }
        self.vertices.iter().all(|v| other.vertex_index(v).is_none())
    }
}

/// Public form of the path builder, taking an exact line.
pub fn edge_path_approximation(
    line: &ExactLine,
    window: &HexBox,
    must_contain: &[MarkedLatticePoint],
    symmetry: &PathSymmetry,
) -> Result<EdgePath, HexError> {
    let p0 = HexPoint::from_plane_point(&line.p0).ok_or(HexError::OffGridLine)?;
    let p1 = HexPoint::from_plane_point(&line.p1).ok_or(HexError::OffGridLine)?;
    edge_path_points(&p0, &p1, window, must_contain, symmetry)
}

/// Build the edge path approximation of the line through `p0`, `p1` within
/// `window`. On-line dual vertices are resolved by a symbolic side choice,
/// alternated across the listed rotation centers so the order-2 rotations
/// stabilize the path; the base side is flipped once if needed to contain
/// every `must_contain` point.
pub fn edge_path_points(
    p0: &HexPoint,
    p1: &HexPoint,
    window: &HexBox,
    must_contain: &[MarkedLatticePoint],
    symmetry: &PathSymmetry,
) -> Result<EdgePath, HexError> {
    assert_ne!(p0, p1, "a line needs two distinct points");
    let mut dir = p1.sub(p0);
    let neg = dir.x.is_negative() || (dir.x.is_zero() && dir.ys.is_negative());
    if neg {
        dir = dir.neg();
    }

    for p in must_contain {
        let pt = p.point();
        if !hex_cross(&dir, &pt.sub(p0)).is_zero() {
            return Err(HexError::InconsistentConstraint(format!(
                "required point {pt} is not on the line"
            )));
        }
        if !window.contains(&pt) {
            return Err(HexError::WindowTooSmall(format!(
                "required point {pt} outside the window"
            )));
        }
    }

    if let Some((anchor, spacing)) = &symmetry.rotation_centers {
        if !hex_cross(&dir, &anchor.sub(p0)).is_zero() || !hex_cross(&dir, spacing).is_zero() {
            return Err(HexError::InconsistentConstraint(
                "rotation centers are not on the line".to_string(),
            ));
        }
    }

    let mut last_err = None;
    for flip in [false, true] {
        let path = build_path(p0, &dir, window, symmetry, flip)?;
        let missing = must_contain
            .iter()
            .find(|p| path.midpoint_index(&p.point()).is_none());
        match missing {
            None => return Ok(path),
            Some(p) => {
                last_err = Some(HexError::InconsistentConstraint(format!(
                    "no side choice makes the path contain {}",
                    p.point()
                )))
            }
        }
    }
    Err(last_err.unwrap())
}

fn build_path(
    p0: &HexPoint,
    dir: &HexPoint,
    window: &HexBox,
    symmetry: &PathSymmetry,
    flip_base: bool,
) -> Result<EdgePath, HexError> {
    let margin = rat_int(2);
    let to_i64 = |r: num_bigint::BigInt| -> Result<i64, HexError> {
        i64::try_from(r).map_err(|_| HexError::WindowTooSmall("window out of range".into()))
    };
    let w_lo = to_i64(((&window.ys0 - &margin) * rat_int(2)).floor().to_integer())?;
    let w_hi = to_i64(((&window.ys1 + &margin) * rat_int(2)).ceil().to_integer())?;

    let base_sign = if flip_base { Sign::Negative } else { Sign::Positive };
    let delta = |v: &HexPoint| -> Sign {
        match &symmetry.rotation_centers {
            None => base_sign,
            Some((anchor, spacing)) => {
                // Interval index of v between consecutive rotation centers;
                // the side alternates per interval, which makes every listed
                // rotation (and the translation by two spacings) a symmetry.
                let num = hex_dot(dir, &v.sub(anchor));
                let den = hex_dot(dir, spacing);
                debug_assert!(!den.is_zero());
                let k = (num / den).floor().to_integer();
                if (&k % 2) == num_bigint::BigInt::from(0) {
                    base_sign
                } else {
                    base_sign.flip()
                }
            }
        }
    };

    let mut signs: BTreeMap<TriVertex, Sign> = BTreeMap::new();
    let mut sign_of = |t: &TriVertex| -> Sign {
        if let Some(s) = signs.get(t) {
            return *s;
        }
        let c = t.center();
        let raw = hex_cross(dir, &c.sub(p0));
        let s = if raw.is_zero() { delta(&c) } else { Sign::of_rat(&raw) };
        signs.insert(*t, s);
        s
    };

    let mut crossed: Vec<GridEdge> = Vec::new();
    for w in w_lo..=w_hi {
        let u_lo = to_i64((&window.x0 - &margin - rat(1 + w, 2)).floor().to_integer())?;
        let u_hi = to_i64((&window.x1 + &margin - rat(1 + w, 2)).ceil().to_integer())?;
        for u in u_lo..=u_hi {
            let base = TriVertex::new(u, w);
            for d in DIRS {
                let e = GridEdge::new(base, d);
                let (a, b) = e.tri_endpoints();
                if !window.contains(&a) || !window.contains(&b) {
                    continue;
                }
                let (h0, h1) = e.adjacent_hexes();
                let s0 = sign_of(&h0);
                let s1 = sign_of(&h1);
                if s0 != s1 {
                    crossed.push(e);
                }
            }
        }
    }

    if crossed.is_empty() {
        return Err(HexError::WindowTooSmall("no dual edge crossed".into()));
    }

    let mut incidence: BTreeMap<HexPoint, Vec<usize>> = BTreeMap::new();
    for (i, e) in crossed.iter().enumerate() {
        let (a, b) = e.tile_endpoints();
        incidence.entry(a).or_default().push(i);
        incidence.entry(b).or_default().push(i);
    }
    for (v, inc) in &incidence {
        if inc.len() > 2 {
            return Err(HexError::NotSimplePath(format!(
                "vertex {v} has {} incident path edges",
                inc.len()
            )));
        }
    }

    // Walk components, keep the largest (stray fragments can appear within
    // one edge length of the window boundary).
    let mut seen = vec![false; crossed.len()];
    let mut best: Option<Vec<usize>> = None;
    for start in 0..crossed.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut chain = std::collections::VecDeque::new();
        chain.push_back(start);
        // Extend forward then backward.
        for side in 0..2 {
            loop {
                let (edge_idx, prev_idx) = if side == 0 {
                    let l = chain.len();
                    (chain[l - 1], if l >= 2 { Some(chain[l - 2]) } else { None })
                } else {
                    (chain[0], if chain.len() >= 2 { Some(chain[1]) } else { None })
                };
                let e = crossed[edge_idx];
                let (a, b) = e.tile_endpoints();
                let open_vertex = match prev_idx {
                    None => {
                        if side == 0 {
                            b.clone()
                        } else {
                            a.clone()
                        }
                    }
                    Some(p) => {
                        let (pa, pb) = crossed[p].tile_endpoints();
                        if a == pa || a == pb {
                            b.clone()
                        } else {
                            a.clone()
                        }
                    }
                };
                let next = incidence[&open_vertex]
                    .iter()
                    .copied()
                    .find(|&i| i != edge_idx && !seen[i]);
                match next {
                    Some(i) => {
                        seen[i] = true;
                        if side == 0 {
                            chain.push_back(i);
                        } else {
                            chain.push_front(i);
                        }
                    }
                    None => break,
                }
            }
        }
        let chain: Vec<usize> = chain.into_iter().collect();
        if best.as_ref().map_or(true, |b| chain.len() > b.len()) {
            best = Some(chain);
        }
    }
    let chain = best.expect("nonempty crossed set");

    let mut vertices: Vec<HexPoint> = Vec::with_capacity(chain.len() + 1);
    for (i, &ei) in chain.iter().enumerate() {
        let (a, b) = crossed[ei].tile_endpoints();
        if i == 0 {
            if chain.len() == 1 {
                vertices.push(a);
                vertices.push(b);
            } else {
                let (na, nb) = crossed[chain[1]].tile_endpoints();
                if a == na || a == nb {
                    vertices.push(b);
                    vertices.push(a);
                } else {
                    vertices.push(a);
                    vertices.push(b);
                }
            }
        } else {
            let last = vertices.last().unwrap().clone();
            let next = if a == last { b } else { a };
            vertices.push(next);
        }
    }

    let pf = hex_dot(dir, vertices.first().unwrap());
    let pl = hex_dot(dir, vertices.last().unwrap());
    let reverse = match pf.cmp(&pl) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => vertices.first() > vertices.last(),
    };
    let mut edges: Vec<GridEdge> = chain.into_iter().map(|i| crossed[i]).collect();
    if reverse {
        edges.reverse();
        vertices.reverse();
    }

    Ok(EdgePath::from_chain(edges, vertices, window.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Crossing;

    fn hp(xn: i64, xd: i64, yn: i64, yd: i64) -> HexPoint {
        HexPoint::new(rat(xn, xd), rat(yn, yd))
    }

    #[test]
    fn psi_embedding_examples() {
        assert_eq!(MarkedLatticePoint::new(0, 0).point(), hp(0, 1, 0, 1));
        // (1,0) lands on (1/4, -√3/4).
        assert_eq!(MarkedLatticePoint::new(1, 0).point(), hp(1, 4, -1, 4));
        // m1 + m2 = a1 = (1, 0).
        assert_eq!(MarkedLatticePoint::new(1, 1).point(), hp(1, 1, 0, 1));
    }

    #[test]
    fn marked_midpoints_of_base_hexagon() {
        let marks = marked_midpoints(&TriVertex::new(0, 0));
        let pts: BTreeSet<HexPoint> = marks.iter().map(|m| m.point()).collect();
        let want: BTreeSet<HexPoint> = [
            hp(0, 1, 0, 1),
            hp(1, 1, 0, 1),
            hp(3, 4, 1, 4),
            hp(1, 4, -1, 4),
        ]
        .into_iter()
        .collect();
        assert_eq!(pts, want);
    }

    #[test]
    fn marked_midpoints_translate() {
        let base: BTreeSet<HexPoint> = marked_midpoints(&TriVertex::new(0, 0))
            .iter()
            .map(|m| m.point())
            .collect();
        let shifted: BTreeSet<HexPoint> = marked_midpoints(&TriVertex::new(1, 0))
            .iter()
            .map(|m| m.point())
            .collect();
        let want: BTreeSet<HexPoint> = base
            .iter()
            .map(|p| p.add(&HexPoint::from_ints(1, 0)))
            .collect();
        assert_eq!(shifted, want);
    }

    #[test]
    fn every_hexagon_has_exactly_four_marked_midpoints() {
        // Exhaustive check over a 10×10 block: of the six edge midpoints,
        // exactly the four returned ones are lattice points.
        for u in 0..10 {
            for w in 0..10 {
                let h = TriVertex::new(u, w);
                let c = h.center();
                let mut marked = 0;
                for dirv in [
                    hp(1, 2, 0, 1),
                    hp(-1, 2, 0, 1),
                    hp(1, 4, 1, 4),
                    hp(-1, 4, -1, 4),
                    hp(-1, 4, 1, 4),
                    hp(1, 4, -1, 4),
                ] {
                    if midpoint_lattice_coords(&c.add(&dirv)).is_some() {
                        marked += 1;
                    }
                }
                assert_eq!(marked, 4);
                for m in marked_midpoints(&h) {
                    assert!(midpoint_lattice_coords(&m.point()).is_some());
                }
            }
        }
    }

    #[test]
    fn tile_vertices_touch_three_hexagons() {
        for u in -3..3 {
            for w in -3..3 {
                for d in DIRS {
                    let (a, b) = GridEdge::new(TriVertex::new(u, w), d).tile_endpoints();
                    assert_eq!(hexagons_at_vertex(&a).len(), 3);
                    assert_eq!(hexagons_at_vertex(&b).len(), 3);
                }
            }
        }
    }

    #[test]
    fn dual_crossing_examples() {
        // The dual edge through midpoint (0,0) joins centers (-1/2,0), (1/2,0).
        let e = GridEdge::new(TriVertex::new(-1, 0), 0);
        assert_eq!(e.midpoint(), hp(0, 1, 0, 1));

        let line = ExactLine::new(
            psi_embed(0, 0),
            PlanePoint::from_rats(rat(11, 4), rat(-3, 4)),
        );
        assert_eq!(line_crosses_dual(&line, &e), Crossing::CrossesInterior);

        // A horizontal line slightly above misses it.
        let above = ExactLine::new(
            PlanePoint::from_rats(rat_int(0), rat(1, 100)),
            PlanePoint::from_rats(rat_int(1), rat(1, 100)),
        );
        assert_eq!(line_crosses_dual(&above, &e), Crossing::Misses);

        // A line through a dual vertex is flagged distinctly.
        let through_center = ExactLine::new(
            PlanePoint::from_rats(rat(1, 2), rat_int(0)),
            PlanePoint::from_rats(rat(1, 2), rat_int(1)),
        );
        assert_eq!(line_crosses_dual(&through_center, &e), Crossing::TouchesEndpoint);
    }

    #[test]
    fn rotation_about_marked_midpoint_preserves_tiling() {
        // z ↦ 2m - z maps tile edges to tile edges for a marked midpoint m:
        // check that rotated tile-edge endpoint pairs are again tile edges.
        let m = MarkedLatticePoint::new(2, 1).point().scale(&rat_int(2));
        let mut all_edges: BTreeSet<(HexPoint, HexPoint)> = BTreeSet::new();
        for u in -8..8 {
            for w in -8..8 {
                for d in DIRS {
                    let (a, b) = GridEdge::new(TriVertex::new(u, w), d).tile_endpoints();
                    let (a, b) = if a < b { (a, b) } else { (b, a) };
                    all_edges.insert((a, b));
                }
            }
        }
        for u in -2..2 {
            for w in -2..2 {
                for d in DIRS {
                    let (a, b) = GridEdge::new(TriVertex::new(u, w), d).tile_endpoints();
                    let (ra, rb) = (m.sub(&a), m.sub(&b));
                    let (ra, rb) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    assert!(all_edges.contains(&(ra, rb)));
                }
            }
        }
    }

    #[test]
    fn generic_path_is_simple_and_crossed() {
        let p0 = hp(1, 10, 1, 100);
        let p1 = hp(31, 10, 7, 100);
        let window = HexBox::around(&[p0.clone(), p1.clone()], 3);
        let path = edge_path_points(&p0, &p1, &window, &[], &PathSymmetry::none()).unwrap();
        assert!(path.edges().len() > 4);
        // Every returned edge's dual is crossed (the definition restated).
        let line = ExactLine::new(p0.to_plane_point(), p1.to_plane_point());
        for e in path.edges() {
            assert_eq!(line_crosses_dual(&line, e), Crossing::CrossesInterior);
        }
        // Interior chain vertices have exactly two incident path edges.
        for (i, v) in path.vertices().iter().enumerate() {
            let count = path
                .edges()
                .iter()
                .filter(|e| {
                    let (a, b) = e.tile_endpoints();
                    &a == v || &b == v
                })
                .count();
            if i == 0 || i == path.vertices().len() - 1 {
                assert_eq!(count, 1);
            } else {
                assert_eq!(count, 2);
            }
        }
    }

    #[test]
    fn path_contains_required_marks_and_rotation_symmetry() {
        // The embedded line through the lattice points 0 and 1 for the
        // matrix (5,-3,2,4), with rotation centers at every lattice point.
        let emb = LatticeEmbedding::new(MultiplierMatrix::new(5, -3, 2, 4));
        let b0 = emb.embed((0, 0));
        let b1 = emb.embed((1, 0));
        let window = HexBox::around(&[b0.clone(), b1.clone()], 5);
        let spacing = b1.sub(&b0);
        let sym = PathSymmetry::rotations(b0.clone(), spacing.clone());
        let must = [emb.lattice_coords((0, 0)), emb.lattice_coords((1, 0))];
        let path = edge_path_points(&b0, &b1, &window, &must, &sym).unwrap();
        assert!(path.midpoint_index(&b0).is_some());
        assert!(path.midpoint_index(&b1).is_some());

        // The rotation about the embedded 0 maps edge midpoints well inside
        // the window to path edge midpoints.
        let g = GammaElement::rotation_about((0, 0));
        let inner = window.shrunk(2);
        let mut checked = 0;
        for m in path.midpoints() {
            let rm = emb.gamma_apply(&g, m);
            if inner.contains(m) && inner.contains(&rm) {
                assert!(path.midpoint_index(&rm).is_some(), "rotated image of {m}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn parallel_paths_disjoint_when_no_dual_edge_meets_both() {
        let p0 = hp(1, 10, 1, 100);
        let p1 = hp(31, 10, 7, 100);
        let offsets = [rat(3, 2), rat_int(2), rat(5, 2)];
        let mut confirmed = 0;
        for off in offsets {
            let q0 = HexPoint::new(p0.x.clone(), &p0.ys + &off);
            let q1 = HexPoint::new(p1.x.clone(), &p1.ys + &off);
            let window = HexBox::around(&[p0.clone(), p1.clone(), q0.clone(), q1.clone()], 3);
            let pa = edge_path_points(&p0, &p1, &window, &[], &PathSymmetry::none()).unwrap();
            let pb = edge_path_points(&q0, &q1, &window, &[], &PathSymmetry::none()).unwrap();
            let la = ExactLine::new(p0.to_plane_point(), p1.to_plane_point());
            let lb = ExactLine::new(q0.to_plane_point(), q1.to_plane_point());
            let mut meets_both = false;
            'search: for w in -6..6 {
                for u in -6..12 {
                    for d in DIRS {
                        let e = GridEdge::new(TriVertex::new(u, w), d);
                        let hits = |l: &ExactLine| line_crosses_dual(l, &e) != Crossing::Misses;
                        if hits(&la) && hits(&lb) {
                            meets_both = true;
                            break 'search;
                        }
                    }
                }
            }
            if !meets_both {
                assert!(pa.disjoint_from(&pb));
                confirmed += 1;
            }
        }
        assert!(confirmed > 0, "at least one offset satisfies the hypothesis");
    }

    #[test]
    fn gamma_reduce_examples() {
        assert_eq!(gamma_reduce((2, 0)), PcClass::Zero);
        assert_eq!(gamma_reduce((3, 1)), PcClass::OnePlusTau);
    }

    #[test]
    fn gamma_apply_rotation() {
        let emb = LatticeEmbedding::new(MultiplierMatrix::new(5, -3, 2, 4));
        let p = hp(7, 8, 3, 8);
        let beta = (1, 0);
        let g = GammaElement::rotation_about(beta);
        let rotated = emb.gamma_apply(&g, &p);
        let expected = emb.embed(beta).scale(&rat_int(2)).sub(&p);
        assert_eq!(rotated, expected);
    }
}
