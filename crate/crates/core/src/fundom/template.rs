//! Bundled fundamental-domain templates: the exceptional hexagonal cases
//! (multiplier `a + τ` with `a ∈ {0, 1, 2}`) as explicit hexagon sets, and
//! the two-tile domain of the quadratic map with multiplier `(1+√-7)/2`.
//!
//! Template data lives under `data/templates/` and is embedded at compile
//! time; every file was produced by the in-repo derivation tools and is
//! revalidated by the same machinery on load.

use super::hex::assemble_from_hexes;
use super::{DomainReport, FundamentalDomain, FundomError};
use crate::exact::{rat_int, Rat};
use crate::fsr::{
    CellComplex, CornerRef, EdgeTypeData, GammaTag, OrientedEdge, PairingEntry, SideRef,
    SubdivisionRule, SubtileSpec, TileTypeData, TileTypeId, VertexMark,
};
use crate::hexplane::{HexPoint, PcClass, TriVertex};
use crate::lattes::MultiplierMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

const GOSPER: &str = include_str!("../../data/templates/gosper_2m312.json");
const CASE_2M612: &str = include_str!("../../data/templates/case_2m612.json");
const CASE_1M312: &str = include_str!("../../data/templates/case_1m312.json");
const CASE_1M612: &str = include_str!("../../data/templates/case_1m612.json");
const CASE_0M411: &str = include_str!("../../data/templates/case_0m411.json");
const CASE_0M710_B1: &str = include_str!("../../data/templates/case_0m710_b1.json");
const QUADRATIC: &str = include_str!("../../data/templates/quadratic_sqrtm7.json");

pub fn template_names() -> [&'static str; 7] {
    [
        "gosper_2m312",
        "case_2m612",
        "case_1m312",
        "case_1m612",
        "case_0m411",
        "case_0m710_b1",
        "quadratic_sqrtm7",
    ]
}

/// The bundled template covering a matrix/translation pair, if any.
pub(crate) fn template_for(matrix: &MultiplierMatrix, beta: (i64, i64)) -> Option<&'static str> {
    let key = (matrix.a, matrix.b, matrix.c, matrix.d, beta.0, beta.1);
    Some(match key {
        (2, -3, 1, 2, 0, 0) => "gosper_2m312",
        (2, -6, 1, 2, 0, 0) => "case_2m612",
        (1, -3, 1, 2, 0, 0) => "case_1m312",
        (1, -6, 1, 2, 0, 0) => "case_1m612",
        (0, -4, 1, 1, 0, 0) => "case_0m411",
        (0, -7, 1, 0, 1, 0) => "case_0m710_b1",
        _ => return None,
    })
}

fn template_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "gosper_2m312" => GOSPER,
        "case_2m612" => CASE_2M612,
        "case_1m312" => CASE_1M312,
        "case_1m612" => CASE_1M612,
        "case_0m411" => CASE_0M411,
        "case_0m710_b1" => CASE_0M710_B1,
        "quadratic_sqrtm7" => QUADRATIC,
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct HexTemplateFile {
    pub schema_version: u32,
    pub name: String,
    pub kind: String,
    pub matrix: [i64; 4],
    pub beta: [i64; 2],
    pub hexes: Vec<[i64; 2]>,
    pub p1: [String; 2],
    pub p2: [String; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct TwoTileTemplateFile {
    pub schema_version: u32,
    pub name: String,
    pub kind: String,
    pub rule: SubdivisionRule,
    pub cells: Sect4Cells,
}

/// Geometric cells of the two-tile domain, in rational coordinates over the
/// basis `(1, α)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sect4Cells {
    /// The two coarse cells: tile type and polygon.
    pub coarse: Vec<(TileTypeId, Vec<[String; 2]>)>,
    /// Subtiles: tile type, index of the coarse cell subdivided, polygon.
    pub subtiles: Vec<(TileTypeId, usize, Vec<[String; 2]>)>,
}

/// The two-tile template domain.
#[derive(Debug, Clone)]
pub struct TemplateDomain {
    pub name: String,
    pub rule: SubdivisionRule,
    pub cells: Sect4Cells,
    pub report: DomainReport,
}

impl TemplateDomain {
    pub fn subtile_count(&self) -> usize {
        self.cells.subtiles.len()
    }

    pub fn boundary_edge_count(&self) -> usize {
        // Six boundary edges; the extra edge joining the two interior-facing
        // marks is not part of the outer boundary.
        6
    }
}

pub(crate) fn parse_rat(s: &str) -> Result<Rat, FundomError> {
    let err = || FundomError::InvalidInput(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => Ok(Rat::new(
            BigInt::from_str(n).map_err(|_| err())?,
            BigInt::from_str(d).map_err(|_| err())?,
        )),
        None => Ok(Rat::from_integer(BigInt::from_str(s).map_err(|_| err())?)),
    }
}

fn parse_point(p: &[String; 2]) -> Result<HexPoint, FundomError> {
    Ok(HexPoint::new(parse_rat(&p[0])?, parse_rat(&p[1])?))
}

/// Load a bundled template by name.
pub fn build_from_template(name: &str) -> Result<FundamentalDomain, FundomError> {
    let src = template_source(name).ok_or_else(|| FundomError::UnknownTemplate(name.to_string()))?;
    if name == "quadratic_sqrtm7" {
        let file: TwoTileTemplateFile = serde_json::from_str(src)
            .map_err(|e| FundomError::InvalidInput(format!("template {name}: {e}")))?;
        let report = validate_two_tile(&file.rule, &file.cells);
        let domain = TemplateDomain {
            name: file.name,
            rule: file.rule,
            cells: file.cells,
            report,
        };
        if !domain.report.all_pass() {
            return Err(FundomError::ValidityCheckFailed(domain.report));
        }
        return Ok(FundamentalDomain::TwoTile(domain));
    }
    let file: HexTemplateFile = serde_json::from_str(src)
        .map_err(|e| FundomError::InvalidInput(format!("template {name}: {e}")))?;
    let matrix = MultiplierMatrix::new(file.matrix[0], file.matrix[1], file.matrix[2], file.matrix[3]);
    let hexes: Vec<TriVertex> = file.hexes.iter().map(|h| TriVertex::new(h[0], h[1])).collect();
    let p1 = parse_point(&file.p1)?;
    let p2 = parse_point(&file.p2)?;
    let domain = assemble_from_hexes(&matrix, (file.beta[0], file.beta[1]), &hexes, &p1, &p2)?;
    if !domain.report.all_pass() {
        return Err(FundomError::ValidityCheckFailed(domain.report));
    }
    Ok(FundamentalDomain::Hex(domain))
}

fn poly_area2(poly: &[(Rat, Rat)]) -> Rat {
    let mut s = Rat::zero();
    for (i, p) in poly.iter().enumerate() {
        let q = &poly[(i + 1) % poly.len()];
        s += &p.0 * &q.1 - &q.0 * &p.1;
    }
    s
}

fn parse_poly(poly: &[[String; 2]]) -> Result<Vec<(Rat, Rat)>, FundomError> {
    poly.iter()
        .map(|p| Ok((parse_rat(&p[0])?, parse_rat(&p[1])?)))
        .collect()
}

/// Checks for the two-tile template: the rule validates, the quotient
/// complex is the expected sphere with a cycle and a dangling edge in its
/// skeleton, and the exact area/counting oracle holds (each subtile has
/// exactly half the area of its type, two triangles and two pentagons in
/// all).
fn validate_two_tile(rule: &SubdivisionRule, cells: &Sect4Cells) -> DomainReport {
    let mut report = DomainReport::new();
    let violations = rule.validate();
    report.push(
        "rule_valid",
        violations.is_empty(),
        violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    );
    if !violations.is_empty() {
        return report;
    }

    let base = match CellComplex::base_complex(rule) {
        Ok(b) => b,
        Err(e) => {
            report.push("base_complex", false, e.to_string());
            return report;
        }
    };
    report.push(
        "sphere_counts",
        base.vertices.len() == 4 && base.edges.len() == 4 && base.faces.len() == 2,
        format!(
            "V={}, E={}, F={}",
            base.vertices.len(),
            base.edges.len(),
            base.faces.len()
        ),
    );
    // Skeleton: connected with E ≥ V forces a cycle; a valence-1 vertex is
    // the dangling mark.
    let valences = base.vertex_valences();
    let has_dangling = valences.iter().any(|&v| v == 1);
    let has_cycle = base.edges.len() >= base.vertices.len();
    report.push(
        "skeleton_cycle_and_dangling",
        has_cycle && has_dangling,
        format!("valences {valences:?}"),
    );

    // Area/counting oracle.
    let mut ok = true;
    let mut detail = String::new();
    let mut type_counts = vec![0usize; rule.tile_types.len()];
    let mut coarse_areas: Vec<Rat> = Vec::new();
    for (t, poly) in &cells.coarse {
        match parse_poly(poly) {
            Ok(p) => {
                let a = poly_area2(&p);
                if a <= Rat::zero() {
                    ok = false;
                    detail = format!("coarse cell of type {t} not counterclockwise");
                }
                coarse_areas.push(a);
            }
            Err(e) => {
                ok = false;
                detail = e.to_string();
                coarse_areas.push(Rat::zero());
            }
        }
    }
    for (t, parent, poly) in &cells.subtiles {
        type_counts[*t] += 1;
        if let Ok(p) = parse_poly(poly) {
            let a = poly_area2(&p);
            // Degree two: each subtile has exactly half the area of its type.
            let expected = &coarse_areas[rule_type_index(cells, *t)] / rat_int(2);
            if a.abs() != expected {
                ok = false;
                detail = format!(
                    "subtile of type {t} in cell {parent} has area 2A = {a}, expected {expected}"
                );
            }
        }
    }
    report.push("subtile_areas_half", ok, detail);
    report.push(
        "subtile_counts",
        type_counts == vec![2, 2],
        format!("{type_counts:?} subtiles per type"),
    );
    report
}

fn rule_type_index(cells: &Sect4Cells, t: TileTypeId) -> usize {
    cells
        .coarse
        .iter()
        .position(|(ct, _)| *ct == t)
        .expect("each tile type has a coarse cell")
}

// --- construction of the two-tile template data -----------------------------

/// The two-tile rule of the quadratic map, derived from the parallelogram
/// domain with corners 0, 2, α+1, α-1, vertices at 1 and α, and the extra
/// edge joining 0 and α. Edge types: 0..5 are the six boundary edges
/// (bottom pair, right, top pair, left), 6 and 7 are the triangle and
/// pentagon sides of the extra edge.
pub(crate) fn sect4_rule() -> SubdivisionRule {
    use PcClass::{One, OnePlusTau, Tau, Zero as Z0};
    let pc = VertexMark::Postcritical;
    let et = |id: usize, subdivision: Vec<OrientedEdge>, split_marks: Vec<VertexMark>| EdgeTypeData {
        id,
        subdivision,
        split_marks,
    };
    let f = OrientedEdge::fwd;
    let r = OrientedEdge::rev;
    let edge_types = vec![
        et(0, vec![f(6)], vec![]),
        et(1, vec![f(7)], vec![]),
        et(2, vec![f(1), r(0)], vec![pc(One)]),
        et(3, vec![f(6)], vec![]),
        et(4, vec![f(7)], vec![]),
        et(5, vec![f(0), r(1)], vec![pc(One)]),
        et(6, vec![r(2), f(3)], vec![pc(OnePlusTau)]),
        et(7, vec![r(5), f(4)], vec![pc(OnePlusTau)]),
    ];
    let pairings = vec![
        PairingEntry { a: 0, b: 1, tag: GammaTag::Rotation(One) },
        PairingEntry { a: 2, b: 5, tag: GammaTag::Translation },
        PairingEntry { a: 3, b: 4, tag: GammaTag::Rotation(Tau) },
        PairingEntry { a: 6, b: 7, tag: GammaTag::Interior },
    ];

    // Triangle: word (extra edge, long side reversed, lower-left side).
    let triangle = TileTypeData {
        id: 0,
        name: "triangle".to_string(),
        boundary: vec![f(6), r(4), f(5)],
        corner_marks: vec![pc(Z0), pc(Tau), pc(OnePlusTau)],
        subtiles: vec![SubtileSpec {
            tile: 1,
            sides: vec![
                SideRef::Parent { pos: 2, idx: 0 },
                SideRef::Parent { pos: 2, idx: 1 },
                SideRef::Parent { pos: 0, idx: 0 },
                SideRef::Parent { pos: 0, idx: 1 },
                SideRef::Parent { pos: 1, idx: 0 },
            ],
            corners: vec![
                CornerRef::ParentCorner { i: 2 },
                CornerRef::ParentSplit { pos: 2, idx: 0 },
                CornerRef::ParentCorner { i: 0 },
                CornerRef::ParentSplit { pos: 0, idx: 0 },
                CornerRef::ParentCorner { i: 1 },
            ],
        }],
        inner_edges: 0,
        inner_vertex_marks: vec![],
    };

    // Pentagon: word (bottom pair, right side reversed, top-right, extra
    // edge reversed).
    let pentagon = TileTypeData {
        id: 1,
        name: "pentagon".to_string(),
        boundary: vec![f(0), r(1), r(2), f(3), r(7)],
        corner_marks: vec![pc(Z0), pc(One), pc(Z0), pc(OnePlusTau), pc(Tau)],
        subtiles: vec![
            // Lower-left triangle.
            SubtileSpec {
                tile: 0,
                sides: vec![
                    SideRef::Parent { pos: 0, idx: 0 },
                    SideRef::Inner { id: 0 },
                    SideRef::Parent { pos: 4, idx: 0 },
                ],
                corners: vec![
                    CornerRef::ParentCorner { i: 0 },
                    CornerRef::ParentCorner { i: 1 },
                    CornerRef::ParentSplit { pos: 4, idx: 0 },
                ],
            },
            // Upper-left triangle.
            SubtileSpec {
                tile: 0,
                sides: vec![
                    SideRef::Parent { pos: 3, idx: 0 },
                    SideRef::Parent { pos: 4, idx: 1 },
                    SideRef::Inner { id: 1 },
                ],
                corners: vec![
                    CornerRef::ParentCorner { i: 3 },
                    CornerRef::ParentCorner { i: 4 },
                    CornerRef::ParentSplit { pos: 4, idx: 0 },
                ],
            },
            // Right pentagon.
            SubtileSpec {
                tile: 1,
                sides: vec![
                    SideRef::Parent { pos: 2, idx: 1 },
                    SideRef::Parent { pos: 2, idx: 0 },
                    SideRef::Inner { id: 1 },
                    SideRef::Inner { id: 0 },
                    SideRef::Parent { pos: 1, idx: 0 },
                ],
                corners: vec![
                    CornerRef::ParentCorner { i: 2 },
                    CornerRef::ParentSplit { pos: 2, idx: 0 },
                    CornerRef::ParentCorner { i: 3 },
                    CornerRef::ParentSplit { pos: 4, idx: 0 },
                    CornerRef::ParentCorner { i: 1 },
                ],
            },
        ],
        inner_edges: 2,
        inner_vertex_marks: vec![],
    };

    SubdivisionRule {
        schema_version: 1,
        edge_types,
        pairings,
        tile_types: vec![triangle, pentagon],
        geometry: None,
    }
}

/// Geometric cells of the two-tile domain in basis `(1, α)`.
pub fn sect4_cells() -> Sect4Cells {
    let s = |n: i64, d: i64| -> String {
        if d == 1 {
            n.to_string()
        } else {
            format!("{n}/{d}")
        }
    };
    let p = |xn: i64, xd: i64, yn: i64, yd: i64| [s(xn, xd), s(yn, yd)];
    Sect4Cells {
        coarse: vec![
            // Triangle 0, α, α-1 (counterclockwise).
            (0, vec![p(0, 1, 0, 1), p(0, 1, 1, 1), p(-1, 1, 1, 1)]),
            // Pentagon 0, 1, 2, α+1, α.
            (
                1,
                vec![
                    p(0, 1, 0, 1),
                    p(1, 1, 0, 1),
                    p(2, 1, 0, 1),
                    p(1, 1, 1, 1),
                    p(0, 1, 1, 1),
                ],
            ),
        ],
        subtiles: vec![
            // The pentagon filling the triangle.
            (
                1,
                0,
                vec![
                    p(-1, 1, 1, 1),
                    p(-1, 2, 1, 2),
                    p(0, 1, 0, 1),
                    p(1, 2, 1, 2),
                    p(0, 1, 1, 1),
                ],
            ),
            // Two triangles and a pentagon filling the pentagon.
            (0, 1, vec![p(0, 1, 0, 1), p(1, 1, 0, 1), p(1, 2, 1, 2)]),
            (0, 1, vec![p(1, 1, 1, 1), p(0, 1, 1, 1), p(1, 2, 1, 2)]),
            (
                1,
                1,
                vec![
                    p(2, 1, 0, 1),
                    p(3, 2, 1, 2),
                    p(1, 1, 1, 1),
                    p(1, 2, 1, 2),
                    p(1, 1, 0, 1),
                ],
            ),
        ],
    }
}

pub(crate) fn sect4_template_file() -> TwoTileTemplateFile {
    let mut rule = sect4_rule();
    rule.geometry = Some(serde_json::json!({
        "kind": "two_tile",
        "radicand": -7,
        // α = (1 + √-7)/2 in the rendering basis (1, α).
        "alpha": {"x": "1/2", "y": "1/2"},
    }));
    TwoTileTemplateFile {
        schema_version: 1,
        name: "quadratic_sqrtm7".to_string(),
        kind: "two_tile".to_string(),
        rule,
        cells: sect4_cells(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sect4_rule_is_valid() {
        let rule = sect4_rule();
        let violations = rule.validate();
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn sect4_report_passes() {
        let file = sect4_template_file();
        let report = validate_two_tile(&file.rule, &file.cells);
        assert!(report.all_pass(), "{report}");
    }
}
