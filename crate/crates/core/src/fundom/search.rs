//! Derivation tool for the exceptional-case templates: exhaustive search
//! for a connected, one-tile-per-orbit hexagon union whose boundary carries
//! the four marked translates and admits the ten-edge pairing.
//!
//! This is how the bundled template files were produced; it is not part of
//! the public construction API.

#![allow(dead_code)] // derivation tool; driven by the ignored generator test

use super::hex::{assemble_from_hexes, hexes_equivalent, HexDomainData};
use crate::exact::rat;
use crate::hexplane::{GridEdge, HexPoint, LatticeEmbedding, TriVertex};
use crate::lattes::MultiplierMatrix;
use std::collections::{BTreeMap, BTreeSet};

/// The grid edge whose midpoint is the given marked point.
fn edge_with_midpoint(m: &HexPoint) -> Option<GridEdge> {
    for dir in [0u8, 1, 2] {
        let step = match dir {
            0 => HexPoint::new(rat(1, 2), rat(0, 1)),
            1 => HexPoint::new(rat(1, 4), rat(1, 4)),
            _ => HexPoint::new(rat(-1, 4), rat(1, 4)),
        };
        let c = m.sub(&step);
        let w2 = &c.ys * rat(2, 1);
        let u2 = &c.x - rat(1, 2) - &c.ys;
        if w2.is_integer() && u2.is_integer() {
            let w = i64::try_from(w2.to_integer()).ok()?;
            let u = i64::try_from(u2.to_integer()).ok()?;
            return Some(GridEdge::new(TriVertex::new(u, w), dir));
        }
    }
    None
}

fn neighbors(h: &TriVertex) -> [TriVertex; 6] {
    let TriVertex { u, w } = *h;
    [
        TriVertex::new(u + 1, w),
        TriVertex::new(u - 1, w),
        TriVertex::new(u, w + 1),
        TriVertex::new(u, w - 1),
        TriVertex::new(u - 1, w + 1),
        TriVertex::new(u + 1, w - 1),
    ]
}

/// Exhaustive search for a valid domain. `radius` bounds the hexagons
/// considered around the marked translates.
pub(crate) fn derive_exceptional_domain(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
    radius: i64,
) -> Option<HexDomainData> {
    let deg = matrix.degree() as usize;
    let emb = LatticeEmbedding::new(*matrix);
    let marks: Vec<HexPoint> = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(|(x, y)| emb.embed((beta.0 + x, beta.1 + y)))
        .collect();
    let mark_edges: Vec<GridEdge> = marks.iter().map(|m| edge_with_midpoint(m).unwrap()).collect();
    let mark_pairs: Vec<(TriVertex, TriVertex)> =
        mark_edges.iter().map(|e| e.adjacent_hexes()).collect();

    // Region of allowed hexagons.
    let window = crate::hexplane::HexBox::around(&marks, radius);
    let in_region = |h: &TriVertex| window.contains(&h.center());

    // Depth-first over connected one-per-orbit unions.
    let seeds = [mark_pairs[0].0, mark_pairs[0].1];
    let mut visited: BTreeSet<Vec<TriVertex>> = BTreeSet::new();
    let mut stack: Vec<BTreeSet<TriVertex>> = Vec::new();
    for s in seeds {
        if in_region(&s) {
            stack.push([s].into_iter().collect());
        }
    }
    let mut budget: u64 = 2_000_000;

    while let Some(state) = stack.pop() {
        if budget == 0 {
            return None;
        }
        budget -= 1;
        let key: Vec<TriVertex> = state.iter().copied().collect();
        if visited.contains(&key) {
            continue;
        }
        visited.insert(key);

        // Prune: no marked edge may become interior.
        if mark_pairs
            .iter()
            .any(|(a, b)| state.contains(a) && state.contains(b))
        {
            continue;
        }

        if state.len() == deg {
            // Every marked edge on the boundary.
            if !mark_pairs
                .iter()
                .all(|(a, b)| state.contains(a) != state.contains(b))
            {
                continue;
            }
            if let Some(domain) = try_complete(matrix, beta, &emb, &state) {
                return Some(domain);
            }
            continue;
        }

        // Expand by adjacent hexagons in fresh orbits.
        let mut candidates: BTreeSet<TriVertex> = BTreeSet::new();
        for h in &state {
            for n in neighbors(h) {
                if !state.contains(&n) && in_region(&n) {
                    candidates.insert(n);
                }
            }
        }
        for c in candidates {
            if state.iter().any(|h| hexes_equivalent(matrix, h, &c)) {
                continue;
            }
            let mut next = state.clone();
            next.insert(c);
            stack.push(next);
        }
    }
    None
}

fn try_complete(
    matrix: &MultiplierMatrix,
    beta: (i64, i64),
    emb: &LatticeEmbedding,
    state: &BTreeSet<TriVertex>,
) -> Option<HexDomainData> {
    // Boundary vertex set of the union.
    let mut edge_count: BTreeMap<GridEdge, u8> = BTreeMap::new();
    for h in state {
        for e in [
            GridEdge::new(*h, 0),
            GridEdge::new(*h, 1),
            GridEdge::new(*h, 2),
            GridEdge::new(TriVertex::new(h.u - 1, h.w), 0),
            GridEdge::new(TriVertex::new(h.u, h.w - 1), 1),
            GridEdge::new(TriVertex::new(h.u + 1, h.w - 1), 2),
        ] {
            *edge_count.entry(e).or_default() += 1;
        }
    }
    let mut boundary_vertices: BTreeSet<HexPoint> = BTreeSet::new();
    for (e, n) in &edge_count {
        if *n == 1 {
            let (a, b) = e.tile_endpoints();
            boundary_vertices.insert(a);
            boundary_vertices.insert(b);
        }
    }

    let two = rat(2, 1);
    let m_beta = emb.embed(beta);
    let m_tbeta = emb.embed((beta.0, beta.1 + 1));
    let two_psi1 = emb.embed((1, 0)).scale(&two);
    let p1s: Vec<HexPoint> = boundary_vertices
        .iter()
        .filter(|v| {
            let q1 = m_beta.scale(&two).sub(v);
            let r1 = v.add(&two_psi1);
            boundary_vertices.contains(&q1) && boundary_vertices.contains(&r1)
        })
        .cloned()
        .collect();
    let p2s: Vec<HexPoint> = boundary_vertices
        .iter()
        .filter(|v| {
            let q2 = m_tbeta.scale(&two).sub(v);
            let r2 = v.add(&two_psi1);
            boundary_vertices.contains(&q2) && boundary_vertices.contains(&r2)
        })
        .cloned()
        .collect();

    let hexes: Vec<TriVertex> = state.iter().copied().collect();
    for p1 in &p1s {
        for p2 in &p2s {
            if let Ok(domain) = assemble_from_hexes(matrix, beta, &hexes, p1, p2) {
                if !domain.report.all_pass() {
                    continue;
                }
                // The template must also certify as expanding: pair graph
                // acyclic, every edge eventually subdividing, valence
                // closure bounded.
                let Ok(rule) = crate::fundom::extract_rule(&crate::fundom::FundamentalDomain::Hex(
                    domain.clone(),
                )) else {
                    continue;
                };
                let mesh = crate::fsr::mesh_approaches_zero(&rule, 10);
                if !mesh.satisfied {
                    continue;
                }
                match crate::fsr::bounded_valence(&rule) {
                    Ok(report)
                        if matches!(report.verdict, crate::fsr::ValenceVerdict::Bounded(_)) => {}
                    _ => continue,
                }
                return Some(domain);
            }
        }
    }
    None
}

#[cfg(test)]
mod generator {
    use super::*;
    use crate::fundom::template::{sect4_template_file, HexTemplateFile};

    fn rat_str(r: &crate::exact::Rat) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    /// Regenerates the bundled template files. Run explicitly:
    /// `cargo test -p lattes-fsr --lib generate_template_files -- --ignored`
    #[test]
    #[ignore]
    fn generate_template_files() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/templates");
        std::fs::create_dir_all(dir).unwrap();

        let cases: [(&str, MultiplierMatrix, (i64, i64)); 6] = [
            ("gosper_2m312", MultiplierMatrix::new(2, -3, 1, 2), (0, 0)),
            ("case_2m612", MultiplierMatrix::new(2, -6, 1, 2), (0, 0)),
            ("case_1m312", MultiplierMatrix::new(1, -3, 1, 2), (0, 0)),
            ("case_1m612", MultiplierMatrix::new(1, -6, 1, 2), (0, 0)),
            ("case_0m411", MultiplierMatrix::new(0, -4, 1, 1), (0, 0)),
            ("case_0m710_b1", MultiplierMatrix::new(0, -7, 1, 0), (1, 0)),
        ];
        for (name, matrix, beta) in cases {
            let domain = derive_exceptional_domain(&matrix, beta, 4)
                .unwrap_or_else(|| panic!("no domain found for {name}"));
            let file = HexTemplateFile {
                schema_version: 1,
                name: name.to_string(),
                kind: "hex".to_string(),
                matrix: [matrix.a, matrix.b, matrix.c, matrix.d],
                beta: [beta.0, beta.1],
                hexes: domain.hexes.iter().map(|h| [h.u, h.w]).collect(),
                p1: [
                    rat_str(&domain.cycle_points[0].x),
                    rat_str(&domain.cycle_points[0].ys),
                ],
                p2: [
                    rat_str(&domain.cycle_points[9].x),
                    rat_str(&domain.cycle_points[9].ys),
                ],
            };
            let json = serde_json::to_string_pretty(&file).unwrap();
            std::fs::write(format!("{dir}/{name}.json"), json + "\n").unwrap();
            eprintln!("wrote {name}: {} tiles", domain.hexes.len());
        }

        let sect4 = sect4_template_file();
        let json = serde_json::to_string_pretty(&sect4).unwrap();
        std::fs::write(format!("{dir}/quadratic_sqrtm7.json"), json + "\n").unwrap();
    }
}
