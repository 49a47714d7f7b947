use super::*;
use crate::exact::{rat_int, QuadExt, Rat};
use crate::fsr::{CellComplex, GammaTag, OrientedEdge, VertexMark};
use crate::hexplane::PcClass;
use crate::lattes::{MultiplierMatrix, TauValue};
use num_traits::Zero;

fn tau_2i() -> TauValue {
    TauValue::new(QuadExt::from_parts(-1, Rat::zero(), rat_int(2))).unwrap()
}

#[test]
fn parallelogram_basic_counts() {
    let d = build_parallelogram_domain(2, tau_2i(), (0, 0)).unwrap();
    assert_eq!(d.subtiles.len(), 4);
    assert_eq!(d.boundary.len(), 6);
    let rule = extract_rule(&FundamentalDomain::Parallelogram(d)).unwrap();
    assert_eq!(rule.tile_types.len(), 1);
    assert_eq!(rule.edge_types.len(), 6);
    assert_eq!(rule.pairings.len(), 3);
    // The first marked side subdivides into (first, second) of the pair.
    assert_eq!(
        rule.edge_types[0].subdivision,
        vec![OrientedEdge::fwd(0), OrientedEdge::rev(1)]
    );
}

#[test]
fn parallelogram_translated_tile() {
    let d = build_parallelogram_domain(3, tau_2i(), (1, 0)).unwrap();
    assert_eq!(d.translate, 1);
    assert_eq!(d.subtiles.len(), 9);
    let rule = extract_rule(&FundamentalDomain::Parallelogram(d)).unwrap();
    let base = CellComplex::base_complex(&rule).unwrap();
    let sub = base.subdivide(&rule).unwrap();
    assert_eq!(sub.faces.len(), 9);
}

#[test]
fn parallelogram_all_classes_and_sizes() {
    for n in 2..=5 {
        for beta in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let d = build_parallelogram_domain(n, tau_2i(), beta).unwrap();
            assert_eq!(d.subtiles.len() as i64, n * n, "n={n} beta={beta:?}");
            let rule = extract_rule(&FundamentalDomain::Parallelogram(d)).unwrap();
            assert!(rule.validate().is_empty());
        }
    }
}

#[test]
fn parallelogram_rejects_small_multiplier() {
    assert!(matches!(
        build_parallelogram_domain(1, tau_2i(), (0, 0)),
        Err(FundomError::InvalidInput(_))
    ));
}

#[test]
fn hex_domain_figure_case() {
    let m = MultiplierMatrix::new(5, -3, 2, 4);
    let d = build_hex_domain(&m, (0, 0)).unwrap();
    assert_eq!(d.hexes.len(), 26);
    assert_eq!(d.boundary.len(), 10);
    assert_eq!(d.corners().len(), 6);
    assert!(d.report.all_pass(), "{}", d.report);

    let rule = extract_rule(&FundamentalDomain::Hex(d)).unwrap();
    assert_eq!(rule.tile_types.len(), 1);
    assert_eq!(rule.edge_types.len(), 10);
    assert_eq!(rule.pairings.len(), 5);
    assert_eq!(rule.tile_types[0].subtiles.len(), 26);
}

#[test]
fn hex_domain_exceptional_multiplier() {
    let m = MultiplierMatrix::new(2, -3, 1, 2);
    assert!(matches!(
        build_hex_domain(&m, (0, 0)),
        Err(FundomError::ExceptionalAlpha { a: 2, c: 1 })
    ));
}

#[test]
fn hex_domain_degree_two_fails_checks() {
    let m = MultiplierMatrix::new(0, -2, 1, 1);
    for beta in [(0, 0), (1, 0)] {
        match build_hex_domain(&m, beta) {
            Err(FundomError::ValidityCheckFailed(report)) => {
                assert!(!report.all_pass());
            }
            other => panic!("expected a failed validity report, got {other:?}"),
        }
    }
}

#[test]
fn hex_rule_marks_and_pairing_tags() {
    let m = MultiplierMatrix::new(5, -3, 2, 4);
    let d = build_hex_domain(&m, (0, 0)).unwrap();
    let rule = extract_hex_rule(&d).unwrap();
    // Corner marks: four postcritical classes at the marked corners.
    let marks = &rule.tile_types[0].corner_marks;
    assert_eq!(marks[1], VertexMark::Postcritical(PcClass::Zero));
    assert_eq!(marks[3], VertexMark::Postcritical(PcClass::One));
    assert_eq!(marks[6], VertexMark::Postcritical(PcClass::OnePlusTau));
    assert_eq!(marks[8], VertexMark::Postcritical(PcClass::Tau));
    assert_eq!(marks[0], VertexMark::Accidental);
    assert!(matches!(rule.pairings[2].tag, GammaTag::Translation));
}
