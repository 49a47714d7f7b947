use lattes_fsr::fsr::*;
use lattes_fsr::fundom::*;
use lattes_fsr::lattes::MultiplierMatrix;

fn main() {
    // Gosper template.
    let d = build_from_template("gosper_2m312").unwrap();
    println!("gosper report:\n{}", d.report());
    let rule = extract_rule(&d).unwrap();
    println!("gosper: {} tile types, {} subtiles", rule.tile_types.len(),
        rule.tile_types[0].subtiles.len());
    let base = CellComplex::base_complex(&rule).unwrap();
    let lvl2 = base.subdivide_n(&rule, 2).unwrap();
    println!("level-2 faces: {}", lvl2.faces.len());
    let mesh = mesh_approaches_zero(&rule, 10);
    println!("mesh: {} (c1 level {:?}, c2 {})", mesh.satisfied, mesh.condition1_level, mesh.condition2_acyclic);
    let val = bounded_valence(&rule).unwrap();
    println!("valence: {:?}", val.verdict);

    // All templates load.
    for name in template_names() {
        let d = build_from_template(name).unwrap();
        let rule = extract_rule(&d).unwrap();
        let mesh = mesh_approaches_zero(&rule, 10);
        let val = bounded_valence(&rule).unwrap();
        println!("{name}: subtiles {}, mesh {}, valence {:?}", d.subtile_count(), mesh.satisfied, val.verdict);
    }

    // Figure case end to end.
    let m = MultiplierMatrix::new(5, -3, 2, 4);
    let d = build_hex_domain(&m, (0, 0)).unwrap();
    let rule = extract_hex_rule(&d).unwrap();
    let (graph, acyclic, _) = condition2_acyclic(&rule);
    println!("fig4: pair graph {} nodes, acyclic {}", graph.node_count(), acyclic);
    let val = bounded_valence(&rule).unwrap();
    println!("fig4 valence: {:?} (levels {})", val.verdict, val.levels_inspected);

    // Parallelogram rule checks.
    use lattes_fsr::exact::{QuadExt, rat_int, Rat};
    use lattes_fsr::lattes::TauValue;
    use num_traits::Zero;
    let tau = TauValue::new(QuadExt::from_parts(-1, Rat::zero(), rat_int(2))).unwrap();
    let pd = build_parallelogram_domain(3, tau, (0, 1)).unwrap();
    let prule = extract_rule(&FundamentalDomain::Parallelogram(pd)).unwrap();
    println!("par3: c1 {:?}, c2 {}, valence {:?}",
        condition1(&prule, 5),
        condition2_acyclic(&prule).1,
        bounded_valence(&prule).unwrap().verdict);
}
