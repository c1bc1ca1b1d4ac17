use ctlfrag::formats::{
    parse_decomposition, parse_kripke, parse_mso, parse_pwsat, parse_structure,
    write_decomposition, write_kripke, write_pwsat, write_structure,
};
use ctlfrag_core::ctl::{eliminate_sugar, parse_formula};
use ctlfrag_core::decomposition::{pathwidth_upper, validate_decomposition};
use ctlfrag_core::kripke::{bounded_tree_model, model_check};
use ctlfrag_core::mso::{build_theta, build_theta_struc};
use ctlfrag_core::reductions::{
    chain_model, disjunction_instance, pwsat_brute_force, ReductionVariant,
};
use ctlfrag_core::structure::encode;

const FORMULAS: [&str; 5] = [
    "EX(AG(p & ~(EF z))) | ~(A[p U (EF z)])",
    "AX p & EX (q | ~p)",
    "E[p U q] & AG true",
    "~(p -> q) <-> r",
    "false",
];

#[test]
fn encodings_round_trip() {
    for s in FORMULAS {
        let a = encode(&eliminate_sugar(&parse_formula(s).unwrap())).unwrap();
        assert_eq!(parse_structure(&write_structure(&a)).unwrap(), a, "{s}");
    }
}

#[test]
fn decompositions_round_trip_and_stay_valid() {
    for s in FORMULAS {
        let a = encode(&eliminate_sugar(&parse_formula(s).unwrap())).unwrap();
        let (d, _) = pathwidth_upper(&a);
        let back = parse_decomposition(&write_decomposition(&d)).unwrap();
        assert_eq!(back, d, "{s}");
        assert_eq!(validate_decomposition(&a, &back), Ok(()), "{s}");
    }
}

#[test]
fn models_round_trip() {
    let f = parse_formula("EX p & EX ~p & AX AX q").unwrap();
    let k = bounded_tree_model(&f, 2).unwrap().unwrap();
    let back = parse_kripke(&write_kripke(&k)).unwrap();
    assert_eq!(back, k);
    assert_eq!(model_check(&back, 0, &f), Ok(true));

    let inst = disjunction_instance(3);
    let asg = pwsat_brute_force(&inst).unwrap().unwrap();
    let chain = chain_model(&inst, &asg, ReductionVariant::AuOnly);
    assert_eq!(parse_kripke(&write_kripke(&chain)).unwrap(), chain);
}

#[test]
fn instances_round_trip() {
    for n in 0..4 {
        let inst = disjunction_instance(n);
        assert_eq!(parse_pwsat(&write_pwsat(&inst)).unwrap(), inst);
    }
    let two_parts = "formula (a | b) & ~c\npart a 1\npart b 2\npart c 2\ntg 1 1\ntg 2 0\n";
    let inst = parse_pwsat(two_parts).unwrap();
    assert_eq!(inst.part_count(), 2);
    assert_eq!(write_pwsat(&inst), two_parts);
}

#[test]
fn generated_sentences_reparse() {
    for f in [build_theta_struc(), build_theta(2)] {
        let text = f.to_string();
        assert_eq!(parse_mso(&text).unwrap().to_string(), text);
    }
}

#[test]
fn errors_name_the_line() {
    let err = parse_kripke("worlds 2\nedge 0 1\nedge 1 one\n").unwrap_err();
    assert_eq!(err.line, 3);
    let err = parse_structure("element 0 p\nrel nosuch 0\n").unwrap_err();
    assert_eq!(err.line, 2);
    let err = parse_pwsat("formula x1 &\npart x1 1\ntg 1 1\n").unwrap_err();
    assert_eq!(err.line, 1);
    let err = parse_decomposition("path\nbag 1: 0\n").unwrap_err();
    assert_eq!(err.line, 2);
}
