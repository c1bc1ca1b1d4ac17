use ctlfrag_core::ctl::{
    eliminate_sugar, is_nnf, parse_formula, to_nnf, CtlFormula, PathQuantifier, UnaryOp,
};
use ctlfrag_core::decomposition::{
    pathwidth_exact, pathwidth_upper, treewidth_exact, validate_decomposition, Decomposition, Shape,
};
use ctlfrag_core::gen::{random_x_formula, GenConfig};
use ctlfrag_core::kripke::{
    bounded_tree_model, bounded_tree_sat, brute_force_sat, model_check, BruteForceOutcome,
    KripkeStructure,
};
use ctlfrag_core::mso::{evaluate, fpt_pipeline, Mso, MsoAssignment, MsoFormula as M};
use ctlfrag_core::structure::{encode, RelationalStructure, Vocabulary};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PROPS: [&str; 2] = ["p", "q"];

fn arb_ctl() -> impl Strategy<Value = CtlFormula> {
    let leaf = prop_oneof![
        Just(CtlFormula::True),
        Just(CtlFormula::False),
        prop::sample::select(&PROPS[..]).prop_map(CtlFormula::prop),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(CtlFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (prop::sample::select(&UnaryOp::ALL[..]), inner.clone())
                .prop_map(|(op, a)| CtlFormula::temporal(op, a)),
            (any::<bool>(), inner.clone(), inner).prop_map(|(all, a, b)| if all {
                a.au(b)
            } else {
                a.eu(b)
            }),
        ]
    })
}

/// Total structures with 1 to 3 worlds over `p` and `q`.
fn arb_kripke() -> impl Strategy<Value = KripkeStructure> {
    (1usize..=3).prop_flat_map(|n| {
        let full = (1u8 << n) - 1;
        (
            prop::collection::vec(1u8..=full, n),
            prop::collection::vec(0u8..=full, PROPS.len()),
        )
            .prop_map(move |(succ, ext)| {
                let mut k = KripkeStructure::new(n);
                for p in PROPS {
                    k.declare_proposition(p);
                }
                for (w, s) in succ.iter().enumerate() {
                    for v in 0..n {
                        if s >> v & 1 == 1 {
                            k.add_edge(w, v);
                        }
                    }
                }
                for (p, m) in PROPS.iter().zip(&ext) {
                    for w in 0..n {
                        if m >> w & 1 == 1 {
                            k.set_label(w, *p);
                        }
                    }
                }
                k
            })
    })
}

fn sat(k: &KripkeStructure, f: &CtlFormula) -> Vec<bool> {
    k.satisfying_worlds(f).unwrap()
}

fn negates_until(f: &CtlFormula) -> bool {
    match f {
        CtlFormula::Not(a) if matches!(a.as_ref(), CtlFormula::Until(..)) => true,
        // Sugar hides negations: `a -> b` is `~a | b`, `a <-> b` negates both sides.
        CtlFormula::Implies(a, _) if matches!(a.as_ref(), CtlFormula::Until(..)) => true,
        CtlFormula::Iff(..) => true,
        _ => f.children().into_iter().any(negates_until),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nnf_preserves_truth(f in arb_ctl(), k in arb_kripke()) {
        let g = to_nnf(&f);
        prop_assert!(is_nnf(&g));
        prop_assert_eq!(sat(&k, &f), sat(&k, &g));
        prop_assert_eq!(sat(&k, &f), sat(&k, &eliminate_sugar(&f)));
    }

    #[test]
    fn nnf_temporal_depth(f in arb_ctl()) {
        let (before, after) = (f.temporal_depth(), to_nnf(&f).temporal_depth());
        if negates_until(&f) {
            prop_assert!(after <= before + 1);
        } else {
            prop_assert_eq!(after, before);
        }
    }

    #[test]
    fn nnf_is_idempotent(f in arb_ctl()) {
        let g = to_nnf(&f);
        prop_assert_eq!(to_nnf(&g), g);
    }

    #[test]
    fn parse_inverts_print(f in arb_ctl()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn subformulas_bounded_by_size(f in arb_ctl()) {
        prop_assert!(f.subformulas().len() <= f.size());
    }

    #[test]
    fn model_checking_dualities(f in arb_ctl(), k in arb_kripke()) {
        let not = |v: Vec<bool>| v.into_iter().map(|b| !b).collect::<Vec<_>>();
        let nf = f.clone().not();
        prop_assert_eq!(sat(&k, &f.clone().ag()), not(sat(&k, &nf.clone().ef())));
        prop_assert_eq!(sat(&k, &f.clone().af()), not(sat(&k, &nf.clone().eg())));
        prop_assert_eq!(sat(&k, &f.clone().ax()), not(sat(&k, &nf.clone().ex())));
        let b = CtlFormula::prop("q");
        let nb = b.clone().not();
        let expansion = nb.clone().eu(nf.and(nb.clone())).or(nb.eg());
        prop_assert_eq!(sat(&k, &f.au(b)), not(sat(&k, &expansion)));
    }

    #[test]
    fn encoding_shape(f in arb_ctl()) {
        let g = eliminate_sugar(&f);
        let a = encode(&g).unwrap();
        prop_assert!(a.universe_size() <= g.size());
        prop_assert_eq!(a.unary_members("repr").len(), 1);
        for e in 0..a.universe_size() {
            let sub = parse_formula(a.element_name(e)).unwrap();
            prop_assert_eq!(a.contains("reprPL", &[e]), sub.is_propositional());
        }
        prop_assert_eq!(encode(&g).unwrap(), a);
    }
}

fn graph_structure(n: usize, edges: &[(usize, usize)]) -> RelationalStructure {
    let mut v = Vocabulary::new();
    v.declare("E", 2).unwrap();
    let mut a = RelationalStructure::new(v);
    for i in 0..n {
        a.add_element(format!("v{i}"));
    }
    for &(x, y) in edges {
        a.insert("E", &[x % n, y % n]).unwrap();
    }
    a
}

fn arb_graph_structure() -> impl Strategy<Value = RelationalStructure> {
    (1usize..=10).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=2 * n).prop_map(move |e| graph_structure(n, &e))
    })
}

fn check_widths(a: &RelationalStructure) -> Result<(), TestCaseError> {
    let (heuristic, upper) = pathwidth_upper(a);
    let (exact, pw) = pathwidth_exact(a, 12).unwrap();
    let tw = treewidth_exact(a, 12).unwrap();
    prop_assert_eq!(validate_decomposition(a, &heuristic), Ok(()));
    prop_assert_eq!(validate_decomposition(a, &exact), Ok(()));
    prop_assert_eq!(heuristic.width().unwrap(), upper);
    prop_assert_eq!(exact.width().unwrap(), pw);
    prop_assert!(upper >= pw && pw >= tw, "{upper} {pw} {tw}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn width_ordering_on_graphs(a in arb_graph_structure()) {
        check_widths(&a)?;
    }

    #[test]
    fn width_ordering_on_small_encodings(f in arb_ctl()) {
        let a = encode(&eliminate_sugar(&f)).unwrap();
        prop_assume!(a.universe_size() <= 10);
        check_widths(&a)?;
    }

    #[test]
    fn reversed_path_keeps_width(a in arb_graph_structure()) {
        let (d, w) = pathwidth_upper(&a);
        prop_assert!(matches!(d.shape(), Shape::Path));
        let reversed = Decomposition::path(d.bags().iter().rev().cloned().collect());
        prop_assert_eq!(reversed.width().unwrap(), w);
        prop_assert_eq!(validate_decomposition(&a, &reversed), Ok(()));
    }
}

/// Formulas over `P/1` and `E/2` with free element variables `x`, `y` and
/// free set variable `X`.
fn arb_mso() -> impl Strategy<Value = Mso> {
    let var = prop::sample::select(&["x", "y"][..]);
    let leaf = prop_oneof![
        var.clone().prop_map(|x| M::atom("P", &[x])),
        (var.clone(), var.clone()).prop_map(|(x, y)| M::atom("E", &[x, y])),
        (var.clone(), var.clone()).prop_map(|(x, y)| M::eq(x, y)),
        var.clone().prop_map(|x| M::member("X", x)),
    ];
    leaf.prop_recursive(4, 20, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(M::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| M::and(vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| M::or(vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| M::implies(a, b)),
            (var.clone(), inner.clone()).prop_map(|(x, a)| M::exists(x, a)),
            (var.clone(), inner.clone()).prop_map(|(x, a)| M::forall(x, a)),
            inner.clone().prop_map(|a| M::exists_set("X", a)),
            inner.prop_map(|a| M::forall_set("X", a)),
        ]
    })
}

fn arb_mso_world() -> impl Strategy<Value = (RelationalStructure, MsoAssignment)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0..n, 0..n), 0..=2 * n),
            0..n,
            0..n,
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(p, edges, x, y, set)| {
                let mut v = Vocabulary::new();
                v.declare("P", 1).unwrap();
                v.declare("E", 2).unwrap();
                let mut a = RelationalStructure::new(v);
                for (i, &marked) in p.iter().enumerate() {
                    a.add_element(format!("e{i}"));
                    if marked {
                        a.insert("P", &[i]).unwrap();
                    }
                }
                for (s, t) in edges {
                    a.insert("E", &[s, t]).unwrap();
                }
                let members: std::collections::BTreeSet<usize> =
                    (0..n).filter(|&i| set[i]).collect();
                let asg = MsoAssignment::new()
                    .with_element("x", x)
                    .with_element("y", y)
                    .with_set("X", members);
                (a, asg)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mso_quantifier_duality(g in arb_mso(), (a, asg) in arb_mso_world()) {
        for x in ["x", "y"] {
            let exists_form = M::not(M::exists(x, M::not(g.clone())));
            prop_assert_eq!(evaluate(&a, &exists_form, &asg), evaluate(&a, &M::forall(x, g.clone()), &asg));
        }
        let set_form = M::not(M::exists_set("X", M::not(g.clone())));
        prop_assert_eq!(evaluate(&a, &set_form, &asg), evaluate(&a, &M::forall_set("X", g.clone()), &asg));
    }

    #[test]
    fn mso_connective_laws(g in arb_mso(), h in arb_mso(), (a, asg) in arb_mso_world()) {
        let ev = |f: &Mso| evaluate(&a, f, &asg).unwrap();
        prop_assert_eq!(ev(&M::not(M::and(vec![g.clone(), h.clone()]))), ev(&M::or(vec![M::not(g.clone()), M::not(h.clone())])));
        prop_assert_eq!(ev(&M::implies(g.clone(), h.clone())), ev(&M::or(vec![M::not(g.clone()), h.clone()])));
        prop_assert_eq!(ev(&M::iff(g.clone(), h.clone())), ev(&g) == ev(&h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pipeline_matches_oracles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_x_formula(&mut rng, &GenConfig::default());
        let td = f.temporal_depth();
        let tree = bounded_tree_sat(&f, td).unwrap();
        prop_assert_eq!(fpt_pipeline(&f).unwrap(), tree, "{}", f);
        let bound = match bounded_tree_model(&f, td).unwrap() {
            Some(m) => m.bisimulation_quotient().0.world_count(),
            None => 3,
        };
        let brute = brute_force_sat(&f, bound);
        prop_assert_eq!(brute.is_satisfiable(), tree, "{}", f);
        if let BruteForceOutcome::Satisfiable { model, world, .. } = brute {
            prop_assert_eq!(model_check(&model, world, &f), Ok(true));
        }
    }

    #[test]
    fn tree_witnesses_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_x_formula(&mut rng, &GenConfig::default());
        let td = f.temporal_depth();
        if let Some(m) = bounded_tree_model(&f, td).unwrap() {
            prop_assert_eq!(m.validate(), Ok(()));
            prop_assert!(m.depth_from(0) <= td);
            prop_assert_eq!(model_check(&m, 0, &f), Ok(true));
            let (q, _) = m.bisimulation_quotient();
            prop_assert_eq!(model_check(&q, 0, &f), Ok(true));
        }
    }
}

#[test]
fn until_quantifiers_are_distinct() {
    let a = CtlFormula::Until(
        PathQuantifier::All,
        Box::new(CtlFormula::prop("p")),
        Box::new(CtlFormula::prop("q")),
    );
    assert_eq!(a.to_string(), "A[p U q]");
}
