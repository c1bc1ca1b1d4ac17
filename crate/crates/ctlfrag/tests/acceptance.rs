//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctlfrag_core::ctl::{is_nnf, parse_formula, CtlFormula};
use ctlfrag_core::decomposition::{
    pathwidth_exact, pathwidth_upper, treewidth_exact, validate_decomposition,
    DEFAULT_ELEMENT_LIMIT,
};
use ctlfrag_core::gen::{random_x_formula, x_formulas_up_to_size, GenConfig};
use ctlfrag_core::kripke::{
    bounded_tree_model, bounded_tree_sat, brute_force_sat, model_check, BruteForceConfig,
    BruteForceOutcome,
};
use ctlfrag_core::mso::{build_theta_struc, evaluate, fpt_pipeline, MsoAssignment};
use ctlfrag_core::reductions::{
    disjunction_instance, parameter_growth_scan, verify_reduction, witness_model, BoundedSearch,
    PwSatInstance, ReductionVariant,
};
use ctlfrag_core::structure::{encode, gaifman_graph, RelationalStructure, Vocabulary};

const SUITE_SEED: u64 = 0x05EE_DC71;
const RANDOM_FORMULAS: usize = 200;
const ENUMERATED_SIZE: usize = 4;
const TIME_LIMIT: Duration = Duration::from_secs(600);
/// World bound for the brute-force oracle on formulas without a tree model.
const UNSAT_BOUND: usize = 4;
const DEPTH_SAMPLES: usize = 50;
const MUTATIONS_PER_KIND: usize = 10;
const REDUCTION_WORLDS: usize = 5;
const REDUCTION_BUDGET: u64 = 20_000;
const SCAN_RANGE: std::ops::RangeInclusive<usize> = 2..=6;
const TD_LIMIT: usize = 4;
const SMALL_STRUCTURE: usize = 10;
const EXAMPLE: &str = "EX(AG(p & ~(EF z))) | ~(A[p U (EF z)])";

/// Temporal depth of each variant at `n = 2`, and the largest pathwidth
/// increase from `n = 2` to `n = 6`, both measured on the first run.
const FROZEN_SCAN: [(ReductionVariant, usize, usize); 4] = [
    (ReductionVariant::AxAg, 2, 11),
    (ReductionVariant::AxEg, 2, 11),
    (ReductionVariant::AgOnly, 3, 11),
    (ReductionVariant::AuOnly, 3, 10),
];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn suite() -> Vec<CtlFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let config = GenConfig::default();
    let mut formulas: Vec<CtlFormula> = (0..RANDOM_FORMULAS)
        .map(|_| random_x_formula(&mut rng, &config))
        .collect();
    formulas.extend(x_formulas_up_to_size(ENUMERATED_SIZE, config.propositions));
    formulas
}

fn in_suite_bounds(f: &CtlFormula) -> bool {
    let config = GenConfig::default();
    is_nnf(f)
        && f.subformulas().len() <= config.max_subformulas
        && f.propositions().len() <= config.propositions
        && f.temporal_depth() <= config.max_depth
}

/// Satisfiability per oracle, computed once for criteria 1 and 2.
struct OracleRow {
    pipeline: bool,
    tree: bool,
    brute: BruteForceOutcome,
}

fn oracle_rows(suite: &[CtlFormula]) -> Vec<OracleRow> {
    suite
        .iter()
        .map(|f| {
            let pipeline = fpt_pipeline(f).expect("suite formulas are NNF {AX, EX}");
            let model = bounded_tree_model(f, f.temporal_depth()).expect("fragment");
            let bound = match &model {
                Some(k) => k.bisimulation_quotient().0.world_count(),
                None => UNSAT_BOUND,
            };
            OracleRow {
                pipeline,
                tree: model.is_some(),
                brute: brute_force_sat(f, bound),
            }
        })
        .collect()
}

fn oracle_equivalence(suite: &[CtlFormula], rows: &[OracleRow], elapsed: Duration) -> Verdict {
    let out_of_bounds = suite.iter().filter(|f| !in_suite_bounds(f)).count();
    let mut disagreements = Vec::new();
    let mut exhausted = 0;
    for (f, row) in suite.iter().zip(rows) {
        if matches!(row.brute, BruteForceOutcome::BudgetExhausted { .. }) {
            exhausted += 1;
        }
        let brute = row.brute.is_satisfiable();
        if row.pipeline != row.tree || row.tree != brute {
            disagreements.push(f.to_string());
        }
    }
    let sat = rows.iter().filter(|r| r.tree).count();
    verdict(
        out_of_bounds == 0 && disagreements.is_empty() && exhausted == 0 && elapsed <= TIME_LIMIT,
        format!(
            "{} formulas ({sat} satisfiable), {} disagreements {:?}, {exhausted} budget exhaustions, \
             {out_of_bounds} outside the suite bounds, {:.1}s of {}s",
            suite.len(),
            disagreements.len(),
            disagreements.iter().take(3).collect::<Vec<_>>(),
            elapsed.as_secs_f64(),
            TIME_LIMIT.as_secs()
        ),
    )
}

fn tree_depth(suite: &[CtlFormula], rows: &[OracleRow]) -> Verdict {
    let mut failures = Vec::new();
    let mut satisfiable = 0;
    for (f, row) in suite.iter().zip(rows) {
        if !(row.pipeline || row.brute.is_satisfiable()) {
            continue;
        }
        satisfiable += 1;
        let td = f.temporal_depth();
        let good = match bounded_tree_model(f, td).expect("fragment") {
            Some(k) => k.depth_from(0) <= td && model_check(&k, 0, f) == Ok(true),
            None => false,
        };
        if !good {
            failures.push(f.to_string());
        }
    }
    let stride = (suite.len() / DEPTH_SAMPLES).max(1);
    let samples: Vec<&CtlFormula> = suite.iter().step_by(stride).take(DEPTH_SAMPLES).collect();
    let changed: Vec<String> = samples
        .iter()
        .filter(|f| {
            let td = f.temporal_depth();
            bounded_tree_sat(f, td + 1) != bounded_tree_sat(f, td)
        })
        .map(|f| f.to_string())
        .collect();
    verdict(
        failures.is_empty() && changed.is_empty() && samples.len() == DEPTH_SAMPLES,
        format!(
            "{satisfiable} satisfiable formulas, {} without a checked witness of depth <= td; \
             depth td+1 changed {} of {} sampled answers",
            failures.len(),
            changed.len(),
            samples.len()
        ),
    )
}

type Mutation = fn(&RelationalStructure) -> Option<RelationalStructure>;

fn duplicate_repr(a: &RelationalStructure) -> Option<RelationalStructure> {
    let root = *a.unary_members("repr").first()?;
    let other = (0..a.universe_size()).find(|&e| e != root)?;
    let mut m = a.clone();
    m.insert("repr", &[other]).ok()?;
    Some(m)
}

fn delete_body_tuple(a: &RelationalStructure) -> Option<RelationalStructure> {
    let (pred, tuple) = a.tuples().find(|(p, _)| p.starts_with("body_"))?;
    let (pred, tuple) = (pred.to_string(), tuple.to_vec());
    let mut m = a.clone();
    m.remove(&pred, &tuple).ok()?;
    Some(m)
}

/// Adds `conn_not_1(parent, child)` next to an existing `conn_*(child, parent)`.
fn add_cyclic_conn(a: &RelationalStructure) -> Option<RelationalStructure> {
    let (_, tuple) = a.tuples().find(|(p, _)| p.starts_with("conn_"))?;
    let (child, parent) = (tuple[0], tuple[1]);
    let mut m = a.clone();
    m.insert("conn_not_1", &[parent, child]).ok()?;
    Some(m)
}

fn theta_struc_discrimination(suite: &[CtlFormula]) -> Verdict {
    let theta = build_theta_struc();
    let holds = |a: &RelationalStructure| {
        evaluate(a, &theta, &MsoAssignment::new()).expect("theta_struc is a sentence")
    };
    let encodings: Vec<RelationalStructure> = suite
        .iter()
        .map(|f| encode(f).expect("NNF formulas encode"))
        .collect();
    let rejected_encodings = encodings.iter().filter(|a| !holds(a)).count();

    let mutations: [(&str, Mutation); 3] = [
        ("duplicate repr", duplicate_repr),
        ("deleted body tuple", delete_body_tuple),
        ("cyclic conn tuple", add_cyclic_conn),
    ];
    let mut mutated = 0;
    let mut accepted = Vec::new();
    for (name, mutate) in mutations {
        for m in encodings.iter().filter_map(mutate).take(MUTATIONS_PER_KIND) {
            mutated += 1;
            if holds(&m) {
                accepted.push(name);
            }
        }
    }
    verdict(
        rejected_encodings == 0 && accepted.is_empty() && mutated == 3 * MUTATIONS_PER_KIND,
        format!(
            "accepted {}/{} encodings, rejected {}/{mutated} mutated structures",
            encodings.len() - rejected_encodings,
            encodings.len(),
            mutated - accepted.len()
        ),
    )
}

/// Every p-PW-SAT instance with at most three variables `x1..xn`, one or
/// two parts, every part map and every target, over four formula shapes.
fn reduction_corpus() -> Vec<PwSatInstance> {
    let mut corpus = Vec::new();
    for n in 1..=3usize {
        let vars: Vec<CtlFormula> = (1..=n).map(|i| CtlFormula::prop(format!("x{i}"))).collect();
        let shapes = [
            CtlFormula::disj(vars.iter().cloned()),
            CtlFormula::conj(vars.iter().cloned()),
            vars[0]
                .clone()
                .not()
                .or(CtlFormula::conj(vars[1..].iter().cloned())),
            CtlFormula::True,
        ];
        for k in 1..=2usize {
            for map in 0..k.pow(n as u32) {
                let part: BTreeMap<String, usize> = (0..n)
                    .map(|i| (format!("x{}", i + 1), map / k.pow(i as u32) % k + 1))
                    .collect();
                let sizes: Vec<usize> = (1..=k)
                    .map(|p| part.values().filter(|&&q| q == p).count())
                    .collect();
                let target_count: usize = sizes.iter().map(|s| s + 1).product();
                for t in 0..target_count {
                    let mut rest = t;
                    let mut targets = BTreeMap::new();
                    for (p, size) in sizes.iter().enumerate() {
                        targets.insert(p + 1, rest % (size + 1));
                        rest /= size + 1;
                    }
                    for f in &shapes {
                        corpus.push(
                            PwSatInstance::new(f.clone(), part.clone(), targets.clone())
                                .expect("well-formed corpus instance"),
                        );
                    }
                }
            }
        }
    }
    corpus
}

fn reduction_soundness() -> Verdict {
    let corpus = reduction_corpus();
    let search = BruteForceConfig::new(REDUCTION_WORLDS).with_budget(REDUCTION_BUDGET);
    let mut failures = Vec::new();
    let mut yes = 0;
    let mut no = 0;
    let mut no_model = 0;
    let mut complete_up_to: BTreeMap<usize, usize> = BTreeMap::new();
    for v in ReductionVariant::ALL {
        for inst in &corpus {
            let report = verify_reduction(inst, v, search).expect("small instances");
            if let Some(asg) = &report.solution {
                yes += 1;
                let (k, _) = witness_model(inst, asg, v).expect("solutions have witnesses");
                if report.sound != Some(true) || k.validate().is_err() {
                    failures.push(format!("{v}: witness fails on {}", inst.formula()));
                }
            } else {
                no += 1;
            }
            if !report.chain_mismatches.is_empty() {
                failures.push(format!("{v}: chain mismatch on {}", inst.formula()));
            }
            match report.bounded {
                Some(BoundedSearch::ModelFound { worlds }) => {
                    failures.push(format!("{v}: {worlds}-world model of a no-instance"));
                }
                Some(BoundedSearch::NoModel { .. }) => no_model += 1,
                Some(BoundedSearch::BudgetExhausted {
                    complete_up_to: c, ..
                }) => {
                    *complete_up_to.entry(c).or_default() += 1;
                }
                None => {}
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} instances x 4 variants: {yes} yes with satisfied witnesses, {no} no; \
             bounded search to {REDUCTION_WORLDS} worlds: {no_model} without model, \
             budget exhausted (worlds refuted: count) {complete_up_to:?}; {} failures {:?}",
            corpus.len(),
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn parameter_boundedness() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (v, frozen_td, frozen_growth) in FROZEN_SCAN {
        let rows = parameter_growth_scan(SCAN_RANGE.map(disjunction_instance), v);
        let tds: BTreeSet<usize> = rows.iter().map(|r| r.temporal_depth).collect();
        let widths: Vec<usize> = rows.iter().map(|r| r.pathwidth_upper).collect();
        let growth = widths.last().unwrap().saturating_sub(widths[0]);
        ok &= tds.len() == 1
            && tds.contains(&frozen_td)
            && frozen_td <= TD_LIMIT
            && growth <= frozen_growth;
        parts.push(format!(
            "{v}: td {tds:?} (frozen {frozen_td}), pw {widths:?} (+{growth} <= {frozen_growth})"
        ));
    }
    let axag = FROZEN_SCAN[0].1 == FROZEN_SCAN[1].1;
    verdict(ok && axag, parts.join("; "))
}

fn small_graph(n: usize, edges: &[(usize, usize)]) -> RelationalStructure {
    let mut vocabulary = Vocabulary::new();
    vocabulary.declare("E", 2).expect("fresh vocabulary");
    let mut a = RelationalStructure::new(vocabulary);
    for i in 0..n {
        a.add_element(format!("v{i}"));
    }
    for &(u, v) in edges {
        a.insert("E", &[u, v]).expect("in range");
    }
    a
}

fn decomposition_correctness(suite: &[CtlFormula]) -> Verdict {
    let grid: Vec<(usize, usize)> = (0..9)
        .flat_map(|v| {
            let right = (v % 3 < 2).then_some((v, v + 1));
            let down = (v < 6).then_some((v, v + 3));
            right.into_iter().chain(down)
        })
        .collect();
    // (structure, known pathwidth)
    let mut corpus: Vec<(RelationalStructure, Option<usize>)> = vec![
        (
            small_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            Some(3),
        ),
        (small_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]), Some(1)),
        (
            small_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
            Some(2),
        ),
        (small_graph(9, &grid), Some(3)),
        (small_graph(3, &[]), Some(0)),
    ];
    corpus.extend(
        suite
            .iter()
            .map(|f| (encode(f).expect("NNF formulas encode"), None)),
    );
    corpus.push((encode(&parse_formula(EXAMPLE).unwrap()).unwrap(), None));

    let mut emitted = 0;
    let mut invalid = 0;
    let mut compared = 0;
    let mut misordered = Vec::new();
    for (a, known) in &corpus {
        let (upper, upper_width) = pathwidth_upper(a);
        emitted += 1;
        invalid += usize::from(validate_decomposition(a, &upper).is_err());
        let Ok((exact, exact_width)) = pathwidth_exact(a, DEFAULT_ELEMENT_LIMIT) else {
            continue;
        };
        emitted += 1;
        invalid += usize::from(validate_decomposition(a, &exact).is_err());
        if a.universe_size() > SMALL_STRUCTURE {
            continue;
        }
        compared += 1;
        let treewidth = treewidth_exact(a, SMALL_STRUCTURE).expect("small structure");
        let known_ok = known.is_none_or(|w| w == exact_width);
        if upper_width < exact_width || exact_width < treewidth || !known_ok {
            misordered.push(format!("{} elements", a.universe_size()));
        }
    }
    verdict(
        invalid == 0 && misordered.is_empty(),
        format!(
            "{emitted} decompositions, {invalid} invalid; {compared} structures with <= \
             {SMALL_STRUCTURE} elements, {} violating heuristic >= exact >= treewidth",
            misordered.len()
        ),
    )
}

fn example_encoding() -> Verdict {
    let f = parse_formula(EXAMPLE).expect("example formula parses");
    let a = encode(&f).expect("encodes");
    let edges = gaifman_graph(&a).edge_count();
    let count = |p: &str| a.unary_members(p).len();
    let names = |p: &str| -> BTreeSet<&str> {
        a.unary_members(p)
            .into_iter()
            .map(|e| a.element_name(e))
            .collect()
    };
    let leaves = BTreeSet::from(["p", "z"]);
    let labels_ok = count("repr_EX") == 1
        && count("repr_AG") == 1
        && count("repr_EF") == 2
        && count("repr_AU") == 1
        && names("var") == leaves
        && names("reprPL") == leaves;
    verdict(
        a.universe_size() == 11 && edges == 12 && f.temporal_depth() == 3 && labels_ok,
        format!(
            "{} elements, {edges} Gaifman edges, td {}, repr_EX/AG/EF/AU = {}/{}/{}/{}, var {:?}, reprPL {:?}",
            a.universe_size(),
            f.temporal_depth(),
            count("repr_EX"),
            count("repr_AG"),
            count("repr_EF"),
            count("repr_AU"),
            names("var"),
            names("reprPL")
        ),
    )
}

fn main() {
    let suite = suite();
    let start = Instant::now();
    let rows = oracle_rows(&suite);
    let elapsed = start.elapsed();

    let results = [
        (
            "1 oracle equivalence",
            oracle_equivalence(&suite, &rows, elapsed),
        ),
        ("2 tree-model depth", tree_depth(&suite, &rows)),
        (
            "3 theta_struc discrimination",
            theta_struc_discrimination(&suite),
        ),
        ("4 reduction soundness", reduction_soundness()),
        ("5 parameter boundedness", parameter_boundedness()),
        (
            "6 decomposition correctness",
            decomposition_correctness(&suite),
        ),
        ("7 example encoding", example_encoding()),
    ];
    let mut all = true;
    for (name, v) in &results {
        all &= v.passed;
        println!(
            "{} criterion {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
