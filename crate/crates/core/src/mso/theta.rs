//! The depth-indexed MSO sentences deciding satisfiability of the
//! `{AX, EX}` fragment on formula encodings.
//!
//! A set variable at level `i` holds the subformula occurrences true at a
//! world with `i` steps of remaining depth. Each level constrains Boolean
//! elements to agree with their arguments, opens one successor per `EX`
//! element in the set (or a single successor when there is none), and asks
//! every successor to contain the bodies of all `AX` elements in the set.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{evaluate, Mso, MsoAssignment, MsoError, MsoFormula as F};
use crate::ctl::{to_nnf, CtlFormula};
use crate::kripke::FragmentError;
use crate::structure::{
    encode, CONN_AND_1, CONN_AND_2, CONN_NOT_1, CONN_OR_1, CONN_OR_2, CONST_FALSE, CONST_TRUE,
    REPR, REPR_PL, VAR,
};

const REPR_AX: &str = "repr_AX";
const REPR_EX: &str = "repr_EX";
const BODY_AX: &str = "body_AX";
const BODY_EX: &str = "body_EX";
const CONNECTIVE_ARGUMENTS: [&str; 5] = [CONN_AND_1, CONN_AND_2, CONN_OR_1, CONN_OR_2, CONN_NOT_1];

/// Name of the free set variable of the level-`i` formula.
pub fn set_variable(level: usize) -> String {
    format!("M{level}")
}

fn ax_set_variable(level: usize) -> String {
    format!("MAX{level}")
}

/// `exists y (pred(y, x) & forall z (pred(z, x) -> z = y))`.
fn unique_argument(pred: &str) -> Mso {
    F::exists(
        "y",
        F::and(vec![
            F::atom(pred, &["y", "x"]),
            F::forall("z", F::implies(F::atom(pred, &["z", "x"]), F::eq("z", "y"))),
        ]),
    )
}

/// Exactly one of `items`: at least one, and no two together.
fn exactly_one(items: Vec<Mso>) -> Mso {
    let mut conjuncts = vec![F::or(items.clone())];
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            conjuncts.push(F::not(F::and(vec![items[i].clone(), items[j].clone()])));
        }
    }
    F::and(conjuncts)
}

/// Well-formedness of an encoding of an NNF `{AX, EX}` formula: a unique
/// root, every other element an argument of a non-variable element, every
/// element of exactly one kind with unique arguments, and body tuples only
/// below matching operator elements.
pub fn build_theta_struc() -> Mso {
    let unique_root = F::forall(
        "x",
        F::implies(
            F::atom(REPR, &["x"]),
            F::forall("y", F::implies(F::atom(REPR, &["y"]), F::eq("x", "y"))),
        ),
    );

    let mut parent_links: Vec<Mso> = CONNECTIVE_ARGUMENTS
        .iter()
        .map(|p| F::atom(p, &["x", "y"]))
        .collect();
    parent_links.push(F::atom(BODY_AX, &["x", "y"]));
    parent_links.push(F::atom(BODY_EX, &["x", "y"]));
    let has_parent = F::forall(
        "x",
        F::implies(
            F::not(F::atom(REPR, &["x"])),
            F::exists(
                "y",
                F::and(vec![F::not(F::atom(VAR, &["y"])), F::or(parent_links)]),
            ),
        ),
    );

    // Each connective is its own branch, so an element cannot be two
    // connectives at once.
    let one_kind = F::forall(
        "x",
        exactly_one(vec![
            F::atom(VAR, &["x"]),
            F::or(vec![
                F::atom(CONST_TRUE, &["x"]),
                F::atom(CONST_FALSE, &["x"]),
            ]),
            F::and(vec![
                unique_argument(CONN_AND_1),
                unique_argument(CONN_AND_2),
            ]),
            F::and(vec![unique_argument(CONN_OR_1), unique_argument(CONN_OR_2)]),
            unique_argument(CONN_NOT_1),
            unique_argument(BODY_AX),
            unique_argument(BODY_EX),
        ]),
    );

    let body_marks = |body: &str, repr: &str| {
        F::forall(
            "x",
            F::forall(
                "y",
                F::implies(F::atom(body, &["y", "x"]), F::atom(repr, &["x"])),
            ),
        )
    };

    F::and(vec![
        unique_root,
        has_parent,
        one_kind,
        body_marks(BODY_AX, REPR_AX),
        body_marks(BODY_EX, REPR_EX),
    ])
}

/// Constants and connectives in `m` agree with their arguments. With
/// `propositional_only`, only elements satisfying `reprPL` are checked.
fn boolean_consistency(m: &str, propositional_only: bool) -> Mso {
    let mx = F::member(m, "x");
    let my1 = F::member(m, "y1");
    let my2 = F::member(m, "y2");
    let binary = |first: &str, second: &str, value: Mso| {
        F::forall(
            "y1",
            F::implies(
                F::atom(first, &["y1", "x"]),
                F::forall(
                    "y2",
                    F::implies(F::atom(second, &["y2", "x"]), F::iff(mx.clone(), value)),
                ),
            ),
        )
    };
    let rules = F::and(vec![
        F::implies(F::atom(CONST_TRUE, &["x"]), mx.clone()),
        F::implies(F::atom(CONST_FALSE, &["x"]), F::not(mx.clone())),
        binary(
            CONN_AND_1,
            CONN_AND_2,
            F::and(vec![my1.clone(), my2.clone()]),
        ),
        binary(CONN_OR_1, CONN_OR_2, F::or(vec![my1.clone(), my2])),
        F::forall(
            "y1",
            F::implies(
                F::atom(CONN_NOT_1, &["y1", "x"]),
                F::iff(mx.clone(), F::not(my1)),
            ),
        ),
    ]);
    if propositional_only {
        F::forall("x", F::implies(F::atom(REPR_PL, &["x"]), rules))
    } else {
        F::forall("x", rules)
    }
}

/// The level-`i` formula with free set variable [`set_variable`]`(i)`.
///
/// Level 0 only checks propositional consistency. Level `i > 0` shares one
/// copy of level `i - 1` between its `EX` branches and its `AX` step.
pub fn build_theta_assign(level: usize) -> Mso {
    let mut current = boolean_consistency(&set_variable(0), true);
    for i in 1..=level {
        current = assign_step(i, current);
    }
    current
}

fn assign_step(i: usize, previous: Mso) -> Mso {
    let m = set_variable(i);
    let next = set_variable(i - 1);
    let max = ax_set_variable(i);

    // Every successor contains the bodies of the AX elements in MAX.
    let carries_ax_bodies = F::forall(
        "z",
        F::implies(
            F::member(&max, "z"),
            F::exists(
                "w",
                F::and(vec![F::atom(BODY_AX, &["w", "z"]), F::member(&next, "w")]),
            ),
        ),
    );
    let branch_ex = F::exists(
        "y",
        F::and(vec![
            F::atom(BODY_EX, &["y", "x"]),
            F::exists_set(
                &next,
                F::and(vec![
                    F::member(&next, "y"),
                    carries_ax_bodies.clone(),
                    previous.clone(),
                ]),
            ),
        ]),
    );
    let step_ax = F::exists_set(&next, F::and(vec![carries_ax_bodies, previous]));

    let collects_ax = F::forall(
        "x",
        F::iff(
            F::member(&max, "x"),
            F::and(vec![F::atom(REPR_AX, &["x"]), F::member(&m, "x")]),
        ),
    );
    let every_ex_branches = F::forall(
        "x",
        F::implies(
            F::atom(REPR_EX, &["x"]),
            F::implies(F::member(&m, "x"), branch_ex),
        ),
    );
    let no_ex = F::forall(
        "x",
        F::implies(F::atom(REPR_EX, &["x"]), F::not(F::member(&m, "x"))),
    );
    F::and(vec![
        boolean_consistency(&m, false),
        F::exists_set(
            &max,
            F::and(vec![
                collects_ax,
                every_ex_branches,
                F::implies(no_ex, step_ax),
            ]),
        ),
    ])
}

/// Well-formedness together with a level-`depth` set containing the root.
/// Depends on `depth` alone.
pub fn build_theta(depth: usize) -> Mso {
    let m = set_variable(depth);
    let root_in_set = F::exists("x", F::and(vec![F::atom(REPR, &["x"]), F::member(&m, "x")]));
    F::and(vec![
        build_theta_struc(),
        F::exists_set(&m, F::and(vec![root_in_set, build_theta_assign(depth)])),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineError {
    Fragment(FragmentError),
    Mso(MsoError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Fragment(e) => write!(f, "{e}"),
            PipelineError::Mso(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

/// Satisfiability of `f` after negation normal form: encode it, build the
/// sentence for its temporal depth and evaluate the sentence on the
/// encoding.
pub fn fpt_pipeline(f: &CtlFormula) -> Result<bool, PipelineError> {
    let nnf = to_nnf(f);
    crate::kripke::check_x_fragment(&nnf).map_err(PipelineError::Fragment)?;
    let structure = encode(&nnf).expect("NNF formulas contain no -> or <->");
    let theta = build_theta(f.temporal_depth());
    evaluate(&structure, &theta, &MsoAssignment::new()).map_err(PipelineError::Mso)
}
