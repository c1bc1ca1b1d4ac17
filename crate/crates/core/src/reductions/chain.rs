//! Chain models induced by assignments, empirical checks of the reductions
//! and parameter scans.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use super::build::names;
use super::{
    all_assignments, pwsat_brute_force, reduce, Assignment, PwSatError, PwSatInstance,
    ReductionVariant,
};
use crate::ctl::{eliminate_sugar, CtlFormula};
use crate::decomposition::pathwidth_upper;
use crate::kripke::{
    model_check, pruned_model_search, BruteForceConfig, BruteForceOutcome, KripkeStructure,
};
use crate::structure::encode;

/// The chain `w_0 → w_1 → … → w_last → w_last` induced by `asg`, rooted at
/// world 0.
///
/// World `w_i` sits at level `i`, carries the true variables, the step flag
/// of variable `i` and the counters of the variables before level `i`. The
/// parity variants get parity bits and one extra world at level `n+2`.
/// Every proposition of the reduced formula is declared.
pub fn chain_model(
    inst: &PwSatInstance,
    asg: &Assignment,
    variant: ReductionVariant,
) -> KripkeStructure {
    let levels: Vec<(&str, usize, bool)> = inst
        .partition()
        .iter()
        .map(|(v, &p)| (v.as_str(), p, asg.get(v).copied().unwrap_or(false)))
        .collect();
    let n = levels.len();
    let worlds = if variant.uses_parities() {
        n + 3
    } else {
        n + 2
    };
    let mut k = KripkeStructure::new(worlds);
    for p in reduce(inst, variant).propositions() {
        k.declare_proposition(p);
    }
    for v in inst.variables() {
        k.declare_proposition(v.to_string());
    }
    for w in 0..worlds {
        k.add_edge(w, (w + 1).min(worlds - 1));
        for &(v, _, value) in &levels {
            if value {
                k.set_label(w, v.to_string());
            }
        }
        for i in 0..=w {
            k.set_label(w, names::depth(i));
        }
        if variant.uses_parities() {
            k.set_label(w, names::parity(w % 2));
        }
        if (1..=n).contains(&w) {
            let (_, p, value) = levels[w - 1];
            k.set_label(
                w,
                if value {
                    names::true_step(p)
                } else {
                    names::false_step(p)
                },
            );
        }
        for &p in inst.targets().keys() {
            let before = &levels[..w.saturating_sub(1).min(n)];
            let seen = |want: bool| before.iter().filter(|l| l.1 == p && l.2 == want).count();
            for j in 0..=seen(true) {
                k.set_label(w, names::true_count(p, j));
            }
            for j in 0..=seen(false) {
                k.set_label(w, names::false_count(p, j));
            }
        }
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessError {
    /// The assignment falsifies the formula or misses a target.
    NotAccepted,
}

impl fmt::Display for WitnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("the assignment does not solve the instance")
    }
}

impl core::error::Error for WitnessError {}

/// The chain model of an accepted assignment together with its root.
pub fn witness_model(
    inst: &PwSatInstance,
    asg: &Assignment,
    variant: ReductionVariant,
) -> Result<(KripkeStructure, usize), WitnessError> {
    if !inst.accepts(asg) {
        return Err(WitnessError::NotAccepted);
    }
    Ok((chain_model(inst, asg, variant), 0))
}

/// Result of the bounded model search on a no-instance. None of these
/// outcomes proves unsatisfiability beyond the searched sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedSearch {
    NoModel {
        max_worlds: usize,
        examined: u64,
    },
    BudgetExhausted {
        complete_up_to: usize,
        examined: u64,
    },
    ModelFound {
        worlds: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub variant: ReductionVariant,
    /// The first solution found by enumeration, if any.
    pub solution: Option<Assignment>,
    /// Whether the witness model of `solution` satisfies the reduced
    /// formula at its root.
    pub sound: Option<bool>,
    /// Assignments whose chain model disagrees with acceptance: accepted
    /// but rejected by the formula, or the other way round.
    pub chain_mismatches: Vec<Assignment>,
    pub chains_checked: usize,
    /// Present for no-instances only.
    pub bounded: Option<BoundedSearch>,
}

impl ReductionReport {
    /// No check produced a counterexample. Budget exhaustion is not a
    /// failure.
    pub fn passed(&self) -> bool {
        self.sound != Some(false)
            && self.chain_mismatches.is_empty()
            && !matches!(self.bounded, Some(BoundedSearch::ModelFound { .. }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    PwSat(PwSatError),
    InvalidBound(usize),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::PwSat(e) => e.fmt(f),
            VerifyError::InvalidBound(b) => write!(f, "world bound {b} outside 1..=64"),
        }
    }
}

impl core::error::Error for VerifyError {}

impl From<PwSatError> for VerifyError {
    fn from(e: PwSatError) -> Self {
        VerifyError::PwSat(e)
    }
}

fn holds(k: &KripkeStructure, f: &CtlFormula) -> bool {
    model_check(k, 0, f).expect("chain models declare every proposition of the formula")
}

/// Checks the reduction on one instance.
///
/// Every assignment's chain model is checked against acceptance. A
/// no-instance additionally gets a bounded search for any model within
/// `search`.
pub fn verify_reduction(
    inst: &PwSatInstance,
    variant: ReductionVariant,
    search: BruteForceConfig,
) -> Result<ReductionReport, VerifyError> {
    if !(1..=64).contains(&search.max_worlds) {
        return Err(VerifyError::InvalidBound(search.max_worlds));
    }
    let f = reduce(inst, variant);
    let solution = pwsat_brute_force(inst)?;
    let sound = solution.as_ref().map(|asg| {
        let (k, root) = witness_model(inst, asg, variant).expect("solutions are accepted");
        model_check(&k, root, &f).expect("witness models declare every proposition")
    });
    let assignments = all_assignments(inst)?;
    let chains_checked = assignments.len();
    let chain_mismatches = assignments
        .into_iter()
        .filter(|asg| holds(&chain_model(inst, asg, variant), &f) != inst.accepts(asg))
        .collect();
    let bounded = solution
        .is_none()
        .then(|| match pruned_model_search(&f, search) {
            BruteForceOutcome::Satisfiable { model, .. } => BoundedSearch::ModelFound {
                worlds: model.world_count(),
            },
            BruteForceOutcome::NoModelUpToBound {
                max_worlds,
                examined,
            } => BoundedSearch::NoModel {
                max_worlds,
                examined,
            },
            BruteForceOutcome::BudgetExhausted {
                examined,
                complete_up_to,
            } => BoundedSearch::BudgetExhausted {
                complete_up_to,
                examined,
            },
        });
    Ok(ReductionReport {
        variant,
        solution,
        sound,
        chain_mismatches,
        chains_checked,
        bounded,
    })
}

/// One row of [`parameter_growth_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub variables: usize,
    pub temporal_depth: usize,
    pub pathwidth_upper: usize,
    /// Universe size of the encoding.
    pub elements: usize,
}

/// Temporal depth and heuristic pathwidth of the reduced formula for each
/// instance of `family`.
pub fn parameter_growth_scan<I>(family: I, variant: ReductionVariant) -> Vec<ScanRow>
where
    I: IntoIterator<Item = PwSatInstance>,
{
    family
        .into_iter()
        .map(|inst| {
            let f = reduce(&inst, variant);
            let a = encode(&eliminate_sugar(&f)).expect("sugar-free formulas always encode");
            ScanRow {
                variables: inst.variable_count(),
                temporal_depth: f.temporal_depth(),
                pathwidth_upper: pathwidth_upper(&a).1,
                elements: a.universe_size(),
            }
        })
        .collect()
}
