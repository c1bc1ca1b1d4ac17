//! Weighted partitioned satisfiability and its reductions to CTL
//! satisfiability for the fragments `{AX, AG}`, `{AX, AF}`, `{AG}` and `{AU}`.

mod build;
mod chain;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ctl::{is_valid_prop_name, CtlFormula, CtlOperator, CtlOperatorSet};

pub use build::{names, reduce};
pub use chain::{
    chain_model, parameter_growth_scan, verify_reduction, witness_model, BoundedSearch,
    ReductionReport, ScanRow, VerifyError, WitnessError,
};

/// Largest variable count accepted by [`pwsat_brute_force`].
pub const MAX_PWSAT_VARIABLES: usize = 20;

/// Truth values of the instance variables.
pub type Assignment = BTreeMap<String, bool>;

/// A p-PW-SAT instance: a propositional formula, a partition of its
/// variables into parts `1..=k`, and an exact target count of true
/// variables for every part.
///
/// Variables are ordered by name; the `i`-th variable in that order plays
/// the role of the `i`-th level in every reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwSatInstance {
    formula: CtlFormula,
    part: BTreeMap<String, usize>,
    targets: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceError {
    NotPropositional,
    InvalidName(String),
    /// The name clashes with an auxiliary proposition of the reductions.
    ReservedName(String),
    UnassignedVariable(String),
    PartOutOfRange {
        variable: String,
        part: usize,
    },
    /// Target keys must be exactly `1..=k`.
    NonContiguousParts,
    TargetTooLarge {
        part: usize,
        target: usize,
        size: usize,
    },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NotPropositional => f.write_str("the formula must be propositional"),
            InstanceError::InvalidName(n) => write!(f, "{n:?} is not a valid proposition name"),
            InstanceError::ReservedName(n) => {
                write!(
                    f,
                    "{n:?} clashes with an auxiliary proposition of the reductions"
                )
            }
            InstanceError::UnassignedVariable(v) => write!(f, "variable {v} has no part"),
            InstanceError::PartOutOfRange { variable, part } => {
                write!(
                    f,
                    "variable {variable} is assigned to part {part}, which has no target"
                )
            }
            InstanceError::NonContiguousParts => {
                f.write_str("targets must be given for exactly the parts 1..=k")
            }
            InstanceError::TargetTooLarge { part, target, size } => {
                write!(f, "part {part} has {size} variables but target {target}")
            }
        }
    }
}

impl core::error::Error for InstanceError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwSatError {
    TooManyVariables { variables: usize, limit: usize },
}

impl fmt::Display for PwSatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PwSatError::TooManyVariables { variables, limit } => {
                write!(
                    f,
                    "{variables} variables exceed the enumeration limit of {limit}"
                )
            }
        }
    }
}

impl core::error::Error for PwSatError {}

impl PwSatInstance {
    /// Variables listed in `part` but absent from `formula` are allowed and
    /// count towards their part.
    pub fn new(
        formula: CtlFormula,
        part: BTreeMap<String, usize>,
        targets: BTreeMap<usize, usize>,
    ) -> Result<Self, InstanceError> {
        if !formula.is_propositional() {
            return Err(InstanceError::NotPropositional);
        }
        for v in formula.propositions() {
            if !part.contains_key(&v) {
                return Err(InstanceError::UnassignedVariable(v));
            }
        }
        for (v, &p) in &part {
            if !is_valid_prop_name(v) {
                return Err(InstanceError::InvalidName(v.clone()));
            }
            if names::is_reserved(v) {
                return Err(InstanceError::ReservedName(v.clone()));
            }
            if !targets.contains_key(&p) {
                return Err(InstanceError::PartOutOfRange {
                    variable: v.clone(),
                    part: p,
                });
            }
        }
        if targets.keys().copied().ne(1..=targets.len()) {
            return Err(InstanceError::NonContiguousParts);
        }
        let inst = PwSatInstance {
            formula,
            part,
            targets,
        };
        for (&p, &target) in &inst.targets {
            let size = inst.part_size(p);
            if target > size {
                return Err(InstanceError::TargetTooLarge {
                    part: p,
                    target,
                    size,
                });
            }
        }
        Ok(inst)
    }

    /// Single-part instance over `variables` with target `target`.
    pub fn single_part(
        formula: CtlFormula,
        variables: &[&str],
        target: usize,
    ) -> Result<Self, InstanceError> {
        let part = variables.iter().map(|v| (v.to_string(), 1)).collect();
        PwSatInstance::new(formula, part, BTreeMap::from([(1, target)]))
    }

    pub fn formula(&self) -> &CtlFormula {
        &self.formula
    }

    /// Variables in level order.
    pub fn variables(&self) -> impl Iterator<Item = &str> + '_ {
        self.part.keys().map(String::as_str)
    }

    pub fn variable_count(&self) -> usize {
        self.part.len()
    }

    /// Number of parts `k`.
    pub fn part_count(&self) -> usize {
        self.targets.len()
    }

    pub fn part_of(&self, variable: &str) -> Option<usize> {
        self.part.get(variable).copied()
    }

    /// Number of variables in part `p`.
    pub fn part_size(&self, p: usize) -> usize {
        self.part.values().filter(|&&q| q == p).count()
    }

    pub fn target(&self, p: usize) -> Option<usize> {
        self.targets.get(&p).copied()
    }

    pub fn partition(&self) -> &BTreeMap<String, usize> {
        &self.part
    }

    pub fn targets(&self) -> &BTreeMap<usize, usize> {
        &self.targets
    }

    /// True when `asg` satisfies the formula and meets every target exactly.
    /// Missing variables count as false.
    pub fn accepts(&self, asg: &Assignment) -> bool {
        let value = |v: &str| asg.get(v).copied().unwrap_or(false);
        if self.formula.eval_propositional(&value) != Some(true) {
            return false;
        }
        self.targets.iter().all(|(&p, &target)| {
            self.part
                .iter()
                .filter(|(v, &q)| q == p && value(v))
                .count()
                == target
        })
    }
}

/// Assignment number `mask`: bit `i` is the value of the `i`-th variable.
pub(crate) fn assignment_from_mask(inst: &PwSatInstance, mask: u64) -> Assignment {
    inst.variables()
        .enumerate()
        .map(|(i, v)| (v.to_string(), mask >> i & 1 == 1))
        .collect()
}

/// All `2^n` assignments in counting order.
pub fn all_assignments(inst: &PwSatInstance) -> Result<Vec<Assignment>, PwSatError> {
    let n = inst.variable_count();
    if n > MAX_PWSAT_VARIABLES {
        return Err(PwSatError::TooManyVariables {
            variables: n,
            limit: MAX_PWSAT_VARIABLES,
        });
    }
    Ok((0..1u64 << n)
        .map(|mask| assignment_from_mask(inst, mask))
        .collect())
}

/// The first accepted assignment in counting order, where bit `i` of the
/// counter is the `i`-th variable.
pub fn pwsat_brute_force(inst: &PwSatInstance) -> Result<Option<Assignment>, PwSatError> {
    let n = inst.variable_count();
    if n > MAX_PWSAT_VARIABLES {
        return Err(PwSatError::TooManyVariables {
            variables: n,
            limit: MAX_PWSAT_VARIABLES,
        });
    }
    Ok((0..1u64 << n)
        .map(|mask| assignment_from_mask(inst, mask))
        .find(|a| inst.accepts(a)))
}

fn numbered_variables(n: usize) -> Vec<String> {
    (1..=n).map(|i| alloc::format!("x{i}")).collect()
}

/// `x1 ∨ … ∨ xn` with one part and target 1.
pub fn disjunction_instance(n: usize) -> PwSatInstance {
    let vars = numbered_variables(n);
    let f = CtlFormula::disj(vars.iter().map(|v| CtlFormula::prop(v.as_str())));
    let part = vars.into_iter().map(|v| (v, 1)).collect();
    let target = usize::from(n > 0);
    PwSatInstance::new(f, part, BTreeMap::from([(1, target)])).expect("well-formed by construction")
}

/// The constant `true` over `x1 … xn` with one part and target 1; a formula
/// without clauses.
pub fn clause_free_instance(n: usize) -> PwSatInstance {
    let part = numbered_variables(n).into_iter().map(|v| (v, 1)).collect();
    let target = usize::from(n > 0);
    PwSatInstance::new(CtlFormula::True, part, BTreeMap::from([(1, target)]))
        .expect("well-formed by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReductionVariant {
    AxAg,
    /// The `{AX, AG}` formula with every `AG` merged into one `EG`, written
    /// as `¬AF¬`.
    AxEg,
    AgOnly,
    AuOnly,
}

impl ReductionVariant {
    pub const ALL: [ReductionVariant; 4] = [
        ReductionVariant::AxAg,
        ReductionVariant::AxEg,
        ReductionVariant::AgOnly,
        ReductionVariant::AuOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionVariant::AxAg => "ax-ag",
            ReductionVariant::AxEg => "ax-eg",
            ReductionVariant::AgOnly => "ag",
            ReductionVariant::AuOnly => "au",
        }
    }

    pub fn from_name(name: &str) -> Option<ReductionVariant> {
        ReductionVariant::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Operators the generated formulas may use.
    pub fn fragment(self) -> CtlOperatorSet {
        use CtlOperator::*;
        match self {
            ReductionVariant::AxAg => [AX, AG].into_iter().collect(),
            ReductionVariant::AxEg => [AX, AF].into_iter().collect(),
            ReductionVariant::AgOnly => [AG].into_iter().collect(),
            ReductionVariant::AuOnly => [AU].into_iter().collect(),
        }
    }

    /// Temporal depth of every generated formula.
    pub fn temporal_depth(self) -> usize {
        match self {
            ReductionVariant::AxAg | ReductionVariant::AxEg => 2,
            ReductionVariant::AgOnly | ReductionVariant::AuOnly => 3,
        }
    }

    /// True for the variants that track level parities and close the chain
    /// with a final `d_{n+2}` world.
    pub fn uses_parities(self) -> bool {
        matches!(self, ReductionVariant::AgOnly | ReductionVariant::AuOnly)
    }
}

impl fmt::Display for ReductionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
