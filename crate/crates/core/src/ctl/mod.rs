//! CTL formulas over a fixed Boolean basis `{∧, ∨, ¬, ⊤, ⊥}`.
//!
//! Implication and biconditional are kept in the AST as sugar so generated
//! formulas stay readable; [`to_nnf`] and [`eliminate_sugar`] remove them.

mod nnf;
mod parse;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use nnf::{eliminate_sugar, is_nnf, to_nnf};
pub use parse::{is_valid_prop_name, parse_formula, ParseError, ParseErrorKind};

/// Path quantifier of an until formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathQuantifier {
    All,
    Exists,
}

/// The six unary CTL-operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    AX,
    EX,
    AF,
    EF,
    AG,
    EG,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 6] = [
        UnaryOp::AX,
        UnaryOp::EX,
        UnaryOp::AF,
        UnaryOp::EF,
        UnaryOp::AG,
        UnaryOp::EG,
    ];

    /// The operator `D` with `¬Op φ ≡ D ¬φ`.
    pub fn dual(self) -> UnaryOp {
        match self {
            UnaryOp::AX => UnaryOp::EX,
            UnaryOp::EX => UnaryOp::AX,
            UnaryOp::AF => UnaryOp::EG,
            UnaryOp::EG => UnaryOp::AF,
            UnaryOp::EF => UnaryOp::AG,
            UnaryOp::AG => UnaryOp::EF,
        }
    }

    pub fn operator(self) -> CtlOperator {
        match self {
            UnaryOp::AX => CtlOperator::AX,
            UnaryOp::EX => CtlOperator::EX,
            UnaryOp::AF => CtlOperator::AF,
            UnaryOp::EF => CtlOperator::EF,
            UnaryOp::AG => CtlOperator::AG,
            UnaryOp::EG => CtlOperator::EG,
        }
    }

    pub fn name(self) -> &'static str {
        self.operator().name()
    }
}

/// A CTL-operator: a path quantifier paired with a temporal operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CtlOperator {
    AX,
    EX,
    AF,
    EF,
    AG,
    EG,
    AU,
    EU,
}

impl CtlOperator {
    pub const ALL: [CtlOperator; 8] = [
        CtlOperator::AX,
        CtlOperator::EX,
        CtlOperator::AF,
        CtlOperator::EF,
        CtlOperator::AG,
        CtlOperator::EG,
        CtlOperator::AU,
        CtlOperator::EU,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CtlOperator::AX => "AX",
            CtlOperator::EX => "EX",
            CtlOperator::AF => "AF",
            CtlOperator::EF => "EF",
            CtlOperator::AG => "AG",
            CtlOperator::EG => "EG",
            CtlOperator::AU => "AU",
            CtlOperator::EU => "EU",
        }
    }

    pub fn from_name(name: &str) -> Option<CtlOperator> {
        CtlOperator::ALL.into_iter().find(|op| op.name() == name)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for CtlOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of CTL-operators, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtlOperatorSet(u8);

impl CtlOperatorSet {
    pub const fn empty() -> Self {
        CtlOperatorSet(0)
    }

    pub fn insert(&mut self, op: CtlOperator) {
        self.0 |= op.bit();
    }

    pub fn contains(&self, op: CtlOperator) -> bool {
        self.0 & op.bit() != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(&self, other: &CtlOperatorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(&self, other: &CtlOperatorSet) -> CtlOperatorSet {
        CtlOperatorSet(self.0 | other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = CtlOperator> + '_ {
        CtlOperator::ALL.into_iter().filter(|op| self.contains(*op))
    }
}

impl FromIterator<CtlOperator> for CtlOperatorSet {
    fn from_iter<I: IntoIterator<Item = CtlOperator>>(iter: I) -> Self {
        let mut set = CtlOperatorSet::empty();
        for op in iter {
            set.insert(op);
        }
        set
    }
}

impl fmt::Display for CtlOperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, op) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(op.name())?;
        }
        f.write_str("}")
    }
}

/// Abstract syntax tree of a CTL formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CtlFormula {
    True,
    False,
    Prop(String),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    Iff(Box<CtlFormula>, Box<CtlFormula>),
    Temporal(UnaryOp, Box<CtlFormula>),
    Until(PathQuantifier, Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        CtlFormula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CtlFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        CtlFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        CtlFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        CtlFormula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Self) -> Self {
        CtlFormula::Iff(Box::new(self), Box::new(other))
    }

    pub fn temporal(op: UnaryOp, body: Self) -> Self {
        CtlFormula::Temporal(op, Box::new(body))
    }

    pub fn ax(self) -> Self {
        CtlFormula::temporal(UnaryOp::AX, self)
    }

    pub fn ex(self) -> Self {
        CtlFormula::temporal(UnaryOp::EX, self)
    }

    pub fn af(self) -> Self {
        CtlFormula::temporal(UnaryOp::AF, self)
    }

    pub fn ef(self) -> Self {
        CtlFormula::temporal(UnaryOp::EF, self)
    }

    pub fn ag(self) -> Self {
        CtlFormula::temporal(UnaryOp::AG, self)
    }

    pub fn eg(self) -> Self {
        CtlFormula::temporal(UnaryOp::EG, self)
    }

    /// `A[self U until]`
    pub fn au(self, until: Self) -> Self {
        CtlFormula::Until(PathQuantifier::All, Box::new(self), Box::new(until))
    }

    /// `E[self U until]`
    pub fn eu(self, until: Self) -> Self {
        CtlFormula::Until(PathQuantifier::Exists, Box::new(self), Box::new(until))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj<I: IntoIterator<Item = CtlFormula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(CtlFormula::and)
            .unwrap_or(CtlFormula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj<I: IntoIterator<Item = CtlFormula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(CtlFormula::or)
            .unwrap_or(CtlFormula::False)
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&CtlFormula> {
        match self {
            CtlFormula::True | CtlFormula::False | CtlFormula::Prop(_) => Vec::new(),
            CtlFormula::Not(a) | CtlFormula::Temporal(_, a) => alloc::vec![a.as_ref()],
            CtlFormula::And(a, b)
            | CtlFormula::Or(a, b)
            | CtlFormula::Implies(a, b)
            | CtlFormula::Iff(a, b)
            | CtlFormula::Until(_, a, b) => alloc::vec![a.as_ref(), b.as_ref()],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(CtlFormula::size)
            .sum::<usize>()
    }

    /// Maximum nesting of CTL-operators.
    pub fn temporal_depth(&self) -> usize {
        match self {
            CtlFormula::True | CtlFormula::False | CtlFormula::Prop(_) => 0,
            CtlFormula::Not(a) => a.temporal_depth(),
            CtlFormula::And(a, b)
            | CtlFormula::Or(a, b)
            | CtlFormula::Implies(a, b)
            | CtlFormula::Iff(a, b) => a.temporal_depth().max(b.temporal_depth()),
            CtlFormula::Temporal(_, a) => a.temporal_depth() + 1,
            CtlFormula::Until(_, a, b) => a.temporal_depth().max(b.temporal_depth()) + 1,
        }
    }

    /// The CTL-operators occurring in the formula.
    pub fn operator_set(&self) -> CtlOperatorSet {
        let mut set = CtlOperatorSet::empty();
        self.collect_operators(&mut set);
        set
    }

    fn collect_operators(&self, set: &mut CtlOperatorSet) {
        match self {
            CtlFormula::Temporal(op, _) => set.insert(op.operator()),
            CtlFormula::Until(PathQuantifier::All, ..) => set.insert(CtlOperator::AU),
            CtlFormula::Until(PathQuantifier::Exists, ..) => set.insert(CtlOperator::EU),
            _ => {}
        }
        for child in self.children() {
            child.collect_operators(set);
        }
    }

    /// Distinct subformulas in pre-order of first occurrence, starting with `self`.
    pub fn subformulas(&self) -> Vec<CtlFormula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas(&self, seen: &mut BTreeSet<String>, out: &mut Vec<CtlFormula>) {
        if seen.insert(self.to_string()) {
            out.push(self.clone());
        }
        for child in self.children() {
            child.collect_subformulas(seen, out);
        }
    }

    /// Proposition names occurring in the formula.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut props = BTreeSet::new();
        self.collect_props(&mut props);
        props
    }

    fn collect_props(&self, props: &mut BTreeSet<String>) {
        if let CtlFormula::Prop(p) = self {
            props.insert(p.clone());
        }
        for child in self.children() {
            child.collect_props(props);
        }
    }

    /// True when no CTL-operator occurs.
    pub fn is_propositional(&self) -> bool {
        self.operator_set().is_empty()
    }

    /// Truth value under the valuation `holds`, or `None` when a
    /// CTL-operator occurs.
    pub fn eval_propositional(&self, holds: &dyn Fn(&str) -> bool) -> Option<bool> {
        Some(match self {
            CtlFormula::True => true,
            CtlFormula::False => false,
            CtlFormula::Prop(p) => holds(p),
            CtlFormula::Not(a) => !a.eval_propositional(holds)?,
            CtlFormula::And(a, b) => a.eval_propositional(holds)? & b.eval_propositional(holds)?,
            CtlFormula::Or(a, b) => a.eval_propositional(holds)? | b.eval_propositional(holds)?,
            CtlFormula::Implies(a, b) => {
                !a.eval_propositional(holds)? | b.eval_propositional(holds)?
            }
            CtlFormula::Iff(a, b) => a.eval_propositional(holds)? == b.eval_propositional(holds)?,
            CtlFormula::Temporal(..) | CtlFormula::Until(..) => return None,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            CtlFormula::Iff(..) => 1,
            CtlFormula::Implies(..) => 2,
            CtlFormula::Or(..) => 3,
            CtlFormula::And(..) => 4,
            CtlFormula::Not(_) | CtlFormula::Temporal(..) => 5,
            _ => 6,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            CtlFormula::True => f.write_str("true"),
            CtlFormula::False => f.write_str("false"),
            CtlFormula::Prop(p) => f.write_str(p),
            CtlFormula::Not(a) => {
                f.write_str("~")?;
                a.write_at(f, 5)
            }
            CtlFormula::Temporal(op, a) => {
                write!(f, "{} ", op.name())?;
                a.write_at(f, 5)
            }
            // & and | associate to the left, the arrows to the right.
            CtlFormula::And(a, b) | CtlFormula::Or(a, b) => {
                let sym = if matches!(self, CtlFormula::And(..)) {
                    " & "
                } else {
                    " | "
                };
                a.write_at(f, prec)?;
                f.write_str(sym)?;
                b.write_at(f, prec + 1)
            }
            CtlFormula::Implies(a, b) | CtlFormula::Iff(a, b) => {
                let sym = if matches!(self, CtlFormula::Implies(..)) {
                    " -> "
                } else {
                    " <-> "
                };
                a.write_at(f, prec + 1)?;
                f.write_str(sym)?;
                b.write_at(f, prec)
            }
            CtlFormula::Until(q, a, b) => {
                let q = match q {
                    PathQuantifier::All => "A",
                    PathQuantifier::Exists => "E",
                };
                write!(f, "{q}[")?;
                a.write_at(f, 0)?;
                f.write_str(" U ")?;
                b.write_at(f, 0)?;
                f.write_str("]")
            }
        }
    }
}

/// Prints in the concrete grammar accepted by [`parse_formula`], with the
/// minimum number of parentheses.
impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl core::str::FromStr for CtlFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

pub fn temporal_depth(f: &CtlFormula) -> usize {
    f.temporal_depth()
}

pub fn subformulas(f: &CtlFormula) -> Vec<CtlFormula> {
    f.subformulas()
}

pub fn operator_set(f: &CtlFormula) -> CtlOperatorSet {
    f.operator_set()
}
