//! Finite relational structures and the encoding of formulas as structures.
//!
//! A formula becomes a structure whose elements are its subformula
//! occurrences. Proposition and constant leaves are shared between
//! occurrences; every compound occurrence gets its own element. Argument
//! predicates store the argument first and the parent last.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ctl::{CtlFormula, CtlOperator, PathQuantifier};
use crate::graph::Graph;

pub const VAR: &str = "var";
pub const REPR: &str = "repr";
pub const REPR_PL: &str = "reprPL";
pub const CONST_TRUE: &str = "const_true";
pub const CONST_FALSE: &str = "const_false";
pub const CONN_AND_1: &str = "conn_and_1";
pub const CONN_AND_2: &str = "conn_and_2";
pub const CONN_OR_1: &str = "conn_or_1";
pub const CONN_OR_2: &str = "conn_or_2";
pub const CONN_NOT_1: &str = "conn_not_1";

/// `repr_C`: the element represents a formula with outermost operator `C`.
pub fn repr_predicate(op: CtlOperator) -> &'static str {
    match op {
        CtlOperator::AX => "repr_AX",
        CtlOperator::EX => "repr_EX",
        CtlOperator::AF => "repr_AF",
        CtlOperator::EF => "repr_EF",
        CtlOperator::AG => "repr_AG",
        CtlOperator::EG => "repr_EG",
        CtlOperator::AU => "repr_AU",
        CtlOperator::EU => "repr_EU",
    }
}

/// Binary body predicates of `op`, one per argument position.
pub fn body_predicates(op: CtlOperator) -> &'static [&'static str] {
    match op {
        CtlOperator::AX => &["body_AX"],
        CtlOperator::EX => &["body_EX"],
        CtlOperator::AF => &["body_AF"],
        CtlOperator::EF => &["body_EF"],
        CtlOperator::AG => &["body_AG"],
        CtlOperator::EG => &["body_EG"],
        CtlOperator::AU => &["body_AU_1", "body_AU_2"],
        CtlOperator::EU => &["body_EU_1", "body_EU_2"],
    }
}

/// Predicate names with arities, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    predicates: Vec<(String, usize)>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    /// The vocabulary of formula encodings.
    pub fn ctl() -> Self {
        let mut v = Vocabulary::new();
        for name in [CONST_TRUE, CONST_FALSE, VAR, REPR, REPR_PL] {
            v.declare(name, 1).expect("names are distinct");
        }
        for name in [CONN_AND_1, CONN_AND_2, CONN_OR_1, CONN_OR_2, CONN_NOT_1] {
            v.declare(name, 2).expect("names are distinct");
        }
        for op in CtlOperator::ALL {
            v.declare(repr_predicate(op), 1)
                .expect("names are distinct");
            for body in body_predicates(op) {
                v.declare(*body, 2).expect("names are distinct");
            }
        }
        v
    }

    pub fn declare(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<usize, StructureError> {
        let name = name.into();
        if self.index(&name).is_some() {
            return Err(StructureError::DuplicatePredicate(name));
        }
        self.predicates.push((name, arity));
        Ok(self.predicates.len() - 1)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index(name).map(|i| self.predicates[i].1)
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    DuplicatePredicate(String),
    UnknownPredicate(String),
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    ElementOutOfRange {
        element: usize,
        universe: usize,
    },
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::DuplicatePredicate(p) => write!(f, "predicate {p:?} declared twice"),
            StructureError::UnknownPredicate(p) => write!(f, "unknown predicate {p:?}"),
            StructureError::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "predicate {predicate:?} has arity {expected}, got a tuple of length {found}"
            ),
            StructureError::ElementOutOfRange { element, universe } => {
                write!(
                    f,
                    "element {element} out of range (universe has {universe} elements)"
                )
            }
        }
    }
}

impl core::error::Error for StructureError {}

/// A finite universe `0..n` with named elements and one relation per
/// vocabulary predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    vocabulary: Vocabulary,
    names: Vec<String>,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl RelationalStructure {
    pub fn new(vocabulary: Vocabulary) -> Self {
        let relations = (0..vocabulary.len()).map(|_| BTreeSet::new()).collect();
        RelationalStructure {
            vocabulary,
            names: Vec::new(),
            relations,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// Appends an element and returns its index.
    pub fn add_element(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn universe_size(&self) -> usize {
        self.names.len()
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn find_element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn check(&self, predicate: &str, tuple: &[usize]) -> Result<usize, StructureError> {
        let index = self
            .vocabulary
            .index(predicate)
            .ok_or_else(|| StructureError::UnknownPredicate(predicate.to_string()))?;
        let expected = self.vocabulary.predicates[index].1;
        if tuple.len() != expected {
            return Err(StructureError::ArityMismatch {
                predicate: predicate.to_string(),
                expected,
                found: tuple.len(),
            });
        }
        if let Some(&element) = tuple.iter().find(|&&e| e >= self.universe_size()) {
            return Err(StructureError::ElementOutOfRange {
                element,
                universe: self.universe_size(),
            });
        }
        Ok(index)
    }

    /// Adds a tuple; returns false when it was already present.
    pub fn insert(&mut self, predicate: &str, tuple: &[usize]) -> Result<bool, StructureError> {
        let index = self.check(predicate, tuple)?;
        Ok(self.relations[index].insert(tuple.to_vec()))
    }

    /// Removes a tuple; returns false when it was absent.
    pub fn remove(&mut self, predicate: &str, tuple: &[usize]) -> Result<bool, StructureError> {
        let index = self.check(predicate, tuple)?;
        Ok(self.relations[index].remove(tuple))
    }

    pub fn contains(&self, predicate: &str, tuple: &[usize]) -> bool {
        self.vocabulary
            .index(predicate)
            .is_some_and(|i| self.relations[i].contains(tuple))
    }

    /// Tuples of `predicate`, or `None` when it is not in the vocabulary.
    pub fn relation(&self, predicate: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.vocabulary.index(predicate).map(|i| &self.relations[i])
    }

    /// Relation by vocabulary index.
    pub fn relation_at(&self, index: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[index]
    }

    /// Elements `e` with `predicate(e)`, for unary predicates.
    pub fn unary_members(&self, predicate: &str) -> Vec<usize> {
        self.relation(predicate)
            .into_iter()
            .flatten()
            .filter(|t| t.len() == 1)
            .map(|t| t[0])
            .collect()
    }

    /// Every tuple, grouped by predicate in vocabulary order.
    pub fn tuples(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.vocabulary
            .iter()
            .zip(&self.relations)
            .flat_map(|((name, _), rel)| rel.iter().map(move |t| (name, t.as_slice())))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }
}

/// Vertices are the universe; `{u, v}` is an edge iff `u != v` occur
/// together in some tuple.
pub fn gaifman_graph(a: &RelationalStructure) -> Graph {
    let mut g = Graph::new(a.universe_size());
    for (_, tuple) in a.tuples() {
        for (i, &u) in tuple.iter().enumerate() {
            for &v in &tuple[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodeError {
    /// `->` or `<->`; eliminate them first.
    UnsupportedConnective(&'static str),
}

impl fmt::Display for EncodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeError::UnsupportedConnective(c) => write!(
                f,
                "connective {c} cannot be encoded; rewrite it with &, | and ~ first"
            ),
        }
    }
}

impl core::error::Error for EncodeError {}

/// The structure of `f` over [`Vocabulary::ctl`]. Elements are numbered in
/// pre-order, a shared leaf keeping the index of its first visit, and are
/// named by the subformula they represent.
pub fn encode(f: &CtlFormula) -> Result<RelationalStructure, EncodeError> {
    let mut encoder = Encoder {
        a: RelationalStructure::new(Vocabulary::ctl()),
        leaves: Vec::new(),
    };
    let root = encoder.visit(f)?;
    encoder.put(REPR, &[root]);
    Ok(encoder.a)
}

struct Encoder {
    a: RelationalStructure,
    leaves: Vec<(String, usize)>,
}

impl Encoder {
    fn put(&mut self, predicate: &str, tuple: &[usize]) {
        self.a
            .insert(predicate, tuple)
            .expect("encoding stays within the vocabulary");
    }

    fn leaf(&mut self, name: String, predicate: &str) -> usize {
        if let Some(&(_, e)) = self.leaves.iter().find(|(n, _)| *n == name) {
            return e;
        }
        let e = self.a.add_element(name.clone());
        self.leaves.push((name, e));
        self.put(predicate, &[e]);
        self.put(REPR_PL, &[e]);
        e
    }

    fn visit(&mut self, f: &CtlFormula) -> Result<usize, EncodeError> {
        match f {
            CtlFormula::True => return Ok(self.leaf("true".into(), CONST_TRUE)),
            CtlFormula::False => return Ok(self.leaf("false".into(), CONST_FALSE)),
            CtlFormula::Prop(p) => return Ok(self.leaf(p.clone(), VAR)),
            CtlFormula::Implies(..) => return Err(EncodeError::UnsupportedConnective("->")),
            CtlFormula::Iff(..) => return Err(EncodeError::UnsupportedConnective("<->")),
            _ => {}
        }
        let e = self.a.add_element(format!("{f}"));
        let argument_predicates: &[&str] = match f {
            CtlFormula::Not(_) => &[CONN_NOT_1],
            CtlFormula::And(..) => &[CONN_AND_1, CONN_AND_2],
            CtlFormula::Or(..) => &[CONN_OR_1, CONN_OR_2],
            CtlFormula::Temporal(op, _) => {
                self.put(repr_predicate(op.operator()), &[e]);
                body_predicates(op.operator())
            }
            CtlFormula::Until(q, ..) => {
                let op = match q {
                    PathQuantifier::All => CtlOperator::AU,
                    PathQuantifier::Exists => CtlOperator::EU,
                };
                self.put(repr_predicate(op), &[e]);
                body_predicates(op)
            }
            _ => unreachable!("leaves and sugar handled above"),
        };
        for (child, predicate) in f.children().into_iter().zip(argument_predicates) {
            let c = self.visit(child)?;
            self.put(predicate, &[c, e]);
        }
        if f.is_propositional() {
            self.put(REPR_PL, &[e]);
        }
        Ok(e)
    }
}
