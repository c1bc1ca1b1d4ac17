//! Direct evaluation of MSO formulas.
//!
//! The formula DAG is compiled against the structure: predicates become
//! relation bitmasks and variables become environment slots shared by name.
//! Set quantifiers search their variable bit by bit, evaluating the body in
//! three-valued logic on the partial assignment so that a definite answer
//! prunes every completion at once. A set quantifier whose free set
//! variables are fully known is memoized on the values of its free
//! variables. Element quantifiers of the forms `forall x (P(.. x ..) -> ..)`
//! and `exists x (P(.. x ..) & ..)` only visit elements matching the atom.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Mso, MsoFormula};
use crate::structure::RelationalStructure;

/// Largest universe the evaluator accepts; sets are stored as `u64` masks.
pub const MAX_UNIVERSE: usize = 64;

/// Values for the free variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MsoAssignment {
    pub elements: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, BTreeSet<usize>>,
}

impl MsoAssignment {
    pub fn new() -> Self {
        MsoAssignment::default()
    }

    pub fn with_element(mut self, name: &str, element: usize) -> Self {
        self.elements.insert(name.to_string(), element);
        self
    }

    pub fn with_set(mut self, name: &str, set: impl IntoIterator<Item = usize>) -> Self {
        self.sets
            .insert(name.to_string(), set.into_iter().collect());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MsoError {
    UnboundVariable(String),
    UnboundSetVariable(String),
    UnknownPredicate(String),
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    ElementOutOfRange {
        variable: String,
        element: usize,
    },
    UniverseTooLarge {
        elements: usize,
    },
}

impl fmt::Display for MsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsoError::UnboundVariable(x) => write!(f, "element variable {x} is not bound"),
            MsoError::UnboundSetVariable(x) => write!(f, "set variable {x} is not bound"),
            MsoError::UnknownPredicate(p) => write!(f, "predicate {p:?} is not in the vocabulary"),
            MsoError::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "predicate {predicate:?} has arity {expected} but is applied to {found} arguments"
            ),
            MsoError::ElementOutOfRange { variable, element } => {
                write!(
                    f,
                    "variable {variable} is assigned {element}, outside the universe"
                )
            }
            MsoError::UniverseTooLarge { elements } => write!(
                f,
                "universe of {elements} elements exceeds the evaluator limit of {MAX_UNIVERSE}"
            ),
        }
    }
}

impl core::error::Error for MsoError {}

/// Truth of `f` in `a` under `asg`.
pub fn evaluate(a: &RelationalStructure, f: &Mso, asg: &MsoAssignment) -> Result<bool, MsoError> {
    let n = a.universe_size();
    if n > MAX_UNIVERSE {
        return Err(MsoError::UniverseTooLarge { elements: n });
    }
    let mut compiler = Compiler {
        a,
        relations: (0..a.vocabulary().len())
            .map(|i| Relation::new(a, i))
            .collect(),
        nodes: Vec::new(),
        lists: Vec::new(),
        free: Vec::new(),
        ids: BTreeMap::new(),
        element_slots: BTreeMap::new(),
        set_slots: BTreeMap::new(),
    };
    let root = compiler.compile(f)?;

    let full = if n == MAX_UNIVERSE {
        u64::MAX
    } else {
        (1u64 << n) - 1
    };
    let mut elements = vec![usize::MAX; compiler.element_slots.len()];
    let mut sets = vec![(0u64, 0u64); compiler.set_slots.len()];
    let (free_elements, free_sets) = &compiler.free[root];
    for &slot in free_elements {
        let name = slot_name(&compiler.element_slots, slot);
        let &e = asg
            .elements
            .get(name)
            .ok_or_else(|| MsoError::UnboundVariable(name.into()))?;
        if e >= n {
            return Err(MsoError::ElementOutOfRange {
                variable: name.into(),
                element: e,
            });
        }
        elements[slot] = e;
    }
    for &slot in free_sets {
        let name = slot_name(&compiler.set_slots, slot);
        let set = asg
            .sets
            .get(name)
            .ok_or_else(|| MsoError::UnboundSetVariable(name.into()))?;
        if let Some(&e) = set.iter().find(|&&e| e >= n) {
            return Err(MsoError::ElementOutOfRange {
                variable: name.into(),
                element: e,
            });
        }
        sets[slot] = (full, set.iter().fold(0, |m, &e| m | 1 << e));
    }

    let node_count = compiler.nodes.len();
    let mut evaluator = Evaluator {
        full,
        n,
        relations: compiler.relations,
        nodes: compiler.nodes,
        lists: compiler.lists,
        free: compiler.free,
        elements,
        sets,
        memo: vec![BTreeMap::new(); node_count],
    };
    match evaluator.eval(root) {
        Truth::True => Ok(true),
        Truth::False => Ok(false),
        Truth::Unknown => unreachable!("all free variables are fully assigned"),
    }
}

fn slot_name(slots: &BTreeMap<String, usize>, slot: usize) -> &str {
    slots
        .iter()
        .find(|(_, &s)| s == slot)
        .map(|(n, _)| n.as_str())
        .expect("slot has a name")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Truth {
    False,
    True,
    Unknown,
}

impl Truth {
    fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::True => Truth::False,
            Truth::Unknown => Truth::Unknown,
        }
    }

    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// A relation in the forms needed for lookups and guard enumeration.
struct Relation {
    arity: usize,
    unary: u64,
    /// For binary relations: second components per first component, and
    /// first components per second component.
    by_first: Vec<u64>,
    by_second: Vec<u64>,
    tuples: BTreeSet<Vec<usize>>,
}

impl Relation {
    fn new(a: &RelationalStructure, index: usize) -> Relation {
        let n = a.universe_size();
        let tuples = a.relation_at(index).clone();
        let arity = a
            .vocabulary()
            .iter()
            .nth(index)
            .map(|(_, k)| k)
            .expect("index in vocabulary");
        let mut r = Relation {
            arity,
            unary: 0,
            by_first: vec![0; n],
            by_second: vec![0; n],
            tuples,
        };
        for t in &r.tuples {
            match t.as_slice() {
                [x] => r.unary |= 1 << x,
                [x, y] => {
                    r.by_first[*x] |= 1 << y;
                    r.by_second[*y] |= 1 << x;
                }
                _ => {}
            }
        }
        r
    }
}

type Id = usize;

/// An atom that must hold for the quantified variable to matter.
struct Guard {
    relation: usize,
    args: Vec<usize>,
    var: usize,
}

enum Node {
    Const(bool),
    Atom {
        relation: usize,
        args: Vec<usize>,
    },
    Eq(usize, usize),
    Member {
        set: usize,
        element: usize,
    },
    Not(Id),
    /// Children are `lists[start..start + len]`.
    And {
        start: usize,
        len: usize,
    },
    Or {
        start: usize,
        len: usize,
    },
    Implies(Id, Id),
    Iff(Id, Id),
    Element {
        var: usize,
        body: Id,
        universal: bool,
        guard: Option<Guard>,
    },
    Set {
        var: usize,
        body: Id,
        universal: bool,
    },
}

struct Compiler<'a> {
    a: &'a RelationalStructure,
    relations: Vec<Relation>,
    nodes: Vec<Node>,
    lists: Vec<Id>,
    /// Free element slots and free set slots of every node.
    free: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    ids: BTreeMap<*const MsoFormula, Id>,
    element_slots: BTreeMap<String, usize>,
    set_slots: BTreeMap<String, usize>,
}

impl Compiler<'_> {
    fn slot(slots: &mut BTreeMap<String, usize>, name: &str) -> usize {
        let next = slots.len();
        *slots.entry(name.to_string()).or_insert(next)
    }

    fn compile(&mut self, f: &Mso) -> Result<Id, MsoError> {
        if let Some(&id) = self.ids.get(&Arc::as_ptr(f)) {
            return Ok(id);
        }
        let mut free_elements = BTreeSet::new();
        let mut free_sets = BTreeSet::new();
        let node = match f.as_ref() {
            MsoFormula::True => Node::Const(true),
            MsoFormula::False => Node::Const(false),
            MsoFormula::Atom { predicate, args } => {
                let relation = self
                    .a
                    .vocabulary()
                    .index(predicate)
                    .ok_or_else(|| MsoError::UnknownPredicate(predicate.clone()))?;
                let expected = self.relations[relation].arity;
                if expected != args.len() {
                    return Err(MsoError::ArityMismatch {
                        predicate: predicate.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                let args: Vec<usize> = args
                    .iter()
                    .map(|x| Self::slot(&mut self.element_slots, x))
                    .collect();
                free_elements.extend(args.iter().copied());
                Node::Atom { relation, args }
            }
            MsoFormula::Eq(x, y) => {
                let (x, y) = (
                    Self::slot(&mut self.element_slots, x),
                    Self::slot(&mut self.element_slots, y),
                );
                free_elements.extend([x, y]);
                Node::Eq(x, y)
            }
            MsoFormula::Member { set, element } => {
                let set = Self::slot(&mut self.set_slots, set);
                let element = Self::slot(&mut self.element_slots, element);
                free_elements.insert(element);
                free_sets.insert(set);
                Node::Member { set, element }
            }
            MsoFormula::Not(a) => Node::Not(self.child(a, &mut free_elements, &mut free_sets)?),
            MsoFormula::And(items) | MsoFormula::Or(items) => {
                let ids = items
                    .iter()
                    .map(|c| self.child(c, &mut free_elements, &mut free_sets))
                    .collect::<Result<Vec<_>, _>>()?;
                let (start, len) = (self.lists.len(), ids.len());
                self.lists.extend(ids);
                if matches!(f.as_ref(), MsoFormula::And(_)) {
                    Node::And { start, len }
                } else {
                    Node::Or { start, len }
                }
            }
            MsoFormula::Implies(a, b) | MsoFormula::Iff(a, b) => {
                let a = self.child(a, &mut free_elements, &mut free_sets)?;
                let b = self.child(b, &mut free_elements, &mut free_sets)?;
                if matches!(f.as_ref(), MsoFormula::Implies(..)) {
                    Node::Implies(a, b)
                } else {
                    Node::Iff(a, b)
                }
            }
            MsoFormula::Exists(x, body) | MsoFormula::Forall(x, body) => {
                let var = Self::slot(&mut self.element_slots, x);
                let body_id = self.child(body, &mut free_elements, &mut free_sets)?;
                free_elements.remove(&var);
                let universal = matches!(f.as_ref(), MsoFormula::Forall(..));
                let guard = self.guard(body, var, universal);
                Node::Element {
                    var,
                    body: body_id,
                    universal,
                    guard,
                }
            }
            MsoFormula::ExistsSet(x, body) | MsoFormula::ForallSet(x, body) => {
                let var = Self::slot(&mut self.set_slots, x);
                let body_id = self.child(body, &mut free_elements, &mut free_sets)?;
                free_sets.remove(&var);
                let universal = matches!(f.as_ref(), MsoFormula::ForallSet(..));
                Node::Set {
                    var,
                    body: body_id,
                    universal,
                }
            }
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.free.push((free_elements, free_sets));
        self.ids.insert(Arc::as_ptr(f), id);
        Ok(id)
    }

    fn child(
        &mut self,
        f: &Mso,
        free_elements: &mut BTreeSet<usize>,
        free_sets: &mut BTreeSet<usize>,
    ) -> Result<Id, MsoError> {
        let id = self.compile(f)?;
        free_elements.extend(self.free[id].0.iter().copied());
        free_sets.extend(self.free[id].1.iter().copied());
        Ok(id)
    }

    /// The atom restricting `var` in `forall var (atom -> ..)`,
    /// `forall var (atom & .. -> ..)` or `exists var (atom & ..)`.
    fn guard(&self, body: &Mso, var: usize, universal: bool) -> Option<Guard> {
        let restricting = match (universal, body.as_ref()) {
            (true, MsoFormula::Implies(antecedent, _)) => antecedent,
            (false, _) => body,
            _ => return None,
        };
        let candidates: Vec<&Mso> = match restricting.as_ref() {
            MsoFormula::And(items) => items.iter().collect(),
            _ => vec![restricting],
        };
        candidates.into_iter().find_map(|c| {
            let &id = self.ids.get(&Arc::as_ptr(c))?;
            match &self.nodes[id] {
                Node::Atom { relation, args } if args.contains(&var) => Some(Guard {
                    relation: *relation,
                    args: args.clone(),
                    var,
                }),
                _ => None,
            }
        })
    }
}

struct Evaluator {
    full: u64,
    n: usize,
    relations: Vec<Relation>,
    nodes: Vec<Node>,
    lists: Vec<Id>,
    free: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    elements: Vec<usize>,
    /// Per set slot: mask of decided elements and their values.
    sets: Vec<(u64, u64)>,
    memo: Vec<BTreeMap<Vec<u64>, bool>>,
}

impl Evaluator {
    fn eval(&mut self, id: Id) -> Truth {
        match &self.nodes[id] {
            Node::Const(b) => Truth::from_bool(*b),
            Node::Atom { relation, args } => {
                let relation = &self.relations[*relation];
                Truth::from_bool(match *args.as_slice() {
                    [x] => relation.unary >> self.elements[x] & 1 == 1,
                    [x, y] => relation.by_first[self.elements[x]] >> self.elements[y] & 1 == 1,
                    _ => {
                        let values: Vec<usize> = args.iter().map(|&s| self.elements[s]).collect();
                        relation.tuples.contains(&values)
                    }
                })
            }
            Node::Eq(x, y) => Truth::from_bool(self.elements[*x] == self.elements[*y]),
            Node::Member { set, element } => {
                let (known, value) = self.sets[*set];
                let e = self.elements[*element];
                if known >> e & 1 == 0 {
                    Truth::Unknown
                } else {
                    Truth::from_bool(value >> e & 1 == 1)
                }
            }
            &Node::Not(a) => self.eval(a).not(),
            &Node::And { start, len } => self.fold(start, len, Truth::False),
            &Node::Or { start, len } => self.fold(start, len, Truth::True),
            &Node::Implies(a, b) => match self.eval(a) {
                Truth::False => Truth::True,
                Truth::True => self.eval(b),
                Truth::Unknown => match self.eval(b) {
                    Truth::True => Truth::True,
                    _ => Truth::Unknown,
                },
            },
            &Node::Iff(a, b) => match (self.eval(a), self.eval(b)) {
                (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
                (x, y) => Truth::from_bool(x == y),
            },
            &Node::Element {
                var,
                body,
                universal,
                ref guard,
            } => {
                let candidates = match guard {
                    Some(g) => self.guard_candidates(g),
                    None => self.full,
                };
                self.element_quantifier(var, body, universal, candidates)
            }
            &Node::Set {
                var,
                body,
                universal,
            } => self.set_quantifier(id, var, body, universal),
        }
    }

    /// Kleene conjunction (`absorbing == False`) or disjunction.
    fn fold(&mut self, start: usize, len: usize, absorbing: Truth) -> Truth {
        let mut result = absorbing.not();
        for i in start..start + len {
            match self.eval(self.lists[i]) {
                t if t == absorbing => return absorbing,
                Truth::Unknown => result = Truth::Unknown,
                _ => {}
            }
        }
        result
    }

    fn guard_candidates(&self, g: &Guard) -> u64 {
        let relation = &self.relations[g.relation];
        let bound = |slot: usize| (slot != g.var).then(|| self.elements[slot]);
        match g.args.as_slice() {
            [_] => relation.unary,
            &[x, y] => match (bound(x), bound(y)) {
                (None, Some(b)) => relation.by_second[b],
                (Some(b), None) => relation.by_first[b],
                _ => relation.by_first.iter().enumerate().fold(0, |m, (i, row)| {
                    if row >> i & 1 == 1 {
                        m | 1 << i
                    } else {
                        m
                    }
                }),
            },
            args => {
                let position = args
                    .iter()
                    .position(|&s| s == g.var)
                    .expect("guard mentions var");
                relation
                    .tuples
                    .iter()
                    .filter(|t| {
                        args.iter()
                            .zip(t.iter())
                            .all(|(&s, &e)| bound(s).is_none_or(|b| b == e))
                    })
                    .fold(0, |m, t| m | 1 << t[position])
            }
        }
    }

    fn element_quantifier(
        &mut self,
        var: usize,
        body: Id,
        universal: bool,
        candidates: u64,
    ) -> Truth {
        let absorbing = if universal { Truth::False } else { Truth::True };
        let saved = self.elements[var];
        let mut result = absorbing.not();
        let mut rest = candidates;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.elements[var] = e;
            match self.eval(body) {
                t if t == absorbing => {
                    result = absorbing;
                    break;
                }
                Truth::Unknown => result = Truth::Unknown,
                _ => {}
            }
        }
        self.elements[var] = saved;
        result
    }

    fn set_quantifier(&mut self, id: Id, var: usize, body: Id, universal: bool) -> Truth {
        let (free_elements, free_sets) = &self.free[id];
        if free_sets.iter().any(|&s| self.sets[s].0 != self.full) {
            return Truth::Unknown;
        }
        let key: Vec<u64> = free_elements
            .iter()
            .map(|&s| self.elements[s] as u64)
            .chain(free_sets.iter().map(|&s| self.sets[s].1))
            .collect();
        if let Some(&b) = self.memo[id].get(&key) {
            return Truth::from_bool(b);
        }
        let saved = self.sets[var];
        self.sets[var] = (0, 0);
        // A universal quantifier fails exactly when some set falsifies the body.
        let target = if universal { Truth::False } else { Truth::True };
        let found = self.search(var, body, self.n, target);
        self.sets[var] = saved;
        let result = found != universal;
        self.memo[id].insert(key, result);
        Truth::from_bool(result)
    }

    /// Looks for a completion of the set in slot `var` on which `body`
    /// evaluates to `target`, deciding elements from `remaining - 1` down.
    fn search(&mut self, var: usize, body: Id, remaining: usize, target: Truth) -> bool {
        match self.eval(body) {
            Truth::Unknown => {}
            t => return t == target,
        }
        let Some(bit) = remaining.checked_sub(1) else {
            unreachable!("a fully decided set gives a definite value")
        };
        self.sets[var].0 |= 1 << bit;
        for value in [true, false] {
            if value {
                self.sets[var].1 |= 1 << bit;
            } else {
                self.sets[var].1 &= !(1 << bit);
            }
            if self.search(var, body, bit, target) {
                return true;
            }
        }
        self.sets[var].0 &= !(1 << bit);
        false
    }
}
