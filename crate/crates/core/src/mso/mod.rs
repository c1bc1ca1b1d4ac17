//! Monadic second-order logic over finite relational structures.
//!
//! Formulas are immutable DAGs: children sit behind [`Arc`] so that large
//! formula families can share subformulas. Element and set variables live
//! in separate namespaces, and set variables only occur in membership
//! atoms, which keeps every formula monadic by construction.

mod eval;
mod theta;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use eval::{evaluate, MsoAssignment, MsoError};
pub use theta::{
    build_theta, build_theta_assign, build_theta_struc, fpt_pipeline, set_variable, PipelineError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MsoFormula {
    True,
    False,
    Atom {
        predicate: String,
        args: Vec<String>,
    },
    Eq(String, String),
    Member {
        set: String,
        element: String,
    },
    Not(Arc<MsoFormula>),
    And(Vec<Arc<MsoFormula>>),
    Or(Vec<Arc<MsoFormula>>),
    Implies(Arc<MsoFormula>, Arc<MsoFormula>),
    Iff(Arc<MsoFormula>, Arc<MsoFormula>),
    Exists(String, Arc<MsoFormula>),
    Forall(String, Arc<MsoFormula>),
    ExistsSet(String, Arc<MsoFormula>),
    ForallSet(String, Arc<MsoFormula>),
}

/// Shared handle to a formula node.
pub type Mso = Arc<MsoFormula>;

/// Constructors returning shared handles.
impl MsoFormula {
    pub fn truth() -> Mso {
        Arc::new(MsoFormula::True)
    }

    pub fn falsity() -> Mso {
        Arc::new(MsoFormula::False)
    }

    pub fn atom(predicate: &str, args: &[&str]) -> Mso {
        Arc::new(MsoFormula::Atom {
            predicate: predicate.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        })
    }

    pub fn eq(x: &str, y: &str) -> Mso {
        Arc::new(MsoFormula::Eq(x.to_string(), y.to_string()))
    }

    pub fn member(set: &str, element: &str) -> Mso {
        Arc::new(MsoFormula::Member {
            set: set.to_string(),
            element: element.to_string(),
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Mso) -> Mso {
        Arc::new(MsoFormula::Not(f))
    }

    /// Conjunction; a single conjunct is returned unchanged.
    pub fn and(mut conjuncts: Vec<Mso>) -> Mso {
        match conjuncts.len() {
            0 => MsoFormula::truth(),
            1 => conjuncts.pop().expect("one conjunct"),
            _ => Arc::new(MsoFormula::And(conjuncts)),
        }
    }

    /// Disjunction; a single disjunct is returned unchanged.
    pub fn or(mut disjuncts: Vec<Mso>) -> Mso {
        match disjuncts.len() {
            0 => MsoFormula::falsity(),
            1 => disjuncts.pop().expect("one disjunct"),
            _ => Arc::new(MsoFormula::Or(disjuncts)),
        }
    }

    pub fn implies(a: Mso, b: Mso) -> Mso {
        Arc::new(MsoFormula::Implies(a, b))
    }

    pub fn iff(a: Mso, b: Mso) -> Mso {
        Arc::new(MsoFormula::Iff(a, b))
    }

    pub fn exists(x: &str, body: Mso) -> Mso {
        Arc::new(MsoFormula::Exists(x.to_string(), body))
    }

    pub fn forall(x: &str, body: Mso) -> Mso {
        Arc::new(MsoFormula::Forall(x.to_string(), body))
    }

    pub fn exists_set(x: &str, body: Mso) -> Mso {
        Arc::new(MsoFormula::ExistsSet(x.to_string(), body))
    }

    pub fn forall_set(x: &str, body: Mso) -> Mso {
        Arc::new(MsoFormula::ForallSet(x.to_string(), body))
    }
}

impl MsoFormula {
    pub fn children(&self) -> Vec<&Mso> {
        match self {
            MsoFormula::True
            | MsoFormula::False
            | MsoFormula::Atom { .. }
            | MsoFormula::Eq(..)
            | MsoFormula::Member { .. } => Vec::new(),
            MsoFormula::Not(a)
            | MsoFormula::Exists(_, a)
            | MsoFormula::Forall(_, a)
            | MsoFormula::ExistsSet(_, a)
            | MsoFormula::ForallSet(_, a) => alloc::vec![a],
            MsoFormula::And(items) | MsoFormula::Or(items) => items.iter().collect(),
            MsoFormula::Implies(a, b) | MsoFormula::Iff(a, b) => alloc::vec![a, b],
        }
    }

    /// Node count of the formula unfolded into a tree.
    pub fn tree_size(self: &Arc<Self>) -> u128 {
        fn go(f: &Mso, memo: &mut BTreeMap<*const MsoFormula, u128>) -> u128 {
            if let Some(&s) = memo.get(&Arc::as_ptr(f)) {
                return s;
            }
            let s = 1 + f.children().into_iter().map(|c| go(c, memo)).sum::<u128>();
            memo.insert(Arc::as_ptr(f), s);
            s
        }
        go(self, &mut BTreeMap::new())
    }

    /// Number of distinct nodes in the shared representation.
    pub fn dag_size(self: &Arc<Self>) -> usize {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(Arc::as_ptr(f)) {
                stack.extend(f.children());
            }
        }
        seen.len()
    }

    /// True when `sub` occurs as a shared node below `self`.
    pub fn contains_node(self: &Arc<Self>, sub: &Mso) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            if Arc::ptr_eq(f, sub) {
                return true;
            }
            if seen.insert(Arc::as_ptr(f)) {
                stack.extend(f.children());
            }
        }
        false
    }

    /// Free element variables and free set variables.
    pub fn free_variables(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut elements = BTreeSet::new();
        let mut sets = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut elements, &mut sets);
        (elements, sets)
    }

    fn collect_free<'a>(
        &'a self,
        bound: &mut Vec<&'a str>,
        bound_sets: &mut Vec<&'a str>,
        elements: &mut BTreeSet<String>,
        sets: &mut BTreeSet<String>,
    ) {
        let mut element = |x: &String, bound: &Vec<&str>| {
            if !bound.contains(&x.as_str()) {
                elements.insert(x.clone());
            }
        };
        match self {
            MsoFormula::Atom { args, .. } => args.iter().for_each(|x| element(x, bound)),
            MsoFormula::Eq(x, y) => {
                element(x, bound);
                element(y, bound);
            }
            MsoFormula::Member { set, element: x } => {
                element(x, bound);
                if !bound_sets.contains(&set.as_str()) {
                    sets.insert(set.clone());
                }
            }
            MsoFormula::Exists(x, body) | MsoFormula::Forall(x, body) => {
                bound.push(x);
                body.collect_free(bound, bound_sets, elements, sets);
                bound.pop();
            }
            MsoFormula::ExistsSet(x, body) | MsoFormula::ForallSet(x, body) => {
                bound_sets.push(x);
                body.collect_free(bound, bound_sets, elements, sets);
                bound_sets.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, bound_sets, elements, sets);
                }
            }
        }
    }
}

/// S-expression form: `(and ...)`, `(exists x ...)`, `(exists-set M ...)`,
/// `(in M x)`, `(= x y)` and `(P x y)` for atoms.
impl fmt::Display for MsoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[&Mso]| {
            write!(f, "({head}")?;
            for item in items {
                write!(f, " {item}")?;
            }
            f.write_str(")")
        };
        match self {
            MsoFormula::True => f.write_str("true"),
            MsoFormula::False => f.write_str("false"),
            MsoFormula::Atom { predicate, args } => {
                write!(f, "({predicate}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            MsoFormula::Eq(x, y) => write!(f, "(= {x} {y})"),
            MsoFormula::Member { set, element } => write!(f, "(in {set} {element})"),
            MsoFormula::Not(a) => write!(f, "(not {a})"),
            MsoFormula::And(items) => list(f, "and", &items.iter().collect::<Vec<_>>()),
            MsoFormula::Or(items) => list(f, "or", &items.iter().collect::<Vec<_>>()),
            MsoFormula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            MsoFormula::Iff(a, b) => write!(f, "(iff {a} {b})"),
            MsoFormula::Exists(x, a) => write!(f, "(exists {x} {a})"),
            MsoFormula::Forall(x, a) => write!(f, "(forall {x} {a})"),
            MsoFormula::ExistsSet(x, a) => write!(f, "(exists-set {x} {a})"),
            MsoFormula::ForallSet(x, a) => write!(f, "(forall-set {x} {a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    type F = MsoFormula;

    #[test]
    fn printing() {
        let f = F::exists_set(
            "X",
            F::forall("x", F::implies(F::atom("P", &["x"]), F::member("X", "x"))),
        );
        assert_eq!(
            format!("{f}"),
            "(exists-set X (forall x (implies (P x) (in X x))))"
        );
        let g = F::and(vec![F::eq("x", "y"), F::not(F::truth())]);
        assert_eq!(format!("{g}"), "(and (= x y) (not true))");
    }

    #[test]
    fn sharing_counts() {
        let leaf = F::atom("P", &["x"]);
        let pair = F::and(vec![leaf.clone(), leaf.clone()]);
        let quad = F::or(vec![pair.clone(), pair.clone()]);
        assert_eq!(quad.tree_size(), 7);
        assert_eq!(quad.dag_size(), 3);
        assert!(quad.contains_node(&leaf));
        assert!(!pair.contains_node(&quad));
    }

    #[test]
    fn free_variables_respect_binders() {
        let f = F::and(vec![
            F::exists("x", F::atom("E", &["x", "y"])),
            F::member("M", "x"),
            F::exists_set("N", F::member("N", "z")),
        ]);
        let (elements, sets) = f.free_variables();
        assert_eq!(elements, ["x", "y", "z"].map(String::from).into());
        assert_eq!(sets, ["M"].map(String::from).into());
    }

    #[test]
    fn unary_and_or_collapse() {
        let a = F::atom("P", &["x"]);
        assert!(Arc::ptr_eq(&F::and(vec![a.clone()]), &a));
        assert_eq!(*F::and(Vec::new()), MsoFormula::True);
        assert_eq!(*F::or(Vec::new()), MsoFormula::False);
    }
}
