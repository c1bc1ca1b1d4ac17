//! Depth-bounded tree models for NNF formulas over `{AX, EX}`.
//!
//! A tableau: each world saturates its obligations, splitting disjunctions
//! by backtracking, then gives every `EX` body its own child which also
//! receives all `AX` bodies. Worlds at the depth limit loop to themselves,
//! so their `X` bodies must hold in place.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::KripkeStructure;
use crate::ctl::{is_nnf, CtlFormula, CtlOperator, CtlOperatorSet, UnaryOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentError {
    NotNnf,
    /// Operators outside `{AX, EX}`.
    Unsupported(CtlOperatorSet),
}

impl fmt::Display for FragmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentError::NotNnf => f.write_str("formula is not in negation normal form"),
            FragmentError::Unsupported(ops) => {
                write!(f, "operators {ops} are outside the fragment {{AX, EX}}")
            }
        }
    }
}

impl core::error::Error for FragmentError {}

pub(crate) fn check_x_fragment(f: &CtlFormula) -> Result<(), FragmentError> {
    let allowed: CtlOperatorSet = [CtlOperator::AX, CtlOperator::EX].into_iter().collect();
    let ops = f.operator_set();
    if !ops.is_subset(&allowed) {
        let outside = ops.iter().filter(|op| !allowed.contains(*op)).collect();
        return Err(FragmentError::Unsupported(outside));
    }
    if !is_nnf(f) {
        return Err(FragmentError::NotNnf);
    }
    Ok(())
}

/// True iff `f` holds at the root of some tree of depth at most `depth`
/// whose leaves carry self-loops.
pub fn bounded_tree_sat(f: &CtlFormula, depth: usize) -> Result<bool, FragmentError> {
    Ok(bounded_tree_model(f, depth)?.is_some())
}

/// The first tree model found by the tableau, rooted at world 0 and
/// numbered in pre-order, or `None` when no such tree exists.
pub fn bounded_tree_model(
    f: &CtlFormula,
    depth: usize,
) -> Result<Option<KripkeStructure>, FragmentError> {
    check_x_fragment(f)?;
    let Some(root) = solve(World::default(), vec![f], depth) else {
        return Ok(None);
    };
    let mut k = KripkeStructure::new(0);
    for p in f.propositions() {
        k.declare_proposition(p);
    }
    root.emit(&mut k);
    Ok(Some(k))
}

struct Node {
    labels: BTreeSet<String>,
    children: Vec<Node>,
}

impl Node {
    fn emit(&self, k: &mut KripkeStructure) -> usize {
        let w = k.add_world();
        for p in &self.labels {
            k.set_label(w, p.clone());
        }
        if self.children.is_empty() {
            k.add_edge(w, w);
        }
        for c in &self.children {
            let v = c.emit(k);
            k.add_edge(w, v);
        }
        w
    }
}

/// Obligations of one world after saturation.
#[derive(Clone, Default)]
struct World<'a> {
    positive: BTreeSet<&'a str>,
    negative: BTreeSet<&'a str>,
    all_next: Vec<&'a CtlFormula>,
    some_next: Vec<&'a CtlFormula>,
    /// `X` formulas already unfolded in place on a looping leaf.
    unfolded: usize,
}

fn solve<'a>(mut world: World<'a>, mut todo: Vec<&'a CtlFormula>, depth: usize) -> Option<Node> {
    while let Some(f) = todo.pop() {
        match f {
            CtlFormula::True => {}
            CtlFormula::False => return None,
            CtlFormula::Prop(p) => {
                if world.negative.contains(p.as_str()) {
                    return None;
                }
                world.positive.insert(p);
            }
            CtlFormula::Not(a) => {
                let CtlFormula::Prop(p) = a.as_ref() else {
                    unreachable!("input is in NNF")
                };
                if world.positive.contains(p.as_str()) {
                    return None;
                }
                world.negative.insert(p);
            }
            CtlFormula::And(a, b) => {
                todo.push(b);
                todo.push(a);
            }
            CtlFormula::Or(a, b) => {
                let mut left = todo.clone();
                left.push(a);
                if let Some(node) = solve(world.clone(), left, depth) {
                    return Some(node);
                }
                todo.push(b);
            }
            CtlFormula::Temporal(UnaryOp::AX, a) => world.all_next.push(a),
            CtlFormula::Temporal(UnaryOp::EX, a) => world.some_next.push(a),
            _ => unreachable!("input is in the X fragment"),
        }
        if todo.is_empty() && depth == 0 {
            // A looping leaf is its own successor.
            let pending = world.all_next.len() + world.some_next.len();
            if world.unfolded < pending {
                todo.extend(
                    world
                        .all_next
                        .iter()
                        .chain(&world.some_next)
                        .skip(world.unfolded),
                );
                world.unfolded = pending;
            }
        }
    }
    if depth == 0 || (world.all_next.is_empty() && world.some_next.is_empty()) {
        let labels = world.positive.iter().map(|p| String::from(*p)).collect();
        return Some(Node {
            labels,
            children: Vec::new(),
        });
    }
    let mut children = Vec::new();
    if world.some_next.is_empty() {
        children.push(solve(World::default(), world.all_next.clone(), depth - 1)?);
    }
    for body in &world.some_next {
        let mut todo = world.all_next.clone();
        todo.push(body);
        children.push(solve(World::default(), todo, depth - 1)?);
    }
    let labels = world.positive.iter().map(|p| String::from(*p)).collect();
    Some(Node { labels, children })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::{parse_formula, to_nnf};
    use crate::kripke::model_check;

    fn f(s: &str) -> CtlFormula {
        to_nnf(&parse_formula(s).unwrap())
    }

    #[test]
    fn spec_examples() {
        assert_eq!(bounded_tree_sat(&f("AX p & EX ~p"), 1), Ok(false));
        assert_eq!(bounded_tree_sat(&f("EX p & EX ~p"), 1), Ok(true));
        assert_eq!(bounded_tree_sat(&f("p & ~p"), 0), Ok(false));
    }

    #[test]
    fn two_leaf_witness() {
        let g = f("EX p & EX ~p");
        let k = bounded_tree_model(&g, 1).unwrap().unwrap();
        assert_eq!(k.world_count(), 3);
        assert_eq!(k.depth_from(0), 1);
        assert_eq!(model_check(&k, 0, &g), Ok(true));
    }

    #[test]
    fn leaf_loops_force_bodies_in_place() {
        // With no room to branch, EX p & EX ~p is contradictory.
        assert_eq!(bounded_tree_sat(&f("EX p & EX ~p"), 0), Ok(false));
        assert_eq!(bounded_tree_sat(&f("p & AX AX p"), 0), Ok(true));
        assert_eq!(bounded_tree_sat(&f("p & AX ~p"), 0), Ok(false));
    }

    #[test]
    fn disjunction_backtracks_over_children() {
        let g = f("(AX q | EX r) & AX ~q & EX ~r");
        let k = bounded_tree_model(&g, 1).unwrap().unwrap();
        assert_eq!(model_check(&k, 0, &g), Ok(true));
    }

    #[test]
    fn fragment_is_enforced() {
        let g = parse_formula("~AX p").unwrap();
        assert_eq!(bounded_tree_sat(&g, 1), Err(FragmentError::NotNnf));
        let g = parse_formula("AG p").unwrap();
        assert!(matches!(
            bounded_tree_sat(&g, 1),
            Err(FragmentError::Unsupported(_))
        ));
    }
}
