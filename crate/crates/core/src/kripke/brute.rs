//! Exhaustive search for small Kripke models.
//!
//! Candidates are enumerated by world count ascending, then lexicographically
//! on the successor masks `(succ[0], succ[1], ...)`, then lexicographically
//! on the proposition extensions in proposition name order. World 0 is the
//! evaluation world. Only relations whose numbering is a breadth-first
//! order from world 0 are visited: every other relation is either partly
//! unreachable (covered with fewer worlds) or isomorphic to a visited one.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::check::{Compiled, Frame, WorldMask};
use super::KripkeStructure;
use crate::ctl::CtlFormula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceConfig {
    pub max_worlds: usize,
    /// Maximum number of labeled structures evaluated before giving up.
    pub budget: u64,
}

impl BruteForceConfig {
    pub const DEFAULT_BUDGET: u64 = 50_000_000;

    pub fn new(max_worlds: usize) -> Self {
        BruteForceConfig {
            max_worlds,
            budget: Self::DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForceOutcome {
    /// `model, world ⊨ f`; the first hit in enumeration order.
    Satisfiable {
        model: KripkeStructure,
        world: usize,
        examined: u64,
    },
    NoModelUpToBound {
        max_worlds: usize,
        examined: u64,
    },
    /// Every structure with at most `complete_up_to` worlds was ruled out
    /// before the budget ran out.
    BudgetExhausted {
        examined: u64,
        complete_up_to: usize,
    },
}

impl BruteForceOutcome {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, BruteForceOutcome::Satisfiable { .. })
    }

    pub fn examined(&self) -> u64 {
        match self {
            BruteForceOutcome::Satisfiable { examined, .. }
            | BruteForceOutcome::NoModelUpToBound { examined, .. }
            | BruteForceOutcome::BudgetExhausted { examined, .. } => *examined,
        }
    }
}

/// [`brute_force_sat_with`] using the default budget.
pub fn brute_force_sat(f: &CtlFormula, max_worlds: usize) -> BruteForceOutcome {
    brute_force_sat_with(f, BruteForceConfig::new(max_worlds))
}

/// Searches every total Kripke structure with at most `max_worlds` worlds
/// over the propositions of `f`.
///
/// # Panics
///
/// When `max_worlds` is zero or larger than 64.
pub fn brute_force_sat_with(f: &CtlFormula, config: BruteForceConfig) -> BruteForceOutcome {
    assert!(
        (1..=64).contains(&config.max_worlds),
        "max_worlds must lie in 1..=64"
    );
    let props: Vec<String> = f.propositions().into_iter().collect();
    let index = |name: &str| props.iter().position(|p| p == name);
    let compiled = Compiled::new(f, &index).expect("every proposition of f is indexed");
    let mut examined = 0u64;

    for n in 1..=config.max_worlds {
        let full: u64 = u64::full(n);
        let mut succ = vec![1u64; n];
        loop {
            if is_bfs_numbered(&succ) {
                let frame = Frame { n, succ: &succ };
                let mut ext = vec![0u64; props.len()];
                loop {
                    if examined >= config.budget {
                        return BruteForceOutcome::BudgetExhausted {
                            examined,
                            complete_up_to: n - 1,
                        };
                    }
                    examined += 1;
                    if frame.eval(&compiled, &ext) & 1 == 1 {
                        let model = to_structure(&succ, &ext, &props);
                        return BruteForceOutcome::Satisfiable {
                            model,
                            world: 0,
                            examined,
                        };
                    }
                    if !advance(&mut ext, 0, full) {
                        break;
                    }
                }
            }
            if !advance(&mut succ, 1, full) {
                break;
            }
        }
    }
    BruteForceOutcome::NoModelUpToBound {
        max_worlds: config.max_worlds,
        examined,
    }
}

/// Odometer step over `digits` in `lo..=hi`, last digit fastest. Returns
/// false after the last combination.
pub(super) fn advance(digits: &mut [u64], lo: u64, hi: u64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < hi {
            *d += 1;
            return true;
        }
        *d = lo;
    }
    false
}

/// True when processing worlds in index order and giving newly discovered
/// successors the next free indices reproduces the numbering. This implies
/// every world is reachable from world 0.
pub(super) fn is_bfs_numbered(succ: &[u64]) -> bool {
    let n = succ.len();
    let mut next = 1;
    for (w, s) in succ.iter().enumerate() {
        if w >= next {
            return false;
        }
        let fresh = s >> next;
        if fresh & (fresh + 1) != 0 {
            return false;
        }
        next += fresh.count_ones() as usize;
    }
    next == n
}

pub(super) fn to_structure(succ: &[u64], ext: &[u64], props: &[String]) -> KripkeStructure {
    let n = succ.len();
    let mut k = KripkeStructure::new(n);
    for p in props {
        k.declare_proposition(p.clone());
    }
    for (w, s) in succ.iter().enumerate() {
        for v in 0..n {
            if s >> v & 1 == 1 {
                k.add_edge(w, v);
            }
        }
    }
    for (p, m) in props.iter().zip(ext) {
        for w in 0..n {
            if m >> w & 1 == 1 {
                k.set_label(w, p.clone());
            }
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_formula;
    use crate::kripke::model_check;

    fn f(s: &str) -> CtlFormula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn finds_two_successor_witness() {
        let g = f("EX p & EX ~p");
        let BruteForceOutcome::Satisfiable { model, world, .. } = brute_force_sat(&g, 3) else {
            panic!("expected a model");
        };
        assert_eq!(model_check(&model, world, &g), Ok(true));
        assert_eq!(model.world_count(), 2);
    }

    #[test]
    fn refutes_forced_contradiction() {
        let out = brute_force_sat(&f("AX p & EX ~p"), 3);
        assert!(matches!(
            out,
            BruteForceOutcome::NoModelUpToBound { max_worlds: 3, .. }
        ));
    }

    #[test]
    fn trivial_formula_on_one_world() {
        let out = brute_force_sat(&CtlFormula::True, 1);
        assert!(out.is_satisfiable());
        assert_eq!(out.examined(), 1);
    }

    #[test]
    fn budget_is_reported_separately() {
        let g = f("AX p & EX ~p");
        let out = brute_force_sat_with(&g, BruteForceConfig::new(3).with_budget(10));
        assert_eq!(
            out,
            BruteForceOutcome::BudgetExhausted {
                examined: 10,
                complete_up_to: 1
            }
        );
    }

    #[test]
    fn needs_three_worlds() {
        // Root p, successor ~p, and a world after that with p again.
        let g = f("p & AX ~p & AX AX p & EX q & EX ~q");
        let BruteForceOutcome::Satisfiable { model, .. } = brute_force_sat(&g, 4) else {
            panic!("expected a model");
        };
        assert!(model.world_count() >= 3);
        assert_eq!(model_check(&model, 0, &g), Ok(true));
    }

    #[test]
    fn odometer_order() {
        let mut d = [1u64, 1];
        let mut seen = vec![d];
        while advance(&mut d, 1, 3) {
            seen.push(d);
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[1], [1, 2]);
        assert_eq!(seen[8], [3, 3]);
    }

    #[test]
    fn breadth_first_filter() {
        assert!(is_bfs_numbered(&[0b10, 0b01]));
        // world 1 unreachable
        assert!(!is_bfs_numbered(&[0b01, 0b01]));
        // 0 -> 2 before 0 -> 1: a renumbering of 0 -> 1 -> 2
        assert!(!is_bfs_numbered(&[0b100, 0b010, 0b010]));
        assert!(is_bfs_numbered(&[0b010, 0b100, 0b100]));
        assert!(is_bfs_numbered(&[0b110, 0b001, 0b100]));
    }
}
