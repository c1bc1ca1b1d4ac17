//! Bounded model search with three-valued pruning of labelings.
//!
//! Frames are enumerated as in the exhaustive search. For each frame the
//! labeling is built one `(world, proposition)` bit at a time. In negation
//! normal form every literal occurs positively, so evaluating with the
//! literals known to hold gives a lower bound on the satisfying worlds and
//! evaluating with the literals that may hold gives an upper bound. A branch
//! is cut as soon as the upper bound excludes world 0 and accepted as soon
//! as the lower bound contains it.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::brute::{advance, is_bfs_numbered, to_structure};
use super::check::{Compiled, Frame, WorldMask};
use super::{BruteForceConfig, BruteForceOutcome};
use crate::ctl::{to_nnf, CtlFormula};

/// `¬p` becomes the atom `~p`, which no proposition name can equal.
fn split_literals(f: &CtlFormula) -> CtlFormula {
    match f {
        CtlFormula::Not(a) => match a.as_ref() {
            CtlFormula::Prop(p) => CtlFormula::prop(format!("~{p}")),
            _ => unreachable!("negation normal form"),
        },
        CtlFormula::And(a, b) => split_literals(a).and(split_literals(b)),
        CtlFormula::Or(a, b) => split_literals(a).or(split_literals(b)),
        CtlFormula::Temporal(op, a) => CtlFormula::temporal(*op, split_literals(a)),
        CtlFormula::Until(q, a, b) => {
            CtlFormula::Until(*q, split_literals(a).into(), split_literals(b).into())
        }
        other => other.clone(),
    }
}

struct Search<'a> {
    frame: Frame<'a, u64>,
    compiled: &'a Compiled,
    props: usize,
    full: u64,
    known: Vec<u64>,
    value: Vec<u64>,
    bounds: Vec<u64>,
    examined: u64,
    budget: u64,
}

enum Step {
    Found,
    Exhausted,
    Refuted,
}

impl Search<'_> {
    /// `(lower, upper)` truth masks of the formula.
    fn bounds(&mut self) -> (u64, u64) {
        let p = self.props;
        for i in 0..p {
            let (k, v) = (self.known[i], self.value[i]);
            self.bounds[i] = k & v;
            self.bounds[p + i] = k & !v & self.full;
        }
        let lower = self.frame.eval(self.compiled, &self.bounds);
        for i in 0..p {
            let (k, v) = (self.known[i], self.value[i]);
            self.bounds[i] = (!k | v) & self.full;
            self.bounds[p + i] = (!k | !v) & self.full;
        }
        let upper = self.frame.eval(self.compiled, &self.bounds);
        (lower, upper)
    }

    /// Decides bit `next` onwards, world-major from world 0.
    fn run(&mut self, next: usize) -> Step {
        if self.examined >= self.budget {
            return Step::Exhausted;
        }
        self.examined += 1;
        let (lower, upper) = self.bounds();
        if lower & 1 == 1 {
            return Step::Found;
        }
        if upper & 1 == 0 {
            return Step::Refuted;
        }
        let (w, i) = (next / self.props, next % self.props);
        self.known[i] |= 1 << w;
        for bit in [0u64, 1] {
            self.value[i] = self.value[i] & !(1 << w) | bit << w;
            match self.run(next + 1) {
                Step::Refuted => {}
                done => return done,
            }
        }
        self.known[i] &= !(1 << w);
        self.value[i] &= !(1 << w);
        Step::Refuted
    }
}

/// Decides whether `f` has a model with at most `config.max_worlds` worlds.
/// The budget counts search nodes; each node costs two evaluations.
///
/// # Panics
///
/// When `max_worlds` is zero or larger than 64.
pub fn pruned_model_search(f: &CtlFormula, config: BruteForceConfig) -> BruteForceOutcome {
    assert!(
        (1..=64).contains(&config.max_worlds),
        "max_worlds must lie in 1..=64"
    );
    let props: Vec<String> = f.propositions().into_iter().collect();
    let p = props.len();
    let index = |name: &str| match name.strip_prefix('~') {
        Some(base) => props.iter().position(|q| q == base).map(|i| p + i),
        None => props.iter().position(|q| q == name),
    };
    let compiled =
        Compiled::new(&split_literals(&to_nnf(f)), &index).expect("every literal of f is indexed");
    let mut examined = 0u64;

    for n in 1..=config.max_worlds {
        let full = u64::full(n);
        let mut succ = vec![1u64; n];
        loop {
            if is_bfs_numbered(&succ) {
                let mut search = Search {
                    frame: Frame { n, succ: &succ },
                    compiled: &compiled,
                    props: p,
                    full,
                    known: vec![0; p],
                    value: vec![0; p],
                    bounds: vec![0; 2 * p],
                    examined,
                    budget: config.budget,
                };
                let step = search.run(0);
                examined = search.examined;
                match step {
                    Step::Found => {
                        let ext: Vec<u64> = search
                            .known
                            .iter()
                            .zip(&search.value)
                            .map(|(k, v)| k & v)
                            .collect();
                        let model = to_structure(&succ, &ext, &props);
                        return BruteForceOutcome::Satisfiable {
                            model,
                            world: 0,
                            examined,
                        };
                    }
                    Step::Exhausted => {
                        return BruteForceOutcome::BudgetExhausted {
                            examined,
                            complete_up_to: n - 1,
                        }
                    }
                    Step::Refuted => {}
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_formula;
    use crate::kripke::{brute_force_sat, model_check};

    #[test]
    fn agrees_with_exhaustive_search() {
        let cases = [
            "EX p & EX ~p",
            "AX p & EX ~p",
            "AG (p -> AX ~p) & p & EF p",
            "A[p U q] & ~q & AX ~p",
            "EG p & AF ~p",
            "E[p U ~p] | AG false",
            "AG (p <-> ~q) & EX (p & q)",
            "AX AX p & AX ~p & EX EX ~p",
        ];
        for s in cases {
            let f = parse_formula(s).unwrap();
            for bound in 1..=3 {
                let exact = brute_force_sat(&f, bound);
                let pruned = pruned_model_search(&f, BruteForceConfig::new(bound));
                assert_eq!(
                    exact.is_satisfiable(),
                    pruned.is_satisfiable(),
                    "{s} at {bound}"
                );
                if let BruteForceOutcome::Satisfiable { model, world, .. } = pruned {
                    assert_eq!(model_check(&model, world, &f), Ok(true), "{s}");
                }
            }
        }
    }

    #[test]
    fn prunes_wide_vocabularies() {
        // 30 propositions: 2^30 labelings of one world, refuted almost at once.
        let names: Vec<String> = (0..30).map(|i| format!("p{i}")).collect();
        let wide = CtlFormula::conj(names.iter().map(|n| CtlFormula::prop(n.as_str())));
        let f = wide.and(CtlFormula::prop("p0").not());
        let out = pruned_model_search(&f, BruteForceConfig::new(1).with_budget(1_000));
        assert!(
            matches!(out, BruteForceOutcome::NoModelUpToBound { .. }),
            "{out:?}"
        );
    }
}
