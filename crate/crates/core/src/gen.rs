//! Random and exhaustive generation of NNF formulas over `{AX, EX}`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::ctl::{CtlFormula, UnaryOp};

/// Proposition names used by the generators, in order.
pub const PROPOSITIONS: [&str; 3] = ["p", "q", "r"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Upper bound on distinct subformulas.
    pub max_subformulas: usize,
    /// Number of names drawn from [`PROPOSITIONS`].
    pub propositions: usize,
    pub max_depth: usize,
    /// Upper bound on AST nodes of a candidate before filtering.
    pub max_size: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_subformulas: 8,
            propositions: 3,
            max_depth: 3,
            max_size: 10,
        }
    }
}

/// Draws formulas until one meets the subformula and depth bounds.
pub fn random_x_formula<R: Rng + ?Sized>(rng: &mut R, config: &GenConfig) -> CtlFormula {
    assert!((1..=PROPOSITIONS.len()).contains(&config.propositions));
    loop {
        let size = rng.gen_range(1..=config.max_size.max(1));
        let f = sized(rng, size, config.max_depth, config.propositions);
        if f.subformulas().len() <= config.max_subformulas && f.temporal_depth() <= config.max_depth
        {
            return f;
        }
    }
}

fn literal<R: Rng + ?Sized>(rng: &mut R, propositions: usize, allow_negation: bool) -> CtlFormula {
    let roll = rng.gen_range(0..10);
    if roll == 0 {
        return if rng.gen_bool(0.5) {
            CtlFormula::True
        } else {
            CtlFormula::False
        };
    }
    let p = CtlFormula::prop(PROPOSITIONS[rng.gen_range(0..propositions)]);
    if allow_negation && roll >= 6 {
        p.not()
    } else {
        p
    }
}

/// A formula with exactly `size` nodes when the depth budget allows,
/// otherwise a smaller propositional one.
fn sized<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    depth: usize,
    propositions: usize,
) -> CtlFormula {
    match size {
        0 | 1 => literal(rng, propositions, false),
        2 if depth == 0 || rng.gen_bool(0.5) => {
            CtlFormula::prop(PROPOSITIONS[rng.gen_range(0..propositions)]).not()
        }
        _ => {
            let unary = depth > 0 && (size == 2 || rng.gen_bool(0.55));
            if unary {
                let op = if rng.gen_bool(0.5) {
                    UnaryOp::AX
                } else {
                    UnaryOp::EX
                };
                CtlFormula::temporal(op, sized(rng, size - 1, depth - 1, propositions))
            } else {
                let left = rng.gen_range(1..size - 1);
                let a = sized(rng, left, depth, propositions);
                let b = sized(rng, size - 1 - left, depth, propositions);
                if rng.gen_bool(0.5) {
                    a.and(b)
                } else {
                    a.or(b)
                }
            }
        }
    }
}

/// Every NNF formula over `{AX, EX}`, `&`, `|`, the constants and the first
/// `propositions` names with at most `max_size` nodes, smallest first.
pub fn x_formulas_up_to_size(max_size: usize, propositions: usize) -> Vec<CtlFormula> {
    let mut by_size: Vec<Vec<CtlFormula>> = vec![Vec::new(); max_size + 1];
    for size in 1..=max_size {
        let mut here = Vec::new();
        if size == 1 {
            here.push(CtlFormula::True);
            here.push(CtlFormula::False);
            here.extend(
                PROPOSITIONS[..propositions]
                    .iter()
                    .map(|p| CtlFormula::prop(*p)),
            );
        }
        if size == 2 {
            here.extend(
                PROPOSITIONS[..propositions]
                    .iter()
                    .map(|p| CtlFormula::prop(*p).not()),
            );
        }
        if size >= 2 {
            for body in &by_size[size - 1] {
                here.push(body.clone().ax());
                here.push(body.clone().ex());
            }
        }
        for left in 1..size.saturating_sub(1) {
            let right = size - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    here.push(a.clone().and(b.clone()));
                    here.push(a.clone().or(b.clone()));
                }
            }
        }
        by_size[size] = here;
    }
    by_size.into_iter().flatten().collect()
}

/// Display strings, for fixtures and reports.
pub fn render(formulas: &[CtlFormula]) -> Vec<String> {
    formulas.iter().map(|f| alloc::format!("{f}")).collect()
}
