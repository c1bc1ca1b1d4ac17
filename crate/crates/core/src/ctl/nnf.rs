use super::{CtlFormula, PathQuantifier};

/// Negation normal form: `->`/`<->` removed and `~` only directly above
/// propositions.
///
/// Negated until formulas use
/// `~A[a U b] == E[~b U (~a & ~b)] | EG ~b` and
/// `~E[a U b] == A[~b U (~a & ~b)] | AG ~b`.
pub fn to_nnf(f: &CtlFormula) -> CtlFormula {
    push(f, false)
}

fn push(f: &CtlFormula, negated: bool) -> CtlFormula {
    use CtlFormula::*;
    match f {
        True if negated => False,
        False if negated => True,
        True | False => f.clone(),
        Prop(_) if negated => f.clone().not(),
        Prop(_) => f.clone(),
        Not(a) => push(a, !negated),
        And(a, b) if negated => push(a, true).or(push(b, true)),
        And(a, b) => push(a, false).and(push(b, false)),
        Or(a, b) if negated => push(a, true).and(push(b, true)),
        Or(a, b) => push(a, false).or(push(b, false)),
        Implies(a, b) if negated => push(a, false).and(push(b, true)),
        Implies(a, b) => push(a, true).or(push(b, false)),
        Iff(a, b) if negated => {
            let left = push(a, false).and(push(b, true));
            let right = push(a, true).and(push(b, false));
            left.or(right)
        }
        Iff(a, b) => {
            let left = push(a, false).and(push(b, false));
            let right = push(a, true).and(push(b, true));
            left.or(right)
        }
        Temporal(op, a) if negated => CtlFormula::temporal(op.dual(), push(a, true)),
        Temporal(op, a) => CtlFormula::temporal(*op, push(a, false)),
        Until(q, a, b) if negated => {
            let not_a = push(a, true);
            let not_b = push(b, true);
            let release = not_a.and(not_b.clone());
            match q {
                PathQuantifier::All => not_b.clone().eu(release).or(not_b.eg()),
                PathQuantifier::Exists => not_b.clone().au(release).or(not_b.ag()),
            }
        }
        Until(q, a, b) => CtlFormula::Until(*q, push(a, false).into(), push(b, false).into()),
    }
}

/// Rewrites `->` and `<->` into `{&, |, ~}` without moving negations.
pub fn eliminate_sugar(f: &CtlFormula) -> CtlFormula {
    use CtlFormula::*;
    match f {
        True | False | Prop(_) => f.clone(),
        Not(a) => eliminate_sugar(a).not(),
        And(a, b) => eliminate_sugar(a).and(eliminate_sugar(b)),
        Or(a, b) => eliminate_sugar(a).or(eliminate_sugar(b)),
        Implies(a, b) => eliminate_sugar(a).not().or(eliminate_sugar(b)),
        Iff(a, b) => {
            let (a, b) = (eliminate_sugar(a), eliminate_sugar(b));
            a.clone().and(b.clone()).or(a.not().and(b.not()))
        }
        Temporal(op, a) => CtlFormula::temporal(*op, eliminate_sugar(a)),
        Until(q, a, b) => Until(*q, eliminate_sugar(a).into(), eliminate_sugar(b).into()),
    }
}

/// True when `f` is in negation normal form.
pub fn is_nnf(f: &CtlFormula) -> bool {
    use CtlFormula::*;
    match f {
        True | False | Prop(_) => true,
        Not(a) => matches!(a.as_ref(), Prop(_)),
        Implies(..) | Iff(..) => false,
        And(a, b) | Or(a, b) | Until(_, a, b) => is_nnf(a) && is_nnf(b),
        Temporal(_, a) => is_nnf(a),
    }
}
