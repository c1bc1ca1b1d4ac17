//! Fixpoint model checking over world bitmasks.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ctl::{CtlFormula, PathQuantifier, UnaryOp};

/// A set of worlds. Implemented for `u64` (at most 64 worlds) and for
/// [`WideMask`].
pub(crate) trait WorldMask: Clone + PartialEq {
    fn empty(n: usize) -> Self;
    fn insert(&mut self, w: usize);
    fn contains(&self, w: usize) -> bool;
    fn and(&self, other: &Self) -> Self;
    fn or(&self, other: &Self) -> Self;
    fn complement(&self, n: usize) -> Self;
    fn intersects(&self, other: &Self) -> bool;
    fn is_subset(&self, other: &Self) -> bool;

    fn full(n: usize) -> Self {
        Self::empty(n).complement(n)
    }
}

impl WorldMask for u64 {
    fn empty(_: usize) -> Self {
        0
    }
    fn insert(&mut self, w: usize) {
        *self |= 1 << w;
    }
    fn contains(&self, w: usize) -> bool {
        self >> w & 1 == 1
    }
    fn and(&self, other: &Self) -> Self {
        self & other
    }
    fn or(&self, other: &Self) -> Self {
        self | other
    }
    fn complement(&self, n: usize) -> Self {
        let all = if n >= 64 { !0 } else { (1u64 << n) - 1 };
        !self & all
    }
    fn intersects(&self, other: &Self) -> bool {
        self & other != 0
    }
    fn is_subset(&self, other: &Self) -> bool {
        self & !other == 0
    }
}

/// Bitset for structures with more than 64 worlds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct WideMask(Vec<u64>);

impl WorldMask for WideMask {
    fn empty(n: usize) -> Self {
        WideMask(vec![0; n.div_ceil(64).max(1)])
    }
    fn insert(&mut self, w: usize) {
        self.0[w / 64] |= 1 << (w % 64);
    }
    fn contains(&self, w: usize) -> bool {
        self.0[w / 64] >> (w % 64) & 1 == 1
    }
    fn and(&self, other: &Self) -> Self {
        WideMask(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn or(&self, other: &Self) -> Self {
        WideMask(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
    fn complement(&self, n: usize) -> Self {
        let mut words: Vec<u64> = self.0.iter().map(|w| !w).collect();
        let rem = n % 64;
        if rem != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        if n == 0 {
            words.iter_mut().for_each(|w| *w = 0);
        }
        WideMask(words)
    }
    fn intersects(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// A formula with propositions resolved to indices.
#[derive(Clone, Debug)]
pub(crate) enum Compiled {
    True,
    False,
    Prop(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Temporal(UnaryOp, Box<Compiled>),
    Until(PathQuantifier, Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    /// Resolves propositions through `index`; the error carries the first
    /// name `index` does not know.
    pub(crate) fn new(
        f: &CtlFormula,
        index: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<Compiled, String> {
        let bin = |a: &CtlFormula, b: &CtlFormula| -> Result<_, String> {
            Ok((
                Box::new(Compiled::new(a, index)?),
                Box::new(Compiled::new(b, index)?),
            ))
        };
        Ok(match f {
            CtlFormula::True => Compiled::True,
            CtlFormula::False => Compiled::False,
            CtlFormula::Prop(p) => Compiled::Prop(index(p).ok_or_else(|| p.to_string())?),
            CtlFormula::Not(a) => Compiled::Not(Box::new(Compiled::new(a, index)?)),
            CtlFormula::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::And(a, b)
            }
            CtlFormula::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Or(a, b)
            }
            CtlFormula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Implies(a, b)
            }
            CtlFormula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Iff(a, b)
            }
            CtlFormula::Temporal(op, a) => {
                Compiled::Temporal(*op, Box::new(Compiled::new(a, index)?))
            }
            CtlFormula::Until(q, a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Until(*q, a, b)
            }
        })
    }
}

/// A total transition relation given as successor masks.
pub(crate) struct Frame<'a, M> {
    pub n: usize,
    pub succ: &'a [M],
}

impl<M: WorldMask> Frame<'_, M> {
    fn pre_exists(&self, target: &M) -> M {
        let mut out = M::empty(self.n);
        for (w, s) in self.succ.iter().enumerate() {
            if s.intersects(target) {
                out.insert(w);
            }
        }
        out
    }

    fn pre_all(&self, target: &M) -> M {
        let mut out = M::empty(self.n);
        for (w, s) in self.succ.iter().enumerate() {
            if s.is_subset(target) {
                out.insert(w);
            }
        }
        out
    }

    fn least(&self, base: &M, guard: Option<&M>, universal: bool) -> M {
        // μZ. base ∪ (guard ∩ pre(Z))
        let mut z = base.clone();
        loop {
            let pre = if universal {
                self.pre_all(&z)
            } else {
                self.pre_exists(&z)
            };
            let step = match guard {
                Some(g) => g.and(&pre),
                None => pre,
            };
            let next = base.or(&step);
            if next == z {
                return z;
            }
            z = next;
        }
    }

    fn greatest(&self, base: &M, universal: bool) -> M {
        // νZ. base ∩ pre(Z)
        let mut z = base.clone();
        loop {
            let pre = if universal {
                self.pre_all(&z)
            } else {
                self.pre_exists(&z)
            };
            let next = base.and(&pre);
            if next == z {
                return z;
            }
            z = next;
        }
    }

    /// The set of worlds satisfying `f`, given the extension of each
    /// proposition index.
    pub(crate) fn eval(&self, f: &Compiled, props: &[M]) -> M {
        let n = self.n;
        match f {
            Compiled::True => M::full(n),
            Compiled::False => M::empty(n),
            Compiled::Prop(i) => props[*i].clone(),
            Compiled::Not(a) => self.eval(a, props).complement(n),
            Compiled::And(a, b) => self.eval(a, props).and(&self.eval(b, props)),
            Compiled::Or(a, b) => self.eval(a, props).or(&self.eval(b, props)),
            Compiled::Implies(a, b) => self.eval(a, props).complement(n).or(&self.eval(b, props)),
            Compiled::Iff(a, b) => {
                let (a, b) = (self.eval(a, props), self.eval(b, props));
                a.and(&b).or(&a.complement(n).and(&b.complement(n)))
            }
            Compiled::Temporal(op, a) => {
                let a = self.eval(a, props);
                match op {
                    UnaryOp::EX => self.pre_exists(&a),
                    UnaryOp::AX => self.pre_all(&a),
                    UnaryOp::EF => self.least(&a, None, false),
                    UnaryOp::AF => self.least(&a, None, true),
                    UnaryOp::EG => self.greatest(&a, false),
                    UnaryOp::AG => self.greatest(&a, true),
                }
            }
            Compiled::Until(q, a, b) => {
                let (a, b) = (self.eval(a, props), self.eval(b, props));
                self.least(&b, Some(&a), *q == PathQuantifier::All)
            }
        }
    }
}
