//! Formula generators for the four reductions.

use alloc::vec::Vec;

use super::{PwSatInstance, ReductionVariant};
use crate::ctl::CtlFormula;

/// Auxiliary proposition names.
pub mod names {
    use alloc::format;
    use alloc::string::String;

    /// Level marker `d_i`.
    pub fn depth(i: usize) -> String {
        format!("d_{i}")
    }

    /// Set at the level of a true variable of part `p`.
    pub fn true_step(p: usize) -> String {
        format!("t_up_{p}")
    }

    /// Set at the level of a false variable of part `p`.
    pub fn false_step(p: usize) -> String {
        format!("f_up_{p}")
    }

    /// Holds once at least `j` variables of part `p` are known to be true.
    pub fn true_count(p: usize, j: usize) -> String {
        format!("tr_{p}_{j}")
    }

    /// Holds once at least `j` variables of part `p` are known to be false.
    pub fn false_count(p: usize, j: usize) -> String {
        format!("fl_{p}_{j}")
    }

    /// Parity bit `m_b`.
    pub fn parity(b: usize) -> String {
        format!("m_{b}")
    }

    fn is_number(s: &str) -> bool {
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    }

    fn is_number_pair(s: &str) -> bool {
        s.split_once('_')
            .is_some_and(|(a, b)| is_number(a) && is_number(b))
    }

    /// True when `name` has the shape of an auxiliary proposition.
    pub fn is_reserved(name: &str) -> bool {
        let number_after = |prefix| name.strip_prefix(prefix).is_some_and(is_number);
        let pair_after = |prefix| name.strip_prefix(prefix).is_some_and(is_number_pair);
        number_after("d_")
            || number_after("t_up_")
            || number_after("f_up_")
            || pair_after("tr_")
            || pair_after("fl_")
            || name == "m_0"
            || name == "m_1"
    }
}

fn prop(name: alloc::string::String) -> CtlFormula {
    CtlFormula::prop(name)
}

/// Shared vocabulary of one instance.
struct Builder<'a> {
    inst: &'a PwSatInstance,
    /// `(variable, part)` in level order, levels `1..=n`.
    levels: Vec<(&'a str, usize)>,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a PwSatInstance) -> Self {
        let levels = inst
            .partition()
            .iter()
            .map(|(v, &p)| (v.as_str(), p))
            .collect();
        Builder { inst, levels }
    }

    fn n(&self) -> usize {
        self.levels.len()
    }

    fn parts(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.inst
            .targets()
            .iter()
            .map(|(&p, &tg)| (p, self.inst.part_size(p), tg))
    }

    fn d(&self, i: usize) -> CtlFormula {
        prop(names::depth(i))
    }

    /// `d_i ∧ ¬d_{i+1}`: the world sits at level `i`.
    fn level(&self, i: usize) -> CtlFormula {
        self.d(i).and(self.d(i + 1).not())
    }

    fn tr(&self, p: usize, j: usize) -> CtlFormula {
        prop(names::true_count(p, j))
    }

    fn fl(&self, p: usize, j: usize) -> CtlFormula {
        prop(names::false_count(p, j))
    }

    fn m(&self, b: usize) -> CtlFormula {
        prop(names::parity(b))
    }

    /// `A[body U d_{n+2}]`, the until-form of `AG body`.
    fn until_end(&self, body: CtlFormula) -> CtlFormula {
        body.au(self.d(self.n() + 2))
    }

    /// `∧_i ((q_i ⇒ Op q_i) ∧ (¬q_i ⇒ Op ¬q_i))`.
    fn determined_with(&self, op: impl Fn(CtlFormula) -> CtlFormula) -> CtlFormula {
        CtlFormula::conj(self.levels.iter().map(|&(v, _)| {
            let q = CtlFormula::prop(v);
            q.clone()
                .implies(op(q.clone()))
                .and(q.clone().not().implies(op(q.not())))
        }))
    }

    /// `∧_{i=0..n} (level_i ⇒ AX level_{i+1})`.
    fn depth_ax(&self) -> CtlFormula {
        CtlFormula::conj((0..=self.n()).map(|i| self.level(i).implies(self.level(i + 1).ax())))
    }

    /// `level_i ⇒ ((q_i ⇒ t_up) ∧ (¬q_i ⇒ f_up))` for every level `i ≥ 1`.
    fn set_counter_items(&self) -> Vec<CtlFormula> {
        self.levels
            .iter()
            .enumerate()
            .map(|(idx, &(v, p))| {
                let q = CtlFormula::prop(v);
                self.level(idx + 1).implies(
                    q.clone()
                        .implies(prop(names::true_step(p)))
                        .and(q.not().implies(prop(names::false_step(p)))),
                )
            })
            .collect()
    }

    /// Counter step through the next world.
    fn inc_counter_ax(&self) -> CtlFormula {
        CtlFormula::conj(self.parts().flat_map(|(p, size, _)| {
            (0..=size).map(move |j| {
                let t_up = prop(names::true_step(p));
                let f_up = prop(names::false_step(p));
                t_up.implies(self.tr(p, j).implies(self.tr(p, j + 1).ax()))
                    .and(f_up.implies(self.fl(p, j).implies(self.fl(p, j + 1).ax())))
            })
        }))
    }

    /// Exact counts at level `n+1`, one item per part.
    fn target_items(&self) -> Vec<CtlFormula> {
        let last = self.d(self.n() + 1);
        self.parts()
            .map(|(p, size, tg)| {
                last.clone().implies(CtlFormula::conj([
                    self.tr(p, tg),
                    self.tr(p, tg + 1).not(),
                    self.fl(p, size - tg),
                    self.fl(p, size - tg + 1).not(),
                ]))
            })
            .collect()
    }

    /// `∧_p (tr_p^0 ∧ fl_p^0)`.
    fn counters_start(&self) -> CtlFormula {
        CtlFormula::conj(
            self.parts()
                .map(|(p, _, _)| self.tr(p, 0).and(self.fl(p, 0))),
        )
    }

    fn root_level(&self) -> CtlFormula {
        self.d(0).and(self.d(1).not())
    }

    /// `∧_p ∧_j ((tr^j ⇒ Op tr^j) ∧ (fl^j ⇒ Op fl^j))`.
    fn counters_stay(&self, op: impl Fn(CtlFormula) -> CtlFormula) -> CtlFormula {
        CtlFormula::conj(self.parts().flat_map(|(p, size, _)| {
            let op = &op;
            (0..=size).map(move |j| {
                self.tr(p, j)
                    .implies(op(self.tr(p, j)))
                    .and(self.fl(p, j).implies(op(self.fl(p, j))))
            })
        }))
    }

    /// Depth markers and counters are downward closed.
    fn downward_closed(&self) -> CtlFormula {
        let depth = (1..=self.n()).map(|i| self.d(i).implies(self.d(i - 1)));
        let counters = self.parts().flat_map(|(p, size, _)| {
            (2..=size).map(move |j| {
                self.tr(p, j)
                    .implies(self.tr(p, j - 1))
                    .and(self.fl(p, j).implies(self.fl(p, j - 1)))
            })
        });
        CtlFormula::conj(depth.chain(counters))
    }

    /// Parity bits of level `i`.
    fn parity_of(&self, i: usize) -> CtlFormula {
        self.m(i % 2).and(self.m(1 - i % 2).not())
    }

    fn ax_ag(&self) -> CtlFormula {
        CtlFormula::conj([
            self.inst.formula().clone(),
            self.determined_with(CtlFormula::ax).ag(),
            self.depth_ax().ag(),
            CtlFormula::conj(self.set_counter_items()).ag(),
            self.inc_counter_ax().ag(),
            CtlFormula::conj(self.target_items()).ag(),
            self.root_level().and(self.counters_start().ag()),
            self.counters_stay(CtlFormula::ag).ag(),
            self.downward_closed().ag(),
        ])
    }

    fn ax_eg(&self) -> CtlFormula {
        let invariant = CtlFormula::conj([
            self.determined_with(CtlFormula::ax),
            self.depth_ax(),
            CtlFormula::conj(self.set_counter_items()),
            self.inc_counter_ax(),
            CtlFormula::conj(self.target_items()),
            self.counters_start(),
            self.counters_stay(CtlFormula::ax),
            self.downward_closed(),
        ]);
        let base = self.inst.formula().clone().and(self.root_level());
        base.and(invariant.not().af().not())
    }

    fn ag_only(&self) -> CtlFormula {
        let ef = |f: CtlFormula| f.not().ag().not();
        let depth = CtlFormula::conj((0..=self.n()).map(|i| {
            self.level(i)
                .implies(self.parity_of(i).and(ef(self.level(i + 1))))
        }));
        let inc = CtlFormula::conj(self.parts().flat_map(|(p, size, _)| {
            (0..size).flat_map(move |j| {
                (0..2).map(move |b| {
                    let step = |up: alloc::string::String, have: CtlFormula, next: CtlFormula| {
                        CtlFormula::conj([prop(up), have, self.m(b)])
                            .implies(self.m(1 - b).implies(next.ag()).ag())
                    };
                    step(names::true_step(p), self.tr(p, j), self.tr(p, j + 1)).and(step(
                        names::false_step(p),
                        self.fl(p, j),
                        self.fl(p, j + 1),
                    ))
                })
            })
        }));
        CtlFormula::conj([
            self.inst.formula().clone(),
            self.determined_with(CtlFormula::ag),
            depth.ag(),
            CtlFormula::conj(self.set_counter_items()).ag(),
            inc.ag(),
            CtlFormula::conj(self.target_items()).ag(),
            self.root_level().and(self.counters_start().ag()),
            self.counters_stay(CtlFormula::ag).ag(),
            self.downward_closed().ag(),
        ])
    }

    fn au_only(&self) -> CtlFormula {
        let n = self.n();
        let end = self.d(n + 2);
        let determined = CtlFormula::conj(
            self.levels
                .iter()
                .map(|&(v, _)| CtlFormula::prop(v).implies(self.until_end(CtlFormula::prop(v))))
                .chain(self.levels.iter().map(|&(v, _)| {
                    let nq = CtlFormula::prop(v).not();
                    nq.clone().implies(self.until_end(nq))
                })),
        );
        let depth = CtlFormula::conj((0..=n).map(|i| {
            let reach = end.clone().not().au(CtlFormula::conj([
                self.d(i + 1),
                self.d(i + 2).not(),
                end.clone().not(),
            ]));
            self.until_end(self.level(i).implies(self.parity_of(i).and(reach)))
        }));
        let set_counter = CtlFormula::conj(
            self.set_counter_items()
                .into_iter()
                .map(|f| self.until_end(f)),
        );
        let inc = CtlFormula::conj(self.parts().flat_map(|(p, size, _)| {
            (0..size).flat_map(move |j| {
                (0..2).map(move |b| {
                    let step = |up: alloc::string::String, have: CtlFormula, next: CtlFormula| {
                        CtlFormula::conj([prop(up), have, self.m(b)])
                            .implies(self.m(b).au(self.until_end(next)))
                    };
                    self.until_end(
                        step(names::true_step(p), self.tr(p, j), self.tr(p, j + 1)).and(step(
                            names::false_step(p),
                            self.fl(p, j),
                            self.fl(p, j + 1),
                        )),
                    )
                })
            })
        }));
        let target = CtlFormula::conj(self.target_items().into_iter().map(|f| self.until_end(f)));
        // The root must not already sit at the end level, otherwise every
        // `A[· U d_{n+2}]` holds vacuously there.
        let init = CtlFormula::conj([self.root_level(), end.clone().not()]).and(CtlFormula::conj(
            self.parts().map(|(p, _, _)| {
                CtlFormula::conj([
                    self.tr(p, 1).not(),
                    self.fl(p, 1).not(),
                    self.until_end(self.tr(p, 0).and(self.fl(p, 0))),
                ])
            }),
        ));
        CtlFormula::conj([
            self.inst.formula().clone(),
            determined,
            depth,
            set_counter,
            inc,
            target,
            init,
            self.until_end(self.downward_closed()),
        ])
    }
}

/// The formula `φ_F`: the instance formula conjoined with the variant's
/// level, counter and target constraints.
pub fn reduce(inst: &PwSatInstance, variant: ReductionVariant) -> CtlFormula {
    let b = Builder::new(inst);
    match variant {
        ReductionVariant::AxAg => b.ax_ag(),
        ReductionVariant::AxEg => b.ax_eg(),
        ReductionVariant::AgOnly => b.ag_only(),
        ReductionVariant::AuOnly => b.au_only(),
    }
}
