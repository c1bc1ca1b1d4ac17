//! Kripke structures, CTL model checking and satisfiability oracles.

mod brute;
mod check;
mod pruned;
mod tree;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ctl::CtlFormula;
use check::{Compiled, Frame, WideMask, WorldMask};

pub use brute::{brute_force_sat, brute_force_sat_with, BruteForceConfig, BruteForceOutcome};
pub use pruned::pruned_model_search;
pub(crate) use tree::check_x_fragment;
pub use tree::{bounded_tree_model, bounded_tree_sat, FragmentError};

/// A finite Kripke structure `(W, R, V)` with worlds `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeStructure {
    successors: Vec<BTreeSet<usize>>,
    labels: Vec<BTreeSet<String>>,
    propositions: BTreeSet<String>,
}

/// First reason a structure is not a valid Kripke structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSuccessor { world: usize },
    UndeclaredProposition { world: usize, proposition: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSuccessor { world } => write!(f, "world {world} has no successor"),
            Violation::UndeclaredProposition { world, proposition } => write!(
                f,
                "world {world} is labeled with undeclared proposition {proposition:?}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelCheckError {
    Invalid(Violation),
    UnknownProposition(String),
    WorldOutOfRange { world: usize, worlds: usize },
}

impl fmt::Display for ModelCheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelCheckError::Invalid(v) => write!(f, "invalid Kripke structure: {v}"),
            ModelCheckError::UnknownProposition(p) => {
                write!(
                    f,
                    "proposition {p:?} is not in the structure's proposition universe"
                )
            }
            ModelCheckError::WorldOutOfRange { world, worlds } => {
                write!(
                    f,
                    "world {world} out of range (structure has {worlds} worlds)"
                )
            }
        }
    }
}

impl core::error::Error for ModelCheckError {}

impl KripkeStructure {
    /// `worlds` worlds, no edges, no labels.
    pub fn new(worlds: usize) -> Self {
        KripkeStructure {
            successors: vec![BTreeSet::new(); worlds],
            labels: vec![BTreeSet::new(); worlds],
            propositions: BTreeSet::new(),
        }
    }

    /// Builds a structure without declaring labeled propositions implicitly,
    /// so that [`KripkeStructure::validate`] can report undeclared ones.
    pub fn from_parts(
        successors: Vec<BTreeSet<usize>>,
        labels: Vec<BTreeSet<String>>,
        propositions: BTreeSet<String>,
    ) -> Self {
        assert_eq!(successors.len(), labels.len(), "one label set per world");
        let n = successors.len();
        assert!(
            successors.iter().flatten().all(|&w| w < n),
            "edge target out of range"
        );
        KripkeStructure {
            successors,
            labels,
            propositions,
        }
    }

    pub fn world_count(&self) -> usize {
        self.successors.len()
    }

    /// Appends a world and returns its index.
    pub fn add_world(&mut self) -> usize {
        self.successors.push(BTreeSet::new());
        self.labels.push(BTreeSet::new());
        self.successors.len() - 1
    }

    /// Panics when either world is out of range.
    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(to < self.world_count(), "edge target {to} out of range");
        self.successors[from].insert(to);
    }

    pub fn remove_edge(&mut self, from: usize, to: usize) {
        self.successors[from].remove(&to);
    }

    pub fn declare_proposition(&mut self, p: impl Into<String>) {
        self.propositions.insert(p.into());
    }

    /// Labels `world` with `p`, declaring `p` if needed.
    pub fn set_label(&mut self, world: usize, p: impl Into<String>) {
        let p = p.into();
        self.propositions.insert(p.clone());
        self.labels[world].insert(p);
    }

    pub fn remove_label(&mut self, world: usize, p: &str) {
        self.labels[world].remove(p);
    }

    pub fn successors(&self, world: usize) -> impl Iterator<Item = usize> + '_ {
        self.successors[world].iter().copied()
    }

    pub fn labels(&self, world: usize) -> &BTreeSet<String> {
        &self.labels[world]
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(BTreeSet::len).sum()
    }

    /// Checks totality of the successor relation, then that every label is
    /// a declared proposition.
    pub fn validate(&self) -> Result<(), Violation> {
        for (world, succ) in self.successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(Violation::NoSuccessor { world });
            }
            if let Some(p) = self.labels[world]
                .iter()
                .find(|p| !self.propositions.contains(*p))
            {
                return Err(Violation::UndeclaredProposition {
                    world,
                    proposition: p.clone(),
                });
            }
        }
        Ok(())
    }

    /// Largest BFS distance from `root` to a reachable world.
    pub fn depth_from(&self, root: usize) -> usize {
        let mut dist = vec![usize::MAX; self.world_count()];
        let mut queue = VecDeque::from([root]);
        dist[root] = 0;
        let mut depth = 0;
        while let Some(w) = queue.pop_front() {
            depth = depth.max(dist[w]);
            for v in self.successors(w) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[w] + 1;
                    queue.push_back(v);
                }
            }
        }
        depth
    }

    /// Worlds satisfying `f`, one flag per world.
    pub fn satisfying_worlds(&self, f: &CtlFormula) -> Result<Vec<bool>, ModelCheckError> {
        self.validate().map_err(ModelCheckError::Invalid)?;
        let props: Vec<&String> = self.propositions.iter().collect();
        let index = |name: &str| props.binary_search_by(|p| p.as_str().cmp(name)).ok();
        let compiled = Compiled::new(f, &index).map_err(ModelCheckError::UnknownProposition)?;
        let n = self.world_count();
        let flags = if n <= 64 {
            let m = self.eval_with::<u64>(&compiled, &props);
            (0..n).map(|w| m.contains(w)).collect()
        } else {
            let m = self.eval_with::<WideMask>(&compiled, &props);
            (0..n).map(|w| m.contains(w)).collect()
        };
        Ok(flags)
    }

    fn eval_with<M: WorldMask>(&self, compiled: &Compiled, props: &[&String]) -> M {
        let n = self.world_count();
        let succ: Vec<M> = self
            .successors
            .iter()
            .map(|s| {
                let mut m = M::empty(n);
                s.iter().for_each(|&w| m.insert(w));
                m
            })
            .collect();
        let extensions: Vec<M> = props
            .iter()
            .map(|p| {
                let mut m = M::empty(n);
                for (w, labels) in self.labels.iter().enumerate() {
                    if labels.contains(p.as_str()) {
                        m.insert(w);
                    }
                }
                m
            })
            .collect();
        Frame { n, succ: &succ }.eval(compiled, &extensions)
    }

    /// Quotient by the coarsest bisimulation that respects labels. Returns
    /// the quotient and the block of every original world.
    pub fn bisimulation_quotient(&self) -> (KripkeStructure, Vec<usize>) {
        let n = self.world_count();
        let mut block: Vec<usize> = {
            let mut ids: BTreeMap<&BTreeSet<String>, usize> = BTreeMap::new();
            self.labels
                .iter()
                .map(|l| {
                    let next = ids.len();
                    *ids.entry(l).or_insert(next)
                })
                .collect()
        };
        loop {
            let mut ids: BTreeMap<(usize, BTreeSet<usize>), usize> = BTreeMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|w| {
                    let succ_blocks = self.successors(w).map(|v| block[v]).collect();
                    let next = ids.len();
                    *ids.entry((block[w], succ_blocks)).or_insert(next)
                })
                .collect();
            let stable = ids.len() == block.iter().collect::<BTreeSet<_>>().len();
            block = refined;
            if stable {
                break;
            }
        }
        let blocks = block.iter().max().map_or(0, |m| m + 1);
        let mut quotient = KripkeStructure::new(blocks);
        quotient.propositions = self.propositions.clone();
        for w in 0..n {
            quotient.labels[block[w]] = self.labels[w].clone();
            for v in self.successors(w) {
                quotient.successors[block[w]].insert(block[v]);
            }
        }
        (quotient, block)
    }
}

/// `K, world ⊨ f`.
pub fn model_check(
    k: &KripkeStructure,
    world: usize,
    f: &CtlFormula,
) -> Result<bool, ModelCheckError> {
    if world >= k.world_count() {
        return Err(ModelCheckError::WorldOutOfRange {
            world,
            worlds: k.world_count(),
        });
    }
    Ok(k.satisfying_worlds(f)?[world])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_formula;

    fn f(s: &str) -> CtlFormula {
        parse_formula(s).unwrap()
    }

    fn single_loop(labels: &[&str]) -> KripkeStructure {
        let mut k = KripkeStructure::new(1);
        k.add_edge(0, 0);
        k.declare_proposition("p");
        for l in labels {
            k.set_label(0, *l);
        }
        k
    }

    #[test]
    fn validation_examples() {
        assert_eq!(single_loop(&[]).validate(), Ok(()));
        let k = KripkeStructure::new(1);
        assert_eq!(k.validate(), Err(Violation::NoSuccessor { world: 0 }));
        let mut k = KripkeStructure::new(2);
        k.add_edge(0, 1);
        k.add_edge(1, 1);
        assert_eq!(k.validate(), Ok(()));

        let k = KripkeStructure::from_parts(
            vec![BTreeSet::from([0])],
            vec![BTreeSet::from([String::from("q")])],
            BTreeSet::new(),
        );
        assert_eq!(
            k.validate(),
            Err(Violation::UndeclaredProposition {
                world: 0,
                proposition: "q".into()
            })
        );
    }

    #[test]
    fn model_check_examples() {
        let k = single_loop(&["p"]);
        assert_eq!(model_check(&k, 0, &f("AG p")), Ok(true));
        assert_eq!(model_check(&k, 0, &f("EX ~p")), Ok(false));

        let mut chain = KripkeStructure::new(2);
        chain.add_edge(0, 1);
        chain.add_edge(1, 1);
        chain.set_label(0, "p");
        chain.set_label(1, "q");
        assert_eq!(model_check(&chain, 0, &f("A[p U q]")), Ok(true));
        assert_eq!(model_check(&chain, 0, &f("AX q & ~q")), Ok(true));
        assert_eq!(model_check(&chain, 0, &f("EG p")), Ok(false));
        assert_eq!(model_check(&chain, 0, &f("AF AG q")), Ok(true));
    }

    #[test]
    fn model_check_errors() {
        let k = single_loop(&[]);
        assert_eq!(
            model_check(&k, 0, &f("AX r")),
            Err(ModelCheckError::UnknownProposition("r".into()))
        );
        assert!(matches!(
            model_check(&k, 3, &f("p")),
            Err(ModelCheckError::WorldOutOfRange { .. })
        ));
        let k = KripkeStructure::new(1);
        assert!(matches!(
            model_check(&k, 0, &f("true")),
            Err(ModelCheckError::Invalid(_))
        ));
    }

    #[test]
    fn wide_structures_agree_with_narrow_ones() {
        // A 70-world cycle with p on world 0 only.
        let mut k = KripkeStructure::new(70);
        for w in 0..70 {
            k.add_edge(w, (w + 1) % 70);
        }
        k.set_label(0, "p");
        let sat = k.satisfying_worlds(&f("AX AX p")).unwrap();
        assert!(sat[68]);
        assert_eq!(sat.iter().filter(|b| **b).count(), 1);
        assert!(k
            .satisfying_worlds(&f("AG AF p"))
            .unwrap()
            .iter()
            .all(|b| *b));
        assert!(!k.satisfying_worlds(&f("EG ~p")).unwrap().iter().any(|b| *b));
    }

    #[test]
    fn quotient_merges_bisimilar_worlds() {
        let mut k = KripkeStructure::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 3)] {
            k.add_edge(a, b);
        }
        for w in 0..4 {
            k.set_label(w, "p");
        }
        let (q, block) = k.bisimulation_quotient();
        assert_eq!(q.world_count(), 1);
        assert_eq!(block, vec![0, 0, 0, 0]);
        assert_eq!(q.validate(), Ok(()));
    }

    #[test]
    fn depth_from_root() {
        let mut k = KripkeStructure::new(3);
        k.add_edge(0, 1);
        k.add_edge(1, 2);
        k.add_edge(2, 2);
        assert_eq!(k.depth_from(0), 2);
        assert_eq!(k.depth_from(2), 0);
    }
}
