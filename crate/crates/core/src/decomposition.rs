//! Tree and path decompositions, pathwidth and treewidth.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ctl::{eliminate_sugar, CtlFormula};
use crate::graph::Graph;
use crate::structure::{encode, gaifman_graph, EncodeError, RelationalStructure};

/// Default universe size up to which exact pathwidth is attempted.
pub const DEFAULT_ELEMENT_LIMIT: usize = 12;

/// Hard cap for the subset dynamic programs.
const MAX_EXACT_ELEMENTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Bags in sequence; consecutive bags are adjacent.
    Path,
    /// Undirected links between bag indices.
    Tree(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    bags: Vec<BTreeSet<usize>>,
    shape: Shape,
}

impl Decomposition {
    pub fn path(bags: Vec<BTreeSet<usize>>) -> Self {
        Decomposition {
            bags,
            shape: Shape::Path,
        }
    }

    pub fn tree(bags: Vec<BTreeSet<usize>>, links: Vec<(usize, usize)>) -> Self {
        Decomposition {
            bags,
            shape: Shape::Tree(links),
        }
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_path(&self) -> bool {
        self.shape == Shape::Path
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> Result<usize, DecompositionError> {
        self.bags
            .iter()
            .map(BTreeSet::len)
            .max()
            .map(|m| m.saturating_sub(1))
            .ok_or(DecompositionError::Empty)
    }

    /// Links between bags, explicit for both shapes.
    pub fn links(&self) -> Vec<(usize, usize)> {
        match &self.shape {
            Shape::Path => (1..self.bags.len()).map(|i| (i - 1, i)).collect(),
            Shape::Tree(links) => links.clone(),
        }
    }
}

/// `width(d)` as a free function.
pub fn width(d: &Decomposition) -> Result<usize, DecompositionError> {
    d.width()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionError {
    Empty,
    LimitExceeded { elements: usize, limit: usize },
    Encode(EncodeError),
}

impl fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionError::Empty => f.write_str("decomposition has no bags"),
            DecompositionError::LimitExceeded { elements, limit } => write!(
                f,
                "universe has {elements} elements, above the exact limit {limit}; \
                 use the heuristic upper bound instead"
            ),
            DecompositionError::Encode(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DecompositionError {}

impl From<EncodeError> for DecompositionError {
    fn from(e: EncodeError) -> Self {
        DecompositionError::Encode(e)
    }
}

/// The first condition a decomposition violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoBags,
    /// The links do not form a tree on the bags.
    NotATree,
    UnknownElement {
        bag: usize,
        element: usize,
    },
    /// Condition 1: some element is in no bag.
    Uncovered {
        element: usize,
    },
    /// Condition 2: no bag holds the whole tuple.
    TupleSplit {
        predicate: String,
        tuple: Vec<usize>,
    },
    /// Condition 3: the bags holding the element are not connected.
    Disconnected {
        element: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBags => f.write_str("decomposition has no bags"),
            Violation::NotATree => f.write_str("bag links do not form a tree"),
            Violation::UnknownElement { bag, element } => {
                write!(f, "bag {bag} holds element {element} outside the universe")
            }
            Violation::Uncovered { element } => {
                write!(f, "condition 1 (cover): element {element} is in no bag")
            }
            Violation::TupleSplit { predicate, tuple } => {
                write!(
                    f,
                    "condition 2 (tuples): no bag contains {predicate}{tuple:?}"
                )
            }
            Violation::Disconnected { element } => write!(
                f,
                "condition 3 (connectedness): bags containing element {element} are not connected"
            ),
        }
    }
}

/// Checks tree shape, cover, tuple and connectedness conditions against the
/// original tuples of `a`.
pub fn validate_decomposition(a: &RelationalStructure, d: &Decomposition) -> Result<(), Violation> {
    let m = d.bags.len();
    if m == 0 {
        return Err(Violation::NoBags);
    }
    let links = d.links();
    let mut adjacency = vec![Vec::new(); m];
    for &(i, j) in &links {
        if i >= m || j >= m || i == j {
            return Err(Violation::NotATree);
        }
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    if links.len() != m - 1 || component(&adjacency, 0, |_| true).len() != m {
        return Err(Violation::NotATree);
    }
    let n = a.universe_size();
    for (bag, contents) in d.bags.iter().enumerate() {
        if let Some(&element) = contents.iter().find(|&&e| e >= n) {
            return Err(Violation::UnknownElement { bag, element });
        }
    }
    for element in 0..n {
        if !d.bags.iter().any(|b| b.contains(&element)) {
            return Err(Violation::Uncovered { element });
        }
    }
    for (predicate, tuple) in a.tuples() {
        if !d.bags.iter().any(|b| tuple.iter().all(|e| b.contains(e))) {
            return Err(Violation::TupleSplit {
                predicate: predicate.to_string(),
                tuple: tuple.to_vec(),
            });
        }
    }
    for element in 0..n {
        let holding: Vec<usize> = (0..m).filter(|&i| d.bags[i].contains(&element)).collect();
        let reached = component(&adjacency, holding[0], |i| d.bags[i].contains(&element));
        if reached.len() != holding.len() {
            return Err(Violation::Disconnected { element });
        }
    }
    Ok(())
}

fn component(
    adjacency: &[Vec<usize>],
    start: usize,
    keep: impl Fn(usize) -> bool,
) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for &j in &adjacency[i] {
            if keep(j) && seen.insert(j) {
                stack.push(j);
            }
        }
    }
    seen
}

/// Path decomposition of a vertex layout: bag `i` holds the `i`-th vertex
/// and every earlier vertex with a neighbor at position `i` or later. Its
/// width is the vertex separation number of the layout.
pub fn layout_decomposition(g: &Graph, order: &[usize]) -> Decomposition {
    let mut position = vec![0; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let last_neighbor: Vec<usize> = (0..g.vertex_count())
        .map(|v| g.neighbors(v).map(|u| position[u]).max().unwrap_or(0))
        .collect();
    let bags = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut bag: BTreeSet<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&u| last_neighbor[u] >= i)
                .collect();
            bag.insert(v);
            bag
        })
        .collect();
    Decomposition::path(bags)
}

/// Minimum-degree elimination order with fill-in, ties to the lowest index.
pub fn min_degree_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adjacency: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = alive
        .iter()
        .copied()
        .min_by_key(|&v| (adjacency[v].len(), v))
    {
        alive.remove(&v);
        let neighbors: Vec<usize> = adjacency[v].iter().copied().collect();
        for &u in &neighbors {
            adjacency[u].remove(&v);
            for &w in &neighbors {
                if w != u {
                    adjacency[u].insert(w);
                }
            }
        }
        order.push(v);
    }
    order
}

/// Grows the layout one vertex at a time, each time choosing the vertex that
/// keeps the separation set smallest; ties to the lowest index.
fn greedy_separation_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut placed = vec![false; n];
    let mut outside_neighbors: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut active = 0usize;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let cost = |v: usize| {
            let closed = g
                .neighbors(v)
                .filter(|&u| placed[u] && outside_neighbors[u] == 1)
                .count();
            let opens = usize::from(outside_neighbors[v] > 0);
            active + opens - closed
        };
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (cost(v), v))
            .expect("an unplaced vertex remains");
        active = cost(v);
        placed[v] = true;
        for u in g.neighbors(v) {
            outside_neighbors[u] -= 1;
        }
        order.push(v);
    }
    order
}

/// A valid path decomposition and its width; an upper bound on pathwidth.
///
/// Tries the minimum-degree elimination order, its reverse and a greedy
/// separation layout, keeping the first of minimum width.
pub fn pathwidth_upper(a: &RelationalStructure) -> (Decomposition, usize) {
    let g = gaifman_graph(a);
    if g.vertex_count() == 0 {
        return (Decomposition::path(vec![BTreeSet::new()]), 0);
    }
    let elimination = min_degree_order(&g);
    let reversed: Vec<usize> = elimination.iter().rev().copied().collect();
    [elimination, reversed, greedy_separation_order(&g)]
        .iter()
        .map(|order| {
            let d = layout_decomposition(&g, order);
            let w = d.width().expect("layouts of nonempty graphs have bags");
            (d, w)
        })
        .min_by_key(|(_, w)| *w)
        .expect("three candidates")
}

/// Exact pathwidth with a witnessing decomposition, by dynamic programming
/// over layout prefixes.
pub fn pathwidth_exact(
    a: &RelationalStructure,
    element_limit: usize,
) -> Result<(Decomposition, usize), DecompositionError> {
    let g = gaifman_graph(a);
    check_limit(g.vertex_count(), element_limit)?;
    if g.vertex_count() == 0 {
        return Ok((Decomposition::path(vec![BTreeSet::new()]), 0));
    }
    let order = vertex_separation_order(&g);
    let d = layout_decomposition(&g, &order);
    let w = d.width()?;
    Ok((d, w))
}

fn check_limit(elements: usize, limit: usize) -> Result<(), DecompositionError> {
    let limit = limit.min(MAX_EXACT_ELEMENTS);
    if elements > limit {
        return Err(DecompositionError::LimitExceeded { elements, limit });
    }
    Ok(())
}

/// A layout of minimum vertex separation. At most [`MAX_EXACT_ELEMENTS`]
/// vertices.
fn vertex_separation_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let neighbors = g.neighbor_masks();
    let full = (1u64 << n) - 1;
    // Members of `s` with a neighbor outside `s`.
    let boundary = |s: u64| -> u32 {
        let mut count = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if neighbors[v] & !s != 0 {
                count += 1;
            }
        }
        count
    };
    // best[s]: least possible maximum boundary over layouts of `s` as a prefix.
    let mut best = vec![u32::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let here = boundary(s);
        let mut rest = s;
        let mut value = u32::MAX;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            value = value.min(best[(s & !(1 << v)) as usize].max(here));
        }
        best[s as usize] = value;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = best[s as usize];
        let here = boundary(s);
        let v = (0..n as u32)
            .find(|&v| s >> v & 1 == 1 && best[(s & !(1 << v)) as usize].max(here) == target)
            .expect("some vertex attains the optimum");
        order.push(v as usize);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Exact treewidth of the Gaifman graph by dynamic programming over
/// elimination prefixes.
pub fn treewidth_exact(
    a: &RelationalStructure,
    element_limit: usize,
) -> Result<usize, DecompositionError> {
    let g = gaifman_graph(a);
    check_limit(g.vertex_count(), element_limit)?;
    Ok(graph_treewidth(&g))
}

pub(crate) fn graph_treewidth(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let neighbors = g.neighbor_masks();
    let full = (1u64 << n) - 1;
    // Vertices outside `s ∪ {v}` reachable from `v` through `s`.
    let q = |s: u64, v: usize| -> u32 {
        let mut seen = 1u64 << v;
        let mut stack = vec![v];
        let mut out = 0u64;
        while let Some(x) = stack.pop() {
            let mut nb = neighbors[x] & !seen;
            while nb != 0 {
                let u = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << u;
                if s >> u & 1 == 1 {
                    stack.push(u);
                } else {
                    out |= 1 << u;
                }
            }
        }
        out.count_ones()
    };
    let mut best = vec![u32::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        let mut value = u32::MAX;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prefix = s & !(1 << v);
            value = value.min(best[prefix as usize].max(q(prefix, v)));
        }
        best[s as usize] = value;
    }
    best[full as usize] as usize
}

/// Pathwidth of a formula's encoding plus its temporal depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub pathwidth: usize,
    /// False when the universe exceeded the exact limit and `pathwidth` is a
    /// heuristic upper bound.
    pub exact: bool,
    pub temporal_depth: usize,
}

impl Parameter {
    pub fn value(&self) -> usize {
        self.pathwidth + self.temporal_depth
    }
}

/// Measures `f` after rewriting `->` and `<->` into `&`, `|`, `~`.
pub fn parameter(f: &CtlFormula) -> Parameter {
    parameter_with_limit(f, DEFAULT_ELEMENT_LIMIT)
}

pub fn parameter_with_limit(f: &CtlFormula, element_limit: usize) -> Parameter {
    let a = encode(&eliminate_sugar(f)).expect("sugar-free formulas always encode");
    let (pathwidth, exact) = match pathwidth_exact(&a, element_limit) {
        Ok((_, w)) => (w, true),
        Err(_) => (pathwidth_upper(&a).1, false),
    };
    Parameter {
        pathwidth,
        exact,
        temporal_depth: f.temporal_depth(),
    }
}
