//! Removal of silent transitions.
//!
//! The closure of a node is the set of nodes reachable from it through silent
//! (`NoAct`) edges. It is computed as the least fixpoint of [`tauclose_step`] by
//! plain iteration from the empty set; the iteration is finite because every
//! non-final round adds at least one element of `s :: nodes`.
//!
//! The closed automaton has one node per base node (the closure of that node),
//! keeps only non-silent edges, and lets a closed node take every non-silent
//! edge leaving any of its members.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::automaton::{Action, Automaton, Edge};

/// Canonically ordered set of base nodes.
pub type NodeSet<N> = BTreeSet<N>;

/// Node types usable in closures.
pub trait BaseNode: Clone + Ord + Hash + fmt::Debug {}

impl<T: Clone + Ord + Hash + fmt::Debug> BaseNode for T {}

/// `{s} ∪ x ∪ { n ∈ nodes | some silent edge leads from x to n }`.
///
/// `s` is kept even when it is not a node of `m`.
pub fn tauclose_step<N: BaseNode>(m: &Automaton<N>, s: &N, x: &NodeSet<N>) -> NodeSet<N> {
    let mut out = x.clone();
    out.insert(s.clone());
    for e in &m.edges {
        if e.action.is_silent() && x.contains(&e.source) && m.nodes.contains(&e.dest) {
            out.insert(e.dest.clone());
        }
    }
    out
}

/// The chain `∅, step(∅), step(step(∅)), …` up to and including its fixpoint.
pub fn tauclose_iterates<N: BaseNode>(m: &Automaton<N>, s: &N) -> Vec<NodeSet<N>> {
    let mut chain = vec![NodeSet::new()];
    loop {
        let x = chain.last().expect("chain starts with the empty set");
        let next = tauclose_step(m, s, x);
        if &next == x {
            return chain;
        }
        chain.push(next);
    }
}

/// Iterates [`tauclose_step`] from the empty set until nothing changes.
pub fn tauclose_comp<N: BaseNode>(m: &Automaton<N>, s: &N) -> NodeSet<N> {
    let mut x = NodeSet::new();
    loop {
        let next = tauclose_step(m, s, &x);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Silent closure of `s` in `m`.
pub fn tauclose<N: BaseNode>(m: &Automaton<N>, s: &N) -> NodeSet<N> {
    tauclose_comp(m, s)
}

/// Breadth-first search over silent edges. Shares no code with the fixpoint
/// iteration and serves as its reference.
pub fn tauclose_oracle<N: BaseNode>(m: &Automaton<N>, s: &N) -> NodeSet<N> {
    let node_set: HashSet<&N> = m.nodes.iter().collect();
    let mut silent: HashMap<&N, Vec<&N>> = HashMap::new();
    for e in m.edges.iter().filter(|e| e.action == Action::NoAct) {
        silent.entry(&e.source).or_default().push(&e.dest);
    }

    let mut seen: HashSet<&N> = HashSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in silent.get(u).into_iter().flatten() {
            if node_set.contains(w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().cloned().collect()
}

pub fn tauclose_nodes<N: BaseNode>(m: &Automaton<N>) -> Vec<NodeSet<N>> {
    m.nodes.iter().map(|n| tauclose(m, n)).collect()
}

pub fn tauclose_init_s<N: BaseNode>(m: &Automaton<N>) -> NodeSet<N> {
    tauclose(m, &m.init)
}

pub fn acts_of_ta<N>(m: &Automaton<N>) -> Vec<Action> {
    m.edges.iter().map(|e| e.action.clone()).collect()
}

/// Every `⟨closure(s1), a, closure(s2)⟩` for `s1, s2` among the nodes and `a`
/// among the edge actions, with repetitions. Lazy: the product is large.
pub fn possible_tau_edges<N: BaseNode>(m: &Automaton<N>) -> impl Iterator<Item = Edge<NodeSet<N>>> + '_ {
    let closures: Vec<NodeSet<N>> = tauclose_nodes(m);
    let acts = acts_of_ta(m);
    let n = m.nodes.len();
    (0..n).flat_map(move |i| {
        let closures = closures.clone();
        let acts = acts.clone();
        (0..acts.len()).flat_map(move |k| {
            let closures = closures.clone();
            let a = acts[k].clone();
            (0..n).map(move |j| Edge::new(closures[i].clone(), a.clone(), closures[j].clone()))
        })
    })
}

/// Distinct base nodes and endpoints in canonical order, and `m` relabelled by
/// rank. Ranks preserve the order, so sets and edges over ranks sort exactly
/// like the nodes they stand for.
fn intern<N: BaseNode>(m: &Automaton<N>) -> (Vec<&N>, Automaton<usize>) {
    let distinct: BTreeSet<&N> =
        m.nodes.iter().chain(m.edges.iter().flat_map(|e| [&e.source, &e.dest])).chain([&m.init]).collect();
    let values: Vec<&N> = distinct.into_iter().collect();
    let rank: HashMap<&N, usize> = values.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    (values, m.map_nodes(|n| rank[n]))
}

fn closed_over_ranks(m: &Automaton<usize>) -> Automaton<NodeSet<usize>> {
    let mut table: HashMap<usize, NodeSet<usize>> = HashMap::new();
    for &n in &m.nodes {
        table.entry(n).or_insert_with(|| tauclose(m, &n));
    }
    let mut by_source: HashMap<usize, Vec<&Edge<usize>>> = HashMap::new();
    for e in m.edges.iter().filter(|e| !e.action.is_silent()) {
        by_source.entry(e.source).or_default().push(e);
    }
    let mut edges = BTreeSet::new();
    for n in &m.nodes {
        let source = &table[n];
        for member in source {
            for e in by_source.get(member).into_iter().flatten() {
                if let Some(dest) = table.get(&e.dest) {
                    edges.insert(Edge::new(source.clone(), e.action.clone(), dest.clone()));
                }
            }
        }
    }
    Automaton {
        nodes: m.nodes.iter().map(|n| table[n].clone()).collect(),
        edges: edges.into_iter().collect(),
        init: table.get(&m.init).cloned().unwrap_or_else(|| tauclose(m, &m.init)),
    }
}

/// Non-silent edges of the closed automaton, without duplicates and in
/// canonical order.
pub fn tauclose_edges<N: BaseNode>(m: &Automaton<N>) -> Vec<Edge<NodeSet<N>>> {
    tauclose_ta(m).edges
}

/// The closed automaton. Closures are computed with [`tauclose`] on a copy of
/// `m` whose nodes are replaced by their canonical rank, which keeps node
/// comparisons cheap for large node types.
pub fn tauclose_ta<N: BaseNode>(m: &Automaton<N>) -> Automaton<NodeSet<N>> {
    let (values, ranked) = intern(m);
    closed_over_ranks(&ranked).map_nodes(|set| set.iter().map(|&i| values[i].clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TauViolation<N> {
    /// The second automaton is not the closure of the first.
    NotClosure,
    /// The initial nodes are not related.
    InitNotRelated { init: N, closed_init: NodeSet<N> },
    /// `edge` leaves `pair.0` and neither stutters inside `pair.1` nor is
    /// matched by an edge leaving `pair.1`.
    UnmatchedEdge { pair: (N, NodeSet<N>), edge: Edge<N> },
}

impl<N: fmt::Debug> fmt::Display for TauViolation<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauViolation::NotClosure => f.write_str("second automaton is not the tau-closure of the first"),
            TauViolation::InitNotRelated { init, closed_init } => {
                write!(f, "initial node {init:?} is not related to closed initial node {closed_init:?}")
            }
            TauViolation::UnmatchedEdge { pair, edge } => write!(
                f,
                "edge {:?} --{}--> {:?} from related pair ({:?}, {:?}) has no match",
                edge.source, edge.action, edge.dest, pair.0, pair.1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauReport<N> {
    pub checked_pairs: usize,
    pub result: bool,
    pub first_violation: Option<TauViolation<N>>,
}

impl<N> TauReport<N> {
    fn fail(checked_pairs: usize, violation: TauViolation<N>) -> Self {
        TauReport { checked_pairs, result: false, first_violation: Some(violation) }
    }
}

/// Checks that `closed` simulates `m` up to silent steps, using membership as
/// the relation: `s` is related to `S` when `s` is a node of `m`, `S` a node
/// of `closed`, and `s ∈ S`.
pub fn check_tau_sim_witness<N: BaseNode>(m: &Automaton<N>, closed: &Automaton<NodeSet<N>>) -> TauReport<N> {
    if *closed != tauclose_ta(m) {
        return TauReport::fail(0, TauViolation::NotClosure);
    }

    let base: HashSet<&N> = m.nodes.iter().collect();
    let mut closed_ids: HashMap<&NodeSet<N>, usize> = HashMap::new();
    for set in &closed.nodes {
        let next = closed_ids.len();
        closed_ids.entry(set).or_insert(next);
    }
    let mut sets: Vec<&NodeSet<N>> = vec![&closed.init; closed_ids.len()];
    for (&set, &id) in &closed_ids {
        sets[id] = set;
    }
    let related = |s: &N, id: usize| base.contains(s) && sets[id].contains(s);

    let init_related = closed_ids.get(&closed.init).is_some_and(|&id| related(&m.init, id));
    if !init_related {
        return TauReport::fail(
            0,
            TauViolation::InitNotRelated { init: m.init.clone(), closed_init: closed.init.clone() },
        );
    }

    let mut base_out: HashMap<&N, Vec<&Edge<N>>> = HashMap::new();
    for e in &m.edges {
        base_out.entry(&e.source).or_default().push(e);
    }
    let mut closed_out: Vec<Vec<(&Action, usize)>> = vec![Vec::new(); sets.len()];
    for e in &closed.edges {
        if let (Some(&source), Some(&dest)) = (closed_ids.get(&e.source), closed_ids.get(&e.dest)) {
            closed_out[source].push((&e.action, dest));
        }
    }

    let mut checked_pairs = 0;
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&id| sets[id]);
    for id in order {
        let set = sets[id];
        for s in set.iter().filter(|s| base.contains(s)) {
            checked_pairs += 1;
            for e in base_out.get(s).into_iter().flatten() {
                let stutters = e.action.is_silent() && related(&e.dest, id);
                let answered =
                    || closed_out[id].iter().any(|&(a, dest)| *a == e.action && related(&e.dest, dest));
                if !stutters && !answered() {
                    return TauReport::fail(
                        checked_pairs,
                        TauViolation::UnmatchedEdge { pair: (s.clone(), set.clone()), edge: (*e).clone() },
                    );
                }
            }
        }
    }
    TauReport { checked_pairs, result: true, first_violation: None }
}

/// Does the sequence of actions label a path from the initial node of `m`?
pub fn accepts_action_path<N: Clone + Ord>(m: &Automaton<N>, actions: &[Action]) -> bool {
    let mut current: BTreeSet<&N> = BTreeSet::from([&m.init]);
    for a in actions {
        current = m.edges.iter().filter(|e| &e.action == a && current.contains(&e.source)).map(|e| &e.dest).collect();
        if current.is_empty() {
            return false;
        }
    }
    true
}
