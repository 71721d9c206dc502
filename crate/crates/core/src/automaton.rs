//! Automata with a background variable state, the translation of programs into
//! automata over syntactic configurations, and executable forms of the
//! simulation results linking the two.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::ast::{Stmt, VName, Val};
use crate::semantics::{run_trace, Rule, State, TraceStatus};
use crate::zipper::{all_locations, next_loc, nodes_of_stmt_locations, StmtLocation, StmtPath, SyntConfig};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// Silent transition (τ).
    NoAct,
    AssAct(VName, Val),
}

impl Action {
    pub fn is_silent(&self) -> bool {
        matches!(self, Action::NoAct)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::NoAct => f.write_str("τ"),
            Action::AssAct(x, v) => write!(f, "{x}:={v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge<N> {
    pub source: N,
    pub action: Action,
    pub dest: N,
}

impl<N> Edge<N> {
    pub fn new(source: N, action: Action, dest: N) -> Self {
        Edge { source, action, dest }
    }
}

/// Nodes and edges are kept as sequences; every predicate treats them as sets.
/// Well-formedness is not enforced here, see [`regular_ta`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton<N> {
    pub nodes: Vec<N>,
    pub edges: Vec<Edge<N>>,
    pub init: N,
}

impl<N> Automaton<N> {
    /// Relabels every node occurrence (nodes, edge endpoints, init) with `f`.
    pub fn map_nodes<M>(&self, mut f: impl FnMut(&N) -> M) -> Automaton<M> {
        Automaton {
            nodes: self.nodes.iter().map(&mut f).collect(),
            edges: self.edges.iter().map(|e| Edge::new(f(&e.source), e.action.clone(), f(&e.dest))).collect(),
            init: f(&self.init),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAState<N> {
    pub node: N,
    pub state: State,
}

pub fn action_effect(a: &Action, s: &State) -> State {
    match a {
        Action::NoAct => s.clone(),
        Action::AssAct(x, v) => s.update(x, *v),
    }
}

/// All successors of `ts`, one per outgoing edge, in edge order.
pub fn aut_step<N: Clone + PartialEq>(aut: &Automaton<N>, ts: &TAState<N>) -> Vec<TAState<N>> {
    aut.edges
        .iter()
        .filter(|e| e.source == ts.node)
        .map(|e| TAState { node: e.dest.clone(), state: action_effect(&e.action, &ts.state) })
        .collect()
}

/// The initial node and both ends of every edge are nodes of the automaton.
pub fn regular_ta<N: Eq + Hash>(aut: &Automaton<N>) -> bool {
    let nodes: HashSet<&N> = aut.nodes.iter().collect();
    nodes.contains(&aut.init) && aut.edges.iter().all(|e| nodes.contains(&e.source) && nodes.contains(&e.dest))
}

/// Every configuration the semantics could move to from `cfg`, whatever the
/// state: both branches of a conditional, both outcomes of a loop test.
pub fn synt_step_image(cfg: &SyntConfig) -> Vec<SyntConfig> {
    let SyntConfig { loc, before } = cfg;
    let sp = &loc.path;
    let at = |focus: Stmt, path: StmtPath, before: bool| SyntConfig::new(StmtLocation::new(focus, path), before);
    if !before {
        return if sp.is_top() { Vec::new() } else { vec![next_loc(&loc.focus, sp)] };
    }
    match &loc.focus {
        Stmt::Empty | Stmt::Assign(..) => vec![at(loc.focus.clone(), sp.clone(), false)],
        Stmt::Seq(c1, c2) => vec![at((**c1).clone(), StmtPath::seq_left(sp.clone(), (**c2).clone()), true)],
        Stmt::Cond(e, c1, c2) => vec![
            at((**c1).clone(), StmtPath::cond_left(e.clone(), sp.clone(), (**c2).clone()), true),
            at((**c2).clone(), StmtPath::cond_right(e.clone(), (**c1).clone(), sp.clone()), true),
        ],
        Stmt::While(e, body) => vec![
            at((**body).clone(), StmtPath::while_body(e.clone(), sp.clone()), true),
            at(loc.focus.clone(), sp.clone(), false),
        ],
    }
}

pub fn action_of_synt_config(cfg: &SyntConfig) -> Action {
    match (&cfg.loc.focus, cfg.before) {
        (Stmt::Assign(x, v), true) => Action::AssAct(x.clone(), *v),
        _ => Action::NoAct,
    }
}

pub fn edge_of_synt_config(cfg: &SyntConfig) -> Vec<Edge<SyntConfig>> {
    let action = action_of_synt_config(cfg);
    synt_step_image(cfg)
        .into_iter()
        .map(|dest| Edge::new(cfg.clone(), action.clone(), dest))
        .collect()
}

pub fn edges_of_nodes(nodes: &[SyntConfig]) -> Vec<Edge<SyntConfig>> {
    nodes.iter().flat_map(edge_of_synt_config).collect()
}

/// Automaton whose nodes are all configurations of `c` and whose edges are all
/// statically possible transitions between them.
pub fn stmt_to_ta(c: &Stmt) -> Automaton<SyntConfig> {
    let nodes = nodes_of_stmt_locations(&all_locations(c, &StmtPath::Top));
    let edges = edges_of_nodes(&nodes);
    Automaton { nodes, edges, init: SyntConfig::new(StmtLocation::top(c.clone()), true) }
}

/// Every syntactic successor of every node is itself a node.
pub fn nodes_closed(aut: &Automaton<SyntConfig>) -> bool {
    let nodes: HashSet<&SyntConfig> = aut.nodes.iter().collect();
    aut.nodes.iter().all(|n| synt_step_image(n).iter().all(|m| nodes.contains(m)))
}

/// Every edge generated from a node is an edge of the automaton.
pub fn edges_closed(aut: &Automaton<SyntConfig>) -> bool {
    let edges: HashSet<&Edge<SyntConfig>> = aut.edges.iter().collect();
    aut.nodes.iter().all(|n| edge_of_synt_config(n).iter().all(|e| edges.contains(e)))
}

pub fn synt_step_image_closed(aut: &Automaton<SyntConfig>) -> bool {
    nodes_closed(aut) && edges_closed(aut)
}

/// Checks that for every location of `c` and either marker, the locations of
/// all syntactic successors are again locations of `c`. Returns the first
/// offending configuration and successor.
#[allow(clippy::result_large_err)]
pub fn check_location_closure(c: &Stmt) -> Result<(), (SyntConfig, SyntConfig)> {
    let locs = all_locations(c, &StmtPath::Top);
    let known: HashSet<&StmtLocation> = locs.iter().collect();
    for loc in &locs {
        for before in [true, false] {
            let cfg = SyntConfig::new(loc.clone(), before);
            if let Some(bad) = synt_step_image(&cfg).into_iter().find(|next| !known.contains(&next.loc)) {
                return Err((cfg, bad));
            }
        }
    }
    Ok(())
}

/// One semantic transition together with the automaton edge that replays it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedStep {
    pub step: usize,
    pub rule: Rule,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub status: TraceStatus,
    pub matched: Vec<MatchedStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {step} ({rule}) from {from} to {to} has no matching automaton edge")]
pub struct SimulationViolation {
    pub step: usize,
    pub rule: Rule,
    pub from: SyntConfig,
    pub to: SyntConfig,
    pub state_before: State,
    pub state_after: State,
}

/// Replays every transition of a bounded run of `c` on `aut`: each semantic
/// step must be matched by an edge between the same configurations whose
/// action has the same effect on the state.
#[allow(clippy::result_large_err)]
pub fn check_simulation_on(
    aut: &Automaton<SyntConfig>,
    c: &Stmt,
    s0: State,
    max_steps: usize,
) -> Result<SimReport, SimulationViolation> {
    let mut by_source: HashMap<&SyntConfig, Vec<usize>> = HashMap::new();
    for (i, e) in aut.edges.iter().enumerate() {
        by_source.entry(&e.source).or_default().push(i);
    }

    let trace = run_trace(c, s0, max_steps);
    let mut matched = Vec::with_capacity(trace.len());
    for (step, (from, rule, to)) in trace.transitions().enumerate() {
        let edge = by_source.get(&from.synt).and_then(|candidates| {
            candidates.iter().copied().find(|&i| {
                let e = &aut.edges[i];
                e.dest == to.synt && action_effect(&e.action, &from.state) == to.state
            })
        });
        match edge {
            Some(edge) => matched.push(MatchedStep { step, rule, edge }),
            None => {
                return Err(SimulationViolation {
                    step,
                    rule,
                    from: from.synt.clone(),
                    to: to.synt.clone(),
                    state_before: from.state.clone(),
                    state_after: to.state.clone(),
                })
            }
        }
    }
    Ok(SimReport { status: trace.status, matched })
}

#[allow(clippy::result_large_err)]
pub fn check_simulation(c: &Stmt, s0: State, max_steps: usize) -> Result<SimReport, SimulationViolation> {
    check_simulation_on(&stmt_to_ta(c), c, s0, max_steps)
}
