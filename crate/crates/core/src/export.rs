//! Numbering of automaton nodes and the JSON, DOT and trace output formats.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::ast::{VName, Val};
use crate::automaton::{Action, Automaton, Edge};
use crate::semantics::Trace;
use crate::tauclose::NodeSet;
use crate::zipper::SyntConfig;

/// Node rendering used in legends and DOT labels.
pub trait RenderNode {
    fn render(&self) -> String;
}

impl RenderNode for SyntConfig {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl RenderNode for u64 {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl RenderNode for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl<N: RenderNode> RenderNode for NodeSet<N> {
    fn render(&self) -> String {
        let members: Vec<String> = self.iter().map(RenderNode::render).collect();
        format!("{{{}}}", members.join(","))
    }
}

/// An automaton over integer ids plus the rendering of the node behind each id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberedAutomaton {
    pub automaton: Automaton<u64>,
    pub legend: Vec<String>,
}

struct Numbering<'a, N> {
    ids: HashMap<&'a N, u64>,
    legend: Vec<String>,
}

impl<'a, N: Eq + Hash + RenderNode> Numbering<'a, N> {
    fn id(&mut self, n: &'a N) -> u64 {
        let next = self.legend.len() as u64;
        let legend = &mut self.legend;
        *self.ids.entry(n).or_insert_with(|| {
            legend.push(n.render());
            next
        })
    }
}

/// Ids from node-sequence position. A node listed twice keeps its first id
/// (its later positions still get their own legend entry). Edge endpoints or
/// an initial node missing from the node list get fresh ids past the last
/// position, so irregular automata stay irregular.
pub fn rename_nodes<N: Eq + Hash + RenderNode>(aut: &Automaton<N>) -> NumberedAutomaton {
    let mut numbering = Numbering { ids: HashMap::new(), legend: Vec::with_capacity(aut.nodes.len()) };
    let mut nodes = Vec::with_capacity(aut.nodes.len());
    for n in &aut.nodes {
        let pos = numbering.legend.len() as u64;
        match numbering.ids.get(n) {
            Some(&id) => {
                numbering.legend.push(n.render());
                nodes.push(id);
            }
            None => nodes.push(numbering.id(n)),
        }
        debug_assert_eq!(numbering.legend.len() as u64, pos + 1);
    }
    let edges = aut
        .edges
        .iter()
        .map(|e| Edge::new(numbering.id(&e.source), e.action.clone(), numbering.id(&e.dest)))
        .collect();
    let init = numbering.id(&aut.init);
    NumberedAutomaton { automaton: Automaton { nodes, edges, init }, legend: numbering.legend }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActionDoc {
    None,
    Assign { var: VName, val: Val },
}

impl From<&Action> for ActionDoc {
    fn from(a: &Action) -> Self {
        match a {
            Action::NoAct => ActionDoc::None,
            Action::AssAct(x, v) => ActionDoc::Assign { var: x.clone(), val: *v },
        }
    }
}

impl From<ActionDoc> for Action {
    fn from(a: ActionDoc) -> Self {
        match a {
            ActionDoc::None => Action::NoAct,
            ActionDoc::Assign { var, val } => Action::AssAct(var, val),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: u64,
    pub action: ActionDoc,
    pub dest: u64,
}

/// Interchange form of an automaton over integer ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDoc {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    pub init: u64,
}

impl AutomatonDoc {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("automaton documents always serialize")
    }

    /// The integer automaton described by the document.
    pub fn to_automaton(&self) -> Automaton<u64> {
        Automaton {
            nodes: self.nodes.iter().map(|n| n.id).collect(),
            edges: self.edges.iter().map(|e| Edge::new(e.source, e.action.clone().into(), e.dest)).collect(),
            init: self.init,
        }
    }

    fn with_nodes(aut: &Automaton<u64>, nodes: Vec<NodeDoc>) -> Self {
        AutomatonDoc {
            nodes,
            edges: aut.edges.iter().map(|e| EdgeDoc { source: e.source, action: (&e.action).into(), dest: e.dest }).collect(),
            init: aut.init,
        }
    }

    /// Plain integer automaton: nodes carry only their id.
    pub fn from_ids(aut: &Automaton<u64>) -> Self {
        let nodes = aut.nodes.iter().map(|&id| NodeDoc { id, ..NodeDoc::default() }).collect();
        Self::with_nodes(aut, nodes)
    }

    /// Automaton of a program, numbered by node position.
    pub fn from_program(aut: &Automaton<SyntConfig>) -> Self {
        let numbered = rename_nodes(aut);
        let nodes = aut
            .nodes
            .iter()
            .zip(&numbered.automaton.nodes)
            .map(|(n, &id)| NodeDoc {
                id,
                path: Some(n.loc.path.render()),
                flag: Some(n.before),
                focus: Some(n.loc.focus.to_string()),
                members: None,
            })
            .collect();
        Self::with_nodes(&numbered.automaton, nodes)
    }

    /// Closed automaton, numbered by node position. `base_id` gives the id of
    /// each member in the automaton the closure was computed from.
    pub fn from_closed<N: Eq + Hash + RenderNode>(
        closed: &Automaton<NodeSet<N>>,
        base_id: impl Fn(&N) -> u64,
    ) -> Self {
        let numbered = rename_nodes(closed);
        let nodes = closed
            .nodes
            .iter()
            .zip(&numbered.automaton.nodes)
            .map(|(set, &id)| NodeDoc {
                id,
                members: Some(set.iter().map(&base_id).collect()),
                ..NodeDoc::default()
            })
            .collect();
        Self::with_nodes(&numbered.automaton, nodes)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Node `n<id>` is labelled with `labels[id]`; the initial
/// node is marked by an arrow from an invisible point.
pub fn to_dot(aut: &Automaton<u64>, labels: &[String]) -> String {
    let mut out = String::from("digraph automaton {\n  node [shape=ellipse];\n  __init [shape=point];\n");
    let mut seen = std::collections::HashSet::new();
    for &id in &aut.nodes {
        if seen.insert(id) {
            let label = labels.get(id as usize).cloned().unwrap_or_else(|| id.to_string());
            let _ = writeln!(out, "  n{id} [label=\"{}\"];", dot_escape(&label));
        }
    }
    let _ = writeln!(out, "  __init -> n{};", aut.init);
    for e in &aut.edges {
        let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.source, e.dest, dot_escape(&e.action.to_string()));
    }
    out.push_str("}\n");
    out
}

fn rule_name(step: &crate::semantics::TraceStep) -> &'static str {
    step.rule.map_or("init", |r| r.name())
}

/// One line per configuration:
/// `<n>: <rule> | <arrow><focus> @ <path> | <state>`.
pub fn trace_to_text(trace: &Trace) -> String {
    let mut out = String::new();
    for (n, step) in trace.steps.iter().enumerate() {
        let synt = &step.config.synt;
        let arrow = if synt.before { "↓" } else { "↑" };
        let _ = writeln!(
            out,
            "{n}: {} | {arrow}{} @ {} | {}",
            rule_name(step),
            synt.loc.focus,
            synt.loc.path.render(),
            step.config.state
        );
    }
    out
}

#[derive(Serialize)]
struct TraceEntry<'a> {
    step: usize,
    rule: &'static str,
    path: String,
    flag: bool,
    state: &'a crate::semantics::State,
}

pub fn trace_to_json(trace: &Trace) -> String {
    let entries: Vec<TraceEntry<'_>> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(step, s)| TraceEntry {
            step,
            rule: rule_name(s),
            path: s.config.synt.loc.path.render(),
            flag: s.config.synt.before,
            state: &s.config.state,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("traces always serialize")
}
