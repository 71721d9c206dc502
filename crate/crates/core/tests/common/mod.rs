//! Random programs, states and automata shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zipta::automaton::{Action, Automaton, Edge};
use zipta::{Expr, State, Stmt, VName, Val};

pub const VARS: &[&str] = &["a", "b", "c", "x", "y"];

pub fn var(name: &str) -> VName {
    VName::new(name).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_val(rng: &mut impl Rng) -> Val {
    match rng.gen_range(0..10) {
        0 => Val::Null,
        n => Val::Bool(n % 2 == 0),
    }
}

fn random_expr(rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.75) {
        Expr::Var(var(VARS[rng.gen_range(0..VARS.len())]))
    } else {
        Expr::Val(random_val(rng))
    }
}

/// Random statement of depth at most `depth` (a leaf has depth 0).
pub fn random_stmt(rng: &mut impl Rng, depth: u32) -> Stmt {
    if depth == 0 || rng.gen_bool(0.45) {
        return if rng.gen_bool(0.3) {
            Stmt::Empty
        } else {
            Stmt::assign(var(VARS[rng.gen_range(0..VARS.len())]), random_val(rng))
        };
    }
    match rng.gen_range(0..10) {
        0..=3 => Stmt::seq(random_stmt(rng, depth - 1), random_stmt(rng, depth - 1)),
        4..=6 => Stmt::cond(random_expr(rng), random_stmt(rng, depth - 1), random_stmt(rng, depth - 1)),
        _ => Stmt::while_loop(random_expr(rng), random_stmt(rng, depth - 1)),
    }
}

pub fn random_state(rng: &mut impl Rng) -> State {
    let mut s = State::new();
    for x in VARS {
        if rng.gen_bool(0.7) {
            s = s.update(&var(x), random_val(rng));
        }
    }
    s
}

pub fn depth(c: &Stmt) -> u32 {
    match c {
        Stmt::Empty | Stmt::Assign(..) => 0,
        Stmt::Seq(c1, c2) | Stmt::Cond(_, c1, c2) => 1 + depth(c1).max(depth(c2)),
        Stmt::While(_, c) => 1 + depth(c),
    }
}

/// Deterministic corpus of `n` programs of depth at most 8.
pub fn program_corpus(seed: u64, n: usize) -> Vec<Stmt> {
    let mut rng = rng(seed);
    (0..n).map(|_| random_stmt(&mut rng, 8)).collect()
}

fn random_action(rng: &mut impl Rng) -> Action {
    if rng.gen_bool(0.5) {
        Action::NoAct
    } else {
        Action::AssAct(var(VARS[rng.gen_range(0..3)]), Val::Bool(rng.gen_bool(0.5)))
    }
}

/// Random automaton with at most `max_nodes` nodes and `max_edges` edges.
/// About one in five is irregular: some endpoint or the initial node lies
/// outside the node list.
pub fn random_automaton(rng: &mut impl Rng, max_nodes: u32, max_edges: usize) -> Automaton<u32> {
    let universe = max_nodes + 4;
    let mut nodes: Vec<u32> = (0..universe).filter(|_| rng.gen_bool(0.6)).collect();
    nodes.truncate(max_nodes as usize);
    if nodes.is_empty() {
        nodes.push(rng.gen_range(0..universe));
    }
    let irregular = rng.gen_bool(0.2);
    let pick = |rng: &mut ChaCha8Rng, nodes: &[u32]| {
        if irregular && rng.gen_bool(0.15) {
            rng.gen_range(0..universe)
        } else {
            nodes[rng.gen_range(0..nodes.len())]
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let edge_count = local.gen_range(0..=max_edges);
    let edges = (0..edge_count)
        .map(|_| {
            let source = pick(&mut local, &nodes);
            let action = random_action(&mut local);
            let dest = pick(&mut local, &nodes);
            Edge::new(source, action, dest)
        })
        .collect();
    let init = pick(&mut local, &nodes);
    Automaton { nodes, edges, init }
}

pub fn automaton_corpus(seed: u64, n: usize) -> Vec<Automaton<u32>> {
    let mut rng = rng(seed);
    (0..n).map(|_| random_automaton(&mut rng, 12, 30)).collect()
}

// proptest strategies

pub fn arb_val() -> impl Strategy<Value = Val> {
    prop_oneof![Just(Val::Bool(true)), Just(Val::Bool(false)), Just(Val::Null)]
}

pub fn arb_name() -> impl Strategy<Value = VName> {
    prop::sample::select(VARS).prop_map(var)
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    prop_oneof![3 => arb_name().prop_map(Expr::Var), 1 => arb_val().prop_map(Expr::Val)]
}

pub fn arb_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![Just(Stmt::Empty), (arb_name(), arb_val()).prop_map(|(x, v)| Stmt::assign(x, v))];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Stmt::seq(a, b)),
            (arb_expr(), inner.clone(), inner.clone()).prop_map(|(e, a, b)| Stmt::cond(e, a, b)),
            (arb_expr(), inner).prop_map(|(e, b)| Stmt::while_loop(e, b)),
        ]
    })
}

pub fn arb_state() -> impl Strategy<Value = State> {
    prop::collection::btree_map(arb_name(), arb_val(), 0..VARS.len()).prop_map(|m| m.into_iter().collect())
}

pub fn arb_automaton(max_nodes: u32, max_edges: usize) -> impl Strategy<Value = Automaton<u32>> {
    any::<u64>().prop_map(move |seed| random_automaton(&mut rng(seed), max_nodes, max_edges))
}

pub fn regular_automaton(max_nodes: u32, max_edges: usize) -> impl Strategy<Value = Automaton<u32>> {
    arb_automaton(max_nodes, max_edges).prop_filter("regular", zipta::automaton::regular_ta)
}
