mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use proptest::prelude::*;

use common::*;
use zipta::automaton::{
    action_effect, action_of_synt_config, regular_ta, stmt_to_ta, synt_step_image, synt_step_image_closed, Action,
    Automaton, Edge,
};
use zipta::export::{rename_nodes, AutomatonDoc};
use zipta::semantics::{eval, sem_step, Rule};
use zipta::tauclose::{
    possible_tau_edges, tauclose, tauclose_comp, tauclose_edges, tauclose_oracle, tauclose_step, tauclose_ta, NodeSet,
};
use zipta::zipper::{all_locations, next_loc, reconstruct, reconstruct_loc};
use zipta::{parse_program, print_program, SemConfig, State, Stmt, StmtLocation, StmtPath, SyntConfig, Val};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, ..ProptestConfig::default() }
}

/// Rules whose premises hold, each premise tested on its own.
fn applicable_rules(cfg: &SemConfig) -> Vec<Rule> {
    let SyntConfig { loc, before } = &cfg.synt;
    let s = &cfg.state;
    let mut rules = Vec::new();
    if *before && matches!(loc.focus, Stmt::Empty) {
        rules.push(Rule::SEmpty);
    }
    if *before && matches!(loc.focus, Stmt::Assign(..)) {
        rules.push(Rule::SAssign);
    }
    if *before && matches!(loc.focus, Stmt::Seq(..)) {
        rules.push(Rule::SSeq);
    }
    if let (true, Stmt::Cond(e, ..)) = (*before, &loc.focus) {
        if eval(e, s) == Val::Bool(true) {
            rules.push(Rule::SCondT);
        }
        if eval(e, s) == Val::Bool(false) {
            rules.push(Rule::SCondF);
        }
    }
    if let (true, Stmt::While(e, _)) = (*before, &loc.focus) {
        if eval(e, s) == Val::Bool(true) {
            rules.push(Rule::SWhileT);
        }
        if eval(e, s) == Val::Bool(false) {
            rules.push(Rule::SWhileF);
        }
    }
    if !*before && !loc.path.is_top() {
        rules.push(Rule::SFalse);
    }
    rules
}

fn arb_config() -> impl Strategy<Value = (Stmt, SemConfig)> {
    (arb_stmt(), any::<prop::sample::Index>(), any::<bool>(), arb_state()).prop_map(|(c, i, before, s)| {
        let locs = all_locations(&c, &StmtPath::Top);
        let loc = locs[i.index(locs.len())].clone();
        (c, SemConfig::new(SyntConfig::new(loc, before), s))
    })
}

fn arb_subset(universe: Vec<u32>) -> impl Strategy<Value = (NodeSet<u32>, NodeSet<u32>)> {
    let n = universe.len();
    (prop::collection::vec(0..3u8, n)).prop_map(move |marks| {
        let y: NodeSet<u32> = universe.iter().zip(&marks).filter(|(_, &m)| m > 0).map(|(&u, _)| u).collect();
        let x = universe.iter().zip(&marks).filter(|(_, &m)| m > 1).map(|(&u, _)| u).collect();
        (x, y)
    })
}

fn subterm_count_oracle(c: &Stmt) -> usize {
    match c {
        Stmt::Empty | Stmt::Assign(..) => 1,
        Stmt::Seq(a, b) | Stmt::Cond(_, a, b) => 1 + subterm_count_oracle(a) + subterm_count_oracle(b),
        Stmt::While(_, b) => 1 + subterm_count_oracle(b),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn print_parse_round_trip(c in arb_stmt()) {
        let text = print_program(&c);
        prop_assert_eq!(parse_program(&text).unwrap(), c, "{}", text);
    }

    #[test]
    fn subterm_count_by_structure(c in arb_stmt()) {
        prop_assert_eq!(c.subterm_count(), subterm_count_oracle(&c));
    }

    #[test]
    fn locations_reconstruct(c in arb_stmt()) {
        let locs = all_locations(&c, &StmtPath::Top);
        prop_assert_eq!(locs.len(), c.subterm_count());
        let distinct: HashSet<&StmtLocation> = locs.iter().collect();
        prop_assert_eq!(distinct.len(), locs.len());
        for loc in &locs {
            prop_assert_eq!(&reconstruct_loc(loc), &c);
            if !loc.path.is_top() {
                let next = next_loc(&loc.focus, &loc.path);
                prop_assert_eq!(&reconstruct_loc(&next.loc), &reconstruct(loc.focus.clone(), &loc.path));
                prop_assert!(distinct.contains(&next.loc));
            }
        }
    }

    #[test]
    fn step_is_deterministic((_c, cfg) in arb_config()) {
        let rules = applicable_rules(&cfg);
        prop_assert!(rules.len() <= 1);
        prop_assert_eq!(sem_step(&cfg).map(|(_, r)| r), rules.first().copied());
    }

    #[test]
    fn step_preserves_tree_and_locality((c, cfg) in arb_config()) {
        if let Some((next, rule)) = sem_step(&cfg) {
            prop_assert_eq!(reconstruct_loc(&next.synt.loc), c.clone());
            if rule != Rule::SAssign {
                prop_assert_eq!(&next.state, &cfg.state);
            }
            prop_assert!(synt_step_image(&cfg.synt).contains(&next.synt));
            prop_assert_eq!(action_effect(&action_of_synt_config(&cfg.synt), &cfg.state), next.state);
        }
    }

    #[test]
    fn reachable_locations_stay_in_program(c in arb_stmt(), s in arb_state()) {
        let locs: HashSet<StmtLocation> = all_locations(&c, &StmtPath::Top).into_iter().collect();
        let trace = zipta::run_trace(&c, s, 300);
        for step in &trace.steps {
            prop_assert!(locs.contains(&step.config.synt.loc));
        }
    }

    #[test]
    fn automaton_shape(c in arb_stmt()) {
        let aut = stmt_to_ta(&c);
        prop_assert_eq!(aut.nodes.len(), 2 * c.subterm_count());
        prop_assert!(regular_ta(&aut));
        prop_assert!(synt_step_image_closed(&aut));
        let locs: HashSet<StmtLocation> = all_locations(&c, &StmtPath::Top).into_iter().collect();
        let mut out_degree: HashMap<&SyntConfig, usize> = HashMap::new();
        for e in &aut.edges {
            *out_degree.entry(&e.source).or_default() += 1;
        }
        for n in &aut.nodes {
            let image = synt_step_image(n);
            prop_assert!(image.iter().all(|m| locs.contains(&m.loc)));
            if n.before {
                prop_assert!((1..=2).contains(&image.len()));
            } else {
                prop_assert!(out_degree.get(n).copied().unwrap_or(0) <= 1);
            }
        }
    }

    #[test]
    fn closure_agrees_with_oracle(m in arb_automaton(12, 30)) {
        let seeds: BTreeSet<u32> = m.nodes.iter().chain(m.edges.iter().flat_map(|e| [&e.source, &e.dest])).copied().collect();
        for s in &seeds {
            let comp = tauclose_comp(&m, s);
            prop_assert_eq!(&comp, &tauclose(&m, s));
            prop_assert_eq!(&comp, &tauclose_oracle(&m, s));
            prop_assert!(comp.contains(s));
        }
    }

    #[test]
    fn closure_step_is_monotone_and_extensive(
        (m, s, x, y) in arb_automaton(12, 30).prop_flat_map(|m| {
            let universe: Vec<u32> = (0..16).collect();
            (Just(m), 0..16u32, arb_subset(universe))
        }).prop_map(|(m, s, (x, y))| (m, s, x, y))
    ) {
        prop_assert!(x.is_subset(&y));
        let fx = tauclose_step(&m, &s, &x);
        prop_assert!(fx.is_subset(&tauclose_step(&m, &s, &y)));
        prop_assert!(x.is_subset(&fx));
        prop_assert!(fx.contains(&s));
    }

    #[test]
    fn closed_automaton_is_silent_free(m in arb_automaton(12, 30)) {
        let closed = tauclose_ta(&m);
        prop_assert!(closed.edges.iter().all(|e| !e.action.is_silent()));
        prop_assert_eq!(closed.nodes.len(), m.nodes.len());
    }

    #[test]
    fn closed_edges_match_literal_filter(m in arb_automaton(6, 10)) {
        let closure: HashMap<u32, NodeSet<u32>> = m.nodes.iter().map(|n| (*n, tauclose(&m, n))).collect();
        let kept: BTreeSet<Edge<NodeSet<u32>>> = possible_tau_edges(&m)
            .filter(|e| {
                !e.action.is_silent()
                    && m.nodes.iter().any(|s1| {
                        closure[s1] == e.source
                            && m.nodes.iter().any(|s2| {
                                closure[s2] == e.dest
                                    && e.source.iter().any(|s| m.edges.contains(&Edge::new(*s, e.action.clone(), *s2)))
                            })
                    })
            })
            .collect();
        let edges = tauclose_edges(&m);
        let as_set: BTreeSet<Edge<NodeSet<u32>>> = edges.iter().cloned().collect();
        prop_assert_eq!(as_set.len(), edges.len());
        prop_assert_eq!(as_set, kept);
    }

    #[test]
    fn witness_holds_for_regular(m in regular_automaton(12, 30)) {
        let report = zipta::tauclose::check_tau_sim_witness(&m, &tauclose_ta(&m));
        prop_assert!(report.result, "{:?}", report.first_violation);
    }

    #[test]
    fn renaming_is_a_bijection(m in arb_automaton(12, 30)) {
        let m = dedup_nodes(m);
        let numbered = rename_nodes(&m.map_nodes(|&n| n as u64));
        let aut = &numbered.automaton;
        prop_assert_eq!(&aut.nodes, &(0..m.nodes.len() as u64).collect::<Vec<_>>());
        prop_assert_eq!(aut.edges.len(), m.edges.len());
        prop_assert_eq!(regular_ta(aut), regular_ta(&m));
        let back: HashMap<u64, u32> =
            numbered.legend.iter().enumerate().map(|(id, label)| (id as u64, label.parse().unwrap())).collect();
        prop_assert_eq!(aut.map_nodes(|id| back[id]), m);
    }

    #[test]
    fn rename_then_close_matches_close_then_rename(m in arb_automaton(12, 30)) {
        let m = dedup_nodes(m);
        let numbered = rename_nodes(&m.map_nodes(|&n| n as u64));
        let ids: HashMap<u32, u64> =
            numbered.legend.iter().enumerate().map(|(id, label)| (label.parse().unwrap(), id as u64)).collect();
        let first = tauclose_ta(&numbered.automaton);
        let second = tauclose_ta(&m).map_nodes(|set| set.iter().map(|n| ids[n]).collect::<NodeSet<u64>>());
        prop_assert_eq!(&first.nodes, &second.nodes);
        prop_assert_eq!(&first.init, &second.init);
        let a: BTreeSet<_> = first.edges.into_iter().collect();
        let b: BTreeSet<_> = second.edges.into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip(m in arb_automaton(12, 30)) {
        let m = m.map_nodes(|&n| n as u64);
        let doc = AutomatonDoc::from_ids(&m);
        let back = AutomatonDoc::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(back.to_automaton(), m);
    }

    #[test]
    fn program_json_round_trip(c in arb_stmt()) {
        let aut = stmt_to_ta(&c);
        let doc = AutomatonDoc::from_program(&aut);
        let back = AutomatonDoc::from_json(&doc.to_json()).unwrap().to_automaton();
        prop_assert_eq!(back, rename_nodes(&aut).automaton);
    }

    #[test]
    fn observable_actions_are_accepted(c in arb_stmt(), s in arb_state()) {
        let trace = zipta::run_trace(&c, s, 200);
        let actions: Vec<Action> = trace
            .transitions()
            .filter(|(_, r, _)| *r == Rule::SAssign)
            .map(|(from, _, _)| action_of_synt_config(&from.synt))
            .collect();
        let closed = tauclose_ta(&stmt_to_ta(&c));
        prop_assert!(zipta::tauclose::accepts_action_path(&closed, &actions));
    }
}

/// Drops repeated nodes and keeps edges, so that renaming is bijective.
fn dedup_nodes(mut m: Automaton<u32>) -> Automaton<u32> {
    let mut seen = HashSet::new();
    m.nodes.retain(|n| seen.insert(*n));
    m
}

#[test]
fn state_is_unchanged_outside_assignments() {
    let s: State = [(var("x"), Val::Bool(true))].into_iter().collect();
    let c = parse_program("if (x) { skip } else { y := true }").unwrap();
    let trace = zipta::run_trace(&c, s.clone(), 100);
    assert!(trace.steps.iter().all(|step| step.config.state == s));
}
