//! Small-step semantics over zipper configurations.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ast::{Expr, Stmt, VName, Val};
use crate::zipper::{next_loc, StmtLocation, StmtPath, SyntConfig};

/// Variable bindings. An absent key is an unassigned variable, which is
/// different from a variable bound to `null`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct State(BTreeMap<VName, Val>);

impl State {
    pub fn new() -> Self {
        State(BTreeMap::new())
    }

    pub fn get(&self, x: &VName) -> Option<Val> {
        self.0.get(x).copied()
    }

    /// The state with `x` rebound to `v`.
    pub fn update(&self, x: &VName, v: Val) -> State {
        let mut next = self.clone();
        next.0.insert(x.clone(), v);
        next
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VName, &Val)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(VName, Val)> for State {
    fn from_iter<I: IntoIterator<Item = (VName, Val)>>(iter: I) -> Self {
        State(iter.into_iter().collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}={v}")?;
        }
        f.write_str("}")
    }
}

/// Unassigned variables evaluate to `null`.
pub fn eval(e: &Expr, s: &State) -> Val {
    match e {
        Expr::Val(v) => *v,
        Expr::Var(x) => s.get(x).unwrap_or(Val::Null),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemConfig {
    pub synt: SyntConfig,
    pub state: State,
}

impl SemConfig {
    pub fn new(synt: SyntConfig, state: State) -> Self {
        SemConfig { synt, state }
    }

    /// `((Loc c PTop, true), s)`.
    pub fn initial(c: &Stmt, s: State) -> Self {
        SemConfig::new(SyntConfig::new(StmtLocation::top(c.clone()), true), s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    SEmpty,
    SAssign,
    SSeq,
    SCondT,
    SCondF,
    SWhileT,
    SWhileF,
    SFalse,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SEmpty => "SEmpty",
            Rule::SAssign => "SAssign",
            Rule::SSeq => "SSeq",
            Rule::SCondT => "SCondT",
            Rule::SCondF => "SCondF",
            Rule::SWhileT => "SWhileT",
            Rule::SWhileF => "SWhileF",
            Rule::SFalse => "SFalse",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn is_terminal(cfg: &SemConfig) -> bool {
    !cfg.synt.before && cfg.synt.loc.path.is_top()
}

/// One step of the semantics, or `None` when no rule applies (terminal or
/// stuck configurations).
pub fn sem_step(cfg: &SemConfig) -> Option<(SemConfig, Rule)> {
    let SyntConfig { loc, before } = &cfg.synt;
    let s = &cfg.state;
    let sp = &loc.path;
    let to = |focus: Stmt, path: StmtPath, before: bool, state: State| {
        SemConfig::new(SyntConfig::new(StmtLocation::new(focus, path), before), state)
    };

    if !before {
        if sp.is_top() {
            return None;
        }
        return Some((SemConfig::new(next_loc(&loc.focus, sp), s.clone()), Rule::SFalse));
    }

    let step = match &loc.focus {
        Stmt::Empty => (to(Stmt::Empty, sp.clone(), false, s.clone()), Rule::SEmpty),
        Stmt::Assign(x, v) => (to(loc.focus.clone(), sp.clone(), false, s.update(x, *v)), Rule::SAssign),
        Stmt::Seq(c1, c2) => (
            to((**c1).clone(), StmtPath::seq_left(sp.clone(), (**c2).clone()), true, s.clone()),
            Rule::SSeq,
        ),
        Stmt::Cond(e, c1, c2) => match eval(e, s) {
            Val::Bool(true) => (
                to((**c1).clone(), StmtPath::cond_left(e.clone(), sp.clone(), (**c2).clone()), true, s.clone()),
                Rule::SCondT,
            ),
            Val::Bool(false) => (
                to((**c2).clone(), StmtPath::cond_right(e.clone(), (**c1).clone(), sp.clone()), true, s.clone()),
                Rule::SCondF,
            ),
            Val::Null => return None,
        },
        Stmt::While(e, body) => match eval(e, s) {
            Val::Bool(true) => (
                to((**body).clone(), StmtPath::while_body(e.clone(), sp.clone()), true, s.clone()),
                Rule::SWhileT,
            ),
            Val::Bool(false) => (to(loc.focus.clone(), sp.clone(), false, s.clone()), Rule::SWhileF),
            Val::Null => return None,
        },
    };
    Some(step)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Terminated,
    Stuck(String),
    StepLimit,
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStatus::Terminated => f.write_str("terminated"),
            TraceStatus::Stuck(reason) => write!(f, "stuck: {reason}"),
            TraceStatus::StepLimit => f.write_str("step limit reached"),
        }
    }
}

/// A configuration in a run, with the rule that produced it (`None` for the
/// initial configuration).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub config: SemConfig,
    pub rule: Option<Rule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub status: TraceStatus,
}

impl Trace {
    /// Number of transitions taken.
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> &SemConfig {
        &self.steps.last().expect("a trace holds its initial configuration").config
    }

    /// Consecutive `(from, rule, to)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (&SemConfig, Rule, &SemConfig)> {
        self.steps
            .windows(2)
            .map(|w| (&w[0].config, w[1].rule.expect("non-initial steps carry a rule"), &w[1].config))
    }
}

fn stuck_reason(cfg: &SemConfig) -> String {
    match &cfg.synt.loc.focus {
        Stmt::Cond(e, ..) => format!("condition `{e}` of `if` evaluates to {}", eval(e, &cfg.state)),
        Stmt::While(e, _) => format!("condition `{e}` of `while` evaluates to {}", eval(e, &cfg.state)),
        other => format!("no rule applies to `{other}`"),
    }
}

/// Runs `c` from `s0` for at most `max_steps` transitions.
pub fn run_trace(c: &Stmt, s0: State, max_steps: usize) -> Trace {
    let mut steps = vec![TraceStep { config: SemConfig::initial(c, s0), rule: None }];
    let status = loop {
        let cur = &steps.last().expect("initial configuration").config;
        if is_terminal(cur) {
            break TraceStatus::Terminated;
        }
        if steps.len() > max_steps {
            break TraceStatus::StepLimit;
        }
        match sem_step(cur) {
            Some((config, rule)) => steps.push(TraceStep { config, rule: Some(rule) }),
            None => break TraceStatus::Stuck(stuck_reason(cur)),
        }
    };
    Trace { steps, status }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_program;
    use crate::zipper::reconstruct_loc;

    fn v(s: &str) -> VName {
        VName::new(s).unwrap()
    }

    fn cfg(focus: Stmt, path: StmtPath, before: bool, state: State) -> SemConfig {
        SemConfig::new(SyntConfig::new(StmtLocation::new(focus, path), before), state)
    }

    #[test]
    fn eval_examples() {
        let s: State = [(v("x"), Val::Bool(false))].into_iter().collect();
        assert_eq!(eval(&Expr::Val(Val::Bool(true)), &s), Val::Bool(true));
        assert_eq!(eval(&Expr::Var(v("x")), &s), Val::Bool(false));
        assert_eq!(eval(&Expr::Var(v("y")), &State::new()), Val::Null);
    }

    #[test]
    fn unassigned_differs_from_null_binding() {
        let s = State::new().update(&v("x"), Val::Null);
        assert_eq!(s.get(&v("x")), Some(Val::Null));
        assert_eq!(s.get(&v("y")), None);
        assert_ne!(s, State::new());
    }

    #[test]
    fn step_examples() {
        let assign = Stmt::assign(v("x"), Val::Bool(true));
        let (next, rule) = sem_step(&cfg(assign.clone(), StmtPath::Top, true, State::new())).unwrap();
        assert_eq!(rule, Rule::SAssign);
        assert_eq!(next, cfg(assign, StmtPath::Top, false, State::new().update(&v("x"), Val::Bool(true))));

        let c1 = Stmt::Empty;
        let c2 = Stmt::assign(v("y"), Val::Null);
        let sp = StmtPath::while_body(Expr::Var(v("e")), StmtPath::Top);
        let s = State::new().update(&v("q"), Val::Bool(true));
        let (next, rule) = sem_step(&cfg(Stmt::seq(c1.clone(), c2.clone()), sp.clone(), true, s.clone())).unwrap();
        assert_eq!(rule, Rule::SSeq);
        assert_eq!(next, cfg(c1, StmtPath::seq_left(sp, c2), true, s.clone()));

        assert_eq!(sem_step(&cfg(Stmt::Empty, StmtPath::Top, false, s.clone())), None);

        let w = Stmt::while_loop(Expr::Var(v("q")), Stmt::Empty);
        let s = State::new().update(&v("q"), Val::Bool(false));
        let sp = StmtPath::seq_right(Stmt::Empty, StmtPath::Top);
        let (next, rule) = sem_step(&cfg(w.clone(), sp.clone(), true, s.clone())).unwrap();
        assert_eq!(rule, Rule::SWhileF);
        assert_eq!(next, cfg(w, sp, false, s));
    }

    #[test]
    fn null_conditions_are_stuck() {
        let c = Stmt::cond(Expr::Var(v("b")), Stmt::Empty, Stmt::Empty);
        assert_eq!(sem_step(&SemConfig::initial(&c, State::new())), None);
        let w = Stmt::while_loop(Expr::Val(Val::Null), Stmt::Empty);
        assert_eq!(sem_step(&SemConfig::initial(&w, State::new())), None);
    }

    #[test]
    fn terminal_configurations() {
        let c = Stmt::Empty;
        assert!(is_terminal(&cfg(c.clone(), StmtPath::Top, false, State::new())));
        assert!(!is_terminal(&cfg(c.clone(), StmtPath::Top, true, State::new())));
        let sp = StmtPath::while_body(Expr::Var(v("e")), StmtPath::Top);
        assert!(!is_terminal(&cfg(c, sp, false, State::new())));
    }

    #[test]
    fn loop_prefix() {
        let c = parse_program("while (true) { x := true; y := false }").unwrap();
        let trace = run_trace(&c, State::new(), 4);
        assert_eq!(trace.status, TraceStatus::StepLimit);
        assert_eq!(trace.steps.len(), 5);
        let rules: Vec<_> = trace.steps.iter().map(|s| s.rule).collect();
        assert_eq!(
            rules,
            vec![None, Some(Rule::SWhileT), Some(Rule::SSeq), Some(Rule::SAssign), Some(Rule::SFalse)]
        );
        let shape: Vec<(String, bool)> = trace
            .steps
            .iter()
            .map(|s| (s.config.synt.loc.path.render(), s.config.synt.before))
            .collect();
        assert_eq!(
            shape,
            vec![
                ("@top".into(), true),
                ("body".into(), true),
                ("body/seqL".into(), true),
                ("body/seqL".into(), false),
                ("body/seqR".into(), true),
            ]
        );
        let x_true = State::new().update(&v("x"), Val::Bool(true));
        assert_eq!(trace.steps[2].config.state, State::new());
        assert_eq!(trace.steps[3].config.state, x_true);
        assert_eq!(trace.steps[4].config.state, x_true);
        for step in &trace.steps {
            assert_eq!(reconstruct_loc(&step.config.synt.loc), c);
        }
    }

    #[test]
    fn run_empty_and_stuck() {
        let trace = run_trace(&Stmt::Empty, State::new(), 10);
        assert_eq!(trace.status, TraceStatus::Terminated);
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.steps[1].rule, Some(Rule::SEmpty));

        let c = Stmt::cond(Expr::Var(v("b")), Stmt::Empty, Stmt::Empty);
        let trace = run_trace(&c, State::new(), 10);
        assert!(matches!(trace.status, TraceStatus::Stuck(_)));
        assert_eq!(trace.len(), 0);
    }

    #[test]
    fn terminating_exactly_at_the_limit_counts_as_terminated() {
        let trace = run_trace(&Stmt::Empty, State::new(), 1);
        assert_eq!(trace.status, TraceStatus::Terminated);
    }

    #[test]
    fn loop_exits_when_guard_turns_false() {
        let c = parse_program("g := true; while (g) { g := false }; x := null").unwrap();
        let trace = run_trace(&c, State::new(), 100);
        assert_eq!(trace.status, TraceStatus::Terminated);
        let last = trace.last();
        assert_eq!(last.state.get(&v("g")), Some(Val::Bool(false)));
        assert_eq!(last.state.get(&v("x")), Some(Val::Null));
        assert_eq!(last.synt.loc.focus, c);
    }

    #[test]
    fn state_display() {
        let s = State::new().update(&v("y"), Val::Null).update(&v("x"), Val::Bool(true));
        assert_eq!(s.to_string(), "{x=true, y=null}");
        assert_eq!(State::new().to_string(), "{}");
    }
}
