//! Zipper over statements: a focused subtree plus the inverted context leading
//! back to the root.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::ast::{Expr, Stmt};

/// Inverted context of a focused statement. The outermost constructor is the
/// parent of the focus; `Top` is the root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StmtPath {
    Top,
    /// Focus is the first statement of a sequence whose second statement is kept.
    SeqLeft(Box<StmtPath>, Stmt),
    /// Focus is the second statement of a sequence whose first statement is kept.
    SeqRight(Stmt, Box<StmtPath>),
    /// Focus is the then-branch.
    CondLeft(Expr, Box<StmtPath>, Stmt),
    /// Focus is the else-branch.
    CondRight(Expr, Stmt, Box<StmtPath>),
    /// Focus is a loop body.
    While(Expr, Box<StmtPath>),
}

/// One step from a parent down to a child, as seen from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Body,
    CondF,
    CondT,
    SeqL,
    SeqR,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Body => "body",
            Segment::CondF => "condF",
            Segment::CondT => "condT",
            Segment::SeqL => "seqL",
            Segment::SeqR => "seqR",
        }
    }
}

impl StmtPath {
    pub fn seq_left(sp: StmtPath, c2: Stmt) -> StmtPath {
        StmtPath::SeqLeft(Box::new(sp), c2)
    }

    pub fn seq_right(c1: Stmt, sp: StmtPath) -> StmtPath {
        StmtPath::SeqRight(c1, Box::new(sp))
    }

    pub fn cond_left(e: Expr, sp: StmtPath, c2: Stmt) -> StmtPath {
        StmtPath::CondLeft(e, Box::new(sp), c2)
    }

    pub fn cond_right(e: Expr, c1: Stmt, sp: StmtPath) -> StmtPath {
        StmtPath::CondRight(e, c1, Box::new(sp))
    }

    pub fn while_body(e: Expr, sp: StmtPath) -> StmtPath {
        StmtPath::While(e, Box::new(sp))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, StmtPath::Top)
    }

    fn parent(&self) -> Option<(Segment, &StmtPath)> {
        match self {
            StmtPath::Top => None,
            StmtPath::SeqLeft(sp, _) => Some((Segment::SeqL, sp)),
            StmtPath::SeqRight(_, sp) => Some((Segment::SeqR, sp)),
            StmtPath::CondLeft(_, sp, _) => Some((Segment::CondT, sp)),
            StmtPath::CondRight(_, _, sp) => Some((Segment::CondF, sp)),
            StmtPath::While(_, sp) => Some((Segment::Body, sp)),
        }
    }

    /// Segments from the root down to the focus.
    pub fn segments(&self) -> SmallVec<[Segment; 16]> {
        let mut out = SmallVec::new();
        let mut cur = self;
        while let Some((seg, up)) = cur.parent() {
            out.push(seg);
            cur = up;
        }
        out.reverse();
        out
    }

    /// `@top` for the root, otherwise the root-to-focus segments joined by `/`.
    pub fn render(&self) -> String {
        if self.is_top() {
            return "@top".to_string();
        }
        self.segments().iter().map(|s| s.as_str()).collect::<Vec<_>>().join("/")
    }
}

/// Plugs `c` into the hole described by `sp`.
pub fn reconstruct(c: Stmt, sp: &StmtPath) -> Stmt {
    let mut c = c;
    let mut sp = sp;
    loop {
        let (parent, up) = match sp {
            StmtPath::Top => return c,
            StmtPath::SeqLeft(up, c2) => (Stmt::seq(c, c2.clone()), up),
            StmtPath::SeqRight(c1, up) => (Stmt::seq(c1.clone(), c), up),
            StmtPath::CondLeft(e, up, c2) => (Stmt::cond(e.clone(), c, c2.clone()), up),
            StmtPath::CondRight(e, c1, up) => (Stmt::cond(e.clone(), c1.clone(), c), up),
            StmtPath::While(e, up) => (Stmt::while_loop(e.clone(), c), up),
        };
        c = parent;
        sp = up;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtLocation {
    pub focus: Stmt,
    pub path: StmtPath,
}

impl StmtLocation {
    pub fn new(focus: Stmt, path: StmtPath) -> Self {
        StmtLocation { focus, path }
    }

    pub fn top(c: Stmt) -> Self {
        StmtLocation { focus: c, path: StmtPath::Top }
    }
}

pub fn reconstruct_loc(loc: &StmtLocation) -> Stmt {
    reconstruct(loc.focus.clone(), &loc.path)
}

/// A location with its execution marker: `before` is true when the focus is
/// about to run and false once it has finished.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyntConfig {
    pub loc: StmtLocation,
    pub before: bool,
}

impl SyntConfig {
    pub fn new(loc: StmtLocation, before: bool) -> Self {
        SyntConfig { loc, before }
    }
}

/// Canonical order: root-to-focus path segments, then the marker (after
/// sorts before before), then structure as a tiebreak. Within one program the
/// first two components already decide.
impl Ord for SyntConfig {
    fn cmp(&self, other: &Self) -> Ordering {
        self.loc
            .path
            .segments()
            .cmp(&other.loc.path.segments())
            .then(self.before.cmp(&other.before))
            .then_with(|| self.loc.cmp(&other.loc))
    }
}

impl PartialOrd for SyntConfig {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SyntConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.before { "↓" } else { "↑" };
        write!(f, "{} {}", self.loc.path.render(), arrow)
    }
}

/// Every location of `c` under `sp`, in pre-order (self, then left subtree,
/// then right subtree).
pub fn all_locations(c: &Stmt, sp: &StmtPath) -> Vec<StmtLocation> {
    let mut out = Vec::with_capacity(c.subterm_count());
    collect_locations(c, sp, &mut out);
    out
}

fn collect_locations(c: &Stmt, sp: &StmtPath, out: &mut Vec<StmtLocation>) {
    out.push(StmtLocation::new(c.clone(), sp.clone()));
    match c {
        Stmt::Empty | Stmt::Assign(..) => {}
        Stmt::Seq(c1, c2) => {
            collect_locations(c1, &StmtPath::seq_left(sp.clone(), (**c2).clone()), out);
            collect_locations(c2, &StmtPath::seq_right((**c1).clone(), sp.clone()), out);
        }
        Stmt::Cond(e, c1, c2) => {
            collect_locations(c1, &StmtPath::cond_left(e.clone(), sp.clone(), (**c2).clone()), out);
            collect_locations(c2, &StmtPath::cond_right(e.clone(), (**c1).clone(), sp.clone()), out);
        }
        Stmt::While(e, body) => {
            collect_locations(body, &StmtPath::while_body(e.clone(), sp.clone()), out);
        }
    }
}

/// Where control goes once `c` has finished executing under `sp`.
pub fn next_loc(c: &Stmt, sp: &StmtPath) -> SyntConfig {
    let c = c.clone();
    match sp {
        StmtPath::Top => SyntConfig::new(StmtLocation::top(c), false),
        StmtPath::SeqLeft(up, c2) => {
            SyntConfig::new(StmtLocation::new(c2.clone(), StmtPath::seq_right(c, (**up).clone())), true)
        }
        StmtPath::SeqRight(c1, up) => {
            SyntConfig::new(StmtLocation::new(Stmt::seq(c1.clone(), c), (**up).clone()), false)
        }
        StmtPath::CondLeft(e, up, c2) => SyntConfig::new(
            StmtLocation::new(Stmt::cond(e.clone(), c, c2.clone()), (**up).clone()),
            false,
        ),
        StmtPath::CondRight(e, c1, up) => SyntConfig::new(
            StmtLocation::new(Stmt::cond(e.clone(), c1.clone(), c), (**up).clone()),
            false,
        ),
        StmtPath::While(e, up) => {
            SyntConfig::new(StmtLocation::new(Stmt::while_loop(e.clone(), c), (**up).clone()), true)
        }
    }
}

/// Pairs each location with both markers, `before` first.
pub fn nodes_of_stmt_locations(locs: &[StmtLocation]) -> Vec<SyntConfig> {
    locs.iter()
        .flat_map(|loc| [SyntConfig::new(loc.clone(), true), SyntConfig::new(loc.clone(), false)])
        .collect()
}
