//! Abstract syntax of the Boolean imperative language, with its concrete
//! syntax (parser and canonical printer).
//!
//! ```text
//! program := stmt EOF
//! stmt    := basic (';' stmt)?
//! basic   := 'skip'
//!          | IDENT ':=' literal
//!          | 'if' '(' expr ')' '{' stmt '}' 'else' '{' stmt '}'
//!          | 'while' '(' expr ')' '{' stmt '}'
//!          | '{' stmt '}'
//! expr    := literal | IDENT
//! literal := 'true' | 'false' | 'null'
//! ```
//!
//! `;` associates to the right. The bare `{ stmt }` group only exists so that a
//! left-nested sequence `Seq(Seq(a, b), c)` has a printed form; the printer
//! emits it for nothing else.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const KEYWORDS: &[&str] = &["skip", "if", "else", "while", "true", "false", "null"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Bool(bool),
    Null,
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Bool(true) => f.write_str("true"),
            Val::Bool(false) => f.write_str("false"),
            Val::Null => f.write_str("null"),
        }
    }
}

impl std::str::FromStr for Val {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "true" => Ok(Val::Bool(true)),
            "false" => Ok(Val::Bool(false)),
            "null" => Ok(Val::Null),
            other => Err(format!("expected `true`, `false` or `null`, found `{other}`")),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A variable name: a letter followed by letters, digits or underscores, and
/// not a keyword of the language.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VName(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid variable name `{0}`")]
pub struct InvalidName(pub String);

impl VName {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        if is_identifier(&name) && !KEYWORDS.contains(&name.as_str()) {
            Ok(VName(name))
        } else {
            Err(InvalidName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for VName {
    type Error = InvalidName;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        VName::new(value)
    }
}

impl From<VName> for String {
    fn from(value: VName) -> Self {
        value.0
    }
}

impl fmt::Display for VName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Val(Val),
    Var(VName),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Val(v) => v.fmt(f),
            Expr::Var(x) => x.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Empty,
    Assign(VName, Val),
    Seq(Box<Stmt>, Box<Stmt>),
    Cond(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
}

impl Stmt {
    pub fn assign(x: VName, v: Val) -> Stmt {
        Stmt::Assign(x, v)
    }

    pub fn seq(c1: Stmt, c2: Stmt) -> Stmt {
        Stmt::Seq(Box::new(c1), Box::new(c2))
    }

    pub fn cond(e: Expr, c1: Stmt, c2: Stmt) -> Stmt {
        Stmt::Cond(e, Box::new(c1), Box::new(c2))
    }

    pub fn while_loop(e: Expr, body: Stmt) -> Stmt {
        Stmt::While(e, Box::new(body))
    }

    /// Number of statement nodes in the tree, the root included.
    pub fn subterm_count(&self) -> usize {
        match self {
            Stmt::Empty | Stmt::Assign(..) => 1,
            Stmt::Seq(c1, c2) | Stmt::Cond(_, c1, c2) => 1 + c1.subterm_count() + c2.subterm_count(),
            Stmt::While(_, c) => 1 + c.subterm_count(),
        }
    }

    /// Constructor-style rendering of the tree, e.g.
    /// `(While (Var e) (Seq (Assign x true) (Assign y false)))`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        dump_into(self, &mut out);
        out
    }
}

fn dump_expr(e: &Expr) -> String {
    match e {
        Expr::Val(v) => format!("(Val {v})"),
        Expr::Var(x) => format!("(Var {x})"),
    }
}

fn dump_into(c: &Stmt, out: &mut String) {
    match c {
        Stmt::Empty => out.push_str("Empty"),
        Stmt::Assign(x, v) => out.push_str(&format!("(Assign {x} {v})")),
        Stmt::Seq(c1, c2) => {
            out.push_str("(Seq ");
            dump_into(c1, out);
            out.push(' ');
            dump_into(c2, out);
            out.push(')');
        }
        Stmt::Cond(e, c1, c2) => {
            out.push_str(&format!("(Cond {} ", dump_expr(e)));
            dump_into(c1, out);
            out.push(' ');
            dump_into(c2, out);
            out.push(')');
        }
        Stmt::While(e, c) => {
            out.push_str(&format!("(While {} ", dump_expr(e)));
            dump_into(c, out);
            out.push(')');
        }
    }
}

/// Canonical concrete syntax. Reparsing the output yields an equal tree.
impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Empty => f.write_str("skip"),
            Stmt::Assign(x, v) => write!(f, "{x} := {v}"),
            Stmt::Seq(c1, c2) => {
                if matches!(**c1, Stmt::Seq(..)) {
                    write!(f, "{{ {c1} }}; {c2}")
                } else {
                    write!(f, "{c1}; {c2}")
                }
            }
            Stmt::Cond(e, c1, c2) => write!(f, "if ({e}) {{ {c1} }} else {{ {c2} }}"),
            Stmt::While(e, c) => write!(f, "while ({e}) {{ {c} }}"),
        }
    }
}

pub fn print_program(c: &Stmt) -> String {
    c.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Skip,
    If,
    Else,
    While,
    True,
    False,
    Null,
    Assign,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Skip => "`skip`",
            Tok::If => "`if`",
            Tok::Else => "`else`",
            Tok::While => "`while`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Null => "`null`",
            Tok::Assign => "`:=`",
            Tok::Semi => "`;`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let err = |message: String| ParseError { line: tline, column: tcol, message };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let tok = match c {
            '/' => {
                chars.next();
                column += 1;
                if chars.peek() != Some(&'/') {
                    return Err(err("expected `//` comment".into()));
                }
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
                continue;
            }
            ':' => {
                chars.next();
                column += 1;
                if chars.peek() != Some(&'=') {
                    return Err(err("expected `:=`".into()));
                }
                chars.next();
                column += 1;
                Tok::Assign
            }
            ';' | '(' | ')' | '{' | '}' => {
                chars.next();
                column += 1;
                match c {
                    ';' => Tok::Semi,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    _ => Tok::RBrace,
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "skip" => Tok::Skip,
                    "if" => Tok::If,
                    "else" => Tok::Else,
                    "while" => Tok::While,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "null" => Tok::Null,
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        toks.push(Spanned { tok, line: tline, column: tcol });
    }
    toks.push(Spanned { tok: Tok::Eof, line, column });
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Spanned, message: String) -> ParseError {
        ParseError { line: t.line, column: t.column, message }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(())
        } else {
            Err(Self::error_at(&t, format!("expected {want}, found {}", t.tok)))
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let first = self.basic()?;
        if self.peek().tok == Tok::Semi {
            self.bump();
            let rest = self.stmt()?;
            Ok(Stmt::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn block(&mut self) -> Result<Stmt, ParseError> {
        self.expect(Tok::LBrace)?;
        let body = self.stmt()?;
        self.expect(Tok::RBrace)?;
        Ok(body)
    }

    fn guard(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let t = self.bump();
        let e = match t.tok.clone() {
            Tok::True => Expr::Val(Val::Bool(true)),
            Tok::False => Expr::Val(Val::Bool(false)),
            Tok::Null => Expr::Val(Val::Null),
            Tok::Ident(name) => Expr::Var(VName(name)),
            other => return Err(Self::error_at(&t, format!("expected a literal or variable, found {other}"))),
        };
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    fn literal(&mut self) -> Result<Val, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::True => Ok(Val::Bool(true)),
            Tok::False => Ok(Val::Bool(false)),
            Tok::Null => Ok(Val::Null),
            other => Err(Self::error_at(
                &t,
                format!("expected `true`, `false` or `null` on the right of `:=`, found {other}"),
            )),
        }
    }

    fn basic(&mut self) -> Result<Stmt, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Skip => Ok(Stmt::Empty),
            Tok::Ident(name) => {
                self.expect(Tok::Assign)?;
                let v = self.literal()?;
                Ok(Stmt::Assign(VName(name), v))
            }
            Tok::If => {
                let e = self.guard()?;
                let c1 = self.block()?;
                self.expect(Tok::Else)?;
                let c2 = self.block()?;
                Ok(Stmt::cond(e, c1, c2))
            }
            Tok::While => {
                let e = self.guard()?;
                let body = self.block()?;
                Ok(Stmt::while_loop(e, body))
            }
            Tok::LBrace => {
                let inner = self.stmt()?;
                self.expect(Tok::RBrace)?;
                Ok(inner)
            }
            other => Err(Self::error_at(&t, format!("expected a statement, found {other}"))),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Stmt, ParseError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let c = parser.stmt()?;
    let t = parser.bump();
    if t.tok != Tok::Eof {
        return Err(Parser::error_at(&t, format!("expected `;` or end of input, found {}", t.tok)));
    }
    Ok(c)
}
