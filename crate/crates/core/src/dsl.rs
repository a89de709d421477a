//! A small language for string diagrams.
//!
//! ```text
//! system A = 2;
//! system P = [2, 3];
//! box f : A -> A * P @ "f.json";
//! (id[A] * cup[A]) ; (cap[A] * id[A])
//! ```
//!
//! Declarations come first, followed by one expression. `;` is sequential
//! composition read left to right (first `f`, then `g`), and `*` places
//! diagrams side by side. `*` binds tighter than `;` and both associate to
//! the left. `I` is the unit system and an integer literal names a system
//! of that dimension. `#` starts a line comment.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::io::read_process;
use crate::process::{compose_par, compose_seq, Process};
use crate::tensor::SystemDims;

/// Byte range plus the 1-based line and column of its start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DslError {
    Syntax {
        span: Span,
        found: String,
        expected: Vec<String>,
    },
    UnknownName {
        span: Span,
        name: String,
    },
    Duplicate {
        span: Span,
        name: String,
    },
    Type {
        span: Span,
        message: String,
    },
    /// A box file could not be read or parsed.
    Load {
        span: Span,
        path: PathBuf,
        source: Error,
    },
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Syntax {
                span,
                found,
                expected,
            } => {
                write!(f, "{span}: syntax error: found {found}, expected ")?;
                match expected.as_slice() {
                    [one] => write!(f, "{one}"),
                    many => write!(f, "one of {}", many.join(", ")),
                }
            }
            DslError::UnknownName { span, name } => write!(f, "{span}: unknown name `{name}`"),
            DslError::Duplicate { span, name } => write!(f, "{span}: `{name}` is declared twice"),
            DslError::Type { span, message } => write!(f, "{span}: type error: {message}"),
            DslError::Load { span, path, source } => {
                write!(
                    f,
                    "{span}: cannot load box from {}: {source}",
                    path.display()
                )
            }
        }
    }
}

impl std::error::Error for DslError {}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::Syntax { span, .. }
            | DslError::UnknownName { span, .. }
            | DslError::Duplicate { span, .. }
            | DslError::Type { span, .. }
            | DslError::Load { span, .. } => *span,
        }
    }
}

pub type DslResult<T> = std::result::Result<T, DslError>;

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Star,
    Arrow,
    Colon,
    At,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Star => "`*`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Colon => "`:`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> DslResult<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let span_at = |start: usize, end: usize, line: usize, col: usize| Span {
        start,
        end,
        line,
        col,
    };

    while let Some(&(i, c)) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
            let (_, ch) = chars.next().expect("peeked");
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        if c.is_whitespace() {
            advance(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&(_, ch)) = chars.peek() {
                if ch == '\n' {
                    break;
                }
                advance(&mut chars);
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '*' => Some(Tok::Star),
            ':' => Some(Tok::Colon),
            '@' => Some(Tok::At),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = simple {
            advance(&mut chars);
            out.push((t, span_at(i, i + 1, l0, c0)));
            continue;
        }
        if c == '-' {
            advance(&mut chars);
            if let Some(&(_, '>')) = chars.peek() {
                advance(&mut chars);
                out.push((Tok::Arrow, span_at(i, i + 2, l0, c0)));
                continue;
            }
            return Err(DslError::Syntax {
                span: span_at(i, i + 1, l0, c0),
                found: "`-`".into(),
                expected: vec!["`->`".into()],
            });
        }
        if c.is_ascii_digit() {
            let mut end = i;
            let mut text = String::new();
            while let Some(&(j, ch)) = chars.peek() {
                if !ch.is_ascii_digit() {
                    break;
                }
                text.push(ch);
                end = j + 1;
                advance(&mut chars);
            }
            let span = span_at(i, end, l0, c0);
            let n = text.parse::<usize>().map_err(|_| DslError::Syntax {
                span,
                found: format!("`{text}`"),
                expected: vec!["a dimension that fits in memory".into()],
            })?;
            out.push((Tok::Int(n), span));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            let mut text = String::new();
            while let Some(&(j, ch)) = chars.peek() {
                if !(ch.is_alphanumeric() || ch == '_' || ch == '\'') {
                    break;
                }
                text.push(ch);
                end = j + ch.len_utf8();
                advance(&mut chars);
            }
            out.push((Tok::Ident(text), span_at(i, end, l0, c0)));
            continue;
        }
        if c == '"' {
            advance(&mut chars);
            let mut text = String::new();
            loop {
                match chars.peek().copied() {
                    Some((j, '"')) => {
                        advance(&mut chars);
                        out.push((Tok::Str(text), span_at(i, j + 1, l0, c0)));
                        break;
                    }
                    Some((_, '\n')) | None => {
                        return Err(DslError::Syntax {
                            span: span_at(i, src.len(), l0, c0),
                            found: "unterminated string".into(),
                            expected: vec!["`\"`".into()],
                        })
                    }
                    Some((_, '\\')) => {
                        advance(&mut chars);
                        if let Some(&(_, esc)) = chars.peek() {
                            text.push(esc);
                            advance(&mut chars);
                        }
                    }
                    Some((_, ch)) => {
                        text.push(ch);
                        advance(&mut chars);
                    }
                }
            }
            continue;
        }
        return Err(DslError::Syntax {
            span: span_at(i, i + c.len_utf8(), l0, c0),
            found: format!("`{c}`"),
            expected: vec!["a token".into()],
        });
    }
    out.push((Tok::Eof, span_at(src.len(), src.len(), line, col)));
    Ok(out)
}

// ---------------------------------------------------------------- syntax tree

/// One factor of a system expression.
#[derive(Debug, Clone, PartialEq)]
pub enum SysAtom {
    Named(String),
    Dim(usize),
    Unit,
}

/// `A * B * 2`, or `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SysExpr {
    pub atoms: Vec<SysAtom>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Id,
    Swap,
    Cup,
    Cap,
    Discard,
}

impl Builtin {
    fn from_name(s: &str) -> Option<Builtin> {
        Some(match s {
            "id" => Builtin::Id,
            "swap" => Builtin::Swap,
            "cup" => Builtin::Cup,
            "cap" => Builtin::Cap,
            "discard" => Builtin::Discard,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Id => "id",
            Builtin::Swap => "swap",
            Builtin::Cup => "cup",
            Builtin::Cap => "cap",
            Builtin::Discard => "discard",
        }
    }

    fn arity(self) -> usize {
        if self == Builtin::Swap {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Box {
        name: String,
        span: Span,
    },
    Builtin {
        kind: Builtin,
        args: Vec<SysExpr>,
        span: Span,
    },
    Seq(Box<Expr>, Box<Expr>, Span),
    Par(Box<Expr>, Box<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Box { span, .. }
            | Expr::Builtin { span, .. }
            | Expr::Seq(_, _, span)
            | Expr::Par(_, _, span) => *span,
        }
    }

    fn strip(&self) -> Expr {
        let s = Span::default();
        match self {
            Expr::Box { name, .. } => Expr::Box {
                name: name.clone(),
                span: s,
            },
            Expr::Builtin { kind, args, .. } => Expr::Builtin {
                kind: *kind,
                args: args.iter().map(SysExpr::strip).collect(),
                span: s,
            },
            Expr::Seq(a, b, _) => Expr::Seq(Box::new(a.strip()), Box::new(b.strip()), s),
            Expr::Par(a, b, _) => Expr::Par(Box::new(a.strip()), Box::new(b.strip()), s),
        }
    }

    /// Equality ignoring source positions.
    pub fn structurally_eq(&self, other: &Expr) -> bool {
        self.strip() == other.strip()
    }
}

impl SysExpr {
    fn strip(&self) -> SysExpr {
        SysExpr {
            atoms: self.atoms.clone(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    System {
        name: String,
        dims: Vec<usize>,
        span: Span,
    },
    Box {
        name: String,
        input: SysExpr,
        output: SysExpr,
        path: String,
        span: Span,
    },
}

impl Decl {
    fn strip(&self) -> Decl {
        match self {
            Decl::System { name, dims, .. } => Decl::System {
                name: name.clone(),
                dims: dims.clone(),
                span: Span::default(),
            },
            Decl::Box {
                name,
                input,
                output,
                path,
                ..
            } => Decl::Box {
                name: name.clone(),
                input: input.strip(),
                output: output.strip(),
                path: path.clone(),
                span: Span::default(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Expr,
}

impl Program {
    pub fn structurally_eq(&self, other: &Program) -> bool {
        self.decls.len() == other.decls.len()
            && self
                .decls
                .iter()
                .zip(&other.decls)
                .all(|(a, b)| a.strip() == b.strip())
            && self.body.structurally_eq(&other.body)
    }
}

// ---------------------------------------------------------------- parser

const KEYWORDS: [&str; 7] = ["system", "box", "id", "swap", "cup", "cap", "discard"];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

fn join(a: Span, b: Span) -> Span {
    Span {
        start: a.start,
        end: b.end,
        line: a.line,
        col: a.col,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> DslResult<T> {
        Err(DslError::Syntax {
            span: self.span(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, t: Tok) -> DslResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.fail(&[&t.describe()])
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn name(&mut self, what: &str) -> DslResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) && s != "I" => Ok((s, self.bump().1)),
            _ => self.fail(&[what]),
        }
    }

    fn program(&mut self) -> DslResult<Program> {
        let mut decls = Vec::new();
        loop {
            if self.is_keyword("system") {
                decls.push(self.system_decl()?);
            } else if self.is_keyword("box") {
                decls.push(self.box_decl()?);
            } else {
                break;
            }
        }
        let body = self.expr(true)?;
        if *self.peek() == Tok::Semi {
            self.bump();
        }
        if *self.peek() != Tok::Eof {
            return self.fail(&["`;`", "`*`", "end of input"]);
        }
        Ok(Program { decls, body })
    }

    fn system_decl(&mut self) -> DslResult<Decl> {
        let start = self.bump().1;
        let (name, _) = self.name("system name")?;
        self.expect(Tok::Eq)?;
        let dims = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                vec![n]
            }
            Tok::LBrack => {
                self.bump();
                let mut dims = Vec::new();
                if *self.peek() != Tok::RBrack {
                    loop {
                        match self.peek().clone() {
                            Tok::Int(n) => {
                                self.bump();
                                dims.push(n);
                            }
                            _ => return self.fail(&["dimension"]),
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrack)?;
                dims
            }
            _ => return self.fail(&["dimension", "`[`"]),
        };
        let end = self.expect(Tok::Semi)?;
        Ok(Decl::System {
            name,
            dims,
            span: join(start, end),
        })
    }

    fn box_decl(&mut self) -> DslResult<Decl> {
        let start = self.bump().1;
        let (name, _) = self.name("box name")?;
        self.expect(Tok::Colon)?;
        let input = self.sys_expr()?;
        self.expect(Tok::Arrow)?;
        let output = self.sys_expr()?;
        self.expect(Tok::At)?;
        let path = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            _ => return self.fail(&["file path string"]),
        };
        let end = self.expect(Tok::Semi)?;
        Ok(Decl::Box {
            name,
            input,
            output,
            path,
            span: join(start, end),
        })
    }

    fn sys_atom(&mut self) -> DslResult<SysAtom> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(SysAtom::Dim(n))
            }
            Tok::Ident(s) if s == "I" => {
                self.bump();
                Ok(SysAtom::Unit)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(SysAtom::Named(s))
            }
            _ => self.fail(&["system name", "dimension", "`I`"]),
        }
    }

    fn sys_expr(&mut self) -> DslResult<SysExpr> {
        let start = self.span();
        let mut atoms = vec![self.sys_atom()?];
        while *self.peek() == Tok::Star {
            self.bump();
            atoms.push(self.sys_atom()?);
        }
        Ok(SysExpr {
            atoms,
            span: join(start, self.prev_span()),
        })
    }

    /// `top` allows a trailing `;` right before the end of input.
    fn expr(&mut self, top: bool) -> DslResult<Expr> {
        let mut lhs = self.par()?;
        while *self.peek() == Tok::Semi {
            if top && self.toks[self.pos + 1].0 == Tok::Eof {
                break;
            }
            self.bump();
            let rhs = self.par()?;
            let span = join(lhs.span(), rhs.span());
            lhs = Expr::Seq(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn par(&mut self) -> DslResult<Expr> {
        let mut lhs = self.atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.atom()?;
            let span = join(lhs.span(), rhs.span());
            lhs = Expr::Par(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> DslResult<Expr> {
        const EXPECTED: [&str; 3] = ["`(`", "builtin", "box name"];
        match self.peek().clone() {
            Tok::LParen => {
                let start = self.bump().1;
                let inner = self.expr(false)?;
                let end = self.expect(Tok::RParen)?;
                // parentheses widen the span but leave no node behind
                Ok(match inner {
                    Expr::Seq(a, b, _) => Expr::Seq(a, b, join(start, end)),
                    Expr::Par(a, b, _) => Expr::Par(a, b, join(start, end)),
                    other => other,
                })
            }
            Tok::Ident(s) => {
                if let Some(kind) = Builtin::from_name(&s) {
                    let start = self.bump().1;
                    self.expect(Tok::LBrack)?;
                    let mut args = vec![self.sys_expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.sys_expr()?);
                    }
                    let end = self.expect(Tok::RBrack)?;
                    let span = join(start, end);
                    if args.len() != kind.arity() {
                        return Err(DslError::Syntax {
                            span,
                            found: format!("{} system argument(s)", args.len()),
                            expected: vec![format!(
                                "{} argument(s) for `{}`",
                                kind.arity(),
                                kind.name()
                            )],
                        });
                    }
                    Ok(Expr::Builtin { kind, args, span })
                } else if KEYWORDS.contains(&s.as_str()) || s == "I" {
                    self.fail(&EXPECTED)
                } else {
                    let span = self.bump().1;
                    Ok(Expr::Box { name: s, span })
                }
            }
            _ => self.fail(&EXPECTED),
        }
    }
}

pub fn parse(source: &str) -> DslResult<Program> {
    let toks = lex(source)?;
    Parser { toks, pos: 0 }.program()
}

// ---------------------------------------------------------------- printer

impl fmt::Display for SysExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            match a {
                SysAtom::Named(s) => write!(f, "{s}")?,
                SysAtom::Dim(n) => write!(f, "{n}")?,
                SysAtom::Unit => write!(f, "I")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Box { name, .. } => write!(f, "{name}"),
            Expr::Builtin { kind, args, .. } => {
                write!(f, "{}[", kind.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
            Expr::Seq(a, b, _) => match **b {
                Expr::Seq(..) => write!(f, "{a} ; ({b})"),
                _ => write!(f, "{a} ; {b}"),
            },
            Expr::Par(a, b, _) => {
                match **a {
                    Expr::Seq(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match **b {
                    Expr::Seq(..) | Expr::Par(..) => write!(f, " * ({b})"),
                    _ => write!(f, " * {b}"),
                }
            }
        }
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::System { name, dims, .. } if dims.len() == 1 => {
                write!(f, "system {name} = {};", dims[0])
            }
            Decl::System { name, dims, .. } => {
                let list: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "system {name} = [{}];", list.join(", "))
            }
            Decl::Box {
                name,
                input,
                output,
                path,
                ..
            } => {
                write!(f, "box {name} : {input} -> {output} @ {path:?};")
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        write!(f, "{}", self.body)
    }
}

// ---------------------------------------------------------------- evaluation

/// Named systems and boxes available to an expression.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    systems: HashMap<String, SystemDims>,
    boxes: HashMap<String, Process>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_system(&mut self, name: &str, dims: SystemDims) -> bool {
        if self.systems.contains_key(name) {
            return false;
        }
        self.systems.insert(name.to_string(), dims);
        true
    }

    pub fn add_box(&mut self, name: &str, p: Process) -> bool {
        if self.boxes.contains_key(name) {
            return false;
        }
        self.boxes.insert(name.to_string(), p);
        true
    }

    pub fn system(&self, name: &str) -> Option<&SystemDims> {
        self.systems.get(name)
    }

    pub fn get_box(&self, name: &str) -> Option<&Process> {
        self.boxes.get(name)
    }

    /// Resolves a system expression to its dimension list.
    pub fn resolve(&self, s: &SysExpr) -> DslResult<SystemDims> {
        let mut dims = Vec::new();
        for a in &s.atoms {
            match a {
                SysAtom::Unit => {}
                SysAtom::Dim(n) => dims.push(*n),
                SysAtom::Named(name) => dims.extend_from_slice(
                    self.systems
                        .get(name)
                        .ok_or_else(|| DslError::UnknownName {
                            span: s.span,
                            name: name.clone(),
                        })?
                        .dims(),
                ),
            }
        }
        SystemDims::new(dims).map_err(|e| DslError::Type {
            span: s.span,
            message: e.to_string(),
        })
    }

    /// Adds the program's declarations, loading box files relative to `base`.
    pub fn declare(&mut self, decls: &[Decl], base: &Path) -> DslResult<()> {
        for d in decls {
            match d {
                Decl::System { name, dims, span } => {
                    let sys = SystemDims::new(dims.clone()).map_err(|e| DslError::Type {
                        span: *span,
                        message: e.to_string(),
                    })?;
                    if !self.add_system(name, sys) {
                        return Err(DslError::Duplicate {
                            span: *span,
                            name: name.clone(),
                        });
                    }
                }
                Decl::Box {
                    name,
                    input,
                    output,
                    path,
                    span,
                } => {
                    let (i, o) = (self.resolve(input)?, self.resolve(output)?);
                    let full = base.join(path);
                    let p = read_process(&full).map_err(|source| DslError::Load {
                        span: *span,
                        path: full.clone(),
                        source,
                    })?;
                    if p.in_sys() != &i || p.out_sys() != &o {
                        return Err(DslError::Type {
                            span: *span,
                            message: format!(
                                "box `{name}` is declared {i} -> {o} but {} holds {} -> {}",
                                full.display(),
                                p.in_sys(),
                                p.out_sys()
                            ),
                        });
                    }
                    if !self.add_box(name, p) {
                        return Err(DslError::Duplicate {
                            span: *span,
                            name: name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Input and output systems of an expression.
pub fn typecheck(e: &Expr, env: &Environment) -> DslResult<(SystemDims, SystemDims)> {
    match e {
        Expr::Box { name, span } => env
            .get_box(name)
            .map(|p| (p.in_sys().clone(), p.out_sys().clone()))
            .ok_or_else(|| DslError::UnknownName {
                span: *span,
                name: name.clone(),
            }),
        Expr::Builtin { kind, args, .. } => {
            let a = env.resolve(&args[0])?;
            let unit = SystemDims::trivial();
            Ok(match kind {
                Builtin::Id => (a.clone(), a),
                Builtin::Swap => {
                    let b = env.resolve(&args[1])?;
                    (a.concat(&b), b.concat(&a))
                }
                Builtin::Cup => (unit, a.concat(&a)),
                Builtin::Cap => (a.concat(&a), unit),
                Builtin::Discard => (a, unit),
            })
        }
        Expr::Seq(f, g, _) => {
            let (fi, fo) = typecheck(f, env)?;
            let (gi, go) = typecheck(g, env)?;
            if fo != gi {
                return Err(DslError::Type {
                    span: e.span(),
                    message: format!(
                        "`{f}` at {} outputs {fo} but `{g}` at {} expects {gi}",
                        f.span(),
                        g.span()
                    ),
                });
            }
            Ok((fi, go))
        }
        Expr::Par(f, g, _) => {
            let (fi, fo) = typecheck(f, env)?;
            let (gi, go) = typecheck(g, env)?;
            Ok((fi.concat(&gi), fo.concat(&go)))
        }
    }
}

/// Type checks, then evaluates `;` as sequential and `*` as parallel composition.
pub fn typecheck_and_eval(e: &Expr, env: &Environment) -> DslResult<Process> {
    typecheck(e, env)?;
    eval(e, env)
}

fn eval(e: &Expr, env: &Environment) -> DslResult<Process> {
    let numeric = |span: Span| {
        move |err: Error| DslError::Type {
            span,
            message: err.to_string(),
        }
    };
    match e {
        Expr::Box { name, span } => {
            env.get_box(name)
                .cloned()
                .ok_or_else(|| DslError::UnknownName {
                    span: *span,
                    name: name.clone(),
                })
        }
        Expr::Builtin { kind, args, .. } => {
            let a = env.resolve(&args[0])?;
            Ok(match kind {
                Builtin::Id => Process::identity(&a),
                Builtin::Swap => Process::swap(&a, &env.resolve(&args[1])?),
                Builtin::Cup => Process::cup(&a),
                Builtin::Cap => Process::cap(&a),
                Builtin::Discard => Process::discard(&a),
            })
        }
        Expr::Seq(f, g, span) => {
            compose_seq(&eval(f, env)?, &eval(g, env)?).map_err(numeric(*span))
        }
        Expr::Par(f, g, _) => Ok(compose_par(&eval(f, env)?, &eval(g, env)?)),
    }
}

/// Parses and evaluates a diagram file's text; box paths resolve against `base`.
pub fn compile(source: &str, base: &Path) -> DslResult<Process> {
    let prog = parse(source)?;
    let mut env = Environment::new();
    env.declare(&prog.decls, base)?;
    typecheck_and_eval(&prog.body, &env)
}
