//! A small arithmetic language for density definitions.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;          (* right associative *)
//! atom    = number | variable | call | "(" expr ")" ;
//! call    = ("abs" | "min" | "max") "(" expr { "," expr } ")" ;
//! variable = ("xi_" | "eta_") digit { digit } ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! Parsed trees are compiled to a postfix program; [`DensityExpr::evaluate`]
//! runs that program on a value stack.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Xi(usize),
    Eta(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    pub fn apply(self, l: f64, r: f64) -> Result<f64> {
        let v = match self {
            BinOp::Add => l + r,
            BinOp::Sub => l - r,
            BinOp::Mul => l * r,
            BinOp::Div => {
                if r == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                l / r
            }
            BinOp::Pow => l.powf(r),
        };
        finite(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

/// Syntax tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    fn max_index(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(Var::Xi(k) | Var::Eta(k)) => *k,
            Expr::Neg(e) => e.max_index(),
            Expr::Bin(_, l, r) => l.max_index().max(r.max_index()),
            Expr::Call(_, args) => args.iter().map(Expr::max_index).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parsing the output yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var(Var::Xi(k)) => write!(f, "xi_{k}"),
            Expr::Var(Var::Eta(k)) => write!(f, "eta_{k}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Instr {
    Push(f64),
    Load(Var),
    Neg,
    Bin(BinOp),
    Abs,
    Min(usize),
    Max(usize),
}

/// A parsed density expression over `xi_1..xi_d`, `eta_1..eta_d`.
#[derive(Clone, Debug)]
pub struct DensityExpr {
    tree: Expr,
    program: Vec<Instr>,
    stack_depth: usize,
    max_index: usize,
}

impl PartialEq for DensityExpr {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree
    }
}

impl fmt::Display for DensityExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tree.fmt(f)
    }
}

impl std::str::FromStr for DensityExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DensityExpr::parse(s)
    }
}

impl DensityExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            end: text.len(),
        };
        let tree = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(Error::Syntax {
                pos: t.pos,
                msg: format!("unexpected {}", t.kind.describe()),
            });
        }
        Ok(DensityExpr::from_tree(tree))
    }

    pub fn from_tree(tree: Expr) -> Self {
        let mut program = Vec::new();
        compile(&tree, &mut program);
        let mut depth = 0usize;
        let mut stack_depth = 0usize;
        for ins in &program {
            match ins {
                Instr::Push(_) | Instr::Load(_) => depth += 1,
                Instr::Neg | Instr::Abs => {}
                Instr::Bin(_) => depth -= 1,
                Instr::Min(n) | Instr::Max(n) => depth -= n - 1,
            }
            stack_depth = stack_depth.max(depth);
        }
        DensityExpr {
            max_index: tree.max_index(),
            tree,
            program,
            stack_depth,
        }
    }

    pub fn tree(&self) -> &Expr {
        &self.tree
    }

    /// Largest variable index used; the expression needs `d ≥ max_index`.
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn evaluate(&self, xi: &[f64], eta: &[f64]) -> Result<f64> {
        if xi.len() != eta.len() || xi.len() < self.max_index {
            return Err(Error::InvalidInput(format!(
                "expression needs points of dimension >= {}, got {} and {}",
                self.max_index,
                xi.len(),
                eta.len()
            )));
        }
        let mut stack: Vec<f64> = Vec::with_capacity(self.stack_depth);
        for ins in &self.program {
            match *ins {
                Instr::Push(x) => stack.push(x),
                Instr::Load(Var::Xi(k)) => stack.push(xi[k - 1]),
                Instr::Load(Var::Eta(k)) => stack.push(eta[k - 1]),
                Instr::Neg => {
                    let top = stack.last_mut().expect("compiled stack");
                    *top = -*top;
                }
                Instr::Abs => {
                    let top = stack.last_mut().expect("compiled stack");
                    *top = top.abs();
                }
                Instr::Bin(op) => {
                    let r = stack.pop().expect("compiled stack");
                    let l = stack.pop().expect("compiled stack");
                    stack.push(op.apply(l, r)?);
                }
                Instr::Min(n) | Instr::Max(n) => {
                    let start = stack.len() - n;
                    let pick = if matches!(ins, Instr::Min(_)) {
                        f64::min
                    } else {
                        f64::max
                    };
                    let v = stack[start + 1..]
                        .iter()
                        .fold(stack[start], |acc, &x| pick(acc, x));
                    stack.truncate(start);
                    stack.push(v);
                }
            }
        }
        finite(stack.pop().expect("compiled stack"))
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite)
    }
}

fn compile(e: &Expr, out: &mut Vec<Instr>) {
    match e {
        Expr::Num(x) => out.push(Instr::Push(*x)),
        Expr::Var(v) => out.push(Instr::Load(*v)),
        Expr::Neg(a) => {
            compile(a, out);
            out.push(Instr::Neg);
        }
        Expr::Bin(op, l, r) => {
            compile(l, out);
            compile(r, out);
            out.push(Instr::Bin(*op));
        }
        Expr::Call(func, args) => {
            for a in args {
                compile(a, out);
            }
            out.push(match func {
                Func::Abs => Instr::Abs,
                Func::Min => Instr::Min(args.len()),
                Func::Max => Instr::Max(args.len()),
            });
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(x) => format!("number {x}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("operator `{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokenKind::Op(c as char),
                    pos: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    kind: TokenKind::LParen,
                    pos: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    kind: TokenKind::RParen,
                    pos: start,
                });
                i += 1;
            }
            b',' => {
                out.push(Token {
                    kind: TokenKind::Comma,
                    pos: start,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let x: f64 = lit.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("malformed number `{lit}`"),
                })?;
                out.push(Token {
                    kind: TokenKind::Num(x),
                    pos: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                ..
            }) if ops.contains(c) => {
                self.pos += 1;
                Some(*c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(Error::Syntax {
                pos: t.pos,
                msg: format!("expected {}, found {}", kind.describe(), t.kind.describe()),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                msg: format!("expected {}, found end of input", kind.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return Err(Error::Syntax {
                pos: self.end,
                msg: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match &tok.kind {
            TokenKind::Num(x) => Ok(Expr::Num(*x)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Ident(name) => self.identifier(name, tok.pos),
            other => Err(Error::Syntax {
                pos: tok.pos,
                msg: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: &str, pos: usize) -> Result<Expr> {
        let func = match name {
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        };
        if let Some(func) = func {
            self.expect(TokenKind::LParen)?;
            let mut args = vec![self.expr()?];
            while matches!(
                self.peek(),
                Some(Token {
                    kind: TokenKind::Comma,
                    ..
                })
            ) {
                self.pos += 1;
                args.push(self.expr()?);
            }
            self.expect(TokenKind::RParen)?;
            let ok = match func {
                Func::Abs => args.len() == 1,
                Func::Min | Func::Max => args.len() >= 2,
            };
            if !ok {
                return Err(Error::Arity {
                    func: func.name().into(),
                    expected: if func == Func::Abs {
                        "exactly 1"
                    } else {
                        "at least 2"
                    },
                    found: args.len(),
                });
            }
            return Ok(Expr::Call(func, args));
        }
        let var = name
            .strip_prefix("xi_")
            .map(|k| (k, Var::Xi as fn(usize) -> Var))
            .or_else(|| {
                name.strip_prefix("eta_")
                    .map(|k| (k, Var::Eta as fn(usize) -> Var))
            });
        if let Some((digits, make)) = var {
            if let Ok(k) = digits.parse::<usize>() {
                if k >= 1 && digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Ok(Expr::Var(make(k)));
                }
            }
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            pos,
        })
    }
}
