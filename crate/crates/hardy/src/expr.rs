//! Closed-form coefficient expressions in one real variable.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | 'pi' | var | func '(' args ')' | '(' expr ')'
//! ```
//!
//! `var` is `t` or `r`; an expression may mention only one of them.
//! Functions: `sqrt ln exp sin cos abs` (one argument) and `pow` (two).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdent { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {got} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
        offset: usize,
    },
    #[error("expression mixes the variables `{first}` and `{second}` (byte {offset})")]
    MultipleVariables {
        first: char,
        second: char,
        offset: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdent { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::MultipleVariables { offset, .. } => *offset,
        }
    }
}

/// Evaluation left the real domain at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("domain error at x = {x:e}: {reason}")]
pub struct DomainError {
    pub x: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sqrt,
    Ln,
    Exp,
    Sin,
    Cos,
    Abs,
}

impl UnaryFn {
    fn name(self) -> &'static str {
        match self {
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Ln => "ln",
            UnaryFn::Exp => "exp",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sqrt" => UnaryFn::Sqrt,
            "ln" => UnaryFn::Ln,
            "exp" => UnaryFn::Exp,
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "abs" => UnaryFn::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Pi,
    Var,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(UnaryFn, Box<Node>),
    /// `pow(a, b)`; kept distinct from `a ^ b` so printing round-trips.
    PowCall(Box<Node>, Box<Node>),
}

/// A parsed expression. Immutable; cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub root: Node,
    /// `'t'` or `'r'`. Constant expressions default to `'t'`.
    pub var: char,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        parse_expr(src)
    }

    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        eval_node(&self.root, x)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_node(&self.root, self.var, f)
    }
}

fn print_node(n: &Node, var: char, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match n {
        // `{:?}` is the shortest representation that parses back to the same bits.
        Node::Num(v) => write!(f, "{v:?}"),
        Node::Pi => write!(f, "pi"),
        Node::Var => write!(f, "{var}"),
        Node::Neg(a) => {
            write!(f, "(-")?;
            print_node(a, var, f)?;
            write!(f, ")")
        }
        Node::Bin(op, a, b) => {
            write!(f, "(")?;
            print_node(a, var, f)?;
            write!(f, " {} ", op.symbol())?;
            print_node(b, var, f)?;
            write!(f, ")")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            print_node(a, var, f)?;
            write!(f, ")")
        }
        Node::PowCall(a, b) => {
            write!(f, "pow(")?;
            print_node(a, var, f)?;
            write!(f, ", ")?;
            print_node(b, var, f)?;
            write!(f, ")")
        }
    }
}

fn finite(v: f64, x: f64, reason: &'static str) -> Result<f64, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError { x, reason })
    }
}

fn real_pow(base: f64, exp: f64, x: f64) -> Result<f64, DomainError> {
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(DomainError {
            x,
            reason: "non-integer power of a negative base",
        });
    }
    if base == 0.0 && exp < 0.0 {
        return Err(DomainError {
            x,
            reason: "negative power of zero",
        });
    }
    finite(base.powf(exp), x, "power overflow")
}

fn eval_node(n: &Node, x: f64) -> Result<f64, DomainError> {
    match n {
        Node::Num(v) => Ok(*v),
        Node::Pi => Ok(std::f64::consts::PI),
        Node::Var => finite(x, x, "non-finite argument"),
        Node::Neg(a) => Ok(-eval_node(a, x)?),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, x)?, eval_node(b, x)?);
            match op {
                BinOp::Add => finite(a + b, x, "overflow"),
                BinOp::Sub => finite(a - b, x, "overflow"),
                BinOp::Mul => finite(a * b, x, "overflow"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(DomainError {
                            x,
                            reason: "division by zero",
                        })
                    } else {
                        finite(a / b, x, "overflow")
                    }
                }
                BinOp::Pow => real_pow(a, b, x),
            }
        }
        Node::PowCall(a, b) => real_pow(eval_node(a, x)?, eval_node(b, x)?, x),
        Node::Call(func, a) => {
            let a = eval_node(a, x)?;
            match func {
                UnaryFn::Sqrt if a < 0.0 => Err(DomainError {
                    x,
                    reason: "sqrt of a negative number",
                }),
                UnaryFn::Sqrt => Ok(a.sqrt()),
                UnaryFn::Ln if a <= 0.0 => Err(DomainError {
                    x,
                    reason: "ln of a non-positive number",
                }),
                UnaryFn::Ln => Ok(a.ln()),
                UnaryFn::Exp => finite(a.exp(), x, "exp overflow"),
                UnaryFn::Sin => Ok(a.sin()),
                UnaryFn::Cos => Ok(a.cos()),
                UnaryFn::Abs => Ok(a.abs()),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start).map(|v| (Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        self.pos += 1;
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                msg: "malformed number".into(),
            });
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            if digits(&mut self.pos) == 0 {
                // `2e` followed by something else: not an exponent.
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::Syntax {
                offset: start,
                msg: format!("number `{text}` is not a finite double"),
            }),
        }
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    var: Option<(char, usize)>,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == want {
            self.bump()
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match &self.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        };
        ParseError::Syntax {
            offset: self.at,
            msg: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name.as_str() {
                    "pi" => Ok(Node::Pi),
                    "t" | "r" => {
                        let c = name.as_bytes()[0] as char;
                        match self.var {
                            Some((first, _)) if first != c => {
                                return Err(ParseError::MultipleVariables {
                                    first,
                                    second: c,
                                    offset: at,
                                })
                            }
                            _ => self.var = Some((c, at)),
                        }
                        Ok(Node::Var)
                    }
                    _ => {
                        let unary = UnaryFn::from_name(&name);
                        if unary.is_none() && name != "pow" {
                            return Err(ParseError::UnknownIdent { name, offset: at });
                        }
                        self.expect(Tok::LParen, "`(` after function name")?;
                        let mut args = vec![self.expr()?];
                        while self.tok == Tok::Comma {
                            self.bump()?;
                            args.push(self.expr()?);
                        }
                        self.expect(Tok::RParen, "`)`")?;
                        let expected = if unary.is_some() { 1 } else { 2 };
                        if args.len() != expected {
                            return Err(ParseError::Arity {
                                name,
                                expected,
                                got: args.len(),
                                offset: at,
                            });
                        }
                        let mut it = args.into_iter().map(Box::new);
                        let a = it.next().expect("one argument");
                        Ok(match unary {
                            Some(func) => Node::Call(func, a),
                            None => Node::PowCall(a, it.next().expect("two arguments")),
                        })
                    }
                }
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lex: Lexer { src, pos: 0 },
        tok: Tok::End,
        at: 0,
        var: None,
    };
    p.bump()?;
    let root = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(Expr {
        root,
        var: p.var.map_or('t', |(c, _)| c),
    })
}

pub fn eval_expr(e: &Expr, x: f64) -> Result<f64, DomainError> {
    e.eval(x)
}
