//! Small exact expression language for level functions, δ-functions and closed-form tails.
//!
//! Variables: `x`, `y` (coordinates of the point), `r` (distance to the space basepoint).
//! Functions: `ceil`, `floor`, `abs`, `min`, `max`, `ceilroot(v, k)`, `floorroot(v, k)`.
//! Operators: `+ - * /` and `^` with a nonnegative integer exponent.

use crate::error::{Error, Result};
use crate::rational::{ceil_i64, floor_i64, parse_q, q};
use crate::space::{MetricSpace, PointId};
use crate::Q;
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(Q),
    Var(char),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Call(String, Vec<Node>),
}

#[derive(Clone, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.src)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let toks = lex(src)?;
        let mut p = Parser { toks, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {src:?}")));
        }
        Ok(Expr {
            src: src.trim().to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    /// Evaluates at a point of `space`.
    pub fn eval(&self, space: &MetricSpace, p: &PointId) -> Result<Q> {
        let r = space.distance(p, &space.basepoint())?;
        eval(&self.root, &Vars { x: q(p.x()), y: q(p.y()), r })
    }
}

struct Vars {
    x: Q,
    y: Q,
    r: Q,
}

fn eval(n: &Node, v: &Vars) -> Result<Q> {
    Ok(match n {
        Node::Num(c) => *c,
        Node::Var('x') => v.x,
        Node::Var('y') => v.y,
        Node::Var(_) => v.r,
        Node::Neg(a) => -eval(a, v)?,
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, v)?, eval(b, v)?);
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                _ => {
                    if b.is_zero() {
                        return Err(Error::domain("division by zero in expression"));
                    }
                    a / b
                }
            }
        }
        Node::Pow(a, k) => {
            let a = eval(a, v)?;
            (0..*k).fold(q(1), |acc, _| acc * a)
        }
        Node::Call(f, args) => {
            let vals = args.iter().map(|a| eval(a, v)).collect::<Result<Vec<_>>>()?;
            call(f, &vals)?
        }
    })
}

fn call(f: &str, a: &[Q]) -> Result<Q> {
    let arity = |n: usize| {
        if a.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("{f} takes {n} argument(s)")))
        }
    };
    match f {
        "ceil" => {
            arity(1)?;
            Ok(q(ceil_i64(&a[0])))
        }
        "floor" => {
            arity(1)?;
            Ok(q(floor_i64(&a[0])))
        }
        "abs" => {
            arity(1)?;
            Ok(a[0].abs())
        }
        "min" | "max" => {
            if a.is_empty() {
                return Err(Error::Parse(format!("{f} needs arguments")));
            }
            let it = a.iter().copied();
            Ok(if f == "min" { it.min() } else { it.max() }.unwrap())
        }
        "ceilroot" | "floorroot" => {
            arity(2)?;
            if !a[1].is_integer() || a[1] < q(1) {
                return Err(Error::domain("root index must be a positive integer"));
            }
            if a[0].is_negative() {
                return Err(Error::domain("root of a negative number"));
            }
            let k = a[1].to_integer() as u32;
            let m = floor_root(&a[0], k);
            if f == "ceilroot" && q(m).pow(k as i32) < a[0] {
                Ok(q(m + 1))
            } else {
                Ok(q(m))
            }
        }
        _ => Err(Error::Parse(format!("unknown function {f:?}"))),
    }
}

/// Largest integer `m >= 0` with `m^k <= v`.
fn floor_root(v: &Q, k: u32) -> i64 {
    let fits = |m: i64| q(m).pow(k as i32) <= *v;
    let mut m = crate::rational::to_f64(v).powf(1.0 / k as f64).floor().max(0.0) as i64;
    while m > 0 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[s..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[s..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                '+'
            } else if self.eat('-') {
                '-'
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                '*'
            } else if self.eat('/') {
                '/'
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(s)) => {
                    self.pos += 1;
                    let k: u32 = s.parse().map_err(|_| Error::Parse("bad exponent".into()))?;
                    return Ok(Node::Pow(Box::new(base), k));
                }
                _ => return Err(Error::Parse("exponent must be a nonnegative integer literal".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(Node::Num(parse_q(&s)?))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Node::Call(name, args))
                } else {
                    match name.as_str() {
                        "x" | "y" | "r" => Ok(Node::Var(name.chars().next().unwrap())),
                        _ => Err(Error::Parse(format!("unknown variable {name:?}"))),
                    }
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn at(src: &str, x: i64) -> Q {
        Expr::parse(src).unwrap().eval(&MetricSpace::NatLine, &PointId::p1(x)).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(at("2*x+1", 3), q(7));
        assert_eq!(at("x/2 - 1", 3), qr(1, 2));
        assert_eq!(at("-(x^2)", 3), q(-9));
        assert_eq!(at("max(1, 2*r)", 0), q(1));
        assert_eq!(at("ceil(x/4)", 5), q(2));
    }

    #[test]
    fn roots() {
        assert_eq!(at("ceilroot(x+1, 2)", 8), q(3));
        assert_eq!(at("ceilroot(x+1, 2)", 9), q(4));
        assert_eq!(at("floorroot(x, 3)", 26), q(2));
        assert_eq!(at("floorroot(x, 3)", 27), q(3));
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("2*").is_err());
        assert!(Expr::parse("z+1").is_err());
        assert!(Expr::parse("x^y").is_err());
        let e = Expr::parse("1/(x-3)").unwrap();
        assert!(e.eval(&MetricSpace::NatLine, &PointId::p1(3)).is_err());
    }
}
