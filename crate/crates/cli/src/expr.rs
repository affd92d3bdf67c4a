//! Arithmetic expressions for map definitions.
//!
//! ```text
//! map     := '{' element (',' element)* '}' | element
//! element := '[' expr (',' expr)* ']' | expr
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | primary
//! primary := number | variable | '(' expr ')'
//! ```
//!
//! Variables are `x`, `y` (the current component) and `x1..xd`, `y1..yd`
//! (explicit components). A scalar element is applied componentwise.

use std::fmt;

use coupled_fpi_core::{CoupledMap, CoupledMultiMap, Error, FiniteSet, Point};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X(Option<usize>),
    Y(Option<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluates component `i` of the expression at `(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64], i: usize) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X(None)) => x[i],
            Expr::Var(Var::Y(None)) => y[i],
            Expr::Var(Var::X(Some(j))) => x[j - 1],
            Expr::Var(Var::Y(Some(j))) => y[j - 1],
            Expr::Neg(e) => -e.eval(x, y, i),
            Expr::Add(a, b) => a.eval(x, y, i) + b.eval(x, y, i),
            Expr::Sub(a, b) => a.eval(x, y, i) - b.eval(x, y, i),
            Expr::Mul(a, b) => a.eval(x, y, i) * b.eval(x, y, i),
            Expr::Div(a, b) => a.eval(x, y, i) / b.eval(x, y, i),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X(None)) => f.write_str("x"),
            Expr::Var(Var::Y(None)) => f.write_str("y"),
            Expr::Var(Var::X(Some(j))) => write!(f, "x{j}"),
            Expr::Var(Var::Y(Some(j))) => write!(f, "y{j}"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

/// A parsed map definition: one or more image points, each a list of
/// component expressions (length 1 for scalar elements).
#[derive(Debug, Clone, PartialEq)]
pub struct MapExpr {
    pub elements: Vec<Vec<Expr>>,
    /// Written with set braces.
    pub is_set: bool,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            column,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&c| match c {
            '−' => '-',
            '·' | '×' => '*',
            c => c,
        })
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            return Ok(());
        }
        match self.peek() {
            Some(found) => self.err(self.column(), format!("expected '{c}', found '{found}'")),
            None => self.err(self.column(), format!("expected '{c}', found end of input")),
        }
    }

    fn map(&mut self) -> Result<MapExpr, ExprError> {
        if self.peek().is_none() {
            return self.err(1, "empty expression");
        }
        let out = if self.eat('{') {
            let mut elements = vec![self.element()?];
            while self.eat(',') {
                elements.push(self.element()?);
            }
            self.expect('}')?;
            MapExpr {
                elements,
                is_set: true,
            }
        } else {
            MapExpr {
                elements: vec![self.element()?],
                is_set: false,
            }
        };
        if let Some(c) = self.peek() {
            return self.err(self.column(), format!("unexpected '{c}' after expression"));
        }
        Ok(out)
    }

    fn element(&mut self) -> Result<Vec<Expr>, ExprError> {
        if self.eat('[') {
            let mut comps = vec![self.expr()?];
            while self.eat(',') {
                comps.push(self.expr()?);
            }
            self.expect(']')?;
            Ok(comps)
        } else {
            Ok(vec![self.expr()?])
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let next = self.peek();
        let start = self.column();
        match next {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.variable(),
            Some(c) => self.err(start, format!("unexpected '{c}'")),
            None => self.err(start, "unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) => Ok(Expr::Num(v)),
            Err(_) => self.err(start + 1, format!("invalid number '{text}'")),
        }
    }

    fn variable(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let (head, index) = name.split_at(1);
        let index = if index.is_empty() {
            None
        } else {
            match index.parse::<usize>() {
                Ok(j) if j >= 1 && index.chars().all(|c| c.is_ascii_digit()) => Some(j),
                _ => return self.err(start + 1, format!("unknown variable '{name}'")),
            }
        };
        match head {
            "x" => Ok(Expr::Var(Var::X(index))),
            "y" => Ok(Expr::Var(Var::Y(index))),
            _ => self.err(start + 1, format!("unknown variable '{name}'")),
        }
    }
}

/// Parses a map definition without checking it against a dimension.
pub fn parse(src: &str) -> Result<MapExpr, ExprError> {
    Parser::new(src).map()
}

fn max_index(e: &Expr) -> usize {
    match e {
        Expr::Num(_) | Expr::Var(Var::X(None) | Var::Y(None)) => 0,
        Expr::Var(Var::X(Some(j)) | Var::Y(Some(j))) => *j,
        Expr::Neg(a) => max_index(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            max_index(a).max(max_index(b))
        }
    }
}

/// A map definition checked against a space dimension, ready to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMap {
    dim: usize,
    elements: Vec<Vec<Expr>>,
}

impl ExprMap {
    pub fn compile(src: &str, dim: usize, multi: bool) -> Result<Self, ExprError> {
        let parsed = parse(src)?;
        if parsed.is_set && !multi {
            return Err(ExprError {
                column: 1,
                message: "set literal needs a multi map".into(),
            });
        }
        for (n, element) in parsed.elements.iter().enumerate() {
            if element.len() != 1 && element.len() != dim {
                return Err(ExprError {
                    column: 1,
                    message: format!(
                        "element {} has {} components, expected {dim}",
                        n + 1,
                        element.len()
                    ),
                });
            }
            if let Some(j) = element.iter().map(max_index).max().filter(|&j| j > dim) {
                return Err(ExprError {
                    column: 1,
                    message: format!("variable index {j} exceeds dimension {dim}"),
                });
            }
        }
        Ok(ExprMap {
            dim,
            elements: parsed.elements,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn element(&self, n: usize, x: &Point, y: &Point) -> coupled_fpi_core::Result<Point> {
        for p in [x, y] {
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: p.dim(),
                });
            }
        }
        let comps = &self.elements[n];
        let coords: Vec<f64> = (0..self.dim)
            .map(|i| {
                let e = if comps.len() == 1 {
                    &comps[0]
                } else {
                    &comps[i]
                };
                e.eval(x.coords(), y.coords(), i)
            })
            .collect();
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Map(format!("non-finite value at ({x}, {y})")));
        }
        Ok(Point::new(coords))
    }
}

impl CoupledMap for ExprMap {
    fn eval(&self, x: &Point, y: &Point) -> coupled_fpi_core::Result<Point> {
        self.element(0, x, y)
    }
}

impl CoupledMultiMap for ExprMap {
    fn eval(&self, x: &Point, y: &Point) -> coupled_fpi_core::Result<FiniteSet> {
        let points = (0..self.elements.len())
            .map(|n| self.element(n, x, y))
            .collect::<coupled_fpi_core::Result<Vec<_>>>()?;
        FiniteSet::new(points)
    }
}
