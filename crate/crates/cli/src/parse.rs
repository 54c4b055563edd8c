//! The family file format: `key=value` statements separated by `;` or
//! newlines, `#` comments, bracketed lists, and expressions in `t`.
//!
//! ```text
//! degree=1; num=[1, -t]; den=[1/t, 1]
//! t0=1/2
//! M = [[t^(1/2), 0], [0, t^(-1/2)]]
//! ```
//!
//! `^` takes integer exponents; a bare `t` also accepts `t^(p/q)`.

use std::fmt::Write as _;

use num::{BigInt, BigRational, ToPrimitive};
use ratdyn_core::ratfunc::RatFunc;
use ratdyn_core::Exponent;
use thiserror::Error;

/// Largest exponent magnitude accepted in an expression.
const MAX_EXPONENT: i64 = 4096;
/// Largest supported degree.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("arity error: {key} has {found} entries, expected {expected}")]
    Arity { key: String, expected: usize, found: usize },
    #[error("degree error: {0}")]
    Degree(String),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct FamilyFile {
    pub degree: usize,
    pub num: Vec<RatFunc>,
    pub den: Vec<RatFunc>,
    pub t0: Option<BigRational>,
    pub samples: Option<u32>,
    pub precision: Option<i64>,
    pub max_ramification: Option<u32>,
    pub search_depth: Option<i64>,
    pub max_probes: Option<usize>,
    pub iterate_power: Option<u32>,
    /// Conjugating matrix `[[α, β], [γ, δ]]`.
    pub matrix: Option<[RatFunc; 4]>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Sep,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let (mut line, mut col) = (1, 0);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        col += 1;
        let (l, k) = (line, col);
        match c {
            '\n' => {
                if depth == 0 {
                    out.push(Token { tok: Tok::Sep, line: l, col: k });
                }
                line += 1;
                col = 0;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            ';' => out.push(Token { tok: Tok::Sep, line: l, col: k }),
            c if c.is_whitespace() => {}
            c if c.is_ascii_digit() => {
                let mut s = c.to_string();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                out.push(Token { tok: Tok::Int(s.parse().expect("digits")), line: l, col: k });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                out.push(Token { tok: Tok::Ident(s), line: l, col: k });
            }
            '(' | '[' => {
                depth += 1;
                out.push(Token { tok: Tok::Sym(c), line: l, col: k });
            }
            ')' | ']' => {
                depth -= 1;
                out.push(Token { tok: Tok::Sym(c), line: l, col: k });
            }
            '+' | '-' | '*' | '/' | '^' | '=' | ',' => out.push(Token { tok: Tok::Sym(c), line: l, col: k }),
            other => {
                return Err(ParseError::Syntax { line: l, col: k, msg: format!("unexpected character '{other}'") })
            }
        }
    }
    out.push(Token { tok: Tok::End, line, col: col + 1 });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Int(n) => format!("'{n}'"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::Sep => "end of statement".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{c}', found {}", Self::describe(self.peek()))))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if *self.peek() == Tok::Sym('/') {
                let at = self.pos + 1;
                self.next();
                let rhs = self.unary()?;
                acc = acc.div(&rhs).map_err(|_| {
                    let t = &self.toks[at];
                    ParseError::Syntax { line: t.line, col: t.col, msg: "division by zero".into() }
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let bare_t = *self.peek() == Tok::Ident("t".into());
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.pos;
        let exp = self.exponent()?;
        if exp.is_integer() {
            return base.pow(exp.to_integer()).map_err(|_| {
                let t = &self.toks[at];
                ParseError::Syntax { line: t.line, col: t.col, msg: "zero raised to a negative power".into() }
            });
        }
        if !bare_t {
            let t = &self.toks[at];
            return Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: "fractional exponents are only allowed on t".into(),
            });
        }
        Ok(RatFunc::t_pow(exp))
    }

    /// `n`, `-n`, `(n)`, `(-n)` or `(p/q)`.
    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let mut e = Exponent::from(self.small_int()?);
        if paren {
            if self.eat('/') {
                let at = self.pos;
                let d = self.small_int()?;
                if d == 0 {
                    let t = &self.toks[at];
                    return Err(ParseError::Syntax { line: t.line, col: t.col, msg: "zero denominator".into() });
                }
                e /= d;
            }
            self.expect(')')?;
        }
        Ok(if neg { -e } else { e })
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => match n.to_i64().filter(|v| *v <= MAX_EXPONENT) {
                Some(v) => {
                    self.next();
                    Ok(v)
                }
                None => Err(self.error_here(format!("exponent larger than {MAX_EXPONENT}"))),
            },
            other => Err(self.error_here(format!("expected an integer, found {}", Self::describe(&other)))),
        }
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(RatFunc::constant(BigRational::from_integer(n)))
            }
            Tok::Ident(s) if s == "t" => {
                self.next();
                Ok(RatFunc::t())
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(self.error_here(format!("expected an expression, found {}", Self::describe(&other)))),
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    /// A constant rational expression.
    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let at = self.pos;
        let e = self.expr()?;
        constant_value(&e).ok_or_else(|| {
            let t = &self.toks[at];
            ParseError::Syntax { line: t.line, col: t.col, msg: "expected a constant".into() }
        })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let at = self.pos;
        let v = self.rational()?;
        v.is_integer().then(|| v.to_integer().to_i64()).flatten().ok_or_else(|| {
            let t = &self.toks[at];
            ParseError::Syntax { line: t.line, col: t.col, msg: "expected an integer".into() }
        })
    }
}

fn constant_value(e: &RatFunc) -> Option<BigRational> {
    (e.num().degree().unwrap_or(0) == 0 && e.den().degree() == Some(0)).then(|| e.num().coeff(0) / e.den().coeff(0))
}

pub fn parse_family(text: &str) -> Result<FamilyFile, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut file = FamilyFile::default();
    let mut degree: Option<i64> = None;
    let (mut num, mut den) = (None, None);
    loop {
        match p.peek().clone() {
            Tok::End => break,
            Tok::Sep => {
                p.next();
                continue;
            }
            Tok::Ident(key) => {
                let key_at = p.pos;
                p.next();
                p.expect('=')?;
                let fail_at = |p: &Parser, msg: String| {
                    let t = &p.toks[key_at];
                    ParseError::Syntax { line: t.line, col: t.col, msg }
                };
                match key.as_str() {
                    "degree" => degree = Some(p.integer()?),
                    "num" => num = Some(p.list(Parser::expr)?),
                    "den" => den = Some(p.list(Parser::expr)?),
                    "t0" => file.t0 = Some(p.rational()?),
                    "samples" => file.samples = Some(nonneg(p.integer()?).ok_or_else(|| fail_at(&p, "samples must be nonnegative".into()))?),
                    "precision" => file.precision = Some(p.integer()?),
                    "max_ramification" => file.max_ramification = Some(nonneg(p.integer()?).ok_or_else(|| fail_at(&p, "max_ramification must be nonnegative".into()))?),
                    "search_depth" => file.search_depth = Some(p.integer()?),
                    "max_probes" => file.max_probes = Some(nonneg(p.integer()?).ok_or_else(|| fail_at(&p, "max_probes must be nonnegative".into()))?),
                    "iterate_power" => file.iterate_power = Some(nonneg(p.integer()?).ok_or_else(|| fail_at(&p, "iterate_power must be nonnegative".into()))?),
                    "M" => {
                        let rows = p.list(|p| p.list(Parser::expr))?;
                        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                            return Err(ParseError::Arity { key: "M".into(), expected: 2, found: rows.len() });
                        }
                        let [r0, r1]: [Vec<RatFunc>; 2] = rows.try_into().expect("two rows");
                        let [a, b]: [RatFunc; 2] = r0.try_into().expect("two entries");
                        let [c, d]: [RatFunc; 2] = r1.try_into().expect("two entries");
                        file.matrix = Some([a, b, c, d]);
                    }
                    other => return Err(fail_at(&p, format!("unknown key '{other}'"))),
                }
                if !matches!(p.peek(), Tok::Sep | Tok::End) {
                    return Err(p.error_here(format!("expected end of statement, found {}", Parser::describe(p.peek()))));
                }
            }
            other => return Err(p.error_here(format!("expected a key, found {}", Parser::describe(&other)))),
        }
    }
    let num = num.ok_or_else(|| ParseError::Degree("missing num".into()))?;
    let den = den.ok_or_else(|| ParseError::Degree("missing den".into()))?;
    let d = match degree {
        Some(d) if d < 1 => return Err(ParseError::Degree(format!("degree must be at least 1, got {d}"))),
        Some(d) => d as usize,
        None => num.len().checked_sub(1).filter(|d| *d >= 1).ok_or_else(|| ParseError::Degree("cannot infer degree from num".into()))?,
    };
    if d > MAX_DEGREE {
        return Err(ParseError::Degree(format!("degree {d} exceeds the supported maximum {MAX_DEGREE}")));
    }
    for (key, list) in [("num", &num), ("den", &den)] {
        if list.len() != d + 1 {
            return Err(ParseError::Arity { key: key.into(), expected: d + 1, found: list.len() });
        }
    }
    file.degree = d;
    file.num = num;
    file.den = den;
    Ok(file)
}

fn nonneg<T: TryFrom<i64>>(v: i64) -> Option<T> {
    T::try_from(v).ok()
}

/// Canonical text form; [`parse_family`] reads it back to the same value.
pub fn serialize_family(file: &FamilyFile) -> String {
    let list = |v: &[RatFunc]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "degree={}", file.degree);
    let _ = writeln!(out, "num=[{}]", list(&file.num));
    let _ = writeln!(out, "den=[{}]", list(&file.den));
    if let Some([a, b, c, d]) = &file.matrix {
        let _ = writeln!(out, "M=[[{a}, {b}], [{c}, {d}]]");
    }
    if let Some(t0) = &file.t0 {
        let _ = writeln!(out, "t0={t0}");
    }
    let opt = [
        ("samples", file.samples.map(|v| v.to_string())),
        ("precision", file.precision.map(|v| v.to_string())),
        ("max_ramification", file.max_ramification.map(|v| v.to_string())),
        ("search_depth", file.search_depth.map(|v| v.to_string())),
        ("max_probes", file.max_probes.map(|v| v.to_string())),
        ("iterate_power", file.iterate_power.map(|v| v.to_string())),
    ];
    for (k, v) in opt {
        if let Some(v) = v {
            let _ = writeln!(out, "{k}={v}");
        }
    }
    out
}
