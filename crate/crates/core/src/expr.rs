//! A small expression language over two real variables `x` and `y`.
//!
//! Grammar (standard precedence, left-associative binary operators):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)*
//! exponent := ['-'] INTEGER | '(' ['-'] INTEGER ')'
//! primary  := NUMBER | 'x' | 'y' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC     := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Exponents must be integer literals so that every expression has an exact
//! symbolic derivative in the same language.

use std::fmt;

/// Syntax tree of a parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Y,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownIdentifier(String),
    NonIntegerExponent(String),
    InvalidNumber(String),
    ExponentNotLiteral,
    ExponentOutOfRange(String),
    TooLong(usize),
}

/// Parse failure with the byte offset at which it was detected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token {t:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier {s:?}"),
            ParseErrorKind::NonIntegerExponent(s) => write!(f, "non-integer exponent {s}"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number {s:?}"),
            ParseErrorKind::ExponentNotLiteral => {
                write!(f, "exponent must be an integer literal")
            }
            ParseErrorKind::TooLong(n) => {
                write!(f, "expression has {n} tokens, limit is {MAX_TOKENS}")
            }
            ParseErrorKind::ExponentOutOfRange(s) => {
                write!(f, "exponent {s} outside [-{MAX_EXPONENT}, {MAX_EXPONENT}]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Num(s) | Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Token::Plus, start)),
            b'-' => out.push((Token::Minus, start)),
            b'*' => out.push((Token::Star, start)),
            b'/' => out.push((Token::Slash, start)),
            b'^' => out.push((Token::Caret, start)),
            b'(' => out.push((Token::LParen, start)),
            b')' => out.push((Token::RParen, start)),
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
                out.push((Token::Num(src[start..i].to_string()), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let c = src[start..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(c),
                    position: start,
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

// Bounds recursion on adversarial input such as "((((...".
const MAX_DEPTH: usize = 256;

/// Longest accepted token stream; keeps tree depth (and recursion in
/// evaluation and differentiation) bounded.
pub const MAX_TOKENS: usize = 4096;

/// Largest accepted exponent magnitude.
pub const MAX_EXPONENT: i32 = 1024;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.offset(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.text())),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expect(&mut self, tok: Token) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.unexpected());
        }
        let mut lhs = self.term(depth)?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term(depth)?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term(depth)?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(depth)?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary(depth)?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary(depth)?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self, depth: usize) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.unexpected());
        }
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary(depth + 1)?)));
        }
        self.power(depth)
    }

    fn power(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut base = self.primary(depth)?;
        while self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = self.peek() == Some(&Token::LParen);
        if parenthesized {
            self.pos += 1;
        }
        let negative = self.peek() == Some(&Token::Minus);
        if negative {
            self.pos += 1;
        }
        let at = self.offset();
        let text = match self.peek() {
            Some(Token::Num(s)) => s.clone(),
            Some(_) => return Err(self.err(ParseErrorKind::ExponentNotLiteral)),
            None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
        };
        if !text.bytes().all(|b| b.is_ascii_digit()) {
            let shown = if negative { format!("-{text}") } else { text };
            return Err(ParseError {
                kind: ParseErrorKind::NonIntegerExponent(shown),
                position: at,
            });
        }
        let magnitude: i32 = text
            .parse()
            .ok()
            .filter(|m| *m <= MAX_EXPONENT)
            .ok_or_else(|| ParseError {
                kind: ParseErrorKind::ExponentOutOfRange(text.clone()),
                position: at,
            })?;
        self.pos += 1;
        if parenthesized {
            self.expect(Token::RParen)?;
        }
        Ok(if negative { -magnitude } else { magnitude })
    }

    fn primary(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err(ParseErrorKind::UnexpectedEnd));
        };
        match tok {
            Token::Num(text) => {
                let value: f64 = text.parse().ok().filter(|v: &f64| v.is_finite()).ok_or(
                    ParseError {
                        kind: ParseErrorKind::InvalidNumber(text.clone()),
                        position: at,
                    },
                )?;
                self.pos += 1;
                Ok(Expr::Const(value))
            }
            Token::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "y" => Ok(Expr::Y),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        self.expect(Token::LParen)?;
                        let arg = Box::new(self.expr(depth + 1)?);
                        self.expect(Token::RParen)?;
                        Ok(match name.as_str() {
                            "sin" => Expr::Sin(arg),
                            "cos" => Expr::Cos(arg),
                            _ => Expr::Exp(arg),
                        })
                    }
                    _ => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        position: at,
                    }),
                }
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.expr(depth + 1)?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression in `x` and `y`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    if tokens.len() > MAX_TOKENS {
        return Err(ParseError {
            kind: ParseErrorKind::TooLong(tokens.len()),
            position: tokens[MAX_TOKENS].1,
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: src.len(),
    };
    let e = parser.expr(0)?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.unexpected());
    }
    Ok(e)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p + q),
        (Expr::Const(z), _) if *z == 0.0 => b,
        (_, Expr::Const(z)) if *z == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p - q),
        (_, Expr::Const(z)) if *z == 0.0 => a,
        (Expr::Const(z), _) if *z == 0.0 => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p * q),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if *z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), _) if *o == 1.0 => b,
        (_, Expr::Const(o)) if *o == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(base: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Const(1.0),
        1 => base,
        _ => Expr::Pow(Box::new(base), n),
    }
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Y => y,
            Expr::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Expr::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Expr::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Expr::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Expr::Pow(a, n) => a.eval(x, y).powi(*n),
            Expr::Sin(a) => a.eval(x, y).sin(),
            Expr::Cos(a) => a.eval(x, y).cos(),
            Expr::Exp(a) => a.eval(x, y).exp(),
            Expr::Neg(a) => -a.eval(x, y),
        }
    }

    /// Structural derivative with light constant folding.
    pub fn derivative(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::X => Expr::Const(if var == Var::X { 1.0 } else { 0.0 }),
            Expr::Y => Expr::Const(if var == Var::Y { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative(var);
                let db = b.derivative(var);
                if matches!(db, Expr::Const(z) if z == 0.0) {
                    return match da {
                        Expr::Const(z) if z == 0.0 => Expr::Const(0.0),
                        da => Expr::Div(Box::new(da), b.clone()),
                    };
                }
                let numerator = sub(mul(da, (**b).clone()), mul((**a).clone(), db));
                match numerator {
                    Expr::Const(z) if z == 0.0 => Expr::Const(0.0),
                    n => Expr::Div(Box::new(n), Box::new(pow((**b).clone(), 2))),
                }
            }
            Expr::Pow(a, n) => {
                if *n == 0 {
                    return Expr::Const(0.0);
                }
                mul(
                    mul(Expr::Const(f64::from(*n)), pow((**a).clone(), n - 1)),
                    a.derivative(var),
                )
            }
            Expr::Sin(a) => mul(Expr::Cos(a.clone()), a.derivative(var)),
            Expr::Cos(a) => neg(mul(Expr::Sin(a.clone()), a.derivative(var))),
            Expr::Exp(a) => mul(Expr::Exp(a.clone()), a.derivative(var)),
            Expr::Neg(a) => neg(a.derivative(var)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::X | Expr::Y => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) | Expr::Neg(a) => {
                1 + a.node_count()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed for `parse` to rebuild the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(0-{})", -c)
            }
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => f.write_str("x"),
            Expr::Y => f.write_str("y"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, n) => {
                write_child(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_value_and_partial() {
        let e = parse("x^2*y").unwrap();
        assert_eq!(e.eval(1.0, 3.0), 3.0);
        assert_eq!(e.derivative(Var::X).eval(1.0, 3.0), 6.0);
        assert_eq!(e.derivative(Var::Y).eval(1.0, 3.0), 1.0);
    }

    #[test]
    fn trig_product() {
        let e = parse("sin(x)*cos(y)").unwrap();
        assert_eq!(e.eval(0.0, 0.0), 0.0);
        assert_eq!(e.derivative(Var::X).eval(0.0, 0.0), 1.0);
    }

    #[test]
    fn rejects_fractional_exponent() {
        let err = parse("x^2.5").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonIntegerExponent("2.5".into()));
        assert_eq!(err.position, 2);
    }

    #[test]
    fn error_kinds_and_positions() {
        let err = parse("x + foo").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(err.position, 4);

        let err = parse("x*(y+1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(err.position, 6);

        assert_eq!(parse("x $ y").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(parse("x^y").unwrap_err().kind, ParseErrorKind::ExponentNotLiteral);
        assert!(matches!(parse("1e999").unwrap_err().kind, ParseErrorKind::InvalidNumber(_)));
        assert!(matches!(parse("1..2").unwrap_err().kind, ParseErrorKind::InvalidNumber(_)));
        assert!(matches!(parse("x y").unwrap_err().kind, ParseErrorKind::UnexpectedToken(_)));
        assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(0.0, 0.0), -4.0);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval(0.0, 0.0), 1.0);
        assert_eq!(parse("-x^2").unwrap().eval(3.0, 0.0), -9.0);
        assert_eq!(parse("2*x^-1").unwrap().eval(4.0, 0.0), 0.5);
        assert_eq!(parse("x^(-2)").unwrap().eval(2.0, 0.0), 0.25);
        assert_eq!(parse("(x^2)^3").unwrap().eval(2.0, 0.0), 64.0);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = "(".repeat(10_000) + "x" + &")".repeat(10_000);
        assert!(parse(&src).is_err());
        let src = "-".repeat(10_000) + "x";
        assert!(parse(&src).is_err());
    }

    #[test]
    fn derivative_of_quotient_and_chain() {
        let e = parse("exp(x*y)/(1 + x^2)").unwrap();
        let (x, y) = (0.7, -0.4);
        let h = 1e-6;
        let fd = (e.eval(x + h, y) - e.eval(x - h, y)) / (2.0 * h);
        assert!((e.derivative(Var::X).eval(x, y) - fd).abs() < 1e-8);
        let fd = (e.eval(x, y + h) - e.eval(x, y - h)) / (2.0 * h);
        assert!((e.derivative(Var::Y).eval(x, y) - fd).abs() < 1e-8);
    }

    #[test]
    fn negative_constants_print_reparseably() {
        let d = parse("cos(x)").unwrap().derivative(Var::X);
        let again = parse(&d.to_string()).unwrap();
        assert_eq!(again.eval(0.3, 0.0), d.eval(0.3, 0.0));
        let e = Expr::Mul(Box::new(Expr::Const(-3.0)), Box::new(Expr::X));
        assert_eq!(parse(&e.to_string()).unwrap().eval(2.0, 0.0), -6.0);
    }
}
