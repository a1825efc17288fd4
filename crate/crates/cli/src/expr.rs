//! Recursive-descent parser for rational expressions in one variable.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/'|adjacency) factor)*
//! factor := ('+'|'-') factor | base ('^' int)?
//! base   := number | 'sqrt' '(' int ')' | 'z' | 'w' | '(' expr ')'
//! ```
//!
//! Values are built directly; no tree is kept.

use std::fmt;

use shareval_core::{Error, FieldElem, Poly, Rational, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed expression and the variable it uses, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub value: RationalFunction,
    pub var: Option<char>,
}

impl Parsed {
    pub fn as_constant(&self) -> Option<FieldElem> {
        self.value.as_constant()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Var(char),
    Sqrt,
    Op(char),
    Open,
    Close,
    /// Unicode superscript exponent.
    Sup(i64),
    End,
}

fn superscript(c: char) -> Option<i64> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|s| s == c).map(|d| d as i64)
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, m: String| ParseError { column: col + 1, message: m };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                s.push(chars[i]);
                i += 1;
            }
            out.push((Tok::Num(decimal(&s).ok_or_else(|| err(start, format!("bad number `{s}`")))?), start));
            continue;
        }
        if c.is_alphabetic() && superscript(c).is_none() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_alphanumeric() && superscript(chars[i]).is_none() {
                s.push(chars[i]);
                i += 1;
            }
            match s.as_str() {
                "sqrt" => out.push((Tok::Sqrt, start)),
                "z" | "w" => out.push((Tok::Var(s.chars().next().unwrap()), start)),
                // adjacency like `zw` is not a product of two variables, it is an error
                _ => return Err(err(start, format!("unknown name `{s}`"))),
            }
            continue;
        }
        if let Some(d) = superscript(c) {
            let mut n = d;
            i += 1;
            while i < chars.len() {
                match superscript(chars[i]) {
                    Some(d) => {
                        n = n * 10 + d;
                        i += 1;
                    }
                    None => break,
                }
            }
            out.push((Tok::Sup(n), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '−' => Tok::Op('-'),
            '·' | '×' => Tok::Op('*'),
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => return Err(err(start, format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

fn decimal(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: Rational = digits.parse().ok()?;
    let scale: Rational = format!("1{}", "0".repeat(frac.len())).parse().ok()?;
    Some(&n / &scale)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var: Option<char>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1 + 1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.column(), message: msg.into() })
    }

    fn lift(&self, col: usize, r: Result<RationalFunction, Error>) -> Result<RationalFunction, ParseError> {
        r.map_err(|e| ParseError {
            column: col,
            message: match e {
                Error::IncompatibleRadicands(a, b) => format!("mixed radicands sqrt({a}) and sqrt({b})"),
                Error::ZeroPolynomial("denominator") | Error::DivisionByZero => "division by zero".into(),
                other => other.to_string(),
            },
        })
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                -&self.term()?
            }
            Tok::Op('+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let col = self.column();
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.lift(col, acc.add_checked(&t))?;
                }
                Tok::Op('-') => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.lift(col, acc.sub_checked(&t))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_base(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Var(_) | Tok::Sqrt | Tok::Open)
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let col = self.column();
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let f = self.factor()?;
                    acc = self.lift(col, acc.mul_checked(&f))?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let f = self.factor()?;
                    if f.is_zero() {
                        return Err(ParseError { column: col, message: "division by zero".into() });
                    }
                    acc = self.lift(col, acc.div_checked(&f))?;
                }
                _ if self.starts_base() => {
                    let f = self.factor()?;
                    acc = self.lift(col, acc.mul_checked(&f))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                return Ok(-&self.factor()?);
            }
            Tok::Op('+') => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        let col = self.column();
        let e = match self.peek() {
            Tok::Op('^') => {
                self.bump();
                self.exponent()?
            }
            Tok::Sup(n) => {
                let n = *n;
                self.bump();
                n
            }
            _ => return Ok(base),
        };
        if base.is_zero() && e < 0 {
            return Err(ParseError { column: col, message: "division by zero".into() });
        }
        if e.unsigned_abs() > 1000 {
            return Err(ParseError { column: col, message: format!("exponent {e} is too large") });
        }
        self.lift(col, base.powi(e))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = matches!(self.peek(), Tok::Open);
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                true
            }
            Tok::Op('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let n = match self.peek() {
            Tok::Num(r) if r.is_integer() => match r.to_i64() {
                Some(n) => n,
                None => return self.fail("exponent out of range"),
            },
            _ => return self.fail("exponent must be an integer"),
        };
        self.bump();
        if paren {
            if !matches!(self.peek(), Tok::Close) {
                return self.fail("expected `)`");
            }
            self.bump();
        }
        Ok(if neg { -n } else { n })
    }

    fn base(&mut self) -> Result<RationalFunction, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::Num(r) => Ok(RationalFunction::constant(FieldElem::from_rational(r))),
            Tok::Var(v) => {
                match self.var {
                    Some(u) if u != v => {
                        return Err(ParseError { column: col, message: format!("mixed variables {u} and {v}") })
                    }
                    _ => self.var = Some(v),
                }
                Ok(RationalFunction::from_poly(Poly::x()))
            }
            Tok::Sqrt => {
                if !matches!(self.bump(), Tok::Open) {
                    return Err(ParseError { column: col + 4, message: "expected `(` after sqrt".into() });
                }
                let neg = matches!(self.peek(), Tok::Op('-'));
                if neg {
                    self.bump();
                }
                let n = match self.peek() {
                    Tok::Num(r) if r.is_integer() => r.to_i64(),
                    _ => None,
                };
                let Some(n) = n else {
                    return self.fail("sqrt takes an integer");
                };
                self.bump();
                if !matches!(self.peek(), Tok::Close) {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(RationalFunction::constant(FieldElem::sqrt(if neg { -n } else { n })))
            }
            Tok::Open => {
                let e = self.expr()?;
                if !matches!(self.peek(), Tok::Close) {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(ParseError { column: col, message: "unexpected end of input".into() }),
            Tok::Close => Err(ParseError { column: col, message: "unexpected `)`".into() }),
            Tok::Op(c) => Err(ParseError { column: col, message: format!("unexpected `{c}`") }),
            Tok::Sup(_) => Err(ParseError { column: col, message: "unexpected exponent".into() }),
        }
    }
}

/// Parses `text` to an exact rational function (a constant if no variable appears).
pub fn parse_expression(text: &str) -> Result<Parsed, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, var: None };
    let value = p.expr()?;
    if !matches!(p.peek(), Tok::End) {
        return p.fail("unexpected input after expression");
    }
    Ok(Parsed { value, var: p.var })
}

/// Parses a constant such as `-2`, `sqrt(5)/2` or `1/3`.
pub fn parse_constant(text: &str) -> Result<FieldElem, ParseError> {
    let p = parse_expression(text)?;
    p.as_constant().ok_or(ParseError { column: 1, message: format!("`{text}` is not a constant") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn worked_examples() {
        let p = parse_expression("(48*w^2+32*w+3)/(16*w*(2*w+1))").unwrap();
        assert_eq!(p.value, rf(&[3, 32, 48], &[0, 16, 32]));
        assert_eq!(p.var, Some('w'));
        assert_eq!(parse_expression("(48w² + 32w + 3)/(16 w (2w + 1))").unwrap().value, p.value);
        assert_eq!(parse_expression("2/(1-w)").unwrap().value, rf(&[2], &[1, -1]));
        let r1 = parse_expression("(((1-sqrt(5))/2) + ((1+sqrt(5))/2)*w)^2 / (1+w)^2").unwrap();
        assert_eq!(r1.value.radicand().unwrap(), 5);
    }

    #[test]
    fn negative_exponents_and_unary() {
        assert_eq!(parse_expression("w^-2").unwrap().value, rf(&[1], &[0, 0, 1]));
        assert_eq!(parse_expression("-z^2").unwrap().value, rf(&[0, 0, -1], &[1]));
        assert_eq!(parse_expression("2*-z").unwrap().value, rf(&[0, -2], &[1]));
        assert_eq!(parse_constant("0.25").unwrap(), FieldElem::from_ratio(1, 4));
        assert_eq!(parse_constant("-sqrt(5)/2").unwrap(), -(FieldElem::sqrt(5) / FieldElem::from_int(2)));
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_expression("z + w").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(e.message.contains("mixed variables"));
        let e = parse_expression("sqrt(2) + sqrt(3)").unwrap_err();
        assert!(e.message.contains("mixed radicands"), "{e}");
        assert_eq!(parse_expression("(z+1").unwrap_err().column, 5);
        assert!(parse_expression("z^(1/2)").is_err());
        assert!(parse_expression("1/(z-z)").is_err());
        assert!(parse_expression("x+1").is_err());
    }
}
