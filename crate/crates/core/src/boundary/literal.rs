//! Function literals: a structured JSON object or a small infix grammar over
//! `+ - * / ^`, the variable `z`, the unit `i` and decimal numbers.
//! Numbers are read exactly, so every literal carries Gaussian-rational data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use super::UnitCircleFunction;
use crate::error::{HbError, Result};
use crate::poly::QPoly;
use crate::scalar::{QC, Scalar};

fn perr(reason: impl Into<String>) -> HbError {
    HbError::Parse { reason: reason.into() }
}

/// Parses either literal form into a function on the disk.
pub fn parse_function(s: &str) -> Result<UnitCircleFunction> {
    let t = s.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| perr(e.to_string()))?;
        return from_json(&v);
    }
    let (n, d) = parse_infix(t)?;
    UnitCircleFunction::rational_exact(n, d)
}

/// Like [`parse_function`] but tolerating boundary poles.
pub fn parse_function_singular(s: &str) -> Result<UnitCircleFunction> {
    let (n, d) = parse_exact(s)?;
    UnitCircleFunction::from_exact(n, d, true)
}

/// Exact numerator and denominator of a non-Blaschke literal.
pub fn parse_exact(s: &str) -> Result<(QPoly, QPoly)> {
    let t = s.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| perr(e.to_string()))?;
        return json_rational(&v);
    }
    parse_infix(t)
}

/// Exact decimal or fraction, e.g. `-1.25`, `3e-2`, `1/3`.
pub fn parse_number(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let d = parse_number(b)?;
        if d.is_zero() {
            return Err(perr("zero denominator"));
        }
        return Ok(parse_number(a)? / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| perr(format!("bad exponent in {s:?}")))?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(perr(format!("bad number {s:?}")));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| perr(format!("bad number {s:?}")))?;
    let e = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if e >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, e as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-e) as usize));
    }
    Ok(if neg { -r } else { r })
}

fn json_real(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => parse_number(&n.to_string()),
        Value::String(s) => parse_number(s),
        _ => Err(perr(format!("expected a number, got {v}"))),
    }
}

fn json_complex(v: &Value) -> Result<QC> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(QC::new(json_real(&a[0])?, json_real(&a[1])?)),
        Value::Array(_) => Err(perr("complex entries are [re, im] pairs")),
        other => Ok(QC::new(json_real(other)?, BigRational::zero())),
    }
}

fn json_poly(v: &Value) -> Result<QPoly> {
    match v {
        Value::Array(cs) => Ok(QPoly::new(cs.iter().map(json_complex).collect::<Result<_>>()?)),
        Value::Object(_) => {
            let (n, d) = json_rational(v)?;
            if d.degree() != Some(0) {
                return Err(perr("expected a polynomial"));
            }
            Ok(n.scale(&(QC::one() / d.coeff(0))))
        }
        Value::String(s) => {
            let (n, d) = parse_infix(s)?;
            if d.degree() != Some(0) {
                return Err(perr("expected a polynomial"));
            }
            Ok(n.scale(&(QC::one() / d.coeff(0))))
        }
        _ => Err(perr("expected a coefficient list")),
    }
}

fn json_rational(v: &Value) -> Result<(QPoly, QPoly)> {
    let ty = v.get("type").and_then(Value::as_str).ok_or_else(|| perr("missing \"type\""))?;
    match ty {
        "poly" => Ok((json_poly(v.get("coeffs").ok_or_else(|| perr("missing \"coeffs\""))?)?, QPoly::one())),
        "rational" => {
            let n = json_poly(v.get("num").ok_or_else(|| perr("missing \"num\""))?)?;
            let d = json_poly(v.get("den").ok_or_else(|| perr("missing \"den\""))?)?;
            Ok((n, d))
        }
        "blaschke" => {
            let (zeros, phase) = json_blaschke(v)?;
            Ok(blaschke_exact(&zeros, &phase))
        }
        other => Err(perr(format!("unknown type {other:?}"))),
    }
}

fn json_blaschke(v: &Value) -> Result<(Vec<QC>, QC)> {
    let zeros = match v.get("zeros") {
        Some(Value::Array(zs)) => zs.iter().map(json_complex).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
        _ => return Err(perr("\"zeros\" must be a list")),
    };
    let phase = match v.get("phase") {
        Some(p) => json_complex(p)?,
        None => QC::one(),
    };
    Ok((zeros, phase))
}

fn blaschke_exact(zeros: &[QC], phase: &QC) -> (QPoly, QPoly) {
    let mut n = QPoly::constant(phase.clone());
    let mut d = QPoly::one();
    for a in zeros {
        n = &n * &QPoly::new(vec![-a.clone(), QC::one()]);
        d = &d * &QPoly::new(vec![QC::one(), -a.conj()]);
    }
    (n, d)
}

fn from_json(v: &Value) -> Result<UnitCircleFunction> {
    if v.get("type").and_then(Value::as_str) == Some("blaschke") {
        let (zeros, phase) = json_blaschke(v)?;
        let f = UnitCircleFunction::blaschke(zeros.iter().map(Scalar::to_c64).collect(), phase.to_c64())?;
        let exact = (phase.abs_sq() == QC::one()).then(|| blaschke_exact(&zeros, &phase));
        return Ok(f.with_exact(exact));
    }
    let (n, d) = json_rational(v)?;
    UnitCircleFunction::rational_exact(n, d)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Z,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' => {}
            'z' | 'Z' => out.push(Tok::Z),
            'i' | 'j' => out.push(Tok::I),
            '+' => out.push(Tok::Plus),
            '-' | '\u{2212}' => out.push(Tok::Minus),
            '*' | '\u{00b7}' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            d if d.is_ascii_digit() || d == '.' => {
                let st = i;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                    i += 1;
                }
                // Exponent only when followed by a digit or sign+digit.
                if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                    let mut k = i + 1;
                    if k < cs.len() && (cs[k] == '+' || cs[k] == '-') {
                        k += 1;
                    }
                    if k < cs.len() && cs[k].is_ascii_digit() {
                        i = k;
                        while i < cs.len() && cs[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push(Tok::Num(cs[st..i].iter().collect()));
                continue;
            }
            other => return Err(perr(format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

/// A quotient of exact polynomials during parsing.
#[derive(Clone)]
struct Ratio {
    n: QPoly,
    d: QPoly,
}

impl Ratio {
    fn poly(p: QPoly) -> Self {
        Ratio { n: p, d: QPoly::one() }
    }
    fn add(&self, o: &Ratio) -> Ratio {
        Ratio { n: &(&self.n * &o.d) + &(&o.n * &self.d), d: &self.d * &o.d }.reduced()
    }
    fn sub(&self, o: &Ratio) -> Ratio {
        Ratio { n: &(&self.n * &o.d) - &(&o.n * &self.d), d: &self.d * &o.d }.reduced()
    }
    fn mul(&self, o: &Ratio) -> Ratio {
        Ratio { n: &self.n * &o.n, d: &self.d * &o.d }.reduced()
    }
    fn div(&self, o: &Ratio) -> Result<Ratio> {
        if o.n.is_zero() {
            return Err(perr("division by zero"));
        }
        Ok(Ratio { n: &self.n * &o.d, d: &self.d * &o.n }.reduced())
    }
    fn reduced(self) -> Ratio {
        if self.n.is_zero() {
            return Ratio { n: QPoly::zero(), d: QPoly::one() };
        }
        let g = self.n.gcd(&self.d);
        if g.degree().unwrap_or(0) == 0 {
            return self;
        }
        Ratio { n: self.n.div_rem(&g).unwrap().0, d: self.d.div_rem(&g).unwrap().0 }
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn expr(&mut self) -> Result<Ratio> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }
    fn term(&mut self) -> Result<Ratio> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                Some(Tok::Num(_) | Tok::Z | Tok::I | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }
    fn unary(&mut self) -> Result<Ratio> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let v = self.unary()?;
                Ok(Ratio { n: -&v.n, d: v.d })
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }
    fn power(&mut self) -> Result<Ratio> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.next() {
                Some(Tok::Num(s)) => s.parse::<u32>().map_err(|_| perr(format!("exponent {s:?} is not a small integer")))?,
                _ => return Err(perr("expected an integer exponent")),
            };
            if e > 512 {
                return Err(perr("exponent too large"));
            }
            let mut acc = Ratio::poly(QPoly::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }
    fn atom(&mut self) -> Result<Ratio> {
        match self.next() {
            Some(Tok::Num(s)) => Ok(Ratio::poly(QPoly::constant(QC::new(parse_number(&s)?, BigRational::zero())))),
            Some(Tok::Z) => Ok(Ratio::poly(QPoly::monomial(1))),
            Some(Tok::I) => Ok(Ratio::poly(QPoly::constant(QC::new(BigRational::zero(), BigRational::one())))),
            Some(Tok::LParen) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(v),
                    _ => Err(perr("missing ')'")),
                }
            }
            Some(t) => Err(perr(format!("unexpected token {t:?}"))),
            None => Err(perr("unexpected end of input")),
        }
    }
}

/// Infix literal to an exact reduced quotient.
pub fn parse_infix(s: &str) -> Result<(QPoly, QPoly)> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(perr("empty expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(format!("trailing input at token {}", p.pos)));
    }
    Ok((r.n, r.d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qc_real};

    fn qp(c: &[(i64, i64)]) -> QPoly {
        QPoly::new(c.iter().map(|&(n, d)| qc_real(q(n, d))).collect())
    }

    #[test]
    fn infix_basic() {
        let (n, d) = parse_infix("(1+z)/2").unwrap();
        assert_eq!(n.scale(&(QC::one() / d.coeff(0))), qp(&[(1, 2), (1, 2)]));
        let (n, d) = parse_infix("z(1+z)/2").unwrap();
        assert_eq!(n.scale(&(QC::one() / d.coeff(0))), qp(&[(0, 1), (1, 2), (1, 2)]));
        let (n, _) = parse_infix("z^2 - 3z + 0.25").unwrap();
        assert_eq!(n, qp(&[(1, 4), (-3, 1), (1, 1)]));
        let (n, _) = parse_infix("(3z+z^2)/4").unwrap();
        assert_eq!(n.degree(), Some(2));
    }

    #[test]
    fn infix_rational_reduces() {
        let (n, d) = parse_infix("(1-z)/((1-z)(2+z))").unwrap();
        assert_eq!(n.degree(), Some(0));
        assert_eq!(d.degree(), Some(1));
    }

    #[test]
    fn complex_literals() {
        let (n, _) = parse_infix("1+2i z").unwrap();
        assert_eq!(n.coeff(1), QC::new(q(0, 1), q(2, 1)));
        assert_eq!(parse_number("1e-2").unwrap(), q(1, 100));
        assert_eq!(parse_number("-2.5").unwrap(), q(-5, 2));
        assert_eq!(parse_number("1/3").unwrap(), q(1, 3));
    }

    #[test]
    fn json_forms() {
        let f = parse_function(r#"{"type":"poly","coeffs":[[0.5,0],[0.5,0]]}"#).unwrap();
        assert_eq!(f.exact_polynomial().unwrap(), &qp(&[(1, 2), (1, 2)]));
        let r = parse_function(r#"{"type":"rational","num":[[1,0]],"den":[[2,0],[1,0]]}"#).unwrap();
        assert!((r.eval(crate::scalar::C64::new(0.0, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
        let b = parse_function(r#"{"type":"blaschke","zeros":[[0.5,0]],"phase":[1,0]}"#).unwrap();
        assert_eq!(b.kind(), super::super::Kind::Blaschke);
        assert!(b.exact().is_some());
        assert!(parse_function(r#"{"type":"nope"}"#).is_err());
    }

    #[test]
    fn errors() {
        assert!(parse_infix("").is_err());
        assert!(parse_infix("(1+z").is_err());
        assert!(parse_infix("1/0").is_err());
        assert!(parse_infix("z $ 2").is_err());
        assert!(parse_function("1/(z-0.5)").is_err());
    }
}
