//! Sparse multivariate polynomials over Q with a fixed monomial order.
//!
//! A `Context` pins down the variable count, the print names and the active
//! term order; every `Poly` holds an `Arc<Context>` and keeps its terms in
//! strictly descending order with nonzero reduced coefficients, so equal
//! polynomials always serialize identically.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, ParseError};

/// Term order on exponent vectors of a fixed arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic (the default).
    GrevLex,
    /// Pure lexicographic.
    Lex,
}

impl MonomialOrder {
    pub fn compare(self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.arity(), b.arity(), "monomial arity mismatch");
        match self {
            MonomialOrder::GrevLex => {
                match a.total_degree().cmp(&b.total_degree()) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                // Ties break on the rightmost differing exponent, smaller wins.
                for i in (0..a.0.len()).rev() {
                    if a.0[i] != b.0[i] {
                        return b.0[i].cmp(&a.0[i]);
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Lex => {
                for i in 0..a.0.len() {
                    if a.0[i] != b.0[i] {
                        return a.0[i].cmp(&b.0[i]);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// Variable count, print names and active monomial order.
#[derive(Debug, PartialEq, Eq)]
pub struct Context {
    names: Vec<String>,
    order: MonomialOrder,
}

impl Context {
    /// Context with default names `x1..xd`.
    pub fn new(vars: usize, order: MonomialOrder) -> Arc<Context> {
        assert!(vars >= 1, "need at least one variable");
        let names = (1..=vars).map(|i| format!("x{i}")).collect();
        Arc::new(Context { names, order })
    }

    /// Context with explicit names; names must be distinct identifiers.
    pub fn with_names(names: Vec<String>, order: MonomialOrder) -> Result<Arc<Context>, Error> {
        if names.is_empty() {
            return Err(Error::Malformed("need at least one variable".into()));
        }
        for name in &names {
            if !is_identifier(name) {
                return Err(Error::Malformed(format!(
                    "variable name {name:?} is not an identifier"
                )));
            }
        }
        for i in 0..names.len() {
            if names[i + 1..].contains(&names[i]) {
                return Err(Error::Malformed(format!(
                    "duplicate variable name {:?}",
                    names[i]
                )));
            }
        }
        Ok(Arc::new(Context { names, order }))
    }

    pub fn vars(&self) -> usize {
        self.names.len()
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector; arity equals the context's variable count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Monomial {
        Monomial(exps)
    }

    /// Single variable `x_i^e` (0-based index).
    pub fn var(arity: usize, i: usize, e: u32) -> Monomial {
        assert!(i < arity, "variable index out of range");
        let mut exps = vec![0; arity];
        exps[i] = e;
        Monomial(exps)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        debug_assert_eq!(self.arity(), other.arity());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub mono: Monomial,
    pub coeff: BigRational,
}

/// Polynomial in canonical form: terms strictly descending in the context
/// order, all coefficients nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ctx: Arc<Context>,
    terms: Vec<Term>,
}

pub(crate) fn check_same_ctx(a: &Arc<Context>, b: &Arc<Context>) {
    assert!(
        Arc::ptr_eq(a, b) || a == b,
        "context mismatch: operands use different polynomial contexts"
    );
}

impl Poly {
    pub fn zero(ctx: &Arc<Context>) -> Poly {
        Poly {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ctx: &Arc<Context>) -> Poly {
        Poly::constant(ctx, BigRational::one())
    }

    pub fn constant(ctx: &Arc<Context>, c: BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(ctx);
        }
        Poly {
            ctx: ctx.clone(),
            terms: vec![Term {
                mono: Monomial::one(ctx.vars()),
                coeff: c,
            }],
        }
    }

    /// The variable `x_i` (0-based index).
    pub fn variable(ctx: &Arc<Context>, i: usize) -> Poly {
        assert!(i < ctx.vars(), "variable index out of range");
        Poly {
            ctx: ctx.clone(),
            terms: vec![Term {
                mono: Monomial::var(ctx.vars(), i, 1),
                coeff: BigRational::one(),
            }],
        }
    }

    pub fn monomial(ctx: &Arc<Context>, mono: Monomial, coeff: BigRational) -> Poly {
        assert_eq!(mono.arity(), ctx.vars(), "monomial arity mismatch");
        if coeff.is_zero() {
            return Poly::zero(ctx);
        }
        Poly {
            ctx: ctx.clone(),
            terms: vec![Term { mono, coeff }],
        }
    }

    /// Normalizes an arbitrary list of (monomial, coefficient) pairs.
    pub fn from_pairs(ctx: &Arc<Context>, pairs: Vec<(Monomial, BigRational)>) -> Poly {
        let mut acc: HashMap<Vec<u32>, BigRational> = HashMap::new();
        for (m, c) in pairs {
            assert_eq!(m.arity(), ctx.vars(), "monomial arity mismatch");
            let entry = acc.entry(m.0).or_insert_with(BigRational::zero);
            *entry += c;
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| Term {
                mono: Monomial(e),
                coeff: c,
            })
            .collect();
        let order = ctx.order();
        terms.sort_unstable_by(|a, b| order.compare(&b.mono, &a.mono));
        Poly {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].mono.is_one())
    }

    /// Largest term in the active order, `None` for the zero polynomial.
    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Maximum total degree over all terms, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.mono.total_degree()).max()
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigRational {
        self.terms
            .iter()
            .find(|t| &t.mono == mono)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ctx);
        }
        Poly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    /// Multiplies by a single term; keeps canonical order.
    pub fn mul_term(&self, mono: &Monomial, coeff: &BigRational) -> Poly {
        if coeff.is_zero() {
            return Poly::zero(&self.ctx);
        }
        Poly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.mul(mono),
                    coeff: &t.coeff * coeff,
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Evaluates at a rational point; the point length must equal the arity.
    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.ctx.vars(), "point dimension mismatch");
        let mut acc = BigRational::zero();
        for t in &self.terms {
            let mut prod = t.coeff.clone();
            for (i, &e) in t.mono.exponents().iter().enumerate() {
                if e > 0 {
                    prod *= rat_pow(&point[i], e);
                }
            }
            acc += prod;
        }
        acc
    }

    pub fn parse(ctx: &Arc<Context>, input: &str) -> Result<Poly, ParseError> {
        parse::parse_poly(ctx, input)
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rat_pow(base: &BigRational, e: u32) -> BigRational {
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// All monomials of total degree at most `bound`, descending in the context
/// order so generated bases are deterministic.
pub fn monomials_up_to(ctx: &Arc<Context>, bound: u32) -> Vec<Monomial> {
    let d = ctx.vars();
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill_monomials(d, 0, bound, &mut current, &mut out);
    let order = ctx.order();
    out.sort_unstable_by(|a, b| order.compare(b, a));
    out
}

fn fill_monomials(d: usize, pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if pos == d {
        out.push(Monomial(current.clone()));
        return;
    }
    for e in 0..=left {
        current[pos] = e;
        fill_monomials(d, pos + 1, left - e, current, out);
    }
    current[pos] = 0;
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    coeff: -t.coeff.clone(),
                })
                .collect(),
        }
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        check_same_ctx(&self.ctx, &rhs.ctx);
        let order = self.ctx.order();
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            match order.compare(&self.terms[i].mono, &rhs.terms[j].mono) {
                Ordering::Greater => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].coeff + &rhs.terms[j].coeff;
                    if !c.is_zero() {
                        terms.push(Term {
                            mono: self.terms[i].mono.clone(),
                            coeff: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&rhs.terms[j..]);
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        check_same_ctx(&self.ctx, &rhs.ctx);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let mut acc: HashMap<Vec<u32>, BigRational> = HashMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let m = a.mono.mul(&b.mono);
                let entry = acc.entry(m.0).or_insert_with(BigRational::zero);
                *entry += &a.coeff * &b.coeff;
            }
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| Term {
                mono: Monomial(e),
                coeff: c,
            })
            .collect();
        let order = self.ctx.order();
        terms.sort_unstable_by(|a, b| order.compare(&b.mono, &a.mono));
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = t.coeff.abs();
            if t.mono.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                let mut first = true;
                for (i, &e) in t.mono.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    if e == 1 {
                        write!(f, "{}", self.ctx.name(i))?;
                    } else {
                        write!(f, "{}^{}", self.ctx.name(i), e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq)]
    enum Tok {
        Int(BigInt),
        Ident(String),
        Plus,
        Minus,
        Star,
        Caret,
        Slash,
        LParen,
        RParen,
    }

    fn err(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }

    fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let bytes = input.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push((Tok::Plus, i));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, i));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, i));
                    i += 1;
                }
                '^' => {
                    toks.push((Tok::Caret, i));
                    i += 1;
                }
                '/' => {
                    toks.push((Tok::Slash, i));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, i));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, i));
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits = &input[start..i];
                    let n: BigInt = digits.parse().expect("digit run parses");
                    toks.push((Tok::Int(n), start));
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push((Tok::Ident(input[start..i].to_string()), start));
                }
                _ => return Err(err(i, format!("unexpected character {c:?}"))),
            }
        }
        Ok(toks)
    }

    struct Parser<'a> {
        ctx: &'a Arc<Context>,
        toks: Vec<(Tok, usize)>,
        pos: usize,
        end: usize,
    }

    impl<'a> Parser<'a> {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos).map(|(t, _)| t)
        }

        fn here(&self) -> usize {
            self.toks
                .get(self.pos)
                .map(|&(_, p)| p)
                .unwrap_or(self.end)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        fn expr(&mut self) -> Result<Poly, ParseError> {
            let mut negate = false;
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                Some(Tok::Minus) => {
                    negate = true;
                    self.pos += 1;
                }
                _ => {}
            }
            let mut acc = self.term()?;
            if negate {
                acc = -&acc;
            }
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.pos += 1;
                        let t = self.term()?;
                        acc = &acc + &t;
                    }
                    Some(Tok::Minus) => {
                        self.pos += 1;
                        let t = self.term()?;
                        acc = &acc - &t;
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<Poly, ParseError> {
            let mut acc = self.factor()?;
            while self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            }
            Ok(acc)
        }

        fn factor(&mut self) -> Result<Poly, ParseError> {
            let base = self.base()?;
            if self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                let at = self.here();
                match self.next() {
                    Some(Tok::Int(n)) => {
                        let e = u32::try_from(&n)
                            .map_err(|_| err(at, "exponent out of range"))?;
                        Ok(base.pow(e))
                    }
                    _ => Err(err(at, "expected a nonnegative integer exponent")),
                }
            } else {
                Ok(base)
            }
        }

        fn base(&mut self) -> Result<Poly, ParseError> {
            let at = self.here();
            match self.next() {
                Some(Tok::Int(n)) => {
                    let mut value = BigRational::from_integer(n);
                    if self.peek() == Some(&Tok::Slash) {
                        self.pos += 1;
                        let dat = self.here();
                        match self.next() {
                            Some(Tok::Int(d)) => {
                                if d.is_zero() {
                                    return Err(err(dat, "zero denominator"));
                                }
                                value /= BigRational::from_integer(d);
                            }
                            _ => return Err(err(dat, "expected a denominator")),
                        }
                    }
                    self.reject_implicit_mul()?;
                    Ok(Poly::constant(self.ctx, value))
                }
                Some(Tok::Ident(name)) => match self.ctx.var_index(&name) {
                    Some(i) => {
                        self.reject_implicit_mul()?;
                        Ok(Poly::variable(self.ctx, i))
                    }
                    None => Err(err(at, format!("unknown variable {name:?}"))),
                },
                Some(Tok::LParen) => {
                    let inner = self.expr()?;
                    let cat = self.here();
                    match self.next() {
                        Some(Tok::RParen) => {
                            self.reject_implicit_mul()?;
                            Ok(inner)
                        }
                        _ => Err(err(cat, "expected ')'")),
                    }
                }
                Some(Tok::Slash) => Err(err(at, "'/' is only allowed inside a rational literal")),
                Some(tok) => Err(err(at, format!("unexpected token {tok:?}"))),
                None => Err(err(at, "unexpected end of input")),
            }
        }

        /// Multiplication must be written out; `2x1` and `x1(x2)` are errors.
        fn reject_implicit_mul(&self) -> Result<(), ParseError> {
            match self.peek() {
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => Err(err(
                    self.here(),
                    "implicit multiplication is not allowed; write '*'",
                )),
                _ => Ok(()),
            }
        }
    }

    pub(super) fn parse_poly(ctx: &Arc<Context>, input: &str) -> Result<Poly, ParseError> {
        let toks = tokenize(input)?;
        let mut p = Parser {
            ctx,
            toks,
            pos: 0,
            end: input.len(),
        };
        let poly = p.expr()?;
        if p.pos != p.toks.len() {
            let at = p.here();
            return Err(err(at, "trailing input after expression"));
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx2() -> Arc<Context> {
        Context::new(2, MonomialOrder::GrevLex)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn ratq(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_parses_and_renders() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "0").unwrap();
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
        assert_eq!(Poly::parse(&ctx, "x1 - x1").unwrap().to_string(), "0");
    }

    #[test]
    fn square_expands_canonically() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "(x1 - x2)^2").unwrap();
        assert_eq!(p.to_string(), "x1^2 - 2*x1*x2 + x2^2");
        let q = Poly::parse(&ctx, "x1^2 - 2*x1*x2 + x2^2").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rational_coefficients_render_reduced() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "2/8*x1 + 6/8*x1").unwrap();
        assert_eq!(p.to_string(), "x1");
        let q = Poly::parse(&ctx, "3/4*x1^2*x2").unwrap();
        assert_eq!(q.to_string(), "3/4*x1^2*x2");
        assert_eq!(q.leading().unwrap().coeff, ratq(3, 4));
    }

    #[test]
    fn grevlex_orders_classically() {
        let ctx = Context::new(3, MonomialOrder::GrevLex);
        let o = ctx.order();
        let m = |a: u32, b: u32, c: u32| Monomial::from_exponents(vec![a, b, c]);
        // degree first
        assert_eq!(o.compare(&m(2, 0, 0), &m(1, 0, 0)), Ordering::Greater);
        // x2^2 beats x1*x3 in grevlex
        assert_eq!(o.compare(&m(0, 2, 0), &m(1, 0, 1)), Ordering::Greater);
        // but x1^2 beats x2^2
        assert_eq!(o.compare(&m(2, 0, 0), &m(0, 2, 0)), Ordering::Greater);
    }

    #[test]
    fn lex_differs_from_grevlex() {
        let ctx = Context::new(2, MonomialOrder::Lex);
        let o = ctx.order();
        let x1 = Monomial::from_exponents(vec![1, 0]);
        let x2sq = Monomial::from_exponents(vec![0, 2]);
        // lex ignores degree
        assert_eq!(o.compare(&x1, &x2sq), Ordering::Greater);
        let g = Context::new(2, MonomialOrder::GrevLex).order();
        assert_eq!(g.compare(&x1, &x2sq), Ordering::Less);
    }

    #[test]
    fn render_sorts_descending_in_active_order() {
        let lex = Context::new(2, MonomialOrder::Lex);
        let p = Poly::parse(&lex, "x2^3 + x1").unwrap();
        assert_eq!(p.to_string(), "x1 + x2^3");
        let grevlex = ctx2();
        let q = Poly::parse(&grevlex, "x1 + x2^3").unwrap();
        assert_eq!(q.to_string(), "x2^3 + x1");
    }

    #[test]
    fn evaluate_exactly() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "x1^2 + x2").unwrap();
        let v = p.evaluate(&[ratq(1, 2), rat(3)]);
        assert_eq!(v, ratq(13, 4));
    }

    #[test]
    fn parse_error_positions() {
        let ctx = ctx2();
        let e = Poly::parse(&ctx, "x1 + y").unwrap_err();
        assert_eq!(e.pos, 5);
        let e = Poly::parse(&ctx, "2x1").unwrap_err();
        assert_eq!(e.pos, 1);
        let e = Poly::parse(&ctx, "x1/2").unwrap_err();
        assert_eq!(e.pos, 2);
        let e = Poly::parse(&ctx, "x1 + ").unwrap_err();
        assert_eq!(e.pos, 5);
        let e = Poly::parse(&ctx, "(x1 + x2").unwrap_err();
        assert_eq!(e.pos, 8);
        let e = Poly::parse(&ctx, "x1^(2)").unwrap_err();
        assert_eq!(e.pos, 3);
        assert!(Poly::parse(&ctx, "1/0").unwrap_err().message.contains("zero"));
    }

    #[test]
    fn unary_minus_and_spacing() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "-x1 + 2").unwrap();
        assert_eq!(p.to_string(), "-x1 + 2");
        let q = Poly::parse(&ctx, " - 3/2 ").unwrap();
        assert_eq!(q.to_string(), "-3/2");
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let ctx = ctx2();
        let p = Poly::parse(&ctx, "x1 + 2*x2 - 1").unwrap();
        let mut by_mul = Poly::one(&ctx);
        for _ in 0..5 {
            by_mul = &by_mul * &p;
        }
        assert_eq!(p.pow(5), by_mul);
        assert_eq!(p.pow(0), Poly::one(&ctx));
    }

    #[test]
    fn monomial_basis_enumeration() {
        let ctx = ctx2();
        let ms = monomials_up_to(&ctx, 2);
        assert_eq!(ms.len(), 6);
        // strictly descending in the active order
        for w in ms.windows(2) {
            assert_eq!(ctx.order().compare(&w[0], &w[1]), Ordering::Greater);
        }
        assert!(ms.last().unwrap().is_one());
    }

    #[test]
    #[should_panic(expected = "context mismatch")]
    fn mixing_contexts_panics() {
        let a = Context::new(2, MonomialOrder::GrevLex);
        let b = Context::new(2, MonomialOrder::Lex);
        let _ = &Poly::variable(&a, 0) + &Poly::variable(&b, 0);
    }

    #[test]
    fn context_name_validation() {
        assert!(Context::with_names(vec!["x".into(), "x".into()], MonomialOrder::GrevLex).is_err());
        assert!(Context::with_names(vec!["2bad".into()], MonomialOrder::GrevLex).is_err());
        let c = Context::with_names(vec!["a".into(), "b".into()], MonomialOrder::GrevLex).unwrap();
        let p = Poly::parse(&c, "a*b^2").unwrap();
        assert_eq!(p.to_string(), "a*b^2");
    }

    fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
    }

    fn arb_poly(ctx: Arc<Context>) -> impl Strategy<Value = Poly> {
        let d = ctx.vars();
        proptest::collection::vec(
            (proptest::collection::vec(0u32..=3, d), arb_rational()),
            0..5,
        )
        .prop_map(move |pairs| {
            Poly::from_pairs(
                &ctx,
                pairs
                    .into_iter()
                    .map(|(e, c)| (Monomial::from_exponents(e), c))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms((p, q, r) in (arb_poly(ctx2()), arb_poly(ctx2()), arb_poly(ctx2()))) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p - &p, Poly::zero(p.ctx()));
            prop_assert_eq!(&p * &Poly::one(p.ctx()), p.clone());
        }

        #[test]
        fn evaluation_is_a_homomorphism(
            (p, q) in (arb_poly(ctx2()), arb_poly(ctx2())),
            pt in proptest::collection::vec(arb_rational(), 2),
        ) {
            let sum = &p + &q;
            let prod = &p * &q;
            prop_assert_eq!(sum.evaluate(&pt), p.evaluate(&pt) + q.evaluate(&pt));
            prop_assert_eq!(prod.evaluate(&pt), p.evaluate(&pt) * q.evaluate(&pt));
        }

        #[test]
        fn render_parse_roundtrip(p in arb_poly(ctx2())) {
            let text = p.to_string();
            let back = Poly::parse(p.ctx(), &text).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn canonical_form_is_strictly_sorted(p in arb_poly(ctx2())) {
            let order = p.ctx().order();
            for w in p.terms().windows(2) {
                prop_assert_eq!(order.compare(&w[0].mono, &w[1].mono), Ordering::Greater);
            }
            for t in p.terms() {
                prop_assert!(!t.coeff.is_zero());
            }
        }
    }
}
