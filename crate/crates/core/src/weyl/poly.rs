//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at byte {pos}: {message}")]
pub struct PolyError {
    pub pos: usize,
    pub message: String,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: Rational) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match the variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        MultiPoly { nvars, terms }
    }

    /// The `i`-th coordinate function.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative in variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Rational::from_integer(BigInt::from(e[i])));
            }
        }
        out
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift_by(&self, e: &[u32]) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| (a.iter().zip(e).map(|(x, y)| x + y).collect(), c.clone())).collect(),
        }
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Exact division by `q`, if `q` divides `self`.
    pub fn div_exact(&self, q: &MultiPoly) -> Option<MultiPoly> {
        if q.is_zero() {
            return None;
        }
        let lead = |p: &MultiPoly| -> Option<(Exponent, Rational)> {
            p.terms
                .iter()
                .max_by(|a, b| grlex(a.0, b.0))
                .map(|(e, c)| (e.clone(), c.clone()))
        };
        let (qe, qc) = lead(q)?;
        let mut rem = self.clone();
        let mut out = Self::zero(self.nvars);
        while let Some((re, rc)) = lead(&rem) {
            if re.iter().zip(&qe).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponent = re.iter().zip(&qe).map(|(a, b)| a - b).collect();
            let c = rc / &qc;
            out.add_term(e.clone(), c.clone());
            rem = &rem - &q.shift_by(&e).scale(&c);
        }
        Some(out)
    }

    /// Parses infix text. `names` lists, per variable, the accepted spellings.
    pub fn parse(text: &str, names: &[Vec<String>]) -> Result<MultiPoly, PolyError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, names, nvars: names.len() };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Parses with one spelling per variable.
    pub fn parse_in(text: &str, vars: &[&str]) -> Result<MultiPoly, PolyError> {
        let names: Vec<Vec<String>> = vars.iter().map(|v| vec![v.to_string()]).collect();
        Self::parse(text, &names)
    }
}

/// Graded lexicographic comparison of exponents.
pub fn grlex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// All exponent vectors in `n` variables of total degree at most `d`, in
/// graded lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, left: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut level = Vec::new();
        rec(n, deg, &mut Vec::new(), &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl MultiPoly {
    /// Renders with the given variable names, highest grlex term first.
    pub fn display_with(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| grlex(b, a));
        let mut out = String::new();
        for (i, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (k, p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(vars[k].clone()),
                    _ => factors.push(format!("{}^{p}", vars[k])),
                }
            }
            if factors.is_empty() || !a.is_one() {
                factors.insert(0, fmt_rational(&a));
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&vars))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [Vec<String>],
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> PolyError {
        PolyError { pos: self.pos, message: m.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let f = self.unary()?;
            if c == b'*' {
                acc = &acc * &f;
            } else {
                if !f.is_constant() || f.is_zero() {
                    return Err(PolyError { pos: at, message: "division only by a nonzero constant".into() });
                }
                let inv = Rational::one() / f.coefficient(&vec![0; self.nvars]);
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| PolyError { pos: start, message: "expected a small exponent".into() })?;
            if k > 64 {
                return Err(PolyError { pos: start, message: "exponent too large".into() });
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let n: BigInt = s.parse().expect("digits parse");
                Ok(MultiPoly::constant(self.nvars, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let i = self
                    .names
                    .iter()
                    .position(|al| al.iter().any(|a| a == name))
                    .ok_or_else(|| PolyError { pos: start, message: format!("unknown variable '{name}'") })?;
                Ok(MultiPoly::var(self.nvars, i))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}
