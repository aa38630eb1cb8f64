//! Polynomial differential forms on affine space, plain and with poles
//! along a hypersurface.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::poly::{MultiPoly, Rational};

/// Basis index set `{i1 < ... < ik}` of `dx_i1 ∧ ... ∧ dx_ik`, as a bit mask.
pub type IndexSet = u32;

pub fn grade_of(s: IndexSet) -> usize {
    s.count_ones() as usize
}

/// All index sets of size `k` among `n` variables, in increasing order.
pub fn index_sets(n: usize, k: usize) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = (0u32..(1u32 << n)).filter(|s| grade_of(*s) == k).collect();
    out.sort_by_key(|s| (0..n).filter(|i| s & (1 << i) != 0).collect::<Vec<_>>());
    out
}

/// Sign and index set of `dx_i ∧ dx_S`, or `None` when `i ∈ S`.
pub fn wedge_index(i: usize, s: IndexSet) -> Option<(i64, IndexSet)> {
    if s & (1 << i) != 0 {
        return None;
    }
    let before = (s & ((1u32 << i) - 1)).count_ones();
    Some((if before.is_multiple_of(2) { 1 } else { -1 }, s | (1 << i)))
}

/// A homogeneous polynomial `k`-form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    nvars: usize,
    grade: usize,
    coeffs: BTreeMap<IndexSet, MultiPoly>,
}

impl PolyForm {
    pub fn zero(nvars: usize, grade: usize) -> Self {
        PolyForm { nvars, grade, coeffs: BTreeMap::new() }
    }

    /// `g dx_S`.
    pub fn basic(g: MultiPoly, s: IndexSet) -> Self {
        let mut f = PolyForm::zero(g.nvars(), grade_of(s));
        f.add_term(s, g);
        f
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&IndexSet, &MultiPoly)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, s: IndexSet, g: MultiPoly) {
        assert_eq!(grade_of(s), self.grade, "index set of the wrong grade");
        let sum = match self.coeffs.remove(&s) {
            Some(old) => &old + &g,
            None => g,
        };
        if !sum.is_zero() {
            self.coeffs.insert(s, sum);
        }
    }

    pub fn add(&self, o: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        for (s, g) in &o.coeffs {
            out.add_term(*s, g.clone());
        }
        out
    }

    pub fn scale(&self, g: &MultiPoly) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.grade);
        for (s, c) in &self.coeffs {
            out.add_term(*s, c * g);
        }
        out
    }

    /// `dφ ∧ self` for a function `φ`.
    pub fn wedge_exact(&self, phi: &MultiPoly) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.grade + 1);
        for i in 0..self.nvars {
            let di = phi.deriv(i);
            if di.is_zero() {
                continue;
            }
            for (s, g) in &self.coeffs {
                if let Some((sign, t)) = wedge_index(i, *s) {
                    out.add_term(t, (&di * g).scale(&Rational::from_integer(BigInt::from(sign))));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.grade + 1);
        for (s, g) in &self.coeffs {
            for i in 0..self.nvars {
                if let Some((sign, t)) = wedge_index(i, *s) {
                    out.add_term(t, g.deriv(i).scale(&Rational::from_integer(BigInt::from(sign))));
                }
            }
        }
        out
    }

    /// The twisted differential `ω ↦ dω + dF ∧ ω`.
    pub fn d_twisted(&self, f: &MultiPoly) -> PolyForm {
        self.d().add(&self.wedge_exact(f))
    }

    /// Divides every coefficient by `q`, if possible.
    pub fn div_exact(&self, q: &MultiPoly) -> Option<PolyForm> {
        let mut out = PolyForm::zero(self.nvars, self.grade);
        for (s, g) in &self.coeffs {
            out.add_term(*s, g.div_exact(q)?);
        }
        Some(out)
    }

    /// Coefficients keyed by `(index set, exponent)`.
    pub fn entries(&self) -> impl Iterator<Item = (IndexSet, &Vec<u32>, &Rational)> {
        self.coeffs.iter().flat_map(|(s, g)| g.terms().map(move |(e, c)| (*s, e, c)))
    }
}

/// The form `ω / f^m` on the complement of `f = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedForm {
    pub numerator: PolyForm,
    pub pole: u32,
}

impl LocalizedForm {
    pub fn new(numerator: PolyForm, pole: u32) -> Self {
        LocalizedForm { numerator, pole }
    }

    /// Cancels factors of `f` from the numerator while the pole is positive.
    pub fn reduced(&self, f: &MultiPoly) -> LocalizedForm {
        let mut out = self.clone();
        if out.numerator.is_zero() {
            out.pole = 0;
            return out;
        }
        while out.pole > 0 {
            match out.numerator.div_exact(f) {
                Some(n) => {
                    out.numerator = n;
                    out.pole -= 1;
                }
                None => break,
            }
        }
        out
    }

    /// Numerator over `f^pole`, for `pole >= self.pole`.
    pub fn at_pole(&self, f: &MultiPoly, pole: u32) -> PolyForm {
        assert!(pole >= self.pole, "cannot lower the pole order");
        self.numerator.scale(&f.pow(pole - self.pole))
    }

    /// `d(ω / f^m) = (f dω − m df ∧ ω) / f^(m+1)`, not reduced.
    pub fn d(&self, f: &MultiPoly) -> LocalizedForm {
        let m = Rational::from_integer(BigInt::from(self.pole));
        let a = self.numerator.d().scale(f);
        let b = self.numerator.wedge_exact(f).scale(&MultiPoly::constant(f.nvars(), -m));
        LocalizedForm { numerator: a.add(&b), pole: self.pole + 1 }
    }

    /// Equality as rational forms.
    pub fn same_as(&self, o: &LocalizedForm, f: &MultiPoly) -> bool {
        let p = self.pole.max(o.pole);
        let diff = self.at_pole(f, p).add(&o.at_pole(f, p).scale(&MultiPoly::constant(f.nvars(), -Rational::from_integer(1.into()))));
        diff.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse_in(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_index(0, 0b10), Some((1, 0b11)));
        assert_eq!(wedge_index(1, 0b01), Some((-1, 0b11)));
        assert_eq!(wedge_index(1, 0b10), None);
        assert_eq!(index_sets(3, 2), vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn d_squared_vanishes() {
        let f = p("x*y + z^2*x");
        for w in [PolyForm::basic(p("x^2*y*z"), 0), PolyForm::basic(p("y^3 + z"), 0b001)] {
            assert!(w.d().d().is_zero());
            assert!(w.d_twisted(&f).d_twisted(&f).is_zero());
        }
    }

    #[test]
    fn localized_derivative() {
        // d(1/x) = -dx/x^2
        let f = p("x");
        let w = LocalizedForm::new(PolyForm::basic(p("1"), 0), 1);
        let dw = w.d(&f).reduced(&f);
        assert_eq!(dw, LocalizedForm::new(PolyForm::basic(p("-1"), 0b001), 2));
        // d(x/x) = 0
        let one = LocalizedForm::new(PolyForm::basic(p("x"), 0), 1);
        assert!(one.d(&f).reduced(&f).is_zero());
        assert!(one.same_as(&LocalizedForm::new(PolyForm::basic(p("1"), 0), 0), &f));
    }
}
