//! De Rham cohomology of the complement `U = {f_1 = ... = f_r = 0}ᶜ` via the
//! Čech complex of the cover `U_i = {f_i ≠ 0}`, each piece computed with
//! localized forms truncated in pole order and degree.

use std::collections::BTreeMap;

use super::forms::{index_sets, IndexSet, LocalizedForm, PolyForm};
use super::linalg::{rank, Columns};
use super::poly::{monomials, Exponent, MultiPoly, Rational};
use super::report::{CohomologyReport, Dims, Snapshot, WeylError};

/// Column key: Čech stratum, form index set, numerator exponent.
type CechKey = (usize, IndexSet, Exponent);

/// Extra pole order and degree allowed for primitives of a boundary.
const POLE_SLACK: u32 = 1;
const DEGREE_SLACK: u32 = 2;

struct Cech {
    n: usize,
    fs: Vec<MultiPoly>,
    /// Nonempty subsets of the cover, as sorted index lists.
    strata: Vec<Vec<usize>>,
    /// `h_I = ∏_{i∈I} f_i`.
    h: Vec<MultiPoly>,
}

/// A basis element `x^e dx_K / h_I^m` on the stratum `I`.
#[derive(Clone, Debug)]
struct Element {
    stratum: usize,
    form: LocalizedForm,
}

impl Cech {
    fn new(fs: &[MultiPoly]) -> Self {
        let n = fs[0].nvars();
        let r = fs.len();
        let mut strata: Vec<Vec<usize>> = (1u32..(1 << r))
            .map(|m| (0..r).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        strata.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let h = strata
            .iter()
            .map(|s| s.iter().fold(MultiPoly::one(n), |acc, i| &acc * &fs[*i]))
            .collect();
        Cech { n, fs: fs.to_vec(), strata, h }
    }

    fn stratum_of(&self, s: &[usize]) -> Option<usize> {
        self.strata.iter().position(|t| t == s)
    }

    /// Basis of total degree `t`, pole order `m`, numerator degree
    /// `d + m deg h_I`.
    fn basis(&self, t: usize, m: u32, d: u32) -> Vec<Element> {
        let mut out = Vec::new();
        for (si, s) in self.strata.iter().enumerate() {
            let p = s.len() - 1;
            if t < p || t - p > self.n {
                continue;
            }
            let hd = self.h[si].degree().unwrap_or(0);
            let monos = monomials(self.n, d + m * hd);
            for k in index_sets(self.n, t - p) {
                for e in &monos {
                    let g = MultiPoly::monomial(self.n, e.clone(), Rational::from_integer(1.into()));
                    out.push(Element { stratum: si, form: LocalizedForm::new(PolyForm::basic(g, k), m) });
                }
            }
        }
        out
    }

    fn keyed(&self, stratum: usize, w: &PolyForm, sign: i64, out: &mut BTreeMap<CechKey, Rational>) {
        let sign = Rational::from_integer(sign.into());
        for (k, e, c) in w.entries() {
            *out.entry((stratum, k, e.clone())).or_insert_with(|| Rational::from_integer(0.into())) += &sign * c;
        }
    }

    /// The element written over `h_I^pole`.
    fn embed(&self, x: &Element, pole: u32) -> BTreeMap<CechKey, Rational> {
        let mut out = BTreeMap::new();
        self.keyed(x.stratum, &x.form.at_pole(&self.h[x.stratum], pole), 1, &mut out);
        out
    }

    /// Total differential `δ + (−1)^p d`, every component written over
    /// `h_J^pole`.
    fn differential(&self, x: &Element, pole: u32) -> BTreeMap<CechKey, Rational> {
        let s = &self.strata[x.stratum];
        let hi = &self.h[x.stratum];
        let mut out = BTreeMap::new();
        let sign = if (s.len() - 1).is_multiple_of(2) { 1 } else { -1 };
        self.keyed(x.stratum, &x.form.d(hi).at_pole(hi, pole), sign, &mut out);
        for j in 0..self.fs.len() {
            if s.contains(&j) {
                continue;
            }
            let mut t = s.clone();
            t.push(j);
            t.sort();
            let Some(ti) = self.stratum_of(&t) else { continue };
            let pos = t.iter().position(|v| *v == j).expect("inserted");
            // g / h_I^m = g f_j^m / h_J^m
            let num = x.form.numerator.scale(&self.fs[j].pow(x.form.pole));
            let restricted = LocalizedForm::new(num, x.form.pole);
            self.keyed(ti, &restricted.at_pole(&self.h[ti], pole), if pos % 2 == 0 { 1 } else { -1 }, &mut out);
        }
        out.retain(|_, v| *v != Rational::from_integer(0.into()));
        out
    }

    /// Checks that the total differential squares to zero on the basis of
    /// pole order `m` and degree `d`.
    fn square_vanishes(&self, m: u32, d: u32) -> bool {
        for t in 0..self.max_degree().saturating_sub(1) {
            for x in self.basis(t, m, d) {
                let mut total: BTreeMap<CechKey, Rational> = BTreeMap::new();
                for ((si, k, e), c) in self.differential(&x, m + 1) {
                    let g = MultiPoly::monomial(self.n, e, c);
                    let y = Element { stratum: si, form: LocalizedForm::new(PolyForm::basic(g, k), m + 1) };
                    for (key, c2) in self.differential(&y, m + 2) {
                        *total.entry(key).or_insert_with(|| Rational::from_integer(0.into())) += c2;
                    }
                }
                if total.values().any(|v| *v != Rational::from_integer(0.into())) {
                    return false;
                }
            }
        }
        true
    }

    fn max_degree(&self) -> usize {
        self.n + self.fs.len() - 1
    }

    /// Cohomology estimate with pole order `m` and degree `d`.
    fn level(&self, m: u32, d: u32) -> Dims {
        (0..=self.max_degree())
            .map(|t| {
                let src = self.basis(t, m, d);
                let rows: Vec<_> = src.iter().map(|x| self.differential(x, m + 1)).collect();
                let cols = Columns::covering(rows.iter());
                let kernel = src.len() - rank(rows.iter().map(|r| cols.row(r).expect("covered")));
                let boundaries = if t == 0 {
                    0
                } else {
                    let pole = m + POLE_SLACK + 1;
                    let b: Vec<_> = self
                        .basis(t - 1, m + POLE_SLACK, d + DEGREE_SLACK)
                        .iter()
                        .map(|x| self.differential(x, pole))
                        .collect();
                    let l: Vec<_> = src.iter().map(|x| self.embed(x, pole)).collect();
                    let cols = Columns::covering(b.iter().chain(l.iter()));
                    let conv = |r: &BTreeMap<CechKey, Rational>| cols.row(r).expect("covered");
                    let rb = rank(b.iter().map(conv));
                    let rbl = rank(b.iter().chain(l.iter()).map(conv));
                    rb + l.len() - rbl
                };
                (t, kernel - boundaries)
            })
            .collect()
    }
}

pub(crate) fn check_list(fs: &[MultiPoly], window: usize) -> Result<(), WeylError> {
    if window < 2 {
        return Err(WeylError::Window(window));
    }
    let first = fs.first().ok_or(WeylError::Empty)?;
    if first.nvars() > 16 {
        return Err(WeylError::TooManyVariables(first.nvars()));
    }
    for f in fs {
        if f.nvars() != first.nvars() {
            return Err(WeylError::Variables { expected: first.nvars(), got: f.nvars() });
        }
        if f.is_zero() {
            return Err(WeylError::Zero);
        }
        if f.is_constant() {
            return Err(WeylError::Constant(f.to_string()));
        }
    }
    Ok(())
}

/// Dimensions of `H^k_dR(U)` for `U` the complement of the common zero set
/// of `fs`, stabilized over `(m, D) = (1, 0), (2, 2), (3, 4), ...`.
pub fn complement_derham(fs: &[MultiPoly], pole_max: u32, d_max: u32, window: usize) -> Result<CohomologyReport, WeylError> {
    check_list(fs, window)?;
    let c = Cech::new(fs);
    CohomologyReport::run(window, |i| {
        let m = i as u32 + 1;
        let d = 2 * i as u32;
        (m <= pole_max && d <= d_max).then(|| Ok(Snapshot { degree: d, pole_order: Some(m), dims: c.level(m, d) }))
    })
}

/// Whether the truncated Čech–de Rham differential at pole order `m` and
/// degree `d` satisfies `d ∘ d = 0` exactly.
pub fn complement_square_vanishes(fs: &[MultiPoly], m: u32, d: u32) -> Result<bool, WeylError> {
    check_list(fs, 2)?;
    Ok(Cech::new(fs).square_vanishes(m, d))
}
