//! Twisted de Rham cohomology of `e^F` on affine space, by truncation in
//! coefficient degree.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::forms::{index_sets, wedge_index, IndexSet};
use super::linalg::{rank, Columns, Echelon};
use super::poly::{monomials, Exponent, MultiPoly, Rational};
use super::report::{CohomologyReport, Dims, Snapshot, WeylError};

/// Column key ordered by coefficient degree first, so that truncations are
/// initial segments.
pub type FormKey = (u32, Exponent, IndexSet);

fn key(e: Exponent, s: IndexSet) -> FormKey {
    (e.iter().sum(), e, s)
}

/// Monomial forms `x^e dx_S` with `deg e <= degree`, and the twisted
/// differential on them.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub degree: u32,
    pub f: MultiPoly,
    /// Per grade, the basis in graded order.
    pub bases: Vec<Vec<(IndexSet, Exponent)>>,
    partials: Vec<MultiPoly>,
}

impl TruncatedComplex {
    pub fn new(f: &MultiPoly, degree: u32) -> Self {
        let n = f.nvars();
        let monos = monomials(n, degree);
        let bases = (0..=n)
            .map(|k| {
                let mut b: Vec<(IndexSet, Exponent)> =
                    index_sets(n, k).into_iter().flat_map(|s| monos.iter().map(move |e| (s, e.clone()))).collect();
                b.sort_by(|a, c| key(a.1.clone(), a.0).cmp(&key(c.1.clone(), c.0)));
                b
            })
            .collect();
        TruncatedComplex { degree, f: f.clone(), bases, partials: (0..n).map(|i| f.deriv(i)).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    /// Twisted differential of `x^e dx_S`.
    pub fn apply(&self, s: IndexSet, e: &[u32]) -> BTreeMap<FormKey, Rational> {
        let mut out: BTreeMap<FormKey, Rational> = BTreeMap::new();
        let mut push = |k: FormKey, v: Rational| {
            let slot = out.entry(k).or_insert_with(|| Rational::from_integer(BigInt::from(0)));
            *slot += v;
        };
        for i in 0..self.nvars() {
            let Some((sign, t)) = wedge_index(i, s) else { continue };
            let sign = Rational::from_integer(BigInt::from(sign));
            if e[i] > 0 {
                let mut e2 = e.to_vec();
                e2[i] -= 1;
                push(key(e2, t), &sign * Rational::from_integer(BigInt::from(e[i])));
            }
            for (a, c) in self.partials[i].terms() {
                let e2: Exponent = a.iter().zip(e).map(|(x, y)| x + y).collect();
                push(key(e2, t), &sign * c);
            }
        }
        out.retain(|_, v| *v != Rational::from_integer(BigInt::from(0)));
        out
    }

    /// Rows of the differential on grade `k`.
    pub fn rows(&self, k: usize) -> Vec<BTreeMap<FormKey, Rational>> {
        self.bases[k].iter().map(|(s, e)| self.apply(*s, e)).collect()
    }

    /// Checks that `d ∘ d` vanishes on every basis form of degree at most
    /// `degree − 2 deg F`, where the composite stays inside the truncation.
    pub fn composite_vanishes(&self) -> bool {
        let df = self.f.degree().unwrap_or(0);
        let Some(bound) = self.degree.checked_sub(2 * df) else { return true };
        for k in 0..self.nvars().saturating_sub(1) {
            for (s, e) in &self.bases[k] {
                if e.iter().sum::<u32>() > bound {
                    continue;
                }
                let mut total: BTreeMap<FormKey, Rational> = BTreeMap::new();
                for ((_, e2, t), c) in self.apply(*s, e) {
                    for (k2, c2) in self.apply(t, &e2) {
                        *total.entry(k2).or_insert_with(|| Rational::from_integer(BigInt::from(0))) += &c * c2;
                    }
                }
                if total.values().any(|v| *v != Rational::from_integer(BigInt::from(0))) {
                    return false;
                }
            }
        }
        true
    }
}

/// Per-grade data of one truncation level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradeData {
    pub basis: usize,
    pub rank: usize,
    pub kernel: usize,
    /// Image of the previous grade that lands in the truncation.
    pub boundaries: usize,
}

/// Cohomology estimate at coefficient degree `degree`: cycles of degree at
/// most `degree` modulo boundaries of forms of degree at most
/// `degree + deg F`.
pub fn twisted_level(f: &MultiPoly, degree: u32) -> Vec<GradeData> {
    let df = f.degree().unwrap_or(0);
    let small = TruncatedComplex::new(f, degree);
    let large = TruncatedComplex::new(f, degree + df);
    let n = f.nvars();
    (0..=n)
        .map(|k| {
            let rows = small.rows(k);
            let cols = Columns::covering(rows.iter());
            let rk = rank(rows.iter().map(|r| cols.row(r).expect("covered")));
            let boundaries = if k == 0 {
                0
            } else {
                let rows = large.rows(k - 1);
                let cols = Columns::covering(rows.iter());
                let mut ech = Echelon::new();
                for r in &rows {
                    ech.insert(cols.row(r).expect("covered"));
                }
                ech.pivot_columns().filter(|&c| cols.key(c).0 <= degree).count()
            };
            let basis = small.bases[k].len();
            GradeData { basis, rank: rk, kernel: basis - rk, boundaries }
        })
        .collect()
}

fn level_dims(data: &[GradeData]) -> Dims {
    data.iter().enumerate().map(|(k, g)| (k, g.kernel - g.boundaries)).collect()
}

fn check_input(f: &MultiPoly, window: usize) -> Result<(), WeylError> {
    if window < 2 {
        return Err(WeylError::Window(window));
    }
    if f.nvars() > 16 {
        return Err(WeylError::TooManyVariables(f.nvars()));
    }
    if f.is_constant() {
        return Err(WeylError::Constant(f.to_string()));
    }
    Ok(())
}

/// Dimensions of `H^k` of `(Ω^•, d + dF∧)` on affine space, stabilized over
/// truncation degrees `deg F, deg F + 2, ...` up to `d_max`.
pub fn twisted_cohomology(f: &MultiPoly, window: usize, d_max: u32) -> Result<CohomologyReport, WeylError> {
    check_input(f, window)?;
    let df = f.degree().expect("nonconstant");
    CohomologyReport::run(window, |i| {
        let degree = df + 2 * i as u32;
        (degree <= d_max)
            .then(|| Ok(Snapshot { degree, pole_order: None, dims: level_dims(&twisted_level(f, degree)) }))
    })
}
