//! Dense reference computations for the truncated complexes. Shares no
//! arithmetic with the library: polynomials, forms and elimination are
//! re-done here from scratch on plain maps and dense matrices.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use dwork_core::weyl::MultiPoly;

pub type Q = BigRational;
pub type Poly = BTreeMap<Vec<u32>, Q>;
/// Coefficients keyed by (sorted index list, exponent).
pub type Form = BTreeMap<(Vec<usize>, Vec<u32>), Q>;

pub fn q(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}

pub fn from_library(p: &MultiPoly) -> Poly {
    p.terms().map(|(e, c)| (e.clone(), c.clone())).collect()
}

pub fn degree(p: &Poly) -> u32 {
    p.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn power(p: &Poly, k: u32, n: usize) -> Poly {
    let mut out: Poly = [(vec![0; n], Q::one())].into();
    for _ in 0..k {
        out = mul(&out, p);
    }
    out
}

pub fn partial(p: &Poly, i: usize) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        if e[i] > 0 {
            let mut e2 = e.clone();
            e2[i] -= 1;
            *out.entry(e2).or_insert_with(Q::zero) += c * q(e[i] as i64);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Exponents of total degree at most `d` in `n` variables.
pub fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in exponents(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `k`-element subsets of `0..n` as sorted lists.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `dx_i ∧ dx_S` as a sign and a sorted list, `None` if `i ∈ S`.
pub fn wedge(i: usize, s: &[usize]) -> Option<(i64, Vec<usize>)> {
    if s.contains(&i) {
        return None;
    }
    let before = s.iter().filter(|&&j| j < i).count();
    let mut t = s.to_vec();
    t.push(i);
    t.sort();
    Some((if before % 2 == 0 { 1 } else { -1 }, t))
}

/// Adds `c · dg ∧ dx_S` and `c' · dh ∧ g dx_S` to `out`.
fn add_d_terms(out: &mut Form, g: &Poly, s: &[usize], n: usize, with_dg: Option<&Q>, dh: Option<(&Poly, &Q)>) {
    for i in 0..n {
        let Some((sign, t)) = wedge(i, s) else { continue };
        let sign = q(sign);
        if let Some(c) = with_dg {
            for (e, v) in partial(g, i) {
                *out.entry((t.clone(), e)).or_insert_with(Q::zero) += &sign * c * v;
            }
        }
        if let Some((h, c)) = dh {
            for (e, v) in mul(&partial(h, i), g) {
                *out.entry((t.clone(), e)).or_insert_with(Q::zero) += &sign * c * v;
            }
        }
    }
}

/// Rank of a dense matrix by plain Gaussian elimination.
pub fn dense_rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        let pivot: Vec<Q> = m[r].iter().map(|v| v * &inv).collect();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for (j, pv) in pivot.iter().enumerate().skip(c) {
                    if !pv.is_zero() {
                        let t = &factor * pv;
                        m[i][j] -= t;
                    }
                }
            }
        }
        m[r] = pivot;
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Dense matrix of `rows` over the union of their keys, columns kept only
/// where `keep` says so.
fn densify<K: Ord + Clone>(rows: &[BTreeMap<K, Q>], keep: impl Fn(&K) -> bool) -> Vec<Vec<Q>> {
    let mut cols: Vec<K> = rows.iter().flat_map(|r| r.keys().cloned()).filter(|k| keep(k)).collect();
    cols.sort();
    cols.dedup();
    let index: BTreeMap<K, usize> = cols.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    rows.iter()
        .map(|r| {
            let mut v = vec![Q::zero(); cols.len()];
            for (k, c) in r {
                if let Some(&i) = index.get(k) {
                    v[i] = c.clone();
                }
            }
            v
        })
        .collect()
}

pub fn rank_of<K: Ord + Clone>(rows: &[BTreeMap<K, Q>]) -> usize {
    dense_rank(densify(rows, |_| true))
}

/// `d + dF∧` on the monomial forms of grade `k` and degree at most `d`.
fn twisted_rows(f: &Poly, n: usize, k: usize, d: u32) -> Vec<Form> {
    let mut rows = Vec::new();
    for s in subsets(n, k) {
        for e in exponents(n, d) {
            let g: Poly = [(e, Q::one())].into();
            let mut out = Form::new();
            add_d_terms(&mut out, &g, &s, n, Some(&Q::one()), Some((f, &Q::one())));
            out.retain(|_, c| !c.is_zero());
            rows.push(out);
        }
    }
    rows
}

/// Size of the largest dense matrix the twisted estimate at `d` builds.
pub fn twisted_size(n: usize, deg_f: u32, d: u32) -> usize {
    let binom = |a: usize, b: usize| (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1));
    (0..=n).map(|k| binom(n, k) * binom(n + (d + deg_f) as usize, n)).max().unwrap_or(0)
}

/// Twisted cohomology estimate at degree `d`: cycles of degree `≤ d` modulo
/// the part of the image of forms of degree `≤ d + deg F` that has degree `≤ d`.
pub fn twisted_dims(f: &Poly, n: usize, d: u32) -> Vec<usize> {
    let df = degree(f);
    (0..=n)
        .map(|k| {
            let rows = twisted_rows(f, n, k, d);
            let kernel = rows.len() - rank_of(&rows);
            let boundaries = if k == 0 {
                0
            } else {
                let b = twisted_rows(f, n, k - 1, d + df);
                let low = |key: &(Vec<usize>, Vec<u32>)| key.1.iter().sum::<u32>() <= d;
                // dim(im B ∩ low) = rank B − rank of B's high-degree part.
                rank_of(&b) - dense_rank(densify(&b, |key| !low(key)))
            };
            kernel - boundaries
        })
        .collect()
}

/// `d ∘ d` applied to every basis form of degree at most `d`; returns the
/// largest number of nonzero coefficients found (0 means it vanishes).
pub fn twisted_square(f: &Poly, n: usize, d: u32) -> usize {
    let mut worst = 0;
    for k in 0..n.saturating_sub(1) {
        for s in subsets(n, k) {
            for e in exponents(n, d) {
                let g: Poly = [(e, Q::one())].into();
                let mut once = Form::new();
                add_d_terms(&mut once, &g, &s, n, Some(&Q::one()), Some((f, &Q::one())));
                let mut twice = Form::new();
                for ((t, e2), c) in once {
                    let g2: Poly = [(e2, c)].into();
                    add_d_terms(&mut twice, &g2, &t, n, Some(&Q::one()), Some((f, &Q::one())));
                }
                twice.retain(|_, c| !c.is_zero());
                worst = worst.max(twice.len());
            }
        }
    }
    worst
}

/// Čech cover of the complement of `{f_1 = ... = f_r = 0}`.
pub struct CechOracle {
    n: usize,
    fs: Vec<Poly>,
    strata: Vec<Vec<usize>>,
    h: Vec<Poly>,
}

type CechKey = (usize, Vec<usize>, Vec<u32>);

impl CechOracle {
    pub fn new(fs: &[Poly], n: usize) -> Self {
        let r = fs.len();
        let mut strata: Vec<Vec<usize>> = (1..=r).flat_map(|k| subsets(r, k)).collect();
        strata.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let one: Poly = [(vec![0; n], Q::one())].into();
        let h = strata.iter().map(|s| s.iter().fold(one.clone(), |acc, &i| mul(&acc, &fs[i]))).collect();
        CechOracle { n, fs: fs.to_vec(), strata, h }
    }

    /// `(stratum, numerator, index set)` basis of total degree `t`.
    fn basis(&self, t: usize, m: u32, d: u32) -> Vec<(usize, Poly, Vec<usize>)> {
        let mut out = Vec::new();
        for (si, s) in self.strata.iter().enumerate() {
            let p = s.len() - 1;
            if t < p || t - p > self.n {
                continue;
            }
            for k in subsets(self.n, t - p) {
                for e in exponents(self.n, d + m * degree(&self.h[si])) {
                    out.push((si, [(e, Q::one())].into(), k.clone()));
                }
            }
        }
        out
    }

    /// Writes `num dx_K / h_I^from` over `h_I^to` into `out`.
    fn put(&self, out: &mut BTreeMap<CechKey, Q>, si: usize, num: &Form, from: u32, to: u32, sign: i64) {
        let lift = power(&self.h[si], to - from, self.n);
        for ((k, e), c) in num {
            let g: Poly = [(e.clone(), c.clone())].into();
            for (e2, v) in mul(&g, &lift) {
                *out.entry((si, k.clone(), e2)).or_insert_with(Q::zero) += q(sign) * v;
            }
        }
    }

    fn total_d(&self, (si, g, k): &(usize, Poly, Vec<usize>), m: u32, pole: u32) -> BTreeMap<CechKey, Q> {
        let s = &self.strata[*si];
        let h = &self.h[*si];
        let mut out = BTreeMap::new();
        // d(g dx_K / h^m) = (h dg − m g dh) ∧ dx_K / h^{m+1}, and
        // h dg − m g dh = d(hg) − (m+1) g dh.
        let hg = mul(h, g);
        let mut num = Form::new();
        add_d_terms(&mut num, &hg, k, self.n, Some(&Q::one()), None);
        add_d_terms(&mut num, g, k, self.n, None, Some((h, &-q(m as i64 + 1))));
        num.retain(|_, c| !c.is_zero());
        let sign = if (s.len() - 1).is_multiple_of(2) { 1 } else { -1 };
        self.put(&mut out, *si, &num, m + 1, pole, sign);
        for j in 0..self.fs.len() {
            if s.contains(&j) {
                continue;
            }
            let mut t = s.clone();
            t.push(j);
            t.sort();
            let ti = self.strata.iter().position(|x| *x == t).expect("all subsets present");
            let pos = t.iter().position(|&v| v == j).unwrap();
            let num: Form =
                mul(g, &power(&self.fs[j], m, self.n)).into_iter().map(|(e, c)| ((k.clone(), e), c)).collect();
            self.put(&mut out, ti, &num, m, pole, if pos % 2 == 0 { 1 } else { -1 });
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn embed(&self, (si, g, k): &(usize, Poly, Vec<usize>), m: u32, pole: u32) -> BTreeMap<CechKey, Q> {
        let num: Form = g.iter().map(|(e, c)| ((k.clone(), e.clone()), c.clone())).collect();
        let mut out = BTreeMap::new();
        self.put(&mut out, *si, &num, m, pole, 1);
        out
    }

    /// Estimate with pole order `m` and degree `d`; primitives of boundaries
    /// may use one more pole order and two more degrees.
    pub fn dims(&self, m: u32, d: u32) -> Vec<usize> {
        let top = self.n + self.fs.len() - 1;
        (0..=top)
            .map(|t| {
                let src = self.basis(t, m, d);
                let rows: Vec<_> = src.iter().map(|x| self.total_d(x, m, m + 1)).collect();
                let kernel = src.len() - rank_of(&rows);
                let boundaries = if t == 0 {
                    0
                } else {
                    let pole = m + 2;
                    let b: Vec<_> = self.basis(t - 1, m + 1, d + 2).iter().map(|x| self.total_d(x, m + 1, pole)).collect();
                    let l: Vec<_> = src.iter().map(|x| self.embed(x, m, pole)).collect();
                    let both: Vec<_> = b.iter().chain(l.iter()).cloned().collect();
                    rank_of(&b) + l.len() - rank_of(&both)
                };
                kernel - boundaries
            })
            .collect()
    }
}

/// `H^k_S(A^n)` from the complement's dimensions by the long exact sequence
/// with `H^•(A^n) = ℚ` in degree 0.
pub fn supports_from(u: &[usize]) -> Vec<usize> {
    let mut s = vec![0; u.len() + 1];
    let nonempty = u.first().copied().unwrap_or(0) > 0;
    s[0] = usize::from(!nonempty);
    if !u.is_empty() {
        s[1] = u[0] - usize::from(nonempty);
    }
    for k in 1..u.len() {
        s[k + 1] = u[k];
    }
    s
}

pub fn nonzero(v: &[usize]) -> BTreeMap<usize, usize> {
    v.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c)).collect()
}
