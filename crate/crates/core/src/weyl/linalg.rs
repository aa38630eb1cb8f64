//! Exact sparse Gaussian elimination over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::poly::Rational;

/// Nonzero entries sorted by increasing column.
pub type SparseRow = Vec<(usize, Rational)>;

/// Row echelon form in which every row is led by its largest column.
///
/// With columns ordered by a filtration, the span of the rows meets the
/// span of the first `c` columns in exactly the pivots below `c`.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: HashMap<usize, SparseRow>,
}

/// `a - f * b` on sorted sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - f * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `row` against the stored pivots; keeps it if independent.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|(_, v)| !v.is_zero());
        while let Some((c, lead)) = row.last().cloned() {
            match self.pivots.get(&c) {
                Some(p) => row = axpy(&row, &lead, p),
                None => {
                    let inv = Rational::one() / lead;
                    for e in row.iter_mut() {
                        e.1 = &e.1 * &inv;
                    }
                    self.pivots.insert(c, row);
                    return true;
                }
            }
        }
        false
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Column numbering that follows the order of the keys.
#[derive(Clone, Debug)]
pub struct Columns<K: Ord + Clone> {
    keys: Vec<K>,
    index: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Columns<K> {
    pub fn new(keys: impl IntoIterator<Item = K>) -> Self {
        let index: BTreeMap<K, usize> = keys.into_iter().map(|k| (k, 0)).collect();
        let keys: Vec<K> = index.keys().cloned().collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Columns { keys, index }
    }

    /// Columns spanning every key that occurs in `rows`.
    pub fn covering<'a>(rows: impl IntoIterator<Item = &'a BTreeMap<K, Rational>>) -> Self
    where
        K: 'a,
    {
        Self::new(rows.into_iter().flat_map(|r| r.keys().cloned()))
    }

    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Converts a keyed row; keys outside the columns are an error.
    pub fn row(&self, r: &BTreeMap<K, Rational>) -> Option<SparseRow> {
        let mut out: SparseRow = Vec::with_capacity(r.len());
        for (k, v) in r {
            if !v.is_zero() {
                out.push((*self.index.get(k)?, v.clone()));
            }
        }
        out.sort_by_key(|e| e.0);
        Some(out)
    }
}
