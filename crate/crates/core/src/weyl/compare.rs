//! Supports in `S` from the long exact sequence of `(A^n, U)`, and the
//! comparison with twisted cohomology of `F = Σ y_i f_i`.

use serde::Serialize;

use super::complement::{check_list, complement_derham};
use super::poly::MultiPoly;
use super::report::{nonzero, CohomologyReport, Dims, WeylError};
use super::twisted::twisted_cohomology;

/// One term of the long exact sequence with the ranks of the maps into and
/// out of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesNode {
    pub label: String,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
}

impl LesNode {
    pub fn exact(&self) -> bool {
        self.dim == self.rank_in + self.rank_out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportsReport {
    pub dims: Dims,
    pub stabilized: bool,
    pub sequence: Vec<LesNode>,
    pub complement: CohomologyReport,
}

impl SupportsReport {
    pub fn exact(&self) -> bool {
        self.sequence.iter().all(LesNode::exact)
    }
}

/// `H^k_S(A^n)` from `… → H^{k−1}(U) → H^k_S → H^k(A^n) → H^k(U) → …`
/// with `H^•(A^n) = {0: 1}`. Only the restriction `H^0(A^n) → H^0(U)` can
/// be nonzero among the maps out of `H^•(A^n)`; it is injective iff `U` is
/// nonempty.
pub fn supports_from_complement(u: &Dims, max_degree: usize) -> (Dims, Vec<LesNode>) {
    let hu = |k: usize| u.get(&k).copied().unwrap_or(0);
    let ha = |k: usize| usize::from(k == 0);
    let r0 = hu(0).min(1);
    // ranks: restriction H^k(A) -> H^k(U), connecting H^k(U) -> H^{k+1}_S,
    // forgetful H^k_S -> H^k(A)
    let restr = |k: usize| if k == 0 { r0 } else { 0 };
    let conn = |k: usize| hu(k) - restr(k);
    let forget = |k: usize| ha(k) - restr(k);
    let mut dims = Dims::new();
    let mut seq = Vec::new();
    for k in 0..=max_degree {
        let s = if k == 0 { forget(0) } else { conn(k - 1) + forget(k) };
        dims.insert(k, s);
        seq.push(LesNode {
            label: format!("H^{k}_S"),
            dim: s,
            rank_in: if k == 0 { 0 } else { conn(k - 1) },
            rank_out: forget(k),
        });
        seq.push(LesNode { label: format!("H^{k}(A)"), dim: ha(k), rank_in: forget(k), rank_out: restr(k) });
        seq.push(LesNode { label: format!("H^{k}(U)"), dim: hu(k), rank_in: restr(k), rank_out: conn(k) });
    }
    (dims, seq)
}

/// Supports cohomology of the common zero set of `fs`.
pub fn supports_cohomology(fs: &[MultiPoly], pole_max: u32, d_max: u32, window: usize) -> Result<SupportsReport, WeylError> {
    let complement = complement_derham(fs, pole_max, d_max, window)?;
    let top = fs[0].nvars() + fs.len();
    let (dims, sequence) = supports_from_complement(&complement.dims, top);
    Ok(SupportsReport { dims, stabilized: complement.stabilized, sequence, complement })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DworkParams {
    /// Degree cap; `None` picks 30, or 16 from four variables on.
    pub d_max: Option<u32>,
    pub pole_max: u32,
    pub window: usize,
}

impl Default for DworkParams {
    fn default() -> Self {
        DworkParams { d_max: None, pole_max: 10, window: 3 }
    }
}

pub fn default_d_max(nvars: usize) -> u32 {
    if nvars >= 4 {
        16
    } else {
        30
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub r: usize,
    pub f: Vec<String>,
    #[serde(rename = "F")]
    pub dwork_function: String,
    pub twisted: CohomologyReport,
    pub supports: SupportsReport,
    pub matched: bool,
    pub stabilized: bool,
}

impl ComparisonReport {
    /// 0 matched, 1 mismatch, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        if !self.stabilized {
            3
        } else if self.matched {
            0
        } else {
            1
        }
    }
}

pub fn base_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `F = Σ y_i f_i` on `A^n × A^r`, base variables first.
pub fn dwork_function(fs: &[MultiPoly]) -> MultiPoly {
    let n = fs[0].nvars();
    let total = n + fs.len();
    let map: Vec<usize> = (0..n).collect();
    fs.iter().enumerate().fold(MultiPoly::zero(total), |acc, (i, f)| {
        &acc + &(&f.embed(total, &map) * &MultiPoly::var(total, n + i))
    })
}

/// Computes both sides of the comparison for `fs` in `n` variables.
pub fn dwork_compare(fs: &[MultiPoly], params: &DworkParams) -> Result<ComparisonReport, WeylError> {
    check_list(fs, params.window)?;
    let n = fs[0].nvars();
    let r = fs.len();
    let big = dwork_function(fs);
    let d_max = params.d_max.unwrap_or_else(|| default_d_max(n + r));
    let twisted = twisted_cohomology(&big, params.window, d_max)?;
    let supports = supports_cohomology(fs, params.pole_max, d_max, params.window)?;
    let matched = nonzero(&twisted.dims) == nonzero(&supports.dims);
    let stabilized = twisted.stabilized && supports.stabilized;
    let mut names = base_names(n);
    names.extend((1..=r).map(|i| format!("y{i}")));
    Ok(ComparisonReport {
        n,
        r,
        f: fs.iter().map(|f| f.display_with(&base_names(n))).collect(),
        dwork_function: big.display_with(&names),
        twisted,
        supports,
        matched,
        stabilized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_for_a_point_on_the_line() {
        let (dims, seq) = supports_from_complement(&Dims::from([(0, 1), (1, 1)]), 2);
        assert_eq!(nonzero(&dims), Dims::from([(2, 1)]));
        assert!(seq.iter().all(LesNode::exact));
    }

    #[test]
    fn empty_complement() {
        // U empty: S is everything.
        let (dims, _) = supports_from_complement(&Dims::new(), 1);
        assert_eq!(nonzero(&dims), Dims::from([(0, 1)]));
    }

    #[test]
    fn single_point_matches() {
        let f = MultiPoly::parse_in("x", &["x"]).unwrap();
        let r = dwork_compare(&[f], &DworkParams::default()).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.dwork_function, "x1*y1");
    }
}
