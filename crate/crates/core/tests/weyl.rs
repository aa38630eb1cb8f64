mod oracle;

use std::collections::BTreeMap;

use dwork_core::weyl::{
    complement_derham, complement_square_vanishes, dwork_compare, dwork_function, supports_cohomology, twisted_cohomology, twisted_level, Dims,
    DworkParams, MultiPoly, TruncatedComplex, WeylError,
};

fn poly(s: &str, vars: &[&str]) -> MultiPoly {
    MultiPoly::parse_in(s, vars).unwrap()
}

fn dims(pairs: &[(usize, usize)]) -> Dims {
    pairs.iter().copied().collect()
}

fn nonzero(d: &Dims) -> BTreeMap<usize, usize> {
    d.iter().filter(|(_, &c)| c > 0).map(|(&k, &c)| (k, c)).collect()
}

/// Dense matrices above this size are left to the sparse code alone.
const ORACLE_LIMIT: usize = 2000;

/// Checks every truncation level of a twisted run against the dense oracle.
fn twisted_against_oracle(f: &MultiPoly) -> usize {
    let r = twisted_cohomology(f, 3, 30).unwrap();
    let of = oracle::from_library(f);
    let n = f.nvars();
    let mut checked = 0;
    for snap in &r.truncation_trace {
        if oracle::twisted_size(n, f.degree().unwrap(), snap.degree) > ORACLE_LIMIT {
            continue;
        }
        let expected = oracle::twisted_dims(&of, n, snap.degree);
        let got: Vec<usize> = (0..=n).map(|k| snap.dims[&k]).collect();
        assert_eq!(got, expected, "{f} at D={}", snap.degree);
        checked += 1;
    }
    checked
}

#[test]
fn twisted_examples_match_the_oracle_and_frozen_values() {
    let xy = ["x", "y"];
    let cases: &[(&str, &[&str], &[(usize, usize)])] = &[
        ("x*y", &xy, &[(0, 0), (1, 0), (2, 1)]),
        ("x", &["x"], &[(0, 0), (1, 0)]),
        ("y*(x^2-1)", &xy, &[(0, 0), (1, 0), (2, 2)]),
        ("y*x^2", &xy, &[(0, 0), (1, 0), (2, 1)]),
        ("y*(x^3-x)", &xy, &[(0, 0), (1, 0), (2, 3)]),
        ("x^3", &["x"], &[(0, 0), (1, 2)]),
    ];
    for (text, vars, expected) in cases {
        let f = poly(text, vars);
        let r = twisted_cohomology(&f, 3, 30).unwrap();
        assert!(r.stabilized, "{text}");
        assert_eq!(r.dims, dims(expected), "{text}");
        assert!(twisted_against_oracle(&f) >= 1, "{text}: no level small enough for the oracle");
    }
}

#[test]
fn product_of_coordinates_at_the_documented_levels() {
    let f = poly("x*y", &["x", "y"]);
    let of = oracle::from_library(&f);
    for d in [8, 10, 12] {
        assert_eq!(oracle::twisted_dims(&of, 2, d), vec![0, 0, 1], "D={d}");
        let lib: Vec<usize> = twisted_level(&f, d).iter().map(|g| g.kernel - g.boundaries).collect();
        assert_eq!(lib, vec![0, 0, 1], "D={d}");
    }
}

#[test]
fn truncated_differentials_square_to_zero() {
    let cases: &[(&str, &[&str])] = &[
        ("x*y", &["x", "y"]),
        ("y*(x^2-1)", &["x", "y"]),
        ("y*(x^3-x)", &["x", "y"]),
        ("y1*x1 + y2*x2", &["x1", "x2", "y1", "y2"]),
        ("y*(x^2+z^2-1)", &["x", "z", "y"]),
    ];
    for (text, vars) in cases {
        let f = poly(text, vars);
        let of = oracle::from_library(&f);
        for d in (f.degree().unwrap()..=10).step_by(2) {
            assert!(TruncatedComplex::new(&f, d).composite_vanishes(), "{text} D={d}");
            if oracle::twisted_size(vars.len(), 0, d) <= ORACLE_LIMIT {
                assert_eq!(oracle::twisted_square(&of, vars.len(), d), 0, "{text} D={d}");
            }
        }
    }
}

#[test]
fn cech_differentials_square_to_zero() {
    let cases: &[(&[&str], &[&str])] = &[
        (&["x^2-1"], &["x"]),
        (&["x^3-x"], &["x"]),
        (&["x", "y"], &["x", "y"]),
        (&["x*y-1"], &["x", "y"]),
        (&["x", "x-1"], &["x"]),
    ];
    for (texts, vars) in cases {
        let fs: Vec<MultiPoly> = texts.iter().map(|t| poly(t, vars)).collect();
        let r = complement_derham(&fs, 10, 30, 3).unwrap();
        for snap in &r.truncation_trace {
            let m = snap.pole_order.unwrap();
            assert!(complement_square_vanishes(&fs, m, snap.degree).unwrap(), "{texts:?} m={m} D={}", snap.degree);
        }
    }
}

#[test]
fn grade_data_is_consistent() {
    let f = poly("y*(x^2-1)", &["x", "y"]);
    for d in [3, 5, 7] {
        let level = twisted_level(&f, d);
        let euler: i64 = level.iter().enumerate().map(|(k, g)| (-1i64).pow(k as u32) * g.basis as i64).sum();
        let by_ranks: i64 = level
            .iter()
            .enumerate()
            .map(|(k, g)| (-1i64).pow(k as u32) * (g.kernel + g.rank) as i64)
            .sum();
        assert_eq!(euler, by_ranks);
        for (k, g) in level.iter().enumerate() {
            assert!(g.boundaries <= g.kernel, "grade {k}");
            // Boundaries landing in degree ≤ d never exceed what the previous grade can produce.
            if k > 0 {
                assert!(g.boundaries <= level[k - 1].basis + level[k - 1].rank);
            }
        }
    }
}

#[test]
fn complement_examples_match_the_oracle() {
    let cases: &[(&[&str], usize, &[(usize, usize)])] = &[
        (&["x"], 1, &[(0, 1), (1, 1)]),
        (&["x^2-1"], 1, &[(0, 1), (1, 2)]),
        (&["x^2"], 1, &[(0, 1), (1, 1)]),
        (&["x^3-x"], 1, &[(0, 1), (1, 3)]),
        (&["x*y-1"], 2, &[(0, 1), (1, 1), (2, 1)]),
        (&["x1", "x2"], 2, &[(0, 1), (1, 0), (2, 0), (3, 1)]),
    ];
    let names = ["x1", "x2"];
    for (texts, n, expected) in cases {
        let vars: Vec<&str> = if *n == 1 { vec!["x"] } else if texts.len() == 1 { vec!["x", "y"] } else { names.to_vec() };
        let fs: Vec<MultiPoly> = texts.iter().map(|t| poly(t, &vars)).collect();
        let r = complement_derham(&fs, 10, 30, 3).unwrap();
        assert!(r.stabilized, "{texts:?}");
        assert_eq!(r.dims, dims(expected), "{texts:?}");
        let o = oracle::CechOracle::new(&fs.iter().map(oracle::from_library).collect::<Vec<_>>(), *n);
        // The first two levels are small enough for dense elimination.
        for snap in r.truncation_trace.iter().take(2) {
            let m = snap.pole_order.unwrap();
            let got: Vec<usize> = (0..snap.dims.len()).map(|k| snap.dims[&k]).collect();
            assert_eq!(got, o.dims(m, snap.degree), "{texts:?} at m={m} D={}", snap.degree);
        }
    }
}

#[test]
fn constant_inputs_are_rejected() {
    assert!(matches!(complement_derham(&[poly("1", &["x"])], 10, 30, 3), Err(WeylError::Constant(_))));
    assert!(matches!(twisted_cohomology(&poly("7", &["x", "y"]), 3, 30), Err(WeylError::Constant(_))));
    assert!(matches!(dwork_compare(&[], &DworkParams::default()), Err(WeylError::Empty)));
}

#[test]
fn supports_from_the_long_exact_sequence() {
    let cases: &[(&str, &[(usize, usize)])] = &[("x", &[(2, 1)]), ("x^2-1", &[(2, 2)]), ("x^2", &[(2, 1)])];
    for (text, expected) in cases {
        let f = poly(text, &["x"]);
        let s = supports_cohomology(&[f.clone()], 10, 30, 3).unwrap();
        assert!(s.exact(), "{text}");
        assert_eq!(nonzero(&s.dims), dims(expected), "{text}");
        let u: Vec<usize> = (0..s.complement.dims.len()).map(|k| s.complement.dims[&k]).collect();
        assert_eq!(oracle::nonzero(&oracle::supports_from(&u)), dims(expected), "{text}");
    }
}

/// The comparison suite: both sides, exact, stabilized, and the values the
/// oracle gives for the twisted side.
#[test]
fn comparison_suite() {
    let one = ["x"];
    let two = ["x1", "x2"];
    let cases: &[(&[&str], &[&str], &[(usize, usize)])] = &[
        (&["x"], &one, &[(2, 1)]),
        (&["x^2"], &one, &[(2, 1)]),
        (&["x^2-1"], &one, &[(2, 2)]),
        (&["x^3-x"], &one, &[(2, 3)]),
        (&["x1", "x2"], &two, &[(4, 1)]),
        (&["x^3"], &one, &[(2, 1)]),
        (&["x1*x2-1"], &two, &[(2, 1), (3, 1)]),
        (&["x1^2+x2^2-1"], &two, &[(2, 1), (3, 1)]),
        (&["x1", "x1-1"], &two, &[]),
    ];
    for (texts, vars, expected) in cases {
        let fs: Vec<MultiPoly> = texts.iter().map(|t| poly(t, vars)).collect();
        let r = dwork_compare(&fs, &DworkParams::default()).unwrap();
        assert!(r.stabilized, "{texts:?}");
        assert!(r.matched, "{texts:?}: {:?} vs {:?}", r.twisted.dims, r.supports.dims);
        assert!(r.supports.exact(), "{texts:?}");
        assert_eq!(nonzero(&r.twisted.dims), dims(expected), "{texts:?}");
        assert_eq!(r.exit_code(), 0);
        let big = dwork_function(&fs);
        let n = big.nvars();
        let last = r.twisted.truncation_trace.last().unwrap();
        if oracle::twisted_size(n, big.degree().unwrap(), last.degree) <= ORACLE_LIMIT {
            let o = oracle::twisted_dims(&oracle::from_library(&big), n, last.degree);
            assert_eq!(oracle::nonzero(&o), dims(expected), "{texts:?}");
        } else {
            assert!(twisted_against_oracle(&big) >= 1, "{texts:?}");
        }
    }
}

#[test]
fn supports_ignore_nilpotents() {
    for text in ["x", "x^2-1", "x^3-x"] {
        let f = poly(text, &["x"]);
        let base = dwork_compare(&[f.clone()], &DworkParams::default()).unwrap();
        for k in [2, 3] {
            let fk = f.pow(k);
            let s = supports_cohomology(&[fk.clone()], 10, 30, 3).unwrap();
            assert_eq!(nonzero(&s.dims), nonzero(&base.supports.dims), "{text} ^ {k}");
            let r = dwork_compare(&[fk], &DworkParams::default()).unwrap();
            assert!(r.stabilized && r.matched, "{text} ^ {k}");
            assert_eq!(nonzero(&r.twisted.dims), nonzero(&base.twisted.dims), "{text} ^ {k}");
        }
    }
}

#[test]
fn inconclusive_when_the_cap_is_too_small() {
    let r = dwork_compare(&[poly("x", &["x"])], &DworkParams { d_max: Some(2), ..DworkParams::default() }).unwrap();
    assert!(!r.stabilized);
    assert_eq!(r.exit_code(), 3);
}

#[test]
fn empty_zero_set_has_no_supports() {
    let v = ["x", "y"];
    let fs = [poly("x", &v), poly("x-1", &v)];
    let s = supports_cohomology(&fs, 10, 30, 3).unwrap();
    assert!(nonzero(&s.dims).is_empty());
    assert!(s.exact());
}
