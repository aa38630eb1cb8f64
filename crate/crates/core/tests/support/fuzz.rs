use proptest::prelude::*;

use dwork_core::builtin::{builtins, replay};
use dwork_core::expr::{DExpr, GeometryContext};
use dwork_core::rewrite::{apply_rule, moves, rules, Bindings, Direction, Mode, SearchOptions};

/// Every term reached while replaying the bundled certificates, with its context.
pub fn seeds() -> Vec<(GeometryContext, DExpr)> {
    let mut out = Vec::new();
    for b in builtins() {
        let r = replay(&b, None, None);
        let mut terms = vec![b.certificate.goal_lhs.clone(), b.certificate.goal_rhs.clone()];
        terms.extend(r.steps.iter().map(|s| s.term.clone()));
        for t in terms {
            out.push((b.context.clone(), t));
        }
    }
    out
}

pub fn loose() -> SearchOptions {
    SearchOptions { mode: Mode::AllowSingular, strata: 9, size_cap: 40, ..SearchOptions::default() }
}

/// Follows the chosen moves from a seed, staying put when none apply.
pub fn walk(ctx: &GeometryContext, start: &DExpr, choices: &[usize]) -> DExpr {
    let mut cur = start.clone();
    for &c in choices {
        let ms = moves(ctx, &cur, &loose());
        if ms.is_empty() {
            break;
        }
        cur = ms[c % ms.len()].term.clone();
    }
    cur
}

/// Applies every (rule, direction, path) that fires on `term` and undoes it
/// at the same path. Returns the number of triples checked.
pub fn round_trip_all(ctx: &GeometryContext, term: &DExpr) -> Result<usize, TestCaseError> {
    let var = ctx.well_formed(term).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut n = 0;
    for path in term.paths() {
        for def in rules() {
            for dir in [Direction::Forward, Direction::Backward] {
                let Ok(a) = apply_rule(ctx, term, def.id, dir, &path, &Bindings::new(), Mode::AllowSingular) else {
                    continue;
                };
                n += 1;
                if a.term == *term {
                    // Shift-unit introduction under an existing shift changes nothing.
                    continue;
                }
                prop_assert_eq!(ctx.well_formed(&a.term).ok(), Some(var.clone()), "{} {} at {}", def.id, dir, path);
                let back = apply_rule(ctx, &a.term, def.id, dir.flip(), &path, &a.inverse, Mode::AllowSingular)
                    .map_err(|e| TestCaseError::fail(format!("{} {} at {} on {:?}: undo failed: {e}", def.id, dir, path, term)))?;
                prop_assert!(ctx.nf_eq(&back.term, term), "{} {} at {} on {:?} came back as {:?}", def.id, dir, path, term, back.term);
                prop_assert_eq!(a.delta + back.delta, 0);
            }
        }
    }
    Ok(n)
}
