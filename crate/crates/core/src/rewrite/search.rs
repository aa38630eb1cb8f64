//! Bidirectional breadth-first proof search.

use std::collections::HashMap;

use crate::expr::{DExpr, GeometryContext, Morphism, Path, Subvariety};

use super::certificate::{check_certificate, Application, ProofCertificate, ProofStep, StepRule};
use super::engine::{apply_rule, rules, Binding, Bindings, Direction, Mode};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub mode: Mode,
    pub strata: u8,
    /// Terms larger than this (in nodes) are not explored.
    pub size_cap: usize,
    /// Bound on explored terms per side.
    pub node_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { mode: Mode::Strict, strata: 1, size_cap: 64, node_limit: 50_000 }
    }
}

/// Moves that only introduce trivial structure and would flood the search.
const EXCLUDED: &[(&str, Direction)] = &[
    ("R19.opb_id", Direction::Backward),
    ("R19.oim_id", Direction::Backward),
    ("R19.tensor_unit", Direction::Backward),
    ("R19.shift_zero", Direction::Backward),
    ("R19.shift_merge", Direction::Backward),
    ("R18", Direction::Forward),
];

#[derive(Clone, Debug)]
pub struct Move {
    pub rule: &'static str,
    pub dir: Direction,
    pub path: Path,
    pub bindings: Bindings,
    pub inverse: Bindings,
    pub term: DExpr,
}

fn binding_candidates(ctx: &GeometryContext, rule: &str, dir: Direction, sub: &DExpr) -> Vec<Bindings> {
    let one = |k: &str, b: Binding| {
        let mut m = Bindings::new();
        m.insert(k.to_string(), b);
        m
    };
    match (rule, dir, sub) {
        ("R19.opb_struct", Direction::Backward, DExpr::Struct(x)) => ctx
            .morphism_names()
            .filter(|m| ctx.morphism(m).is_some_and(|d| d.source == *x))
            .map(|m| one("f", Binding::Morphism(Morphism::atom(m))))
            .collect(),
        ("R7", Direction::Backward, DExpr::RGamma(t, _)) => {
            let Ok(nt) = ctx.normalize_subvariety(t) else { return vec![] };
            let names: Vec<&str> = ctx.subvariety_names().collect();
            let mut out = Vec::new();
            for a in &names {
                for b in &names {
                    if a == b {
                        continue;
                    }
                    let i = Subvariety::intersection(Subvariety::atom(a), Subvariety::atom(b));
                    if ctx.normalize_subvariety(&i).ok().as_ref() == Some(&nt) {
                        let mut m = one("outer", Binding::Subvariety(Subvariety::atom(a)));
                        m.insert("inner".into(), Binding::Subvariety(Subvariety::atom(b)));
                        out.push(m);
                    }
                }
            }
            out
        }
        ("R1", Direction::Backward, DExpr::Opb(h, _)) | ("R2", Direction::Backward, DExpr::Oim(h, _)) => {
            let Ok(n) = ctx.morphism_atoms(h) else { return vec![] };
            if n.atoms.len() <= 2 {
                return vec![Bindings::new()];
            }
            (1..n.atoms.len())
                .map(|k| one("f", Binding::Morphism(Morphism::from_atoms(&n.atoms[..k], &n.source))))
                .collect()
        }
        _ => vec![Bindings::new()],
    }
}

/// Every single rule application available on `term`, in a fixed order.
pub fn moves(ctx: &GeometryContext, term: &DExpr, opts: &SearchOptions) -> Vec<Move> {
    let mut out = Vec::new();
    for path in term.paths() {
        let Some(sub) = term.subterm(&path) else { continue };
        for def in rules() {
            if def.stratum > opts.strata {
                continue;
            }
            for dir in [Direction::Forward, Direction::Backward] {
                if EXCLUDED.contains(&(def.id, dir)) {
                    continue;
                }
                for b in binding_candidates(ctx, def.id, dir, sub) {
                    if let Ok(a) = apply_rule(ctx, term, def.id, dir, &path, &b, opts.mode) {
                        if a.term.size() <= opts.size_cap {
                            out.push(Move {
                                rule: def.id,
                                dir,
                                path: path.clone(),
                                bindings: b,
                                inverse: a.inverse,
                                term: a.term,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

struct Node {
    term: DExpr,
    parent: Option<(usize, Move)>,
}

struct Side {
    nodes: Vec<Node>,
    seen: HashMap<DExpr, usize>,
    frontier: Vec<usize>,
}

impl Side {
    fn new(ctx: &GeometryContext, start: &DExpr) -> Option<Self> {
        let nf = ctx.normalize_expr(start).ok()?;
        let mut seen = HashMap::new();
        seen.insert(nf, 0);
        Some(Side { nodes: vec![Node { term: start.clone(), parent: None }], seen, frontier: vec![0] })
    }

    fn chain(&self, mut i: usize) -> Vec<Move> {
        let mut out = Vec::new();
        while let Some((p, mv)) = &self.nodes[i].parent {
            out.push(mv.clone());
            i = *p;
        }
        out.reverse();
        out
    }
}

fn assemble(fwd: &Side, fi: usize, bwd: &Side, bi: usize) -> Vec<ProofStep> {
    let mut steps: Vec<ProofStep> = fwd
        .chain(fi)
        .into_iter()
        .map(|m| ProofStep {
            rule: StepRule::Rule(m.rule.to_string()),
            applications: vec![Application { direction: m.dir, path: m.path, bindings: m.bindings }],
        })
        .collect();
    let mut cur = fwd.nodes[fi].term.clone();
    let mut i = bi;
    while let Some((p, mv)) = &bwd.nodes[i].parent {
        let here = bwd.nodes[i].term.clone();
        if cur != here {
            steps.push(ProofStep { rule: StepRule::Conv(here), applications: vec![] });
        }
        steps.push(ProofStep {
            rule: StepRule::Rule(mv.rule.to_string()),
            applications: vec![Application { direction: mv.dir.flip(), path: mv.path.clone(), bindings: mv.inverse.clone() }],
        });
        cur = bwd.nodes[*p].term.clone();
        i = *p;
    }
    steps
}

fn search_plain(
    ctx: &GeometryContext,
    lhs: &DExpr,
    rhs: &DExpr,
    depth: usize,
    opts: &SearchOptions,
    closure: Option<Morphism>,
    goal: (&DExpr, &DExpr),
) -> Option<ProofCertificate> {
    let mut sides = [Side::new(ctx, lhs)?, Side::new(ctx, rhs)?];
    let make = |steps: Vec<ProofStep>| {
        let mut c = ProofCertificate::new(goal.0.clone(), goal.1.clone());
        c.steps = steps;
        c.mode = opts.mode;
        c.allowed_strata = opts.strata;
        c.closure = closure.clone();
        check_certificate(ctx, &c).valid.then_some(c)
    };
    if let Some(&bi) = sides[1].seen.get(&ctx.normalize_expr(lhs).ok()?) {
        if let Some(c) = make(assemble(&sides[0], 0, &sides[1], bi)) {
            return Some(c);
        }
    }
    let mut depths = [0usize, 0usize];
    while depths[0] + depths[1] < depth {
        let s = if depths[0] <= depths[1] { 0 } else { 1 };
        let frontier = std::mem::take(&mut sides[s].frontier);
        if frontier.is_empty() && sides[1 - s].frontier.is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for idx in frontier {
            let term = sides[s].nodes[idx].term.clone();
            for mv in moves(ctx, &term, opts) {
                let Ok(nf) = ctx.normalize_expr(&mv.term) else { continue };
                if sides[s].seen.contains_key(&nf) || sides[s].nodes.len() >= opts.node_limit {
                    continue;
                }
                let id = sides[s].nodes.len();
                sides[s].nodes.push(Node { term: mv.term.clone(), parent: Some((idx, mv)) });
                sides[s].seen.insert(nf.clone(), id);
                next.push(id);
                if let Some(&other) = sides[1 - s].seen.get(&nf) {
                    let steps = if s == 0 {
                        assemble(&sides[0], id, &sides[1], other)
                    } else {
                        assemble(&sides[0], other, &sides[1], id)
                    };
                    if let Some(c) = make(steps) {
                        return Some(c);
                    }
                }
            }
        }
        sides[s].frontier = next;
        depths[s] += 1;
    }
    None
}

/// Searches for a certificate of `lhs ~ rhs` using at most `depth` rule
/// applications, first directly and then under the direct image of a closed
/// embedding. Returned certificates have been checked.
pub fn search_equiv(
    ctx: &GeometryContext,
    lhs: &DExpr,
    rhs: &DExpr,
    depth: usize,
    opts: &SearchOptions,
) -> Option<ProofCertificate> {
    let var = ctx.well_formed(lhs).ok()?;
    if ctx.well_formed(rhs).ok()? != var {
        return None;
    }
    if let Some(c) = search_plain(ctx, lhs, rhs, depth, opts, None, (lhs, rhs)) {
        return Some(c);
    }
    let embeddings: Vec<String> = ctx
        .morphism_names()
        .filter(|m| {
            ctx.is_closed_embedding(m)
                && ctx.morphism(m).is_some_and(|d| {
                    d.source == var && (opts.mode == Mode::AllowSingular || ctx.is_smooth(&d.source))
                })
        })
        .map(str::to_string)
        .collect();
    for j in embeddings {
        let jm = Morphism::Atom(j);
        let l = DExpr::oim(jm.clone(), lhs.clone());
        let r = DExpr::oim(jm.clone(), rhs.clone());
        if let Some(c) = search_plain(ctx, &l, &r, depth, opts, Some(jm), (lhs, rhs)) {
            return Some(c);
        }
    }
    None
}
