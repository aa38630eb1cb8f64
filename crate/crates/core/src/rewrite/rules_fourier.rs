//! Fourier–Laplace transform and exterior product rules.

use crate::expr::{DExpr, Morphism, MorphismKind, NormMorph};

use super::engine::{Env, RuleDef, RuleError, Rw};

type Out = Result<Vec<Rw>, RuleError>;

fn single_atom(n: &NormMorph) -> Option<&str> {
    (n.atoms.len() == 1).then(|| n.atoms[0].as_str())
}

fn dual(env: &Env, b: &str) -> Option<String> {
    env.ctx.bundle(b)?.dual.clone()
}

/// `(p_total, p_dual, kernel)` of the integral transform over bundle `b`.
fn fourier_data(env: &Env, b: &str) -> Option<(Morphism, Morphism, DExpr)> {
    let d = dual(env, b)?;
    let pt = env.ctx.fiber_projection_of(b)?;
    let pd = env.ctx.fiber_projection_of(&d)?;
    let g = env.ctx.pairing_of(b)?;
    let a1 = env.ctx.morphism(g)?.target.clone();
    let t = env.ctx.coordinate_on(&a1)?;
    let kernel = DExpr::opb(Morphism::atom(g), DExpr::Exp(a1, crate::expr::Function::atom(t)));
    Some((Morphism::atom(pt), Morphism::atom(pd), kernel))
}

fn bundle_names(env: &Env) -> Result<Vec<String>, RuleError> {
    let only = env.name("bundle")?;
    let mut v: Vec<String> = env
        .ctx
        .declarations()
        .iter()
        .filter_map(|d| match d {
            crate::expr::Declaration::Bundle(b) => Some(b.total.clone()),
            _ => None,
        })
        .collect();
    if let Some(o) = only {
        v.retain(|b| *b == o);
    }
    Ok(v)
}

fn r12_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Fourier(b, n) = e else { return Ok(vec![]) };
    let (pt, pd, kernel) =
        fourier_data(env, b).ok_or_else(|| env.side(format!("bundle {b} lacks fiber product, pairing or coordinate")))?;
    Ok(vec![Rw::new(DExpr::oim(pd, DExpr::tensor(DExpr::opb(pt, (**n).clone()), kernel)))])
}

fn r12_bwd(env: &Env, e: &DExpr) -> Out {
    let bundles = bundle_names(env)?;
    for (q, t) in env.oim_views(e, None) {
        for (x, k, _) in super::engine::tensor_views(&t) {
            for (p, n) in env.opb_views(&x, None) {
                let mut out = Vec::new();
                for b in &bundles {
                    let Some((pt, pd, kernel)) = fourier_data(env, b) else { continue };
                    if env.nm(&pt).as_ref() == Some(&p) && env.nm(&pd).as_ref() == Some(&q) && env.ctx.nf_eq(&k, &kernel)
                    {
                        out.push(Rw::new(DExpr::fourier(b, n.clone())));
                    }
                }
                if !out.is_empty() {
                    return Ok(out);
                }
            }
        }
    }
    Ok(vec![])
}

fn r13_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Fourier(b2, inner) = e else { return Ok(vec![]) };
    let DExpr::Fourier(b, n) = &**inner else { return Ok(vec![]) };
    if dual(env, b).as_deref() != Some(b2.as_str()) {
        return Ok(vec![]);
    }
    let neg = env.ctx.negation_of(b).ok_or_else(|| env.side(format!("no negation declared on {b}")))?;
    Ok(vec![Rw::new(DExpr::opb(Morphism::atom(neg), (**n).clone()))])
}

fn r13_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(m, n) = e else { return Ok(vec![]) };
    let Some(nm) = env.nm(m) else { return Ok(vec![]) };
    let Some(a) = single_atom(&nm) else { return Ok(vec![]) };
    let Some(b) = env.ctx.morphism(a).and_then(|d| {
        d.kinds.iter().find_map(|k| match k {
            MorphismKind::Negation(b) => Some(b.clone()),
            _ => None,
        })
    }) else {
        return Ok(vec![]);
    };
    let d = dual(env, &b).ok_or_else(|| env.side(format!("bundle {b} has no dual")))?;
    Ok(vec![Rw::new(DExpr::fourier(&d, DExpr::fourier(&b, (**n).clone())))])
}

fn transpose(env: &Env, m: &NormMorph) -> Option<NormMorph> {
    env.nm(&Morphism::transpose(m.to_morphism()))
}

fn is_bundle(env: &Env, v: &str) -> bool {
    env.ctx.bundle(v).is_some_and(|b| b.dual.is_some())
}

fn r14_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Fourier(w, x) = e else { return Ok(vec![]) };
    for (f, n) in env.oim_views(x, None) {
        if f.target != *w || !is_bundle(env, &f.source) {
            continue;
        }
        let Some(tf) = transpose(env, &f) else { continue };
        return Ok(vec![Rw::new(DExpr::opb(tf.to_morphism(), DExpr::fourier(&f.source, n)))]);
    }
    Ok(vec![])
}

fn r14_bwd(env: &Env, e: &DExpr) -> Out {
    let bound = env.morph("g")?;
    for (m, y) in env.opb_views(e, None) {
        let DExpr::Fourier(v, n) = &y else { continue };
        let f = match &bound {
            Some(g) => {
                if transpose(env, g).as_ref() != Some(&m) {
                    continue;
                }
                g.clone()
            }
            None => match transpose(env, &m) {
                Some(f) => f,
                None => continue,
            },
        };
        if f.source != *v || !is_bundle(env, &f.target) {
            continue;
        }
        return Ok(vec![Rw::new(DExpr::fourier(&f.target, DExpr::oim(f.to_morphism(), (**n).clone())))]);
    }
    Ok(vec![])
}

fn r15_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Fourier(v, x) = e else { return Ok(vec![]) };
    for (f, p) in env.opb_views(x, None) {
        if f.source != *v || !is_bundle(env, &f.target) {
            continue;
        }
        let Some(tf) = transpose(env, &f) else { continue };
        return Ok(vec![Rw::new(DExpr::oim(tf.to_morphism(), DExpr::fourier(&f.target, p)))]);
    }
    Ok(vec![])
}

fn r15_bwd(env: &Env, e: &DExpr) -> Out {
    for (m, y) in env.oim_views(e, None) {
        let DExpr::Fourier(w, p) = &y else { continue };
        let Some(f) = transpose(env, &m) else { continue };
        if f.target != *w || !is_bundle(env, &f.source) {
            continue;
        }
        return Ok(vec![Rw::new(DExpr::fourier(&f.source, DExpr::opb(f.to_morphism(), (**p).clone())))]);
    }
    Ok(vec![])
}

/// Bundles `v` whose dual's zero section is the atom.
fn bundles_with_dual_zero(env: &Env, atom: &str) -> Result<Vec<String>, RuleError> {
    Ok(bundle_names(env)?
        .into_iter()
        .filter(|v| dual(env, v).is_some_and(|d| env.ctx.zero_of(&d) == Some(atom)))
        .collect())
}

fn r16_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Oim(z, m) = e else { return Ok(vec![]) };
    let Some(nz) = env.nm(z) else { return Ok(vec![]) };
    let Some(a) = single_atom(&nz) else { return Ok(vec![]) };
    let mut out = Vec::new();
    for v in bundles_with_dual_zero(env, a)? {
        let Some(p) = env.ctx.projection_of(&v) else { continue };
        out.push(Rw::new(DExpr::fourier(&v, DExpr::opb(Morphism::atom(p), (**m).clone()))));
    }
    Ok(out)
}

fn r16_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Fourier(v, x) = e else { return Ok(vec![]) };
    let Some(p) = env.ctx.projection_of(v).and_then(|p| env.nm(&Morphism::atom(p))) else { return Ok(vec![]) };
    let Some(z) = dual(env, v).and_then(|d| env.ctx.zero_of(&d).map(str::to_string)) else { return Ok(vec![]) };
    let Some((_, m)) = env.opb_views(x, Some(&p)).into_iter().next() else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::oim(Morphism::Atom(z), m))])
}

fn r17_fwd(env: &Env, e: &DExpr) -> Out {
    for (z, q) in env.opb_views(e, None) {
        let Some(a) = single_atom(&z) else { continue };
        let mut out = Vec::new();
        for v in bundles_with_dual_zero(env, a)? {
            let (Some(p), Some(d)) = (env.ctx.projection_of(&v), dual(env, &v)) else { continue };
            out.push(Rw::new(DExpr::oim(Morphism::atom(p), DExpr::fourier(&d, q.clone()))));
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Ok(vec![])
}

fn r17_bwd(env: &Env, e: &DExpr) -> Out {
    for (p, y) in env.oim_views(e, None) {
        let DExpr::Fourier(b2, q) = &y else { continue };
        let Some(a) = single_atom(&p) else { continue };
        for v in bundle_names(env)? {
            if env.ctx.projection_of(&v) != Some(a) || dual(env, &v).as_deref() != Some(b2.as_str()) {
                continue;
            }
            let Some(z) = env.ctx.zero_of(b2) else { continue };
            return Ok(vec![Rw::new(DExpr::opb(Morphism::atom(z), (**q).clone()))]);
        }
    }
    Ok(vec![])
}

fn factor_atom(env: &Env, product: &str, index: u8) -> Option<String> {
    env.ctx
        .morphism_names()
        .find(|m| env.ctx.factor(m) == Some((product, index)))
        .map(str::to_string)
}

fn ext_proj_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(p, m) = e else { return Ok(vec![]) };
    let Some(np) = env.nm(p) else { return Ok(vec![]) };
    let Some(a) = single_atom(&np) else { return Ok(vec![]) };
    let Some((product, idx)) = env.ctx.factor(a) else { return Ok(vec![]) };
    let Some((l, r)) = env.ctx.variety(product).and_then(|v| v.factors.clone()) else { return Ok(vec![]) };
    let m = (**m).clone();
    Ok(vec![Rw::new(if idx == 2 { DExpr::etensor(DExpr::Struct(l), m) } else { DExpr::etensor(m, DExpr::Struct(r)) })])
}

fn ext_proj_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::ETensor(a, b) = e else { return Ok(vec![]) };
    if let DExpr::Struct(l) = &**a {
        if let Some(p) = env.var_of(b).and_then(|vb| env.ctx.product_of(l, &vb)).and_then(|p| factor_atom(env, &p, 2)) {
            return Ok(vec![Rw::new(DExpr::opb(Morphism::Atom(p), (**b).clone()))]);
        }
    }
    if let DExpr::Struct(r) = &**b {
        if let Some(p) = env.var_of(a).and_then(|va| env.ctx.product_of(&va, r)).and_then(|p| factor_atom(env, &p, 1)) {
            return Ok(vec![Rw::new(DExpr::opb(Morphism::Atom(p), (**a).clone()))]);
        }
    }
    Ok(vec![])
}

fn product_map_of(env: &Env, m: &Morphism) -> Option<(String, Morphism, Morphism)> {
    let n = env.nm(m)?;
    let a = single_atom(&n)?;
    let (g, f) = env.ctx.product_map(a)?;
    Some((a.to_string(), g.clone(), f.clone()))
}

fn wrap(env: &Env, f: &Morphism, x: DExpr, direct: bool) -> DExpr {
    if env.nm(f).is_some_and(|n| n.is_identity()) {
        x
    } else if direct {
        DExpr::oim(f.clone(), x)
    } else {
        DExpr::opb(f.clone(), x)
    }
}

fn unwrap(env: &Env, f: &Morphism, x: &DExpr, direct: bool) -> Option<DExpr> {
    let nf = env.nm(f)?;
    if nf.is_identity() {
        return Some(x.clone());
    }
    let views = if direct { env.oim_views(x, Some(&nf)) } else { env.opb_views(x, Some(&nf)) };
    views.into_iter().next().map(|(_, r)| r)
}

fn ext_map_fwd(env: &Env, e: &DExpr, direct: bool) -> Out {
    let (m, x) = match (e, direct) {
        (DExpr::Oim(m, x), true) | (DExpr::Opb(m, x), false) => (m, x),
        _ => return Ok(vec![]),
    };
    let DExpr::ETensor(a, b) = &**x else { return Ok(vec![]) };
    let Some((_, g, f)) = product_map_of(env, m) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::etensor(wrap(env, &g, (**a).clone(), direct), wrap(env, &f, (**b).clone(), direct)))])
}

fn ext_map_bwd(env: &Env, e: &DExpr, direct: bool) -> Out {
    let DExpr::ETensor(x, y) = e else { return Ok(vec![]) };
    let Some(here) = env.var_of(e) else { return Ok(vec![]) };
    let mut out = Vec::new();
    let names: Vec<String> = env.ctx.morphism_names().map(str::to_string).collect();
    for name in names {
        let Some((g, f)) = env.ctx.product_map(&name) else { continue };
        let Some(d) = env.ctx.morphism(&name) else { continue };
        let (from, to) = if direct { (&d.source, &d.target) } else { (&d.target, &d.source) };
        if *to != here {
            continue;
        }
        let (Some(a), Some(b)) = (unwrap(env, g, x, direct), unwrap(env, f, y, direct)) else { continue };
        let (Some(va), Some(vb)) = (env.var_of(&a), env.var_of(&b)) else { continue };
        if env.ctx.product_of(&va, &vb).as_deref() != Some(from.as_str()) {
            continue;
        }
        let m = Morphism::Atom(name.clone());
        let inner = DExpr::etensor(a, b);
        out.push(Rw::new(if direct { DExpr::oim(m, inner) } else { DExpr::opb(m, inner) }));
    }
    Ok(out)
}

fn ext_oim_fwd(env: &Env, e: &DExpr) -> Out {
    ext_map_fwd(env, e, true)
}

fn ext_oim_bwd(env: &Env, e: &DExpr) -> Out {
    ext_map_bwd(env, e, true)
}

fn ext_opb_fwd(env: &Env, e: &DExpr) -> Out {
    ext_map_fwd(env, e, false)
}

fn ext_opb_bwd(env: &Env, e: &DExpr) -> Out {
    ext_map_bwd(env, e, false)
}

fn is_diagonal(env: &Env, m: &Morphism) -> bool {
    env.nm(m).is_some_and(|n| {
        single_atom(&n).is_some_and(|a| env.ctx.has_kind(a, |k| matches!(k, MorphismKind::Diagonal)))
    })
}

fn ext_diag_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(d, x) = e else { return Ok(vec![]) };
    let DExpr::ETensor(a, b) = &**x else { return Ok(vec![]) };
    if !is_diagonal(env, d) {
        return Ok(vec![]);
    }
    Ok(vec![Rw::new(DExpr::tensor((**a).clone(), (**b).clone()))])
}

fn ext_diag_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Tensor(a, b) = e else { return Ok(vec![]) };
    let Some(x) = env.var_of(e) else { return Ok(vec![]) };
    let diag = env.ctx.morphism_names().find(|m| {
        env.ctx.has_kind(m, |k| matches!(k, MorphismKind::Diagonal))
            && env.ctx.morphism(m).is_some_and(|d| d.source == x)
    });
    let Some(d) = diag else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::opb(Morphism::atom(d), DExpr::etensor((**a).clone(), (**b).clone())))])
}

macro_rules! rule {
    ($id:expr, $name:expr, $stratum:expr, $lhs:expr, $rhs:expr, $fwd:ident, $bwd:ident) => {
        RuleDef { id: $id, name: $name, stratum: $stratum, lhs: $lhs, rhs: $rhs, floats: true, fwd: $fwd, bwd: $bwd }
    };
}

pub(super) fn table() -> Vec<RuleDef> {
    vec![
        rule!(
            "R12",
            "fourier-unfold",
            0,
            "Fourier[V](N)",
            "Oim[p2](Tensor(Opb[p1](N), Opb[gamma](Exp[A1](t))))",
            r12_fwd,
            r12_bwd
        ),
        rule!("R13", "fourier-involutive", 0, "Fourier[dual V](Fourier[V](N))", "Opb[neg](N)", r13_fwd, r13_bwd),
        rule!("R14", "fourier-oim", 1, "Fourier[W](Oim[f](N))", "Opb[tr(f)](Fourier[V](N))", r14_fwd, r14_bwd),
        rule!("R15", "fourier-opb", 1, "Fourier[V](Opb[f](P))", "Oim[tr(f)](Fourier[W](P))", r15_fwd, r15_bwd),
        rule!("R16", "fourier-zero-section", 0, "Oim[zero](M)", "Fourier[V](Opb[proj](M))", r16_fwd, r16_bwd),
        rule!("R17", "fourier-projection", 0, "Opb[zero](Q)", "Oim[proj](Fourier[dual V](Q))", r17_fwd, r17_bwd),
        rule!("R20.ext_proj", "exterior-projection", 0, "Opb[p2](M)", "ETensor(O_A, M)", ext_proj_fwd, ext_proj_bwd),
        rule!("R20.ext_oim", "exterior-oim", 0, "Oim[g x f](ETensor(A, M))", "ETensor(Oim[g](A), Oim[f](M))", ext_oim_fwd, ext_oim_bwd),
        rule!("R20.ext_opb", "exterior-opb", 0, "Opb[g x f](ETensor(A, M))", "ETensor(Opb[g](A), Opb[f](M))", ext_opb_fwd, ext_opb_bwd),
        rule!("R20.ext_diag", "exterior-diagonal", 0, "Opb[delta](ETensor(M, N))", "Tensor(M, N)", ext_diag_fwd, ext_diag_bwd),
    ]
}
