//! Composition, tensor, base change, local cohomology and unit rules.

use crate::expr::{DExpr, Function, MorphismKind, Morphism, NormMorph, Subvariety};

use super::engine::{tensor_views, Binding, Env, Mode, RuleDef, RuleError, Rw};

type Out = Result<Vec<Rw>, RuleError>;

fn mb(n: &NormMorph) -> Binding {
    Binding::Morphism(n.to_morphism())
}

/// Splits `h = outer ∘ inner` using the bindings `f` (inner) and `g` (outer).
fn split2(env: &Env, h: &NormMorph) -> Result<(NormMorph, NormMorph), RuleError> {
    let inner = env.morph("f")?;
    let outer = env.morph("g")?;
    let mismatch = || env.side("bound f and g do not compose to the matched morphism");
    match (inner, outer) {
        (Some(f), Some(g)) => {
            let comp = env.nm(&Morphism::compose(g.to_morphism(), f.to_morphism())).ok_or_else(mismatch)?;
            if comp != *h {
                return Err(mismatch());
            }
            Ok((f, g))
        }
        (Some(f), None) => {
            if !h.atoms.starts_with(&f.atoms) || f.source != h.source {
                return Err(mismatch());
            }
            let g = env.from_atoms(&h.atoms[f.atoms.len()..], &f.target).ok_or_else(mismatch)?;
            Ok((f, g))
        }
        (None, Some(g)) => {
            if !h.atoms.ends_with(&g.atoms) || g.target != h.target {
                return Err(mismatch());
            }
            let f = env.from_atoms(&h.atoms[..h.atoms.len() - g.atoms.len()], &h.source).ok_or_else(mismatch)?;
            Ok((f, g))
        }
        (None, None) if h.atoms.len() == 2 => {
            let f = env.from_atoms(&h.atoms[..1], &h.source).ok_or_else(mismatch)?;
            let g = env.from_atoms(&h.atoms[1..], &f.target).ok_or_else(mismatch)?;
            Ok((f, g))
        }
        (None, None) => Err(env.needs("f, g")),
    }
}

fn r1_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(f, inner) = e else { return Ok(vec![]) };
    let DExpr::Opb(g, n) = &**inner else { return Ok(vec![]) };
    let (Some(nf), Some(ng)) = (env.nm(f), env.nm(g)) else { return Ok(vec![]) };
    let Some(comp) = env.nm(&Morphism::compose(g.clone(), f.clone())) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::opb(comp.to_morphism(), (**n).clone())).with("f", mb(&nf)).with("g", mb(&ng))])
}

fn r1_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(h, n) = e else { return Ok(vec![]) };
    let Some(nh) = env.nm(h) else { return Ok(vec![]) };
    let (f, g) = split2(env, &nh)?;
    Ok(vec![Rw::new(DExpr::opb(f.to_morphism(), DExpr::opb(g.to_morphism(), (**n).clone())))])
}

fn r2_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Oim(g, inner) = e else { return Ok(vec![]) };
    let DExpr::Oim(f, m) = &**inner else { return Ok(vec![]) };
    let (Some(nf), Some(ng)) = (env.nm(f), env.nm(g)) else { return Ok(vec![]) };
    let Some(comp) = env.nm(&Morphism::compose(g.clone(), f.clone())) else { return Ok(vec![]) };
    let out = if comp.is_identity() { (**m).clone() } else { DExpr::oim(comp.to_morphism(), (**m).clone()) };
    Ok(vec![Rw::new(out).with("f", mb(&nf)).with("g", mb(&ng))])
}

fn r2_bwd(env: &Env, e: &DExpr) -> Out {
    if let (Some(f), Some(g)) = (env.morph("f")?, env.morph("g")?) {
        let comp = env.nm(&Morphism::compose(g.to_morphism(), f.to_morphism()));
        let direct = matches!(e, DExpr::Oim(h, _) if env.nm(h) == comp);
        if !direct && comp.as_ref().is_some_and(|c| c.is_identity()) {
            if env.var_of(e).as_deref() != Some(f.source.as_str()) {
                return Err(env.side("f does not start at the variety of the object"));
            }
            return Ok(vec![Rw::new(DExpr::oim(g.to_morphism(), DExpr::oim(f.to_morphism(), e.clone())))]);
        }
    }
    let DExpr::Oim(h, m) = e else { return Ok(vec![]) };
    let Some(nh) = env.nm(h) else { return Ok(vec![]) };
    let (f, g) = split2(env, &nh)?;
    Ok(vec![Rw::new(DExpr::oim(g.to_morphism(), DExpr::oim(f.to_morphism(), (**m).clone())))])
}

fn r3_fwd(_env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(f, t) = e else { return Ok(vec![]) };
    let DExpr::Tensor(a, b) = &**t else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::tensor(DExpr::opb(f.clone(), (**a).clone()), DExpr::opb(f.clone(), (**b).clone())))])
}

fn r3_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Tensor(a, b) = e else { return Ok(vec![]) };
    for (f, n) in env.opb_views(a, None) {
        if let Some((_, n2)) = env.opb_views(b, Some(&f)).into_iter().next() {
            return Ok(vec![Rw::new(DExpr::opb(f.to_morphism(), DExpr::tensor(n, n2)))]);
        }
    }
    for (f, n2) in env.opb_views(b, None) {
        if let Some((_, n)) = env.opb_views(a, Some(&f)).into_iter().next() {
            return Ok(vec![Rw::new(DExpr::opb(f.to_morphism(), DExpr::tensor(n, n2)))]);
        }
    }
    Ok(vec![])
}

fn r4_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Oim(f, t) = e else { return Ok(vec![]) };
    let Some(nf) = env.nm(f) else { return Ok(vec![]) };
    // An explicit inverse image is preferred over reading a structure sheaf
    // as one.
    let views = tensor_views(t);
    let explicit = views.iter().filter(|(_, x, _)| !matches!(x, DExpr::Struct(_)));
    let implicit = views.iter().filter(|(_, x, _)| matches!(x, DExpr::Struct(_)));
    for (m, x, _) in explicit.chain(implicit) {
        if let Some((_, n)) = env.opb_views(x, Some(&nf)).into_iter().next() {
            return Ok(vec![Rw::new(DExpr::tensor(DExpr::oim(f.clone(), m.clone()), n))]);
        }
    }
    Ok(vec![])
}

fn r4_bwd(env: &Env, e: &DExpr) -> Out {
    for (a, n, _) in tensor_views(e) {
        let DExpr::Oim(f, m) = &a else { continue };
        let Some(nf) = env.nm(f) else { continue };
        if env.var_of(&n).as_deref() != Some(nf.target.as_str()) {
            continue;
        }
        return Ok(vec![Rw::new(DExpr::oim(f.clone(), DExpr::tensor((**m).clone(), DExpr::opb(f.clone(), n))))]);
    }
    Ok(vec![])
}

struct Square {
    name: String,
    f: NormMorph,
    h: NormMorph,
    fp: NormMorph,
    hp: NormMorph,
}

fn squares(env: &Env) -> Result<Vec<Square>, RuleError> {
    let only = env.name("square")?;
    Ok(env
        .ctx
        .squares()
        .iter()
        .filter(|s| only.as_ref().is_none_or(|n| *n == s.name))
        .filter_map(|s| {
            Some(Square {
                name: s.name.clone(),
                f: env.nm(&s.f)?,
                h: env.nm(&s.h)?,
                fp: env.nm(&s.f_prime)?,
                hp: env.nm(&s.h_prime)?,
            })
        })
        .collect())
}

/// Shift of `∫f' h'† ≅ h† ∫f` for the square, and its side conditions.
fn square_check(env: &Env, sq: &Square, closed: bool) -> Result<i64, RuleError> {
    let dim = |v: &str| env.ctx.variety(v).map(|d| d.dim as i64).unwrap_or(0);
    if closed && !(sq.h.atoms.len() == 1 && env.ctx.is_closed_embedding(&sq.h.atoms[0])) {
        return Err(env.side(format!("h in square {} is not a closed embedding", sq.name)));
    }
    if env.mode == Mode::Strict {
        for v in [&sq.f.source, &sq.f.target, &sq.h.source, &sq.fp.source] {
            if !env.ctx.is_smooth(v) {
                return Err(env.side(format!("variety {v} in square {} is not smooth (strict mode)", sq.name)));
            }
        }
    }
    Ok((dim(&sq.h.source) - dim(&sq.f.target)) - (dim(&sq.fp.source) - dim(&sq.f.source)))
}

fn base_change_fwd(env: &Env, e: &DExpr, closed: bool) -> Out {
    let DExpr::Oim(fp, x) = e else { return Ok(vec![]) };
    let Some(nfp) = env.nm(fp) else { return Ok(vec![]) };
    let sqs = squares(env)?;
    let mut side = None;
    for (hp, m) in env.opb_views(x, None) {
        let mut out = Vec::new();
        for sq in sqs.iter().filter(|s| s.fp == nfp && s.hp == hp) {
            match square_check(env, sq, closed) {
                Ok(d) => out.push(
                    Rw::shifted(DExpr::opb(sq.h.to_morphism(), DExpr::oim(sq.f.to_morphism(), m.clone())), d)
                        .with("square", Binding::Name(sq.name.clone())),
                ),
                Err(er) => side = Some(er),
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    side.map_or(Ok(vec![]), Err)
}

fn base_change_bwd(env: &Env, e: &DExpr, closed: bool) -> Out {
    let sqs = squares(env)?;
    let mut side = None;
    for (h, y) in env.opb_views(e, None) {
        for (f, m) in env.oim_views(&y, None) {
            let mut out = Vec::new();
            for sq in sqs.iter().filter(|s| s.h == h && s.f == f) {
                match square_check(env, sq, closed) {
                    Ok(d) => out.push(
                        Rw::shifted(DExpr::oim(sq.fp.to_morphism(), DExpr::opb(sq.hp.to_morphism(), m.clone())), -d)
                            .with("square", Binding::Name(sq.name.clone())),
                    ),
                    Err(er) => side = Some(er),
                }
            }
            if !out.is_empty() {
                return Ok(out);
            }
        }
    }
    side.map_or(Ok(vec![]), Err)
}

fn r5_fwd(env: &Env, e: &DExpr) -> Out {
    base_change_fwd(env, e, false)
}

fn r5_bwd(env: &Env, e: &DExpr) -> Out {
    base_change_bwd(env, e, false)
}

fn r5c_fwd(env: &Env, e: &DExpr) -> Out {
    base_change_fwd(env, e, true)
}

fn r5c_bwd(env: &Env, e: &DExpr) -> Out {
    base_change_bwd(env, e, true)
}

fn r6_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(s, m) = e else { return Ok(vec![]) };
    let Some(x) = env.var_of(m) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::tensor((**m).clone(), DExpr::rgamma(s.clone(), DExpr::Struct(x))))])
}

fn r6_bwd(_env: &Env, e: &DExpr) -> Out {
    for (m, y, _) in tensor_views(e) {
        if let DExpr::RGamma(s, inner) = &y {
            if matches!(&**inner, DExpr::Struct(_)) {
                return Ok(vec![Rw::new(DExpr::rgamma(s.clone(), m))]);
            }
        }
    }
    Ok(vec![])
}

fn r7_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(s, inner) = e else { return Ok(vec![]) };
    let DExpr::RGamma(s2, m) = &**inner else { return Ok(vec![]) };
    let meet = env.sub_nf(&Subvariety::intersection(s.clone(), s2.clone()));
    Ok(vec![Rw::new(DExpr::rgamma(meet, (**m).clone()))
        .with("outer", Binding::Subvariety(s.clone()))
        .with("inner", Binding::Subvariety(s2.clone()))])
}

fn r7_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(t, m) = e else { return Ok(vec![]) };
    let (outer, inner) = match (env.sub("outer")?, env.sub("inner")?) {
        (Some(o), Some(i)) => {
            if !env.sub_eq(&Subvariety::intersection(o.clone(), i.clone()), t) {
                return Err(env.side("outer & inner is not the matched subvariety"));
            }
            (o, i)
        }
        (None, None) => match env.sub_nf(t) {
            Subvariety::Intersection(a, b) if !matches!(*a, Subvariety::Intersection(..)) => (*a, *b),
            _ => return Err(env.needs("outer, inner")),
        },
        _ => return Err(env.needs("outer, inner")),
    };
    Ok(vec![Rw::new(DExpr::rgamma(outer, DExpr::rgamma(inner, (**m).clone())))])
}

fn r8_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Oim(f, x) = e else { return Ok(vec![]) };
    let DExpr::RGamma(t, m) = &**x else { return Ok(vec![]) };
    let Some(nf) = env.nm(f) else { return Ok(vec![]) };
    let pre = |z: &Subvariety| env.sub_eq(&Subvariety::preimage(f.clone(), z.clone()), t);
    let zs: Vec<Subvariety> = if let Some(z) = env.sub("z")? {
        if !pre(&z) {
            return Err(env.side("the matched subvariety is not the preimage of z"));
        }
        vec![z]
    } else if let Subvariety::Preimage(g, z) = t {
        if env.nm(g).as_ref() != Some(&nf) {
            return Ok(vec![]);
        }
        vec![(**z).clone()]
    } else {
        env.ctx
            .subvariety_names()
            .map(Subvariety::atom)
            .filter(|z| env.ctx.subvariety_ambient(z).ok().as_deref() == Some(nf.target.as_str()) && pre(z))
            .collect()
    };
    Ok(zs
        .into_iter()
        .map(|z| Rw::new(DExpr::rgamma(z.clone(), DExpr::oim(f.clone(), (**m).clone()))).with("z", Binding::Subvariety(z)))
        .collect())
}

fn r8_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(z, y) = e else { return Ok(vec![]) };
    let Some((f, m)) = env.oim_views(y, None).into_iter().next() else { return Ok(vec![]) };
    let pre = env.sub_nf(&Subvariety::preimage(f.to_morphism(), z.clone()));
    Ok(vec![Rw::new(DExpr::oim(f.to_morphism(), DExpr::rgamma(pre, m)))])
}

fn embedding_checks(env: &Env, j: &str) -> Result<(String, u32), RuleError> {
    let d = env.ctx.morphism(j).ok_or_else(|| env.side(format!("unknown embedding {j}")))?;
    let found = d.kinds.iter().find_map(|k| match k {
        MorphismKind::ClosedEmbedding { codim, image: Some(img) } => Some((img.clone(), *codim)),
        _ => None,
    });
    let (img, codim) = found.ok_or_else(|| env.side(format!("{j} is not a closed embedding with a declared image")))?;
    if env.mode == Mode::Strict && !env.ctx.is_smooth(&d.source) {
        return Err(env.side(format!("{} is not smooth (strict mode)", d.source)));
    }
    Ok((img, codim))
}

fn r10_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(y, m) = e else { return Ok(vec![]) };
    let mut side = None;
    let cands: Vec<String> = env
        .ctx
        .morphism_names()
        .filter(|j| {
            env.ctx.has_kind(j, |k| {
                matches!(k, MorphismKind::ClosedEmbedding { image: Some(img), .. } if env.sub_eq(&Subvariety::atom(img), y))
            })
        })
        .map(str::to_string)
        .collect();
    let mut out = Vec::new();
    for j in cands {
        match embedding_checks(env, &j) {
            Ok((_, codim)) => {
                let jm = Morphism::Atom(j.clone());
                out.push(Rw::shifted(DExpr::oim(jm.clone(), DExpr::opb(jm, (**m).clone())), -(codim as i64)));
            }
            Err(er) => side = Some(er),
        }
    }
    if out.is_empty() {
        return side.map_or(Ok(vec![]), Err);
    }
    Ok(out)
}

fn r10_bwd(env: &Env, e: &DExpr) -> Out {
    let mut side = None;
    for (j, rest) in env.oim_views(e, None) {
        if j.atoms.len() != 1 {
            continue;
        }
        let Some((_, m)) = env.opb_views(&rest, Some(&j)).into_iter().next() else { continue };
        match embedding_checks(env, &j.atoms[0]) {
            Ok((img, codim)) => {
                return Ok(vec![Rw::shifted(DExpr::rgamma(Subvariety::Atom(img), m), codim as i64)]);
            }
            Err(er) => side = Some(er),
        }
    }
    side.map_or(Ok(vec![]), Err)
}

fn r11_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(f, x) = e else { return Ok(vec![]) };
    let DExpr::Exp(_, psi) = &**x else { return Ok(vec![]) };
    let Some(nf) = env.nm(f) else { return Ok(vec![]) };
    let phi = Function::pullback(psi.clone(), f.clone());
    Ok(vec![Rw::new(DExpr::Exp(nf.source.clone(), phi))
        .with("f", mb(&nf))
        .with("psi", Binding::Function(psi.clone()))])
}

fn r11_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Exp(x, phi) = e else { return Ok(vec![]) };
    let (f, psi) = match (env.morph("f")?, env.func("psi")?) {
        (Some(f), Some(psi)) => {
            let lhs = env.ctx.normalize_function(&Function::pullback(psi.clone(), f.to_morphism()));
            let rhs = env.ctx.normalize_function(phi);
            if lhs.is_err() || lhs != rhs {
                return Err(env.side("psi pulled back along f is not the exponent"));
            }
            (f.to_morphism(), psi)
        }
        (None, None) => match phi {
            Function::Pullback(psi, f) => (f.clone(), (**psi).clone()),
            Function::Atom(_) => return Err(env.needs("f, psi")),
        },
        _ => return Err(env.needs("f, psi")),
    };
    let Ok(y) = env.ctx.function_variety(&psi) else { return Ok(vec![]) };
    if env.ctx.morphism_signature(&f).ok().map(|s| s.0).as_deref() != Some(x.as_str()) {
        return Err(env.side("f does not start at the variety of the exponential"));
    }
    Ok(vec![Rw::new(DExpr::opb(f, DExpr::Exp(y, psi)))])
}

fn r18_fwd(_env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(s, m) = e else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::rgamma(Subvariety::reduction(s.clone()), (**m).clone()))])
}

fn r18_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::RGamma(t, m) = e else { return Ok(vec![]) };
    if let Some(s) = env.sub("sub")? {
        if !env.sub_eq(&Subvariety::reduction(s.clone()), t) {
            return Err(env.side("red(sub) is not the matched subvariety"));
        }
        return Ok(vec![Rw::new(DExpr::rgamma(s, (**m).clone()))]);
    }
    match t {
        Subvariety::Reduction(s) => Ok(vec![Rw::new(DExpr::rgamma((**s).clone(), (**m).clone()))]),
        _ => Err(env.needs("sub")),
    }
}

fn opb_id_fwd(env: &Env, e: &DExpr) -> Out {
    match e {
        DExpr::Opb(f, m) if env.nm(f).is_some_and(|n| n.is_identity()) => Ok(vec![Rw::new((**m).clone())]),
        _ => Ok(vec![]),
    }
}

fn opb_id_bwd(env: &Env, e: &DExpr) -> Out {
    let Some(x) = env.var_of(e) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::opb(Morphism::Id(x), e.clone()))])
}

fn oim_id_fwd(env: &Env, e: &DExpr) -> Out {
    match e {
        DExpr::Oim(f, m) if env.nm(f).is_some_and(|n| n.is_identity()) => Ok(vec![Rw::new((**m).clone())]),
        _ => Ok(vec![]),
    }
}

fn oim_id_bwd(env: &Env, e: &DExpr) -> Out {
    let Some(x) = env.var_of(e) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::oim(Morphism::Id(x), e.clone()))])
}

fn tensor_unit_fwd(_env: &Env, e: &DExpr) -> Out {
    for (m, u, _) in tensor_views(e) {
        if matches!(u, DExpr::Struct(_)) {
            return Ok(vec![Rw::new(m)]);
        }
    }
    Ok(vec![])
}

fn tensor_unit_bwd(env: &Env, e: &DExpr) -> Out {
    let Some(x) = env.var_of(e) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::tensor(e.clone(), DExpr::Struct(x)))])
}

fn opb_struct_fwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Opb(f, x) = e else { return Ok(vec![]) };
    if !matches!(&**x, DExpr::Struct(_)) {
        return Ok(vec![]);
    }
    let Some(nf) = env.nm(f) else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::Struct(nf.source.clone())).with("f", Binding::Morphism(f.clone()))])
}

fn opb_struct_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Struct(x) = e else { return Ok(vec![]) };
    let Some(f) = env.bindings.get("f").cloned() else { return Err(env.needs("f")) };
    let Binding::Morphism(fm) = f else { return Err(env.needs("f")) };
    let nf = env.morph("f")?.expect("bound");
    if nf.source != *x {
        return Err(env.side(format!("f starts at {}, not {x}", nf.source)));
    }
    Ok(vec![Rw::new(DExpr::opb(fm, DExpr::Struct(nf.target)))])
}

fn shift_merge_fwd(_env: &Env, e: &DExpr) -> Out {
    let DExpr::Shift(inner, b) = e else { return Ok(vec![]) };
    let DExpr::Shift(m, a) = &**inner else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::shift((**m).clone(), a + b)).with("a", Binding::Int(*a))])
}

fn shift_merge_bwd(env: &Env, e: &DExpr) -> Out {
    let DExpr::Shift(m, c) = e else { return Ok(vec![]) };
    let a = env.int("a")?.ok_or_else(|| env.needs("a"))?;
    Ok(vec![Rw::new(DExpr::shift(DExpr::shift((**m).clone(), a), c - a))])
}

fn shift_zero_fwd(_env: &Env, e: &DExpr) -> Out {
    match e {
        DExpr::Shift(m, 0) => Ok(vec![Rw::new((**m).clone())]),
        _ => Ok(vec![]),
    }
}

fn shift_zero_bwd(_env: &Env, e: &DExpr) -> Out {
    Ok(vec![Rw::new(DExpr::shift(e.clone(), 0))])
}

fn shift_tensor_fwd(_env: &Env, e: &DExpr) -> Out {
    let DExpr::Tensor(a, b) = e else { return Ok(vec![]) };
    if let DExpr::Shift(m, k) = &**a {
        return Ok(vec![Rw::new(DExpr::shift(DExpr::tensor((**m).clone(), (**b).clone()), *k))]);
    }
    if let DExpr::Shift(m, k) = &**b {
        return Ok(vec![Rw::new(DExpr::shift(DExpr::tensor((**a).clone(), (**m).clone()), *k))]);
    }
    Ok(vec![])
}

fn shift_tensor_bwd(_env: &Env, e: &DExpr) -> Out {
    let DExpr::Shift(t, k) = e else { return Ok(vec![]) };
    let DExpr::Tensor(a, b) = &**t else { return Ok(vec![]) };
    Ok(vec![Rw::new(DExpr::tensor((**a).clone(), DExpr::shift((**b).clone(), *k)))])
}

fn is_negation(env: &Env, f: &Morphism) -> bool {
    env.nm(f).is_some_and(|n| {
        n.atoms.len() == 1 && env.ctx.has_kind(&n.atoms[0], |k| matches!(k, MorphismKind::Negation(_)))
    })
}

fn neg_iso_fwd(env: &Env, e: &DExpr) -> Out {
    match e {
        DExpr::Opb(f, m) if is_negation(env, f) => Ok(vec![Rw::new(DExpr::oim(f.clone(), (**m).clone()))]),
        _ => Ok(vec![]),
    }
}

fn neg_iso_bwd(env: &Env, e: &DExpr) -> Out {
    match e {
        DExpr::Oim(f, m) if is_negation(env, f) => Ok(vec![Rw::new(DExpr::opb(f.clone(), (**m).clone()))]),
        _ => Ok(vec![]),
    }
}

macro_rules! rule {
    ($id:expr, $name:expr, $stratum:expr, $floats:expr, $lhs:expr, $rhs:expr, $fwd:ident, $bwd:ident) => {
        RuleDef { id: $id, name: $name, stratum: $stratum, lhs: $lhs, rhs: $rhs, floats: $floats, fwd: $fwd, bwd: $bwd }
    };
}

pub(super) fn table() -> Vec<RuleDef> {
    vec![
        rule!("R1", "opb-compose", 0, true, "Opb[f](Opb[g](N))", "Opb[g.f](N)", r1_fwd, r1_bwd),
        rule!("R2", "oim-compose", 0, true, "Oim[g](Oim[f](M))", "Oim[g.f](M)", r2_fwd, r2_bwd),
        rule!("R3", "opb-tensor", 0, true, "Opb[f](Tensor(N, N'))", "Tensor(Opb[f](N), Opb[f](N'))", r3_fwd, r3_bwd),
        rule!("R4", "projection-formula", 1, true, "Oim[f](Tensor(M, Opb[f](N)))", "Tensor(Oim[f](M), N)", r4_fwd, r4_bwd),
        rule!("R5", "base-change", 1, true, "Oim[f'](Opb[h'](M))", "Opb[h](Oim[f](M))[d]", r5_fwd, r5_bwd),
        rule!("R5c", "base-change-closed", 0, true, "Oim[f'](Opb[h'](M))", "Opb[h](Oim[f](M))[d]", r5c_fwd, r5c_bwd),
        rule!("R6", "gamma-tensor", 0, true, "RGamma[S](M)", "Tensor(M, RGamma[S](O_X))", r6_fwd, r6_bwd),
        rule!("R7", "gamma-compose", 0, true, "RGamma[S](RGamma[S'](M))", "RGamma[S & S'](M)", r7_fwd, r7_bwd),
        rule!("R8", "gamma-oim", 0, true, "Oim[f](RGamma[preimage(f, Z)](M))", "RGamma[Z](Oim[f](M))", r8_fwd, r8_bwd),
        rule!("R10", "gamma-smooth", 0, true, "RGamma[Y](M)", "Oim[j](Opb[j](M))[-d]", r10_fwd, r10_bwd),
        rule!("R11", "exp-pullback", 0, true, "Opb[f](Exp[Y](psi))", "Exp[X](pb(psi, f))", r11_fwd, r11_bwd),
        rule!("R18", "gamma-reduced", 0, true, "RGamma[S](M)", "RGamma[red(S)](M)", r18_fwd, r18_bwd),
        rule!("R19.opb_id", "opb-identity", 0, true, "Opb[id(X)](M)", "M", opb_id_fwd, opb_id_bwd),
        rule!("R19.oim_id", "oim-identity", 0, true, "Oim[id(X)](M)", "M", oim_id_fwd, oim_id_bwd),
        rule!("R19.tensor_unit", "tensor-unit", 0, true, "Tensor(M, O_X)", "M", tensor_unit_fwd, tensor_unit_bwd),
        rule!("R19.opb_struct", "opb-structure-sheaf", 0, true, "Opb[f](O_Y)", "O_X", opb_struct_fwd, opb_struct_bwd),
        rule!("R19.shift_merge", "shift-merge", 0, false, "M[a][b]", "M[a+b]", shift_merge_fwd, shift_merge_bwd),
        rule!("R19.shift_zero", "shift-zero", 0, false, "M[0]", "M", shift_zero_fwd, shift_zero_bwd),
        rule!("R19.shift_tensor", "shift-tensor", 0, false, "Tensor(M, N[a])", "Tensor(M, N)[a]", shift_tensor_fwd, shift_tensor_bwd),
        rule!("R19.neg_iso", "negation-iso", 0, true, "Opb[neg](M)", "Oim[neg](M)", neg_iso_fwd, neg_iso_bwd),
    ]
}
