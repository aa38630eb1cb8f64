//! Canonical rendering; parsing the output gives back the same document.

use crate::expr::{DExpr, Declaration, Function, Identity, Morphism, MorphismKind, Subvariety};
use crate::rewrite::{Application, Binding, Mode, ProofStep, StepRule};

use super::document::{Item, Script, ScriptDocument};

pub fn render_morphism(m: &Morphism) -> String {
    match m {
        Morphism::Atom(a) => a.clone(),
        Morphism::Id(x) => format!("id({x})"),
        Morphism::Transpose(i) => format!("tr({})", render_morphism(i)),
        Morphism::Compose(o, i) => {
            let right = match &**i {
                Morphism::Compose(..) => format!("({})", render_morphism(i)),
                other => render_morphism(other),
            };
            format!("{}.{}", render_morphism(o), right)
        }
    }
}

pub fn render_subvariety(s: &Subvariety) -> String {
    match s {
        Subvariety::Atom(a) => a.clone(),
        Subvariety::Reduction(x) => format!("red({})", render_subvariety(x)),
        Subvariety::Preimage(f, z) => format!("preimage({}, {})", render_morphism(f), render_subvariety(z)),
        Subvariety::Intersection(a, b) => {
            let right = match &**b {
                Subvariety::Intersection(..) => format!("({})", render_subvariety(b)),
                other => render_subvariety(other),
            };
            format!("{} & {}", render_subvariety(a), right)
        }
    }
}

pub fn render_function(f: &Function) -> String {
    match f {
        Function::Atom(a) => a.clone(),
        Function::Pullback(phi, m) => format!("pb({}, {})", render_function(phi), render_morphism(m)),
    }
}

pub fn render_expr(e: &DExpr) -> String {
    match e {
        DExpr::Struct(x) => format!("O_{x}"),
        DExpr::Var(n, _) => n.clone(),
        DExpr::Exp(x, f) => format!("Exp[{x}]({})", render_function(f)),
        DExpr::Tensor(a, b) => format!("Tensor({}, {})", render_expr(a), render_expr(b)),
        DExpr::ETensor(a, b) => format!("ETensor({}, {})", render_expr(a), render_expr(b)),
        DExpr::Opb(m, x) => format!("Opb[{}]({})", render_morphism(m), render_expr(x)),
        DExpr::Oim(m, x) => format!("Oim[{}]({})", render_morphism(m), render_expr(x)),
        DExpr::RGamma(s, x) => format!("RGamma[{}]({})", render_subvariety(s), render_expr(x)),
        DExpr::Fourier(b, x) => format!("Fourier[{b}]({})", render_expr(x)),
        DExpr::Shift(x, k) => format!("{}[{k}]", render_expr(x)),
    }
}

fn render_kind(k: &MorphismKind) -> String {
    match k {
        MorphismKind::ClosedEmbedding { codim, image } => match image {
            Some(i) => format!("embedding codim {codim} image {i}"),
            None => format!("embedding codim {codim}"),
        },
        MorphismKind::OpenEmbedding => "open".into(),
        MorphismKind::Projection(b) => format!("projection of {b}"),
        MorphismKind::ZeroSection(b) => format!("zero of {b}"),
        MorphismKind::Section(b) => format!("section of {b}"),
        MorphismKind::Negation(b) => format!("negation of {b}"),
        MorphismKind::Linear { transpose: Some(t) } => format!("linear transpose {t}"),
        MorphismKind::Linear { transpose: None } => "linear".into(),
        MorphismKind::Identity => "identity".into(),
        MorphismKind::Diagonal => "diagonal".into(),
        MorphismKind::Graph(m) => format!("graph of {}", render_morphism(m)),
        MorphismKind::Pairing(b) => format!("pairing of {b}"),
        MorphismKind::FiberProjection(b) => format!("fiberproj of {b}"),
        MorphismKind::Factor { product, index } => format!("factor {index} of {product}"),
        MorphismKind::ProductMap(g, f) => format!("product {}, {}", render_morphism(g), render_morphism(f)),
    }
}

pub fn render_declaration(d: &Declaration) -> String {
    match d {
        Declaration::Variety(v) => format!(
            "variety {} dim {} {} {}",
            v.name,
            v.dim,
            if v.smooth { "smooth" } else { "singular" },
            if v.reduced { "reduced" } else { "nonreduced" }
        ),
        Declaration::Product { name, left, right } => format!("product {name} = {left} x {right}"),
        Declaration::Bundle(b) => format!("bundle {} over {} rank {}", b.total, b.base, b.rank),
        Declaration::Dual { bundle, dual } => format!("dual {bundle} {dual}"),
        Declaration::Morphism(m) => {
            let mut s = format!("morphism {} : {} -> {}", m.name, m.source, m.target);
            for k in &m.kinds {
                s.push(' ');
                s.push_str(&render_kind(k));
            }
            s
        }
        Declaration::Subvariety(v) => {
            let mut s = format!("subvariety {} in {}", v.name, v.ambient);
            if v.closed {
                s.push_str(" closed");
            }
            s.push_str(if v.reduced { " reduced" } else { " nonreduced" });
            s.push_str(if v.smooth { " smooth" } else { " singular" });
            if let Some(c) = v.codim {
                s.push_str(&format!(" codim {c}"));
            }
            s
        }
        Declaration::Function(f) => {
            format!("function {} on {}{}", f.name, f.variety, if f.coordinate { " coordinate" } else { "" })
        }
        Declaration::Object(o) => format!("object {} on {}", o.name, o.variety),
        Declaration::Cartesian(c) => format!(
            "cartesian {} : {}, {}, {}, {}",
            c.name,
            render_morphism(&c.f),
            render_morphism(&c.h),
            render_morphism(&c.f_prime),
            render_morphism(&c.h_prime)
        ),
        Declaration::Identity(Identity::Morphism(l, r)) => {
            format!("identity morphism {} = {}", render_morphism(l), render_morphism(r))
        }
        Declaration::Identity(Identity::Function(l, r)) => {
            format!("identity function {} = {}", render_function(l), render_function(r))
        }
        Declaration::Identity(Identity::Subvariety(l, r)) => {
            format!("identity subvariety {} = {}", render_subvariety(l), render_subvariety(r))
        }
    }
}

fn render_binding(b: &Binding) -> String {
    match b {
        Binding::Morphism(m) => render_morphism(m),
        Binding::Subvariety(s) => render_subvariety(s),
        Binding::Function(f) => render_function(f),
        Binding::Name(n) => n.clone(),
        Binding::Int(k) => k.to_string(),
    }
}

fn render_application(a: &Application) -> String {
    let mut s = format!("{} {}", a.direction, a.path);
    if !a.bindings.is_empty() {
        let bs: Vec<String> = a.bindings.iter().map(|(k, v)| format!("{k} = {}", render_binding(v))).collect();
        s.push_str(" with ");
        s.push_str(&bs.join(", "));
    }
    s
}

pub fn render_step(step: &ProofStep) -> String {
    match &step.rule {
        StepRule::Conv(e) => format!("conv {}", render_expr(e)),
        StepRule::Lemma(n) => {
            let apps: Vec<String> = step.applications.iter().map(render_application).collect();
            format!("lemma {n} {}", apps.join(" and "))
        }
        StepRule::Rule(id) => {
            let apps: Vec<String> = step.applications.iter().map(render_application).collect();
            format!("{id} {}", apps.join(" and "))
        }
    }
}

fn render_script(s: &Script) -> String {
    let mode = match s.mode {
        Mode::Strict => "strict",
        Mode::AllowSingular => "allow_singular",
    };
    let mut out = format!("script {} mode {mode} strata {}", s.goal, s.strata);
    if let Some(d) = &s.derives {
        out.push_str(&format!(" derives {d}"));
    }
    out.push_str(" {\n");
    for st in &s.steps {
        out.push_str(&format!("  {};\n", render_step(st)));
    }
    if let Some(j) = &s.closure {
        out.push_str(&format!("  kashiwara {};\n", render_morphism(j)));
    }
    out.push_str("}\n");
    out
}

pub fn render_document(doc: &ScriptDocument) -> String {
    let mut out = String::new();
    for item in &doc.items {
        match item {
            Item::Decl(d) => {
                out.push_str(&render_declaration(d));
                out.push_str(";\n");
            }
            Item::Goal(g) => {
                out.push_str(&format!("goal {} : {} ~ {};\n", g.name, render_expr(&g.lhs), render_expr(&g.rhs)));
            }
            Item::Script(s) => out.push_str(&render_script(s)),
        }
    }
    out
}
