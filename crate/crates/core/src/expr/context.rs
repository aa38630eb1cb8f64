//! Declared geometry: varieties, bundles, morphisms, subvarieties, functions,
//! Cartesian squares and identities.

use std::collections::BTreeMap;

use thiserror::Error;

use super::term::{Function, Morphism, Subvariety};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("dimension check failed for {what}: {detail}")]
    Dimension { what: String, detail: String },
    #[error("invalid declaration {what}: {detail}")]
    Invalid { what: String, detail: String },
}

fn invalid(what: &str, detail: impl Into<String>) -> ContextError {
    ContextError::Invalid { what: what.to_string(), detail: detail.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyDecl {
    pub name: String,
    pub dim: u32,
    pub smooth: bool,
    pub reduced: bool,
    /// Factors when the variety is a declared product.
    pub factors: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleDecl {
    /// The total space; bundles are named by it.
    pub total: String,
    pub base: String,
    pub rank: u32,
    pub dual: Option<String>,
}

/// Roles a morphism atom can carry. A single atom may have several.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    ClosedEmbedding { codim: u32, image: Option<String> },
    OpenEmbedding,
    Projection(String),
    ZeroSection(String),
    Section(String),
    Negation(String),
    /// Fiberwise linear map with an optionally declared transpose.
    Linear { transpose: Option<String> },
    Identity,
    Diagonal,
    Graph(Morphism),
    /// Pairing `V ×_X V^ → A¹_X` attached to the bundle.
    Pairing(String),
    /// Projection of the fiber product onto the named bundle's total space.
    FiberProjection(String),
    Factor { product: String, index: u8 },
    /// `g × f` on products.
    ProductMap(Morphism, Morphism),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub kinds: Vec<MorphismKind>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubvarietyDecl {
    pub name: String,
    pub ambient: String,
    pub closed: bool,
    pub reduced: bool,
    pub smooth: bool,
    pub codim: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub variety: String,
    /// Marks the fiber coordinate `t` of an affine line.
    pub coordinate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub variety: String,
}

/// A Cartesian square with `f: X → Y`, `h: Y' → Y`, `f': X' → Y'`, `h': X' → X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianFact {
    pub name: String,
    pub f: Morphism,
    pub h: Morphism,
    pub f_prime: Morphism,
    pub h_prime: Morphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Identity {
    Morphism(Morphism, Morphism),
    Function(Function, Function),
    Subvariety(Subvariety, Subvariety),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    Variety(VarietyDecl),
    Product { name: String, left: String, right: String },
    Bundle(BundleDecl),
    Dual { bundle: String, dual: String },
    Morphism(MorphismDecl),
    Subvariety(SubvarietyDecl),
    Function(FunctionDecl),
    Object(ObjectDecl),
    Cartesian(CartesianFact),
    Identity(Identity),
}

impl Declaration {
    pub fn name(&self) -> String {
        match self {
            Declaration::Variety(v) => v.name.clone(),
            Declaration::Product { name, .. } => name.clone(),
            Declaration::Bundle(b) => b.total.clone(),
            Declaration::Dual { bundle, .. } => bundle.clone(),
            Declaration::Morphism(m) => m.name.clone(),
            Declaration::Subvariety(s) => s.name.clone(),
            Declaration::Function(f) => f.name.clone(),
            Declaration::Object(o) => o.name.clone(),
            Declaration::Cartesian(c) => c.name.clone(),
            Declaration::Identity(_) => "identity".to_string(),
        }
    }
}

/// Immutable geometry context built by [`declare_setup`].
#[derive(Clone, Debug, Default)]
pub struct GeometryContext {
    pub(crate) varieties: BTreeMap<String, VarietyDecl>,
    pub(crate) bundles: BTreeMap<String, BundleDecl>,
    pub(crate) morphisms: BTreeMap<String, MorphismDecl>,
    pub(crate) subvarieties: BTreeMap<String, SubvarietyDecl>,
    pub(crate) functions: BTreeMap<String, FunctionDecl>,
    pub(crate) objects: BTreeMap<String, ObjectDecl>,
    pub(crate) squares: Vec<CartesianFact>,
    /// Identities in declaration order, with both sides already normalized
    /// against the identities declared before them.
    pub(crate) morphism_ids: Vec<(Vec<String>, Vec<String>)>,
    pub(crate) function_ids: Vec<(super::normalize::NormFn, super::normalize::NormFn)>,
    pub(crate) subvariety_ids: Vec<(Subvariety, Subvariety)>,
    pub(crate) declarations: Vec<Declaration>,
}

/// Builds a context from declarations in a single forward pass.
pub fn declare_setup(decls: &[Declaration]) -> Result<GeometryContext, ContextError> {
    let mut ctx = GeometryContext::default();
    for d in decls {
        ctx.declare(d)?;
    }
    Ok(ctx)
}

impl GeometryContext {
    fn name_taken(&self, name: &str) -> bool {
        self.varieties.contains_key(name)
            || self.morphisms.contains_key(name)
            || self.subvarieties.contains_key(name)
            || self.functions.contains_key(name)
            || self.objects.contains_key(name)
            || self.squares.iter().any(|s| s.name == name)
    }

    fn fresh(&self, name: &str) -> Result<(), ContextError> {
        if self.name_taken(name) {
            Err(ContextError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    fn need_variety(&self, name: &str) -> Result<&VarietyDecl, ContextError> {
        self.varieties
            .get(name)
            .ok_or_else(|| ContextError::Unknown { kind: "variety", name: name.to_string() })
    }

    fn need_bundle(&self, name: &str) -> Result<&BundleDecl, ContextError> {
        self.bundles
            .get(name)
            .ok_or_else(|| ContextError::Unknown { kind: "bundle", name: name.to_string() })
    }

    fn dim_err(what: &str, detail: String) -> ContextError {
        ContextError::Dimension { what: what.to_string(), detail }
    }

    fn declare(&mut self, d: &Declaration) -> Result<(), ContextError> {
        match d {
            Declaration::Variety(v) => {
                self.fresh(&v.name)?;
                if v.factors.is_some() {
                    return Err(invalid(&v.name, "use a product declaration"));
                }
                self.varieties.insert(v.name.clone(), v.clone());
            }
            Declaration::Product { name, left, right } => {
                self.fresh(name)?;
                let a = self.need_variety(left)?.clone();
                let b = self.need_variety(right)?.clone();
                if self.product_of(left, right).is_some() {
                    return Err(ContextError::Duplicate(format!("product {left} x {right}")));
                }
                self.varieties.insert(
                    name.clone(),
                    VarietyDecl {
                        name: name.clone(),
                        dim: a.dim + b.dim,
                        smooth: a.smooth && b.smooth,
                        reduced: a.reduced && b.reduced,
                        factors: Some((left.clone(), right.clone())),
                    },
                );
            }
            Declaration::Bundle(b) => {
                if self.bundles.contains_key(&b.total) {
                    return Err(ContextError::Duplicate(b.total.clone()));
                }
                if b.rank == 0 {
                    return Err(invalid(&b.total, "bundle rank must be positive"));
                }
                let base = self.need_variety(&b.base)?.clone();
                let total = self.need_variety(&b.total)?;
                if total.dim != base.dim + b.rank {
                    return Err(Self::dim_err(
                        &b.total,
                        format!("total space has dim {} but base dim {} + rank {}", total.dim, base.dim, b.rank),
                    ));
                }
                self.bundles.insert(b.total.clone(), BundleDecl { dual: None, ..b.clone() });
            }
            Declaration::Dual { bundle, dual } => {
                let a = self.need_bundle(bundle)?.clone();
                let b = self.need_bundle(dual)?.clone();
                if a.dual.is_some() || b.dual.is_some() {
                    return Err(ContextError::Duplicate(format!("dual of {bundle}")));
                }
                if a.base != b.base || a.rank != b.rank {
                    return Err(Self::dim_err(bundle, format!("{dual} has different base or rank")));
                }
                self.bundles.get_mut(bundle).expect("checked").dual = Some(dual.clone());
                self.bundles.get_mut(dual).expect("checked").dual = Some(bundle.clone());
            }
            Declaration::Morphism(m) => {
                self.fresh(&m.name)?;
                self.need_variety(&m.source)?;
                self.need_variety(&m.target)?;
                for k in &m.kinds {
                    self.check_kind(m, k)?;
                }
                self.morphisms.insert(m.name.clone(), m.clone());
            }
            Declaration::Subvariety(s) => {
                self.fresh(&s.name)?;
                let amb = self.need_variety(&s.ambient)?;
                if let Some(c) = s.codim {
                    if c > amb.dim {
                        return Err(Self::dim_err(&s.name, format!("codim {c} exceeds ambient dim {}", amb.dim)));
                    }
                }
                self.subvarieties.insert(s.name.clone(), s.clone());
            }
            Declaration::Function(f) => {
                self.fresh(&f.name)?;
                self.need_variety(&f.variety)?;
                self.functions.insert(f.name.clone(), f.clone());
            }
            Declaration::Object(o) => {
                self.fresh(&o.name)?;
                self.need_variety(&o.variety)?;
                self.objects.insert(o.name.clone(), o.clone());
            }
            Declaration::Cartesian(c) => {
                self.fresh(&c.name)?;
                self.check_square(c)?;
                self.squares.push(c.clone());
            }
            Declaration::Identity(id) => self.add_identity(id)?,
        }
        self.declarations.push(d.clone());
        Ok(())
    }

    fn check_kind(&self, m: &MorphismDecl, k: &MorphismKind) -> Result<(), ContextError> {
        let (src, tgt) = (self.need_variety(&m.source)?, self.need_variety(&m.target)?);
        let bad = |detail: String| Err(Self::dim_err(&m.name, detail));
        match k {
            MorphismKind::ClosedEmbedding { codim, image } => {
                if src.dim + codim != tgt.dim {
                    return bad(format!("embedding codim {codim} from dim {} into dim {}", src.dim, tgt.dim));
                }
                if let Some(img) = image {
                    let s = self
                        .subvarieties
                        .get(img)
                        .ok_or_else(|| ContextError::Unknown { kind: "subvariety", name: img.clone() })?;
                    if s.ambient != m.target {
                        return bad(format!("image {img} does not live on {}", m.target));
                    }
                }
            }
            MorphismKind::OpenEmbedding | MorphismKind::Identity => {
                if src.dim != tgt.dim {
                    return bad("open embedding or identity must preserve dimension".into());
                }
            }
            MorphismKind::Projection(b) => {
                let bd = self.need_bundle(b)?;
                if m.source != bd.total || m.target != bd.base {
                    return bad(format!("projection of {b} must be {} -> {}", bd.total, bd.base));
                }
            }
            MorphismKind::ZeroSection(b) | MorphismKind::Section(b) => {
                let bd = self.need_bundle(b)?;
                if m.source != bd.base || m.target != bd.total {
                    return bad(format!("section of {b} must be {} -> {}", bd.base, bd.total));
                }
            }
            MorphismKind::Negation(b) => {
                self.need_bundle(b)?;
                if m.source != *b || m.target != *b {
                    return bad(format!("negation of {b} must be an endomorphism"));
                }
            }
            MorphismKind::Linear { transpose } => {
                let sb = self.need_bundle(&m.source)?;
                let tb = self.need_bundle(&m.target)?;
                if sb.base != tb.base {
                    return bad("bundle map must cover the identity of the base".into());
                }
                if let Some(t) = transpose {
                    let td = self
                        .morphisms
                        .get(t)
                        .ok_or_else(|| ContextError::Unknown { kind: "morphism", name: t.clone() })?;
                    if Some(&td.source) != tb.dual.as_ref() || Some(&td.target) != sb.dual.as_ref() {
                        return bad(format!("transpose {t} must map the dual of the target to the dual of the source"));
                    }
                }
            }
            MorphismKind::Diagonal => {
                if self.product_of(&m.source, &m.source).as_deref() != Some(m.target.as_str()) {
                    return bad(format!("diagonal must land in {0} x {0}", m.source));
                }
            }
            MorphismKind::Graph(g) => {
                let (gs, gt) = self.morphism_signature(g).map_err(|e| invalid(&m.name, e.to_string()))?;
                if gs != m.source || self.product_of(&gs, &gt).as_deref() != Some(m.target.as_str()) {
                    return bad("graph must map the source into source x target".into());
                }
            }
            MorphismKind::Pairing(b) => {
                let bd = self.need_bundle(b)?.clone();
                let a1 = self.need_variety(&m.target)?;
                let base = self.need_variety(&bd.base)?;
                if a1.dim != base.dim + 1 || src.dim != base.dim + 2 * bd.rank {
                    return bad("pairing must map the fiber product to the affine line over the base".into());
                }
            }
            MorphismKind::FiberProjection(b) => {
                let bd = self.need_bundle(b)?;
                let base = self.need_variety(&bd.base)?;
                if m.target != *b || src.dim != base.dim + 2 * bd.rank {
                    return bad(format!("fiber projection must map the fiber product onto {b}"));
                }
            }
            MorphismKind::Factor { product, index } => {
                let p = self.need_variety(product)?;
                let Some((l, r)) = p.factors.clone() else {
                    return Err(invalid(&m.name, format!("{product} is not a product")));
                };
                let want = if *index == 1 { l } else { r };
                if m.source != *product || m.target != want || !(1..=2).contains(index) {
                    return bad(format!("factor projection must be {product} -> {want}"));
                }
            }
            MorphismKind::ProductMap(g, f) => {
                let e = |x: super::normalize::ExprError| invalid(&m.name, x.to_string());
                let (gs, gt) = self.morphism_signature(g).map_err(e)?;
                let (fs, ft) = self.morphism_signature(f).map_err(e)?;
                let s = self.product_of(&gs, &fs);
                let t = self.product_of(&gt, &ft);
                if s.as_deref() != Some(m.source.as_str()) || t.as_deref() != Some(m.target.as_str()) {
                    return bad(format!("product map must be {gs} x {fs} -> {gt} x {ft}"));
                }
            }
        }
        Ok(())
    }

    fn check_square(&self, c: &CartesianFact) -> Result<(), ContextError> {
        let e = |x: super::normalize::ExprError| invalid(&c.name, x.to_string());
        let (x, y) = self.morphism_signature(&c.f).map_err(e)?;
        let (yp, y2) = self.morphism_signature(&c.h).map_err(e)?;
        let (xp, yp2) = self.morphism_signature(&c.f_prime).map_err(e)?;
        let (xp2, x2) = self.morphism_signature(&c.h_prime).map_err(e)?;
        if y != y2 || yp != yp2 || xp != xp2 || x != x2 {
            return Err(invalid(&c.name, "square sides do not match"));
        }
        let lhs = self.normalize_morphism(&Morphism::compose(c.f.clone(), c.h_prime.clone())).map_err(e)?;
        let rhs = self.normalize_morphism(&Morphism::compose(c.h.clone(), c.f_prime.clone())).map_err(e)?;
        if lhs != rhs {
            return Err(invalid(&c.name, "square does not commute under the declared identities"));
        }
        Ok(())
    }

    fn add_identity(&mut self, id: &Identity) -> Result<(), ContextError> {
        let e = |x: super::normalize::ExprError| invalid("identity", x.to_string());
        match id {
            Identity::Morphism(l, r) => {
                let nl = self.morph_nf(l).map_err(e)?;
                let nr = self.morph_nf(r).map_err(e)?;
                if nl.source != nr.source || nl.target != nr.target {
                    return Err(invalid("identity", "sides have different signatures"));
                }
                if nl.atoms.is_empty() {
                    return Err(invalid("identity", "left side normalizes to an identity"));
                }
                if nl.atoms != nr.atoms {
                    self.morphism_ids.push((nl.atoms, nr.atoms));
                }
            }
            Identity::Function(l, r) => {
                let nl = self.fn_nf(l).map_err(e)?;
                let nr = self.fn_nf(r).map_err(e)?;
                if nl.variety != nr.variety {
                    return Err(invalid("identity", "functions live on different varieties"));
                }
                if nl != nr {
                    self.function_ids.push((nl, nr));
                }
            }
            Identity::Subvariety(l, r) => {
                let al = self.subvariety_ambient(l).map_err(e)?;
                let ar = self.subvariety_ambient(r).map_err(e)?;
                if al != ar {
                    return Err(invalid("identity", "subvarieties live in different ambients"));
                }
                let nl = self.sub_nf(l).map_err(e)?;
                let nr = self.sub_nf(r).map_err(e)?;
                if nl != nr {
                    self.subvariety_ids.push((nl, nr));
                }
            }
        }
        Ok(())
    }

    pub fn variety(&self, name: &str) -> Option<&VarietyDecl> {
        self.varieties.get(name)
    }

    pub fn bundle(&self, name: &str) -> Option<&BundleDecl> {
        self.bundles.get(name)
    }

    pub fn morphism(&self, name: &str) -> Option<&MorphismDecl> {
        self.morphisms.get(name)
    }

    pub fn subvariety(&self, name: &str) -> Option<&SubvarietyDecl> {
        self.subvarieties.get(name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.get(name)
    }

    pub fn object(&self, name: &str) -> Option<&ObjectDecl> {
        self.objects.get(name)
    }

    pub fn squares(&self) -> &[CartesianFact] {
        &self.squares
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn morphism_names(&self) -> impl Iterator<Item = &str> {
        self.morphisms.keys().map(String::as_str)
    }

    pub fn subvariety_names(&self) -> impl Iterator<Item = &str> {
        self.subvarieties.keys().map(String::as_str)
    }

    pub fn product_of(&self, a: &str, b: &str) -> Option<String> {
        self.varieties
            .values()
            .find(|v| v.factors.as_ref().is_some_and(|(l, r)| l == a && r == b))
            .map(|v| v.name.clone())
    }

    pub fn is_smooth(&self, variety: &str) -> bool {
        self.varieties.get(variety).is_some_and(|v| v.smooth)
    }

    fn find_kind<F: Fn(&MorphismKind) -> bool>(&self, pred: F) -> Option<&str> {
        self.morphisms
            .values()
            .find(|m| m.kinds.iter().any(&pred))
            .map(|m| m.name.as_str())
    }

    pub fn projection_of(&self, bundle: &str) -> Option<&str> {
        self.find_kind(|k| matches!(k, MorphismKind::Projection(b) if b == bundle))
    }

    pub fn zero_of(&self, bundle: &str) -> Option<&str> {
        self.find_kind(|k| matches!(k, MorphismKind::ZeroSection(b) if b == bundle))
    }

    pub fn negation_of(&self, bundle: &str) -> Option<&str> {
        self.find_kind(|k| matches!(k, MorphismKind::Negation(b) if b == bundle))
    }

    pub fn fiber_projection_of(&self, bundle: &str) -> Option<&str> {
        self.find_kind(|k| matches!(k, MorphismKind::FiberProjection(b) if b == bundle))
    }

    /// The pairing attached to the bundle or to its dual.
    pub fn pairing_of(&self, bundle: &str) -> Option<&str> {
        let dual = self.bundles.get(bundle).and_then(|b| b.dual.clone());
        self.find_kind(|k| {
            matches!(k, MorphismKind::Pairing(b) if b == bundle || Some(b) == dual.as_ref())
        })
    }

    pub fn coordinate_on(&self, variety: &str) -> Option<&str> {
        self.functions
            .values()
            .find(|f| f.coordinate && f.variety == variety)
            .map(|f| f.name.as_str())
    }

    /// Closed embedding atom whose declared image is the atom `image`.
    pub fn embedding_onto(&self, image: &str) -> Option<(&str, u32)> {
        self.morphisms.values().find_map(|m| {
            m.kinds.iter().find_map(|k| match k {
                MorphismKind::ClosedEmbedding { codim, image: Some(i) } if i == image => {
                    Some((m.name.as_str(), *codim))
                }
                _ => None,
            })
        })
    }

    /// Whether the atom is a closed embedding (declared, or by its role).
    pub fn is_closed_embedding(&self, atom: &str) -> bool {
        self.morphisms.get(atom).is_some_and(|m| {
            m.kinds.iter().any(|k| {
                matches!(
                    k,
                    MorphismKind::ClosedEmbedding { .. }
                        | MorphismKind::Diagonal
                        | MorphismKind::Graph(_)
                        | MorphismKind::ZeroSection(_)
                        | MorphismKind::Section(_)
                )
            })
        })
    }

    pub fn product_map(&self, atom: &str) -> Option<(&Morphism, &Morphism)> {
        self.morphisms.get(atom)?.kinds.iter().find_map(|k| match k {
            MorphismKind::ProductMap(g, f) => Some((g, f)),
            _ => None,
        })
    }

    pub fn factor(&self, atom: &str) -> Option<(&str, u8)> {
        self.morphisms.get(atom)?.kinds.iter().find_map(|k| match k {
            MorphismKind::Factor { product, index } => Some((product.as_str(), *index)),
            _ => None,
        })
    }

    pub fn has_kind<F: Fn(&MorphismKind) -> bool>(&self, atom: &str, pred: F) -> bool {
        self.morphisms.get(atom).is_some_and(|m| m.kinds.iter().any(pred))
    }
}
