//! Normal forms for morphisms, functions, subvarieties and expressions.

use std::collections::BTreeSet;

use thiserror::Error;

use super::context::{GeometryContext, MorphismKind};
use super::term::{DExpr, Function, Morphism, Subvariety};

const REWRITE_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Mismatch(String),
    #[error("no transpose available for '{0}'")]
    NoTranspose(String),
    #[error("identity rewriting did not terminate on {0}")]
    Diverges(String),
}

/// Morphism as a flat atom list in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormMorph {
    pub atoms: Vec<String>,
    pub source: String,
    pub target: String,
}

impl NormMorph {
    pub fn to_morphism(&self) -> Morphism {
        Morphism::from_atoms(&self.atoms, &self.source)
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Function as `base ∘ atoms`, with atoms in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormFn {
    pub base: String,
    pub atoms: Vec<String>,
    pub variety: String,
}

impl NormFn {
    pub fn to_function(&self) -> Function {
        if self.atoms.is_empty() {
            Function::Atom(self.base.clone())
        } else {
            Function::pullback(Function::Atom(self.base.clone()), Morphism::from_atoms(&self.atoms, &self.variety))
        }
    }
}

fn find_sub(hay: &[String], needle: &[String]) -> Option<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()] == *needle)
}

fn flatten_inter(s: &Subvariety, out: &mut Vec<Subvariety>) {
    match s {
        Subvariety::Intersection(a, b) => {
            flatten_inter(a, out);
            flatten_inter(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn build_inter(ops: BTreeSet<Subvariety>) -> Subvariety {
    let mut it = ops.into_iter();
    let first = it.next().expect("intersection of at least one operand");
    it.fold(first, Subvariety::intersection)
}

impl GeometryContext {
    fn atom_decl(&self, a: &str) -> Result<&super::context::MorphismDecl, ExprError> {
        self.morphisms
            .get(a)
            .ok_or_else(|| ExprError::Unknown { kind: "morphism", name: a.to_string() })
    }

    fn dual_of(&self, bundle: &str) -> Option<&str> {
        self.bundles.get(bundle)?.dual.as_deref()
    }

    /// Transpose of a single atom.
    pub fn atom_transpose(&self, a: &str) -> Result<String, ExprError> {
        let d = self.atom_decl(a)?;
        for k in &d.kinds {
            let found = match k {
                MorphismKind::Linear { transpose: Some(t) } => Some(t.clone()),
                MorphismKind::Projection(b) => self.dual_of(b).and_then(|v| self.zero_of(v)).map(str::to_string),
                MorphismKind::ZeroSection(b) => {
                    self.dual_of(b).and_then(|v| self.projection_of(v)).map(str::to_string)
                }
                MorphismKind::Negation(b) => self.dual_of(b).and_then(|v| self.negation_of(v)).map(str::to_string),
                _ => None,
            };
            if let Some(t) = found {
                return Ok(t);
            }
        }
        self.morphisms
            .values()
            .find(|m| {
                m.kinds
                    .iter()
                    .any(|k| matches!(k, MorphismKind::Linear { transpose: Some(t) } if t == a))
            })
            .map(|m| m.name.clone())
            .ok_or_else(|| ExprError::NoTranspose(a.to_string()))
    }

    fn raw_morph(&self, m: &Morphism) -> Result<NormMorph, ExprError> {
        match m {
            Morphism::Atom(a) => {
                let d = self.atom_decl(a)?;
                let atoms = if d.kinds.contains(&MorphismKind::Identity) { vec![] } else { vec![a.clone()] };
                Ok(NormMorph { atoms, source: d.source.clone(), target: d.target.clone() })
            }
            Morphism::Id(x) => {
                if !self.varieties.contains_key(x) {
                    return Err(ExprError::Unknown { kind: "variety", name: x.clone() });
                }
                Ok(NormMorph { atoms: vec![], source: x.clone(), target: x.clone() })
            }
            Morphism::Compose(outer, inner) => {
                let i = self.raw_morph(inner)?;
                let o = self.raw_morph(outer)?;
                if i.target != o.source {
                    return Err(ExprError::Mismatch(format!(
                        "cannot compose: inner lands in {} but outer starts at {}",
                        i.target, o.source
                    )));
                }
                let mut atoms = i.atoms;
                atoms.extend(o.atoms);
                Ok(NormMorph { atoms, source: i.source, target: o.target })
            }
            Morphism::Transpose(inner) => {
                let n = self.raw_morph(inner)?;
                if n.atoms.is_empty() {
                    let d = self
                        .dual_of(&n.source)
                        .ok_or_else(|| ExprError::NoTranspose(format!("id({})", n.source)))?;
                    return Ok(NormMorph { atoms: vec![], source: d.to_string(), target: d.to_string() });
                }
                let atoms = n
                    .atoms
                    .iter()
                    .rev()
                    .map(|a| self.atom_transpose(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let source = self.atom_decl(&atoms[0])?.source.clone();
                let target = self.atom_decl(atoms.last().expect("nonempty"))?.target.clone();
                let mut prev = source.clone();
                for a in &atoms {
                    let d = self.atom_decl(a)?;
                    if d.source != prev {
                        return Err(ExprError::Mismatch(format!("transpose chain breaks at {a}")));
                    }
                    prev = d.target.clone();
                }
                Ok(NormMorph { atoms, source, target })
            }
        }
    }

    fn apply_morph_ids(&self, mut atoms: Vec<String>) -> Result<Vec<String>, ExprError> {
        for _ in 0..REWRITE_LIMIT {
            let hit = self
                .morphism_ids
                .iter()
                .find_map(|(l, r)| find_sub(&atoms, l).map(|i| (i, l.len(), r)));
            let Some((i, len, r)) = hit else {
                return Ok(atoms);
            };
            atoms.splice(i..i + len, r.iter().cloned());
        }
        Err(ExprError::Diverges(atoms.join(".")))
    }

    pub(crate) fn morph_nf(&self, m: &Morphism) -> Result<NormMorph, ExprError> {
        let raw = self.raw_morph(m)?;
        let atoms = self.apply_morph_ids(raw.atoms)?;
        Ok(NormMorph { atoms, ..raw })
    }

    /// Normal form of a morphism: identities removed, transposes expanded and
    /// declared identities applied to a fixpoint.
    pub fn normalize_morphism(&self, m: &Morphism) -> Result<Morphism, ExprError> {
        Ok(self.morph_nf(m)?.to_morphism())
    }

    pub fn morphism_signature(&self, m: &Morphism) -> Result<(String, String), ExprError> {
        let n = self.raw_morph(m)?;
        Ok((n.source, n.target))
    }

    /// Normalized atom list of a morphism.
    pub fn morphism_atoms(&self, m: &Morphism) -> Result<NormMorph, ExprError> {
        self.morph_nf(m)
    }

    fn raw_fn(&self, f: &Function) -> Result<NormFn, ExprError> {
        match f {
            Function::Atom(a) => {
                let d = self
                    .functions
                    .get(a)
                    .ok_or_else(|| ExprError::Unknown { kind: "function", name: a.clone() })?;
                Ok(NormFn { base: a.clone(), atoms: vec![], variety: d.variety.clone() })
            }
            Function::Pullback(phi, m) => {
                let p = self.raw_fn(phi)?;
                let n = self.raw_morph(m)?;
                if n.target != p.variety {
                    return Err(ExprError::Mismatch(format!(
                        "cannot pull back a function on {} along a morphism into {}",
                        p.variety, n.target
                    )));
                }
                let mut atoms = n.atoms;
                atoms.extend(p.atoms);
                Ok(NormFn { base: p.base, atoms, variety: n.source })
            }
        }
    }

    pub(crate) fn fn_nf(&self, f: &Function) -> Result<NormFn, ExprError> {
        let mut cur = self.raw_fn(f)?;
        for _ in 0..REWRITE_LIMIT {
            cur.atoms = self.apply_morph_ids(cur.atoms)?;
            let hit = self.function_ids.iter().find(|(l, _)| {
                l.base == cur.base && cur.atoms.len() >= l.atoms.len() && cur.atoms.ends_with(&l.atoms)
            });
            let Some((l, r)) = hit else {
                return Ok(cur);
            };
            let keep = cur.atoms.len() - l.atoms.len();
            let mut atoms = cur.atoms[..keep].to_vec();
            atoms.extend(r.atoms.iter().cloned());
            cur = NormFn { base: r.base.clone(), atoms, variety: cur.variety };
        }
        Err(ExprError::Diverges(cur.base))
    }

    pub fn normalize_function(&self, f: &Function) -> Result<Function, ExprError> {
        Ok(self.fn_nf(f)?.to_function())
    }

    pub fn function_variety(&self, f: &Function) -> Result<String, ExprError> {
        Ok(self.raw_fn(f)?.variety)
    }

    pub fn subvariety_ambient(&self, s: &Subvariety) -> Result<String, ExprError> {
        match s {
            Subvariety::Atom(a) => self
                .subvarieties
                .get(a)
                .map(|d| d.ambient.clone())
                .ok_or_else(|| ExprError::Unknown { kind: "subvariety", name: a.clone() }),
            Subvariety::Reduction(x) => self.subvariety_ambient(x),
            Subvariety::Intersection(a, b) => {
                let (x, y) = (self.subvariety_ambient(a)?, self.subvariety_ambient(b)?);
                if x != y {
                    return Err(ExprError::Mismatch(format!("intersection of subvarieties of {x} and {y}")));
                }
                Ok(x)
            }
            Subvariety::Preimage(f, z) => {
                let amb = self.subvariety_ambient(z)?;
                let (src, tgt) = self.morphism_signature(f)?;
                if tgt != amb {
                    return Err(ExprError::Mismatch(format!("preimage along a morphism into {tgt} of a subvariety of {amb}")));
                }
                Ok(src)
            }
        }
    }

    fn is_reduced_nf(&self, s: &Subvariety) -> bool {
        match s {
            Subvariety::Atom(a) => self.subvarieties.get(a).is_some_and(|d| d.reduced),
            Subvariety::Reduction(_) => true,
            _ => false,
        }
    }

    fn apply_sub_ids(&self, mut node: Subvariety) -> Result<Subvariety, ExprError> {
        for _ in 0..REWRITE_LIMIT {
            let mut ops = Vec::new();
            flatten_inter(&node, &mut ops);
            let set: BTreeSet<Subvariety> = ops.into_iter().collect();
            let mut next = None;
            for (l, r) in &self.subvariety_ids {
                let mut lops = Vec::new();
                flatten_inter(l, &mut lops);
                if lops.len() > 1 {
                    let lset: BTreeSet<Subvariety> = lops.into_iter().collect();
                    if lset.is_subset(&set) && set.len() > 1 {
                        let mut rest: BTreeSet<Subvariety> = set.difference(&lset).cloned().collect();
                        let mut rops = Vec::new();
                        flatten_inter(r, &mut rops);
                        rest.extend(rops);
                        let cand = build_inter(rest);
                        if cand != node {
                            next = Some(cand);
                            break;
                        }
                    }
                } else if *l == node {
                    next = Some(r.clone());
                    break;
                }
            }
            match next {
                Some(n) => node = n,
                None => return Ok(node),
            }
        }
        Err(ExprError::Diverges(format!("{node:?}")))
    }

    pub(crate) fn sub_nf(&self, s: &Subvariety) -> Result<Subvariety, ExprError> {
        let node = match s {
            Subvariety::Atom(a) => {
                if !self.subvarieties.contains_key(a) {
                    return Err(ExprError::Unknown { kind: "subvariety", name: a.clone() });
                }
                s.clone()
            }
            Subvariety::Reduction(x) => {
                let y = self.sub_nf(x)?;
                if self.is_reduced_nf(&y) {
                    return Ok(y);
                }
                Subvariety::reduction(y)
            }
            Subvariety::Intersection(a, b) => {
                let mut ops = Vec::new();
                flatten_inter(&self.sub_nf(a)?, &mut ops);
                flatten_inter(&self.sub_nf(b)?, &mut ops);
                build_inter(ops.into_iter().collect())
            }
            Subvariety::Preimage(f, z) => {
                let m = self.morph_nf(f)?;
                let zn = self.sub_nf(z)?;
                if m.is_identity() {
                    return Ok(zn);
                }
                match zn {
                    Subvariety::Preimage(g, w) => {
                        let merged = self.morph_nf(&Morphism::compose(g, m.to_morphism()))?;
                        return self.sub_nf(&Subvariety::preimage(merged.to_morphism(), *w));
                    }
                    other => Subvariety::preimage(m.to_morphism(), other),
                }
            }
        };
        self.apply_sub_ids(node)
    }

    pub fn normalize_subvariety(&self, s: &Subvariety) -> Result<Subvariety, ExprError> {
        self.sub_nf(s)
    }

    fn opb_nf(&self, m: NormMorph, c: DExpr) -> Result<DExpr, ExprError> {
        if m.is_identity() {
            return Ok(c);
        }
        Ok(match c {
            DExpr::Struct(_) => DExpr::Struct(m.source.clone()),
            DExpr::Exp(_, phi) => {
                let f = self.fn_nf(&Function::pullback(phi, m.to_morphism()))?;
                DExpr::Exp(m.source.clone(), f.to_function())
            }
            DExpr::Opb(g, y) => {
                let merged = self.morph_nf(&Morphism::compose(g, m.to_morphism()))?;
                self.opb_nf(merged, *y)?
            }
            other => DExpr::opb(m.to_morphism(), other),
        })
    }

    fn oim_nf(&self, m: NormMorph, c: DExpr) -> Result<DExpr, ExprError> {
        if m.is_identity() {
            return Ok(c);
        }
        Ok(match c {
            DExpr::Oim(g, y) => {
                let merged = self.morph_nf(&Morphism::compose(m.to_morphism(), g))?;
                self.oim_nf(merged, *y)?
            }
            other => DExpr::oim(m.to_morphism(), other),
        })
    }

    fn nf_core(&self, e: &DExpr) -> Result<(DExpr, i64), ExprError> {
        Ok(match e {
            DExpr::Shift(m, k) => {
                let (c, j) = self.nf_core(m)?;
                (c, j + k)
            }
            DExpr::Struct(_) | DExpr::Var(..) => (e.clone(), 0),
            DExpr::Exp(x, phi) => (DExpr::Exp(x.clone(), self.fn_nf(phi)?.to_function()), 0),
            DExpr::Tensor(a, b) => {
                let mut ops = Vec::new();
                let k = self.tensor_operands(a, &mut ops)? + self.tensor_operands(b, &mut ops)?;
                let non_unit: Vec<DExpr> = ops.iter().filter(|o| !matches!(o, DExpr::Struct(_))).cloned().collect();
                let mut ops = if non_unit.is_empty() { vec![ops.swap_remove(0)] } else { non_unit };
                ops.sort();
                let mut it = ops.into_iter();
                let first = it.next().expect("nonempty");
                (it.fold(first, DExpr::tensor), k)
            }
            DExpr::ETensor(a, b) => {
                let (ca, ka) = self.nf_core(a)?;
                let (cb, kb) = self.nf_core(b)?;
                (DExpr::etensor(ca, cb), ka + kb)
            }
            DExpr::Opb(f, m) => {
                let (c, k) = self.nf_core(m)?;
                (self.opb_nf(self.morph_nf(f)?, c)?, k)
            }
            DExpr::Oim(f, m) => {
                let (c, k) = self.nf_core(m)?;
                (self.oim_nf(self.morph_nf(f)?, c)?, k)
            }
            DExpr::RGamma(s, m) => {
                let (c, k) = self.nf_core(m)?;
                (DExpr::rgamma(self.sub_nf(s)?, c), k)
            }
            DExpr::Fourier(b, m) => {
                let (c, k) = self.nf_core(m)?;
                (DExpr::fourier(b, c), k)
            }
        })
    }

    fn tensor_operands(&self, e: &DExpr, out: &mut Vec<DExpr>) -> Result<i64, ExprError> {
        fn flatten(c: DExpr, out: &mut Vec<DExpr>) {
            match c {
                DExpr::Tensor(a, b) => {
                    flatten(*a, out);
                    flatten(*b, out);
                }
                other => out.push(other),
            }
        }
        let (c, k) = self.nf_core(e)?;
        flatten(c, out);
        Ok(k)
    }

    /// Normal form used for equality of expressions: morphisms, functions and
    /// subvarieties normalized; trivial and nested inverse and direct images
    /// merged; shifts floated to the top; tensor products flattened, sorted and
    /// stripped of unit factors.
    pub fn normalize_expr(&self, e: &DExpr) -> Result<DExpr, ExprError> {
        let (c, k) = self.nf_core(e)?;
        Ok(DExpr::shifted(c, k))
    }

    /// Equality modulo the normalizer; errors count as inequality.
    pub fn nf_eq(&self, a: &DExpr, b: &DExpr) -> bool {
        matches!((self.normalize_expr(a), self.normalize_expr(b)), (Ok(x), Ok(y)) if x == y)
    }
}
