//! Rule table, matching views and single-step application.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{DExpr, Function, GeometryContext, Morphism, NormMorph, Path, Subvariety};

use super::{rules_basic, rules_fourier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Strict,
    AllowSingular,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::AllowSingular => "allow-singular",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "allow-singular" => Ok(Mode::AllowSingular),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fwd" => Ok(Direction::Forward),
            "bwd" => Ok(Direction::Backward),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binding {
    Morphism(Morphism),
    Subvariety(Subvariety),
    Function(Function),
    Name(String),
    Int(i64),
}

pub type Bindings = BTreeMap<String, Binding>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("no subterm at {0}")]
    NoSubterm(Path),
    #[error("{rule} {dir} does not match at {path}")]
    NoMatch { rule: String, dir: Direction, path: Path },
    #[error("side condition of {rule} fails: {reason}")]
    SideCondition { rule: String, reason: String },
    #[error("{rule} needs bindings: {names}")]
    NeedsBinding { rule: String, names: String },
    #[error("binding '{name}' is invalid: {reason}")]
    BadBinding { name: String, reason: String },
    #[error("{rule} matches ambiguously ({count} distinct results)")]
    Ambiguous { rule: String, count: usize },
    #[error("result is ill-formed: {0}")]
    IllFormed(String),
    #[error("internal shift accounting error in {0}")]
    ShiftAccounting(String),
}

/// One candidate produced by a rule.
#[derive(Clone, Debug)]
pub struct Rw {
    pub term: DExpr,
    pub delta: i64,
    /// Bindings that let the opposite direction recover the input.
    pub inverse: Bindings,
}

impl Rw {
    pub fn new(term: DExpr) -> Self {
        Rw { term, delta: 0, inverse: Bindings::new() }
    }

    pub fn shifted(term: DExpr, delta: i64) -> Self {
        Rw { term: DExpr::shifted(term, delta), delta, inverse: Bindings::new() }
    }

    pub fn with(mut self, name: &str, b: Binding) -> Self {
        self.inverse.insert(name.to_string(), b);
        self
    }
}

pub type RuleFn = fn(&Env, &DExpr) -> Result<Vec<Rw>, RuleError>;

/// A rewrite rule `lhs ≅ rhs[k]`.
pub struct RuleDef {
    pub id: &'static str,
    pub name: &'static str,
    pub stratum: u8,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// Whether shifts are floated out of the matched subterm before matching.
    pub floats: bool,
    pub fwd: RuleFn,
    pub bwd: RuleFn,
}

impl RuleDef {
    /// Family id, e.g. `R19` for `R19.tensor_unit`.
    pub fn family(&self) -> &'static str {
        self.id.split('.').next().unwrap_or(self.id)
    }
}

pub fn rules() -> &'static [RuleDef] {
    static ALL: std::sync::OnceLock<Vec<RuleDef>> = std::sync::OnceLock::new();
    ALL.get_or_init(|| {
        let mut v = rules_basic::table();
        v.extend(rules_fourier::table());
        v
    })
}

pub fn rule(id: &str) -> Option<&'static RuleDef> {
    rules().iter().find(|r| r.id == id)
}

/// Matching environment for one application.
pub struct Env<'a> {
    pub ctx: &'a GeometryContext,
    pub mode: Mode,
    pub bindings: &'a Bindings,
    pub rule: &'static str,
}

impl Env<'_> {
    pub fn side(&self, reason: impl Into<String>) -> RuleError {
        RuleError::SideCondition { rule: self.rule.to_string(), reason: reason.into() }
    }

    pub fn needs(&self, names: &str) -> RuleError {
        RuleError::NeedsBinding { rule: self.rule.to_string(), names: names.to_string() }
    }

    fn bad(&self, name: &str, reason: impl Into<String>) -> RuleError {
        RuleError::BadBinding { name: name.to_string(), reason: reason.into() }
    }

    pub fn nm(&self, m: &Morphism) -> Option<NormMorph> {
        self.ctx.morphism_atoms(m).ok()
    }

    pub fn morph(&self, name: &str) -> Result<Option<NormMorph>, RuleError> {
        match self.bindings.get(name) {
            None => Ok(None),
            Some(Binding::Morphism(m)) => {
                self.ctx.morphism_atoms(m).map(Some).map_err(|e| self.bad(name, e.to_string()))
            }
            Some(_) => Err(self.bad(name, "expected a morphism")),
        }
    }

    pub fn sub(&self, name: &str) -> Result<Option<Subvariety>, RuleError> {
        match self.bindings.get(name) {
            None => Ok(None),
            Some(Binding::Subvariety(s)) => {
                self.ctx.subvariety_ambient(s).map_err(|e| self.bad(name, e.to_string()))?;
                Ok(Some(s.clone()))
            }
            Some(_) => Err(self.bad(name, "expected a subvariety")),
        }
    }

    pub fn func(&self, name: &str) -> Result<Option<Function>, RuleError> {
        match self.bindings.get(name) {
            None => Ok(None),
            Some(Binding::Function(f)) => {
                self.ctx.function_variety(f).map_err(|e| self.bad(name, e.to_string()))?;
                Ok(Some(f.clone()))
            }
            Some(_) => Err(self.bad(name, "expected a function")),
        }
    }

    pub fn name(&self, name: &str) -> Result<Option<String>, RuleError> {
        match self.bindings.get(name) {
            None => Ok(None),
            Some(Binding::Name(n)) => Ok(Some(n.clone())),
            Some(Binding::Morphism(Morphism::Atom(n))) => Ok(Some(n.clone())),
            Some(_) => Err(self.bad(name, "expected a name")),
        }
    }

    pub fn int(&self, name: &str) -> Result<Option<i64>, RuleError> {
        match self.bindings.get(name) {
            None => Ok(None),
            Some(Binding::Int(k)) => Ok(Some(*k)),
            Some(_) => Err(self.bad(name, "expected an integer")),
        }
    }

    pub fn var_of(&self, e: &DExpr) -> Option<String> {
        self.ctx.well_formed(e).ok()
    }

    pub fn sub_eq(&self, a: &Subvariety, b: &Subvariety) -> bool {
        matches!(
            (self.ctx.normalize_subvariety(a), self.ctx.normalize_subvariety(b)),
            (Ok(x), Ok(y)) if x == y
        )
    }

    pub fn sub_nf(&self, s: &Subvariety) -> Subvariety {
        self.ctx.normalize_subvariety(s).unwrap_or_else(|_| s.clone())
    }

    /// Normalized morphism from an atom list.
    pub fn from_atoms(&self, atoms: &[String], source: &str) -> Option<NormMorph> {
        self.nm(&Morphism::from_atoms(atoms, source))
    }

    /// Ways of reading `e` as `Opb(h, rest)`, syntactic reading first. With
    /// `want`, only readings whose `h` equals it are kept, and a structure
    /// sheaf is read as the inverse image of the structure sheaf of the target.
    pub fn opb_views(&self, e: &DExpr, want: Option<&NormMorph>) -> Vec<(NormMorph, DExpr)> {
        let mut out = Vec::new();
        match e {
            DExpr::Opb(m1, inner) => {
                let Some(h1) = self.nm(m1) else { return out };
                out.push((h1, (**inner).clone()));
                let mut layers = vec![m1.clone()];
                let mut base = &**inner;
                while let DExpr::Opb(m, next) = base {
                    layers.push(m.clone());
                    base = next;
                }
                let composite = layers
                    .iter()
                    .skip(1)
                    .fold(layers[0].clone(), |acc, m| Morphism::compose(m.clone(), acc));
                if let Some(all) = self.nm(&composite) {
                    for k in 1..=all.atoms.len() {
                        let Some(h) = self.from_atoms(&all.atoms[..k], &all.source) else { continue };
                        let rest = if k == all.atoms.len() {
                            base.clone()
                        } else {
                            match self.from_atoms(&all.atoms[k..], &h.target) {
                                Some(r) => DExpr::opb(r.to_morphism(), base.clone()),
                                None => continue,
                            }
                        };
                        out.push((h, rest));
                    }
                }
            }
            DExpr::Struct(x) => {
                if let Some(h) = want {
                    if h.source == *x {
                        out.push((h.clone(), DExpr::Struct(h.target.clone())));
                    }
                }
            }
            _ => {}
        }
        if let Some(w) = want {
            out.retain(|(h, _)| h == w);
        }
        out
    }

    /// Ways of reading `e` as `Oim(h, rest)`, syntactic reading first.
    pub fn oim_views(&self, e: &DExpr, want: Option<&NormMorph>) -> Vec<(NormMorph, DExpr)> {
        let mut out = Vec::new();
        if let DExpr::Oim(m1, inner) = e {
            let Some(h1) = self.nm(m1) else { return out };
            out.push((h1, (**inner).clone()));
            let mut layers = vec![m1.clone()];
            let mut base = &**inner;
            while let DExpr::Oim(m, next) = base {
                layers.push(m.clone());
                base = next;
            }
            let composite = layers
                .iter()
                .skip(1)
                .fold(layers[0].clone(), |acc, m| Morphism::compose(acc, m.clone()));
            if let Some(all) = self.nm(&composite) {
                let n = all.atoms.len();
                for j in (0..n).rev() {
                    let Some(h) = self.from_atoms(&all.atoms[j..], "") else { continue };
                    let rest = if j == 0 {
                        base.clone()
                    } else {
                        match self.from_atoms(&all.atoms[..j], &all.source) {
                            Some(r) => DExpr::oim(r.to_morphism(), base.clone()),
                            None => continue,
                        }
                    };
                    out.push((h, rest));
                }
            }
        }
        if let Some(w) = want {
            out.retain(|(h, _)| h == w);
        }
        out
    }
}

/// Both orders of a binary tensor product; the flag records a swap.
pub fn tensor_views(e: &DExpr) -> Vec<(DExpr, DExpr, bool)> {
    match e {
        DExpr::Tensor(a, b) if a == b => vec![((**a).clone(), (**b).clone(), false)],
        DExpr::Tensor(a, b) => vec![((**a).clone(), (**b).clone(), false), ((**b).clone(), (**a).clone(), true)],
        _ => vec![],
    }
}

/// Outcome of one successful application.
#[derive(Clone, Debug)]
pub struct Applied {
    pub term: DExpr,
    pub delta: i64,
    pub inverse: Bindings,
}

/// Applies a rule at a path. Fails with a typed error when the pattern does
/// not match, a side condition fails, bindings are missing, or the match is
/// ambiguous.
pub fn apply_rule(
    ctx: &GeometryContext,
    term: &DExpr,
    rule_id: &str,
    dir: Direction,
    path: &Path,
    bindings: &Bindings,
    mode: Mode,
) -> Result<Applied, RuleError> {
    let def = rule(rule_id).ok_or_else(|| RuleError::UnknownRule(rule_id.to_string()))?;
    let sub = term.subterm(path).ok_or_else(|| RuleError::NoSubterm(path.clone()))?;
    let sub_var = ctx.well_formed(sub).map_err(|e| RuleError::IllFormed(e.to_string()))?;
    let (core, k) = if def.floats { sub.float_shifts() } else { (sub.clone(), 0) };
    let env = Env { ctx, mode, bindings, rule: def.id };
    let f = match dir {
        Direction::Forward => def.fwd,
        Direction::Backward => def.bwd,
    };
    let cands = f(&env, &core)?;
    let Some(first) = cands.first() else {
        return Err(RuleError::NoMatch { rule: def.id.to_string(), dir, path: path.clone() });
    };
    let mut distinct: Vec<DExpr> = Vec::new();
    for c in &cands {
        if let Ok(n) = ctx.normalize_expr(&c.term) {
            if !distinct.contains(&n) {
                distinct.push(n);
            }
        }
    }
    if distinct.len() > 1 {
        return Err(RuleError::Ambiguous { rule: def.id.to_string(), count: distinct.len() });
    }
    // Re-attach a floated shift; a zero shift the rule built itself stays.
    let new_sub = if k == 0 { first.term.clone() } else { DExpr::shifted(first.term.clone(), k) };
    let new_var = ctx.well_formed(&new_sub).map_err(|e| RuleError::IllFormed(e.to_string()))?;
    if new_var != sub_var {
        return Err(RuleError::IllFormed(format!("{} moved the object from {sub_var} to {new_var}", def.id)));
    }
    let new = term.replace_at(path, new_sub).ok_or_else(|| RuleError::NoSubterm(path.clone()))?;
    if new.total_shift() - term.total_shift() != first.delta {
        return Err(RuleError::ShiftAccounting(def.id.to_string()));
    }
    Ok(Applied { term: new, delta: first.delta, inverse: first.inverse.clone() })
}
