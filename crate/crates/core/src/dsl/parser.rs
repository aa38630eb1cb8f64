//! Single-pass recursive-descent parser with one token of lookahead.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{
    BundleDecl, CartesianFact, DExpr, Declaration, Function, FunctionDecl, Identity, Morphism, MorphismDecl,
    MorphismKind, ObjectDecl, Path, Subvariety, SubvarietyDecl, VarietyDecl,
};
use crate::rewrite::{rule, rules, Application, Binding, Bindings, Direction, Mode, ProofStep, StepRule};

use super::document::{Goal, Item, Script, ScriptDocument};
use super::lexer::{tokenize, SourceSpan, Tok, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

pub const KEYWORDS: &[&str] = &[
    "variety", "product", "bundle", "dual", "morphism", "subvariety", "function", "object", "cartesian",
    "identity", "goal", "script", "mode", "strata", "derives", "with", "and", "conv", "lemma", "kashiwara", "fwd",
    "bwd", "Exp", "Tensor", "ETensor", "Opb", "Oim", "RGamma", "Fourier", "pb", "id", "tr", "red", "preimage",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sym {
    Variety,
    Morphism,
    Subvariety,
    Function,
    Object(String),
    Square,
}

impl Sym {
    fn kind(&self) -> &'static str {
        match self {
            Sym::Variety => "variety",
            Sym::Morphism => "morphism",
            Sym::Subvariety => "subvariety",
            Sym::Function => "function",
            Sym::Object(_) => "object",
            Sym::Square => "square",
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    syms: HashMap<String, Sym>,
    bundles: Vec<String>,
    goals: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

/// Parses a whole document.
pub fn parse_document(src: &str) -> Result<ScriptDocument, ParseError> {
    let toks = tokenize(src).map_err(|e| ParseError { message: e.message, span: e.span, expected: vec![] })?;
    let mut p = Parser { toks, pos: 0, syms: HashMap::new(), bundles: Vec::new(), goals: Vec::new() };
    let mut doc = ScriptDocument::default();
    while p.peek().tok != Tok::Eof {
        doc.items.push(p.item()?);
    }
    Ok(doc)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError { message: message.into(), span, expected: vec![] }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            message: format!("unexpected {}", t.tok),
            span: t.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn kw(&mut self, kw: &str) -> PResult<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("'{kw}'")]))
        }
    }

    fn sym(&mut self, c: char) -> PResult<()> {
        if self.at_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("'{c}'")]))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().tok {
            Tok::Int(k) => {
                self.bump();
                Ok(k)
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        let span = self.peek().span;
        let k = self.int()?;
        u32::try_from(k).map_err(|_| self.err_at(span, format!("expected a non-negative integer, found {k}")))
    }

    fn fresh_name(&mut self) -> PResult<(String, SourceSpan)> {
        let (n, span) = self.ident()?;
        if KEYWORDS.contains(&n.as_str()) || n.starts_with("O_") {
            return Err(self.err_at(span, format!("'{n}' is reserved")));
        }
        if self.syms.contains_key(&n) || self.goals.contains(&n) {
            return Err(self.err_at(span, format!("duplicate declaration of '{n}'")));
        }
        Ok((n, span))
    }

    fn resolve(&mut self, want: &[&str]) -> PResult<(String, Sym)> {
        let (n, span) = self.ident()?;
        match self.syms.get(&n) {
            Some(s) if want.contains(&s.kind()) => Ok((n, s.clone())),
            Some(s) => Err(self.err_at(span, format!("'{n}' is a {}, expected {}", s.kind(), want.join(" or ")))),
            None => Err(self.err_at(span, format!("unknown {} '{n}'", want.join(" or ")))),
        }
    }

    fn variety_ref(&mut self) -> PResult<String> {
        Ok(self.resolve(&["variety"])?.0)
    }

    fn bundle_ref(&mut self) -> PResult<String> {
        let (n, span) = self.ident()?;
        if !self.bundles.contains(&n) {
            return Err(self.err_at(span, format!("unknown bundle '{n}'")));
        }
        Ok(n)
    }

    fn item(&mut self) -> PResult<Item> {
        let Tok::Ident(head) = self.peek().tok.clone() else {
            return Err(self.unexpected(&["declaration", "goal", "script"]));
        };
        let item = match head.as_str() {
            "goal" => Item::Goal(self.goal()?),
            "script" => return Ok(Item::Script(self.script()?)),
            _ => Item::Decl(self.declaration()?),
        };
        self.sym(';')?;
        Ok(item)
    }

    fn declaration(&mut self) -> PResult<Declaration> {
        let Tok::Ident(head) = self.peek().tok.clone() else { unreachable!("checked by caller") };
        match head.as_str() {
            "variety" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.kw("dim")?;
                let dim = self.nat()?;
                let mut smooth = true;
                let mut reduced = true;
                loop {
                    if self.eat_kw("smooth") {
                        smooth = true;
                    } else if self.eat_kw("singular") {
                        smooth = false;
                    } else if self.eat_kw("reduced") {
                        reduced = true;
                    } else if self.eat_kw("nonreduced") {
                        reduced = false;
                    } else {
                        break;
                    }
                }
                self.syms.insert(name.clone(), Sym::Variety);
                Ok(Declaration::Variety(VarietyDecl { name, dim, smooth, reduced, factors: None }))
            }
            "product" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.sym('=')?;
                let left = self.variety_ref()?;
                self.kw("x")?;
                let right = self.variety_ref()?;
                self.syms.insert(name.clone(), Sym::Variety);
                Ok(Declaration::Product { name, left, right })
            }
            "bundle" => {
                self.bump();
                let (total, span) = self.ident()?;
                if self.syms.get(&total) != Some(&Sym::Variety) {
                    return Err(self.err_at(span, format!("unknown variety '{total}'")));
                }
                if self.bundles.contains(&total) {
                    return Err(self.err_at(span, format!("duplicate bundle '{total}'")));
                }
                self.kw("over")?;
                let base = self.variety_ref()?;
                self.kw("rank")?;
                let rspan = self.peek().span;
                let rank = self.nat()?;
                if rank == 0 {
                    return Err(self.err_at(rspan, "bundle rank must be positive"));
                }
                self.bundles.push(total.clone());
                Ok(Declaration::Bundle(BundleDecl { total, base, rank, dual: None }))
            }
            "dual" => {
                self.bump();
                let bundle = self.bundle_ref()?;
                let dual = self.bundle_ref()?;
                Ok(Declaration::Dual { bundle, dual })
            }
            "morphism" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.sym(':')?;
                let source = self.variety_ref()?;
                if self.peek().tok != Tok::Arrow {
                    return Err(self.unexpected(&["'->'"]));
                }
                self.bump();
                let target = self.variety_ref()?;
                let mut kinds = Vec::new();
                while !self.at_sym(';') {
                    kinds.push(self.morphism_kind()?);
                }
                self.syms.insert(name.clone(), Sym::Morphism);
                Ok(Declaration::Morphism(MorphismDecl { name, source, target, kinds }))
            }
            "subvariety" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.kw("in")?;
                let ambient = self.variety_ref()?;
                let closed = self.eat_kw("closed");
                let mut reduced = true;
                let mut smooth = true;
                let mut codim = None;
                loop {
                    if self.eat_kw("reduced") {
                        reduced = true;
                    } else if self.eat_kw("nonreduced") {
                        reduced = false;
                    } else if self.eat_kw("smooth") {
                        smooth = true;
                    } else if self.eat_kw("singular") {
                        smooth = false;
                    } else if self.eat_kw("codim") {
                        codim = Some(self.nat()?);
                    } else {
                        break;
                    }
                }
                self.syms.insert(name.clone(), Sym::Subvariety);
                Ok(Declaration::Subvariety(SubvarietyDecl { name, ambient, closed, reduced, smooth, codim }))
            }
            "function" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.kw("on")?;
                let variety = self.variety_ref()?;
                let coordinate = self.eat_kw("coordinate");
                self.syms.insert(name.clone(), Sym::Function);
                Ok(Declaration::Function(FunctionDecl { name, variety, coordinate }))
            }
            "object" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.kw("on")?;
                let variety = self.variety_ref()?;
                self.syms.insert(name.clone(), Sym::Object(variety.clone()));
                Ok(Declaration::Object(ObjectDecl { name, variety }))
            }
            "cartesian" => {
                self.bump();
                let (name, _) = self.fresh_name()?;
                self.sym(':')?;
                let f = self.morphism()?;
                self.sym(',')?;
                let h = self.morphism()?;
                self.sym(',')?;
                let f_prime = self.morphism()?;
                self.sym(',')?;
                let h_prime = self.morphism()?;
                self.syms.insert(name.clone(), Sym::Square);
                Ok(Declaration::Cartesian(CartesianFact { name, f, h, f_prime, h_prime }))
            }
            "identity" => {
                self.bump();
                let id = if self.eat_kw("morphism") {
                    let l = self.morphism()?;
                    self.sym('=')?;
                    Identity::Morphism(l, self.morphism()?)
                } else if self.eat_kw("function") {
                    let l = self.function()?;
                    self.sym('=')?;
                    Identity::Function(l, self.function()?)
                } else if self.eat_kw("subvariety") {
                    let l = self.subvariety()?;
                    self.sym('=')?;
                    Identity::Subvariety(l, self.subvariety()?)
                } else {
                    return Err(self.unexpected(&["'morphism'", "'function'", "'subvariety'"]));
                };
                Ok(Declaration::Identity(id))
            }
            _ => Err(self.unexpected(&[
                "'variety'",
                "'product'",
                "'bundle'",
                "'dual'",
                "'morphism'",
                "'subvariety'",
                "'function'",
                "'object'",
                "'cartesian'",
                "'identity'",
                "'goal'",
                "'script'",
            ])),
        }
    }

    fn morphism_kind(&mut self) -> PResult<MorphismKind> {
        let expected = [
            "'embedding'",
            "'open'",
            "'projection'",
            "'zero'",
            "'section'",
            "'negation'",
            "'linear'",
            "'identity'",
            "'diagonal'",
            "'graph'",
            "'pairing'",
            "'fiberproj'",
            "'factor'",
            "'product'",
            "';'",
        ];
        let Tok::Ident(k) = self.peek().tok.clone() else { return Err(self.unexpected(&expected)) };
        let of_bundle = |p: &mut Self| -> PResult<String> {
            p.kw("of")?;
            p.bundle_ref()
        };
        let kind = match k.as_str() {
            "embedding" => {
                self.bump();
                self.kw("codim")?;
                let codim = self.nat()?;
                let image = if self.eat_kw("image") { Some(self.resolve(&["subvariety"])?.0) } else { None };
                MorphismKind::ClosedEmbedding { codim, image }
            }
            "open" => {
                self.bump();
                MorphismKind::OpenEmbedding
            }
            "projection" => {
                self.bump();
                MorphismKind::Projection(of_bundle(self)?)
            }
            "zero" => {
                self.bump();
                MorphismKind::ZeroSection(of_bundle(self)?)
            }
            "section" => {
                self.bump();
                MorphismKind::Section(of_bundle(self)?)
            }
            "negation" => {
                self.bump();
                MorphismKind::Negation(of_bundle(self)?)
            }
            "pairing" => {
                self.bump();
                MorphismKind::Pairing(of_bundle(self)?)
            }
            "fiberproj" => {
                self.bump();
                MorphismKind::FiberProjection(of_bundle(self)?)
            }
            "linear" => {
                self.bump();
                let transpose = if self.eat_kw("transpose") { Some(self.resolve(&["morphism"])?.0) } else { None };
                MorphismKind::Linear { transpose }
            }
            "identity" => {
                self.bump();
                MorphismKind::Identity
            }
            "diagonal" => {
                self.bump();
                MorphismKind::Diagonal
            }
            "graph" => {
                self.bump();
                self.kw("of")?;
                MorphismKind::Graph(self.morphism()?)
            }
            "factor" => {
                self.bump();
                let span = self.peek().span;
                let index = self.nat()?;
                if !(1..=2).contains(&index) {
                    return Err(self.err_at(span, "factor index must be 1 or 2"));
                }
                self.kw("of")?;
                MorphismKind::Factor { product: self.variety_ref()?, index: index as u8 }
            }
            "product" => {
                self.bump();
                let g = self.morphism()?;
                self.sym(',')?;
                MorphismKind::ProductMap(g, self.morphism()?)
            }
            _ => return Err(self.unexpected(&expected)),
        };
        Ok(kind)
    }

    fn morphism(&mut self) -> PResult<Morphism> {
        let mut m = self.morphism_primary()?;
        while self.at_sym('.') {
            self.bump();
            let r = self.morphism_primary()?;
            m = Morphism::compose(m, r);
        }
        Ok(m)
    }

    fn morphism_primary(&mut self) -> PResult<Morphism> {
        if self.at_sym('(') {
            self.bump();
            let m = self.morphism()?;
            self.sym(')')?;
            return Ok(m);
        }
        if self.eat_kw("id") {
            self.sym('(')?;
            let x = self.variety_ref()?;
            self.sym(')')?;
            return Ok(Morphism::Id(x));
        }
        if self.eat_kw("tr") {
            self.sym('(')?;
            let m = self.morphism()?;
            self.sym(')')?;
            return Ok(Morphism::transpose(m));
        }
        if !matches!(self.peek().tok, Tok::Ident(_)) {
            return Err(self.unexpected(&["morphism"]));
        }
        Ok(Morphism::Atom(self.resolve(&["morphism"])?.0))
    }

    fn function(&mut self) -> PResult<Function> {
        if self.eat_kw("pb") {
            self.sym('(')?;
            let phi = self.function()?;
            self.sym(',')?;
            let m = self.morphism()?;
            self.sym(')')?;
            return Ok(Function::pullback(phi, m));
        }
        if !matches!(self.peek().tok, Tok::Ident(_)) {
            return Err(self.unexpected(&["function"]));
        }
        Ok(Function::Atom(self.resolve(&["function"])?.0))
    }

    fn subvariety(&mut self) -> PResult<Subvariety> {
        let mut s = self.subvariety_primary()?;
        while self.at_sym('&') {
            self.bump();
            let r = self.subvariety_primary()?;
            s = Subvariety::intersection(s, r);
        }
        Ok(s)
    }

    fn subvariety_primary(&mut self) -> PResult<Subvariety> {
        if self.at_sym('(') {
            self.bump();
            let s = self.subvariety()?;
            self.sym(')')?;
            return Ok(s);
        }
        if self.eat_kw("red") {
            self.sym('(')?;
            let s = self.subvariety()?;
            self.sym(')')?;
            return Ok(Subvariety::reduction(s));
        }
        if self.eat_kw("preimage") {
            self.sym('(')?;
            let m = self.morphism()?;
            self.sym(',')?;
            let s = self.subvariety()?;
            self.sym(')')?;
            return Ok(Subvariety::preimage(m, s));
        }
        if !matches!(self.peek().tok, Tok::Ident(_)) {
            return Err(self.unexpected(&["subvariety"]));
        }
        Ok(Subvariety::Atom(self.resolve(&["subvariety"])?.0))
    }

    fn bracketed<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.sym('[')?;
        let v = f(self)?;
        self.sym(']')?;
        Ok(v)
    }

    fn parenthesized(&mut self) -> PResult<DExpr> {
        self.sym('(')?;
        let e = self.expr()?;
        self.sym(')')?;
        Ok(e)
    }

    fn pair(&mut self) -> PResult<(DExpr, DExpr)> {
        self.sym('(')?;
        let a = self.expr()?;
        self.sym(',')?;
        let b = self.expr()?;
        self.sym(')')?;
        Ok((a, b))
    }

    pub(crate) fn expr(&mut self) -> PResult<DExpr> {
        let mut e = self.expr_primary()?;
        while self.at_sym('[') {
            self.bump();
            let k = self.int()?;
            self.sym(']')?;
            e = DExpr::shift(e, k);
        }
        Ok(e)
    }

    fn expr_primary(&mut self) -> PResult<DExpr> {
        let expected = ["expression"];
        if self.at_sym('(') {
            return self.parenthesized();
        }
        let Tok::Ident(head) = self.peek().tok.clone() else { return Err(self.unexpected(&expected)) };
        match head.as_str() {
            "Exp" => {
                self.bump();
                let x = self.bracketed(|p| p.variety_ref())?;
                self.sym('(')?;
                let f = self.function()?;
                self.sym(')')?;
                Ok(DExpr::Exp(x, f))
            }
            "Tensor" => {
                self.bump();
                let (a, b) = self.pair()?;
                Ok(DExpr::tensor(a, b))
            }
            "ETensor" => {
                self.bump();
                let (a, b) = self.pair()?;
                Ok(DExpr::etensor(a, b))
            }
            "Opb" | "Oim" => {
                self.bump();
                let m = self.bracketed(|p| p.morphism())?;
                let e = self.parenthesized()?;
                Ok(if head == "Opb" { DExpr::opb(m, e) } else { DExpr::oim(m, e) })
            }
            "RGamma" => {
                self.bump();
                let s = self.bracketed(|p| p.subvariety())?;
                Ok(DExpr::rgamma(s, self.parenthesized()?))
            }
            "Fourier" => {
                self.bump();
                let b = self.bracketed(|p| p.bundle_ref())?;
                Ok(DExpr::Fourier(b, Box::new(self.parenthesized()?)))
            }
            h if h.starts_with("O_") => {
                let span = self.bump().span;
                let x = &h[2..];
                if self.syms.get(x) != Some(&Sym::Variety) {
                    return Err(self.err_at(span, format!("unknown variety '{x}'")));
                }
                Ok(DExpr::Struct(x.to_string()))
            }
            _ => {
                let (n, s) = self.resolve(&["object"])?;
                let Sym::Object(x) = s else { unreachable!("resolved as object") };
                Ok(DExpr::Var(n, x))
            }
        }
    }

    fn goal(&mut self) -> PResult<Goal> {
        self.kw("goal")?;
        let (name, _) = self.fresh_name()?;
        self.sym(':')?;
        let lhs = self.expr()?;
        self.sym('~')?;
        let rhs = self.expr()?;
        self.goals.push(name.clone());
        Ok(Goal { name, lhs, rhs })
    }

    fn goal_ref(&mut self) -> PResult<String> {
        let (n, span) = self.ident()?;
        if !self.goals.contains(&n) {
            return Err(self.err_at(span, format!("unknown goal '{n}'")));
        }
        Ok(n)
    }

    fn script(&mut self) -> PResult<Script> {
        self.kw("script")?;
        let goal = self.goal_ref()?;
        let mut mode = Mode::Strict;
        let mut strata = 0u8;
        let mut derives = None;
        loop {
            if self.eat_kw("mode") {
                mode = if self.eat_kw("strict") {
                    Mode::Strict
                } else if self.eat_kw("allow_singular") {
                    Mode::AllowSingular
                } else {
                    return Err(self.unexpected(&["'strict'", "'allow_singular'"]));
                };
            } else if self.eat_kw("strata") {
                let span = self.peek().span;
                let k = self.nat()?;
                strata = u8::try_from(k).map_err(|_| self.err_at(span, "strata out of range"))?;
            } else if self.eat_kw("derives") {
                let (r, _) = self.ident()?;
                derives = Some(r);
            } else {
                break;
            }
        }
        self.sym('{')?;
        let mut steps = Vec::new();
        let mut closure = None;
        while !self.at_sym('}') {
            if self.at_kw("kashiwara") {
                let span = self.bump().span;
                if closure.is_some() {
                    return Err(self.err_at(span, "duplicate kashiwara closure"));
                }
                closure = Some(self.morphism()?);
            } else {
                steps.push(self.step()?);
            }
            self.sym(';')?;
        }
        self.sym('}')?;
        Ok(Script { goal, mode, strata, derives, steps, closure })
    }

    fn path(&mut self) -> PResult<Path> {
        match &self.peek().tok {
            Tok::Path(p) => {
                let p = p.clone();
                let span = self.bump().span;
                p.parse().map_err(|e: String| self.err_at(span, e))
            }
            _ => Err(self.unexpected(&["path"])),
        }
    }

    fn direction(&mut self) -> PResult<Direction> {
        if self.eat_kw("fwd") {
            Ok(Direction::Forward)
        } else if self.eat_kw("bwd") {
            Ok(Direction::Backward)
        } else {
            Err(self.unexpected(&["'fwd'", "'bwd'"]))
        }
    }

    fn binding(&mut self) -> PResult<(String, Binding)> {
        let (key, span) = self.ident()?;
        self.sym('=')?;
        let b = match key.as_str() {
            "f" | "g" => Binding::Morphism(self.morphism()?),
            "psi" => Binding::Function(self.function()?),
            "outer" | "inner" | "z" | "sub" => Binding::Subvariety(self.subvariety()?),
            "a" => Binding::Int(self.int()?),
            "bundle" => Binding::Name(self.bundle_ref()?),
            "square" => Binding::Name(self.resolve(&["square"])?.0),
            _ => return Err(self.err_at(span, format!("unknown binding '{key}'"))),
        };
        Ok((key, b))
    }

    fn application(&mut self) -> PResult<Application> {
        let direction = self.direction()?;
        let path = self.path()?;
        let mut bindings = Bindings::new();
        if self.eat_kw("with") {
            loop {
                let (k, b) = self.binding()?;
                bindings.insert(k, b);
                if !self.at_sym(',') {
                    break;
                }
                self.bump();
            }
        }
        Ok(Application { direction, path, bindings })
    }

    fn step(&mut self) -> PResult<ProofStep> {
        if self.eat_kw("conv") {
            return Ok(ProofStep { rule: StepRule::Conv(self.expr()?), applications: vec![] });
        }
        if self.eat_kw("lemma") {
            let name = self.goal_ref()?;
            let app = self.application()?;
            return Ok(ProofStep { rule: StepRule::Lemma(name), applications: vec![app] });
        }
        let (mut id, mut span) = self.ident()?;
        if self.at_sym('.') {
            self.bump();
            let (form, fspan) = self.ident()?;
            if rules().iter().any(|r| r.family() == id) {
                // The family is fine; blame the form.
                span = fspan;
            }
            id = format!("{id}.{form}");
        } else if rule(&id).is_none() && rules().iter().any(|r| r.family() == id) {
            // A family like R19 needs its form; the problem is what follows.
            return Err(self.unexpected(&["'.'"]));
        }
        if rule(&id).is_none() {
            return Err(ParseError {
                message: format!("unknown rule '{id}'"),
                span,
                expected: vec!["rule id".into(), "'conv'".into(), "'lemma'".into(), "'kashiwara'".into()],
            });
        }
        let mut applications = vec![self.application()?];
        while self.eat_kw("and") {
            applications.push(self.application()?);
        }
        Ok(ProofStep { rule: StepRule::Rule(id), applications })
    }
}
