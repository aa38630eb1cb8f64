//! Term language: morphisms, subvarieties, functions and D-module expressions.

use std::fmt;
use std::str::FromStr;

/// A morphism between declared varieties.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Morphism {
    Atom(String),
    /// Identity of the named variety.
    Id(String),
    /// `Compose(outer, inner)` is `outer ∘ inner`.
    Compose(Box<Morphism>, Box<Morphism>),
    Transpose(Box<Morphism>),
}

impl Morphism {
    pub fn atom(name: &str) -> Self {
        Morphism::Atom(name.to_string())
    }

    pub fn id(variety: &str) -> Self {
        Morphism::Id(variety.to_string())
    }

    pub fn compose(outer: Morphism, inner: Morphism) -> Self {
        Morphism::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn transpose(m: Morphism) -> Self {
        Morphism::Transpose(Box::new(m))
    }

    /// Builds a composite from atoms listed in application order
    /// (first applied first). Empty sequences become the identity on `source`.
    pub fn from_atoms(atoms: &[String], source: &str) -> Self {
        let mut iter = atoms.iter();
        let Some(first) = iter.next() else {
            return Morphism::id(source);
        };
        iter.fold(Morphism::Atom(first.clone()), |acc, a| {
            Morphism::compose(Morphism::Atom(a.clone()), acc)
        })
    }
}

/// A closed subvariety expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subvariety {
    Atom(String),
    Reduction(Box<Subvariety>),
    Intersection(Box<Subvariety>, Box<Subvariety>),
    Preimage(Morphism, Box<Subvariety>),
}

impl Subvariety {
    pub fn atom(name: &str) -> Self {
        Subvariety::Atom(name.to_string())
    }

    pub fn reduction(s: Subvariety) -> Self {
        Subvariety::Reduction(Box::new(s))
    }

    pub fn intersection(a: Subvariety, b: Subvariety) -> Self {
        Subvariety::Intersection(Box::new(a), Box::new(b))
    }

    pub fn preimage(f: Morphism, z: Subvariety) -> Self {
        Subvariety::Preimage(f, Box::new(z))
    }
}

/// A regular function on a declared variety.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Function {
    Atom(String),
    /// `Pullback(phi, f)` is `phi ∘ f`.
    Pullback(Box<Function>, Morphism),
}

impl Function {
    pub fn atom(name: &str) -> Self {
        Function::Atom(name.to_string())
    }

    pub fn pullback(phi: Function, f: Morphism) -> Self {
        Function::Pullback(Box::new(phi), f)
    }
}

/// Formal object of the bounded derived category of D-modules on a variety.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DExpr {
    /// Structure sheaf `O_X`.
    Struct(String),
    /// Exponential module `D_X e^φ`.
    Exp(String, Function),
    Tensor(Box<DExpr>, Box<DExpr>),
    /// Exterior tensor product, living on the declared product variety.
    ETensor(Box<DExpr>, Box<DExpr>),
    /// Inverse image `f†`.
    Opb(Morphism, Box<DExpr>),
    /// Direct image `∫f`.
    Oim(Morphism, Box<DExpr>),
    RGamma(Subvariety, Box<DExpr>),
    /// Fourier–Laplace transform over the named bundle.
    Fourier(String, Box<DExpr>),
    Shift(Box<DExpr>, i64),
    /// Generic object `(name, variety)`.
    Var(String, String),
}

impl DExpr {
    pub fn structure(x: &str) -> Self {
        DExpr::Struct(x.to_string())
    }

    pub fn var(name: &str, x: &str) -> Self {
        DExpr::Var(name.to_string(), x.to_string())
    }

    pub fn exp(x: &str, phi: Function) -> Self {
        DExpr::Exp(x.to_string(), phi)
    }

    pub fn tensor(a: DExpr, b: DExpr) -> Self {
        DExpr::Tensor(Box::new(a), Box::new(b))
    }

    pub fn etensor(a: DExpr, b: DExpr) -> Self {
        DExpr::ETensor(Box::new(a), Box::new(b))
    }

    pub fn opb(f: Morphism, m: DExpr) -> Self {
        DExpr::Opb(f, Box::new(m))
    }

    pub fn oim(f: Morphism, m: DExpr) -> Self {
        DExpr::Oim(f, Box::new(m))
    }

    pub fn rgamma(s: Subvariety, m: DExpr) -> Self {
        DExpr::RGamma(s, Box::new(m))
    }

    pub fn fourier(bundle: &str, m: DExpr) -> Self {
        DExpr::Fourier(bundle.to_string(), Box::new(m))
    }

    pub fn shift(m: DExpr, k: i64) -> Self {
        DExpr::Shift(Box::new(m), k)
    }

    /// `m[k]`, merging with an outer shift of `m` and dropping zero shifts.
    pub fn shifted(m: DExpr, k: i64) -> Self {
        match m {
            DExpr::Shift(inner, j) => DExpr::shifted(*inner, j + k),
            other if k == 0 => other,
            other => DExpr::shift(other, k),
        }
    }

    pub fn children(&self) -> Vec<&DExpr> {
        match self {
            DExpr::Struct(_) | DExpr::Exp(..) | DExpr::Var(..) => vec![],
            DExpr::Tensor(a, b) | DExpr::ETensor(a, b) => vec![a, b],
            DExpr::Opb(_, m)
            | DExpr::Oim(_, m)
            | DExpr::RGamma(_, m)
            | DExpr::Fourier(_, m)
            | DExpr::Shift(m, _) => vec![m],
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut DExpr> {
        match (self, i) {
            (DExpr::Tensor(a, _) | DExpr::ETensor(a, _), 0) => Some(a),
            (DExpr::Tensor(_, b) | DExpr::ETensor(_, b), 1) => Some(b),
            (
                DExpr::Opb(_, m)
                | DExpr::Oim(_, m)
                | DExpr::RGamma(_, m)
                | DExpr::Fourier(_, m)
                | DExpr::Shift(m, _),
                0,
            ) => Some(m),
            _ => None,
        }
    }

    pub fn subterm(&self, path: &Path) -> Option<&DExpr> {
        let mut cur = self;
        for &i in &path.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Returns a copy with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &Path, new: DExpr) -> Option<DExpr> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in &path.0 {
            cur = cur.child_mut(i)?;
        }
        *cur = new;
        Some(out)
    }

    /// Every valid path, in preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn walk(e: &DExpr, prefix: &mut Vec<usize>, out: &mut Vec<Path>) {
            out.push(Path(prefix.clone()));
            for (i, c) in e.children().into_iter().enumerate() {
                prefix.push(i);
                walk(c, prefix, out);
                prefix.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Sum of all shift amounts in the term. Every functor here commutes with
    /// shifts, so this is the net shift of the object.
    pub fn total_shift(&self) -> i64 {
        let own = if let DExpr::Shift(_, k) = self { *k } else { 0 };
        own + self.children().iter().map(|c| c.total_shift()).sum::<i64>()
    }

    /// Splits the term into a shift-free core and the total shift.
    pub fn float_shifts(&self) -> (DExpr, i64) {
        match self {
            DExpr::Shift(m, k) => {
                let (core, j) = m.float_shifts();
                (core, j + k)
            }
            DExpr::Struct(_) | DExpr::Exp(..) | DExpr::Var(..) => (self.clone(), 0),
            DExpr::Tensor(a, b) | DExpr::ETensor(a, b) => {
                let (ca, ka) = a.float_shifts();
                let (cb, kb) = b.float_shifts();
                let node = if matches!(self, DExpr::Tensor(..)) {
                    DExpr::tensor(ca, cb)
                } else {
                    DExpr::etensor(ca, cb)
                };
                (node, ka + kb)
            }
            DExpr::Opb(f, m) => {
                let (c, k) = m.float_shifts();
                (DExpr::opb(f.clone(), c), k)
            }
            DExpr::Oim(f, m) => {
                let (c, k) = m.float_shifts();
                (DExpr::oim(f.clone(), c), k)
            }
            DExpr::RGamma(s, m) => {
                let (c, k) = m.float_shifts();
                (DExpr::rgamma(s.clone(), c), k)
            }
            DExpr::Fourier(b, m) => {
                let (c, k) = m.float_shifts();
                (DExpr::fourier(b, c), k)
            }
        }
    }
}

/// Child-index address of a subterm; the root is `/`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    /// `prefix` followed by this path.
    pub fn under(&self, prefix: &Path) -> Self {
        let mut v = prefix.0.clone();
        v.extend_from_slice(&self.0);
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "/" {
            return Ok(Path::root());
        }
        let rest = s
            .strip_prefix('/')
            .ok_or_else(|| format!("path must start with '/': {s}"))?;
        rest.split('/')
            .map(|p| p.parse::<usize>().map_err(|_| format!("bad path segment '{p}'")))
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}
