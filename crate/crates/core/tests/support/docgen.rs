use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use dwork_core::rewrite::rules;

/// Writes a random document whose names all resolve. The parser does not
/// type-check, so expressions only need the right kind of name in each slot.
pub struct Gen {
    rng: StdRng,
    out: String,
    varieties: Vec<String>,
    bundles: Vec<String>,
    morphisms: Vec<String>,
    subvarieties: Vec<String>,
    functions: Vec<String>,
    objects: Vec<String>,
    squares: Vec<String>,
    goals: Vec<String>,
    counter: usize,
}

impl Gen {
    fn new(seed: u64) -> Self {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            out: String::new(),
            varieties: vec![],
            bundles: vec![],
            morphisms: vec![],
            subvarieties: vec![],
            functions: vec![],
            objects: vec![],
            squares: vec![],
            goals: vec![],
            counter: 0,
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        let prime = if self.rng.gen_bool(0.15) { "'" } else { "" };
        format!("{prefix}{}{prime}", self.counter)
    }

    fn pick(&mut self, pool: &[String]) -> String {
        pool.choose(&mut self.rng).cloned().expect("nonempty pool")
    }

    /// Separator between tokens: usually a space, sometimes more.
    fn sep(&mut self) -> &'static str {
        match self.rng.gen_range(0..12) {
            0 => "  ",
            1 => "\n   ",
            _ => " ",
        }
    }

    fn morphism(&mut self, depth: u32) -> String {
        let v = self.varieties.clone();
        let m = self.morphisms.clone();
        match self.rng.gen_range(0..6) {
            0 | 1 if !m.is_empty() => self.pick(&m),
            2 if depth > 0 => {
                let a = self.morphism(depth - 1);
                let b = self.morphism(depth - 1);
                if self.rng.gen_bool(0.5) {
                    format!("{a}.({b})")
                } else {
                    format!("({a}).{b}")
                }
            }
            3 if depth > 0 => format!("tr({})", self.morphism(depth - 1)),
            _ => format!("id({})", self.pick(&v)),
        }
    }

    fn subvariety(&mut self, depth: u32) -> String {
        let s = self.subvarieties.clone();
        match self.rng.gen_range(0..5) {
            0 if depth > 0 => format!("red({})", self.subvariety(depth - 1)),
            1 if depth > 0 => format!("{} & ({})", self.subvariety(depth - 1), self.subvariety(depth - 1)),
            2 if depth > 0 => format!("preimage({}, {})", self.morphism(1), self.subvariety(depth - 1)),
            _ => self.pick(&s),
        }
    }

    fn function(&mut self, depth: u32) -> String {
        let f = self.functions.clone();
        if depth > 0 && self.rng.gen_bool(0.3) {
            format!("pb({}, {})", self.function(depth - 1), self.morphism(1))
        } else {
            self.pick(&f)
        }
    }

    fn expr(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        let e = if leaf {
            let objs = self.objects.clone();
            if !objs.is_empty() && self.rng.gen_bool(0.5) {
                self.pick(&objs)
            } else {
                let v = self.varieties.clone();
                format!("O_{}", self.pick(&v))
            }
        } else {
            let d = depth - 1;
            match self.rng.gen_range(0..8) {
                0 if !self.functions.is_empty() => {
                    let v = self.varieties.clone();
                    let x = self.pick(&v);
                    format!("Exp[{x}]({})", self.function(2))
                }
                1 => format!("Tensor({},{}{})", self.expr(d), self.sep(), self.expr(d)),
                2 => format!("ETensor({}, {})", self.expr(d), self.expr(d)),
                3 => format!("Opb[{}]({})", self.morphism(2), self.expr(d)),
                4 => format!("Oim[{}]({})", self.morphism(2), self.expr(d)),
                5 if !self.subvarieties.is_empty() => format!("RGamma[{}]({})", self.subvariety(2), self.expr(d)),
                6 if !self.bundles.is_empty() => {
                    let b = self.bundles.clone();
                    format!("Fourier[{}]({})", self.pick(&b), self.expr(d))
                }
                _ => format!("({})", self.expr(d)),
            }
        };
        if self.rng.gen_bool(0.2) {
            format!("{e}[{}]", self.rng.gen_range(-3..4))
        } else {
            e
        }
    }

    fn line(&mut self, text: String) {
        self.out.push_str(&text);
        self.out.push_str(";\n");
        if self.rng.gen_bool(0.1) {
            self.out.push_str("# a comment; with punctuation [1]\n");
        }
    }

    fn declarations(&mut self) {
        for _ in 0..self.rng.gen_range(1..5) {
            let n = self.fresh("X");
            let dim = self.rng.gen_range(0..6);
            let flags = [["", " smooth", " singular"], ["", " reduced", " nonreduced"]];
            let a = flags[0][self.rng.gen_range(0..3)];
            let b = flags[1][self.rng.gen_range(0..3)];
            self.line(format!("variety {n} dim {dim}{a}{b}"));
            self.varieties.push(n);
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let n = self.fresh("P");
            let v = self.varieties.clone();
            let (a, b) = (self.pick(&v), self.pick(&v));
            self.line(format!("product {n} = {a} x {b}"));
            self.varieties.push(n);
        }
        let mut totals = self.varieties.clone();
        totals.shuffle(&mut self.rng);
        for total in totals.into_iter().take(self.rng.gen_range(0..3)) {
            let v = self.varieties.clone();
            let base = self.pick(&v);
            let rank = self.rng.gen_range(1..4);
            self.line(format!("bundle {total} over {base} rank {rank}"));
            self.bundles.push(total);
        }
        if self.bundles.len() >= 2 {
            self.line(format!("dual {} {}", self.bundles[0], self.bundles[1]));
        }
        for _ in 0..self.rng.gen_range(0..4) {
            let n = self.fresh("S");
            let v = self.varieties.clone();
            let amb = self.pick(&v);
            let mut s = format!("subvariety {n} in {amb}");
            if self.rng.gen_bool(0.5) {
                s.push_str(" closed");
            }
            for flag in ["reduced", "nonreduced", "smooth", "singular"] {
                if self.rng.gen_bool(0.3) {
                    s.push(' ');
                    s.push_str(flag);
                }
            }
            if self.rng.gen_bool(0.5) {
                s.push_str(&format!(" codim {}", self.rng.gen_range(0..3)));
            }
            self.line(s);
            self.subvarieties.push(n);
        }
        for _ in 0..self.rng.gen_range(0..5) {
            let n = self.fresh("m");
            let v = self.varieties.clone();
            let (src, tgt) = (self.pick(&v), self.pick(&v));
            let mut s = format!("morphism {n} : {src} -> {tgt}");
            for _ in 0..self.rng.gen_range(0..3) {
                s.push(' ');
                s.push_str(&self.kind());
            }
            self.line(s);
            self.morphisms.push(n);
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let n = self.fresh("phi");
            let v = self.varieties.clone();
            let x = self.pick(&v);
            let c = if self.rng.gen_bool(0.3) { " coordinate" } else { "" };
            self.line(format!("function {n} on {x}{c}"));
            self.functions.push(n);
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let n = self.fresh("M");
            let v = self.varieties.clone();
            let x = self.pick(&v);
            self.line(format!("object {n} on {x}"));
            self.objects.push(n);
        }
        for _ in 0..self.rng.gen_range(0..2) {
            let n = self.fresh("sq");
            let ms: Vec<String> = (0..4).map(|_| self.morphism(1)).collect();
            self.line(format!("cartesian {n} : {}", ms.join(", ")));
            self.squares.push(n);
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let s = match self.rng.gen_range(0..3) {
                0 => format!("identity morphism {} = {}", self.morphism(2), self.morphism(2)),
                1 if !self.functions.is_empty() => {
                    format!("identity function {} = {}", self.function(2), self.function(2))
                }
                _ if !self.subvarieties.is_empty() => {
                    format!("identity subvariety {} = {}", self.subvariety(2), self.subvariety(2))
                }
                _ => format!("identity morphism {} = {}", self.morphism(1), self.morphism(1)),
            };
            self.line(s);
        }
    }

    fn kind(&mut self) -> String {
        let v = self.varieties.clone();
        let b = self.bundles.clone();
        let s = self.subvarieties.clone();
        let m = self.morphisms.clone();
        let of_bundle = ["projection", "zero", "section", "negation", "pairing", "fiberproj"];
        match self.rng.gen_range(0..9) {
            0 => {
                let c = self.rng.gen_range(0..3);
                if !s.is_empty() && self.rng.gen_bool(0.5) {
                    format!("embedding codim {c} image {}", self.pick(&s))
                } else {
                    format!("embedding codim {c}")
                }
            }
            1 if !b.is_empty() => format!("{} of {}", of_bundle.choose(&mut self.rng).unwrap(), self.pick(&b)),
            2 if !m.is_empty() => format!("linear transpose {}", self.pick(&m)),
            3 => "graph of ".to_string() + &self.morphism(1),
            4 => format!("factor {} of {}", self.rng.gen_range(1..3), self.pick(&v)),
            5 => format!("product {}, {}", self.morphism(1), self.morphism(1)),
            6 => "open".into(),
            7 => "diagonal".into(),
            _ => ["identity", "linear"].choose(&mut self.rng).unwrap().to_string(),
        }
    }

    fn path(&mut self) -> String {
        let n = self.rng.gen_range(0..4);
        if n == 0 {
            return "/".into();
        }
        (0..n).map(|_| format!("/{}", self.rng.gen_range(0..3))).collect()
    }

    fn application(&mut self) -> String {
        let dir = if self.rng.gen_bool(0.5) { "fwd" } else { "bwd" };
        let mut s = format!("{dir} {}", self.path());
        let mut bs = Vec::new();
        for key in ["f", "g", "psi", "outer", "inner", "a", "bundle", "square"] {
            if !self.rng.gen_bool(0.12) {
                continue;
            }
            let val = match key {
                "f" | "g" => self.morphism(2),
                "psi" if !self.functions.is_empty() => self.function(2),
                "outer" | "inner" if !self.subvarieties.is_empty() => self.subvariety(2),
                "a" => self.rng.gen_range(-4..5).to_string(),
                "bundle" if !self.bundles.is_empty() => {
                    let b = self.bundles.clone();
                    self.pick(&b)
                }
                "square" if !self.squares.is_empty() => {
                    let q = self.squares.clone();
                    self.pick(&q)
                }
                _ => continue,
            };
            bs.push(format!("{key} = {val}"));
        }
        if !bs.is_empty() {
            s.push_str(" with ");
            s.push_str(&bs.join(", "));
        }
        s
    }

    fn goals_and_scripts(&mut self) {
        let ids: Vec<&str> = rules().iter().map(|r| r.id).collect();
        for _ in 0..self.rng.gen_range(0..4) {
            let n = self.fresh("G");
            let (l, r) = (self.expr(3), self.expr(3));
            self.line(format!("goal {n} : {l} ~ {r}"));
            self.goals.push(n.clone());
            if !self.rng.gen_bool(0.7) {
                continue;
            }
            let mut head = format!("script {n}");
            if self.rng.gen_bool(0.5) {
                head.push_str(if self.rng.gen_bool(0.5) { " mode strict" } else { " mode allow_singular" });
            }
            if self.rng.gen_bool(0.5) {
                head.push_str(&format!(" strata {}", self.rng.gen_range(0..3)));
            }
            if self.rng.gen_bool(0.2) {
                head.push_str(" derives R14");
            }
            self.out.push_str(&head);
            self.out.push_str(" {\n");
            for _ in 0..self.rng.gen_range(0..6) {
                let step = match self.rng.gen_range(0..8) {
                    0 => format!("conv {}", self.expr(2)),
                    1 => {
                        let g = self.goals.clone();
                        format!("lemma {} {}", self.pick(&g), self.application())
                    }
                    _ => {
                        let id = ids.choose(&mut self.rng).unwrap().to_string();
                        let apps: Vec<String> = (0..self.rng.gen_range(1..3)).map(|_| self.application()).collect();
                        format!("{id} {}", apps.join(" and "))
                    }
                };
                self.out.push_str(&format!("  {step};\n"));
            }
            if self.rng.gen_bool(0.3) {
                let k = format!("  kashiwara {};\n", self.morphism(1));
                self.out.push_str(&k);
            }
            self.out.push_str("}\n");
        }
    }
}

pub fn generate(seed: u64) -> String {
    let mut g = Gen::new(seed);
    g.declarations();
    g.goals_and_scripts();
    g.out
}
