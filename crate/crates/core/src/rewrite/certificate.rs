//! Proof certificates and their independent checker.

use std::collections::BTreeMap;

use crate::expr::{DExpr, GeometryContext, Morphism, Path};

use super::engine::{apply_rule, rule, Bindings, Direction, Mode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub direction: Direction,
    pub path: Path,
    pub bindings: Bindings,
}

impl Application {
    pub fn new(direction: Direction, path: Path) -> Self {
        Application { direction, path, bindings: Bindings::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// A catalogue rule, by id.
    Rule(String),
    /// Use of a hypothesis `lhs ~ rhs`, by name.
    Lemma(String),
    /// Restatement of the current term by a normal-form-equal one.
    Conv(DExpr),
}

/// One proof line: a rule with one or more applications of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: StepRule,
    pub applications: Vec<Application>,
}

impl ProofStep {
    pub fn rule(id: &str, applications: Vec<Application>) -> Self {
        ProofStep { rule: StepRule::Rule(id.to_string()), applications }
    }

    pub fn label(&self) -> String {
        match &self.rule {
            StepRule::Rule(id) => id.clone(),
            StepRule::Lemma(n) => format!("lemma {n}"),
            StepRule::Conv(_) => "conv".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: String,
    pub lhs: DExpr,
    pub rhs: DExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofCertificate {
    pub goal_lhs: DExpr,
    pub goal_rhs: DExpr,
    pub steps: Vec<ProofStep>,
    pub mode: Mode,
    /// Highest rule stratum the proof may use.
    pub allowed_strata: u8,
    /// A rule this proof derives; the proof may not use it.
    pub derives: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    /// Closed embedding `j` when the steps prove `∫j lhs ≅ ∫j rhs`
    /// and the goal follows by Kashiwara's equivalence.
    pub closure: Option<Morphism>,
}

impl ProofCertificate {
    pub fn new(goal_lhs: DExpr, goal_rhs: DExpr) -> Self {
        ProofCertificate {
            goal_lhs,
            goal_rhs,
            steps: Vec::new(),
            mode: Mode::Strict,
            allowed_strata: 0,
            derives: None,
            hypotheses: Vec::new(),
            closure: None,
        }
    }

    /// Catalogue rules used above the given stratum.
    pub fn rules_above(&self, stratum: u8) -> Vec<String> {
        let mut out: Vec<String> = self
            .steps
            .iter()
            .filter_map(|s| match &s.rule {
                StepRule::Rule(id) => rule(id).filter(|r| r.stratum > stratum).map(|r| r.family().to_string()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// 1-based step number.
    pub index: usize,
    pub label: String,
    pub applications: Vec<(Direction, Path)>,
    pub delta: i64,
    pub term: DExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    /// 1-based index of the first failing step; `None` for goal-level failures.
    pub failing_step: Option<usize>,
    pub reason: Option<String>,
    /// Net shift contributed by each step.
    pub shift_ledger: Vec<i64>,
    /// Multiset of rule families (and lemma names) used.
    pub rules_used: BTreeMap<String, usize>,
    pub steps: Vec<StepRecord>,
}

impl Default for ValidationReport {
    /// The report of an empty, valid replay.
    fn default() -> Self {
        ValidationReport {
            valid: true,
            failing_step: None,
            reason: None,
            shift_ledger: Vec::new(),
            rules_used: BTreeMap::new(),
            steps: Vec::new(),
        }
    }
}

impl ValidationReport {
    fn fail(mut self, step: Option<usize>, reason: impl Into<String>) -> Self {
        self.valid = false;
        self.failing_step = step;
        self.reason = Some(reason.into());
        self
    }

    pub fn net_shift(&self) -> i64 {
        self.shift_ledger.iter().sum()
    }
}

fn apply_lemma(
    ctx: &GeometryContext,
    term: &DExpr,
    hyp: &Hypothesis,
    app: &Application,
) -> Result<DExpr, String> {
    let sub = term.subterm(&app.path).ok_or_else(|| format!("no subterm at {}", app.path))?;
    let (from, to) = match app.direction {
        Direction::Forward => (&hyp.lhs, &hyp.rhs),
        Direction::Backward => (&hyp.rhs, &hyp.lhs),
    };
    if !ctx.nf_eq(sub, from) {
        return Err(format!("subterm at {} is not the {} side of {}", app.path, app.direction, hyp.name));
    }
    term.replace_at(&app.path, to.clone()).ok_or_else(|| format!("no subterm at {}", app.path))
}

/// Replays every step and checks side conditions, strata, shifts and the
/// final equality with the goal. Never panics on malformed input.
pub fn check_certificate(ctx: &GeometryContext, cert: &ProofCertificate) -> ValidationReport {
    let report = ValidationReport::default();
    let lv = match ctx.well_formed(&cert.goal_lhs) {
        Ok(v) => v,
        Err(e) => return report.fail(None, format!("goal left side: {e}")),
    };
    let rv = match ctx.well_formed(&cert.goal_rhs) {
        Ok(v) => v,
        Err(e) => return report.fail(None, format!("goal right side: {e}")),
    };
    if lv != rv {
        return report.fail(None, format!("goal sides live on {lv} and {rv}"));
    }
    for h in &cert.hypotheses {
        match (ctx.well_formed(&h.lhs), ctx.well_formed(&h.rhs)) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => return report.fail(None, format!("hypothesis {} is ill-formed", h.name)),
        }
    }
    let mut report = report;
    let (mut cur, target) = match &cert.closure {
        None => (cert.goal_lhs.clone(), cert.goal_rhs.clone()),
        Some(j) => {
            let atom = match ctx.morphism_atoms(j) {
                Ok(n) if n.atoms.len() == 1 && ctx.is_closed_embedding(&n.atoms[0]) => n,
                _ => return report.fail(None, "closure morphism is not a closed embedding"),
            };
            if atom.source != lv {
                return report.fail(None, format!("closure embedding starts at {}, goal lives on {lv}", atom.source));
            }
            if cert.mode == Mode::Strict && !ctx.is_smooth(&atom.source) {
                return report.fail(None, format!("closure needs {} smooth (strict mode)", atom.source));
            }
            *report.rules_used.entry("R9".to_string()).or_default() += 1;
            (DExpr::oim(j.clone(), cert.goal_lhs.clone()), DExpr::oim(j.clone(), cert.goal_rhs.clone()))
        }
    };
    for (i, step) in cert.steps.iter().enumerate() {
        let idx = i + 1;
        let before = cur.total_shift();
        match &step.rule {
            StepRule::Conv(e) => {
                if !ctx.nf_eq(&cur, e) {
                    return report.fail(Some(idx), "conversion target is not equal to the current term");
                }
                cur = e.clone();
            }
            StepRule::Lemma(name) => {
                let Some(h) = cert.hypotheses.iter().find(|h| h.name == *name) else {
                    return report.fail(Some(idx), format!("unknown hypothesis {name}"));
                };
                if step.applications.is_empty() {
                    return report.fail(Some(idx), "step has no application");
                }
                for app in &step.applications {
                    match apply_lemma(ctx, &cur, h, app) {
                        Ok(t) => cur = t,
                        Err(e) => return report.fail(Some(idx), e),
                    }
                }
                *report.rules_used.entry(name.clone()).or_default() += 1;
            }
            StepRule::Rule(id) => {
                let Some(def) = rule(id) else {
                    return report.fail(Some(idx), format!("unknown rule {id}"));
                };
                if def.stratum > cert.allowed_strata {
                    return report.fail(
                        Some(idx),
                        format!("rule {} has stratum {} above the allowed {}", def.id, def.stratum, cert.allowed_strata),
                    );
                }
                if cert.derives.as_deref() == Some(def.family()) {
                    return report.fail(Some(idx), format!("rule {} is the one being derived", def.family()));
                }
                if step.applications.is_empty() {
                    return report.fail(Some(idx), "step has no application");
                }
                for app in &step.applications {
                    match apply_rule(ctx, &cur, def.id, app.direction, &app.path, &app.bindings, cert.mode) {
                        Ok(a) => cur = a.term,
                        Err(e) => return report.fail(Some(idx), e.to_string()),
                    }
                }
                *report.rules_used.entry(def.family().to_string()).or_default() += 1;
            }
        }
        let delta = cur.total_shift() - before;
        report.shift_ledger.push(delta);
        report.steps.push(StepRecord {
            index: idx,
            label: step.label(),
            applications: step.applications.iter().map(|a| (a.direction, a.path.clone())).collect(),
            delta,
            term: cur.clone(),
        });
    }
    if !ctx.nf_eq(&cur, &target) {
        return report.fail(None, "final term does not match the goal");
    }
    if report.net_shift() != cert.goal_rhs.total_shift() - cert.goal_lhs.total_shift() {
        return report.fail(None, "shift ledger does not match the goal");
    }
    report
}
