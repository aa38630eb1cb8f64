//! Parsed script documents.

use thiserror::Error;

use crate::expr::{declare_setup, ContextError, DExpr, Declaration, GeometryContext, Morphism};
use crate::rewrite::{Hypothesis, Mode, ProofCertificate, ProofStep, StepRule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub name: String,
    pub lhs: DExpr,
    pub rhs: DExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    /// Name of the goal it proves.
    pub goal: String,
    pub mode: Mode,
    pub strata: u8,
    pub derives: Option<String>,
    pub steps: Vec<ProofStep>,
    pub closure: Option<Morphism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Decl(Declaration),
    Goal(Goal),
    Script(Script),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptDocument {
    pub items: Vec<Item>,
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("no goal named '{0}'")]
    NoGoal(String),
    #[error("no script for goal '{0}'")]
    NoScript(String),
}

impl ScriptDocument {
    pub fn declarations(&self) -> Vec<&Declaration> {
        self.items
            .iter()
            .filter_map(|i| if let Item::Decl(d) = i { Some(d) } else { None })
            .collect()
    }

    pub fn goals(&self) -> Vec<&Goal> {
        self.items
            .iter()
            .filter_map(|i| if let Item::Goal(g) = i { Some(g) } else { None })
            .collect()
    }

    pub fn scripts(&self) -> Vec<&Script> {
        self.items
            .iter()
            .filter_map(|i| if let Item::Script(s) = i { Some(s) } else { None })
            .collect()
    }

    pub fn goal(&self, name: &str) -> Option<&Goal> {
        self.goals().into_iter().find(|g| g.name == name)
    }

    pub fn context(&self) -> Result<GeometryContext, ContextError> {
        let decls: Vec<Declaration> = self.declarations().into_iter().cloned().collect();
        declare_setup(&decls)
    }

    /// Certificate for the named goal; lemma steps become hypotheses drawn
    /// from the document's other goals.
    pub fn certificate(&self, goal: &str) -> Result<ProofCertificate, DocError> {
        let g = self.goal(goal).ok_or_else(|| DocError::NoGoal(goal.to_string()))?;
        let s = self
            .scripts()
            .into_iter()
            .find(|s| s.goal == goal)
            .ok_or_else(|| DocError::NoScript(goal.to_string()))?;
        let mut hypotheses: Vec<Hypothesis> = Vec::new();
        for step in &s.steps {
            if let StepRule::Lemma(n) = &step.rule {
                let h = self.goal(n).ok_or_else(|| DocError::NoGoal(n.clone()))?;
                if !hypotheses.iter().any(|x| x.name == *n) {
                    hypotheses.push(Hypothesis { name: n.clone(), lhs: h.lhs.clone(), rhs: h.rhs.clone() });
                }
            }
        }
        Ok(ProofCertificate {
            goal_lhs: g.lhs.clone(),
            goal_rhs: g.rhs.clone(),
            steps: s.steps.clone(),
            mode: s.mode,
            allowed_strata: s.strata,
            derives: s.derives.clone(),
            hypotheses,
            closure: s.closure.clone(),
        })
    }
}
