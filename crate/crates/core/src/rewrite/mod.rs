//! Side-conditioned bidirectional rewriting, proof checking and search.

mod certificate;
mod engine;
mod rules_basic;
mod rules_fourier;
mod search;

pub use certificate::{
    check_certificate, Application, Hypothesis, ProofCertificate, ProofStep, StepRecord, StepRule, ValidationReport,
};
pub use engine::{apply_rule, rule, rules, Applied, Binding, Bindings, Direction, Mode, RuleDef, RuleError};
pub use search::{moves, search_equiv, Move, SearchOptions};
