//! Dimension tables and their truncation history.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::poly::PolyError;

/// Cohomological degree to dimension.
pub type Dims = BTreeMap<usize, usize>;

/// Entries with nonzero dimension.
pub fn nonzero(d: &Dims) -> Dims {
    d.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (*k, *v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    /// Coefficient degree bound of the truncation.
    pub degree: u32,
    /// Pole order bound, for localized complexes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_order: Option<u32>,
    pub dims: Dims,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub dims: Dims,
    pub stabilized: bool,
    pub window: usize,
    pub truncation_trace: Vec<Snapshot>,
}

impl CohomologyReport {
    /// Folds snapshots until the last `window` agree. `next` yields `None`
    /// once the caps are exhausted.
    pub(crate) fn run(window: usize, mut next: impl FnMut(usize) -> Option<Result<Snapshot, WeylError>>) -> Result<Self, WeylError> {
        let mut trace: Vec<Snapshot> = Vec::new();
        let mut i = 0;
        while let Some(s) = next(i) {
            trace.push(s?);
            i += 1;
            if trace.len() >= window && trace[trace.len() - window..].windows(2).all(|w| w[0].dims == w[1].dims) {
                let dims = trace.last().expect("nonempty").dims.clone();
                return Ok(CohomologyReport { dims, stabilized: true, window, truncation_trace: trace });
            }
        }
        let dims = trace.last().map(|s| s.dims.clone()).unwrap_or_default();
        Ok(CohomologyReport { dims, stabilized: false, window, truncation_trace: trace })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("polynomial is constant: {0}")]
    Constant(String),
    #[error("polynomial is zero")]
    Zero,
    #[error("window must be at least 2, got {0}")]
    Window(usize),
    #[error("need at least one polynomial")]
    Empty,
    #[error("polynomials must share {expected} variables, got {got}")]
    Variables { expected: usize, got: usize },
    #[error("too many variables ({0}); at most 16 are supported")]
    TooManyVariables(usize),
    #[error(transparent)]
    Parse(#[from] PolyError),
}
