//! Bundled proof scripts: the Dwork comparison, base change, the projection
//! formula and the Fourier transform identities.

use crate::dsl::{parse_document, DocError, ScriptDocument};
use crate::expr::GeometryContext;
use crate::rewrite::{check_certificate, Mode, ProofCertificate, ValidationReport};

/// Source of each bundled script file.
pub const SOURCES: &[(&str, &str)] = &[
    ("section2", include_str!("../scripts/section2.dwk")),
    ("basechange", include_str!("../scripts/basechange.dwk")),
    ("projection", include_str!("../scripts/projection.dwk")),
    ("fourier", include_str!("../scripts/fourier.dwk")),
];

/// The nine named certificates and the file holding each.
pub const CERTIFICATES: &[(&str, &str)] = &[
    ("C1", "section2"),
    ("C2", "section2"),
    ("C3", "section2"),
    ("C4", "section2"),
    ("C5", "section2"),
    ("C6", "basechange"),
    ("C7", "projection"),
    ("C8", "fourier"),
    ("C9", "fourier"),
];

pub fn source(file: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == file).map(|(_, s)| *s)
}

/// Parses a bundled file. The files are part of the crate, so a parse
/// failure is a bug.
pub fn document(file: &str) -> Option<ScriptDocument> {
    let src = source(file)?;
    Some(parse_document(src).unwrap_or_else(|e| panic!("bundled script {file} does not parse: {e}")))
}

#[derive(Clone, Debug)]
pub struct Builtin {
    pub id: &'static str,
    pub context: GeometryContext,
    pub certificate: ProofCertificate,
}

/// Loads a named certificate together with its context.
pub fn builtin(id: &str) -> Result<Builtin, DocError> {
    let (id, file) = CERTIFICATES
        .iter()
        .find(|(n, _)| *n == id)
        .copied()
        .ok_or_else(|| DocError::NoGoal(id.to_string()))?;
    let doc = document(file).expect("listed file exists");
    Ok(Builtin { id, context: doc.context()?, certificate: doc.certificate(id)? })
}

/// Every named certificate in order.
pub fn builtins() -> Vec<Builtin> {
    CERTIFICATES.iter().map(|(id, _)| builtin(id).expect("bundled certificates load")).collect()
}

/// Replays a bundled certificate, optionally overriding its mode and
/// stratum bound.
pub fn replay(b: &Builtin, mode: Option<Mode>, strata: Option<u8>) -> ValidationReport {
    let mut cert = b.certificate.clone();
    if let Some(m) = mode {
        cert.mode = m;
    }
    if let Some(s) = strata {
        cert.allowed_strata = s;
    }
    check_certificate(&b.context, &cert)
}
