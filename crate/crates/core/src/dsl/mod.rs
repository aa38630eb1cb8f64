//! The `.dwk` script language: declarations, goals and proof scripts.

mod document;
mod lexer;
mod parser;
mod render;
mod report;

pub use document::{DocError, Goal, Item, Script, ScriptDocument};
pub use lexer::{tokenize, SourceSpan, Tok, Token};
pub use parser::{parse_document, ParseError, KEYWORDS};
pub use render::{render_declaration, render_document, render_expr, render_function, render_morphism, render_step, render_subvariety};
pub use report::{render_batch, render_report, Report, ReportFormat, SCHEMA_VERSION};
