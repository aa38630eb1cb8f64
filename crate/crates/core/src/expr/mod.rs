//! Formal expressions over a declared geometry.

mod context;
mod normalize;
mod term;
mod wf;

pub use context::{
    declare_setup, BundleDecl, CartesianFact, ContextError, Declaration, FunctionDecl, GeometryContext, Identity,
    MorphismDecl, MorphismKind, ObjectDecl, SubvarietyDecl, VarietyDecl,
};
pub use normalize::{ExprError, NormFn, NormMorph};
pub use term::{DExpr, Function, Morphism, Path, Subvariety};
pub use wf::WfError;
