//! Side-conditioned rewriting for the functor calculus of D-modules, with a
//! checkable proof format, a script language, and exact rational computations
//! of twisted de Rham cohomology.

pub mod expr;
pub mod rewrite;
pub mod dsl;
pub mod builtin;
pub mod weyl;
