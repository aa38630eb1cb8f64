//! Exact computations on affine space: twisted de Rham cohomology of `e^F`
//! and de Rham cohomology with supports in a zero set.

mod compare;
mod complement;
mod forms;
mod linalg;
mod poly;
mod report;
mod twisted;

pub use compare::{
    base_names, default_d_max, dwork_compare, dwork_function, supports_cohomology, supports_from_complement,
    ComparisonReport, DworkParams, LesNode, SupportsReport,
};
pub use complement::{complement_derham, complement_square_vanishes};
pub use forms::{grade_of, index_sets, wedge_index, IndexSet, LocalizedForm, PolyForm};
pub use linalg::{rank, Columns, Echelon, SparseRow};
pub use poly::{grlex, monomials, Exponent, MultiPoly, PolyError, Rational};
pub use report::{nonzero, CohomologyReport, Dims, Snapshot, WeylError};
pub use twisted::{twisted_cohomology, twisted_level, FormKey, GradeData, TruncatedComplex};
