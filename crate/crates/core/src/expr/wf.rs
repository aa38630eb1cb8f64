//! Well-formedness: every expression lives on a single declared variety.

use thiserror::Error;

use super::context::GeometryContext;
use super::term::{DExpr, Path};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ill-formed at {path}: {reason}")]
pub struct WfError {
    pub path: Path,
    pub reason: String,
}

impl GeometryContext {
    /// Returns the variety the expression lives on.
    pub fn well_formed(&self, e: &DExpr) -> Result<String, WfError> {
        self.wf_at(e, &Path::root())
    }

    fn wf_at(&self, e: &DExpr, path: &Path) -> Result<String, WfError> {
        let fail = |reason: String| WfError { path: path.clone(), reason };
        let need_variety = |x: &str| {
            if self.variety(x).is_some() {
                Ok(x.to_string())
            } else {
                Err(fail(format!("unknown variety '{x}'")))
            }
        };
        match e {
            DExpr::Struct(x) => need_variety(x),
            DExpr::Var(_, x) => need_variety(x),
            DExpr::Exp(x, phi) => {
                need_variety(x)?;
                let v = self.function_variety(phi).map_err(|er| fail(er.to_string()))?;
                if v != *x {
                    return Err(fail(format!("function lives on {v}, not {x}")));
                }
                Ok(x.clone())
            }
            DExpr::Tensor(a, b) => {
                let va = self.wf_at(a, &path.child(0))?;
                let vb = self.wf_at(b, &path.child(1))?;
                if va != vb {
                    return Err(fail(format!("tensor of objects on {va} and {vb}")));
                }
                Ok(va)
            }
            DExpr::ETensor(a, b) => {
                let va = self.wf_at(a, &path.child(0))?;
                let vb = self.wf_at(b, &path.child(1))?;
                self.product_of(&va, &vb)
                    .ok_or_else(|| fail(format!("no declared product {va} x {vb}")))
            }
            DExpr::Opb(f, m) => {
                let v = self.wf_at(m, &path.child(0))?;
                let (s, t) = self.morphism_signature(f).map_err(|er| fail(er.to_string()))?;
                if t != v {
                    return Err(fail(format!("inverse image along a morphism into {t} of an object on {v}")));
                }
                Ok(s)
            }
            DExpr::Oim(f, m) => {
                let v = self.wf_at(m, &path.child(0))?;
                let (s, t) = self.morphism_signature(f).map_err(|er| fail(er.to_string()))?;
                if s != v {
                    return Err(fail(format!("direct image along a morphism from {s} of an object on {v}")));
                }
                Ok(t)
            }
            DExpr::RGamma(s, m) => {
                let v = self.wf_at(m, &path.child(0))?;
                let a = self.subvariety_ambient(s).map_err(|er| fail(er.to_string()))?;
                if a != v {
                    return Err(fail(format!("local cohomology along a subvariety of {a} of an object on {v}")));
                }
                Ok(v)
            }
            DExpr::Fourier(b, m) => {
                let v = self.wf_at(m, &path.child(0))?;
                let bd = self.bundle(b).ok_or_else(|| fail(format!("unknown bundle '{b}'")))?;
                if v != *b {
                    return Err(fail(format!("Fourier transform over {b} of an object on {v}")));
                }
                bd.dual.clone().ok_or_else(|| fail(format!("bundle {b} has no declared dual")))
            }
            DExpr::Shift(m, _) => self.wf_at(m, &path.child(0)),
        }
    }
}
