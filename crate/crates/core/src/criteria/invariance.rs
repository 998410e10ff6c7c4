use crate::model::ModelSpec;
use crate::operator::{build_position, f_dot, fresh, reorder_position, reorder_shift, LogDerivative, Placement};
use crate::tensor::{AlgebraError, TensorExpr};

use super::report::{CheckReport, Mode};
use super::CriteriaError;

/// Which identity a transformation has to restore.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// `[x'_i, x'_j] = [x_i, x_j]`.
    Xx,
    /// Reordered and transformed positions agree.
    Reorder(Placement),
}

impl Target {
    pub fn check_name(&self) -> &'static str {
        match self {
            Target::Xx => "xx-invariance",
            Target::Reorder(_) => "reordering",
        }
    }
}

/// `T_kl = F_km (∂_m F_ln) L_n`.
fn t_tensor(model: &ModelSpec, k: &str, l: &str, v: &LogDerivative) -> Result<TensorExpr, AlgebraError> {
    let (m1, m2, n1, n2) = (fresh("m"), fresh("m"), fresh("n"), fresh("n"));
    let lhs = model.f_matrix(k, &m1)?;
    let grad = model.f_matrix(l, &n1)?.derive(&m2)?;
    lhs.mul(&grad)?
        .contract(&m1, &m2)?
        .mul(&v.at(&n2)?)?
        .contract(&n1, &n2)
}

/// `T_ij - T_ji`; `[x'_i, x'_j] - [x_i, x_j] = ħ² (T_ij - T_ji)` for a
/// gradient `L`.
pub fn xx_residual(model: &ModelSpec, v: &LogDerivative) -> Result<TensorExpr, AlgebraError> {
    let t = t_tensor(model, "i", "j", v)?.sub(&t_tensor(model, "j", "i", v)?)?;
    model.pin(&t)
}

/// `shift_i + F_ij L_j`; the reordered position minus the transformed one is
/// `iħ` times this.
pub fn reorder_residual(model: &ModelSpec, placement: &Placement, v: &LogDerivative) -> Result<TensorExpr, AlgebraError> {
    reorder_shift(model, "i", placement)?.add(&f_dot(model, "i", v)?)
}

pub fn residual(model: &ModelSpec, target: &Target, v: &LogDerivative) -> Result<TensorExpr, AlgebraError> {
    match target {
        Target::Xx => xx_residual(model, v),
        Target::Reorder(pl) => reorder_residual(model, pl, v),
    }
}

/// The same difference computed from the operators, before dividing out
/// `ħ²` or `iħ`.
pub fn operator_residual(model: &ModelSpec, target: &Target, v: &LogDerivative) -> Result<TensorExpr, AlgebraError> {
    match target {
        Target::Xx => {
            let xi = build_position(model, "i", Some(v))?;
            let xj = build_position(model, "j", Some(v))?;
            let yi = build_position(model, "i", None)?;
            let yj = build_position(model, "j", None)?;
            let d = xi.commutator(&xj)?.sub(&yi.commutator(&yj)?)?;
            Ok(d.tensor().clone())
        }
        Target::Reorder(pl) => {
            let r = reorder_position(model, "i", pl)?;
            let t = build_position(model, "i", None)?.apply_transform(v)?;
            Ok(r.sub(&t)?.tensor().clone())
        }
    }
}

fn prefactor(target: &Target) -> Result<TensorExpr, AlgebraError> {
    match target {
        Target::Xx => TensorExpr::hbar().pow(2),
        Target::Reorder(_) => Ok(TensorExpr::ihbar()),
    }
}

/// Checks an explicit transformation against a target identity, computing the
/// residual both in closed form and from the operators.
pub fn check_transform(model: &ModelSpec, target: &Target, v: &LogDerivative, mode: &Mode) -> Result<CheckReport, CriteriaError> {
    if !v.is_integrable()? {
        return Err(CriteriaError::NotIntegrable);
    }
    let closed = residual(model, target, v)?;
    let op = operator_residual(model, target, v)?;
    let expected = prefactor(target)?.mul(&closed)?;
    if !mode.is_zero(model, &op.sub(&expected)?)? {
        return Err(CriteriaError::DualPathMismatch(target.check_name().to_string()));
    }
    let reduced = mode.reduce(model, &closed)?;
    Ok(CheckReport::new(model, target.check_name(), mode).with_residual(&reduced)?)
}

/// `[x'_i, x'_j] = [x_i, x_j]` for the transformation with log-derivative `v`.
pub fn check_xx_invariance(model: &ModelSpec, v: &LogDerivative, mode: &Mode) -> Result<CheckReport, CriteriaError> {
    check_transform(model, &Target::Xx, v, mode)
}

/// Whether reordering `q` inside `F` is reproduced by the transformation `v`.
pub fn check_reordering(
    model: &ModelSpec,
    placement: &Placement,
    v: &LogDerivative,
    mode: &Mode,
) -> Result<CheckReport, CriteriaError> {
    check_transform(model, &Target::Reorder(placement.clone()), v, mode)
}
