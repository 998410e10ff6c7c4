//! Recognising the single-anisotropy shapes `f = 1 + ŵf`, `g_i = κ ŵf_i`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::model::ModelSpec;
use crate::number::{real, Rational};
use crate::tensor::{label, AlgebraError, AtomRef, Factor, ScalarAtom, TensorExpr};

/// `ŵ = T_{a1..ad} p_a1 .. p_ad` as a scalar with its degree `d`, so that
/// `ŵ_i = ∂_i ŵ / d`.
#[derive(Clone, Debug)]
pub struct Anisotropy {
    pub degree: u32,
    pub scalar: TensorExpr,
}

impl Anisotropy {
    /// Recognises a scalar polynomial homogeneous in the momentum.
    pub fn from_scalar(e: &TensorExpr) -> Option<Anisotropy> {
        if e.is_empty() || !e.free().is_empty() {
            return None;
        }
        let mut degree = None;
        for m in e.terms() {
            let plain = m.denom.is_empty()
                && m.hbar == 0
                && m.factors.iter().all(|f| matches!(f, Factor::Tensor { .. } | Factor::P(_)));
            let d = m.momentum_count() as u32;
            if !plain || d == 0 || degree.is_some_and(|x| x != d) {
                return None;
            }
            degree = Some(d);
        }
        Some(Anisotropy {
            degree: degree?,
            scalar: e.clone(),
        })
    }

    /// `ŵ_i`.
    pub fn at(&self, i: &str) -> Result<TensorExpr, AlgebraError> {
        Ok(self.scalar.derive(i)?.scale(&real(Rational::one() / Rational::from_integer(self.degree.into()))))
    }

    /// Recognises a vector `g_i = ŵ_i` homogeneous of degree `d - 1`.
    pub fn from_vector(model: &ModelSpec) -> Result<Option<Anisotropy>, AlgebraError> {
        let Some((l, g)) = &model.g else {
            return Ok(None);
        };
        let scalar = g.mul(&TensorExpr::p("#w"))?.contract(l, "#w")?;
        let Some(a) = Anisotropy::from_scalar(&scalar) else {
            return Ok(None);
        };
        Ok(if a.at(l)?.sub(g)?.is_zero()? { Some(a) } else { None })
    }
}

/// `f = 1 + ŵf` and `g_i = κ ŵf_i`.
#[derive(Clone, Debug)]
pub struct KappaStructure {
    pub f: Anisotropy,
    pub kappa: Rational,
}

impl KappaStructure {
    pub fn recognise(model: &ModelSpec) -> Result<Option<KappaStructure>, AlgebraError> {
        if model.h.is_some() {
            return Ok(None);
        }
        let Some(f) = Anisotropy::from_scalar(&model.f.sub(&TensorExpr::one())?) else {
            return Ok(None);
        };
        let Some((l, g)) = &model.g else {
            return Ok(Some(KappaStructure {
                f,
                kappa: Rational::zero(),
            }));
        };
        let wf = f.at(l)?;
        let (Some(gm), Some(fm)) = (g.terms().first(), wf.terms().first()) else {
            return Ok(None);
        };
        if gm.cmp_shape(fm) != std::cmp::Ordering::Equal || !gm.coeff.im.is_zero() || !fm.coeff.im.is_zero() {
            return Ok(None);
        }
        let kappa = &gm.coeff.re / &fm.coeff.re;
        if !g.sub(&wf.scale(&real(kappa.clone())))?.is_zero()? {
            return Ok(None);
        }
        Ok(Some(KappaStructure { f, kappa }))
    }

    pub fn d(&self) -> Rational {
        Rational::from_integer(self.f.degree.into())
    }
}

/// An atom with the given definition, reusing a declared one when possible.
pub fn atom_for(model: &ModelSpec, name: &str, definition: &TensorExpr) -> Result<AtomRef, AlgebraError> {
    let definition = model.pin(definition)?;
    for a in model.symbols.atoms.values() {
        if model.pin(a.definition())?.sub(&definition)?.is_zero()? {
            return Ok(a.clone());
        }
    }
    Ok(AtomRef(Arc::new(ScalarAtom {
        name: label(name),
        definition,
    })))
}

/// Whether an expression has a non-vanishing value at `p = 0`, allowing
/// abstract radial functions.
pub fn invertible_at_origin(e: &TensorExpr) -> bool {
    e.terms()
        .iter()
        .any(|m| m.pp == 0 && m.denom.is_empty() && m.hbar == 0 && m.factors.iter().all(|f| matches!(f, Factor::Radial { .. })))
}
