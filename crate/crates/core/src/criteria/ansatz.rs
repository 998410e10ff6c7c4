use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::number::Rational;
use crate::operator::LogDerivative;
use crate::tensor::{label, AlgebraError, AtomRef, Label, ScalarAtom, TensorExpr, TensorSymbol};

/// A family of candidate transformations `C(p)`, described through
/// `L_j = ∂_j ln C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformAnsatz {
    pub name: String,
    pub kind: AnsatzKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnsatzKind {
    /// Explicit log-derivative `L[index] = value`.
    LogDerivative { index: Label, value: TensorExpr },
    /// `C = Π atom^n`, with each exponent `n` unknown.
    Power { exponents: Vec<(Arc<TensorSymbol>, AtomRef)> },
    /// `C = 1 + Σ k * basis`, with each coefficient `k` unknown.
    Poly { coefficients: Vec<(Arc<TensorSymbol>, TensorExpr)> },
}

impl TransformAnsatz {
    pub fn unknowns(&self) -> Vec<Arc<TensorSymbol>> {
        match &self.kind {
            AnsatzKind::LogDerivative { .. } => Vec::new(),
            AnsatzKind::Power { exponents } => exponents.iter().map(|(k, _)| k.clone()).collect(),
            AnsatzKind::Poly { coefficients } => coefficients.iter().map(|(k, _)| k.clone()).collect(),
        }
    }
}

impl TransformAnsatz {
    /// `L_idx` of the family, with unknowns left symbolic.
    pub fn log_derivative(&self, idx: &str) -> Result<LogDerivative, AlgebraError> {
        match &self.kind {
            AnsatzKind::LogDerivative { index, value } => LogDerivative::new(idx, value.rename(index, idx)?),
            AnsatzKind::Power { exponents } => {
                let mut l = TensorExpr::zero([label(idx)].into_iter().collect());
                for (n, atom) in exponents {
                    let term = TensorExpr::tensor(n, &[])?
                        .mul(&atom.definition().derive(idx)?)?
                        .mul(&TensorExpr::inverse_atom(atom, 1)?)?;
                    l = l.add(&term)?;
                }
                LogDerivative::new(idx, l)
            }
            AnsatzKind::Poly { .. } => {
                let c = self.poly_atom()?;
                let l = c.definition().derive(idx)?.mul(&TensorExpr::inverse_atom(&c, 1)?)?;
                LogDerivative::new(idx, l)
            }
        }
    }

    /// `C = 1 + Σ k * basis` as a scalar atom.
    fn poly_atom(&self) -> Result<AtomRef, AlgebraError> {
        let AnsatzKind::Poly { coefficients } = &self.kind else {
            return Err(AlgebraError::IllFormed("not a polynomial ansatz".into()));
        };
        let mut def = TensorExpr::one();
        for (k, basis) in coefficients {
            def = def.add(&TensorExpr::tensor(k, &[])?.mul(basis)?)?;
        }
        Ok(AtomRef(Arc::new(ScalarAtom {
            name: label("C"),
            definition: def,
        })))
    }

    /// `L_idx` with the unknowns replaced by `values`; missing ones are zero.
    pub fn instantiate(&self, idx: &str, values: &BTreeMap<String, Rational>) -> Result<LogDerivative, AlgebraError> {
        let mut l = self.log_derivative(idx)?.value;
        for k in self.unknowns() {
            let v = values.get(&*k.name).cloned().unwrap_or_else(Rational::zero);
            l = l.substitute(&k.name, &TensorExpr::rational(v), &[])?;
        }
        LogDerivative::new(idx, l)
    }
}
