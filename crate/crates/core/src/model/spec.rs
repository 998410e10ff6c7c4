use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::sync::Arc;

use super::{parse_expr, ParseError};
use crate::criteria::{AnsatzKind, TransformAnsatz};
use crate::tensor::{label, render_expr, AlgebraError, AtomRef, Label, TensorExpr, TensorSymbol};

/// Declared names visible to expressions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub tensors: BTreeMap<String, Arc<TensorSymbol>>,
    pub radials: BTreeSet<String>,
    pub atoms: BTreeMap<String, AtomRef>,
}

impl SymbolTable {
    pub fn is_declared(&self, name: &str) -> bool {
        self.tensors.contains_key(name) || self.radials.contains(name) || self.atoms.contains_key(name)
    }
}

/// A deformed-algebra model `[x_i, p_j] = iħ F_ij` with
/// `F_ij = f δ_ij + g_i p_j + p_i h_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: String,
    /// Spatial dimension; `None` keeps it symbolic.
    pub dim: Option<u32>,
    pub symbols: SymbolTable,
    pub f: TensorExpr,
    pub g: Option<(Label, TensorExpr)>,
    pub h: Option<(Label, TensorExpr)>,
    /// Declared transformation families; the first one is the default.
    pub ansatze: Vec<TransformAnsatz>,
}

fn vector_at(v: &Option<(Label, TensorExpr)>, idx: &str) -> Result<TensorExpr, AlgebraError> {
    match v {
        Some((l, e)) => e.rename(l, idx),
        None => Ok(TensorExpr::zero([label(idx)].into_iter().collect())),
    }
}

impl ModelSpec {
    /// `g_idx`, zero when absent.
    pub fn g_at(&self, idx: &str) -> Result<TensorExpr, AlgebraError> {
        vector_at(&self.g, idx)
    }

    /// `h_idx`, zero when absent.
    pub fn h_at(&self, idx: &str) -> Result<TensorExpr, AlgebraError> {
        vector_at(&self.h, idx)
    }

    /// `F_ij = f δ_ij + g_i p_j + p_i h_j`.
    pub fn f_matrix(&self, i: &str, j: &str) -> Result<TensorExpr, AlgebraError> {
        let fd = self.f.mul(&TensorExpr::delta(i, j)?)?;
        let gp = self.g_at(i)?.mul(&TensorExpr::p(j))?;
        let ph = TensorExpr::p(i).mul(&self.h_at(j)?)?;
        fd.add(&gp)?.add(&ph)
    }

    pub fn parse_expr(&self, text: &str) -> Result<TensorExpr, ParseError> {
        parse_expr(text, &self.symbols)
    }

    pub fn ansatz(&self, name: &str) -> Option<&TransformAnsatz> {
        self.ansatze.iter().find(|a| a.name == name)
    }

    pub fn default_ansatz(&self) -> Option<&TransformAnsatz> {
        self.ansatze.first()
    }

    /// Replaces the symbolic dimension by the declared one, if any.
    pub fn pin(&self, e: &TensorExpr) -> Result<TensorExpr, AlgebraError> {
        match self.dim {
            Some(n) => e.pin_dim(n),
            None => Ok(e.clone()),
        }
    }

    pub fn with_dim(&self, dim: Option<u32>) -> ModelSpec {
        ModelSpec { dim, ..self.clone() }
    }
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

/// Renders a model in the DSL accepted by [`super::parse_model`].
pub fn render_model(m: &ModelSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", quote(&m.name));
    if let Some(d) = m.dim {
        let _ = writeln!(out, "  dim {d}");
    }
    for t in m.symbols.tensors.values() {
        let _ = write!(out, "  tensor {} rank {}", t.name, t.rank);
        if t.symmetric {
            out.push_str(" symmetric");
        }
        let _ = writeln!(out, " order {}", t.grading);
    }
    for r in &m.symbols.radials {
        let _ = writeln!(out, "  radial {r}");
    }
    for a in m.symbols.atoms.values() {
        let _ = writeln!(out, "  scalaratom {} = {}", a.name(), render_expr(a.definition()));
    }
    let _ = writeln!(out, "  f = {}", render_expr(&m.f));
    if let Some((l, e)) = &m.g {
        let _ = writeln!(out, "  g[{l}] = {}", render_expr(e));
    }
    if let Some((l, e)) = &m.h {
        let _ = writeln!(out, "  h[{l}] = {}", render_expr(e));
    }
    for a in &m.ansatze {
        let _ = write!(out, "  ansatz {} ", quote(&a.name));
        match &a.kind {
            AnsatzKind::LogDerivative { index, value } => {
                let _ = writeln!(out, "logderiv[{index}] = {}", render_expr(value));
            }
            AnsatzKind::Power { exponents } => {
                let parts: Vec<String> = exponents.iter().map(|(k, s)| format!("{}: {}", k.name, s.name())).collect();
                let _ = writeln!(out, "power({})", parts.join(", "));
            }
            AnsatzKind::Poly { coefficients } => {
                let parts: Vec<String> = coefficients
                    .iter()
                    .map(|(k, e)| format!("{}: {}", k.name, render_expr(e)))
                    .collect();
                let _ = writeln!(out, "poly({})", parts.join(", "));
            }
        }
    }
    out.push_str("}\n");
    out
}
