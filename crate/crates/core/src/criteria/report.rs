use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::ModelSpec;
use crate::tensor::{AlgebraError, Grading, TensorExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    Solved,
    NoSolution,
}

impl Status {
    pub fn is_success(self) -> bool {
        matches!(self, Status::Holds | Status::Solved)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Solved => "solved",
            Status::NoSolution => "no-solution",
        })
    }
}

/// Exact comparison or truncation in the anisotropy grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Order(u32),
    /// Truncate at the largest declared tensor grading, so the heaviest
    /// anisotropy is kept to first order and lighter ones proportionally
    /// further.
    Mixed,
}

impl Mode {
    pub fn order(&self, model: &ModelSpec) -> Option<u32> {
        match self {
            Mode::Exact => None,
            Mode::Order(k) => Some(*k),
            Mode::Mixed => Some(model.symbols.tensors.values().map(|t| t.grading).max().unwrap_or(0)),
        }
    }

    pub fn label(&self, model: &ModelSpec) -> String {
        match (self, self.order(model)) {
            (Mode::Mixed, Some(k)) => format!("order-{k} (mixed)"),
            (_, Some(k)) => format!("order-{k}"),
            (_, None) => "exact".to_string(),
        }
    }

    /// Pins the dimension and truncates when a finite order is requested.
    pub fn reduce(&self, model: &ModelSpec, e: &TensorExpr) -> Result<TensorExpr, AlgebraError> {
        let e = model.pin(e)?;
        match self.order(model) {
            None => Ok(e),
            Some(k) => e.truncate(k as i64, Grading::Declared),
        }
    }

    /// Whether `e` vanishes in this mode.
    pub fn is_zero(&self, model: &ModelSpec, e: &TensorExpr) -> Result<bool, AlgebraError> {
        self.reduce(model, e)?.is_zero()
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub model: String,
    pub check: String,
    pub mode: String,
    pub status: Status,
    /// Canonical rendering of the residual; `0` when it vanishes.
    pub residual: String,
    /// Solved unknowns as exact rationals.
    #[serde(default)]
    pub solution: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(model: &ModelSpec, check: &str, mode: &Mode) -> CheckReport {
        CheckReport {
            model: model.name.clone(),
            check: check.to_string(),
            mode: mode.label(model),
            status: Status::Holds,
            residual: "0".to_string(),
            solution: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Sets status and residual from a reduced residual expression.
    pub(crate) fn with_residual(mut self, reduced: &TensorExpr) -> Result<CheckReport, AlgebraError> {
        if reduced.is_zero()? {
            self.status = Status::Holds;
            self.residual = "0".into();
        } else {
            self.status = Status::Fails;
            self.residual = render_residual(reduced)?;
        }
        Ok(self)
    }

    pub fn note(mut self, n: impl Into<String>) -> CheckReport {
        self.notes.push(n.into());
        self
    }
}

/// Canonical rendering; with denominators, the combined numerator over the
/// common denominator.
pub fn render_residual(e: &TensorExpr) -> Result<String, AlgebraError> {
    if !e.has_denominators() {
        return Ok(e.to_string());
    }
    let (num, den) = e.combine_denominators()?;
    let mut out = format!("({num})");
    for (a, k) in den {
        if k == 1 {
            out.push_str(&format!("/{}", a.name()));
        } else {
            out.push_str(&format!("/{}^{k}", a.name()));
        }
    }
    Ok(out)
}
