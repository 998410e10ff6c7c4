use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::TensorExpr;

/// Index label. Free indices carry user names; internal temporaries start
/// with `#`.
pub type Label = Arc<str>;

pub fn label(s: &str) -> Label {
    Arc::from(s)
}

/// One index slot of a factor.
///
/// `P` marks a slot contracted with a momentum factor, `Dummy` a slot
/// contracted with another slot of the same monomial, `Free` an open index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    P,
    Dummy(u32),
    Free(Label),
}

impl Slot {
    pub fn free(name: &str) -> Slot {
        Slot::Free(label(name))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// Constant background field (anisotropy or isotropic parameter).
    Background,
    /// Unknown real constant solved for by the transformation solver.
    Unknown,
    /// Momentum factor held fixed under differentiation (reordering support).
    Frozen,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorSymbol {
    pub name: Label,
    pub rank: usize,
    pub symmetric: bool,
    /// Perturbative weight used by truncation.
    pub grading: u32,
    pub kind: SymbolKind,
}

impl TensorSymbol {
    pub fn background(name: &str, rank: usize, symmetric: bool, grading: u32) -> Arc<TensorSymbol> {
        Arc::new(TensorSymbol {
            name: label(name),
            rank,
            symmetric,
            grading,
            kind: SymbolKind::Background,
        })
    }

    pub fn unknown(name: &str) -> Arc<TensorSymbol> {
        Arc::new(TensorSymbol {
            name: label(name),
            rank: 0,
            symmetric: false,
            grading: 0,
            kind: SymbolKind::Unknown,
        })
    }

    pub(crate) fn frozen_p() -> Arc<TensorSymbol> {
        Arc::new(TensorSymbol {
            name: label("pfix"),
            rank: 1,
            symmetric: false,
            grading: 0,
            kind: SymbolKind::Frozen,
        })
    }
}

/// Registered scalar usable as a denominator: a named formal series with no
/// free indices and a definition free of denominators.
#[derive(Debug)]
pub struct ScalarAtom {
    pub name: Label,
    pub definition: TensorExpr,
}

/// Shared handle to a [`ScalarAtom`]. Two handles are equal when both the name
/// and the definition agree.
#[derive(Clone, Debug)]
pub struct AtomRef(pub Arc<ScalarAtom>);

impl AtomRef {
    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn definition(&self) -> &TensorExpr {
        &self.0.definition
    }
}

impl PartialEq for AtomRef {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AtomRef {}

impl PartialOrd for AtomRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AtomRef {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .name
            .cmp(&other.0.name)
            .then_with(|| self.0.definition.cmp(&other.0.definition))
    }
}

impl fmt::Display for AtomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// A factor of a monomial. Variant order fixes the canonical factor order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    /// Symbolic spatial dimension produced by a delta trace.
    Dim,
    /// Abstract function of `p.p`, differentiated `level` times in `p.p`.
    Radial { name: Label, level: u32 },
    Tensor { sym: Arc<TensorSymbol>, slots: Vec<Slot> },
    Delta(Slot, Slot),
    /// Momentum component.
    P(Slot),
    /// Auxiliary position operator; always normal-ordered to the right.
    Q(Slot),
}

impl Factor {
    pub(crate) fn slots(&self) -> Vec<&Slot> {
        match self {
            Factor::Dim | Factor::Radial { .. } => vec![],
            Factor::Tensor { slots, .. } => slots.iter().collect(),
            Factor::Delta(a, b) => vec![a, b],
            Factor::P(s) | Factor::Q(s) => vec![s],
        }
    }

    pub(crate) fn slots_mut(&mut self) -> Vec<&mut Slot> {
        match self {
            Factor::Dim | Factor::Radial { .. } => vec![],
            Factor::Tensor { slots, .. } => slots.iter_mut().collect(),
            Factor::Delta(a, b) => vec![a, b],
            Factor::P(s) | Factor::Q(s) => vec![s],
        }
    }

    pub(crate) fn sort_symmetric_slots(&mut self) {
        match self {
            Factor::Delta(a, b) => {
                if b < a {
                    std::mem::swap(a, b);
                }
            }
            Factor::Tensor { sym, slots } if sym.symmetric => slots.sort(),
            _ => {}
        }
    }
}
