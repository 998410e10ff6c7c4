//! Normal-ordered operators in the auxiliary pair `(q, p)` with
//! `[q_i, p_j] = iħ δ_ij`.
//!
//! An operator is stored as a [`TensorExpr`] whose monomials may carry `q`
//! factors; every `q` is understood to stand to the right of the momentum
//! dependent coefficient.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_traits::One;

use crate::model::ModelSpec;
use crate::number::{rat, real, Coeff};
use crate::tensor::{
    label, AlgebraError, Factor, Label, Monomial, Slot, SymbolKind, TensorExpr, TensorSymbol,
};

type Result<T> = std::result::Result<T, AlgebraError>;

static FRESH: AtomicUsize = AtomicUsize::new(0);

pub(crate) fn fresh(tag: &str) -> String {
    format!("#{tag}{}", FRESH.fetch_add(1, Ordering::Relaxed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr(TensorExpr);

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<TensorExpr> for OperatorExpr {
    fn from(e: TensorExpr) -> Self {
        OperatorExpr(e)
    }
}

/// Monomial with its `q` factors detached: the coefficient carries fresh free
/// labels where it used to connect to a `q`, and `closures` says how to
/// reconnect.
struct Opened {
    coeff: TensorExpr,
    qs: Vec<String>,
    closures: Vec<Closure>,
}

enum Closure {
    Pair(String, String),
    Momentum(String),
}

fn close(mut e: TensorExpr, closures: &[Closure]) -> Result<TensorExpr> {
    for c in closures {
        e = match c {
            Closure::Pair(a, b) => e.contract(a, b)?,
            Closure::Momentum(a) => e.contract_with_p(a)?,
        };
    }
    Ok(e)
}

fn q_monomial(l: &str) -> Monomial {
    Monomial::with_factors(Coeff::one(), vec![Factor::Q(Slot::free(l))])
}

fn open(m: &Monomial) -> Result<Opened> {
    let mut m = m.clone();
    let mut qs = Vec::new();
    let mut closures = Vec::new();
    let q_positions: Vec<usize> = (0..m.factors.len())
        .filter(|&k| matches!(m.factors[k], Factor::Q(_)))
        .collect();
    let mut q_labels: Vec<String> = Vec::new();
    for _ in &q_positions {
        q_labels.push(fresh("y"));
    }
    for (n, &k) in q_positions.iter().enumerate() {
        let Factor::Q(slot) = m.factors[k].clone() else { unreachable!() };
        let y = q_labels[n].clone();
        match slot {
            Slot::Free(l) => {
                qs.push(l.to_string());
                continue;
            }
            Slot::P => closures.push(Closure::Momentum(y.clone())),
            Slot::Dummy(d) => {
                // partner: another q (handled once) or a coefficient slot
                let partner_q = q_positions
                    .iter()
                    .enumerate()
                    .find(|(n2, &k2)| *n2 != n && m.factors[k2] == Factor::Q(Slot::Dummy(d)));
                if let Some((n2, _)) = partner_q {
                    if n < n2 {
                        closures.push(Closure::Pair(y.clone(), q_labels[n2].clone()));
                    }
                } else {
                    let x = fresh("x");
                    let mut found = false;
                    for (fi, f) in m.factors.iter_mut().enumerate() {
                        if fi == k {
                            continue;
                        }
                        for s in f.slots_mut() {
                            if *s == Slot::Dummy(d) && !found {
                                *s = Slot::free(&x);
                                found = true;
                            }
                        }
                    }
                    if !found {
                        return Err(AlgebraError::IllFormed("dangling dummy on q".into()));
                    }
                    closures.push(Closure::Pair(x, y.clone()));
                }
            }
        }
        qs.push(y);
    }
    let coeff_factors: Vec<Factor> = m
        .factors
        .iter()
        .filter(|f| !matches!(f, Factor::Q(_)))
        .cloned()
        .collect();
    let bare = Monomial {
        factors: coeff_factors,
        ..m.clone()
    };
    let free = bare.free_labels();
    Ok(Opened {
        coeff: TensorExpr::from_terms(vec![bare], free)?,
        qs,
        closures,
    })
}

fn q_product(labels: &[&String]) -> Result<TensorExpr> {
    let mut m = Monomial::constant(Coeff::one());
    for l in labels {
        m.factors.push(Factor::Q(Slot::free(l)));
    }
    TensorExpr::from_monomial(m)
}

impl OperatorExpr {
    pub fn zero(free: BTreeSet<Label>) -> OperatorExpr {
        OperatorExpr(TensorExpr::zero(free))
    }

    pub fn q(l: &str) -> OperatorExpr {
        OperatorExpr(TensorExpr::from_monomial(q_monomial(l)).expect("q"))
    }

    pub fn p(l: &str) -> OperatorExpr {
        OperatorExpr(TensorExpr::p(l))
    }

    pub fn tensor(&self) -> &TensorExpr {
        &self.0
    }

    pub fn free(&self) -> &BTreeSet<Label> {
        self.0.free()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &OperatorExpr) -> Result<OperatorExpr> {
        Ok(OperatorExpr(self.0.add(&o.0)?))
    }

    pub fn sub(&self, o: &OperatorExpr) -> Result<OperatorExpr> {
        Ok(OperatorExpr(self.0.sub(&o.0)?))
    }

    pub fn neg(&self) -> OperatorExpr {
        OperatorExpr(self.0.neg())
    }

    pub fn scale(&self, c: &Coeff) -> OperatorExpr {
        OperatorExpr(self.0.scale(c))
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<OperatorExpr> {
        Ok(OperatorExpr(self.0.rename(from, to)?))
    }

    pub fn contract(&self, a: &str, b: &str) -> Result<OperatorExpr> {
        Ok(OperatorExpr(self.0.contract(a, b)?))
    }

    /// Multiplies by a momentum function standing on the left.
    pub fn left_mul(&self, c: &TensorExpr) -> Result<OperatorExpr> {
        Ok(OperatorExpr(c.mul(&self.0)?))
    }

    /// Normal-ordered product `self * other`.
    pub fn mul(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        if let Some(l) = self.free().intersection(other.free()).next() {
            return Err(AlgebraError::IndexCollision(l.to_string()));
        }
        let free: BTreeSet<Label> = self.free().union(other.free()).cloned().collect();
        let mut out = TensorExpr::zero(free);
        let ihbar = TensorExpr::ihbar();
        for m in self.0.terms() {
            let o = open(m)?;
            let n = o.qs.len();
            // derivatives of `other` indexed by subsets of the q's
            let mut derivs: Vec<TensorExpr> = Vec::with_capacity(1 << n);
            derivs.push(other.0.clone());
            for mask in 1usize..(1 << n) {
                let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
                let prev = derivs[mask & !(1 << top)].clone();
                derivs.push(prev.derive(&o.qs[top])?);
            }
            for (mask, d) in derivs.iter().enumerate() {
                if d.is_empty() {
                    continue;
                }
                let k = mask.count_ones();
                let rest: Vec<&String> = (0..n).filter(|b| mask & (1 << b) == 0).map(|b| &o.qs[b]).collect();
                let mut t = o.coeff.mul(d)?.mul(&q_product(&rest)?)?;
                if k > 0 {
                    t = t.mul(&ihbar.pow(k)?)?;
                }
                out = out.add(&close(t, &o.closures)?)?;
            }
        }
        Ok(OperatorExpr(out))
    }

    pub fn commutator(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Largest number of `q` factors in a term.
    pub fn q_degree(&self) -> usize {
        self.0.q_degree()
    }

    /// The momentum-dependent coefficient of `q[labels...]`, symmetrised over
    /// the order of the labels.
    pub fn coefficient_of(&self, labels: &[&str]) -> Result<TensorExpr> {
        let mut free: BTreeSet<Label> = self.free().clone();
        for l in labels {
            if !free.insert(label(l)) {
                return Err(AlgebraError::IndexCollision(l.to_string()));
            }
        }
        let mut out = TensorExpr::zero(free);
        let perms = permutations(labels.len());
        let weight = real(rat(1, perms.len() as i64));
        for m in self.0.terms() {
            if m.q_degree() != labels.len() {
                continue;
            }
            let o = open(m)?;
            for perm in &perms {
                let mut t = o.coeff.clone();
                for (qi, &pi) in o.qs.iter().zip(perm) {
                    t = t.mul(&TensorExpr::delta(qi, labels[pi])?)?;
                }
                let t = close(t, &o.closures)?.scale(&weight);
                out = out.add(&t)?;
            }
        }
        Ok(out)
    }

    /// `C A C⁻¹` for `L = ∂ ln C`: each `q_j` becomes `q_j - iħ L_j`.
    pub fn apply_transform(&self, l: &LogDerivative) -> Result<OperatorExpr> {
        let mut out = TensorExpr::zero(self.free().clone());
        for m in self.0.terms() {
            let o = open(m)?;
            let mut acc = OperatorExpr(o.coeff.clone());
            for y in &o.qs {
                let shifted = OperatorExpr::q(y).sub(&OperatorExpr(l.at(y)?.mul(&TensorExpr::ihbar())?))?;
                acc = acc.mul(&shifted)?;
            }
            out = out.add(&close(acc.0, &o.closures)?)?;
        }
        Ok(OperatorExpr(out))
    }

    /// Replaces the symbolic dimension.
    pub fn pin_dim(&self, n: u32) -> Result<OperatorExpr> {
        Ok(OperatorExpr(self.0.pin_dim(n)?))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `L_j = ∂_j ln C`, stored with one free index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDerivative {
    pub index: Label,
    pub value: TensorExpr,
}

impl LogDerivative {
    pub fn new(index: &str, value: TensorExpr) -> Result<LogDerivative> {
        let want: BTreeSet<Label> = [label(index)].into_iter().collect();
        if value.free() != &want {
            return Err(AlgebraError::FreeMismatch(format!(
                "log-derivative must carry exactly the free index `{index}`"
            )));
        }
        Ok(LogDerivative {
            index: label(index),
            value,
        })
    }

    /// The identity transformation.
    pub fn none(index: &str) -> LogDerivative {
        LogDerivative {
            index: label(index),
            value: TensorExpr::zero([label(index)].into_iter().collect()),
        }
    }

    /// `L` with its index renamed.
    pub fn at(&self, idx: &str) -> Result<TensorExpr> {
        self.value.rename(&self.index, idx)
    }

    /// Whether `∂_a L_b - ∂_b L_a` vanishes, i.e. `L` is a gradient.
    pub fn is_integrable(&self) -> Result<bool> {
        let a = fresh("a");
        let b = fresh("b");
        let dab = self.at(&b)?.derive(&a)?;
        let dba = self.at(&a)?.derive(&b)?;
        dab.sub(&dba)?.is_zero()
    }
}

/// `F_ij q_j` with `F` taken from the model, free index `i`.
fn f_times_q(model: &ModelSpec, i: &str) -> Result<OperatorExpr> {
    let j = fresh("j");
    let j2 = fresh("j");
    let f = model.f_matrix(i, &j)?;
    Ok(OperatorExpr(f.mul(&TensorExpr::from_monomial(q_monomial(&j2))?)?.contract(&j, &j2)?))
}

/// `∂_j F_ij`.
pub fn divergence(model: &ModelSpec, i: &str) -> Result<TensorExpr> {
    let j = fresh("j");
    let j2 = fresh("j");
    model.pin(&model.f_matrix(i, &j)?.derive(&j2)?.contract(&j, &j2)?)
}

/// `F_ij L_j`.
pub fn f_dot(model: &ModelSpec, i: &str, v: &LogDerivative) -> Result<TensorExpr> {
    let j = fresh("j");
    let j2 = fresh("j");
    model.pin(&model.f_matrix(i, &j)?.mul(&v.at(&j2)?)?.contract(&j, &j2)?)
}

fn half_ihbar() -> TensorExpr {
    TensorExpr::ihbar().scale(&real(rat(1, 2)))
}

/// Symmetric position operator `x'_i = F_ij q_j + ½iħ ∂_j F_ij - iħ F_ij L_j`.
pub fn build_position(model: &ModelSpec, i: &str, transform: Option<&LogDerivative>) -> Result<OperatorExpr> {
    let mut x = f_times_q(model, i)?.add(&OperatorExpr(half_ihbar().mul(&divergence(model, i)?)?))?;
    if let Some(l) = transform {
        let shift = TensorExpr::ihbar().mul(&f_dot(model, i, l)?)?;
        x = x.sub(&OperatorExpr(shift))?;
    }
    Ok(x)
}

/// Where `q_j` is inserted among the momentum factors of each monomial of
/// `F_ij`: depth `r` leaves the first `r` momentum factors to the left of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    /// `q_j F_ij`.
    Left,
    /// `F_ij q_j`, the canonical ordering.
    Right,
    /// The same depth for every monomial, clamped to the monomial's size.
    Uniform(usize),
    /// One depth per monomial of `F_ij`, in canonical monomial order.
    PerMonomial(Vec<usize>),
}

/// Number of momentum factors of a monomial of `F_ij`: explicit momenta, one
/// per radial function and one per denominator power.
pub fn momentum_depth(m: &Monomial) -> usize {
    let slots: usize = m
        .factors
        .iter()
        .map(|f| match f {
            Factor::P(_) => 1,
            Factor::Radial { .. } => 1,
            Factor::Tensor { slots, .. } => slots.iter().filter(|s| **s == Slot::P).count(),
            Factor::Delta(a, b) => [a, b].iter().filter(|s| ***s == Slot::P).count(),
            _ => 0,
        })
        .sum();
    2 * m.pp as usize + slots + m.denom.values().map(|k| *k as usize).sum::<usize>()
}

struct Frozen {
    sym: Arc<TensorSymbol>,
    value: TensorExpr,
    labels: Vec<String>,
}

fn frozen_scalar(n: usize, value: TensorExpr) -> Frozen {
    Frozen {
        sym: Arc::new(TensorSymbol {
            name: label(&format!("#frz{n}")),
            rank: 0,
            symmetric: false,
            grading: 0,
            kind: SymbolKind::Frozen,
        }),
        value,
        labels: vec![],
    }
}

/// Freezes the first `r` momentum factors of `m` so that differentiation
/// skips them. Returns the frozen monomial and the scalar stand-ins to restore.
fn freeze(m: &Monomial, r: usize) -> Result<(Monomial, Vec<Frozen>)> {
    let pfix = TensorSymbol::frozen_p();
    let mut out = m.clone();
    let mut left = r;
    let mut extra = Vec::new();
    let mut next_dummy = m.max_dummy().map_or(0, |d| d + 1);
    while left > 0 && out.pp > 0 {
        out.pp -= 1;
        if left >= 2 {
            let d = next_dummy;
            next_dummy += 1;
            for _ in 0..2 {
                extra.push(Factor::Tensor {
                    sym: pfix.clone(),
                    slots: vec![Slot::Dummy(d)],
                });
            }
            left -= 2;
        } else {
            extra.push(Factor::Tensor {
                sym: pfix.clone(),
                slots: vec![Slot::P],
            });
            left = 0;
        }
    }
    let mut frozen = Vec::new();
    for f in out.factors.iter_mut() {
        if left == 0 {
            break;
        }
        match f {
            Factor::P(s) => {
                *f = Factor::Tensor {
                    sym: pfix.clone(),
                    slots: vec![s.clone()],
                };
                left -= 1;
            }
            Factor::Tensor { slots, .. } => {
                for s in slots.iter_mut() {
                    if left > 0 && *s == Slot::P {
                        *s = Slot::Dummy(next_dummy);
                        extra.push(Factor::Tensor {
                            sym: pfix.clone(),
                            slots: vec![Slot::Dummy(next_dummy)],
                        });
                        next_dummy += 1;
                        left -= 1;
                    }
                }
            }
            _ => {}
        }
    }
    for f in out.factors.iter_mut() {
        if left == 0 {
            break;
        }
        if let Factor::Radial { .. } = f {
            let value = TensorExpr::from_monomial(Monomial::with_factors(Coeff::one(), vec![f.clone()]))?;
            let fz = frozen_scalar(frozen.len(), value);
            *f = Factor::Tensor {
                sym: fz.sym.clone(),
                slots: vec![],
            };
            frozen.push(fz);
            left -= 1;
        }
    }
    let atoms: Vec<_> = out.denom.iter().map(|(a, k)| (a.clone(), *k)).collect();
    for (a, k) in atoms {
        for _ in 0..k {
            if left == 0 {
                break;
            }
            let fz = frozen_scalar(frozen.len(), TensorExpr::inverse_atom(&a, 1)?);
            extra.push(Factor::Tensor {
                sym: fz.sym.clone(),
                slots: vec![],
            });
            frozen.push(fz);
            let e = out.denom.get_mut(&a).expect("atom");
            *e -= 1;
            left -= 1;
        }
    }
    out.denom.retain(|_, k| *k > 0);
    out.factors.extend(extra);
    frozen.push(Frozen {
        sym: pfix,
        value: TensorExpr::p("#fz"),
        labels: vec!["#fz".into()],
    });
    Ok((out, frozen))
}

/// Position operator with `q_j` inserted inside the momentum factors of
/// `F_ij` according to `placement`, then normal-ordered. The symmetrisation
/// term `½iħ ∂_j F_ij` is kept unchanged.
pub fn reorder_position(model: &ModelSpec, i: &str, placement: &Placement) -> Result<OperatorExpr> {
    let base = build_position(model, i, None)?;
    let extra = reorder_shift(model, i, placement)?;
    base.add(&OperatorExpr(TensorExpr::ihbar().mul(&extra)?))
}

/// `Σ left ∂_j right` over the monomials of `F_ij`; the reordered operator
/// is the canonical one plus `iħ` times this.
pub fn reorder_shift(model: &ModelSpec, i: &str, placement: &Placement) -> Result<TensorExpr> {
    let j = fresh("j");
    let j2 = fresh("j");
    let f = model.f_matrix(i, &j)?;
    let mut out = TensorExpr::zero([label(i)].into_iter().collect());
    if let Placement::PerMonomial(depths) = placement {
        if depths.len() != f.terms().len() {
            return Err(AlgebraError::IllFormed(format!(
                "placement lists {} depths for {} monomials",
                depths.len(),
                f.terms().len()
            )));
        }
    }
    for (n, m) in f.terms().iter().enumerate() {
        let max = momentum_depth(m);
        let r = match placement {
            Placement::Left => 0,
            Placement::Right => max,
            Placement::Uniform(r) => (*r).min(max),
            Placement::PerMonomial(d) => {
                if d[n] > max {
                    return Err(AlgebraError::IllFormed(format!(
                        "depth {} exceeds the {} momentum factors of monomial {}",
                        d[n], max, n
                    )));
                }
                d[n]
            }
        };
        if r == max {
            continue;
        }
        let (frozen_m, frozen) = freeze(m, r)?;
        let e = TensorExpr::from_terms(vec![frozen_m], f.free().clone())?;
        let mut d = e.derive(&j2)?.contract(&j, &j2)?;
        for fz in &frozen {
            let labels: Vec<&str> = fz.labels.iter().map(String::as_str).collect();
            d = d.substitute(&fz.sym.name, &fz.value, &labels)?;
        }
        out = out.add(&d)?;
    }
    model.pin(&out)
}
