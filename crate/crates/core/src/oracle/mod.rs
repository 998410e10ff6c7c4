//! Independent numeric check: operators act on polynomial test functions as
//! differential operators (`q_k = iħ ∂_k`, `ħ = 1`) and everything is
//! evaluated exactly at random rational points.

mod instance;
mod jet;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use instance::{random_rational, NumericInstance};
pub use jet::{Jet, DIM};

use crate::number::{coeff_int, coeff_pow, i_unit, real, Coeff, Rational};
use crate::operator::OperatorExpr;
use crate::tensor::{AlgebraError, AtomRef, Factor, Label, Monomial, Slot, TensorExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no numeric value for `{0}`")]
    MissingValue(String),
    #[error("a denominator vanishes at the sample point")]
    Singular,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

type Result<T> = std::result::Result<T, OracleError>;

/// Polynomial test function in `p1, p2, p3`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub terms: Vec<([u32; DIM], Rational)>,
}

impl TestFunction {
    /// A few random monomials of total degree at most `max_degree`.
    pub fn random(rng: &mut impl Rng, max_degree: u32) -> TestFunction {
        let n = rng.gen_range(2..=5);
        let terms = (0..n)
            .map(|_| {
                let d = rng.gen_range(0..=max_degree);
                let a = rng.gen_range(0..=d);
                let b = rng.gen_range(0..=d - a);
                ([a, b, d - a - b], random_rational(rng))
            })
            .collect();
        TestFunction { terms }
    }

    pub fn jet(&self, point: &[Coeff; DIM], order: usize) -> Jet {
        let vars: Vec<Jet> = (0..DIM).map(|k| Jet::variable(k, &point[k], order)).collect();
        let mut out = Jet::zero(order);
        for (e, c) in &self.terms {
            let mut t = Jet::constant(real(c.clone()), order);
            for k in 0..DIM {
                t = t.mul(&vars[k].pow(e[k]));
            }
            out = out.add(&t);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
enum Idx {
    Fixed(usize),
    Var(usize),
}

enum Flat {
    Tensor(String, Vec<Idx>),
    Delta(Idx, Idx),
    P(Idx),
    Q(Idx),
}

/// Exact evaluator at one point.
pub struct Evaluator<'a> {
    inst: &'a NumericInstance,
    point: [Coeff; DIM],
    order: usize,
    p: Vec<Jet>,
    inverses: RefCell<BTreeMap<AtomRef, Jet>>,
}

fn resolve(i: Idx, vals: &[usize]) -> usize {
    match i {
        Idx::Fixed(k) => k,
        Idx::Var(v) => vals[v],
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a NumericInstance, point: [Coeff; DIM], order: usize) -> Evaluator<'a> {
        let p = (0..DIM).map(|k| Jet::variable(k, &point[k], order)).collect();
        Evaluator {
            inst,
            point,
            order,
            p,
            inverses: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn point(&self) -> &[Coeff; DIM] {
        &self.point
    }

    fn p_squared(&self) -> Jet {
        let mut s = Jet::zero(self.order);
        for k in 0..DIM {
            s = s.add(&self.p[k].mul(&self.p[k]));
        }
        s
    }

    fn radial(&self, name: &str, level: u32) -> Result<Jet> {
        let c = self
            .inst
            .radials
            .get(name)
            .ok_or_else(|| OracleError::MissingValue(name.to_string()))?;
        // derivative of a0 + a1 s + a2 s^2 taken `level` times
        let coeffs: Vec<Rational> = match level {
            0 => vec![c[0].clone(), c[1].clone(), c[2].clone()],
            1 => vec![c[1].clone(), &c[2] * Rational::from_integer(2.into())],
            2 => vec![&c[2] * Rational::from_integer(2.into())],
            _ => vec![],
        };
        let s = self.p_squared();
        let mut out = Jet::zero(self.order);
        let mut pow = Jet::constant(Coeff::one(), self.order);
        for a in coeffs {
            out = out.add(&pow.scale(&real(a)));
            pow = pow.mul(&s);
        }
        Ok(out)
    }

    /// Scalar part of a monomial: everything without index slots.
    fn scalar_part(&self, m: &Monomial) -> Result<Jet> {
        let mut j = Jet::constant(m.coeff.clone(), self.order);
        if m.pp > 0 {
            j = j.mul(&self.p_squared().pow(m.pp));
        }
        for f in &m.factors {
            match f {
                Factor::Dim => j = j.scale(&coeff_int(DIM as i64)),
                Factor::Radial { name, level } => j = j.mul(&self.radial(name, *level)?),
                Factor::Tensor { sym, slots } if slots.is_empty() => {
                    let v = if let Some(u) = self.inst.unknowns.get(&*sym.name) {
                        u.clone()
                    } else {
                        real(
                            self.inst
                                .component(&sym.name, &[])
                                .ok_or_else(|| OracleError::MissingValue(sym.name.to_string()))?
                                .clone(),
                        )
                    };
                    j = j.scale(&v);
                }
                _ => {}
            }
        }
        for (a, k) in &m.denom {
            let cached = self.inverses.borrow().get(a).cloned();
            let inv = match cached {
                Some(inv) => inv,
                None => {
                    let inv = self.scalar(a.definition())?.inverse().ok_or(OracleError::Singular)?;
                    self.inverses.borrow_mut().insert(a.clone(), inv.clone());
                    inv
                }
            };
            j = j.mul(&inv.pow(*k));
        }
        Ok(j)
    }

    /// Value of a scalar expression.
    pub fn scalar(&self, e: &TensorExpr) -> Result<Jet> {
        self.tensor(e, &BTreeMap::new())
    }

    /// Value of an expression with its free indices fixed by `assign`.
    pub fn tensor(&self, e: &TensorExpr, assign: &BTreeMap<Label, usize>) -> Result<Jet> {
        let one = Jet::constant(Coeff::one(), self.order);
        self.apply_raw(e, &one, assign)
    }

    /// Applies an operator to a function given by its jet.
    pub fn apply(&self, op: &OperatorExpr, psi: &Jet, assign: &BTreeMap<Label, usize>) -> Result<Jet> {
        self.apply_raw(op.tensor(), psi, assign)
    }

    fn apply_raw(&self, e: &TensorExpr, psi: &Jet, assign: &BTreeMap<Label, usize>) -> Result<Jet> {
        let out_order = self.order.min(psi.order().saturating_sub(e.q_degree()));
        let mut total = Jet::zero(out_order);
        let mut psi_cache: HashMap<Vec<usize>, Jet> = HashMap::new();
        let mut p_cache: HashMap<Vec<usize>, Jet> = HashMap::new();
        for m in e.terms() {
            let base = self.scalar_part(m)?;
            if base.is_zero() {
                continue;
            }
            let (flat, nvars) = flatten(m, assign)?;
            let mut vals = vec![0usize; nvars];
            let mut grouped: BTreeMap<(Vec<usize>, Vec<usize>), Coeff> = BTreeMap::new();
            loop {
                let mut c = Coeff::one();
                let mut ps: Vec<usize> = Vec::new();
                let mut qs: Vec<usize> = Vec::new();
                for f in &flat {
                    match f {
                        Flat::Tensor(name, idx) => {
                            let ix: Vec<usize> = idx.iter().map(|i| resolve(*i, &vals)).collect();
                            let v = self
                                .inst
                                .component(name, &ix)
                                .ok_or_else(|| OracleError::MissingValue(name.clone()))?;
                            c *= real(v.clone());
                        }
                        Flat::Delta(a, b) => {
                            if resolve(*a, &vals) != resolve(*b, &vals) {
                                c = Coeff::zero();
                            }
                        }
                        Flat::P(i) => ps.push(resolve(*i, &vals)),
                        Flat::Q(i) => qs.push(resolve(*i, &vals)),
                    }
                    if c.is_zero() {
                        break;
                    }
                }
                if !c.is_zero() {
                    ps.sort_unstable();
                    qs.sort_unstable();
                    let slot = grouped.entry((ps, qs)).or_insert_with(Coeff::zero);
                    *slot = &*slot + c;
                }
                // next assignment
                let mut k = 0;
                while k < nvars {
                    vals[k] += 1;
                    if vals[k] < DIM {
                        break;
                    }
                    vals[k] = 0;
                    k += 1;
                }
                if k == nvars {
                    break;
                }
            }
            let mut acc = Jet::zero(out_order);
            for ((ps, qs), c) in grouped {
                if c.is_zero() {
                    continue;
                }
                let pj = match p_cache.get(&ps) {
                    Some(j) => j.clone(),
                    None => {
                        let mut j = Jet::constant(Coeff::one(), self.order);
                        for &k in &ps {
                            j = j.mul(&self.p[k]);
                        }
                        p_cache.insert(ps.clone(), j.clone());
                        j
                    }
                };
                let qj = match psi_cache.get(&qs) {
                    Some(j) => j.clone(),
                    None => {
                        let mut j = psi.clone();
                        for &k in &qs {
                            j = j.derive(k);
                        }
                        let j = j.scale(&coeff_pow(&i_unit(), qs.len() as u32));
                        psi_cache.insert(qs.clone(), j.clone());
                        j
                    }
                };
                acc = acc.add(&pj.mul(&qj).scale(&c));
            }
            total = total.add(&acc.mul(&base));
        }
        Ok(total)
    }
}

/// Turns the indexed factors of a monomial into a flat list over summation
/// variables; every `P` slot becomes a variable shared with a momentum factor.
fn flatten(m: &Monomial, assign: &BTreeMap<Label, usize>) -> Result<(Vec<Flat>, usize)> {
    let mut dummy_vars: BTreeMap<u32, usize> = BTreeMap::new();
    let mut nvars = 0;
    let mut out = Vec::new();
    let mut extra = Vec::new();
    let mut slot = |s: &Slot, extra: &mut Vec<Flat>| -> Result<Idx> {
        Ok(match s {
            Slot::Free(l) => Idx::Fixed(
                *assign
                    .get(l)
                    .ok_or_else(|| OracleError::MissingValue(format!("index {l}")))?,
            ),
            Slot::Dummy(d) => Idx::Var(*dummy_vars.entry(*d).or_insert_with(|| {
                nvars += 1;
                nvars - 1
            })),
            Slot::P => {
                nvars += 1;
                extra.push(Flat::P(Idx::Var(nvars - 1)));
                Idx::Var(nvars - 1)
            }
        })
    };
    for f in &m.factors {
        match f {
            Factor::Tensor { sym, slots } if !slots.is_empty() => {
                let idx = slots.iter().map(|s| slot(s, &mut extra)).collect::<Result<Vec<_>>>()?;
                out.push(Flat::Tensor(sym.name.to_string(), idx));
            }
            Factor::Delta(a, b) => {
                let a = slot(a, &mut extra)?;
                let b = slot(b, &mut extra)?;
                out.push(Flat::Delta(a, b));
            }
            Factor::P(s) => {
                let i = slot(s, &mut extra)?;
                out.push(Flat::P(i));
            }
            Factor::Q(s) => {
                let i = slot(s, &mut extra)?;
                out.push(Flat::Q(i));
            }
            _ => {}
        }
    }
    out.extend(extra);
    Ok((out, nvars))
}

/// Every assignment of values `0..DIM` to the given labels.
pub fn assignments(labels: &[Label]) -> Vec<BTreeMap<Label, usize>> {
    let mut out = vec![BTreeMap::new()];
    for l in labels {
        let mut next = Vec::with_capacity(out.len() * DIM);
        for a in &out {
            for k in 0..DIM {
                let mut b = a.clone();
                b.insert(l.clone(), k);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Random rational point.
pub fn random_point(rng: &mut impl Rng) -> [Coeff; DIM] {
    [
        real(random_rational(rng)),
        real(random_rational(rng)),
        real(random_rational(rng)),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub passed: bool,
    pub comparisons: usize,
    pub mismatch: Option<String>,
}

const RESAMPLE: usize = 32;

/// Compares `claimed` (the symbolic commutator) with `A(Bψ) - B(Aψ)` on
/// `trials` random test functions at random points.
pub fn cross_check_claim(
    a: &OperatorExpr,
    b: &OperatorExpr,
    claimed: &OperatorExpr,
    inst: &NumericInstance,
    trials: usize,
) -> Result<CrossCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ 0x5eed);
    let order = a.q_degree() + b.q_degree();
    let labels: Vec<Label> = a.free().union(b.free()).cloned().collect();
    let mut comparisons = 0;
    for trial in 0..trials {
        let psi_fn = TestFunction::random(&mut rng, 6);
        let mut attempt = 0;
        loop {
            let point = random_point(&mut rng);
            let ev = Evaluator::new(inst, point, order);
            let psi = psi_fn.jet(ev.point(), order);
            let res: Result<Option<String>> = (|| {
                for asg in assignments(&labels) {
                    let lhs = ev.apply(claimed, &psi, &asg)?;
                    let bpsi = ev.apply(b, &psi, &asg)?;
                    let apsi = ev.apply(a, &psi, &asg)?;
                    let rhs = ev.apply(a, &bpsi, &asg)?.sub(&ev.apply(b, &apsi, &asg)?);
                    if lhs.value() != rhs.value() {
                        return Ok(Some(format!(
                            "trial {trial}, indices {:?}: symbolic {} vs composed {}",
                            asg.values().collect::<Vec<_>>(),
                            lhs.value(),
                            rhs.value()
                        )));
                    }
                }
                Ok(None)
            })();
            match res {
                Ok(None) => {
                    comparisons += assignments(&labels).len();
                    break;
                }
                Ok(Some(msg)) => {
                    return Ok(CrossCheck {
                        passed: false,
                        comparisons,
                        mismatch: Some(msg),
                    })
                }
                Err(OracleError::Singular) if attempt < RESAMPLE => attempt += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(CrossCheck {
        passed: true,
        comparisons,
        mismatch: None,
    })
}

/// Checks the engine's commutator of `a` and `b` against composition.
pub fn cross_check(a: &OperatorExpr, b: &OperatorExpr, inst: &NumericInstance, trials: usize) -> Result<CrossCheck> {
    let claimed = a.commutator(b)?;
    cross_check_claim(a, b, &claimed, inst, trials)
}

/// Whether two operators act identically on random test functions.
pub fn operators_agree(x: &OperatorExpr, y: &OperatorExpr, inst: &NumericInstance, trials: usize) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ 0xa9ee);
    let order = x.q_degree().max(y.q_degree());
    let labels: Vec<Label> = x.free().union(y.free()).cloned().collect();
    for _ in 0..trials {
        let psi_fn = TestFunction::random(&mut rng, 6);
        let mut attempt = 0;
        loop {
            let ev = Evaluator::new(inst, random_point(&mut rng), order);
            let psi = psi_fn.jet(ev.point(), order);
            let res: Result<bool> = (|| {
                for asg in assignments(&labels) {
                    if ev.apply(x, &psi, &asg)?.value() != ev.apply(y, &psi, &asg)?.value() {
                        return Ok(false);
                    }
                }
                Ok(true)
            })();
            match res {
                Ok(true) => break,
                Ok(false) => return Ok(false),
                Err(OracleError::Singular) if attempt < RESAMPLE => attempt += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// Whether an expression evaluates to a nonzero value at one of `points`
/// random points.
pub fn nonzero_somewhere(e: &TensorExpr, inst: &NumericInstance, points: usize) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ 0x2e70);
    let labels: Vec<Label> = e.free().iter().cloned().collect();
    let order = e.q_degree();
    let mut tried = 0;
    let mut attempts = 0;
    while tried < points {
        let ev = Evaluator::new(inst, random_point(&mut rng), order);
        let psi = TestFunction::random(&mut rng, 4).jet(ev.point(), order);
        let mut singular = false;
        for asg in assignments(&labels) {
            match ev.apply_raw(e, &psi, &asg) {
                Ok(v) if !v.value().is_zero() => return Ok(true),
                Ok(_) => {}
                Err(OracleError::Singular) => {
                    singular = true;
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        if singular {
            attempts += 1;
            if attempts > RESAMPLE {
                return Err(OracleError::Singular);
            }
            continue;
        }
        tried += 1;
    }
    Ok(false)
}
