use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::render::render_expr;
use super::symbol::{label, AtomRef, Factor, Label, ScalarAtom, Slot, SymbolKind, TensorSymbol};
use super::{AlgebraError, Grading};
use crate::number::{coeff_int, coeff_inv, coeff_pow, i_unit, int, real, Coeff, Rational};

type Result<T> = std::result::Result<T, AlgebraError>;

/// Canonical sum of monomials sharing one set of free indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TensorExpr {
    terms: Vec<Monomial>,
    free: BTreeSet<Label>,
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(self))
    }
}

fn temp_label(tag: &str, n: usize) -> Label {
    label(&format!("#{tag}{n}"))
}

impl TensorExpr {
    pub fn zero(free: BTreeSet<Label>) -> TensorExpr {
        TensorExpr {
            terms: Vec::new(),
            free,
        }
    }

    pub fn scalar_zero() -> TensorExpr {
        TensorExpr::zero(BTreeSet::new())
    }

    pub fn constant(c: Coeff) -> TensorExpr {
        TensorExpr::from_monomial(Monomial::constant(c)).expect("constant is well-formed")
    }

    pub fn rational(r: Rational) -> TensorExpr {
        TensorExpr::constant(real(r))
    }

    pub fn integer(n: i64) -> TensorExpr {
        TensorExpr::rational(int(n))
    }

    pub fn one() -> TensorExpr {
        TensorExpr::integer(1)
    }

    pub fn hbar() -> TensorExpr {
        let mut m = Monomial::constant(Coeff::one());
        m.hbar = 1;
        TensorExpr::from_monomial(m).expect("hbar")
    }

    pub fn im() -> TensorExpr {
        TensorExpr::constant(i_unit())
    }

    /// `i * hbar`.
    pub fn ihbar() -> TensorExpr {
        let mut m = Monomial::constant(i_unit());
        m.hbar = 1;
        TensorExpr::from_monomial(m).expect("ihbar")
    }

    pub fn dim() -> TensorExpr {
        TensorExpr::from_monomial(Monomial::with_factors(Coeff::one(), vec![Factor::Dim])).expect("dim")
    }

    /// Momentum component `p[l]`.
    pub fn p(l: &str) -> TensorExpr {
        TensorExpr::from_monomial(Monomial::with_factors(Coeff::one(), vec![Factor::P(Slot::free(l))]))
            .expect("p")
    }

    /// `p.p`.
    pub fn p_squared() -> TensorExpr {
        let mut m = Monomial::constant(Coeff::one());
        m.pp = 1;
        TensorExpr::from_monomial(m).expect("pp")
    }

    pub fn delta(a: &str, b: &str) -> Result<TensorExpr> {
        let slots = slots_for(&[a, b]);
        TensorExpr::from_monomial(Monomial::with_factors(
            Coeff::one(),
            vec![Factor::Delta(slots[0].clone(), slots[1].clone())],
        ))
    }

    /// Tensor symbol with the given index labels. A label repeated inside the
    /// same factor becomes a trace.
    pub fn tensor(sym: &Arc<TensorSymbol>, labels: &[&str]) -> Result<TensorExpr> {
        if labels.len() != sym.rank {
            return Err(AlgebraError::Arity {
                symbol: sym.name.to_string(),
                expected: sym.rank,
                found: labels.len(),
            });
        }
        TensorExpr::from_monomial(Monomial::with_factors(
            Coeff::one(),
            vec![Factor::Tensor {
                sym: sym.clone(),
                slots: slots_for(labels),
            }],
        ))
    }

    pub fn radial(name: &str, level: u32) -> TensorExpr {
        TensorExpr::from_monomial(Monomial::with_factors(
            Coeff::one(),
            vec![Factor::Radial {
                name: label(name),
                level,
            }],
        ))
        .expect("radial")
    }

    /// `1 / atom^power`.
    pub fn inverse_atom(atom: &AtomRef, power: u32) -> Result<TensorExpr> {
        let mut m = Monomial::constant(Coeff::one());
        m.denom.insert(atom.clone(), power);
        TensorExpr::from_monomial(m)
    }

    pub fn from_monomial(m: Monomial) -> Result<TensorExpr> {
        let free = m.free_labels();
        TensorExpr::from_terms(vec![m], free)
    }

    /// Canonicalises every monomial and merges like terms.
    pub fn from_terms(terms: Vec<Monomial>, free: BTreeSet<Label>) -> Result<TensorExpr> {
        let mut canon = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(m) = t.canonical()? {
                let fl = m.free_labels();
                if fl != free {
                    return Err(AlgebraError::FreeMismatch(format!(
                        "term has free indices {:?}, expected {:?}",
                        fl.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                        free.iter().map(|l| l.to_string()).collect::<Vec<_>>()
                    )));
                }
                canon.push(m);
            }
        }
        canon.sort_by(|a, b| a.cmp_shape(b));
        let mut merged: Vec<Monomial> = Vec::with_capacity(canon.len());
        for m in canon {
            match merged.last_mut() {
                Some(last) if last.cmp_shape(&m).is_eq() => {
                    last.coeff = &last.coeff + &m.coeff;
                    if last.coeff.is_zero() {
                        merged.pop();
                    }
                }
                _ => merged.push(m),
            }
        }
        Ok(TensorExpr {
            terms: merged,
            free,
        })
    }

    /// Re-canonicalises an expression.
    pub fn canonicalize(&self) -> Result<TensorExpr> {
        TensorExpr::from_terms(self.terms.clone(), self.free.clone())
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn free(&self) -> &BTreeSet<Label> {
        &self.free
    }

    /// Syntactic emptiness of the canonical form.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [m] if m.is_constant() => Some(m.coeff.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &TensorExpr) -> Result<TensorExpr> {
        if self.free != other.free {
            return Err(AlgebraError::FreeMismatch(format!(
                "cannot add expressions with free indices {:?} and {:?}",
                self.free, other.free
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TensorExpr::from_terms(terms, self.free.clone())
    }

    pub fn neg(&self) -> TensorExpr {
        self.scale(&coeff_int(-1))
    }

    pub fn sub(&self, other: &TensorExpr) -> Result<TensorExpr> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coeff) -> TensorExpr {
        if c.is_zero() {
            return TensorExpr::zero(self.free.clone());
        }
        TensorExpr {
            terms: self
                .terms
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    m.coeff = &m.coeff * c;
                    m
                })
                .collect(),
            free: self.free.clone(),
        }
    }

    pub fn mul(&self, other: &TensorExpr) -> Result<TensorExpr> {
        if let Some(l) = self.free.intersection(&other.free).next() {
            return Err(AlgebraError::IndexCollision(l.to_string()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul_raw(b));
            }
        }
        let free = self.free.union(&other.free).cloned().collect();
        TensorExpr::from_terms(terms, free)
    }

    pub fn pow(&self, k: u32) -> Result<TensorExpr> {
        if !self.free.is_empty() && k > 1 {
            return Err(AlgebraError::IllFormed("power of an expression with free indices".into()));
        }
        let mut out = TensorExpr::one();
        for _ in 0..k {
            out = out.mul(self)?;
        }
        if k == 1 {
            return Ok(self.clone());
        }
        Ok(out)
    }

    /// Partial derivative with respect to `p[idx]`.
    pub fn derive(&self, idx: &str) -> Result<TensorExpr> {
        if self.free.iter().any(|l| &**l == idx) {
            return Err(AlgebraError::IndexCollision(idx.to_string()));
        }
        let mut terms = Vec::new();
        for m in &self.terms {
            derive_monomial(m, idx, &mut terms)?;
        }
        let mut free = self.free.clone();
        free.insert(label(idx));
        TensorExpr::from_terms(terms, free)
    }

    /// Renames the free index `from` to `to`.
    pub fn rename(&self, from: &str, to: &str) -> Result<TensorExpr> {
        if from == to {
            return Ok(self.clone());
        }
        if !self.free.iter().any(|l| &**l == from) {
            return Err(AlgebraError::FreeMismatch(format!("`{from}` is not free")));
        }
        if self.free.iter().any(|l| &**l == to) {
            return Err(AlgebraError::IndexCollision(to.to_string()));
        }
        let to_slot = Slot::free(to);
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.rename_free(from, &to_slot);
                m
            })
            .collect();
        let mut free = self.free.clone();
        free.retain(|l| &**l != from);
        free.insert(label(to));
        TensorExpr::from_terms(terms, free)
    }

    /// Contracts two free indices with each other.
    pub fn contract(&self, a: &str, b: &str) -> Result<TensorExpr> {
        for l in [a, b] {
            if !self.free.iter().any(|f| &**f == l) {
                return Err(AlgebraError::FreeMismatch(format!("`{l}` is not free")));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut m = m.clone();
                let d = Slot::Dummy(m.max_dummy().map_or(0, |d| d + 1));
                m.rename_free(a, &d);
                m.rename_free(b, &d);
                m
            })
            .collect();
        let mut free = self.free.clone();
        free.retain(|l| &**l != a && &**l != b);
        TensorExpr::from_terms(terms, free)
    }

    /// Contracts the free index `a` with the momentum.
    pub fn contract_with_p(&self, a: &str) -> Result<TensorExpr> {
        if !self.free.iter().any(|f| &**f == a) {
            return Err(AlgebraError::FreeMismatch(format!("`{a}` is not free")));
        }
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.rename_free(a, &Slot::P);
                m
            })
            .collect();
        let mut free = self.free.clone();
        free.retain(|l| &**l != a);
        TensorExpr::from_terms(terms, free)
    }

    /// Product of `self` and `other` with `self[a]` contracted against
    /// `other[b]`.
    pub fn contract_mul(&self, a: &str, other: &TensorExpr, b: &str) -> Result<TensorExpr> {
        let tmp = "#cm";
        let rhs = other.rename(b, tmp)?;
        self.mul(&rhs)?.contract(a, tmp)
    }

    /// Sum of all monomials brought over the least common denominator.
    /// Returns the expanded numerator and the denominator.
    pub fn combine_denominators(&self) -> Result<(TensorExpr, BTreeMap<AtomRef, u32>)> {
        let mut lcm: BTreeMap<AtomRef, u32> = BTreeMap::new();
        for m in &self.terms {
            for (a, k) in &m.denom {
                let e = lcm.entry(a.clone()).or_insert(0);
                *e = (*e).max(*k);
            }
        }
        if lcm.is_empty() {
            return Ok((self.clone(), lcm));
        }
        let mut powers: BTreeMap<(AtomRef, u32), TensorExpr> = BTreeMap::new();
        let mut numerator = TensorExpr::zero(self.free.clone());
        for m in &self.terms {
            let mut bare = m.clone();
            bare.denom.clear();
            let mut t = TensorExpr::from_terms(vec![bare], self.free.clone())?;
            for (a, kmax) in &lcm {
                let need = kmax - m.denom.get(a).copied().unwrap_or(0);
                if need == 0 {
                    continue;
                }
                let key = (a.clone(), need);
                if !powers.contains_key(&key) {
                    powers.insert(key.clone(), a.definition().pow(need)?);
                }
                t = t.mul(&powers[&key])?;
            }
            numerator = numerator.add(&t)?;
        }
        Ok((numerator, lcm))
    }

    /// Decides whether the expression vanishes identically.
    pub fn is_zero(&self) -> Result<bool> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        Ok(self.combine_denominators()?.0.is_empty())
    }

    /// Largest grading over all monomials, ignoring denominators.
    pub fn max_grading(&self, scheme: Grading) -> u32 {
        self.terms.iter().map(|m| m.grading(scheme)).max().unwrap_or(0)
    }

    fn drop_above(&self, order: u32, scheme: Grading) -> TensorExpr {
        TensorExpr {
            terms: self
                .terms
                .iter()
                .filter(|m| m.grading(scheme) <= order)
                .cloned()
                .collect(),
            free: self.free.clone(),
        }
    }

    /// Expands denominators as formal series and drops every monomial of
    /// grading above `order`.
    pub fn truncate(&self, order: i64, scheme: Grading) -> Result<TensorExpr> {
        if order < 0 {
            return Err(AlgebraError::NegativeOrder(order));
        }
        let order = order as u32;
        let mut out = TensorExpr::zero(self.free.clone());
        for m in &self.terms {
            let g0 = m.grading(scheme);
            if g0 > order {
                continue;
            }
            let mut bare = m.clone();
            bare.denom.clear();
            let mut acc = TensorExpr::from_terms(vec![bare], self.free.clone())?;
            for (a, k) in &m.denom {
                let series = inverse_series(a, *k, order - g0, scheme)?;
                acc = acc.mul(&series)?.drop_above(order, scheme);
            }
            out = out.add(&acc)?;
        }
        Ok(out.drop_above(order, scheme))
    }

    /// Replaces every occurrence of the symbol named `sym` by `by`, wiring the
    /// symbol's slots to `by_labels` in order.
    pub fn substitute(&self, sym: &str, by: &TensorExpr, by_labels: &[&str]) -> Result<TensorExpr> {
        let wanted: BTreeSet<Label> = by_labels.iter().map(|l| label(l)).collect();
        if wanted.len() != by_labels.len() || &wanted != by.free() {
            return Err(AlgebraError::Arity {
                symbol: sym.to_string(),
                expected: by_labels.len(),
                found: by.free().len(),
            });
        }
        // Move the replacement onto private labels.
        let mut by_tmp = by.clone();
        let mut temps = Vec::new();
        for (k, l) in by_labels.iter().enumerate() {
            let t = temp_label("sub", k);
            by_tmp = by_tmp.rename(l, &t)?;
            temps.push(t);
        }
        let mut done: Vec<Monomial> = Vec::new();
        for m in &self.terms {
            let mut rest = m.clone();
            rest.denom = substitute_denominators(&m.denom, sym, by, by_labels)?;
            let floor = m.max_dummy().map_or(0, |d| d + 1);
            let mut occurrences = Vec::new();
            rest.factors.retain(|f| match f {
                Factor::Tensor { sym: s, slots } if &*s.name == sym => {
                    occurrences.push(slots.clone());
                    false
                }
                _ => true,
            });
            let mut acc = vec![rest];
            for slots in occurrences {
                if slots.len() != by_labels.len() {
                    return Err(AlgebraError::Arity {
                        symbol: sym.to_string(),
                        expected: slots.len(),
                        found: by_labels.len(),
                    });
                }
                let mut next = Vec::with_capacity(acc.len() * by_tmp.terms().len());
                for r in &acc {
                    for t in by_tmp.terms() {
                        let mut x = r.mul_raw_above(t, floor);
                        for (tl, slot) in temps.iter().zip(&slots) {
                            x.rename_free(tl, slot);
                        }
                        next.push(x);
                    }
                }
                acc = next;
            }
            done.extend(acc);
        }
        TensorExpr::from_terms(done, self.free.clone())
    }

    /// Replaces the symbolic dimension by `n`.
    pub fn pin_dim(&self, n: u32) -> Result<TensorExpr> {
        let terms = self
            .terms
            .iter()
            .map(|m| pin_dim_monomial(m, n))
            .collect::<Result<Vec<_>>>()?;
        TensorExpr::from_terms(terms, self.free.clone())
    }

    /// Whether any monomial (or denominator definition) mentions a symbol.
    pub fn mentions(&self, sym: &str) -> bool {
        self.terms.iter().any(|m| {
            m.factors
                .iter()
                .any(|f| matches!(f, Factor::Tensor { sym: s, .. } if &*s.name == sym))
                || m.denom.keys().any(|a| a.definition().mentions(sym))
        })
    }

    /// Symbols appearing anywhere in the expression.
    pub fn symbols(&self) -> BTreeSet<Arc<TensorSymbol>> {
        let mut out = BTreeSet::new();
        for m in &self.terms {
            for f in &m.factors {
                if let Factor::Tensor { sym, .. } = f {
                    out.insert(sym.clone());
                }
            }
            for a in m.denom.keys() {
                out.extend(a.definition().symbols());
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<AtomRef> {
        self.terms
            .iter()
            .flat_map(|m| m.denom.keys().cloned())
            .collect()
    }

    pub fn has_denominators(&self) -> bool {
        self.terms.iter().any(|m| !m.denom.is_empty())
    }

    pub fn q_degree(&self) -> usize {
        self.terms.iter().map(Monomial::q_degree).max().unwrap_or(0)
    }

}

fn slots_for(labels: &[&str]) -> Vec<Slot> {
    let mut out = Vec::with_capacity(labels.len());
    let mut next = 0u32;
    let mut seen: BTreeMap<&str, u32> = BTreeMap::new();
    for l in labels {
        if labels.iter().filter(|x| *x == l).count() == 2 {
            let d = *seen.entry(l).or_insert_with(|| {
                next += 1;
                next - 1
            });
            out.push(Slot::Dummy(d));
        } else {
            out.push(Slot::free(l));
        }
    }
    out
}

fn derive_monomial(m: &Monomial, idx: &str, out: &mut Vec<Monomial>) -> Result<()> {
    let dir = Slot::free(idx);
    if m.pp > 0 {
        let mut t = m.clone();
        t.coeff = &t.coeff * coeff_int(2 * m.pp as i64);
        t.pp -= 1;
        t.factors.push(Factor::P(dir.clone()));
        out.push(t);
    }
    for (k, f) in m.factors.iter().enumerate() {
        match f {
            Factor::P(s) => {
                let mut t = m.clone();
                t.factors[k] = Factor::Delta(s.clone(), dir.clone());
                out.push(t);
            }
            Factor::Q(Slot::P) => {
                let mut t = m.clone();
                t.factors[k] = Factor::Q(dir.clone());
                out.push(t);
            }
            Factor::Tensor { sym, slots } if sym.kind != SymbolKind::Frozen => {
                for (si, s) in slots.iter().enumerate() {
                    if *s == Slot::P {
                        let mut new_slots = slots.clone();
                        new_slots[si] = dir.clone();
                        let mut t = m.clone();
                        t.factors[k] = Factor::Tensor {
                            sym: sym.clone(),
                            slots: new_slots,
                        };
                        out.push(t);
                    }
                }
            }
            Factor::Radial { name, level } => {
                let mut t = m.clone();
                t.coeff = &t.coeff * coeff_int(2);
                t.factors[k] = Factor::Radial {
                    name: name.clone(),
                    level: level + 1,
                };
                t.factors.push(Factor::P(dir.clone()));
                out.push(t);
            }
            Factor::Dim | Factor::Tensor { .. } | Factor::Delta(..) | Factor::Q(_) => {}
        }
    }
    for (a, k) in &m.denom {
        let ds = a.definition().derive(idx)?;
        if ds.is_empty() {
            continue;
        }
        let mut base = m.clone();
        base.coeff = &base.coeff * coeff_int(-(*k as i64));
        *base.denom.get_mut(a).expect("atom present") += 1;
        for t in ds.terms() {
            out.push(base.mul_raw(t));
        }
    }
    Ok(())
}

fn binom(n: u32, k: u32) -> Rational {
    let mut r = int(1);
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

/// `atom^-k` as a truncated series in the grading.
fn inverse_series(a: &AtomRef, k: u32, budget: u32, scheme: Grading) -> Result<TensorExpr> {
    let def = a.definition();
    let mut lead = Vec::new();
    let mut rest = Vec::new();
    for m in def.terms() {
        if m.grading(scheme) == 0 {
            lead.push(m.clone());
        } else {
            rest.push(m.clone());
        }
    }
    let c0 = match lead.as_slice() {
        [m] if m.is_constant() => m.coeff.clone(),
        _ => return Err(AlgebraError::NotTruncatable(a.name().to_string())),
    };
    let rest = TensorExpr::from_terms(rest, BTreeSet::new())?;
    let inv_c0 = coeff_inv(&c0);
    // (c0 + r)^-k = sum_n binom(-k, n) c0^(-k-n) r^n
    let mut out = TensorExpr::zero(BTreeSet::new());
    let mut r_pow = TensorExpr::one();
    for n in 0..=budget {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let c = real(binom(k + n - 1, n) * int(sign)) * coeff_pow(&inv_c0, k + n);
        out = out.add(&r_pow.scale(&c))?;
        r_pow = r_pow.mul(&rest)?.drop_above(budget, scheme);
        if r_pow.is_empty() {
            break;
        }
    }
    Ok(out)
}

fn substitute_denominators(
    denom: &BTreeMap<AtomRef, u32>,
    sym: &str,
    by: &TensorExpr,
    by_labels: &[&str],
) -> Result<BTreeMap<AtomRef, u32>> {
    let mut out = BTreeMap::new();
    for (a, k) in denom {
        if a.definition().mentions(sym) {
            let def = a.definition().substitute(sym, by, by_labels)?;
            let atom = AtomRef(Arc::new(ScalarAtom {
                name: a.0.name.clone(),
                definition: def,
            }));
            *out.entry(atom).or_insert(0) += *k;
        } else {
            *out.entry(a.clone()).or_insert(0) += *k;
        }
    }
    Ok(out)
}

fn pin_dim_monomial(m: &Monomial, n: u32) -> Result<Monomial> {
    let mut t = m.clone();
    let count = t.factors.iter().filter(|f| matches!(f, Factor::Dim)).count();
    t.factors.retain(|f| !matches!(f, Factor::Dim));
    t.coeff = &t.coeff * coeff_pow(&coeff_int(n as i64), count as u32);
    let mut denom = BTreeMap::new();
    for (a, k) in &m.denom {
        let def = a.definition().pin_dim(n)?;
        let atom = if &def == a.definition() {
            a.clone()
        } else {
            AtomRef(Arc::new(ScalarAtom {
                name: a.0.name.clone(),
                definition: def,
            }))
        };
        *denom.entry(atom).or_insert(0) += *k;
    }
    t.denom = denom;
    Ok(t)
}
