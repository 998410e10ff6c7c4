use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::symbol::{AtomRef, Factor, Label, Slot, SymbolKind};
use super::{AlgebraError, Grading};
use crate::number::{coeff_inv, coeff_pow, Coeff};

/// `coeff * hbar^hbar * (p.p)^pp * factors / prod(atom^power)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Coeff,
    pub hbar: u32,
    pub pp: u32,
    pub factors: Vec<Factor>,
    pub denom: BTreeMap<AtomRef, u32>,
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_shape(other)
            .then_with(|| self.coeff.re.cmp(&other.coeff.re))
            .then_with(|| self.coeff.im.cmp(&other.coeff.im))
    }
}

impl Monomial {
    pub fn constant(c: Coeff) -> Monomial {
        Monomial {
            coeff: c,
            hbar: 0,
            pp: 0,
            factors: Vec::new(),
            denom: BTreeMap::new(),
        }
    }

    pub fn with_factors(c: Coeff, factors: Vec<Factor>) -> Monomial {
        Monomial {
            factors,
            ..Monomial::constant(c)
        }
    }

    /// Ordering of everything except the coefficient; like terms compare equal.
    pub fn cmp_shape(&self, other: &Monomial) -> Ordering {
        self.hbar
            .cmp(&other.hbar)
            .then(self.pp.cmp(&other.pp))
            .then_with(|| self.factors.cmp(&other.factors))
            .then_with(|| self.denom.cmp(&other.denom))
    }

    pub fn free_labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for f in &self.factors {
            for s in f.slots() {
                if let Slot::Free(l) = s {
                    out.insert(l.clone());
                }
            }
        }
        out
    }

    pub fn max_dummy(&self) -> Option<u32> {
        self.factors
            .iter()
            .flat_map(|f| f.slots())
            .filter_map(|s| match s {
                Slot::Dummy(d) => Some(*d),
                _ => None,
            })
            .max()
    }

    pub fn shift_dummies(&mut self, offset: u32) {
        if offset == 0 {
            return;
        }
        for f in &mut self.factors {
            for s in f.slots_mut() {
                if let Slot::Dummy(d) = s {
                    *d += offset;
                }
            }
        }
    }

    /// Raw product; dummies of `other` are shifted past those of `self`.
    /// The result is not canonical.
    pub fn mul_raw(&self, other: &Monomial) -> Monomial {
        self.mul_raw_above(other, 0)
    }

    /// Raw product with the dummies of `other` shifted to at least `floor`.
    pub fn mul_raw_above(&self, other: &Monomial, floor: u32) -> Monomial {
        let mut rhs = other.clone();
        rhs.shift_dummies(self.max_dummy().map_or(0, |d| d + 1).max(floor));
        let mut out = self.clone();
        out.coeff = &out.coeff * &rhs.coeff;
        out.hbar += rhs.hbar;
        out.pp += rhs.pp;
        out.factors.extend(rhs.factors);
        for (a, k) in rhs.denom {
            *out.denom.entry(a).or_insert(0) += k;
        }
        out
    }

    /// Replaces every slot `Free(from)` by `to`.
    pub fn rename_free(&mut self, from: &str, to: &Slot) {
        for f in &mut self.factors {
            for s in f.slots_mut() {
                if matches!(s, Slot::Free(l) if &**l == from) {
                    *s = to.clone();
                }
            }
        }
    }

    pub fn grading(&self, scheme: Grading) -> u32 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Tensor { sym, .. } if sym.kind == SymbolKind::Background => match scheme {
                    Grading::Declared => sym.grading,
                    Grading::ByRank => sym.rank as u32,
                },
                _ => 0,
            })
            .sum()
    }

    pub fn q_degree(&self) -> usize {
        self.factors.iter().filter(|f| matches!(f, Factor::Q(_))).count()
    }

    /// Number of momentum factors, counting `(p.p)` twice.
    pub fn momentum_count(&self) -> usize {
        let mut n = 2 * self.pp as usize;
        for f in &self.factors {
            match f {
                Factor::P(_) => n += 1,
                Factor::Tensor { slots, .. } => n += slots.iter().filter(|s| **s == Slot::P).count(),
                _ => {}
            }
        }
        n
    }

    /// Brings the monomial to canonical form. Returns `None` for a vanishing
    /// monomial.
    pub fn canonical(mut self) -> Result<Option<Monomial>, AlgebraError> {
        if self.coeff.is_zero() {
            return Ok(None);
        }
        self.fold_constant_atoms()?;
        self.contract()?;
        self.validate()?;
        self.relabel_minimal();
        Ok(Some(self))
    }

    fn fold_constant_atoms(&mut self) -> Result<(), AlgebraError> {
        let constant: Vec<AtomRef> = self
            .denom
            .keys()
            .filter(|a| a.definition().as_constant().is_some())
            .cloned()
            .collect();
        for a in constant {
            let k = self.denom.remove(&a).unwrap_or(0);
            let c = a.definition().as_constant().unwrap_or_else(Coeff::zero);
            if c.is_zero() {
                return Err(AlgebraError::SingularAtom(a.name().to_string()));
            }
            self.coeff = &self.coeff * coeff_pow(&coeff_inv(&c), k);
        }
        self.denom.retain(|_, k| *k > 0);
        Ok(())
    }

    fn find_dummy(&self, d: u32, skip: usize) -> Option<(usize, usize)> {
        for (fi, f) in self.factors.iter().enumerate() {
            if fi == skip {
                continue;
            }
            for (si, s) in f.slots().into_iter().enumerate() {
                if *s == Slot::Dummy(d) {
                    return Some((fi, si));
                }
            }
        }
        None
    }

    fn set_slot(&mut self, at: (usize, usize), to: Slot) {
        let mut slots = self.factors[at.0].slots_mut();
        *slots[at.1] = to;
    }

    /// Eliminates deltas and momentum factors carrying dummy or `P` slots.
    fn contract(&mut self) -> Result<(), AlgebraError> {
        'outer: loop {
            for idx in 0..self.factors.len() {
                match self.factors[idx].clone() {
                    Factor::P(Slot::P) => {
                        self.factors.remove(idx);
                        self.pp += 1;
                        continue 'outer;
                    }
                    Factor::P(Slot::Dummy(d)) => {
                        let partner = self.find_dummy(d, idx).ok_or(AlgebraError::IllFormed(
                            "dummy index occurs once".into(),
                        ))?;
                        self.set_slot(partner, Slot::P);
                        self.factors.remove(idx);
                        continue 'outer;
                    }
                    Factor::Delta(a, b) => {
                        if a == b {
                            if let Slot::Dummy(_) = a {
                                self.factors[idx] = Factor::Dim;
                                continue 'outer;
                            }
                        }
                        if a == Slot::P {
                            self.factors[idx] = Factor::P(b);
                            continue 'outer;
                        }
                        if b == Slot::P {
                            self.factors[idx] = Factor::P(a);
                            continue 'outer;
                        }
                        let (d, other) = match (&a, &b) {
                            (Slot::Dummy(d), _) => (*d, b.clone()),
                            (_, Slot::Dummy(d)) => (*d, a.clone()),
                            _ => continue,
                        };
                        let partner = self.find_dummy(d, idx).ok_or(AlgebraError::IllFormed(
                            "dummy index occurs once".into(),
                        ))?;
                        self.set_slot(partner, other);
                        self.factors.remove(idx);
                        continue 'outer;
                    }
                    _ => {}
                }
            }
            break;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let mut free: BTreeMap<&Label, usize> = BTreeMap::new();
        let mut dummy: BTreeMap<u32, usize> = BTreeMap::new();
        for f in &self.factors {
            if let Factor::Tensor { sym, slots } = f {
                if slots.len() != sym.rank {
                    return Err(AlgebraError::Arity {
                        symbol: sym.name.to_string(),
                        expected: sym.rank,
                        found: slots.len(),
                    });
                }
            }
            for s in f.slots() {
                match s {
                    Slot::Free(l) => *free.entry(l).or_insert(0) += 1,
                    Slot::Dummy(d) => *dummy.entry(*d).or_insert(0) += 1,
                    Slot::P => {}
                }
            }
        }
        if let Some((l, _)) = free.iter().find(|(_, n)| **n != 1) {
            return Err(AlgebraError::IllFormed(format!("free index `{l}` repeated")));
        }
        if dummy.values().any(|n| *n != 2) {
            return Err(AlgebraError::IllFormed("dummy index not used exactly twice".into()));
        }
        Ok(())
    }

    /// Picks the dummy labelling whose sorted factor list is smallest.
    fn relabel_minimal(&mut self) {
        let mut dummies: Vec<u32> = self
            .factors
            .iter()
            .flat_map(|f| f.slots())
            .filter_map(|s| match s {
                Slot::Dummy(d) => Some(*d),
                _ => None,
            })
            .collect();
        dummies.sort_unstable();
        dummies.dedup();

        let apply = |factors: &[Factor], perm: &[u32]| -> Vec<Factor> {
            let mut out: Vec<Factor> = factors.to_vec();
            for f in &mut out {
                for s in f.slots_mut() {
                    if let Slot::Dummy(d) = s {
                        let pos = dummies.binary_search(d).expect("known dummy");
                        *d = perm[pos];
                    }
                }
                f.sort_symmetric_slots();
            }
            out.sort();
            out
        };

        let n = dummies.len();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut best = apply(&self.factors, &perm);
        if n > 1 {
            // Heap's algorithm over all relabellings.
            let mut c = vec![0usize; n];
            let mut i = 0;
            while i < n {
                if c[i] < i {
                    if i % 2 == 0 {
                        perm.swap(0, i);
                    } else {
                        perm.swap(c[i], i);
                    }
                    let cand = apply(&self.factors, &perm);
                    if cand < best {
                        best = cand;
                    }
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
        }
        self.factors = best;
    }

    pub fn is_constant(&self) -> bool {
        self.hbar == 0 && self.pp == 0 && self.factors.is_empty() && self.denom.is_empty()
    }

    pub fn unit_shape(&self) -> Monomial {
        Monomial {
            coeff: Coeff::one(),
            ..self.clone()
        }
    }
}
