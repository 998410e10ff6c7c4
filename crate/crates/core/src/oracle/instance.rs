use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::jet::DIM;
use crate::model::ModelSpec;
use crate::number::{Coeff, Rational};
use crate::tensor::SymbolKind;

/// Random rational in `[-1, 1]` with denominator at most 16.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    let den: i64 = rng.gen_range(1..=16);
    let num: i64 = rng.gen_range(-den..=den);
    Rational::new(num.into(), den.into())
}

/// Numeric values for every symbol of a model, with `hbar = 1` and three
/// spatial dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericInstance {
    pub seed: u64,
    /// Row-major components of each tensor.
    pub tensors: BTreeMap<String, Vec<Rational>>,
    /// Coefficients `[a0, a1, a2]` of each radial function `a0 + a1 s + a2 s^2`
    /// in `s = p.p`.
    pub radials: BTreeMap<String, [Rational; 3]>,
    /// Values of solver unknowns.
    pub unknowns: BTreeMap<String, Coeff>,
}

fn flat_index(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &k| acc * DIM + k)
}

fn unflatten(mut n: usize, rank: usize) -> Vec<usize> {
    let mut out = vec![0; rank];
    for k in (0..rank).rev() {
        out[k] = n % DIM;
        n /= DIM;
    }
    out
}

impl NumericInstance {
    pub fn instantiate(model: &ModelSpec, seed: u64) -> NumericInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tensors = BTreeMap::new();
        for (name, sym) in &model.symbols.tensors {
            if sym.kind != SymbolKind::Background {
                continue;
            }
            let n = DIM.pow(sym.rank as u32);
            let mut comps: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            if sym.symmetric {
                for k in 0..n {
                    let mut idx = unflatten(k, sym.rank);
                    idx.sort_unstable();
                    comps[k] = comps[flat_index(&idx)].clone();
                }
            }
            tensors.insert(name.clone(), comps);
        }
        let mut radials = BTreeMap::new();
        for name in &model.symbols.radials {
            let mut c = [random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng)];
            if c[0] == Rational::from_integer(0.into()) {
                c[0] = Rational::from_integer(1.into());
            }
            radials.insert(name.clone(), c);
        }
        NumericInstance {
            seed,
            tensors,
            radials,
            unknowns: BTreeMap::new(),
        }
    }

    pub fn with_unknowns(mut self, values: &BTreeMap<String, Rational>) -> NumericInstance {
        for (k, v) in values {
            self.unknowns.insert(k.clone(), Coeff::from(v.clone()));
        }
        self
    }

    pub fn component(&self, name: &str, idx: &[usize]) -> Option<&Rational> {
        self.tensors.get(name).map(|c| &c[flat_index(idx)])
    }
}
