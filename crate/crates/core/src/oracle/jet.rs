//! Truncated Taylor expansions in three variables with exact coefficients.

use num_traits::Zero;

use crate::number::{coeff_inv, Coeff};

pub const DIM: usize = 3;

/// Jet of a function of `p` around a point: coefficients of
/// `δ1^a δ2^b δ3^c` for `a + b + c <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    coeffs: Vec<Coeff>,
}

fn count(order: usize) -> usize {
    (order + 1) * (order + 2) * (order + 3) / 6
}

/// Position of an exponent triple in the graded layout.
fn index(e: [usize; DIM]) -> usize {
    let d = e[0] + e[1] + e[2];
    // all triples of lower total degree come first
    let below = if d == 0 { 0 } else { count(d - 1) };
    // within degree d: ordered by e0 descending, then e1 descending
    let mut off = 0;
    for a in (e[0] + 1..=d).rev() {
        off += d - a + 1;
    }
    below + off + (d - e[0] - e[1])
}

fn exponents(order: usize) -> Vec<[usize; DIM]> {
    let mut out = Vec::with_capacity(count(order));
    for d in 0..=order {
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                out.push([a, b, d - a - b]);
            }
        }
    }
    out
}

impl Jet {
    pub fn constant(c: Coeff, order: usize) -> Jet {
        let mut coeffs = vec![Coeff::zero(); count(order)];
        coeffs[0] = c;
        Jet { order, coeffs }
    }

    pub fn zero(order: usize) -> Jet {
        Jet::constant(Coeff::zero(), order)
    }

    /// The coordinate `p_k` expanded around `p0_k`.
    pub fn variable(k: usize, p0: &Coeff, order: usize) -> Jet {
        let mut j = Jet::constant(p0.clone(), order);
        if order > 0 {
            let mut e = [0; DIM];
            e[k] = 1;
            j.coeffs[index(e)] = Coeff::from(num_rational::BigRational::from_integer(1.into()));
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> &Coeff {
        &self.coeffs[0]
    }

    pub fn truncated(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            order,
            coeffs: self.coeffs[..count(order)].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let coeffs = (0..count(order)).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect();
        Jet { order, coeffs }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let coeffs = (0..count(order)).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect();
        Jet { order, coeffs }
    }

    pub fn scale(&self, c: &Coeff) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let ex = exponents(order);
        let mut coeffs = vec![Coeff::zero(); ex.len()];
        for (i, a) in ex.iter().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let da = a[0] + a[1] + a[2];
            for (j, b) in ex.iter().enumerate() {
                if da + b[0] + b[1] + b[2] > order {
                    break;
                }
                if o.coeffs[j].is_zero() {
                    continue;
                }
                let k = index([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
                coeffs[k] = &coeffs[k] + &self.coeffs[i] * &o.coeffs[j];
            }
        }
        Jet { order, coeffs }
    }

    pub fn pow(&self, k: u32) -> Jet {
        let mut out = Jet::constant(Coeff::from(num_rational::BigRational::from_integer(1.into())), self.order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative in direction `k`; the order drops by one.
    pub fn derive(&self, k: usize) -> Jet {
        if self.order == 0 {
            return Jet::zero(0);
        }
        let order = self.order - 1;
        let coeffs = exponents(order)
            .into_iter()
            .map(|mut e| {
                e[k] += 1;
                let n = e[k] as i64;
                &self.coeffs[index(e)] * Coeff::from(num_rational::BigRational::from_integer(n.into()))
            })
            .collect();
        Jet { order, coeffs }
    }

    /// Multiplicative inverse; `None` when the value vanishes.
    pub fn inverse(&self) -> Option<Jet> {
        let c0 = self.value().clone();
        if c0.is_zero() {
            return None;
        }
        let inv0 = coeff_inv(&c0);
        // 1/(c0 + r) = inv0 * sum (-r inv0)^m
        let mut r = self.clone();
        r.coeffs[0] = Coeff::zero();
        let x = r.scale(&(-&inv0));
        let mut term = Jet::constant(inv0.clone(), self.order);
        let mut out = term.clone();
        for _ in 0..self.order {
            term = term.mul(&x);
            out = out.add(&term);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_a_bijection() {
        for order in 0..6 {
            let ex = exponents(order);
            for (k, e) in ex.iter().enumerate() {
                assert_eq!(index(*e), k);
            }
        }
    }
}
