//! Stable text rendering in the model expression grammar.
//!
//! Factor order follows the canonical order; dummy indices and momentum
//! contractions are spelled with the first unused names from `a`, `b`, ...,
//! `z`, `a1`, ... so that the output parses back to the same expression.

use std::collections::{BTreeMap, BTreeSet};

use super::monomial::Monomial;
use super::symbol::{Factor, Slot};
use super::TensorExpr;
use crate::number::fmt_coeff_parts;

struct Names<'a> {
    taken: &'a BTreeSet<String>,
    next: usize,
}

impl Names<'_> {
    fn fresh(&mut self) -> String {
        loop {
            let n = self.next;
            self.next += 1;
            let letter = (b'a' + (n % 26) as u8) as char;
            let name = if n < 26 {
                letter.to_string()
            } else {
                format!("{letter}{}", n / 26)
            };
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }
}

/// Renders one monomial; the leading sign is returned separately.
fn monomial_body(m: &Monomial) -> (bool, String) {
    let taken: BTreeSet<String> = m.free_labels().iter().map(|l| l.to_string()).collect();
    let mut names = Names { taken: &taken, next: 0 };
    let mut dummy_names: BTreeMap<u32, String> = BTreeMap::new();
    let mut parts: Vec<String> = Vec::new();
    let (neg, coeff) = fmt_coeff_parts(&m.coeff);
    if !coeff.is_empty() {
        parts.push(coeff);
    }
    match m.hbar {
        0 => {}
        1 => parts.push("hbar".into()),
        k => parts.push(format!("hbar^{k}")),
    }
    for _ in 0..m.pp {
        let n = names.fresh();
        parts.push(format!("p[{n}]*p[{n}]"));
    }
    for f in &m.factors {
        let mut trailing: Vec<String> = Vec::new();
        let mut slot_text = |s: &Slot, names: &mut Names, trailing: &mut Vec<String>| -> String {
            match s {
                Slot::Free(l) => l.to_string(),
                Slot::Dummy(d) => dummy_names.entry(*d).or_insert_with(|| names.fresh()).clone(),
                Slot::P => {
                    let n = names.fresh();
                    trailing.push(format!("p[{n}]"));
                    n
                }
            }
        };
        let text = match f {
            Factor::Dim => "dim".to_string(),
            Factor::Radial { name, level } => format!("{name}{}", "'".repeat(*level as usize)),
            Factor::Tensor { sym, slots } => {
                if slots.is_empty() {
                    sym.name.to_string()
                } else {
                    let idx: Vec<String> = slots
                        .iter()
                        .map(|s| slot_text(s, &mut names, &mut trailing))
                        .collect();
                    format!("{}[{}]", sym.name, idx.join(","))
                }
            }
            Factor::Delta(a, b) => {
                let a = slot_text(a, &mut names, &mut trailing);
                let b = slot_text(b, &mut names, &mut trailing);
                format!("delta[{a},{b}]")
            }
            Factor::P(s) => format!("p[{}]", slot_text(s, &mut names, &mut trailing)),
            Factor::Q(s) => {
                let t = slot_text(s, &mut names, &mut trailing);
                // q stays to the right of its momentum partner
                let mut out = trailing.join("*");
                trailing.clear();
                if !out.is_empty() {
                    out.push('*');
                }
                out.push_str(&format!("q[{t}]"));
                out
            }
        };
        parts.push(text);
        parts.extend(trailing);
    }
    let mut body = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    for (a, k) in &m.denom {
        if *k == 1 {
            body.push_str(&format!("/{}", a.name()));
        } else {
            body.push_str(&format!("/{}^{k}", a.name()));
        }
    }
    (neg, body)
}

pub fn render_monomial(m: &Monomial) -> String {
    let (neg, body) = monomial_body(m);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn render_expr(e: &TensorExpr) -> String {
    if e.terms().is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, m) in e.terms().iter().enumerate() {
        let (neg, body) = monomial_body(m);
        match (k, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}
