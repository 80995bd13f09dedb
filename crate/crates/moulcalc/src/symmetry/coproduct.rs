//! Truncated coproducts of the series `sum M^w w` and the primitive / group-like residuals.
//!
//! `Delta` makes letters primitive: `Delta(x) = x (x) 1 + 1 (x) x`, so a word splits
//! into two subsequences by a sign vector. `Delta*` makes letters `y_r` satisfy
//! `Delta*(y_r) = sum_{i+j=r} y_i (x) y_j` with `y_0 = 1`, splitting each degree
//! vector into two nonnegative parts.

use std::collections::BTreeMap;

use num::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::scalar::{fmt_scalar, Scalar};
use crate::words::{sign_vector_splittings, Letter, Word};

/// Finitely supported element of the tensor square of the word algebra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorElement {
    pub terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorElement {
    pub fn add_term(&mut self, u: Word, v: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (u, v);
        let sum = self.terms.get(&key).cloned().unwrap_or_else(Scalar::zero) + c;
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn get(&self, u: &Word, v: &Word) -> Scalar {
        self.terms.get(&(u.clone(), v.clone())).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|((u, v), c)| json!({"left": u.to_string(), "right": v.to_string(), "coef": fmt_scalar(c)})).collect();
        json!(terms)
    }
}

/// Which coproduct, with its truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coproduct {
    /// Letters primitive; truncation `|u| + |v| <= L`.
    Delta,
    /// Letters split additively; truncation `|u| + |v| <= L` and total degree `<= max_weight`.
    DeltaStar { max_weight: i64 },
}

/// Image of one word under `Delta`.
pub fn delta_word(w: &Word) -> TensorElement {
    let mut t = TensorElement::default();
    for (u, v) in sign_vector_splittings(w) {
        t.add_term(u, v, Scalar::from_integer(1.into()));
    }
    t
}

/// All splittings `n = i + j` of a degree vector into nonnegative parts.
fn splittings(a: &Letter) -> Result<Vec<(Vec<i64>, Vec<i64>)>> {
    let n = a.degree().ok_or(Error::NoSemigroup)?;
    if n.iter().any(|&k| k < 0) {
        return Err(Error::Undecomposable(a.to_string()));
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for &k in n {
        out = out
            .into_iter()
            .flat_map(|(i, j)| {
                (0..=k).map(move |p| {
                    let (mut i, mut j) = (i.clone(), j.clone());
                    i.push(p);
                    j.push(k - p);
                    (i, j)
                })
            })
            .collect();
    }
    Ok(out)
}

/// Image of one word under `Delta*`: product over letters of their splittings, zero
/// parts dropped.
pub fn delta_star_word(w: &Word) -> Result<TensorElement> {
    let mut partial: Vec<(Vec<Letter>, Vec<Letter>)> = vec![(Vec::new(), Vec::new())];
    for a in w.letters() {
        let parts = splittings(a)?;
        let mut next = Vec::with_capacity(partial.len() * parts.len());
        for (u, v) in &partial {
            for (i, j) in &parts {
                let (mut u, mut v) = (u.clone(), v.clone());
                if i.iter().any(|&k| k != 0) {
                    u.push(Letter::Deg(i.clone()));
                }
                if j.iter().any(|&k| k != 0) {
                    v.push(Letter::Deg(j.clone()));
                }
                next.push((u, v));
            }
        }
        partial = next;
    }
    let mut t = TensorElement::default();
    for (u, v) in partial {
        t.add_term(Word(u), Word(v), Scalar::from_integer(1.into()));
    }
    Ok(t)
}

fn weight(w: &Word) -> i64 {
    w.letters().iter().filter_map(|a| a.total_degree()).sum()
}

fn keep(co: Coproduct, u: &Word, v: &Word, max_len: usize) -> bool {
    u.len() + v.len() <= max_len
        && match co {
            Coproduct::Delta => true,
            Coproduct::DeltaStar { max_weight } => weight(u) + weight(v) <= max_weight,
        }
}

fn domain(m: &Mould, co: Coproduct, max_len: usize) -> Vec<Word> {
    m.alphabet()
        .words(max_len)
        .into_iter()
        .filter(|w| match co {
            Coproduct::Delta => true,
            Coproduct::DeltaStar { max_weight } => weight(w) <= max_weight,
        })
        .collect()
}

/// `Delta(sum M^w w)`, truncated.
pub fn coproduct_delta(m: &Mould, max_len: usize) -> Result<TensorElement> {
    apply(m, Coproduct::Delta, max_len)
}

/// `Delta*(sum M^w w)` over the alphabet's degree letters, truncated.
pub fn coproduct_delta_star(m: &Mould, max_len: usize, max_weight: i64) -> Result<TensorElement> {
    apply(m, Coproduct::DeltaStar { max_weight }, max_len)
}

fn apply(m: &Mould, co: Coproduct, max_len: usize) -> Result<TensorElement> {
    let mut out = TensorElement::default();
    for w in domain(m, co, max_len) {
        let c = m.eval(&w)?;
        if c.is_zero() {
            continue;
        }
        let image = match co {
            Coproduct::Delta => delta_word(&w),
            Coproduct::DeltaStar { .. } => delta_star_word(&w)?,
        };
        for ((u, v), k) in image.terms {
            if keep(co, &u, &v, max_len) {
                out.add_term(u, v, &c * k);
            }
        }
    }
    Ok(out)
}

/// `Delta(P) - P (x) 1 - 1 (x) P`.
pub fn primitive_residual(m: &Mould, co: Coproduct, max_len: usize) -> Result<TensorElement> {
    let mut t = apply(m, co, max_len)?;
    let e = Word::empty();
    for w in domain(m, co, max_len) {
        let c = m.eval(&w)?;
        t.add_term(w.clone(), e.clone(), -c.clone());
        t.add_term(e.clone(), w, -c);
    }
    Ok(t)
}

/// `Delta(P) - P (x) P`.
pub fn grouplike_residual(m: &Mould, co: Coproduct, max_len: usize) -> Result<TensorElement> {
    let mut t = apply(m, co, max_len)?;
    let words = domain(m, co, max_len);
    for u in &words {
        let a = m.eval(u)?;
        if a.is_zero() {
            continue;
        }
        for v in &words {
            if keep(co, u, v, max_len) {
                t.add_term(u.clone(), v.clone(), -(&a * m.eval(v)?));
            }
        }
    }
    Ok(t)
}
