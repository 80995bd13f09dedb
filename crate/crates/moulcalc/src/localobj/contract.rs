//! Comoulds `B_w` and contraction `sum_w M^w B_w` on truncated jets.
//!
//! Two orderings of the comould are supported. With [`ComouldOrder::FirstInner`],
//! `B_(n1..nr) = B_nr o ... o B_n1`: the first letter acts first. With
//! [`ComouldOrder::FirstOuter`], `B_(n1..nr) = B_n1 o ... o B_nr`, and contraction is a
//! homomorphism for the mould product `(M x N)^w = sum M^u N^v`:
//! `contract(M x N) = contract(M) o contract(N)`. Under `FirstInner` the same identity
//! holds with the factors swapped.

use std::collections::BTreeMap;

use num::Zero;

use super::field::words_by_weight;
use super::jet::JetOperator;
use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::words::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComouldOrder {
    FirstOuter,
    FirstInner,
}

fn part<'a>(parts: &'a BTreeMap<Letter, JetOperator>, a: &Letter) -> Result<&'a JetOperator> {
    parts.get(a).ok_or_else(|| Error::UnknownLetter(a.to_string()))
}

/// The operator `B_w` on jets of order `order`.
pub fn comould(w: &Word, parts: &BTreeMap<Letter, JetOperator>, nu: usize, order: u32, how: ComouldOrder) -> Result<JetOperator> {
    let mut out = JetOperator::identity(nu, order);
    for a in w.letters() {
        let b = part(parts, a)?;
        out = match how {
            ComouldOrder::FirstOuter => out.compose(b),
            ComouldOrder::FirstInner => b.compose(&out),
        };
    }
    Ok(out)
}

/// `sum_w M^w B_w` over all words whose letters raise the degree by at most
/// `order - 1` in total; longer words vanish on jets of order `order`.
///
/// Comoulds are built incrementally, one letter per step, so each word costs one
/// operator composition.
pub fn contract(m: &Mould, parts: &BTreeMap<Letter, JetOperator>, nu: usize, order: u32, how: ComouldOrder) -> Result<JetOperator> {
    let letters: Vec<Letter> = parts.keys().cloned().collect();
    let mut out = JetOperator::identity(nu, order).scale(&m.eval(&Word::empty())?);
    let max_weight = i64::from(order) - 1;
    let weights: Vec<i64> = letters
        .iter()
        .map(|a| a.total_degree().filter(|&d| d >= 1).ok_or(Error::InadmissibleDegree(a.degree().unwrap_or_default().to_vec())))
        .collect::<Result<_>>()?;
    let mut stack: Vec<(Word, i64, JetOperator)> = vec![(Word::empty(), 0, JetOperator::identity(nu, order))];
    while let Some((w, s, b)) = stack.pop() {
        for (a, &d) in letters.iter().zip(&weights) {
            if s + d > max_weight {
                continue;
            }
            let v = w.push(a.clone());
            let ba = &parts[a];
            let bv = match how {
                ComouldOrder::FirstOuter => b.compose(ba),
                ComouldOrder::FirstInner => ba.compose(&b),
            };
            let c = m.eval(&v)?;
            if !c.is_zero() {
                out.add_scaled(&bv, &c);
            }
            stack.push((v, s + d, bv));
        }
    }
    Ok(out)
}

/// Words that `contract` visits at truncation order `order`.
pub fn contraction_words(letters: &[Letter], order: u32) -> Result<Vec<Word>> {
    words_by_weight(letters, i64::from(order) - 1)
}
