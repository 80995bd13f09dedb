//! The named moulds.
//!
//! Every mould reads letter weights `omega` from its alphabet, so the same constructor
//! serves concrete degree-vector alphabets and randomly weighted generic ones.
//! Exponentials `e^omega` are the multiplier monomials `q^n`.
//!
//! `Na` is `S` without the sign: `Na^w = (-1)^{l(w)} S^w`. `Ne` is the product inverse
//! of `Ne_inv`; its closed form is `e^{-||w||} / prod_k (e^{-(w_1 + ... + w_k)} - 1)`.
//! The numerator `e^{+||w||}` (shared with `Se`) gives a different mould, kept as
//! [`ne_displayed`] for comparison.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::mould::{Alphabet, Mould};
use crate::scalar::{factorial, int, Scalar, Weights};
use crate::words::{all_words, Letter, Word};

pub const NAMES: &[&str] = &["one", "I", "Exp", "T", "J", "S", "Se", "Na", "Ne_inv", "Ne", "Sam", "Tram"];

pub fn make(name: &str, alphabet: Alphabet, bound: usize) -> Result<Mould> {
    Ok(match name {
        "one" | "1" => Mould::one(alphabet, bound),
        "I" => Mould::identity(alphabet, bound),
        "Exp" => exp_mould(alphabet, bound),
        "T" => t_mould(alphabet, bound),
        "J" => j_mould(alphabet, bound),
        "S" => s_mould(alphabet, bound),
        "Se" => se_mould(alphabet, bound),
        "Na" => na_mould(alphabet, bound),
        "Ne_inv" => ne_inv(alphabet, bound),
        "Ne" => ne_mould(alphabet, bound),
        "Sam" => sam(alphabet, bound)?,
        "Tram" => tram(alphabet, bound)?,
        _ => return Err(Error::UnknownMould(name.to_string())),
    })
}

fn omegas(wt: &Weights, w: &Word) -> Result<Vec<Scalar>> {
    w.letters().iter().map(|a| wt.omega(a)).collect()
}

fn exps(wt: &Weights, w: &Word) -> Result<Vec<Scalar>> {
    w.letters().iter().map(|a| wt.exp_omega(a)).collect()
}

fn pole(w: &Word) -> Error {
    Error::PoleAtWord(format!("({w})"))
}

/// `Exp^w = 1/l(w)!`, including `Exp^() = 1`.
pub fn exp_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Exp", alphabet, bound, |_, w| Ok(factorial(w.len()).recip()))
}

/// `Exp - 1`: the same values off the empty word, usable as a right factor of composition.
pub fn exp_reduced(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Exp-1", alphabet, bound, |_, w| Ok(if w.is_empty() { Scalar::zero() } else { factorial(w.len()).recip() }))
}

/// `T^w = prod 1/(w_{i+1} - w_i)` for `l(w) >= 2`, zero on shorter words.
pub fn t_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("T", alphabet, bound, |me, w| {
        if w.len() < 2 {
            return Ok(Scalar::zero());
        }
        let om = omegas(me.weights(), w)?;
        let mut acc = Scalar::one();
        for p in om.windows(2) {
            let d = &p[1] - &p[0];
            if d.is_zero() {
                return Err(pole(w));
            }
            acc /= d;
        }
        Ok(acc)
    })
}

/// `J^w = (-1)^{r+1}/r` for `r = l(w) >= 1`.
pub fn j_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("J", alphabet, bound, |_, w| {
        let r = w.len() as i64;
        Ok(if r == 0 { Scalar::zero() } else { Scalar::new((if r % 2 == 1 { 1 } else { -1 }).into(), r.into()) })
    })
}

/// `1 / prod_k (w_1 + ... + w_k)`, the unsigned prefix-sum product.
fn prefix_reciprocal(wt: &Weights, w: &Word) -> Result<Scalar> {
    let mut partial = Scalar::zero();
    let mut acc = Scalar::one();
    for om in omegas(wt, w)? {
        partial += om;
        if partial.is_zero() {
            return Err(pole(w));
        }
        acc /= &partial;
    }
    Ok(acc)
}

/// `S^w = (-1)^r / (w_1 (w_1 + w_2) ... (w_1 + ... + w_r))`.
pub fn s_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("S", alphabet, bound, |me, w| {
        let v = prefix_reciprocal(me.weights(), w)?;
        Ok(if w.len() % 2 == 1 { -v } else { v })
    })
}

/// `Na^w = 1 / (w_1 (w_1 + w_2) ... (w_1 + ... + w_r))`.
pub fn na_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Na", alphabet, bound, |me, w| prefix_reciprocal(me.weights(), w))
}

/// `prod_k 1/(e^{-(w_1 + ... + w_k)} - 1)`.
fn exp_prefix_reciprocal(wt: &Weights, w: &Word) -> Result<Scalar> {
    let mut partial = Scalar::one();
    let mut acc = Scalar::one();
    for e in exps(wt, w)? {
        partial *= e;
        let d = partial.recip() - Scalar::one();
        if d.is_zero() {
            return Err(pole(w));
        }
        acc /= d;
    }
    Ok(acc)
}

/// `Se^w = e^{||w||} / prod_k (e^{-(w_1 + ... + w_k)} - 1)`.
pub fn se_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Se", alphabet, bound, |me, w| {
        let wt = me.weights();
        Ok(wt.exp_omega_word(w.letters())? * exp_prefix_reciprocal(wt, w)?)
    })
}

/// `Ne_inv^w = 1 / prod_k (e^{w_k + ... + w_r} - 1)`, suffix sums.
pub fn ne_inv(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Ne_inv", alphabet, bound, |me, w| {
        let mut partial = Scalar::one();
        let mut acc = Scalar::one();
        for e in exps(me.weights(), w)?.into_iter().rev() {
            partial *= e;
            let d = &partial - Scalar::one();
            if d.is_zero() {
                return Err(pole(w));
            }
            acc /= d;
        }
        Ok(acc)
    })
}

/// `Ne^w = e^{-||w||} / prod_k (e^{-(w_1 + ... + w_k)} - 1)`, the product inverse of `Ne_inv`.
pub fn ne_mould(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Ne", alphabet, bound, |me, w| {
        let wt = me.weights();
        Ok(wt.exp_omega_word(w.letters())?.recip() * exp_prefix_reciprocal(wt, w)?)
    })
}

/// The closed form with numerator `e^{+||w||}`; it coincides with `Se`, not with the
/// inverse of `Ne_inv`.
pub fn ne_displayed(alphabet: Alphabet, bound: usize) -> Mould {
    se_mould(alphabet, bound).renamed("Ne_displayed")
}

/// `1/w` on length-one words with nonzero weight, zero elsewhere.
pub fn jsam(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Jsam", alphabet, bound, |me, w| {
        if w.len() != 1 {
            return Ok(Scalar::zero());
        }
        let om = me.weights().omega(&w.letters()[0])?;
        Ok(if om.is_zero() { om } else { om.recip() })
    })
}

/// `Sam = exp J x nabla exp(-J) + exp J x I x exp(-J)`.
pub fn sam(alphabet: Alphabet, bound: usize) -> Result<Mould> {
    let j = jsam(alphabet.clone(), bound);
    let e_plus = j.exp()?;
    let e_minus = j.neg().exp()?;
    let id = Mould::identity(alphabet, bound);
    let first = e_plus.mul(&e_minus.nabla()?)?;
    let second = Mould::product(&[&e_plus, &id, &e_minus])?;
    Ok(first.add(&second)?.renamed("Sam"))
}

/// Closed forms for `Sam`, by number of vanishing weights.
pub fn sam_closed_form(alphabet: Alphabet, bound: usize) -> Mould {
    Mould::from_rule("Sam_closed", alphabet, bound, |me, w| {
        let r = w.len();
        if r == 0 {
            return Ok(Scalar::zero());
        }
        let om = omegas(me.weights(), w)?;
        let zeros: Vec<usize> = (0..r).filter(|&k| om[k].is_zero()).collect();
        match zeros.len() {
            0 => {
                let prod = om.iter().fold(Scalar::one(), |a, x| a * x);
                let mut acc = Scalar::zero();
                for k in 1..=r {
                    let tail: Scalar = om[k..].iter().fold(Scalar::zero(), |a, x| a + x);
                    let num = &om[k - 1] * int((r - k) as i64) - tail;
                    let sign = if (r - k) % 2 == 0 { int(1) } else { int(-1) };
                    acc += sign * num / (factorial(k - 1) * factorial(r - k + 1));
                }
                Ok(acc / prod)
            }
            1 => {
                let i = zeros[0] + 1;
                let prod = om.iter().filter(|x| !x.is_zero()).fold(Scalar::one(), |a, x| a * x);
                let sign = if (r - i).is_multiple_of(2) { int(1) } else { int(-1) };
                Ok(sign / (factorial(i - 1) * factorial(r - i) * prod))
            }
            _ => Ok(Scalar::zero()),
        }
    })
}

/// `Tram^w = (Sam o ... o Sam)^w` with `l(w)` factors.
pub fn tram(alphabet: Alphabet, bound: usize) -> Result<Mould> {
    let s = sam(alphabet.clone(), bound)?;
    let mut iterates = vec![Mould::identity(alphabet.clone(), bound), s.clone()];
    for _ in 2..=bound {
        let next = iterates.last().expect("nonempty").compose(&s)?;
        iterates.push(next);
    }
    Ok(Mould::from_rule("Tram", alphabet, bound, move |_, w| {
        if w.is_empty() {
            return Ok(Scalar::zero());
        }
        iterates[w.len()].eval(w)
    }))
}

/// Truncated polynomial in variables `v_1, ..., v_r`: exponent vector to coefficient.
pub type Poly = BTreeMap<Vec<u32>, Scalar>;

/// Generating series `Sig^{v_1..v_r} = sum_{1 <= s_i <= cap} Se^{s_1..s_r} v_1^{s_1 - 1}...v_r^{s_r - 1}`
/// of `Se` on positive-integer letters with `e^{omega(s)} = q^s`.
pub fn sig_series(q: &Scalar, r: usize, cap: u32) -> Result<Poly> {
    let se = se_mould(Alphabet::integers(cap as i64, int(1), q.clone()), r);
    generating_series(&se, r, cap)
}

/// Generating series of any mould on positive-integer letters `1..=cap`.
pub fn generating_series(m: &Mould, r: usize, cap: u32) -> Result<Poly> {
    let letters: Vec<Letter> = (1..=cap as i64).map(|s| Letter::deg(&[s])).collect();
    let mut out = Poly::new();
    for w in all_words(&letters, r).into_iter().filter(|w| w.len() == r) {
        let v = m.eval(&w)?;
        if v.is_zero() {
            continue;
        }
        let exps = w.letters().iter().map(|a| (a.total_degree().expect("degree letter") - 1) as u32).collect();
        out.insert(exps, v);
    }
    Ok(out)
}
