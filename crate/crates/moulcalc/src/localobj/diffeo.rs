//! Diffeomorphisms in prepared form and their linearization through `Ne_inv`.
//!
//! For `f(x) = q x + f_nl(x)`, the substitution operator `F: phi -> phi o f` factors as
//! `F = F_lin (1 + sum_n B_n)` with `F_lin phi = phi(q x)`. Writing
//! `f(x) = g(q x)` with `g(y) = y + u(y)`, `u(y) = f_nl(y / q)`, Taylor's formula gives
//! `1 + sum_n B_n = sum_delta u^delta / delta! d^delta`, and `B_n` collects the terms
//! `c x^a d^delta` with `a - delta = n`.
//!
//! Since `F_lin B_n = q^n B_n F_lin`, also `F = (1 + sum_n q^n B_n) F_lin`. The
//! normalizer is `Theta = sum_w Ne_inv^w q^{||w||} B_w` with the comould in
//! [`ComouldOrder::FirstInner`] order: `e^nabla Ne_inv = (1 + I) x Ne_inv` then gives
//! `Theta F = F_lin Theta`, i.e. `f(h(y)) = h(q y)` for `h_i = Theta(x_i)`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde_json::{json, Value};

use super::contract::{contract, contraction_words, ComouldOrder};
use super::field::{scalars_from_json, split_terms, terms_from_json, terms_to_json, RawTerm};
use super::jet::{degree, monomials, Jet, JetOperator, UNTRUNCATED};
use super::normal::{coordinates, Normalization};
use super::op::DiffOp;
use crate::catalog;
use crate::error::{Error, Result};
use crate::mould::Alphabet;
use crate::scalar::{factorial, fmt_scalar, powi, Scalar, Weights};
use crate::words::Letter;

/// `f = q x + f_nl` together with the homogeneous parts `B_n` extracted at `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDiffeo {
    pub nu: usize,
    pub multipliers: Vec<Scalar>,
    pub map: Vec<Jet>,
    pub order: u32,
    pub parts: BTreeMap<Letter, DiffOp>,
}

fn q_power(q: &[Scalar], n: &[i64]) -> Scalar {
    n.iter().zip(q).fold(Scalar::one(), |acc, (&k, x)| acc * powi(x, k))
}

impl PreparedDiffeo {
    /// Extracts `B_n` from the map given by its terms (linear terms optional, they must
    /// equal `q_i x_i`).
    pub fn new(nu: usize, multipliers: Vec<Scalar>, terms: &[RawTerm], order: u32) -> Result<Self> {
        if multipliers.len() != nu {
            return Err(Error::DimensionMismatch(multipliers.len(), nu));
        }
        if let Some(i) = multipliers.iter().position(Zero::is_zero) {
            return Err(Error::NotLocal(format!("multiplier {i} is zero, f is not invertible at 0")));
        }
        let nonlinear = split_terms(nu, &multipliers, terms)?;
        let mut f_nl: Vec<Jet> = (0..nu).map(|_| Jet::zero(nu, order)).collect();
        for comps in nonlinear.values() {
            for (i, c) in comps.iter().enumerate() {
                f_nl[i] = f_nl[i].add(&c.with_order(order));
            }
        }
        let map: Vec<Jet> = f_nl.iter().enumerate().map(|(i, c)| c.add(&Jet::var(nu, order, i).scale(&multipliers[i]))).collect();
        // u(y) = f_nl(y / q)
        let u: Vec<Jet> = f_nl
            .iter()
            .map(|c| {
                Jet::from_terms(
                    nu,
                    order,
                    c.terms().iter().map(|(m, x)| {
                        let e: Vec<i64> = m.iter().map(|&k| i64::from(k)).collect();
                        (m.clone(), x / q_power(&multipliers, &e))
                    }),
                )
            })
            .collect();
        let mut parts: BTreeMap<Letter, DiffOp> = BTreeMap::new();
        for delta in monomials(nu, order) {
            let d = degree(&delta);
            if d == 0 {
                continue;
            }
            let mut coef = Jet::constant(nu, order, Scalar::one());
            for (i, &k) in delta.iter().enumerate() {
                coef = coef.mul(&u[i].pow(k)).scale(&factorial(k as usize).recip());
            }
            for (a, c) in coef.terms() {
                let n: Vec<i64> = a.iter().zip(&delta).map(|(&x, &y)| i64::from(x) - i64::from(y)).collect();
                let part = parts.entry(Letter::Deg(n)).or_insert_with(|| DiffOp::zero(nu));
                part.add_term(delta.clone(), &Jet::monomial(nu, UNTRUNCATED, a.clone(), c.clone()));
            }
        }
        parts.retain(|_, p| !p.is_zero());
        Ok(PreparedDiffeo { nu, multipliers, map, order, parts })
    }

    pub fn from_json(v: &Value, order: u32) -> Result<Self> {
        let (nu, terms) = terms_from_json(v)?;
        PreparedDiffeo::new(nu, scalars_from_json(v, "multipliers")?, &terms, order)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nu": self.nu,
            "multipliers": self.multipliers.iter().map(fmt_scalar).collect::<Vec<_>>(),
            "terms": terms_to_json(&self.map),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.parts.keys().cloned().collect(), Weights::multiplicative(self.multipliers.clone()))
    }

    /// `phi -> phi(q x)`.
    pub fn f_lin(&self) -> JetOperator {
        let q = self.multipliers.clone();
        JetOperator::from_fn(self.nu, self.order, move |j| {
            Jet::from_terms(
                j.nu,
                j.order,
                j.terms().iter().map(|(m, c)| {
                    let e: Vec<i64> = m.iter().map(|&k| i64::from(k)).collect();
                    (m.clone(), c * q_power(&q, &e))
                }),
            )
        })
    }

    /// `phi -> phi o f`, by direct substitution.
    pub fn substitution(&self) -> JetOperator {
        JetOperator::from_fn(self.nu, self.order, |j| j.substitute(&self.map, self.order))
    }

    /// `F_lin (1 + sum_n B_n)`, assembled from the extracted parts.
    pub fn assembled(&self) -> JetOperator {
        let mut sum = JetOperator::identity(self.nu, self.order);
        for b in self.parts.values() {
            sum = sum.add(&b.operator(self.order));
        }
        self.f_lin().compose(&sum)
    }

    /// Left-form parts `q^n B_n`.
    pub fn left_parts(&self) -> BTreeMap<Letter, JetOperator> {
        self.parts
            .iter()
            .map(|(n, b)| {
                let scale = q_power(&self.multipliers, n.degree().expect("degree letters"));
                (n.clone(), b.operator(self.order).scale(&scale))
            })
            .collect()
    }
}

/// Fails with the first word of weight `<= order - 1` with `q^{||w||} = 1`.
pub fn check_nonresonant(f: &PreparedDiffeo, order: u32) -> Result<()> {
    let weights = f.alphabet().weights;
    let letters: Vec<Letter> = f.parts.keys().cloned().collect();
    for w in contraction_words(&letters, order)? {
        if weights.exp_omega_word(w.letters())?.is_one() {
            return Err(Error::Resonant(format!("({w})")));
        }
    }
    Ok(())
}

/// `Theta = contract(Ne_inv)` and `Theta^{-1} = contract(Ne)` on the left-form parts.
pub fn ne_normalizer(f: &PreparedDiffeo) -> Result<(JetOperator, JetOperator)> {
    let order = f.order;
    if order < 1 {
        return Err(Error::Precondition("truncation order must be at least 1"));
    }
    check_nonresonant(f, order)?;
    let parts = f.left_parts();
    let alphabet = f.alphabet();
    let theta = contract(&catalog::ne_inv(alphabet.clone(), order as usize), &parts, f.nu, order, ComouldOrder::FirstInner)?;
    let theta_inv = contract(&catalog::ne_mould(alphabet, order as usize), &parts, f.nu, order, ComouldOrder::FirstInner)?;
    Ok((theta, theta_inv))
}

/// Formal linearization: `h_i = Theta(x_i)`, and the conjugated map
/// `Theta(F(Theta^{-1}(x_i)))`, which equals `q_i x_i`.
pub fn diffeo_linearize(f: &PreparedDiffeo) -> Result<Normalization> {
    let (theta, theta_inv) = ne_normalizer(f)?;
    let sub = f.substitution();
    let coords = coordinates(f.nu, f.order);
    let normalizer = coords.iter().map(|c| theta.apply(c)).collect();
    let conjugated = coords.iter().map(|c| theta.apply(&sub.apply(&theta_inv.apply(c)))).collect();
    Ok(Normalization { normalizer, conjugated })
}
