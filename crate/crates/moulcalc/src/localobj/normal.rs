//! Normal forms of prepared vector fields through mould contraction.
//!
//! For `X = X_lin + sum_n D_n`, the operator `Theta = sum_w Na^w D_w` (comould in
//! [`ComouldOrder::FirstOuter`] order) satisfies `Theta X = X_lin Theta`, because
//! `nabla Na = Na x I` and `X_lin D_w - D_w X_lin = omega(||w||) D_w`. `Na` is
//! symetral, so `Theta` is an automorphism and acts as `phi -> phi o h` with
//! `h_i = Theta(x_i)`.

use num::{One, Zero};
use serde_json::{json, Value};

use super::contract::{contract, contraction_words, ComouldOrder};
use super::jet::{degree, Jet, JetOperator};
use super::op::VectorField;
use super::PreparedField;
use crate::catalog;
use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};
use crate::words::Letter;

/// A change of variables `h` and the field it conjugates `X` to.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub normalizer: Vec<Jet>,
    pub conjugated: Vec<Jet>,
}

impl Normalization {
    pub fn to_json(&self) -> Value {
        json!({
            "normalizer": self.normalizer.iter().map(Jet::to_json).collect::<Vec<_>>(),
            "conjugated": self.conjugated.iter().map(Jet::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Coordinate jets `x_1, ..., x_nu` at order `order`.
pub fn coordinates(nu: usize, order: u32) -> Vec<Jet> {
    (0..nu).map(|i| Jet::var(nu, order, i)).collect()
}

fn check_order(order: u32) -> Result<()> {
    if order < 1 {
        return Err(Error::Precondition("truncation order must be at least 1"));
    }
    Ok(())
}

/// Fails with the first word of weight `<= order - 1` whose `omega` vanishes.
pub fn check_nonresonant(x: &PreparedField, order: u32) -> Result<()> {
    let weights = x.alphabet().weights;
    let letters: Vec<Letter> = x.parts.keys().cloned().collect();
    for w in contraction_words(&letters, order)? {
        if weights.omega_word(w.letters())?.is_zero() {
            return Err(Error::Resonant(format!("({w})")));
        }
    }
    Ok(())
}

/// `Theta = contract(Na)` and its inverse `contract(Na^{-1})`.
pub fn na_normalizer(x: &PreparedField, order: u32) -> Result<(JetOperator, JetOperator)> {
    check_order(order)?;
    check_nonresonant(x, order)?;
    let na = catalog::na_mould(x.alphabet(), order as usize);
    let parts = x.part_operators(order);
    let theta = contract(&na, &parts, x.nu, order, ComouldOrder::FirstOuter)?;
    let theta_inv = contract(&na.mul_inverse()?, &parts, x.nu, order, ComouldOrder::FirstOuter)?;
    Ok((theta, theta_inv))
}

/// Formal linearization: `h_i = Theta(x_i)` and the conjugated field
/// `Y_i = Theta(X(Theta^{-1}(x_i)))`, which equals `lambda_i x_i`.
pub fn linearize(x: &PreparedField, order: u32) -> Result<Normalization> {
    let (theta, theta_inv) = na_normalizer(x, order)?;
    let field = x.full();
    let coords = coordinates(x.nu, order);
    let normalizer = coords.iter().map(|c| theta.apply(c)).collect();
    let conjugated = coords.iter().map(|c| theta.apply(&field.apply(&theta_inv.apply(c)))).collect();
    Ok(Normalization { normalizer, conjugated })
}

/// `X_tram = X_lin + sum_w Tram^w D_w`, truncated at `order`.
pub fn prenormal_tram(x: &PreparedField, order: u32) -> Result<VectorField> {
    check_order(order)?;
    let tram = catalog::tram(x.alphabet(), order as usize)?;
    let op = contract(&tram, &x.part_operators(order), x.nu, order, ComouldOrder::FirstOuter)?;
    let coords = coordinates(x.nu, order);
    let identity_part: Scalar = tram.eval(&crate::words::Word::empty())?;
    Ok(VectorField::new(
        coords.iter().enumerate().map(|(i, c)| op.apply(c).sub(&c.scale(&identity_part)).add(&c.scale(&x.lambda[i]))).collect(),
    ))
}

/// Splits the nonlinear part of a field into homogeneous parts keyed by `n = m - e_i`.
fn homogeneous_parts(x: &VectorField, nu: usize) -> std::collections::BTreeMap<Vec<i64>, VectorField> {
    let mut out: std::collections::BTreeMap<Vec<i64>, VectorField> = std::collections::BTreeMap::new();
    for (i, c) in x.comps.iter().enumerate() {
        for (m, coef) in c.terms() {
            if degree(m) < 2 {
                continue;
            }
            let n: Vec<i64> = m.iter().enumerate().map(|(k, &e)| e as i64 - i64::from(k == i)).collect();
            let part = out.entry(n).or_insert_with(|| VectorField::zero(nu));
            part.comps[i].add_term(m.clone(), coef.clone());
        }
    }
    out
}

/// `e^{ad Theta} X = sum_k ad_Theta^k X / k!`, truncated at `order`.
fn exp_ad(theta: &VectorField, x: &VectorField, order: u32) -> VectorField {
    let mut term = x.truncate(order);
    let mut out = term.clone();
    for k in 1..=order as usize {
        term = theta.bracket(&term).truncate(order);
        if term.is_zero() {
            break;
        }
        out = out.add(&term.scale(&factorial(k).recip()));
    }
    out
}

/// The iteration that defines the prenormal form, run directly on jets: repeatedly
/// conjugate by `exp(Theta)` with `Theta = sum D_n / omega(n)` over the nonresonant
/// homogeneous parts of the current field.
pub fn tram_iteration(x: &PreparedField, order: u32) -> Result<VectorField> {
    check_order(order)?;
    let lin = x.linear();
    let mut field = x.full().truncate(order);
    for _ in 0..order {
        let nonlinear = field.sub(&lin);
        let mut theta = VectorField::zero(x.nu);
        for (n, d) in homogeneous_parts(&nonlinear, x.nu) {
            let om = x.omega(&Letter::Deg(n))?;
            if !om.is_zero() {
                theta = theta.add(&d.scale(&(Scalar::one() / om)));
            }
        }
        if theta.is_zero() {
            break;
        }
        field = exp_ad(&theta, &field, order);
    }
    Ok(field)
}

/// Monomials of the nonlinear part of a field: `(direction, exponents)` pairs.
pub fn nonlinear_support(x: &VectorField) -> Vec<(usize, Vec<u32>)> {
    let mut out = Vec::new();
    for (i, c) in x.comps.iter().enumerate() {
        for m in c.terms().keys() {
            if degree(m) >= 2 {
                out.push((i, m.clone()));
            }
        }
    }
    out
}

/// `m . lambda - lambda_i` for the monomial `x^m` in component `i`.
pub fn monomial_weight(lambda: &[Scalar], i: usize, m: &[u32]) -> Scalar {
    m.iter().zip(lambda).fold(Scalar::zero(), |acc, (&k, l)| acc + Scalar::from_integer(k.into()) * l) - &lambda[i]
}
