//! Truncated multivariate polynomials and linear operators on them.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::scalar::{fmt_scalar, Scalar};

pub type Monomial = Vec<u32>;

/// Order used for jets that are never truncated.
pub const UNTRUNCATED: u32 = u32::MAX;

pub fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

pub fn unit(nu: usize, i: usize) -> Monomial {
    let mut m = vec![0; nu];
    m[i] = 1;
    m
}

/// All monomials in `nu` variables of total degree at most `max_deg`, by degree then
/// lexicographically.
pub fn monomials(nu: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        of_degree(nu, d, &mut Vec::new(), &mut out);
    }
    out
}

fn of_degree(nu: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if cur.len() + 1 == nu {
        cur.push(d);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    if nu == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=d).rev() {
        cur.push(k);
        of_degree(nu, d - k, cur, out);
        cur.pop();
    }
}

/// Polynomial in `nu` variables with terms of total degree at most `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub nu: usize,
    pub order: u32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Jet {
    pub fn zero(nu: usize, order: u32) -> Self {
        Jet { nu, order, terms: BTreeMap::new() }
    }

    pub fn constant(nu: usize, order: u32, c: Scalar) -> Self {
        Jet::monomial(nu, order, vec![0; nu], c)
    }

    pub fn var(nu: usize, order: u32, i: usize) -> Self {
        Jet::monomial(nu, order, unit(nu, i), Scalar::one())
    }

    pub fn monomial(nu: usize, order: u32, m: Monomial, c: Scalar) -> Self {
        let mut j = Jet::zero(nu, order);
        j.add_term(m, c);
        j
    }

    pub fn from_terms(nu: usize, order: u32, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut j = Jet::zero(nu, order);
        for (m, c) in terms {
            j.add_term(m, c);
        }
        j
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn coef(&self, m: &[u32]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c x^m`, dropping it beyond the truncation order.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.len(), self.nu);
        if c.is_zero() || degree(&m) > self.order {
            return;
        }
        let sum = self.terms.get(&m).cloned().unwrap_or_else(Scalar::zero) + c;
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn truncate(&self, order: u32) -> Jet {
        let order = order.min(self.order);
        Jet::from_terms(self.nu, order, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn with_order(&self, order: u32) -> Jet {
        Jet::from_terms(self.nu, order, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn homogeneous(&self, d: u32) -> Jet {
        Jet::from_terms(self.nu, self.order, self.terms.iter().filter(|(m, _)| degree(m) == d).map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut out = self.truncate(other.order);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Jet {
        Jet::from_terms(self.nu, self.order, self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::zero(self.nu, order);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let m: Monomial = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add_term(m, x * y);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Jet {
        (0..k).fold(Jet::constant(self.nu, self.order, Scalar::one()), |acc, _| acc.mul(self))
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Jet {
        let mut out = Jet::zero(self.nu, self.order);
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut e = m.clone();
                e[i] -= 1;
                out.add_term(e, c * Scalar::from_integer(m[i].into()));
            }
        }
        out
    }

    /// `d^delta` applied to the jet.
    pub fn derivative_multi(&self, delta: &[u32]) -> Jet {
        let mut out = self.clone();
        for (i, &k) in delta.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(i);
            }
        }
        out
    }

    /// `self(g_1, ..., g_nu)`, truncated at the smallest order among the `g_i` and
    /// `order`.
    pub fn substitute(&self, g: &[Jet], order: u32) -> Jet {
        let order = g.iter().map(|j| j.order).fold(order, u32::min);
        let nu_out = g.first().map(|j| j.nu).unwrap_or(self.nu);
        let mut powers: Vec<Vec<Jet>> = g.iter().map(|j| vec![Jet::constant(nu_out, order, Scalar::one()), j.truncate(order)]).collect();
        let mut out = Jet::zero(nu_out, order);
        for (m, c) in &self.terms {
            let mut term = Jet::constant(nu_out, order, c.clone());
            for (i, &k) in m.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty").mul(&g[i].truncate(order));
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Value at a point.
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().zip(x).fold(c.clone(), |acc, (&k, xi)| acc * num::pow(xi.clone(), k as usize)))
            .fold(Scalar::zero(), |a, b| a + b)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(m, c)| json!({"exponents": m, "coef": fmt_scalar(c)})).collect();
        json!(terms)
    }
}

/// A linear operator on jets of order `order`, stored as the images of all monomials.
/// Only degree-nondecreasing operators are represented faithfully.
#[derive(Debug, Clone, PartialEq)]
pub struct JetOperator {
    pub nu: usize,
    pub order: u32,
    images: BTreeMap<Monomial, Jet>,
}

impl JetOperator {
    pub fn from_fn(nu: usize, order: u32, f: impl Fn(&Jet) -> Jet) -> Self {
        let images = monomials(nu, order)
            .into_iter()
            .map(|m| {
                let x = Jet::monomial(nu, order, m.clone(), Scalar::one());
                let image = f(&x).truncate(order).with_order(order);
                (m, image)
            })
            .collect();
        JetOperator { nu, order, images }
    }

    pub fn identity(nu: usize, order: u32) -> Self {
        JetOperator::from_fn(nu, order, |j| j.clone())
    }

    pub fn zero(nu: usize, order: u32) -> Self {
        JetOperator::from_fn(nu, order, |_| Jet::zero(nu, order))
    }

    pub fn image(&self, m: &[u32]) -> &Jet {
        &self.images[m]
    }

    pub fn apply(&self, jet: &Jet) -> Jet {
        let mut out = Jet::zero(self.nu, self.order);
        for (m, c) in jet.terms() {
            if degree(m) <= self.order {
                out = out.add(&self.images[m].scale(c));
            }
        }
        out
    }

    /// `self o other`.
    pub fn compose(&self, other: &JetOperator) -> JetOperator {
        let images = other.images.iter().map(|(m, j)| (m.clone(), self.apply(j))).collect();
        JetOperator { nu: self.nu, order: self.order, images }
    }

    pub fn add(&self, other: &JetOperator) -> JetOperator {
        let images = self.images.iter().map(|(m, j)| (m.clone(), j.add(&other.images[m]))).collect();
        JetOperator { nu: self.nu, order: self.order, images }
    }

    pub fn sub(&self, other: &JetOperator) -> JetOperator {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> JetOperator {
        let images = self.images.iter().map(|(m, j)| (m.clone(), j.scale(c))).collect();
        JetOperator { nu: self.nu, order: self.order, images }
    }

    /// `self += c * other`, in place.
    pub fn add_scaled(&mut self, other: &JetOperator, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, j) in self.images.iter_mut() {
            *j = j.add(&other.images[m].scale(c));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.images.values().all(Jet::is_zero)
    }

    /// First monomial whose images differ.
    pub fn first_difference(&self, other: &JetOperator) -> Option<Monomial> {
        self.images.iter().find(|(m, j)| other.images.get(*m) != Some(*j)).map(|(m, _)| m.clone())
    }
}
