//! Vector fields acting as derivations and finite-order differential operators with
//! polynomial coefficients.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::jet::{Jet, JetOperator, Monomial, UNTRUNCATED};
use crate::scalar::Scalar;

/// `sum_i comps[i] d/dx_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub nu: usize,
    pub comps: Vec<Jet>,
}

impl VectorField {
    pub fn new(comps: Vec<Jet>) -> Self {
        VectorField { nu: comps.len(), comps }
    }

    pub fn zero(nu: usize) -> Self {
        VectorField::new((0..nu).map(|_| Jet::zero(nu, UNTRUNCATED)).collect())
    }

    /// `sum_i lambda_i x_i d/dx_i`.
    pub fn linear(lambda: &[Scalar]) -> Self {
        let nu = lambda.len();
        VectorField::new((0..nu).map(|i| Jet::var(nu, UNTRUNCATED, i).scale(&lambda[i])).collect())
    }

    /// Derivation action on a jet, truncated at the jet's order.
    pub fn apply(&self, phi: &Jet) -> Jet {
        let mut out = Jet::zero(self.nu, phi.order);
        for (i, c) in self.comps.iter().enumerate() {
            let d = phi.derivative(i);
            if !d.is_zero() {
                out = out.add(&c.mul(&d));
            }
        }
        out
    }

    pub fn operator(&self, order: u32) -> JetOperator {
        JetOperator::from_fn(self.nu, order, |j| self.apply(j))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> VectorField {
        VectorField::new(self.comps.iter().map(|a| a.scale(c)).collect())
    }

    pub fn truncate(&self, order: u32) -> VectorField {
        VectorField::new(self.comps.iter().map(|a| a.truncate(order)).collect())
    }

    /// Lie bracket `[self, other]`, components `self(other_i) - other(self_i)`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        VectorField::new((0..self.nu).map(|i| self.apply(&other.comps[i]).sub(&other.apply(&self.comps[i]))).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    pub fn to_json(&self) -> Value {
        json!(self.comps.iter().map(Jet::to_json).collect::<Vec<_>>())
    }
}

/// `sum_delta c_delta(x) d^delta`, indexed by the multi-index `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    pub nu: usize,
    pub terms: BTreeMap<Monomial, Jet>,
}

impl DiffOp {
    pub fn zero(nu: usize) -> Self {
        DiffOp { nu, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, delta: Monomial, coef: &Jet) {
        let sum = match self.terms.get(&delta) {
            Some(c) => c.add(coef),
            None => coef.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&delta);
        } else {
            self.terms.insert(delta, sum);
        }
    }

    pub fn apply(&self, phi: &Jet) -> Jet {
        let mut out = Jet::zero(self.nu, phi.order);
        for (delta, c) in &self.terms {
            let d = phi.derivative_multi(delta);
            if !d.is_zero() {
                out = out.add(&c.mul(&d));
            }
        }
        out
    }

    pub fn operator(&self, order: u32) -> JetOperator {
        JetOperator::from_fn(self.nu, order, |j| self.apply(j))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(d, c)| json!({"derivative": d, "coef": c.to_json()})).collect();
        json!(terms)
    }
}

impl From<&VectorField> for DiffOp {
    fn from(x: &VectorField) -> Self {
        let mut op = DiffOp::zero(x.nu);
        for (i, c) in x.comps.iter().enumerate() {
            op.add_term(super::jet::unit(x.nu, i), c);
        }
        op
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn x(i: usize) -> Jet {
        Jet::var(2, UNTRUNCATED, i)
    }

    #[test]
    fn mixed_derivation_on_xy() {
        // D = x^2 d/dx + b x y d/dy on xy gives (1 + b) x^2 y
        let b = int(3);
        let d = VectorField::new(vec![x(0).pow(2), x(0).mul(&x(1)).scale(&b)]);
        let out = d.apply(&x(0).mul(&x(1)).with_order(5));
        assert_eq!(out.coef(&[2, 1]), int(4));
        assert_eq!(out.terms().len(), 1);
    }

    #[test]
    fn bracket_with_linear_part_scales_homogeneous_field() {
        // [X_lin, D_n] = (n . lambda) D_n
        let lambda = [int(2), int(5)];
        let lin = VectorField::linear(&lambda);
        let d = VectorField::new(vec![x(1).pow(2), Jet::zero(2, UNTRUNCATED)]);
        let br = lin.bracket(&d);
        assert_eq!(br, d.scale(&int(8)));
    }

    #[test]
    fn diffop_matches_field() {
        let d = VectorField::new(vec![x(0).pow(2), x(1).mul(&x(0))]);
        let op = DiffOp::from(&d);
        let phi = x(0).pow(2).add(&x(1).pow(3)).with_order(6);
        assert_eq!(op.apply(&phi), d.apply(&phi));
    }
}
