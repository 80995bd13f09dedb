//! Classical order-by-order normalization, independent of moulds and comoulds.
//!
//! Fields: look for `h(y) = y + eta(y)` and `Y = Lambda y + Y_nl` with
//! `X(h(y)) = Dh(y) Y(y)`. At degree `k` in component `i` and monomial `y^m`,
//! `(m . lambda - lambda_i) eta_{i,m} + Y_{i,m} = R_{i,m}` where `R` collects
//! `X_nl(h)` minus `sum_j d_j eta_i Y_nl,j`, both known from lower degrees.
//!
//! Diffeomorphisms: look for `h` with `f(h(y)) = h(q y)`, so that
//! `(q^m - q_i) eta_{i,m} = [f_nl(h)]_{i,m}`.

use num::Zero;

use super::diffeo::PreparedDiffeo;
use super::jet::{degree, Jet};
use super::normal::{coordinates, monomial_weight, Normalization};
use super::PreparedField;
use crate::error::{Error, Result};
use crate::scalar::{fmt_scalar, powi, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Every obstruction is an error.
    Linearize,
    /// Obstructed resonant terms are kept in the normal form.
    Dulac,
}

fn resonance_error(i: usize, m: &[u32], r: &Scalar) -> Error {
    Error::Resonant(format!("monomial {m:?} in component {i} with coefficient {}", fmt_scalar(r)))
}

/// Solves the homological equations degree by degree up to `order`. In linearize
/// mode a resonant monomial is an error only if its right-hand side is nonzero.
pub fn oracle_normalize(x: &PreparedField, order: u32, mode: OracleMode) -> Result<Normalization> {
    let nu = x.nu;
    let coords = coordinates(nu, order);
    let x_nl: Vec<Jet> = x.nonlinear().comps.iter().map(|c| c.truncate(order)).collect();
    let mut eta: Vec<Jet> = (0..nu).map(|_| Jet::zero(nu, order)).collect();
    let mut y_nl: Vec<Jet> = (0..nu).map(|_| Jet::zero(nu, order)).collect();
    for k in 2..=order {
        let h: Vec<Jet> = coords.iter().zip(&eta).map(|(c, e)| c.add(e)).collect();
        let mut new_eta = Vec::with_capacity(nu);
        let mut new_y = Vec::with_capacity(nu);
        for i in 0..nu {
            let mut rhs = x_nl[i].substitute(&h, order).homogeneous(k);
            for (j, yj) in y_nl.iter().enumerate() {
                rhs = rhs.sub(&eta[i].derivative(j).mul(yj).homogeneous(k));
            }
            let mut e = Jet::zero(nu, order);
            let mut y = Jet::zero(nu, order);
            for (m, r) in rhs.terms() {
                let d = monomial_weight(&x.lambda, i, m);
                if !d.is_zero() {
                    e.add_term(m.clone(), r / d);
                } else {
                    match mode {
                        OracleMode::Linearize => return Err(resonance_error(i, m, r)),
                        OracleMode::Dulac => y.add_term(m.clone(), r.clone()),
                    }
                }
            }
            new_eta.push(e);
            new_y.push(y);
        }
        for i in 0..nu {
            eta[i] = eta[i].add(&new_eta[i]);
            y_nl[i] = y_nl[i].add(&new_y[i]);
        }
    }
    let normalizer = coords.iter().zip(&eta).map(|(c, e)| c.add(e)).collect();
    let conjugated = coords.iter().zip(&y_nl).enumerate().map(|(i, (c, y))| c.scale(&x.lambda[i]).add(y)).collect();
    Ok(Normalization { normalizer, conjugated })
}

/// Solves `f(h(y)) = h(q y)` degree by degree up to the diffeo's order.
pub fn diffeo_oracle(f: &PreparedDiffeo) -> Result<Vec<Jet>> {
    let (nu, order) = (f.nu, f.order);
    let q = &f.multipliers;
    let coords = coordinates(nu, order);
    let f_nl: Vec<Jet> = f.map.iter().enumerate().map(|(i, c)| c.sub(&coords[i].scale(&q[i]))).collect();
    let mut eta: Vec<Jet> = (0..nu).map(|_| Jet::zero(nu, order)).collect();
    for k in 2..=order {
        let h: Vec<Jet> = coords.iter().zip(&eta).map(|(c, e)| c.add(e)).collect();
        let mut new_eta = Vec::with_capacity(nu);
        for i in 0..nu {
            let rhs = f_nl[i].substitute(&h, order).homogeneous(k);
            let mut e = Jet::zero(nu, order);
            for (m, r) in rhs.terms() {
                debug_assert_eq!(degree(m), k);
                let qm = m.iter().zip(q).fold(Scalar::from_integer(1.into()), |acc, (&a, x)| acc * powi(x, i64::from(a)));
                let d = qm - &q[i];
                if d.is_zero() {
                    return Err(resonance_error(i, m, r));
                }
                e.add_term(m.clone(), r / d);
            }
            new_eta.push(e);
        }
        for i in 0..nu {
            eta[i] = eta[i].add(&new_eta[i]);
        }
    }
    Ok(coords.iter().zip(&eta).map(|(c, e)| c.add(e)).collect())
}
