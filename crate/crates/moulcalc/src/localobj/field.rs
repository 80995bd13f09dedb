//! Vector fields in prepared form: diagonal linear part plus homogeneous derivations.

use std::collections::BTreeMap;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::jet::{degree, Jet, JetOperator, Monomial, UNTRUNCATED};
use super::op::VectorField;
use crate::error::{Error, Result};
use crate::mould::Alphabet;
use crate::scalar::{fmt_scalar, int, parse_scalar, Scalar, Weights};
use crate::words::{Letter, Word};

/// `X = sum lambda_i x_i d/dx_i + sum_n D_n` with `D_n(x^m)` a multiple of `x^{m+n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedField {
    pub nu: usize,
    pub lambda: Vec<Scalar>,
    pub parts: BTreeMap<Letter, VectorField>,
}

/// A term `coef x^exponents` in component `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub coef: Scalar,
    pub exponents: Monomial,
    pub direction: usize,
}

/// Splits polynomial components into homogeneous parts keyed by `n = m - e_i`.
/// Linear terms may be given; they must match the diagonal `lambda`.
pub(crate) fn split_terms(nu: usize, linear: &[Scalar], terms: &[RawTerm]) -> Result<BTreeMap<Letter, Vec<Jet>>> {
    let mut linear_seen: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut parts: BTreeMap<Letter, Vec<Jet>> = BTreeMap::new();
    for t in terms {
        if t.exponents.len() != nu || t.direction >= nu {
            return Err(Error::DimensionMismatch(t.exponents.len().max(t.direction + 1), nu));
        }
        if t.coef.is_zero() {
            continue;
        }
        match degree(&t.exponents) {
            0 => return Err(Error::NotLocal(format!("constant term in component {}", t.direction))),
            1 => {
                let j = t.exponents.iter().position(|&k| k == 1).expect("degree one");
                if j != t.direction {
                    return Err(Error::NotPrepared(format!("off-diagonal linear term x_{j} in component {}", t.direction)));
                }
                *linear_seen.entry(j).or_insert_with(Scalar::zero) += &t.coef;
            }
            _ => {
                let n: Vec<i64> = t.exponents.iter().enumerate().map(|(k, &e)| e as i64 - i64::from(k == t.direction)).collect();
                let comps = parts.entry(Letter::Deg(n)).or_insert_with(|| (0..nu).map(|_| Jet::zero(nu, UNTRUNCATED)).collect());
                comps[t.direction].add_term(t.exponents.clone(), t.coef.clone());
            }
        }
    }
    for (j, c) in linear_seen {
        if c != linear[j] {
            return Err(Error::NotPrepared(format!(
                "linear coefficient {} of x_{j} differs from the diagonal entry {}",
                fmt_scalar(&c),
                fmt_scalar(&linear[j])
            )));
        }
    }
    parts.retain(|_, comps| comps.iter().any(|c| !c.is_zero()));
    Ok(parts)
}

pub(crate) fn terms_from_json(v: &Value) -> Result<(usize, Vec<RawTerm>)> {
    let nu = v["nu"].as_u64().ok_or_else(|| Error::Parse("missing \"nu\"".into()))? as usize;
    let mut terms = Vec::new();
    for t in v["terms"].as_array().ok_or_else(|| Error::Parse("missing \"terms\"".into()))? {
        let coef = scalar_from_json(&t["coef"])?;
        let exponents = t["exponents"]
            .as_array()
            .ok_or_else(|| Error::Parse("term without \"exponents\"".into()))?
            .iter()
            .map(|e| e.as_u64().map(|k| k as u32).ok_or_else(|| Error::Parse(format!("bad exponent {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let direction = t["direction"].as_u64().ok_or_else(|| Error::Parse("term without \"direction\"".into()))? as usize;
        terms.push(RawTerm { coef, exponents, direction });
    }
    Ok((nu, terms))
}

pub(crate) fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => n.as_i64().map(int).ok_or_else(|| Error::Parse(format!("non-integer number {n}; use a \"p/q\" string"))),
        _ => Err(Error::Parse(format!("expected a scalar, got {v}"))),
    }
}

pub(crate) fn scalars_from_json(v: &Value, key: &str) -> Result<Vec<Scalar>> {
    v[key].as_array().ok_or_else(|| Error::Parse(format!("missing \"{key}\"")))?.iter().map(scalar_from_json).collect()
}

pub(crate) fn terms_to_json(comps: &[Jet]) -> Vec<Value> {
    let mut out = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        for (m, x) in c.terms() {
            out.push(json!({"coef": fmt_scalar(x), "exponents": m, "direction": i}));
        }
    }
    out
}

impl PreparedField {
    pub fn decompose(nu: usize, lambda: Vec<Scalar>, terms: &[RawTerm]) -> Result<Self> {
        if lambda.len() != nu {
            return Err(Error::DimensionMismatch(lambda.len(), nu));
        }
        let parts = split_terms(nu, &lambda, terms)?
            .into_iter()
            .map(|(n, comps)| {
                if !n.is_admissible() {
                    return Err(Error::InadmissibleDegree(n.degree().unwrap_or_default().to_vec()));
                }
                Ok((n, VectorField::new(comps)))
            })
            .collect::<Result<_>>()?;
        Ok(PreparedField { nu, lambda, parts })
    }

    /// Prepared field from the components of `X`, linear part included.
    pub fn from_components(lambda: Vec<Scalar>, comps: &[Jet]) -> Result<Self> {
        let terms: Vec<RawTerm> = comps
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.terms().iter().map(move |(m, x)| RawTerm { coef: x.clone(), exponents: m.clone(), direction: i }))
            .collect();
        PreparedField::decompose(lambda.len(), lambda, &terms)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (nu, terms) = terms_from_json(v)?;
        PreparedField::decompose(nu, scalars_from_json(v, "lambda")?, &terms)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nu": self.nu,
            "lambda": self.lambda.iter().map(fmt_scalar).collect::<Vec<_>>(),
            "terms": terms_to_json(&self.full().comps),
        })
    }

    /// The alphabet `A(X)` with additive weights `lambda`.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.parts.keys().cloned().collect(), Weights::additive(self.lambda.clone()))
    }

    pub fn linear(&self) -> VectorField {
        VectorField::linear(&self.lambda)
    }

    pub fn nonlinear(&self) -> VectorField {
        self.parts.values().fold(VectorField::zero(self.nu), |acc, d| acc.add(d))
    }

    pub fn full(&self) -> VectorField {
        self.linear().add(&self.nonlinear())
    }

    pub fn part_operators(&self, order: u32) -> BTreeMap<Letter, JetOperator> {
        self.parts.iter().map(|(n, d)| (n.clone(), d.operator(order))).collect()
    }

    /// `omega(n) = n . lambda`.
    pub fn omega(&self, n: &Letter) -> Result<Scalar> {
        Weights::additive(self.lambda.clone()).omega(n)
    }

    /// Random field with every monomial of degree `2..=max_degree` in every component
    /// present with probability `density`, coefficients small nonzero rationals.
    pub fn random(seed: u64, lambda: Vec<Scalar>, max_degree: u32, density: f64) -> Self {
        let nu = lambda.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for m in super::jet::monomials(nu, max_degree) {
            if degree(&m) < 2 {
                continue;
            }
            for i in 0..nu {
                if rng.gen_bool(density) {
                    let p = crate::scalar::random_nonzero(&mut rng, 5);
                    let q = rng.gen_range(1..=4);
                    terms.push(RawTerm { coef: crate::scalar::rat(p, q), exponents: m.clone(), direction: i });
                }
            }
        }
        PreparedField::decompose(nu, lambda, &terms).expect("random terms are prepared")
    }
}

/// All nonempty words over `A(X)` of length at most `max_len` with `omega(||w||) = 0`.
pub fn resonance_scan(x: &PreparedField, max_len: usize) -> Result<Vec<Word>> {
    let alphabet = x.alphabet();
    let mut out = Vec::new();
    for w in alphabet.words(max_len) {
        if !w.is_empty() && alphabet.weights.omega_word(w.letters())?.is_zero() {
            out.push(w);
        }
    }
    Ok(out)
}

/// All nonempty words over `letters` with total degree `sum |n_k| <= max_weight`. Every
/// letter must have total degree at least one.
pub fn words_by_weight(letters: &[Letter], max_weight: i64) -> Result<Vec<Word>> {
    let weights: Vec<i64> = letters
        .iter()
        .map(|a| a.total_degree().filter(|&d| d >= 1).ok_or(Error::InadmissibleDegree(a.degree().unwrap_or_default().to_vec())))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut layer = vec![(Word::empty(), 0i64)];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (w, s) in &layer {
            for (a, &d) in letters.iter().zip(&weights) {
                if s + d <= max_weight {
                    let v = w.push(a.clone());
                    out.push(v.clone());
                    next.push((v, s + d));
                }
            }
        }
        layer = next;
    }
    Ok(out)
}
