//! Exact rational scalars and the weight context that turns letters into numbers.
//!
//! Additive weights come from a spectrum: a degree vector `n` has weight
//! `n . lambda`. Exponentials of weights never appear as floats: `e^{n . lambda}`
//! is the Laurent monomial `q^n = q_1^{n_1} ... q_v^{n_v}` in rational multipliers.

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::words::Letter;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn rat(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn factorial(n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| acc * int(k))
}

/// Integer power with negative exponents allowed (base must be nonzero then).
pub fn powi(base: &Scalar, e: i64) -> Scalar {
    let p = num::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Canonical `p/q` form: `q > 0`, reduced, denominator always printed.
pub fn fmt_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(p, q))
        }
        None => Ok(Scalar::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Spectrum (additive weights) and multipliers (their exponentials).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Weights {
    pub spectrum: Vec<Scalar>,
    pub multipliers: Vec<Scalar>,
}

impl Weights {
    pub fn new(spectrum: Vec<Scalar>, multipliers: Vec<Scalar>) -> Self {
        Weights { spectrum, multipliers }
    }

    pub fn additive(spectrum: Vec<Scalar>) -> Self {
        Weights { spectrum, multipliers: Vec::new() }
    }

    pub fn multiplicative(multipliers: Vec<Scalar>) -> Self {
        Weights { spectrum: Vec::new(), multipliers }
    }

    /// Additive weight omega of a letter.
    pub fn omega(&self, a: &Letter) -> Result<Scalar> {
        match a {
            Letter::Deg(n) => {
                if n.len() > self.spectrum.len() {
                    return Err(Error::DimensionMismatch(n.len(), self.spectrum.len()));
                }
                Ok(n.iter().zip(&self.spectrum).fold(Scalar::zero(), |acc, (&k, l)| acc + int(k) * l))
            }
            Letter::Sym { weight, .. } => Ok(weight.clone()),
        }
    }

    /// Sum of the weights of all letters of a word.
    pub fn omega_word(&self, w: &[Letter]) -> Result<Scalar> {
        w.iter().try_fold(Scalar::zero(), |acc, a| Ok(acc + self.omega(a)?))
    }

    /// `e^{omega(a)}` as the monomial `q^n`.
    pub fn exp_omega(&self, a: &Letter) -> Result<Scalar> {
        match a {
            Letter::Deg(n) => {
                if n.len() > self.multipliers.len() {
                    return Err(Error::DimensionMismatch(n.len(), self.multipliers.len()));
                }
                Ok(n.iter().zip(&self.multipliers).fold(Scalar::one(), |acc, (&k, q)| acc * powi(q, k)))
            }
            Letter::Sym { .. } => Err(Error::NoMultiplier(a.to_string())),
        }
    }

    pub fn exp_omega_word(&self, w: &[Letter]) -> Result<Scalar> {
        w.iter().try_fold(Scalar::one(), |acc, a| Ok(acc * self.exp_omega(a)?))
    }

    /// Random weights of dimension `dim`: spectrum entries are nonzero integers
    /// from the 32-bit box, multipliers are integers with `|q| >= 2`.
    pub fn random<R: Rng>(rng: &mut R, dim: usize) -> Self {
        let spectrum = (0..dim).map(|_| int(random_nonzero(rng, 1 << 31))).collect();
        let multipliers = (0..dim)
            .map(|_| {
                let q = rng.gen_range(2..=(1i64 << 16));
                int(if rng.gen_bool(0.5) { q } else { -q })
            })
            .collect();
        Weights { spectrum, multipliers }
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len().max(self.multipliers.len())
    }
}

pub fn random_nonzero<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

/// Random rational with small numerator and denominator, used for test moulds and jets.
pub fn random_small<R: Rng>(rng: &mut R) -> Scalar {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

pub fn is_zero(x: &Scalar) -> bool {
    x.is_zero()
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_format() {
        assert_eq!(fmt_scalar(&rat(2, -4)), "-1/2");
        assert_eq!(fmt_scalar(&int(3)), "3/1");
        assert_eq!(parse_scalar("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn exp_omega_is_a_laurent_monomial() {
        let w = Weights::multiplicative(vec![int(2), int(3)]);
        let a = Letter::Deg(vec![-1, 2]);
        assert_eq!(w.exp_omega(&a).unwrap(), rat(9, 2));
    }

    #[test]
    fn omega_is_a_dot_product() {
        let w = Weights::additive(vec![int(2), int(5)]);
        assert_eq!(w.omega(&Letter::Deg(vec![-1, 2])).unwrap(), int(8));
    }
}
