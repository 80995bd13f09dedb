//! Alternility and symetrility.
//!
//! The letters are scalar variables. A contracted slot `x*y` is not evaluated at a
//! sum: it stands for the divided difference
//! `M^{..,x*y,..} = (M^{..,x,..} - M^{..,y,..}) / (x - y)`, applied to one star at a time.
//!
//! Two evaluators exist. The scalar one instantiates the variables at random
//! rationals and takes divided differences numerically, for moulds given by rules
//! over abstract letters (the variable is the letter weight). The polynomial one
//! works on truncated generating series, where the divided difference of `t^e` is
//! exactly `sum_{a+b=e-1} x^a y^b`.

use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_point, SymmetryKind, SymmetryReport, RETRY_CAP};
use crate::catalog::Poly;
use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::scalar::{fmt_scalar, Scalar};
use crate::words::{csh_patterns, shuffle_patterns, Letter, Slot, Word};

/// A position in an il-word: a plain variable or a star of two variables.
#[derive(Debug, Clone, PartialEq)]
pub enum IlSlot {
    Var(Scalar),
    Star(Scalar, Scalar),
}

/// Which star is expanded first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarOrder {
    LeftToRight,
    RightToLeft,
}

fn var_word(values: &[Scalar]) -> Word {
    Word(values.iter().map(|v| Letter::sym("v", v.clone())).collect())
}

/// Value of `M` on a word with starred slots.
pub fn eval_slots(m: &Mould, slots: &[IlSlot], order: StarOrder) -> Result<Scalar> {
    let pos = match order {
        StarOrder::LeftToRight => slots.iter().position(|s| matches!(s, IlSlot::Star(..))),
        StarOrder::RightToLeft => slots.iter().rposition(|s| matches!(s, IlSlot::Star(..))),
    };
    let Some(k) = pos else {
        let values: Vec<Scalar> = slots
            .iter()
            .map(|s| match s {
                IlSlot::Var(x) => x.clone(),
                IlSlot::Star(..) => unreachable!(),
            })
            .collect();
        return m.eval(&var_word(&values));
    };
    let IlSlot::Star(x, y) = &slots[k] else { unreachable!() };
    if x == y {
        return Err(Error::SampleCollision(0));
    }
    let mut with_x = slots.to_vec();
    with_x[k] = IlSlot::Var(x.clone());
    let mut with_y = slots.to_vec();
    with_y[k] = IlSlot::Var(y.clone());
    Ok((eval_slots(m, &with_x, order)? - eval_slots(m, &with_y, order)?) / (x - y))
}

fn pattern_slots(pattern: &[Slot], u: &[Scalar], v: &[Scalar]) -> Vec<IlSlot> {
    pattern
        .iter()
        .map(|s| match *s {
            Slot::Left(i) => IlSlot::Var(u[i].clone()),
            Slot::Right(j) => IlSlot::Var(v[j].clone()),
            Slot::Star(i, j) => IlSlot::Star(u[i].clone(), v[j].clone()),
        })
        .collect()
}

/// il-shuffle sum minus the expected value, at one point.
pub fn il_residual(m: &Mould, kind: SymmetryKind, u: &[Scalar], v: &[Scalar], order: StarOrder) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for p in csh_patterns(u.len(), v.len()) {
        acc += eval_slots(m, &pattern_slots(&p, u, v), order)?;
    }
    if kind == SymmetryKind::Symetril {
        acc -= m.eval(&var_word(u))? * m.eval(&var_word(v))?;
    }
    Ok(acc)
}

fn distinct(values: &[Scalar]) -> bool {
    values.iter().enumerate().all(|(i, x)| values[..i].iter().all(|y| x != y))
}

/// Scalar il check at `samples` random points per shape.
pub fn check_il(m: &Mould, kind: SymmetryKind, max_len: usize, seed: u64, samples: usize) -> Result<SymmetryReport> {
    if !matches!(kind, SymmetryKind::Alternil | SymmetryKind::Symetril) {
        return Err(Error::Precondition("check_il handles alternil and symetril only"));
    }
    let mut report = SymmetryReport::new(kind, max_len);
    let e = Word::empty();
    report.record(&e, &e, m.eval(&e)? - kind.empty_value(), None);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (n, k) in super::shapes(max_len) {
        for s in 0..samples {
            let mut tries = 0;
            let (values, r) = loop {
                tries += 1;
                if tries > RETRY_CAP {
                    return Err(Error::SampleCollision(RETRY_CAP));
                }
                let values: Vec<Scalar> = (0..n + k).map(|_| random_point(&mut rng)).collect();
                if !distinct(&values) {
                    continue;
                }
                match il_residual(m, kind, &values[..n], &values[n..], StarOrder::LeftToRight) {
                    Ok(r) => break (values, r),
                    Err(Error::PoleAtWord(_)) | Err(Error::SampleCollision(_)) => continue,
                    Err(e) => return Err(e),
                }
            };
            let line = format!("shape ({n},{k}) sample {s}: v=[{}]", values.iter().map(fmt_scalar).collect::<Vec<_>>().join(","));
            report.record(&var_word(&values[..n]), &var_word(&values[n..]), r, Some(line.clone()));
            report.samples.push(line);
        }
    }
    Ok(report)
}

// ----------------------------------------------------------------------
// polynomial evaluator

fn poly_mul(a: &Poly, b: &Poly, nvars: usize, max_deg: u32) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = (0..nvars).map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0)).collect();
            if e.iter().sum::<u32>() > max_deg {
                continue;
            }
            let c = out.entry(e).or_insert_with(Scalar::zero);
            *c += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Substitute the slots of a pattern into the generating polynomial of matching length.
/// Plain slot `k` carries variable index `var`; a star slot carries two indices and
/// replaces `t^e` by its divided difference.
fn substitute(p: &Poly, slots: &[(usize, Option<usize>)], nvars: usize, max_deg: u32) -> Poly {
    let mut out = Poly::new();
    for (exps, c) in p {
        let mut term = Poly::new();
        term.insert(vec![0; nvars], c.clone());
        for (slot, &e) in slots.iter().zip(exps) {
            let mut factor = Poly::new();
            match *slot {
                (x, None) => {
                    let mut m = vec![0; nvars];
                    m[x] = e;
                    factor.insert(m, Scalar::one());
                }
                (x, Some(y)) => {
                    for a in 0..e {
                        let mut m = vec![0; nvars];
                        m[x] += a;
                        m[y] += e - 1 - a;
                        *factor.entry(m).or_insert_with(Scalar::zero) += Scalar::one();
                    }
                }
            }
            term = poly_mul(&term, &factor, nvars, max_deg);
            if term.is_empty() {
                break;
            }
        }
        for (m, c) in term {
            *out.entry(m).or_insert_with(Scalar::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// il check on generating polynomials `series(r)` in `r` variables, each truncated at
/// exponent `cap - 1` per variable. Only monomials of total degree `<= cap - 2` are
/// compared; higher ones can miss contributions cut off by the truncation.
///
/// `Alternal` and `Symetral` are accepted too and use plain shuffles.
pub fn check_il_poly<F>(series: F, kind: SymmetryKind, max_len: usize, cap: u32) -> Result<SymmetryReport>
where
    F: Fn(usize) -> Result<Poly>,
{
    if matches!(kind, SymmetryKind::Alternel | SymmetryKind::Symetrel) {
        return Err(Error::Precondition("generating series carry il-type or plain symmetries"));
    }
    let mut report = SymmetryReport::new(kind, max_len);
    let max_deg = cap.saturating_sub(2);
    let p0 = series(0)?;
    let empty = p0.get(&Vec::new()).cloned().unwrap_or_else(Scalar::zero);
    let e = Word::empty();
    report.record(&e, &e, empty - kind.empty_value(), None);
    let polys: Vec<Poly> = (0..=max_len).map(&series).collect::<Result<_>>()?;
    for (n, k) in super::shapes(max_len) {
        let nvars = n + k;
        let mut acc = Poly::new();
        let patterns = if kind.is_contracting() { csh_patterns(n, k) } else { shuffle_patterns(n, k) };
        for pattern in patterns {
            let slots: Vec<(usize, Option<usize>)> = pattern
                .iter()
                .map(|s| match *s {
                    Slot::Left(i) => (i, None),
                    Slot::Right(j) => (n + j, None),
                    Slot::Star(i, j) => (i, Some(n + j)),
                })
                .collect();
            for (m, c) in substitute(&polys[slots.len()], &slots, nvars, max_deg) {
                *acc.entry(m).or_insert_with(Scalar::zero) += c;
            }
        }
        if !kind.is_primitive() {
            let shift = |p: &Poly, offset: usize| -> Poly {
                p.iter()
                    .map(|(e, c)| {
                        let mut m = vec![0; nvars];
                        for (i, &x) in e.iter().enumerate() {
                            m[offset + i] = x;
                        }
                        (m, c.clone())
                    })
                    .collect()
            };
            for (m, c) in poly_mul(&shift(&polys[n], 0), &shift(&polys[k], n), nvars, max_deg) {
                *acc.entry(m).or_insert_with(Scalar::zero) -= c;
            }
        }
        acc.retain(|m, c| !c.is_zero() && m.iter().sum::<u32>() <= max_deg);
        let names = |range: std::ops::Range<usize>| Word(range.map(|i| Letter::sym(&format!("v{}", i + 1), Scalar::zero())).collect());
        let residual = acc.values().next().cloned().unwrap_or_else(Scalar::zero);
        report.record(&names(0..n), &names(n..nvars), residual, acc.keys().next().map(|m| format!("monomial {m:?}")));
    }
    Ok(report)
}
