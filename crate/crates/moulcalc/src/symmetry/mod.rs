//! Brute-force symmetry checkers.
//!
//! A check enumerates factor pairs `(u, v)` with `|u| + |v| <= L` and compares the
//! (contracting) shuffle sum of the mould against zero or against `M^u M^v`.
//!
//! Two enumeration modes exist. [`CheckMode::Fixed`] walks every pair of words over
//! the mould's own alphabet. [`CheckMode::Sampled`] treats the letters as generic:
//! for each shape `(n, m)` it uses the distinct unit letters `e_1, ..., e_{n+m}`
//! and re-instantiates the mould at random weights, so that a shuffle identity
//! between rational functions of the weights is tested at random points.

pub mod coproduct;
pub mod il;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mould::{Alphabet, Mould};
use crate::scalar::{fmt_scalar, int, random_nonzero, Scalar, Weights};
use crate::words::{contracting_shuffle, shuffle, Letter, Word};

pub use coproduct::{coproduct_delta, coproduct_delta_star, grouplike_residual, primitive_residual, Coproduct, TensorElement};

/// Retry cap when a random sample hits a pole or a collision.
pub const RETRY_CAP: usize = 100;
/// Random weight samples per shape in sampled mode.
pub const DEFAULT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryKind {
    Alternal,
    Symetral,
    Alternel,
    Symetrel,
    Alternil,
    Symetril,
}

impl SymmetryKind {
    pub fn name(self) -> &'static str {
        match self {
            SymmetryKind::Alternal => "alternal",
            SymmetryKind::Symetral => "symetral",
            SymmetryKind::Alternel => "alternel",
            SymmetryKind::Symetrel => "symetrel",
            SymmetryKind::Alternil => "alternil",
            SymmetryKind::Symetril => "symetril",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "alternal" => SymmetryKind::Alternal,
            "symetral" => SymmetryKind::Symetral,
            "alternel" => SymmetryKind::Alternel,
            "symetrel" => SymmetryKind::Symetrel,
            "alternil" => SymmetryKind::Alternil,
            "symetril" => SymmetryKind::Symetril,
            _ => return Err(Error::Parse(format!("unknown symmetry {s:?}"))),
        })
    }

    /// Primitive-type (sum vanishes) as opposed to group-like (sum factors).
    pub fn is_primitive(self) -> bool {
        matches!(self, SymmetryKind::Alternal | SymmetryKind::Alternel | SymmetryKind::Alternil)
    }

    pub fn is_contracting(self) -> bool {
        !matches!(self, SymmetryKind::Alternal | SymmetryKind::Symetral)
    }

    /// Value the mould must take on the empty word.
    pub fn empty_value(self) -> Scalar {
        if self.is_primitive() {
            Scalar::zero()
        } else {
            Scalar::one()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub left: Word,
    pub right: Word,
    pub residual: Scalar,
    /// Weights in force when the residual was found (sampled mode).
    pub sample: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub kind: SymmetryKind,
    pub max_len: usize,
    pub verdict: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<Counterexample>,
    /// Sample points used, one line each.
    pub samples: Vec<String>,
}

impl SymmetryReport {
    fn new(kind: SymmetryKind, max_len: usize) -> Self {
        SymmetryReport { kind, max_len, verdict: true, pairs_checked: 0, counterexample: None, samples: Vec::new() }
    }

    fn record(&mut self, left: &Word, right: &Word, residual: Scalar, sample: Option<String>) {
        self.pairs_checked += 1;
        if !residual.is_zero() && self.counterexample.is_none() {
            self.verdict = false;
            self.counterexample = Some(Counterexample { left: left.clone(), right: right.clone(), residual, sample });
        }
    }

    pub fn to_json(&self) -> Value {
        let ce = self.counterexample.as_ref().map(|c| {
            json!({
                "left": c.left.to_string(),
                "right": c.right.to_string(),
                "residual": fmt_scalar(&c.residual),
                "sample": c.sample,
            })
        });
        json!({
            "kind": self.kind.name(),
            "max_len": self.max_len,
            "verdict": self.verdict,
            "pairs_checked": self.pairs_checked,
            "counterexample": ce,
            "samples": self.samples,
        })
    }
}

/// How factor pairs are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckMode {
    /// All pairs of words over the mould's alphabet.
    Fixed,
    /// Generic distinct letters at random weights.
    Sampled { seed: u64, samples: usize },
}

impl CheckMode {
    pub fn sampled(seed: u64) -> Self {
        CheckMode::Sampled { seed, samples: DEFAULT_SAMPLES }
    }
}

/// Shuffle or contracting-shuffle sum minus the expected value, for one pair.
pub fn pair_residual(m: &Mould, kind: SymmetryKind, u: &Word, v: &Word) -> Result<Scalar> {
    let terms = if kind.is_contracting() { contracting_shuffle(u, v)? } else { shuffle(u, v) };
    let mut acc = Scalar::zero();
    for (w, mult) in terms {
        acc += m.eval(&w)? * int(mult as i64);
    }
    if !kind.is_primitive() {
        acc -= m.eval(u)? * m.eval(v)?;
    }
    Ok(acc)
}

/// Verify one of the four shuffle-type symmetries up to total length `max_len`.
pub fn check(m: &Mould, kind: SymmetryKind, max_len: usize, mode: &CheckMode) -> Result<SymmetryReport> {
    if matches!(kind, SymmetryKind::Alternil | SymmetryKind::Symetril) {
        return Err(Error::Precondition("il-type symmetries are checked by the il module"));
    }
    let mut report = SymmetryReport::new(kind, max_len);
    match mode {
        CheckMode::Fixed => {
            let empty = Word::empty();
            report.record(&empty, &empty, m.eval(&empty)? - kind.empty_value(), None);
            for (u, v) in fixed_pairs(m.alphabet(), max_len) {
                let r = pair_residual(m, kind, &u, &v)?;
                report.record(&u, &v, r, None);
            }
        }
        CheckMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut first = true;
            for (n, k) in shapes(max_len) {
                let letters: Vec<Letter> = (0..n + k).map(|i| Letter::unit(i, n + k)).collect();
                let u = Word::from_letters(&letters[..n]);
                let v = Word::from_letters(&letters[n..]);
                for s in 0..*samples {
                    let (weights, r, empty) = sample_residual(m, kind, &u, &v, &letters, &mut rng)?;
                    let line = format!("shape ({n},{k}) sample {s}: {}", describe_weights(&weights));
                    if first {
                        report.record(&Word::empty(), &Word::empty(), empty, Some(line.clone()));
                        first = false;
                    }
                    report.record(&u, &v, r, Some(line.clone()));
                    report.samples.push(line);
                }
            }
        }
    }
    Ok(report)
}

fn sample_residual(
    m: &Mould,
    kind: SymmetryKind,
    u: &Word,
    v: &Word,
    letters: &[Letter],
    rng: &mut ChaCha8Rng,
) -> Result<(Weights, Scalar, Scalar)> {
    for _ in 0..RETRY_CAP {
        let weights = Weights::random(rng, letters.len());
        let bound = m.bound();
        let inst = m.rebind(&Alphabet::new(letters.to_vec(), weights.clone())).with_bound(bound);
        let attempt = pair_residual(&inst, kind, u, v).and_then(|r| Ok((r, inst.eval(&Word::empty())? - kind.empty_value())));
        match attempt {
            Ok((r, e)) => return Ok((weights, r, e)),
            Err(Error::PoleAtWord(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SampleCollision(RETRY_CAP))
}

pub fn describe_weights(w: &Weights) -> String {
    let f = |v: &[Scalar]| v.iter().map(fmt_scalar).collect::<Vec<_>>().join(",");
    format!("lambda=[{}] q=[{}]", f(&w.spectrum), f(&w.multipliers))
}

/// Shapes `(n, m)` with `n, m >= 1` and `n + m <= max_len`, by total then `n`.
pub fn shapes(max_len: usize) -> Vec<(usize, usize)> {
    (2..=max_len).flat_map(|t| (1..t).map(move |n| (n, t - n))).collect()
}

/// Nonempty word pairs over the alphabet, ordered by total length then lexicographically.
pub fn fixed_pairs(alphabet: &Alphabet, max_len: usize) -> Vec<(Word, Word)> {
    let words: Vec<Word> = alphabet.words(max_len.saturating_sub(1)).into_iter().filter(|w| !w.is_empty()).collect();
    let mut out = Vec::new();
    for (n, k) in shapes(max_len) {
        for u in words.iter().filter(|w| w.len() == n) {
            for v in words.iter().filter(|w| w.len() == k) {
                out.push((u.clone(), v.clone()));
            }
        }
    }
    out
}

/// Random rational in the 32-bit integer box, nonzero.
pub fn random_point<R: Rng>(rng: &mut R) -> Scalar {
    int(random_nonzero(rng, 1 << 31))
}

// ----------------------------------------------------------------------
// random moulds with a prescribed symmetry

fn letter_mould(alphabet: &Alphabet, bound: usize, seed: u64) -> Mould {
    let base = Mould::random(alphabet.clone(), bound, seed, None);
    Mould::derived("lin", vec![base], |me, w| if w.len() == 1 { me.operand(0).eval(w) } else { Ok(Scalar::zero()) })
        .expect("single operand")
}

/// Random Lie element of degree at most 3: `A + [B, C] + [[D, E], F]` with random
/// length-one moulds. Alternal by construction.
pub fn random_alternal(alphabet: &Alphabet, bound: usize, seed: u64) -> Result<Mould> {
    let a: Vec<Mould> = (0..6).map(|k| letter_mould(alphabet, bound, seed * 16 + k)).collect();
    a[0].add(&a[1].bracket(&a[2])?)?.add(&a[3].bracket(&a[4])?.bracket(&a[5])?)
}

pub fn random_symetral(alphabet: &Alphabet, bound: usize, seed: u64) -> Result<Mould> {
    random_alternal(alphabet, bound, seed)?.exp()
}

/// `J` restricted to words of norm `s`.
fn norm_component(alphabet: &Alphabet, bound: usize, s: Letter) -> Mould {
    let j = crate::catalog::j_mould(alphabet.clone(), bound);
    Mould::derived(
        "pi",
        vec![j],
        move |me, w| {
            if !w.is_empty() && crate::words::norm(w)? == s {
                me.operand(0).eval(w)
            } else {
                Ok(Scalar::zero())
            }
        },
    )
    .expect("single operand")
}

/// Random combination of norm components of `J` and their brackets. Alternel by construction.
pub fn random_alternel(alphabet: &Alphabet, bound: usize, seed: u64) -> Result<Mould> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = &alphabet.letters;
    if letters.is_empty() {
        return Err(Error::Precondition("random alternel moulds need explicit letters"));
    }
    let pick = |rng: &mut ChaCha8Rng| {
        let c = crate::scalar::random_small(rng);
        let s = letters[rng.gen_range(0..letters.len())].clone();
        norm_component(alphabet, bound, s).scale(if c.is_zero() { int(1) } else { c })
    };
    let p: Vec<Mould> = (0..6).map(|_| pick(&mut rng)).collect();
    p[0].add(&p[1].bracket(&p[2])?)?.add(&p[3].bracket(&p[4])?.bracket(&p[5])?)
}

pub fn random_symetrel(alphabet: &Alphabet, bound: usize, seed: u64) -> Result<Mould> {
    random_alternel(alphabet, bound, seed)?.exp()
}
