//! The mould algebra.
//!
//! A [`Mould`] is an immutable node: a rule `Word -> Scalar`, the operand moulds the
//! rule reads, an alphabet (letters used for enumeration plus the weights that turn
//! letters into numbers) and a length bound. Values are memoized per node.
//!
//! Rules receive the node itself, so recursive constructions (inverses, Sam, Tram)
//! read their own shorter values through the cache. Because rules never capture
//! weights directly, any mould can be re-instantiated over a different alphabet with
//! [`Mould::rebind`]; the symmetry checkers rely on this to evaluate the same
//! construction at many random weight samples.
//!
//! Product convention: `(M x N)^w = sum_{w = uv} M^u N^v`, left factor on the prefix.

use std::collections::HashMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::{Arc, Mutex};

use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{factorial, fmt_scalar, int, parse_scalar, random_small, Scalar, Weights};
use crate::words::{all_words, compositions, norm, retrograde, Letter, Word};

/// Letters available for enumeration together with their weights.
///
/// An empty letter list means a generic alphabet: the mould accepts any letter the
/// weights can evaluate, and checks have to supply letters themselves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Alphabet {
    pub letters: Vec<Letter>,
    pub weights: Arc<Weights>,
}

impl Alphabet {
    pub fn new(letters: Vec<Letter>, weights: Weights) -> Self {
        Alphabet { letters, weights: Arc::new(weights) }
    }

    pub fn generic(weights: Weights) -> Self {
        Alphabet::new(Vec::new(), weights)
    }

    /// One-dimensional degree letters `1..=k` with spectrum `lambda` and multiplier `q`.
    pub fn integers(k: i64, lambda: Scalar, q: Scalar) -> Self {
        let letters = (1..=k).map(|n| Letter::deg(&[n])).collect();
        Alphabet::new(letters, Weights::new(vec![lambda], vec![q]))
    }

    pub fn is_generic(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn words(&self, max_len: usize) -> Vec<Word> {
        all_words(&self.letters, max_len)
    }
}

type RuleFn = dyn Fn(&Mould, &Word) -> Result<Scalar> + Send + Sync;

struct Inner {
    name: String,
    alphabet: Alphabet,
    bound: usize,
    operands: Vec<Mould>,
    rule: Arc<RuleFn>,
    cache: Mutex<HashMap<Word, Scalar>>,
}

/// A scalar function on words, defined up to a length bound.
#[derive(Clone)]
pub struct Mould {
    inner: Arc<Inner>,
}

impl fmt::Debug for Mould {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mould({}, L={})", self.inner.name, self.inner.bound)
    }
}

impl Mould {
    fn build(name: String, alphabet: Alphabet, bound: usize, operands: Vec<Mould>, rule: Arc<RuleFn>) -> Mould {
        Mould { inner: Arc::new(Inner { name, alphabet, bound, operands, rule, cache: Mutex::new(HashMap::new()) }) }
    }

    /// A leaf mould given by a rule. The rule may read `me.weights()` and `me.eval`
    /// on other words.
    pub fn from_rule<F>(name: &str, alphabet: Alphabet, bound: usize, rule: F) -> Mould
    where
        F: Fn(&Mould, &Word) -> Result<Scalar> + Send + Sync + 'static,
    {
        Mould::build(name.to_string(), alphabet, bound, Vec::new(), Arc::new(rule))
    }

    /// A mould whose rule reads the given operands; alphabets must agree.
    pub fn derived<F>(name: &str, operands: Vec<Mould>, rule: F) -> Result<Mould>
    where
        F: Fn(&Mould, &Word) -> Result<Scalar> + Send + Sync + 'static,
    {
        let first = operands.first().expect("derived mould needs an operand");
        let alphabet = first.alphabet().clone();
        if operands.iter().any(|m| m.alphabet() != &alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let bound = operands.iter().map(|m| m.bound()).min().unwrap_or(0);
        Ok(Mould::build(name.to_string(), alphabet, bound, operands, Arc::new(rule)))
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.inner.alphabet
    }

    pub fn weights(&self) -> &Weights {
        &self.inner.alphabet.weights
    }

    pub fn bound(&self) -> usize {
        self.inner.bound
    }

    pub fn operand(&self, i: usize) -> &Mould {
        &self.inner.operands[i]
    }

    pub fn eval(&self, w: &Word) -> Result<Scalar> {
        if w.len() > self.inner.bound {
            return Err(Error::BeyondBound { word: w.to_string(), bound: self.inner.bound });
        }
        if let Some(v) = self.inner.cache.lock().expect("cache poisoned").get(w) {
            return Ok(v.clone());
        }
        let v = (self.inner.rule)(self, w)?;
        self.inner.cache.lock().expect("cache poisoned").insert(w.clone(), v.clone());
        Ok(v)
    }

    pub fn eval_letters(&self, letters: &[Letter]) -> Result<Scalar> {
        self.eval(&Word::from_letters(letters))
    }

    /// The same construction over another alphabet, operands rebound recursively.
    pub fn rebind(&self, alphabet: &Alphabet) -> Mould {
        let operands = self.inner.operands.iter().map(|m| m.rebind(alphabet)).collect();
        Mould::build(self.inner.name.clone(), alphabet.clone(), self.inner.bound, operands, self.inner.rule.clone())
    }

    /// The same construction with another length bound (operands adjusted too).
    pub fn with_bound(&self, bound: usize) -> Mould {
        let operands = self.inner.operands.iter().map(|m| m.with_bound(bound)).collect();
        Mould::build(self.inner.name.clone(), self.inner.alphabet.clone(), bound, operands, self.inner.rule.clone())
    }

    pub fn renamed(&self, name: &str) -> Mould {
        Mould::build(name.to_string(), self.inner.alphabet.clone(), self.inner.bound, self.inner.operands.clone(), self.inner.rule.clone())
    }

    /// Values on every alphabet word of length at most `max_len`.
    pub fn tabulate(&self, max_len: usize) -> Result<Vec<(Word, Scalar)>> {
        if self.alphabet().is_generic() {
            return Err(Error::Precondition("tabulating needs an explicit alphabet"));
        }
        let max_len = max_len.min(self.bound());
        self.alphabet().words(max_len).into_iter().map(|w| Ok((w.clone(), self.eval(&w)?))).collect()
    }

    // ------------------------------------------------------------------
    // constants and simple constructors

    pub fn zero(alphabet: Alphabet, bound: usize) -> Mould {
        Mould::from_rule("0", alphabet, bound, |_, _| Ok(Scalar::zero()))
    }

    /// The unit of the product: 1 on the empty word.
    pub fn one(alphabet: Alphabet, bound: usize) -> Mould {
        Mould::from_rule("1", alphabet, bound, |_, w| Ok(if w.is_empty() { Scalar::one() } else { Scalar::zero() }))
    }

    /// The unit of composition: 1 on words of length one.
    pub fn identity(alphabet: Alphabet, bound: usize) -> Mould {
        Mould::from_rule("I", alphabet, bound, |_, w| Ok(if w.len() == 1 { Scalar::one() } else { Scalar::zero() }))
    }

    /// 1 on the given word, 0 elsewhere.
    pub fn indicator(alphabet: Alphabet, bound: usize, word: Word) -> Mould {
        let name = format!("delta[{word}]");
        Mould::from_rule(&name, alphabet, bound, move |_, w| Ok(if *w == word { Scalar::one() } else { Scalar::zero() }))
    }

    /// Finite table; words not listed have value 0.
    pub fn table(name: &str, alphabet: Alphabet, bound: usize, entries: HashMap<Word, Scalar>) -> Mould {
        Mould::from_rule(name, alphabet, bound, move |_, w| Ok(entries.get(w).cloned().unwrap_or_else(Scalar::zero)))
    }

    /// Pseudo-random small rationals, a deterministic function of `(seed, word)`.
    /// The empty word gets `empty` when given.
    pub fn random(alphabet: Alphabet, bound: usize, seed: u64, empty: Option<Scalar>) -> Mould {
        let name = format!("random[{seed}]");
        Mould::from_rule(&name, alphabet, bound, move |_, w| {
            if let (true, Some(e)) = (w.is_empty(), &empty) {
                return Ok(e.clone());
            }
            Ok(random_small(&mut word_rng(seed, w)))
        })
    }

    // ------------------------------------------------------------------
    // linear structure

    pub fn add(&self, other: &Mould) -> Result<Mould> {
        Mould::derived("+", vec![self.clone(), other.clone()], |me, w| Ok(me.operand(0).eval(w)? + me.operand(1).eval(w)?))
    }

    pub fn sub(&self, other: &Mould) -> Result<Mould> {
        Mould::derived("-", vec![self.clone(), other.clone()], |me, w| Ok(me.operand(0).eval(w)? - me.operand(1).eval(w)?))
    }

    pub fn scale(&self, c: Scalar) -> Mould {
        Mould::derived("scale", vec![self.clone()], move |me, w| Ok(&c * me.operand(0).eval(w)?)).expect("single operand")
    }

    pub fn neg(&self) -> Mould {
        self.scale(int(-1))
    }

    // ------------------------------------------------------------------
    // product

    /// `(M x N)^w = sum over w = uv of M^u N^v`.
    pub fn mul(&self, other: &Mould) -> Result<Mould> {
        Mould::derived("x", vec![self.clone(), other.clone()], |me, w| {
            let (m, n) = (me.operand(0), me.operand(1));
            let mut acc = Scalar::zero();
            for k in 0..=w.len() {
                let a = m.eval(&w.slice(0, k))?;
                if a.is_zero() {
                    continue;
                }
                acc += a * n.eval(&w.slice(k, w.len()))?;
            }
            Ok(acc)
        })
    }

    /// Product of several moulds, left to right.
    pub fn product(factors: &[&Mould]) -> Result<Mould> {
        let (first, rest) = factors.split_first().expect("empty product");
        rest.iter().try_fold((*first).clone(), |acc, m| acc.mul(m))
    }

    /// Two-sided inverse for the product, by recursion on length.
    pub fn mul_inverse(&self) -> Result<Mould> {
        let m0 = self.eval(&Word::empty())?;
        if m0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = m0.recip();
        Mould::derived("inv", vec![self.clone()], move |me, w| {
            if w.is_empty() {
                return Ok(inv0.clone());
            }
            let m = me.operand(0);
            let mut acc = Scalar::zero();
            for k in 1..=w.len() {
                let a = m.eval(&w.slice(0, k))?;
                if a.is_zero() {
                    continue;
                }
                acc += a * me.eval(&w.slice(k, w.len()))?;
            }
            Ok(-(&inv0 * acc))
        })
    }

    /// `M x N - N x M`.
    pub fn bracket(&self, other: &Mould) -> Result<Mould> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    // ------------------------------------------------------------------
    // composition

    /// `(M o N)^w = sum over w = w^1...w^s (blocks nonempty) of
    /// M^(||w^1||,...,||w^s||) N^{w^1}...N^{w^s}`.
    pub fn compose(&self, other: &Mould) -> Result<Mould> {
        if !other.eval(&Word::empty())?.is_zero() {
            return Err(Error::CompositionUndefined);
        }
        Mould::derived("o", vec![self.clone(), other.clone()], |me, w| compose_sum(me.operand(0), me.operand(1), w, None))
    }

    /// Inverse for composition, solving `M o N = I` for `N` by recursion on length.
    pub fn comp_inverse(&self) -> Result<Mould> {
        if !self.eval(&Word::empty())?.is_zero() {
            return Err(Error::NotCompInvertible("()".into()));
        }
        for a in &self.alphabet().letters {
            let w = Word::single(a.clone());
            if self.bound() >= 1 && self.eval(&w)?.is_zero() {
                return Err(Error::NotCompInvertible(w.to_string()));
            }
        }
        Mould::derived("comp_inv", vec![self.clone()], |me, w| {
            if w.is_empty() {
                return Ok(Scalar::zero());
            }
            let m = me.operand(0);
            let lead = m.eval(&Word::single(norm(w)?))?;
            if lead.is_zero() {
                return Err(Error::NotCompInvertible(w.to_string()));
            }
            let identity = if w.len() == 1 { Scalar::one() } else { Scalar::zero() };
            let rest = compose_sum(m, me, w, Some(1))?;
            Ok((identity - rest) / lead)
        })
    }

    // ------------------------------------------------------------------
    // exponential and logarithm

    /// `exp M = sum_k M^{xk} / k!`, for `M^() = 0`.
    pub fn exp(&self) -> Result<Mould> {
        if !self.eval(&Word::empty())?.is_zero() {
            return Err(Error::NonNilpotent("exp needs a mould vanishing on the empty word"));
        }
        Mould::derived("exp", vec![self.clone()], |me, w| block_series(me.operand(0), w, |k| factorial(k).recip()))
    }

    /// `log A = sum_k (-1)^{k+1} (A - 1)^{xk} / k`, for `A^() = 1`.
    pub fn log(&self) -> Result<Mould> {
        if !self.eval(&Word::empty())?.is_one() {
            return Err(Error::NonNilpotent("log needs a mould equal to 1 on the empty word"));
        }
        Mould::derived("log", vec![self.clone()], |me, w| {
            if w.is_empty() {
                return Ok(Scalar::zero());
            }
            block_series(me.operand(0), w, |k| {
                let s = if k % 2 == 1 { 1 } else { -1 };
                Scalar::new(s.into(), (k as i64).into())
            })
        })
    }

    // ------------------------------------------------------------------
    // derivations and automorphisms

    /// `(D_lambda M)^w = lambda_w M^w` for an additive weight map.
    pub fn derive_simple(&self, lambda: &WeightMap) -> Result<Mould> {
        lambda.validate(self.alphabet(), self.bound())?;
        let lambda = lambda.clone();
        let name = format!("D[{}]", lambda.name);
        Mould::derived(&name, vec![self.clone()], move |me, w| {
            let v = me.operand(0).eval(w)?;
            if v.is_zero() {
                return Ok(v);
            }
            Ok(lambda.eval(me.weights(), w)? * v)
        })
    }

    /// `(nabla M)^w = omega(||w||) M^w`.
    pub fn nabla(&self) -> Result<Mould> {
        self.derive_simple(&WeightMap::nabla())
    }

    /// `(lang M)^w = l(w) M^w`.
    pub fn lang(&self) -> Result<Mould> {
        self.derive_simple(&WeightMap::length())
    }

    /// `(dar M)^w = sum over w = w1 w2 w3, w2 nonempty, of M^(w1, ||w2||, w3) Dar^{w2}`.
    pub fn dar(&self, dar: &Mould) -> Result<Mould> {
        if !dar.eval(&Word::empty())?.is_zero() {
            return Err(Error::Precondition("Dar must vanish on the empty word"));
        }
        Mould::derived("dar", vec![self.clone(), dar.clone()], |me, w| {
            let (m, d) = (me.operand(0), me.operand(1));
            let r = w.len();
            let mut acc = Scalar::zero();
            for i in 0..r {
                for j in i + 1..=r {
                    let mid = w.slice(i, j);
                    let dv = d.eval(&mid)?;
                    if dv.is_zero() {
                        continue;
                    }
                    let contracted = w.slice(0, i).push(norm(&mid)?).concat(&w.slice(j, r));
                    acc += m.eval(&contracted)? * dv;
                }
            }
            Ok(acc)
        })
    }

    /// `(A_f M)^w = f(w) M^w` for a morphism `f` of words into scalars.
    pub fn automorphism(&self, f: &Morphism) -> Result<Mould> {
        f.validate(self.alphabet(), self.bound())?;
        let f = f.clone();
        let name = format!("A[{}]", f.name);
        Mould::derived(&name, vec![self.clone()], move |me, w| {
            let v = me.operand(0).eval(w)?;
            if v.is_zero() {
                return Ok(v);
            }
            Ok(f.eval(me.weights(), w)? * v)
        })
    }

    /// `e^{k nabla}`: scaling by `e^{k omega(||w||)} = q^{k ||w||}`.
    pub fn exp_nabla(&self, k: i64) -> Result<Mould> {
        self.automorphism(&Morphism::exp_weight(k))
    }

    /// `M^{ret w}`.
    pub fn retro(&self) -> Mould {
        Mould::derived("ret", vec![self.clone()], |me, w| me.operand(0).eval(&retrograde(w))).expect("single operand")
    }

    // ------------------------------------------------------------------
    // comparison and serialization

    /// First word among `words` on which the two moulds differ.
    pub fn first_difference(&self, other: &Mould, words: &[Word]) -> Result<Option<(Word, Scalar, Scalar)>> {
        for w in words {
            let (a, b) = (self.eval(w)?, other.eval(w)?);
            if a != b {
                return Ok(Some((w.clone(), a, b)));
            }
        }
        Ok(None)
    }

    /// Agreement on every alphabet word up to `max_len`.
    pub fn agrees_with(&self, other: &Mould, max_len: usize) -> Result<bool> {
        Ok(self.first_difference(other, &self.alphabet().words(max_len))?.is_none())
    }

    pub fn to_json(&self, max_len: usize) -> Result<Value> {
        let entries: Vec<Value> =
            self.tabulate(max_len)?.into_iter().map(|(w, v)| json!({"word": w.to_string(), "value": fmt_scalar(&v)})).collect();
        Ok(json!({
            "alphabet": alphabet_to_json(self.alphabet()),
            "L": max_len.min(self.bound()),
            "entries": entries,
        }))
    }

    pub fn from_json(name: &str, v: &Value) -> Result<Mould> {
        let bad = |what: &str| Error::Parse(format!("mould JSON: {what}"));
        let alphabet = alphabet_from_json(v.get("alphabet").ok_or_else(|| bad("missing alphabet"))?)?;
        let bound = v.get("L").and_then(Value::as_u64).ok_or_else(|| bad("missing L"))? as usize;
        let mut entries = HashMap::new();
        for e in v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))? {
            let word: Word = e.get("word").and_then(Value::as_str).ok_or_else(|| bad("entry word"))?.parse()?;
            let value = parse_scalar(e.get("value").and_then(Value::as_str).ok_or_else(|| bad("entry value"))?)?;
            entries.insert(word, value);
        }
        Ok(Mould::table(name, alphabet, bound, entries))
    }
}

pub fn alphabet_to_json(a: &Alphabet) -> Value {
    let strs = |v: &[Scalar]| v.iter().map(fmt_scalar).collect::<Vec<_>>();
    json!({
        "letters": a.letters.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "spectrum": strs(&a.weights.spectrum),
        "multipliers": strs(&a.weights.multipliers),
    })
}

pub fn alphabet_from_json(v: &Value) -> Result<Alphabet> {
    let list = |key: &str| -> Vec<String> {
        v.get(key).and_then(Value::as_array).map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect()).unwrap_or_default()
    };
    let letters = list("letters").iter().map(|s| s.parse()).collect::<Result<Vec<Letter>>>()?;
    let spectrum = list("spectrum").iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()?;
    let multipliers = list("multipliers").iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()?;
    Ok(Alphabet::new(letters, Weights::new(spectrum, multipliers)))
}

/// Deterministic generator keyed by a seed and a word.
pub fn word_rng(seed: u64, w: &Word) -> ChaCha8Rng {
    let mut h = DefaultHasher::new();
    (seed, w).hash(&mut h);
    ChaCha8Rng::seed_from_u64(h.finish())
}

/// The composition sum on `w`, leaving out decompositions with at most
/// `skip_blocks_upto` blocks (used to isolate the one-block term).
fn compose_sum(m: &Mould, n: &Mould, w: &Word, skip_blocks_upto: Option<usize>) -> Result<Scalar> {
    if w.is_empty() {
        return m.eval(&Word::empty());
    }
    let mut acc = Scalar::zero();
    for cuts in compositions(w.len()) {
        let s = cuts.len() - 1;
        if skip_blocks_upto.is_some_and(|k| s <= k) {
            continue;
        }
        let mut prod = Scalar::one();
        let mut norms = Vec::with_capacity(s);
        for b in cuts.windows(2) {
            let block = w.slice(b[0], b[1]);
            prod *= n.eval(&block)?;
            if prod.is_zero() {
                break;
            }
            norms.push(norm(&block)?);
        }
        if prod.is_zero() {
            continue;
        }
        acc += m.eval(&Word(norms))? * prod;
    }
    Ok(acc)
}

/// `sum_k c_k sum over w = w^1...w^k (blocks nonempty) of M^{w^1}...M^{w^k}`,
/// with `c_0` contributing only on the empty word.
fn block_series(m: &Mould, w: &Word, coef: impl Fn(usize) -> Scalar) -> Result<Scalar> {
    if w.is_empty() {
        return Ok(coef(0));
    }
    let mut acc = Scalar::zero();
    for cuts in compositions(w.len()) {
        let mut prod = Scalar::one();
        for b in cuts.windows(2) {
            prod *= m.eval(&w.slice(b[0], b[1]))?;
            if prod.is_zero() {
                break;
            }
        }
        if !prod.is_zero() {
            acc += coef(cuts.len() - 1) * prod;
        }
    }
    Ok(acc)
}

type WordFn = dyn Fn(&Weights, &Word) -> Result<Scalar> + Send + Sync;

/// A weight map `lambda_w`, required to be additive under concatenation.
#[derive(Clone)]
pub struct WeightMap {
    pub name: String,
    f: Arc<WordFn>,
}

impl WeightMap {
    pub fn new<F>(name: &str, f: F) -> Self
    where
        F: Fn(&Weights, &Word) -> Result<Scalar> + Send + Sync + 'static,
    {
        WeightMap { name: name.to_string(), f: Arc::new(f) }
    }

    /// `l(w)`.
    pub fn length() -> Self {
        WeightMap::new("lang", |_, w| Ok(int(w.len() as i64)))
    }

    /// `omega(||w||)`, the sum of letter weights.
    pub fn nabla() -> Self {
        WeightMap::new("nabla", |wt, w| wt.omega_word(w.letters()))
    }

    pub fn eval(&self, weights: &Weights, w: &Word) -> Result<Scalar> {
        (self.f)(weights, w)
    }

    /// Additivity on all pairs of alphabet words with total length at most `max_len`.
    pub fn validate(&self, alphabet: &Alphabet, max_len: usize) -> Result<()> {
        let wt = &alphabet.weights;
        let words = alphabet.words(max_len);
        if !self.eval(wt, &Word::empty())?.is_zero() {
            return Err(Error::NotAdditive("()".into(), "()".into()));
        }
        for u in &words {
            for v in words.iter().filter(|v| u.len() + v.len() <= max_len) {
                if self.eval(wt, &u.concat(v))? != self.eval(wt, u)? + self.eval(wt, v)? {
                    return Err(Error::NotAdditive(u.to_string(), v.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// A morphism from words under concatenation into scalars under multiplication.
#[derive(Clone)]
pub struct Morphism {
    pub name: String,
    f: Arc<WordFn>,
}

impl Morphism {
    pub fn new<F>(name: &str, f: F) -> Self
    where
        F: Fn(&Weights, &Word) -> Result<Scalar> + Send + Sync + 'static,
    {
        Morphism { name: name.to_string(), f: Arc::new(f) }
    }

    /// `w -> e^{k omega(||w||)}`, as a Laurent monomial in the multipliers.
    pub fn exp_weight(k: i64) -> Self {
        Morphism::new(&format!("e^{k}nabla"), move |wt, w| Ok(crate::scalar::powi(&wt.exp_omega_word(w.letters())?, k)))
    }

    pub fn eval(&self, weights: &Weights, w: &Word) -> Result<Scalar> {
        (self.f)(weights, w)
    }

    pub fn validate(&self, alphabet: &Alphabet, max_len: usize) -> Result<()> {
        let wt = &alphabet.weights;
        let words = alphabet.words(max_len);
        if !self.eval(wt, &Word::empty())?.is_one() {
            return Err(Error::NotMorphism("()".into(), "()".into()));
        }
        for u in &words {
            for v in words.iter().filter(|v| u.len() + v.len() <= max_len) {
                if self.eval(wt, &u.concat(v))? != self.eval(wt, u)? * self.eval(wt, v)? {
                    return Err(Error::NotMorphism(u.to_string(), v.to_string()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn alpha() -> Alphabet {
        Alphabet::integers(3, rat(3, 2), int(2))
    }

    fn rand(seed: u64, empty: i64) -> Mould {
        Mould::random(alpha(), 4, seed, Some(int(empty)))
    }

    #[test]
    fn units() {
        let m = rand(1, 2);
        let one = Mould::one(alpha(), 4);
        let id = Mould::identity(alpha(), 4);
        assert!(m.mul(&one).unwrap().agrees_with(&m, 4).unwrap());
        assert!(one.mul(&m).unwrap().agrees_with(&m, 4).unwrap());
        assert!(m.compose(&id).unwrap().agrees_with(&m, 4).unwrap());
        let n = rand(2, 0);
        assert!(id.compose(&n).unwrap().agrees_with(&n, 4).unwrap());
        assert!(m.add(&Mould::zero(alpha(), 4)).unwrap().agrees_with(&m, 4).unwrap());
    }

    #[test]
    fn product_of_identities() {
        let id = Mould::identity(alpha(), 4);
        let ii = id.mul(&id).unwrap();
        assert_eq!(ii.eval(&Word::ints(&[1, 2])).unwrap(), int(1));
        assert_eq!(ii.eval(&Word::ints(&[1])).unwrap(), int(0));
    }

    #[test]
    fn inverse_is_two_sided() {
        let m = rand(3, 5);
        let inv = m.mul_inverse().unwrap();
        let one = Mould::one(alpha(), 4);
        assert!(m.mul(&inv).unwrap().agrees_with(&one, 4).unwrap());
        assert!(inv.mul(&m).unwrap().agrees_with(&one, 4).unwrap());
        assert_eq!(rand(3, 0).mul_inverse().unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn composition_inverse() {
        let m = rand(4, 0);
        let inv = m.comp_inverse().unwrap();
        let id = Mould::identity(alpha(), 4);
        assert!(m.compose(&inv).unwrap().agrees_with(&id, 4).unwrap());
        assert!(inv.compose(&m).unwrap().agrees_with(&id, 4).unwrap());
        assert_eq!(m.compose(&rand(5, 1)).unwrap_err(), Error::CompositionUndefined);
    }

    #[test]
    fn exp_second_order() {
        let m = rand(6, 0);
        let e = m.exp().unwrap();
        let (a, b) = (Word::ints(&[1]), Word::ints(&[2]));
        let ab = Word::ints(&[1, 2]);
        assert_eq!(e.eval(&a).unwrap(), m.eval(&a).unwrap());
        let expected = m.eval(&ab).unwrap() + rat(1, 2) * m.eval(&a).unwrap() * m.eval(&b).unwrap();
        assert_eq!(e.eval(&ab).unwrap(), expected);
        assert!(Mould::zero(alpha(), 4).exp().unwrap().agrees_with(&Mould::one(alpha(), 4), 4).unwrap());
        assert!(e.log().unwrap().agrees_with(&m, 4).unwrap());
        assert!(rand(6, 1).exp().is_err());
    }

    #[test]
    fn simple_derivations() {
        let m = rand(7, 1);
        let w = Word::ints(&[1, 3]);
        assert_eq!(m.lang().unwrap().eval(&w).unwrap(), int(2) * m.eval(&w).unwrap());
        assert_eq!(m.nabla().unwrap().eval(&w).unwrap(), int(6) * m.eval(&w).unwrap());
        let one = Mould::one(alpha(), 4);
        assert!(one.nabla().unwrap().agrees_with(&Mould::zero(alpha(), 4), 4).unwrap());
        let bad = WeightMap::new("len2", |_, w| Ok(int((w.len() * w.len()) as i64)));
        assert!(matches!(m.derive_simple(&bad), Err(Error::NotAdditive(..))));
        let bad = Morphism::new("len", |_, w| Ok(int(w.len() as i64 + 1)));
        assert!(matches!(m.automorphism(&bad), Err(Error::NotMorphism(..))));
    }

    #[test]
    fn dar_on_single_letter() {
        let m = rand(8, 1);
        let d = rand(9, 0);
        let a = Word::ints(&[2]);
        assert_eq!(m.dar(&d).unwrap().eval(&a).unwrap(), m.eval(&a).unwrap() * d.eval(&a).unwrap());
        let one = Mould::one(alpha(), 4);
        assert!(one.dar(&d).unwrap().agrees_with(&Mould::zero(alpha(), 4), 4).unwrap());
    }

    #[test]
    fn exp_nabla_scales_by_q_monomials() {
        let m = rand(10, 1);
        let w = Word::ints(&[1, 2]);
        assert_eq!(m.exp_nabla(1).unwrap().eval(&w).unwrap(), int(8) * m.eval(&w).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let m = rand(11, 1).with_bound(3);
        let v = m.to_json(3).unwrap();
        let back = Mould::from_json("back", &v).unwrap();
        assert!(back.agrees_with(&m, 3).unwrap());
        assert_eq!(back.alphabet(), m.alphabet());
    }

    #[test]
    fn bound_is_enforced() {
        let m = rand(12, 1).with_bound(2);
        assert!(matches!(m.eval(&Word::ints(&[1, 1, 1])), Err(Error::BeyondBound { .. })));
        let other = Mould::one(Alphabet::integers(2, int(1), int(2)), 2);
        assert_eq!(m.add(&other).unwrap_err(), Error::AlphabetMismatch);
    }
}
