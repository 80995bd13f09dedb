//! Letters, words, shuffles and contracting shuffles.
//!
//! Shuffles are enumerated through slot patterns: a pattern lists, left to right,
//! which letter of which factor fills each position of the result. A `Star`
//! slot marks a contraction of one letter from each factor. Patterns are
//! generated depth first with the preference `Left < Right < Star`, which fixes
//! the deterministic output order.

use std::fmt;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::scalar::{fmt_scalar, parse_scalar, Scalar};

/// A letter of the alphabet: a degree vector or an abstract weighted symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Deg(Vec<i64>),
    Sym { name: String, weight: Scalar },
}

impl Letter {
    pub fn deg(n: &[i64]) -> Self {
        Letter::Deg(n.to_vec())
    }

    pub fn sym(name: &str, weight: Scalar) -> Self {
        Letter::Sym { name: name.to_string(), weight }
    }

    /// Unit degree vector `e_i` in dimension `dim`.
    pub fn unit(i: usize, dim: usize) -> Self {
        let mut n = vec![0; dim];
        n[i] = 1;
        Letter::Deg(n)
    }

    pub fn add(&self, other: &Letter) -> Result<Letter> {
        match (self, other) {
            (Letter::Deg(a), Letter::Deg(b)) => {
                let d = a.len().max(b.len());
                let get = |v: &Vec<i64>, i: usize| v.get(i).copied().unwrap_or(0);
                Ok(Letter::Deg((0..d).map(|i| get(a, i) + get(b, i)).collect()))
            }
            _ => Err(Error::NoSemigroup),
        }
    }

    pub fn degree(&self) -> Option<&[i64]> {
        match self {
            Letter::Deg(n) => Some(n),
            Letter::Sym { .. } => None,
        }
    }

    /// Total degree `|n|` of a degree vector.
    pub fn total_degree(&self) -> Option<i64> {
        self.degree().map(|n| n.iter().sum())
    }

    /// All entries nonnegative except at most one equal to -1, and `|n| >= 1`.
    pub fn is_admissible(&self) -> bool {
        match self {
            Letter::Deg(n) => {
                let minus = n.iter().filter(|&&k| k == -1).count();
                n.iter().all(|&k| k >= -1) && minus <= 1 && n.iter().sum::<i64>() >= 1
            }
            Letter::Sym { .. } => false,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Deg(n) if n.len() == 1 => write!(f, "{}", n[0]),
            Letter::Deg(n) => {
                let parts: Vec<String> = n.iter().map(|k| k.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Letter::Sym { name, weight } => write!(f, "{}={}", name, fmt_scalar(weight)),
        }
    }
}

impl std::str::FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Letter> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a letter: {s:?}"));
        if let Some(inner) = s.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(bad)?;
            let n: std::result::Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().replace('\u{2011}', "-").parse()).collect();
            return Ok(Letter::Deg(n.map_err(|_| bad())?));
        }
        if let Some((name, w)) = s.split_once('=') {
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(bad());
            }
            return Ok(Letter::sym(name, parse_scalar(w)?));
        }
        s.parse::<i64>().map(|k| Letter::Deg(vec![k])).map_err(|_| bad())
    }
}

/// A finite sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }

    pub fn single(a: Letter) -> Self {
        Word(vec![a])
    }

    /// Word of one-dimensional degree letters, handy for tests and the CLI.
    pub fn ints(ks: &[i64]) -> Self {
        Word(ks.iter().map(|&k| Letter::Deg(vec![k])).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    pub fn push(&self, a: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(a);
        Word(v)
    }

    pub fn prepend(&self, a: Letter) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(a);
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    /// Comma-separated letter tokens; commas inside brackets belong to the letter.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "()" || s == "\u{2205}" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, c) in s.char_indices() {
            match c {
                '[' => depth += 1,
                ']' => depth -= 1,
                ',' if depth == 0 => {
                    letters.push(s[start..i].parse()?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        letters.push(s[start..].parse()?);
        Ok(Word(letters))
    }
}

/// Words with positive multiplicities, in insertion order.
pub type WordMultiset = IndexMap<Word, u64>;

/// One position of an interleaving pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Left(usize),
    Right(usize),
    Star(usize, usize),
}

fn gen_patterns(n: usize, m: usize, contract: bool, i: usize, j: usize, cur: &mut Vec<Slot>, out: &mut Vec<Vec<Slot>>) {
    if i == n && j == m {
        out.push(cur.clone());
        return;
    }
    if i < n {
        cur.push(Slot::Left(i));
        gen_patterns(n, m, contract, i + 1, j, cur, out);
        cur.pop();
    }
    if j < m {
        cur.push(Slot::Right(j));
        gen_patterns(n, m, contract, i, j + 1, cur, out);
        cur.pop();
    }
    if contract && i < n && j < m {
        cur.push(Slot::Star(i, j));
        gen_patterns(n, m, contract, i + 1, j + 1, cur, out);
        cur.pop();
    }
}

/// All interleaving patterns of factors of lengths `n` and `m`.
pub fn shuffle_patterns(n: usize, m: usize) -> Vec<Vec<Slot>> {
    let mut out = Vec::new();
    gen_patterns(n, m, false, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Interleaving patterns with optional contractions of adjacent cross pairs.
pub fn csh_patterns(n: usize, m: usize) -> Vec<Vec<Slot>> {
    let mut out = Vec::new();
    gen_patterns(n, m, true, 0, 0, &mut Vec::new(), &mut out);
    out
}

pub fn is_contracted(pattern: &[Slot]) -> bool {
    pattern.iter().any(|s| matches!(s, Slot::Star(..)))
}

/// The word a pattern produces from the two factors.
pub fn realize(pattern: &[Slot], u: &Word, v: &Word) -> Result<Word> {
    pattern
        .iter()
        .map(|s| match *s {
            Slot::Left(i) => Ok(u.0[i].clone()),
            Slot::Right(j) => Ok(v.0[j].clone()),
            Slot::Star(i, j) => u.0[i].add(&v.0[j]),
        })
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

fn collect(patterns: &[Vec<Slot>], u: &Word, v: &Word) -> Result<WordMultiset> {
    let mut out = WordMultiset::new();
    for p in patterns {
        *out.entry(realize(p, u, v)?).or_insert(0) += 1;
    }
    Ok(out)
}

/// Multiset of interleavings of `u` and `v` preserving each factor's order.
pub fn shuffle(u: &Word, v: &Word) -> WordMultiset {
    collect(&shuffle_patterns(u.len(), v.len()), u, v).expect("plain shuffles never add letters")
}

/// Shuffles together with every contraction of adjacent cross pairs into their sum.
pub fn contracting_shuffle(u: &Word, v: &Word) -> Result<WordMultiset> {
    collect(&csh_patterns(u.len(), v.len()), u, v)
}

/// Semigroup sum of all letters.
pub fn norm(w: &Word) -> Result<Letter> {
    let (first, rest) = w.0.split_first().ok_or(Error::EmptyWord)?;
    rest.iter().try_fold(first.clone(), |acc, a| acc.add(a))
}

pub fn retrograde(w: &Word) -> Word {
    Word(w.0.iter().rev().cloned().collect())
}

/// Deconcatenation-free splitting of a word by a sign vector: every letter goes
/// to the left or the right factor, keeping the order. Returns all `2^r` pairs,
/// one per sign vector, so pairs repeat when letters repeat.
pub fn sign_vector_splittings(w: &Word) -> Vec<(Word, Word)> {
    let r = w.len();
    (0..1u64 << r)
        .map(|mask| {
            let (mut l, mut rt) = (Vec::new(), Vec::new());
            for (k, a) in w.0.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    l.push(a.clone());
                } else {
                    rt.push(a.clone());
                }
            }
            (Word(l), Word(rt))
        })
        .collect()
}

/// All words over `letters` of length at most `max_len`, shortest first.
pub fn all_words(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let next: Vec<Word> = layer.iter().flat_map(|w| letters.iter().map(move |a| w.push(a.clone()))).collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All words of length exactly `len`.
pub fn words_of_len(letters: &[Letter], len: usize) -> Vec<Word> {
    all_words(letters, len).into_iter().filter(|w| w.len() == len).collect()
}

/// Ordered decompositions of `w` into `k >= 1` nonempty consecutive blocks,
/// returned as lists of cut positions `0 = c_0 < ... < c_k = |w|`.
pub fn compositions(len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![0]];
    }
    (0..1u64 << (len - 1))
        .map(|mask| {
            let mut cuts = vec![0];
            for k in 1..len {
                if mask >> (k - 1) & 1 == 1 {
                    cuts.push(k);
                }
            }
            cuts.push(len);
            cuts
        })
        .collect()
}
