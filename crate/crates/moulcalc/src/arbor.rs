//! Arborification: forests over the alphabet, arborified comoulds and the `proj`
//! coefficients linking them to words.
//!
//! An arborescent sequence is a list of letters with a partial order in which every
//! index has at most one successor. Its components are trees whose root is the
//! greatest element. With the comould `B_(n1..nr) = B_n1 o ... o B_nr`, an earlier
//! letter acts on the coefficients of a later one, so `i < j` in the forest means that
//! `i` sits below `j`.
//!
//! For first-order parts `B_n = sum_i b_{n,i} d_i`, a tree `T` with root `n` and
//! subforest `F` gets coefficients `c_{T,i} = B_F(b_{n,i})`, and a forest of trees
//! `T_1..T_d` acts as `(1 / prod d_k!) sum c_{T_1,i_1} ... c_{T_d,i_d} d_{i_1}...d_{i_d}`,
//! where the `d_k` count identical trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::localobj::field::words_by_weight;
use crate::localobj::{Jet, JetOperator, PreparedField, VectorField};
use crate::mould::Mould;
use crate::scalar::{factorial, Scalar};
use crate::words::{Letter, Word};

pub const DEFAULT_CAP: usize = 6;

/// A letter-labeled partial order with at most one successor per index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbWord {
    pub letters: Vec<Letter>,
    pub successor: Vec<Option<usize>>,
}

/// Rooted tree with children in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub root: Letter,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(root: Letter) -> Self {
        Tree { root, children: Vec::new() }
    }

    pub fn new(root: Letter, mut children: Vec<Tree>) -> Self {
        children.sort();
        Tree { root, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children.len() {
            0 => write!(f, "{}", self.root),
            1 => write!(f, "{}<{}", self.children[0], self.root),
            _ => write!(f, "({})<{}", forest_string(&self.children), self.root),
        }
    }
}

/// Canonical display of a forest; two forests are isomorphic iff the strings agree.
pub fn forest_string(forest: &[Tree]) -> String {
    let mut sorted = forest.to_vec();
    sorted.sort();
    let parts: Vec<String> =
        sorted.iter().map(|t| if t.children.len() > 1 && sorted.len() > 1 { format!("[{t}]") } else { t.to_string() }).collect();
    parts.join("⊕")
}

impl ArbWord {
    pub fn new(letters: Vec<Letter>, successor: Vec<Option<usize>>) -> Result<Self> {
        if letters.len() != successor.len() {
            return Err(Error::Precondition("one successor entry per letter"));
        }
        if !is_forest(&successor) {
            return Err(Error::Precondition("successor relation must be acyclic"));
        }
        Ok(ArbWord { letters, successor })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.successor[j] == Some(i)).collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.successor[j].is_none()).collect()
    }

    /// Irreducible: a single tree, i.e. a greatest element.
    pub fn is_irreducible(&self) -> bool {
        self.roots().len() == 1
    }

    fn tree_at(&self, i: usize) -> Tree {
        Tree::new(self.letters[i].clone(), self.children(i).into_iter().map(|j| self.tree_at(j)).collect())
    }

    /// The components, sorted.
    pub fn forest(&self) -> Vec<Tree> {
        let mut f: Vec<Tree> = self.roots().into_iter().map(|i| self.tree_at(i)).collect();
        f.sort();
        f
    }

    /// Arborescent sequence of a forest, nodes listed in post-order.
    pub fn from_forest(forest: &[Tree]) -> Self {
        fn walk(t: &Tree, letters: &mut Vec<Letter>, succ: &mut Vec<Option<usize>>) -> usize {
            let kids: Vec<usize> = t.children.iter().map(|c| walk(c, letters, succ)).collect();
            letters.push(t.root.clone());
            succ.push(None);
            let me = letters.len() - 1;
            for k in kids {
                succ[k] = Some(me);
            }
            me
        }
        let (mut letters, mut succ) = (Vec::new(), Vec::new());
        for t in forest {
            walk(t, &mut letters, &mut succ);
        }
        ArbWord { letters, successor: succ }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "letters": self.letters.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "successor": self.successor,
            "shape": self.to_string(),
        })
    }
}

impl fmt::Display for ArbWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", forest_string(&self.forest()))
    }
}

fn is_forest(succ: &[Option<usize>]) -> bool {
    let r = succ.len();
    (0..r).all(|start| {
        let mut i = start;
        for _ in 0..=r {
            match succ[i] {
                None => return true,
                Some(j) if j >= r => return false,
                Some(j) => i = j,
            }
        }
        false
    })
}

/// All successor maps on `r` labeled nodes that define forests.
pub fn forests_of(r: usize, cap: usize) -> Result<Vec<Vec<Option<usize>>>> {
    if r > cap {
        return Err(Error::CapExceeded(r, cap));
    }
    let mut out = Vec::new();
    let mut cur = vec![None; r];
    fn rec(k: usize, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        let r = cur.len();
        if k == r {
            if is_forest(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for s in std::iter::once(None).chain((0..r).filter(|&j| j != k).map(Some)) {
            cur[k] = s;
            rec(k + 1, cur, out);
        }
    }
    rec(0, &mut cur, &mut out);
    Ok(out)
}

/// Number of bijections `sigma` from the nodes of `a` to the positions of `w` with
/// matching letters and `i < j` in `a` implying `sigma(i) < sigma(j)`.
pub fn proj(a: &ArbWord, w: &Word) -> u64 {
    let r = a.len();
    if r != w.len() {
        return 0;
    }
    fn rec(i: usize, a: &ArbWord, w: &Word, sigma: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        let r = a.len();
        if i == r {
            let ok = (0..r).all(|k| a.successor[k].is_none_or(|j| sigma[k] < sigma[j]));
            return u64::from(ok);
        }
        let mut count = 0;
        for p in 0..r {
            if !used[p] && w.letters()[p] == a.letters[i] {
                used[p] = true;
                sigma[i] = p;
                count += rec(i + 1, a, w, sigma, used);
                used[p] = false;
            }
        }
        count
    }
    rec(0, a, w, &mut vec![0; r], &mut vec![false; r])
}

/// The distinct arborescent sequences with `proj(a, w) > 0`, with their counts.
pub fn arb_classes(w: &Word, cap: usize) -> Result<Vec<(ArbWord, u64)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for succ in forests_of(w.len(), cap)? {
        let a = ArbWord { letters: w.letters().to_vec(), successor: succ };
        let key = a.forest();
        if seen.contains(&key) {
            continue;
        }
        let p = proj(&a, w);
        if p > 0 {
            seen.insert(key.clone());
            out.push((ArbWord::from_forest(&key), p));
        }
    }
    Ok(out)
}

/// `S^a = sum_w proj(a, w) S^w` over the distinct orderings `w` of the letters of `a`.
pub fn arborify_mould(m: &Mould, a: &ArbWord) -> Result<Scalar> {
    let mut words = BTreeSet::new();
    permutations(&a.letters, &mut Vec::new(), &mut vec![false; a.len()], &mut words);
    let mut acc = Scalar::zero();
    for w in words {
        let p = proj(a, &w);
        if p > 0 {
            acc += m.eval(&w)? * Scalar::from_integer(p.into());
        }
    }
    Ok(acc)
}

fn permutations(letters: &[Letter], cur: &mut Vec<Letter>, used: &mut Vec<bool>, out: &mut BTreeSet<Word>) {
    if cur.len() == letters.len() {
        out.insert(Word(cur.clone()));
        return;
    }
    for i in 0..letters.len() {
        if !used[i] {
            used[i] = true;
            cur.push(letters[i].clone());
            permutations(letters, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
}

/// Builds arborified operators for one prepared field, memoizing tree coefficients.
pub struct ArbComoulds<'a> {
    parts: &'a BTreeMap<Letter, VectorField>,
    nu: usize,
    order: u32,
    coefficients: BTreeMap<Tree, Vec<Jet>>,
}

impl<'a> ArbComoulds<'a> {
    pub fn new(parts: &'a BTreeMap<Letter, VectorField>, nu: usize, order: u32) -> Self {
        ArbComoulds { parts, nu, order, coefficients: BTreeMap::new() }
    }

    /// `c_{T,i} = B_F(b_{root,i})` for the subforest `F` of `T`.
    pub fn coefficients(&mut self, t: &Tree) -> Result<Vec<Jet>> {
        if let Some(c) = self.coefficients.get(t) {
            return Ok(c.clone());
        }
        let b = self.parts.get(&t.root).ok_or_else(|| Error::UnknownLetter(t.root.to_string()))?;
        let mut c = Vec::with_capacity(self.nu);
        for k in 0..self.nu {
            let bk = b.comps[k].truncate(self.order);
            c.push(self.apply_forest(&t.children, &bk)?);
        }
        self.coefficients.insert(t.clone(), c.clone());
        Ok(c)
    }

    /// Coefficient vectors of the trees of a forest and its symmetry factor
    /// `1 / prod d_k!`.
    fn prepare(&mut self, forest: &[Tree]) -> Result<(Vec<Vec<Jet>>, Scalar)> {
        let coefs: Vec<Vec<Jet>> = forest.iter().map(|t| self.coefficients(t)).collect::<Result<_>>()?;
        let mut counts: BTreeMap<&Tree, usize> = BTreeMap::new();
        for t in forest {
            *counts.entry(t).or_default() += 1;
        }
        let symmetry = counts.values().fold(Scalar::one(), |acc, &d| acc * factorial(d));
        Ok((coefs, symmetry.recip()))
    }

    /// `B_F phi` for a forest `F`; the empty forest acts as the identity.
    pub fn apply_forest(&mut self, forest: &[Tree], phi: &Jet) -> Result<Jet> {
        let (coefs, factor) = self.prepare(forest)?;
        Ok(derivative_sum(self.nu, &coefs, 0, phi).scale(&factor))
    }

    /// `B_a` as an operator on jets of order `order`.
    pub fn operator(&mut self, a: &ArbWord) -> Result<JetOperator> {
        let (coefs, factor) = self.prepare(&a.forest())?;
        let nu = self.nu;
        Ok(JetOperator::from_fn(nu, self.order, |phi| derivative_sum(nu, &coefs, 0, phi).scale(&factor)))
    }
}

/// `sum_{i_1..i_d} c_{1,i_1} ... c_{d,i_d} d_{i_1} ... d_{i_d} psi`.
fn derivative_sum(nu: usize, coefs: &[Vec<Jet>], k: usize, psi: &Jet) -> Jet {
    if k == coefs.len() {
        return psi.clone();
    }
    let mut out = Jet::zero(nu, psi.order);
    for i in 0..nu {
        if coefs[k][i].is_zero() {
            continue;
        }
        let d = psi.derivative(i);
        if d.is_zero() {
            continue;
        }
        out = out.add(&coefs[k][i].mul(&derivative_sum(nu, coefs, k + 1, &d)));
    }
    out
}

/// `B_w = B_n1 o ... o B_nr` from first-order parts.
pub fn word_comould(w: &Word, parts: &BTreeMap<Letter, VectorField>, nu: usize, order: u32) -> Result<JetOperator> {
    let mut out = JetOperator::identity(nu, order);
    for a in w.letters() {
        let b = parts.get(a).ok_or_else(|| Error::UnknownLetter(a.to_string()))?;
        out = out.compose(&b.operator(order));
    }
    Ok(out)
}

/// `B_w - sum_a proj(a, w) B_a`, expected to vanish.
pub fn check_arb_identity(w: &Word, parts: &BTreeMap<Letter, VectorField>, nu: usize, order: u32) -> Result<JetOperator> {
    let mut residual = word_comould(w, parts, nu, order)?;
    let mut arb = ArbComoulds::new(parts, nu, order);
    for (a, p) in arb_classes(w, DEFAULT_CAP)? {
        residual.add_scaled(&arb.operator(&a)?, &-Scalar::from_integer(p.into()));
    }
    Ok(residual)
}

/// Splittings of a forest into two subforests, as sub-multisets of its trees.
pub fn forest_splittings(forest: &[Tree]) -> Vec<(Vec<Tree>, Vec<Tree>)> {
    let mut counts: BTreeMap<Tree, usize> = BTreeMap::new();
    for t in forest {
        *counts.entry(t.clone()).or_default() += 1;
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (t, d) in counts {
        let mut next = Vec::new();
        for (l, r) in &out {
            for e in 0..=d {
                let mut l: Vec<Tree> = l.clone();
                let mut r: Vec<Tree> = r.clone();
                l.extend(std::iter::repeat_n(t.clone(), e));
                r.extend(std::iter::repeat_n(t.clone(), d - e));
                next.push((l, r));
            }
        }
        out = next;
    }
    out
}

/// `B_a(phi psi) - sum_{a1 + a2 = a} (B_a1 phi)(B_a2 psi)`.
pub fn coproduct_residual(a: &ArbWord, parts: &BTreeMap<Letter, VectorField>, nu: usize, order: u32, phi: &Jet, psi: &Jet) -> Result<Jet> {
    let mut arb = ArbComoulds::new(parts, nu, order);
    let forest = a.forest();
    let mut out = arb.apply_forest(&forest, &phi.mul(psi))?;
    for (l, r) in forest_splittings(&forest) {
        out = out.sub(&arb.apply_forest(&l, phi)?.mul(&arb.apply_forest(&r, psi)?));
    }
    Ok(out)
}

/// Words over the field alphabet with length `<= max_len` that survive truncation.
fn contraction_words(x: &PreparedField, order: u32, max_len: usize) -> Result<Vec<Word>> {
    let letters: Vec<Letter> = x.parts.keys().cloned().collect();
    Ok(words_by_weight(&letters, i64::from(order) - 1)?.into_iter().filter(|w| w.len() <= max_len).collect())
}

/// `sum_w M^w B_w` over nonempty words of length `<= max_len`.
pub fn word_contraction(m: &Mould, x: &PreparedField, order: u32, max_len: usize) -> Result<JetOperator> {
    let mut out = JetOperator::zero(x.nu, order);
    for w in contraction_words(x, order, max_len)? {
        let c = m.eval(&w)?;
        if !c.is_zero() {
            out.add_scaled(&word_comould(&w, &x.parts, x.nu, order)?, &c);
        }
    }
    Ok(out)
}

/// `sum_a M^a B_a` over the arborescent sequences of the same words.
pub fn arb_contraction(m: &Mould, x: &PreparedField, order: u32, max_len: usize) -> Result<JetOperator> {
    let mut classes = BTreeSet::new();
    for w in contraction_words(x, order, max_len)? {
        for (a, _) in arb_classes(&w, DEFAULT_CAP)? {
            classes.insert(a.forest());
        }
    }
    let mut arb = ArbComoulds::new(&x.parts, x.nu, order);
    let mut out = JetOperator::zero(x.nu, order);
    for forest in classes {
        let a = ArbWord::from_forest(&forest);
        let c = arborify_mould(m, &a)?;
        if !c.is_zero() {
            out.add_scaled(&arb.operator(&a)?, &c);
        }
    }
    Ok(out)
}
