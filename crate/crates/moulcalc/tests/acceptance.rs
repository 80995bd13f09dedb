//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Built without the libtest harness so the report is always printed:
//! `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use moulcalc::arbor::{arb_contraction, check_arb_identity, word_contraction};
use moulcalc::catalog;
use moulcalc::localobj::field::RawTerm;
use moulcalc::localobj::jet::Jet;
use moulcalc::localobj::normal::{check_nonresonant, monomial_weight, nonlinear_support};
use moulcalc::localobj::{
    diffeo_linearize, diffeo_oracle, linearize, oracle_normalize, prenormal_tram, OracleMode, PreparedDiffeo, PreparedField,
};
use moulcalc::mould::WeightMap;
use moulcalc::scalar::{int, is_zero, rat, Weights};
use moulcalc::symmetry::coproduct::{grouplike_residual, primitive_residual, Coproduct};
use moulcalc::symmetry::{self, random_alternal, random_alternel, random_symetral, random_symetrel, CheckMode, SymmetryKind};
use moulcalc::words::{all_words, norm};
use moulcalc::{Alphabet, Letter, Mould, Scalar};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

/// Criteria that fail for a documented reason; see the analysis each one prints.
const KNOWN_FAILURES: &[u32] = &[5];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn first_mismatch(a: &Mould, b: &Mould, len: usize) -> Option<String> {
    let words = a.alphabet().words(len);
    a.first_difference(b, &words).unwrap().map(|(w, x, y)| format!("({w}): {x} vs {y}"))
}

/// Generic alphabet of `k` unit letters at random rational weights.
fn random_units(k: usize, seed: u64) -> Alphabet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = (0..k).map(|i| Letter::unit(i, k)).collect();
    let spectrum = (0..k).map(|_| rat(rng.gen_range(1..=97) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=13))).collect();
    let multipliers = (0..k).map(|_| rat(rng.gen_range(2..=29) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=7))).collect();
    Alphabet::new(letters, Weights::new(spectrum, multipliers))
}

fn symmetry_suite() -> Outcome {
    let mut pairs = 0;
    for (name, kind) in [
        ("T", SymmetryKind::Alternal),
        ("J", SymmetryKind::Alternel),
        ("S", SymmetryKind::Symetral),
        ("Se", SymmetryKind::Symetrel),
        ("Na", SymmetryKind::Symetral),
        ("Ne", SymmetryKind::Symetrel),
    ] {
        let m = catalog::make(name, Alphabet::default(), 4).map_err(|e| e.to_string())?;
        let r = symmetry::check(&m, kind, 4, &CheckMode::Sampled { seed: 0, samples: 8 }).map_err(|e| e.to_string())?;
        ensure(r.verdict, || format!("{name} not {}: {:?}", kind.name(), r.counterexample))?;
        pairs += r.pairs_checked;
    }
    Ok(format!("6 moulds, {pairs} factor pairs at 8 samples per shape"))
}

fn coproduct_oracle() -> Outcome {
    let delta = Coproduct::Delta;
    let star = Coproduct::DeltaStar { max_weight: 3 };
    let mut checked = 0;
    for seed in 0..3u64 {
        let al = Alphabet::integers(3, rat(2 + seed as i64, 3), rat(5, 1 + seed as i64));
        let generic0 = Mould::random(al.clone(), 3, seed + 100, Some(Scalar::zero()));
        let generic1 = Mould::random(al.clone(), 3, seed + 200, Some(Scalar::one()));
        let structured = [
            (random_alternal(&al, 3, seed).unwrap(), generic0.clone(), SymmetryKind::Alternal, delta, true),
            (random_symetral(&al, 3, seed).unwrap(), generic1.clone(), SymmetryKind::Symetral, delta, false),
            (random_alternel(&al, 3, seed).unwrap(), generic0, SymmetryKind::Alternel, star, true),
            (random_symetrel(&al, 3, seed).unwrap(), generic1, SymmetryKind::Symetrel, star, false),
        ];
        for (good, bad, kind, co, primitive) in structured {
            for (m, expected) in [(good, true), (bad, false)] {
                let verdict = symmetry::check(&m, kind, 3, &CheckMode::Fixed).unwrap().verdict;
                let residual = if primitive { primitive_residual(&m, co, 3) } else { grouplike_residual(&m, co, 3) }.unwrap();
                ensure(verdict == expected, || format!("{} check gave {verdict} on seed {seed}", kind.name()))?;
                ensure(residual.is_zero() == expected, || format!("{} residual disagrees on seed {seed}", kind.name()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} moulds, both directions for Delta and Delta*"))
}

fn algebra_laws() -> Outcome {
    for seed in 0..3u64 {
        let al = random_units(2, seed);
        let l = 4;
        let m = Mould::random(al.clone(), l, seed, Some(int(2)));
        let n = Mould::random(al.clone(), l, seed + 10, None);
        let p = Mould::random(al.clone(), l, seed + 20, None);
        let a = Mould::random(al.clone(), l, seed + 30, Some(Scalar::zero()));
        let one = Mould::one(al.clone(), l);
        let checks: Vec<(&str, Mould, Mould)> = vec![
            ("associativity", m.mul(&n).unwrap().mul(&p).unwrap(), m.mul(&n.mul(&p).unwrap()).unwrap()),
            ("right inverse", m.mul(&m.mul_inverse().unwrap()).unwrap(), one.clone()),
            ("left inverse", m.mul_inverse().unwrap().mul(&m).unwrap(), one),
            ("(M+N)oA", m.add(&n).unwrap().compose(&a).unwrap(), m.compose(&a).unwrap().add(&n.compose(&a).unwrap()).unwrap()),
            ("(MxN)oA", m.mul(&n).unwrap().compose(&a).unwrap(), m.compose(&a).unwrap().mul(&n.compose(&a).unwrap()).unwrap()),
            ("log exp", a.exp().unwrap().log().unwrap(), a.clone()),
            ("exp log", m.scale(rat(1, 2)).log().unwrap().exp().unwrap(), m.scale(rat(1, 2))),
        ];
        for (name, x, y) in checks {
            if let Some(d) = first_mismatch(&x, &y, l) {
                return Err(format!("{name} seed {seed}: {d}"));
            }
        }
    }
    Ok("7 laws on 3 random instances, all words of length <= 4".into())
}

fn signed_retrograde(m: &Mould) -> Mould {
    let r = m.retro();
    Mould::from_rule("signed_ret", m.alphabet().clone(), m.bound(), move |_, w| Ok(r.eval(w)? * int(if w.len() % 2 == 0 { 1 } else { -1 })))
}

fn symetral_inverse() -> Outcome {
    let al = random_units(3, 4);
    for name in ["S", "Na"] {
        let m = catalog::make(name, al.clone(), 5).unwrap();
        if let Some(d) = first_mismatch(&m.mul_inverse().unwrap(), &signed_retrograde(&m), 5) {
            return Err(format!("{name}: {d}"));
        }
    }
    Ok("S and Na, 3 letters, length <= 5".into())
}

fn mould_equations() -> Outcome {
    let al = random_units(3, 5);
    let identity = Mould::identity(al.clone(), 5);
    let na = catalog::na_mould(al.clone(), 5);
    let s = catalog::s_mould(al.clone(), 5);
    let nabla = WeightMap::nabla();
    let lhs = |m: &Mould| m.mul_inverse().unwrap().derive_simple(&nabla).unwrap().mul(m).unwrap();

    // e^nabla (Ne_inv) = (1 + I) x Ne_inv
    let al4 = random_units(3, 6);
    let ne_inv = catalog::ne_inv(al4.clone(), 4);
    let one_plus_i = Mould::one(al4.clone(), 4).add(&Mould::identity(al4, 4)).unwrap();
    let ne_ok = first_mismatch(&ne_inv.exp_nabla(1).unwrap(), &one_plus_i.mul(&ne_inv).unwrap(), 4);

    let na_literal = first_mismatch(&lhs(&na), &identity, 5);
    let s_literal = first_mismatch(&lhs(&s), &identity, 5);
    let na_recursion = first_mismatch(&na.derive_simple(&nabla).unwrap(), &na.mul(&identity).unwrap(), 5);
    if let Some(d) = &ne_ok {
        return Err(format!("Ne_inv equation fails at {d}"));
    }
    match na_literal {
        None => Ok("nabla(Na^-1) x Na = I to length 5; Ne_inv equation to length 4".into()),
        Some(d) => Err(format!(
            "nabla(Na^-1) x Na = I fails for the unsigned Na at {d}. The same equation {} for S = (-1)^r Na; \
             the recursion nabla Na = Na x I that produces Na's closed form {}; Ne_inv equation holds to length 4. \
             The displayed equation and Na's closed form carry opposite signs",
            if s_literal.is_none() { "holds" } else { "also fails" },
            if na_recursion.is_none() { "holds" } else { "fails" },
        )),
    }
}

fn duality() -> Outcome {
    let g = Alphabet::default();
    let exp = catalog::exp_reduced(g.clone(), 4);
    let se = catalog::make("Se", g.clone(), 4).unwrap().compose(&exp).unwrap();
    let j = catalog::make("J", g, 4).unwrap().compose(&exp).unwrap();
    let mode = CheckMode::Sampled { seed: 0, samples: 8 };
    let r = symmetry::check(&se, SymmetryKind::Symetral, 4, &mode).unwrap();
    ensure(r.verdict, || format!("Se o Exp: {:?}", r.counterexample))?;
    let r = symmetry::check(&j, SymmetryKind::Alternal, 4, &mode).unwrap();
    ensure(r.verdict, || format!("J o Exp: {:?}", r.counterexample))?;
    Ok("Se o Exp symetral, J o Exp alternal, length <= 4".into())
}

/// Random nonresonant field on C^2 with quadratic and cubic parts.
fn random_field(seed: u64, order: u32) -> PreparedField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let lambda: Vec<Scalar> = (0..2).map(|_| rat(rng.gen_range(-40..=40), rng.gen_range(1..=7))).collect();
        let x = PreparedField::random(rng.gen(), lambda, 3, 0.5);
        let degrees: Vec<i64> = x.parts.keys().filter_map(Letter::total_degree).collect();
        if degrees.contains(&1) && degrees.contains(&2) && check_nonresonant(&x, order).is_ok() {
            return x;
        }
    }
}

fn linearization_oracle() -> Outcome {
    let mut coefficients = 0;
    for seed in 0..5u64 {
        let x = random_field(seed, 5);
        let lin = linearize(&x, 5).map_err(|e| e.to_string())?;
        let oracle = oracle_normalize(&x, 5, OracleMode::Linearize).map_err(|e| e.to_string())?;
        ensure(lin == oracle, || format!("field {seed} (lambda {:?}) differs from the oracle", x.lambda))?;
        coefficients += lin.normalizer.iter().map(|j| j.terms().len()).sum::<usize>();
    }
    Ok(format!("5 fields, {coefficients} normalizer coefficients equal, degree 5"))
}

fn term(c: Scalar, m: &[u32], i: usize) -> RawTerm {
    RawTerm { coef: c, exponents: m.to_vec(), direction: i }
}

fn prenormal_form() -> Outcome {
    let al = Alphabet::new(
        vec![Letter::deg(&[1, 1]), Letter::deg(&[2, 0]), Letter::deg(&[0, 2]), Letter::deg(&[2, -1]), Letter::deg(&[-1, 2])],
        Weights::additive(vec![int(1), int(-1)]),
    );
    let sam = catalog::sam(al.clone(), 4).map_err(|e| e.to_string())?;
    if let Some(d) = first_mismatch(&sam, &catalog::sam_closed_form(al.clone(), 4), 4) {
        return Err(format!("Sam equation vs closed form: {d}"));
    }
    let tram = catalog::tram(al.clone(), 4).map_err(|e| e.to_string())?;
    if let Some(d) = first_mismatch(&tram, &tram.compose(&sam).unwrap(), 4) {
        return Err(format!("Tram o Sam: {d}"));
    }
    for w in al.words(4).iter().filter(|w| !w.is_empty()) {
        let weight = al.weights.omega(&norm(w).unwrap()).unwrap();
        ensure(is_zero(&weight) || is_zero(&tram.eval(w).unwrap()), || format!("Tram^({w}) nonzero off resonance"))?;
    }
    let terms = [
        term(int(1), &[2, 1], 0),
        term(int(2), &[1, 2], 1),
        term(int(1), &[3, 0], 0),
        term(int(-1), &[0, 3], 1),
        term(rat(1, 2), &[1, 2], 0),
        term(int(1), &[2, 0], 1),
        term(int(3), &[1, 1], 0),
    ];
    let x = PreparedField::decompose(2, vec![int(1), int(-1)], &terms).unwrap();
    let normal = prenormal_tram(&x, 4).map_err(|e| e.to_string())?;
    let support = nonlinear_support(&normal);
    for (i, m) in &support {
        ensure(is_zero(&monomial_weight(&x.lambda, *i, m)), || format!("nonresonant x^{m:?} in component {i}"))?;
    }
    Ok(format!("Sam and Tram agree to length 4; X_tram has {} resonant monomials only", support.len()))
}

fn diffeo_pipeline() -> Outcome {
    for q in [int(3), rat(-5, 2), rat(2, 7)] {
        let f = PreparedDiffeo::new(1, vec![q.clone()], &[term(int(1), &[2], 0)], 6).map_err(|e| e.to_string())?;
        let b = f.assembled();
        let x = Jet::var(1, 6, 0);
        let fx = x.scale(&q).add(&x.pow(2));
        for k in 1..=6u32 {
            ensure(b.apply(&x.pow(k)) == fx.pow(k).truncate(6), || format!("q = {q}: x^{k} o f"))?;
        }
        let f4 = PreparedDiffeo::new(1, vec![q.clone()], &[term(int(1), &[2], 0)], 4).unwrap();
        let lin = diffeo_linearize(&f4).map_err(|e| e.to_string())?;
        ensure(lin.normalizer == diffeo_oracle(&f4).unwrap(), || format!("q = {q}: normalizer differs from oracle"))?;
    }
    Ok("3 multipliers; monomials to degree 6; normalizer equals oracle to degree 4".into())
}

fn arborification() -> Outcome {
    let mut words = 0;
    for seed in 0..3u64 {
        let x = random_field(seed + 50, 4);
        let letters: Vec<Letter> = x.parts.keys().cloned().collect();
        for w in all_words(&letters, 3).iter().filter(|w| !w.is_empty()) {
            let r = check_arb_identity(w, &x.parts, 2, 4).map_err(|e| e.to_string())?;
            ensure(r.is_zero(), || format!("seed {seed}: nonzero residual for ({w})"))?;
            words += 1;
        }
        let na = catalog::na_mould(x.alphabet(), 4);
        ensure(word_contraction(&na, &x, 4, 3).unwrap() == arb_contraction(&na, &x, 4, 3).unwrap(), || {
            format!("seed {seed}: contraction invariance")
        })?;
    }
    Ok(format!("{words} words on 3 fields; Na contraction invariant"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "symmetry suite", limit: Some(Duration::from_secs(10)), run: symmetry_suite },
        Criterion { id: 2, name: "coproduct oracle", limit: Some(Duration::from_secs(5)), run: coproduct_oracle },
        Criterion { id: 3, name: "algebra laws", limit: Some(Duration::from_secs(10)), run: algebra_laws },
        Criterion { id: 4, name: "symetral inverse formula", limit: None, run: symetral_inverse },
        Criterion { id: 5, name: "mould equations", limit: None, run: mould_equations },
        Criterion { id: 6, name: "duality theorem", limit: None, run: duality },
        Criterion { id: 7, name: "linearization oracle", limit: Some(Duration::from_secs(60)), run: linearization_oracle },
        Criterion { id: 8, name: "prenormal form", limit: None, run: prenormal_form },
        Criterion { id: 9, name: "diffeo pipeline", limit: None, run: diffeo_pipeline },
        Criterion { id: 10, name: "arborification", limit: None, run: arborification },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("took {:.2}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {} ({:.2}s): {detail}", c.id, c.name, elapsed.as_secs_f64()),
            Err(reason) => {
                println!("FAIL {:>2} {} ({:.2}s): {reason}", c.id, c.name, elapsed.as_secs_f64());
                failed.push(c.id);
            }
        }
    }
    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!("{} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
