use moulcalc::catalog;
use moulcalc::localobj::jet::UNTRUNCATED;
use moulcalc::localobj::normal::{check_nonresonant, coordinates, monomial_weight, na_normalizer, nonlinear_support};
use moulcalc::localobj::*;
use moulcalc::scalar::{int, rat};
use moulcalc::symmetry::{random_alternal, random_symetral};
use moulcalc::{Error, Letter, Mould, Scalar, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn term(c: Scalar, m: &[u32], i: usize) -> RawTerm {
    RawTerm { coef: c, exponents: m.to_vec(), direction: i }
}

fn field_25() -> PreparedField {
    // lambda = (2, 5) with parts D_(1,0) and D_(0,1)
    let terms = [term(int(1), &[2, 0], 0), term(int(3), &[1, 1], 1), term(rat(1, 2), &[1, 1], 0), term(int(-2), &[0, 2], 1)];
    PreparedField::decompose(2, vec![int(2), int(5)], &terms).unwrap()
}

fn random_jet(rng: &mut ChaCha8Rng, nu: usize, order: u32) -> Jet {
    let mut j = Jet::zero(nu, order);
    for m in jet::monomials(nu, order) {
        if rng.gen_bool(0.6) {
            j.add_term(m, rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)));
        }
    }
    j
}

fn random_lambda(rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    (0..2).map(|_| rat(rng.gen_range(1..=40) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=7))).collect()
}

/// A random nonresonant quadratic and cubic field on C^2.
fn random_field(seed: u64, order: u32) -> PreparedField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let x = PreparedField::random(rng.gen(), random_lambda(&mut rng), 3, 0.5);
        if check_nonresonant(&x, order).is_ok() {
            return x;
        }
    }
}

#[test]
fn scalar_field_normalizer_coefficient() {
    // X = 2x d/dx + x^2 d/dx: h(y) = y + a y^2 + ... with (1 + 2ay) 2y = 2(y + ay^2) + (y + ay^2)^2
    let x = PreparedField::decompose(1, vec![int(2)], &[term(int(1), &[2], 0)]).unwrap();
    let lin = linearize(&x, 5).unwrap();
    assert_eq!(lin.normalizer[0].coef(&[2]), rat(1, 2));
    let oracle = oracle_normalize(&x, 5, OracleMode::Linearize).unwrap();
    assert_eq!(lin, oracle);
}

#[test]
fn linearize_matches_oracle_on_fixed_instance() {
    let x = field_25();
    let lin = linearize(&x, 5).unwrap();
    let oracle = oracle_normalize(&x, 5, OracleMode::Linearize).unwrap();
    assert_eq!(lin, oracle);
    for (i, y) in lin.conjugated.iter().enumerate() {
        assert_eq!(*y, Jet::var(2, 5, i).scale(&x.lambda[i]));
    }
}

#[test]
fn linearize_matches_oracle_on_random_fields() {
    for seed in 0..3 {
        let x = random_field(seed, 4);
        let lin = linearize(&x, 4).unwrap();
        let oracle = oracle_normalize(&x, 4, OracleMode::Linearize).unwrap();
        assert_eq!(lin, oracle, "seed {seed}");
    }
}

#[test]
fn normalizer_acts_by_substitution() {
    let x = field_25();
    let (theta, _) = na_normalizer(&x, 5).unwrap();
    let h: Vec<Jet> = coordinates(2, 5).iter().map(|c| theta.apply(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let phi = random_jet(&mut rng, 2, 5);
        assert_eq!(theta.apply(&phi), phi.substitute(&h, 5));
    }
}

#[test]
fn linear_fields_and_maps_normalize_to_identity() {
    let x = PreparedField::decompose(2, vec![int(2), int(5)], &[]).unwrap();
    let lin = linearize(&x, 4).unwrap();
    assert_eq!(lin.normalizer, coordinates(2, 4));
    assert_eq!(oracle_normalize(&x, 4, OracleMode::Dulac).unwrap(), lin);
    let f = PreparedDiffeo::new(1, vec![int(3)], &[], 5).unwrap();
    assert!(f.parts.is_empty());
    assert_eq!(diffeo_linearize(&f).unwrap().normalizer, coordinates(1, 5));
}

#[test]
fn resonant_field_is_rejected() {
    let x = PreparedField::decompose(2, vec![int(1), int(2)], &[term(int(1), &[2, 0], 1)]).unwrap();
    assert!(matches!(linearize(&x, 3), Err(Error::Resonant(_))));
    assert!(matches!(oracle_normalize(&x, 3, OracleMode::Linearize), Err(Error::Resonant(_))));
}

#[test]
fn comould_orders() {
    let x = field_25();
    let parts = x.part_operators(5);
    let (a, b) = (Letter::deg(&[1, 0]), Letter::deg(&[0, 1]));
    let w = Word(vec![a.clone(), b.clone()]);
    let inner = comould(&w, &parts, 2, 5, ComouldOrder::FirstInner).unwrap();
    assert_eq!(inner, parts[&b].compose(&parts[&a]));
    let outer = comould(&w, &parts, 2, 5, ComouldOrder::FirstOuter).unwrap();
    assert_eq!(outer, parts[&a].compose(&parts[&b]));
    let unknown = Word::single(Letter::deg(&[3, 0]));
    assert!(matches!(comould(&unknown, &parts, 2, 5, ComouldOrder::FirstOuter), Err(Error::UnknownLetter(_))));
}

#[test]
fn linear_part_commutes_with_comoulds_up_to_weight() {
    let order = 5;
    for seed in 0..3 {
        let x = random_field(seed, order);
        let parts = x.part_operators(order);
        let lin = x.linear().operator(order);
        let weights = x.alphabet().weights;
        for w in x.alphabet().words(4) {
            let d = comould(&w, &parts, 2, order, ComouldOrder::FirstInner).unwrap();
            let lhs = lin.compose(&d).sub(&d.compose(&lin));
            let om = weights.omega_word(w.letters()).unwrap();
            assert_eq!(lhs, d.scale(&om), "word {w}");
        }
    }
}

#[test]
fn contraction_is_a_morphism() {
    let order = 4;
    let x = random_field(7, order);
    let parts = x.part_operators(order);
    let alphabet = x.alphabet();
    let m = Mould::random(alphabet.clone(), 4, 1, None);
    let n = Mould::random(alphabet, 4, 2, None);
    let mn = m.mul(&n).unwrap();
    let c = |m: &Mould, how| contract(m, &parts, 2, order, how).unwrap();
    let outer = ComouldOrder::FirstOuter;
    assert_eq!(c(&mn, outer), c(&m, outer).compose(&c(&n, outer)));
    let inner = ComouldOrder::FirstInner;
    assert_eq!(c(&mn, inner), c(&n, inner).compose(&c(&m, inner)));
}

#[test]
fn contraction_of_unit_and_identity() {
    let x = field_25();
    let parts = x.part_operators(5);
    let alphabet = x.alphabet();
    let one = contract(&Mould::one(alphabet.clone(), 5), &parts, 2, 5, ComouldOrder::FirstOuter).unwrap();
    assert_eq!(one, JetOperator::identity(2, 5));
    let id = contract(&Mould::identity(alphabet, 5), &parts, 2, 5, ComouldOrder::FirstOuter).unwrap();
    assert_eq!(id, x.nonlinear().operator(5));
}

#[test]
fn alternal_contracts_to_derivation_symetral_to_automorphism() {
    let order = 4;
    let x = random_field(11, order);
    let parts = x.part_operators(order);
    let alphabet = x.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alt = random_alternal(&alphabet, 4, 9).unwrap();
    let sym = random_symetral(&alphabet, 4, 9).unwrap();
    let d = contract(&alt, &parts, 2, order, ComouldOrder::FirstOuter).unwrap();
    let a = contract(&sym, &parts, 2, order, ComouldOrder::FirstOuter).unwrap();
    for _ in 0..3 {
        let (phi, psi) = (random_jet(&mut rng, 2, order), random_jet(&mut rng, 2, order));
        let prod = phi.mul(&psi);
        assert_eq!(d.apply(&prod), d.apply(&phi).mul(&psi).add(&phi.mul(&d.apply(&psi))));
        assert_eq!(a.apply(&prod), a.apply(&phi).mul(&a.apply(&psi)));
    }
}

fn diffeo_qx_x2(q: Scalar, order: u32) -> PreparedDiffeo {
    PreparedDiffeo::new(1, vec![q], &[term(int(1), &[2], 0)], order).unwrap()
}

#[test]
fn diffeo_parts_of_quadratic_map() {
    // lambda = 1: B_k = x^{2k} / k! d^k
    let f = diffeo_qx_x2(int(1), 6);
    for k in 1..=3u32 {
        let b = &f.parts[&Letter::deg(&[i64::from(k)])];
        assert_eq!(b.terms.len(), 1);
        let c = &b.terms[&vec![k]];
        let kf = moulcalc::scalar::factorial(k as usize);
        assert_eq!(*c, Jet::monomial(1, UNTRUNCATED, vec![2 * k], kf.recip()));
    }
    // general multiplier: B_1 = x^2 / q^2 d/dx
    let f = diffeo_qx_x2(int(3), 6);
    let b = &f.parts[&Letter::deg(&[1])];
    assert_eq!(b.terms[&vec![1]].coef(&[2]), rat(1, 9));
}

#[test]
fn diffeo_assembly_reproduces_substitution() {
    let f = diffeo_qx_x2(rat(3, 2), 6);
    assert_eq!(f.assembled(), f.substitution());
    let cube = Jet::var(1, 6, 0).pow(3);
    let expected = Jet::var(1, 6, 0).scale(&rat(3, 2)).add(&Jet::var(1, 6, 0).pow(2)).pow(3);
    assert_eq!(f.assembled().apply(&cube), expected);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let terms: Vec<RawTerm> = jet::monomials(2, 3)
        .into_iter()
        .filter(|m| jet::degree(m) >= 2)
        .flat_map(|m| [term(rat(rng.gen_range(-3..=3), 2), &m, 0), term(int(rng.gen_range(-3..=3)), &m, 1)])
        .collect();
    let g = PreparedDiffeo::new(2, vec![int(2), rat(-1, 3)], &terms, 5).unwrap();
    assert_eq!(g.assembled(), g.substitution());
}

#[test]
fn diffeo_linearization_matches_oracle() {
    let f = diffeo_qx_x2(int(3), 5);
    let lin = diffeo_linearize(&f).unwrap();
    let oracle = diffeo_oracle(&f).unwrap();
    assert_eq!(lin.normalizer, oracle);
    assert_eq!(lin.normalizer[0].coef(&[2]), rat(1, 6));
    assert_eq!(lin.conjugated, vec![Jet::var(1, 5, 0).scale(&int(3))]);
    // single homological step: Ne_inv^(1) q B_1 (x) = x^2 / (q (q - 1))
    let q = rat(5, 2);
    let f = diffeo_qx_x2(q.clone(), 2);
    let lin = diffeo_linearize(&f).unwrap();
    assert_eq!(lin.normalizer[0].coef(&[2]), (&q * &q - &q).recip());
}

#[test]
fn diffeo_resonance() {
    let f = diffeo_qx_x2(int(1), 3);
    assert!(matches!(diffeo_linearize(&f), Err(Error::Resonant(_))));
    let f = diffeo_qx_x2(int(-1), 4);
    assert!(matches!(diffeo_linearize(&f), Err(Error::Resonant(_))));
}

fn resonant_example() -> PreparedField {
    // lambda = (1, -1), letters (1,1), (2,0) and (0,2) among others
    let terms = [
        term(int(1), &[2, 1], 0),
        term(int(2), &[1, 2], 1),
        term(int(1), &[3, 0], 0),
        term(int(-1), &[0, 3], 1),
        term(rat(1, 2), &[1, 2], 0),
        term(int(1), &[2, 0], 1),
        term(int(3), &[1, 1], 0),
    ];
    PreparedField::decompose(2, vec![int(1), int(-1)], &terms).unwrap()
}

#[test]
fn prenormal_form_keeps_only_resonant_terms() {
    let x = resonant_example();
    let order = 4;
    let tram = prenormal_tram(&x, order).unwrap();
    for (i, m) in nonlinear_support(&tram) {
        assert!(monomial_weight(&x.lambda, i, &m) == int(0), "nonresonant {m:?} in component {i}");
    }
    let iterated = tram_iteration(&x, order).unwrap();
    assert_eq!(tram, iterated);
    let dulac = oracle_normalize(&x, order, OracleMode::Dulac).unwrap();
    assert_eq!(tram.comps, dulac.conjugated);
    assert!(!nonlinear_support(&tram).is_empty());
}

#[test]
fn prenormal_form_of_nonresonant_field_is_linear() {
    let x = field_25();
    assert_eq!(prenormal_tram(&x, 5).unwrap(), x.linear().truncate(5));
}

#[test]
fn ne_inv_and_ne_contract_to_inverse_operators() {
    let f = diffeo_qx_x2(rat(7, 3), 5);
    let (theta, theta_inv) = moulcalc::localobj::diffeo::ne_normalizer(&f).unwrap();
    assert_eq!(theta.compose(&theta_inv), JetOperator::identity(1, 5));
    let alphabet = f.alphabet();
    let ne = catalog::ne_mould(alphabet.clone(), 5);
    let prod = catalog::ne_inv(alphabet, 5).mul(&ne).unwrap();
    let parts = f.left_parts();
    let c = contract(&prod, &parts, 1, 5, ComouldOrder::FirstInner).unwrap();
    assert_eq!(c, JetOperator::identity(1, 5));
}
