mod common;

use std::collections::{BTreeMap, HashMap};

use common::*;
use loopsynth::pcp::InvariantSpec;
use loopsynth::poly::{Polynomial, Rational, VarId};
use loopsynth::recurrence::Parameter;
use loopsynth::verify::{grid_check, order_bound, unroll_check, verify_complete, Certificate, CheckMode, ConcreteLoop, Verdict};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xy() -> (VarId, VarId) {
    (VarId::program("x"), VarId::program("y"))
}

fn x_minus_2y() -> InvariantSpec {
    let (x, y) = xy();
    let p = &Polynomial::var(x.clone()) - &Polynomial::var(y.clone()).scale(&r(2));
    InvariantSpec::new(vec![p], vec![x, y], BTreeMap::new()).unwrap()
}

/// Evaluates every conjunct on a concrete state.
fn residuals(spec: &InvariantSpec, vars: &[VarId], state: &[Rational], params: &[(VarId, Rational)]) -> Vec<Rational> {
    let mut env: HashMap<VarId, Rational> = vars.iter().cloned().zip(state.iter().cloned()).collect();
    env.extend(params.iter().cloned());
    spec.polys.iter().map(|p| p.evaluate(&env).as_constant().expect("fully evaluated")).collect()
}

#[test]
fn figure_one_loops() {
    let (x, y) = xy();
    let spec = x_minus_2y();
    let vars = [x, y];
    let doubling = ConcreteLoop::from_ints(&vars, &[&[2, 0], &[0, 2]], &[2, 1]).unwrap();
    assert_eq!(verify_complete(&doubling, &spec, 10).verdict, Verdict::HoldsComplete { bound: 4 });
    let counting_down = ConcreteLoop::from_ints(&vars, &[&[1, 0], &[0, 1]], &[0, 0]).unwrap();
    assert!(verify_complete(&counting_down, &spec, 10).verdict.is_complete());
    let wrong = ConcreteLoop::from_ints(&vars, &[&[1, 1], &[0, 1]], &[2, 1]).unwrap();
    match verify_complete(&wrong, &spec, 10).verdict {
        Verdict::Fails { n, .. } => assert_eq!(n, 1),
        v => panic!("expected failure, got {v}"),
    }
}

#[test]
fn originals_verify_symbolically_and_on_the_grid() {
    for b in benchmarks() {
        let parsed = spec(b.invariant, b.vars, b.params);
        let lp = ConcreteLoop::new(system_vars(&b), b.b.clone(), b.a.clone(), parsed.params.clone()).unwrap();
        let res = verify_complete(&lp, &parsed.spec, 20);
        assert!(res.verdict.is_complete(), "{}: {}", b.name, res.verdict);
        assert_eq!(res.bound, order_bound(&parsed.spec, b.size), "{}", b.name);
        assert!(res.states_checked >= res.bound);
        assert_eq!(grid_check(&lp, &parsed.spec, 30), None, "{}", b.name);
        let cert = Certificate::new(&lp, &parsed.spec, &res);
        assert!(cert.replay(&lp), "{}", b.name);
        let json: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(json["verdict"]["status"], "holds-complete");
    }
}

#[test]
fn perturbed_originals_fail_with_a_real_witness() {
    for b in benchmarks() {
        let parsed = spec(b.invariant, b.vars, b.params);
        let vars = system_vars(&b);
        let mut bm = b.b.clone();
        // Nudge the constant column of the first variable the invariant reads.
        let row = vars.iter().position(|v| parsed.spec.mentioned_vars().contains(v)).unwrap();
        let last = bm[row].len() - 1;
        bm[row][last] = &bm[row][last] + &r(1);
        let lp = ConcreteLoop::new(vars.clone(), bm, b.a.clone(), parsed.params.clone()).unwrap();
        let res = verify_complete(&lp, &parsed.spec, 20);
        let Verdict::Fails { n, conjunct, witness } = res.verdict else {
            panic!("{}: perturbed loop still verifies", b.name);
        };
        let params: Vec<(VarId, Rational)> = parsed
            .params
            .iter()
            .map(|p| (p.symbol.clone(), witness.iter().find(|(k, _)| k == p.symbol.name()).unwrap().1.clone()))
            .collect();
        let values: Vec<Rational> = params.iter().map(|(_, v)| v.clone()).collect();
        let state = lp.trace(&values, n + 1).pop().unwrap();
        assert!(!residuals(&parsed.spec, &vars, &state, &params)[conjunct].is_zero(), "{}", b.name);
    }
}

#[test]
fn bounded_mode_never_claims_completeness() {
    let (x, y) = xy();
    let lp = ConcreteLoop::from_ints(&[x, y], &[&[2, 0], &[0, 2]], &[2, 1]).unwrap();
    let res = unroll_check(&lp, &x_minus_2y(), 50, CheckMode::Bounded);
    assert_eq!(res.verdict, Verdict::HoldsBounded { n_checked: 51 });
    let short = unroll_check(&lp, &x_minus_2y(), 2, CheckMode::CompleteIfBoundMet);
    assert!(!short.verdict.is_complete());
}

#[test]
fn parameterized_loop_is_checked_symbolically() {
    // r, q = x0, 0 with y fixed at y0 keeps x0 = q*y0 + r.
    let b = &benchmarks()[3];
    let parsed = spec(b.invariant, b.vars, b.params);
    let lp = ConcreteLoop::new(system_vars(b), b.b.clone(), b.a.clone(), parsed.params.clone()).unwrap();
    assert!(lp.is_parameterized());
    let x0 = lp.initial_symbolic();
    assert!(x0.iter().any(|p| !p.is_constant()));
    let Parameter { symbol, .. } = &parsed.params[0];
    assert!(x0[0].contains_var(symbol));
}

/// A loop with a conserved linear form: `v^T B = v^T` when `B = I + u w^T`
/// and `v . u = 0`, so `v . X_n = v . X_0` for every `n`.
fn conserved_loop(rng: &mut ChaCha8Rng, s: usize) -> (ConcreteLoop, InvariantSpec) {
    let vars: Vec<VarId> = (0..s).map(|i| VarId::program(format!("v{i}"))).collect();
    let mut v: Vec<Rational> = (0..s).map(|_| small_rational(rng)).collect();
    if v[s - 1].is_zero() {
        v[s - 1] = r(1);
    }
    let mut u: Vec<Rational> = (0..s).map(|_| small_rational(rng)).collect();
    let dot = (0..s - 1).fold(Rational::zero(), |acc, i| &acc + &(&v[i] * &u[i]));
    u[s - 1] = -&(&dot / &v[s - 1]);
    let w: Vec<Rational> = (0..s).map(|_| small_rational(rng)).collect();
    let b: Vec<Vec<Rational>> = (0..s)
        .map(|i| (0..s).map(|j| &Rational::from_int(i64::from(i == j)) + &(&u[i] * &w[j])).collect())
        .collect();
    let x0: Vec<Rational> = (0..s).map(|_| Rational::from_int(rng.gen_range(-5..=5))).collect();
    let a = x0.iter().map(|c| vec![c.clone()]).collect();
    let lp = ConcreteLoop::new(vars.clone(), b, a, Vec::new()).unwrap();
    let form = vars.iter().zip(&v).fold(Polynomial::zero(), |acc, (x, c)| &acc + &Polynomial::var(x.clone()).scale(c));
    let start = x0.iter().zip(&v).fold(Rational::zero(), |acc, (x, c)| &acc + &(x * c));
    let p = &form - &Polynomial::constant(start);
    (lp, InvariantSpec::new(vec![p], vars, BTreeMap::new()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conserved_forms_verify(seed in any::<u64>(), s in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lp, spec) = conserved_loop(&mut rng, s);
        let res = verify_complete(&lp, &spec, 5);
        prop_assert!(res.verdict.is_complete(), "{}", res.verdict);
        let cert = Certificate::new(&lp, &spec, &res);
        prop_assert!(cert.replay(&lp));
    }

    #[test]
    fn verdicts_agree_with_numeric_unrolling(seed in any::<u64>(), s in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lp, mut spec) = conserved_loop(&mut rng, s);
        // A random quadratic in place of the conserved form.
        let extra = random_polynomial(&mut rng, &lp.vars, 2, 2);
        spec.polys[0] = &spec.polys[0] + &extra;
        let res = verify_complete(&lp, &spec, 5);
        let trace = lp.trace(&[], res.bound.max(1) + 5);
        let first_bad = trace.iter().position(|st| residuals(&spec, &lp.vars, st, &[]).iter().any(|c| !c.is_zero()));
        match res.verdict {
            Verdict::Fails { n, .. } => prop_assert_eq!(first_bad, Some(n)),
            Verdict::HoldsComplete { .. } => prop_assert_eq!(first_bad, None),
            Verdict::HoldsBounded { .. } => prop_assert!(false, "complete check reported bounded"),
        }
    }
}
