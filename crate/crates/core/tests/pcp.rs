mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use loopsynth::pcp::{assemble, decompose_params, ClauseSet, GuardMode, InvariantSpec, PcpError};
use loopsynth::poly::{Polynomial, VarId};
use loopsynth::recurrence::{build_templates, int_partitions, IntegerPartition, MatrixShape};
use loopsynth::smt::encode;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shapes() -> [MatrixShape; 3] {
    MatrixShape::ALL
}

fn guards() -> [GuardMode; 3] {
    [GuardMode::None, GuardMode::NonconstantAll, GuardMode::NonconstantAny]
}

fn union_of_clause_vars(cs: &ClauseSet) -> BTreeSet<VarId> {
    cs.clauses().iter().flat_map(|c| c.variables()).collect()
}

#[test]
fn benchmark_pcps_are_parameter_free() {
    for b in benchmarks() {
        let parsed = spec(b.invariant, b.vars, b.params);
        let order = system_vars(&b);
        let one = order.last().unwrap().clone();
        let single = IntegerPartition::new(vec![b.size as u32]).unwrap();
        let (rt, cft) = build_templates(MatrixShape::UpperUnitriangular, &single, &parsed.params, &order, Some(&one)).unwrap();
        let pcp = assemble(&parsed.spec, &rt, &cft, GuardMode::NonconstantAll, None).unwrap();
        let params: BTreeSet<VarId> = rt.param_symbols().into_iter().collect();
        assert_eq!(params.len(), b.params.len(), "{}", b.name);
        let free = pcp.clauses.free_vars();
        assert!(free.is_disjoint(&params), "{}: parameters survive decomposition", b.name);
        for v in b.vars.iter().map(|v| VarId::program(*v)) {
            assert!(!free.contains(&v), "{}: program variable {v:?} in PCP", b.name);
        }
        assert_eq!(free, &union_of_clause_vars(&pcp.clauses), "{}", b.name);
        let sum = pcp.sizes.roots + pcp.sizes.init + pcp.sizes.coeff + pcp.sizes.alg + pcp.sizes.guards;
        assert!(pcp.clauses.len() <= sum);
    }
}

#[test]
fn decomposition_is_idempotent_and_keeps_parameter_free_clauses() {
    let b = &benchmarks()[3];
    let parsed = spec(b.invariant, b.vars, b.params);
    let order = system_vars(b);
    let single = IntegerPartition::new(vec![5]).unwrap();
    let (rt, cft) = build_templates(MatrixShape::UpperUnitriangular, &single, &parsed.params, &order, order.last()).unwrap();
    let pcp = assemble(&parsed.spec, &rt, &cft, GuardMode::NonconstantAll, None).unwrap();
    let again = decompose_params(&pcp.clauses, &rt.param_symbols());
    assert_eq!(again.to_text(), pcp.clauses.to_text());
}

#[test]
fn encoding_is_deterministic_across_builds() {
    let build = || {
        let parsed = spec("x0 == y0*q+r", &["x", "q", "r", "y"], &["x0", "y0"]);
        let order: Vec<VarId> = ["x", "q", "r", "y", "one"].into_iter().map(VarId::program).collect();
        let single = IntegerPartition::new(vec![5]).unwrap();
        let (rt, cft) = build_templates(MatrixShape::UpperUnitriangular, &single, &parsed.params, &order, order.last()).unwrap();
        encode(&assemble(&parsed.spec, &rt, &cft, GuardMode::NonconstantAll, None).unwrap().clauses)
    };
    let first = build();
    assert_eq!(first, build());
    assert!(first.contains("(check-sat)"));
    assert!(first.contains("(declare-const"));
}

#[test]
fn json_round_trip_on_every_partition() {
    let (x, y) = (VarId::program("x"), VarId::program("y"));
    let p = &Polynomial::var(x.clone()) - &Polynomial::var(y.clone()).pow(2);
    let inv = InvariantSpec::new(vec![p], vec![x.clone(), y.clone()], BTreeMap::new()).unwrap();
    let order = [x, y, VarId::program("one")];
    for part in int_partitions(3).unwrap() {
        for shape in shapes() {
            let Ok((rt, cft)) = build_templates(shape, &part, &[], &order, order.last()) else {
                continue;
            };
            let pcp = assemble(&inv, &rt, &cft, GuardMode::NonconstantAny, None).unwrap();
            let back = ClauseSet::from_json(&pcp.clauses.to_json()).unwrap();
            assert_eq!(back.to_text(), pcp.clauses.to_text(), "{shape:?} {part:?}");
            assert_eq!(back.free_vars().len(), pcp.clauses.free_vars().len());
        }
    }
}

#[test]
fn guard_family_size_follows_mode() {
    let parsed = spec("x == 2y", &["x", "y"], &[]);
    let order: Vec<VarId> = ["x", "y"].into_iter().map(VarId::program).collect();
    let double = IntegerPartition::new(vec![2]).unwrap();
    let sizes: Vec<usize> = guards()
        .into_iter()
        .map(|g| {
            let (rt, cft) = build_templates(MatrixShape::Full, &double, &[], &order, None).unwrap();
            assemble(&parsed.spec, &rt, &cft, g, None).unwrap().sizes.guards
        })
        .collect();
    assert_eq!(sizes, vec![0, 2, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn assembled_pcps_are_well_formed(seed in any::<u64>(), shape_ix in 0usize..3, guard_ix in 0usize..3, aux in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (VarId::program("x"), VarId::program("y"));
        let mut p = random_polynomial(&mut rng, &[x.clone(), y.clone()], 3, 2);
        if p.is_constant() {
            p = &p + &Polynomial::var(x.clone());
        }
        let inv = InvariantSpec::new(vec![p], vec![x.clone(), y.clone()], BTreeMap::new()).unwrap();
        let mut order = vec![x, y];
        let one = VarId::program("one");
        if aux {
            order.push(one.clone());
        }
        let parts: Vec<IntegerPartition> = int_partitions(order.len()).unwrap().collect();
        let part = &parts[(seed as usize) % parts.len()];
        let built = build_templates(shapes()[shape_ix], part, &[], &order, aux.then_some(&one));
        prop_assume!(built.is_ok());
        let (rt, cft) = built.unwrap();
        let pcp = match assemble(&inv, &rt, &cft, guards()[guard_ix], None) {
            Ok(p) => p,
            // Last unitriangular row without aux is the identity.
            Err(PcpError::UnsatisfiableGuard(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert_eq!(pcp.clauses.free_vars(), &union_of_clause_vars(&pcp.clauses));
        for c in pcp.clauses.clauses() {
            prop_assert!(!c.disjuncts.is_empty());
            for d in &c.disjuncts {
                prop_assert!(d.constant_truth().is_none() || pcp.clauses.is_trivially_unsat());
            }
        }
        let back = ClauseSet::from_json(&pcp.clauses.to_json()).unwrap();
        prop_assert_eq!(back.to_text(), pcp.clauses.to_text());
    }
}
