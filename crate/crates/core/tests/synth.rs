mod common;

use std::collections::BTreeSet;

use common::*;
use loopsynth::recurrence::{IntegerPartition, MatrixShape};
use loopsynth::smt::SolverConfig;
use loopsynth::synth::{synthesize, SearchMode, SynthesisProblem};
use loopsynth::verify::verify_complete;

fn x2y() -> SynthesisProblem {
    let mut p = SynthesisProblem::new(spec("x == 2y", &["x", "y"], &[]).spec);
    p.solver = SolverConfig::default().with_timeout_ms(30_000);
    p
}

#[test]
fn search_modes_parse() {
    assert_eq!("first".parse::<SearchMode>().unwrap(), SearchMode::First);
    assert_eq!("all:4".parse::<SearchMode>().unwrap(), SearchMode::AllUpTo(4));
    assert_eq!("exhaustive".parse::<SearchMode>().unwrap(), SearchMode::Exhaustive);
    assert!("all:0".parse::<SearchMode>().is_err());
    assert_eq!(SearchMode::AllUpTo(4).to_string(), "all:4");
}

#[test]
fn configurations_cover_shapes_partitions_and_orders() {
    let mut p = x2y();
    p.size = 3;
    let mut cursor = p.configurations().unwrap();
    let mut seen = Vec::new();
    while let Some(c) = cursor.next_config() {
        seen.push(c);
    }
    assert!(cursor.is_exhausted());
    // Full is order-insensitive: one order per partition of 3.
    let full = seen.iter().filter(|c| c.shape == MatrixShape::Full).count();
    assert_eq!(full, 3);
}

#[test]
fn every_returned_loop_is_verified_independently() {
    if !solver_available() {
        return;
    }
    let mut p = x2y();
    p.search = SearchMode::AllUpTo(4);
    p.distinct_updates = true;
    let report = synthesize(&p).unwrap();
    assert_eq!(report.verified().count(), 4);
    let mut updates = BTreeSet::new();
    for sl in report.verified() {
        let lp = sl.data.exact().unwrap();
        assert!(verify_complete(lp, &p.spec, 10).verdict.is_complete());
        assert!(updates.insert(format!("{:?}", lp.b)));
    }
}

#[test]
fn parallel_jobs_find_the_same_kind_of_answer() {
    if !solver_available() {
        return;
    }
    let mut p = x2y();
    p.search = SearchMode::Exhaustive;
    p.shapes = vec![MatrixShape::UpperTriangular];
    p.partitions = Some(vec![IntegerPartition::new(vec![3]).unwrap()]);
    let serial = synthesize(&p).unwrap();
    p.jobs = 2;
    let parallel = synthesize(&p).unwrap();
    assert_eq!(serial.configs.len(), parallel.configs.len());
    let statuses = |r: &loopsynth::synth::SearchReport| r.configs.iter().map(|c| c.status.clone()).collect::<Vec<_>>();
    assert_eq!(statuses(&serial), statuses(&parallel));
    assert!(parallel.has_verified());
}

#[test]
fn size_two_needs_a_scaling_loop() {
    if !solver_available() {
        return;
    }
    let mut p = x2y();
    p.aux = false;
    p.size = 2;
    p.shapes = vec![MatrixShape::Full];
    let report = synthesize(&p).unwrap();
    let sl = report.verified().next().expect("a loop at s = 2");
    let lp = sl.data.exact().unwrap();
    // Without a constant slot the updates are linear, so X_0 itself must
    // satisfy the invariant and B must map the line x = 2y to itself.
    let x0 = lp.trace(&[], 1).remove(0);
    assert_eq!(x0[0], &x0[1] * &r(2));
    let next = lp.step(&[r(2), r(1)]);
    assert_eq!(next[0], &next[1] * &r(2));
}
