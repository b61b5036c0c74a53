use std::collections::BTreeSet;
use std::sync::Arc;

use decat_core::universe::for_each_instance;
use decat_core::{count_homs, count_homs_direct, enumerate_homs, presets, validate_morphism, Instance, Schema};

/// Every family of functions, kept when it commutes with every arrow.
fn naive_homs(x: &Instance, y: &Instance) -> BTreeSet<Vec<Vec<usize>>> {
    let schema = x.schema();
    let mut families: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for d in 0..schema.node_count() {
        let mut maps: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..x.size(d) {
            maps = maps.into_iter().flat_map(|m| (0..y.size(d)).map(move |v| [m.clone(), vec![v]].concat())).collect();
        }
        families = families
            .into_iter()
            .flat_map(|f| maps.iter().map(move |m| [f.clone(), vec![m.clone()]].concat()))
            .collect();
    }
    families
        .into_iter()
        .filter(|h| {
            schema.arrows().iter().enumerate().all(|(ai, a)| {
                (0..x.size(a.source)).all(|e| h[a.target][x.apply(ai, e)] == y.apply(ai, h[a.source][e]))
            })
        })
        .collect()
}

fn size_vectors(nodes: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..nodes {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let used: usize = v.iter().sum();
                (0..=total - used).map(move |k| [v.clone(), vec![k]].concat())
            })
            .collect();
    }
    out
}

fn all_instances(schema: &Arc<Schema>, total: usize) -> Vec<Arc<Instance>> {
    let mut out = Vec::new();
    for sizes in size_vectors(schema.node_count(), total) {
        for_each_instance(schema, &sizes, |i| out.push(Arc::new(i)));
    }
    out
}

fn check(schema: Schema, total: usize) -> usize {
    let schema = Arc::new(schema);
    let all = all_instances(&schema, total);
    let mut pairs = 0;
    for x in &all {
        for y in all.iter().filter(|y| x.total_size() + y.total_size() <= total) {
            let expected = naive_homs(x, y);
            let found = enumerate_homs(x, y).unwrap();
            let got: BTreeSet<Vec<Vec<usize>>> = found.morphisms.iter().map(|m| m.components().to_vec()).collect();
            assert_eq!(got.len(), found.count(), "duplicates for {x:?} -> {y:?}");
            assert_eq!(got, expected, "{x:?} -> {y:?}");
            for m in &found.morphisms {
                assert_eq!(validate_morphism(m), Ok(()));
            }
            assert_eq!(count_homs(x, y).unwrap(), expected.len() as u64);
            assert_eq!(count_homs_direct(x, y).unwrap(), expected.len() as u64);
            pairs += 1;
        }
    }
    pairs
}

#[test]
fn digraph_homs_match_naive_filter() {
    assert!(check(presets::digraph(), 6) > 1000);
}

#[test]
fn endofunction_homs_match_naive_filter() {
    assert!(check(presets::endo(), 5) > 100);
}

#[test]
fn function_homs_match_naive_filter() {
    assert!(check(presets::fun(), 5) > 100);
}

#[test]
fn group_set_homs_match_naive_filter() {
    for schema in [presets::c2(), presets::c3(), presets::s3()] {
        assert!(check(schema, 6) > 0);
    }
}
