use std::sync::Arc;

use decat_core::{presets, Bounds, Schema};
use decat_harness::{replay, run_suite, Engine, Status, SuiteConfig, VerificationReport, SUITES};

fn schema(name: &str) -> Arc<Schema> {
    Arc::new(presets::by_name(name).unwrap())
}

fn without_timing(mut r: VerificationReport) -> VerificationReport {
    r.elapsed_ms = 0;
    r
}

#[test]
fn every_suite_passes_on_small_digraphs() {
    let g = schema("digraph");
    let cfg = SuiteConfig::new(&g, Bounds(vec![2, 2]), 3, 25);
    for suite in SUITES.iter().filter(|s| **s != "burnside") {
        let r = run_suite(suite, &cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.to_text());
        assert!(r.checks() > 0);
    }
}

#[test]
fn every_suite_passes_on_small_group_sets() {
    for name in ["c2", "c3"] {
        let s = schema(name);
        let cfg = SuiteConfig::new(&s, Bounds(vec![4]), 11, 20);
        for suite in SUITES {
            let r = run_suite(suite, &cfg).unwrap();
            assert_eq!(r.status, Status::Pass, "{}", r.to_text());
        }
    }
}

#[test]
fn two_node_function_schema_passes() {
    let s = schema("fun");
    let cfg = SuiteConfig::new(&s, Bounds(vec![2, 2]), 5, 15);
    for suite in SUITES.iter().filter(|s| **s != "burnside") {
        let r = run_suite(suite, &cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.to_text());
    }
}

#[test]
fn burnside_has_nothing_to_check_on_a_non_group() {
    for name in ["endo", "digraph"] {
        let s = schema(name);
        let r = run_suite("burnside", &SuiteConfig::new(&s, Bounds(vec![2; s.node_count()]), 0, 1)).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.to_text());
        assert_eq!(r.checks(), 0);
    }
}

#[test]
fn shared_tag_coproduct_is_caught_and_replays() {
    let g = schema("digraph");
    let cfg = SuiteConfig::new(&g, Bounds(vec![2, 1]), 1, 40).with_engine(Engine::SharedTag);
    let r = run_suite("extensive", &cfg).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(!r.failures.is_empty());
    for w in &r.failures {
        assert_eq!(w.engine, "shared-tag");
        let again = replay(w).unwrap();
        assert!(again.is_some(), "witness for {} did not reproduce", w.property);
        if !w.document.contains("morphism ") {
            let mut fixed = w.clone();
            fixed.engine = "standard".into();
            assert_eq!(replay(&fixed).unwrap(), None, "{} fails even with the standard coproduct", w.property);
        }
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let g = schema("digraph");
    let cfg = SuiteConfig::new(&g, Bounds(vec![2, 2]), 9, 20);
    let run = |threads: usize, suite: &str| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| without_timing(run_suite(suite, &cfg).unwrap()))
    };
    for suite in SUITES {
        let one = run(1, suite);
        assert_eq!(one, run(4, suite), "{suite}");
        assert_eq!(one.to_json(), run(3, suite).to_json());
    }
}

#[test]
fn seeds_change_the_sample() {
    let g = schema("digraph");
    let a = run_suite("hom-morphism", &SuiteConfig::new(&g, Bounds(vec![2, 2]), 1, 10)).unwrap();
    let b = run_suite("hom-morphism", &SuiteConfig::new(&g, Bounds(vec![2, 2]), 2, 10)).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.seed + 1, b.seed);
}

#[test]
fn unknown_suite_is_an_error() {
    let g = schema("digraph");
    assert!(run_suite("nope", &SuiteConfig::new(&g, Bounds(vec![1, 1]), 0, 1)).is_err());
}

#[test]
fn s3_marks_are_triangular() {
    let s = schema("s3");
    let r = run_suite("burnside", &SuiteConfig::new(&s, Bounds(vec![6]), 0, 1)).unwrap();
    assert_eq!(r.status, Status::Pass, "{}", r.to_text());
    assert_eq!(r.universe_size, 4);
}
