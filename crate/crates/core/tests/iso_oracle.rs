use std::sync::Arc;

use decat_core::universe::for_each_instance;
use decat_core::{canonical_form, find_iso, presets, validate_morphism, Bounds, Instance, Schema};

/// Equal canonical forms exactly when an isomorphism exists, over every
/// labelled instance with the given carrier sizes.
fn check_sizes(schema: &Arc<Schema>, sizes: &[usize]) -> usize {
    let mut all = Vec::new();
    for_each_instance(schema, sizes, |i| all.push(Arc::new(i)));
    let forms: Vec<_> = all.iter().map(|i| canonical_form(i)).collect();
    for (i, x) in all.iter().enumerate() {
        for (j, y) in all.iter().enumerate().skip(i) {
            let iso = find_iso(x, y).unwrap();
            if let Some(m) = &iso {
                assert_eq!(validate_morphism(m), Ok(()));
                assert!(m.is_iso());
            }
            assert_eq!(forms[i] == forms[j], iso.is_some(), "{x:?} vs {y:?}");
        }
    }
    all.len()
}

fn check(schema: Schema, total: usize) {
    let schema = Arc::new(schema);
    for sizes in Bounds::uniform(&schema, total).size_vectors() {
        if sizes.iter().sum::<usize>() <= total {
            check_sizes(&schema, &sizes);
        }
    }
}

#[test]
fn digraph_forms_agree_with_isomorphism() {
    check(presets::digraph(), 5);
}

#[test]
fn endofunction_forms_agree_with_isomorphism() {
    check(presets::endo(), 4);
}

#[test]
fn function_forms_agree_with_isomorphism() {
    check(presets::fun(), 5);
}

#[test]
fn group_set_forms_agree_with_isomorphism() {
    check(presets::c2(), 5);
    check(presets::c3(), 5);
    check(presets::s3(), 4);
}

#[test]
fn different_sizes_never_share_a_form() {
    let schema = Arc::new(presets::digraph());
    let a = Instance::from_names(schema.clone(), &[("V", &["a"])], &[]).unwrap();
    let b = Instance::from_names(schema.clone(), &[("V", &["a", "b"])], &[]).unwrap();
    assert_ne!(canonical_form(&a), canonical_form(&b));
}
