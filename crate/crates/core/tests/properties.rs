use std::sync::Arc;

use proptest::prelude::*;

use decat_core::construct::{coproduct, product, relabel};
use decat_core::{
    canonical_form, canonical_relabeling, class_of, connected_components, count_homs, count_homs_direct, find_iso,
    is_connected, presets, to_ring, validate_morphism, Instance, Schema,
};

fn digraph() -> Arc<Schema> {
    Arc::new(presets::digraph())
}

fn endo() -> Arc<Schema> {
    Arc::new(presets::endo())
}

fn graphs(max_v: usize, max_e: usize) -> impl Strategy<Value = Arc<Instance>> {
    (1..=max_v, 0..=max_e)
        .prop_flat_map(|(v, e)| (Just(v), prop::collection::vec(0..v, e), prop::collection::vec(0..v, e)))
        .prop_map(|(v, s, t)| {
            let carriers =
                vec![(0..v).map(|i| format!("v{i}")).collect(), (0..s.len()).map(|i| format!("e{i}")).collect()];
            Arc::new(Instance::from_tables(digraph(), carriers, vec![s, t]).unwrap())
        })
}

fn endofunctions(max: usize) -> impl Strategy<Value = Arc<Instance>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(0..n, n)).prop_map(|f| {
        let carriers = vec![(0..f.len()).map(|i| format!("x{i}")).collect()];
        Arc::new(Instance::from_tables(endo(), carriers, vec![f]).unwrap())
    })
}

fn sum(a: &Arc<Instance>, b: &Arc<Instance>) -> Arc<Instance> {
    coproduct(a, b).unwrap().object
}

fn times(a: &Arc<Instance>, b: &Arc<Instance>) -> Arc<Instance> {
    product(a, b).unwrap().object
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forms_survive_relabeling(x in graphs(4, 5), seed in any::<u64>()) {
        let (y, iso) = relabel(&x, seed);
        prop_assert!(iso.is_iso());
        prop_assert_eq!(canonical_form(&x), canonical_form(&y));
    }

    #[test]
    fn endofunction_forms_survive_relabeling(x in endofunctions(9), seed in any::<u64>()) {
        let (y, _) = relabel(&x, seed);
        prop_assert_eq!(canonical_form(&x), canonical_form(&y));
    }

    #[test]
    fn canonical_relabeling_is_an_iso(x in graphs(4, 5)) {
        let (canon, iso) = canonical_relabeling(&x);
        prop_assert_eq!(validate_morphism(&iso), Ok(()));
        prop_assert!(iso.is_iso());
        prop_assert_eq!(canonical_form(&canon).to_instance(), (*canon).clone());
    }

    #[test]
    fn equal_forms_have_an_isomorphism(x in endofunctions(6), y in endofunctions(6)) {
        prop_assert_eq!(canonical_form(&x) == canonical_form(&y), find_iso(&x, &y).unwrap().is_some());
    }

    #[test]
    fn sizes_add_and_multiply(a in graphs(3, 3), b in graphs(3, 3)) {
        let (s, p) = (sum(&a, &b), times(&a, &b));
        for d in 0..2 {
            prop_assert_eq!(s.size(d), a.size(d) + b.size(d));
            prop_assert_eq!(p.size(d), a.size(d) * b.size(d));
        }
    }

    #[test]
    fn components_add(a in graphs(3, 3), b in graphs(3, 3)) {
        let s = sum(&a, &b);
        let dec = connected_components(&s).unwrap();
        prop_assert_eq!(dec.len(), connected_components(&a).unwrap().len() + connected_components(&b).unwrap().len());
        prop_assert!(dec.witness.is_iso());
        prop_assert!(dec.components.iter().all(|c| is_connected(c)));
    }

    #[test]
    fn hom_counts_respect_sums_and_products(a in graphs(2, 2), b in graphs(2, 2), y in graphs(3, 3)) {
        let count = |x: &Instance, y: &Instance| count_homs(x, y).unwrap();
        prop_assert_eq!(count(&sum(&a, &b), &y), count(&a, &y) * count(&b, &y));
        prop_assert_eq!(count(&y, &times(&a, &b)), count(&y, &a) * count(&y, &b));
        prop_assert_eq!(count(&a, &y), count_homs_direct(&a, &y).unwrap());
        if is_connected(&y) {
            prop_assert_eq!(count(&y, &sum(&a, &b)), count(&y, &a) + count(&y, &b));
        }
    }

    #[test]
    fn classes_form_a_semiring(a in graphs(2, 2), b in graphs(2, 2), c in graphs(2, 2)) {
        let (ca, cb, cc) = (class_of(&a).unwrap(), class_of(&b).unwrap(), class_of(&c).unwrap());
        prop_assert_eq!(class_of(&sum(&a, &b)).unwrap(), ca.add(&cb).unwrap());
        prop_assert_eq!(class_of(&times(&a, &b)).unwrap(), ca.mul(&cb).unwrap());
        prop_assert_eq!(ca.add(&cb).unwrap(), cb.add(&ca).unwrap());
        prop_assert_eq!(ca.mul(&cb).unwrap(), cb.mul(&ca).unwrap());
        prop_assert_eq!(ca.mul(&cb).unwrap().mul(&cc).unwrap(), ca.mul(&cb.mul(&cc).unwrap()).unwrap());
        prop_assert_eq!(
            ca.mul(&cb.add(&cc).unwrap()).unwrap(),
            ca.mul(&cb).unwrap().add(&ca.mul(&cc).unwrap()).unwrap()
        );
    }

    #[test]
    fn endofunction_products_are_multiplicative(a in endofunctions(4), b in endofunctions(4)) {
        prop_assert_eq!(class_of(&times(&a, &b)).unwrap(), class_of(&a).unwrap().mul(&class_of(&b).unwrap()).unwrap());
    }

    #[test]
    fn ring_embedding_round_trips(a in graphs(3, 3)) {
        let c = class_of(&a).unwrap();
        prop_assert_eq!(to_ring(&c).to_class(), Some(c.clone()));
        prop_assert!(to_ring(&c).sub(&to_ring(&c)).unwrap().is_zero());
    }
}
