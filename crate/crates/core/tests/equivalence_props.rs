use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ms3::catalog;
use ms3::equivalence::{check_isomorphism, explain_equivalence, find_equivalence, verify_isomorphism, Stage, Verdict};
use ms3::model::{validate_presentation, FlowPresentation};
use ms3::relabel::{random_relabeling, relabel};

fn items() -> Vec<FlowPresentation> {
    catalog::list_keys().iter().map(|k| catalog::emit(k).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn relabeling_is_found_and_inverts(item in 0usize..17, seed in any::<u64>()) {
        let p = &items()[item];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_relabeling(p, &mut rng);
        let q = relabel(p, &r).unwrap();
        prop_assert!(validate_presentation(&q).is_empty());
        prop_assert_eq!(relabel(&q, &r.inverse()).unwrap(), p.clone());
        prop_assert!(check_isomorphism(p, &q, &r.as_isomorphism(p)));

        let iso = find_equivalence(p, &q).unwrap().expect("relabeling is an equivalence");
        prop_assert_eq!(verify_isomorphism(p, &q, &iso), Ok(()));
        prop_assert_eq!(verify_isomorphism(&q, p, &iso.inverse()), Ok(()));
    }
}

#[test]
fn catalog_families_are_distinct() {
    let all = items();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            assert!(find_equivalence(a, b).unwrap().is_none());
        }
    }
}

#[test]
fn ring_parity_is_a_tau_difference() {
    let even = catalog::twisted_orbit_flow_with_parity(2, 0).unwrap();
    let odd = catalog::twisted_orbit_flow_with_parity(2, 1).unwrap();
    match explain_equivalence(&even, &odd).unwrap() {
        Verdict::Inequivalent(m) => assert_eq!(m.stage, Stage::Tau, "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn ring_infinity_must_match() {
    let p = catalog::builtin("type1-L").unwrap();
    let q = catalog::with_infinite_ring_edge(p.clone(), "R1");
    assert!(find_equivalence(&p, &q).unwrap().is_none());
    let r = catalog::with_infinite_ring_edge(p.clone(), "R2");
    // R1 and R2 are interchangeable, so the infinite edge can sit on either.
    assert!(find_equivalence(&q, &r).unwrap().is_some());
}

#[test]
fn chosen_cycle_direction_matters() {
    let p = catalog::builtin("annulus-pair").unwrap();
    let mut q = p.clone();
    q.chosen_cycles.insert("T2".into(), ms3::CyclicWord::from_notation("z^-1"));
    match explain_equivalence(&p, &q).unwrap() {
        Verdict::Inequivalent(m) => assert_eq!(m.stage, Stage::Chosen, "{m}"),
        other => panic!("{other:?}"),
    }
}
