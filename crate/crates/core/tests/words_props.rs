use proptest::prelude::*;

use ms3::equivalence::Isomorphism;
use ms3::model::SurfaceRegion;
use ms3::words::{canonical_form, invert, least_rotation, lists_equivalent, rotate_equal, slw_equivalent, CyclicWord, Letter};

fn letter() -> impl Strategy<Value = Letter> {
    (0u8..3, any::<bool>()).prop_map(|(l, neg)| {
        let label = ["a", "b", "c"][l as usize];
        if neg { Letter::neg(label) } else { Letter::pos(label) }
    })
}

fn word() -> impl Strategy<Value = CyclicWord> {
    prop::collection::vec(letter(), 1..8).prop_map(|v| CyclicWord::new(v).unwrap())
}

fn identity(labels: &[&str]) -> Isomorphism {
    Isomorphism {
        edge_map: labels.iter().map(|l| (l.to_string(), l.to_string())).collect(),
        ..Default::default()
    }
}

fn region(id: &str, genus: i64, words: &[&str]) -> SurfaceRegion {
    SurfaceRegion { id: id.into(), genus_signed: genus, words: words.iter().map(|w| CyclicWord::from_notation(w)).collect() }
}

proptest! {
    #[test]
    fn booth_matches_brute_force(w in word()) {
        let brute = (0..w.len()).map(|i| w.rotated(i)).min().unwrap();
        prop_assert_eq!(least_rotation(&w), brute);
    }

    #[test]
    fn rotations_are_rotate_equal(w in word(), k in 0usize..8) {
        prop_assert!(rotate_equal(&w, &w.rotated(k % w.len())));
    }

    #[test]
    fn rotate_equal_is_an_equivalence(a in word(), b in word(), c in word(), k in 0usize..8) {
        prop_assert!(rotate_equal(&a, &a));
        prop_assert_eq!(rotate_equal(&a, &b), rotate_equal(&b, &a));
        let b2 = a.rotated(k % a.len());
        if rotate_equal(&b2, &c) {
            prop_assert!(rotate_equal(&a, &c));
        }
    }

    #[test]
    fn invert_is_an_involution(w in word()) {
        prop_assert_eq!(invert(&invert(&w)), w);
    }

    #[test]
    fn canonical_form_is_inversion_symmetric(w in word()) {
        let c = canonical_form(&w);
        prop_assert_eq!(&canonical_form(&invert(&w)), &c);
        prop_assert!(rotate_equal(&c, &w) || rotate_equal(&c, &invert(&w)));
    }

    #[test]
    fn canonical_form_is_minimal(w in word()) {
        let inv = invert(&w);
        let best = (0..w.len()).flat_map(|i| [w.rotated(i), inv.rotated(i)]).min().unwrap();
        prop_assert_eq!(canonical_form(&w), best);
    }

    #[test]
    fn lists_ignore_rotation_and_inversion(ws in prop::collection::vec(word(), 1..4), k in 0usize..8, flip in any::<bool>()) {
        let l1 = SurfaceRegion { id: "L".into(), genus_signed: 0, words: ws.clone() };
        let mut changed = ws.clone();
        let w = &changed[0];
        let w = w.rotated(k % w.len());
        changed[0] = if flip { invert(&w) } else { w };
        changed.reverse();
        let l2 = SurfaceRegion { id: "M".into(), genus_signed: 0, words: changed };
        prop_assert!(lists_equivalent(&l1, &l2, &identity(&["a", "b", "c"])));
    }
}

#[test]
fn list_examples() {
    let iso = identity(&["a", "b", "c"]);
    let l1 = region("L1", 0, &["a", "b^-1"]);
    assert!(lists_equivalent(&l1, &region("X", 0, &["a", "b^-1"]), &iso));
    assert!(!lists_equivalent(&l1, &region("X", 1, &["a", "b^-1"]), &iso));
    let l3 = region("L3", 0, &["a^-1", "b", "c^-1"]);
    assert!(lists_equivalent(&l3, &region("X", 0, &["a", "b^-1", "c"]), &iso));
}

#[test]
fn slw_examples() {
    let iso = identity(&["a", "b", "c", "d"]);
    let trivial = ms3::catalog::trivial_orbit_flow(1, 1).unwrap();
    let s: Vec<_> = trivial.surfaces.values().cloned().collect();
    let m = slw_equivalent(&s, &s, &iso).unwrap();
    assert!(m.iter().all(|(a, b)| a == b));
    assert!(slw_equivalent(&s, &s[..5], &iso).is_none());

    let twisted = ms3::catalog::twisted_orbit_flow(0).unwrap();
    let mut t: Vec<_> = twisted.surfaces.values().cloned().collect();
    let original = t.clone();
    t.rotate_left(1);
    for (i, r) in t.iter_mut().enumerate() {
        r.id = format!("M{i}");
    }
    let m = slw_equivalent(&original, &t, &iso).unwrap();
    assert_eq!(m.len(), 3);
}
