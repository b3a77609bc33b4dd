use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ms3::catalog;
use ms3::format::{parse_flow, serialize, FormatError};
use ms3::relabel::{random_relabeling, relabel};

fn texts() -> Vec<String> {
    catalog::list_keys().iter().map(|k| serialize(&catalog::emit(k).unwrap())).collect()
}

const ALPHABET: &[char] = &['a', 'x', '0', '7', '-', '=', '(', ')', ',', '|', '[', ']', '^', ' ', '#', '>', '\n', 'é'];

fn mutate(text: &str, pos: usize, kind: u8, c: char) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let pos = pos % chars.len();
    match kind % 3 {
        0 => chars[pos] = c,
        1 => {
            chars.remove(pos);
        }
        _ => chars.insert(pos, c),
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn relabeled_round_trip(item in 0usize..17, seed in any::<u64>()) {
        let p = catalog::emit(&catalog::list_keys()[item]).unwrap();
        let q = relabel(&p, &random_relabeling(&p, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let text = serialize(&q);
        prop_assert_eq!(serialize(&q), text.clone());
        prop_assert_eq!(parse_flow(&text).unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mutations_never_panic_and_errors_are_located(item in 0usize..17, pos in any::<usize>(), kind in any::<u8>(), c in prop::sample::select(ALPHABET)) {
        let text = mutate(&texts()[item], pos, kind, c);
        match parse_flow(&text) {
            Ok(_) | Err(FormatError::Invalid(_)) => {}
            Err(FormatError::Missing(_)) => {}
            Err(e @ (FormatError::Syntax { .. } | FormatError::Semantic { .. })) => {
                let (line, column) = e.location().unwrap();
                let lines: Vec<&str> = text.lines().collect();
                prop_assert!(line >= 1 && line <= lines.len().max(1), "{e}");
                prop_assert!(column >= 1 && column <= lines[line - 1].chars().count() + 1, "{e}");
            }
        }
    }
}

#[test]
fn broken_grammar_is_rejected_with_location() {
    let text = serialize(&catalog::trivial_orbit_flow(1, 1).unwrap());
    let cases = [
        ("orient=fixed", "orient=fixd"),
        ("[handle T1]", "[handle T1"),
        ("alpha=1", "alpha=x"),
        ("boundary a^-1", "boundary a^-"),
        ("kind=round index=1", "kind=round index="),
    ];
    for (from, to) in cases {
        assert!(text.contains(from), "{from}");
        let err = parse_flow(&text.replacen(from, to, 1)).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { .. }), "{from} -> {to}: {err}");
    }
}

#[test]
fn duplicates_and_unknowns_are_semantic() {
    let text = serialize(&catalog::trivial_orbit_flow(1, 1).unwrap());
    for (from, to) in [("vertex A2", "vertex A1"), ("[surface L2]", "[surface L1]"), ("regions = L1 L2", "regions = L1 L9")] {
        let err = parse_flow(&text.replacen(from, to, 1)).unwrap_err();
        assert!(matches!(err, FormatError::Semantic { .. }), "{from}: {err}");
    }
}

#[test]
fn comments_and_blank_lines_ignored() {
    let p = catalog::builtin("annulus-pair").unwrap();
    let text = serialize(&p).replace("[graph]\n", "# header\n\n[graph]   # trailing\n");
    assert_eq!(parse_flow(&text).unwrap(), p);
}
