//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or exceeds its time limit.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ms3::catalog::{self, trivial_orbit_flow, twisted_orbit_flow};
use ms3::equivalence::{check_isomorphism, find_equivalence};
use ms3::format::{parse_flow, serialize};
use ms3::framed::{apply_operation, framings_equivalent, FrameValue, Framing, Move, MsGraph, PreparedGraph, ReachabilityOracle, Role};
use ms3::local::{first_return, TorusPoint};
use ms3::model::FlowPresentation;
use ms3::relabel::{random_relabeling, relabel};

const ORACLE_BOUND: i64 = 8;
const RETURN_MAP_TOLERANCE: f64 = 1e-12;
const SEED: u64 = 0x5eed_0003;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn equivalent(a: &FlowPresentation, b: &FlowPresentation) -> Result<bool, String> {
    match find_equivalence(a, b).map_err(|e| e.to_string())? {
        Some(iso) => {
            ensure(check_isomorphism(a, b, &iso), || "returned isomorphism fails the check".into())?;
            Ok(true)
        }
        None => Ok(false),
    }
}

fn trivial_family() -> Outcome {
    let signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let flows: Vec<_> = signs.iter().map(|&(a, b)| trivial_orbit_flow(a, b).unwrap()).collect();
    let mut absent = 0;
    for i in 0..flows.len() {
        ensure(equivalent(&flows[i], &flows[i])?, || format!("{:?} is not self-equivalent", signs[i]))?;
        for j in i + 1..flows.len() {
            ensure(!equivalent(&flows[i], &flows[j])?, || format!("{:?} ~ {:?}", signs[i], signs[j]))?;
            absent += 1;
        }
    }
    Ok(format!("{absent} pairs inequivalent, 4 self-equivalent"))
}

fn twisted_family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let flows: Vec<_> = (0..=5).map(|n| twisted_orbit_flow(n).unwrap()).collect();
    let mut absent = 0;
    for i in 0..flows.len() {
        for j in i + 1..flows.len() {
            ensure(!equivalent(&flows[i], &flows[j])?, || format!("n={i} ~ n={j}"))?;
            absent += 1;
        }
    }
    let mut relabels = 0;
    for (n, p) in flows.iter().enumerate() {
        for _ in 0..10 {
            let r = random_relabeling(p, &mut rng);
            let q = relabel(p, &r).map_err(|e| e.to_string())?;
            ensure(equivalent(p, &q)?, || format!("n={n} not equivalent to its relabeling {r:?}"))?;
            relabels += 1;
        }
    }
    Ok(format!("{absent} pairs inequivalent, {relabels} relabelings found"))
}

fn framed_oracle() -> Outcome {
    let graphs = common::connected_ms_graphs(4);
    let mut pairs = 0u64;
    for g in &graphs {
        let prepared = PreparedGraph::new(g);
        let mut oracle = ReachabilityOracle::new(g, ORACLE_BOUND);
        let fs = common::framings(g.edges().len(), -2, 2, 2);
        for f1 in &fs {
            for f2 in &fs {
                let lemma = prepared.equivalent(f1, f2).map_err(|e| e.to_string())?;
                let search = oracle.equivalent(f1, f2).map_err(|e| e.to_string())?;
                ensure(lemma == search, || {
                    format!("graph {g:?}: {f1:?} vs {f2:?}: lemmas say {lemma}, search says {search}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{} graphs, {pairs} framing pairs, 0 disagreements", graphs.len()))
}

fn fin(v: &[i64]) -> Framing {
    Framing::finite(v)
}

fn lemma_checks() -> Outcome {
    let parallel = MsGraph::build(&[("s", Role::Source), ("t", Role::Sink)], &[("e1", "s", "t"), ("e2", "s", "t")]).unwrap();
    let triangle = MsGraph::build(
        &[("s", Role::Source), ("x", Role::Saddle), ("t", Role::Sink)],
        &[("e1", "s", "x"), ("e2", "x", "t"), ("e3", "s", "t")],
    )
    .unwrap();
    let path = MsGraph::build(&[("s", Role::Source), ("x", Role::Saddle), ("t", Role::Sink)], &[("e1", "s", "x"), ("e2", "x", "t")]).unwrap();
    let inf = FrameValue::Infinite;
    let mixed = |a: FrameValue, b: FrameValue| Framing(vec![a, b]);
    let cases: Vec<(&str, &MsGraph, Framing, Framing, bool)> = vec![
        ("sum (type 1)", &parallel, fin(&[2, 3]), fin(&[0, 5]), true),
        ("sum differs (type 1)", &parallel, fin(&[2, 3]), fin(&[0, 4]), false),
        ("parity (type 2)", &triangle, fin(&[1, 1, 1]), fin(&[2, 2, 1]), true),
        ("parity differs (type 2)", &triangle, fin(&[1, 1, 1]), fin(&[2, 2, 0]), false),
        ("group difference (type 3)", &path, fin(&[1, 0]), fin(&[0, 1]), false),
        ("group difference kept (type 3)", &path, fin(&[1, 1]), fin(&[4, 4]), true),
        ("same infinite set", &path, mixed(inf, FrameValue::Finite(1)), mixed(inf, FrameValue::Finite(-5)), true),
        ("different infinite sets", &path, mixed(inf, FrameValue::Finite(1)), mixed(FrameValue::Finite(1), inf), false),
        ("infinite on one side only", &path, mixed(inf, FrameValue::Finite(0)), fin(&[0, 0]), false),
    ];
    for (name, g, f1, f2, expected) in &cases {
        let got = framings_equivalent(g, f1, f2).map_err(|e| e.to_string())?;
        ensure(got == *expected, || format!("{name}: expected {expected}, got {got}"))?;
    }
    let joint = apply_operation(&path, &fin(&[1, 1]), &Move::Joint { first: "e1".into(), second: "e2".into(), k: 3 })
        .map_err(|e| e.to_string())?;
    ensure(joint == fin(&[4, 4]), || format!("joint move gave {joint:?}"))?;
    let opposed = apply_operation(&parallel, &fin(&[2, 3]), &Move::Opposed { raised: "e1".into(), lowered: "e2".into(), k: 2 })
        .map_err(|e| e.to_string())?;
    ensure(opposed == fin(&[4, 1]), || format!("opposed move gave {opposed:?}"))?;
    Ok(format!("{} verdicts and 2 moves as stated", cases.len()))
}

fn first_return_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let rho = if rng.gen_bool(0.5) { 1.0 } else { 3.0 };
        let alpha = rng.gen_range(-4.0 * PI..4.0 * PI);
        let mut z: f64 = rng.gen_range(-1.0..1.0);
        if z == 0.0 {
            z = 0.5;
        }
        let q = first_return(TorusPoint::new(rho, alpha, z)).map_err(|e| e.to_string())?;
        // Closed form written independently: distance from rho = 2 shrinks
        // from 1 to |z| on the same side.
        let rho_expected = 2.0 + (rho - 2.0) * z.abs();
        let alpha_expected = alpha + z.abs().ln();
        let err = (q.rho - rho_expected).abs().max((q.alpha - alpha_expected).abs());
        worst = worst.max(err);
        ensure(q.z == z.signum(), || format!("z' = {} for z = {z}", q.z))?;
    }
    ensure(worst <= RETURN_MAP_TOLERANCE, || format!("max error {worst:e} exceeds {RETURN_MAP_TOLERANCE:e}"))?;
    let mut last_alpha = f64::INFINITY;
    let mut last_gap = f64::INFINITY;
    for k in 1..=40 {
        let q = first_return(TorusPoint::new(1.0, 0.0, 2f64.powi(-k))).map_err(|e| e.to_string())?;
        let gap = (q.rho - 2.0).abs();
        ensure(q.alpha < last_alpha && gap < last_gap, || format!("winding breaks at k={k}"))?;
        last_alpha = q.alpha;
        last_gap = gap;
    }
    ensure(last_gap <= 1e-12, || format!("rho does not approach 2: gap {last_gap:e}"))?;
    Ok(format!("max error {worst:.1e} over 10000 points; winding holds for k = 1..40"))
}

fn catalog_items() -> Vec<(String, FlowPresentation)> {
    catalog::list_keys().into_iter().map(|k| { let p = catalog::emit(&k).unwrap(); (k, p) }).collect()
}

fn equivalence_laws() -> Outcome {
    let items = catalog_items();
    for (key, p) in &items {
        let iso = find_equivalence(p, p).map_err(|e| e.to_string())?.ok_or(format!("{key} not reflexive"))?;
        ensure(check_isomorphism(p, p, &iso), || format!("{key}: self map fails"))?;
    }
    let mut pairs = 0;
    for (i, (ka, a)) in items.iter().enumerate() {
        for (kb, b) in &items[i + 1..] {
            let ab = find_equivalence(a, b).map_err(|e| e.to_string())?;
            let ba = find_equivalence(b, a).map_err(|e| e.to_string())?;
            ensure(ab.is_some() == ba.is_some(), || format!("symmetry fails for {ka}, {kb}"))?;
            if let Some(iso) = ab {
                ensure(check_isomorphism(a, b, &iso), || format!("{ka} -> {kb} fails"))?;
                ensure(check_isomorphism(b, a, &iso.inverse()), || format!("inverse {kb} -> {ka} fails"))?;
            }
            pairs += 1;
        }
    }
    Ok(format!("{} items reflexive, {pairs} pairs symmetric", items.len()))
}

fn round_trip() -> Outcome {
    let items = catalog_items();
    for (key, p) in &items {
        let back = parse_flow(&serialize(p)).map_err(|e| format!("{key}: {e}"))?;
        ensure(&back == p, || format!("{key} does not round-trip"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..100 {
        let (key, p) = &items[i % items.len()];
        let q = relabel(p, &random_relabeling(p, &mut rng)).map_err(|e| e.to_string())?;
        let back = parse_flow(&serialize(&q)).map_err(|e| format!("relabeled {key}: {e}"))?;
        ensure(back == q, || format!("relabeled {key} does not round-trip"))?;
    }
    Ok(format!("{} catalog items and 100 relabelings", items.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 7] = [
        ("1 trivial-orbit family", Duration::from_secs(1), trivial_family),
        ("2 twisted-orbit family", Duration::from_secs(5), twisted_family),
        ("3 exhaustive framed-graph oracle", Duration::from_secs(600), framed_oracle),
        ("4 lemma spot checks", Duration::from_secs(1), lemma_checks),
        ("5 first-return fidelity", Duration::from_secs(1), first_return_fidelity),
        ("6 equivalence-relation laws", Duration::from_secs(10), equivalence_laws),
        ("7 serialization round trip", Duration::from_secs(5), round_trip),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time limit")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {name}: {detail} ({:.3} s, limit {} s)", elapsed.as_secs_f64(), limit.as_secs());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
