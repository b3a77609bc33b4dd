//! Built-in presentations: flows on the 3-sphere with one saddle closed
//! orbit, plus small synthetic fixtures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::framed::{FrameValue, Framing, MsGraph, Role};
use crate::model::{EdgeKind, FlowPresentation, HandleKind, HandleRecord, HandleRegions, Orientation};
use crate::tau::{Case1Record, Case3Record, TorusRecord};
use crate::words::CyclicWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("sign must be +1 or -1, got {0}")]
    Sign(i64),
    #[error("twist count must be non-negative, got {0}")]
    Twists(i64),
    #[error("framing parity must be 0 or 1, got {0}")]
    Parity(i64),
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
}

pub const SYNTHETIC: [&str; 7] =
    ["tau-case3-demo", "type1-L", "type2-L", "type3-L", "theta-sphere", "annulus-pair", "genus-demo"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogKey {
    Trivial { s0: i64, s2: i64 },
    Twisted { n: i64, parity: i64 },
    Synthetic(String),
}

impl FromStr for CatalogKey {
    type Err = CatalogError;

    /// `trivial:+1:-1`, `twisted:3`, `twisted:3:1`, or a synthetic name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || CatalogError::Unknown(s.to_string());
        let int = |t: &str| t.parse::<i64>().map_err(|_| unknown());
        let parts: Vec<&str> = s.split(':').collect();
        let key = match parts.as_slice() {
            ["trivial", a, b] => CatalogKey::Trivial { s0: int(a)?, s2: int(b)? },
            ["twisted", n] => CatalogKey::Twisted { n: int(n)?, parity: 0 },
            ["twisted", n, p] => CatalogKey::Twisted { n: int(n)?, parity: int(p)? },
            [name] if SYNTHETIC.contains(name) => CatalogKey::Synthetic(name.to_string()),
            _ => return Err(unknown()),
        };
        Ok(key)
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogKey::Trivial { s0, s2 } => write!(f, "trivial:{s0:+}:{s2:+}"),
            CatalogKey::Twisted { n, parity: 0 } => write!(f, "twisted:{n}"),
            CatalogKey::Twisted { n, parity } => write!(f, "twisted:{n}:{parity}"),
            CatalogKey::Synthetic(name) => f.write_str(name),
        }
    }
}

impl CatalogKey {
    pub fn build(&self) -> Result<FlowPresentation, CatalogError> {
        match self {
            CatalogKey::Trivial { s0, s2 } => trivial_orbit_flow(*s0, *s2),
            CatalogKey::Twisted { n, parity } => twisted_orbit_flow_with_parity(*n, *parity),
            CatalogKey::Synthetic(name) => builtin(name),
        }
    }
}

/// Keys of the four trivial-family flows, twisted flows for `n = 0..=5`, and
/// every synthetic fixture.
pub fn list_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for s0 in [1, -1] {
        for s2 in [1, -1] {
            keys.push(CatalogKey::Trivial { s0, s2 }.to_string());
        }
    }
    for n in 0..=5 {
        keys.push(CatalogKey::Twisted { n, parity: 0 }.to_string());
    }
    keys.extend(SYNTHETIC.iter().map(|s| s.to_string()));
    keys
}

pub fn emit(key: &str) -> Result<FlowPresentation, CatalogError> {
    key.parse::<CatalogKey>()?.build()
}

fn set(ids: &[&str]) -> std::collections::BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

fn round(id: &str, index: u8, height: Option<u32>, regions: &[&str]) -> HandleRecord {
    HandleRecord { id: id.into(), kind: HandleKind::Round, index, height, regions: HandleRegions::Flat(set(regions)) }
}

fn round1(id: &str, height: Option<u32>, incoming: &[&str], outgoing: &[&str]) -> HandleRecord {
    HandleRecord {
        id: id.into(),
        kind: HandleKind::Round,
        index: 1,
        height,
        regions: HandleRegions::Sides { incoming: set(incoming), outgoing: set(outgoing) },
    }
}

fn chosen(p: &mut FlowPresentation, entries: &[(&str, &str)]) {
    for (h, w) in entries {
        p.chosen_cycles.insert(h.to_string(), CyclicWord::from_notation(w));
    }
}

fn ring(p: &mut FlowPresentation, vertices: &[(&str, Role)], edges: &[(&str, &str, &str)], mu: &[i64]) {
    p.tau.case2.ring_graph = MsGraph::build(vertices, edges).expect("fixture ring graph");
    p.tau.case2.framing = Framing::finite(mu);
}

fn corner_loops(p: &mut FlowPresentation, loops: &[(&str, &str)]) {
    for (label, vertex) in loops {
        p.add_vertex(*vertex).add_edge(label, vertex, vertex, Orientation::Fixed, EdgeKind::Corner);
    }
}

/// Flow with a trivially-neighboured saddle orbit; `s0` and `s2` are the
/// intersection signs of `b` with the meridians of the round 0- and
/// 2-handles.
pub fn trivial_orbit_flow(s0: i64, s2: i64) -> Result<FlowPresentation, CatalogError> {
    for s in [s0, s2] {
        if s.abs() != 1 {
            return Err(CatalogError::Sign(s));
        }
    }
    let mut p = FlowPresentation::default();
    corner_loops(&mut p, &[("a", "A1"), ("b", "A2"), ("c", "A3"), ("d", "A4")]);
    p.add_region("L1", 0, &["a", "b^-1"])
        .add_region("L2", 0, &["c", "d^-1"])
        .add_region("L3", 0, &["a^-1", "b", "c^-1"])
        .add_region("L4", 0, &["d"])
        .add_region("L5", 0, &["a", "d^-1"])
        .add_region("L6", 0, &["b", "c^-1"]);
    p.add_handle(round("T0", 0, None, &["L1", "L2", "L3", "L4"]))
        .add_handle(round1("T1", Some(0), &["L1", "L2"], &["L5", "L6"]))
        .add_handle(round("T2", 2, None, &["L3", "L4", "L5", "L6"]));
    chosen(&mut p, &[("T0", "a"), ("T1", "a"), ("T2", "d")]);
    // One record: splitting it in two would let (+1,-1) match (-1,+1).
    p.tau.case1.push(Case1Record { handle0: "T0".into(), handle2: "T2".into(), alpha: s0, beta: s2 });
    Ok(p)
}

/// Flow whose saddle orbit has a twisted neighbourhood built from `2n + 1`
/// half-twisted bands; total ring framing 0 mod 2.
pub fn twisted_orbit_flow(n: i64) -> Result<FlowPresentation, CatalogError> {
    twisted_orbit_flow_with_parity(n, 0)
}

/// As [`twisted_orbit_flow`], with the total ring framing `parity` mod 2.
pub fn twisted_orbit_flow_with_parity(n: i64, parity: i64) -> Result<FlowPresentation, CatalogError> {
    if n < 0 {
        return Err(CatalogError::Twists(n));
    }
    if !(0..=1).contains(&parity) {
        return Err(CatalogError::Parity(parity));
    }
    let mut p = FlowPresentation::default();
    corner_loops(&mut p, &[("a", "A"), ("b", "B")]);
    for id in ["L1", "L2", "L3"] {
        p.add_region(id, 0, &["a", "b^-1"]);
    }
    p.add_handle(round("0-handle", 0, None, &["L1", "L2"]))
        .add_handle(round1("1-handle", Some(0), &["L1"], &["L3"]))
        .add_handle(round("2-handle", 2, None, &["L2", "L3"]));
    chosen(&mut p, &[("0-handle", "a"), ("1-handle", "a"), ("2-handle", "b")]);
    let tori = [
        ("0-handle", (2 * n + 1, 0), (1, 2 * n + 1)),
        ("1-handle", (0, 0), (1, 2)),
        ("2-handle", (0, 0), (0, 1)),
    ];
    p.tau.case2.tori = tori
        .iter()
        .map(|(h, m, w)| (h.to_string(), TorusRecord { meridian: *m, omega: Some(*w) }))
        .collect::<BTreeMap<_, _>>();
    ring(
        &mut p,
        &[("0-handle", Role::Source), ("1-handle", Role::Saddle), ("2-handle", Role::Sink)],
        &[("L1", "0-handle", "1-handle"), ("L3", "1-handle", "2-handle"), ("L2", "0-handle", "2-handle")],
        &[parity, 0, 0],
    );
    Ok(p)
}

/// Synthetic fixtures by name.
pub fn builtin(name: &str) -> Result<FlowPresentation, CatalogError> {
    let mut p = FlowPresentation::default();
    match name {
        "annulus-pair" | "tau-case3-demo" => {
            p.add_vertex("P").add_vertex("Q").add_vertex("R");
            p.add_edge("x", "P", "Q", Orientation::Free, EdgeKind::LowerCurve)
                .add_edge("y", "Q", "P", Orientation::Free, EdgeKind::LowerCurve)
                .add_edge("z", "R", "R", Orientation::Fixed, EdgeKind::UpperCurve);
            p.add_region("A1", 0, &["x y", "z^-1"]).add_region("A2", 0, &["y^-1 x^-1", "z"]);
            p.add_handle(round("T0", 0, None, &["A1", "A2"])).add_handle(round("T2", 2, None, &["A1", "A2"]));
            chosen(&mut p, &[("T0", "x y"), ("T2", "z")]);
            p.lower_pairs.push((CyclicWord::from_notation("x y"), CyclicWord::from_notation("z")));
            if name == "tau-case3-demo" {
                p.tau.case3.insert(
                    "T0".into(),
                    vec![
                        Case3Record { cycle: CyclicWord::from_notation("x y"), alpha: 1 },
                        Case3Record { cycle: CyclicWord::from_notation("z"), alpha: -2 },
                    ],
                );
            }
        }
        "type1-L" => {
            p.add_vertex("A").add_vertex("B");
            p.add_edge("a", "A", "A", Orientation::Fixed, EdgeKind::UpperCurve)
                .add_edge("b", "B", "B", Orientation::Fixed, EdgeKind::UpperCurve);
            p.add_region("R1", 0, &["a", "b^-1"]).add_region("R2", 0, &["a^-1", "b"]);
            p.add_handle(round("T0", 0, None, &["R1", "R2"])).add_handle(round("T2", 2, None, &["R1", "R2"]));
            chosen(&mut p, &[("T0", "a"), ("T2", "b")]);
            ring(&mut p, &[("T0", Role::Source), ("T2", Role::Sink)], &[("R1", "T0", "T2"), ("R2", "T0", "T2")], &[2, 3]);
        }
        "type2-L" => {
            p.add_vertex("A").add_vertex("B").add_vertex("C");
            p.add_edge("a", "A", "A", Orientation::Fixed, EdgeKind::UpperCurve)
                .add_edge("b", "B", "B", Orientation::Fixed, EdgeKind::UpperCurve)
                .add_edge("c", "C", "C", Orientation::Fixed, EdgeKind::UpperCurve);
            p.add_region("R1", 0, &["a", "b^-1"]).add_region("R2", 0, &["b", "c^-1"]).add_region("R3", 0, &["c", "a^-1"]);
            p.add_handle(round("T0", 0, None, &["R1", "R2"]))
                .add_handle(round1("T1", Some(1), &["R1"], &["R3"]))
                .add_handle(round("T2", 2, None, &["R2", "R3"]));
            chosen(&mut p, &[("T0", "a"), ("T1", "a"), ("T2", "c")]);
            ring(
                &mut p,
                &[("T0", Role::Source), ("T1", Role::Saddle), ("T2", Role::Sink)],
                &[("R1", "T0", "T1"), ("R3", "T1", "T2"), ("R2", "T0", "T2")],
                &[1, 0, 0],
            );
        }
        "type3-L" => {
            p.add_vertex("A").add_vertex("B");
            p.add_edge("a", "A", "A", Orientation::Fixed, EdgeKind::UpperCurve)
                .add_edge("b", "B", "B", Orientation::Fixed, EdgeKind::UpperCurve);
            p.add_region("R1", 0, &["a", "a^-1"]).add_region("R2", 0, &["b", "b^-1"]);
            p.add_handle(round("T0", 0, None, &["R1"]))
                .add_handle(round1("T1", Some(1), &["R1"], &["R2"]))
                .add_handle(round("T2", 2, None, &["R2"]));
            chosen(&mut p, &[("T0", "a"), ("T1", "a"), ("T2", "b")]);
            ring(
                &mut p,
                &[("T0", Role::Source), ("T1", Role::Saddle), ("T2", Role::Sink)],
                &[("R1", "T0", "T1"), ("R2", "T1", "T2")],
                &[1, 0],
            );
        }
        "theta-sphere" => {
            p.add_vertex("P").add_vertex("Q");
            for label in ["x", "y", "z"] {
                p.add_edge(label, "P", "Q", Orientation::Free, EdgeKind::LowerCurve);
            }
            p.add_region("D1", 0, &["x y^-1"]).add_region("D2", 0, &["y z^-1"]).add_region("D3", 0, &["z x^-1"]);
            p.add_handle(HandleRecord {
                id: "H".into(),
                kind: HandleKind::Simple,
                index: 0,
                height: None,
                regions: HandleRegions::Flat(set(&["D1", "D2", "D3"])),
            });
        }
        "genus-demo" => {
            p.add_vertex("A").add_vertex("B");
            p.add_edge("a", "A", "A", Orientation::Free, EdgeKind::TauCurve)
                .add_edge("b", "B", "B", Orientation::Free, EdgeKind::ChosenCycleCurve);
            p.add_region("N", -1, &["a a"]).add_region("O", 2, &["b", "b^-1"]);
            p.add_handle(HandleRecord {
                id: "H3".into(),
                kind: HandleKind::Simple,
                index: 3,
                height: Some(2),
                regions: HandleRegions::Flat(set(&["N", "O"])),
            });
        }
        _ => return Err(CatalogError::Unknown(name.to_string())),
    }
    Ok(p)
}

/// Ring framing of `p` with an edge set to infinity; handy for tests.
pub fn with_infinite_ring_edge(mut p: FlowPresentation, edge: &str) -> FlowPresentation {
    if let Some(i) = p.tau.case2.ring_graph.edge_index(edge) {
        p.tau.case2.framing.0[i] = FrameValue::Infinite;
    }
    p
}
