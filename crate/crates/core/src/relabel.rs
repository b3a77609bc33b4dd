//! Renaming labels and reversing free edges.
//!
//! Used to generate presentations that are equivalent by construction, so
//! the search in [`crate::equivalence`] can be tested against a known answer.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::equivalence::Isomorphism;
use crate::framed::{MsEdge, MsGraph};
use crate::model::{FlowPresentation, HandleRegions, Orientation};
use crate::tau::{Case1Record, Case3Record};
use crate::words::{CyclicWord, Letter};

/// Label renamings per namespace plus a set of edges to reverse. Labels
/// absent from a map keep their name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relabeling {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
    pub regions: BTreeMap<String, String>,
    pub handles: BTreeMap<String, String>,
    /// Old labels of reversed edges.
    pub flips: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelabelError {
    #[error("{namespace} relabeling is not injective: `{label}` is hit twice")]
    NotInjective { namespace: &'static str, label: String },
    #[error("cannot flip unknown edge `{0}`")]
    UnknownFlip(String),
    #[error("edge `{0}` has a fixed orientation and cannot be flipped")]
    FixedFlip(String),
}

fn rename(m: &BTreeMap<String, String>, s: &str) -> String {
    m.get(s).cloned().unwrap_or_else(|| s.to_string())
}

impl Relabeling {
    /// The renaming back; flips are expressed in the new labels.
    pub fn inverse(&self) -> Self {
        let inv = |m: &BTreeMap<String, String>| m.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        Relabeling {
            vertices: inv(&self.vertices),
            edges: inv(&self.edges),
            regions: inv(&self.regions),
            handles: inv(&self.handles),
            flips: self.flips.iter().map(|f| rename(&self.edges, f)).collect(),
        }
    }

    /// The isomorphism from `p` onto `relabel(p, self)`.
    pub fn as_isomorphism(&self, p: &FlowPresentation) -> Isomorphism {
        let total = |ids: &mut dyn Iterator<Item = &String>, m: &BTreeMap<String, String>| {
            ids.map(|id| (id.clone(), rename(m, id))).collect()
        };
        Isomorphism {
            vertex_map: total(&mut p.vertices.iter(), &self.vertices),
            edge_map: total(&mut p.edges.keys(), &self.edges),
            region_map: total(&mut p.surfaces.keys(), &self.regions),
            handle_map: total(&mut p.handles.keys(), &self.handles),
            flips: self.flips.clone(),
        }
    }
}

fn check_injective<'a>(
    namespace: &'static str,
    ids: impl Iterator<Item = &'a String>,
    m: &BTreeMap<String, String>,
) -> Result<(), RelabelError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        let image = rename(m, id);
        if !seen.insert(image.clone()) {
            return Err(RelabelError::NotInjective { namespace, label: image });
        }
    }
    Ok(())
}

/// `p` with every label renamed and every flipped edge reversed; letters of
/// flipped edges change power everywhere they occur.
pub fn relabel(p: &FlowPresentation, r: &Relabeling) -> Result<FlowPresentation, RelabelError> {
    check_injective("vertex", p.vertices.iter(), &r.vertices)?;
    check_injective("edge", p.edges.keys(), &r.edges)?;
    check_injective("region", p.surfaces.keys(), &r.regions)?;
    check_injective("handle", p.handles.keys(), &r.handles)?;
    for f in &r.flips {
        match p.edges.get(f) {
            None => return Err(RelabelError::UnknownFlip(f.clone())),
            Some(e) if e.orientation == Orientation::Fixed => return Err(RelabelError::FixedFlip(f.clone())),
            _ => {}
        }
    }

    let letter = |l: &Letter| Letter {
        label: rename(&r.edges, &l.label),
        power: if r.flips.contains(&l.label) { l.power.negate() } else { l.power },
    };
    let word = |w: &CyclicWord| w.try_map(|l| Some(letter(l))).expect("total map");
    let vertex = |v: &str| rename(&r.vertices, v);
    let region = |id: &str| rename(&r.regions, id);
    let handle = |id: &str| rename(&r.handles, id);
    let regions = |s: &BTreeSet<String>| s.iter().map(|x| region(x)).collect::<BTreeSet<_>>();

    let mut q = FlowPresentation {
        vertices: p.vertices.iter().map(|v| vertex(v)).collect(),
        ..Default::default()
    };
    for e in p.edges.values() {
        let (tail, head) = if r.flips.contains(&e.label) { (&e.head, &e.tail) } else { (&e.tail, &e.head) };
        let label = rename(&r.edges, &e.label);
        q.add_edge(&label, &vertex(tail), &vertex(head), e.orientation, e.kind);
    }
    for s in p.surfaces.values() {
        let mut s2 = s.clone();
        s2.id = region(&s.id);
        s2.words = s.words.iter().map(word).collect();
        q.surfaces.insert(s2.id.clone(), s2);
    }
    for h in p.handles.values() {
        let mut h2 = h.clone();
        h2.id = handle(&h.id);
        h2.regions = match &h.regions {
            HandleRegions::Flat(s) => HandleRegions::Flat(regions(s)),
            HandleRegions::Sides { incoming, outgoing } => {
                HandleRegions::Sides { incoming: regions(incoming), outgoing: regions(outgoing) }
            }
        };
        q.add_handle(h2);
    }
    q.lower_pairs = p.lower_pairs.iter().map(|(a, b)| (word(a), word(b))).collect();
    q.upper_pairs = p.upper_pairs.iter().map(|(a, b)| (word(a), word(b))).collect();
    q.chosen_cycles = p.chosen_cycles.iter().map(|(h, w)| (handle(h), word(w))).collect();

    let tau = &p.tau;
    q.tau.case1 = tau
        .case1
        .iter()
        .map(|c| Case1Record { handle0: handle(&c.handle0), handle2: handle(&c.handle2), ..c.clone() })
        .collect();
    q.tau.case2.tori = tau.case2.tori.iter().map(|(h, t)| (handle(h), t.clone())).collect();
    let ring = &tau.case2.ring_graph;
    let edges = ring
        .edges()
        .iter()
        .map(|e| MsEdge { id: region(&e.id), tail: handle(&e.tail), head: handle(&e.head) })
        .collect();
    q.tau.case2.ring_graph = MsGraph::new(ring.vertices().iter().map(|(v, role)| (handle(v), *role)), edges)
        .expect("renaming preserves ring graph structure");
    q.tau.case2.framing = q
        .tau
        .case2
        .ring_graph
        .framing_from(ring.edges().iter().zip(tau.case2.framing.values()).map(|(e, v)| (region(&e.id), *v)))
        .expect("renaming preserves the framing domain");
    q.tau.case3 = tau
        .case3
        .iter()
        .map(|(h, rs)| (handle(h), rs.iter().map(|c| Case3Record { cycle: word(&c.cycle), alpha: c.alpha }).collect()))
        .collect();
    Ok(q)
}

/// Fresh names `v0..`, `e0..`, `r0..`, `h0..` in random order, with a random
/// subset of free edges reversed.
pub fn random_relabeling<R: Rng + ?Sized>(p: &FlowPresentation, rng: &mut R) -> Relabeling {
    fn shuffled<'a, R: Rng + ?Sized>(
        ids: impl Iterator<Item = &'a String>,
        prefix: &str,
        rng: &mut R,
    ) -> BTreeMap<String, String> {
        let ids: Vec<&String> = ids.collect();
        let mut names: Vec<String> = (0..ids.len()).map(|i| format!("{prefix}{i}")).collect();
        names.shuffle(rng);
        ids.into_iter().cloned().zip(names).collect()
    }
    let flips = p
        .edges
        .values()
        .filter(|e| e.orientation == Orientation::Free && rng.gen_bool(0.5))
        .map(|e| e.label.clone())
        .collect();
    Relabeling {
        vertices: shuffled(p.vertices.iter(), "v", rng),
        edges: shuffled(p.edges.keys(), "e", rng),
        regions: shuffled(p.surfaces.keys(), "r", rng),
        handles: shuffled(p.handles.keys(), "h", rng),
        flips,
    }
}
