//! Deciding equivalence of two flow presentations.
//!
//! [`verify_isomorphism`] checks a candidate map stage by stage;
//! [`find_equivalence`] searches for one. The search rejects early on
//! iso-invariant counts, then backtracks over edge assignments (rarest local
//! signature first, growing along shared vertices), pruning whenever a
//! region's words are fully translated, and finally backtracks over handles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::framed::FrameValue;
use crate::model::{validate_presentation, FlowPresentation, HandleRecord, HandleRegions, Orientation, ValidationReport};
use crate::tau::tau_equivalent;
use crate::words::{canonical_form, lists_equivalent, rotate_equal, translated_signature, word_signature, CyclicWord, Letter};

/// Bijections between the labels of two presentations, plus the set of free
/// edges whose orientation is reversed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
    pub region_map: BTreeMap<String, String>,
    pub handle_map: BTreeMap<String, String>,
    /// Source-side labels of reversed edges.
    pub flips: BTreeSet<String>,
}

fn identity_map<'a>(ids: impl Iterator<Item = &'a String>) -> BTreeMap<String, String> {
    ids.map(|id| (id.clone(), id.clone())).collect()
}

fn invert_map(m: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    m.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

impl Isomorphism {
    pub fn identity(p: &FlowPresentation) -> Self {
        Isomorphism {
            vertex_map: identity_map(p.vertices.iter()),
            edge_map: identity_map(p.edges.keys()),
            region_map: identity_map(p.surfaces.keys()),
            handle_map: identity_map(p.handles.keys()),
            flips: BTreeSet::new(),
        }
    }

    pub fn translate_letter(&self, l: &Letter) -> Option<Letter> {
        let label = self.edge_map.get(&l.label)?.clone();
        let power = if self.flips.contains(&l.label) { l.power.negate() } else { l.power };
        Some(Letter { label, power })
    }

    /// `w` rewritten in the target's labels, or `None` if an edge is unmapped.
    pub fn translate_word(&self, w: &CyclicWord) -> Option<CyclicWord> {
        w.try_map(|l| self.translate_letter(l))
    }

    /// The map in the reverse direction; flips are renamed to target labels.
    pub fn inverse(&self) -> Self {
        Isomorphism {
            vertex_map: invert_map(&self.vertex_map),
            edge_map: invert_map(&self.edge_map),
            region_map: invert_map(&self.region_map),
            handle_map: invert_map(&self.handle_map),
            flips: self.flips.iter().filter_map(|f| self.edge_map.get(f).cloned()).collect(),
        }
    }
}

impl fmt::Display for Isomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.vertex_map {
            writeln!(f, "vertex {a} -> {b}")?;
        }
        for (a, b) in &self.edge_map {
            let note = if self.flips.contains(a) { " flipped" } else { "" };
            writeln!(f, "edge {a} -> {b}{note}")?;
        }
        for (a, b) in &self.region_map {
            writeln!(f, "region {a} -> {b}")?;
        }
        for (a, b) in &self.handle_map {
            writeln!(f, "handle {a} -> {b}")?;
        }
        Ok(())
    }
}

/// Criteria in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Signature,
    Incidence,
    Slw,
    Handles,
    Pairs,
    Chosen,
    Tau,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Signature => "global signature",
            Stage::Incidence => "graph incidence",
            Stage::Slw => "set of lists of words",
            Stage::Handles => "handle boundaries",
            Stage::Pairs => "curve pairings",
            Stage::Chosen => "chosen cycles",
            Stage::Tau => "tau invariant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: {detail}", stage.name())]
pub struct Mismatch {
    pub stage: Stage,
    pub detail: String,
}

fn fail<T>(stage: Stage, detail: impl Into<String>) -> Result<T, Mismatch> {
    Err(Mismatch { stage, detail: detail.into() })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("presentation {which} is invalid:\n{report}")]
    Invalid { which: usize, report: ValidationReport },
}

/// Checks that `m` is a bijection from exactly `from` onto exactly `to`.
fn check_bijection<'a>(
    what: &str,
    m: &BTreeMap<String, String>,
    from: impl Iterator<Item = &'a String>,
    to: impl Iterator<Item = &'a String>,
    stage: Stage,
) -> Result<(), Mismatch> {
    let from: BTreeSet<&String> = from.collect();
    let to: BTreeSet<&String> = to.collect();
    let keys: BTreeSet<&String> = m.keys().collect();
    if keys != from {
        return fail(stage, format!("{what} map domain differs from the {what} set"));
    }
    let image: BTreeSet<&String> = m.values().collect();
    if image.len() != m.len() || image != to {
        return fail(stage, format!("{what} map is not a bijection onto the target {what}s"));
    }
    Ok(())
}

fn map_set(m: &BTreeMap<String, String>, s: &BTreeSet<String>) -> Option<BTreeSet<String>> {
    s.iter().map(|x| m.get(x).cloned()).collect()
}

fn map_regions(m: &BTreeMap<String, String>, r: &HandleRegions) -> Option<HandleRegions> {
    Some(match r {
        HandleRegions::Flat(s) => HandleRegions::Flat(map_set(m, s)?),
        HandleRegions::Sides { incoming, outgoing } => {
            HandleRegions::Sides { incoming: map_set(m, incoming)?, outgoing: map_set(m, outgoing)? }
        }
    })
}

fn pair_key(a: &CyclicWord, b: &CyclicWord) -> (CyclicWord, CyclicWord) {
    let (a, b) = (canonical_form(a), canonical_form(b));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_incidence(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    check_bijection("vertex", &iso.vertex_map, p1.vertices.iter(), p2.vertices.iter(), Stage::Incidence)?;
    check_bijection("edge", &iso.edge_map, p1.edges.keys(), p2.edges.keys(), Stage::Incidence)?;
    for f in &iso.flips {
        match p1.edges.get(f) {
            None => return fail(Stage::Incidence, format!("flip names unknown edge `{f}`")),
            Some(e) if e.orientation == Orientation::Fixed => {
                return fail(Stage::Incidence, format!("edge `{f}` has a fixed orientation and cannot be flipped"))
            }
            _ => {}
        }
    }
    for (label, e1) in &p1.edges {
        let e2 = &p2.edges[&iso.edge_map[label]];
        if e1.kind != e2.kind || e1.orientation != e2.orientation {
            return fail(Stage::Incidence, format!("edge `{label}` -> `{}` changes kind or orientation", e2.label));
        }
        let (t, h) = (&iso.vertex_map[&e1.tail], &iso.vertex_map[&e1.head]);
        let (t, h) = if iso.flips.contains(label) { (h, t) } else { (t, h) };
        if (t, h) != (&e2.tail, &e2.head) {
            return fail(Stage::Incidence, format!("edge `{label}` -> `{}` does not respect endpoints", e2.label));
        }
    }
    Ok(())
}

fn check_slw(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    check_bijection("region", &iso.region_map, p1.surfaces.keys(), p2.surfaces.keys(), Stage::Slw)?;
    for (id, r1) in &p1.surfaces {
        let r2 = &p2.surfaces[&iso.region_map[id]];
        if !lists_equivalent(r1, r2, iso) {
            return fail(Stage::Slw, format!("list of region `{id}` is not equivalent to that of `{}`", r2.id));
        }
    }
    Ok(())
}

fn check_handles(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    check_bijection("handle", &iso.handle_map, p1.handles.keys(), p2.handles.keys(), Stage::Handles)?;
    for (id, h1) in &p1.handles {
        let h2 = &p2.handles[&iso.handle_map[id]];
        if (h1.kind, h1.index, h1.height) != (h2.kind, h2.index, h2.height) {
            return fail(Stage::Handles, format!("handle `{id}` -> `{}` changes kind, index or height", h2.id));
        }
        if map_regions(&iso.region_map, &h1.regions).as_ref() != Some(&h2.regions) {
            return fail(Stage::Handles, format!("boundary of handle `{id}` does not map onto that of `{}`", h2.id));
        }
    }
    Ok(())
}

fn check_pairs(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    for (side, a, b) in [("lower", &p1.lower_pairs, &p2.lower_pairs), ("upper", &p1.upper_pairs, &p2.upper_pairs)] {
        let mut lhs = Vec::new();
        for (x, y) in a {
            match (iso.translate_word(x), iso.translate_word(y)) {
                (Some(x), Some(y)) => lhs.push(pair_key(&x, &y)),
                _ => return fail(Stage::Pairs, format!("{side} pair uses an unmapped edge")),
            }
        }
        let mut rhs: Vec<_> = b.iter().map(|(x, y)| pair_key(x, y)).collect();
        lhs.sort();
        rhs.sort();
        if lhs != rhs {
            return fail(Stage::Pairs, format!("{side} pairings do not correspond"));
        }
    }
    Ok(())
}

fn check_chosen(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    if p1.chosen_cycles.len() != p2.chosen_cycles.len() {
        return fail(Stage::Chosen, "different numbers of chosen cycles");
    }
    for (h, w) in &p1.chosen_cycles {
        let Some(h2) = iso.handle_map.get(h) else {
            return fail(Stage::Chosen, format!("handle `{h}` is unmapped"));
        };
        let Some(target) = p2.chosen_cycles.get(h2) else {
            return fail(Stage::Chosen, format!("handle `{h2}` has no chosen cycle"));
        };
        match iso.translate_word(w) {
            Some(t) if rotate_equal(&t, target) => {}
            _ => return fail(Stage::Chosen, format!("chosen cycle of `{h}` does not map onto that of `{h2}`")),
        }
    }
    Ok(())
}

/// Checks every criterion for `iso`, reporting the first that fails.
pub fn verify_isomorphism(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> Result<(), Mismatch> {
    check_incidence(p1, p2, iso)?;
    check_slw(p1, p2, iso)?;
    check_handles(p1, p2, iso)?;
    check_pairs(p1, p2, iso)?;
    check_chosen(p1, p2, iso)?;
    match tau_equivalent(&p1.tau, &p2.tau, iso) {
        Ok(true) => Ok(()),
        Ok(false) => fail(Stage::Tau, "tau invariants differ under this map"),
        Err(e) => fail(Stage::Tau, e.to_string()),
    }
}

pub fn check_isomorphism(p1: &FlowPresentation, p2: &FlowPresentation, iso: &Isomorphism) -> bool {
    verify_isomorphism(p1, p2, iso).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(Isomorphism),
    /// The furthest criterion at which every candidate failed.
    Inequivalent(Mismatch),
}

/// An isomorphism satisfying every criterion, or `None`.
pub fn find_equivalence(p1: &FlowPresentation, p2: &FlowPresentation) -> Result<Option<Isomorphism>, EquivalenceError> {
    Ok(match explain_equivalence(p1, p2)? {
        Verdict::Equivalent(iso) => Some(iso),
        Verdict::Inequivalent(_) => None,
    })
}

pub fn explain_equivalence(p1: &FlowPresentation, p2: &FlowPresentation) -> Result<Verdict, EquivalenceError> {
    for (which, p) in [(1, p1), (2, p2)] {
        let report = validate_presentation(p);
        if !report.is_empty() {
            return Err(EquivalenceError::Invalid { which, report });
        }
    }
    if let Err(m) = compare_signatures(p1, p2) {
        return Ok(Verdict::Inequivalent(m));
    }
    let mut search = Search::new(p1, p2);
    Ok(match search.run() {
        Some(iso) => Verdict::Equivalent(iso),
        None => Verdict::Inequivalent(search.furthest.unwrap_or(Mismatch {
            stage: Stage::Incidence,
            detail: "no edge assignment respects the graph".into(),
        })),
    })
}

// ---------------------------------------------------------------------------
// Invariant signatures

type RegionShape = (i64, usize, Vec<usize>);

fn region_shape(p: &FlowPresentation, id: &str) -> RegionShape {
    let r = &p.surfaces[id];
    let mut lens: Vec<usize> = r.words.iter().map(|w| w.len()).collect();
    lens.sort();
    (r.genus_signed, r.words.len(), lens)
}

fn handle_shape(h: &HandleRecord) -> (crate::model::HandleKind, u8, Option<u32>, usize, usize) {
    let (a, b) = match &h.regions {
        HandleRegions::Flat(s) => (s.len(), 0),
        HandleRegions::Sides { incoming, outgoing } => (incoming.len(), outgoing.len()),
    };
    (h.kind, h.index, h.height, a, b)
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

/// Named iso-invariant quantities, compared field by field.
fn global_signature(p: &FlowPresentation) -> Vec<(&'static str, String)> {
    let degrees = p.vertex_degrees();
    let tau = &p.tau;
    let ring = &tau.case2.ring_graph;
    vec![
        ("vertex count", p.vertices.len().to_string()),
        ("vertex degrees", format!("{:?}", sorted(degrees.values().copied().collect()))),
        (
            "edge kinds",
            format!("{:?}", sorted(p.edges.values().map(|e| (e.kind, e.orientation, e.is_loop())).collect())),
        ),
        ("region shapes", format!("{:?}", sorted(p.surfaces.keys().map(|r| region_shape(p, r)).collect()))),
        ("handle shapes", format!("{:?}", sorted(p.handles.values().map(handle_shape).collect()))),
        ("pair counts", format!("{} {}", p.lower_pairs.len(), p.upper_pairs.len())),
        ("chosen cycle lengths", format!("{:?}", sorted(p.chosen_cycles.values().map(|w| w.len()).collect()))),
        ("case1 numbers", format!("{:?}", sorted(tau.case1.iter().map(|r| (r.alpha, r.beta)).collect()))),
        (
            "case2 tori",
            sorted(tau.case2.tori.values().map(torus_text).collect::<Vec<_>>()).join(", "),
        ),
        ("ring graph roles", format!("{:?}", sorted(ring.vertices().values().copied().collect()))),
        ("ring graph size", ring.edges().len().to_string()),
        (
            "ring infinite edges",
            tau.case2.framing.values().iter().filter(|v| **v == FrameValue::Infinite).count().to_string(),
        ),
        (
            "case3 numbers",
            format!(
                "{:?}",
                sorted(
                    tau.case3
                        .values()
                        .map(|rs| sorted(rs.iter().map(|r| (r.cycle.len(), r.alpha.abs())).collect()))
                        .collect()
                )
            ),
        ),
    ]
}

fn torus_text(t: &crate::tau::TorusRecord) -> String {
    let (a, b) = t.meridian;
    match t.omega {
        Some((k, l)) => format!("meridian ({a}, {b}) omega ({k}, {l})"),
        None => format!("meridian ({a}, {b})"),
    }
}

fn compare_signatures(p1: &FlowPresentation, p2: &FlowPresentation) -> Result<(), Mismatch> {
    for ((name, a), (_, b)) in global_signature(p1).into_iter().zip(global_signature(p2)) {
        if a != b {
            return fail(Stage::Signature, format!("{name} differ: {a} vs {b}"));
        }
    }
    Ok(())
}

/// Flip-invariant description of an edge and its surroundings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct EdgeSignature {
    kind: crate::model::EdgeKind,
    orientation: Orientation,
    is_loop: bool,
    end_degrees: (usize, usize),
    regions: Vec<RegionShape>,
    chosen: usize,
    pairs: usize,
    case3: usize,
}

fn edge_signatures(p: &FlowPresentation) -> BTreeMap<String, EdgeSignature> {
    let deg = p.vertex_degrees();
    let count = |words: &mut dyn Iterator<Item = &CyclicWord>, label: &str| {
        words.map(|w| w.labels().filter(|l| *l == label).count()).sum::<usize>()
    };
    p.edges
        .values()
        .map(|e| {
            let (a, b) = (deg[e.tail.as_str()], deg[e.head.as_str()]);
            let mut regions = Vec::new();
            for r in p.surfaces.values() {
                let n = count(&mut r.words.iter(), &e.label);
                for _ in 0..n {
                    regions.push(region_shape(p, &r.id));
                }
            }
            regions.sort();
            let sig = EdgeSignature {
                kind: e.kind,
                orientation: e.orientation,
                is_loop: e.is_loop(),
                end_degrees: (a.min(b), a.max(b)),
                regions,
                chosen: count(&mut p.chosen_cycles.values(), &e.label),
                pairs: count(&mut p.lower_pairs.iter().chain(&p.upper_pairs).flat_map(|(x, y)| [x, y]), &e.label),
                case3: count(&mut p.tau.case3.values().flatten().map(|r| &r.cycle), &e.label),
            };
            (e.label.clone(), sig)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Backtracking search

type Sig = (i64, Vec<CyclicWord>);

struct Search<'a> {
    p1: &'a FlowPresentation,
    p2: &'a FlowPresentation,
    /// p1 edges in assignment order.
    order: Vec<String>,
    /// Candidate p2 edges for each p1 edge.
    candidates: BTreeMap<String, Vec<String>>,
    /// p1 regions whose letters are all assigned once step `i` is done.
    completes: Vec<Vec<String>>,
    /// Unmatched p2 region signatures.
    available: BTreeMap<Sig, usize>,
    iso: Isomorphism,
    used_edges: BTreeSet<String>,
    used_vertices: BTreeMap<String, String>,
    furthest: Option<Mismatch>,
}

impl<'a> Search<'a> {
    fn new(p1: &'a FlowPresentation, p2: &'a FlowPresentation) -> Self {
        let s1 = edge_signatures(p1);
        let s2 = edge_signatures(p2);
        let mut candidates: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (l1, sig) in &s1 {
            let c = s2.iter().filter(|(_, s)| *s == sig).map(|(l, _)| l.clone()).collect();
            candidates.insert(l1.clone(), c);
        }
        let order = assignment_order(p1, &candidates);
        let mut completes = vec![Vec::new(); order.len()];
        let position: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        for r in p1.surfaces.values() {
            let last = r.words.iter().flat_map(|w| w.labels()).filter_map(|l| position.get(l).copied()).max();
            if let Some(i) = last {
                completes[i].push(r.id.clone());
            }
        }
        let mut available = BTreeMap::new();
        for r in p2.surfaces.values() {
            *available.entry((r.genus_signed, word_signature(&r.words))).or_insert(0) += 1;
        }
        Search {
            p1,
            p2,
            order,
            candidates,
            completes,
            available,
            iso: Isomorphism::default(),
            used_edges: BTreeSet::new(),
            used_vertices: BTreeMap::new(),
            furthest: None,
        }
    }

    fn note(&mut self, m: Mismatch) {
        if self.furthest.as_ref().map_or(true, |f| m.stage > f.stage) {
            self.furthest = Some(m);
        }
    }

    fn run(&mut self) -> Option<Isomorphism> {
        // Regions without letters are matched up front.
        let empties: Vec<String> = self
            .p1
            .surfaces
            .values()
            .filter(|r| r.words.is_empty())
            .map(|r| r.id.clone())
            .collect();
        for id in &empties {
            let r = &self.p1.surfaces[id];
            let slot = self.available.entry((r.genus_signed, Vec::new())).or_insert(0);
            if *slot == 0 {
                self.note(Mismatch { stage: Stage::Slw, detail: format!("no counterpart for region `{id}`") });
                return None;
            }
            *slot -= 1;
        }
        self.assign_edge(0)
    }

    fn bind_vertex(&mut self, v1: &str, v2: &str, added: &mut Vec<String>) -> bool {
        match self.iso.vertex_map.get(v1) {
            Some(t) => t == v2,
            None => {
                if self.used_vertices.contains_key(v2) {
                    return false;
                }
                self.iso.vertex_map.insert(v1.to_string(), v2.to_string());
                self.used_vertices.insert(v2.to_string(), v1.to_string());
                added.push(v1.to_string());
                true
            }
        }
    }

    fn unbind(&mut self, added: Vec<String>) {
        for v in added {
            if let Some(t) = self.iso.vertex_map.remove(&v) {
                self.used_vertices.remove(&t);
            }
        }
    }

    /// Claims target signatures for the regions completed at `step`.
    fn claim_regions(&mut self, step: usize) -> Option<Vec<Sig>> {
        let mut claimed = Vec::new();
        for id in self.completes[step].clone() {
            let sig = translated_signature(&self.p1.surfaces[&id], &self.iso).expect("all letters assigned");
            match self.available.get_mut(&sig) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    claimed.push(sig);
                }
                _ => {
                    self.release(claimed);
                    self.note(Mismatch {
                        stage: Stage::Slw,
                        detail: format!("no region matches the translated list of `{id}`"),
                    });
                    return None;
                }
            }
        }
        Some(claimed)
    }

    fn release(&mut self, claimed: Vec<Sig>) {
        for sig in claimed {
            *self.available.get_mut(&sig).expect("claimed signature") += 1;
        }
    }

    fn assign_edge(&mut self, step: usize) -> Option<Isomorphism> {
        if step == self.order.len() {
            return self.finish_vertices();
        }
        let l1 = self.order[step].clone();
        let e1 = &self.p1.edges[&l1];
        for l2 in self.candidates[&l1].clone() {
            if self.used_edges.contains(&l2) {
                continue;
            }
            let e2 = &self.p2.edges[&l2];
            let flips: &[bool] = if e1.orientation == Orientation::Free { &[false, true] } else { &[false] };
            for &flip in flips {
                let (t2, h2) = if flip { (&e2.head, &e2.tail) } else { (&e2.tail, &e2.head) };
                let mut added = Vec::new();
                if !(self.bind_vertex(&e1.tail, t2, &mut added) && self.bind_vertex(&e1.head, h2, &mut added)) {
                    self.unbind(added);
                    self.note(Mismatch {
                        stage: Stage::Incidence,
                        detail: format!("edge `{l1}` has no counterpart respecting endpoints"),
                    });
                    continue;
                }
                self.iso.edge_map.insert(l1.clone(), l2.clone());
                if flip {
                    self.iso.flips.insert(l1.clone());
                }
                self.used_edges.insert(l2.clone());
                if let Some(claimed) = self.claim_regions(step) {
                    if let Some(found) = self.assign_edge(step + 1) {
                        return Some(found);
                    }
                    self.release(claimed);
                }
                self.used_edges.remove(&l2);
                self.iso.flips.remove(&l1);
                self.iso.edge_map.remove(&l1);
                self.unbind(added);
            }
        }
        None
    }

    /// Maps isolated vertices in sorted order, then searches handles.
    fn finish_vertices(&mut self) -> Option<Isomorphism> {
        let free1: Vec<String> = self.p1.vertices.iter().filter(|v| !self.iso.vertex_map.contains_key(*v)).cloned().collect();
        let free2: Vec<String> = self.p2.vertices.iter().filter(|v| !self.used_vertices.contains_key(*v)).cloned().collect();
        if free1.len() != free2.len() {
            self.note(Mismatch { stage: Stage::Incidence, detail: "isolated vertex counts differ".into() });
            return None;
        }
        let mut added = Vec::new();
        for (a, b) in free1.iter().zip(&free2) {
            self.bind_vertex(a, b, &mut added);
        }
        let handles1: Vec<String> = self.p1.handles.keys().cloned().collect();
        let mut used = BTreeSet::new();
        let found = self.assign_handle(&handles1, 0, &mut used);
        self.unbind(added);
        found
    }

    /// Region-side tags of a handle, as (translated list signature, side).
    fn handle_profile(&self, h: &HandleRecord, source: bool) -> Vec<(Sig, u8)> {
        let p = if source { self.p1 } else { self.p2 };
        let tag = |r: &String, side: u8| {
            let region = &p.surfaces[r];
            let sig = if source {
                translated_signature(region, &self.iso).expect("edges assigned")
            } else {
                (region.genus_signed, word_signature(&region.words))
            };
            (sig, side)
        };
        let mut out: Vec<_> = match &h.regions {
            HandleRegions::Flat(s) => s.iter().map(|r| tag(r, 0)).collect(),
            HandleRegions::Sides { incoming, outgoing } => {
                incoming.iter().map(|r| tag(r, 1)).chain(outgoing.iter().map(|r| tag(r, 2))).collect()
            }
        };
        out.sort();
        out
    }

    fn assign_handle(&mut self, order: &[String], i: usize, used: &mut BTreeSet<String>) -> Option<Isomorphism> {
        if i == order.len() {
            return self.finish_regions();
        }
        let h1 = &self.p1.handles[&order[i]];
        let shape = handle_shape(h1);
        let profile = self.handle_profile(h1, true);
        let targets: Vec<String> = self.p2.handles.keys().cloned().collect();
        for t in targets {
            if used.contains(&t) {
                continue;
            }
            let h2 = &self.p2.handles[&t];
            if handle_shape(h2) != shape || self.handle_profile(h2, false) != profile {
                self.note(Mismatch {
                    stage: Stage::Handles,
                    detail: format!("handle `{}` has no counterpart with matching boundary", h1.id),
                });
                continue;
            }
            self.iso.handle_map.insert(h1.id.clone(), t.clone());
            used.insert(t.clone());
            if let Some(found) = self.assign_handle(order, i + 1, used) {
                return Some(found);
            }
            used.remove(&t);
            self.iso.handle_map.remove(&h1.id);
        }
        None
    }

    /// Pairs regions within classes of equal list signature, handle
    /// membership and ring-graph role, then runs the full check.
    fn finish_regions(&mut self) -> Option<Isomorphism> {
        let mut classes: BTreeMap<String, (Vec<String>, Vec<String>)> = BTreeMap::new();
        for r in self.p1.surfaces.keys() {
            classes.entry(self.region_key(r, true)).or_default().0.push(r.clone());
        }
        for r in self.p2.surfaces.keys() {
            classes.entry(self.region_key(r, false)).or_default().1.push(r.clone());
        }
        let mut region_map = BTreeMap::new();
        for (left, right) in classes.into_values() {
            if left.len() != right.len() {
                self.note(Mismatch {
                    stage: Stage::Handles,
                    detail: "regions cannot be matched consistently with handle boundaries".into(),
                });
                return None;
            }
            region_map.extend(left.into_iter().zip(right));
        }
        self.iso.region_map = region_map;
        match verify_isomorphism(self.p1, self.p2, &self.iso) {
            Ok(()) => Some(self.iso.clone()),
            Err(m) => {
                self.note(m);
                None
            }
        }
    }

    fn region_key(&self, id: &str, source: bool) -> String {
        let p = if source { self.p1 } else { self.p2 };
        let region = &p.surfaces[id];
        let sig = if source {
            translated_signature(region, &self.iso).expect("edges assigned")
        } else {
            (region.genus_signed, word_signature(&region.words))
        };
        let rename = |h: &String| if source { self.iso.handle_map[h].clone() } else { h.clone() };
        let mut sides: Vec<(String, u8)> = Vec::new();
        for h in p.handles.values() {
            let side = match &h.regions {
                HandleRegions::Flat(s) if s.contains(id) => 0,
                HandleRegions::Sides { incoming, .. } if incoming.contains(id) => 1,
                HandleRegions::Sides { outgoing, .. } if outgoing.contains(id) => 2,
                _ => continue,
            };
            sides.push((rename(&h.id), side));
        }
        sides.sort();
        let ring = &p.tau.case2.ring_graph;
        let ring_role = ring.edge_index(id).map(|i| {
            let e = &ring.edges()[i];
            (rename(&e.tail), rename(&e.head), p.tau.case2.framing.values()[i] == FrameValue::Infinite)
        });
        format!("{sig:?}|{sides:?}|{ring_role:?}")
    }
}

/// Rarest candidate class first; afterwards prefer edges touching vertices
/// already reached, so endpoint constraints prune early.
fn assignment_order(p: &FlowPresentation, candidates: &BTreeMap<String, Vec<String>>) -> Vec<String> {
    let mut remaining: BTreeSet<&String> = p.edges.keys().collect();
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .min_by_key(|l| {
                let e = &p.edges[**l];
                let touches = reached.contains(e.tail.as_str()) || reached.contains(e.head.as_str());
                (!touches, candidates[**l].len(), (**l).clone())
            })
            .copied()
            .expect("non-empty");
        remaining.remove(pick);
        let e = &p.edges[pick];
        reached.insert(&e.tail);
        reached.insert(&e.head);
        order.push(pick.clone());
    }
    order
}
