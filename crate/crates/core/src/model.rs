//! Flow presentations: the distinguishing graph of a flow together with its
//! set of lists of words, handle boundaries, curve pairings, chosen cycles
//! and tau data.
//!
//! Presentations are plain data. [`validate_presentation`] checks the
//! structural invariants and reports every violation instead of stopping at
//! the first one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::framed::Role;
use crate::tau::TauInvariant;
use crate::words::CyclicWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// Orientation carried by the flow; isomorphisms must preserve it.
    Fixed,
    /// Arbitrarily chosen orientation; isomorphisms may reverse it.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    LowerCurve,
    UpperCurve,
    /// Boundary of a base of a round 1-handle, where three sheets meet.
    Corner,
    TauCurve,
    ChosenCycleCurve,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 5] = [
        EdgeKind::LowerCurve,
        EdgeKind::UpperCurve,
        EdgeKind::Corner,
        EdgeKind::TauCurve,
        EdgeKind::ChosenCycleCurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::LowerCurve => "lower-curve",
            EdgeKind::UpperCurve => "upper-curve",
            EdgeKind::Corner => "corner",
            EdgeKind::TauCurve => "tau-curve",
            EdgeKind::ChosenCycleCurve => "chosen-cycle-curve",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// An arc of the distinguishing graph, directed `tail -> head`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub label: String,
    pub tail: String,
    pub head: String,
    pub orientation: Orientation,
    pub kind: EdgeKind,
}

impl EdgeRecord {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// One 2-stratum: its signed genus (negative when non-orientable) and the
/// words read along its boundary components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceRegion {
    pub id: String,
    pub genus_signed: i64,
    pub words: Vec<CyclicWord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HandleKind {
    Simple,
    Round,
}

impl HandleKind {
    pub fn name(self) -> &'static str {
        match self {
            HandleKind::Simple => "simple",
            HandleKind::Round => "round",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HandleRegions {
    Flat(BTreeSet<String>),
    /// Round 1-handles: incoming and outgoing parts of the boundary torus.
    Sides {
        incoming: BTreeSet<String>,
        outgoing: BTreeSet<String>,
    },
}

impl HandleRegions {
    pub fn all(&self) -> impl Iterator<Item = &String> {
        let (a, b): (&BTreeSet<String>, Option<&BTreeSet<String>>) = match self {
            HandleRegions::Flat(s) => (s, None),
            HandleRegions::Sides { incoming, outgoing } => (incoming, Some(outgoing)),
        };
        a.iter().chain(b.into_iter().flatten())
    }

    pub fn contains(&self, region: &str) -> bool {
        self.all().any(|r| r == region)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandleRecord {
    pub id: String,
    pub kind: HandleKind,
    pub index: u8,
    pub height: Option<u32>,
    pub regions: HandleRegions,
}

impl HandleRecord {
    pub fn is_round(&self, index: u8) -> bool {
        self.kind == HandleKind::Round && self.index == index
    }
}

/// A pair of closed-orbit curves, each written as a word over edges.
pub type CurvePair = (CyclicWord, CyclicWord);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowPresentation {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeMap<String, EdgeRecord>,
    pub surfaces: BTreeMap<String, SurfaceRegion>,
    pub handles: BTreeMap<String, HandleRecord>,
    pub lower_pairs: Vec<CurvePair>,
    pub upper_pairs: Vec<CurvePair>,
    /// Round handle id -> chosen cycle on its boundary torus.
    pub chosen_cycles: BTreeMap<String, CyclicWord>,
    pub tau: TauInvariant,
}

impl FlowPresentation {
    pub fn add_vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.vertices.insert(id.into());
        self
    }

    pub fn add_edge(
        &mut self,
        label: &str,
        tail: &str,
        head: &str,
        orientation: Orientation,
        kind: EdgeKind,
    ) -> &mut Self {
        self.edges.insert(
            label.to_string(),
            EdgeRecord {
                label: label.to_string(),
                tail: tail.to_string(),
                head: head.to_string(),
                orientation,
                kind,
            },
        );
        self
    }

    /// Adds a region whose words are given in compact notation, one per entry.
    pub fn add_region(&mut self, id: &str, genus_signed: i64, words: &[&str]) -> &mut Self {
        self.surfaces.insert(
            id.to_string(),
            SurfaceRegion {
                id: id.to_string(),
                genus_signed,
                words: words.iter().map(|s| CyclicWord::from_notation(s)).collect(),
            },
        );
        self
    }

    pub fn add_handle(&mut self, handle: HandleRecord) -> &mut Self {
        self.handles.insert(handle.id.clone(), handle);
        self
    }

    pub fn edge(&self, label: &str) -> Option<&EdgeRecord> {
        self.edges.get(label)
    }

    /// Number of edge-ends at each vertex.
    pub fn vertex_degrees(&self) -> BTreeMap<&str, usize> {
        let mut deg: BTreeMap<&str, usize> = self.vertices.iter().map(|v| (v.as_str(), 0)).collect();
        for e in self.edges.values() {
            *deg.entry(e.tail.as_str()).or_default() += 1;
            *deg.entry(e.head.as_str()).or_default() += 1;
        }
        deg
    }

    /// Total occurrences of each edge label across all boundary words.
    pub fn letter_occurrences(&self) -> BTreeMap<&str, usize> {
        let mut occ: BTreeMap<&str, usize> = self.edges.keys().map(|k| (k.as_str(), 0)).collect();
        for region in self.surfaces.values() {
            for w in &region.words {
                for label in w.labels() {
                    *occ.entry(label).or_default() += 1;
                }
            }
        }
        occ
    }

    /// True iff the letters of `w` trace a closed walk in the graph.
    pub fn is_closed_walk(&self, w: &CyclicWord) -> bool {
        let ends: Option<Vec<(&str, &str)>> = w
            .letters()
            .iter()
            .map(|l| {
                let e = self.edges.get(&l.label)?;
                Some(match l.power {
                    crate::words::Power::Pos => (e.tail.as_str(), e.head.as_str()),
                    crate::words::Power::Neg => (e.head.as_str(), e.tail.as_str()),
                })
            })
            .collect();
        let Some(ends) = ends else { return false };
        (0..ends.len()).all(|i| ends[i].1 == ends[(i + 1) % ends.len()].0)
    }

    /// Edge labels that occur in the words of a handle's boundary regions.
    pub fn handle_edges(&self, handle: &HandleRecord) -> BTreeSet<&str> {
        handle
            .regions
            .all()
            .filter_map(|r| self.surfaces.get(r))
            .flat_map(|r| r.words.iter().flat_map(|w| w.labels()))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    UnknownVertex,
    UnknownEdge,
    UnknownRegion,
    UnknownHandle,
    EdgeOccurrence,
    CornerOrientation,
    HandleIndex,
    HandleSides,
    SharedRegion,
    ChosenCycle,
    TauCase1,
    TauCase2,
    RingGraph,
    TauCase3,
    LabelMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Identifier of the offending item.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { kind, subject: subject.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of `p`; the report is empty iff all hold.
pub fn validate_presentation(p: &FlowPresentation) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_graph(p, &mut report);
    check_surfaces(p, &mut report);
    check_handles(p, &mut report);
    check_pairs(p, &mut report);
    check_chosen(p, &mut report);
    check_tau(p, &mut report);
    report
}

fn check_graph(p: &FlowPresentation, report: &mut ValidationReport) {
    for (key, e) in &p.edges {
        if key != &e.label {
            report.push(ViolationKind::LabelMismatch, key, format!("stored under key `{key}` but labelled `{}`", e.label));
        }
        for v in [&e.tail, &e.head] {
            if !p.vertices.contains(v) {
                report.push(ViolationKind::UnknownVertex, &e.label, format!("endpoint `{v}` is not a vertex"));
            }
        }
        if e.kind == EdgeKind::Corner && e.orientation != Orientation::Fixed {
            report.push(ViolationKind::CornerOrientation, &e.label, "corner edges carry the orbit orientation and must be fixed");
        }
    }
}

fn check_surfaces(p: &FlowPresentation, report: &mut ValidationReport) {
    for (key, region) in &p.surfaces {
        if key != &region.id {
            report.push(ViolationKind::LabelMismatch, key, format!("stored under key `{key}` but named `{}`", region.id));
        }
        for w in &region.words {
            for label in w.labels() {
                if !p.edges.contains_key(label) {
                    report.push(ViolationKind::UnknownEdge, &region.id, format!("boundary word names unknown edge `{label}`"));
                }
            }
        }
    }
    // An arc inside one sheet borders exactly two region sides; a corner
    // curve is where round-handle walls meet the surface and borders more.
    for (label, count) in p.letter_occurrences() {
        let Some(edge) = p.edges.get(label) else { continue };
        if edge.kind == EdgeKind::Corner {
            if count < 2 {
                report.push(ViolationKind::EdgeOccurrence, label, format!("corner edge occurrence < 2 (occurs {count} time(s))"));
            }
        } else if count != 2 {
            report.push(ViolationKind::EdgeOccurrence, label, format!("edge occurrence ≠ 2 (occurs {count} time(s))"));
        }
    }
}

fn check_handles(p: &FlowPresentation, report: &mut ValidationReport) {
    let mut membership: BTreeMap<&str, usize> = BTreeMap::new();
    for (key, h) in &p.handles {
        if key != &h.id {
            report.push(ViolationKind::LabelMismatch, key, format!("stored under key `{key}` but named `{}`", h.id));
        }
        let max_index = match h.kind {
            HandleKind::Simple => 3,
            HandleKind::Round => 2,
        };
        if h.index > max_index {
            report.push(ViolationKind::HandleIndex, &h.id, format!("{} handle index {} out of range 0..={max_index}", h.kind.name(), h.index));
        }
        match (&h.regions, h.is_round(1)) {
            (HandleRegions::Flat(_), true) => {
                report.push(ViolationKind::HandleSides, &h.id, "round 1-handle needs an incoming/outgoing partition")
            }
            (HandleRegions::Sides { .. }, false) => {
                report.push(ViolationKind::HandleSides, &h.id, "only round 1-handles carry incoming/outgoing sides")
            }
            (HandleRegions::Sides { incoming, outgoing }, true) => {
                if let Some(r) = incoming.intersection(outgoing).next() {
                    report.push(ViolationKind::HandleSides, &h.id, format!("region `{r}` is both incoming and outgoing"));
                }
            }
            _ => {}
        }
        let distinct: BTreeSet<&String> = h.regions.all().collect();
        for r in distinct {
            if p.surfaces.contains_key(r) {
                *membership.entry(r.as_str()).or_default() += 1;
            } else {
                report.push(ViolationKind::UnknownRegion, &h.id, format!("boundary names unknown region `{r}`"));
            }
        }
    }
    for (r, n) in membership {
        if n > 2 {
            report.push(ViolationKind::SharedRegion, r, format!("region lies on {n} handle boundaries (at most 2)"));
        }
    }
}

fn check_pairs(p: &FlowPresentation, report: &mut ValidationReport) {
    for (side, pairs) in [("lower", &p.lower_pairs), ("upper", &p.upper_pairs)] {
        for (i, (a, b)) in pairs.iter().enumerate() {
            for label in a.labels().chain(b.labels()) {
                if !p.edges.contains_key(label) {
                    report.push(ViolationKind::UnknownEdge, format!("{side} pair {i}"), format!("names unknown edge `{label}`"));
                }
            }
        }
    }
}

fn check_chosen(p: &FlowPresentation, report: &mut ValidationReport) {
    for (hid, w) in &p.chosen_cycles {
        let Some(h) = p.handles.get(hid) else {
            report.push(ViolationKind::UnknownHandle, hid, "chosen cycle attached to unknown handle");
            continue;
        };
        if h.kind != HandleKind::Round {
            report.push(ViolationKind::ChosenCycle, hid, "chosen cycles belong to round handles");
        }
        check_cycle_on_handle(p, h, w, ViolationKind::ChosenCycle, "chosen cycle", report);
    }
}

fn check_cycle_on_handle(
    p: &FlowPresentation,
    h: &HandleRecord,
    w: &CyclicWord,
    kind: ViolationKind,
    what: &str,
    report: &mut ValidationReport,
) {
    let mut known = true;
    for label in w.labels() {
        if !p.edges.contains_key(label) {
            report.push(ViolationKind::UnknownEdge, &h.id, format!("{what} names unknown edge `{label}`"));
            known = false;
        }
    }
    if !known {
        return;
    }
    if !p.is_closed_walk(w) {
        report.push(kind, &h.id, format!("{what} `{w}` is not a closed edge path"));
    }
    let on_torus = p.handle_edges(h);
    if let Some(label) = w.labels().find(|l| !on_torus.contains(l)) {
        report.push(kind, &h.id, format!("{what} uses edge `{label}` which is not on the handle boundary"));
    }
}

fn check_tau(p: &FlowPresentation, report: &mut ValidationReport) {
    let tau = &p.tau;
    for rec in &tau.case1 {
        let subject = format!("case1 {} {}", rec.handle0, rec.handle2);
        for (hid, idx) in [(&rec.handle0, 0u8), (&rec.handle2, 2u8)] {
            match p.handles.get(hid) {
                None => report.push(ViolationKind::UnknownHandle, &subject, format!("unknown handle `{hid}`")),
                Some(h) if !h.is_round(idx) => {
                    report.push(ViolationKind::TauCase1, &subject, format!("`{hid}` must be a round {idx}-handle"))
                }
                _ => {}
            }
        }
    }
    for (hid, rec) in &tau.case2.tori {
        match p.handles.get(hid) {
            None => report.push(ViolationKind::UnknownHandle, hid, "case2 record for unknown handle"),
            Some(h) if h.kind != HandleKind::Round => {
                report.push(ViolationKind::TauCase2, hid, "case2 records belong to round handles")
            }
            _ => {}
        }
        if let Some((k, l)) = rec.omega {
            if l == 0 || k < 0 || k > l.abs() {
                report.push(ViolationKind::TauCase2, hid, format!("omega pair ({k}, {l}) must satisfy 0 <= k <= |l|, l != 0"));
            }
        }
    }
    let ring = &tau.case2.ring_graph;
    for (v, role) in ring.vertices() {
        let Some(h) = p.handles.get(v) else {
            report.push(ViolationKind::UnknownHandle, v, "ring graph vertex is not a handle");
            continue;
        };
        if h.is_round(0) && *role != Role::Source {
            report.push(ViolationKind::RingGraph, v, "round 0-handles are sources of the ring graph");
        }
        if h.is_round(2) && *role != Role::Sink {
            report.push(ViolationKind::RingGraph, v, "round 2-handles are sinks of the ring graph");
        }
    }
    for e in ring.edges() {
        if !p.surfaces.contains_key(&e.id) {
            report.push(ViolationKind::UnknownRegion, &e.id, "ring graph edge is not a region");
            continue;
        }
        for end in [&e.tail, &e.head] {
            if let Some(h) = p.handles.get(end) {
                if !h.regions.contains(&e.id) {
                    report.push(ViolationKind::RingGraph, &e.id, format!("ring domain is not on the boundary of `{end}`"));
                }
            }
        }
    }
    if tau.case2.framing.len() != ring.edges().len() {
        report.push(ViolationKind::RingGraph, "mu", "framing does not cover every ring graph edge");
    }
    for (hid, records) in &tau.case3 {
        let Some(h) = p.handles.get(hid) else {
            report.push(ViolationKind::UnknownHandle, hid, "case3 records for unknown handle");
            continue;
        };
        if h.kind != HandleKind::Round {
            report.push(ViolationKind::TauCase3, hid, "case3 records belong to round handles");
        }
        for rec in records {
            check_cycle_on_handle(p, h, &rec.cycle, ViolationKind::TauCase3, "case3 cycle", report);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn trivial_flow_validates() {
        let p = catalog::trivial_orbit_flow(1, 1).unwrap();
        let report = validate_presentation(&p);
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn single_occurrence_reported() {
        let mut p = FlowPresentation::default();
        p.add_vertex("A")
            .add_vertex("B")
            .add_edge("x", "A", "B", Orientation::Free, EdgeKind::UpperCurve)
            .add_edge("y", "B", "A", Orientation::Free, EdgeKind::UpperCurve)
            .add_region("R", 0, &["x y"]);
        let report = validate_presentation(&p);
        assert!(report.has(ViolationKind::EdgeOccurrence));
        assert!(report.to_string().contains("edge occurrence ≠ 2"), "{report}");
        assert!(report.violations.iter().any(|v| v.subject == "x"));
    }

    #[test]
    fn chosen_cycle_with_unknown_edge_reported() {
        let mut p = catalog::trivial_orbit_flow(1, 1).unwrap();
        p.chosen_cycles.insert("T0".into(), CyclicWord::from_notation("zz"));
        let report = validate_presentation(&p);
        assert!(report.has(ViolationKind::UnknownEdge), "{report}");
    }

    #[test]
    fn corner_must_be_fixed() {
        let mut p = catalog::trivial_orbit_flow(1, 1).unwrap();
        p.edges.get_mut("a").unwrap().orientation = Orientation::Free;
        assert!(validate_presentation(&p).has(ViolationKind::CornerOrientation));
    }

    #[test]
    fn round_one_handle_needs_sides() {
        let mut p = catalog::trivial_orbit_flow(1, 1).unwrap();
        let h = p.handles.get_mut("T1").unwrap();
        h.regions = HandleRegions::Flat(["L1", "L2"].iter().map(|s| s.to_string()).collect());
        assert!(validate_presentation(&p).has(ViolationKind::HandleSides));
    }

    #[test]
    fn region_on_three_handles_reported() {
        let mut p = catalog::trivial_orbit_flow(1, 1).unwrap();
        p.add_handle(HandleRecord {
            id: "X".into(),
            kind: HandleKind::Simple,
            index: 0,
            height: None,
            regions: HandleRegions::Flat(["L1".to_string()].into()),
        });
        assert!(validate_presentation(&p).has(ViolationKind::SharedRegion));
    }

    #[test]
    fn open_chosen_path_reported() {
        let p = catalog::builtin("annulus-pair").unwrap();
        let mut q = p.clone();
        let (hid, _) = q.chosen_cycles.iter().next().map(|(k, v)| (k.clone(), v.clone())).unwrap();
        q.chosen_cycles.insert(hid, CyclicWord::from_notation("x"));
        assert!(validate_presentation(&q).has(ViolationKind::ChosenCycle));
    }
}
