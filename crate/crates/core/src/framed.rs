//! Framed MS-graphs and equivalence of framings.
//!
//! An MS-graph is an oriented graph where every edge has a source or a sink
//! at one of its ends. A framing assigns an integer or `∞` to every edge.
//! Two framings are equivalent when one is reached from the other by
//!
//! * a *joint* move: add `k` to two sequential edges (the head of one is the
//!   tail of the other, necessarily at a saddle), or
//! * an *opposed* move: add `k` to one edge and `-k` to an incident edge
//!   that is not sequential with it.
//!
//! Adding to an `∞` edge leaves it at `∞`, so both moves fix the set of
//! infinite edges.
//!
//! [`framings_equivalent`] decides equivalence from per-component invariants;
//! [`ReachabilityOracle`] decides it independently by exhaustive search over
//! unit moves inside a value box.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Source,
    Sink,
    Saddle,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Source => "source",
            Role::Sink => "sink",
            Role::Saddle => "saddle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "source" => Some(Role::Source),
            "sink" => Some(Role::Sink),
            "saddle" => Some(Role::Saddle),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MsEdge {
    pub id: String,
    pub tail: String,
    pub head: String,
}

impl MsEdge {
    pub fn new(id: &str, tail: &str, head: &str) -> Self {
        MsEdge { id: id.into(), tail: tail.into(), head: head.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FramedError {
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{0}` has no source or sink endpoint")]
    NoTerminalEnd(String),
    #[error("source `{vertex}` has incoming edge `{edge}`")]
    IncomingAtSource { vertex: String, edge: String },
    #[error("sink `{vertex}` has outgoing edge `{edge}`")]
    OutgoingAtSink { vertex: String, edge: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("framing has {got} values but the graph has {expected} edges")]
    DomainMismatch { expected: usize, got: usize },
    #[error("edges `{0}` and `{1}` are not incident")]
    NotIncident(String, String),
    #[error("a move needs two distinct edges, got `{0}` twice")]
    SameEdge(String),
    #[error("joint move needs sequential edges; `{0}` and `{1}` are not sequential")]
    NotSequential(String, String),
    #[error("opposed move needs non-sequential edges; `{0}` and `{1}` are sequential")]
    Sequential(String, String),
    #[error("component of edge `{0}` has saddles; the zero normal form needs a saddle-free component")]
    HasSaddles(String),
    #[error("framing value {value} on edge `{edge}` is outside [-{bound}, {bound}]")]
    OutOfBounds { edge: String, value: i64, bound: i64 },
}

/// A validated MS-graph. Edges keep their insertion order; framings are
/// indexed by that order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MsGraph {
    vertices: BTreeMap<String, Role>,
    edges: Vec<MsEdge>,
}

impl MsGraph {
    pub fn new<I>(vertices: I, edges: Vec<MsEdge>) -> Result<Self, FramedError>
    where
        I: IntoIterator<Item = (String, Role)>,
    {
        let vertices: BTreeMap<String, Role> = vertices.into_iter().collect();
        let mut seen = std::collections::BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id.as_str()) {
                return Err(FramedError::DuplicateEdge(e.id.clone()));
            }
            let role = |v: &String| {
                vertices
                    .get(v)
                    .copied()
                    .ok_or_else(|| FramedError::UnknownVertex { edge: e.id.clone(), vertex: v.clone() })
            };
            let (t, h) = (role(&e.tail)?, role(&e.head)?);
            if t == Role::Sink {
                return Err(FramedError::OutgoingAtSink { vertex: e.tail.clone(), edge: e.id.clone() });
            }
            if h == Role::Source {
                return Err(FramedError::IncomingAtSource { vertex: e.head.clone(), edge: e.id.clone() });
            }
            if t == Role::Saddle && h == Role::Saddle {
                return Err(FramedError::NoTerminalEnd(e.id.clone()));
            }
        }
        Ok(MsGraph { vertices, edges })
    }

    /// Convenience constructor from string slices.
    pub fn build(vertices: &[(&str, Role)], edges: &[(&str, &str, &str)]) -> Result<Self, FramedError> {
        MsGraph::new(
            vertices.iter().map(|(v, r)| (v.to_string(), *r)),
            edges.iter().map(|(id, t, h)| MsEdge::new(id, t, h)).collect(),
        )
    }

    pub fn vertices(&self) -> &BTreeMap<String, Role> {
        &self.vertices
    }

    pub fn edges(&self) -> &[MsEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    fn index_of(&self, id: &str) -> Result<usize, FramedError> {
        self.edge_index(id).ok_or_else(|| FramedError::UnknownEdge(id.to_string()))
    }

    /// Head of one edge is the tail of the other.
    pub fn sequential(&self, a: usize, b: usize) -> bool {
        let (ea, eb) = (&self.edges[a], &self.edges[b]);
        a != b && (ea.head == eb.tail || eb.head == ea.tail)
    }

    pub fn incident(&self, a: usize, b: usize) -> bool {
        let (ea, eb) = (&self.edges[a], &self.edges[b]);
        a != b && (ea.tail == eb.tail || ea.tail == eb.head || ea.head == eb.tail || ea.head == eb.head)
    }

    /// A framing over this graph from `edge id -> value` entries.
    pub fn framing_from<I, S>(&self, values: I) -> Result<Framing, FramedError>
    where
        I: IntoIterator<Item = (S, FrameValue)>,
        S: AsRef<str>,
    {
        let mut slots: Vec<Option<FrameValue>> = vec![None; self.edges.len()];
        for (id, v) in values {
            slots[self.index_of(id.as_ref())?] = Some(v);
        }
        let got = slots.iter().filter(|s| s.is_some()).count();
        if got != self.edges.len() {
            return Err(FramedError::DomainMismatch { expected: self.edges.len(), got });
        }
        Ok(Framing(slots.into_iter().map(Option::unwrap).collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameValue {
    Finite(i64),
    Infinite,
}

impl FrameValue {
    pub fn finite(self) -> Option<i64> {
        match self {
            FrameValue::Finite(v) => Some(v),
            FrameValue::Infinite => None,
        }
    }

    fn shifted(self, k: i64) -> Self {
        match self {
            FrameValue::Finite(v) => FrameValue::Finite(v + k),
            FrameValue::Infinite => FrameValue::Infinite,
        }
    }
}

impl fmt::Display for FrameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameValue::Finite(v) => write!(f, "{v}"),
            FrameValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Framing values aligned with [`MsGraph::edges`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Framing(pub Vec<FrameValue>);

impl Framing {
    pub fn finite(values: &[i64]) -> Self {
        Framing(values.iter().map(|&v| FrameValue::Finite(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[FrameValue] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphType {
    /// No saddles: only opposed moves apply; the total is invariant.
    Type1,
    /// A cycle passes through an odd number of saddles: the total mod 2 is invariant.
    Type2,
    /// Edges split into two groups with sequential edges in different groups;
    /// the difference of group totals is invariant.
    Type3 { first: Vec<usize>, second: Vec<usize> },
}

impl GraphType {
    pub fn number(&self) -> u8 {
        match self {
            GraphType::Type1 => 1,
            GraphType::Type2 => 2,
            GraphType::Type3 { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Edge indices, ascending.
    pub edges: Vec<usize>,
    pub vertices: Vec<String>,
    pub kind: GraphType,
}

/// Connected components with their types. Isolated vertices are skipped.
///
/// A saddle is *passed through* by a walk entering on an incoming edge and
/// leaving on an outgoing one. Edges are 2-coloured so that edges meeting at
/// a vertex share a colour unless they are sequential at a saddle; the
/// colouring fails exactly when some cycle passes through an odd number of
/// saddles.
pub fn classify(g: &MsGraph) -> Vec<Component> {
    let n = g.edges.len();
    // vertex -> incident (edge, side) where side = 1 for edges leaving a saddle
    let mut at: BTreeMap<&str, Vec<(usize, u8)>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        let tail_side = u8::from(g.vertices[&e.tail] == Role::Saddle);
        at.entry(&e.tail).or_default().push((i, tail_side));
        at.entry(&e.head).or_default().push((i, 0));
    }
    let mut color: Vec<Option<u8>> = vec![None; n];
    let mut out = Vec::new();
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        let mut edges = vec![start];
        let mut odd = false;
        while let Some(e) = queue.pop_front() {
            let ce = color[e].unwrap();
            let edge = &g.edges[e];
            for v in [&edge.tail, &edge.head] {
                let side_e = at[v.as_str()].iter().find(|(i, _)| *i == e).map(|(_, s)| *s).unwrap();
                for &(f, side_f) in &at[v.as_str()] {
                    if f == e {
                        continue;
                    }
                    let want = ce ^ side_e ^ side_f;
                    match color[f] {
                        None => {
                            color[f] = Some(want);
                            edges.push(f);
                            queue.push_back(f);
                        }
                        Some(c) if c != want => odd = true,
                        _ => {}
                    }
                }
            }
        }
        edges.sort_unstable();
        let mut vertices: Vec<String> =
            edges.iter().flat_map(|&i| [g.edges[i].tail.clone(), g.edges[i].head.clone()]).collect();
        vertices.sort();
        vertices.dedup();
        let has_saddle = vertices.iter().any(|v| g.vertices[v] == Role::Saddle);
        let kind = if !has_saddle {
            GraphType::Type1
        } else if odd {
            GraphType::Type2
        } else {
            // The first group holds the edges at the smallest source or sink.
            let anchor = vertices.iter().find(|v| g.vertices[*v] != Role::Saddle).unwrap();
            let anchor_edge =
                edges.iter().copied().find(|&i| g.edges[i].tail == *anchor || g.edges[i].head == *anchor).unwrap();
            let first_color = color[anchor_edge].unwrap();
            let (first, second) = edges.iter().partition(|&&i| color[i] == Some(first_color));
            GraphType::Type3 { first, second }
        };
        out.push(Component { edges, vertices, kind });
    }
    out
}

/// One move on a framing. Edge ids refer to the graph the move is applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// Add `k` to both of two sequential edges.
    Joint { first: String, second: String, k: i64 },
    /// Add `k` to `raised` and `-k` to the incident, non-sequential `lowered`.
    Opposed { raised: String, lowered: String, k: i64 },
}

pub fn apply_operation(g: &MsGraph, f: &Framing, mv: &Move) -> Result<Framing, FramedError> {
    check_domain(g, f)?;
    let (a, b, ka, kb) = match mv {
        Move::Joint { first, second, k } => (first, second, *k, *k),
        Move::Opposed { raised, lowered, k } => (raised, lowered, *k, -*k),
    };
    let (ia, ib) = (g.index_of(a)?, g.index_of(b)?);
    if ia == ib {
        return Err(FramedError::SameEdge(a.clone()));
    }
    if !g.incident(ia, ib) {
        return Err(FramedError::NotIncident(a.clone(), b.clone()));
    }
    match (mv, g.sequential(ia, ib)) {
        (Move::Joint { .. }, false) => return Err(FramedError::NotSequential(a.clone(), b.clone())),
        (Move::Opposed { .. }, true) => return Err(FramedError::Sequential(a.clone(), b.clone())),
        _ => {}
    }
    let mut out = f.clone();
    out.0[ia] = out.0[ia].shifted(ka);
    out.0[ib] = out.0[ib].shifted(kb);
    Ok(out)
}

fn check_domain(g: &MsGraph, f: &Framing) -> Result<(), FramedError> {
    if f.len() != g.edges.len() {
        return Err(FramedError::DomainMismatch { expected: g.edges.len(), got: f.len() });
    }
    Ok(())
}

/// Component classification prepared once for many framing comparisons.
#[derive(Clone, Debug)]
pub struct PreparedGraph {
    edge_count: usize,
    components: Vec<Component>,
}

impl PreparedGraph {
    pub fn new(g: &MsGraph) -> Self {
        PreparedGraph { edge_count: g.edges.len(), components: classify(g) }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn equivalent(&self, f1: &Framing, f2: &Framing) -> Result<bool, FramedError> {
        for f in [f1, f2] {
            if f.len() != self.edge_count {
                return Err(FramedError::DomainMismatch { expected: self.edge_count, got: f.len() });
            }
        }
        Ok(self.components.iter().all(|c| component_equivalent(c, f1, f2)))
    }
}

fn component_equivalent(c: &Component, f1: &Framing, f2: &Framing) -> bool {
    let inf = |f: &Framing, i: usize| f.0[i] == FrameValue::Infinite;
    let any_inf = c.edges.iter().any(|&i| inf(f1, i) || inf(f2, i));
    if any_inf {
        // Both moves fix the infinite set, so differing sets (including one
        // side having none) are never equivalent; equal non-empty sets let
        // every finite edge be adjusted freely through a path to an ∞ edge.
        return c.edges.iter().all(|&i| inf(f1, i) == inf(f2, i));
    }
    let total = |f: &Framing, es: &[usize]| -> i64 { es.iter().map(|&i| f.0[i].finite().unwrap()).sum() };
    match &c.kind {
        GraphType::Type1 => total(f1, &c.edges) == total(f2, &c.edges),
        GraphType::Type2 => (total(f1, &c.edges) - total(f2, &c.edges)).rem_euclid(2) == 0,
        GraphType::Type3 { first, second } => {
            total(f1, first) - total(f1, second) == total(f2, first) - total(f2, second)
        }
    }
}

/// Decides equivalence of two framings from the per-component invariants.
pub fn framings_equivalent(g: &MsGraph, f1: &Framing, f2: &Framing) -> Result<bool, FramedError> {
    PreparedGraph::new(g).equivalent(f1, f2)
}

/// Exhaustive reachability under unit moves, restricted to framings whose
/// finite values stay in `[-bound, bound]`.
///
/// Reachability is symmetric (every move has an inverse), so each search
/// labels a whole class; labels are cached per infinite-edge pattern.
#[derive(Debug)]
pub struct ReachabilityOracle {
    bound: i64,
    edge_count: usize,
    ids: Vec<String>,
    /// Unordered incident pairs with `true` for sequential pairs.
    pairs: Vec<(usize, usize, bool)>,
    labels: HashMap<Vec<bool>, Vec<u32>>,
    next_label: u32,
}

const UNLABELLED: u32 = u32::MAX;

impl ReachabilityOracle {
    pub fn new(g: &MsGraph, bound: i64) -> Self {
        let n = g.edges.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if g.incident(a, b) {
                    pairs.push((a, b, g.sequential(a, b)));
                }
            }
        }
        ReachabilityOracle { bound, edge_count: n, ids: g.edges.iter().map(|e| e.id.clone()).collect(), pairs, labels: HashMap::new(), next_label: 0 }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    fn width(&self) -> u64 {
        (2 * self.bound + 1) as u64
    }

    /// State index of the finite values of `f` under `pattern`.
    fn encode(&self, f: &Framing) -> u64 {
        let w = self.width();
        f.0.iter().rev().filter_map(|v| v.finite()).fold(0u64, |acc, v| acc * w + (v + self.bound) as u64)
    }

    fn check_bounds(&self, f: &Framing) -> Result<(), FramedError> {
        if f.len() != self.edge_count {
            return Err(FramedError::DomainMismatch { expected: self.edge_count, got: f.len() });
        }
        for (i, v) in f.0.iter().enumerate() {
            if let FrameValue::Finite(x) = v {
                if x.abs() > self.bound {
                    return Err(FramedError::OutOfBounds { edge: self.ids[i].clone(), value: *x, bound: self.bound });
                }
            }
        }
        Ok(())
    }

    fn label(&mut self, f: &Framing) -> u32 {
        let pattern: Vec<bool> = f.0.iter().map(|v| *v == FrameValue::Infinite).collect();
        let finite_slots: Vec<usize> = (0..self.edge_count).filter(|&i| !pattern[i]).collect();
        let w = self.width();
        let states = w.pow(finite_slots.len() as u32) as usize;
        let start = self.encode(f) as usize;
        let labels = self.labels.entry(pattern.clone()).or_insert_with(|| vec![UNLABELLED; states]);
        if labels[start] != UNLABELLED {
            return labels[start];
        }
        // position of each edge among finite slots
        let mut slot_of = vec![usize::MAX; self.edge_count];
        for (s, &e) in finite_slots.iter().enumerate() {
            slot_of[e] = s;
        }
        let powers: Vec<u64> = (0..finite_slots.len()).map(|s| w.pow(s as u32)).collect();
        let label = self.next_label;
        self.next_label += 1;
        labels[start] = label;
        let mut queue = VecDeque::from([start]);
        let mut digits = vec![0i64; finite_slots.len()];
        while let Some(state) = queue.pop_front() {
            let mut rest = state as u64;
            for d in digits.iter_mut() {
                *d = (rest % w) as i64 - self.bound;
                rest /= w;
            }
            for &(a, b, seq) in &self.pairs {
                for k in [-1i64, 1] {
                    let kb = if seq { k } else { -k };
                    let mut next = state as i64;
                    let mut ok = true;
                    let mut moved = false;
                    for (e, delta) in [(a, k), (b, kb)] {
                        let s = slot_of[e];
                        if s == usize::MAX {
                            continue;
                        }
                        let v = digits[s] + delta;
                        if v.abs() > self.bound {
                            ok = false;
                            break;
                        }
                        next += delta * powers[s] as i64;
                        moved = true;
                    }
                    if ok && moved {
                        let next = next as usize;
                        if labels[next] == UNLABELLED {
                            labels[next] = label;
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        label
    }

    pub fn equivalent(&mut self, f1: &Framing, f2: &Framing) -> Result<bool, FramedError> {
        self.check_bounds(f1)?;
        self.check_bounds(f2)?;
        let p1 = f1.0.iter().map(|v| *v == FrameValue::Infinite);
        let p2 = f2.0.iter().map(|v| *v == FrameValue::Infinite);
        if !p1.eq(p2) {
            return Ok(false);
        }
        Ok(self.label(f1) == self.label(f2))
    }
}

/// Breadth-first search from `f1` over unit moves inside `[-bound, bound]`.
pub fn oracle_equivalent(g: &MsGraph, f1: &Framing, f2: &Framing, bound: i64) -> Result<bool, FramedError> {
    ReachabilityOracle::new(g, bound).equivalent(f1, f2)
}

/// Moves a saddle-free connected framing to the form that is zero on every
/// edge except `anchor`, which carries the total. Returns the normal form and
/// the moves that reach it.
pub fn normalize_type1(g: &MsGraph, f: &Framing, anchor: &str) -> Result<(Framing, Vec<Move>), FramedError> {
    check_domain(g, f)?;
    let target = g.index_of(anchor)?;
    let comp = classify(g).into_iter().find(|c| c.edges.contains(&target)).expect("edge belongs to a component");
    if comp.kind != GraphType::Type1 {
        return Err(FramedError::HasSaddles(anchor.to_string()));
    }
    // BFS tree over edges rooted at the anchor: parent[e] is the next edge towards it.
    let n = g.edges.len();
    let mut parent = vec![usize::MAX; n];
    parent[target] = target;
    let mut queue = VecDeque::from([target]);
    let mut order = Vec::new();
    while let Some(e) = queue.pop_front() {
        order.push(e);
        for &x in &comp.edges {
            if parent[x] == usize::MAX && g.incident(e, x) {
                parent[x] = e;
                queue.push_back(x);
            }
        }
    }
    let mut current = f.clone();
    let mut moves = Vec::new();
    // Farthest edges first; each value is pushed one step towards the anchor.
    for &e in order.iter().rev() {
        if e == target {
            continue;
        }
        let Some(v) = current.0[e].finite().filter(|v| *v != 0) else { continue };
        let mv = Move::Opposed { raised: g.edges[parent[e]].id.clone(), lowered: g.edges[e].id.clone(), k: v };
        current = apply_operation(g, &current, &mv)?;
        moves.push(mv);
    }
    Ok((current, moves))
}
