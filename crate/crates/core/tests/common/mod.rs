//! Shared fixtures for integration tests: an enumerator of small connected
//! MS-graphs up to isomorphism, and framing enumeration.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ms3::framed::{FrameValue, Framing, MsEdge, MsGraph, Role};

const ROLES: [Role; 3] = [Role::Source, Role::Sink, Role::Saddle];

/// Vertex roles plus directed edges, kept in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    roles: Vec<Role>,
    edges: Vec<(usize, usize)>,
}

fn allowed(t: Role, h: Role) -> bool {
    t != Role::Sink && h != Role::Source && !(t == Role::Saddle && h == Role::Saddle)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(s: &Shape) -> Shape {
    permutations(s.roles.len())
        .into_iter()
        .map(|perm| {
            let mut roles = vec![Role::Source; s.roles.len()];
            for (old, &new) in perm.iter().enumerate() {
                roles[new] = s.roles[old];
            }
            let mut edges: Vec<_> = s.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
            edges.sort();
            Shape { roles, edges }
        })
        .min()
        .expect("at least one permutation")
}

fn grow(s: &Shape) -> Vec<Shape> {
    let n = s.roles.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && allowed(s.roles[a], s.roles[b]) {
                let mut t = s.clone();
                t.edges.push((a, b));
                out.push(t);
            }
        }
        for r in ROLES {
            for (t_role, h_role, forward) in [(s.roles[a], r, true), (r, s.roles[a], false)] {
                if !allowed(t_role, h_role) {
                    continue;
                }
                let mut t = s.clone();
                t.roles.push(r);
                t.edges.push(if forward { (a, n) } else { (n, a) });
                out.push(t);
            }
        }
    }
    out
}

/// Every connected MS-graph with `1..=max_edges` edges, one per
/// isomorphism class. Vertices are `v0..`, edges `e0..`.
pub fn connected_ms_graphs(max_edges: usize) -> Vec<MsGraph> {
    let mut level: BTreeSet<Shape> = BTreeSet::new();
    for t in ROLES {
        for h in ROLES {
            if allowed(t, h) {
                level.insert(canonical(&Shape { roles: vec![t, h], edges: vec![(0, 1)] }));
            }
        }
    }
    let mut all: Vec<Shape> = level.iter().cloned().collect();
    for _ in 1..max_edges {
        level = level.iter().flat_map(grow).map(|s| canonical(&s)).collect();
        all.extend(level.iter().cloned());
    }
    all.into_iter().map(to_graph).collect()
}

fn to_graph(s: Shape) -> MsGraph {
    MsGraph::new(
        s.roles.iter().enumerate().map(|(i, r)| (format!("v{i}"), *r)),
        s.edges.iter().enumerate().map(|(i, (a, b))| MsEdge::new(&format!("e{i}"), &format!("v{a}"), &format!("v{b}"))).collect(),
    )
    .expect("enumerated graphs satisfy the MS-graph invariants")
}

/// Every framing of `edges` edges with finite values in `lo..=hi` and at
/// most `max_inf` infinite edges.
pub fn framings(edges: usize, lo: i64, hi: i64, max_inf: usize) -> Vec<Framing> {
    let mut out = vec![Vec::new()];
    for _ in 0..edges {
        let mut next = Vec::new();
        for f in &out {
            for v in (lo..=hi).map(FrameValue::Finite).chain([FrameValue::Infinite]) {
                let mut g: Vec<FrameValue> = f.clone();
                g.push(v);
                if g.iter().filter(|x| **x == FrameValue::Infinite).count() <= max_inf {
                    next.push(g);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(Framing).collect()
}
