//! Tau data: the numbers deciding whether a homeomorphism of round-handle
//! boundary tori extends over the solid tori.
//!
//! * case 1, for a round 0-handle and round 2-handle meeting on a genus-one
//!   stratum: an `(alpha, beta)` pair;
//! * case 2, per torus: the meridian `(alpha, beta)` pair and the `(k, l)`
//!   pair of the curve omega, plus the framed ring graph whose vertices are
//!   handles and whose edges are the ring domains between them;
//! * case 3, per torus: the intersection number `alpha` of each listed cycle
//!   with the chosen cycle.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::equivalence::Isomorphism;
use crate::framed::{framings_equivalent, Framing, MsEdge, MsGraph};
use crate::words::{oriented_canonical_form, CyclicWord, Power};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Case1Record {
    pub handle0: String,
    pub handle2: String,
    pub alpha: i64,
    pub beta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusRecord {
    pub meridian: (i64, i64),
    pub omega: Option<(i64, i64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Case2Data {
    /// Round handle id -> torus record.
    pub tori: BTreeMap<String, TorusRecord>,
    /// Vertices are handle ids, edges are region ids of ring domains.
    pub ring_graph: MsGraph,
    /// The framing mu of `ring_graph`.
    pub framing: Framing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case3Record {
    pub cycle: CyclicWord,
    pub alpha: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TauInvariant {
    pub case1: Vec<Case1Record>,
    pub case2: Case2Data,
    /// Round handle id -> cycle records.
    pub case3: BTreeMap<String, Vec<Case3Record>>,
}

impl TauInvariant {
    pub fn is_empty(&self) -> bool {
        self.case1.is_empty() && self.case2.tori.is_empty() && self.case2.ring_graph.is_empty() && self.case3.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TauError {
    #[error("isomorphism does not cover handle `{0}`")]
    UncoveredHandle(String),
    #[error("isomorphism does not cover region `{0}`")]
    UncoveredRegion(String),
    #[error("isomorphism does not cover edge `{0}`")]
    UncoveredEdge(String),
    #[error("ring graph cannot be transported: {0}")]
    RingGraph(String),
}

fn handle<'a>(iso: &'a Isomorphism, id: &str) -> Result<&'a String, TauError> {
    iso.handle_map.get(id).ok_or_else(|| TauError::UncoveredHandle(id.to_string()))
}

/// Transports case-1 records to the target's handle names.
fn translated_case1(t: &TauInvariant, iso: &Isomorphism) -> Result<Vec<Case1Record>, TauError> {
    let mut out = t
        .case1
        .iter()
        .map(|r| {
            Ok(Case1Record {
                handle0: handle(iso, &r.handle0)?.clone(),
                handle2: handle(iso, &r.handle2)?.clone(),
                alpha: r.alpha,
                beta: r.beta,
            })
        })
        .collect::<Result<Vec<_>, TauError>>()?;
    out.sort();
    Ok(out)
}

/// Ring graph of `t` with vertices and edges renamed through `iso`, with its
/// framing reindexed to the edge order of `target`.
fn transported_ring(t: &Case2Data, iso: &Isomorphism, target: &MsGraph) -> Result<Option<Framing>, TauError> {
    let vertices = t
        .ring_graph
        .vertices()
        .iter()
        .map(|(v, r)| Ok((handle(iso, v)?.clone(), *r)))
        .collect::<Result<BTreeMap<_, _>, TauError>>()?;
    if &vertices != target.vertices() {
        return Ok(None);
    }
    let mut values = Vec::with_capacity(target.edges().len());
    let mut edges = Vec::new();
    for (e, mu) in t.ring_graph.edges().iter().zip(t.framing.values()) {
        let id = iso.region_map.get(&e.id).ok_or_else(|| TauError::UncoveredRegion(e.id.clone()))?;
        edges.push(MsEdge { id: id.clone(), tail: handle(iso, &e.tail)?.clone(), head: handle(iso, &e.head)?.clone() });
        values.push((id.clone(), *mu));
    }
    let mut lhs = edges.clone();
    let mut rhs = target.edges().to_vec();
    lhs.sort();
    rhs.sort();
    if lhs != rhs {
        return Ok(None);
    }
    target.framing_from(values).map(Some).map_err(|e| TauError::RingGraph(e.to_string()))
}

/// `(canonical cycle, alpha)` with alpha negated when the canonical form
/// reads the cycle backwards. Self-inverse cycles keep `|alpha|`.
fn oriented_case3(records: &[Case3Record]) -> Vec<(CyclicWord, i64)> {
    let mut out: Vec<_> = records
        .iter()
        .map(|r| {
            let (canon, dir) = oriented_canonical_form(&r.cycle);
            let inverse_canon = oriented_canonical_form(&crate::words::invert(&r.cycle)).0;
            let alpha = if canon == inverse_canon {
                r.alpha.abs()
            } else if dir == Power::Neg {
                -r.alpha
            } else {
                r.alpha
            };
            (canon, alpha)
        })
        .collect();
    out.sort();
    out
}

/// True iff `iso` carries the tau data of `t1` onto that of `t2`: case-1 and
/// case-2 torus numbers agree exactly, the transported ring framing is
/// equivalent to the target's, and case-3 numbers agree per translated cycle.
pub fn tau_equivalent(t1: &TauInvariant, t2: &TauInvariant, iso: &Isomorphism) -> Result<bool, TauError> {
    let mut target_case1 = t2.case1.clone();
    target_case1.sort();
    if translated_case1(t1, iso)? != target_case1 {
        return Ok(false);
    }

    let mut tori = BTreeMap::new();
    for (h, rec) in &t1.case2.tori {
        tori.insert(handle(iso, h)?.clone(), rec.clone());
    }
    if tori != t2.case2.tori {
        return Ok(false);
    }

    let Some(mu) = transported_ring(&t1.case2, iso, &t2.case2.ring_graph)? else {
        return Ok(false);
    };
    match framings_equivalent(&t2.case2.ring_graph, &mu, &t2.case2.framing) {
        Ok(true) => {}
        Ok(false) => return Ok(false),
        Err(e) => return Err(TauError::RingGraph(e.to_string())),
    }

    // The β numbers are not needed for case 3; only α per cycle is compared.
    let mut case3 = BTreeMap::new();
    for (h, records) in &t1.case3 {
        let translated = records
            .iter()
            .map(|r| {
                let cycle = r.cycle.try_map(|l| iso.translate_letter(l)).ok_or_else(|| {
                    let missing = r.cycle.labels().find(|l| !iso.edge_map.contains_key(*l)).unwrap_or_default();
                    TauError::UncoveredEdge(missing.to_string())
                })?;
                Ok(Case3Record { cycle, alpha: r.alpha })
            })
            .collect::<Result<Vec<_>, TauError>>()?;
        case3.insert(handle(iso, h)?.clone(), oriented_case3(&translated));
    }
    let target3: BTreeMap<_, _> = t2.case3.iter().map(|(h, r)| (h.clone(), oriented_case3(r))).collect();
    Ok(case3 == target3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn trivial_flow_tau_is_self_equivalent() {
        let p = catalog::trivial_orbit_flow(1, 1).unwrap();
        let iso = Isomorphism::identity(&p);
        assert!(tau_equivalent(&p.tau, &p.tau, &iso).unwrap());
    }

    #[test]
    fn case1_sign_matters() {
        let p = catalog::trivial_orbit_flow(1, 1).unwrap();
        let iso = Isomorphism::identity(&p);
        let rec = |alpha| TauInvariant {
            case1: vec![Case1Record { handle0: "T0".into(), handle2: "T2".into(), alpha, beta: 0 }],
            ..Default::default()
        };
        assert!(!tau_equivalent(&rec(1), &rec(-1), &iso).unwrap());
        assert!(tau_equivalent(&rec(1), &rec(1), &iso).unwrap());
    }

    #[test]
    fn twisted_omega_pairs_differ() {
        let p1 = catalog::twisted_orbit_flow(1).unwrap();
        let p2 = catalog::twisted_orbit_flow(2).unwrap();
        let iso = Isomorphism::identity(&p1);
        assert_eq!(p1.tau.case2.tori["0-handle"].omega, Some((1, 3)));
        assert_eq!(p2.tau.case2.tori["0-handle"].omega, Some((1, 5)));
        assert!(!tau_equivalent(&p1.tau, &p2.tau, &iso).unwrap());
    }

    #[test]
    fn ring_framing_compared_up_to_equivalence() {
        let p = catalog::twisted_orbit_flow_with_parity(2, 0).unwrap();
        let mut q = p.clone();
        // Triangle ring graph: only the total mod 2 matters.
        q.tau.case2.framing = Framing::finite(&[5, -3, 2]);
        let iso = Isomorphism::identity(&p);
        assert!(tau_equivalent(&p.tau, &q.tau, &iso).unwrap());
        let odd = catalog::twisted_orbit_flow_with_parity(2, 1).unwrap();
        assert!(!tau_equivalent(&p.tau, &odd.tau, &iso).unwrap());
    }

    #[test]
    fn case3_alpha_follows_cycle_orientation() {
        let p = catalog::builtin("tau-case3-demo").unwrap();
        let iso = Isomorphism::identity(&p);
        let mut q = p.clone();
        for records in q.tau.case3.values_mut() {
            for r in records.iter_mut() {
                r.cycle = crate::words::invert(&r.cycle);
                r.alpha = -r.alpha;
            }
        }
        assert!(tau_equivalent(&p.tau, &q.tau, &iso).unwrap());
        let mut wrong = p.clone();
        wrong.tau.case3.values_mut().next().unwrap()[0].alpha += 1;
        assert!(!tau_equivalent(&p.tau, &wrong.tau, &iso).unwrap());
    }

    #[test]
    fn uncovered_handle_is_an_error() {
        let p = catalog::trivial_orbit_flow(1, 1).unwrap();
        let mut iso = Isomorphism::identity(&p);
        iso.handle_map.remove("T2");
        assert_eq!(tau_equivalent(&p.tau, &p.tau, &iso), Err(TauError::UncoveredHandle("T2".into())));
    }
}
