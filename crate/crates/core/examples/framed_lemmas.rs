//! Framed MS-graphs: classification of components, the two elementary moves,
//! and the lemma-based decision cross-checked against brute-force search.

use ms3::framed::{apply_operation, normalize_type1, Move};
use ms3::{classify, framings_equivalent, oracle_equivalent, Framing, MsGraph, Role};

fn show(f: &Framing) -> String {
    let v: Vec<String> = f.values().iter().map(|x| x.to_string()).collect();
    format!("[{}]", v.join(", "))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // source -> saddle <- source, saddle -> sink
    let star = MsGraph::build(
        &[("s1", Role::Source), ("s2", Role::Source), ("x", Role::Saddle), ("t", Role::Sink)],
        &[("e1", "s1", "x"), ("e2", "s2", "x"), ("e3", "x", "t")],
    )?;
    for c in classify(&star) {
        println!("component of type {} with {} edges", c.kind.number(), c.edges.len());
    }

    let f = Framing::finite(&[1, 2, 0]);
    let g = apply_operation(&star, &f, &Move::Opposed { raised: "e1".into(), lowered: "e2".into(), k: 5 })?;
    let h = apply_operation(&star, &g, &Move::Joint { first: "e2".into(), second: "e3".into(), k: -1 })?;
    println!("{} -> {} -> {}", show(&f), show(&g), show(&h));
    for other in [&h, &Framing::finite(&[0, 2, 0])] {
        println!(
            "{} ~ {}: lemmas {}, oracle {}",
            show(&f),
            show(other),
            framings_equivalent(&star, &f, other)?,
            oracle_equivalent(&star, &f, other, 8)?
        );
    }

    // Without saddles every framing reduces to one value on a chosen edge.
    let path = MsGraph::build(&[("a", Role::Source), ("b", Role::Sink), ("c", Role::Source)], &[("p", "a", "b"), ("q", "c", "b")])?;
    let (normal, moves) = normalize_type1(&path, &Framing::finite(&[3, -7]), "q")?;
    println!("normal form {} after {} moves", show(&normal), moves.len());
    Ok(())
}
