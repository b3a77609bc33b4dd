//! Flows whose periodic orbit has a twisted neighbourhood. The number of
//! twists n shows up in the attaching data of the round handle, so
//! different n give different flows, while relabelling leaves the class fixed.

use ms3::catalog::{twisted_orbit_flow, twisted_orbit_flow_with_parity};
use ms3::{find_equivalence, serialize};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flows: Vec<_> = (0..4).map(twisted_orbit_flow).collect::<Result<_, _>>()?;
    println!("{}", serialize(&flows[1]));

    for (n, p) in flows.iter().enumerate() {
        let row: Vec<&str> = flows.iter().map(|q| if find_equivalence(p, q).unwrap().is_some() { "=" } else { "." }).collect();
        println!("n = {n}: {}", row.join(" "));
    }

    // The ring graph framing parity is part of the invariant as well.
    let even = twisted_orbit_flow_with_parity(2, 0)?;
    let odd = twisted_orbit_flow_with_parity(2, 1)?;
    println!("parity 0 vs parity 1: equivalent = {}", find_equivalence(&even, &odd)?.is_some());
    Ok(())
}
