//! The four flows on S^2 x S^1 built from a trivial neighbourhood of a
//! periodic orbit, indexed by two orientation signs. Each is equivalent only
//! to itself.

use ms3::catalog::trivial_orbit_flow;
use ms3::{explain_equivalence, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let flows: Vec<_> = signs.iter().map(|&(a, b)| trivial_orbit_flow(a, b)).collect::<Result<_, _>>()?;

    for (i, p) in flows.iter().enumerate() {
        for (j, q) in flows.iter().enumerate().skip(i) {
            let verdict = match explain_equivalence(p, q)? {
                Verdict::Equivalent(_) => "equivalent".to_string(),
                Verdict::Inequivalent(m) => format!("not equivalent ({m})"),
            };
            println!("{:?} vs {:?}: {verdict}", signs[i], signs[j]);
        }
    }
    Ok(())
}
