//! Hide a flow behind a random relabelling, then recover an explicit
//! equivalence with the search and verify it independently.

use rand::SeedableRng;

use ms3::catalog::builtin;
use ms3::relabel::{random_relabeling, relabel};
use ms3::{check_isomorphism, find_equivalence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for name in ["tau-case3-demo", "type2-L", "theta-sphere"] {
        let p = builtin(name)?;
        let q = relabel(&p, &random_relabeling(&p, &mut rng))?;
        let iso = find_equivalence(&p, &q)?.expect("a relabelling is an equivalence");
        println!("{name}: found, verified = {}", check_isomorphism(&p, &q, &iso));
        print!("{iso}");
    }
    Ok(())
}
