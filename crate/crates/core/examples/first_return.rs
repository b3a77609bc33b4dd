//! The first-return map of the local model near a periodic orbit, from the
//! incoming tori rho = 1, 3 to the outgoing annuli |z| = 1.

use ms3::local::{first_return_in, NeighbourhoodKind};
use ms3::{first_return, TorusPoint};

fn main() {
    let points = [
        TorusPoint::new(1.0, 0.0, 0.5),
        TorusPoint::new(3.0, 1.0, -0.25),
        TorusPoint::new(3.0, 0.0, 1e-3),
        TorusPoint::new(2.0, 0.0, 0.5),
    ];
    for p in points {
        match first_return(p) {
            Ok(q) => {
                let twisted = first_return_in(NeighbourhoodKind::Twisted, p).unwrap();
                println!(
                    "{p:?} -> rho {:.6} alpha {:.6} z {} (twisted: alpha {:.6} z {})",
                    q.rho,
                    q.alpha_mod_2pi(),
                    q.z,
                    twisted.alpha_mod_2pi(),
                    twisted.z
                );
            }
            Err(e) => println!("{p:?}: {e}"),
        }
    }
}
