//! Cyclic words: rotation, inversion and the canonical form used to compare
//! boundary curves.

use ms3::words::least_rotation;
use ms3::{canonical_form, invert, rotate_equal, CyclicWord};

fn main() {
    let w = CyclicWord::from_notation("b a^-1 c a");
    println!("word            {w}");
    println!("least rotation  {}", least_rotation(&w));
    println!("inverse         {}", invert(&w));
    println!("canonical       {}", canonical_form(&w));

    let r = w.rotated(2);
    println!("{r} is a rotation of {w}: {}", rotate_equal(&w, &r));
    println!("{} is a rotation of {w}: {}", invert(&w), rotate_equal(&w, &invert(&w)));
    println!("same canonical form: {}", canonical_form(&w) == canonical_form(&invert(&r)));
}
