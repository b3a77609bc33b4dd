//! Reading and writing the text format: a round trip, a syntax error with
//! its location, and a structurally invalid presentation.

use ms3::catalog::builtin;
use ms3::format::parse_flow_unvalidated;
use ms3::{parse_flow, serialize, validate_presentation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = builtin("genus-demo")?;
    let text = serialize(&p);
    print!("{text}");
    assert_eq!(parse_flow(&text)?, p);
    println!("round trip ok");

    let broken = text.replacen("genus", "genus =", 1);
    match parse_flow(&broken) {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("syntax error at {:?}: {e}", e.location()),
    }

    let lonely = "[graph]\nvertex A\nvertex B\nedge x = A -- B orient=free kind=upper-curve\n[surface R]\ngenus 0\nboundary x\n";
    let q = parse_flow_unvalidated(lonely)?;
    print!("{}", validate_presentation(&q));
    Ok(())
}
