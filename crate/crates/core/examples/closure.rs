//! Saturate a small database and look up how each view is obtained.
//!
//! `cargo run --example closure`

use dbcat::closure::{closure, member, Bound};
use dbcat::relcore::parse_dbi;
use dbcat::View;

fn main() -> dbcat::Result<()> {
    let a = parse_dbi("A", "domain a b\nrelation r 1\na\nb\nrelation e 2\na b\n")?;
    let t = closure(&a, Bound::new(2))?;
    println!("{} views over {{a, b}} at arity 2", t.len());

    for v in t.views().iter().take(6) {
        println!("  {v:<24} <- {}", t.witness(v).expect("every view has a witness"));
    }

    let diag = View::of(2, &[&["a", "a"], &["b", "b"]]);
    let (found, how) = member(&t, &diag);
    println!("diagonal reachable: {found} via {}", how.map(|w| w.to_string()).unwrap_or_default());
    Ok(())
}
