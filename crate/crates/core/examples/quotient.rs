//! Enumerate terms up to a depth and group them by the view they compute.
//!
//! `cargo run --example quotient`

use dbcat::closure::{quotient_term_algebra, Bound};
use dbcat::Instance;
use dbcat::View;

fn main() -> dbcat::Result<()> {
    let a = Instance::of("A", &["a", "b"], &[("r", View::of(1, &[&["a"], &["b"]]))]);
    let classes = quotient_term_algebra(&a, 2, Bound::new(1))?;
    println!("{} classes", classes.len());
    for (view, terms) in &classes {
        let shown: Vec<String> = terms.iter().take(3).map(|t| t.to_string()).collect();
        let more = if terms.len() > 3 { format!(" and {} more", terms.len() - 3) } else { String::new() };
        println!("  {view}: {}{more}", shown.join(", "));
    }
    Ok(())
}
