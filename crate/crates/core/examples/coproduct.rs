//! Disjoint sums keep their parts apart; the merge iteration reaches the
//! closure in one step.
//!
//! `cargo run --example coproduct`

use dbcat::closure::{closure, coproduct, merge_fixpoint_iterate, Bound};
use dbcat::Instance;
use dbcat::View;

fn main() -> dbcat::Result<()> {
    let k = Bound::new(2);
    let a = Instance::of("A", &["a"], &[("r", View::of(1, &[&["a"]]))]);
    let b = Instance::of("B", &["b"], &[("s", View::of(1, &[&["b"]]))]);
    let sum = coproduct(&a, &b);
    let (ta, tb, ts) = (closure(&a, k)?, closure(&b, k)?, closure(&sum, k)?);
    println!("|TA| = {}, |TB| = {}, |T(A+B)| = {}", ta.len(), tb.len(), ts.len());
    println!("T(A+B) = TA u TB: {}", ts.views().iter().all(|v| ta.contains(v) || tb.contains(v)));

    let chain = merge_fixpoint_iterate(&sum, k)?;
    let sizes: Vec<usize> = chain.iter().map(|s| s.len()).collect();
    println!("merge iteration sizes: {sizes:?}");
    Ok(())
}
