//! The information order between databases: equivalence, match and merge.
//!
//! `cargo run --example lattice`

use dbcat::closure::{equiv, leq, match_op, merge_op, Bound};
use dbcat::Instance;
use dbcat::View;

fn main() -> dbcat::Result<()> {
    let k = Bound::new(2);
    let a = Instance::of("A", &["a", "b"], &[("r", View::of(1, &[&["a"]]))]);
    let b = Instance::of("B", &["a", "b"], &[("s", View::of(1, &[&["b"]]))]);
    let pair = Instance::of("P", &["a", "b"], &[("p", View::of(2, &[&["a", "b"]]))]);

    println!("A <= B: {}  B <= A: {}", leq(&a, &b, k)?, leq(&b, &a, k)?);
    println!("A <= P: {}", leq(&a, &pair, k)?);
    println!("A == P: {}", equiv(&a, &pair, k)?);

    let meet = match_op(&a, &b, k)?;
    let join = merge_op(&a, &b, k)?;
    println!("match(A, B): {} views", meet.len());
    print!("{}", meet.report());
    println!("merge(A, B): {} views", join.len());
    Ok(())
}
