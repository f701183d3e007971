//! A guarded system that computes a conjunctive query in single steps.
//!
//! `cargo run --example equations`

use dbcat::equations::{as_query, check_guarded, parse_system, solve};
use dbcat::relcore::parse_dbi;

const DB: &str = "\
domain a b k m n p q
relation rP 4
k a m p
k b n p
relation rQ 5
b q p k k
";

// R(x, y) <- P(a, x, z), Q(b, y, z), with P and Q read off rP and rQ
const SYSTEM: &str = "\
X1 := project[2,5](X2)
X2 := join[l3=r3](X3, X4)
X3 := select[1=a](X5)
X4 := select[1=b](X6)
X5 := project[2,3,4](X7)
X6 := project[1,2,3](X8)
X7 := rel rP
X8 := rel rQ
";

fn main() -> dbcat::Result<()> {
    let a = parse_dbi("A", DB)?;
    let sys = parse_system(SYSTEM)?;
    println!("order: {}", check_guarded(&sys, &a)?.join(" "));
    let sol = solve(&sys, &a)?;
    for v in sys.vars() {
        println!("{}", sol.report(v).expect("solved"));
    }
    println!("X1 as one query: {}", as_query(&sys, "X1")?);
    Ok(())
}
