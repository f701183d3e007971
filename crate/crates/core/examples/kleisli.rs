//! Monad and Kleisli laws for the closure, on one database and on a
//! computation arrow out of it.
//!
//! `cargo run --example kleisli`

use std::sync::Arc;

use dbcat::category::{compose, eta, make_morphism, parse_maps};
use dbcat::closure::Bound;
use dbcat::kleisli::{check_computation_arrow, check_kleisli_laws, check_monad_laws, kleisli_identity, theta};
use dbcat::relcore::parse_dbi;

fn main() -> dbcat::Result<()> {
    let k = Bound::new(2);
    let a = Arc::new(parse_dbi("A", "domain a b\nrelation r 1\na\nrelation e 2\na b\nb b\n")?);
    for law in check_monad_laws(&a, k)? {
        println!("{law}");
    }

    let b = Arc::new(parse_dbi("B", "domain a b\nrelation loops 1\nb\n")?);
    let f = make_morphism(a.clone(), b.clone(), parse_maps("project[1](select[1=2](e)) => loops\n", &a)?, k)?;
    for law in check_computation_arrow(&f)? {
        println!("{law}");
    }

    // f as a program into the closure of B
    let (unit, _) = eta(b.clone(), k)?;
    let program = theta(&compose(&unit, &f)?, b.clone())?;
    for law in check_kleisli_laws(&program, &kleisli_identity(b, k)?)? {
        println!("{law}");
    }
    Ok(())
}
