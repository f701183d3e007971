//! Answer a query over the source using only what a mapping exposes.
//!
//! `cargo run --example rewrite`

use std::sync::Arc;

use dbcat::category::{make_morphism, parse_maps};
use dbcat::closure::Bound;
use dbcat::query::parse_term;
use dbcat::relcore::parse_dbi;
use dbcat::rewrite::{rewritable, rewrite};

fn main() -> dbcat::Result<()> {
    let k = Bound::new(2);
    let src = Arc::new(parse_dbi("S", "domain ann bob cat\nrelation parent 2\nann bob\nbob cat\n")?);
    let view = Arc::new(parse_dbi("V", "domain ann bob cat\nrelation kids 1\nbob\ncat\n")?);
    let f = make_morphism(src.clone(), view, parse_maps("project[2](parent) => kids\n", &src)?, k)?;

    for q in ["select[1=cat](project[2](parent))", "project[1](parent)"] {
        let q = parse_term(q)?;
        if rewritable(&f, &q)? {
            let r = rewrite(&f, &q)?;
            println!("{q}  ==>  {}", r.rewritten);
        } else {
            println!("{q}  cannot be answered through V");
        }
    }
    Ok(())
}
