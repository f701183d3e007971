//! Build arrows from view-maps, compose them, invert them and factor them.
//!
//! `cargo run --example morphisms`

use std::sync::Arc;

use dbcat::category::{compose, factorize, invert, is_epi, is_iso, is_mono, make_morphism, parse_maps, Morphism};
use dbcat::closure::Bound;
use dbcat::relcore::parse_dbi;

fn describe(label: &str, f: &Morphism) -> dbcat::Result<()> {
    println!(
        "{label}: {} -> {}  flux={}  epi={} mono={} iso={}",
        f.src().name(),
        f.tgt().name(),
        f.flux().len(),
        is_epi(f)?,
        is_mono(f)?,
        is_iso(f)?
    );
    Ok(())
}

fn main() -> dbcat::Result<()> {
    let k = Bound::new(2);
    let a = Arc::new(parse_dbi("A", "domain a b c\nrelation e 2\na b\nb c\n")?);
    let b = Arc::new(parse_dbi("B", "domain a b c\nrelation from 1\na\nb\nrelation to 1\nb\nc\n")?);
    let c = Arc::new(parse_dbi("C", "domain a b c\nrelation mid 1\nb\n")?);

    let f = make_morphism(a.clone(), b.clone(), parse_maps("project[1](e) => from\nproject[2](e) => to\n", &a)?, k)?;
    let g = make_morphism(b.clone(), c.clone(), parse_maps("project[1](join[l1=r1](from, to)) => mid\n", &b)?, k)?;
    print!("{f}");
    describe("f", &f)?;
    describe("g", &g)?;

    let gf = compose(&g, &f)?;
    describe("g.f", &gf)?;

    describe("f^-1", &invert(&f)?)?;

    let fac = factorize(&f)?;
    describe("epi part", &fac.epi)?;
    describe("mono part", &fac.mono)?;
    println!("middle object has {} relations", fac.mid.relations().len());
    Ok(())
}
