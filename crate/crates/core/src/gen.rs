//! Seeded random instances, terms and morphisms for the law suites.
//!
//! Instances have at most four constants, three relations of arity one or
//! two, and four tuples per relation.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::category::{make_morphism, make_viewmap, Morphism};
use crate::closure::Bound;
use crate::error::Result;
use crate::query::{check_term, Cond, JCond, QueryTerm};
use crate::relcore::{DomainConst, Instance, Relation, Tuple, View};

pub const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn constants(n: usize) -> Vec<DomainConst> {
    named(&CONSTANTS[..n])
}

fn named(pool: &[&str]) -> Vec<DomainConst> {
    pool.iter().map(|c| DomainConst::new(c).expect("valid")).collect()
}

/// A random view of the given arity over `domain`, with up to `max_tuples`
/// tuples.
pub fn random_view(rng: &mut impl Rng, arity: usize, domain: &[DomainConst], max_tuples: usize) -> View {
    if domain.is_empty() {
        return View::Bottom;
    }
    let count = rng.gen_range(0..=max_tuples);
    let tuples = (0..count).map(|_| {
        let items = (0..arity).map(|_| domain.choose(rng).expect("nonempty").clone()).collect();
        Tuple::new(items).expect("nonempty tuple")
    });
    crate::relcore::canonicalize_view(arity, tuples).expect("uniform arity")
}

/// A random instance named `name`.
pub fn random_instance(rng: &mut impl Rng, name: &str) -> Instance {
    random_instance_over(rng, name, &CONSTANTS)
}

/// A random instance whose domain is a prefix of `pool` (at most four
/// constants are used).
pub fn random_instance_over(rng: &mut impl Rng, name: &str, pool: &[&str]) -> Instance {
    let n = rng.gen_range(1..=pool.len().min(4));
    let domain = named(&pool[..n]);
    let rel_count = rng.gen_range(0..=3);
    let rels = (0..rel_count)
        .map(|i| {
            let arity = rng.gen_range(1..=2);
            let view = random_view(rng, arity, &domain, 4);
            (
                format!("r{}", i + 1),
                Relation {
                    arity,
                    view,
                    component: 0,
                },
            )
        })
        .collect();
    Instance::new(name, rels, domain.into_iter().collect()).expect("generated instance is valid")
}

/// A random well-formed term over `a` with every subterm of arity at most
/// 2. `None` if `a` has no relations.
pub fn random_term(rng: &mut impl Rng, a: &Instance, depth: usize) -> Option<QueryTerm> {
    let names: Vec<&String> = a.relations().keys().collect();
    if names.is_empty() {
        return None;
    }
    for _ in 0..32 {
        let t = term_rec(rng, a, &names, depth);
        if check_term(&t, a).is_ok() && crate::query::max_subterm_arity(&t, a).is_ok_and(|m| m <= 2) {
            return Some(t);
        }
    }
    Some(QueryTerm::rel(names[0].clone()))
}

fn arity_of(t: &QueryTerm, a: &Instance) -> usize {
    check_term(t, a).unwrap_or(1)
}

fn term_rec(rng: &mut impl Rng, a: &Instance, names: &[&String], depth: usize) -> QueryTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        return QueryTerm::rel(names[rng.gen_range(0..names.len())].clone());
    }
    let child = term_rec(rng, a, names, depth - 1);
    let k = arity_of(&child, a);
    match rng.gen_range(0..4) {
        0 => {
            let cond = if k == 2 && rng.gen_bool(0.3) {
                Cond::Eq(1, 2)
            } else {
                let c = a.domain().iter().collect::<Vec<_>>();
                match c.choose(rng) {
                    Some(c) => Cond::Const(rng.gen_range(1..=k), (*c).clone()),
                    None => return child,
                }
            };
            QueryTerm::select(vec![cond], child)
        }
        1 => {
            let len = rng.gen_range(1..=2);
            let idx = (0..len).map(|_| rng.gen_range(1..=k)).collect();
            QueryTerm::project(idx, child)
        }
        2 => {
            let other = term_rec(rng, a, names, depth - 1);
            if k == 1 && arity_of(&other, a) == 1 {
                let jc = if rng.gen_bool(0.5) {
                    vec![JCond { left: 1, right: 1 }]
                } else {
                    Vec::new()
                };
                QueryTerm::join(jc, child, other)
            } else {
                child
            }
        }
        _ => {
            let other = term_rec(rng, a, names, depth - 1);
            if arity_of(&other, a) == k {
                QueryTerm::union(child, other)
            } else {
                child
            }
        }
    }
}

/// A random morphism out of `a`: a few random view-maps, and a target made
/// of their results plus, sometimes, unrelated relations.
pub fn random_morphism(rng: &mut impl Rng, a: &Arc<Instance>, name: &str, bound: Bound) -> Result<Morphism> {
    let mut terms: Vec<QueryTerm> = Vec::new();
    if rng.gen_bool(0.25) {
        terms.extend(a.relations().keys().map(QueryTerm::rel));
    }
    for _ in 0..rng.gen_range(0..=3) {
        terms.extend(random_term(rng, a, 2));
    }
    let maps = terms
        .into_iter()
        .map(|t| make_viewmap(t, a.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut views: BTreeSet<View> = maps.iter().map(|m| m.result().clone()).filter(|v| !v.is_bottom()).collect();
    let domain = constants(rng.gen_range(1..=4));
    if rng.gen_bool(0.3) {
        let arity = rng.gen_range(1..=2);
        views.insert(random_view(rng, arity, &domain, 3));
    }
    let mut dom: BTreeSet<DomainConst> = a.domain().clone();
    dom.extend(domain);
    let rels = views
        .into_iter()
        .filter(|v| !v.is_bottom())
        .enumerate()
        .map(|(i, v)| {
            (
                format!("s{}", i + 1),
                Relation {
                    arity: v.arity(),
                    view: v,
                    component: 0,
                },
            )
        })
        .collect();
    let b = Instance::new(name, rels, dom)?;
    make_morphism(a.clone(), b, maps, bound)
}

/// `f: A -> B` and `g: B -> C` with random `A`.
pub fn random_pair(rng: &mut impl Rng, bound: Bound) -> Result<(Morphism, Morphism)> {
    let a = Arc::new(random_instance(rng, "A"));
    let f = random_morphism(rng, &a, "B", bound)?;
    let g = random_morphism(rng, f.tgt(), "C", bound)?;
    Ok((f, g))
}

/// A second instance that is sometimes equivalent to `a`: either a random
/// instance, or `a`'s relations recombined by random terms.
pub fn random_partner(rng: &mut impl Rng, a: &Instance, name: &str) -> Instance {
    if a.relations().is_empty() || rng.gen_bool(0.4) {
        return random_instance(rng, name);
    }
    let mut views: BTreeSet<View> = a.relations().values().map(|r| r.view.clone()).collect();
    if rng.gen_bool(0.5) {
        // drop one relation, which may or may not shrink the closure
        let drop = views.iter().nth(rng.gen_range(0..views.len())).cloned();
        views.retain(|v| Some(v) != drop.as_ref());
    }
    for _ in 0..rng.gen_range(0..=2) {
        if let Some(t) = random_term(rng, a, 2) {
            views.insert(crate::query::eval(&t, a).expect("checked term"));
        }
    }
    let rels = views
        .into_iter()
        .filter(|v| !v.is_bottom())
        .enumerate()
        .map(|(i, v)| {
            (
                format!("t{}", i + 1),
                Relation {
                    arity: v.arity(),
                    view: v,
                    component: 0,
                },
            )
        })
        .collect();
    Instance::new(name, rels, a.domain().clone()).expect("views over the same domain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_data_respects_limits() {
        let mut r = rng(7);
        for _ in 0..200 {
            let a = random_instance(&mut r, "A");
            assert!(a.domain().len() <= 4 && a.relations().len() <= 3);
            for rel in a.relations().values() {
                assert!(rel.arity <= 2 && rel.view.len() <= 4);
            }
            if let Some(t) = random_term(&mut r, &a, 2) {
                assert!(crate::query::max_subterm_arity(&t, &a).unwrap() <= 2);
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_instance(&mut rng(3), "A");
        let b = random_instance(&mut rng(3), "A");
        assert_eq!(a, b);
        let (f, _) = random_pair(&mut rng(11), Bound::new(2)).unwrap();
        let (g, _) = random_pair(&mut rng(11), Bound::new(2)).unwrap();
        assert_eq!(f.to_string(), g.to_string());
    }
}
