//! Random acyclic equation systems, checked against a direct tuple-set
//! evaluator.

use std::collections::{BTreeMap, BTreeSet};

use dbcat::closure::{closure, Bound};
use dbcat::equations::{as_query, check_guarded, parse_system, solve, EquationSystem, Rhs};
use dbcat::gen::{random_instance, rng};
use dbcat::query::eval;
use dbcat::{Cond, Instance, JCond, QueryTerm, View};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

type Rows = BTreeSet<Vec<String>>;

/// A system over `a` whose variables all have arity at most 2. Base
/// variables come first; each later variable uses earlier ones.
fn random_system(r: &mut impl Rng, a: &Instance) -> Option<EquationSystem> {
    let rels: Vec<(&String, usize)> = a.relations().iter().map(|(n, rel)| (n, rel.arity)).collect();
    if rels.is_empty() {
        return None;
    }
    let mut vars: Vec<(String, usize)> = Vec::new();
    let mut eqs = Vec::new();
    for (i, (name, arity)) in rels.iter().enumerate() {
        let v = format!("B{}", i + 1);
        eqs.push((v.clone(), Rhs::Base(name.to_string())));
        vars.push((v, *arity));
    }
    let consts: Vec<_> = a.domain().iter().cloned().collect();
    for i in 0..r.gen_range(1..=6) {
        let (x, kx) = vars.choose(r).unwrap().clone();
        let (y, ky) = vars.choose(r).unwrap().clone();
        let rx = QueryTerm::rel(x);
        let (term, arity) = match r.gen_range(0..4) {
            0 => {
                let c = if kx == 2 && r.gen_bool(0.3) {
                    Cond::Eq(1, 2)
                } else {
                    Cond::Const(r.gen_range(1..=kx), consts.choose(r).unwrap().clone())
                };
                (QueryTerm::select(vec![c], rx), kx)
            }
            1 => {
                let idx: Vec<usize> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(1..=kx)).collect();
                let n = idx.len();
                (QueryTerm::project(idx, rx), n)
            }
            2 if kx == 1 && ky == 1 => {
                let jc = if r.gen_bool(0.5) { vec![JCond { left: 1, right: 1 }] } else { vec![] };
                (QueryTerm::join(jc, rx, QueryTerm::rel(y)), 2)
            }
            _ if kx == ky => (QueryTerm::union(rx, QueryTerm::rel(y)), kx),
            _ => (QueryTerm::project(vec![1], rx), 1),
        };
        let v = format!("X{}", i + 1);
        eqs.push((v.clone(), Rhs::Op(term)));
        vars.push((v, arity));
    }
    Some(EquationSystem::new(eqs).unwrap())
}

fn rows(v: &View) -> Rows {
    v.tuples()
        .iter()
        .map(|t| t.items().iter().map(|c| c.as_str().to_string()).collect())
        .collect()
}

/// Evaluates `var` straight from the definitions, without the query
/// evaluator.
fn direct(sys: &EquationSystem, a: &Instance, var: &str, memo: &mut BTreeMap<String, Rows>) -> Rows {
    if let Some(r) = memo.get(var) {
        return r.clone();
    }
    let leaf = |t: &QueryTerm| match t {
        QueryTerm::Rel(n) => n.clone(),
        _ => unreachable!(),
    };
    let out = match sys.rhs(var).unwrap() {
        Rhs::Base(n) => rows(&a.relation(n).unwrap().view),
        Rhs::Op(t) => match t {
            QueryTerm::Select(conds, c) => direct(sys, a, &leaf(c), memo)
                .into_iter()
                .filter(|row| {
                    conds.iter().all(|c| match c {
                        Cond::Const(i, k) => row[i - 1] == k.as_str(),
                        Cond::Eq(i, j) => row[i - 1] == row[j - 1],
                    })
                })
                .collect(),
            QueryTerm::Project(idx, c) => direct(sys, a, &leaf(c), memo)
                .into_iter()
                .map(|row| idx.iter().map(|i| row[i - 1].clone()).collect())
                .collect(),
            QueryTerm::Join(jc, l, r) => {
                let (ls, rs) = (direct(sys, a, &leaf(l), memo), direct(sys, a, &leaf(r), memo));
                let mut out = Rows::new();
                for x in &ls {
                    for y in &rs {
                        if jc.iter().all(|j| x[j.left - 1] == y[j.right - 1]) {
                            out.insert(x.iter().chain(y).cloned().collect());
                        }
                    }
                }
                out
            }
            QueryTerm::Union(l, r) => {
                let mut out = direct(sys, a, &leaf(l), memo);
                out.extend(direct(sys, a, &leaf(r), memo));
                out
            }
            _ => unreachable!(),
        },
    };
    memo.insert(var.to_string(), out.clone());
    out
}

fn setup(seed: u64) -> Option<(Instance, EquationSystem, impl Rng)> {
    let mut r = rng(seed);
    let a = random_instance(&mut r, "A");
    let sys = random_system(&mut r, &a)?;
    Some((a, sys, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn solutions_match_direct_evaluation(seed in any::<u64>()) {
        let Some((a, sys, _)) = setup(seed) else { return Ok(()) };
        let sol = solve(&sys, &a).unwrap();
        let mut memo = BTreeMap::new();
        for v in sys.vars() {
            prop_assert_eq!(rows(&sol.assignment[v]), direct(&sys, &a, v, &mut memo), "{}", v);
        }
    }

    #[test]
    fn flattening_agrees_with_solving(seed in any::<u64>()) {
        let Some((a, sys, _)) = setup(seed) else { return Ok(()) };
        let sol = solve(&sys, &a).unwrap();
        for v in sys.vars() {
            let q = as_query(&sys, v).unwrap();
            prop_assert_eq!(&eval(&q, &a).unwrap(), &sol.assignment[v]);
        }
    }

    #[test]
    fn order_of_equations_is_irrelevant(seed in any::<u64>()) {
        let Some((a, sys, mut r)) = setup(seed) else { return Ok(()) };
        let mut perm: Vec<usize> = (0..sys.len()).collect();
        perm.shuffle(&mut r);
        let shuffled = sys.permuted(&perm);
        prop_assert_eq!(solve(&sys, &a).unwrap(), solve(&shuffled, &a).unwrap());
        let order = check_guarded(&shuffled, &a).unwrap();
        prop_assert_eq!(order.len(), sys.len());
    }

    #[test]
    fn solutions_lie_in_the_closure(seed in any::<u64>()) {
        let Some((a, sys, _)) = setup(seed) else { return Ok(()) };
        let sol = solve(&sys, &a).unwrap();
        let ta = closure(&a, Bound::new(2)).unwrap();
        for v in sol.assignment.values() {
            prop_assert!(ta.contains(v));
        }
    }

    #[test]
    fn printed_systems_parse_back(seed in any::<u64>()) {
        let Some((_, sys, _)) = setup(seed) else { return Ok(()) };
        prop_assert_eq!(parse_system(&sys.to_string()).unwrap(), sys);
    }
}

#[test]
fn cycles_are_reported() {
    let sys = parse_system("X := union(Y, Z)\nY := project[1](X)\nZ := rel r\n").unwrap();
    let a = Instance::of("A", &["a"], &[("r", View::of(1, &[&["a"]]))]);
    let err = solve(&sys, &a).unwrap_err();
    assert_eq!(err.code(), "CyclicSystem");
    assert!(as_query(&sys, "X").is_err());
}
