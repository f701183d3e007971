//! Guarded equation systems: each variable is defined by one operator over
//! other variables, or by a base relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::query::{self, parse_term, QueryTerm};
use crate::relcore::{Instance, Relation, View};

/// Right-hand side of an equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    /// `rel <name>`: a relation of the instance.
    Base(String),
    /// One operator whose arguments are variables.
    Op(QueryTerm),
}

impl Rhs {
    /// Variables the right-hand side refers to, in argument order.
    pub fn args(&self) -> Vec<String> {
        match self {
            Rhs::Base(_) => Vec::new(),
            Rhs::Op(t) => match t {
                QueryTerm::Select(_, c) | QueryTerm::Project(_, c) => vec![leaf(c)],
                QueryTerm::Join(_, l, r) | QueryTerm::Union(l, r) => vec![leaf(l), leaf(r)],
                QueryTerm::Rel(_) | QueryTerm::Bottom => unreachable!("rejected by the parser"),
            },
        }
    }
}

fn leaf(t: &QueryTerm) -> String {
    match t {
        QueryTerm::Rel(n) => n.clone(),
        _ => unreachable!("rejected by the parser"),
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Base(n) => write!(f, "rel {n}"),
            Rhs::Op(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquationSystem {
    equations: Vec<(String, Rhs)>,
}

impl EquationSystem {
    /// Variables in declaration order.
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.equations.iter().map(|(v, _)| v.as_str())
    }

    pub fn equations(&self) -> &[(String, Rhs)] {
        &self.equations
    }

    pub fn rhs(&self, var: &str) -> Option<&Rhs> {
        self.equations.iter().find(|(v, _)| v == var).map(|(_, r)| r)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Builds a system from equations, checking that each variable is
    /// defined once and every argument is defined.
    pub fn new(equations: Vec<(String, Rhs)>) -> Result<EquationSystem> {
        let mut defined = BTreeSet::new();
        for (v, _) in &equations {
            if !defined.insert(v.clone()) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        for (_, rhs) in &equations {
            if let Some(a) = rhs.args().into_iter().find(|a| !defined.contains(a)) {
                return Err(Error::UndeclaredVariable(a));
            }
        }
        Ok(EquationSystem { equations })
    }

    /// The same system with its equations in another order.
    pub fn permuted(&self, order: &[usize]) -> EquationSystem {
        EquationSystem {
            equations: order.iter().map(|&i| self.equations[i].clone()).collect(),
        }
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, rhs) in &self.equations {
            writeln!(f, "{v} := {rhs}")?;
        }
        Ok(())
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
}

/// Parses the `.eq` format: `X := rel r`, or `X := op(...)` with variable
/// arguments; `#` starts a comment.
pub fn parse_system(text: &str) -> Result<EquationSystem> {
    let mut equations = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(at) = body.find(":=") else {
            return Err(Error::syntax(line_no, 1, "expected `<var> := <rhs>`"));
        };
        let var = body[..at].trim();
        if !is_name(var) {
            return Err(Error::syntax(line_no, 1, format!("bad variable name {var:?}")));
        }
        let rhs_text = &body[at + 2..];
        let rhs_col = at + 3 + (rhs_text.len() - rhs_text.trim_start().len());
        let rhs_text = rhs_text.trim();
        let rhs = if let Some(name) = rhs_text.strip_prefix("rel ") {
            let name = name.trim();
            if !is_name(name) {
                return Err(Error::syntax(line_no, rhs_col + 4, format!("bad relation name {name:?}")));
            }
            Rhs::Base(name.to_string())
        } else {
            let term = parse_term(rhs_text).map_err(|e| match e {
                Error::Syntax { column, message, .. } => Error::syntax(line_no, rhs_col + column - 1, message),
                other => other,
            })?;
            guarded(var, term, line_no, rhs_col)?
        };
        equations.push((var.to_string(), rhs));
    }
    EquationSystem::new(equations)
}

fn guarded(var: &str, term: QueryTerm, line: usize, col: usize) -> Result<Rhs> {
    let flat = |t: &QueryTerm| matches!(t, QueryTerm::Rel(_));
    let ok = match &term {
        QueryTerm::Rel(_) => return Err(Error::BareVariableRhs(var.to_string())),
        QueryTerm::Bottom => false,
        QueryTerm::Select(_, c) | QueryTerm::Project(_, c) => flat(c),
        QueryTerm::Join(_, l, r) | QueryTerm::Union(l, r) => flat(l) && flat(r),
    };
    if !ok {
        return Err(Error::syntax(line, col, "right-hand side must be one operator over variables"));
    }
    Ok(Rhs::Op(term))
}

/// Dependency order: repeatedly take, in declaration order, every variable
/// whose arguments are already placed. Checks arities against `a` on the
/// way.
pub fn check_guarded(sys: &EquationSystem, a: &Instance) -> Result<Vec<String>> {
    let order = dependency_order(sys)?;
    solve_in_order(sys, a, &order)?;
    Ok(order)
}

fn dependency_order(sys: &EquationSystem) -> Result<Vec<String>> {
    let mut placed: BTreeSet<&str> = BTreeSet::new();
    let mut order: Vec<String> = Vec::new();
    while order.len() < sys.len() {
        let layer: Vec<&str> = sys
            .equations
            .iter()
            .filter(|(v, rhs)| !placed.contains(v.as_str()) && rhs.args().iter().all(|x| placed.contains(x.as_str())))
            .map(|(v, _)| v.as_str())
            .collect();
        if layer.is_empty() {
            return Err(Error::CyclicSystem(find_cycle(sys, &placed)));
        }
        placed.extend(layer.iter().copied());
        order.extend(layer.into_iter().map(String::from));
    }
    Ok(order)
}

fn find_cycle(sys: &EquationSystem, placed: &BTreeSet<&str>) -> Vec<String> {
    // every unplaced variable depends on some unplaced variable, so walking
    // those edges must revisit a variable
    let mut path: Vec<String> = Vec::new();
    let mut cur = sys
        .equations
        .iter()
        .map(|(v, _)| v.clone())
        .find(|v| !placed.contains(v.as_str()))
        .expect("an unplaced variable");
    loop {
        if let Some(start) = path.iter().position(|v| *v == cur) {
            let mut cycle = path.split_off(start);
            cycle.push(cur);
            return cycle;
        }
        path.push(cur.clone());
        cur = sys
            .rhs(&cur)
            .expect("declared")
            .args()
            .into_iter()
            .find(|x| !placed.contains(x.as_str()))
            .expect("an unplaced argument");
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: BTreeMap<String, View>,
    pub arities: BTreeMap<String, usize>,
}

impl Solution {
    pub fn report(&self, var: &str) -> Option<String> {
        let v = self.assignment.get(var)?;
        Some(format!("{var}: arity={} tuples={}", self.arities[var], v.tuples_text()))
    }
}

fn solve_in_order(sys: &EquationSystem, a: &Instance, order: &[String]) -> Result<Solution> {
    // solved variables become relations of a scratch instance, so each
    // operator is checked and evaluated by the query evaluator
    let mut solved: Vec<(String, Relation)> = Vec::new();
    let mut sol = Solution {
        assignment: BTreeMap::new(),
        arities: BTreeMap::new(),
    };
    for var in order {
        let (arity, view) = match sys.rhs(var).expect("declared") {
            Rhs::Base(name) => {
                let rel = a.relation(name).ok_or_else(|| Error::UnknownRelation(name.clone()))?;
                (rel.arity, rel.view.clone())
            }
            Rhs::Op(term) => {
                let scratch = Instance::new("vars", solved.clone(), a.domain().clone())?;
                (query::check_term(term, &scratch)?, query::eval(term, &scratch)?)
            }
        };
        solved.push((
            var.clone(),
            Relation {
                arity,
                view: view.clone(),
                component: 0,
            },
        ));
        sol.assignment.insert(var.clone(), view);
        sol.arities.insert(var.clone(), arity);
    }
    Ok(sol)
}

pub fn solve(sys: &EquationSystem, a: &Instance) -> Result<Solution> {
    let order = dependency_order(sys)?;
    solve_in_order(sys, a, &order)
}

/// Flattens the definition of `var` into a single term over `a`'s
/// relations.
pub fn as_query(sys: &EquationSystem, var: &str) -> Result<QueryTerm> {
    fn go(sys: &EquationSystem, var: &str, stack: &mut Vec<String>) -> Result<QueryTerm> {
        if let Some(start) = stack.iter().position(|v| v == var) {
            let mut cycle = stack[start..].to_vec();
            cycle.push(var.to_string());
            return Err(Error::CyclicSystem(cycle));
        }
        let rhs = sys.rhs(var).ok_or_else(|| Error::UndeclaredVariable(var.to_string()))?;
        stack.push(var.to_string());
        let out = match rhs {
            Rhs::Base(name) => QueryTerm::rel(name.clone()),
            Rhs::Op(term) => {
                let mut failure = None;
                let t = term.substitute(&mut |x| match go(sys, x, stack) {
                    Ok(t) => t,
                    Err(e) => {
                        failure.get_or_insert(e);
                        QueryTerm::Bottom
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                t
            }
        };
        stack.pop();
        Ok(out)
    }
    go(sys, var, &mut Vec::new())
}
