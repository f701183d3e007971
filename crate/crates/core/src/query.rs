//! The positive relational algebra over an instance's relation names:
//! select, project, join and union, with 1-based positional attributes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::relcore::{active_domain, DomainConst, Instance, Tuple, View};

/// A selection condition on a single tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cond {
    /// Position equals a constant.
    Const(usize, DomainConst),
    /// Two positions are equal.
    Eq(usize, usize),
}

impl Cond {
    fn holds(&self, t: &Tuple) -> bool {
        match self {
            Cond::Const(i, c) => t.at(*i) == c,
            Cond::Eq(i, j) => t.at(*i) == t.at(*j),
        }
    }

    fn max_index(&self) -> usize {
        match self {
            Cond::Const(i, _) => *i,
            Cond::Eq(i, j) => (*i).max(*j),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Const(i, c) => write!(f, "{i}={c}"),
            Cond::Eq(i, j) => write!(f, "{i}={j}"),
        }
    }
}

/// Join condition: left position equals right position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JCond {
    pub left: usize,
    pub right: usize,
}

impl fmt::Display for JCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}=r{}", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QueryTerm {
    Rel(String),
    /// The always-empty term, printed `bottom`. Used as the witness of ⊥.
    Bottom,
    Select(Vec<Cond>, Box<QueryTerm>),
    Project(Vec<usize>, Box<QueryTerm>),
    Join(Vec<JCond>, Box<QueryTerm>, Box<QueryTerm>),
    Union(Box<QueryTerm>, Box<QueryTerm>),
}

impl QueryTerm {
    pub fn rel(name: impl Into<String>) -> Self {
        QueryTerm::Rel(name.into())
    }

    pub fn select(conds: Vec<Cond>, t: QueryTerm) -> Self {
        QueryTerm::Select(conds, Box::new(t))
    }

    pub fn project(indices: Vec<usize>, t: QueryTerm) -> Self {
        QueryTerm::Project(indices, Box::new(t))
    }

    pub fn join(jconds: Vec<JCond>, l: QueryTerm, r: QueryTerm) -> Self {
        QueryTerm::Join(jconds, Box::new(l), Box::new(r))
    }

    pub fn union(l: QueryTerm, r: QueryTerm) -> Self {
        QueryTerm::Union(Box::new(l), Box::new(r))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            QueryTerm::Rel(_) | QueryTerm::Bottom => 1,
            QueryTerm::Select(_, t) | QueryTerm::Project(_, t) => 1 + t.size(),
            QueryTerm::Join(_, l, r) | QueryTerm::Union(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            QueryTerm::Rel(_) | QueryTerm::Bottom => 1,
            QueryTerm::Select(_, t) | QueryTerm::Project(_, t) => 1 + t.depth(),
            QueryTerm::Join(_, l, r) | QueryTerm::Union(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Relation names occurring in the term.
    pub fn relation_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            QueryTerm::Rel(n) => {
                out.insert(n.clone());
            }
            QueryTerm::Bottom => {}
            QueryTerm::Select(_, t) | QueryTerm::Project(_, t) => t.collect_names(out),
            QueryTerm::Join(_, l, r) | QueryTerm::Union(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }

    /// Replaces every relation reference using `f`.
    pub fn substitute(&self, f: &mut impl FnMut(&str) -> QueryTerm) -> QueryTerm {
        match self {
            QueryTerm::Rel(n) => f(n),
            QueryTerm::Bottom => QueryTerm::Bottom,
            QueryTerm::Select(c, t) => QueryTerm::Select(c.clone(), Box::new(t.substitute(f))),
            QueryTerm::Project(p, t) => QueryTerm::Project(p.clone(), Box::new(t.substitute(f))),
            QueryTerm::Join(j, l, r) => {
                QueryTerm::Join(j.clone(), Box::new(l.substitute(f)), Box::new(r.substitute(f)))
            }
            QueryTerm::Union(l, r) => QueryTerm::Union(Box::new(l.substitute(f)), Box::new(r.substitute(f))),
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for QueryTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryTerm::Rel(n) => f.write_str(n),
            QueryTerm::Bottom => f.write_str("bottom"),
            QueryTerm::Select(c, t) => {
                f.write_str("select[")?;
                write_list(f, c)?;
                write!(f, "]({t})")
            }
            QueryTerm::Project(p, t) => {
                f.write_str("project[")?;
                write_list(f, p)?;
                write!(f, "]({t})")
            }
            QueryTerm::Join(j, l, r) => {
                f.write_str("join[")?;
                write_list(f, j)?;
                write!(f, "]({l},{r})")
            }
            QueryTerm::Union(l, r) => write!(f, "union({l},{r})"),
        }
    }
}

/// Total order used for witnesses and enumeration: size, then printed form.
pub fn term_order(a: &QueryTerm, b: &QueryTerm) -> Ordering {
    a.size()
        .cmp(&b.size())
        .then_with(|| a.to_string().cmp(&b.to_string()))
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Punct(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ',' | '(' | ')' | '[' | ']' | '=' | ';' | '#')
}

impl Lexer {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (1, 1);
        let mut chars = text.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c == '\n' {
                chars.next();
                line += 1;
                col = 1;
            } else if c.is_whitespace() {
                chars.next();
                col += 1;
            } else if matches!(c, ',' | '(' | ')' | '[' | ']' | '=') {
                chars.next();
                toks.push((Tok::Punct(c), line, col));
                col += 1;
            } else if is_name_char(c) {
                let start = col;
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                toks.push((Tok::Name(s), line, start));
            } else {
                return Err(Error::syntax(line, col, format!("unexpected character {c:?}")));
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            end: (line, col),
        })
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::syntax(l, c, msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{c}`"))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(p)) if *p == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn int(&mut self) -> Result<usize> {
        let here = self.here();
        let n = self.name()?;
        parse_index(&n).ok_or_else(|| Error::syntax(here.0, here.1, "expected a positive integer"))
    }
}

fn parse_index(s: &str) -> Option<usize> {
    if s.chars().all(|c| c.is_ascii_digit()) {
        s.parse().ok().filter(|i| *i >= 1)
    } else {
        None
    }
}

fn parse_term_inner(lx: &mut Lexer) -> Result<QueryTerm> {
    let here = lx.here();
    let head = lx.name()?;
    let opens_params = matches!(lx.peek(), Some(Tok::Punct('[')));
    let opens_args = matches!(lx.peek(), Some(Tok::Punct('(')));
    match head.as_str() {
        "select" if opens_params => {
            lx.punct('[')?;
            let mut conds = Vec::new();
            loop {
                let i = lx.int()?;
                lx.punct('=')?;
                let rhs_at = lx.here();
                let rhs = lx.name()?;
                let cond = match parse_index(&rhs) {
                    Some(j) => Cond::Eq(i, j),
                    None => Cond::Const(
                        i,
                        DomainConst::new(&rhs).map_err(|e| Error::syntax(rhs_at.0, rhs_at.1, e.to_string()))?,
                    ),
                };
                conds.push(cond);
                if !lx.eat(',') {
                    break;
                }
            }
            lx.punct(']')?;
            lx.punct('(')?;
            let t = parse_term_inner(lx)?;
            lx.punct(')')?;
            Ok(QueryTerm::select(conds, t))
        }
        "project" if opens_params => {
            lx.punct('[')?;
            if matches!(lx.peek(), Some(Tok::Punct(']'))) {
                return Err(lx.err("empty projection list"));
            }
            let mut idx = vec![lx.int()?];
            while lx.eat(',') {
                idx.push(lx.int()?);
            }
            lx.punct(']')?;
            lx.punct('(')?;
            let t = parse_term_inner(lx)?;
            lx.punct(')')?;
            Ok(QueryTerm::project(idx, t))
        }
        "join" if opens_params => {
            lx.punct('[')?;
            let mut jconds = Vec::new();
            if !lx.eat(']') {
                loop {
                    let at = lx.here();
                    let l = lx.name()?;
                    lx.punct('=')?;
                    let r = lx.name()?;
                    let left = l.strip_prefix('l').and_then(parse_index);
                    let right = r.strip_prefix('r').and_then(parse_index);
                    match (left, right) {
                        (Some(left), Some(right)) => jconds.push(JCond { left, right }),
                        _ => return Err(Error::syntax(at.0, at.1, "expected `l<INT>=r<INT>`")),
                    }
                    if !lx.eat(',') {
                        break;
                    }
                }
                lx.punct(']')?;
            }
            lx.punct('(')?;
            let l = parse_term_inner(lx)?;
            lx.punct(',')?;
            let r = parse_term_inner(lx)?;
            lx.punct(')')?;
            Ok(QueryTerm::join(jconds, l, r))
        }
        "union" if opens_args => {
            lx.punct('(')?;
            let l = parse_term_inner(lx)?;
            lx.punct(',')?;
            let r = parse_term_inner(lx)?;
            lx.punct(')')?;
            Ok(QueryTerm::union(l, r))
        }
        "select" | "project" | "join" => Err(lx.err(format!("expected `[` after `{head}`"))),
        "bottom" => Ok(QueryTerm::Bottom),
        _ if opens_args || opens_params => Err(Error::syntax(here.0, here.1, format!("unknown operator {head:?}"))),
        _ => Ok(QueryTerm::Rel(head)),
    }
}

/// Parses a term in the concrete syntax printed by `Display`.
pub fn parse_term(text: &str) -> Result<QueryTerm> {
    let mut lx = Lexer::new(text)?;
    let t = parse_term_inner(&mut lx)?;
    if lx.peek().is_some() {
        return Err(lx.err("trailing input after term"));
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Checking and evaluation

/// Arity of a checked term and the coproduct component it lives in
/// (`None` when it touches no relation).
struct Checked {
    arity: Option<usize>,
    component: Option<u32>,
    max_arity: usize,
}

fn merge_component(a: Option<u32>, b: Option<u32>) -> Result<Option<u32>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(Error::CrossComponent),
        (x, y) => Ok(x.or(y)),
    }
}

fn check_rec(t: &QueryTerm, a: &Instance) -> Result<Checked> {
    let bounded = |idx: usize, arity: Option<usize>| -> Result<()> {
        match arity {
            Some(n) if idx > n => Err(Error::IndexOutOfRange { index: idx, arity: n }),
            _ => Ok(()),
        }
    };
    Ok(match t {
        QueryTerm::Rel(n) => {
            let r = a.relation(n).ok_or_else(|| Error::UnknownRelation(n.clone()))?;
            Checked {
                arity: Some(r.arity),
                component: Some(r.component),
                max_arity: r.arity,
            }
        }
        QueryTerm::Bottom => Checked {
            arity: None,
            component: None,
            max_arity: 0,
        },
        QueryTerm::Select(conds, child) => {
            let c = check_rec(child, a)?;
            for cond in conds {
                bounded(cond.max_index(), c.arity)?;
            }
            c
        }
        QueryTerm::Project(idx, child) => {
            let c = check_rec(child, a)?;
            for i in idx {
                bounded(*i, c.arity)?;
            }
            Checked {
                arity: Some(idx.len()),
                component: c.component,
                max_arity: c.max_arity.max(idx.len()),
            }
        }
        QueryTerm::Join(jc, l, r) => {
            let cl = check_rec(l, a)?;
            let cr = check_rec(r, a)?;
            for j in jc {
                bounded(j.left, cl.arity)?;
                bounded(j.right, cr.arity)?;
            }
            let arity = cl.arity.unwrap_or(1) + cr.arity.unwrap_or(1);
            Checked {
                arity: Some(arity),
                component: merge_component(cl.component, cr.component)?,
                max_arity: cl.max_arity.max(cr.max_arity).max(arity),
            }
        }
        QueryTerm::Union(l, r) => {
            let cl = check_rec(l, a)?;
            let cr = check_rec(r, a)?;
            let arity = match (cl.arity, cr.arity) {
                (Some(x), Some(y)) if x != y => return Err(Error::UnionArityMismatch { left: x, right: y }),
                (x, y) => x.or(y),
            };
            Checked {
                arity,
                component: merge_component(cl.component, cr.component)?,
                max_arity: cl.max_arity.max(cr.max_arity),
            }
        }
    })
}

/// Well-formedness check; returns the output arity. `bottom` alone reports 1.
pub fn check_term(t: &QueryTerm, a: &Instance) -> Result<usize> {
    Ok(check_rec(t, a)?.arity.unwrap_or(1))
}

/// Largest arity of any subterm.
pub fn max_subterm_arity(t: &QueryTerm, a: &Instance) -> Result<usize> {
    Ok(check_rec(t, a)?.max_arity)
}

/// Coproduct component the term reads from, if it reads any relation.
pub(crate) fn term_component(t: &QueryTerm, a: &Instance) -> Result<Option<u32>> {
    Ok(check_rec(t, a)?.component)
}

fn eval_rec(t: &QueryTerm, a: &Instance) -> (usize, BTreeSet<Tuple>) {
    match t {
        QueryTerm::Rel(n) => {
            let r = a.relation(n).expect("checked term");
            (r.arity, r.view.tuples().iter().cloned().collect())
        }
        QueryTerm::Bottom => (0, BTreeSet::new()),
        QueryTerm::Select(conds, child) => {
            let (n, set) = eval_rec(child, a);
            (n, set.into_iter().filter(|t| conds.iter().all(|c| c.holds(t))).collect())
        }
        QueryTerm::Project(idx, child) => {
            let (_, set) = eval_rec(child, a);
            let out = set
                .iter()
                .map(|t| Tuple::from_items_unchecked(idx.iter().map(|i| t.at(*i).clone()).collect()))
                .collect();
            (idx.len(), out)
        }
        QueryTerm::Join(jc, l, r) => {
            let (nl, ls) = eval_rec(l, a);
            let (nr, rs) = eval_rec(r, a);
            let mut out = BTreeSet::new();
            for x in &ls {
                for y in &rs {
                    if jc.iter().all(|j| x.at(j.left) == y.at(j.right)) {
                        let items = x.items().iter().chain(y.items()).cloned().collect();
                        out.insert(Tuple::from_items_unchecked(items));
                    }
                }
            }
            (nl.max(1) + nr.max(1), out)
        }
        QueryTerm::Union(l, r) => {
            let (nl, mut ls) = eval_rec(l, a);
            let (nr, rs) = eval_rec(r, a);
            ls.extend(rs);
            (nl.max(nr), ls)
        }
    }
}

/// Evaluates a term over an instance under set semantics.
pub fn eval(t: &QueryTerm, a: &Instance) -> Result<View> {
    let arity = check_term(t, a)?;
    let (_, set) = eval_rec(t, a);
    Ok(View::from_set(arity, set))
}

// ---------------------------------------------------------------------------
// Enumeration

fn index_lists(len: usize, max_value: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=max_value).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// All lists of 1..=max_len positions drawn from 1..=arity (repeats allowed).
pub(crate) fn projection_lists(arity: usize, max_len: usize) -> Vec<Vec<usize>> {
    (1..=max_len).flat_map(|len| index_lists(len, arity)).collect()
}

/// Single selection conditions over a given arity.
pub(crate) fn single_conds(arity: usize, constants: &BTreeSet<DomainConst>) -> Vec<Cond> {
    let mut out = Vec::new();
    for i in 1..=arity {
        for c in constants {
            out.push(Cond::Const(i, c.clone()));
        }
    }
    for i in 1..=arity {
        for j in i + 1..=arity {
            out.push(Cond::Eq(i, j));
        }
    }
    out
}

fn nonempty_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let n = items.len();
    assert!(n < 24, "too many conditions to enumerate");
    for mask in 1u32..(1u32 << n) {
        out.push((0..n).filter(|i| mask & (1 << i) != 0).map(|i| items[i].clone()).collect());
    }
    out
}

/// All join-condition lists pairing left and right positions.
pub(crate) fn jcond_lists(left: usize, right: usize) -> Vec<Vec<JCond>> {
    let pairs: Vec<JCond> = (1..=left)
        .flat_map(|l| (1..=right).map(move |r| JCond { left: l, right: r }))
        .collect();
    let mut out = vec![vec![]];
    out.extend(nonempty_subsets(&pairs));
    out
}

/// Deterministically enumerates every well-formed term of depth at most
/// `max_depth` whose subterms all have arity at most `max_arity`. Selection
/// conditions are sets of single conditions over the active domain. Sorted by
/// size, then printed form.
pub fn enumerate_terms(a: &Instance, max_depth: usize, max_arity: usize) -> Result<Vec<QueryTerm>> {
    if let Some(r) = a.relations().values().find(|r| r.arity > max_arity) {
        return Err(Error::BoundTooSmall {
            bound: max_arity,
            required: r.arity,
        });
    }
    let adom = active_domain(a);
    let components = a.components().len() > 1;

    // terms grouped by exact depth, each with its arity and component
    let mut levels: Vec<Vec<(QueryTerm, usize, Option<u32>)>> = Vec::new();
    let base: Vec<_> = a
        .relations()
        .iter()
        .map(|(n, r)| (QueryTerm::rel(n.clone()), r.arity, Some(r.component)))
        .collect();
    if max_depth >= 1 {
        levels.push(base);
    }
    for depth in 2..=max_depth {
        let shallower: Vec<&(QueryTerm, usize, Option<u32>)> = levels.iter().flatten().collect();
        let previous = &levels[depth - 2];
        let mut next = Vec::new();
        for (t, n, comp) in previous {
            for conds in nonempty_subsets(&single_conds(*n, &adom)) {
                next.push((QueryTerm::select(conds, t.clone()), *n, *comp));
            }
            for idx in projection_lists(*n, max_arity) {
                let len = idx.len();
                next.push((QueryTerm::project(idx, t.clone()), len, *comp));
            }
        }
        // binary operators: at least one argument from the previous level
        let prev_ptrs: BTreeSet<*const (QueryTerm, usize, Option<u32>)> =
            previous.iter().map(|x| x as *const _).collect();
        for l in &shallower {
            for r in &shallower {
                let l_prev = prev_ptrs.contains(&(*l as *const _));
                let r_prev = prev_ptrs.contains(&(*r as *const _));
                if !(l_prev || r_prev) {
                    continue;
                }
                if components && l.2.is_some() && r.2.is_some() && l.2 != r.2 {
                    continue;
                }
                let comp = l.2.or(r.2);
                if l.1 + r.1 <= max_arity {
                    for jc in jcond_lists(l.1, r.1) {
                        next.push((QueryTerm::join(jc, l.0.clone(), r.0.clone()), l.1 + r.1, comp));
                    }
                }
                if l.1 == r.1 {
                    next.push((QueryTerm::union(l.0.clone(), r.0.clone()), l.1, comp));
                }
            }
        }
        levels.push(next);
    }
    let mut all: Vec<(usize, String, QueryTerm)> = levels
        .into_iter()
        .flatten()
        .map(|(t, _, _)| (t.size(), t.to_string(), t))
        .collect();
    all.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    Ok(all.into_iter().map(|(_, _, t)| t).collect())
}

/// Groups terms by their evaluation.
pub fn group_by_eval(terms: Vec<QueryTerm>, a: &Instance) -> Result<BTreeMap<View, Vec<QueryTerm>>> {
    let mut out: BTreeMap<View, Vec<QueryTerm>> = BTreeMap::new();
    for t in terms {
        let v = eval(&t, a)?;
        out.entry(v).or_default().push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst_r_ab() -> Instance {
        Instance::of("A", &["a", "b"], &[("r", View::of(1, &[&["a"], &["b"]]))])
    }

    #[test]
    fn parses_relation_reference() {
        assert_eq!(parse_term("r").unwrap(), QueryTerm::rel("r"));
    }

    #[test]
    fn parses_nested_terms() {
        let t = parse_term("project[2,5](join[l3=r3](x,y))").unwrap();
        assert_eq!(
            t,
            QueryTerm::project(
                vec![2, 5],
                QueryTerm::join(vec![JCond { left: 3, right: 3 }], QueryTerm::rel("x"), QueryTerm::rel("y"))
            )
        );
    }

    #[test]
    fn rejects_empty_projection() {
        assert!(matches!(parse_term("project[](r)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse_term("union(r,\n  select[x=a](r))").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 10)),
            other => panic!("{other}"),
        }
        assert!(parse_term("r s").is_err());
        assert!(parse_term("join[a3=r3](x,y)").is_err());
        assert!(parse_term("project[0](r)").is_err());
    }

    #[test]
    fn print_reparses() {
        for s in [
            "select[1=a,2=1](r)",
            "join[](r,s)",
            "union(project[1,1](r),bottom)",
            "join[l1=r2,l2=r1](r,s)",
        ] {
            let t = parse_term(s).unwrap();
            assert_eq!(t.to_string(), s);
            assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn check_arities() {
        let a = Instance::of(
            "A",
            &["a"],
            &[
                ("r", View::of(4, &[&["a", "a", "a", "a"]])),
                ("q", View::of(5, &[&["a", "a", "a", "a", "a"]])),
            ],
        );
        assert_eq!(check_term(&QueryTerm::rel("r"), &a).unwrap(), 4);
        assert_eq!(check_term(&parse_term("join[](r,q)").unwrap(), &a).unwrap(), 9);
        assert!(matches!(
            check_term(&parse_term("union(r,q)").unwrap(), &a),
            Err(Error::UnionArityMismatch { left: 4, right: 5 })
        ));
        assert!(matches!(
            check_term(&parse_term("project[5](r)").unwrap(), &a),
            Err(Error::IndexOutOfRange { index: 5, arity: 4 })
        ));
        assert!(matches!(check_term(&QueryTerm::rel("z"), &a), Err(Error::UnknownRelation(_))));
    }

    #[test]
    fn select_filters() {
        let a = inst_r_ab();
        let v = eval(&parse_term("select[1=a](r)").unwrap(), &a).unwrap();
        assert_eq!(v, View::of(1, &[&["a"]]));
        let none = eval(&parse_term("select[1=a,1=b](r)").unwrap(), &a).unwrap();
        assert_eq!(none, View::Bottom);
    }

    #[test]
    fn conjunctive_query_fixture() {
        // step-by-step: project[2,3,4](rP) = {(a,m,p),(b,n,p)}; select 1=a keeps (a,m,p);
        // project[1,2,3](rQ) = {(b,q,p)}; select 1=b keeps it; join on 3=3 gives
        // (a,m,p,b,q,p); project[2,5] gives (m,q).
        let a = Instance::of(
            "A",
            &["a", "b", "k", "m", "n", "p", "q"],
            &[
                ("rP", View::of(4, &[&["k", "a", "m", "p"], &["k", "b", "n", "p"]])),
                ("rQ", View::of(5, &[&["b", "q", "p", "k", "k"]])),
            ],
        );
        let t = parse_term(
            "project[2,5](join[l3=r3](select[1=a](project[2,3,4](rP)),select[1=b](project[1,2,3](rQ))))",
        )
        .unwrap();
        assert_eq!(eval(&t, &a).unwrap(), View::of(2, &[&["m", "q"]]));
    }

    #[test]
    fn projection_deduplicates() {
        let a = Instance::of("A", &["a", "b"], &[("r", View::of(2, &[&["a", "a"], &["a", "b"]]))]);
        let v = eval(&parse_term("project[1](r)").unwrap(), &a).unwrap();
        assert_eq!(v, View::of(1, &[&["a"]]));
    }

    #[test]
    fn enumeration_small_cases() {
        assert!(enumerate_terms(&Instance::bottom(), 3, 2).unwrap().is_empty());
        let one = Instance::of("A", &["a"], &[("r", View::of(1, &[&["a"]]))]);
        assert_eq!(enumerate_terms(&one, 1, 1).unwrap(), vec![QueryTerm::rel("r")]);

        let a = inst_r_ab();
        let terms = enumerate_terms(&a, 2, 1).unwrap();
        let printed: BTreeSet<String> = terms.iter().map(ToString::to_string).collect();
        // grammar expansion by hand: 3 selections (1=a, 1=b, both), project[1], union(r,r), r
        let expected: BTreeSet<String> = [
            "r",
            "select[1=a](r)",
            "select[1=b](r)",
            "select[1=a,1=b](r)",
            "project[1](r)",
            "union(r,r)",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(printed, expected);
        assert_eq!(terms[0], QueryTerm::rel("r"));
        assert_eq!(terms, enumerate_terms(&a, 2, 1).unwrap());
    }

    #[test]
    fn enumeration_bound_too_small() {
        let a = Instance::of("A", &["a"], &[("r", View::of(2, &[&["a", "a"]]))]);
        assert!(matches!(enumerate_terms(&a, 1, 1), Err(Error::BoundTooSmall { .. })));
    }
}
