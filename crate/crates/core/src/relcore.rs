//! Constants, tuples, views and database instances.
//!
//! A [`View`] is purely extensional: an arity plus a canonically ordered set
//! of tuples. Every empty extension, whatever its arity, is the single
//! [`View::Bottom`]. An [`Instance`] is a named collection of relations over a
//! declared domain; relation names are local metadata and play no part in the
//! identity of the views the instance contains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use smallvec::SmallVec;

use crate::closure::{Bound, ClosedSet};
use crate::error::{Error, Result};

/// An opaque, totally ordered domain constant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainConst(Arc<str>);

const RESERVED: &[char] = &[',', '(', ')', '[', ']', '=', ';', '#'];

impl DomainConst {
    pub fn new(text: impl AsRef<str>) -> Result<Self> {
        let text = text.as_ref();
        if text.is_empty() || text.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
            return Err(Error::InvalidConstant(text.to_string()));
        }
        Ok(DomainConst(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for DomainConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for DomainConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A tuple of constants. Arity is the length and is at least one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(SmallVec<[DomainConst; 3]>);

impl Tuple {
    pub fn new(items: Vec<DomainConst>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Tuple(items.into()))
    }

    /// Builds a tuple from constant texts; panics on invalid input.
    /// Intended for fixtures and tests.
    pub fn of(items: &[&str]) -> Self {
        Tuple::new(
            items
                .iter()
                .map(|s| DomainConst::new(s).expect("valid constant"))
                .collect(),
        )
        .expect("nonempty tuple")
    }

    pub(crate) fn from_items_unchecked(items: SmallVec<[DomainConst; 3]>) -> Self {
        debug_assert!(!items.is_empty());
        Tuple(items)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn items(&self) -> &[DomainConst] {
        &self.0
    }

    /// 1-based position access.
    pub fn at(&self, index: usize) -> &DomainConst {
        &self.0[index - 1]
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(c.as_str())?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Extension {
    arity: usize,
    tuples: Vec<Tuple>,
}

/// An extensional relation. Ordering is canonical: `Bottom` first, then by
/// arity, then by the sorted tuple list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum View {
    Bottom,
    Rel(Arc<Extension>),
}

impl View {
    /// Arity of the view; `Bottom` has none and reports 0.
    pub fn arity(&self) -> usize {
        match self {
            View::Bottom => 0,
            View::Rel(e) => e.arity,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, View::Bottom)
    }

    /// Tuples in canonical order; empty for `Bottom`.
    pub fn tuples(&self) -> &[Tuple] {
        match self {
            View::Bottom => &[],
            View::Rel(e) => &e.tuples,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples().len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_bottom()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.tuples().binary_search(t).is_ok()
    }

    /// Builds a view from tuples that are already sorted, deduplicated and of
    /// the given arity.
    pub(crate) fn from_sorted_unchecked(arity: usize, tuples: Vec<Tuple>) -> View {
        if tuples.is_empty() {
            View::Bottom
        } else {
            debug_assert!(tuples.windows(2).all(|w| w[0] < w[1]));
            View::Rel(Arc::new(Extension { arity, tuples }))
        }
    }

    pub(crate) fn from_set(arity: usize, tuples: BTreeSet<Tuple>) -> View {
        View::from_sorted_unchecked(arity, tuples.into_iter().collect())
    }

    /// Fixture helper: a view from constant texts. Panics on invalid input.
    pub fn of(arity: usize, tuples: &[&[&str]]) -> View {
        canonicalize_view(arity, tuples.iter().map(|t| Tuple::of(t))).expect("valid view")
    }

    /// `tuples=` rendering used in reports: `(a,b);(c,d)`, empty for bottom.
    pub fn tuples_text(&self) -> String {
        self.tuples()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Debug for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            View::Bottom => f.write_str("bottom"),
            View::Rel(e) => write!(f, "{}{{{}}}", e.arity, self.tuples_text()),
        }
    }
}

/// Canonical form of a raw tuple set: sorted, deduplicated, and `Bottom`
/// when empty.
pub fn canonicalize_view(arity: usize, raw: impl IntoIterator<Item = Tuple>) -> Result<View> {
    if arity == 0 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut set = BTreeSet::new();
    for t in raw {
        if t.arity() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: t.arity(),
            });
        }
        set.insert(t);
    }
    Ok(View::from_set(arity, set))
}

/// A named relation: declared arity, extension, and the coproduct component it
/// belongs to (0 for ordinary instances).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub view: View,
    pub component: u32,
}

/// A database instance.
pub struct Instance {
    name: String,
    relations: BTreeMap<String, Relation>,
    domain: BTreeSet<DomainConst>,
    cache: Cache,
}

#[derive(Default)]
struct Cache {
    views: OnceLock<Arc<HashSet<View>>>,
    names: OnceLock<HashMap<View, String>>,
    closures: Mutex<HashMap<Bound, Arc<ClosedSet>>>,
}

impl Clone for Instance {
    fn clone(&self) -> Self {
        Instance {
            name: self.name.clone(),
            relations: self.relations.clone(),
            domain: self.domain.clone(),
            cache: Cache::default(),
        }
    }
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.relations == other.relations && self.domain == other.domain
    }
}

impl Eq for Instance {}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("name", &self.name)
            .field("relations", &self.relations)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Validates and builds an instance. A `Bottom` relation gets arity 1; use
/// [`Instance::new`] to declare arities explicitly.
pub fn make_instance(
    name: impl Into<String>,
    relations: Vec<(String, View)>,
    domain: BTreeSet<DomainConst>,
) -> Result<Instance> {
    let rels = relations
        .into_iter()
        .map(|(n, v)| {
            let arity = v.arity().max(1);
            (
                n,
                Relation {
                    arity,
                    view: v,
                    component: 0,
                },
            )
        })
        .collect();
    Instance::new(name, rels, domain)
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        relations: Vec<(String, Relation)>,
        domain: BTreeSet<DomainConst>,
    ) -> Result<Instance> {
        let mut map = BTreeMap::new();
        for (rname, rel) in relations {
            if rel.arity == 0 || (!rel.view.is_bottom() && rel.view.arity() != rel.arity) {
                return Err(Error::ArityMismatch {
                    expected: rel.arity.max(1),
                    found: rel.view.arity(),
                });
            }
            for t in rel.view.tuples() {
                if let Some(c) = t.items().iter().find(|c| !domain.contains(*c)) {
                    return Err(Error::ConstantOutsideDomain {
                        relation: rname,
                        constant: c.to_string(),
                    });
                }
            }
            if map.contains_key(&rname) {
                return Err(Error::DuplicateRelation(rname));
            }
            map.insert(rname, rel);
        }
        Ok(Instance {
            name: name.into(),
            relations: map,
            domain,
            cache: Cache::default(),
        })
    }

    /// Builds an instance from parts already known to be valid.
    pub(crate) fn new_trusted(name: impl Into<String>, relations: Vec<(String, Relation)>, domain: BTreeSet<DomainConst>) -> Instance {
        let relations: BTreeMap<String, Relation> = relations.into_iter().collect();
        Instance {
            name: name.into(),
            relations,
            domain,
            cache: Cache::default(),
        }
    }

    /// The bottom object: no relations, empty domain.
    pub fn bottom() -> Instance {
        Instance::new("bot", Vec::new(), BTreeSet::new()).expect("empty instance is valid")
    }

    /// Fixture helper. Panics on invalid input.
    pub fn of(name: &str, domain: &[&str], relations: &[(&str, View)]) -> Instance {
        make_instance(
            name,
            relations
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect(),
            domain
                .iter()
                .map(|c| DomainConst::new(c).expect("valid constant"))
                .collect(),
        )
        .expect("valid instance")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn domain(&self) -> &BTreeSet<DomainConst> {
        &self.domain
    }

    pub fn max_arity(&self) -> usize {
        self.relations.values().map(|r| r.arity).max().unwrap_or(0)
    }

    /// Number of distinct coproduct components among the relations.
    pub fn components(&self) -> BTreeSet<u32> {
        self.relations.values().map(|r| r.component).collect()
    }

    /// Renamed copy of this instance.
    pub fn renamed(&self, name: impl Into<String>) -> Instance {
        let mut out = self.clone();
        out.name = name.into();
        out
    }

    pub(crate) fn view_index(&self) -> &HashSet<View> {
        self.cache.views.get_or_init(|| {
            let mut set: HashSet<View> = self.relations.values().map(|r| r.view.clone()).collect();
            set.insert(View::Bottom);
            Arc::new(set)
        })
    }

    pub(crate) fn contains_view(&self, v: &View) -> bool {
        v.is_bottom() || self.view_index().contains(v)
    }

    /// First relation (by name) whose extension is `v`.
    pub fn relation_named_for(&self, v: &View) -> Option<&str> {
        let names = self.cache.names.get_or_init(|| {
            let mut map = HashMap::default();
            for (n, r) in &self.relations {
                map.entry(r.view.clone()).or_insert_with(|| n.clone());
            }
            map
        });
        names.get(v).map(String::as_str)
    }

    /// Extensional equality: the same set of views.
    pub fn ext_eq(&self, other: &Instance) -> bool {
        std::ptr::eq(self, other) || self.view_index() == other.view_index()
    }

    pub(crate) fn cached_closure(&self, bound: Bound) -> Option<Arc<ClosedSet>> {
        self.cache.closures.lock().unwrap().get(&bound).cloned()
    }

    pub(crate) fn store_closure(&self, bound: Bound, set: Arc<ClosedSet>) {
        self.cache.closures.lock().unwrap().insert(bound, set);
    }

    /// Serializes into the `.dbi` text format.
    pub fn to_dbi(&self) -> String {
        let mut out = String::from("domain");
        for c in &self.domain {
            out.push(' ');
            out.push_str(c.as_str());
        }
        out.push('\n');
        for (name, rel) in &self.relations {
            out.push_str(&format!("relation {} {}\n", name, rel.arity));
            for t in rel.view.tuples() {
                let items: Vec<&str> = t.items().iter().map(DomainConst::as_str).collect();
                out.push_str(&items.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Extensions of the instance's relations plus `Bottom`, collapsed
/// extensionally.
pub fn views_of(a: &Instance) -> BTreeSet<View> {
    a.view_index().iter().cloned().collect()
}

/// All constants occurring in the instance's tuples.
pub fn active_domain(a: &Instance) -> BTreeSet<DomainConst> {
    a.relations
        .values()
        .flat_map(|r| r.view.tuples())
        .flat_map(|t| t.items().iter().cloned())
        .collect()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the `.dbi` text format.
pub fn parse_dbi(name: &str, text: &str) -> Result<Instance> {
    let mut domain: Option<BTreeSet<DomainConst>> = None;
    let mut relations: Vec<(String, usize, Vec<Tuple>, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if domain.is_none() {
            if words[0] != "domain" {
                return Err(Error::syntax(lineno, 1, "expected `domain` line first"));
            }
            let mut set = BTreeSet::new();
            for w in &words[1..] {
                set.insert(DomainConst::new(w).map_err(|e| Error::syntax(lineno, 1, e.to_string()))?);
            }
            domain = Some(set);
            continue;
        }
        if words[0] == "relation" {
            if words.len() != 3 {
                return Err(Error::syntax(lineno, 1, "expected `relation <name> <arity>`"));
            }
            let arity: usize = words[2]
                .parse()
                .ok()
                .filter(|a| *a >= 1)
                .ok_or_else(|| Error::syntax(lineno, col_of(raw, words[2]), "arity must be a positive integer"))?;
            relations.push((words[1].to_string(), arity, Vec::new(), lineno));
            continue;
        }
        let Some(current) = relations.last_mut() else {
            return Err(Error::syntax(lineno, 1, "tuple line before any `relation` block"));
        };
        if words.len() != current.1 {
            return Err(Error::syntax(
                lineno,
                1,
                format!("tuple has {} items, relation {} has arity {}", words.len(), current.0, current.1),
            ));
        }
        let mut items = Vec::with_capacity(words.len());
        for w in &words {
            items.push(DomainConst::new(w).map_err(|e| Error::syntax(lineno, col_of(raw, w), e.to_string()))?);
        }
        current.2.push(Tuple(items.into()));
    }

    let domain = domain.ok_or_else(|| Error::syntax(1, 1, "missing `domain` line"))?;
    let mut rels = Vec::with_capacity(relations.len());
    for (rname, arity, tuples, _) in relations {
        let view = canonicalize_view(arity, tuples)?;
        rels.push((
            rname,
            Relation {
                arity,
                view,
                component: 0,
            },
        ));
    }
    Instance::new(name, rels, domain)
}

fn col_of(line: &str, word: &str) -> usize {
    line.find(word).map(|i| i + 1).unwrap_or(1)
}
