//! The power-view operator as a bounded saturation, and the algebra of
//! saturated view sets.
//!
//! `closure(A, k)` is the least set of views that contains every relation of
//! `A` and ⊥ and is closed under single-step select (active-domain constants
//! and position equalities), project, join and union, restricted to results of
//! arity at most `k`.
//!
//! Views are encoded as bitsets over `universe^arity`, where the universe is
//! the sorted active domain. Because select, project and join distribute over
//! union, every member of the closure is a union of *generators*: views that
//! were not already expressible as a union when first derived. The saturation
//! fires the non-union operators only on generators and completes unions
//! incrementally, which keeps large closures (tens of thousands of views)
//! cheap to compute.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::query::{self, Cond, JCond, QueryTerm};
use crate::relcore::{DomainConst, Instance, Relation, Tuple, View};

/// Default view-count ceiling for library calls.
pub const DEFAULT_MAX_VIEWS: usize = 1 << 20;

/// Largest number of bits a single encoded view may take.
const MAX_VIEW_WIDTH: usize = 1 << 22;

/// Closure bound: maximum arity of any view, plus a ceiling on the number of
/// views a closure may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    arity: usize,
    max_views: usize,
}

impl Bound {
    pub fn new(arity: usize) -> Bound {
        Bound {
            arity,
            max_views: DEFAULT_MAX_VIEWS,
        }
    }

    pub fn with_max_views(self, max_views: usize) -> Bound {
        Bound { max_views, ..self }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_views(&self) -> usize {
        self.max_views
    }
}

// ---------------------------------------------------------------------------
// Encoded views

/// A view encoded over a universe: bit `i` stands for the tuple whose digits
/// (base `n`, most significant first) index the universe. Arity 0 is ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Code {
    arity: u8,
    bits: SmallVec<[u64; 1]>,
}

impl Code {
    fn bottom() -> Code {
        Code {
            arity: 0,
            bits: SmallVec::new(),
        }
    }

    fn arity(&self) -> usize {
        self.arity as usize
    }

    fn is_bottom(&self) -> bool {
        self.arity == 0
    }

    fn popcount(&self) -> u32 {
        self.bits.iter().map(|w| w.count_ones()).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    None
                } else {
                    let tz = x.trailing_zeros() as usize;
                    x &= x - 1;
                    Some(w * 64 + tz)
                }
            })
        })
    }

    fn union(&self, other: &Code) -> Code {
        debug_assert_eq!(self.arity, other.arity);
        Code {
            arity: self.arity,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        }
    }
}

type Digits = SmallVec<[usize; 6]>;

/// Encoding context for one universe.
#[derive(Clone)]
struct Enc {
    consts: Arc<[DomainConst]>,
}

impl Enc {
    fn n(&self) -> usize {
        self.consts.len()
    }

    fn width(&self, arity: usize) -> Result<usize> {
        let mut w: usize = 1;
        for _ in 0..arity {
            w = w.checked_mul(self.n()).filter(|w| *w <= MAX_VIEW_WIDTH).ok_or(Error::ResourceLimit {
                limit: MAX_VIEW_WIDTH,
            })?;
        }
        Ok(w)
    }

    fn empty(&self, arity: usize) -> Code {
        let words = self.n().pow(arity as u32).div_ceil(64);
        Code {
            arity: arity as u8,
            bits: SmallVec::from_elem(0, words),
        }
    }

    fn digits(&self, mut idx: usize, arity: usize) -> Digits {
        let n = self.n();
        let mut d: Digits = SmallVec::from_elem(0, arity);
        for pos in (0..arity).rev() {
            d[pos] = idx % n;
            idx /= n;
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, d| acc * self.n() + d)
    }

    fn const_index(&self, c: &DomainConst) -> Option<usize> {
        self.consts.binary_search(c).ok()
    }

    fn encode(&self, v: &View) -> Option<Code> {
        if v.is_bottom() {
            return Some(Code::bottom());
        }
        if v.arity() > u8::MAX as usize || self.n() == 0 {
            return None;
        }
        self.width(v.arity()).ok()?;
        let mut code = self.empty(v.arity());
        for t in v.tuples() {
            let mut idx = 0;
            for c in t.items() {
                idx = idx * self.n() + self.const_index(c)?;
            }
            code.bits[idx / 64] |= 1 << (idx % 64);
        }
        Some(code)
    }

    fn decode(&self, code: &Code) -> View {
        if code.is_bottom() {
            return View::Bottom;
        }
        let arity = code.arity();
        let tuples = code
            .ones()
            .map(|i| {
                Tuple::from_items_unchecked(self.digits(i, arity).iter().map(|d| self.consts[*d].clone()).collect())
            })
            .collect();
        View::from_sorted_unchecked(arity, tuples)
    }

    fn normalize(code: Code) -> Code {
        if code.bits.iter().all(|w| *w == 0) {
            Code::bottom()
        } else {
            code
        }
    }

    fn select(&self, x: &Code, cond: &EncCond) -> Code {
        let arity = x.arity();
        let mut out = self.empty(arity);
        for i in x.ones() {
            let d = self.digits(i, arity);
            let keep = match cond {
                EncCond::Const(p, c) => d[*p] == *c,
                EncCond::Eq(p, q) => d[*p] == d[*q],
            };
            if keep {
                out.bits[i / 64] |= 1 << (i % 64);
            }
        }
        Enc::normalize(out)
    }

    fn project(&self, x: &Code, idx: &[usize]) -> Code {
        let arity = x.arity();
        let mut out = self.empty(idx.len());
        for i in x.ones() {
            let d = self.digits(i, arity);
            let nd: Digits = idx.iter().map(|p| d[p - 1]).collect();
            let j = self.index(&nd);
            out.bits[j / 64] |= 1 << (j % 64);
        }
        Enc::normalize(out)
    }

    fn join(&self, l: &Code, r: &Code, jc: &[JCond]) -> Code {
        let (la, ra) = (l.arity(), r.arity());
        let mut out = self.empty(la + ra);
        let rwidth = self.n().pow(ra as u32);
        let rs: Vec<(usize, Digits)> = r.ones().map(|j| (j, self.digits(j, ra))).collect();
        for i in l.ones() {
            let ld = self.digits(i, la);
            for (j, rd) in &rs {
                if jc.iter().all(|c| ld[c.left - 1] == rd[c.right - 1]) {
                    let k = i * rwidth + j;
                    out.bits[k / 64] |= 1 << (k % 64);
                }
            }
        }
        Enc::normalize(out)
    }

    /// Re-encodes a code over another universe; `None` if it mentions a
    /// constant the target universe lacks.
    fn recode(&self, code: &Code, target: &Enc) -> Option<Code> {
        if code.is_bottom() {
            return Some(Code::bottom());
        }
        let arity = code.arity();
        target.width(arity).ok()?;
        let map: Vec<Option<usize>> = self.consts.iter().map(|c| target.const_index(c)).collect();
        let mut out = target.empty(arity);
        for i in code.ones() {
            let mut j = 0;
            for d in self.digits(i, arity) {
                j = j * target.n() + map[d]?;
            }
            out.bits[j / 64] |= 1 << (j % 64);
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
enum EncCond {
    Const(usize, usize),
    Eq(usize, usize),
}

// ---------------------------------------------------------------------------
// Derivations

type NodeId = u32;

#[derive(Clone, Debug)]
enum Deriv {
    Bottom,
    Base(String),
    Select(Cond, NodeId),
    Project(Vec<usize>, NodeId),
    Join(Vec<JCond>, NodeId, NodeId),
    Union(NodeId, NodeId),
}

#[derive(Clone, Debug)]
struct Node {
    deriv: Deriv,
    size: usize,
}

fn build_term(arena: &[Node], id: NodeId) -> QueryTerm {
    match &arena[id as usize].deriv {
        Deriv::Bottom => QueryTerm::Bottom,
        Deriv::Base(n) => QueryTerm::rel(n.clone()),
        Deriv::Select(c, x) => QueryTerm::select(vec![c.clone()], build_term(arena, *x)),
        Deriv::Project(p, x) => QueryTerm::project(p.clone(), build_term(arena, *x)),
        Deriv::Join(j, l, r) => QueryTerm::join(j.clone(), build_term(arena, *l), build_term(arena, *r)),
        Deriv::Union(l, r) => QueryTerm::union(build_term(arena, *l), build_term(arena, *r)),
    }
}

// ---------------------------------------------------------------------------
// Saturation

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    popcount: u32,
    code: Code,
    size: usize,
    seq: u64,
}

struct Saturator<'a> {
    enc: &'a Enc,
    bound: Bound,
    arena: &'a mut Vec<Node>,
    members: HashMap<Code, NodeId>,
    by_arity: Vec<Vec<Code>>,
    generators: Vec<(Code, NodeId)>,
    heap: BinaryHeap<Reverse<Candidate>>,
    pending: HashMap<u64, Deriv>,
    seq: u64,
    conds: Vec<Vec<(Cond, EncCond)>>,
    projections: Vec<Vec<Vec<usize>>>,
    jconds: HashMap<(usize, usize), Vec<Vec<JCond>>>,
    total_hint: usize,
}

impl<'a> Saturator<'a> {
    fn new(enc: &'a Enc, bound: Bound, arena: &'a mut Vec<Node>, constants: &BTreeSet<DomainConst>, total_hint: usize) -> Self {
        let k = bound.arity;
        let mut conds = vec![Vec::new(); k + 1];
        let mut projections = vec![Vec::new(); k + 1];
        for (a, slot) in conds.iter_mut().enumerate().skip(1) {
            for c in query::single_conds(a, constants) {
                let enc_c = match &c {
                    Cond::Const(i, v) => EncCond::Const(i - 1, enc.const_index(v).expect("constant in universe")),
                    Cond::Eq(i, j) => EncCond::Eq(i - 1, j - 1),
                };
                slot.push((c, enc_c));
            }
            projections[a] = query::projection_lists(a, k)
                .into_iter()
                .filter(|p| !(p.len() == a && p.iter().enumerate().all(|(i, x)| *x == i + 1)))
                .collect();
        }
        let mut jconds = HashMap::default();
        for l in 1..k {
            for r in 1..=k - l {
                jconds.insert((l, r), query::jcond_lists(l, r));
            }
        }
        let mut members = HashMap::default();
        members.insert(Code::bottom(), 0);
        Saturator {
            enc,
            bound,
            arena,
            members,
            by_arity: vec![Vec::new(); k + 1],
            generators: Vec::new(),
            heap: BinaryHeap::new(),
            pending: HashMap::default(),
            seq: 0,
            conds,
            projections,
            jconds,
            total_hint,
        }
    }

    fn push(&mut self, code: Code, deriv: Deriv, size: usize) {
        if code.is_bottom() {
            return;
        }
        let seq = self.seq;
        self.seq += 1;
        self.pending.insert(seq, deriv);
        self.heap.push(Reverse(Candidate {
            popcount: code.popcount(),
            code,
            size,
            seq,
        }));
    }

    fn size_of(&self, id: NodeId) -> usize {
        self.arena[id as usize].size
    }

    fn add_node(&mut self, deriv: Deriv, size: usize) -> NodeId {
        self.arena.push(Node { deriv, size });
        (self.arena.len() - 1) as NodeId
    }

    fn improve(&mut self, id: NodeId, deriv: Deriv, size: usize) {
        // derivation edges always point to strictly smaller sizes, so
        // replacing with a smaller derivation cannot create a cycle
        if size < self.arena[id as usize].size {
            self.arena[id as usize] = Node { deriv, size };
        }
    }

    fn check_ceiling(&self) -> Result<()> {
        if self.members.len() + self.total_hint > self.bound.max_views {
            Err(Error::ResourceLimit {
                limit: self.bound.max_views,
            })
        } else {
            Ok(())
        }
    }

    fn run(&mut self) -> Result<()> {
        while let Some(Reverse(cand)) = self.heap.pop() {
            let deriv = self.pending.remove(&cand.seq).expect("pending derivation");
            if let Some(&id) = self.members.get(&cand.code) {
                self.improve(id, deriv, cand.size);
                continue;
            }
            let x = cand.code;
            let a = x.arity();
            let xid = self.add_node(deriv, cand.size);

            // unions with every member of the same arity
            let existing = self.by_arity[a].len();
            for i in 0..existing {
                let other = self.by_arity[a][i].clone();
                let u = other.union(&x);
                if u == other {
                    continue;
                }
                let oid = self.members[&other];
                let size = self.size_of(oid) + cand.size + 1;
                match self.members.get(&u) {
                    Some(&uid) => self.improve(uid, Deriv::Union(oid, xid), size),
                    None => {
                        let uid = self.add_node(Deriv::Union(oid, xid), size);
                        self.members.insert(u.clone(), uid);
                        self.by_arity[a].push(u);
                    }
                }
            }
            self.members.insert(x.clone(), xid);
            self.by_arity[a].push(x.clone());
            self.check_ceiling()?;

            // non-union operators on the new generator
            let size = cand.size + 1;
            for ci in 0..self.conds[a].len() {
                let r = self.enc.select(&x, &self.conds[a][ci].1);
                if r != x {
                    let c = self.conds[a][ci].0.clone();
                    self.push(r, Deriv::Select(c, xid), size);
                }
            }
            for pi in 0..self.projections[a].len() {
                let p = self.projections[a][pi].clone();
                let r = self.enc.project(&x, &p);
                self.push(r, Deriv::Project(p, xid), size);
            }
            self.generators.push((x.clone(), xid));
            for gi in 0..self.generators.len() {
                let (g, gid) = self.generators[gi].clone();
                let b = g.arity();
                if a + b > self.bound.arity {
                    continue;
                }
                let gsize = self.size_of(gid);
                for jc in self.jconds[&(a, b)].clone() {
                    let r = self.enc.join(&x, &g, &jc);
                    self.push(r, Deriv::Join(jc.clone(), xid, gid), size + gsize);
                }
                if gid != xid {
                    for jc in self.jconds[&(b, a)].clone() {
                        let r = self.enc.join(&g, &x, &jc);
                        self.push(r, Deriv::Join(jc, gid, xid), size + gsize);
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Closed sets

/// A saturated set of views with a witness term for each member.
pub struct ClosedSet {
    enc: Enc,
    bound: Bound,
    arena: Arc<Vec<Node>>,
    members: HashMap<Code, NodeId>,
    /// Sorted non-⊥ members of each component, when there are several.
    parts: Option<Arc<Vec<Vec<Code>>>>,
    base_name: String,
    sorted: OnceLock<Vec<View>>,
}

impl std::fmt::Debug for ClosedSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedSet")
            .field("base", &self.base_name)
            .field("bound", &self.bound.arity)
            .field("views", &self.len())
            .finish()
    }
}

impl ClosedSet {
    pub fn bound(&self) -> Bound {
        self.bound
    }

    /// Name of the instance the witnesses refer to.
    pub fn base_name(&self) -> &str {
        &self.base_name
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false: ⊥ is a member of every closed set.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in canonical view order, ⊥ first.
    pub fn views(&self) -> &[View] {
        self.sorted.get_or_init(|| {
            // tuple order is index order, so sorting by (arity, set bit
            // positions) gives the canonical view order without comparing views
            let mut keyed: Vec<(usize, Vec<usize>, &Code)> =
                self.members.keys().map(|c| (c.arity(), c.ones().collect(), c)).collect();
            keyed.sort_unstable_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
            keyed.into_iter().map(|(_, _, c)| self.enc.decode(c)).collect()
        })
    }

    pub fn contains(&self, v: &View) -> bool {
        self.enc.encode(v).is_some_and(|c| self.members.contains_key(&c))
    }

    /// Witness term over the base instance, if `v` is a member.
    pub fn witness(&self, v: &View) -> Option<QueryTerm> {
        let code = self.enc.encode(v)?;
        self.members.get(&code).map(|id| build_term(&self.arena, *id))
    }

    fn codes_in(&self, other: &ClosedSet) -> impl Iterator<Item = Option<Code>> + '_ {
        let same = self.enc.consts == other.enc.consts;
        let target = other.enc.clone();
        self.members.keys().map(move |c| {
            if same {
                Some(c.clone())
            } else {
                self.enc.recode(c, &target)
            }
        })
    }

    pub fn is_subset(&self, other: &ClosedSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        self.codes_in(other)
            .all(|c| c.is_some_and(|c| other.members.contains_key(&c)))
    }

    /// Extensional equality of the member sets.
    pub fn same_views(&self, other: &ClosedSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    /// Members of both sets, with witnesses from `self`.
    pub fn intersect(&self, other: &ClosedSet) -> ClosedSet {
        let members = self
            .members
            .iter()
            .zip(self.codes_in(other))
            .filter(|(_, c)| c.as_ref().is_some_and(|c| other.members.contains_key(c)))
            .map(|((c, id), _)| (c.clone(), *id))
            .collect::<HashMap<Code, NodeId>>();
        let parts = self.parts.as_ref().map(|parts| {
            let kept = parts.iter().map(|p| p.iter().filter(|c| members.contains_key(*c)).cloned().collect());
            Arc::new(kept.collect())
        });
        ClosedSet {
            enc: self.enc.clone(),
            bound: self.bound,
            arena: self.arena.clone(),
            members,
            parts,
            base_name: self.base_name.clone(),
            sorted: OnceLock::new(),
        }
    }

    /// The closed set as an instance: one relation per non-⊥ view, named
    /// `v1, v2, ...` in canonical view order, over the set's universe. A set
    /// closed per component keeps its components, so a view shared by two
    /// components appears once in each.
    ///
    /// Materializations are interned: equal closed sets yield the same
    /// `Arc<Instance>` while any copy of it is alive.
    pub fn as_instance(&self) -> Arc<Instance> {
        let mut codes: Vec<Code> = self.members.keys().cloned().collect();
        codes.sort_unstable();
        let key = (self.enc.consts.clone(), codes, self.parts.clone());
        let mut table = materializations().lock().unwrap();
        if let Some(hit) = table.get(&key).and_then(Weak::upgrade) {
            return hit;
        }
        table.retain(|_, w| w.strong_count() > 0);
        let tagged: Vec<(View, u32)> = match &self.parts {
            None => self.views().iter().filter(|v| !v.is_bottom()).map(|v| (v.clone(), 0)).collect(),
            Some(parts) => {
                let mut all: Vec<(View, u32)> = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    all.extend(part.iter().map(|c| (self.enc.decode(c), i as u32)));
                }
                all.sort_by(|x, y| (x.0.arity(), &x.0, x.1).cmp(&(y.0.arity(), &y.0, y.1)));
                all
            }
        };
        let rels = tagged
            .into_iter()
            .enumerate()
            .map(|(i, (v, component))| {
                (
                    format!("v{}", i + 1),
                    Relation {
                        arity: v.arity(),
                        view: v,
                        component,
                    },
                )
            })
            .collect();
        let domain = self.enc.consts.iter().cloned().collect();
        let inst = Arc::new(Instance::new_trusted(format!("T({})", self.base_name), rels, domain));
        table.insert(key, Arc::downgrade(&inst));
        inst
    }

    /// Union-irreducible members: the smallest set of views whose closure is
    /// this set. Canonical order, ⊥ excluded.
    pub fn generators(&self) -> Vec<View> {
        match &self.parts {
            None => self.generators_of(self.members.keys().filter(|c| !c.is_bottom()).collect()),
            Some(parts) => {
                let mut out: Vec<View> = parts.iter().flat_map(|p| self.generators_of(p.iter().collect())).collect();
                out.sort();
                out.dedup();
                out
            }
        }
    }

    fn generators_of(&self, mut codes: Vec<&Code>) -> Vec<View> {
        codes.sort_by_key(|c| (c.popcount(), (*c).clone()));
        let mut reachable: HashMap<usize, Vec<Code>> = HashMap::default();
        let mut seen: HashSet<Code> = HashSet::default();
        let mut out = Vec::new();
        for c in codes {
            if seen.contains(c) {
                continue;
            }
            let bucket = reachable.entry(c.arity()).or_default();
            let mut fresh = vec![c.clone()];
            for other in bucket.iter() {
                let u = other.union(c);
                if !seen.contains(&u) {
                    fresh.push(u);
                }
            }
            for u in fresh {
                if seen.insert(u.clone()) {
                    bucket.push(u);
                }
            }
            out.push(self.enc.decode(c));
        }
        out.sort();
        out
    }

    /// One line per view: `arity=<n> tuples=<t1;t2;...> witness=<term>`.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for v in self.views() {
            let w = self.witness(v).expect("member has a witness");
            out.push_str(&format!("arity={} tuples={} witness={}\n", v.arity(), v.tuples_text(), w));
        }
        out
    }
}

type MaterializationKey = (Arc<[DomainConst]>, Vec<Code>, Option<Arc<Vec<Vec<Code>>>>);

fn materializations() -> &'static Mutex<HashMap<MaterializationKey, Weak<Instance>>> {
    static TABLE: OnceLock<Mutex<HashMap<MaterializationKey, Weak<Instance>>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

fn universe_of(domain: impl IntoIterator<Item = DomainConst>) -> Enc {
    let set: BTreeSet<DomainConst> = domain.into_iter().collect();
    Enc {
        consts: set.into_iter().collect::<Vec<_>>().into(),
    }
}

fn require_bound(a: &Instance, bound: Bound) -> Result<()> {
    let need = a.max_arity();
    if bound.arity == 0 || need > bound.arity {
        return Err(Error::BoundTooSmall {
            bound: bound.arity,
            required: need.max(1),
        });
    }
    Ok(())
}

fn compute_closure(a: &Instance, bound: Bound) -> Result<ClosedSet> {
    require_bound(a, bound)?;
    // constants per component, in one pass over the tuples
    type Component<'a> = (Vec<(&'a String, &'a Relation)>, HashSet<&'a DomainConst>);
    let mut per_component: BTreeMap<u32, Component> = BTreeMap::new();
    for (name, rel) in a.relations() {
        let entry = per_component.entry(rel.component).or_default();
        entry.0.push((name, rel));
        for t in rel.view.tuples() {
            entry.1.extend(t.items());
        }
    }
    let enc = universe_of(per_component.values().flat_map(|(_, c)| c.iter().map(|c| (*c).clone())));
    for arity in 1..=bound.arity {
        if enc.n() > 0 {
            enc.width(arity)?;
        }
    }
    let mut arena = vec![Node {
        deriv: Deriv::Bottom,
        size: 1,
    }];
    let mut members: HashMap<Code, NodeId> = HashMap::default();
    members.insert(Code::bottom(), 0);
    let mut parts: Vec<Vec<Code>> = Vec::new();

    for (rels, constants) in per_component.values() {
        let constants: BTreeSet<DomainConst> = constants.iter().map(|c| (*c).clone()).collect();
        let mut sat = Saturator::new(&enc, bound, &mut arena, &constants, members.len() - 1);
        for (name, rel) in rels {
            if rel.view.is_bottom() {
                continue;
            }
            let code = enc.encode(&rel.view).expect("relation over the active domain");
            sat.push(code, Deriv::Base((*name).clone()), 1);
        }
        sat.run()?;
        let found = std::mem::take(&mut sat.members);
        drop(sat);
        let mut part: Vec<Code> = found.keys().filter(|c| !c.is_bottom()).cloned().collect();
        part.sort_unstable();
        parts.push(part);
        for (c, id) in found {
            members.entry(c).or_insert(id);
        }
        if members.len() > bound.max_views {
            return Err(Error::ResourceLimit { limit: bound.max_views });
        }
    }

    Ok(ClosedSet {
        enc,
        bound,
        arena: Arc::new(arena),
        members,
        parts: (parts.len() > 1).then(|| Arc::new(parts)),
        base_name: a.name().to_string(),
        sorted: OnceLock::new(),
    })
}

/// The bounded power-view closure of `a`. Results are memoized per instance.
pub fn closure(a: &Instance, bound: Bound) -> Result<Arc<ClosedSet>> {
    if let Some(hit) = a.cached_closure(bound) {
        return Ok(hit);
    }
    let set = Arc::new(compute_closure(a, bound)?);
    a.store_closure(bound, set.clone());
    Ok(set)
}

/// Membership with witness.
pub fn member(s: &ClosedSet, v: &View) -> (bool, Option<QueryTerm>) {
    match s.witness(v) {
        Some(w) => (true, Some(w)),
        None => (false, None),
    }
}

/// Behavioral equivalence at the bound: equal closures.
pub fn equiv(a: &Instance, b: &Instance, bound: Bound) -> Result<bool> {
    Ok(closure(a, bound)?.same_views(&*closure(b, bound)?))
}

/// `a ⪯ b`: the closure of `a` is contained in that of `b`.
pub fn leq(a: &Instance, b: &Instance, bound: Bound) -> Result<bool> {
    Ok(closure(a, bound)?.is_subset(&*closure(b, bound)?))
}

/// Matching: intersection of the two closures.
pub fn match_op(a: &Instance, b: &Instance, bound: Bound) -> Result<ClosedSet> {
    Ok(closure(a, bound)?.intersect(&*closure(b, bound)?))
}

/// The instance holding the relations of both operands. Colliding names from
/// `b` are prefixed `m2.`.
pub fn union_instance(a: &Instance, b: &Instance) -> Instance {
    let mut rels: Vec<(String, Relation)> = a.relations().iter().map(|(n, r)| (n.clone(), r.clone())).collect();
    let mut taken: HashSet<String> = a.relations().keys().cloned().collect();
    for (n, r) in b.relations() {
        let mut name = n.clone();
        while taken.contains(&name) {
            name = format!("m2.{name}");
        }
        taken.insert(name.clone());
        rels.push((name, r.clone()));
    }
    let domain = a.domain().union(b.domain()).cloned().collect();
    Instance::new(format!("{}+{}", a.name(), b.name()), rels, domain).expect("union of valid instances")
}

/// Merging: closure of the union of both operands.
pub fn merge_op(a: &Instance, b: &Instance, bound: Bound) -> Result<Arc<ClosedSet>> {
    closure(&union_instance(a, b), bound)
}

/// Groups the enumerated terms of depth at most `depth` by their evaluation.
pub fn quotient_term_algebra(a: &Instance, depth: usize, bound: Bound) -> Result<BTreeMap<View, Vec<QueryTerm>>> {
    let terms = query::enumerate_terms(a, depth, bound.arity)?;
    query::group_by_eval(terms, a)
}

/// Disjoint union: relations renamed `L.<name>` and `R.<name>`, kept in
/// separate components so that no term may combine them.
pub fn coproduct(a: &Instance, b: &Instance) -> Instance {
    let left_max = a.relations().values().map(|r| r.component).max().map_or(0, |m| m + 1);
    let mut rels = Vec::new();
    for (n, r) in a.relations() {
        rels.push((format!("L.{n}"), r.clone()));
    }
    for (n, r) in b.relations() {
        let mut r = r.clone();
        r.component += left_max;
        rels.push((format!("R.{n}"), r));
    }
    let domain = a.domain().union(b.domain()).cloned().collect();
    Instance::new(format!("{}+{}", a.name(), b.name()), rels, domain).expect("coproduct of valid instances")
}

/// Iterates `S(n+1) = T(A ∪ S(n))` from `S(0) = {⊥}` until it is stable and
/// returns the chain.
pub fn merge_fixpoint_iterate(a: &Instance, bound: Bound) -> Result<Vec<Arc<ClosedSet>>> {
    require_bound(a, bound)?;
    let mut chain = vec![closure(&Instance::bottom(), bound)?];
    loop {
        let last = chain.last().expect("nonempty chain");
        let next = merge_op(a, &last.as_instance(), bound)?;
        if next.same_views(last) {
            return Ok(chain);
        }
        chain.push(next);
    }
}

/// Closure of an explicit list of views, each tagged with a component.
type FluxKey = (Bound, Vec<(View, u32)>);

fn flux_table() -> &'static Mutex<HashMap<FluxKey, Weak<ClosedSet>>> {
    static TABLE: OnceLock<Mutex<HashMap<FluxKey, Weak<ClosedSet>>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

/// Closure of a bare set of views, each tagged with its component. Views in
/// different components never combine. Results are interned like
/// materializations.
pub(crate) fn closure_of_views(views: &[(View, u32)], bound: Bound) -> Result<Arc<ClosedSet>> {
    let mut key: Vec<(View, u32)> = views.iter().filter(|(v, _)| !v.is_bottom()).cloned().collect();
    key.sort();
    key.dedup();
    let key = (bound, key);
    if let Some(hit) = flux_table().lock().unwrap().get(&key).and_then(Weak::upgrade) {
        return Ok(hit);
    }
    let mut domain = BTreeSet::new();
    let rels: Vec<(String, Relation)> = key
        .1
        .iter()
        .enumerate()
        .map(|(i, (v, comp))| {
            for t in v.tuples() {
                domain.extend(t.items().iter().cloned());
            }
            (
                format!("f{}", i + 1),
                Relation {
                    arity: v.arity(),
                    view: v.clone(),
                    component: *comp,
                },
            )
        })
        .collect();
    let inst = Instance::new_trusted("flux", rels, domain);
    let set = Arc::new(compute_closure(&inst, bound)?);
    let mut table = flux_table().lock().unwrap();
    table.retain(|_, w| w.strong_count() > 0);
    table.insert(key, Arc::downgrade(&set));
    Ok(set)
}
