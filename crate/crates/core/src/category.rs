//! Morphisms between instances: sets of view-maps, their information flux,
//! composition, duality and the constructions derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::closure::{closure, closure_of_views, Bound, ClosedSet};
use crate::error::{Error, Result};
use crate::query::{self, QueryTerm};
use crate::relcore::{Instance, View};

/// An elementary query arrow `q: A -> TA` together with its cached result.
#[derive(Clone, Debug)]
pub struct ViewMap {
    term: QueryTerm,
    source: Arc<Instance>,
    result: View,
    inputs: BTreeSet<String>,
    target_name: Option<String>,
    component: Option<u32>,
}

impl ViewMap {
    pub fn term(&self) -> &QueryTerm {
        &self.term
    }

    pub fn source(&self) -> &Arc<Instance> {
        &self.source
    }

    pub fn result(&self) -> &View {
        &self.result
    }

    /// Relation names the term reads.
    pub fn inputs(&self) -> &BTreeSet<String> {
        &self.inputs
    }

    pub fn target_name(&self) -> Option<&str> {
        self.target_name.as_deref()
    }

    /// Same map, declared to land on the named target relation.
    pub fn landing_on(mut self, name: impl Into<String>) -> ViewMap {
        self.target_name = Some(name.into());
        self
    }
}

pub fn make_viewmap(term: QueryTerm, source: impl Into<Arc<Instance>>) -> Result<ViewMap> {
    let source = source.into();
    let result = query::eval(&term, &source)?;
    let component = query::term_component(&term, &source)?;
    Ok(ViewMap {
        inputs: term.relation_names(),
        term,
        source,
        result,
        target_name: None,
        component,
    })
}

/// Identity map on a relation name; the caller guarantees the name exists.
fn rel_map(source: &Arc<Instance>, name: &str) -> ViewMap {
    let rel = source.relation(name).expect("relation exists");
    ViewMap {
        term: QueryTerm::rel(name),
        source: source.clone(),
        result: rel.view.clone(),
        inputs: BTreeSet::from([name.to_string()]),
        target_name: None,
        component: Some(rel.component),
    }
}

#[derive(Clone)]
enum Body {
    Atomic,
    Composed { outer: Morphism, inner: Morphism },
}

struct Inner {
    src: Arc<Instance>,
    tgt: Arc<Instance>,
    bound: Bound,
    body: Body,
    // for an atomic arrow its own maps, for a composite the outer maps kept
    // after pruning
    maps: Vec<ViewMap>,
    flux: Arc<ClosedSet>,
}

/// A morphism of the DB category. Cheap to clone.
#[derive(Clone)]
pub struct Morphism(Arc<Inner>);

impl Morphism {
    pub fn src(&self) -> &Arc<Instance> {
        &self.0.src
    }

    pub fn tgt(&self) -> &Arc<Instance> {
        &self.0.tgt
    }

    pub fn bound(&self) -> Bound {
        self.0.bound
    }

    /// Top-level view-maps. For a composite, the outer maps kept by pruning.
    pub fn maps(&self) -> &[ViewMap] {
        &self.0.maps
    }

    pub fn is_composed(&self) -> bool {
        matches!(self.0.body, Body::Composed { .. })
    }

    /// `(outer, inner)` for a composite.
    pub fn parts(&self) -> Option<(&Morphism, &Morphism)> {
        match &self.0.body {
            Body::Composed { outer, inner } => Some((outer, inner)),
            Body::Atomic => None,
        }
    }

    pub fn flux(&self) -> &Arc<ClosedSet> {
        &self.0.flux
    }

    /// Result views of the top-level maps.
    pub fn outputs(&self) -> BTreeSet<View> {
        self.0.maps.iter().map(|m| m.result.clone()).collect()
    }

    /// Relation names read by the top-level maps.
    pub fn inputs(&self) -> BTreeSet<String> {
        self.0.maps.iter().flat_map(|m| m.inputs.iter().cloned()).collect()
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("src", &self.0.src.name())
            .field("tgt", &self.0.tgt.name())
            .field("maps", &self.0.maps.len())
            .field("flux", &self.0.flux.len())
            .finish()
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {}", self.0.src.name(), self.0.tgt.name())?;
        for m in &self.0.maps {
            write!(f, "  {} = {}", m.term, m.result.tuples_text())?;
            match &m.target_name {
                Some(n) => writeln!(f, " => {n}")?,
                None => writeln!(f)?,
            }
        }
        Ok(())
    }
}

fn check_bound(a: &Instance, bound: Bound) -> Result<()> {
    let need = a.max_arity();
    if bound.arity() == 0 || need > bound.arity() {
        return Err(Error::BoundTooSmall {
            bound: bound.arity(),
            required: need.max(1),
        });
    }
    Ok(())
}

/// Flux of a set of maps: their results closed, with views kept apart when
/// they come from different components of either endpoint.
fn atomic_flux(maps: &[ViewMap], tgt: &Instance, bound: Bound) -> Result<Arc<ClosedSet>> {
    let mut tags: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut views = Vec::with_capacity(maps.len());
    for m in maps {
        let Some(src_comp) = m.component else { continue };
        if m.result.is_bottom() {
            continue;
        }
        let tgt_comp = m
            .target_name
            .as_deref()
            .or_else(|| tgt.relation_named_for(&m.result))
            .and_then(|n| tgt.relation(n))
            .map_or(0, |r| r.component);
        let next = tags.len() as u32;
        let tag = *tags.entry((src_comp, tgt_comp)).or_insert(next);
        views.push((m.result.clone(), tag));
    }
    closure_of_views(&views, bound)
}

fn atomic_unchecked(src: Arc<Instance>, tgt: Arc<Instance>, maps: Vec<ViewMap>, bound: Bound, flux: Arc<ClosedSet>) -> Morphism {
    Morphism(Arc::new(Inner {
        src,
        tgt,
        bound,
        body: Body::Atomic,
        maps,
        flux,
    }))
}

pub fn make_morphism(
    src: impl Into<Arc<Instance>>,
    tgt: impl Into<Arc<Instance>>,
    maps: Vec<ViewMap>,
    bound: Bound,
) -> Result<Morphism> {
    let src = src.into();
    let tgt = tgt.into();
    check_bound(&src, bound)?;
    check_bound(&tgt, bound)?;
    for m in &maps {
        if !Arc::ptr_eq(&m.source, &src) && *m.source != *src {
            return Err(Error::EndpointMismatch(format!(
                "view-map {} reads {}, not {}",
                m.term,
                m.source.name(),
                src.name()
            )));
        }
        let need = query::max_subterm_arity(&m.term, &src)?;
        if need > bound.arity() {
            return Err(Error::BoundTooSmall {
                bound: bound.arity(),
                required: need,
            });
        }
        let lands = match &m.target_name {
            Some(name) => {
                let rel = tgt.relation(name).ok_or_else(|| Error::UnknownRelation(name.clone()))?;
                rel.view == m.result
            }
            None => tgt.contains_view(&m.result),
        };
        if !lands {
            return Err(Error::ResultNotInTarget { term: m.term.to_string() });
        }
    }
    let flux = atomic_flux(&maps, &tgt, bound)?;
    Ok(atomic_unchecked(src, tgt, maps, bound, flux))
}

/// The arrow with no view-maps; its flux is `{⊥}`.
pub fn empty_arrow(src: impl Into<Arc<Instance>>, tgt: impl Into<Arc<Instance>>, bound: Bound) -> Result<Morphism> {
    make_morphism(src, tgt, Vec::new(), bound)
}

pub fn flux(f: &Morphism) -> &Arc<ClosedSet> {
    f.flux()
}

/// `g ∘ f`. The outer maps are pruned to those reading a relation whose
/// extension is one of the results of `f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if g.bound() != f.bound() {
        return Err(Error::BoundMismatch {
            left: g.bound().arity(),
            right: f.bound().arity(),
        });
    }
    if !g.src().ext_eq(f.tgt()) {
        return Err(Error::EndpointMismatch(format!(
            "source {} of the outer arrow differs from target {} of the inner one",
            g.src().name(),
            f.tgt().name()
        )));
    }
    let delivered = f.outputs();
    let kept = g
        .maps()
        .iter()
        .filter(|m| {
            m.inputs
                .iter()
                .any(|n| g.src().relation(n).is_some_and(|r| delivered.contains(&r.view)))
        })
        .cloned()
        .collect();
    let (gf, ff) = (g.flux(), f.flux());
    let flux = if Arc::ptr_eq(gf, ff) {
        gf.clone()
    } else {
        Arc::new(ff.intersect(gf))
    };
    Ok(Morphism(Arc::new(Inner {
        src: f.src().clone(),
        tgt: g.tgt().clone(),
        bound: f.bound(),
        body: Body::Composed {
            outer: g.clone(),
            inner: f.clone(),
        },
        maps: kept,
        flux,
    })))
}

pub fn identity(a: impl Into<Arc<Instance>>, bound: Bound) -> Result<Morphism> {
    let a = a.into();
    check_bound(&a, bound)?;
    let maps = a.relations().keys().map(|n| rel_map(&a, n)).collect();
    let flux = closure(&a, bound)?;
    Ok(atomic_unchecked(a.clone(), a, maps, bound, flux))
}

/// Identity maps on every relation of `src`, landing in `tgt`, whose
/// relations must include all of them. Used between materializations that
/// are extensionally equal, where the flux is the closure of `src`.
pub(crate) fn identity_between(src: Arc<Instance>, tgt: Arc<Instance>, bound: Bound) -> Result<Morphism> {
    check_bound(&src, bound)?;
    check_bound(&tgt, bound)?;
    let mut maps = Vec::with_capacity(src.relations().len());
    for (n, r) in src.relations() {
        if !tgt.contains_view(&r.view) {
            return Err(Error::ResultNotInTarget { term: n.clone() });
        }
        maps.push(rel_map(&src, n));
    }
    let flux = closure(&src, bound)?;
    Ok(atomic_unchecked(src, tgt, maps, bound, flux))
}

/// Materialized closure of `a`: one relation per non-⊥ view.
pub fn materialize(a: &Instance, bound: Bound) -> Result<Arc<Instance>> {
    Ok(closure(a, bound)?.as_instance())
}

/// `η_A: A -> TA`, with `TA` materialized.
pub fn eta(a: impl Into<Arc<Instance>>, bound: Bound) -> Result<(Morphism, Arc<Instance>)> {
    let a = a.into();
    check_bound(&a, bound)?;
    let set = closure(&a, bound)?;
    let ta = set.as_instance();
    let maps = a.relations().keys().map(|n| rel_map(&a, n)).collect();
    Ok((atomic_unchecked(a, ta.clone(), maps, bound, set), ta))
}

/// `η_A⁻¹: TA -> A`: identity maps on the relations of `TA` that already are
/// relations of `A`.
pub fn eta_inv(a: impl Into<Arc<Instance>>, bound: Bound) -> Result<Morphism> {
    let a = a.into();
    check_bound(&a, bound)?;
    let set = closure(&a, bound)?;
    let ta = set.as_instance();
    let maps = a
        .relations()
        .values()
        .filter(|r| !r.view.is_bottom())
        .filter_map(|r| ta.relation_named_for(&r.view))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|n| rel_map(&ta, n))
        .collect();
    Ok(atomic_unchecked(ta, a, maps, bound, set))
}

/// Flux equality; endpoints are not compared.
pub fn morphism_equiv(f: &Morphism, g: &Morphism) -> bool {
    Arc::ptr_eq(f.flux(), g.flux()) || f.flux().same_views(g.flux())
}

fn same_closure(a: &Instance, b: &Instance, bound: Bound) -> Result<bool> {
    if std::ptr::eq(a, b) {
        return Ok(true);
    }
    let (x, y) = (closure(a, bound)?, closure(b, bound)?);
    Ok(Arc::ptr_eq(&x, &y) || x.same_views(&y))
}

/// Arrow equality: equivalent, with extensionally equal endpoint closures.
pub fn same_arrow(f: &Morphism, g: &Morphism) -> Result<bool> {
    Ok(morphism_equiv(f, g)
        && same_closure(f.src(), g.src(), f.bound())?
        && same_closure(f.tgt(), g.tgt(), f.bound())?)
}

pub fn is_epi(f: &Morphism) -> Result<bool> {
    let t = closure(f.tgt(), f.bound())?;
    Ok(Arc::ptr_eq(&t, f.flux()) || t.same_views(f.flux()))
}

pub fn is_mono(f: &Morphism) -> Result<bool> {
    let s = closure(f.src(), f.bound())?;
    Ok(Arc::ptr_eq(&s, f.flux()) || s.same_views(f.flux()))
}

pub fn is_iso(f: &Morphism) -> Result<bool> {
    Ok(is_mono(f)? && is_epi(f)?)
}

/// An arrow `src -> tgt` whose flux is the closure of `views`. Each view is
/// read off its witness over `src`. If every view is a relation of `tgt` the
/// arrow is atomic; otherwise it lands in the materialized closure of `tgt`
/// and is brought back by `η⁻¹`.
pub fn arrow_onto(src: impl Into<Arc<Instance>>, tgt: impl Into<Arc<Instance>>, views: &[View], bound: Bound) -> Result<Morphism> {
    let src = src.into();
    let tgt = tgt.into();
    check_bound(&tgt, bound)?;
    let over_src = closure(&src, bound)?;
    let mut maps = Vec::with_capacity(views.len());
    for v in views.iter().filter(|v| !v.is_bottom()) {
        let w = over_src.witness(v).ok_or_else(|| Error::FluxViewNotExpressible {
            view: v.tuples_text(),
            bound: bound.arity(),
        })?;
        maps.push(make_viewmap(w, src.clone())?);
    }
    if maps.iter().all(|m| tgt.relation_named_for(&m.result).is_some()) {
        return make_morphism(src, tgt, maps, bound);
    }
    let over_tgt = closure(&tgt, bound)?;
    if let Some(m) = maps.iter().find(|m| !over_tgt.contains(&m.result)) {
        return Err(Error::FluxViewNotExpressible {
            view: m.result.tuples_text(),
            bound: bound.arity(),
        });
    }
    let ttgt = over_tgt.as_instance();
    let into_closure = make_morphism(src, ttgt, maps, bound)?;
    compose(&eta_inv(tgt, bound)?, &into_closure)
}

/// The flux-full arrow `a -> b`: its flux is all of `Ta ∩ Tb`.
pub fn canonical_arrow(a: impl Into<Arc<Instance>>, b: impl Into<Arc<Instance>>, bound: Bound) -> Result<Morphism> {
    let (a, b) = (a.into(), b.into());
    let common = crate::closure::match_op(&a, &b, bound)?;
    arrow_onto(a, b, &common.generators(), bound)
}

/// The dual arrow `tgt(f) -> src(f)` carrying the same flux.
pub fn invert(f: &Morphism) -> Result<Morphism> {
    arrow_onto(f.tgt().clone(), f.src().clone(), &f.flux().generators(), f.bound())
}

/// Epi-mono factorization through the materialized flux.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub epi: Morphism,
    pub mid: Arc<Instance>,
    pub mono: Morphism,
}

pub fn factorize(f: &Morphism) -> Result<Factorization> {
    let bound = f.bound();
    let mid = f.flux().as_instance();
    let gens = f.flux().generators();
    let epi = arrow_onto(f.src().clone(), mid.clone(), &gens, bound)?;
    let mono = arrow_onto(mid.clone(), f.tgt().clone(), &gens, bound)?;
    Ok(Factorization { epi, mid, mono })
}

/// `Tf: TA -> TB`: identity maps on every view of the flux.
pub fn lift_t(f: &Morphism) -> Result<Morphism> {
    let bound = f.bound();
    let ta = materialize(f.src(), bound)?;
    let tb = materialize(f.tgt(), bound)?;
    let mut maps = Vec::with_capacity(f.flux().len());
    for v in f.flux().views().iter().filter(|v| !v.is_bottom()) {
        let (Some(n), true) = (ta.relation_named_for(v), tb.relation_named_for(v).is_some()) else {
            return Err(Error::FluxViewNotExpressible {
                view: v.tuples_text(),
                bound: bound.arity(),
            });
        };
        maps.push(rel_map(&ta, n));
    }
    Ok(atomic_unchecked(ta, tb, maps, bound, f.flux().clone()))
}

/// The total function on `closure(src)` that keeps flux views and sends
/// everything else to ⊥.
pub fn skeletalize(f: &Morphism) -> Result<BTreeMap<View, View>> {
    let over_src = closure(f.src(), f.bound())?;
    Ok(over_src
        .views()
        .iter()
        .map(|v| {
            let image = if f.flux().contains(v) { v.clone() } else { View::Bottom };
            (v.clone(), image)
        })
        .collect())
}

/// A square `h2 ∘ f = g ∘ h1` with `f: A -> B`, `g: C -> D`, `h1: A -> C`,
/// `h2: B -> D`.
#[derive(Clone, Debug)]
pub struct CommSquare {
    pub f: Morphism,
    pub g: Morphism,
    pub h1: Morphism,
    pub h2: Morphism,
}

impl CommSquare {
    pub fn commutes(&self) -> Result<bool> {
        let left = compose(&self.h2, &self.f)?;
        let right = compose(&self.g, &self.h1)?;
        same_arrow(&left, &right)
    }
}

/// The arrow between the materialized fluxes of `f` and `g` induced by a
/// commuting square.
pub fn te_arrow(sq: &CommSquare) -> Result<Morphism> {
    if !sq.commutes()? {
        return Err(Error::SquareNotCommuting);
    }
    let bound = sq.f.bound();
    let through = compose(&sq.h2, &sq.f)?;
    let from = sq.f.flux().as_instance();
    let to = sq.g.flux().as_instance();
    let maps = through
        .flux()
        .views()
        .iter()
        .filter(|v| !v.is_bottom())
        .map(|v| {
            from.relation_named_for(v)
                .filter(|_| to.relation_named_for(v).is_some())
                .map(|n| rel_map(&from, n))
                .ok_or_else(|| Error::FluxViewNotExpressible {
                    view: v.tuples_text(),
                    bound: bound.arity(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    make_morphism(from, to, maps, bound)
}

/// Parses the `.maps` format: one `<term>` or `<term> => <relation>` per
/// line, `#` comments.
pub fn parse_maps(text: &str, src: &Arc<Instance>) -> Result<Vec<ViewMap>> {
    let mut maps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (term_text, target) = match line.split_once("=>") {
            Some((t, n)) => {
                let n = n.trim();
                if n.is_empty() || n.contains(char::is_whitespace) {
                    return Err(Error::syntax(i + 1, raw.find("=>").unwrap_or(0) + 3, "expected one relation name after =>"));
                }
                (t, Some(n.to_string()))
            }
            None => (line, None),
        };
        let term = query::parse_term(term_text).map_err(|e| match e {
            Error::Syntax { column, message, .. } => Error::syntax(i + 1, column, message),
            other => other,
        })?;
        let mut m = make_viewmap(term, src.clone())?;
        if let Some(n) = target {
            m = m.landing_on(n);
        }
        maps.push(m);
    }
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_term;

    fn k(n: usize) -> Bound {
        Bound::new(n)
    }

    fn ab() -> Arc<Instance> {
        Arc::new(Instance::of("A", &["a", "b"], &[("r", View::of(1, &[&["a"], &["b"]]))]))
    }

    fn sa() -> Arc<Instance> {
        Arc::new(Instance::of("B", &["a"], &[("s", View::of(1, &[&["a"]]))]))
    }

    fn select_a(a: &Arc<Instance>, b: &Arc<Instance>) -> Morphism {
        let m = make_viewmap(parse_term("select[1=a](r)").unwrap(), a.clone()).unwrap();
        make_morphism(a.clone(), b.clone(), vec![m], k(1)).unwrap()
    }

    #[test]
    fn viewmap_caches_result_and_inputs() {
        let a = ab();
        let m = make_viewmap(QueryTerm::rel("r"), a.clone()).unwrap();
        assert_eq!(m.inputs(), &BTreeSet::from(["r".to_string()]));
        assert_eq!(m.result(), &a.relation("r").unwrap().view);
        let s = make_viewmap(parse_term("select[1=a](r)").unwrap(), a.clone()).unwrap();
        assert_eq!(s.result(), &View::of(1, &[&["a"]]));
        assert!(matches!(
            make_viewmap(parse_term("project[3](r)").unwrap(), a),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_arrow_has_bottom_flux() {
        let f = empty_arrow(ab(), sa(), k(1)).unwrap();
        assert_eq!(f.flux().views(), &[View::Bottom]);
    }

    #[test]
    fn select_one_of_two() {
        let (a, b) = (ab(), sa());
        let f = select_a(&a, &b);
        assert_eq!(f.flux().views(), &[View::Bottom, View::of(1, &[&["a"]])]);
        assert!(is_epi(&f).unwrap());
        assert!(!is_mono(&f).unwrap());
        let fac = factorize(&f).unwrap();
        assert_eq!(closure(&fac.mid, k(1)).unwrap().views(), f.flux().views());
        assert!(is_epi(&fac.epi).unwrap() && is_mono(&fac.mono).unwrap());
        assert!(same_arrow(&compose(&fac.mono, &fac.epi).unwrap(), &f).unwrap());
    }

    #[test]
    fn result_outside_target_is_rejected() {
        let a = ab();
        let m = make_viewmap(QueryTerm::rel("r"), a.clone()).unwrap();
        assert!(matches!(
            make_morphism(a, sa(), vec![m], k(1)),
            Err(Error::ResultNotInTarget { .. })
        ));
    }

    #[test]
    fn identity_and_eta() {
        let a = ab();
        let id = identity(a.clone(), k(1)).unwrap();
        assert!(is_iso(&id).unwrap());
        assert!(same_arrow(&compose(&id, &id).unwrap(), &id).unwrap());
        let (e, ta) = eta(a.clone(), k(1)).unwrap();
        assert_eq!(ta.relations().len(), 3);
        assert!(is_iso(&e).unwrap());
        let back = eta_inv(a.clone(), k(1)).unwrap();
        assert!(same_arrow(&compose(&back, &e).unwrap(), &id).unwrap());

        let bot = Arc::new(Instance::bottom());
        let (e, tb) = eta(bot.clone(), k(1)).unwrap();
        assert!(tb.relations().is_empty());
        assert_eq!(e.flux().views(), &[View::Bottom]);
        assert!(is_iso(&identity(bot, k(1)).unwrap()).unwrap());
    }

    #[test]
    fn composition_intersects_and_prunes() {
        let (a, b) = (ab(), sa());
        let f = select_a(&a, &b);
        let c = Arc::new(Instance::of("C", &["a"], &[("t", View::of(1, &[&["a"]]))]));
        let g = make_morphism(b.clone(), c, vec![make_viewmap(QueryTerm::rel("s"), b.clone()).unwrap()], k(1)).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert!(gf.flux().same_views(&f.flux().intersect(g.flux())));
        assert_eq!(gf.maps().len(), 1);

        let e = empty_arrow(b.clone(), b.clone(), k(1)).unwrap();
        let ef = compose(&e, &f).unwrap();
        assert_eq!(ef.flux().views(), &[View::Bottom]);
        assert!(ef.maps().is_empty());

        assert!(matches!(compose(&f, &g), Err(Error::EndpointMismatch(_))));
        let f2 = make_morphism(a.clone(), b.clone(), vec![], k(2)).unwrap();
        assert!(matches!(compose(&g, &f2), Err(Error::BoundMismatch { .. })));
    }

    #[test]
    fn invert_preserves_flux() {
        let (a, b) = (ab(), sa());
        let f = select_a(&a, &b);
        let inv = invert(&f).unwrap();
        assert!(Arc::ptr_eq(inv.src(), &b) && Arc::ptr_eq(inv.tgt(), &a));
        assert!(morphism_equiv(&inv, &f));
        assert!(is_mono(&inv).unwrap());
        assert!(same_arrow(&invert(&inv).unwrap(), &f).unwrap());
        let id = identity(a, k(1)).unwrap();
        assert!(same_arrow(&invert(&id).unwrap(), &id).unwrap());
    }

    #[test]
    fn lift_and_skeleton() {
        let (a, b) = (ab(), sa());
        let f = select_a(&a, &b);
        let tf = lift_t(&f).unwrap();
        assert!(morphism_equiv(&tf, &f));
        assert_eq!(is_epi(&tf).unwrap(), is_epi(&f).unwrap());
        assert_eq!(is_mono(&tf).unwrap(), is_mono(&f).unwrap());

        let sk = skeletalize(&f).unwrap();
        assert_eq!(sk.len(), 4);
        assert_eq!(sk[&View::of(1, &[&["a"]])], View::of(1, &[&["a"]]));
        assert_eq!(sk[&View::of(1, &[&["b"]])], View::Bottom);
        let e = empty_arrow(a.clone(), b, k(1)).unwrap();
        assert!(skeletalize(&e).unwrap().values().all(View::is_bottom));
        let id = identity(a, k(1)).unwrap();
        assert!(skeletalize(&id).unwrap().iter().all(|(x, y)| x == y));
    }

    #[test]
    fn identity_square_gives_identity() {
        let (a, b) = (ab(), sa());
        let f = select_a(&a, &b);
        let sq = CommSquare {
            f: f.clone(),
            g: f.clone(),
            h1: identity(a, k(1)).unwrap(),
            h2: identity(b.clone(), k(1)).unwrap(),
        };
        let t = te_arrow(&sq).unwrap();
        assert!(is_iso(&t).unwrap());
        assert!(morphism_equiv(&t, &f));

        let bad = CommSquare {
            h2: empty_arrow(b.clone(), b, k(1)).unwrap(),
            ..sq
        };
        assert!(matches!(te_arrow(&bad), Err(Error::SquareNotCommuting)));
    }

    #[test]
    fn maps_file() {
        let a = ab();
        let maps = parse_maps("# comment\nselect[1=a](r) => s\n\nselect[1=a](r)\n", &a).unwrap();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps[0].target_name(), Some("s"));
        let err = parse_maps("r\nselect[1=](r)\n", &a).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let wrong = parse_maps("r => s\n", &a).unwrap();
        assert!(matches!(make_morphism(a, sa(), wrong, k(1)), Err(Error::ResultNotInTarget { .. })));
    }
}
