//! The Kleisli category of the power-view monad, and executable checks of
//! the monad, comonad and Kleisli triple laws.

use std::fmt;
use std::sync::Arc;

use crate::category::{self, compose, eta, eta_inv, identity_between, invert, lift_t, materialize, same_arrow, Morphism};
use crate::closure::{closure, Bound};
use crate::error::{Error, Result};
use crate::relcore::Instance;

/// An arrow `A -> B` of the Kleisli category, carried by a program
/// `A -> TB` into the materialized closure of `B`.
#[derive(Clone, Debug)]
pub struct KleisliArrow {
    src: Arc<Instance>,
    tgt: Arc<Instance>,
    program: Morphism,
}

impl KleisliArrow {
    pub fn src(&self) -> &Arc<Instance> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<Instance> {
        &self.tgt
    }

    pub fn program(&self) -> &Morphism {
        &self.program
    }
}

/// True when the views of `a` already form its closure.
pub fn is_closed(a: &Instance, bound: Bound) -> Result<bool> {
    Ok(closure(a, bound)?.len() == a.view_index().len())
}

/// `θ`: wraps a program `A -> TB` as a Kleisli arrow `A -> B`.
pub fn theta(program: &Morphism, tgt: impl Into<Arc<Instance>>) -> Result<KleisliArrow> {
    let tgt = tgt.into();
    let tb = materialize(&tgt, program.bound())?;
    if !program.tgt().ext_eq(&tb) {
        return Err(Error::TargetNotClosed(tgt.name().to_string()));
    }
    Ok(KleisliArrow {
        src: program.src().clone(),
        tgt,
        program: program.clone(),
    })
}

/// `θ⁻¹`: the underlying program.
pub fn theta_inv(k: &KleisliArrow) -> Morphism {
    k.program.clone()
}

/// The Kleisli identity on `a`, `θ(η_A)`.
pub fn kleisli_identity(a: impl Into<Arc<Instance>>, bound: Bound) -> Result<KleisliArrow> {
    let a = a.into();
    let (e, _) = eta(a.clone(), bound)?;
    theta(&e, a)
}

/// `g ∘ f = θ(μ ∘ Tθ⁻¹(g) ∘ θ⁻¹(f))`. The multiplication is the identity on
/// materialized closures, so it does not appear.
pub fn kleisli_compose(g: &KleisliArrow, f: &KleisliArrow) -> Result<KleisliArrow> {
    if !g.src.ext_eq(&f.tgt) {
        return Err(Error::EndpointMismatch(format!(
            "Kleisli arrow from {} cannot follow one into {}",
            g.src.name(),
            f.tgt.name()
        )));
    }
    let program = compose(&lift_t(&g.program)?, &f.program)?;
    theta(&program, g.tgt.clone())
}

/// The functor into the base category: `η⁻¹ ∘ θ⁻¹(f)`.
pub fn internalize(f: &KleisliArrow) -> Result<Morphism> {
    compose(&eta_inv(f.tgt.clone(), f.program.bound())?, &f.program)
}

/// `f* = μ ∘ Tf`, realized as `f ∘ η⁻¹: TA -> TB`.
pub fn extension_star(f: &Morphism) -> Result<Morphism> {
    if !is_closed(f.tgt(), f.bound())? {
        return Err(Error::TargetNotClosed(f.tgt().name().to_string()));
    }
    compose(f, &eta_inv(f.src().clone(), f.bound())?)
}

/// `μ_A: TTA -> TA`.
pub fn mu(a: &Instance, bound: Bound) -> Result<Morphism> {
    let ta = materialize(a, bound)?;
    let tta = materialize(&ta, bound)?;
    identity_between(tta, ta, bound)
}

/// `μ^C_A: TA -> TTA`.
pub fn comu(a: &Instance, bound: Bound) -> Result<Morphism> {
    let ta = materialize(a, bound)?;
    let tta = materialize(&ta, bound)?;
    identity_between(ta, tta, bound)
}

/// Outcome of one law on one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawResult {
    pub name: String,
    pub pass: bool,
    /// Counterexample dump, empty on success.
    pub detail: String,
}

impl LawResult {
    fn check(name: &str, pass: bool, detail: impl FnOnce() -> String) -> LawResult {
        LawResult {
            name: name.to_string(),
            pass,
            detail: if pass { String::new() } else { detail() },
        }
    }
}

impl fmt::Display for LawResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LAW {} {}", self.name, if self.pass { "PASS" } else { "FAIL" })
    }
}

fn arrow_summary(f: &Morphism) -> String {
    format!(
        "{} -> {} ({} maps, flux of {} views)",
        f.src().name(),
        f.tgt().name(),
        f.maps().len(),
        f.flux().len()
    )
}

fn arrow_law(name: &str, left: &Morphism, right: &Morphism, context: &Instance) -> Result<LawResult> {
    let pass = same_arrow(left, right)?;
    Ok(LawResult::check(name, pass, || {
        format!(
            "instance:\n{}left:  {}\nright: {}\n",
            context.to_dbi(),
            arrow_summary(left),
            arrow_summary(right)
        )
    }))
}

/// Monad and comonad laws of `(T, η, μ)` on one instance.
pub fn check_monad_laws(a: &Instance, bound: Bound) -> Result<Vec<LawResult>> {
    let a = Arc::new(a.clone());
    let ta = materialize(&a, bound)?;
    let tta = materialize(&ta, bound)?;
    let (eta_a, _) = eta(a.clone(), bound)?;
    let (eta_ta, _) = eta(ta.clone(), bound)?;
    let mu_a = mu(&a, bound)?;
    let mu_ta = mu(&ta, bound)?;
    let id_ta = category::identity(ta.clone(), bound)?;
    let mut out = Vec::new();

    let closed = closure(&ta, bound)?.same_views(&*closure(&a, bound)?) && ta.ext_eq(&tta);
    out.push(LawResult::check("closure_idempotent", closed, || a.to_dbi()));
    out.push(LawResult::check("eta_iso", category::is_iso(&eta_a)?, || a.to_dbi()));
    out.push(LawResult::check("eta_mono", category::is_mono(&eta_a)?, || a.to_dbi()));
    out.push(arrow_law("mu_identity", &mu_a, &id_ta, &a)?);

    let assoc_l = compose(&mu_a, &mu_ta)?;
    let assoc_r = compose(&mu_a, &lift_t(&mu_a)?)?;
    out.push(arrow_law("mu_associative", &assoc_l, &assoc_r, &a)?);
    out.push(arrow_law("mu_left_unit", &compose(&mu_a, &eta_ta)?, &id_ta, &a)?);
    out.push(arrow_law("mu_right_unit", &compose(&mu_a, &lift_t(&eta_a)?)?, &id_ta, &a)?);

    let comu_a = comu(&a, bound)?;
    let comu_ta = comu(&ta, bound)?;
    let counit_a = invert(&eta_a)?;
    let counit_ta = invert(&eta_ta)?;
    out.push(arrow_law("comu_identity", &comu_a, &id_ta, &a)?);
    out.push(LawResult::check("counit_iso", category::is_iso(&counit_a)?, || a.to_dbi()));
    let coassoc_l = compose(&comu_ta, &comu_a)?;
    let coassoc_r = compose(&lift_t(&comu_a)?, &comu_a)?;
    out.push(arrow_law("comu_coassociative", &coassoc_l, &coassoc_r, &a)?);
    out.push(arrow_law("comu_left_counit", &compose(&counit_ta, &comu_a)?, &id_ta, &a)?);
    out.push(arrow_law("comu_right_counit", &compose(&lift_t(&counit_a)?, &comu_a)?, &id_ta, &a)?);
    Ok(out)
}

/// Kleisli triple laws for `f: A -> B` and `g: B -> C`, and functoriality
/// of [`internalize`] on them.
pub fn check_kleisli_laws(f: &KleisliArrow, g: &KleisliArrow) -> Result<Vec<LawResult>> {
    let bound = f.program.bound();
    let a = f.src.clone();
    let mut out = Vec::new();

    let (eta_a, _) = eta(a.clone(), bound)?;
    let id_ta = category::identity(materialize(&a, bound)?, bound)?;
    out.push(arrow_law("eta_star_identity", &extension_star(&eta_a)?, &id_ta, &a)?);

    let f_star = extension_star(&f.program)?;
    out.push(arrow_law("star_after_eta", &compose(&f_star, &eta_a)?, &f.program, &a)?);

    let g_star = extension_star(&g.program)?;
    let left = compose(&g_star, &f_star)?;
    let right = extension_star(&compose(&g_star, &f.program)?)?;
    out.push(arrow_law("star_composition", &left, &right, &a)?);

    let kid = kleisli_identity(a.clone(), bound)?;
    let id_a = category::identity(a.clone(), bound)?;
    out.push(arrow_law("internalize_identity", &internalize(&kid)?, &id_a, &a)?);
    let gf = kleisli_compose(g, f)?;
    let composite = compose(&internalize(g)?, &internalize(f)?)?;
    out.push(arrow_law("internalize_composition", &internalize(&gf)?, &composite, &a)?);
    let left_unit = kleisli_compose(&kleisli_identity(f.tgt.clone(), bound)?, f)?;
    out.push(arrow_law("kleisli_left_unit", left_unit.program(), f.program(), &a)?);
    let right_unit = kleisli_compose(f, &kid)?;
    out.push(arrow_law("kleisli_right_unit", right_unit.program(), f.program(), &a)?);
    Ok(out)
}

/// For `f: A -> B`, the computation arrow `f₁ = η_B ∘ f` is equivalent to
/// `f`, and `η` is natural along `f`.
pub fn check_computation_arrow(f: &Morphism) -> Result<Vec<LawResult>> {
    let bound = f.bound();
    let (eta_b, _) = eta(f.tgt().clone(), bound)?;
    let (eta_a, _) = eta(f.src().clone(), bound)?;
    let f1 = compose(&eta_b, f)?;
    let a = f.src();
    Ok(vec![
        arrow_law("computation_equivalent", &f1, f, a)?,
        arrow_law("eta_natural", &compose(&lift_t(f)?, &eta_a)?, &f1, a)?,
    ])
}
