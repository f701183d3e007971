//! Rewriting a query over the source of a mapping into an equivalent query
//! over its target.

use crate::category::Morphism;
use crate::closure::closure;
use crate::error::{Error, Result};
use crate::query::{check_term, eval, QueryTerm};
use crate::relcore::{Instance, View};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteResult {
    pub original: QueryTerm,
    pub rewritten: QueryTerm,
    pub view: View,
    pub bound: usize,
}

/// Whether the answer of `q` over the source is carried by the flux of `f`.
pub fn rewritable(f: &Morphism, q: &QueryTerm) -> Result<bool> {
    let v = eval(q, f.src())?;
    Ok(f.flux().contains(&v))
}

/// Looks the answer of `q` up in the closure of the target and returns its
/// witness there.
pub fn rewrite(f: &Morphism, q: &QueryTerm) -> Result<RewriteResult> {
    let view = eval(q, f.src())?;
    if !f.flux().contains(&view) {
        return Err(Error::NotRewritable(view.tuples_text()));
    }
    let bound = f.bound();
    let rewritten = closure(f.tgt(), bound)?
        .witness(&view)
        .ok_or_else(|| Error::WitnessNotFound {
            view: view.tuples_text(),
            bound: bound.arity(),
        })?;
    assert!(
        verify_rewrite(q, f.src(), &rewritten, f.tgt())?,
        "witness {rewritten} does not reproduce {view}"
    );
    Ok(RewriteResult {
        original: q.clone(),
        rewritten,
        view,
        bound: bound.arity(),
    })
}

/// Extensional equality of `q_a` over `a` and `q_b` over `b`.
pub fn verify_rewrite(q_a: &QueryTerm, a: &Instance, q_b: &QueryTerm, b: &Instance) -> Result<bool> {
    check_term(q_a, a)?;
    check_term(q_b, b)?;
    Ok(eval(q_a, a)? == eval(q_b, b)?)
}
