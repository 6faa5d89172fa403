//! Syntactic variable elimination.
//!
//! Conditioning a base on a literal (without renormalizing) and forgetting a
//! variable both have clause-level counterparts: instantiation drops the
//! satisfied clauses and shortens the falsified ones, and the marginal base
//! disjoins the two instantiations pairwise with min-combined weights. The
//! resulting distribution is the max-marginal of the input.

use crate::model::{Clause, Distribution, Literal, Var, Weight, WeightedBase};
use crate::normalize;
use crate::semantics::distribution_of_base;

/// Base over the remaining variables encoding `ω ↦ Π(l ∧ ω)`.
///
/// Clauses containing `l` are dropped; `¬l` is deleted from the others.
/// Empty clauses produced this way are kept, they carry context conflicts.
pub fn instantiate(b: &WeightedBase, l: &Literal) -> WeightedBase {
    instantiate_all(b, std::slice::from_ref(l))
}

/// Instantiation on a set of literals over distinct variables.
pub fn instantiate_all(b: &WeightedBase, lits: &[Literal]) -> WeightedBase {
    let entries: Vec<(Clause, Weight)> = b
        .entries()
        .iter()
        .filter(|(c, _)| !lits.iter().any(|l| c.contains(l)))
        .map(|(c, w)| {
            let reduced = lits.iter().fold(c.clone(), |acc, l| acc.without(&l.negate()));
            (reduced, w.clone())
        })
        .collect();
    let vars = b
        .vars()
        .iter()
        .filter(|v| !lits.iter().any(|l| l.var() == *v))
        .cloned()
        .collect();
    b.with_entries(entries).restricted(vars)
}

/// Forgets `v`: pairwise disjunctions of the two instantiations, weighted by
/// the smaller weight, then canonicalized. A variable outside the universe
/// leaves the base as is.
pub fn marginal_base(b: &WeightedBase, v: &Var) -> WeightedBase {
    if !b.vars().contains(v) {
        return b.clone();
    }
    let on = instantiate(b, &v.pos());
    let off = instantiate(b, &v.neg());
    let mut cross = Vec::with_capacity(on.len() * off.len());
    for (c, a) in on.entries() {
        for (d, w) in off.entries() {
            let joined = c.or(d);
            if !joined.is_tautology() {
                cross.push((joined, a.clone().min(w.clone())));
            }
        }
    }
    normalize::canonicalize(&on.with_entries(cross))
}

/// Splits `π_b` into its restrictions to the models of `v` and of `¬v`,
/// both unnormalized and zero elsewhere.
pub fn decompose_check(b: &WeightedBase, v: &Var) -> (Distribution, Distribution) {
    let wide = b.with_vars(std::slice::from_ref(v));
    let d = distribution_of_base(&wide);
    let restrict = |positive: bool| {
        let values = d
            .iter()
            .map(|(w, val)| {
                if w.value(v) == Some(positive) {
                    val.clone()
                } else {
                    Weight::zero()
                }
            })
            .collect();
        Distribution::new(d.vars().to_vec(), values).expect("same universe")
    };
    (restrict(true), restrict(false))
}
