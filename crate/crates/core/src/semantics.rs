//! Possibility-theory engine over weighted bases.
//!
//! Distributions follow the best-out ranking: a world gets `1 - w`, where `w`
//! is the highest weight among the entries it falsifies. Measures are
//! computed syntactically through the inconsistency degree, with the
//! model-based route available for cross-checking.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{
    Base, Clause, Distribution, Formula, Literal, Proposition, Var, Weight, WeightedBase,
};
use crate::normalize;
use crate::sat;

/// Selects entries with weight `>= threshold`, or `> threshold` when strict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSpec {
    pub threshold: Weight,
    pub strict: bool,
}

impl CutSpec {
    pub fn at_least(threshold: Weight) -> Self {
        Self {
            threshold,
            strict: false,
        }
    }

    pub fn above(threshold: Weight) -> Self {
        Self {
            threshold,
            strict: true,
        }
    }

    pub fn admits(&self, w: &Weight) -> bool {
        if self.strict {
            w > &self.threshold
        } else {
            w >= &self.threshold
        }
    }
}

/// Clause as a pair of bitmasks over a universe; falsified exactly when no
/// positive literal is true and no negative literal is false.
struct ClauseMask {
    pos: u64,
    neg: u64,
}

impl ClauseMask {
    fn new(c: &Clause, vars: &[Var]) -> Self {
        let mut mask = ClauseMask { pos: 0, neg: 0 };
        for l in c.literals() {
            // universe covers every entry by construction
            let i = vars.iter().position(|v| v == l.var()).expect("variable in universe");
            if l.is_positive() {
                mask.pos |= 1 << i;
            } else {
                mask.neg |= 1 << i;
            }
        }
        mask
    }

    fn falsified_by(&self, bits: u64) -> bool {
        bits & self.pos == 0 && !bits & self.neg == 0
    }
}

/// The distribution induced by a base (clausal or general).
pub fn distribution_of_base<T: Proposition>(b: &Base<T>) -> Distribution {
    let vars = b.vars().to_vec();
    let masks: Vec<(ClauseMask, &Weight)> = b
        .entries()
        .iter()
        .flat_map(|(t, w)| {
            t.to_clauses()
                .into_iter()
                .map(|c| (ClauseMask::new(&c, &vars), w))
                .collect::<Vec<_>>()
        })
        .collect();
    let values = (0..1u64 << vars.len())
        .map(|bits| {
            masks
                .iter()
                .filter(|(m, _)| m.falsified_by(bits))
                .map(|(_, w)| *w)
                .max()
                .map_or_else(Weight::one, Weight::complement)
        })
        .collect();
    Distribution::new(vars, values).expect("one value per interpretation")
}

pub fn is_satisfiable<'a>(cs: impl IntoIterator<Item = &'a Clause>) -> bool {
    sat::satisfiable(cs)
}

pub fn alpha_cut(b: &WeightedBase, cut: &CutSpec) -> Vec<Clause> {
    b.entries()
        .iter()
        .filter(|(_, w)| cut.admits(w))
        .map(|(c, _)| c.clone())
        .collect()
}

/// Highest weight whose cut is unsatisfiable, or 0.
pub fn inconsistency_degree(b: &WeightedBase) -> Weight {
    let levels: BTreeSet<&Weight> = b.weights().collect();
    for level in levels.into_iter().rev() {
        let cut = b.entries().iter().filter(|(_, w)| w >= level).map(|(c, _)| c);
        if !sat::satisfiable(cut) {
            return level.clone();
        }
    }
    Weight::zero()
}

/// `b` plus every clause of `f` as a hard constraint.
fn with_hard(b: &WeightedBase, f: &Formula) -> WeightedBase {
    b.extended(normalize::cnf(f).into_iter().map(|c| (c, Weight::one())))
}

fn require_consistent(b: &WeightedBase) -> Result<()> {
    let inc = inconsistency_degree(b);
    if inc.is_zero() {
        Ok(())
    } else {
        Err(Error::Inconsistent(inc))
    }
}

/// `Π(f) = 1 - Inc(b ∪ {(f, 1)})`. Unsatisfiable `f` gets 0.
pub fn possibility(b: &WeightedBase, f: &Formula) -> Result<Weight> {
    require_consistent(b)?;
    Ok(inconsistency_degree(&with_hard(b, f)).complement())
}

/// Model-based possibility: the best degree among the models of `f`.
pub fn possibility_by_models(b: &WeightedBase, f: &Formula) -> Result<Weight> {
    require_consistent(b)?;
    let wide = b.with_vars(&f.vars());
    let d = distribution_of_base(&wide);
    let mut best = Weight::zero();
    for (w, value) in d.iter() {
        if f.eval(&w)? && value > &best {
            best = value.clone();
        }
    }
    Ok(best)
}

/// `N(f) = 1 - Π(¬f)`.
pub fn necessity(b: &WeightedBase, f: &Formula) -> Result<Weight> {
    Ok(possibility(b, &Formula::negation(f.clone()))?.complement())
}

/// Degree to which `l` follows from `b`: `Inc(b ∪ {(¬l, 1)})` when that
/// exceeds `Inc(b)`, otherwise 0 (the conclusion is drowned by the conflict).
pub fn certainty_degree(b: &WeightedBase, l: &Literal) -> Weight {
    let inc = inconsistency_degree(b);
    let with_neg = inconsistency_degree(&b.extended([(Clause::unit(l.negate()), Weight::one())]));
    if with_neg > inc {
        with_neg
    } else {
        Weight::zero()
    }
}

/// Rebuilds a base from a normalized distribution: every world at a level
/// `β < 1` contributes the clause excluding exactly that world, weighted
/// `1 - β`.
pub fn base_of_distribution(d: &Distribution) -> Result<WeightedBase> {
    if !d.is_normalized() {
        return Err(Error::NotNormalized(d.max_value()));
    }
    let mut entries = Vec::new();
    for level in d.levels().into_iter().filter(|l| !l.is_one()) {
        let models: Vec<Formula> = d
            .iter()
            .filter(|(_, v)| **v == level)
            .map(|(w, _)| Formula::conjunction(&w.literals()))
            .collect();
        let negated = Formula::negation(Formula::Or(models));
        let weight = level.complement();
        entries.extend(normalize::cnf(&negated).into_iter().map(|c| (c, weight.clone())));
    }
    WeightedBase::new(d.vars().to_vec(), entries)
}
