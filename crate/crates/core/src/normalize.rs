//! Canonicalization passes over weighted bases. Each pass preserves the
//! induced distribution exactly.

use crate::error::{Error, Result};
use crate::model::{Base, Clause, Formula, Proposition, Weight, WeightedBase};
use crate::sat;

/// CNF by distributive expansion. No auxiliary variables are introduced, so
/// the result can be exponential in the size of `f`. Tautological clauses are
/// kept; identical clauses are emitted once.
pub fn cnf(f: &Formula) -> Vec<Clause> {
    let mut out: Vec<Clause> = Vec::new();
    for c in cnf_of(f, true) {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

// `positive == false` converts the negation of `f`.
fn cnf_of(f: &Formula, positive: bool) -> Vec<Clause> {
    match (f, positive) {
        (Formula::Const(b), _) => {
            if *b == positive {
                Vec::new()
            } else {
                vec![Clause::empty()]
            }
        }
        (Formula::Lit(l), true) => vec![Clause::unit(l.clone())],
        (Formula::Lit(l), false) => vec![Clause::unit(l.negate())],
        (Formula::Not(g), _) => cnf_of(g, !positive),
        (Formula::And(fs), true) | (Formula::Or(fs), false) => {
            fs.iter().flat_map(|g| cnf_of(g, positive)).collect()
        }
        (Formula::Or(fs), true) | (Formula::And(fs), false) => {
            // disjunction: start from `false` and distribute
            let mut acc = vec![Clause::empty()];
            for g in fs {
                let part = cnf_of(g, positive);
                acc = acc
                    .iter()
                    .flat_map(|a| part.iter().map(move |c| a.or(c)))
                    .collect();
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
    }
}

/// Replaces every weighted formula by its clauses at the same weight.
pub fn to_clausal<T: Proposition>(b: &Base<T>) -> WeightedBase {
    let entries = b
        .entries()
        .iter()
        .flat_map(|(t, w)| t.to_clauses().into_iter().map(move |c| (c, w.clone())));
    WeightedBase::new(b.vars().to_vec(), entries).expect("clauses stay within the universe")
}

pub fn remove_tautologies(b: &WeightedBase) -> WeightedBase {
    b.with_entries(
        b.entries()
            .iter()
            .filter(|(c, _)| !c.is_tautology())
            .cloned(),
    )
}

/// Collapses repeated clauses to a single entry carrying the maximum weight,
/// at the position of the first occurrence.
pub fn merge_duplicates(b: &WeightedBase) -> WeightedBase {
    let mut merged: Vec<(Clause, Weight)> = Vec::new();
    for (c, w) in b.entries() {
        match merged.iter_mut().find(|(d, _)| d == c) {
            Some((_, best)) => {
                if w > best {
                    *best = w.clone();
                }
            }
            None => merged.push((c.clone(), w.clone())),
        }
    }
    b.with_entries(merged)
}

/// `cut ⊢ c`, decided as unsatisfiability of `cut ∪ ¬c`.
fn entails<'a>(cut: impl Iterator<Item = &'a Clause>, c: &Clause) -> bool {
    let negation: Vec<Clause> = c.literals().map(|l| Clause::unit(l.negate())).collect();
    let mut all: Vec<&Clause> = cut.collect();
    all.extend(negation.iter());
    !sat::satisfiable(all)
}

fn subsumed_at(entries: &[(Clause, Weight)], idx: usize, strict: bool) -> bool {
    let (c, w) = &entries[idx];
    let cut = entries.iter().enumerate().filter_map(|(j, (d, v))| {
        let keep = if strict { v > w } else { j != idx && v >= w };
        keep.then_some(d)
    });
    entails(cut, c)
}

/// Whether `entry` is subsumed in `b`: non-strict checks
/// `(b - entry)_{>=w} ⊢ c`, strict checks `b_{>w} ⊢ c`.
pub fn is_subsumed(b: &WeightedBase, entry: (&Clause, &Weight), strict: bool) -> Result<bool> {
    let idx = b
        .entries()
        .iter()
        .position(|(c, w)| c == entry.0 && w == entry.1)
        .ok_or(Error::EntryNotFound)?;
    Ok(subsumed_at(b.entries(), idx, strict))
}

/// Drops subsumed entries until none is left.
///
/// Duplicates are merged first. Candidates are visited by ascending weight,
/// then clause order; a single pass reaches the fixpoint because removing an
/// entry can only weaken the cuts used for later checks. Survivors keep their
/// original relative order.
pub fn remove_subsumed(b: &WeightedBase) -> WeightedBase {
    let merged = merge_duplicates(b);
    let mut entries: Vec<(Clause, Weight)> = merged.entries().to_vec();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        let (ci, wi) = &entries[i];
        let (cj, wj) = &entries[j];
        wi.cmp(wj).then_with(|| ci.cmp(cj))
    });
    let mut alive = vec![true; entries.len()];
    for &i in &order {
        let view: Vec<(Clause, Weight)> = entries
            .iter()
            .enumerate()
            .filter(|(j, _)| alive[*j])
            .map(|(_, e)| e.clone())
            .collect();
        let pos = (0..i).filter(|&j| alive[j]).count();
        if subsumed_at(&view, pos, false) {
            alive[i] = false;
        }
    }
    let mut idx = 0;
    entries.retain(|_| {
        idx += 1;
        alive[idx - 1]
    });
    merged.with_entries(entries)
}

/// Tautology removal, duplicate merging and subsumption removal.
pub fn canonicalize(b: &WeightedBase) -> WeightedBase {
    remove_subsumed(&remove_tautologies(b))
}
