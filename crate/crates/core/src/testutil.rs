//! Shorthand constructors shared by unit tests.

use crate::model::{Clause, Distribution, Formula, Literal, Var, Weight, WeightedBase};

pub fn var(name: &str) -> Var {
    Var::new(name).unwrap()
}

pub fn lit(s: &str) -> Literal {
    match s.strip_prefix('!') {
        Some(n) => var(n).neg(),
        None => var(s).pos(),
    }
}

pub fn clause(lits: &[&str]) -> Clause {
    lits.iter().map(|l| lit(l)).collect()
}

pub fn conj(lits: &[&str]) -> Formula {
    Formula::And(lits.iter().map(|l| Formula::Lit(lit(l))).collect())
}

pub fn wt(s: &str) -> Weight {
    s.parse().unwrap()
}

pub fn w_list(ws: &[&str]) -> Vec<Weight> {
    ws.iter().map(|w| wt(w)).collect()
}

pub fn base(entries: &[(&str, &[&str])]) -> WeightedBase {
    WeightedBase::from_entries(entries.iter().map(|(w, c)| (clause(c), wt(w))))
}

/// The sun/wind/sea base over the universe `su, wi, se`.
pub fn sigma_ex() -> WeightedBase {
    WeightedBase::new(
        vec![var("su"), var("wi"), var("se")],
        [
            (clause(&["su", "!wi"]), wt("2/3")),
            (clause(&["!wi", "se"]), wt("1/3")),
            (clause(&["wi", "!se"]), wt("1/3")),
            (clause(&["su", "se"]), wt("1/3")),
        ],
    )
    .unwrap()
}

/// Values listed as ω0..ω7, where ω0 = su ¬wi ¬se and the index bits are
/// (¬su, wi, se) from most to least significant.
pub fn by_omega_index(d: &Distribution) -> Vec<Weight> {
    let d = d.aligned_to(&[var("su"), var("wi"), var("se")]).unwrap();
    (0..8u64)
        .map(|k| {
            let su = k & 4 == 0;
            let wi = k & 2 != 0;
            let se = k & 1 != 0;
            let bits = su as u64 | (wi as u64) << 1 | (se as u64) << 2;
            d.at(bits).clone()
        })
        .collect()
}
