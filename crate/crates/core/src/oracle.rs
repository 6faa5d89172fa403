//! Brute-force reference semantics for differential testing.
//!
//! Nothing here reuses the clause masks or the satisfiability search of the
//! semantics module: every world is built explicitly and every entry is
//! evaluated as a formula tree.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    satisfies, Base, Clause, Distribution, Interpretation, Literal, Proposition, Var, Weight,
    WeightedBase,
};
use crate::network::{network_distribution_over, Network};
use crate::semantics::inconsistency_degree;

pub const DEFAULT_CAP: usize = 20;

const MAX_ATTEMPTS: usize = 1000;

pub fn enumerate_distribution<T: Proposition>(b: &Base<T>) -> Result<Distribution> {
    enumerate_distribution_capped(b, DEFAULT_CAP)
}

/// `π(ω) = 1 - max{w : ω falsifies the entry}`, by exhaustive evaluation.
pub fn enumerate_distribution_capped<T: Proposition>(b: &Base<T>, cap: usize) -> Result<Distribution> {
    let n = b.vars().len();
    if n > cap {
        return Err(Error::UniverseTooLarge(n, cap));
    }
    let formulas: Vec<_> = b.entries().iter().map(|(t, w)| (t.to_formula(), w)).collect();
    let vars: std::sync::Arc<[Var]> = b.vars().to_vec().into();
    let mut values = Vec::with_capacity(1 << n);
    for bits in 0..1u64 << n {
        let world = Interpretation::new(vars.clone(), bits)?;
        let mut worst = Weight::zero();
        for (f, w) in &formulas {
            if !satisfies(&world, f)? && *w > &worst {
                worst = (*w).clone();
            }
        }
        values.push(worst.complement());
    }
    Distribution::new(vars, values)
}

/// Exact pointwise equality; the universes must hold the same variables,
/// possibly listed in different orders.
pub fn distributions_equal(d1: &Distribution, d2: &Distribution) -> Result<bool> {
    let d2 = d2.aligned_to(d1.vars())?;
    Ok(d1.values() == d2.values())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub world: Interpretation,
    pub base: Weight,
    pub network: Weight,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: base {} vs network {}", self.world, self.base, self.network)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the enumerated distribution of `b` with the chain-rule joint of
/// `n`, world by world.
pub fn verify_compilation<T: Proposition>(b: &Base<T>, n: &Network) -> Result<VerificationReport> {
    let expected = enumerate_distribution(b)?;
    let actual = network_distribution_over(n, b.vars())?;
    let mismatches = expected
        .iter()
        .zip(actual.values())
        .filter(|((_, e), a)| e != a)
        .map(|((world, e), a)| Mismatch {
            world,
            base: e.clone(),
            network: a.clone(),
        })
        .collect();
    Ok(VerificationReport { mismatches })
}

/// Variables `x1 .. xn`.
pub fn numbered_vars(n: usize) -> Vec<Var> {
    (1..=n)
        .map(|i| Var::new(&format!("x{i}")).expect("valid name"))
        .collect()
}

fn draw_clause(rng: &mut ChaCha8Rng, vars: &[Var]) -> Clause {
    let len = rng.gen_range(1..=vars.len().min(3));
    vars.choose_multiple(rng, len)
        .map(|v| Literal::new(v.clone(), rng.gen_bool(0.5)))
        .collect()
}

fn draw_base(rng: &mut ChaCha8Rng, vars: &[Var], n_clauses: usize, pool: &[Weight]) -> WeightedBase {
    let entries = (0..n_clauses)
        .map(|_| {
            let c = draw_clause(rng, vars);
            let w = pool.choose(rng).expect("non-empty pool").clone();
            (c, w)
        })
        .collect::<Vec<_>>();
    WeightedBase::new(vars.to_vec(), entries).expect("clauses drawn from the universe")
}

fn check_request(n_vars: usize, pool: &[Weight]) -> Result<()> {
    if n_vars == 0 || n_vars > DEFAULT_CAP {
        return Err(Error::UniverseTooLarge(n_vars, DEFAULT_CAP));
    }
    if pool.is_empty() || pool.iter().any(Weight::is_zero) {
        return Err(Error::BadWeight("weight pool must hold positive weights".into()));
    }
    Ok(())
}

/// Deterministic random clausal base over `x1 .. xn` with clauses of 1 to 3
/// distinct variables and weights from `pool`, redrawn until consistent.
pub fn random_base(seed: u64, n_vars: usize, n_clauses: usize, pool: &[Weight]) -> Result<WeightedBase> {
    check_request(n_vars, pool)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = numbered_vars(n_vars);
    for _ in 0..MAX_ATTEMPTS {
        let b = draw_base(&mut rng, &vars, n_clauses, pool);
        if inconsistency_degree(&b).is_zero() {
            return Ok(b);
        }
    }
    Err(Error::RetriesExhausted(MAX_ATTEMPTS))
}

/// Like [`random_base`] without the consistency requirement.
pub fn random_raw_base(seed: u64, n_vars: usize, n_clauses: usize, pool: &[Weight]) -> Result<WeightedBase> {
    check_request(n_vars, pool)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_base(&mut rng, &numbered_vars(n_vars), n_clauses, pool))
}

/// Deterministic permutation of `vars`.
pub fn random_ordering(seed: u64, vars: &[Var]) -> Vec<Var> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vars.to_vec();
    out.shuffle(&mut rng);
    out
}
