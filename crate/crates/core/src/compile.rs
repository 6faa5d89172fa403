//! Base-to-network compilation.
//!
//! Variables are processed along an ordering. At stage `i` the current base
//! mentions only `A_i` and later variables; the parents of `A_i` are found
//! on it, its table is filled with conditional degrees computed through the
//! inconsistency degree, and `A_i` is then forgotten to produce the next
//! stage base.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::marginalize::{instantiate_all, marginal_base};
use crate::model::{Base, Clause, Literal, Proposition, Var, Weight, WeightedBase};
use crate::network::{Cpt, Network};
use crate::normalize;
use crate::semantics::{certainty_degree, inconsistency_degree};

/// Elimination order; the first variable is compiled (and forgotten) first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering(Vec<Var>);

impl Ordering {
    /// `sequence` must list every variable of `universe` exactly once.
    pub fn new(sequence: Vec<Var>, universe: &[Var]) -> Result<Self> {
        for (i, v) in sequence.iter().enumerate() {
            if sequence[..i].contains(v) {
                return Err(Error::BadOrdering(format!("`{v}` appears twice")));
            }
            if !universe.contains(v) {
                return Err(Error::BadOrdering(format!("`{v}` is not a base variable")));
            }
        }
        if let Some(v) = universe.iter().find(|v| !sequence.contains(v)) {
            return Err(Error::BadOrdering(format!("`{v}` is missing")));
        }
        Ok(Ordering(sequence))
    }

    /// Declaration order of the base.
    pub fn declared<T: Proposition>(b: &Base<T>) -> Self {
        Ordering(b.vars().to_vec())
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn position(&self, v: &Var) -> Option<usize> {
        self.0.iter().position(|u| u == v)
    }

    fn sort(&self, vars: impl IntoIterator<Item = Var>) -> Vec<Var> {
        let mut out: Vec<Var> = vars.into_iter().collect();
        out.sort_by_key(|v| self.position(v));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParentSet {
    pub var: Var,
    pub parents: Vec<Var>,
}

/// Variables sharing a clause with `v`.
pub fn immediate_parents(b: &WeightedBase, v: &Var) -> BTreeSet<Var> {
    b.entries()
        .iter()
        .filter(|(c, _)| c.mentions(v))
        .flat_map(|(c, _)| c.literals().map(|l| l.var().clone()))
        .filter(|u| u != v)
        .collect()
}

fn instantiation(vars: &[Var], bits: usize) -> Vec<Literal> {
    vars.iter()
        .enumerate()
        .map(|(j, v)| Literal::new(v.clone(), bits & (1 << j) != 0))
        .collect()
}

/// Extends `seed` with hidden parents of `v`.
///
/// For every instantiation `x` of the current parent set, the base is
/// conditioned on `x` clause-wise (satisfied clauses dropped, falsified
/// literals deleted) giving `B`. If `v` or `¬v` is entailed with a positive
/// certainty degree from `B ∪ x`, every clause of `B` not mentioning `v`
/// whose weight exceeds `Inc(B ∪ x)` contributes its variables, and the sweep
/// restarts. Under product-based conditioning such a clause changes the ratio
/// `Π(v x c) / Π(x c)` for the completions `c` that falsify it, including
/// when its weight is below the certainty degree itself.
pub fn hidden_parent_closure(b: &WeightedBase, v: &Var, seed: &BTreeSet<Var>) -> BTreeSet<Var> {
    let mut parents = seed.clone();
    'sweep: loop {
        let current: Vec<Var> = parents.iter().cloned().collect();
        for bits in 0..1usize << current.len() {
            let x = instantiation(&current, bits);
            let context = instantiate_all(b, &x)
                .extended(x.iter().map(|l| (Clause::unit(l.clone()), Weight::one())));
            let alpha = certainty_degree(&context, &v.pos());
            let beta = certainty_degree(&context, &v.neg());
            if alpha.is_zero() && beta.is_zero() {
                continue;
            }
            let inc = inconsistency_degree(&context);
            let added: Vec<Var> = context
                .entries()
                .iter()
                .filter(|(c, g)| !c.mentions(v) && g > &inc)
                .flat_map(|(c, _)| c.literals().map(|l| l.var().clone()))
                .filter(|u| !parents.contains(u))
                .collect();
            if !added.is_empty() {
                parents.extend(added);
                continue 'sweep;
            }
        }
        return parents;
    }
}

/// `Π(l | ctx)` by product conditioning: with `h = 1 - Inc(b ∪ ctx)` and
/// `h' = 1 - Inc(b ∪ ctx ∪ {l})`, the result is `h'/h`, or 1 when `h = 0`.
pub fn conditional_possibility(b: &WeightedBase, l: &Literal, ctx: &[Literal]) -> Weight {
    let hard = |l: &Literal| (Clause::unit(l.clone()), Weight::one());
    let with_ctx = b.extended(ctx.iter().map(hard));
    let h = inconsistency_degree(&with_ctx).complement();
    if h.is_zero() {
        return Weight::one();
    }
    let h_joint = inconsistency_degree(&with_ctx.extended([hard(l)])).complement();
    h_joint.checked_div(&h).expect("Π(l ∧ ctx) <= Π(ctx)")
}

/// Table of `Π(v | parents)`; column `i` instantiates `parents[j]` to bit `j`
/// of `i`.
pub fn cpt_for(b: &WeightedBase, v: &Var, parents: &[Var]) -> Cpt {
    let cells = (0..1usize << parents.len())
        .map(|bits| {
            let ctx = instantiation(parents, bits);
            [
                conditional_possibility(b, &v.pos(), &ctx),
                conditional_possibility(b, &v.neg(), &ctx),
            ]
        })
        .collect();
    Cpt::new(v.clone(), parents.to_vec(), cells).expect("one column per instantiation")
}

/// What happened while compiling one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    pub var: Var,
    pub base_size: usize,
    pub immediate: Vec<Var>,
    pub parents: Vec<Var>,
    pub cpt_cells: usize,
    pub marginal_size: usize,
}

#[derive(Clone, Debug)]
pub struct Compilation {
    pub network: Network,
    pub stages: Vec<StageReport>,
}

/// Clausal, tautology-free, subsumption-reduced form of `b`, rejected when
/// inconsistent.
pub fn prepare<T: Proposition>(b: &Base<T>) -> Result<WeightedBase> {
    let clausal = normalize::canonicalize(&normalize::to_clausal(b));
    let inc = inconsistency_degree(&clausal);
    if !inc.is_zero() {
        return Err(Error::Inconsistent(inc));
    }
    Ok(clausal)
}

/// Stage bases along `o`: element `i` is the base from which the `i`-th
/// variable is compiled.
pub fn stage_bases<T: Proposition>(b: &Base<T>, o: &Ordering) -> Result<Vec<WeightedBase>> {
    let mut stage = prepare(b)?;
    Ordering::new(o.vars().to_vec(), stage.vars())?;
    let mut out = Vec::with_capacity(o.vars().len());
    for v in o.vars() {
        let next = marginal_base(&stage, v);
        out.push(stage);
        stage = next;
    }
    Ok(out)
}

/// Parents of `v` at its stage, sorted by ordering position.
pub fn parents_at_stage(stage: &WeightedBase, v: &Var, o: &Ordering) -> ParentSet {
    let seed = immediate_parents(stage, v);
    let all = hidden_parent_closure(stage, v, &seed);
    ParentSet {
        var: v.clone(),
        parents: o.sort(all),
    }
}

pub fn compile_network<T: Proposition>(b: &Base<T>, o: &Ordering) -> Result<Network> {
    Ok(compile_with_report(b, o)?.network)
}

pub fn compile_with_report<T: Proposition>(b: &Base<T>, o: &Ordering) -> Result<Compilation> {
    let stages = stage_bases(b, o)?;
    let mut nodes = Vec::with_capacity(stages.len());
    let mut reports = Vec::with_capacity(stages.len());
    for (i, (v, stage)) in o.vars().iter().zip(&stages).enumerate() {
        let immediate = o.sort(immediate_parents(stage, v));
        let ParentSet { parents, .. } = parents_at_stage(stage, v, o);
        let cpt = cpt_for(stage, v, &parents);
        reports.push(StageReport {
            var: v.clone(),
            base_size: stage.len(),
            immediate,
            cpt_cells: 2 * cpt.columns(),
            parents,
            marginal_size: stages.get(i + 1).map_or(0, |s| s.len()),
        });
        nodes.push(cpt);
    }
    Ok(Compilation {
        network: Network::new(o.vars().to_vec(), nodes)?,
        stages: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{check_normalization, network_distribution_over};
    use crate::semantics::distribution_of_base;
    use crate::testutil::*;

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| var(n)).collect()
    }

    fn set(names: &[&str]) -> BTreeSet<Var> {
        names.iter().map(|n| var(n)).collect()
    }

    #[test]
    fn immediate_parent_examples() {
        assert_eq!(immediate_parents(&sigma_ex(), &var("se")), set(&["wi", "su"]));
        let m = base(&[("1/3", &["su"]), ("2/3", &["su", "!wi"])]);
        assert_eq!(immediate_parents(&m, &var("wi")), set(&["su"]));
        assert!(immediate_parents(&m, &var("zz")).is_empty());
    }

    #[test]
    fn hidden_parent_examples() {
        let b = base(&[(".4", &["a2", "a1"]), (".7", &["a3"])]);
        assert_eq!(hidden_parent_closure(&b, &var("a1"), &set(&["a2"])), set(&["a2", "a3"]));
        assert_eq!(
            hidden_parent_closure(&sigma_ex(), &var("se"), &set(&["wi", "su"])),
            set(&["wi", "su"])
        );
        let iso = base(&[("1/2", &["b"])]);
        assert!(hidden_parent_closure(&iso, &var("a"), &BTreeSet::new()).is_empty());
    }

    #[test]
    fn sub_threshold_clause_is_a_parent_under_product_conditioning() {
        // Π(¬a1 ¬a2) = 3/5 is not Π(¬a1) · Π(¬a2) = 12/25
        let b = WeightedBase::new(vars(&["a1", "a2"]), [(clause(&["a1"]), wt("2/5")), (clause(&["a2"]), wt("1/5"))])
            .unwrap();
        assert_eq!(hidden_parent_closure(&b, &var("a1"), &BTreeSet::new()), set(&["a2"]));
        let o = Ordering::new(vars(&["a1", "a2"]), b.vars()).unwrap();
        let n = compile_network(&b, &o).unwrap();
        assert_eq!(network_distribution_over(&n, b.vars()).unwrap(), distribution_of_base(&b));
    }

    #[test]
    fn conditional_examples() {
        let b = sigma_ex();
        assert_eq!(conditional_possibility(&b, &lit("!se"), &[lit("wi"), lit("su")]), wt("2/3"));
        let b6 = base(&[(".4", &["a2", "a1"]), (".7", &["a3"])]);
        assert_eq!(conditional_possibility(&b6, &lit("!a1"), &[lit("!a2")]), wt("3/5"));
        assert_eq!(conditional_possibility(&b6, &lit("!a1"), &[lit("!a2"), lit("!a3")]), Weight::one());
    }

    #[test]
    fn impossible_context_gives_one() {
        let b = base(&[("1", &["x"])]);
        assert_eq!(conditional_possibility(&b, &lit("y"), &[lit("!x")]), Weight::one());
        assert_eq!(conditional_possibility(&b, &lit("!y"), &[lit("!x")]), Weight::one());
    }

    #[test]
    fn sea_table() {
        let cpt = cpt_for(&sigma_ex(), &var("se"), &vars(&["wi", "su"]));
        for col in 0..4 {
            let ctx = cpt.assignment(col);
            let wi = ctx[0].is_positive();
            let su = ctx[1].is_positive();
            let se = if !wi && su { wt("2/3") } else { Weight::one() };
            let not_se = if wi && su { wt("2/3") } else { Weight::one() };
            assert_eq!(cpt.get(col, true), &se, "{ctx:?}");
            assert_eq!(cpt.get(col, false), &not_se, "{ctx:?}");
        }
    }

    #[test]
    fn wind_and_sun_tables() {
        let m = WeightedBase::new(vars(&["su", "wi"]), [(clause(&["su"]), wt("1/3")), (clause(&["su", "!wi"]), wt("2/3"))])
            .unwrap();
        let wi = cpt_for(&m, &var("wi"), &vars(&["su"]));
        assert_eq!(wi.get(0, true), &wt("1/2"));
        assert_eq!(wi.get(1, true), &Weight::one());
        assert_eq!(wi.get(0, false), &Weight::one());
        assert_eq!(wi.get(1, false), &Weight::one());

        let last = WeightedBase::new(vars(&["su"]), [(clause(&["su"]), wt("1/3"))]).unwrap();
        let su = cpt_for(&last, &var("su"), &[]);
        assert_eq!(su.get(0, true), &Weight::one());
        assert_eq!(su.get(0, false), &wt("2/3"));
    }

    #[test]
    fn compile_sigma_ex() {
        let b = sigma_ex();
        let o = Ordering::new(vars(&["se", "wi", "su"]), b.vars()).unwrap();
        let c = compile_with_report(&b, &o).unwrap();
        let parents: Vec<Vec<Var>> = c.network.nodes().iter().map(|n| n.parents().to_vec()).collect();
        assert_eq!(parents, vec![vars(&["wi", "su"]), vars(&["su"]), vec![]]);
        assert!(check_normalization(&c.network).is_ok());
        assert_eq!(
            network_distribution_over(&c.network, b.vars()).unwrap(),
            distribution_of_base(&b)
        );
        assert_eq!(c.stages[0].cpt_cells, 8);
    }

    #[test]
    fn compile_empty_base() {
        let b = WeightedBase::empty(vars(&["x", "y"])).unwrap();
        let n = compile_network(&b, &Ordering::declared(&b)).unwrap();
        assert!(n.edges().is_empty());
        for node in n.nodes() {
            assert!(node.get(0, true).is_one() && node.get(0, false).is_one());
        }
    }

    #[test]
    fn compile_rejects_inconsistent() {
        let b = base(&[("1", &["x"]), ("1", &["!x"])]);
        assert_eq!(
            compile_network(&b, &Ordering::declared(&b)).unwrap_err(),
            Error::Inconsistent(Weight::one())
        );
    }

    #[test]
    fn ordering_validation() {
        let u = vars(&["a", "b"]);
        assert!(Ordering::new(vars(&["b", "a"]), &u).is_ok());
        assert!(Ordering::new(vars(&["a"]), &u).is_err());
        assert!(Ordering::new(vars(&["a", "a"]), &u).is_err());
        assert!(Ordering::new(vars(&["a", "b", "c"]), &u).is_err());
    }
}
