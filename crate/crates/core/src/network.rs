//! Product-based possibilistic networks: a DAG over binary variables with a
//! conditional possibility table per node, evaluated by the chain rule.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Distribution, Interpretation, Literal, Var, Weight};

/// Conditional possibility table `Π(var | parents)`.
///
/// Parent instantiation `i` assigns `parents[j]` true iff bit `j` of `i` is
/// set. Each cell holds the degrees of the positive and the negative literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cpt {
    var: Var,
    parents: Vec<Var>,
    cells: Vec<[Weight; 2]>,
}

impl Cpt {
    pub fn new(var: Var, parents: Vec<Var>, cells: Vec<[Weight; 2]>) -> Result<Self> {
        if parents.contains(&var) {
            return Err(Error::InvalidNetwork(format!("`{var}` is its own parent")));
        }
        for (i, p) in parents.iter().enumerate() {
            if parents[..i].contains(p) {
                return Err(Error::InvalidNetwork(format!("`{p}` repeated among parents of `{var}`")));
            }
        }
        if parents.len() >= 32 || cells.len() != 1 << parents.len() {
            return Err(Error::InvalidNetwork(format!(
                "table of `{var}` has {} columns for {} parents",
                cells.len(),
                parents.len()
            )));
        }
        Ok(Self { var, parents, cells })
    }

    /// Root table with prior degrees of `var` and `¬var`.
    pub fn prior(var: Var, positive: Weight, negative: Weight) -> Self {
        Self {
            var,
            parents: Vec::new(),
            cells: vec![[positive, negative]],
        }
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn parents(&self) -> &[Var] {
        &self.parents
    }

    pub fn columns(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, instantiation: usize, positive: bool) -> &Weight {
        &self.cells[instantiation][usize::from(!positive)]
    }

    /// Parent literals of column `instantiation`.
    pub fn assignment(&self, instantiation: usize) -> Vec<Literal> {
        self.parents
            .iter()
            .enumerate()
            .map(|(j, p)| Literal::new(p.clone(), instantiation & (1 << j) != 0))
            .collect()
    }

    /// Column index of a parent assignment.
    pub fn column_of(&self, assignment: &[Literal]) -> Option<usize> {
        let mut idx = 0;
        for (j, p) in self.parents.iter().enumerate() {
            let l = assignment.iter().find(|l| l.var() == p)?;
            if l.is_positive() {
                idx |= 1 << j;
            }
        }
        Some(idx)
    }

    pub fn column_max(&self, instantiation: usize) -> &Weight {
        let [a, b] = &self.cells[instantiation];
        a.max(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    ordering: Vec<Var>,
    nodes: Vec<Cpt>,
}

impl Network {
    /// Nodes are matched to `ordering` by variable; every parent must be a
    /// node and the parent graph must be acyclic.
    pub fn new(ordering: Vec<Var>, nodes: Vec<Cpt>) -> Result<Self> {
        for (i, v) in ordering.iter().enumerate() {
            if ordering[..i].contains(v) {
                return Err(Error::InvalidNetwork(format!("`{v}` listed twice in ordering")));
            }
        }
        if nodes.len() != ordering.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} nodes for {} ordered variables",
                nodes.len(),
                ordering.len()
            )));
        }
        let mut sorted = Vec::with_capacity(nodes.len());
        for v in &ordering {
            let node = nodes
                .iter()
                .find(|n| n.var() == v)
                .ok_or_else(|| Error::InvalidNetwork(format!("no table for `{v}`")))?;
            if let Some(p) = node.parents().iter().find(|p| !ordering.contains(p)) {
                return Err(Error::InvalidNetwork(format!("parent `{p}` of `{v}` is not a node")));
            }
            sorted.push(node.clone());
        }
        let net = Network {
            ordering,
            nodes: sorted,
        };
        if let Some(v) = net.find_cycle() {
            return Err(Error::InvalidNetwork(format!("cycle through `{v}`")));
        }
        Ok(net)
    }

    pub fn ordering(&self) -> &[Var] {
        &self.ordering
    }

    pub fn nodes(&self) -> &[Cpt] {
        &self.nodes
    }

    pub fn node(&self, v: &Var) -> Option<&Cpt> {
        self.nodes.iter().find(|n| n.var() == v)
    }

    /// `(parent, child)` pairs, children in ordering order.
    pub fn edges(&self) -> Vec<(&Var, &Var)> {
        self.nodes
            .iter()
            .flat_map(|n| n.parents().iter().map(move |p| (p, n.var())))
            .collect()
    }

    fn find_cycle(&self) -> Option<&Var> {
        // 0 unvisited, 1 on stack, 2 done
        let index: HashMap<&Var, usize> =
            self.ordering.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut state = vec![0u8; self.nodes.len()];
        fn visit(
            i: usize,
            nodes: &[Cpt],
            index: &HashMap<&Var, usize>,
            state: &mut [u8],
        ) -> Option<usize> {
            state[i] = 1;
            for p in nodes[i].parents() {
                let j = index[p];
                match state[j] {
                    1 => return Some(j),
                    0 => {
                        if let Some(k) = visit(j, nodes, index, state) {
                            return Some(k);
                        }
                    }
                    _ => {}
                }
            }
            state[i] = 2;
            None
        }
        (0..self.nodes.len()).find_map(|i| {
            if state[i] == 0 {
                visit(i, &self.nodes, &index, &mut state).map(|k| &self.ordering[k])
            } else {
                None
            }
        })
    }
}

/// Product of the table entries selected by `w`.
pub fn chain_rule_eval(n: &Network, w: &Interpretation) -> Result<Weight> {
    let mut acc = Weight::one();
    for node in n.nodes() {
        let value = w
            .value(node.var())
            .ok_or_else(|| Error::UnknownVar(node.var().clone()))?;
        let mut column = 0;
        for (j, p) in node.parents().iter().enumerate() {
            if w.value(p).ok_or_else(|| Error::UnknownVar(p.clone()))? {
                column |= 1 << j;
            }
        }
        acc = acc.product(node.get(column, value));
    }
    Ok(acc)
}

/// Joint distribution over the ordering's variables.
pub fn network_distribution(n: &Network) -> Distribution {
    network_distribution_over(n, n.ordering()).expect("ordering is the network universe")
}

/// Joint distribution listed over `vars`, which must be the network's
/// variables in any order.
pub fn network_distribution_over(n: &Network, vars: &[Var]) -> Result<Distribution> {
    if vars.len() != n.ordering().len() || n.ordering().iter().any(|v| !vars.contains(v)) {
        return Err(Error::UniverseMismatch);
    }
    let pos = |v: &Var| vars.iter().position(|u| u == v).expect("checked above");
    let plan: Vec<(usize, Vec<usize>, &Cpt)> = n
        .nodes()
        .iter()
        .map(|c| (pos(c.var()), c.parents().iter().map(pos).collect(), c))
        .collect();
    let values = (0..1u64 << vars.len())
        .map(|bits| {
            plan.iter().fold(Weight::one(), |acc, (i, ps, cpt)| {
                let column = ps
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| bits & (1 << p) != 0)
                    .fold(0usize, |c, (j, _)| c | (1 << j));
                acc.product(cpt.get(column, bits & (1 << i) != 0))
            })
        })
        .collect();
    Distribution::new(vars.to_vec(), values)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationViolation {
    pub var: Var,
    pub assignment: Vec<Literal>,
    pub max: Weight,
}

impl fmt::Display for NormalizationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self.assignment.iter().map(|l| l.to_string()).collect();
        write!(
            f,
            "max(Π({0} | {1}), Π(!{0} | {1})) = {2}",
            self.var,
            ctx.join(","),
            self.max
        )
    }
}

/// Table columns whose best degree is not 1. Empty means every table is
/// normalized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizationReport {
    pub violations: Vec<NormalizationViolation>,
}

impl NormalizationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_normalization(n: &Network) -> NormalizationReport {
    let violations = n
        .nodes()
        .iter()
        .flat_map(|cpt| {
            (0..cpt.columns()).filter_map(move |i| {
                let max = cpt.column_max(i);
                (!max.is_one()).then(|| NormalizationViolation {
                    var: cpt.var().clone(),
                    assignment: cpt.assignment(i),
                    max: max.clone(),
                })
            })
        })
        .collect();
    NormalizationReport { violations }
}
