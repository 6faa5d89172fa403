//! Core vocabulary: variables, literals, clauses, formulas, weights, bases,
//! interpretations and possibility distributions.
//!
//! Everything here is an immutable value type. Weights are exact rationals in
//! `[0, 1]`; no floating point enters any computation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest universe an [`Interpretation`] can address.
pub const MAX_UNIVERSE: usize = 63;

const RESERVED: [&str; 2] = ["true", "false"];

/// A binary propositional variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    /// Names start with an ASCII letter and continue with letters, digits or
    /// underscores. `true` and `false` are reserved for constants.
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !RESERVED.contains(&name);
        if ok {
            Ok(Var(name.into()))
        } else {
            Err(Error::InvalidVar(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn pos(&self) -> Literal {
        Literal::new(self.clone(), true)
    }

    pub fn neg(&self) -> Literal {
        Literal::new(self.clone(), false)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Var::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Var,
    positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Self { var, positive }
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn negate(&self) -> Literal {
        Literal::new(self.var.clone(), !self.positive)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "!{}", self.var)
        }
    }
}

/// Disjunction of literals with set semantics. The empty clause is
/// unsatisfiable.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(BTreeSet<Literal>);

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        Clause(literals.into_iter().collect())
    }

    pub fn empty() -> Self {
        Clause(BTreeSet::new())
    }

    pub fn unit(l: Literal) -> Self {
        Clause::new([l])
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.0.contains(l)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.contains(&v.pos()) || self.contains(&v.neg())
    }

    pub fn is_tautology(&self) -> bool {
        self.0
            .iter()
            .any(|l| l.positive && self.0.contains(&l.negate()))
    }

    /// Disjunction of two clauses.
    pub fn or(&self, other: &Clause) -> Clause {
        Clause(self.0.union(&other.0).cloned().collect())
    }

    /// The clause with `l` deleted.
    pub fn without(&self, l: &Literal) -> Clause {
        let mut lits = self.0.clone();
        lits.remove(l);
        Clause(lits)
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("false");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

/// Certainty or possibility level: an exact rational in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::WeightOutOfRange(value.to_string()));
        }
        Ok(Weight(value))
    }

    pub fn ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::BadWeight(format!("{numer}/{denom}")));
        }
        Weight::new(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        Weight(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `1 - w`.
    pub fn complement(&self) -> Weight {
        Weight(BigRational::one() - &self.0)
    }

    pub fn product(&self, other: &Weight) -> Weight {
        Weight(&self.0 * &other.0)
    }

    /// `self / other`, defined when the quotient stays within `[0, 1]`.
    pub fn checked_div(&self, other: &Weight) -> Option<Weight> {
        if other.is_zero() || self.0 > other.0 {
            return None;
        }
        Some(Weight(&self.0 / &other.0))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts `p/q`, integers and decimals (`.4`, `0.25`, `1.0`); decimals are
/// converted exactly, so `.4` is `2/5`.
impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadWeight(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let value = if let Some((p, q)) = s.split_once('/') {
            if !digits(p) || !digits(q) {
                return Err(bad());
            }
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p.parse().map_err(|_| bad())?, q)
        } else if let Some((int, frac)) = s.split_once('.') {
            if (int.is_empty() && frac.is_empty())
                || !(int.is_empty() || digits(int))
                || !(frac.is_empty() || digits(frac))
            {
                return Err(bad());
            }
            let numer: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(numer, denom)
        } else if digits(s) {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        Weight::new(value)
    }
}

/// Propositional formula over binary variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn var(v: &Var) -> Formula {
        Formula::Lit(v.pos())
    }

    pub fn negation(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction of literals, e.g. a context `x1 & ... & xn`.
    pub fn conjunction<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Formula {
        Formula::And(lits.into_iter().cloned().map(Formula::Lit).collect())
    }

    /// Variables in order of first appearance.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Lit(l) => {
                if !out.contains(l.var()) {
                    out.push(l.var().clone());
                }
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    /// Standard truth evaluation; fails on a variable outside `w`'s universe.
    pub fn eval(&self, w: &Interpretation) -> Result<bool> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Lit(l) => w.literal_holds(l)?,
            Formula::Not(f) => !f.eval(w)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(w)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(w)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

impl From<&Clause> for Formula {
    fn from(c: &Clause) -> Self {
        Formula::Or(c.literals().cloned().map(Formula::Lit).collect())
    }
}

impl From<Literal> for Formula {
    fn from(l: Literal) -> Self {
        Formula::Lit(l)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(b) => write!(f, "{b}"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::And(fs) | Formula::Or(fs) => {
                let (op, unit) = match self {
                    Formula::And(_) => (" & ", "true"),
                    _ => (" | ", "false"),
                };
                if fs.is_empty() {
                    return f.write_str(unit);
                }
                f.write_str("(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Anything that can sit in a weighted base.
pub trait Proposition: Clone {
    /// Variables in order of first appearance.
    fn vars(&self) -> Vec<Var>;
    fn to_formula(&self) -> Formula;
    /// Equivalent clause set over the same variables.
    fn to_clauses(&self) -> Vec<Clause>;
}

impl Proposition for Clause {
    fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for l in self.literals() {
            if out.last() != Some(l.var()) {
                out.push(l.var().clone());
            }
        }
        out
    }

    fn to_formula(&self) -> Formula {
        Formula::from(self)
    }

    fn to_clauses(&self) -> Vec<Clause> {
        vec![self.clone()]
    }
}

impl Proposition for Formula {
    fn vars(&self) -> Vec<Var> {
        Formula::vars(self)
    }

    fn to_formula(&self) -> Formula {
        self.clone()
    }

    fn to_clauses(&self) -> Vec<Clause> {
        crate::normalize::cnf(self)
    }
}

/// A multiset of weighted propositions over an ordered variable universe.
///
/// Entries with weight 0 are vacuous and dropped on construction. The universe
/// always covers every variable mentioned by an entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base<T> {
    vars: Vec<Var>,
    entries: Vec<(T, Weight)>,
}

pub type WeightedBase = Base<Clause>;
pub type FormulaBase = Base<Formula>;

impl<T: Proposition> Base<T> {
    /// Base over a declared universe; entries may only mention declared
    /// variables.
    pub fn new(vars: Vec<Var>, entries: impl IntoIterator<Item = (T, Weight)>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::DuplicateVar(v.clone()));
            }
        }
        let entries: Vec<_> = entries.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        for (t, _) in &entries {
            if let Some(v) = t.vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(Error::UnknownVar(v));
            }
        }
        Ok(Base { vars, entries })
    }

    /// Base whose universe is inferred in first-appearance order.
    pub fn from_entries(entries: impl IntoIterator<Item = (T, Weight)>) -> Self {
        let entries: Vec<_> = entries.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let mut vars = Vec::new();
        for (t, _) in &entries {
            for v in t.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        Base { vars, entries }
    }

    pub fn empty(vars: Vec<Var>) -> Result<Self> {
        Self::new(vars, [])
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn entries(&self) -> &[(T, Weight)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weights(&self) -> impl Iterator<Item = &Weight> + '_ {
        self.entries.iter().map(|(_, w)| w)
    }

    /// A copy with extra entries; unseen variables are appended to the
    /// universe.
    pub fn extended(&self, extra: impl IntoIterator<Item = (T, Weight)>) -> Self {
        let mut out = self.clone();
        for (t, w) in extra {
            if w.is_zero() {
                continue;
            }
            for v in t.vars() {
                if !out.vars.contains(&v) {
                    out.vars.push(v);
                }
            }
            out.entries.push((t, w));
        }
        out
    }

    /// Same entries over a wider universe (new variables appended).
    pub fn with_vars(&self, vars: &[Var]) -> Self {
        let mut out = self.clone();
        for v in vars {
            if !out.vars.contains(v) {
                out.vars.push(v.clone());
            }
        }
        out
    }

    /// Replaces the entries, keeping the universe.
    pub fn with_entries(&self, entries: impl IntoIterator<Item = (T, Weight)>) -> Self {
        Base {
            vars: self.vars.clone(),
            entries: entries.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
        }
    }

    /// Same entries, universe reduced to `vars`. Caller guarantees no entry
    /// mentions a removed variable.
    pub(crate) fn restricted(&self, vars: Vec<Var>) -> Self {
        debug_assert!(self
            .entries
            .iter()
            .all(|(t, _)| t.vars().iter().all(|v| vars.contains(v))));
        Base {
            vars,
            entries: self.entries.clone(),
        }
    }

    pub fn to_formula_base(&self) -> FormulaBase {
        Base {
            vars: self.vars.clone(),
            entries: self
                .entries
                .iter()
                .map(|(t, w)| (t.to_formula(), w.clone()))
                .collect(),
        }
    }
}

/// A total assignment over an ordered universe. Bit `i` of the mask holds
/// the value of the `i`-th variable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    vars: Arc<[Var]>,
    bits: u64,
}

impl Interpretation {
    pub fn new(vars: Arc<[Var]>, bits: u64) -> Result<Self> {
        if vars.len() > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(vars.len(), MAX_UNIVERSE));
        }
        let mask = if vars.is_empty() { 0 } else { u64::MAX >> (64 - vars.len()) };
        Ok(Self {
            vars,
            bits: bits & mask,
        })
    }

    /// Builds an interpretation from literals; every universe variable must be
    /// assigned exactly once.
    pub fn from_literals(vars: Arc<[Var]>, lits: &[Literal]) -> Result<Self> {
        let mut bits = 0u64;
        let mut seen = 0u64;
        for l in lits {
            let i = vars
                .iter()
                .position(|v| v == l.var())
                .ok_or_else(|| Error::UnknownVar(l.var().clone()))?;
            if seen & (1 << i) != 0 {
                return Err(Error::DuplicateVar(l.var().clone()));
            }
            seen |= 1 << i;
            if l.is_positive() {
                bits |= 1 << i;
            }
        }
        if let Some(v) = vars.iter().enumerate().find(|(i, _)| seen & (1 << i) == 0) {
            return Err(Error::Unassigned(v.1.clone()));
        }
        Interpretation::new(vars, bits)
    }

    pub fn vars(&self) -> &Arc<[Var]> {
        &self.vars
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn value(&self, v: &Var) -> Option<bool> {
        self.vars
            .iter()
            .position(|u| u == v)
            .map(|i| self.bits & (1 << i) != 0)
    }

    pub fn literal_holds(&self, l: &Literal) -> Result<bool> {
        self.value(l.var())
            .map(|b| b == l.is_positive())
            .ok_or_else(|| Error::UnknownVar(l.var().clone()))
    }

    /// The literal of each universe variable made true here.
    pub fn literals(&self) -> Vec<Literal> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| Literal::new(v.clone(), self.bits & (1 << i) != 0))
            .collect()
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self.literals().iter().map(|l| l.to_string()).collect();
        write!(f, "{}", lits.join(","))
    }
}

/// `w ⊨ f`.
pub fn satisfies(w: &Interpretation, f: &Formula) -> Result<bool> {
    f.eval(w)
}

/// Explicit possibility distribution, indexed by interpretation bitmask.
#[derive(Clone, PartialEq, Eq)]
pub struct Distribution {
    vars: Arc<[Var]>,
    values: Vec<Weight>,
}

impl Distribution {
    pub fn new(vars: impl Into<Arc<[Var]>>, values: Vec<Weight>) -> Result<Self> {
        let vars = vars.into();
        if vars.len() > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(vars.len(), MAX_UNIVERSE));
        }
        let expected = 1usize
            .checked_shl(vars.len() as u32)
            .ok_or(Error::UniverseTooLarge(vars.len(), MAX_UNIVERSE))?;
        if values.len() != expected {
            return Err(Error::DistributionSize {
                expected,
                got: values.len(),
            });
        }
        Ok(Self { vars, values })
    }

    /// Tabulates `f` over every interpretation of `vars`.
    pub fn from_fn(
        vars: impl Into<Arc<[Var]>>,
        mut f: impl FnMut(&Interpretation) -> Result<Weight>,
    ) -> Result<Self> {
        let vars: Arc<[Var]> = vars.into();
        if vars.len() > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(vars.len(), MAX_UNIVERSE));
        }
        let values = (0..1u64 << vars.len())
            .map(|bits| f(&Interpretation::new(vars.clone(), bits)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, values)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn at(&self, bits: u64) -> &Weight {
        &self.values[bits as usize]
    }

    pub fn value(&self, w: &Interpretation) -> Result<&Weight> {
        if w.vars()[..] != self.vars[..] {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.at(w.bits()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Interpretation, &Weight)> + '_ {
        self.values.iter().enumerate().map(|(bits, w)| {
            (
                Interpretation {
                    vars: self.vars.clone(),
                    bits: bits as u64,
                },
                w,
            )
        })
    }

    pub fn max_value(&self) -> Weight {
        self.values.iter().max().cloned().unwrap_or_else(Weight::zero)
    }

    pub fn is_normalized(&self) -> bool {
        self.values.iter().any(Weight::is_one)
    }

    /// Distinct degrees, descending.
    pub fn levels(&self) -> Vec<Weight> {
        let set: BTreeSet<&Weight> = self.values.iter().collect();
        set.into_iter().rev().cloned().collect()
    }

    /// The same distribution with its universe listed in another order.
    pub fn aligned_to(&self, vars: &[Var]) -> Result<Distribution> {
        if vars.len() != self.vars.len() || vars.iter().any(|v| !self.vars.contains(v)) {
            return Err(Error::UniverseMismatch);
        }
        // position in self of each target variable
        let from: Vec<usize> = vars
            .iter()
            .map(|v| self.vars.iter().position(|u| u == v).unwrap())
            .collect();
        let values = (0..1u64 << vars.len())
            .map(|bits| {
                let src = from
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .fold(0u64, |acc, (_, &j)| acc | (1 << j));
                self.at(src).clone()
            })
            .collect();
        Distribution::new(vars.to_vec(), values)
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (w, v) in self.iter() {
            m.entry(&w, v);
        }
        m.finish()
    }
}
