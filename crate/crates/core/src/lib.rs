//! Possibilistic logic bases compiled into product-based possibilistic
//! networks, with exact rational arithmetic throughout.
//!
//! The pipeline: parse a weighted base ([`io`]), bring it to clausal,
//! tautology-free, subsumption-reduced form ([`normalize`]), then walk an
//! elimination ordering ([`compile`]): find each variable's parents, fill its
//! conditional table from inconsistency degrees ([`semantics`]) and forget it
//! syntactically ([`marginalize`]). The resulting [`network::Network`]
//! reproduces the base's possibility distribution through the chain rule,
//! which [`oracle`] checks by brute force.

pub mod compile;
pub mod error;
pub mod io;
pub mod marginalize;
pub mod model;
pub mod network;
pub mod normalize;
pub mod oracle;
mod sat;
pub mod semantics;

#[cfg(test)]
mod testutil;

pub use error::{Error, ParseError, Result};
pub use model::{
    Base, Clause, Distribution, Formula, FormulaBase, Interpretation, Literal, Var, Weight,
    WeightedBase,
};
