//! Small DPLL search with unit propagation, sized for desk-scale universes.

use std::collections::HashMap;

use crate::model::{Clause, Var};

/// Clause over dense variable indices; `(index, polarity)`.
type IndexedClause = Vec<(usize, bool)>;

pub(crate) fn satisfiable<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> bool {
    let mut index: HashMap<&'a Var, usize> = HashMap::new();
    let mut indexed: Vec<IndexedClause> = Vec::new();
    for c in clauses {
        if c.is_empty() {
            return false;
        }
        if c.is_tautology() {
            continue;
        }
        let lits = c
            .literals()
            .map(|l| {
                let next = index.len();
                (*index.entry(l.var()).or_insert(next), l.is_positive())
            })
            .collect();
        indexed.push(lits);
    }
    let mut assignment = vec![None; index.len()];
    dpll(&indexed, &mut assignment)
}

enum Status {
    Satisfied,
    Conflict,
    Unit(usize, bool),
    Open,
}

fn status(clause: &IndexedClause, assignment: &[Option<bool>]) -> Status {
    let mut free = None;
    let mut n_free = 0;
    for &(v, pos) in clause {
        match assignment[v] {
            Some(b) if b == pos => return Status::Satisfied,
            Some(_) => {}
            None => {
                n_free += 1;
                free = Some((v, pos));
            }
        }
    }
    match (n_free, free) {
        (0, _) => Status::Conflict,
        (1, Some((v, pos))) => Status::Unit(v, pos),
        _ => Status::Open,
    }
}

fn dpll(clauses: &[IndexedClause], assignment: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    // unit propagation to fixpoint
    loop {
        let mut changed = false;
        let mut open = false;
        for c in clauses {
            match status(c, assignment) {
                Status::Satisfied => {}
                Status::Conflict => {
                    undo(assignment, &trail);
                    return false;
                }
                Status::Unit(v, pos) => {
                    assignment[v] = Some(pos);
                    trail.push(v);
                    changed = true;
                }
                Status::Open => open = true,
            }
        }
        if !changed {
            if !open {
                return true;
            }
            break;
        }
    }
    let branch = clauses
        .iter()
        .find(|c| matches!(status(c, assignment), Status::Open))
        .and_then(|c| c.iter().find(|(v, _)| assignment[*v].is_none()))
        .copied();
    let Some((v, pos)) = branch else {
        return true;
    };
    for value in [pos, !pos] {
        assignment[v] = Some(value);
        if dpll(clauses, assignment) {
            return true;
        }
    }
    assignment[v] = None;
    undo(assignment, &trail);
    false
}

fn undo(assignment: &mut [Option<bool>], trail: &[usize]) {
    for &v in trail {
        assignment[v] = None;
    }
}
