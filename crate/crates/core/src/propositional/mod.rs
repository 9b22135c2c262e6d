//! Propositional theories from ground programs: Clark's completion, proof formulas, cycle
//! detection, and text/DIMACS export.

mod cnf;
mod completion;
mod formula;

pub use cnf::{to_cnf, to_dimacs, CnfClause};
pub use completion::{check_acyclic, clark_completion, proofs_to_formula, CycleReport};
pub use formula::{Formula, Theory, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropositionalError {
    #[error("cyclic program ({}); cycle breaking is not supported", .0.join(" -> "))]
    Cyclic(Vec<String>),
    #[error("proof negates derived atom {0}; use the completion instead")]
    NegatedDerived(String),
}
