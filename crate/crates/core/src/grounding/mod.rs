//! Unification, annotated-rule desugaring, SLD proof search and relevant grounding.

mod desugar;
mod relevant;
mod sld;
mod subst;

pub use desugar::desugar_annotated_rules;
pub(crate) use desugar::fresh_name;
pub use relevant::{
    ground_all, ground_all_with, relevant_ground_program, relevant_ground_program_with, GroundFact, GroundProgram,
    GroundRule,
};
pub use sld::{sld_proofs, FactSource, Proof, ProofLiteral, SldConfig, DEFAULT_DEPTH_LIMIT};
pub use subst::{apply, unify, unify_atoms, Substitute, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundingError {
    #[error("no termination: goal {goal} exceeded the search depth limit ({depth_limit})")]
    Nontermination { goal: String, depth_limit: usize },
    #[error("cyclic program: {}", cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("cannot ground {what}")]
    NonGround { what: String },
    #[error("negated literal {literal} is not ground when selected")]
    Floundering { literal: String },
    #[error("atom {atom} is declared by more than one labeled fact")]
    AmbiguousFact { atom: String },
}
