//! Knowledge compilation of propositional theories into sd-DNNF circuits.
//!
//! The compiler is a top-down Shannon expander: unit literals are peeled off first, variable
//! disjoint conjuncts are compiled as separate components, and otherwise the formula is split
//! on a decision variable. Sub-formulas are hash-consed, so the compile cache is keyed by
//! structure. Smoothing is a separate pass ([`smooth`]).

mod compiler;
mod nnf;
mod store;

pub use compiler::{compile_dnnf, CompileOptions, VarOrder, DEFAULT_NODE_BUDGET};
pub use nnf::{
    circuit_from_text, circuit_to_text, export_dot, smooth, verify_sd_dnnf, NnfBuilder, NnfCircuit, NnfNode, NodeId,
    SdReport,
};

use crate::propositional::Theory;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("circuit exceeds the node budget of {0} nodes")]
    NodeBudget(usize),
}

/// Compiles with `options` and smooths over every theory variable.
pub fn compile_smooth(t: &Theory, options: &CompileOptions) -> Result<NnfCircuit, CompileError> {
    let c = compile_dnnf(t, options)?;
    let all: Vec<usize> = (0..t.num_vars()).collect();
    Ok(smooth(&c, &all))
}
