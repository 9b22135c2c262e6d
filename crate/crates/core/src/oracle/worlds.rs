use std::collections::BTreeSet;

use super::indexed::IndexedProgram;
use super::OracleError;
use crate::grounding::{GroundFact, GroundProgram};
use crate::propositional::Theory;
use crate::semirings::{Labeling, Semiring, SemiringError};
use crate::syntax::{atom_to_string, Atom, FactLabel};

pub const DEFAULT_WORLD_CAP: usize = 20;

/// One subset of the labeled facts and everything it entails.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibleWorld {
    /// Truth value of each labeled fact, in program order.
    pub chosen: Vec<bool>,
    pub chosen_facts: Vec<Atom>,
    pub entailed: BTreeSet<Atom>,
    pub probability: f64,
}

/// Probability of a fact: its fixed or initial learnable probability.
pub fn default_probability(f: &GroundFact) -> Option<f64> {
    match &f.label {
        FactLabel::Probabilistic(p) | FactLabel::Learnable(p) => Some(p.0),
        _ => None,
    }
}

/// Atoms entailed by the chosen facts, the logical facts and the rules (least model).
/// Negated literals are evaluated stratum by stratum against the model built so far.
pub fn forward_chain(gp: &GroundProgram, chosen: &BTreeSet<Atom>) -> Result<BTreeSet<Atom>, OracleError> {
    let ip = IndexedProgram::new(gp)?;
    let mut model = Vec::new();
    ip.chain(|k| chosen.contains(&ip.atoms[ip.labeled[k]]), &mut model);
    Ok(ip.atoms.iter().zip(&model).filter(|(_, t)| **t).map(|(a, _)| a.clone()).collect())
}

fn fact_probabilities(gp: &GroundProgram, prob: &dyn Fn(&GroundFact) -> Option<f64>) -> Result<Vec<f64>, OracleError> {
    gp.labeled_facts().map(|f| prob(f).ok_or_else(|| OracleError::NotProbabilistic(atom_to_string(&f.atom)))).collect()
}

fn world_probability(ps: &[f64], bits: u64) -> f64 {
    ps.iter().enumerate().map(|(i, p)| if bits >> i & 1 == 1 { *p } else { 1.0 - p }).product()
}

/// Every subset of the labeled facts. World `k` chooses fact `i` iff bit `i` of `k` is set.
pub fn enumerate_worlds(gp: &GroundProgram, cap: usize) -> Result<Vec<PossibleWorld>, OracleError> {
    enumerate_worlds_with(gp, cap, &default_probability)
}

pub fn enumerate_worlds_with(
    gp: &GroundProgram,
    cap: usize,
    prob: &dyn Fn(&GroundFact) -> Option<f64>,
) -> Result<Vec<PossibleWorld>, OracleError> {
    let ps = fact_probabilities(gp, prob)?;
    if ps.len() > cap {
        return Err(OracleError::TooLarge { n: ps.len(), cap });
    }
    let ip = IndexedProgram::new(gp)?;
    let facts: Vec<&Atom> = gp.labeled_facts().map(|f| &f.atom).collect();
    let mut model = Vec::new();
    let mut out = Vec::with_capacity(1 << ps.len());
    for bits in 0u64..(1 << ps.len()) {
        let chosen: Vec<bool> = (0..ps.len()).map(|i| bits >> i & 1 == 1).collect();
        ip.chain(|k| chosen[k], &mut model);
        out.push(PossibleWorld {
            chosen_facts: facts.iter().zip(&chosen).filter(|(_, c)| **c).map(|(a, _)| (*a).clone()).collect(),
            chosen,
            entailed: ip.atoms.iter().zip(&model).filter(|(_, t)| **t).map(|(a, _)| a.clone()).collect(),
            probability: world_probability(&ps, bits),
        });
    }
    Ok(out)
}

/// Sum of the probabilities of the worlds entailing `q`.
pub fn brute_force_success(gp: &GroundProgram, q: &Atom) -> Result<f64, OracleError> {
    brute_force_success_with(gp, q, DEFAULT_WORLD_CAP, &default_probability)
}

pub fn brute_force_success_with(
    gp: &GroundProgram,
    q: &Atom,
    cap: usize,
    prob: &dyn Fn(&GroundFact) -> Option<f64>,
) -> Result<f64, OracleError> {
    let ps = fact_probabilities(gp, prob)?;
    if ps.len() > cap {
        return Err(OracleError::TooLarge { n: ps.len(), cap });
    }
    let ip = IndexedProgram::new(gp)?;
    let Some(&qi) = ip.index.get(q) else {
        return Ok(0.0);
    };
    let mut model = Vec::new();
    let mut total = 0.0;
    for bits in 0u64..(1 << ps.len()) {
        ip.chain(|k| bits >> k & 1 == 1, &mut model);
        if model[qi] {
            total += world_probability(&ps, bits);
        }
    }
    Ok(total)
}

/// ⊕ over all models of the theory of the ⊗ of their literal labels, by enumeration.
pub fn brute_force_amc<S: Semiring>(
    t: &Theory,
    s: &S,
    alpha: &Labeling<S::Value>,
    cap: usize,
) -> Result<S::Value, OracleError> {
    let n = t.num_vars();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let mut total = s.zero();
    let mut assignment = vec![false; n];
    for bits in 0u64..(1 << n) {
        for (v, a) in assignment.iter_mut().enumerate() {
            *a = bits >> v & 1 == 1;
        }
        if !t.is_model(&assignment) {
            continue;
        }
        let mut w = s.one();
        for (v, &val) in assignment.iter().enumerate() {
            let l = alpha.get(v, val).ok_or_else(|| {
                OracleError::Semiring(SemiringError::MissingLabel {
                    literal: format!("{}{}", if val { "" } else { "\\+ " }, t.name(v)),
                })
            })?;
            w = s.times(&w, l);
        }
        total = s.plus(&total, &w);
    }
    Ok(total)
}
