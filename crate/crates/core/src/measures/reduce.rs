use std::collections::{BTreeMap, BTreeSet};

use super::integrate::{indicator_probability_with, measure, MeasureMethod};
use super::intervals::{constraint_set, partition, IntervalSet};
use super::MeasureError;
use crate::grounding::fresh_name;
use crate::syntax::{
    atom_to_string, term_to_string, Atom, Clause, DistributionExpr, FactDecl, FactLabel, Literal, Program, Term,
};

/// Rewrites distributional and indicator facts into probabilistic facts and rules.
///
/// A variable with a single indicator fact turns that fact into `p :: f` with `p` the
/// measure of its constraint. A variable with several indicator facts is split into the
/// cells of the partition induced by all their bounds. Exactly one cell holds in every world;
/// this is encoded with stick-breaking facts `s_1 .. s_{m-1}` where cell `j` is
/// `\+ s_1, .., \+ s_{j-1}, s_j` (the last cell negates all of them) and
/// `P(s_j) = μ(cell_j) / (1 - μ(cell_1) - .. - μ(cell_{j-1}))`. Each indicator fact then
/// becomes one rule per cell inside its constraint.
pub fn reduce_to_probabilistic(p: &Program) -> Result<Program, MeasureError> {
    reduce_to_probabilistic_with(p, MeasureMethod::ClosedForm)
}

pub fn reduce_to_probabilistic_with(p: &Program, method: MeasureMethod) -> Result<Program, MeasureError> {
    let mut dists: BTreeMap<&Term, &DistributionExpr> = BTreeMap::new();
    for d in &p.distributions {
        if dists.insert(&d.var, &d.dist).is_some() {
            return Err(MeasureError::DuplicateVariable(term_to_string(&d.var)));
        }
    }
    for r in &p.annotated_rules {
        if matches!(r.label, FactLabel::Indicator(_)) {
            return Err(MeasureError::Unsupported(format!(
                "indicator label on the rule for {}",
                atom_to_string(&r.clause.head)
            )));
        }
    }
    let mut groups: BTreeMap<&Term, Vec<usize>> = BTreeMap::new();
    for (i, f) in p.facts.iter().enumerate() {
        if let FactLabel::Indicator(c) = &f.label {
            if !dists.contains_key(&c.var) {
                return Err(MeasureError::UndeclaredVariable(term_to_string(&c.var)));
            }
            groups.entry(&c.var).or_default().push(i);
        }
    }

    let mut taken: BTreeSet<String> = p.predicates().into_iter().map(|k| k.name).collect();
    let mut out = Program {
        facts: Vec::new(),
        distributions: Vec::new(),
        rules: p.rules.clone(),
        annotated_rules: p.annotated_rules.clone(),
    };
    let mut cell_rules = Vec::new();
    for (i, f) in p.facts.iter().enumerate() {
        let FactLabel::Indicator(c) = &f.label else {
            out.facts.push(f.clone());
            continue;
        };
        let d = dists[&c.var];
        let members = &groups[&c.var];
        if members.len() == 1 {
            let prob = indicator_probability_with(d, c, method)?;
            out.facts.push(FactDecl::new(FactLabel::probability(prob), f.atom.clone()));
            continue;
        }
        if members[0] != i {
            continue; // the whole group is emitted at its first fact
        }
        let facts: Vec<&FactDecl> = members.iter().map(|&k| &p.facts[k]).collect();
        if let Some(f) = facts.iter().find(|f| !f.atom.is_ground()) {
            return Err(MeasureError::Unsupported(format!(
                "non-ground indicator fact {} sharing a variable",
                atom_to_string(&f.atom)
            )));
        }
        let bounds: Vec<f64> = facts
            .iter()
            .map(|f| match &f.label {
                FactLabel::Indicator(c) => c.bound.0,
                _ => unreachable!(),
            })
            .collect();
        let mut cells: Vec<(IntervalSet, f64)> = Vec::new();
        for cell in partition(d, &bounds) {
            let mass = measure(d, &cell, method)?;
            if mass > 0.0 {
                cells.push((cell, mass));
            }
        }
        let base = predicate_base(&c.var);
        let mut remaining = 1.0;
        let mut splits = Vec::new();
        for (_, mass) in cells.iter().take(cells.len().saturating_sub(1)) {
            let q = if remaining > 0.0 { (mass / remaining).clamp(0.0, 1.0) } else { 0.0 };
            remaining -= mass;
            let s = Atom::prop(fresh_name(&format!("{base}_split"), &mut taken));
            out.facts.push(FactDecl::new(FactLabel::probability(q), s.clone()));
            splits.push(s);
        }
        let mut cell_atoms = Vec::new();
        for j in 0..cells.len() {
            let a = Atom::prop(fresh_name(&format!("{base}_cell"), &mut taken));
            let mut body: Vec<Literal> = splits[..j].iter().cloned().map(Literal::neg).collect();
            if let Some(s) = splits.get(j) {
                body.push(Literal::pos(s.clone()));
            }
            cell_rules.push(Clause::new(a.clone(), body));
            cell_atoms.push(a);
        }
        for f in facts {
            let FactLabel::Indicator(c) = &f.label else { unreachable!() };
            let sat = constraint_set(d, c);
            for ((cell, _), a) in cells.iter().zip(&cell_atoms) {
                if !cell.intersect(&sat).is_empty() {
                    cell_rules.push(Clause::new(f.atom.clone(), vec![Literal::pos(a.clone())]));
                }
            }
        }
    }
    out.rules.splice(0..0, cell_rules);
    Ok(out)
}

/// A predicate-name prefix derived from a random-variable term.
fn predicate_base(t: &Term) -> String {
    let raw: String = term_to_string(t).chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    let raw = raw.trim_matches('_').to_string();
    match raw.chars().next() {
        Some(c) if c.is_ascii_lowercase() => raw,
        _ => format!("rv_{}", raw.to_ascii_lowercase()),
    }
}
