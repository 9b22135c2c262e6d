use std::fmt::Write;

use super::formula::{Formula, Theory};

/// A clause is a list of non-zero DIMACS literals (1-based variable, sign = polarity).
pub type CnfClause = Vec<i64>;

/// Expands the theory into CNF by pushing negations inward and distributing `|` over `&`.
///
/// No auxiliary variables are introduced, so the size can blow up; this is meant for
/// inspecting small theories.
pub fn to_cnf(t: &Theory) -> Vec<CnfClause> {
    let mut clauses = cnf(&t.formula, true);
    for c in &mut clauses {
        c.sort_by_key(|l| (l.abs(), *l));
        c.dedup();
    }
    clauses.retain(|c| !c.iter().any(|l| c.contains(&-l)));
    clauses
}

// CNF of `f` (positive) or of `~f`.
fn cnf(f: &Formula, positive: bool) -> Vec<CnfClause> {
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => Vec::new(),
        (Formula::True, false) | (Formula::False, true) => vec![Vec::new()],
        (Formula::Var(v), pol) => {
            let l = *v as i64 + 1;
            vec![vec![if pol { l } else { -l }]]
        }
        (Formula::Not(g), pol) => cnf(g, !pol),
        (Formula::And(fs), true) | (Formula::Or(fs), false) => fs.iter().flat_map(|g| cnf(g, positive)).collect(),
        (Formula::Or(fs), true) | (Formula::And(fs), false) => {
            let mut acc: Vec<CnfClause> = vec![Vec::new()];
            for g in fs {
                let part = cnf(g, positive);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend_from_slice(b);
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        (Formula::Iff(a, b), true) => {
            // (~a | b) & (a | ~b)
            let left = Formula::Or(vec![Formula::not((**a).clone()), (**b).clone()]);
            let right = Formula::Or(vec![(**a).clone(), Formula::not((**b).clone())]);
            let mut out = cnf(&left, true);
            out.extend(cnf(&right, true));
            out
        }
        (Formula::Iff(a, b), false) => {
            // (a | b) & (~a | ~b)
            let left = Formula::Or(vec![(**a).clone(), (**b).clone()]);
            let right = Formula::Or(vec![Formula::not((**a).clone()), Formula::not((**b).clone())]);
            let mut out = cnf(&left, true);
            out.extend(cnf(&right, true));
            out
        }
    }
}

/// DIMACS text with `c <index> <name>` comment lines naming the variables.
pub fn to_dimacs(t: &Theory) -> String {
    let clauses = to_cnf(t);
    let mut out = String::new();
    for (i, name) in t.names().iter().enumerate() {
        let _ = writeln!(out, "c {} {}", i + 1, name);
    }
    let _ = writeln!(out, "p cnf {} {}", t.num_vars(), clauses.len());
    for c in clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}
