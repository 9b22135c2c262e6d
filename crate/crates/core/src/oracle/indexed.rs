use std::collections::HashMap;

use super::OracleError;
use crate::grounding::GroundProgram;
use crate::syntax::{atom_to_string, Atom};

#[derive(Debug, Clone)]
struct Rule {
    head: usize,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

/// A ground program over integer atom ids, with rules grouped into negation strata.
#[derive(Debug, Clone)]
pub(crate) struct IndexedProgram {
    pub atoms: Vec<Atom>,
    pub index: HashMap<Atom, usize>,
    /// Atom ids of the labeled facts, in program order.
    pub labeled: Vec<usize>,
    logical: Vec<usize>,
    strata: Vec<Vec<Rule>>,
}

impl IndexedProgram {
    pub fn new(gp: &GroundProgram) -> Result<Self, OracleError> {
        let mut atoms = Vec::new();
        let mut index = HashMap::new();
        let mut id = |a: &Atom, atoms: &mut Vec<Atom>| -> usize {
            *index.entry(a.clone()).or_insert_with(|| {
                atoms.push(a.clone());
                atoms.len() - 1
            })
        };
        let mut labeled = Vec::new();
        let mut logical = Vec::new();
        for f in &gp.facts {
            let i = id(&f.atom, &mut atoms);
            if f.is_labeled() {
                labeled.push(i);
            } else {
                logical.push(i);
            }
        }
        let mut rules = Vec::new();
        for c in gp.clauses() {
            let head = id(&c.head, &mut atoms);
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for l in &c.body {
                let b = id(&l.atom, &mut atoms);
                if l.positive {
                    pos.push(b);
                } else {
                    neg.push(b);
                }
            }
            rules.push(Rule { head, pos, neg });
        }

        // level(h) >= level(b) for positive and level(b) + 1 for negative dependencies
        let n = atoms.len();
        let mut level = vec![0usize; n];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &rules {
                let need =
                    r.pos.iter().map(|b| level[*b]).chain(r.neg.iter().map(|b| level[*b] + 1)).max().unwrap_or(0);
                if need > level[r.head] {
                    if need > n {
                        return Err(OracleError::Unstratified(atom_to_string(&atoms[r.head])));
                    }
                    level[r.head] = need;
                    changed = true;
                }
            }
        }
        let top = rules.iter().map(|r| level[r.head]).max().unwrap_or(0);
        let mut strata = vec![Vec::new(); top + 1];
        for r in rules {
            strata[level[r.head]].push(r);
        }
        Ok(IndexedProgram { atoms, index, labeled, logical, strata })
    }

    /// Least model (stratum by stratum, naive iteration) given the truth of each labeled fact.
    pub fn chain(&self, chosen: impl Fn(usize) -> bool, model: &mut Vec<bool>) {
        model.clear();
        model.resize(self.atoms.len(), false);
        for &i in &self.logical {
            model[i] = true;
        }
        for (k, &i) in self.labeled.iter().enumerate() {
            if chosen(k) {
                model[i] = true;
            }
        }
        for stratum in &self.strata {
            loop {
                let mut changed = false;
                for r in stratum {
                    if !model[r.head] && r.pos.iter().all(|b| model[*b]) && r.neg.iter().all(|b| !model[*b]) {
                        model[r.head] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }
}
