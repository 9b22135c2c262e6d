use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::desugar::desugar_annotated_rules;
use super::sld::{Database, SldConfig};
use super::subst::Substitute;
use super::GroundingError;
use crate::syntax::{AnnotatedRule, Atom, Clause, DistributionalFact, FactDecl, FactLabel, Literal, Program, Term};

/// A ground instance of a fact declaration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundFact {
    pub atom: Atom,
    pub label: FactLabel,
    /// Index of the declaring fact in the desugared program.
    pub origin: usize,
}

impl GroundFact {
    pub fn is_labeled(&self) -> bool {
        !self.label.is_logical()
    }
}

/// A ground rule; `annotation` points into `facts` when the rule came from an annotated rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub clause: Clause,
    pub annotation: Option<usize>,
}

/// The query-relevant part of the grounded program.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundProgram {
    pub facts: Vec<GroundFact>,
    pub rules: Vec<GroundRule>,
    /// Answer atoms of the query, in discovery order.
    pub query_atoms: Vec<Atom>,
    pub distributions: Vec<DistributionalFact>,
}

impl GroundProgram {
    pub fn labeled_facts(&self) -> impl Iterator<Item = &GroundFact> {
        self.facts.iter().filter(|f| f.is_labeled())
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.rules.iter().map(|r| &r.clause)
    }

    /// Rules headed by each ground atom, in program order.
    pub fn rules_by_head(&self) -> BTreeMap<&Atom, Vec<&Clause>> {
        let mut m: BTreeMap<&Atom, Vec<&Clause>> = BTreeMap::new();
        for c in self.clauses() {
            m.entry(&c.head).or_default().push(c);
        }
        m
    }

    /// Source-level view: annotated-rule instances are folded back into `label :: h :- body`.
    pub fn to_program(&self) -> Program {
        let aux: BTreeSet<usize> = self.rules.iter().filter_map(|r| r.annotation).collect();
        let mut p = Program { distributions: self.distributions.clone(), ..Program::default() };
        for (i, f) in self.facts.iter().enumerate() {
            if !aux.contains(&i) {
                p.facts.push(FactDecl::new(f.label.clone(), f.atom.clone()));
            }
        }
        for r in &self.rules {
            match r.annotation {
                Some(i) => p.annotated_rules.push(AnnotatedRule {
                    label: self.facts[i].label.clone(),
                    clause: Clause::new(r.clause.head.clone(), r.clause.body[1..].to_vec()),
                }),
                None => p.rules.push(r.clause.clone()),
            }
        }
        p
    }

    /// Flat view with auxiliary facts spelled out.
    pub fn to_desugared_program(&self) -> Program {
        Program {
            facts: self.facts.iter().map(|f| FactDecl::new(f.label.clone(), f.atom.clone())).collect(),
            distributions: self.distributions.clone(),
            rules: self.clauses().cloned().collect(),
            annotated_rules: Vec::new(),
        }
    }
}

/// Ground facts and rules used by some SLD derivation of `query`, with every answer atom.
pub fn relevant_ground_program(p: &Program, query: &Atom) -> Result<GroundProgram, GroundingError> {
    relevant_ground_program_with(p, std::slice::from_ref(query), &SldConfig::default())
}

/// Union of the relevant ground programs of several goals; `query_atoms` collects the answers
/// of all of them.
pub fn relevant_ground_program_with(
    p: &Program,
    goals: &[Atom],
    config: &SldConfig,
) -> Result<GroundProgram, GroundingError> {
    let desugared = desugar_annotated_rules(p);
    let first_aux_fact = p.facts.len();
    let first_aux_rule = p.rules.len();
    let db = Database::new(&desugared);

    let mut facts: BTreeSet<(usize, Atom)> = BTreeSet::new();
    let mut rules: BTreeSet<(usize, Clause)> = BTreeSet::new();
    let mut answers: Vec<Atom> = Vec::new();
    let mut seen_answers = BTreeSet::new();
    let mut grounded: BTreeSet<Atom> = BTreeSet::new();
    let mut pending: VecDeque<Atom> = VecDeque::new();

    for goal in goals {
        for d in db.derivations(goal, config)? {
            let answer = goal.substitute(&d.subst);
            if !answer.is_ground() {
                return Err(GroundingError::NonGround {
                    what: format!("answer {}", crate::syntax::atom_to_string(&answer)),
                });
            }
            if seen_answers.insert(answer.clone()) {
                answers.push(answer);
            }
            absorb(d, &mut facts, &mut rules, &mut pending);
        }
    }
    // negated derived atoms need their own definitions grounded
    while let Some(a) = pending.pop_front() {
        if !grounded.insert(a.clone()) {
            continue;
        }
        for d in db.derivations(&a, config)? {
            absorb(d, &mut facts, &mut rules, &mut pending);
        }
    }

    let facts: Vec<(usize, Atom)> = facts.into_iter().collect();
    let fact_index: BTreeMap<&Atom, usize> = facts.iter().enumerate().map(|(i, (_, a))| (a, i)).collect();
    let heads: BTreeSet<&Atom> = rules.iter().map(|(_, c)| &c.head).collect();

    let mut ground_rules = Vec::with_capacity(rules.len());
    for (j, c) in &rules {
        // a negated atom with no definition at all is simply true
        let body: Vec<Literal> = c
            .body
            .iter()
            .filter(|l| l.positive || fact_index.contains_key(&l.atom) || heads.contains(&l.atom))
            .cloned()
            .collect();
        let annotation = (*j >= first_aux_rule).then(|| fact_index[&body[0].atom]);
        ground_rules.push(GroundRule { clause: Clause::new(c.head.clone(), body), annotation });
    }
    debug_assert!(ground_rules.iter().filter_map(|r| r.annotation).all(|i| facts[i].0 >= first_aux_fact));

    let ground_facts: Vec<GroundFact> = facts
        .iter()
        .map(|(origin, atom)| GroundFact {
            atom: atom.clone(),
            label: desugared.facts[*origin].label.clone(),
            origin: *origin,
        })
        .collect();

    let used_vars: BTreeSet<&Term> = ground_facts
        .iter()
        .filter_map(|f| match &f.label {
            FactLabel::Indicator(c) => Some(&c.var),
            _ => None,
        })
        .collect();
    let distributions = desugared.distributions.iter().filter(|d| used_vars.contains(&d.var)).cloned().collect();

    Ok(GroundProgram { facts: ground_facts, rules: ground_rules, query_atoms: answers, distributions })
}

fn absorb(
    d: super::sld::Derivation,
    facts: &mut BTreeSet<(usize, Atom)>,
    rules: &mut BTreeSet<(usize, Clause)>,
    pending: &mut VecDeque<Atom>,
) {
    for f in d.facts {
        facts.insert((f.origin, f.atom));
    }
    rules.extend(d.rules);
    pending.extend(d.negated_derived);
}

/// Grounds every predicate defined in the program (facts and rule heads).
///
/// Fails with [`GroundingError::NonGround`] when some definition has infinitely many or
/// non-ground instances, e.g. a non-ground labeled fact.
pub fn ground_all(p: &Program) -> Result<GroundProgram, GroundingError> {
    ground_all_with(p, &SldConfig::default())
}

pub fn ground_all_with(p: &Program, config: &SldConfig) -> Result<GroundProgram, GroundingError> {
    let mut keys = BTreeSet::new();
    let mut goals = Vec::new();
    let heads = p
        .facts
        .iter()
        .map(|f| &f.atom)
        .chain(p.rules.iter().map(|r| &r.head))
        .chain(p.annotated_rules.iter().map(|r| &r.clause.head));
    for a in heads {
        if keys.insert(a.key()) {
            let args = (0..a.arity()).map(|i| Term::var(format!("A{i}"))).collect();
            goals.push(Atom::new(a.predicate.clone(), args));
        }
    }
    relevant_ground_program_with(p, &goals, config)
}
