use std::cell::Cell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use im::Vector;

use super::desugar::desugar_annotated_rules;
use super::subst::{Substitute, Substitution};
use super::GroundingError;
use crate::syntax::{atom_to_string, Atom, Clause, Literal, PredicateKey, Program, Term};

pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SldConfig {
    /// Maximum number of resolution steps along one branch.
    pub depth_limit: usize,
}

impl Default for SldConfig {
    fn default() -> Self {
        SldConfig { depth_limit: DEFAULT_DEPTH_LIMIT }
    }
}

/// Where a proof literal's truth value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactSource {
    Logical,
    Labeled,
    /// A negated atom defined by rules; only appears with `positive == false`.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProofLiteral {
    pub atom: Atom,
    pub positive: bool,
    pub source: FactSource,
}

/// One successful SLD derivation, reduced to the ground facts it relied on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Proof {
    pub used_facts: BTreeSet<ProofLiteral>,
    /// Bindings of the goal's variables.
    pub answer: Substitution,
}

impl Proof {
    pub fn labeled_facts(&self) -> impl Iterator<Item = &ProofLiteral> {
        self.used_facts.iter().filter(|l| l.source == FactSource::Labeled)
    }
}

#[derive(Debug, Clone, Copy)]
enum ClauseRef {
    Fact(usize),
    Rule(usize),
}

/// Ancestor chain of a goal, for loop detection.
#[derive(Debug)]
enum Ancestors {
    Root,
    /// An ancestor goal; `ground_size` is cached for ground ones, which never change.
    Cons {
        atom: Atom,
        ground_size: Option<usize>,
        rest: Rc<Ancestors>,
    },
}

/// The goal followed by its `k - 1` nearest ancestors, outermost first.
fn cycle_error(atom: &Atom, ancestors: &Rc<Ancestors>, subst: &Substitution, k: usize) -> GroundingError {
    let mut chain = Vec::new();
    let mut cur = ancestors.as_ref();
    while let Ancestors::Cons { atom: a, rest, .. } = cur {
        if chain.len() + 1 == k {
            break;
        }
        chain.push(atom_to_string(&a.substitute(subst)));
        cur = rest.as_ref();
    }
    chain.push(atom_to_string(atom));
    chain.reverse();
    GroundingError::Cycle { cycle: chain }
}

/// Goal text for error messages, cut short for runaway terms.
fn abbreviated(a: &Atom) -> String {
    const MAX: usize = 120;
    let s = atom_to_string(a);
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s,
    }
}

/// Number of symbols in a ground term, `None` if it has a variable.
fn ground_term_size(t: &Term) -> Option<usize> {
    match t {
        Term::Variable(_) => None,
        Term::Constant(_) => Some(1),
        Term::Compound { args, .. } => args.iter().try_fold(1, |n, a| Some(n + ground_term_size(a)?)),
    }
}

fn ground_size(a: &Atom) -> Option<usize> {
    a.args.iter().try_fold(1, |n, t| Some(n + ground_term_size(t)?))
}

#[derive(Debug, Clone)]
struct Goal {
    literal: Literal,
    ancestors: Rc<Ancestors>,
}

#[derive(Debug, Clone)]
pub(crate) struct UsedFact {
    pub origin: usize,
    pub atom: Atom,
    pub positive: bool,
}

/// A finished derivation with every recorded instance ground.
#[derive(Debug, Clone)]
pub(crate) struct Derivation {
    pub facts: Vec<UsedFact>,
    pub rules: Vec<(usize, Clause)>,
    pub negated_derived: Vec<Atom>,
    pub subst: Substitution,
}

#[derive(Debug, Clone)]
struct Node {
    goals: Vec<Goal>,
    subst: Substitution,
    facts: Vector<UsedFact>,
    rules: Vector<(usize, Clause)>,
    negated_derived: Vector<Atom>,
    depth: usize,
}

/// Indexed clause store over a desugared program.
pub(crate) struct Database<'p> {
    pub program: &'p Program,
    index: HashMap<PredicateKey, Vec<ClauseRef>>,
    fresh: Cell<usize>,
}

impl<'p> Database<'p> {
    pub fn new(program: &'p Program) -> Self {
        debug_assert!(program.annotated_rules.is_empty());
        let mut index: HashMap<PredicateKey, Vec<ClauseRef>> = HashMap::new();
        for (i, f) in program.facts.iter().enumerate() {
            index.entry(f.atom.key()).or_default().push(ClauseRef::Fact(i));
        }
        for (i, r) in program.rules.iter().enumerate() {
            index.entry(r.head.key()).or_default().push(ClauseRef::Rule(i));
        }
        Database { program, index, fresh: Cell::new(0) }
    }

    fn next_id(&self) -> usize {
        let n = self.fresh.get();
        self.fresh.set(n + 1);
        n
    }

    fn rename_term(&self, t: &Term, id: usize, anon: &mut usize) -> Term {
        match t {
            Term::Variable(v) if v == "_" => {
                *anon += 1;
                Term::Variable(format!("_#{id}_{anon}"))
            }
            Term::Variable(v) => Term::Variable(format!("{v}#{id}")),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| self.rename_term(a, id, anon)).collect(),
            },
            c => c.clone(),
        }
    }

    fn rename_atom(&self, a: &Atom, id: usize, anon: &mut usize) -> Atom {
        Atom { predicate: a.predicate.clone(), args: a.args.iter().map(|t| self.rename_term(t, id, anon)).collect() }
    }

    fn rename_clause(&self, c: &Clause) -> Clause {
        let id = self.next_id();
        let mut anon = 0;
        Clause {
            head: self.rename_atom(&c.head, id, &mut anon),
            body: c
                .body
                .iter()
                .map(|l| Literal { atom: self.rename_atom(&l.atom, id, &mut anon), positive: l.positive })
                .collect(),
        }
    }

    /// Index of the labeled fact declaring the ground atom `a`, if any.
    fn labeled_origin(&self, a: &Atom) -> Result<Option<usize>, GroundingError> {
        let Some(refs) = self.index.get(&a.key()) else {
            return Ok(None);
        };
        let mut found = None;
        for r in refs {
            if let ClauseRef::Fact(i) = *r {
                let f = &self.program.facts[i];
                if !f.is_labeled() {
                    continue;
                }
                let mut s = Substitution::new();
                if s.unify_atoms(&f.atom, a) {
                    if found.is_some() {
                        return Err(GroundingError::AmbiguousFact { atom: atom_to_string(a) });
                    }
                    found = Some(i);
                }
            }
        }
        Ok(found)
    }

    /// All successful derivations of `goal`, in SLD order (leftmost literal, program order).
    pub fn derivations(&self, goal: &Atom, config: &SldConfig) -> Result<Vec<Derivation>, GroundingError> {
        // query variables keep their names so answers can be read off the final bindings
        let mut anon = 0;
        let goal = Atom {
            predicate: goal.predicate.clone(),
            args: goal.args.iter().map(|t| rename_anonymous(t, &mut anon)).collect(),
        };
        let root = Node {
            goals: vec![Goal { literal: Literal::pos(goal), ancestors: Rc::new(Ancestors::Root) }],
            subst: Substitution::new(),
            facts: Vector::new(),
            rules: Vector::new(),
            negated_derived: Vector::new(),
            depth: 0,
        };
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(mut node) = stack.pop() {
            let Some(goal) = node.goals.pop() else {
                out.push(self.finish(node)?);
                continue;
            };
            let atom = goal.literal.atom.substitute(&node.subst);
            if !goal.literal.positive {
                if !atom.is_ground() {
                    return Err(GroundingError::Floundering { literal: format!("\\+ {}", atom_to_string(&atom)) });
                }
                match self.labeled_origin(&atom)? {
                    Some(origin) => node.facts.push_back(UsedFact { origin, atom, positive: false }),
                    None => node.negated_derived.push_back(atom),
                }
                stack.push(node);
                continue;
            }

            let size = ground_size(&atom);
            self.check_ancestors(&atom, size, &goal.ancestors, &node.subst)?;
            if node.depth >= config.depth_limit {
                return Err(GroundingError::Nontermination {
                    goal: abbreviated(&atom),
                    depth_limit: config.depth_limit,
                });
            }
            let Some(refs) = self.index.get(&atom.key()) else {
                continue;
            };
            let mut children = Vec::new();
            for r in refs {
                match *r {
                    ClauseRef::Fact(i) => {
                        let fact = &self.program.facts[i];
                        let id = self.next_id();
                        let mut anon = 0;
                        let renamed = self.rename_atom(&fact.atom, id, &mut anon);
                        let mut s = node.subst.clone();
                        if s.unify_atoms(&renamed, &atom) {
                            let mut child = Node {
                                goals: node.goals.clone(),
                                subst: s,
                                facts: node.facts.clone(),
                                rules: node.rules.clone(),
                                negated_derived: node.negated_derived.clone(),
                                depth: node.depth + 1,
                            };
                            child.facts.push_back(UsedFact { origin: i, atom: renamed, positive: true });
                            children.push(child);
                        }
                    }
                    ClauseRef::Rule(j) => {
                        let renamed = self.rename_clause(&self.program.rules[j]);
                        let mut s = node.subst.clone();
                        if s.unify_atoms(&renamed.head, &atom) {
                            let ancestors = Rc::new(Ancestors::Cons {
                                atom: atom.clone(),
                                ground_size: size,
                                rest: goal.ancestors.clone(),
                            });
                            let mut goals = node.goals.clone();
                            for lit in renamed.body.iter().rev() {
                                goals.push(Goal { literal: lit.clone(), ancestors: ancestors.clone() });
                            }
                            let mut rules = node.rules.clone();
                            rules.push_back((j, renamed));
                            children.push(Node {
                                goals,
                                subst: s,
                                facts: node.facts.clone(),
                                rules,
                                negated_derived: node.negated_derived.clone(),
                                depth: node.depth + 1,
                            });
                        }
                    }
                }
            }
            stack.extend(children.into_iter().rev());
        }
        Ok(out)
    }

    fn check_ancestors(
        &self,
        atom: &Atom,
        size: Option<usize>,
        ancestors: &Rc<Ancestors>,
        subst: &Substitution,
    ) -> Result<(), GroundingError> {
        let mut cur = ancestors.as_ref();
        let mut k = 0;
        while let Ancestors::Cons { atom: a, ground_size, rest } = cur {
            cur = rest.as_ref();
            k += 1;
            match ground_size {
                // a ground ancestor can only repeat a ground goal of the same size
                Some(n) => {
                    if size == Some(*n) && a == atom {
                        return Err(cycle_error(atom, ancestors, subst, k));
                    }
                }
                None => {
                    let a = a.substitute(subst);
                    if a == *atom && size.is_some() {
                        return Err(cycle_error(atom, ancestors, subst, k));
                    }
                    if is_variant(&a, atom) {
                        return Err(GroundingError::Nontermination {
                            goal: abbreviated(atom),
                            depth_limit: usize::MAX,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(&self, node: Node) -> Result<Derivation, GroundingError> {
        let s = node.subst;
        let mut facts = Vec::with_capacity(node.facts.len());
        for f in node.facts {
            let atom = f.atom.substitute(&s);
            if !atom.is_ground() {
                return Err(GroundingError::NonGround { what: format!("fact instance {}", atom_to_string(&atom)) });
            }
            facts.push(UsedFact { atom, ..f });
        }
        let mut rules = Vec::with_capacity(node.rules.len());
        for (j, c) in node.rules {
            let c = c.substitute(&s);
            if !c.is_ground() {
                return Err(GroundingError::NonGround {
                    what: format!("rule instance {}", crate::syntax::clause_to_string(&c)),
                });
            }
            rules.push((j, c));
        }
        Ok(Derivation { facts, rules, negated_derived: node.negated_derived.into_iter().collect(), subst: s })
    }
}

fn rename_anonymous(t: &Term, anon: &mut usize) -> Term {
    match t {
        Term::Variable(v) if v == "_" => {
            *anon += 1;
            Term::Variable(format!("_#q_{anon}"))
        }
        Term::Compound { functor, args } => {
            Term::Compound { functor: functor.clone(), args: args.iter().map(|a| rename_anonymous(a, anon)).collect() }
        }
        other => other.clone(),
    }
}

/// Equal up to a consistent bijective renaming of variables.
fn is_variant(a: &Atom, b: &Atom) -> bool {
    fn go(x: &Term, y: &Term, fw: &mut HashMap<String, String>, bw: &mut HashMap<String, String>) -> bool {
        match (x, y) {
            (Term::Variable(u), Term::Variable(v)) => {
                let f = fw.entry(u.clone()).or_insert_with(|| v.clone()).clone();
                let b = bw.entry(v.clone()).or_insert_with(|| u.clone()).clone();
                f == *v && b == *u
            }
            (Term::Constant(c), Term::Constant(d)) => c == d,
            (Term::Compound { functor: f, args: xs }, Term::Compound { functor: g, args: ys }) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fw, bw))
            }
            _ => false,
        }
    }
    let (mut fw, mut bw) = (HashMap::new(), HashMap::new());
    a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| go(x, y, &mut fw, &mut bw))
}

/// Every SLD proof of `goal`, deduplicated by used facts and answer.
///
/// Annotated rules are desugared first. Negated literals are not resolved: a negated
/// labeled fact is recorded as a negative fact literal and a negated derived atom as a
/// [`FactSource::Derived`] literal.
pub fn sld_proofs(program: &Program, goal: &Atom, config: &SldConfig) -> Result<BTreeSet<Proof>, GroundingError> {
    let desugared = desugar_annotated_rules(program);
    let db = Database::new(&desugared);
    let vars = goal.variables();
    let mut proofs = BTreeSet::new();
    for d in db.derivations(goal, config)? {
        let mut used = BTreeSet::new();
        for f in &d.facts {
            let source = if desugared.facts[f.origin].is_labeled() { FactSource::Labeled } else { FactSource::Logical };
            used.insert(ProofLiteral { atom: f.atom.clone(), positive: f.positive, source });
        }
        for a in &d.negated_derived {
            used.insert(ProofLiteral { atom: a.clone(), positive: false, source: FactSource::Derived });
        }
        proofs.insert(Proof { used_facts: used, answer: d.subst.restrict(&vars) });
    }
    Ok(proofs)
}
