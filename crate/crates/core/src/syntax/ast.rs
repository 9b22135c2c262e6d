use std::collections::BTreeSet;
use std::fmt;

use ordered_float::OrderedFloat;

/// A constant: a lowercase symbol or a number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Symbol(String),
    Number(OrderedFloat<f64>),
}

impl Constant {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Constant::Number(n) => Some(n.0),
            Constant::Symbol(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(Constant),
    Variable(String),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn symbol(name: impl Into<String>) -> Self {
        Term::Constant(Constant::Symbol(name.into()))
    }

    pub fn number(value: f64) -> Self {
        Term::Constant(Constant::Number(OrderedFloat(value)))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    /// Builds a compound term; a compound with no arguments collapses to a symbol.
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        if args.is_empty() {
            Term::symbol(functor)
        } else {
            Term::Compound { functor: functor.into(), args }
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Constant(_) => true,
            Term::Variable(_) => false,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Term::Constant(c) => c.as_number(),
            _ => None,
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound { args, .. } => args.iter().for_each(|a| a.collect_variables(out)),
            Term::Constant(_) => {}
        }
    }
}

/// Predicate identifier `name/arity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateKey {
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for PredicateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn key(&self) -> PredicateKey {
        PredicateKey { name: self.predicate.clone(), arity: self.args.len() }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.collect_variables(&mut out));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Literal>) -> Self {
        Clause { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        Clause { head, body: Vec::new() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// Variables in order of first appearance, head first.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.head.args.iter().for_each(|a| a.collect_variables(&mut out));
        for lit in &self.body {
            lit.atom.args.iter().for_each(|a| a.collect_variables(&mut out));
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground() && self.body.iter().all(|l| l.atom.is_ground())
    }
}

/// Comparison used inside an indicator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Relation {
    pub fn holds(self, x: f64, bound: f64) -> bool {
        match self {
            Relation::Eq => x == bound,
            Relation::Lt => x < bound,
            Relation::Gt => x > bound,
            Relation::Le => x <= bound,
            Relation::Ge => x >= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "=<",
            Relation::Ge => ">=",
        }
    }
}

/// `var relop bound`, the label of an indicator fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintExpr {
    pub var: Term,
    pub relation: Relation,
    pub bound: OrderedFloat<f64>,
}

impl ConstraintExpr {
    pub fn new(var: Term, relation: Relation, bound: f64) -> Self {
        ConstraintExpr { var, relation, bound: OrderedFloat(bound) }
    }

    pub fn holds(&self, x: f64) -> bool {
        self.relation.holds(x, self.bound.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistributionExpr {
    Flip(OrderedFloat<f64>),
    Beta(OrderedFloat<f64>, OrderedFloat<f64>),
    Normal(OrderedFloat<f64>, OrderedFloat<f64>),
    Uniform(OrderedFloat<f64>, OrderedFloat<f64>),
}

impl DistributionExpr {
    pub fn flip(p: f64) -> Self {
        DistributionExpr::Flip(OrderedFloat(p))
    }
    pub fn beta(a: f64, b: f64) -> Self {
        DistributionExpr::Beta(OrderedFloat(a), OrderedFloat(b))
    }
    pub fn normal(mean: f64, sd: f64) -> Self {
        DistributionExpr::Normal(OrderedFloat(mean), OrderedFloat(sd))
    }
    pub fn uniform(lo: f64, hi: f64) -> Self {
        DistributionExpr::Uniform(OrderedFloat(lo), OrderedFloat(hi))
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionExpr::Flip(_) => "flip",
            DistributionExpr::Beta(..) => "beta",
            DistributionExpr::Normal(..) => "normal",
            DistributionExpr::Uniform(..) => "uniform",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            DistributionExpr::Flip(p) => vec![p.0],
            DistributionExpr::Beta(a, b) | DistributionExpr::Normal(a, b) | DistributionExpr::Uniform(a, b) => {
                vec![a.0, b.0]
            }
        }
    }

    /// Checks parameter domains; returns a message on violation.
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            DistributionExpr::Flip(p) if !(0.0..=1.0).contains(&p.0) => {
                Err(format!("flip probability {} outside [0,1]", p.0))
            }
            DistributionExpr::Beta(a, b) if !(a.0 > 0.0 && b.0 > 0.0) => {
                Err(format!("beta parameters must be positive, got ({}, {})", a.0, b.0))
            }
            DistributionExpr::Normal(_, s) if !(s.0 > 0.0) => {
                Err(format!("normal standard deviation must be positive, got {}", s.0))
            }
            DistributionExpr::Uniform(lo, hi) if !(lo.0 < hi.0) => {
                Err(format!("uniform bounds must satisfy lo < hi, got ({}, {})", lo.0, hi.0))
            }
            _ => Ok(()),
        }
    }
}

/// `var ~ dist`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistributionalFact {
    pub var: Term,
    pub dist: DistributionExpr,
}

/// The label attached to a fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactLabel {
    /// Plain logical fact, always true.
    Logical,
    Probabilistic(OrderedFloat<f64>),
    /// `t(p) :: f`, a learnable probability with its initial value.
    Learnable(OrderedFloat<f64>),
    /// `{...} :: f`, raw text interpreted by the semiring in use.
    Algebraic(String),
    Neural {
        model: String,
        inputs: Vec<Term>,
    },
    Indicator(ConstraintExpr),
}

impl FactLabel {
    pub fn probability(p: f64) -> Self {
        FactLabel::Probabilistic(OrderedFloat(p))
    }

    pub fn learnable(p: f64) -> Self {
        FactLabel::Learnable(OrderedFloat(p))
    }

    pub fn is_logical(&self) -> bool {
        matches!(self, FactLabel::Logical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactDecl {
    pub label: FactLabel,
    pub atom: Atom,
}

impl FactDecl {
    pub fn new(label: FactLabel, atom: Atom) -> Self {
        FactDecl { label, atom }
    }

    pub fn logical(atom: Atom) -> Self {
        FactDecl::new(FactLabel::Logical, atom)
    }

    pub fn is_labeled(&self) -> bool {
        !self.label.is_logical()
    }
}

/// `label :: head :- body`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedRule {
    pub label: FactLabel,
    pub clause: Clause,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub facts: Vec<FactDecl>,
    pub distributions: Vec<DistributionalFact>,
    pub rules: Vec<Clause>,
    pub annotated_rules: Vec<AnnotatedRule>,
}

impl Program {
    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
            && self.distributions.is_empty()
            && self.rules.is_empty()
            && self.annotated_rules.is_empty()
    }

    pub fn labeled_facts(&self) -> impl Iterator<Item = &FactDecl> {
        self.facts.iter().filter(|f| f.is_labeled())
    }

    /// Every predicate name/arity mentioned anywhere in the program.
    pub fn predicates(&self) -> BTreeSet<PredicateKey> {
        let mut keys = BTreeSet::new();
        for f in &self.facts {
            keys.insert(f.atom.key());
        }
        let clauses = self.rules.iter().chain(self.annotated_rules.iter().map(|r| &r.clause));
        for c in clauses {
            keys.insert(c.head.key());
            for l in &c.body {
                keys.insert(l.atom.key());
            }
        }
        keys
    }

    pub fn has_measure_facts(&self) -> bool {
        !self.distributions.is_empty() || self.facts.iter().any(|f| matches!(f.label, FactLabel::Indicator(_)))
    }
}
