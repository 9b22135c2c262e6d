//! The three-step pipeline: relevant grounding, compilation of the completion into an
//! sd-DNNF circuit, and evaluation of the circuit under a semiring.
//!
//! A query is compiled once. Its answers share the circuit and differ only in the labeling of
//! their query variable, so evaluating every answer (or re-evaluating after a parameter
//! update) costs one linear pass each.

use crate::compile::{compile_smooth, CompileOptions, NnfCircuit};
use crate::grounding::{relevant_ground_program_with, GroundFact, GroundProgram, SldConfig};
use crate::measures::reduce_to_probabilistic;
use crate::propositional::{clark_completion, Theory, VarKind};
use crate::semirings::{
    amc_evaluate, amc_evaluate_parallel, build_labeling, build_labeling_with, Labeling, LabelingSemiring,
    MpeWitnessSemiring, ProbabilitySemiring, QueryLiteral, ResolvedLabel, Semiring,
};
use crate::syntax::{atom_to_string, parse_query, Atom, FactLabel, Program, SyntaxError};
use crate::Error;

/// A possibly negated query atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub atom: Atom,
    pub positive: bool,
}

impl Query {
    pub fn positive(atom: Atom) -> Self {
        Query { atom, positive: true }
    }

    /// Parses `a(..)` or `\+ a(..)`.
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let t = text.trim();
        match t.strip_prefix("\\+") {
            Some(rest) => Ok(Query { atom: parse_query(rest)?, positive: false }),
            None => Ok(Query::positive(parse_query(t)?)),
        }
    }
}

impl std::fmt::Display for Query {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.positive {
            write!(f, "\\+ ")?;
        }
        write!(f, "{}", atom_to_string(&self.atom))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub sld: SldConfig,
    pub compile: CompileOptions,
    /// Worker threads for circuit evaluation; 1 evaluates sequentially.
    pub jobs: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { sld: SldConfig::default(), compile: CompileOptions::default(), jobs: 1 }
    }
}

/// Label of a ground fact that needs no parameters or models: fixed, learnable (at its
/// initial value) or algebraic.
pub fn static_label(f: &GroundFact) -> Result<ResolvedLabel, Error> {
    match &f.label {
        FactLabel::Probabilistic(p) | FactLabel::Learnable(p) => Ok(ResolvedLabel::Fixed(p.0)),
        FactLabel::Algebraic(text) => Ok(ResolvedLabel::Algebraic(text.clone())),
        FactLabel::Neural { model, .. } => {
            Err(Error::Query(format!("neural fact {} needs model `{model}`", atom_to_string(&f.atom))))
        }
        FactLabel::Indicator(_) => {
            Err(Error::Query(format!("indicator fact {} was not reduced", atom_to_string(&f.atom))))
        }
        FactLabel::Logical => unreachable!("logical facts are not variables"),
    }
}

/// One answer of an MPE query: the best world's probability and its fact literals.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeAnswer {
    pub answer: Atom,
    pub probability: f64,
    pub explanation: Vec<(Atom, bool)>,
}

#[derive(Debug, Clone)]
pub struct CompiledQuery {
    pub query: Query,
    /// The program after indicator facts were reduced to probabilistic ones.
    pub program: Program,
    pub ground: GroundProgram,
    pub theory: Theory,
    pub circuit: NnfCircuit,
    answers: Vec<(Atom, usize)>,
    jobs: usize,
}

impl CompiledQuery {
    pub fn compile(p: &Program, q: &Query, options: &PipelineOptions) -> Result<Self, Error> {
        if !q.positive && !q.atom.is_ground() {
            return Err(Error::Query(format!("negated query {q} must be ground")));
        }
        let program = if p.has_measure_facts() { reduce_to_probabilistic(p)? } else { p.clone() };
        let mut ground = relevant_ground_program_with(&program, std::slice::from_ref(&q.atom), &options.sld)?;
        if ground.query_atoms.is_empty() && q.atom.is_ground() {
            // no derivation: the atom is still a (false) answer
            ground.query_atoms.push(q.atom.clone());
        }
        let theory = clark_completion(&ground)?;
        let circuit = compile_smooth(&theory, &options.compile)?;
        let answers = ground
            .query_atoms
            .iter()
            .map(|a| (a.clone(), theory.lookup(a).expect("answers are theory variables")))
            .collect();
        log::debug!(
            "compiled {q}: {} ground facts, {} ground rules, {} variables, {} circuit nodes",
            ground.facts.len(),
            ground.rules.len(),
            theory.num_vars(),
            circuit.node_count()
        );
        Ok(CompiledQuery { query: q.clone(), program, ground, theory, circuit, answers, jobs: options.jobs.max(1) })
    }

    pub fn answers(&self) -> impl Iterator<Item = &Atom> {
        self.answers.iter().map(|(a, _)| a)
    }

    pub fn num_answers(&self) -> usize {
        self.answers.len()
    }

    pub fn query_literal(&self, answer: usize) -> QueryLiteral {
        QueryLiteral { var: self.answers[answer].1, positive: self.query.positive }
    }

    /// Ground labeled facts that are variables of the theory, with their variable.
    pub fn fact_variables(&self) -> impl Iterator<Item = (usize, &GroundFact)> {
        self.ground.labeled_facts().filter_map(|f| self.theory.lookup(&f.atom).map(|v| (v, f)))
    }

    /// Resolves the label of every fact variable; the result is indexed by variable.
    pub fn labels_with(
        &self,
        mut resolve: impl FnMut(&GroundFact) -> Result<ResolvedLabel, Error>,
    ) -> Result<Vec<Option<ResolvedLabel>>, Error> {
        let mut labels = vec![None; self.theory.num_vars()];
        for (v, f) in self.fact_variables() {
            debug_assert_eq!(self.theory.kind(v), VarKind::Fact);
            labels[v] = Some(resolve(f)?);
        }
        Ok(labels)
    }

    pub fn static_labels(&self) -> Result<Vec<Option<ResolvedLabel>>, Error> {
        self.labels_with(static_label)
    }

    /// Folds the circuit under a complete labeling.
    pub fn fold<S>(&self, s: &S, alpha: &Labeling<S::Value>) -> Result<S::Value, Error>
    where
        S: Semiring + Sync,
        S::Value: Send + Sync,
    {
        Ok(if self.jobs > 1 {
            amc_evaluate_parallel(&self.circuit, s, alpha, self.jobs)?
        } else {
            amc_evaluate(&self.circuit, s, alpha)?
        })
    }

    /// AMC of the theory conjoined with each answer literal.
    pub fn evaluate<S>(&self, s: &S, labels: &[Option<ResolvedLabel>]) -> Result<Vec<(Atom, S::Value)>, Error>
    where
        S: LabelingSemiring + Sync,
        S::Value: Send + Sync,
    {
        (0..self.answers.len())
            .map(|i| {
                let alpha = build_labeling(s, &self.theory, labels, Some(self.query_literal(i)))?;
                Ok((self.answers[i].0.clone(), self.fold(s, &alpha)?))
            })
            .collect()
    }

    /// Most probable world per answer, with the fact literals that make it up.
    pub fn mpe(&self, labels: &[Option<ResolvedLabel>]) -> Result<Vec<MpeAnswer>, Error> {
        let s = MpeWitnessSemiring;
        (0..self.answers.len())
            .map(|i| {
                let alpha = build_labeling_with(&s, &self.theory, labels, Some(self.query_literal(i)), |v, l| {
                    s.label_var(v, l)
                })?;
                let (probability, lits) = self.fold(&s, &alpha)?;
                Ok(MpeAnswer {
                    answer: self.answers[i].0.clone(),
                    probability,
                    explanation: lits
                        .into_iter()
                        .filter(|(v, _)| self.theory.kind(*v) == VarKind::Fact)
                        .map(|(v, sign)| (self.theory.atom(v).clone(), sign))
                        .collect(),
                })
            })
            .collect()
    }
}

/// Compiles `q` and evaluates every answer under `s` with static labels.
pub fn query_program<S>(
    p: &Program,
    q: &Query,
    s: &S,
    options: &PipelineOptions,
) -> Result<Vec<(Atom, S::Value)>, Error>
where
    S: LabelingSemiring + Sync,
    S::Value: Send + Sync,
{
    let c = CompiledQuery::compile(p, q, options)?;
    let labels = c.static_labels()?;
    c.evaluate(s, &labels)
}

/// Success probability of a ground query.
pub fn success_probability(p: &Program, q: &Atom) -> Result<f64, Error> {
    if !q.is_ground() {
        return Err(Error::Query(format!("{} is not ground", atom_to_string(q))));
    }
    let answers = query_program(p, &Query::positive(q.clone()), &ProbabilitySemiring, &PipelineOptions::default())?;
    Ok(answers.first().map_or(0.0, |(_, v)| *v))
}
