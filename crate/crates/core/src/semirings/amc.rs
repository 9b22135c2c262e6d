use rayon::prelude::*;

use super::{LabelingSemiring, ResolvedLabel, Semiring, SemiringError};
use crate::compile::{NnfCircuit, NnfNode};
use crate::propositional::{Theory, VarKind};

/// Literal labels α(v), α(¬v) for every circuit variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling<V> {
    pos: Vec<Option<V>>,
    neg: Vec<Option<V>>,
    names: Vec<String>,
}

impl<V: Clone> Labeling<V> {
    pub fn new(names: Vec<String>) -> Self {
        Labeling { pos: vec![None; names.len()], neg: vec![None; names.len()], names }
    }

    pub fn set(&mut self, var: usize, pos: V, neg: V) {
        self.pos[var] = Some(pos);
        self.neg[var] = Some(neg);
    }

    pub fn get(&self, var: usize, positive: bool) -> Option<&V> {
        if positive {
            self.pos[var].as_ref()
        } else {
            self.neg[var].as_ref()
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn literal(&self, var: usize, positive: bool) -> Result<&V, SemiringError> {
        self.get(var, positive).ok_or_else(|| SemiringError::MissingLabel {
            literal: if positive { self.names[var].clone() } else { format!("\\+ {}", self.names[var]) },
        })
    }
}

/// Literal the evaluation is conditioned on: its own label is kept, its complement gets e⊕.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryLiteral {
    pub var: usize,
    pub positive: bool,
}

/// Labels fact variables from `labels` (indexed by variable) and derived variables with
/// (e⊗, e⊗). The query variable, if any, keeps e⊗ (or its fact label) on the queried side
/// and gets e⊕ on the other.
pub fn build_labeling<S: LabelingSemiring>(
    s: &S,
    theory: &Theory,
    labels: &[Option<ResolvedLabel>],
    query: Option<QueryLiteral>,
) -> Result<Labeling<S::Value>, SemiringError> {
    build_labeling_with(s, theory, labels, query, |_, l| s.label(l))
}

/// [`build_labeling`] with a caller-supplied labeling of fact variables.
pub fn build_labeling_with<S: Semiring>(
    s: &S,
    theory: &Theory,
    labels: &[Option<ResolvedLabel>],
    query: Option<QueryLiteral>,
    mut label: impl FnMut(usize, &ResolvedLabel) -> Result<(S::Value, S::Value), SemiringError>,
) -> Result<Labeling<S::Value>, SemiringError> {
    let mut out = Labeling::new(theory.names().to_vec());
    for v in 0..theory.num_vars() {
        match (theory.kind(v), labels.get(v).and_then(|l| l.as_ref())) {
            (VarKind::Fact, Some(l)) => {
                let (p, n) = label(v, l)?;
                out.set(v, p, n);
            }
            (VarKind::Fact, None) => {}
            (VarKind::Derived, _) => out.set(v, s.one(), s.one()),
        }
    }
    if let Some(q) = query {
        let keep = match theory.kind(q.var) {
            VarKind::Fact => out.literal(q.var, q.positive)?.clone(),
            VarKind::Derived => s.one(),
        };
        if q.positive {
            out.set(q.var, keep, s.zero());
        } else {
            out.set(q.var, s.zero(), keep);
        }
    }
    Ok(out)
}

fn check_labels<S: Semiring>(c: &NnfCircuit, s: &S, alpha: &Labeling<S::Value>) -> Result<(), SemiringError> {
    for n in c.nodes() {
        if let NnfNode::Lit { var, positive } = n {
            s.validate(alpha.literal(*var, *positive)?)?;
        }
    }
    Ok(())
}

fn node_value<S: Semiring>(
    n: &NnfNode,
    s: &S,
    alpha: &Labeling<S::Value>,
    val: impl Fn(usize) -> S::Value,
) -> S::Value {
    match n {
        NnfNode::True => s.one(),
        NnfNode::False => s.zero(),
        NnfNode::Lit { var, positive } => alpha.get(*var, *positive).cloned().expect("checked"),
        NnfNode::And(cs) => cs.iter().skip(1).fold(val(cs[0]), |acc, c| s.times(&acc, &val(*c))),
        NnfNode::Or { children, .. } => children.iter().skip(1).fold(val(children[0]), |acc, c| s.plus(&acc, &val(*c))),
    }
}

/// Bottom-up fold: `Or` → ⊕, `And` → ⊗, literals → α, true → e⊗, false → e⊕.
///
/// The result is the algebraic model count only when the circuit is smooth, deterministic
/// and decomposable.
pub fn amc_evaluate<S: Semiring>(c: &NnfCircuit, s: &S, alpha: &Labeling<S::Value>) -> Result<S::Value, SemiringError> {
    check_labels(c, s, alpha)?;
    let mut values: Vec<S::Value> = Vec::with_capacity(c.node_count());
    for n in c.nodes() {
        let v = node_value(n, s, alpha, |i| values[i].clone());
        values.push(v);
    }
    Ok(values.swap_remove(c.root()))
}

/// Same fold as [`amc_evaluate`], evaluating independent nodes of each depth level on a pool
/// of `jobs` threads. Children are combined in the same fixed order, so results are
/// bit-identical to the sequential fold.
pub fn amc_evaluate_parallel<S>(
    c: &NnfCircuit,
    s: &S,
    alpha: &Labeling<S::Value>,
    jobs: usize,
) -> Result<S::Value, SemiringError>
where
    S: Semiring + Sync,
    S::Value: Send + Sync,
{
    check_labels(c, s, alpha)?;
    let mut level = vec![0usize; c.node_count()];
    for (i, n) in c.nodes().iter().enumerate() {
        level[i] = n.children().iter().map(|ch| level[*ch] + 1).max().unwrap_or(0);
    }
    let depth = level.iter().copied().max().unwrap_or(0);
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (i, l) in level.iter().enumerate() {
        by_level[*l].push(i);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SemiringError::Parallel(e.to_string()))?;
    let mut values: Vec<Option<S::Value>> = vec![None; c.node_count()];
    pool.install(|| {
        for ids in &by_level {
            let computed: Vec<(usize, S::Value)> = ids
                .par_iter()
                .map(|&i| {
                    let v = node_value(&c.nodes()[i], s, alpha, |k| {
                        values[k].clone().expect("children are on lower levels")
                    });
                    (i, v)
                })
                .collect();
            for (i, v) in computed {
                values[i] = Some(v);
            }
        }
    });
    Ok(values.swap_remove(c.root()).expect("root evaluated"))
}
