//! Commutative semirings, literal labelings and algebraic model counting over circuits.

mod amc;
mod gradient;
mod instances;
mod registry;

use std::fmt::Debug;
use std::str::FromStr;

pub use amc::{amc_evaluate, amc_evaluate_parallel, build_labeling, build_labeling_with, Labeling, QueryLiteral};
pub use gradient::{grad_plus, grad_times, GradientSemiring, GradientValue};
pub use instances::{
    BooleanSemiring, CountingSemiring, Explanation, MaxPlusSemiring, MpeSemiring, MpeWitnessSemiring,
    ProbabilitySemiring,
};
pub use registry::{
    check_axioms, sample_gradient, sample_max_plus, sample_unit, sample_witness, AxiomViolation, Law, SemiringRegistry,
    AXIOM_SAMPLES,
};

/// `(A, ⊕, ⊗, e⊕, e⊗)` with both operations associative and commutative and ⊗ distributing
/// over ⊕.
pub trait Semiring {
    type Value: Clone + Debug + PartialEq;

    fn name(&self) -> &str;
    /// e⊕
    fn zero(&self) -> Self::Value;
    /// e⊗
    fn one(&self) -> Self::Value;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn approx_eq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }

    /// Rejects values that do not belong to this instance's domain.
    fn validate(&self, _v: &Self::Value) -> Result<(), SemiringError> {
        Ok(())
    }
}

/// Fact label after parameters and neural outputs have been looked up.
#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedLabel {
    Fixed(f64),
    Learnable {
        p: f64,
        slot: usize,
    },
    Neural {
        p: f64,
        slot: usize,
    },
    /// Raw text of an algebraic label, interpreted by the semiring.
    Algebraic(String),
}

impl ResolvedLabel {
    pub fn probability(&self) -> Option<f64> {
        match self {
            ResolvedLabel::Fixed(p) | ResolvedLabel::Learnable { p, .. } | ResolvedLabel::Neural { p, .. } => Some(*p),
            ResolvedLabel::Algebraic(_) => None,
        }
    }
}

/// Semirings that can label the positive and negative literal of a fact.
pub trait LabelingSemiring: Semiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(Self::Value, Self::Value), SemiringError>;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemiringError {
    #[error("no label for literal {literal}")]
    MissingLabel { literal: String },
    #[error("gradient dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("label {{{0}}} is not a value of this semiring")]
    BadLabel(String),
    #[error("unknown semiring `{0}` (expected prob, mpe, bool, count, maxplus or gradient)")]
    UnknownKind(String),
    #[error("thread pool: {0}")]
    Parallel(String),
}

/// Built-in semirings selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiringKind {
    Probability,
    Mpe,
    Boolean,
    Counting,
    MaxPlus,
    Gradient,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Probability => "prob",
            SemiringKind::Mpe => "mpe",
            SemiringKind::Boolean => "bool",
            SemiringKind::Counting => "count",
            SemiringKind::MaxPlus => "maxplus",
            SemiringKind::Gradient => "gradient",
        }
    }
}

impl FromStr for SemiringKind {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "prob" | "probability" => SemiringKind::Probability,
            "mpe" => SemiringKind::Mpe,
            "bool" | "boolean" => SemiringKind::Boolean,
            "count" | "counting" => SemiringKind::Counting,
            "maxplus" | "tropical" => SemiringKind::MaxPlus,
            "gradient" | "grad" => SemiringKind::Gradient,
            other => return Err(SemiringError::UnknownKind(other.to_string())),
        })
    }
}

/// Comma-separated reals of an algebraic label.
pub(crate) fn parse_label_numbers(text: &str) -> Result<Vec<f64>, SemiringError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| SemiringError::BadLabel(text.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_smooth, CompileOptions, NnfBuilder};
    use crate::grounding::ground_all;
    use crate::propositional::{clark_completion, Theory};
    use crate::syntax::{parse_program, Atom};

    const SPRINKLER: &str =
        "0.25 :: cloudy.\n0.8 :: humid.\n0.5 :: sprinkler.\nrain :- cloudy, humid.\nwet :- rain.\nwet :- sprinkler.\n";

    fn sprinkler() -> (Theory, Vec<Option<ResolvedLabel>>, QueryLiteral) {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        let t = clark_completion(&gp).unwrap();
        let mut labels = vec![None; t.num_vars()];
        for f in gp.labeled_facts() {
            let p = match f.label {
                crate::syntax::FactLabel::Probabilistic(p) => p.0,
                _ => unreachable!(),
            };
            labels[t.lookup(&f.atom).unwrap()] = Some(ResolvedLabel::Fixed(p));
        }
        let q = QueryLiteral { var: t.lookup(&Atom::prop("wet")).unwrap(), positive: true };
        (t, labels, q)
    }

    fn eval<S: LabelingSemiring>(s: &S) -> S::Value {
        let (t, labels, q) = sprinkler();
        let c = compile_smooth(&t, &CompileOptions::default()).unwrap();
        let alpha = build_labeling(s, &t, &labels, Some(q)).unwrap();
        amc_evaluate(&c, s, &alpha).unwrap()
    }

    #[test]
    fn sprinkler_values() {
        assert!((eval(&ProbabilitySemiring) - 0.6).abs() < 1e-12);
        assert!((eval(&MpeSemiring) - 0.3).abs() < 1e-12);
        assert!(eval(&BooleanSemiring));
        assert!((eval(&MaxPlusSemiring) - 0.3f64.ln()).abs() < 1e-12);
        let g = eval(&GradientSemiring::new(0));
        assert!((g.p - 0.6).abs() < 1e-12 && g.grad.is_empty());
    }

    #[test]
    fn counting_without_query_counts_all_worlds() {
        let (t, labels, _) = sprinkler();
        let c = compile_smooth(&t, &CompileOptions::default()).unwrap();
        let alpha = build_labeling(&CountingSemiring, &t, &labels, None).unwrap();
        assert_eq!(amc_evaluate(&c, &CountingSemiring, &alpha).unwrap(), 8);
    }

    #[test]
    fn missing_label_names_the_literal() {
        let (t, mut labels, q) = sprinkler();
        labels[t.lookup(&Atom::prop("humid")).unwrap()] = None;
        let c = compile_smooth(&t, &CompileOptions::default()).unwrap();
        let alpha = build_labeling(&ProbabilitySemiring, &t, &labels, Some(q)).unwrap();
        let err = amc_evaluate(&c, &ProbabilitySemiring, &alpha).unwrap_err();
        assert!(matches!(err, SemiringError::MissingLabel { literal } if literal.contains("humid")));
    }

    #[test]
    fn false_node_is_zero_everywhere() {
        let mut b = NnfBuilder::new(Vec::new());
        let f = b.false_node();
        let c = b.finish(f);
        assert_eq!(amc_evaluate(&c, &ProbabilitySemiring, &Labeling::new(Vec::new())).unwrap(), 0.0);
        assert_eq!(amc_evaluate(&c, &MaxPlusSemiring, &Labeling::new(Vec::new())).unwrap(), f64::NEG_INFINITY);
        assert!(!amc_evaluate(&c, &BooleanSemiring, &Labeling::new(Vec::new())).unwrap());
    }

    #[test]
    fn parallel_fold_matches_sequential_bitwise() {
        let (t, labels, q) = sprinkler();
        let c = compile_smooth(&t, &CompileOptions::default()).unwrap();
        let s = GradientSemiring::new(0);
        let alpha = build_labeling(&s, &t, &labels, Some(q)).unwrap();
        let seq = amc_evaluate(&c, &s, &alpha).unwrap();
        let par = amc_evaluate_parallel(&c, &s, &alpha, 4).unwrap();
        assert_eq!(seq.p.to_bits(), par.p.to_bits());
    }

    #[test]
    fn algebraic_labels() {
        let l = ResolvedLabel::Algebraic("0.3, 0.6".into());
        assert_eq!(ProbabilitySemiring.label(&l).unwrap(), (0.3, 0.6));
        assert_eq!(BooleanSemiring.label(&ResolvedLabel::Algebraic("true".into())).unwrap(), (true, false));
        assert_eq!(CountingSemiring.label(&ResolvedLabel::Algebraic("3".into())).unwrap(), (3, 1));
        assert!(ProbabilitySemiring.label(&ResolvedLabel::Algebraic("x".into())).is_err());
        assert!("nope".parse::<SemiringKind>().is_err());
    }
}
