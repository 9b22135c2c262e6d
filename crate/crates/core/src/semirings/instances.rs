use super::{parse_label_numbers, LabelingSemiring, ResolvedLabel, Semiring, SemiringError};

pub(crate) const TOL: f64 = 1e-9;

pub(crate) fn close(a: f64, b: f64) -> bool {
    if a == b {
        return true; // covers matching infinities
    }
    (a - b).abs() <= TOL * (1.0 + a.abs().max(b.abs()))
}

/// (ℝ≥0, +, ×, 0, 1): weighted model counting.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProbabilitySemiring;

impl Semiring for ProbabilitySemiring {
    type Value = f64;
    fn name(&self) -> &str {
        "prob"
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn times(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn approx_eq(&self, a: &f64, b: &f64) -> bool {
        close(*a, *b)
    }
}

/// Probability-like labels: a fixed probability, or `{p}` / `{pos, neg}` text.
fn probability_pair(l: &ResolvedLabel) -> Result<(f64, f64), SemiringError> {
    match l {
        ResolvedLabel::Fixed(p) | ResolvedLabel::Learnable { p, .. } | ResolvedLabel::Neural { p, .. } => {
            Ok((*p, 1.0 - *p))
        }
        ResolvedLabel::Algebraic(text) => match parse_label_numbers(text)?.as_slice() {
            [p] => Ok((*p, 1.0 - *p)),
            [p, n] => Ok((*p, *n)),
            _ => Err(SemiringError::BadLabel(text.clone())),
        },
    }
}

impl LabelingSemiring for ProbabilitySemiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(f64, f64), SemiringError> {
        probability_pair(l)
    }
}

/// (ℝ≥0, max, ×, 0, 1): most probable explanation.
#[derive(Debug, Clone, Copy, Default)]
pub struct MpeSemiring;

impl Semiring for MpeSemiring {
    type Value = f64;
    fn name(&self) -> &str {
        "mpe"
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn times(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn approx_eq(&self, a: &f64, b: &f64) -> bool {
        close(*a, *b)
    }
}

impl LabelingSemiring for MpeSemiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(f64, f64), SemiringError> {
        probability_pair(l)
    }
}

/// ({⊥, ⊤}, ∨, ∧, ⊥, ⊤): satisfiability. A fact can be true iff p > 0 and false iff p < 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct BooleanSemiring;

impl Semiring for BooleanSemiring {
    type Value = bool;
    fn name(&self) -> &str {
        "bool"
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
}

impl LabelingSemiring for BooleanSemiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(bool, bool), SemiringError> {
        if let ResolvedLabel::Algebraic(text) = l {
            let parse = |s: &str| match s.trim() {
                "true" | "1" => Ok(true),
                "false" | "0" => Ok(false),
                _ => Err(SemiringError::BadLabel(text.clone())),
            };
            let parts: Vec<&str> = text.split(',').collect();
            return match parts.as_slice() {
                [p] => parse(p).map(|v| (v, !v)),
                [p, n] => Ok((parse(p)?, parse(n)?)),
                _ => Err(SemiringError::BadLabel(text.clone())),
            };
        }
        let (p, n) = probability_pair(l)?;
        Ok((p > 0.0, n > 0.0))
    }
}

/// (ℕ, +, ×, 0, 1) with every literal labeled 1: counts models.
#[derive(Debug, Clone, Copy, Default)]
pub struct CountingSemiring;

impl Semiring for CountingSemiring {
    type Value = u128;
    fn name(&self) -> &str {
        "count"
    }
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    fn plus(&self, a: &u128, b: &u128) -> u128 {
        a + b
    }
    fn times(&self, a: &u128, b: &u128) -> u128 {
        a * b
    }
}

impl LabelingSemiring for CountingSemiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(u128, u128), SemiringError> {
        match l {
            ResolvedLabel::Algebraic(text) => {
                let parts: Result<Vec<u128>, _> = text.split(',').map(|s| s.trim().parse::<u128>()).collect();
                match parts.map_err(|_| SemiringError::BadLabel(text.clone()))?.as_slice() {
                    [p] => Ok((*p, 1)),
                    [p, n] => Ok((*p, *n)),
                    _ => Err(SemiringError::BadLabel(text.clone())),
                }
            }
            _ => Ok((1, 1)),
        }
    }
}

/// (ℝ ∪ {−∞}, max, +, −∞, 0): tropical max-plus. Probabilities are labeled by their logarithm,
/// so evaluation yields the log-probability of the most probable explanation.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxPlusSemiring;

impl Semiring for MaxPlusSemiring {
    type Value = f64;
    fn name(&self) -> &str {
        "maxplus"
    }
    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn times(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn approx_eq(&self, a: &f64, b: &f64) -> bool {
        close(*a, *b)
    }
}

impl LabelingSemiring for MaxPlusSemiring {
    fn label(&self, l: &ResolvedLabel) -> Result<(f64, f64), SemiringError> {
        if let ResolvedLabel::Algebraic(text) = l {
            return match parse_label_numbers(text)?.as_slice() {
                [p] => Ok((*p, 0.0)),
                [p, n] => Ok((*p, *n)),
                _ => Err(SemiringError::BadLabel(text.clone())),
            };
        }
        let (p, n) = probability_pair(l)?;
        Ok((p.ln(), n.ln()))
    }
}

/// Max-times with the arg-max kept: values are a probability and the literals of one best
/// model. Ties go to the lexicographically smallest literal list.
#[derive(Debug, Clone, Copy, Default)]
pub struct MpeWitnessSemiring;

/// Probability of an explanation and its literals `(variable, sign)`, sorted.
pub type Explanation = (f64, Vec<(usize, bool)>);

impl Semiring for MpeWitnessSemiring {
    type Value = Explanation;
    fn name(&self) -> &str {
        "mpe-witness"
    }
    fn zero(&self) -> Explanation {
        (0.0, Vec::new())
    }
    fn one(&self) -> Explanation {
        (1.0, Vec::new())
    }
    fn plus(&self, a: &Explanation, b: &Explanation) -> Explanation {
        if close(a.0, b.0) {
            if a.1 <= b.1 {
                a.clone()
            } else {
                b.clone()
            }
        } else if a.0 > b.0 {
            a.clone()
        } else {
            b.clone()
        }
    }
    fn times(&self, a: &Explanation, b: &Explanation) -> Explanation {
        if a.0 == 0.0 || b.0 == 0.0 {
            return self.zero();
        }
        let mut lits = a.1.clone();
        lits.extend_from_slice(&b.1);
        lits.sort_unstable();
        lits.dedup();
        (a.0 * b.0, lits)
    }
    /// Impossible explanations are all the same explanation.
    fn approx_eq(&self, a: &Explanation, b: &Explanation) -> bool {
        close(a.0, b.0) && (a.1 == b.1 || a.0 == 0.0)
    }
}

impl MpeWitnessSemiring {
    /// Labels for theory variable `var`; use [`Semiring::one`] for derived atoms.
    pub fn label_var(&self, var: usize, l: &ResolvedLabel) -> Result<(Explanation, Explanation), SemiringError> {
        let (p, n) = probability_pair(l)?;
        Ok(((p, vec![(var, true)]), (n, vec![(var, false)])))
    }
}
