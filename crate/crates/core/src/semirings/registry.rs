use std::any::Any;
use std::collections::BTreeMap;
use std::fmt::{self, Debug};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    BooleanSemiring, CountingSemiring, Explanation, GradientSemiring, GradientValue, MaxPlusSemiring, MpeSemiring,
    MpeWitnessSemiring, ProbabilitySemiring, Semiring,
};

pub const AXIOM_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    PlusAssociative,
    PlusCommutative,
    TimesAssociative,
    TimesCommutative,
    Distributive,
    PlusIdentity,
    TimesIdentity,
    ZeroAbsorbs,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::PlusAssociative => "⊕ associativity: (a ⊕ b) ⊕ c = a ⊕ (b ⊕ c)",
            Law::PlusCommutative => "⊕ commutativity: a ⊕ b = b ⊕ a",
            Law::TimesAssociative => "⊗ associativity: (a ⊗ b) ⊗ c = a ⊗ (b ⊗ c)",
            Law::TimesCommutative => "⊗ commutativity: a ⊗ b = b ⊗ a",
            Law::Distributive => "distributivity: a ⊗ (b ⊕ c) = (a ⊗ b) ⊕ (a ⊗ c)",
            Law::PlusIdentity => "⊕ identity: a ⊕ e⊕ = a",
            Law::TimesIdentity => "⊗ identity: a ⊗ e⊗ = a",
            Law::ZeroAbsorbs => "absorption: a ⊗ e⊕ = e⊕",
        })
    }
}

/// The first law that failed and the sampled values that witness it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("semiring {semiring} violates {law} for a = {a}, b = {b}, c = {c}")]
pub struct AxiomViolation {
    pub semiring: String,
    pub law: Law,
    pub a: String,
    pub b: String,
    pub c: String,
}

/// Checks the commutative-semiring laws on `samples` random triples drawn by `sample`.
pub fn check_axioms<S, F>(s: &S, mut sample: F, samples: usize, seed: u64) -> Result<(), AxiomViolation>
where
    S: Semiring,
    S::Value: Debug,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (a, b, c) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
        let eq = |x: &S::Value, y: &S::Value| s.approx_eq(x, y);
        let checks = [
            (Law::PlusAssociative, eq(&s.plus(&s.plus(&a, &b), &c), &s.plus(&a, &s.plus(&b, &c)))),
            (Law::PlusCommutative, eq(&s.plus(&a, &b), &s.plus(&b, &a))),
            (Law::TimesAssociative, eq(&s.times(&s.times(&a, &b), &c), &s.times(&a, &s.times(&b, &c)))),
            (Law::TimesCommutative, eq(&s.times(&a, &b), &s.times(&b, &a))),
            (Law::Distributive, eq(&s.times(&a, &s.plus(&b, &c)), &s.plus(&s.times(&a, &b), &s.times(&a, &c)))),
            (Law::PlusIdentity, eq(&s.plus(&a, &s.zero()), &a)),
            (Law::TimesIdentity, eq(&s.times(&a, &s.one()), &a)),
            (Law::ZeroAbsorbs, eq(&s.times(&a, &s.zero()), &s.zero())),
        ];
        if let Some((law, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(AxiomViolation {
                semiring: s.name().to_string(),
                law: *law,
                a: format!("{a:?}"),
                b: format!("{b:?}"),
                c: format!("{c:?}"),
            });
        }
    }
    Ok(())
}

/// Semirings that passed the axiom suite, retrievable by name.
#[derive(Default)]
pub struct SemiringRegistry {
    entries: BTreeMap<String, Box<dyn Any + Send + Sync>>,
}

impl SemiringRegistry {
    pub fn new() -> Self {
        SemiringRegistry::default()
    }

    /// A registry holding every shipped semiring.
    pub fn with_builtins() -> Result<Self, AxiomViolation> {
        let mut r = SemiringRegistry::new();
        r.register(ProbabilitySemiring, sample_unit)?;
        r.register(MpeSemiring, sample_unit)?;
        r.register(BooleanSemiring, |rng: &mut ChaCha8Rng| rng.random::<bool>())?;
        r.register(CountingSemiring, |rng: &mut ChaCha8Rng| rng.random_range(0..1000u128))?;
        r.register(MaxPlusSemiring, sample_max_plus)?;
        r.register(GradientSemiring::new(3), sample_gradient)?;
        r.register(MpeWitnessSemiring, sample_witness)?;
        Ok(r)
    }

    /// Activates `s` under its name once it passes [`check_axioms`] on
    /// [`AXIOM_SAMPLES`] triples.
    pub fn register<S, F>(&mut self, s: S, sample: F) -> Result<(), AxiomViolation>
    where
        S: Semiring + Send + Sync + 'static,
        S::Value: Debug,
        F: FnMut(&mut ChaCha8Rng) -> S::Value,
    {
        check_axioms(&s, sample, AXIOM_SAMPLES, 0x5eed)?;
        self.entries.insert(s.name().to_string(), Box::new(s));
        Ok(())
    }

    pub fn get<S: Semiring + 'static>(&self, name: &str) -> Option<&S> {
        self.entries.get(name).and_then(|e| e.downcast_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

pub fn sample_unit(rng: &mut ChaCha8Rng) -> f64 {
    // include the boundary values now and then
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random::<f64>(),
    }
}

pub fn sample_max_plus(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => f64::NEG_INFINITY,
        1 => 0.0,
        _ => rng.random_range(-50.0..50.0),
    }
}

/// Explanations over a handful of variables. Probabilities avoid exact ties (other than
/// zero), where the choice between equally good explanations is arbitrary.
pub fn sample_witness(rng: &mut ChaCha8Rng) -> Explanation {
    if rng.random_range(0..10) == 0 {
        return (0.0, Vec::new());
    }
    let mut lits: Vec<(usize, bool)> =
        (0..rng.random_range(0..4)).map(|_| (rng.random_range(0..6), rng.random())).collect();
    lits.sort_unstable();
    lits.dedup();
    (rng.random_range(1e-3..1.0), lits)
}

pub fn sample_gradient(rng: &mut ChaCha8Rng) -> GradientValue {
    GradientValue::new(rng.random::<f64>(), (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
}
