use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal, Uniform};
use rayon::prelude::*;

use super::indexed::IndexedProgram;
use super::OracleError;
use crate::grounding::GroundProgram;
use crate::syntax::{atom_to_string, Atom, ConstraintExpr, DistributionExpr, FactLabel, Term};

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

enum Sampler {
    Flip(f64),
    Beta(Beta<f64>),
    Normal(Normal<f64>),
    Uniform(Uniform<f64>),
}

impl Sampler {
    fn new(d: &DistributionExpr) -> Result<Self, OracleError> {
        let bad = |e: String| OracleError::Distribution(e);
        Ok(match *d {
            DistributionExpr::Flip(p) => Sampler::Flip(p.0),
            DistributionExpr::Beta(a, b) => Sampler::Beta(Beta::new(a.0, b.0).map_err(|e| bad(e.to_string()))?),
            DistributionExpr::Normal(m, s) => Sampler::Normal(Normal::new(m.0, s.0).map_err(|e| bad(e.to_string()))?),
            DistributionExpr::Uniform(lo, hi) => {
                Sampler::Uniform(Uniform::new(lo.0, hi.0).map_err(|e| bad(e.to_string()))?)
            }
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Flip(p) => f64::from(u8::from(rng.random::<f64>() < *p)),
            Sampler::Beta(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
        }
    }
}

enum FactSampler {
    Bernoulli(f64),
    Indicator { var: usize, constraint: ConstraintExpr },
}

/// Estimates the success probability of `q` by sampling the random variables and the
/// probabilistic facts, forward chaining, and counting hits.
///
/// Sampling is split into fixed chunks with independent ChaCha streams, so the estimate
/// only depends on `seed` and `samples`, not on the number of threads.
pub fn monte_carlo_success(gp: &GroundProgram, q: &Atom, samples: usize, seed: u64) -> Result<McEstimate, OracleError> {
    let ip = IndexedProgram::new(gp)?;
    let var_index: HashMap<&Term, usize> = gp.distributions.iter().enumerate().map(|(i, d)| (&d.var, i)).collect();
    let samplers: Vec<Sampler> = gp.distributions.iter().map(|d| Sampler::new(&d.dist)).collect::<Result<_, _>>()?;
    let facts: Vec<FactSampler> = gp
        .labeled_facts()
        .map(|f| match &f.label {
            FactLabel::Probabilistic(p) | FactLabel::Learnable(p) => Ok(FactSampler::Bernoulli(p.0)),
            FactLabel::Indicator(c) => match var_index.get(&c.var) {
                Some(&var) => Ok(FactSampler::Indicator { var, constraint: c.clone() }),
                None => Err(OracleError::NotProbabilistic(atom_to_string(&f.atom))),
            },
            _ => Err(OracleError::NotProbabilistic(atom_to_string(&f.atom))),
        })
        .collect::<Result<_, _>>()?;
    let Some(&qi) = ip.index.get(q) else {
        return Ok(McEstimate { mean: 0.0, std_error: 0.0, samples });
    };

    let hits: u64 = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let n = samples as u64 / CHUNKS + u64::from(chunk < samples as u64 % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut values = vec![0.0; samplers.len()];
            let mut chosen = vec![false; facts.len()];
            let mut model = Vec::new();
            let mut hits = 0u64;
            for _ in 0..n {
                for (v, s) in values.iter_mut().zip(&samplers) {
                    *v = s.sample(&mut rng);
                }
                for (c, f) in chosen.iter_mut().zip(&facts) {
                    *c = match f {
                        FactSampler::Bernoulli(p) => rng.random::<f64>() < *p,
                        FactSampler::Indicator { var, constraint } => constraint.holds(values[*var]),
                    };
                }
                ip.chain(|k| chosen[k], &mut model);
                hits += u64::from(model[qi]);
            }
            hits
        })
        .sum();
    let mean = hits as f64 / samples as f64;
    Ok(McEstimate { mean, std_error: (mean * (1.0 - mean) / samples as f64).sqrt(), samples })
}
