use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::store::{ParameterStore, EPSILON};
use super::{LearnError, ModelRegistry};
use crate::inference::{CompiledQuery, PipelineOptions, Query};
use crate::measures::reduce_to_probabilistic;
use crate::semirings::{GradientSemiring, GradientValue};
use crate::syntax::Program;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossKind {
    #[default]
    CrossEntropy,
    Squared,
}

/// `-(t log P + (1-t) log(1-P))` with `P` clamped to `[ε, 1-ε]`, or `(P - t)^2`.
pub fn loss(predicted: f64, target: f64, kind: LossKind) -> f64 {
    match kind {
        LossKind::CrossEntropy => {
            let p = predicted.clamp(EPSILON, 1.0 - EPSILON);
            -(target * p.ln() + (1.0 - target) * (1.0 - p).ln())
        }
        LossKind::Squared => (predicted - target).powi(2),
    }
}

/// dL/dP.
pub fn loss_derivative(predicted: f64, target: f64, kind: LossKind) -> f64 {
    match kind {
        LossKind::CrossEntropy => {
            let p = predicted.clamp(EPSILON, 1.0 - EPSILON);
            -target / p + (1.0 - target) / (1.0 - p)
        }
        LossKind::Squared => 2.0 * (predicted - target),
    }
}

/// P of the (single) answer of `c` and its gradient over the store's slots.
///
/// The store must have been built from `c.program`.
pub fn query_gradient(c: &CompiledQuery, store: &ParameterStore) -> Result<GradientValue, Error> {
    if c.num_answers() != 1 {
        return Err(LearnError::NonGroundQuery(c.query.to_string()).into());
    }
    let labels = c.labels_with(|f| store.resolve(f))?;
    let s = GradientSemiring::new(store.num_slots());
    let mut values = c.evaluate(&s, &labels)?;
    Ok(values.pop().expect("one answer").1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub query: Query,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub loss: LossKind,
    pub seed: u64,
    /// Compile each query once and only relabel afterwards; otherwise recompile every epoch.
    pub reuse_circuits: bool,
    pub pipeline: PipelineOptions,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.1,
            epochs: 20,
            batch_size: 1,
            loss: LossKind::CrossEntropy,
            seed: 0,
            reuse_circuits: true,
            pipeline: PipelineOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub store: ParameterStore,
    /// Mean loss of each epoch, evaluated with the parameters in effect for each batch.
    pub loss_trace: Vec<f64>,
    /// Number of circuit compilations performed.
    pub compilations: usize,
}

/// Mini-batch SGD on the mean loss over `data`.
///
/// Examples are shuffled each epoch by a generator seeded with `config.seed`. Within a batch
/// the per-example gradients are computed in parallel and summed in example order, so the
/// run is deterministic.
pub fn train(
    p: &Program,
    models: ModelRegistry,
    data: &[TrainingExample],
    config: &TrainConfig,
) -> Result<TrainReport, Error> {
    if data.is_empty() {
        return Err(LearnError::EmptyDataset.into());
    }
    for ex in data {
        if !ex.query.atom.is_ground() {
            return Err(LearnError::NonGroundQuery(ex.query.to_string()).into());
        }
        if !(0.0..=1.0).contains(&ex.target) {
            return Err(LearnError::BadTarget(ex.target).into());
        }
    }
    let program = if p.has_measure_facts() { reduce_to_probabilistic(p)? } else { p.clone() };
    let mut store = ParameterStore::new(&program, models)?;
    let mut cache: HashMap<Query, CompiledQuery> = HashMap::new();
    let mut compilations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::with_capacity(config.epochs);
    let batch = config.batch_size.max(1);

    for epoch in 0..config.epochs {
        if !config.reuse_circuits {
            cache.clear();
        }
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            for &i in chunk {
                if !cache.contains_key(&data[i].query) {
                    let c = CompiledQuery::compile(&program, &data[i].query, &config.pipeline)?;
                    compilations += 1;
                    cache.insert(data[i].query.clone(), c);
                }
            }
            let results: Vec<Result<(f64, Vec<f64>), Error>> = chunk
                .par_iter()
                .map(|&i| {
                    let ex = &data[i];
                    let g = query_gradient(&cache[&ex.query], &store)?;
                    let dl = loss_derivative(g.p, ex.target, config.loss);
                    Ok((loss(g.p, ex.target, config.loss), g.grad.iter().map(|d| dl * d).collect()))
                })
                .collect();
            let mut grad = vec![0.0; store.num_slots()];
            for r in results {
                let (l, g) = r?;
                epoch_loss += l;
                for (a, b) in grad.iter_mut().zip(g) {
                    *a += b;
                }
            }
            for g in &mut grad {
                *g /= chunk.len() as f64;
            }
            if grad.iter().any(|g| !g.is_finite()) {
                trace.push(f64::NAN);
                return Err(LearnError::Diverged { epoch, trace }.into());
            }
            store.apply_gradient(&grad, config.lr);
        }
        let mean = epoch_loss / data.len() as f64;
        trace.push(mean);
        if !mean.is_finite() {
            return Err(LearnError::Diverged { epoch, trace }.into());
        }
        log::debug!("epoch {epoch}: loss {mean}");
    }
    Ok(TrainReport { store, loss_trace: trace, compilations })
}
