use std::collections::{BTreeMap, HashMap};

use super::models::{LogisticModel, ModelRegistry};
use super::LearnError;
use crate::grounding::{desugar_annotated_rules, GroundFact};
use crate::inference::static_label;
use crate::semirings::ResolvedLabel;
use crate::syntax::{atom_to_string, term_to_string, Atom, FactLabel, Program};
use crate::Error;

/// Lower and upper margin keeping learnable probabilities away from 0 and 1.
pub const EPSILON: f64 = 1e-6;

/// What a gradient slot stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    /// A `t(p) :: f` probability. Every ground instance of the declaration shares it.
    Fact { origin: usize, atom: Atom },
    /// The output of a model on one neural fact; its gradient flows on into the model.
    NeuralOutput { origin: usize, model: String, atom: Atom, features: Vec<f64> },
}

/// The learnable parameters of a program: one slot per learnable fact declaration, then one
/// per neural fact, in program order. Slot order is the order of gradient vectors.
#[derive(Debug, Clone)]
pub struct ParameterStore {
    slots: Vec<Slot>,
    /// Current probability of each fact slot (unused for neural slots).
    values: Vec<f64>,
    by_origin: HashMap<usize, usize>,
    models: ModelRegistry,
}

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(EPSILON, 1.0 - EPSILON)
}

impl ParameterStore {
    /// Collects the parameters of `p` (annotated rules included). Models referenced by
    /// neural facts but missing from `models` start as zero-weight logistic regressions.
    pub fn new(p: &Program, mut models: ModelRegistry) -> Result<Self, Error> {
        let d = desugar_annotated_rules(p);
        let mut slots = Vec::new();
        let mut values = Vec::new();
        let mut by_origin = HashMap::new();
        for (origin, f) in d.facts.iter().enumerate() {
            if let FactLabel::Learnable(v) = f.label {
                by_origin.insert(origin, slots.len());
                slots.push(Slot::Fact { origin, atom: f.atom.clone() });
                values.push(clamp_probability(v.0));
            }
        }

        let mut raw: Vec<(usize, String, Atom, Vec<f64>)> = Vec::new();
        for (origin, f) in d.facts.iter().enumerate() {
            let FactLabel::Neural { model, inputs } = &f.label else { continue };
            if !f.atom.is_ground() {
                return Err(
                    LearnError::Encoding(format!("neural fact {} is not ground", atom_to_string(&f.atom))).into()
                );
            }
            let x = inputs
                .iter()
                .map(|t| {
                    t.as_number().ok_or_else(|| {
                        LearnError::Encoding(format!(
                            "input {} of {} is not a number",
                            term_to_string(t),
                            atom_to_string(&f.atom)
                        ))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            raw.push((origin, model.clone(), f.atom.clone(), x));
        }
        for (model, xs) in normalize_features(&mut raw)? {
            let dim = xs;
            match models.get(&model) {
                Some(m) => {
                    if let Some(want) = m.input_dim() {
                        if want != dim {
                            return Err(LearnError::Encoding(format!(
                                "model `{model}` takes {want} inputs, neural facts give {dim}"
                            ))
                            .into());
                        }
                    }
                }
                None => {
                    log::info!("model `{model}` not supplied; using a zero-weight logistic regression");
                    models.insert(model.clone(), Box::new(LogisticModel::zeros(dim)));
                }
            }
        }
        for (origin, model, atom, features) in raw {
            by_origin.insert(origin, slots.len());
            slots.push(Slot::NeuralOutput { origin, model, atom, features });
            values.push(f64::NAN);
        }
        Ok(ParameterStore { slots, values, by_origin, models })
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Display name of each slot: the fact, or `model:fact` for neural outputs.
    pub fn slot_names(&self) -> Vec<String> {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Fact { atom, .. } => atom_to_string(atom),
                Slot::NeuralOutput { model, atom, .. } => format!("{model}:{}", atom_to_string(atom)),
            })
            .collect()
    }

    /// Current probability behind a slot: the fact value or the model output.
    pub fn slot_value(&self, slot: usize) -> f64 {
        match &self.slots[slot] {
            Slot::Fact { .. } => self.values[slot],
            Slot::NeuralOutput { model, features, .. } => self.models.get(model).expect("registered").forward(features),
        }
    }

    pub fn set_fact_value(&mut self, slot: usize, p: f64) {
        assert!(matches!(self.slots[slot], Slot::Fact { .. }), "slot {slot} is not a fact probability");
        self.values[slot] = clamp_probability(p);
    }

    pub fn fact_values(&self) -> impl Iterator<Item = (&Atom, f64)> {
        self.slots.iter().zip(&self.values).filter_map(|(s, v)| match s {
            Slot::Fact { atom, .. } => Some((atom, *v)),
            Slot::NeuralOutput { .. } => None,
        })
    }

    pub fn models(&self) -> &ModelRegistry {
        &self.models
    }

    pub fn models_mut(&mut self) -> &mut ModelRegistry {
        &mut self.models
    }

    /// The label of a ground fact under the current parameters.
    pub fn resolve(&self, f: &GroundFact) -> Result<ResolvedLabel, Error> {
        match (&f.label, self.by_origin.get(&f.origin)) {
            (FactLabel::Learnable(_), Some(&slot)) => Ok(ResolvedLabel::Learnable { p: self.values[slot], slot }),
            (FactLabel::Neural { .. }, Some(&slot)) => Ok(ResolvedLabel::Neural { p: self.slot_value(slot), slot }),
            _ => static_label(f),
        }
    }

    /// One SGD step: `grad` is dL/d(slot). Fact probabilities move and are re-clamped; the
    /// gradient of a neural output is pushed through its model.
    pub fn apply_gradient(&mut self, grad: &[f64], lr: f64) {
        assert_eq!(grad.len(), self.slots.len());
        let mut model_grads: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for (slot, g) in grad.iter().enumerate() {
            match &self.slots[slot] {
                Slot::Fact { .. } => self.values[slot] = clamp_probability(self.values[slot] - lr * g),
                Slot::NeuralOutput { model, features, .. } => {
                    let m = self.models.get(model).expect("registered");
                    let dw = m.backward(features, *g);
                    let acc = model_grads.entry(model).or_insert_with(|| vec![0.0; dw.len()]);
                    for (a, d) in acc.iter_mut().zip(dw) {
                        *a += d;
                    }
                }
            }
        }
        let updates: Vec<(String, Vec<f64>)> = model_grads.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        for (model, dw) in updates {
            let m = self.models.get_mut(&model).expect("registered");
            for (w, d) in m.params_mut().iter_mut().zip(dw) {
                *w -= lr * d;
            }
        }
    }
}

/// Min-max scales each feature over all neural facts of the same model (a constant feature
/// maps to 0). Returns the input dimension of each model.
fn normalize_features(raw: &mut [(usize, String, Atom, Vec<f64>)]) -> Result<BTreeMap<String, usize>, Error> {
    let mut ranges: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (_, model, atom, x) in raw.iter() {
        let r = ranges.entry(model.clone()).or_insert_with(|| vec![(f64::INFINITY, f64::NEG_INFINITY); x.len()]);
        if r.len() != x.len() {
            return Err(LearnError::Encoding(format!(
                "{} gives {} inputs to `{model}`, other facts give {}",
                atom_to_string(atom),
                x.len(),
                r.len()
            ))
            .into());
        }
        for (r, v) in r.iter_mut().zip(x) {
            r.0 = r.0.min(*v);
            r.1 = r.1.max(*v);
        }
    }
    for (_, model, _, x) in raw.iter_mut() {
        for (v, (lo, hi)) in x.iter_mut().zip(&ranges[model.as_str()]) {
            *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
        }
    }
    Ok(ranges.into_iter().map(|(k, r)| (k, r.len())).collect())
}

/// Number of inputs each model receives from the neural facts of `p`.
pub fn neural_input_dims(p: &Program) -> BTreeMap<String, usize> {
    let mut dims = BTreeMap::new();
    for f in desugar_annotated_rules(p).facts {
        if let FactLabel::Neural { model, inputs } = f.label {
            dims.entry(model).or_insert(inputs.len());
        }
    }
    dims
}
