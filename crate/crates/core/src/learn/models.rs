use std::collections::BTreeMap;
use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A network that maps a feature vector to the probability of a neural fact.
pub trait NeuralModel: Debug + Send + Sync {
    fn kind(&self) -> &'static str;
    /// Expected number of input features; `None` accepts any.
    fn input_dim(&self) -> Option<usize>;
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    /// Output probability, strictly inside (0, 1).
    fn forward(&self, x: &[f64]) -> f64;
    /// `upstream * d forward(x) / d params`.
    fn backward(&self, x: &[f64], upstream: f64) -> Vec<f64>;
    fn box_clone(&self) -> Box<dyn NeuralModel>;
}

impl Clone for Box<dyn NeuralModel> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `σ(w·x + b)`; parameters are `[w.., b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    params: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(dim: usize) -> Self {
        LogisticModel { params: vec![0.0; dim + 1] }
    }

    pub fn with_params(weights: &[f64], bias: f64) -> Self {
        let mut params = weights.to_vec();
        params.push(bias);
        LogisticModel { params }
    }

    fn dim(&self) -> usize {
        self.params.len() - 1
    }
}

impl NeuralModel for LogisticModel {
    fn kind(&self) -> &'static str {
        "logistic"
    }
    fn input_dim(&self) -> Option<usize> {
        Some(self.dim())
    }
    fn params(&self) -> &[f64] {
        &self.params
    }
    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }
    fn forward(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let z: f64 = self.params[..d].iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.params[d];
        sigmoid(z)
    }
    fn backward(&self, x: &[f64], upstream: f64) -> Vec<f64> {
        let y = self.forward(x);
        let dz = upstream * y * (1.0 - y);
        let mut g: Vec<f64> = x.iter().map(|x| dz * x).collect();
        g.push(dz);
        g
    }
    fn box_clone(&self) -> Box<dyn NeuralModel> {
        Box::new(self.clone())
    }
}

/// One hidden tanh layer of width [`Mlp::WIDTH`] and a sigmoid output.
///
/// Parameter layout: hidden weights (row-major, `WIDTH x dim`), hidden biases, output
/// weights, output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dim: usize,
    params: Vec<f64>,
}

impl Mlp {
    pub const WIDTH: usize = 8;

    /// Small uniform initial weights drawn from a seeded generator.
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Self::WIDTH * dim + 2 * Self::WIDTH + 1;
        let scale = 1.0 / ((dim.max(1)) as f64).sqrt();
        let params = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
        Mlp { dim, params }
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        let (w, rest) = self.params.split_at(Self::WIDTH * self.dim);
        (0..Self::WIDTH)
            .map(|j| {
                let z: f64 = w[j * self.dim..(j + 1) * self.dim].iter().zip(x).map(|(w, x)| w * x).sum();
                (z + rest[j]).tanh()
            })
            .collect()
    }

    fn output_offset(&self) -> usize {
        Self::WIDTH * self.dim + Self::WIDTH
    }
}

impl NeuralModel for Mlp {
    fn kind(&self) -> &'static str {
        "mlp"
    }
    fn input_dim(&self) -> Option<usize> {
        Some(self.dim)
    }
    fn params(&self) -> &[f64] {
        &self.params
    }
    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }
    fn forward(&self, x: &[f64]) -> f64 {
        let h = self.hidden(x);
        let o = self.output_offset();
        let z: f64 = h.iter().zip(&self.params[o..o + Self::WIDTH]).map(|(h, v)| h * v).sum();
        sigmoid(z + self.params[o + Self::WIDTH])
    }
    fn backward(&self, x: &[f64], upstream: f64) -> Vec<f64> {
        let h = self.hidden(x);
        let o = self.output_offset();
        let v = &self.params[o..o + Self::WIDTH];
        let z: f64 = h.iter().zip(v).map(|(h, v)| h * v).sum::<f64>() + self.params[o + Self::WIDTH];
        let y = sigmoid(z);
        let dz = upstream * y * (1.0 - y);
        let mut g = vec![0.0; self.params.len()];
        for j in 0..Self::WIDTH {
            let dh = dz * v[j] * (1.0 - h[j] * h[j]);
            for i in 0..self.dim {
                g[j * self.dim + i] = dh * x[i];
            }
            g[Self::WIDTH * self.dim + j] = dh;
            g[o + j] = dz * h[j];
        }
        g[o + Self::WIDTH] = dz;
        g
    }
    fn box_clone(&self) -> Box<dyn NeuralModel> {
        Box::new(self.clone())
    }
}

/// A stand-in network with a fixed output and no parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModel {
    pub output: f64,
}

impl NeuralModel for ConstantModel {
    fn kind(&self) -> &'static str {
        "constant"
    }
    fn input_dim(&self) -> Option<usize> {
        None
    }
    fn params(&self) -> &[f64] {
        &[]
    }
    fn params_mut(&mut self) -> &mut [f64] {
        &mut []
    }
    fn forward(&self, _x: &[f64]) -> f64 {
        self.output
    }
    fn backward(&self, _x: &[f64], _upstream: f64) -> Vec<f64> {
        Vec::new()
    }
    fn box_clone(&self) -> Box<dyn NeuralModel> {
        Box::new(*self)
    }
}

/// Neural models by the identifier used in `nn(id, [..])` labels.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, Box<dyn NeuralModel>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, model: Box<dyn NeuralModel>) {
        self.models.insert(name.into(), model);
    }

    pub fn with(mut self, name: impl Into<String>, model: Box<dyn NeuralModel>) -> Self {
        self.insert(name, model);
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn NeuralModel> {
        self.models.get(name).map(|m| m.as_ref())
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Box<dyn NeuralModel>> {
        self.models.get_mut(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.models.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &dyn NeuralModel)> {
        self.models.iter().map(|(k, m)| (k.as_str(), m.as_ref()))
    }
}
