use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_program, Atom, Program};

/// Shape of the random programs drawn by [`random_acyclic_program`].
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_facts: usize,
    pub max_rules: usize,
    /// Derived predicates rules may define; fewer heads means more rules per head.
    pub max_heads: usize,
    pub max_body: usize,
    /// Inclusive range for the number of `t(p)` facts.
    pub learnable: (usize, usize),
    /// Chance that a body literal is negated.
    pub negation: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { max_facts: 10, max_rules: 8, max_heads: 4, max_body: 3, learnable: (0, 0), negation: 0.25 }
    }
}

/// A generated program, its source text and a query atom.
#[derive(Debug, Clone)]
pub struct RandomProgram {
    pub source: String,
    pub program: Program,
    pub query: Atom,
}

/// Draws a ground, acyclic program: probabilistic facts `f1..fn`, propositional rules whose
/// heads `h1..hk` only depend on facts and lower-numbered heads, and a query on one of the
/// heads (or, without rules, a fact). Negated literals are allowed anywhere in bodies.
pub fn random_acyclic_program(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> RandomProgram {
    let n = rng.random_range(1..=cfg.max_facts.max(1));
    let mut learnable: Vec<bool> = vec![false; n];
    let k = rng.random_range(cfg.learnable.0..=cfg.learnable.1).min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for &i in &idx[..k] {
        learnable[i] = true;
    }
    let mut src = String::new();
    for (i, l) in learnable.iter().enumerate() {
        let p = rng.random_range(1..20) as f64 / 20.0;
        if *l {
            src.push_str(&format!("t({p}) :: f{}.\n", i + 1));
        } else {
            src.push_str(&format!("{p} :: f{}.\n", i + 1));
        }
    }
    let rules = rng.random_range(0..=cfg.max_rules);
    let heads = cfg.max_heads.max(1);
    let mut defined = vec![false; heads];
    for _ in 0..rules {
        let h = rng.random_range(0..heads);
        defined[h] = true;
        let len = rng.random_range(1..=cfg.max_body.max(1));
        let body: Vec<String> = (0..len)
            .map(|_| {
                let atom = if h > 0 && rng.random_bool(0.4) {
                    format!("h{}", rng.random_range(0..h) + 1)
                } else {
                    format!("f{}", rng.random_range(0..n) + 1)
                };
                if rng.random_bool(cfg.negation) {
                    format!("\\+ {atom}")
                } else {
                    atom
                }
            })
            .collect();
        src.push_str(&format!("h{} :- {}.\n", h + 1, body.join(", ")));
    }
    let candidates: Vec<usize> = (0..heads).filter(|h| defined[*h]).collect();
    let query = match candidates.iter().max() {
        // prefer the top of the dependency order, where most of the program is relevant
        Some(&top) if rng.random_bool(0.7) => format!("h{}", top + 1),
        Some(_) => format!("h{}", candidates[rng.random_range(0..candidates.len())] + 1),
        None => format!("f{}", rng.random_range(0..n) + 1),
    };
    let program = parse_program(&src).expect("generated programs parse");
    RandomProgram { source: src, program, query: Atom::prop(query) }
}

/// `count` programs from a fixed seed.
pub fn random_corpus(seed: u64, count: usize, cfg: &GeneratorConfig) -> Vec<RandomProgram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_acyclic_program(&mut rng, cfg)).collect()
}
