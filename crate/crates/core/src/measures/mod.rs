//! Measures of indicator constraints under the supported distributions, and the reduction of
//! univariate discrete-continuous programs to plain probabilistic ones.

mod integrate;
mod intervals;
mod reduce;

pub use integrate::{
    adaptive_simpson, indicator_probability, indicator_probability_with, measure, total_mass, MeasureMethod,
    QUADRATURE_MAX_DEPTH, QUADRATURE_TOLERANCE,
};
pub use intervals::{constraint_set, negate_constraint, partition, relation_set, support, Interval, IntervalSet};
pub use reduce::{reduce_to_probabilistic, reduce_to_probabilistic_with};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("random variable {0} has no distribution")]
    UndeclaredVariable(String),
    #[error("random variable {0} is declared more than once")]
    DuplicateVariable(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::grounding::ground_all;
    use crate::oracle::{brute_force_success, enumerate_worlds, monte_carlo_success, DEFAULT_WORLD_CAP};
    use crate::syntax::{parse_program, pretty_print, Atom, ConstraintExpr, DistributionExpr, Relation, Term};

    fn c(rel: Relation, bound: f64) -> ConstraintExpr {
        ConstraintExpr::new(Term::symbol("x"), rel, bound)
    }

    const RULES: &str = "rain :- cloudy, humid.\nwet :- rain.\nwet :- sprinkler.\n";

    fn beta_program() -> String {
        format!("x_c ~ flip(0.25).\nx_h ~ beta(4, 2).\nx_s ~ flip(0.5).\n[x_c = 1] :: cloudy.\n[x_h > 0.6] :: humid.\n[x_s = 1] :: sprinkler.\n{RULES}")
    }

    #[test]
    fn beta_tail_both_routes() {
        let d = DistributionExpr::beta(4.0, 2.0);
        // CDF of beta(4,2) is 5x^4 - 4x^5
        let exact = 1.0 - (5.0 * 0.6f64.powi(4) - 4.0 * 0.6f64.powi(5));
        for m in [MeasureMethod::ClosedForm, MeasureMethod::Quadrature] {
            let p = indicator_probability_with(&d, &c(Relation::Gt, 0.6), m).unwrap();
            assert!((p - 0.66304).abs() < 1e-5, "{m:?}: {p}");
            assert!((p - exact).abs() < 1e-9, "{m:?}: {p}");
        }
    }

    #[test]
    fn simple_measures() {
        let flip = DistributionExpr::flip(0.25);
        assert_eq!(indicator_probability(&flip, &c(Relation::Eq, 1.0)).unwrap(), 0.25);
        assert_eq!(indicator_probability(&flip, &c(Relation::Lt, 1.0)).unwrap(), 0.75);
        let n = DistributionExpr::normal(0.0, 1.0);
        assert!((indicator_probability(&n, &c(Relation::Lt, 0.0)).unwrap() - 0.5).abs() < 1e-12);
        let b = DistributionExpr::beta(4.0, 2.0);
        assert_eq!(indicator_probability(&b, &c(Relation::Eq, 0.6)).unwrap(), 0.0);
        let u = DistributionExpr::uniform(2.0, 6.0);
        assert!((indicator_probability(&u, &c(Relation::Ge, 5.0)).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn negation_is_complement_in_support() {
        let b = DistributionExpr::beta(4.0, 2.0);
        let neg = negate_constraint(&b, &c(Relation::Gt, 0.6));
        assert_eq!(neg, IntervalSet::from_intervals([Interval::new(0.0, true, 0.6, true)]));
        assert_eq!(neg.to_string(), "[0, 0.6]");
        let flip = DistributionExpr::flip(0.5);
        assert_eq!(negate_constraint(&flip, &c(Relation::Eq, 1.0)), IntervalSet::points(&[0.0]));
        let s = constraint_set(&b, &c(Relation::Gt, 0.6));
        assert_eq!(neg.complement_within(&support(&b)), s);
        let point = negate_constraint(&b, &c(Relation::Eq, 0.3));
        assert_eq!(point.to_string(), "[0, 0.3) u (0.3, 1]");
        assert_eq!(point.complement_within(&support(&b)), IntervalSet::points(&[0.3]));
    }

    #[test]
    fn cdf_consistency_and_partitions() {
        let dists = [
            DistributionExpr::beta(2.5, 7.0),
            DistributionExpr::normal(1.0, 3.0),
            DistributionExpr::uniform(-1.0, 4.0),
        ];
        for d in &dists {
            for b in [-2.0, 0.1, 0.5, 3.0] {
                let lt = indicator_probability(d, &c(Relation::Lt, b)).unwrap();
                let ge = indicator_probability(d, &c(Relation::Ge, b)).unwrap();
                assert!((lt + ge - 1.0).abs() < 1e-9);
            }
            let cells = partition(d, &[0.3, -0.5, 2.0, 0.3]);
            let total: f64 = cells.iter().map(|s| measure(d, s, MeasureMethod::ClosedForm).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
        let flip = DistributionExpr::flip(0.3);
        let cells = partition(&flip, &[1.0, 0.5]);
        let total: f64 = cells.iter().map(|s| measure(&flip, s, MeasureMethod::ClosedForm).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_agrees_with_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (d, bound) = if rng.random_bool(0.5) {
                let d = DistributionExpr::beta(rng.random_range(0.5..10.0), rng.random_range(0.5..10.0));
                (d, rng.random_range(0.0..1.0))
            } else {
                let (m, s) = (rng.random_range(-5.0..5.0), rng.random_range(0.1..4.0));
                (DistributionExpr::normal(m, s), m + s * rng.random_range(-4.0..4.0))
            };
            let k = c(Relation::Lt, bound);
            let exact = indicator_probability_with(&d, &k, MeasureMethod::ClosedForm).unwrap();
            let quad = indicator_probability_with(&d, &k, MeasureMethod::Quadrature).unwrap();
            assert!((exact - quad).abs() < 1e-7, "{d:?} < {bound}: {exact} vs {quad}");
        }
    }

    #[test]
    fn all_flip_program_reduces_to_plain_facts() {
        let src = format!("x_c ~ flip(0.25).\nx_h ~ flip(0.8).\nx_s ~ flip(0.5).\n[x_c = 1] :: cloudy.\n[x_h = 1] :: humid.\n[x_s = 1] :: sprinkler.\n{RULES}");
        let reduced = reduce_to_probabilistic(&parse_program(&src).unwrap()).unwrap();
        let plain = parse_program(&format!("0.25 :: cloudy.\n0.8 :: humid.\n0.5 :: sprinkler.\n{RULES}")).unwrap();
        assert_eq!(pretty_print(&reduced), pretty_print(&plain));
        let gp = ground_all(&reduced).unwrap();
        assert!((brute_force_success(&gp, &Atom::prop("wet")).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn beta_program_query_and_world() {
        let reduced = reduce_to_probabilistic(&parse_program(&beta_program()).unwrap()).unwrap();
        let gp = ground_all(&reduced).unwrap();
        let wet = brute_force_success(&gp, &Atom::prop("wet")).unwrap();
        assert!((wet - 0.58288).abs() < 1e-5, "{wet}");
        let world = enumerate_worlds(&gp, DEFAULT_WORLD_CAP)
            .unwrap()
            .into_iter()
            .find(|w| w.chosen_facts == vec![Atom::prop("cloudy"), Atom::prop("humid")])
            .unwrap();
        assert!((world.probability - 0.08288).abs() < 1e-5);
    }

    #[test]
    fn shared_variable_is_partitioned() {
        let src = "x ~ normal(0, 1).\n[x < 0] :: a.\n[x > 1] :: b.\n[x >= -1] :: c.\nq :- a, c.\nr :- b.\nr :- a.\ns :- \\+ c.\n";
        let p = parse_program(src).unwrap();
        let reduced = reduce_to_probabilistic(&p).unwrap();
        assert!(reduced.distributions.is_empty());
        let gp = ground_all(&reduced).unwrap();
        let original = ground_all(&p).unwrap();
        let n = DistributionExpr::normal(0.0, 1.0);
        let mass = |lo: f64, hi: f64| {
            measure(&n, &IntervalSet::from_intervals([Interval::new(lo, false, hi, false)]), MeasureMethod::ClosedForm)
                .unwrap()
        };
        let expected = [
            ("q", mass(-1.0, 0.0)),
            ("r", mass(f64::NEG_INFINITY, 0.0) + mass(1.0, f64::INFINITY)),
            ("s", mass(f64::NEG_INFINITY, -1.0)),
        ];
        for (name, want) in expected {
            let got = brute_force_success(&gp, &Atom::prop(name)).unwrap();
            assert!((got - want).abs() < 1e-12, "{name}: {got} vs {want}");
            let mc = monte_carlo_success(&original, &Atom::prop(name), 100_000, 3).unwrap();
            assert!(mc.agrees(want, 4.0), "{name}: {mc:?}");
        }
    }

    #[test]
    fn undeclared_and_duplicate_variables() {
        let mut p = parse_program("x ~ flip(0.5).\n[x = 1] :: a.\n").unwrap();
        p.distributions.push(p.distributions[0].clone());
        assert!(matches!(reduce_to_probabilistic(&p), Err(MeasureError::DuplicateVariable(_))));
        p.distributions.clear();
        assert!(matches!(reduce_to_probabilistic(&p), Err(MeasureError::UndeclaredVariable(_))));
    }
}
