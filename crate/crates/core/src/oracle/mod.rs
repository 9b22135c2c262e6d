//! Reference semantics by brute force: possible worlds, least models, success probabilities
//! and algebraic model counts by enumeration, plus a sampling estimator for programs with
//! random variables, and a generator of random acyclic programs to test against. Nothing
//! here touches circuits.

mod generate;
mod indexed;
mod montecarlo;
mod worlds;

pub use generate::{random_acyclic_program, random_corpus, GeneratorConfig, RandomProgram};

pub use montecarlo::{monte_carlo_success, McEstimate};
pub use worlds::{
    brute_force_amc, brute_force_success, brute_force_success_with, default_probability, enumerate_worlds,
    enumerate_worlds_with, forward_chain, PossibleWorld, DEFAULT_WORLD_CAP,
};

use crate::semirings::SemiringError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{n} labeled facts or variables exceed the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("fact {0} has no probability the oracle can use")]
    NotProbabilistic(String),
    #[error("negation through recursion at {0}")]
    Unstratified(String),
    #[error("bad distribution: {0}")]
    Distribution(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::grounding::{ground_all, relevant_ground_program};
    use crate::propositional::clark_completion;
    use crate::semirings::{build_labeling, MpeSemiring, ProbabilitySemiring, QueryLiteral, ResolvedLabel};
    use crate::syntax::{parse_program, Atom};

    const SPRINKLER: &str =
        "0.25 :: cloudy.\n0.8 :: humid.\n0.5 :: sprinkler.\nrain :- cloudy, humid.\nwet :- rain.\nwet :- sprinkler.\n";

    fn atoms(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| Atom::prop(*n)).collect()
    }

    #[test]
    fn forward_chaining_example_worlds() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        assert_eq!(
            forward_chain(&gp, &atoms(&["cloudy", "humid"])).unwrap(),
            atoms(&["cloudy", "humid", "rain", "wet"])
        );
        assert_eq!(forward_chain(&gp, &atoms(&[])).unwrap(), atoms(&[]));
        assert_eq!(forward_chain(&gp, &atoms(&["sprinkler"])).unwrap(), atoms(&["sprinkler", "wet"]));
    }

    #[test]
    fn world_table() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        let worlds = enumerate_worlds(&gp, DEFAULT_WORLD_CAP).unwrap();
        let ps: Vec<f64> = worlds.iter().map(|w| w.probability).collect();
        let expected = [0.075, 0.025, 0.3, 0.1, 0.075, 0.025, 0.3, 0.1];
        for (p, e) in ps.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!((ps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(worlds[3].chosen_facts, vec![Atom::prop("cloudy"), Atom::prop("humid")]);
    }

    #[test]
    fn no_labeled_facts_is_one_certain_world() {
        let gp = ground_all(&parse_program("a.\nb :- a.\n").unwrap()).unwrap();
        let worlds = enumerate_worlds(&gp, DEFAULT_WORLD_CAP).unwrap();
        assert_eq!(worlds.len(), 1);
        assert_eq!(worlds[0].probability, 1.0);
        assert_eq!(worlds[0].entailed, atoms(&["a", "b"]));
    }

    #[test]
    fn success_probabilities() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        assert!((brute_force_success(&gp, &Atom::prop("wet")).unwrap() - 0.6).abs() < 1e-12);
        assert!((brute_force_success(&gp, &Atom::prop("rain")).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(brute_force_success(&gp, &Atom::prop("nothing")).unwrap(), 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        assert!(matches!(enumerate_worlds(&gp, 2), Err(OracleError::TooLarge { n: 3, cap: 2 })));
    }

    #[test]
    fn amc_by_enumeration() {
        let gp = relevant_ground_program(&parse_program(SPRINKLER).unwrap(), &Atom::prop("wet")).unwrap();
        let t = clark_completion(&gp).unwrap();
        let mut labels = vec![None; t.num_vars()];
        for (name, p) in [("cloudy", 0.25), ("humid", 0.8), ("sprinkler", 0.5)] {
            labels[t.lookup(&Atom::prop(name)).unwrap()] = Some(ResolvedLabel::Fixed(p));
        }
        let q = Some(QueryLiteral { var: t.lookup(&Atom::prop("wet")).unwrap(), positive: true });
        let a = build_labeling(&ProbabilitySemiring, &t, &labels, q).unwrap();
        assert!((brute_force_amc(&t, &ProbabilitySemiring, &a, 20).unwrap() - 0.6).abs() < 1e-12);
        let a = build_labeling(&MpeSemiring, &t, &labels, q).unwrap();
        assert!((brute_force_amc(&t, &MpeSemiring, &a, 20).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn negation_on_facts_and_derived_atoms() {
        let src = "0.3 :: a.\n0.6 :: b.\nc :- a.\nq :- \\+ c, b.\nr :- \\+ a.\n";
        let gp = ground_all(&parse_program(src).unwrap()).unwrap();
        assert!((brute_force_success(&gp, &Atom::prop("q")).unwrap() - 0.7 * 0.6).abs() < 1e-12);
        assert!((brute_force_success(&gp, &Atom::prop("r")).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_enumeration() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        let est = monte_carlo_success(&gp, &Atom::prop("wet"), 200_000, 7).unwrap();
        assert!(est.agrees(0.6, 4.0), "{est:?}");
        let again = monte_carlo_success(&gp, &Atom::prop("wet"), 200_000, 7).unwrap();
        assert_eq!(est, again);
    }
}
