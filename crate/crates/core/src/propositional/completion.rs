use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::formula::{Formula, Theory, VarKind};
use super::PropositionalError;
use crate::grounding::{FactSource, GroundProgram, Proof};
use crate::syntax::{atom_to_string, Atom, Clause};

/// One directed cycle in the atom dependency graph, listed from its first atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub cycle: Vec<Atom>,
}

impl CycleReport {
    pub fn names(&self) -> Vec<String> {
        self.cycle.iter().map(atom_to_string).collect()
    }
}

/// Checks the head → body-atom graph (positive and negative edges) for cycles.
pub fn check_acyclic(gp: &GroundProgram) -> Result<(), CycleReport> {
    let by_head = gp.rules_by_head();
    let mut color: HashMap<&Atom, u8> = HashMap::new(); // 1 = on stack, 2 = done
    for &start in by_head.keys() {
        if color.contains_key(start) {
            continue;
        }
        // iterative DFS; each frame is (atom, index of next successor)
        let mut stack: Vec<(&Atom, usize)> = vec![(start, 0)];
        color.insert(start, 1);
        while let Some(&mut (atom, ref mut next)) = stack.last_mut() {
            let succ: Vec<&Atom> = by_head
                .get(atom)
                .map(|cs| cs.iter().flat_map(|c| c.body.iter().map(|l| &l.atom)).collect())
                .unwrap_or_default();
            if *next < succ.len() {
                let s = succ[*next];
                *next += 1;
                match color.get(s) {
                    Some(1) => {
                        let from = stack.iter().position(|(a, _)| *a == s).unwrap();
                        return Err(CycleReport { cycle: stack[from..].iter().map(|(a, _)| (*a).clone()).collect() });
                    }
                    Some(_) => {}
                    None => {
                        color.insert(s, 1);
                        stack.push((s, 0));
                    }
                }
            } else {
                color.insert(atom, 2);
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Clark's completion: `h <=> OR(bodies)` for every derived atom, labeled facts left free.
///
/// Logical facts become unit clauses; a body atom without any definition gets `a <=> false`.
/// Query atoms without a definition are registered the same way, so they can still be labeled.
pub fn clark_completion(gp: &GroundProgram) -> Result<Theory, PropositionalError> {
    if let Err(report) = check_acyclic(gp) {
        return Err(PropositionalError::Cyclic(report.names()));
    }
    let mut t = Theory::new();
    let labeled: BTreeSet<&Atom> = gp.labeled_facts().map(|f| &f.atom).collect();
    for f in gp.labeled_facts() {
        t.var(&f.atom, VarKind::Fact);
    }

    let mut heads: Vec<&Atom> = Vec::new();
    let mut bodies: BTreeMap<&Atom, Vec<&Clause>> = BTreeMap::new();
    let logical = gp.facts.iter().filter(|f| !f.is_labeled()).map(|f| &f.atom);
    for a in logical {
        if !bodies.contains_key(a) {
            heads.push(a);
        }
        bodies.entry(a).or_default();
    }
    let mut unit: BTreeSet<&Atom> = gp.facts.iter().filter(|f| !f.is_labeled()).map(|f| &f.atom).collect();
    for c in gp.clauses() {
        if !bodies.contains_key(&c.head) {
            heads.push(&c.head);
        }
        if c.body.is_empty() {
            unit.insert(&c.head);
        }
        bodies.entry(&c.head).or_default().push(c);
    }

    let mut conjuncts = Vec::new();
    let mut undefined: Vec<&Atom> = Vec::new();
    for h in &heads {
        let hv = t.var(h, VarKind::Derived);
        if unit.contains(h) {
            conjuncts.push(Formula::Var(hv));
            continue;
        }
        let mut disjuncts = Vec::new();
        for c in &bodies[h] {
            let lits = c
                .body
                .iter()
                .map(|l| {
                    if !labeled.contains(&l.atom) && !bodies.contains_key(&l.atom) && !undefined.contains(&&l.atom) {
                        undefined.push(&l.atom);
                    }
                    let kind = if labeled.contains(&l.atom) { VarKind::Fact } else { VarKind::Derived };
                    Formula::lit(t.var(&l.atom, kind), l.positive)
                })
                .collect::<Vec<_>>();
            disjuncts.push(conjunction(lits));
        }
        conjuncts.push(Formula::iff(Formula::Var(hv), disjunction(disjuncts)));
    }
    for q in &gp.query_atoms {
        if !labeled.contains(q) && !bodies.contains_key(q) && !undefined.contains(&q) {
            undefined.push(q);
        }
    }
    for a in undefined {
        let v = t.var(a, VarKind::Derived);
        conjuncts.push(Formula::iff(Formula::Var(v), Formula::False));
    }
    t.formula = match conjuncts.len() {
        0 => Formula::True,
        _ => Formula::And(conjuncts),
    };
    Ok(t)
}

/// `g <=> OR over proofs of AND of the proof's labeled-fact literals`.
///
/// Logical facts are true and dropped. Proofs that negate a derived atom are rejected.
pub fn proofs_to_formula(proofs: &BTreeSet<Proof>, g: &Atom) -> Result<Theory, PropositionalError> {
    let mut t = Theory::new();
    let gv = t.var(g, VarKind::Derived);
    let mut disjuncts = Vec::new();
    for proof in proofs {
        let mut lits = Vec::new();
        for l in &proof.used_facts {
            match l.source {
                FactSource::Logical => {}
                FactSource::Labeled => lits.push(Formula::lit(t.var(&l.atom, VarKind::Fact), l.positive)),
                FactSource::Derived => return Err(PropositionalError::NegatedDerived(atom_to_string(&l.atom))),
            }
        }
        disjuncts.push(conjunction(lits));
    }
    t.formula = Formula::iff(Formula::Var(gv), disjunction(disjuncts));
    Ok(t)
}

fn conjunction(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::True,
        1 => fs.pop().unwrap(),
        _ => Formula::And(fs),
    }
}

fn disjunction(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::False,
        1 => fs.pop().unwrap(),
        _ => Formula::Or(fs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::{ground_all, relevant_ground_program, sld_proofs, SldConfig};
    use crate::syntax::{parse_program, parse_query};

    const SPRINKLER: &str =
        "0.25 :: cloudy.\n0.8 :: humid.\n0.5 :: sprinkler.\nrain :- cloudy, humid.\nwet :- rain.\nwet :- sprinkler.\n";

    #[test]
    fn sprinkler_completion_text() {
        let gp = ground_all(&parse_program(SPRINKLER).unwrap()).unwrap();
        let t = clark_completion(&gp).unwrap();
        assert_eq!(t.to_text(), "rain <=> cloudy & humid\nwet <=> rain | sprinkler\n");
        assert_eq!(t.fact_vars().count(), 3);
    }

    #[test]
    fn facts_only() {
        let gp = ground_all(&parse_program("a.\nb.\n0.5 :: c.\n").unwrap()).unwrap();
        let t = clark_completion(&gp).unwrap();
        assert_eq!(t.to_text(), "a\nb\n");
        assert_eq!(t.fact_vars().map(|v| t.name(v).to_string()).collect::<Vec<_>>(), vec!["c"]);
    }

    #[test]
    fn head_without_surviving_rules_is_false() {
        let mut gp = ground_all(&parse_program("0.5 :: c.\nq :- c.\n").unwrap()).unwrap();
        gp.rules[0].clause.body.push(crate::syntax::Literal::pos(Atom::prop("missing")));
        let t = clark_completion(&gp).unwrap();
        assert_eq!(t.to_text(), "q <=> c & missing\nmissing <=> false\n");
    }

    #[test]
    fn undefined_query_is_false() {
        let mut gp = ground_all(&parse_program("0.5 :: c.\n").unwrap()).unwrap();
        gp.query_atoms.push(Atom::prop("q"));
        let t = clark_completion(&gp).unwrap();
        assert_eq!(t.to_text(), "q <=> false\n");
    }

    #[test]
    fn minimal_cycle_is_reported() {
        let p = parse_program("a :- b.\nb :- a.\n").unwrap();
        let mut gp = GroundProgram::default();
        for c in &p.rules {
            gp.rules.push(crate::grounding::GroundRule { clause: c.clone(), annotation: None });
        }
        assert_eq!(check_acyclic(&gp).unwrap_err().names(), vec!["a", "b"]);
        assert!(matches!(clark_completion(&gp), Err(PropositionalError::Cyclic(_))));
    }

    #[test]
    fn negative_cycle_is_a_cycle_too() {
        let p = parse_program("0.5 :: f.\na :- \\+ b, f.\nb :- \\+ a, f.\n").unwrap();
        let gp = relevant_ground_program(&p, &Atom::prop("a")).unwrap();
        assert!(check_acyclic(&gp).is_err());
    }

    #[test]
    fn week_ground_program_is_acyclic() {
        let src = "day(sunday).\n0.25 :: cloudy(D) :- day(D).\n0.5 :: sprinkler(D) :- day(D).\n0.8 :: rain(D) :- cloudy(D).\nwet(D) :- rain(D).\nwet(D) :- sprinkler(D).\n";
        let gp = relevant_ground_program(&parse_program(src).unwrap(), &parse_query("wet(sunday)").unwrap()).unwrap();
        assert!(check_acyclic(&gp).is_ok());
    }

    #[test]
    fn proofs_formula_for_week_program() {
        let src = "day(sunday).\n0.25 :: cloudy(D) :- day(D).\n0.5 :: sprinkler(D) :- day(D).\n0.8 :: rain(D) :- cloudy(D).\nwet(D) :- rain(D).\nwet(D) :- sprinkler(D).\n";
        let q = parse_query("wet(sunday)").unwrap();
        let proofs = sld_proofs(&parse_program(src).unwrap(), &q, &SldConfig::default()).unwrap();
        let t = proofs_to_formula(&proofs, &q).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("wet(sunday) <=> "), "{text}");
        assert!(text.contains("cloudy_on_day(sunday) & rain_on_cloudy(sunday)"), "{text}");
        assert!(text.contains("sprinkler_on_day(sunday)"), "{text}");
        assert_eq!(t.fact_vars().count(), 3);
    }

    #[test]
    fn no_proofs_means_false() {
        let t = proofs_to_formula(&BTreeSet::new(), &Atom::prop("g")).unwrap();
        assert_eq!(t.to_text(), "g <=> false\n");
    }
}
