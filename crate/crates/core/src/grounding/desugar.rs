use std::collections::BTreeSet;

use crate::syntax::{Atom, Clause, FactDecl, Literal, Program, Term};

/// Replaces every `label :: h :- body` by a fresh labeled fact `label :: aux(args)` and the
/// rule `h :- aux(args), body`.
///
/// The auxiliary atom takes the head's arguments followed by any variables that occur only
/// in the body, so each rule instance owns an independent fact. Auxiliary names follow the
/// pattern `<head>_on_<first body predicate>` with a numeric suffix when taken.
pub fn desugar_annotated_rules(p: &Program) -> Program {
    if p.annotated_rules.is_empty() {
        return p.clone();
    }
    let mut taken: BTreeSet<String> = p.predicates().into_iter().map(|k| k.name).collect();
    let mut out = Program {
        facts: p.facts.clone(),
        distributions: p.distributions.clone(),
        rules: p.rules.clone(),
        annotated_rules: Vec::new(),
    };
    for rule in &p.annotated_rules {
        let clause = &rule.clause;
        let base = match clause.body.first() {
            Some(first) => format!("{}_on_{}", clause.head.predicate, first.atom.predicate),
            None => format!("{}_choice", clause.head.predicate),
        };
        let name = fresh_name(&base, &mut taken);

        let head_vars = clause.head.variables();
        let mut args = clause.head.args.clone();
        for v in clause.variables() {
            if !head_vars.contains(&v) && v != "_" {
                args.push(Term::Variable(v));
            }
        }
        let aux = Atom::new(name, args);
        out.facts.push(FactDecl::new(rule.label.clone(), aux.clone()));
        let mut body = Vec::with_capacity(clause.body.len() + 1);
        body.push(Literal::pos(aux));
        body.extend(clause.body.iter().cloned());
        out.rules.push(Clause::new(clause.head.clone(), body));
    }
    out
}

pub(crate) fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut n = 2;
    while taken.contains(&name) {
        name = format!("{base}_{n}");
        n += 1;
    }
    taken.insert(name.clone());
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, pretty_print, FactLabel};

    #[test]
    fn ground_annotated_rule() {
        let p = parse_program("day(sunday).\n0.25 :: cloudy(sunday) :- day(sunday).").unwrap();
        let d = desugar_annotated_rules(&p);
        assert!(d.annotated_rules.is_empty());
        assert_eq!(
            pretty_print(&d),
            "day(sunday).\n0.25 :: cloudy_on_day(sunday).\n\ncloudy(sunday) :- cloudy_on_day(sunday), day(sunday).\n"
        );
    }

    #[test]
    fn no_annotated_rules_is_unchanged() {
        let p = parse_program("0.5 :: a.\nb :- a.").unwrap();
        assert_eq!(desugar_annotated_rules(&p), p);
    }

    #[test]
    fn same_head_gets_distinct_aux_predicates() {
        let p = parse_program("q.\n0.3 :: a :- q.\n0.6 :: a :- q.").unwrap();
        let d = desugar_annotated_rules(&p);
        let names: Vec<&str> = d.facts[1..].iter().map(|f| f.atom.predicate.as_str()).collect();
        assert_eq!(names, vec!["a_on_q", "a_on_q_2"]);
        assert_eq!(d.facts[1].label, FactLabel::probability(0.3));
        assert_eq!(d.facts[2].label, FactLabel::probability(0.6));
    }

    #[test]
    fn body_only_variables_extend_aux_arguments() {
        let p = parse_program("e(a, b).\n0.4 :: r(X) :- e(X, Y).").unwrap();
        let d = desugar_annotated_rules(&p);
        assert_eq!(crate::syntax::fact_to_string(&d.facts[1]), "0.4 :: r_on_e(X, Y).");
    }

    #[test]
    fn fresh_names_avoid_existing_predicates() {
        let p = parse_program("cloudy_on_day(x).\nday(d).\n0.25 :: cloudy(D) :- day(D).").unwrap();
        let d = desugar_annotated_rules(&p);
        assert_eq!(d.facts.last().unwrap().atom.predicate, "cloudy_on_day_2");
    }
}
