use std::fmt::Write;

use super::ast::*;

pub fn number_to_string(n: f64) -> String {
    format!("{n}")
}

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Constant(Constant::Symbol(s)) | Term::Variable(s) => out.push_str(s),
        Term::Constant(Constant::Number(n)) => out.push_str(&number_to_string(n.0)),
        Term::Compound { functor, args } => {
            out.push_str(functor);
            write_args(out, args);
        }
    }
}

fn write_args(out: &mut String, args: &[Term]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, a);
    }
    out.push(')');
}

/// Canonical atom text; also used as the propositional variable name.
pub fn atom_to_string(a: &Atom) -> String {
    let mut s = a.predicate.clone();
    if !a.args.is_empty() {
        write_args(&mut s, &a.args);
    }
    s
}

pub fn literal_to_string(l: &Literal) -> String {
    if l.positive {
        atom_to_string(&l.atom)
    } else {
        format!("\\+ {}", atom_to_string(&l.atom))
    }
}

pub fn constraint_to_string(c: &ConstraintExpr) -> String {
    format!("{} {} {}", term_to_string(&c.var), c.relation.symbol(), number_to_string(c.bound.0))
}

pub fn distribution_to_string(d: &DistributionExpr) -> String {
    let params: Vec<String> = d.params().into_iter().map(number_to_string).collect();
    format!("{}({})", d.name(), params.join(", "))
}

/// The `label ::` prefix, empty for logical facts.
pub fn label_prefix(label: &FactLabel) -> String {
    match label {
        FactLabel::Logical => String::new(),
        FactLabel::Probabilistic(p) => format!("{} :: ", number_to_string(p.0)),
        FactLabel::Learnable(p) => format!("t({}) :: ", number_to_string(p.0)),
        FactLabel::Algebraic(text) => format!("{{{text}}} :: "),
        FactLabel::Neural { model, inputs } => {
            let inputs: Vec<String> = inputs.iter().map(term_to_string).collect();
            format!("nn({model}, [{}]) :: ", inputs.join(", "))
        }
        FactLabel::Indicator(c) => format!("[{}] :: ", constraint_to_string(c)),
    }
}

pub fn fact_to_string(f: &FactDecl) -> String {
    format!("{}{}.", label_prefix(&f.label), atom_to_string(&f.atom))
}

pub fn clause_to_string(c: &Clause) -> String {
    if c.body.is_empty() {
        return format!("{}.", atom_to_string(&c.head));
    }
    let body: Vec<String> = c.body.iter().map(literal_to_string).collect();
    format!("{} :- {}.", atom_to_string(&c.head), body.join(", "))
}

pub fn distributional_to_string(d: &DistributionalFact) -> String {
    format!("{} ~ {}.", term_to_string(&d.var), distribution_to_string(&d.dist))
}

/// Renders a program in canonical form: distributions, facts, rules, then annotated rules,
/// with a blank line between non-empty groups.
pub fn pretty_print(p: &Program) -> String {
    let mut groups: Vec<Vec<String>> = Vec::new();
    groups.push(p.distributions.iter().map(distributional_to_string).collect());
    groups.push(p.facts.iter().map(fact_to_string).collect());
    groups.push(p.rules.iter().map(clause_to_string).collect());
    groups.push(
        p.annotated_rules
            .iter()
            .map(|r| format!("{}{}", label_prefix(&r.label), clause_to_string(&r.clause)))
            .collect(),
    );
    let mut out = String::new();
    for group in groups.into_iter().filter(|g| !g.is_empty()) {
        if !out.is_empty() {
            out.push('\n');
        }
        for line in group {
            let _ = writeln!(out, "{line}");
        }
    }
    out
}
