use std::collections::HashMap;
use std::fmt::Write;

use crate::syntax::{atom_to_string, Atom};

/// Boolean expression over theory variables (indices into [`Theory::vars`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn lit(var: usize, positive: bool) -> Formula {
        if positive {
            Formula::Var(var)
        } else {
            Formula::not(Formula::Var(var))
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => assignment[*v],
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assignment)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assignment)),
            Formula::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => out.push(*v),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Variables in order of first appearance (depth-first, left to right).
    pub fn vars_in_order(&self) -> Vec<usize> {
        let mut all = Vec::new();
        self.collect_vars(&mut all);
        let mut seen = std::collections::HashSet::new();
        all.retain(|v| seen.insert(*v));
        all
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 0,
            Formula::Or(fs) if fs.len() > 1 => 1,
            Formula::And(fs) if fs.len() > 1 => 2,
            _ => 3,
        }
    }
}

/// Role of a theory variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// A labeled fact; free in the theory.
    Fact,
    /// Defined by the theory (rule head, logical fact or query).
    Derived,
}

/// A propositional theory whose variables are ground atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    atoms: Vec<Atom>,
    names: Vec<String>,
    kinds: Vec<VarKind>,
    index: HashMap<Atom, usize>,
    pub formula: Formula,
}

impl Default for Theory {
    fn default() -> Self {
        Theory {
            atoms: Vec::new(),
            names: Vec::new(),
            kinds: Vec::new(),
            index: HashMap::new(),
            formula: Formula::True,
        }
    }
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    /// Index of `atom`, adding it if new. A variable once marked `Fact` stays a fact.
    pub fn var(&mut self, atom: &Atom, kind: VarKind) -> usize {
        if let Some(&i) = self.index.get(atom) {
            if kind == VarKind::Fact {
                self.kinds[i] = VarKind::Fact;
            }
            return i;
        }
        let i = self.atoms.len();
        self.atoms.push(atom.clone());
        self.names.push(atom_to_string(atom));
        self.kinds.push(kind);
        self.index.insert(atom.clone(), i);
        i
    }

    pub fn num_vars(&self) -> usize {
        self.atoms.len()
    }

    pub fn lookup(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, v: usize) -> &Atom {
        &self.atoms[v]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self, v: usize) -> VarKind {
        self.kinds[v]
    }

    pub fn fact_vars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vars()).filter(|&v| self.kinds[v] == VarKind::Fact)
    }

    /// Copy with `lit` conjoined to the formula; `atom` becomes a (derived) variable if new.
    pub fn conjoin_literal(&self, atom: &Atom, positive: bool) -> Theory {
        let mut t = self.clone();
        let v = t.var(atom, VarKind::Derived);
        let mut conjuncts = match std::mem::replace(&mut t.formula, Formula::True) {
            Formula::And(fs) => fs,
            Formula::True => Vec::new(),
            f => vec![f],
        };
        conjuncts.push(Formula::lit(v, positive));
        t.formula = Formula::And(conjuncts);
        t
    }

    pub fn is_model(&self, assignment: &[bool]) -> bool {
        self.formula.eval(assignment)
    }

    /// Infix rendering; a top-level conjunction prints one conjunct per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.formula {
            Formula::And(fs) if !fs.is_empty() => {
                for f in fs {
                    let _ = writeln!(out, "{}", self.formula_to_string(f));
                }
            }
            f => {
                let _ = writeln!(out, "{}", self.formula_to_string(f));
            }
        }
        out
    }

    pub fn formula_to_string(&self, f: &Formula) -> String {
        let mut s = String::new();
        self.write_formula(&mut s, f);
        s
    }

    fn write_child(&self, out: &mut String, child: &Formula, parent_prec: u8) {
        if child.precedence() <= parent_prec {
            out.push('(');
            self.write_formula(out, child);
            out.push(')');
        } else {
            self.write_formula(out, child);
        }
    }

    fn write_formula(&self, out: &mut String, f: &Formula) {
        match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Var(v) => out.push_str(&self.names[*v]),
            Formula::Not(g) => {
                out.push('~');
                self.write_child(out, g, 2);
            }
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
                out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" })
            }
            Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => self.write_formula(out, &fs[0]),
            Formula::And(fs) | Formula::Or(fs) => {
                let (sep, prec) = if matches!(f, Formula::And(_)) { (" & ", 2) } else { (" | ", 1) };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    self.write_child(out, g, prec);
                }
            }
            Formula::Iff(a, b) => {
                self.write_child(out, a, 0);
                out.push_str(" <=> ");
                self.write_child(out, b, 0);
            }
        }
    }
}
