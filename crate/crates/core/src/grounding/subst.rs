use im::OrdMap;
use std::fmt;
use std::rc::Rc;

use crate::syntax::{term_to_string, Atom, Clause, Literal, Term};

/// Variable bindings `{V1 = t1, ..., Vn = tn}`.
///
/// Bindings may be stored in triangular form (a bound term can mention other bound
/// variables); [`Substitution::apply`] always resolves fully.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    // persistent, so cloning a substitution along a search branch is cheap
    bindings: OrdMap<String, Rc<Term>>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        Substitution { bindings: pairs.into_iter().map(|(v, t)| (v.into(), Rc::new(t))).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var).map(|t| &**t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter().map(|(v, t)| (v, &**t))
    }

    pub(crate) fn bind(&mut self, var: String, term: Term) {
        self.bindings.insert(var, Rc::new(term));
    }

    /// Follows variable-to-variable links one level at a time until reaching an unbound
    /// variable or a non-variable term.
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Variable(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = &**next,
                None => break,
            }
        }
        t
    }

    pub fn apply<E: Substitute>(&self, e: &E) -> E {
        e.substitute(self)
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Compound { functor, args } => {
                Term::Compound { functor: functor.clone(), args: args.iter().map(|a| self.resolve(a)).collect() }
            }
            other => other.clone(),
        }
    }

    /// Applying the result equals applying `self` and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut bindings: OrdMap<String, Rc<Term>> = self
            .bindings
            .keys()
            .map(|v| (v.clone(), Rc::new(other.resolve(&self.resolve(&Term::Variable(v.clone()))))))
            .collect();
        for (v, t) in &other.bindings {
            bindings.entry(v.clone()).or_insert_with(|| Rc::new(other.resolve(t)));
        }
        let bindings = bindings.into_iter().filter(|(v, t)| !matches!(&**t, Term::Variable(w) if w == v)).collect();
        Substitution { bindings }
    }

    /// Fully resolved copy restricted to `vars`.
    pub fn restrict(&self, vars: &[String]) -> Substitution {
        Substitution {
            bindings: vars
                .iter()
                .filter_map(|v| {
                    let t = self.resolve(&Term::Variable(v.clone()));
                    (!matches!(&t, Term::Variable(w) if w == v)).then(|| (v.clone(), Rc::new(t)))
                })
                .collect(),
        }
    }

    fn occurs(&self, var: &str, t: &Term) -> bool {
        match self.walk(t) {
            Term::Variable(v) => v == var,
            Term::Compound { args, .. } => args.iter().any(|a| self.occurs(var, a)),
            Term::Constant(_) => false,
        }
    }

    /// Extends `self` to a most general unifier of `a` and `b`, with occurs check.
    /// Like [`Self::walk`] but detached from `self`: `None` when `t` is not a bound variable.
    fn walk_shared(&self, t: &Term) -> Option<Rc<Term>> {
        let Term::Variable(v) = t else { return None };
        let mut cur = self.bindings.get(v)?.clone();
        while let Term::Variable(w) = &*cur {
            match self.bindings.get(w) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        Some(cur)
    }

    pub(crate) fn unify_terms(&mut self, a: &Term, b: &Term) -> bool {
        let (sa, sb) = (self.walk_shared(a), self.walk_shared(b));
        let (a, b) = (sa.as_deref().unwrap_or(a), sb.as_deref().unwrap_or(b));
        match (a, b) {
            (Term::Variable(x), Term::Variable(y)) if x == y => true,
            (Term::Variable(x), t) | (t, Term::Variable(x)) => {
                if self.occurs(x, t) {
                    return false;
                }
                self.bind(x.clone(), t.clone());
                true
            }
            (Term::Constant(c), Term::Constant(d)) => c == d,
            (Term::Compound { functor: f, args: xs }, Term::Compound { functor: g, args: ys }) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify_terms(x, y))
            }
            _ => false,
        }
    }

    pub(crate) fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        a.predicate == b.predicate
            && a.args.len() == b.args.len()
            && a.args.iter().zip(&b.args).all(|(x, y)| self.unify_terms(x, y))
    }

    /// Returns an idempotent copy (every binding fully resolved).
    pub fn normalized(&self) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .keys()
                .map(|v| (v.clone(), Rc::new(self.resolve(&Term::Variable(v.clone())))))
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={}", term_to_string(&self.resolve(t)))?;
        }
        f.write_str("}")
    }
}

/// Expressions a substitution can be applied to.
pub trait Substitute {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn substitute(&self, s: &Substitution) -> Self {
        s.resolve(self)
    }
}

impl Substitute for Atom {
    fn substitute(&self, s: &Substitution) -> Self {
        Atom { predicate: self.predicate.clone(), args: self.args.iter().map(|a| s.resolve(a)).collect() }
    }
}

impl Substitute for Literal {
    fn substitute(&self, s: &Substitution) -> Self {
        Literal { atom: self.atom.substitute(s), positive: self.positive }
    }
}

impl Substitute for Clause {
    fn substitute(&self, s: &Substitution) -> Self {
        Clause { head: self.head.substitute(s), body: self.body.iter().map(|l| l.substitute(s)).collect() }
    }
}

/// Most general unifier of two terms, or `None`.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    s.unify_terms(a, b).then(|| s.normalized())
}

/// Most general unifier of two atoms, or `None`.
pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    let mut s = Substitution::new();
    s.unify_atoms(a, b).then(|| s.normalized())
}

/// `e` with every bound variable replaced.
pub fn apply<E: Substitute>(s: &Substitution, e: &E) -> E {
    e.substitute(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_query;
    use proptest::prelude::*;

    fn atom(s: &str) -> Atom {
        parse_query(s).unwrap()
    }

    #[test]
    fn parent_example() {
        let s = unify_atoms(&atom("parent(X,Y)"), &atom("parent(an,bob)")).unwrap();
        assert_eq!(s, Substitution::from_pairs([("X", Term::symbol("an")), ("Y", Term::symbol("bob"))]));
        assert_eq!(apply(&s, &atom("parent(X,Y)")), atom("parent(an,bob)"));
    }

    #[test]
    fn identical_constants_give_empty_substitution() {
        assert_eq!(unify(&Term::symbol("a"), &Term::symbol("a")), Some(Substitution::new()));
        assert_eq!(unify(&Term::symbol("a"), &Term::symbol("b")), None);
    }

    #[test]
    fn occurs_check() {
        let fx = Term::compound("f", vec![Term::var("X")]);
        assert_eq!(unify(&fx, &Term::var("X")), None);
    }

    #[test]
    fn empty_substitution_is_identity() {
        let a = atom("g(X, f(Y), c)");
        assert_eq!(apply(&Substitution::new(), &a), a);
    }

    #[test]
    fn composition() {
        let s1 = Substitution::from_pairs([("X", Term::compound("f", vec![Term::var("Y")]))]);
        let s2 = Substitution::from_pairs([("Y", Term::symbol("a"))]);
        let composed = s1.compose(&s2);
        assert_eq!(apply(&composed, &atom("g(X)")), atom("g(f(a))"));
        assert_eq!(composed.compose(&Substitution::new()), composed);
    }

    #[test]
    fn chained_bindings_resolve() {
        let s = unify_atoms(&atom("p(X, Y, Z)"), &atom("p(Y, Z, a)")).unwrap();
        assert_eq!(apply(&s, &atom("q(X)")), atom("q(a)"));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["a", "b"]).prop_map(Term::symbol),
            prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..=2))
                .prop_map(|(f, args)| Term::compound(f, args))
        })
    }

    fn arb_ground() -> impl Strategy<Value = Term> {
        let leaf = prop::sample::select(vec!["a", "b"]).prop_map(Term::symbol);
        leaf.prop_recursive(2, 6, 2, |inner| {
            (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..=2))
                .prop_map(|(f, args)| Term::compound(f, args))
        })
    }

    proptest! {
        // Any ground unifier sigma is an instance of the computed mgu theta: (V theta) sigma = V sigma.
        #[test]
        fn unifier_is_most_general(
            a in arb_term(),
            b in arb_term(),
            gx in arb_ground(),
            gy in arb_ground(),
            gz in arb_ground(),
        ) {
            let sigma = Substitution::from_pairs([("X", gx), ("Y", gy), ("Z", gz)]);
            let theta = unify(&a, &b);
            if let Some(theta) = &theta {
                prop_assert_eq!(apply(theta, &a), apply(theta, &b));
                prop_assert_eq!(theta.normalized(), theta.clone());
            }
            if apply(&sigma, &a) == apply(&sigma, &b) {
                let theta = theta.expect("a common instance exists, so unification must succeed");
                for v in ["X", "Y", "Z"] {
                    let through = apply(&sigma, &apply(&theta, &Term::var(v)));
                    prop_assert_eq!(through, apply(&sigma, &Term::var(v)));
                }
            }
        }
    }
}
