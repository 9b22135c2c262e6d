use std::collections::HashMap;
use std::sync::Arc;

use crate::propositional::Formula;

pub(crate) type Fid = usize;

pub(crate) const TRUE: Fid = 0;
pub(crate) const FALSE: Fid = 1;

/// Negation-normal-form formula node. Children are sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum FNode {
    True,
    False,
    Lit(usize, bool),
    And(Box<[Fid]>),
    Or(Box<[Fid]>),
}

/// Hash-consed NNF formulas with simplifying constructors.
#[derive(Debug)]
pub(crate) struct Store {
    nodes: Vec<FNode>,
    ids: HashMap<FNode, Fid>,
    vars: Vec<Option<Arc<[usize]>>>,
}

impl Store {
    pub fn new() -> Self {
        let mut s = Store { nodes: Vec::new(), ids: HashMap::new(), vars: Vec::new() };
        s.intern(FNode::True);
        s.intern(FNode::False);
        s
    }

    fn intern(&mut self, n: FNode) -> Fid {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.vars.push(None);
        self.ids.insert(n, id);
        id
    }

    pub fn node(&self, f: Fid) -> &FNode {
        &self.nodes[f]
    }

    pub fn lit(&mut self, v: usize, positive: bool) -> Fid {
        self.intern(FNode::Lit(v, positive))
    }

    pub fn and(&mut self, children: Vec<Fid>) -> Fid {
        self.junction(children, true)
    }

    pub fn or(&mut self, children: Vec<Fid>) -> Fid {
        self.junction(children, false)
    }

    fn junction(&mut self, children: Vec<Fid>, is_and: bool) -> Fid {
        // unit of the operation vanishes, its dual absorbs
        let (unit, absorbing) = if is_and { (TRUE, FALSE) } else { (FALSE, TRUE) };
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            if c == absorbing {
                return absorbing;
            }
            if c == unit {
                continue;
            }
            match &self.nodes[c] {
                FNode::And(cs) if is_and => flat.extend_from_slice(cs),
                FNode::Or(cs) if !is_and => flat.extend_from_slice(cs),
                _ => flat.push(c),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        // complementary literals
        for w in &flat {
            if let FNode::Lit(v, s) = self.nodes[*w] {
                if let Some(&neg) = self.ids.get(&FNode::Lit(v, !s)) {
                    if flat.binary_search(&neg).is_ok() {
                        return absorbing;
                    }
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ if is_and => self.intern(FNode::And(flat.into())),
            _ => self.intern(FNode::Or(flat.into())),
        }
    }

    /// Translates a theory formula, pushing negations to the variables.
    pub fn from_formula(&mut self, f: &Formula, positive: bool) -> Fid {
        match f {
            Formula::True => {
                if positive {
                    TRUE
                } else {
                    FALSE
                }
            }
            Formula::False => {
                if positive {
                    FALSE
                } else {
                    TRUE
                }
            }
            Formula::Var(v) => self.lit(*v, positive),
            Formula::Not(g) => self.from_formula(g, !positive),
            Formula::And(gs) | Formula::Or(gs) => {
                let cs = gs.iter().map(|g| self.from_formula(g, positive)).collect();
                if matches!(f, Formula::And(_)) == positive {
                    self.and(cs)
                } else {
                    self.or(cs)
                }
            }
            Formula::Iff(a, b) => {
                let (ap, an) = (self.from_formula(a, true), self.from_formula(a, false));
                let (bp, bn) = (self.from_formula(b, true), self.from_formula(b, false));
                let (x, y) = if positive {
                    (self.and(vec![ap, bp]), self.and(vec![an, bn]))
                } else {
                    (self.and(vec![ap, bn]), self.and(vec![an, bp]))
                };
                self.or(vec![x, y])
            }
        }
    }

    /// Sorted variables mentioned by `f`.
    pub fn vars(&mut self, f: Fid) -> Arc<[usize]> {
        if let Some(v) = &self.vars[f] {
            return v.clone();
        }
        let vs: Arc<[usize]> = match self.nodes[f].clone() {
            FNode::True | FNode::False => Arc::from(Vec::new()),
            FNode::Lit(v, _) => Arc::from(vec![v]),
            FNode::And(cs) | FNode::Or(cs) => {
                let mut all: Vec<usize> = Vec::new();
                for c in cs.iter() {
                    all.extend_from_slice(&self.vars(*c));
                }
                all.sort_unstable();
                all.dedup();
                Arc::from(all)
            }
        };
        self.vars[f] = Some(vs.clone());
        vs
    }

    /// `f` with the assigned variables replaced by constants.
    pub fn condition(&mut self, f: Fid, assignment: &HashMap<usize, bool>) -> Fid {
        let mut memo = HashMap::new();
        self.condition_rec(f, assignment, &mut memo)
    }

    fn condition_rec(&mut self, f: Fid, assignment: &HashMap<usize, bool>, memo: &mut HashMap<Fid, Fid>) -> Fid {
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let vars = self.vars(f);
        if !vars.iter().any(|v| assignment.contains_key(v)) {
            return f;
        }
        let r = match self.nodes[f].clone() {
            FNode::True | FNode::False => f,
            FNode::Lit(v, s) => match assignment.get(&v) {
                Some(&val) => {
                    if val == s {
                        TRUE
                    } else {
                        FALSE
                    }
                }
                None => f,
            },
            FNode::And(cs) => {
                let cs = cs.iter().map(|c| self.condition_rec(*c, assignment, memo)).collect();
                self.and(cs)
            }
            FNode::Or(cs) => {
                let cs = cs.iter().map(|c| self.condition_rec(*c, assignment, memo)).collect();
                self.or(cs)
            }
        };
        memo.insert(f, r);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_simplify() {
        let mut s = Store::new();
        let a = s.lit(0, true);
        let na = s.lit(0, false);
        let b = s.lit(1, true);
        assert_eq!(s.and(vec![a, na]), FALSE);
        assert_eq!(s.or(vec![a, na]), TRUE);
        assert_eq!(s.and(vec![a, TRUE]), a);
        assert_eq!(s.and(vec![a, b]), s.and(vec![b, a, b]));
        let ab = s.and(vec![a, b]);
        assert_eq!(s.and(vec![ab, a]), ab);
    }

    #[test]
    fn conditioning() {
        let mut s = Store::new();
        let a = s.lit(0, true);
        let b = s.lit(1, true);
        let f = s.or(vec![a, b]);
        let mut asg = HashMap::new();
        asg.insert(0, false);
        assert_eq!(s.condition(f, &asg), b);
        asg.insert(0, true);
        assert_eq!(s.condition(f, &asg), TRUE);
    }
}
