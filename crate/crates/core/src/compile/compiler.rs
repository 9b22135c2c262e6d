use std::collections::{BTreeSet, HashMap};

use super::nnf::{NnfBuilder, NnfCircuit, NnfNode, NodeId};
use super::store::{FNode, Fid, Store, FALSE, TRUE};
use super::CompileError;
use crate::propositional::{Formula, Theory};

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// How the compiler picks the next decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrder {
    /// Order of first appearance in the theory formula.
    #[default]
    FirstAppearance,
    /// Greedy min-degree elimination order of the conjunct interaction graph.
    MinDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub order: VarOrder,
    pub node_budget: usize,
    /// Reuse circuits for sub-formulas seen before.
    pub cache: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { order: VarOrder::FirstAppearance, node_budget: DEFAULT_NODE_BUDGET, cache: true }
    }
}

/// Compiles a theory to a deterministic, decomposable NNF circuit (not yet smoothed).
pub fn compile_dnnf(t: &Theory, options: &CompileOptions) -> Result<NnfCircuit, CompileError> {
    let mut store = Store::new();
    let root = store.from_formula(&t.formula, true);
    let rank = match options.order {
        VarOrder::FirstAppearance => first_appearance_rank(&t.formula, t.num_vars()),
        VarOrder::MinDegree => min_degree_rank(&mut store, root, t.num_vars()),
    };
    let mut c = Compiler {
        store,
        builder: NnfBuilder::new(t.names().to_vec()),
        cache: HashMap::new(),
        rank,
        options: *options,
    };
    let out = c.compile(root)?;
    Ok(c.builder.finish(out))
}

fn first_appearance_rank(f: &Formula, n: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    for v in f.vars_in_order().into_iter().chain(0..n) {
        if rank[v] == usize::MAX {
            rank[v] = next;
            next += 1;
        }
    }
    rank
}

fn min_degree_rank(store: &mut Store, root: Fid, n: usize) -> Vec<usize> {
    let conjuncts: Vec<Fid> = match store.node(root) {
        FNode::And(cs) => cs.to_vec(),
        _ => vec![root],
    };
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for c in conjuncts {
        let vs = store.vars(c);
        for &a in vs.iter() {
            for &b in vs.iter() {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut rank = vec![usize::MAX; n];
    for step in 0..n {
        let v = (0..n).filter(|v| rank[*v] == usize::MAX).min_by_key(|v| (adj[*v].len(), *v)).unwrap();
        rank[v] = step;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nbrs {
            adj[a].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
    }
    rank
}

struct Compiler {
    store: Store,
    builder: NnfBuilder,
    cache: HashMap<Fid, NodeId>,
    rank: Vec<usize>,
    options: CompileOptions,
}

impl Compiler {
    fn compile(&mut self, f: Fid) -> Result<NodeId, CompileError> {
        if f == TRUE {
            return Ok(self.builder.true_node());
        }
        if f == FALSE {
            return Ok(self.builder.false_node());
        }
        if self.options.cache {
            if let Some(&n) = self.cache.get(&f) {
                return Ok(n);
            }
        }
        let node = self.store.node(f).clone();
        let out = match node {
            FNode::Lit(v, s) => self.builder.lit(v, s),
            FNode::And(ref cs) if cs.iter().any(|c| matches!(self.store.node(*c), FNode::Lit(..))) => {
                self.propagate_units(f, cs)?
            }
            FNode::And(ref cs) => match self.components(cs) {
                Some(groups) => {
                    let mut parts = Vec::with_capacity(groups.len());
                    for g in groups {
                        let sub = self.store.and(g);
                        parts.push(self.compile(sub)?);
                    }
                    self.builder.and(parts)
                }
                None => self.branch(f)?,
            },
            _ => self.branch(f)?,
        };
        if self.builder.len() > self.options.node_budget {
            return Err(CompileError::NodeBudget(self.options.node_budget));
        }
        if self.options.cache {
            self.cache.insert(f, out);
        }
        Ok(out)
    }

    /// Literal conjuncts are fixed, the rest is conditioned on them.
    fn propagate_units(&mut self, f: Fid, conjuncts: &[Fid]) -> Result<NodeId, CompileError> {
        let mut assignment = HashMap::new();
        let mut lits = Vec::new();
        for c in conjuncts {
            if let FNode::Lit(v, s) = *self.store.node(*c) {
                assignment.insert(v, s);
                lits.push(self.builder.lit(v, s));
            }
        }
        let rest = self.store.condition(f, &assignment);
        let rest = self.compile(rest)?;
        lits.push(rest);
        Ok(self.builder.and(lits))
    }

    /// Groups of conjuncts with pairwise disjoint variables, or `None` if connected.
    fn components(&mut self, conjuncts: &[Fid]) -> Option<Vec<Vec<Fid>>> {
        let n = conjuncts.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (i, c) in conjuncts.iter().enumerate() {
            for v in self.store.vars(*c).iter() {
                match owner.get(v) {
                    Some(&j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                    None => {
                        owner.insert(*v, i);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<Fid>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (i, c) in conjuncts.iter().enumerate() {
            let r = find(&mut parent, i);
            let k = *slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[k].push(*c);
        }
        (groups.len() > 1).then_some(groups)
    }

    /// Shannon expansion on the earliest variable in the order.
    fn branch(&mut self, f: Fid) -> Result<NodeId, CompileError> {
        let vars = self.store.vars(f);
        let v = *vars.iter().min_by_key(|v| self.rank[**v]).unwrap();
        let mut children = Vec::with_capacity(2);
        for value in [true, false] {
            let mut a = HashMap::new();
            a.insert(v, value);
            let sub = self.store.condition(f, &a);
            let sub = self.compile(sub)?;
            let lit = self.builder.lit(v, value);
            children.push(self.builder.and(vec![lit, sub]));
        }
        Ok(self.builder.decision_or(Some(v), children))
    }
}

/// Whether the sub-circuits rooted at `a` and `b` have a common model.
pub(crate) fn nodes_jointly_satisfiable(c: &NnfCircuit, a: NodeId, b: NodeId) -> bool {
    let mut store = Store::new();
    let mut map: HashMap<NodeId, Fid> = HashMap::new();
    let fa = to_store(c, a, &mut store, &mut map);
    let fb = to_store(c, b, &mut store, &mut map);
    let both = store.and(vec![fa, fb]);
    let mut comp = Compiler {
        store,
        builder: NnfBuilder::new(c.var_names().to_vec()),
        cache: HashMap::new(),
        rank: (0..c.num_vars()).collect(),
        options: CompileOptions::default(),
    };
    let root = comp.compile(both).expect("budget is not reached at verification scale");
    let circuit = comp.builder.finish(root);
    circuit.node(circuit.root()) != &NnfNode::False
}

fn to_store(c: &NnfCircuit, id: NodeId, store: &mut Store, map: &mut HashMap<NodeId, Fid>) -> Fid {
    if let Some(&f) = map.get(&id) {
        return f;
    }
    let f = match c.node(id) {
        NnfNode::True => TRUE,
        NnfNode::False => FALSE,
        NnfNode::Lit { var, positive } => store.lit(*var, *positive),
        NnfNode::And(cs) => {
            let cs = cs.iter().map(|ch| to_store(c, *ch, store, map)).collect();
            store.and(cs)
        }
        NnfNode::Or { children, .. } => {
            let cs = children.iter().map(|ch| to_store(c, *ch, store, map)).collect();
            store.or(cs)
        }
    };
    map.insert(id, f);
    f
}
