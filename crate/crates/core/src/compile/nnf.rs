use std::collections::HashMap;
use std::fmt::Write;
use std::sync::Arc;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NnfNode {
    True,
    False,
    Lit {
        var: usize,
        positive: bool,
    },
    And(Vec<NodeId>),
    /// `decision` names the variable whose literals split the children, when known.
    Or {
        children: Vec<NodeId>,
        decision: Option<usize>,
    },
}

impl NnfNode {
    pub fn children(&self) -> &[NodeId] {
        match self {
            NnfNode::And(cs) | NnfNode::Or { children: cs, .. } => cs,
            _ => &[],
        }
    }
}

/// An NNF circuit whose nodes are stored children-first, so index order is a topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct NnfCircuit {
    nodes: Vec<NnfNode>,
    var_sets: Vec<Arc<[usize]>>,
    root: NodeId,
    names: Vec<String>,
}

impl NnfCircuit {
    pub fn nodes(&self) -> &[NnfNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NnfNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.children().len()).sum()
    }

    /// Sorted variables mentioned below `id`.
    pub fn var_set(&self, id: NodeId) -> &[usize] {
        &self.var_sets[id]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    /// Truth value of the circuit under a complete assignment.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        let mut val = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            val[i] = match n {
                NnfNode::True => true,
                NnfNode::False => false,
                NnfNode::Lit { var, positive } => assignment[*var] == *positive,
                NnfNode::And(cs) => cs.iter().all(|c| val[*c]),
                NnfNode::Or { children, .. } => children.iter().any(|c| val[*c]),
            };
        }
        val[self.root]
    }
}

/// Hash-consing circuit builder. Constructors fold constants and collapse single children
/// but keep duplicates, so non-deterministic or non-decomposable shapes can be built on purpose.
#[derive(Debug)]
pub struct NnfBuilder {
    nodes: Vec<NnfNode>,
    var_sets: Vec<Arc<[usize]>>,
    ids: HashMap<NnfNode, NodeId>,
    names: Vec<String>,
}

impl NnfBuilder {
    pub fn new(names: Vec<String>) -> Self {
        NnfBuilder { nodes: Vec::new(), var_sets: Vec::new(), ids: HashMap::new(), names }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, n: NnfNode) -> NodeId {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let vars: Arc<[usize]> = match &n {
            NnfNode::Lit { var, .. } => Arc::from(vec![*var]),
            NnfNode::True | NnfNode::False => Arc::from(Vec::new()),
            NnfNode::And(cs) | NnfNode::Or { children: cs, .. } => {
                let mut all: Vec<usize> = cs.iter().flat_map(|c| self.var_sets[*c].iter().copied()).collect();
                all.sort_unstable();
                all.dedup();
                Arc::from(all)
            }
        };
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.var_sets.push(vars);
        self.ids.insert(n, id);
        id
    }

    pub fn true_node(&mut self) -> NodeId {
        self.intern(NnfNode::True)
    }

    pub fn false_node(&mut self) -> NodeId {
        self.intern(NnfNode::False)
    }

    pub fn lit(&mut self, var: usize, positive: bool) -> NodeId {
        self.intern(NnfNode::Lit { var, positive })
    }

    pub fn and(&mut self, children: Vec<NodeId>) -> NodeId {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match self.nodes[c] {
                NnfNode::False => return self.false_node(),
                NnfNode::True => {}
                _ => kept.push(c),
            }
        }
        match kept.len() {
            0 => self.true_node(),
            1 => kept[0],
            _ => self.intern(NnfNode::And(kept)),
        }
    }

    pub fn or(&mut self, children: Vec<NodeId>) -> NodeId {
        self.decision_or(None, children)
    }

    pub fn decision_or(&mut self, decision: Option<usize>, children: Vec<NodeId>) -> NodeId {
        let kept: Vec<NodeId> = children.into_iter().filter(|c| self.nodes[*c] != NnfNode::False).collect();
        match kept.len() {
            0 => self.false_node(),
            1 => kept[0],
            _ => self.intern(NnfNode::Or { children: kept, decision }),
        }
    }

    /// Keeps only nodes reachable from `root`, renumbered in depth-first post-order.
    pub fn finish(self, root: NodeId) -> NnfCircuit {
        let mut new_id: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if new_id[id].is_some() {
                continue;
            }
            if expanded {
                new_id[id] = Some(order.len());
                order.push(id);
            } else {
                stack.push((id, true));
                for c in self.nodes[id].children().iter().rev() {
                    if new_id[*c].is_none() {
                        stack.push((*c, false));
                    }
                }
            }
        }
        let remap = |cs: &[NodeId]| cs.iter().map(|c| new_id[*c].unwrap()).collect::<Vec<_>>();
        let mut nodes = Vec::with_capacity(order.len());
        let mut var_sets = Vec::with_capacity(order.len());
        for &old in &order {
            nodes.push(match &self.nodes[old] {
                NnfNode::And(cs) => NnfNode::And(remap(cs)),
                NnfNode::Or { children, decision } => NnfNode::Or { children: remap(children), decision: *decision },
                other => other.clone(),
            });
            var_sets.push(self.var_sets[old].clone());
        }
        NnfCircuit { root: new_id[root].unwrap(), nodes, var_sets, names: self.names }
    }
}

/// Makes every `Or` node's children mention the same variables and the root mention all of
/// `all_vars`, by conjoining `(v | ~v)` for each missing `v`.
pub fn smooth(c: &NnfCircuit, all_vars: &[usize]) -> NnfCircuit {
    let mut b = NnfBuilder::new(c.names.clone());
    let mut map = Vec::with_capacity(c.nodes.len());
    for (i, n) in c.nodes.iter().enumerate() {
        let id = match n {
            NnfNode::True => b.true_node(),
            NnfNode::False => b.false_node(),
            NnfNode::Lit { var, positive } => b.lit(*var, *positive),
            NnfNode::And(cs) => {
                let cs = cs.iter().map(|c| map[*c]).collect();
                b.and(cs)
            }
            NnfNode::Or { children, decision } => {
                let target = c.var_set(i);
                let cs = children.iter().map(|ch| pad(&mut b, map[*ch], c.var_set(*ch), target)).collect();
                b.decision_or(*decision, cs)
            }
        };
        map.push(id);
    }
    let root = if c.nodes[c.root] == NnfNode::False {
        map[c.root]
    } else {
        let mut target: Vec<usize> = all_vars.to_vec();
        target.extend_from_slice(c.var_set(c.root));
        target.sort_unstable();
        target.dedup();
        pad(&mut b, map[c.root], c.var_set(c.root), &target)
    };
    b.finish(root)
}

fn pad(b: &mut NnfBuilder, node: NodeId, have: &[usize], want: &[usize]) -> NodeId {
    let missing: Vec<usize> = want.iter().copied().filter(|v| have.binary_search(v).is_err()).collect();
    if missing.is_empty() {
        return node;
    }
    let mut parts = vec![node];
    for v in missing {
        let (p, n) = (b.lit(v, true), b.lit(v, false));
        parts.push(b.decision_or(Some(v), vec![p, n]));
    }
    b.and(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdReport {
    pub smooth: bool,
    pub deterministic: bool,
    pub decomposable: bool,
}

impl SdReport {
    pub fn all(&self) -> bool {
        self.smooth && self.deterministic && self.decomposable
    }
}

/// Checks smoothness, determinism and decomposability node by node.
///
/// Determinism is read off the decision annotation when the children carry opposite
/// literals of the decision variable, and otherwise established by satisfiability checks
/// on each pair of children.
pub fn verify_sd_dnnf(c: &NnfCircuit) -> SdReport {
    let mut report = SdReport { smooth: true, deterministic: true, decomposable: true };
    for (i, n) in c.nodes.iter().enumerate() {
        match n {
            NnfNode::And(cs) => {
                let mut seen = std::collections::HashSet::new();
                for ch in cs {
                    for v in c.var_set(*ch) {
                        if !seen.insert(*v) {
                            report.decomposable = false;
                        }
                    }
                }
            }
            NnfNode::Or { children, decision } => {
                if children.iter().any(|ch| c.var_set(*ch) != c.var_set(i)) {
                    report.smooth = false;
                }
                if report.deterministic && !decided(c, children, *decision) {
                    for (k, a) in children.iter().enumerate() {
                        for bb in &children[k + 1..] {
                            if super::compiler::nodes_jointly_satisfiable(c, *a, *bb) {
                                report.deterministic = false;
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }
    report
}

fn decided(c: &NnfCircuit, children: &[NodeId], decision: Option<usize>) -> bool {
    let Some(v) = decision else { return false };
    if children.len() != 2 {
        return false;
    }
    let sign = |id: NodeId| -> Option<bool> {
        let has = |node: &NnfNode| match node {
            NnfNode::Lit { var, positive } if *var == v => Some(*positive),
            _ => None,
        };
        has(&c.nodes[id]).or_else(|| match &c.nodes[id] {
            NnfNode::And(cs) => cs.iter().find_map(|ch| has(&c.nodes[*ch])),
            _ => None,
        })
    };
    matches!((sign(children[0]), sign(children[1])), (Some(a), Some(b)) if a != b)
}

/// Graphviz rendering; node `nK` is the K-th node in topological order.
pub fn export_dot(c: &NnfCircuit) -> String {
    let mut out = String::from("digraph nnf {\n  rankdir=BT;\n");
    for (i, n) in c.nodes.iter().enumerate() {
        let (label, shape) = match n {
            NnfNode::True => ("⊤".to_string(), "plaintext"),
            NnfNode::False => ("⊥".to_string(), "plaintext"),
            NnfNode::Lit { var, positive } => {
                let name = &c.names[*var];
                (if *positive { name.clone() } else { format!("¬{name}") }, "box")
            }
            NnfNode::And(_) => ("∧".to_string(), "circle"),
            NnfNode::Or { .. } => ("∨".to_string(), "circle"),
        };
        let label = label.replace('"', "\\\"");
        let _ = writeln!(out, "  n{i} [label=\"{label}\", shape={shape}];");
    }
    for (i, n) in c.nodes.iter().enumerate() {
        for ch in n.children() {
            let _ = writeln!(out, "  n{ch} -> n{i};");
        }
    }
    out.push_str("}\n");
    out
}

/// Line-oriented serialization:
///
/// ```text
/// nnf <nodes> <vars> <root>
/// v <index> <name>
/// <id> T | F | L <+/-var> | A <children> | O <decision or -> <children>
/// ```
pub fn circuit_to_text(c: &NnfCircuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nnf {} {} {}", c.nodes.len(), c.names.len(), c.root);
    for (i, name) in c.names.iter().enumerate() {
        let _ = writeln!(out, "v {i} {name}");
    }
    for (i, n) in c.nodes.iter().enumerate() {
        let _ = write!(out, "{i} ");
        match n {
            NnfNode::True => out.push('T'),
            NnfNode::False => out.push('F'),
            NnfNode::Lit { var, positive } => {
                let _ = write!(out, "L {}{var}", if *positive { '+' } else { '-' });
            }
            NnfNode::And(cs) => {
                out.push('A');
                for ch in cs {
                    let _ = write!(out, " {ch}");
                }
            }
            NnfNode::Or { children, decision } => {
                match decision {
                    Some(d) => {
                        let _ = write!(out, "O {d}");
                    }
                    None => out.push_str("O -"),
                }
                for ch in children {
                    let _ = write!(out, " {ch}");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`circuit_to_text`].
pub fn circuit_from_text(text: &str) -> Result<NnfCircuit, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or("empty input")?.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().map_err(|e| format!("bad number {s:?}: {e}"));
    if header.len() != 4 || header[0] != "nnf" {
        return Err("expected header `nnf <nodes> <vars> <root>`".into());
    }
    let (n_nodes, n_vars, root) = (num(header[1])?, num(header[2])?, num(header[3])?);
    let mut names = Vec::with_capacity(n_vars);
    let mut b = NnfBuilder::new(Vec::new());
    let mut raw: Vec<NnfNode> = Vec::with_capacity(n_nodes);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "v" {
            names.push(parts.get(2..).ok_or("bad variable line")?.join(" "));
            continue;
        }
        let children = |from: usize| -> Result<Vec<NodeId>, String> { parts[from..].iter().map(|s| num(s)).collect() };
        let node = match parts.get(1).copied() {
            Some("T") => NnfNode::True,
            Some("F") => NnfNode::False,
            Some("L") => {
                let s = parts.get(2).ok_or("literal without variable")?;
                let (sign, v) = s.split_at(1);
                NnfNode::Lit { var: num(v)?, positive: sign == "+" }
            }
            Some("A") => NnfNode::And(children(2)?),
            Some("O") => NnfNode::Or {
                decision: match *parts.get(2).ok_or("or node without decision field")? {
                    "-" => None,
                    d => Some(num(d)?),
                },
                children: children(3)?,
            },
            _ => return Err(format!("bad node line {line:?}")),
        };
        if node.children().iter().any(|c| *c >= raw.len()) {
            return Err(format!("node line {line:?} refers forward"));
        }
        raw.push(node);
    }
    if raw.len() != n_nodes || names.len() != n_vars || root >= n_nodes {
        return Err("node or variable count does not match header".into());
    }
    if raw.iter().any(|n| matches!(n, NnfNode::Lit { var, .. } if *var >= n_vars)) {
        return Err("literal refers to an undeclared variable".into());
    }
    // intern without simplification so the structure survives as written
    let mut map = Vec::with_capacity(raw.len());
    for n in raw {
        let n = match n {
            NnfNode::And(cs) => NnfNode::And(cs.iter().map(|c| map[*c]).collect()),
            NnfNode::Or { children, decision } => {
                NnfNode::Or { children: children.iter().map(|c| map[*c]).collect(), decision }
            }
            other => other,
        };
        map.push(b.intern(n));
    }
    b.names = names;
    Ok(b.finish(map[root]))
}
