//! Arithmetic evaluation plans.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::expr::Expression;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    /// The runtime variable.
    Input(String),
    /// A variable-free coefficient; never counted as work.
    Constant(Expression),
    Add(NodeId, NodeId),
    Mul(NodeId, NodeId),
}

impl Node {
    pub fn operands(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            Node::Add(a, b) | Node::Mul(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_arithmetic(&self) -> bool {
        self.operands().is_some()
    }
}

/// A DAG in topological order: every operand index is smaller than the index
/// of its user, and every node is reachable from `root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvalDag {
    nodes: Vec<Node>,
    root: NodeId,
}

impl EvalDag {
    pub fn from_parts(nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let dag = EvalDag { nodes, root };
        dag.validate()?;
        Ok(dag)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Err(Error::InvalidDag { reason });
        if self.root >= self.nodes.len() {
            return invalid(format!(
                "root {} out of range for {} nodes",
                self.root,
                self.nodes.len()
            ));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some((a, b)) = node.operands() {
                if a >= i || b >= i {
                    return invalid(format!("node {i} uses an operand that does not precede it"));
                }
            }
        }
        let reachable = self.reachable();
        if let Some(dead) = reachable.iter().position(|r| !r) {
            return invalid(format!("node {dead} is not reachable from the root"));
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if id >= seen.len() || seen[id] {
                continue;
            }
            seen[id] = true;
            if let Some((a, b)) = self.nodes[id].operands() {
                stack.push(a);
                stack.push(b);
            }
        }
        seen
    }

    /// How many operand slots refer to each node.
    pub fn use_counts(&self) -> Vec<usize> {
        let mut uses = vec![0; self.nodes.len()];
        for node in &self.nodes {
            if let Some((a, b)) = node.operands() {
                uses[a] += 1;
                uses[b] += 1;
            }
        }
        uses
    }

    /// Per node: does its value depend on an `Input`?
    pub fn input_dependence(&self) -> Vec<bool> {
        let mut dep = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            dep[i] = match *node {
                Node::Input(_) => true,
                Node::Constant(_) => false,
                Node::Add(a, b) | Node::Mul(a, b) => dep[a] || dep[b],
            };
        }
        dep
    }

    pub fn has_input(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::Input(_)))
    }

    /// Coefficient atom names referenced by constant nodes, in node order.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for node in &self.nodes {
            if let Node::Constant(e) = node {
                for name in e.coefficient_names() {
                    if !out.contains(&name) {
                        out.push(name);
                    }
                }
            }
        }
        out
    }

    /// Copy with node `id` flipped between `Add` and `Mul`.
    pub fn with_swapped_op(&self, id: NodeId) -> Option<EvalDag> {
        let swapped = match *self.nodes.get(id)? {
            Node::Add(a, b) => Node::Mul(a, b),
            Node::Mul(a, b) => Node::Add(a, b),
            _ => return None,
        };
        let mut nodes = self.nodes.clone();
        nodes[id] = swapped;
        Some(EvalDag { nodes, root: self.root })
    }

    /// Relabel nodes so that `order[k]` becomes node `k`. The order must be
    /// a permutation that keeps operands ahead of their users.
    pub fn reordered(&self, order: &[NodeId]) -> Result<EvalDag> {
        if order.len() != self.nodes.len() {
            return Err(Error::InvalidDag {
                reason: "order is not a permutation".into(),
            });
        }
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (k, &old) in order.iter().enumerate() {
            if old >= new_id.len() || new_id[old] != usize::MAX {
                return Err(Error::InvalidDag {
                    reason: "order is not a permutation".into(),
                });
            }
            new_id[old] = k;
        }
        let nodes = order
            .iter()
            .map(|&old| match &self.nodes[old] {
                Node::Add(a, b) => Node::Add(new_id[*a], new_id[*b]),
                Node::Mul(a, b) => Node::Mul(new_id[*a], new_id[*b]),
                other => other.clone(),
            })
            .collect();
        EvalDag::from_parts(nodes, new_id[self.root])
    }
}

/// Incremental construction; `finish` drops nodes the root does not use.
#[derive(Debug, Default)]
pub struct DagBuilder {
    nodes: Vec<Node>,
    inputs: HashMap<String, NodeId>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// The input node for `name`, created once.
    pub fn input(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.inputs.get(name) {
            return id;
        }
        let id = self.push(Node::Input(name.to_string()));
        self.inputs.insert(name.to_string(), id);
        id
    }

    pub fn constant(&mut self, value: Expression) -> NodeId {
        self.push(Node::Constant(value))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Add(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Mul(a, b))
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn finish(self, root: NodeId) -> EvalDag {
        let full = EvalDag {
            nodes: self.nodes,
            root,
        };
        let keep = full.reachable();
        let mut remap = vec![usize::MAX; full.nodes.len()];
        let mut nodes = Vec::with_capacity(keep.iter().filter(|k| **k).count());
        for (old, node) in full.nodes.into_iter().enumerate() {
            if !keep[old] {
                continue;
            }
            remap[old] = nodes.len();
            nodes.push(match node {
                Node::Add(a, b) => Node::Add(remap[a], remap[b]),
                Node::Mul(a, b) => Node::Mul(remap[a], remap[b]),
                other => other,
            });
        }
        let dag = EvalDag {
            nodes,
            root: remap[root],
        };
        debug_assert!(dag.validate().is_ok());
        dag
    }
}
