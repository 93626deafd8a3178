use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordered node and relation universe of a link stream.
///
/// Relations are directed node pairs; their list position is the relation
/// index used everywhere else (the order is load-bearing for shifting,
/// regularity and the structural basis).
#[derive(Debug, Clone)]
pub struct RelationSpace {
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    relations: Vec<(usize, usize)>,
    relation_index: HashMap<(usize, usize), usize>,
}

impl PartialEq for RelationSpace {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.relations == other.relations
    }
}

impl RelationSpace {
    /// Builds a space from node names and directed `(from, to)` name pairs.
    /// Relation order is preserved as given.
    pub fn new<S: AsRef<str>>(nodes: Vec<String>, relations: &[(S, S)]) -> Result<Self> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, name) in nodes.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidSpace("empty node identifier".into()));
            }
            if node_index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate node {name:?}")));
            }
        }
        let mut rel = Vec::with_capacity(relations.len());
        let mut relation_index = HashMap::with_capacity(relations.len());
        for (from, to) in relations {
            let (from, to) = (from.as_ref(), to.as_ref());
            let u = *node_index
                .get(from)
                .ok_or_else(|| Error::UnknownNode(from.to_string()))?;
            let v = *node_index
                .get(to)
                .ok_or_else(|| Error::UnknownNode(to.to_string()))?;
            if relation_index.insert((u, v), rel.len()).is_some() {
                return Err(Error::InvalidSpace(format!(
                    "duplicate relation ({from:?}, {to:?})"
                )));
            }
            rel.push((u, v));
        }
        Ok(Self {
            nodes,
            node_index,
            relations: rel,
            relation_index,
        })
    }

    /// A space holding both node names appearing in `pairs`, collecting
    /// nodes in first-appearance order.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut seen = HashMap::new();
        for (a, b) in pairs {
            for name in [a.as_ref(), b.as_ref()] {
                if !seen.contains_key(name) {
                    seen.insert(name.to_string(), nodes.len());
                    nodes.push(name.to_string());
                }
            }
        }
        Self::new(nodes, pairs)
    }

    /// All `n*(n-1)` ordered pairs of distinct nodes, grouped by source in
    /// node-list order.
    pub fn complete_directed(nodes: Vec<String>) -> Result<Self> {
        let pairs: Vec<(String, String)> = nodes
            .iter()
            .flat_map(|u| {
                nodes
                    .iter()
                    .filter(move |v| *v != u)
                    .map(move |v| (u.clone(), v.clone()))
            })
            .collect();
        Self::new(nodes, &pairs)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_id(&self, name: &str) -> Result<usize> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn relations(&self) -> &[(usize, usize)] {
        &self.relations
    }

    /// Endpoint names of relation `k`.
    pub fn relation_names(&self, k: usize) -> (&str, &str) {
        let (u, v) = self.relations[k];
        (&self.nodes[u], &self.nodes[v])
    }

    pub fn relation_id(&self, from: &str, to: &str) -> Result<usize> {
        let u = self.node_id(from)?;
        let v = self.node_id(to)?;
        self.relation_index
            .get(&(u, v))
            .copied()
            .ok_or_else(|| Error::UnknownRelation(from.to_string(), to.to_string()))
    }

    /// Index of the opposite-direction relation, if present.
    pub fn reverse_of(&self, k: usize) -> Option<usize> {
        let (u, v) = self.relations[k];
        self.relation_index.get(&(v, u)).copied()
    }
}
