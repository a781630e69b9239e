//! The AMR graph model: rooted, directed, labeled graphs of instances,
//! relations, attributes, and constants, plus Penman parsing/serialization
//! and corpus loading.

mod corpus;
mod parse;
mod serialize;

pub use corpus::{load_corpus, load_corpus_str, write_corpus, CorpusEntry, CorpusError, ErrorPolicy, LoadOptions};
pub use parse::{parse_penman, parse_penman_with, Location, ParseError};
pub use serialize::serialize_penman_with;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use thiserror::Error;

/// Penman variable naming a graph node. Variable names are arbitrary;
/// [`AmrGraph::isomorphic`] compares graphs up to renaming.
pub type NodeId = String;

/// Lexical class of a constant value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstantKind {
    /// Quoted string, stored with quotes stripped.
    String,
    /// Bare token that is neither a number nor a defined variable.
    Symbol,
    /// Numeric token; sign and digits kept exactly as written.
    Number,
}

/// A constant node value. Two constants are equal iff kind and lexical
/// form are both equal; there is no numeric coercion, so `3` != `3.0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant {
    pub kind: ConstantKind,
    pub lexical: String,
}

impl Constant {
    pub fn string(lexical: impl Into<String>) -> Self {
        Constant { kind: ConstantKind::String, lexical: lexical.into() }
    }

    pub fn symbol(lexical: impl Into<String>) -> Self {
        Constant { kind: ConstantKind::Symbol, lexical: lexical.into() }
    }

    pub fn number(lexical: impl Into<String>) -> Self {
        Constant { kind: ConstantKind::Number, lexical: lexical.into() }
    }

    /// Single-character tag used in canonical motif strings and triple keys.
    pub fn kind_tag(&self) -> char {
        match self.kind {
            ConstantKind::String => 's',
            ConstantKind::Symbol => 'y',
            ConstantKind::Number => 'n',
        }
    }

    /// Penman surface form: strings quoted and escaped, everything else bare.
    pub fn penman(&self) -> String {
        match self.kind {
            ConstantKind::String => {
                let mut out = String::with_capacity(self.lexical.len() + 2);
                out.push('"');
                for c in self.lexical.chars() {
                    if c == '"' || c == '\\' {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push('"');
                out
            }
            _ => self.lexical.clone(),
        }
    }
}

/// A relation edge between two instance nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub source: NodeId,
    pub role: String,
    pub target: NodeId,
}

/// An attribute edge from an instance node to a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute {
    pub source: NodeId,
    pub label: String,
    pub value: Constant,
}

/// Ways a node/edge collection can fail the graph invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("root variable `{0}` has no instance definition")]
    RootMissing(NodeId),
    #[error("edge endpoint `{0}` has no instance definition")]
    UnknownNode(NodeId),
    #[error("relation `{0} :{1} {0}` is a self-edge")]
    SelfEdge(NodeId, String),
    #[error("duplicate relation between `{0}` and `{1}` (multiedge)")]
    RelationMultiEdge(NodeId, NodeId),
    #[error("duplicate attribute `{0} :{1} {2}`")]
    DuplicateAttribute(NodeId, String, String),
    #[error("relation edges form a directed cycle")]
    Cyclic,
    #[error("graph is not weakly connected")]
    Disconnected,
    #[error("invalid label `{0}`: {1}")]
    BadLabel(String, &'static str),
}

/// A rooted, directed, labeled AMR graph.
///
/// Construction via [`AmrGraph::new`] enforces every invariant: all edge
/// endpoints are defined instances, the relation edges are acyclic and
/// carry no multiedges, the instance nodes are weakly connected, and the
/// root is a defined instance. Values of this type are immutable.
#[derive(Debug, Clone)]
pub struct AmrGraph {
    root: NodeId,
    instances: BTreeMap<NodeId, String>,
    relations: Vec<Relation>,
    attributes: Vec<Attribute>,
}

impl AmrGraph {
    /// Validate and build a graph. The relation and attribute lists keep
    /// their given order.
    pub fn new(
        root: NodeId,
        instances: BTreeMap<NodeId, String>,
        relations: Vec<Relation>,
        attributes: Vec<Attribute>,
    ) -> Result<Self, GraphError> {
        if !instances.contains_key(&root) {
            return Err(GraphError::RootMissing(root));
        }
        for (node, concept) in &instances {
            check_token(node, "variable")?;
            check_token(concept, "concept")?;
        }

        let mut pairs: HashSet<(&str, &str)> = HashSet::new();
        for r in &relations {
            check_token(&r.role, "role")?;
            if !instances.contains_key(&r.source) {
                return Err(GraphError::UnknownNode(r.source.clone()));
            }
            if !instances.contains_key(&r.target) {
                return Err(GraphError::UnknownNode(r.target.clone()));
            }
            if r.source == r.target {
                return Err(GraphError::SelfEdge(r.source.clone(), r.role.clone()));
            }
            if !pairs.insert((r.source.as_str(), r.target.as_str())) {
                return Err(GraphError::RelationMultiEdge(r.source.clone(), r.target.clone()));
            }
        }

        let mut attr_triples: HashSet<(&str, &str, &Constant)> = HashSet::new();
        for a in &attributes {
            check_token(&a.label, "attribute label")?;
            check_constant(&a.value)?;
            if !instances.contains_key(&a.source) {
                return Err(GraphError::UnknownNode(a.source.clone()));
            }
            if !attr_triples.insert((a.source.as_str(), a.label.as_str(), &a.value)) {
                return Err(GraphError::DuplicateAttribute(
                    a.source.clone(),
                    a.label.clone(),
                    a.value.penman(),
                ));
            }
        }

        let g = AmrGraph { root, instances, relations, attributes };
        if g.has_relation_cycle() {
            return Err(GraphError::Cyclic);
        }
        if !g.is_weakly_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    pub fn instances(&self) -> &BTreeMap<NodeId, String> {
        &self.instances
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn concept(&self, node: &str) -> Option<&str> {
        self.instances.get(node).map(String::as_str)
    }

    /// Graph size: |instances| + |attributes| + |relations|.
    pub fn size(&self) -> usize {
        self.instances.len() + self.attributes.len() + self.relations.len()
    }

    /// Number of edges of either kind.
    pub fn edge_count(&self) -> usize {
        self.relations.len() + self.attributes.len()
    }

    /// Attributes whose source is `node`, in list order.
    pub fn attributes_of<'g>(&'g self, node: &str) -> impl Iterator<Item = &'g Attribute> {
        let node = node.to_owned();
        self.attributes.iter().filter(move |a| a.source == node)
    }

    /// Deterministic Penman serialization; see [`serialize::serialize_penman_with`].
    pub fn to_penman(&self) -> String {
        serialize::serialize_penman_with(self, &PenmanOptions::default())
            .expect("validated graph serializes")
    }

    fn has_relation_cycle(&self) -> bool {
        // Kahn's algorithm over the relation edges.
        let mut indegree: HashMap<&str, usize> =
            self.instances.keys().map(|n| (n.as_str(), 0)).collect();
        let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.relations {
            *indegree.get_mut(r.target.as_str()).expect("validated endpoint") += 1;
            out.entry(r.source.as_str()).or_default().push(r.target.as_str());
        }
        let mut queue: VecDeque<&str> =
            indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut seen = 0usize;
        while let Some(n) = queue.pop_front() {
            seen += 1;
            for t in out.get(n).into_iter().flatten() {
                let d = indegree.get_mut(t).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(t);
                }
            }
        }
        seen != self.instances.len()
    }

    fn is_weakly_connected(&self) -> bool {
        if self.instances.len() <= 1 {
            return true;
        }
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.relations {
            adj.entry(r.source.as_str()).or_default().push(r.target.as_str());
            adj.entry(r.target.as_str()).or_default().push(r.source.as_str());
        }
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack = vec![self.root.as_str()];
        seen.insert(self.root.as_str());
        while let Some(n) = stack.pop() {
            for m in adj.get(n).into_iter().flatten() {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen.len() == self.instances.len()
    }

    /// Structural equality up to variable renaming: true iff some bijection
    /// between the node sets maps root to root and preserves concepts,
    /// relation edges with their roles, and attribute edges exactly.
    pub fn isomorphic(&self, other: &AmrGraph) -> bool {
        iso::isomorphic(self, other)
    }
}

fn check_token(s: &str, what: &'static str) -> Result<(), GraphError> {
    if s.is_empty() {
        return Err(GraphError::BadLabel(s.to_owned(), "empty"));
    }
    if s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/')) {
        return Err(GraphError::BadLabel(s.to_owned(), "contains a delimiter character"));
    }
    let _ = what;
    Ok(())
}

fn check_constant(c: &Constant) -> Result<(), GraphError> {
    match c.kind {
        ConstantKind::String => Ok(()),
        ConstantKind::Symbol => check_token(&c.lexical, "symbol constant"),
        ConstantKind::Number => {
            if parse::is_number_token(&c.lexical) {
                Ok(())
            } else {
                Err(GraphError::BadLabel(c.lexical.clone(), "not a numeric token"))
            }
        }
    }
}

/// Options shared by the Penman reader and writer.
#[derive(Debug, Clone)]
pub struct PenmanOptions {
    /// Flip `-of` roles to their base role with source and target swapped
    /// while parsing, and allow the writer to emit `-of` roles when it
    /// traverses a relation against its direction. `consist-of`,
    /// `prep-out-of`, and `prep-on-behalf-of` are conventional non-inverse
    /// roles and are never flipped.
    pub normalize_inverse: bool,
}

impl Default for PenmanOptions {
    fn default() -> Self {
        PenmanOptions { normalize_inverse: true }
    }
}

/// Roles that end in `-of` without denoting an inverse edge.
pub(crate) const NON_INVERSE_ROLES: [&str; 3] =
    ["consist-of", "prep-out-of", "prep-on-behalf-of"];

pub(crate) fn inverse_base(role: &str) -> Option<&str> {
    if NON_INVERSE_ROLES.contains(&role) {
        return None;
    }
    match role.strip_suffix("-of") {
        Some(base) if !base.is_empty() => Some(base),
        _ => None,
    }
}

mod iso {
    //! Labeled-graph isomorphism with the root pinned, used for
    //! renaming-invariant graph equality. Signature refinement narrows the
    //! candidate classes; a backtracking search settles the rest.

    use super::*;
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    struct Side<'g> {
        nodes: Vec<&'g str>,
        index: HashMap<&'g str, usize>,
        concept: Vec<&'g str>,
        attr_key: Vec<String>,
        out: Vec<Vec<(usize, &'g str)>>,
        inc: Vec<Vec<(usize, &'g str)>>,
        edge: HashMap<(usize, usize), &'g str>,
        sig: Vec<u64>,
    }

    impl<'g> Side<'g> {
        fn build(g: &'g AmrGraph) -> Self {
            let nodes: Vec<&str> = g.instances.keys().map(String::as_str).collect();
            let index: HashMap<&str, usize> =
                nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
            let concept: Vec<&str> = nodes.iter().map(|n| g.concept(n).unwrap()).collect();
            let mut attr_parts: Vec<Vec<String>> = vec![Vec::new(); nodes.len()];
            for a in &g.attributes {
                let i = index[a.source.as_str()];
                attr_parts[i].push(format!("{}\u{1}{}{}", a.label, a.value.kind_tag(), a.value.lexical));
            }
            let attr_key: Vec<String> = attr_parts
                .into_iter()
                .map(|mut v| {
                    v.sort();
                    v.join("\u{2}")
                })
                .collect();
            let mut out = vec![Vec::new(); nodes.len()];
            let mut inc = vec![Vec::new(); nodes.len()];
            let mut edge = HashMap::new();
            for r in &g.relations {
                let s = index[r.source.as_str()];
                let t = index[r.target.as_str()];
                out[s].push((t, r.role.as_str()));
                inc[t].push((s, r.role.as_str()));
                edge.insert((s, t), r.role.as_str());
            }
            let root = index[g.root.as_str()];
            let mut side = Side { nodes, index, concept, attr_key, out, inc, edge, sig: Vec::new() };
            side.sig = side.refine(root);
            side
        }

        fn refine(&self, root: usize) -> Vec<u64> {
            let n = self.nodes.len();
            let mut sig: Vec<u64> = (0..n)
                .map(|i| {
                    let mut h = DefaultHasher::new();
                    self.concept[i].hash(&mut h);
                    self.attr_key[i].hash(&mut h);
                    (i == root).hash(&mut h);
                    h.finish()
                })
                .collect();
            for _ in 0..3 {
                let mut next = Vec::with_capacity(n);
                for i in 0..n {
                    let mut outs: Vec<(u64, &str)> =
                        self.out[i].iter().map(|(t, r)| (sig[*t], *r)).collect();
                    outs.sort();
                    let mut ins: Vec<(u64, &str)> =
                        self.inc[i].iter().map(|(s, r)| (sig[*s], *r)).collect();
                    ins.sort();
                    let mut h = DefaultHasher::new();
                    sig[i].hash(&mut h);
                    outs.hash(&mut h);
                    ins.hash(&mut h);
                    next.push(h.finish());
                }
                if next == sig {
                    break;
                }
                sig = next;
            }
            sig
        }
    }

    pub(super) fn isomorphic(a: &AmrGraph, b: &AmrGraph) -> bool {
        if a.instances.len() != b.instances.len()
            || a.relations.len() != b.relations.len()
            || a.attributes.len() != b.attributes.len()
        {
            return false;
        }
        let sa = Side::build(a);
        let sb = Side::build(b);

        let mut count_a: HashMap<u64, usize> = HashMap::new();
        for s in &sa.sig {
            *count_a.entry(*s).or_default() += 1;
        }
        let mut count_b: HashMap<u64, usize> = HashMap::new();
        for s in &sb.sig {
            *count_b.entry(*s).or_default() += 1;
        }
        if count_a != count_b {
            return false;
        }

        // Match nodes in order of rising candidate-class size so the search
        // branches on the most constrained nodes first.
        let mut order: Vec<usize> = (0..sa.nodes.len()).collect();
        order.sort_by_key(|i| (count_a[&sa.sig[*i]], *i));
        let root_a = sa.index[a.root.as_str()];
        let root_b = sb.index[b.root.as_str()];
        if let Some(pos) = order.iter().position(|i| *i == root_a) {
            order.remove(pos);
            order.insert(0, root_a);
        }

        let mut mapping: Vec<Option<usize>> = vec![None; sa.nodes.len()];
        let mut used: Vec<bool> = vec![false; sb.nodes.len()];
        backtrack(&sa, &sb, &order, 0, root_a, root_b, &mut mapping, &mut used)
    }

    #[allow(clippy::too_many_arguments)]
    fn backtrack(
        sa: &Side,
        sb: &Side,
        order: &[usize],
        depth: usize,
        root_a: usize,
        root_b: usize,
        mapping: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        for v in 0..sb.nodes.len() {
            if used[v]
                || sb.sig[v] != sa.sig[u]
                || sb.concept[v] != sa.concept[u]
                || sb.attr_key[v] != sa.attr_key[u]
            {
                continue;
            }
            if (u == root_a) != (v == root_b) {
                continue;
            }
            if !consistent(sa, sb, u, v, mapping) {
                continue;
            }
            mapping[u] = Some(v);
            used[v] = true;
            if backtrack(sa, sb, order, depth + 1, root_a, root_b, mapping, used) {
                return true;
            }
            mapping[u] = None;
            used[v] = false;
        }
        false
    }

    fn consistent(sa: &Side, sb: &Side, u: usize, v: usize, mapping: &[Option<usize>]) -> bool {
        if sa.out[u].len() != sb.out[v].len() || sa.inc[u].len() != sb.inc[v].len() {
            return false;
        }
        for (t, role) in &sa.out[u] {
            if let Some(tv) = mapping[*t] {
                if sb.edge.get(&(v, tv)) != Some(role) {
                    return false;
                }
            }
        }
        for (s, role) in &sa.inc[u] {
            if let Some(sv) = mapping[*s] {
                if sb.edge.get(&(sv, v)) != Some(role) {
                    return false;
                }
            }
        }
        true
    }
}
