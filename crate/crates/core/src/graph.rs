//! Semi-Markovian graphs: observables with directed edges and bidirected
//! (latent common cause) edges, plus the graph primitives the identification
//! algorithms consume.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// A set of node names. Ordering inside the set is lexicographic; the
/// graph's declaration order is used wherever order matters.
pub type NodeSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("invalid node name `{0}`")]
    InvalidName(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("directed cycle through `{0}`")]
    Cycle(String),
    #[error("node sets overlap on `{0}`")]
    Overlap(String),
}

/// Returns true if `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Builds a [`NodeSet`] from anything yielding string-likes.
pub fn node_set<I, S>(items: I) -> NodeSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// An acyclic mixed graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemiMarkovianGraph {
    nodes: Vec<String>,
    directed: BTreeSet<(String, String)>,
    bidirected: BTreeSet<(String, String)>,
}

impl SemiMarkovianGraph {
    /// Builds and validates a graph. `directed` pairs are (parent, child);
    /// `bidirected` pairs are unordered.
    pub fn new<N, D, B>(nodes: N, directed: D, bidirected: B) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        D: IntoIterator<Item = (String, String)>,
        B: IntoIterator<Item = (String, String)>,
    {
        let mut g = SemiMarkovianGraph::default();
        let mut seen = BTreeSet::new();
        for n in nodes {
            let n = n.into();
            if !is_valid_name(&n) {
                return Err(GraphError::InvalidName(n));
            }
            if !seen.insert(n.clone()) {
                return Err(GraphError::DuplicateNode(n));
            }
            g.nodes.push(n);
        }
        for (a, b) in directed {
            g.check_endpoints(&a, &b)?;
            if !g.directed.insert((a.clone(), b.clone())) {
                return Err(GraphError::DuplicateEdge(format!("{a} -> {b}")));
            }
        }
        for (a, b) in bidirected {
            g.check_endpoints(&a, &b)?;
            if !g.bidirected.insert(unordered(&a, &b)) {
                return Err(GraphError::DuplicateEdge(format!("{a} <-> {b}")));
            }
        }
        g.topological_order()?;
        Ok(g)
    }

    /// Convenience constructor from `&str` pairs.
    pub fn from_edges(
        nodes: &[&str],
        directed: &[(&str, &str)],
        bidirected: &[(&str, &str)],
    ) -> Result<Self, GraphError> {
        Self::new(
            nodes.iter().copied(),
            directed.iter().map(|(a, b)| (a.to_string(), b.to_string())),
            bidirected.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
    }

    fn check_endpoints(&self, a: &str, b: &str) -> Result<(), GraphError> {
        for n in [a, b] {
            if !self.contains(n) {
                return Err(GraphError::UnknownNode(n.to_string()));
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        Ok(())
    }

    /// Nodes in declaration order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_set(&self) -> NodeSet {
        self.nodes.iter().cloned().collect()
    }

    pub fn contains(&self, n: &str) -> bool {
        self.nodes.iter().any(|m| m == n)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.directed.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn bidirected_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bidirected.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn has_directed(&self, from: &str, to: &str) -> bool {
        self.directed.contains(&(from.to_string(), to.to_string()))
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        self.bidirected.contains(&unordered(a, b))
    }

    /// Observable parents of `n`, in declaration order.
    pub fn parents(&self, n: &str) -> Vec<String> {
        self.nodes.iter().filter(|p| self.directed.contains(&((*p).clone(), n.to_string()))).cloned().collect()
    }

    pub fn children(&self, n: &str) -> Vec<String> {
        self.nodes.iter().filter(|c| self.directed.contains(&(n.to_string(), (*c).clone()))).cloned().collect()
    }

    /// Nodes sharing a bidirected edge with `n`.
    pub fn spouses(&self, n: &str) -> Vec<String> {
        self.nodes.iter().filter(|m| self.has_bidirected(n, m)).cloned().collect()
    }

    fn check_subset(&self, w: &NodeSet) -> Result<(), GraphError> {
        match w.iter().find(|n| !self.contains(n)) {
            Some(n) => Err(GraphError::UnknownNode(n.clone())),
            None => Ok(()),
        }
    }

    /// `An(W)`, inclusive of `W`. Bidirected edges contribute no ancestry.
    pub fn ancestors(&self, w: &NodeSet) -> Result<NodeSet, GraphError> {
        self.check_subset(w)?;
        let mut out = w.clone();
        let mut queue: VecDeque<String> = w.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            for (p, c) in &self.directed {
                if c == &n && out.insert(p.clone()) {
                    queue.push_back(p.clone());
                }
            }
        }
        Ok(out)
    }

    /// `G[W]`: the nodes in `w` and every edge between them. Keeps the
    /// declaration order of the parent graph.
    pub fn induced_subgraph(&self, w: &NodeSet) -> Result<Self, GraphError> {
        self.check_subset(w)?;
        Ok(SemiMarkovianGraph {
            nodes: self.nodes.iter().filter(|n| w.contains(*n)).cloned().collect(),
            directed: self.directed.iter().filter(|(a, b)| w.contains(a) && w.contains(b)).cloned().collect(),
            bidirected: self.bidirected.iter().filter(|(a, b)| w.contains(a) && w.contains(b)).cloned().collect(),
        })
    }

    /// `G` with the nodes in `w` removed (`G \ W`).
    pub fn without(&self, w: &NodeSet) -> Self {
        let keep: NodeSet = self.nodes.iter().filter(|n| !w.contains(*n)).cloned().collect();
        self.induced_subgraph(&keep).expect("subset of own nodes")
    }

    /// Edge subgraph with incoming arrows into `cut_incoming` removed
    /// (bidirected edges touching those nodes included) and outgoing arrows
    /// from `cut_outgoing` removed.
    pub fn mutilate(&self, cut_incoming: &NodeSet, cut_outgoing: &NodeSet) -> Result<Self, GraphError> {
        self.check_subset(cut_incoming)?;
        self.check_subset(cut_outgoing)?;
        Ok(SemiMarkovianGraph {
            nodes: self.nodes.clone(),
            directed: self
                .directed
                .iter()
                .filter(|(a, b)| !cut_incoming.contains(b) && !cut_outgoing.contains(a))
                .cloned()
                .collect(),
            bidirected: self
                .bidirected
                .iter()
                .filter(|(a, b)| !cut_incoming.contains(a) && !cut_incoming.contains(b))
                .cloned()
                .collect(),
        })
    }

    /// Maximal bidirected-connected components, ordered by the declaration
    /// index of each component's earliest member.
    pub fn c_components(&self) -> Vec<CComponent> {
        let mut assigned: BTreeMap<&str, usize> = BTreeMap::new();
        let mut out = Vec::new();
        for start in &self.nodes {
            if assigned.contains_key(start.as_str()) {
                continue;
            }
            let idx = out.len();
            let mut members = NodeSet::new();
            let mut stack = vec![start.as_str()];
            assigned.insert(start, idx);
            while let Some(n) = stack.pop() {
                members.insert(n.to_string());
                for (a, b) in &self.bidirected {
                    let other = if a == n {
                        b.as_str()
                    } else if b == n {
                        a.as_str()
                    } else {
                        continue;
                    };
                    if !assigned.contains_key(other) {
                        assigned.insert(other, idx);
                        stack.push(other);
                    }
                }
            }
            out.push(CComponent { members });
        }
        out
    }

    /// Topological order of the directed part. Among ready nodes the one
    /// declared first is emitted first.
    pub fn topological_order(&self) -> Result<Vec<String>, GraphError> {
        let mut indeg: Vec<usize> =
            self.nodes.iter().map(|n| self.directed.iter().filter(|(_, c)| c == n).count()).collect();
        let mut done = vec![false; self.nodes.len()];
        let mut order = Vec::with_capacity(self.nodes.len());
        while order.len() < self.nodes.len() {
            let Some(i) = (0..self.nodes.len()).find(|&i| !done[i] && indeg[i] == 0) else {
                let stuck = (0..self.nodes.len()).find(|&i| !done[i]).unwrap();
                return Err(GraphError::Cycle(self.nodes[stuck].clone()));
            };
            done[i] = true;
            let n = &self.nodes[i];
            for (j, m) in self.nodes.iter().enumerate() {
                if self.directed.contains(&(n.clone(), m.clone())) {
                    indeg[j] -= 1;
                }
            }
            order.push(n.clone());
        }
        Ok(order)
    }

    /// m-separation of `a` and `b` given `c`. A bidirected edge `u <-> v`
    /// behaves as `u <- L -> v` for a fresh latent `L`.
    pub fn m_separated(&self, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<bool, GraphError> {
        for s in [a, b, c] {
            self.check_subset(s)?;
        }
        for (s, t) in [(a, b), (a, c), (b, c)] {
            if let Some(n) = s.intersection(t).next() {
                return Err(GraphError::Overlap(n.clone()));
            }
        }
        // Reachability over (node, arrived-via-edge-into-node) states; the
        // "Bayes ball" formulation with latents folded into bidirected edges.
        let an_c = self.ancestors(c)?;
        // state: (node, into) where `into` means the edge we arrived on has
        // an arrowhead at `node`.
        let mut visited: BTreeSet<(String, bool)> = BTreeSet::new();
        let mut queue: VecDeque<(String, bool)> = VecDeque::new();
        for n in a {
            // starting at `a` behaves like arriving without an arrowhead
            queue.push_back((n.clone(), false));
        }
        while let Some((n, into)) = queue.pop_front() {
            if !visited.insert((n.clone(), into)) {
                continue;
            }
            if b.contains(&n) {
                return Ok(false);
            }
            let observed = c.contains(&n);
            // Leaving `n` along an edge. If we arrived with an arrowhead,
            // `n` is a collider on any continuation that also has an
            // arrowhead at `n`.
            // Tail-out moves: n -> child.
            let can_pass_noncollider = !observed;
            for child in self.children(&n) {
                // next edge has tail at n: n is a non-collider
                if can_pass_noncollider {
                    queue.push_back((child, true));
                }
            }
            for parent in self.parents(&n) {
                // next edge has arrowhead at n: collider iff we arrived with
                // an arrowhead
                let ok = if into { an_c.contains(&n) } else { can_pass_noncollider };
                if ok {
                    queue.push_back((parent, false));
                }
            }
            for sp in self.spouses(&n) {
                let ok = if into { an_c.contains(&n) } else { can_pass_noncollider };
                if ok {
                    queue.push_back((sp, true));
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for SemiMarkovianGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "node {n}")?;
        }
        for (a, b) in &self.directed {
            writeln!(f, "{a} -> {b}")?;
        }
        for (a, b) in &self.bidirected {
            writeln!(f, "{a} <-> {b}")?;
        }
        Ok(())
    }
}

/// A maximal set of nodes connected by bidirected edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CComponent {
    pub members: NodeSet,
}

/// A causal diagram plus the nodes that selection variables point to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionDiagram {
    graph: SemiMarkovianGraph,
    s_targets: NodeSet,
}

impl SelectionDiagram {
    pub fn new(graph: SemiMarkovianGraph, s_targets: NodeSet) -> Result<Self, GraphError> {
        graph.check_subset(&s_targets)?;
        Ok(SelectionDiagram { graph, s_targets })
    }

    pub fn graph(&self) -> &SemiMarkovianGraph {
        &self.graph
    }

    pub fn s_targets(&self) -> &NodeSet {
        &self.s_targets
    }
}

/// An effect query: intervene on `x`, observe `y`, with experiments
/// available on any subset of `z`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Query {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
}

impl Query {
    /// Builds a query and checks it against `graph`: `y` nonempty, `x` and
    /// `y` disjoint, every name declared.
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet, graph: &SemiMarkovianGraph) -> Result<Self, QueryError> {
        for s in [&x, &y, &z] {
            graph.check_subset(s).map_err(QueryError::Graph)?;
        }
        if y.is_empty() {
            return Err(QueryError::EmptyOutcome);
        }
        if let Some(n) = x.intersection(&y).next() {
            return Err(QueryError::Overlap(n.clone()));
        }
        Ok(Query { x, y, z })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("outcome set Y is empty")]
    EmptyOutcome,
    #[error("`{0}` is in both X and Y; treatment and outcome must be disjoint")]
    Overlap(String),
    #[error(transparent)]
    Graph(GraphError),
}
