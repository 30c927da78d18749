//! Random diagrams and queries shared by the integration suites.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ztransport::cli::{parse_diagram, QueryFile};
use ztransport::graph::{NodeSet, Query, SelectionDiagram, SemiMarkovianGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random semi-Markovian graph on 2..=`max_nodes` nodes with at most
/// `max_bidirected` bidirected edges.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize, max_bidirected: usize) -> SemiMarkovianGraph {
    let n = rng.gen_range(2..=max_nodes);
    let mut names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    names.shuffle(rng);
    let order = names.clone();
    names.shuffle(rng);
    let density = rng.gen_range(0.2..0.6);
    let mut directed = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                directed.push((order[i].clone(), order[j].clone()));
            }
        }
    }
    let mut pairs: Vec<(String, String)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (names[i].clone(), names[j].clone()))
        .collect();
    pairs.shuffle(rng);
    let k = rng.gen_range(0..=max_bidirected.min(pairs.len()));
    pairs.truncate(k);
    SemiMarkovianGraph::new(names, directed, pairs).expect("generated graph is valid")
}

pub fn random_subset(rng: &mut ChaCha8Rng, from: &[String], p: f64) -> NodeSet {
    from.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random diagram and query: nonempty disjoint X and Y, random Z and S.
pub fn random_case(rng: &mut ChaCha8Rng, max_nodes: usize, max_bidirected: usize) -> QueryFile {
    let g = random_graph(rng, max_nodes, max_bidirected);
    let mut nodes = g.nodes().to_vec();
    nodes.shuffle(rng);
    let ny = rng.gen_range(1..nodes.len());
    let nx = rng.gen_range(1..=(nodes.len() - ny));
    let y: NodeSet = nodes[..ny].iter().cloned().collect();
    let x: NodeSet = nodes[ny..ny + nx].iter().cloned().collect();
    let z = random_subset(rng, g.nodes(), 0.4);
    let s = random_subset(rng, g.nodes(), 0.2);
    let query = Query::new(x, y, z, &g).expect("valid query");
    let diagram = SelectionDiagram::new(g, s).expect("valid diagram");
    QueryFile { diagram, query, options: Default::default() }
}

pub fn ns(v: &[&str]) -> NodeSet {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn load(name: &str) -> QueryFile {
    let path = format!("{}/diagrams/{name}.zt", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_diagram(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}
