//! Tilt-web exploration with quivers deduplicated up to isomorphism.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cy3quiver::{cross_check_tilt, helix_quiver, Quiver, QuiverError};
use crate::excol::Side;
use crate::helix::Helix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplorerError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("tilt at vertex {vertex} of {helix} disagrees with matrix mutation")]
    CrossCheck { vertex: usize, helix: String },
    #[error("tilt at vertex {vertex} of {helix} failed: {source}")]
    Tilt {
        vertex: usize,
        helix: String,
        source: QuiverError,
    },
    #[error("quiver has {0} vertices, at most 11 are supported")]
    TooLarge(usize),
}

/// Isomorphism-invariant byte string of a loop-free quiver.
///
/// Vertices are split by iterated colour refinement on arrow counts; where
/// cells stay non-trivial each vertex of the first such cell is individualized
/// in turn. The key is the lexicographically least adjacency encoding over all
/// leaves, so it does not depend on the input vertex order.
pub fn canonical_quiver_key<T: Scalar>(q: &Quiver<T>) -> Vec<u8> {
    let n = q.n();
    let adj: Vec<Vec<u64>> = q
        .arrows
        .iter()
        .map(|row| row.iter().map(|x| x.to_wide().clamp(0, u64::MAX as i128) as u64).collect())
        .collect();
    let start = refine(&adj, vec![0; n]);
    let mut best: Option<Vec<u8>> = None;
    search(&adj, start, &mut best);
    best.unwrap_or_else(|| encode(&adj, &[]))
}

/// Own colour, then sorted (neighbour colour, arrows out, arrows in).
type Signature = (usize, Vec<(usize, u64, u64)>);

/// Refines a colouring until stable. Colours are ranks of sorted signatures,
/// so the result only depends on the isomorphism class of (adj, colours).
fn refine(adj: &[Vec<u64>], mut colours: Vec<usize>) -> Vec<usize> {
    let n = adj.len();
    let mut classes = count_classes(&colours);
    loop {
        let sigs: Vec<Signature> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, u64, u64)> = (0..n)
                    .filter(|&w| w != v)
                    .map(|w| (colours[w], adj[v][w], adj[w][v]))
                    .collect();
                nb.sort_unstable();
                (colours[v], nb)
            })
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        colours = sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect();
        let next = sorted.len();
        if next == classes {
            return colours;
        }
        classes = next;
    }
}

fn count_classes(colours: &[usize]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(adj: &[Vec<u64>], colours: Vec<usize>, best: &mut Option<Vec<u8>>) {
    let n = adj.len();
    let mut sizes = vec![0usize; n];
    for &c in &colours {
        sizes[c] += 1;
    }
    let Some(cell) = (0..n).find(|&c| sizes[c] > 1) else {
        let key = encode(adj, &colours);
        if best.as_ref().is_none_or(|b| key < *b) {
            *best = Some(key);
        }
        return;
    };
    let members: Vec<usize> = (0..n).filter(|&v| colours[v] == cell).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &members {
        // Twins (same arrows to everything else, symmetric between them) give the same leaves.
        if tried.iter().any(|&w| twins(adj, v, w)) {
            continue;
        }
        tried.push(v);
        let split: Vec<usize> = (0..n)
            .map(|u| {
                if u == v {
                    2 * colours[u]
                } else if colours[u] == cell {
                    2 * colours[u] + 1
                } else {
                    2 * colours[u] + (colours[u] > cell) as usize
                }
            })
            .collect();
        search(adj, refine(adj, split), best);
    }
}

fn twins(adj: &[Vec<u64>], v: usize, w: usize) -> bool {
    adj[v][w] == adj[w][v]
        && (0..adj.len())
            .filter(|&x| x != v && x != w)
            .all(|x| adj[v][x] == adj[w][x] && adj[x][v] == adj[x][w])
}

/// `n` followed by the relabelled adjacency matrix, big-endian u64s.
fn encode(adj: &[Vec<u64>], position: &[usize]) -> Vec<u8> {
    let n = adj.len();
    let mut order = vec![0usize; n];
    for v in 0..n {
        order[position.get(v).copied().unwrap_or(v)] = v;
    }
    let mut out = Vec::with_capacity(8 * (n * n + 1));
    out.extend_from_slice(&(n as u64).to_be_bytes());
    for &i in &order {
        for &j in &order {
            out.extend_from_slice(&adj[i][j].to_be_bytes());
        }
    }
    out
}

pub fn key_hex(key: &[u8]) -> String {
    let mut s = String::with_capacity(2 * key.len());
    for b in key {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WebNode<T: Scalar> {
    pub id: usize,
    /// Hex form of [`canonical_quiver_key`].
    pub key: String,
    pub depth: usize,
    pub helix: Helix<T>,
    pub quiver: Quiver<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebEdge {
    pub from: usize,
    pub vertex: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WebGraph<T: Scalar> {
    pub depth: usize,
    pub nodes: Vec<WebNode<T>>,
    pub edges: Vec<WebEdge>,
}

impl<T: Scalar> WebGraph<T> {
    pub fn node_by_key(&self, key: &str) -> Option<&WebNode<T>> {
        self.nodes.iter().find(|n| n.key == key)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for node in &self.nodes {
            let _ = writeln!(
                out,
                "  {} [label=\"{}: {}\"];",
                node.id,
                node.id,
                node.helix.thread().labels().join(", ")
            );
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -> {} [label={}];", e.from, e.to, e.vertex);
        }
        out.push_str("}\n");
        out
    }
}

struct Expansion<T: Scalar> {
    vertex: usize,
    helix: Helix<T>,
    quiver: Quiver<T>,
    key: Vec<u8>,
}

fn expand<T: Scalar>(h: &Helix<T>, vertex: usize) -> Result<Expansion<T>, ExplorerError> {
    let wrap = |source: QuiverError| ExplorerError::Tilt {
        vertex,
        helix: h.thread().to_string(),
        source,
    };
    let report = cross_check_tilt(h, vertex, Side::Left).map_err(wrap)?;
    if !report.matches {
        return Err(ExplorerError::CrossCheck { vertex, helix: h.thread().to_string() });
    }
    let helix = report.helix.expect("cross check carries the tilted helix");
    let quiver = helix_quiver(&helix).map_err(wrap)?;
    let key = canonical_quiver_key(&quiver);
    Ok(Expansion { vertex, helix, quiver, key })
}

/// Breadth-first closure of vertex tilts from `seed`, `depth` levels deep.
///
/// Every edge is cross-checked against matrix mutation. Frontier expansion
/// runs in parallel; insertion happens in frontier order so the output is
/// deterministic.
pub fn web_bfs<T: Scalar>(seed: &Helix<T>, depth: usize) -> Result<WebGraph<T>, ExplorerError> {
    let quiver = helix_quiver(seed)?;
    if quiver.n() > 11 {
        return Err(ExplorerError::TooLarge(quiver.n()));
    }
    let key = canonical_quiver_key(&quiver);
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    index.insert(key.clone(), 0);
    let mut nodes = vec![WebNode { id: 0, key: key_hex(&key), depth: 0, helix: seed.clone(), quiver }];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let tasks: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&id| (0..nodes[id].quiver.n()).map(move |v| (id, v)))
            .collect();
        let results: Vec<(usize, Result<Expansion<T>, ExplorerError>)> = tasks
            .par_iter()
            .map(|&(id, v)| (id, expand(&nodes[id].helix, v)))
            .collect();
        let mut next = Vec::new();
        for (from, result) in results {
            let e = result?;
            let to = match index.get(&e.key) {
                Some(&to) => to,
                None => {
                    let id = nodes.len();
                    index.insert(e.key.clone(), id);
                    nodes.push(WebNode {
                        id,
                        key: key_hex(&e.key),
                        depth: level + 1,
                        helix: e.helix,
                        quiver: e.quiver,
                    });
                    next.push(id);
                    id
                }
            };
            edges.push(WebEdge { from, vertex: e.vertex, to });
        }
        frontier = next;
    }
    Ok(WebGraph { depth, nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::seed_helix;

    fn quiver(arrows: Vec<Vec<i64>>) -> Quiver<i64> {
        Quiver { vertices: (0..arrows.len()).map(|i| i.to_string()).collect(), arrows }
    }

    fn permute(q: &Quiver<i64>, p: &[usize]) -> Quiver<i64> {
        let n = q.n();
        let mut a = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[p[i]][p[j]] = q.arrows[i][j];
            }
        }
        quiver(a)
    }

    #[test]
    fn key_is_permutation_invariant() {
        let q = quiver(vec![vec![0, 2, 2, 0], vec![0, 0, 0, 2], vec![0, 0, 0, 2], vec![4, 0, 0, 0]]);
        let k = canonical_quiver_key(&q);
        for p in [[1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1], [1, 2, 3, 0]] {
            assert_eq!(canonical_quiver_key(&permute(&q, &p)), k);
        }
        let cycle = quiver(vec![vec![0, 0, 2, 0], vec![2, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 2, 0, 0]]);
        assert_ne!(canonical_quiver_key(&cycle), k);
    }

    #[test]
    fn key_distinguishes_regular_graphs() {
        // Two 2-regular undirected shapes on six vertices: a hexagon and two triangles.
        let mut hex = vec![vec![0i64; 6]; 6];
        let mut tri = vec![vec![0i64; 6]; 6];
        for i in 0..6 {
            hex[i][(i + 1) % 6] = 1;
            hex[(i + 1) % 6][i] = 1;
        }
        for base in [0, 3] {
            for i in 0..3 {
                tri[base + i][base + (i + 1) % 3] = 1;
                tri[base + (i + 1) % 3][base + i] = 1;
            }
        }
        assert_ne!(canonical_quiver_key(&quiver(hex)), canonical_quiver_key(&quiver(tri)));
    }

    #[test]
    fn web_depths() {
        let h = seed_helix::<i64>("quadric").unwrap().unwrap();
        assert_eq!(web_bfs(&h, 0).unwrap().nodes.len(), 1);
        let web = web_bfs(&h, 1).unwrap();
        assert!(web.nodes.len() >= 2);
        assert_eq!(web.edges.len(), 4);
        assert!(web.to_dot().contains("0 -> "));
    }
}
