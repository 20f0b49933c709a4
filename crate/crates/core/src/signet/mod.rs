//! Signed correlation networks and decorated implication graphs.
//!
//! A solid edge asserts perfect correlation of two binary observables, a
//! dashed one perfect anti-correlation. The network admits a global 0/1
//! valuation iff every cycle carries an even number of dashed edges; a
//! frustrated network is one where it does not.

mod directed;

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use directed::{
    check_implication_chain, Arc, ChainOutcome, ChainStep, Conflict, DirectedImplicationGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `+`: equal outcomes.
    Solid,
    /// `−`: opposite outcomes.
    Dashed,
}

impl Sign {
    pub fn parity(self) -> u8 {
        match self {
            Sign::Solid => 0,
            Sign::Dashed => 1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Solid => Sign::Dashed,
            Sign::Dashed => Sign::Solid,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Solid => "+",
            Sign::Dashed => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "solid" => Ok(Sign::Solid),
            "-" | "dashed" => Ok(Sign::Dashed),
            _ => Err(Error::Parse(format!("unknown edge sign {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    nodes: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frustration {
    pub frustrated: bool,
    /// One odd cycle (0-based nodes, closing edge implied), rotated to start
    /// at its smallest node and oriented towards the smaller neighbour.
    pub witness: Option<Vec<usize>>,
}

impl SignedGraph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize, Sign)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v, _) in &edges {
            if u >= nodes || v >= nodes {
                return Err(Error::arg(format!("edge ({u}, {v}) outside {nodes} nodes")));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::arg(format!("parallel edge between {u} and {v}")));
            }
        }
        let edges = edges
            .into_iter()
            .map(|(u, v, sign)| Edge { u, v, sign })
            .collect();
        Ok(SignedGraph { nodes, edges })
    }

    /// n-cycle with edge e joining e and e+1 (mod n); bit e of `dashed` marks
    /// edge e as dashed.
    pub fn cycle(n: usize, dashed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::arg("a simple cycle needs at least 3 nodes"));
        }
        let sign = |e: usize| {
            if (dashed >> e) & 1 == 1 {
                Sign::Dashed
            } else {
                Sign::Solid
            }
        };
        SignedGraph::new(n, (0..n).map(|e| (e, (e + 1) % n, sign(e))).collect())
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn dashed_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign == Sign::Dashed).count()
    }

    /// Parity union-find over the edges; the first edge that closes a cycle
    /// with the wrong parity yields the witness, read off the spanning forest.
    pub fn is_frustrated(&self) -> Frustration {
        let mut dsu = ParityDsu::new(self.nodes);
        let mut tree: Vec<Vec<usize>> = vec![Vec::new(); self.nodes];
        for e in &self.edges {
            match dsu.union(e.u, e.v, e.sign.parity()) {
                Link::Merged => {
                    tree[e.u].push(e.v);
                    tree[e.v].push(e.u);
                }
                Link::Consistent => {}
                Link::Conflict => {
                    let path = tree_path(&tree, e.u, e.v);
                    return Frustration {
                        frustrated: true,
                        witness: Some(canonical_cycle(path)),
                    };
                }
            }
        }
        Frustration {
            frustrated: false,
            witness: None,
        }
    }

    /// Relabel outcomes at every node in `flip`: edges with exactly one
    /// endpoint flipped change sign.
    pub fn gauge_transform(&self, flip: &[usize]) -> Result<SignedGraph> {
        if let Some(&bad) = flip.iter().find(|&&x| x >= self.nodes) {
            return Err(Error::arg(format!(
                "flip node {bad} outside {} nodes",
                self.nodes
            )));
        }
        let mut mask = vec![false; self.nodes];
        for &x in flip {
            mask[x] = true;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                sign: if mask[e.u] != mask[e.v] {
                    e.sign.flipped()
                } else {
                    e.sign
                },
                ..*e
            })
            .collect();
        Ok(SignedGraph {
            nodes: self.nodes,
            edges,
        })
    }

    /// A 0/1 valuation satisfying every edge, if one exists.
    pub fn valuation(&self) -> Option<Vec<u8>> {
        let mut dsu = ParityDsu::new(self.nodes);
        for e in &self.edges {
            if dsu.union(e.u, e.v, e.sign.parity()) == Link::Conflict {
                return None;
            }
        }
        Some((0..self.nodes).map(|x| dsu.find(x).1).collect())
    }

    /// `{"nodes": n, "edges": [[u, v, "+"], …]}` with 1-based node labels.
    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!([e.u + 1, e.v + 1, e.sign.symbol()]))
            .collect();
        json!({ "nodes": self.nodes, "edges": edges })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let nodes = parse_nodes(doc)?;
        let raw = doc["edges"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing array \"edges\"".into()))?;
        let mut edges = Vec::with_capacity(raw.len());
        for e in raw {
            let parts = e
                .as_array()
                .filter(|p| p.len() == 3)
                .ok_or_else(|| Error::Parse(format!("edge {e} must be [u, v, sign]")))?;
            let sign = parts[2]
                .as_str()
                .ok_or_else(|| Error::Parse("edge sign must be a string".into()))?;
            edges.push((
                parse_label(&parts[0])?,
                parse_label(&parts[1])?,
                Sign::parse(sign)?,
            ));
        }
        SignedGraph::new(nodes, edges)
    }
}

pub(crate) fn parse_nodes(doc: &Value) -> Result<usize> {
    doc["nodes"]
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse("missing integer field \"nodes\"".into()))
}

pub(crate) fn parse_label(v: &Value) -> Result<usize> {
    v.as_u64()
        .filter(|&x| x >= 1)
        .map(|x| x as usize - 1)
        .ok_or_else(|| Error::Parse(format!("node label {v} must be a 1-based integer")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Link {
    Merged,
    Consistent,
    Conflict,
}

/// Union-find where each node stores its parity relative to its parent.
struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<u8>,
    rank: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu {
            parent: (0..n).collect(),
            parity: vec![0; n],
            rank: vec![0; n],
        }
    }

    /// (root, parity of x relative to root)
    fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, pp) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= pp;
        (root, self.parity[x])
    }

    fn union(&mut self, a: usize, b: usize, rel: u8) -> Link {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == rel {
                Link::Consistent
            } else {
                Link::Conflict
            };
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        self.parity[lo] = pa ^ pb ^ rel;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        Link::Merged
    }
}

fn tree_path(tree: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; tree.len()];
    let mut queue = std::collections::VecDeque::from([from]);
    prev[from] = from;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in &tree[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    let mut x = to;
    while x != from {
        x = prev[x];
        path.push(x);
    }
    path.reverse();
    path
}

fn canonical_cycle(mut cyc: Vec<usize>) -> Vec<usize> {
    let k = cyc.len();
    let start = (0..k).min_by_key(|&i| cyc[i]).unwrap();
    cyc.rotate_left(start);
    if k > 2 && cyc[k - 1] < cyc[1] {
        cyc[1..].reverse();
    }
    cyc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCensus {
    pub n: usize,
    pub frustrated_patterns: usize,
    pub unfrustrated_patterns: usize,
    pub frustrated_classes: usize,
    pub unfrustrated_classes: usize,
    /// All-dashed for odd n, a single dashed edge for even n.
    pub representative: SignedGraph,
}

/// Classify all 2^n sign patterns of the n-cycle into gauge classes.
///
/// Flipping node i toggles edges i−1 and i, so classes are cosets of the
/// span of those masks; they are merged with a plain union-find.
pub fn enumerate_frustrated_cycles(n: usize) -> Result<CycleCensus> {
    if !(3..=12).contains(&n) {
        return Err(Error::arg(format!(
            "cycle census supports 3 ≤ n ≤ 12, got {n}"
        )));
    }
    let total = 1usize << n;
    let mut parent: Vec<usize> = (0..total).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in 0..total {
        for i in 0..n {
            let mask = (1 << i) | (1 << ((i + n - 1) % n));
            let (a, b) = (root(&mut parent, p), root(&mut parent, p ^ mask));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut census = CycleCensus {
        n,
        frustrated_patterns: 0,
        unfrustrated_patterns: 0,
        frustrated_classes: 0,
        unfrustrated_classes: 0,
        representative: SignedGraph::cycle(n, if n % 2 == 1 { (1 << n) - 1 } else { 1 })?,
    };
    let mut class_kind: std::collections::BTreeMap<usize, bool> = Default::default();
    for p in 0..total {
        let frustrated = SignedGraph::cycle(n, p as u64)?.is_frustrated().frustrated;
        if frustrated != (p.count_ones() % 2 == 1) {
            return Err(Error::verify(format!(
                "pattern {p:b}: frustration disagrees with parity"
            )));
        }
        if frustrated {
            census.frustrated_patterns += 1;
        } else {
            census.unfrustrated_patterns += 1;
        }
        let r = root(&mut parent, p);
        match class_kind.insert(r, frustrated) {
            Some(prev) if prev != frustrated => {
                return Err(Error::verify(
                    "a gauge class mixes frustrated and unfrustrated patterns",
                ))
            }
            _ => {}
        }
    }
    census.frustrated_classes = class_kind.values().filter(|&&f| f).count();
    census.unfrustrated_classes = class_kind.len() - census.frustrated_classes;
    if !census.representative.is_frustrated().frustrated {
        return Err(Error::verify("canonical representative is not frustrated"));
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Dashed as D, Solid as S};

    #[test]
    fn dashed_triangle_is_frustrated() {
        let g = SignedGraph::new(3, vec![(0, 1, D), (1, 2, D), (2, 0, D)]).unwrap();
        let f = g.is_frustrated();
        assert!(f.frustrated);
        assert_eq!(f.witness, Some(vec![0, 1, 2]));
    }

    #[test]
    fn two_dashed_triangle_is_balanced() {
        let g = SignedGraph::new(3, vec![(0, 1, D), (1, 2, D), (2, 0, S)]).unwrap();
        assert_eq!(
            g.is_frustrated(),
            Frustration {
                frustrated: false,
                witness: None
            }
        );
        let v = g.valuation().unwrap();
        assert_eq!(v[0] ^ v[1], 1);
        assert_eq!(v[1] ^ v[2], 1);
        assert_eq!(v[0], v[2]);
    }

    #[test]
    fn pr_square_is_frustrated() {
        let g = SignedGraph::cycle(4, 0b0100).unwrap();
        assert!(g.is_frustrated().frustrated);
    }

    #[test]
    fn witness_is_an_odd_cycle_of_the_graph() {
        // frustrated 4-cycle hanging off a tree
        let g = SignedGraph::new(
            6,
            vec![
                (0, 1, S),
                (1, 2, S),
                (2, 3, D),
                (3, 4, S),
                (4, 1, S),
                (0, 5, D),
            ],
        )
        .unwrap();
        let w = g.is_frustrated().witness.unwrap();
        assert_eq!(w, vec![1, 2, 3, 4]);
    }

    #[test]
    fn gauge_flip_of_dashed_triangle() {
        let g = SignedGraph::new(3, vec![(0, 1, D), (1, 2, D), (2, 0, D)]).unwrap();
        let h = g.gauge_transform(&[0]).unwrap();
        let signs: Vec<Sign> = h.edges().iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![S, D, S]);
        assert_eq!(h.dashed_count() % 2, 1);
        assert_eq!(g.gauge_transform(&[]).unwrap(), g);
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(SignedGraph::new(2, vec![(0, 0, S)]).is_err());
        assert!(SignedGraph::new(2, vec![(0, 1, S), (1, 0, D)]).is_err());
        assert!(SignedGraph::new(2, vec![(0, 2, S)]).is_err());
    }

    #[test]
    fn census_small_cycles() {
        let c3 = enumerate_frustrated_cycles(3).unwrap();
        assert_eq!(
            (
                c3.frustrated_patterns,
                c3.frustrated_classes,
                c3.unfrustrated_classes
            ),
            (4, 1, 1)
        );
        assert_eq!(c3.representative.dashed_count(), 3);
        let c4 = enumerate_frustrated_cycles(4).unwrap();
        assert_eq!(c4.representative.dashed_count(), 1);
        assert_eq!(c4.frustrated_classes, 1);
        let c5 = enumerate_frustrated_cycles(5).unwrap();
        assert_eq!((c5.frustrated_patterns, c5.frustrated_classes), (16, 1));
        assert!(enumerate_frustrated_cycles(13).is_err());
    }

    #[test]
    fn json_round_trip() {
        let doc = json!({"nodes": 3, "edges": [[1, 2, "-"], [2, 3, "-"], [3, 1, "-"]]});
        let g = SignedGraph::from_json(&doc).unwrap();
        assert_eq!(g.to_json(), doc);
        assert!(SignedGraph::from_json(&json!({"nodes": 3, "edges": [[0, 1, "+"]]})).is_err());
        assert!(SignedGraph::from_json(&json!({"nodes": 3, "edges": [[1, 2, "x"]]})).is_err());
    }
}
