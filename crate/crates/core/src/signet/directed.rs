//! Decorated implication graphs.
//!
//! An arc u → v with base value x reads "X_u = x ⇒ X_v = x" when solid and
//! "X_u = x ⇒ X_v = x⊕1" when dashed. Its contrapositive runs v → u with the
//! same style; the base value becomes the negated consequent, which for a
//! solid arc is x⊕1 and for a dashed arc is x again.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{parse_label, parse_nodes, Sign};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub base: u8,
    pub style: Sign,
}

impl Arc {
    pub fn consequent(&self) -> u8 {
        self.base ^ self.style.parity()
    }

    /// The contrapositive implication.
    pub fn reversed(&self) -> Arc {
        Arc {
            from: self.to,
            to: self.from,
            base: self.consequent() ^ 1,
            style: self.style,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedImplicationGraph {
    nodes: usize,
    arcs: Vec<Arc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStep {
    pub from: usize,
    pub from_value: u8,
    pub to: usize,
    pub to_value: u8,
    /// Step used an arc against its direction.
    pub contrapositive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub node: usize,
    /// Value already held by the node.
    pub held: u8,
    /// Value the last step derived.
    pub derived: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainOutcome {
    pub contradiction: bool,
    /// First value derived for each reached node (including the start).
    pub values: BTreeMap<usize, u8>,
    pub trace: Vec<ChainStep>,
    pub conflict: Option<Conflict>,
}

impl DirectedImplicationGraph {
    pub fn new(nodes: usize, arcs: Vec<(usize, usize, u8, Sign)>) -> Result<Self> {
        let mut out = Vec::with_capacity(arcs.len());
        for (from, to, base, style) in arcs {
            if from >= nodes || to >= nodes {
                return Err(Error::arg(format!(
                    "arc ({from}, {to}) outside {nodes} nodes"
                )));
            }
            if from == to {
                return Err(Error::arg(format!("self-implication at node {from}")));
            }
            if base > 1 {
                return Err(Error::arg(format!("base value {base} is not a bit")));
            }
            out.push(Arc {
                from,
                to,
                base,
                style,
            });
        }
        Ok(DirectedImplicationGraph { nodes, arcs: out })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Replace every arc by its contrapositive.
    pub fn reversed(&self) -> DirectedImplicationGraph {
        DirectedImplicationGraph {
            nodes: self.nodes,
            arcs: self.arcs.iter().map(Arc::reversed).collect(),
        }
    }

    /// `{"nodes": n, "arcs": [[u, v, x, "+"|"-"], …]}`, 1-based labels.
    pub fn to_json(&self) -> Value {
        let arcs: Vec<Value> = self
            .arcs
            .iter()
            .map(|a| json!([a.from + 1, a.to + 1, a.base, a.style.symbol()]))
            .collect();
        json!({ "nodes": self.nodes, "arcs": arcs })
    }

    /// Accepts the arc list under either `"arcs"` or `"edges"`.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let nodes = parse_nodes(doc)?;
        let raw = doc
            .get("arcs")
            .or_else(|| doc.get("edges"))
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array \"arcs\"".into()))?;
        let mut arcs = Vec::with_capacity(raw.len());
        for a in raw {
            let p = a.as_array().filter(|p| p.len() == 4).ok_or_else(|| {
                Error::Parse(format!("arc {a} must be [from, to, base_value, style]"))
            })?;
            let base = p[2]
                .as_u64()
                .filter(|&b| b <= 1)
                .ok_or_else(|| Error::Parse(format!("base value {} must be 0 or 1", p[2])))?;
            let style = p[3]
                .as_str()
                .ok_or_else(|| Error::Parse("arc style must be a string".into()))?;
            arcs.push((
                parse_label(&p[0])?,
                parse_label(&p[1])?,
                base as u8,
                Sign::parse(style)?,
            ));
        }
        DirectedImplicationGraph::new(nodes, arcs)
    }
}

/// Chain implications from X_start = value.
///
/// Forward arcs are preferred; a contrapositive is used only when no forward
/// arc yields anything new. Every step adds a fresh node value or exposes a
/// conflict, which ends the run.
pub fn check_implication_chain(
    g: &DirectedImplicationGraph,
    start: usize,
    value: u8,
) -> Result<ChainOutcome> {
    if start >= g.nodes {
        return Err(Error::arg(format!(
            "start node {start} outside {} nodes",
            g.nodes
        )));
    }
    if value > 1 {
        return Err(Error::arg("start value must be 0 or 1"));
    }
    let fires_from = |node: usize, x: u8| {
        g.arcs
            .iter()
            .any(|a| (a.from == node && a.base == x) || (a.to == node && a.consequent() ^ 1 == x))
    };
    if !fires_from(start, value) {
        return Err(Error::arg(format!(
            "no implication has X{} = {value} as its antecedent",
            start + 1
        )));
    }

    let mut values = BTreeMap::from([(start, value)]);
    let mut order = vec![start];
    let mut trace = Vec::new();
    loop {
        let step =
            next_step(g, &order, &values, false).or_else(|| next_step(g, &order, &values, true));
        let Some(step) = step else { break };
        trace.push(step);
        if let Some(&held) = values.get(&step.to) {
            let conflict = Conflict {
                node: step.to,
                held,
                derived: step.to_value,
            };
            return Ok(ChainOutcome {
                contradiction: true,
                values,
                trace,
                conflict: Some(conflict),
            });
        }
        values.insert(step.to, step.to_value);
        order.push(step.to);
    }
    Ok(ChainOutcome {
        contradiction: false,
        values,
        trace,
        conflict: None,
    })
}

fn next_step(
    g: &DirectedImplicationGraph,
    order: &[usize],
    values: &BTreeMap<usize, u8>,
    contrapositive: bool,
) -> Option<ChainStep> {
    for &node in order {
        let x = values[&node];
        for arc in &g.arcs {
            let a = if contrapositive { arc.reversed() } else { *arc };
            if a.from != node || a.base != x {
                continue;
            }
            let y = a.consequent();
            if values.get(&a.to) != Some(&y) {
                return Some(ChainStep {
                    from: node,
                    from_value: x,
                    to: a.to,
                    to_value: y,
                    contrapositive,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Dashed as D, Solid as S};

    #[test]
    fn triangle_of_implications_contradicts() {
        // s1 ⇒ ¬s2, ¬s2 ⇒ s3, s3 ⇒ ¬s1
        let g = DirectedImplicationGraph::new(3, vec![(0, 1, 1, D), (1, 2, 0, D), (2, 0, 1, D)])
            .unwrap();
        let out = check_implication_chain(&g, 0, 1).unwrap();
        assert!(out.contradiction);
        assert_eq!(
            out.conflict,
            Some(Conflict {
                node: 0,
                held: 1,
                derived: 0
            })
        );
        assert_eq!(out.trace.len(), 3);
        assert!(out.trace.iter().all(|s| !s.contrapositive));
    }

    #[test]
    fn pentagon_chain_returns_to_the_start() {
        let arcs = (0..5)
            .map(|k| (k, (k + 1) % 5, if k % 2 == 0 { 1 } else { 0 }, D))
            .collect();
        let g = DirectedImplicationGraph::new(5, arcs).unwrap();
        let out = check_implication_chain(&g, 0, 1).unwrap();
        assert_eq!(out.conflict.map(|c| c.node), Some(0));
        assert_eq!(
            out.values,
            BTreeMap::from([(0, 1), (1, 0), (2, 1), (3, 0), (4, 1)])
        );
    }

    #[test]
    fn solid_path_is_consistent() {
        let g = DirectedImplicationGraph::new(3, vec![(0, 1, 1, S), (1, 2, 1, S)]).unwrap();
        let out = check_implication_chain(&g, 0, 1).unwrap();
        assert!(!out.contradiction);
        assert_eq!(out.values.len(), 3);
    }

    #[test]
    fn contrapositive_is_used_when_forward_stalls() {
        // X1=1 ⇒ X2=1 ; starting from X2=0 only the contrapositive applies
        let g = DirectedImplicationGraph::new(2, vec![(0, 1, 1, S)]).unwrap();
        let out = check_implication_chain(&g, 1, 0).unwrap();
        assert_eq!(out.values.get(&0), Some(&0));
        assert!(out.trace[0].contrapositive);
    }

    #[test]
    fn reversal_is_the_contrapositive() {
        let solid = Arc {
            from: 0,
            to: 1,
            base: 1,
            style: S,
        };
        assert_eq!(
            solid.reversed(),
            Arc {
                from: 1,
                to: 0,
                base: 0,
                style: S
            }
        );
        let dashed = Arc {
            from: 0,
            to: 1,
            base: 1,
            style: D,
        };
        assert_eq!(
            dashed.reversed(),
            Arc {
                from: 1,
                to: 0,
                base: 1,
                style: D
            }
        );
        assert_eq!(solid.reversed().reversed(), solid);
    }

    #[test]
    fn start_must_be_an_antecedent() {
        let g = DirectedImplicationGraph::new(2, vec![(0, 1, 1, S)]).unwrap();
        assert!(check_implication_chain(&g, 0, 0).is_err());
        assert!(check_implication_chain(&g, 5, 0).is_err());
    }

    #[test]
    fn json_accepts_arcs_or_edges() {
        let doc = json!({"nodes": 2, "edges": [[1, 2, 1, "-"]]});
        let g = DirectedImplicationGraph::from_json(&doc).unwrap();
        assert_eq!(
            g.arcs()[0],
            Arc {
                from: 0,
                to: 1,
                base: 1,
                style: D
            }
        );
        assert_eq!(g.to_json(), json!({"nodes": 2, "arcs": [[1, 2, 1, "-"]]}));
        assert!(DirectedImplicationGraph::from_json(
            &json!({"nodes": 2, "arcs": [[1, 2, 2, "-"]]})
        )
        .is_err());
    }
}
