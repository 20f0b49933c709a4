//! Measurement scenarios, correlation tables and joint-distribution
//! feasibility.
//!
//! Measurements are binary and indexed from 0 internally; the JSON form uses
//! 1-based labels. A context's outcome tuple is stored at index
//! `Σ x_i 2^{k−1−i}`, so the key `"01"` means the first measurement gave 0 and
//! the second gave 1.

mod simplex;

use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::numkit;
use crate::signet::{Sign, SignedGraph};

pub use simplex::{joint_distribution_feasible, Feasibility, Infeasibility, JointDistribution};

/// Normalization slack per context.
pub const NORM_TOL: f64 = 1e-12;
/// Probabilities at or above −NEG_CLAMP are clamped to zero.
pub const NEG_CLAMP: f64 = 1e-15;
/// Atom limit for the feasibility LP.
pub const MAX_MEASUREMENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wing {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    n: usize,
    contexts: Vec<Vec<usize>>,
    wings: Option<Vec<Wing>>,
}

impl Scenario {
    pub fn new(n: usize, contexts: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("a scenario needs at least one measurement"));
        }
        let mut seen = HashSet::new();
        for ctx in &contexts {
            if ctx.is_empty() {
                return Err(Error::arg("empty context"));
            }
            if ctx.iter().any(|&m| m >= n) {
                return Err(Error::arg(format!(
                    "context {ctx:?} references a measurement ≥ {n}"
                )));
            }
            let mut key = ctx.clone();
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::arg(format!("context {ctx:?} repeats a measurement")));
            }
            if !seen.insert(key) {
                return Err(Error::arg(format!("duplicate context {ctx:?}")));
            }
        }
        Ok(Scenario {
            n,
            contexts,
            wings: None,
        })
    }

    /// Two-wing scenario: measurements `0..na` belong to A, `na..na+nb` to B.
    /// `pairs` are (a, b) with a < na, b < nb.
    pub fn bipartite(na: usize, nb: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.iter().any(|&(a, b)| a >= na || b >= nb) {
            return Err(Error::arg("bipartite pair out of range"));
        }
        let contexts = pairs.iter().map(|&(a, b)| vec![a, na + b]).collect();
        let mut s = Scenario::new(na + nb, contexts)?;
        s.wings = Some(
            (0..na + nb)
                .map(|m| if m < na { Wing::A } else { Wing::B })
                .collect(),
        );
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn wings(&self) -> Option<&[Wing]> {
        self.wings.as_deref()
    }

    pub fn context_index(&self, ctx: &[usize]) -> Option<usize> {
        self.contexts.iter().position(|c| c == ctx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    scenario: Scenario,
    /// `probs[c][o]`: probability of outcome index `o` in context `c`.
    probs: Vec<Vec<f64>>,
}

impl CorrelationTable {
    pub fn new(scenario: Scenario, mut probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != scenario.contexts.len() {
            return Err(Error::Dimension(format!(
                "{} probability rows for {} contexts",
                probs.len(),
                scenario.contexts.len()
            )));
        }
        for (ctx, row) in scenario.contexts.iter().zip(probs.iter_mut()) {
            if row.len() != 1 << ctx.len() {
                return Err(Error::Dimension(format!(
                    "context {ctx:?} needs {} outcomes",
                    1 << ctx.len()
                )));
            }
            for p in row.iter_mut() {
                if !p.is_finite() || *p < -NEG_CLAMP || *p > 1.0 + NORM_TOL {
                    return Err(Error::arg(format!(
                        "probability {p} out of range in context {ctx:?}"
                    )));
                }
                *p = p.max(0.0);
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > NORM_TOL {
                return Err(Error::arg(format!("context {ctx:?} sums to {total}")));
            }
        }
        Ok(CorrelationTable { scenario, probs })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn prob(&self, context: usize, outcome: usize) -> f64 {
        self.probs[context][outcome]
    }

    /// p(X_m = 0) as seen from context `context`.
    pub fn marginal_zero(&self, context: usize, m: usize) -> Option<f64> {
        let ctx = &self.scenario.contexts[context];
        let pos = ctx.iter().position(|&x| x == m)?;
        let shift = ctx.len() - 1 - pos;
        Some(
            self.probs[context]
                .iter()
                .enumerate()
                .filter(|(o, _)| (o >> shift) & 1 == 0)
                .map(|(_, p)| p)
                .sum(),
        )
    }

    /// Table of perfect (anti-)correlations with uniform marginals, one pair
    /// context per edge: `+` gives p(00)=p(11)=½, `−` gives p(01)=p(10)=½.
    pub fn from_signed_graph(g: &SignedGraph) -> Result<Self> {
        let contexts = g.edges().iter().map(|e| vec![e.u, e.v]).collect();
        let scenario = Scenario::new(g.nodes(), contexts)?;
        let probs = g
            .edges()
            .iter()
            .map(|e| pair_row(e.sign == Sign::Dashed))
            .collect();
        CorrelationTable::new(scenario, probs)
    }

    pub fn to_json(&self) -> Value {
        let contexts: Vec<Vec<usize>> = self
            .scenario
            .contexts
            .iter()
            .map(|c| c.iter().map(|m| m + 1).collect())
            .collect();
        let mut probs = Map::new();
        for (ctx, row) in self.scenario.contexts.iter().zip(&self.probs) {
            let mut cell = Map::new();
            for (o, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    cell.insert(outcome_key(o, ctx.len()), json!(p));
                }
            }
            probs.insert(context_key(ctx), Value::Object(cell));
        }
        let mut doc = json!({ "n": self.scenario.n, "contexts": contexts, "probs": probs });
        if let Some(w) = &self.scenario.wings {
            let labels: Vec<&str> = w
                .iter()
                .map(|w| if *w == Wing::A { "A" } else { "B" })
                .collect();
            doc["wings"] = json!(labels);
        }
        doc
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let n = doc["n"]
            .as_u64()
            .ok_or_else(|| bad("missing integer field \"n\""))? as usize;
        let raw_ctx = doc["contexts"]
            .as_array()
            .ok_or_else(|| bad("missing array \"contexts\""))?;
        let mut contexts = Vec::with_capacity(raw_ctx.len());
        for c in raw_ctx {
            let ids = c
                .as_array()
                .ok_or_else(|| bad("context must be an array"))?;
            let mut ctx = Vec::with_capacity(ids.len());
            for id in ids {
                let id = id
                    .as_u64()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| bad("context labels are 1-based integers"))?;
                ctx.push(id as usize - 1);
            }
            contexts.push(ctx);
        }
        let mut scenario = Scenario::new(n, contexts)?;
        if let Some(w) = doc.get("wings") {
            let w = w
                .as_array()
                .ok_or_else(|| bad("\"wings\" must be an array"))?;
            let wings = w
                .iter()
                .map(|x| match x.as_str() {
                    Some("A") => Ok(Wing::A),
                    Some("B") => Ok(Wing::B),
                    _ => Err(bad("wing labels are \"A\" or \"B\"")),
                })
                .collect::<Result<Vec<_>>>()?;
            if wings.len() != n {
                return Err(bad("one wing label per measurement"));
            }
            scenario.wings = Some(wings);
        }
        let table = doc["probs"]
            .as_object()
            .ok_or_else(|| bad("missing object \"probs\""))?;
        let mut probs = Vec::with_capacity(scenario.contexts.len());
        for ctx in &scenario.contexts {
            let mut row = vec![0.0; 1 << ctx.len()];
            if let Some(cell) = table.get(&context_key(ctx)) {
                let cell = cell
                    .as_object()
                    .ok_or_else(|| bad("probability cell must be an object"))?;
                for (k, v) in cell {
                    if k.len() != ctx.len() || !k.chars().all(|ch| ch == '0' || ch == '1') {
                        return Err(bad(&format!("bad outcome key {k:?}")));
                    }
                    let o = usize::from_str_radix(k, 2).map_err(|_| bad("bad outcome key"))?;
                    row[o] = v
                        .as_f64()
                        .ok_or_else(|| bad("probabilities must be numbers"))?;
                }
            }
            probs.push(row);
        }
        CorrelationTable::new(scenario, probs)
    }
}

fn context_key(ctx: &[usize]) -> String {
    ctx.iter()
        .map(|m| (m + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn outcome_key(o: usize, len: usize) -> String {
    (0..len)
        .map(|i| {
            if (o >> (len - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn pair_row(anti: bool) -> Vec<f64> {
    if anti {
        vec![0.0, 0.5, 0.5, 0.0]
    } else {
        vec![0.5, 0.0, 0.0, 0.5]
    }
}

fn require_odd(n: usize, what: &str) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::arg(format!("{what} needs odd n ≥ 3, got {n}")));
    }
    Ok(())
}

/// Perfect anti-correlation with uniform marginals on every adjacent pair of
/// an odd n-cycle.
pub fn build_os_ncycle(n: usize) -> Result<CorrelationTable> {
    require_odd(n, "the n-cycle")?;
    let contexts = (0..n).map(|a| vec![a, (a + 1) % n]).collect();
    CorrelationTable::new(Scenario::new(n, contexts)?, vec![pair_row(true); n])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartiteKind {
    NonlocalOs3,
    NonlocalOsRing(usize),
    PrBox,
}

/// Two-wing tables. For the ring, cells with b ∉ {a, a⊕1, a⊖1} carry no
/// constraint and are left out.
pub fn build_bipartite_table(kind: BipartiteKind) -> Result<CorrelationTable> {
    match kind {
        BipartiteKind::NonlocalOs3 => ring_table(3),
        BipartiteKind::NonlocalOsRing(n) => {
            require_odd(n, "the nonlocal ring")?;
            ring_table(n)
        }
        BipartiteKind::PrBox => {
            // A1=B1, A1=B2, A2=B1⊕1, A2=B2
            let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
            let scenario = Scenario::bipartite(2, 2, &pairs)?;
            let probs = pairs.iter().map(|&p| pair_row(p == (1, 0))).collect();
            CorrelationTable::new(scenario, probs)
        }
    }
}

fn ring_table(n: usize) -> Result<CorrelationTable> {
    let mut pairs = Vec::new();
    let mut probs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                pairs.push((a, b));
                probs.push(pair_row(false));
            } else if b == (a + 1) % n || a == (b + 1) % n {
                pairs.push((a, b));
                probs.push(pair_row(true));
            }
        }
    }
    CorrelationTable::new(Scenario::bipartite(n, n, &pairs)?, probs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalingReport {
    pub max_violation: f64,
    /// (measurement label, spread of its marginal across remote settings),
    /// listed when the spread exceeds `NORM_TOL`.
    pub offending: Vec<(String, f64)>,
}

impl SignalingReport {
    pub fn passes(&self) -> bool {
        self.max_violation <= NORM_TOL
    }
}

pub fn check_no_signaling(t: &CorrelationTable) -> Result<SignalingReport> {
    let wings = t
        .scenario
        .wings
        .as_ref()
        .ok_or_else(|| Error::arg("no-signaling check needs a two-wing table"))?;
    let mut seen: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (ci, ctx) in t.scenario.contexts.iter().enumerate() {
        if ctx.len() != 2 || wings[ctx[0]] == wings[ctx[1]] {
            return Err(Error::arg(format!("context {ctx:?} is not one-per-wing")));
        }
        for &m in ctx {
            seen.entry(m)
                .or_default()
                .push(t.marginal_zero(ci, m).unwrap());
        }
    }
    let na = wings.iter().filter(|&&w| w == Wing::A).count();
    let mut report = SignalingReport {
        max_violation: 0.0,
        offending: Vec::new(),
    };
    for (m, ps) in seen {
        let lo = ps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = hi - lo;
        report.max_violation = report.max_violation.max(spread);
        if spread > NORM_TOL {
            let label = match wings[m] {
                Wing::A => format!("A{}", m + 1),
                Wing::B => format!("B{}", m - na + 1),
            };
            report.offending.push((label, spread));
        }
    }
    Ok(report)
}

/// Start from the parametric anti-correlated family p(01)=q_a, p(10)=1−q_a on
/// context {a, a⊕1} and impose marginal consistency of every measurement
/// across its two contexts: q_a + q_{a⊖1} = 1. For odd n the system is
/// nonsingular and forces q_a = ½.
pub fn solve_anticorrelation_constraints(n: usize) -> Result<CorrelationTable> {
    require_odd(n, "anti-correlation elimination")?;
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
        row[(i + n - 1) % n] = 1.0;
    }
    let q = numkit::solve(&a, &vec![1.0; n])?;
    let contexts = (0..n).map(|a| vec![a, (a + 1) % n]).collect();
    let probs = q.iter().map(|&q| vec![0.0, q, 1.0 - q, 0.0]).collect();
    CorrelationTable::new(Scenario::new(n, contexts)?, probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn os3_is_uniformly_anticorrelated() {
        let t = build_os_ncycle(3).unwrap();
        assert_eq!(
            t.scenario().contexts(),
            &[vec![0, 1], vec![1, 2], vec![2, 0]]
        );
        for c in 0..3 {
            assert_eq!(t.probs()[c], vec![0.0, 0.5, 0.5, 0.0]);
            for &m in &t.scenario().contexts()[c] {
                assert_eq!(t.marginal_zero(c, m), Some(0.5));
            }
        }
    }

    #[test]
    fn even_cycle_rejected() {
        assert!(build_os_ncycle(4).is_err());
        assert!(build_os_ncycle(1).is_err());
    }

    #[test]
    fn nonlocal_os3_cells() {
        let t = build_bipartite_table(BipartiteKind::NonlocalOs3).unwrap();
        assert_eq!(t.scenario().contexts().len(), 9);
        let same = t.scenario().context_index(&[1, 4]).unwrap();
        assert_eq!(t.probs()[same], vec![0.5, 0.0, 0.0, 0.5]);
        let diff = t.scenario().context_index(&[0, 5]).unwrap();
        assert_eq!(t.probs()[diff], vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn ring_omits_unconstrained_cells() {
        let t = build_bipartite_table(BipartiteKind::NonlocalOsRing(7)).unwrap();
        assert_eq!(t.scenario().contexts().len(), 21);
        assert!(t.scenario().context_index(&[0, 7 + 3]).is_none());
    }

    #[test]
    fn pr_box_constraints() {
        let t = build_bipartite_table(BipartiteKind::PrBox).unwrap();
        let rows: Vec<_> = t.probs().to_vec();
        assert_eq!(rows[0], vec![0.5, 0.0, 0.0, 0.5]);
        assert_eq!(rows[1], vec![0.5, 0.0, 0.0, 0.5]);
        assert_eq!(rows[2], vec![0.0, 0.5, 0.5, 0.0]);
        assert_eq!(rows[3], vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn maximal_signaling_detected() {
        let s = Scenario::bipartite(1, 2, &[(0, 0), (0, 1)]).unwrap();
        let t = CorrelationTable::new(s, vec![vec![0.5, 0.5, 0.0, 0.0], vec![0.0, 0.0, 0.5, 0.5]])
            .unwrap();
        let rep = check_no_signaling(&t).unwrap();
        assert_eq!(rep.max_violation, 1.0);
        assert_eq!(rep.offending, vec![("A1".to_string(), 1.0)]);
    }

    #[test]
    fn foil_tables_do_not_signal() {
        for kind in [
            BipartiteKind::NonlocalOs3,
            BipartiteKind::PrBox,
            BipartiteKind::NonlocalOsRing(9),
        ] {
            let rep = check_no_signaling(&build_bipartite_table(kind).unwrap()).unwrap();
            assert!(rep.passes(), "{kind:?}");
        }
    }

    #[test]
    fn no_signaling_needs_wings() {
        assert!(check_no_signaling(&build_os_ncycle(3).unwrap()).is_err());
    }

    #[test]
    fn elimination_forces_one_half() {
        for n in [3, 5, 7] {
            let t = solve_anticorrelation_constraints(n).unwrap();
            for row in t.probs() {
                assert!((row[1] - 0.5).abs() < 1e-15 && (row[2] - 0.5).abs() < 1e-15);
            }
        }
        assert!(solve_anticorrelation_constraints(4).is_err());
    }

    #[test]
    fn json_round_trip() {
        for t in [
            build_os_ncycle(5).unwrap(),
            build_bipartite_table(BipartiteKind::PrBox).unwrap(),
        ] {
            let doc = t.to_json();
            assert_eq!(CorrelationTable::from_json(&doc).unwrap(), t);
        }
        let doc = build_os_ncycle(3).unwrap().to_json();
        assert_eq!(doc["probs"]["1,2"]["01"], json!(0.5));
        assert_eq!(doc["contexts"][2], json!([3, 1]));
    }

    #[test]
    fn invalid_tables_rejected() {
        let s = Scenario::new(2, vec![vec![0, 1]]).unwrap();
        assert!(CorrelationTable::new(s.clone(), vec![vec![0.5, 0.5, 0.5, 0.0]]).is_err());
        assert!(CorrelationTable::new(s, vec![vec![-0.1, 0.6, 0.5, 0.0]]).is_err());
        assert!(Scenario::new(2, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(Scenario::new(2, vec![vec![]]).is_err());
    }
}
