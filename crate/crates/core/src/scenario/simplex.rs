//! Phase-1 revised simplex deciding whether a correlation table is the set of
//! context marginals of one joint distribution over all 2^n valuations.
//!
//! Columns are never materialized: atom λ (bit m = outcome of measurement m)
//! has a 1 in exactly one row per context plus the normalization row, so its
//! column is regenerated from λ's bits on demand. Bland's rule on both the
//! entering and leaving choice keeps the run deterministic and cycle-free.

use std::collections::BTreeMap;

use super::{CorrelationTable, MAX_MEASUREMENTS};
use crate::error::{Error, Result};
use crate::signet::{Sign, SignedGraph};

/// Phase-1 objective above which the table is declared infeasible.
pub const FEAS_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n: usize,
    atoms: BTreeMap<u32, f64>,
}

impl JointDistribution {
    pub fn new(n: usize, atoms: BTreeMap<u32, f64>) -> Result<Self> {
        if atoms.keys().any(|&a| (a as u64) >> n != 0) {
            return Err(Error::arg("atom outside the valuation range"));
        }
        let total: f64 = atoms.values().sum();
        if atoms.values().any(|&w| w < -1e-12) || (total - 1.0).abs() > FEAS_TOL {
            return Err(Error::arg(format!(
                "atom weights do not form a distribution (total {total})"
            )));
        }
        Ok(JointDistribution { n, atoms })
    }

    /// Point mass on one valuation.
    pub fn point(n: usize, atom: u32) -> Self {
        JointDistribution {
            n,
            atoms: BTreeMap::from([(atom, 1.0)]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero atoms: valuation bits (bit m = X_m) → weight.
    pub fn atoms(&self) -> &BTreeMap<u32, f64> {
        &self.atoms
    }

    pub fn weight(&self, atom: u32) -> f64 {
        self.atoms.get(&atom).copied().unwrap_or(0.0)
    }

    pub fn marginal(&self, ctx: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << ctx.len()];
        for (&atom, &w) in &self.atoms {
            out[outcome_of(atom, ctx)] += w;
        }
        out
    }

    /// Largest deviation between this distribution's marginals and the table.
    pub fn max_deviation(&self, t: &CorrelationTable) -> f64 {
        t.scenario()
            .contexts()
            .iter()
            .zip(t.probs())
            .flat_map(|(ctx, row)| {
                self.marginal(ctx)
                    .into_iter()
                    .zip(row)
                    .map(|(a, b)| (a - b).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

fn outcome_of(atom: u32, ctx: &[usize]) -> usize {
    ctx.iter()
        .fold(0, |acc, &m| (acc << 1) | ((atom >> m) & 1) as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    /// Optimal phase-1 objective (total artificial mass left).
    pub phase1_objective: f64,
    /// For perfect-correlation pair tables: an odd-parity cycle (0-based).
    pub odd_cycle: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(JointDistribution),
    Infeasible(Infeasibility),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn distribution(&self) -> Option<&JointDistribution> {
        match self {
            Feasibility::Feasible(d) => Some(d),
            Feasibility::Infeasible(_) => None,
        }
    }
}

pub fn joint_distribution_feasible(t: &CorrelationTable) -> Result<Feasibility> {
    let n = t.scenario().n();
    if n > MAX_MEASUREMENTS {
        return Err(Error::TooLarge(format!(
            "{n} measurements (limit {MAX_MEASUREMENTS})"
        )));
    }
    let contexts = t.scenario().contexts();
    let mut offsets = Vec::with_capacity(contexts.len());
    let mut b = Vec::new();
    for row in t.probs() {
        offsets.push(b.len());
        b.extend(row.iter().copied());
    }
    b.push(1.0);
    let m = b.len();
    let atoms = 1usize << n;

    let column_rows = |j: usize, out: &mut Vec<usize>| {
        out.clear();
        for (ctx, &off) in contexts.iter().zip(&offsets) {
            out.push(off + outcome_of(j as u32, ctx));
        }
        out.push(m - 1);
    };

    // basis[i]: structural index < atoms, or atoms + i for the i-th artificial
    let mut basis: Vec<usize> = (0..m).map(|i| atoms + i).collect();
    let mut in_basis = vec![false; atoms];
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let mut xb = b.clone();
    let mut rows = Vec::with_capacity(contexts.len() + 1);
    let mut pi = vec![0.0; m];
    let mut d = vec![0.0; m];

    let mut iters = 0;
    loop {
        iters += 1;
        if iters > MAX_ITERS {
            return Err(Error::verify("simplex iteration limit reached"));
        }
        for (k, p) in pi.iter_mut().enumerate() {
            *p = (0..m)
                .filter(|&i| basis[i] >= atoms)
                .map(|i| binv[i * m + k])
                .sum();
        }
        // Bland: lowest-index column with negative reduced cost.
        let mut entering = None;
        for j in 0..atoms {
            if in_basis[j] {
                continue;
            }
            column_rows(j, &mut rows);
            let reduced: f64 = -rows.iter().map(|&r| pi[r]).sum::<f64>();
            if reduced < -PRICE_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { break };

        column_rows(j, &mut rows);
        for (i, di) in d.iter_mut().enumerate() {
            *di = rows.iter().map(|&r| binv[i * m + r]).sum();
        }
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if d[i] > PIVOT_TOL {
                let ratio = xb[i] / d[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((r, theta)) = leave else {
            return Err(Error::verify(
                "phase-1 simplex reported an unbounded direction",
            ));
        };

        for i in 0..m {
            xb[i] = if i == r {
                theta
            } else {
                (xb[i] - theta * d[i]).max(0.0)
            };
        }
        let piv = d[r];
        for k in 0..m {
            binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r && d[i] != 0.0 {
                let f = d[i];
                for k in 0..m {
                    binv[i * m + k] -= f * binv[r * m + k];
                }
            }
        }
        if basis[r] < atoms {
            in_basis[basis[r]] = false;
        }
        basis[r] = j;
        in_basis[j] = true;
    }

    let objective: f64 = (0..m).filter(|&i| basis[i] >= atoms).map(|i| xb[i]).sum();
    if objective > FEAS_TOL {
        return Ok(Feasibility::Infeasible(Infeasibility {
            phase1_objective: objective,
            odd_cycle: odd_cycle_witness(t),
        }));
    }

    let mut weights = BTreeMap::new();
    for i in 0..m {
        if basis[i] < atoms && xb[i] > 0.0 {
            weights.insert(basis[i] as u32, xb[i]);
        }
    }
    let total: f64 = weights.values().sum();
    for w in weights.values_mut() {
        *w /= total;
    }
    let dist = JointDistribution::new(n, weights)?;
    let dev = dist.max_deviation(t);
    if dev > FEAS_TOL {
        return Err(Error::verify(format!(
            "recovered distribution misses the table by {dev:.3e}"
        )));
    }
    Ok(Feasibility::Feasible(dist))
}

/// If every context is a pair with perfect (anti-)correlation, read the table
/// as a signed graph and return its odd cycle.
fn odd_cycle_witness(t: &CorrelationTable) -> Option<Vec<usize>> {
    let mut edges = Vec::new();
    for (ctx, row) in t.scenario().contexts().iter().zip(t.probs()) {
        if ctx.len() != 2 {
            return None;
        }
        let sign = if row[1] == 0.0 && row[2] == 0.0 {
            Sign::Solid
        } else if row[0] == 0.0 && row[3] == 0.0 {
            Sign::Dashed
        } else {
            return None;
        };
        edges.push((ctx[0], ctx[1], sign));
    }
    let g = SignedGraph::new(t.scenario().n(), edges).ok()?;
    g.is_frustrated().witness
}

#[cfg(test)]
mod tests {
    use super::super::{build_bipartite_table, build_os_ncycle, BipartiteKind, Scenario};
    use super::*;

    #[test]
    fn os3_has_no_joint_distribution() {
        match joint_distribution_feasible(&build_os_ncycle(3).unwrap()).unwrap() {
            Feasibility::Infeasible(c) => {
                assert!(c.phase1_objective > FEAS_TOL);
                assert_eq!(c.odd_cycle.map(|w| w.len()), Some(3));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn correlated_triangle_is_feasible() {
        let s = Scenario::new(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let t = CorrelationTable::new(s, vec![vec![0.5, 0.0, 0.0, 0.5]; 3]).unwrap();
        let f = joint_distribution_feasible(&t).unwrap();
        let d = f.distribution().expect("feasible");
        assert!((d.weight(0b000) - 0.5).abs() < 1e-12);
        assert!((d.weight(0b111) - 0.5).abs() < 1e-12);
        assert!(d.max_deviation(&t) < 1e-12);
    }

    #[test]
    fn pr_box_is_infeasible() {
        let f = joint_distribution_feasible(&build_bipartite_table(BipartiteKind::PrBox).unwrap())
            .unwrap();
        assert!(!f.is_feasible());
    }

    #[test]
    fn nonuniform_feasible_table_round_trips() {
        // X1, X2 independent-ish with a mixed pair marginal
        let s = Scenario::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let t = CorrelationTable::new(
            s,
            vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.25, 0.15, 0.35, 0.25]],
        )
        .unwrap();
        let d = joint_distribution_feasible(&t)
            .unwrap()
            .distribution()
            .cloned()
            .unwrap();
        assert!(d.max_deviation(&t) < 1e-9);
    }

    #[test]
    fn inconsistent_marginals_are_infeasible() {
        let s = Scenario::new(2, vec![vec![0], vec![0, 1]]).unwrap();
        let t = CorrelationTable::new(s, vec![vec![1.0, 0.0], vec![0.0, 0.0, 0.5, 0.5]]).unwrap();
        match joint_distribution_feasible(&t).unwrap() {
            Feasibility::Infeasible(c) => assert!(c.odd_cycle.is_none()),
            _ => panic!("expected infeasible"),
        }
    }
}
