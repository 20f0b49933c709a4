//! Hardy-type chain of implications on (|00⟩ − η|11⟩)/√(1+η²), and the
//! relative-state chain showing a bipartite pure state cannot make the last
//! consequent deny the first antecedent.
//!
//! The construction uses three settings per wing. With κ_a = η^{((a+1) mod 3)+½},
//! the rays
//!
//! ```text
//!   A1 ∝ (κ1, 1)   A2 ∝ (1, −κ2)   A3 ∝ (1, κ3)
//!   B1 ∝ (−κ3, 1)  B2 ∝ (κ2, 1)    B3 ∝ (1, −κ1)
//! ```
//!
//! make five joint events impossible for every η > 0,
//!
//! ```text
//!   A1=1 ⇒ B1=1 ⇒ A2=0 ⇒ B2=0 ⇒ A3=1 ⇒ B3=1,
//! ```
//!
//! while A1=1 ∧ B3=0 keeps positive probability; that probability is the
//! Hardy value.

use super::born;
use crate::error::{Error, Result};
use crate::numkit::{
    hermitian_eigen, hermitian_sqrt, r, tensor, ComplexMatrix, Ket, PSD_TOL, STRUCT_TOL,
};
use crate::scenario::CorrelationTable;

/// Maximum probability tolerated on the impossible events.
pub const HARDY_CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HardyConfig {
    pub eta: f64,
    pub kappas: [f64; 3],
    pub state: Ket,
    /// Rank-one projectors for outcome 1, settings 1..3 per wing.
    pub alice: Vec<ComplexMatrix>,
    pub bob: Vec<ComplexMatrix>,
}

/// (a, x, b, y), 1-based settings: joint events the construction forbids.
pub const HARDY_CONSTRAINTS: [(usize, u8, usize, u8); 5] = [
    (1, 1, 1, 0),
    (2, 1, 1, 1),
    (2, 0, 2, 1),
    (3, 0, 2, 0),
    (3, 1, 3, 0),
];

impl HardyConfig {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::arg(format!("η must be positive, got {eta}")));
        }
        let kappas = [1usize, 2, 3].map(|a| eta.powf(((a + 1) % 3) as f64 + 0.5));
        let [k1, k2, k3] = kappas;
        let ray = |x: f64, y: f64| Ket::from_real(&[x, y]).normalized().map(|k| k.projector());
        let alice = vec![ray(k1, 1.0)?, ray(1.0, -k2)?, ray(1.0, k3)?];
        let bob = vec![ray(-k3, 1.0)?, ray(k2, 1.0)?, ray(1.0, -k1)?];
        let state = Ket::from_real(&[1.0, 0.0, 0.0, -eta]).scale(r(1.0 / (1.0 + eta * eta).sqrt()));
        if !state.is_normalized() {
            return Err(Error::verify("Hardy state is not normalized"));
        }
        Ok(HardyConfig {
            eta,
            kappas,
            state,
            alice,
            bob,
        })
    }

    fn effect(proj: &ComplexMatrix, x: u8) -> ComplexMatrix {
        if x == 1 {
            proj.clone()
        } else {
            &ComplexMatrix::identity(2) - proj
        }
    }

    /// p(A_a = x ∧ B_b = y), settings 1-based.
    pub fn prob(&self, a: usize, x: u8, b: usize, y: u8) -> f64 {
        let e = tensor(
            &Self::effect(&self.alice[a - 1], x),
            &Self::effect(&self.bob[b - 1], y),
        );
        born(&self.state, &e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub eta: f64,
    /// p(A1=1 ∧ B3=0)
    pub p_hardy: f64,
    /// Probabilities of the forbidden events, in `HARDY_CONSTRAINTS` order.
    pub constraints: Vec<f64>,
    /// p(A1=1 ∧ B2=1), reported for comparison with the two-setting form.
    pub p_a1_b2: f64,
}

impl HardyReport {
    pub fn max_constraint(&self) -> f64 {
        self.constraints.iter().copied().fold(0.0, f64::max)
    }
}

pub fn hardy_value(eta: f64) -> Result<HardyReport> {
    let cfg = HardyConfig::new(eta)?;
    let constraints: Vec<f64> = HARDY_CONSTRAINTS
        .iter()
        .map(|&(a, x, b, y)| cfg.prob(a, x, b, y))
        .collect();
    if let Some((k, p)) = constraints
        .iter()
        .enumerate()
        .find(|(_, p)| p.abs() > HARDY_CONSTRAINT_TOL)
    {
        let (a, x, b, y) = HARDY_CONSTRAINTS[k];
        return Err(Error::verify(format!(
            "at η = {eta}, p(A{a}={x} ∧ B{b}={y}) = {p:.3e} should vanish"
        )));
    }
    Ok(HardyReport {
        eta,
        p_hardy: cfg.prob(1, 1, 3, 0),
        constraints,
        p_a1_b2: cfg.prob(1, 1, 2, 1),
    })
}

/// Full Born table over all nine setting pairs.
pub fn hardy_table(eta: f64) -> Result<CorrelationTable> {
    let cfg = HardyConfig::new(eta)?;
    let pairs: Vec<(usize, usize)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    let scenario = crate::scenario::Scenario::bipartite(3, 3, &pairs)?;
    let probs = pairs
        .iter()
        .map(|&(a, b)| {
            let mut row = vec![0.0; 4];
            for x in 0..2u8 {
                for y in 0..2u8 {
                    row[2 * x as usize + y as usize] = cfg.prob(a + 1, x, b + 1, y);
                }
            }
            row
        })
        .collect();
    CorrelationTable::new(scenario, probs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyOptimum {
    pub eta: f64,
    pub p_hardy: f64,
}

/// Golden-section maximization of p_Hardy(η) on [lo, hi] to width `tol`.
pub fn hardy_optimize(lo: f64, hi: f64, tol: f64) -> Result<HardyOptimum> {
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::arg("need 0 < lo < hi and tol > 0"));
    }
    let f = |eta: f64| hardy_value(eta).map(|r| r.p_hardy);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let eta = 0.5 * (a + b);
    Ok(HardyOptimum {
        eta,
        p_hardy: f(eta)?,
    })
}

#[derive(Debug, Clone)]
pub struct RelativeStateChain {
    /// |⟨φ¹|φ^(N+1)⟩|² with φ^(N+1) ∝ (ρᵀ)^N φ¹ normalized; 0 when that
    /// vector vanishes.
    pub overlap: f64,
    /// ⟨φ¹|(ρᵀ)^N|φ¹⟩
    pub raw_expectation: f64,
    /// φ¹, …, φ^(N+1); stops early if the chain hits the kernel of ρᵀ.
    pub chain: Vec<Ket>,
    /// χ^(k) ∝ U√ρ|φ^(k)*⟩, the partner's conditional state for each link.
    pub relative_states: Vec<Ket>,
    /// p(φ¹) on |Ψ⟩ = (𝟙⊗U√ρ)Σ_k|kk⟩, computed from Ψ itself.
    pub p_antecedent: f64,
    /// ⟨φ¹|ρᵀ|φ¹⟩ — must agree with `p_antecedent`.
    pub p_antecedent_reduced: f64,
    /// overlap = 0 ⇒ p_antecedent = 0.
    pub theorem_holds: bool,
}

pub fn relative_state_chain(
    rho: &ComplexMatrix,
    u: &ComplexMatrix,
    phi1: &Ket,
    steps: usize,
) -> Result<RelativeStateChain> {
    let d = rho.rows();
    if !rho.is_square() || u.rows() != d || !u.is_square() || phi1.dim() != d {
        return Err(Error::Dimension(
            "ρ, U and φ¹ must share one dimension".into(),
        ));
    }
    if steps == 0 {
        return Err(Error::arg("the chain needs at least one step"));
    }
    let defect = rho.hermiticity_defect();
    if defect > PSD_TOL {
        return Err(Error::arg(format!(
            "ρ is not Hermitian (defect {defect:.3e})"
        )));
    }
    let spec = hermitian_eigen(rho)?;
    if spec.values[0] < -PSD_TOL {
        return Err(Error::arg(format!(
            "ρ is not PSD (min eigenvalue {:.3e})",
            spec.values[0]
        )));
    }
    if (rho.trace().re - 1.0).abs() > PSD_TOL {
        return Err(Error::arg(format!("ρ has trace {}", rho.trace().re)));
    }
    if u.unitarity_defect() > PSD_TOL {
        return Err(Error::arg("U is not unitary"));
    }
    let phi1 = phi1.normalized()?;

    let rho_t = rho.transpose();
    let root = hermitian_sqrt(rho)?;
    let u_root = u * &root;

    let mut chain = vec![phi1.clone()];
    let mut relative_states = Vec::new();
    let mut v = phi1.clone();
    for _ in 0..steps {
        let cur = chain.last().unwrap();
        if let Ok(chi) = u_root.apply(&cur.conj()).normalized() {
            relative_states.push(chi);
        }
        v = rho_t.apply(&v);
        match v.normalized() {
            Ok(next) => chain.push(next),
            Err(_) => break,
        }
    }
    let raw_expectation = rho_t.pow(steps as u32).expectation(&phi1).re;
    let overlap = if v.norm() < STRUCT_TOL {
        0.0
    } else {
        let ov: f64 = phi1
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum::<num_complex::Complex64>()
            .norm_sqr();
        ov / v.norm_sqr()
    };

    // Ψ = Σ_k |k⟩ ⊗ U√ρ|k⟩; project the first factor on φ¹.
    let mut psi_amps = Vec::with_capacity(d * d);
    for k in 0..d {
        psi_amps.extend_from_slice(u_root.apply(&Ket::basis(d, k)).amplitudes());
    }
    let psi = Ket::new(psi_amps);
    let bra = tensor(&phi1.projector(), &ComplexMatrix::identity(d));
    let p_antecedent = born(&psi, &bra);
    let p_antecedent_reduced = rho_t.expectation(&phi1).re;
    if (p_antecedent - p_antecedent_reduced).abs() > 1e-10 {
        return Err(Error::verify("reduced state of Ψ is not ρᵀ"));
    }
    let theorem_holds = overlap > STRUCT_TOL || p_antecedent < 1e-10;
    Ok(RelativeStateChain {
        overlap,
        raw_expectation,
        chain,
        relative_states,
        p_antecedent,
        p_antecedent_reduced,
        theorem_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c;

    #[test]
    fn hardy_at_sqrt3() {
        let h = hardy_value(3f64.sqrt()).unwrap();
        let expected = 144.0 / (27.0 + 3f64.sqrt()).powi(2);
        assert!((h.p_hardy - expected).abs() < 1e-12);
        assert!(h.max_constraint() < 1e-12);
    }

    #[test]
    fn hardy_vanishes_for_product_states() {
        assert!(hardy_value(1e-6).unwrap().p_hardy < 1e-10);
        assert!(hardy_value(0.0).is_err());
        assert!(hardy_value(-1.0).is_err());
    }

    #[test]
    fn hardy_constraints_hold_across_eta() {
        for k in 1..=50 {
            let eta = 0.1 * k as f64;
            assert!(
                hardy_value(eta).unwrap().max_constraint() < 1e-12,
                "η = {eta}"
            );
        }
    }

    #[test]
    fn golden_section_optimum() {
        let o = hardy_optimize(0.5, 5.0, 1e-8).unwrap();
        assert!((o.p_hardy - 0.17455).abs() < 2e-5, "{o:?}");
    }

    #[test]
    fn maximally_mixed_is_a_fixed_point() {
        let d = 3;
        let rho = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        let phi = Ket::new(vec![c(0.6, 0.0), c(0.0, 0.8), r(0.0)]);
        let out = relative_state_chain(&rho, &ComplexMatrix::identity(d), &phi, 4).unwrap();
        assert!((out.overlap - 1.0).abs() < 1e-12);
        assert_eq!(out.chain.len(), 5);
    }

    #[test]
    fn kernel_antecedent_never_occurs() {
        let rho = ComplexMatrix::diag(&[0.5, 0.5, 0.0]);
        let phi = Ket::basis(3, 2);
        let out = relative_state_chain(&rho, &ComplexMatrix::identity(3), &phi, 3).unwrap();
        assert_eq!(out.overlap, 0.0);
        assert!(out.p_antecedent < 1e-12);
        assert!(out.theorem_holds);
    }

    #[test]
    fn rejects_bad_inputs() {
        let phi = Ket::basis(2, 0);
        let id = ComplexMatrix::identity(2);
        assert!(relative_state_chain(&ComplexMatrix::diag(&[1.2, -0.2]), &id, &phi, 1).is_err());
        assert!(relative_state_chain(
            &ComplexMatrix::diag(&[0.5, 0.5]),
            &id.scale_real(2.0),
            &phi,
            1
        )
        .is_err());
        assert!(relative_state_chain(&ComplexMatrix::diag(&[0.5, 0.5]), &id, &phi, 0).is_err());
    }
}
