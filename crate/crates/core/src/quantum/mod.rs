//! Explicit quantum realizations, Born-rule game values and the
//! sum-of-squares optimality certificates.
//!
//! Outcome conventions: a ±1-valued observable O reports X = 0 for the +1
//! eigenvalue, so X̄ = (−1)^X and the outcome projector is (𝟙 + (−1)^X O)/2.
//! For rank-one projectors Π (star-polygon rays, Hardy kets) X = 1 means "Π
//! fired".

mod bell;
mod hardy;
mod star;

pub use bell::{
    diachronic_quantum, mermin_table, mermin_value, odd_cycle_game_value, odd_cycle_table,
    ring_observables, sos_certificate_bell, BellOperatorSpec, DiachronicValue, MerminValue,
};
pub use hardy::{
    hardy_optimize, hardy_table, hardy_value, relative_state_chain, HardyConfig, HardyOptimum,
    HardyReport, RelativeStateChain,
};
pub use star::{
    clifton_check, klyachko_value, sos_certificate_klyachko, transitivity_chain_klyachko,
    transitivity_chain_rank, CliftonReport, KlyachkoValue, StarPolygon, TransitivityReport,
};

use crate::error::{Error, Result};
use crate::numkit::{pauli_x, pauli_z, r, tensor, ComplexMatrix, Ket, STRUCT_TOL};
use crate::scenario::{CorrelationTable, Scenario};

/// Outcome of an SOS identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub n: usize,
    /// Frobenius norm of (left side − right side) of the operator identity.
    pub residual: f64,
    /// Smallest coefficient multiplying a v†v term.
    pub min_coefficient: f64,
    /// The bound the identity certifies.
    pub certified_bound: f64,
    /// The actual extremal eigenvalue of the operator.
    pub extremum: f64,
    pub passed: bool,
}

/// Identity residual allowed by both certificates.
pub const SOS_TOL: f64 = 1e-9;

/// cos φ σ_z + sin φ σ_x
pub fn spin_observable(phi: f64) -> ComplexMatrix {
    &pauli_z().scale_real(phi.cos()) + &pauli_x().scale_real(phi.sin())
}

/// (𝟙 + (−1)^x O)/2 for a ±1-valued observable O.
pub fn outcome_projector(obs: &ComplexMatrix, x: u8) -> ComplexMatrix {
    let sign = if x == 0 { 1.0 } else { -1.0 };
    (&ComplexMatrix::identity(obs.rows()) + &obs.scale_real(sign)).scale_real(0.5)
}

/// (|00⟩ + |11⟩)/√2
pub fn phi_plus() -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real(&[s, 0.0, 0.0, s])
}

/// ⟨ψ|E|ψ⟩, real part.
pub fn born(state: &Ket, effect: &ComplexMatrix) -> f64 {
    effect.expectation(state).re
}

/// Four-outcome projective measurement realizing commuting projectors Π_a,
/// Π_b jointly; entry 2·x_a + x_b where x = 1 means the projector fired.
pub fn joint_pair_measurement(
    pa: &ComplexMatrix,
    pb: &ComplexMatrix,
) -> Result<[ComplexMatrix; 4]> {
    let comm = pa.commutator_norm(pb);
    if comm >= STRUCT_TOL {
        return Err(Error::arg(format!(
            "projectors do not commute (‖[Πa,Πb]‖ = {comm:.3e})"
        )));
    }
    let id = ComplexMatrix::identity(pa.rows());
    let na = &id - pa;
    let nb = &id - pb;
    Ok([&na * &nb, &na * pb, pa * &nb, pa * pb])
}

/// Born distribution of ±1-valued observables measured on the two halves of
/// `state`; index 2·x_a + x_b.
pub fn pair_distribution(state: &Ket, oa: &ComplexMatrix, ob: &ComplexMatrix) -> [f64; 4] {
    let mut p = [0.0; 4];
    for xa in 0..2u8 {
        for xb in 0..2u8 {
            let e = tensor(&outcome_projector(oa, xa), &outcome_projector(ob, xb));
            p[2 * xa as usize + xb as usize] = born(state, &e);
        }
    }
    p
}

/// Correlation table of a two-wing Born-rule experiment over `pairs`.
pub fn bipartite_born_table(
    state: &Ket,
    alice: &[ComplexMatrix],
    bob: &[ComplexMatrix],
    pairs: &[(usize, usize)],
) -> Result<CorrelationTable> {
    let scenario = Scenario::bipartite(alice.len(), bob.len(), pairs)?;
    let probs = pairs
        .iter()
        .map(|&(a, b)| pair_distribution(state, &alice[a], &bob[b]).to_vec())
        .collect();
    CorrelationTable::new(scenario, probs)
}

/// Largest |eigenvalue| sum / 2, i.e. the trace distance of two states.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let e = crate::numkit::hermitian_eigen(&(a - b))?;
    Ok(0.5 * e.values.iter().map(|v| v.abs()).sum::<f64>())
}

pub(crate) fn require_odd(n: usize, min: usize) -> Result<()> {
    if n < min || n % 2 == 0 {
        return Err(Error::arg(format!("odd n ≥ {min} required, got {n}")));
    }
    Ok(())
}

pub(crate) fn ket3(v: [f64; 3]) -> Ket {
    Ket::new(v.iter().map(|&x| r(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projectors_of_spin_observables() {
        let o = spin_observable(0.7);
        let p0 = outcome_projector(&o, 0);
        assert!((&(&p0 * &p0) - &p0).max_abs() < 1e-15);
        assert!((p0.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_plus_correlates_equal_settings() {
        let o = spin_observable(1.1);
        let p = pair_distribution(&phi_plus(), &o, &o);
        assert!((p[0] + p[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn joint_measurement_rejects_noncommuting_pair() {
        let p = outcome_projector(&pauli_z(), 0);
        let q = outcome_projector(&pauli_x(), 0);
        assert!(joint_pair_measurement(&p, &q).is_err());
    }
}
