//! Two-qubit realizations on |Φ⁺⟩: the n-ring OS game, its Bell-operator
//! certificate, the odd cycle game, and the single-qubit diachronic game.

use std::f64::consts::PI;

use super::{
    bipartite_born_table, outcome_projector, pair_distribution, phi_plus, require_odd,
    spin_observable, trace_distance, SosCertificate, SOS_TOL,
};
use crate::classical::{diachronic_target, TwoWingGame};
use crate::error::{Error, Result};
use crate::numkit::{eig_extrema, tensor, ComplexMatrix, C64, STRUCT_TOL};
use crate::scenario::CorrelationTable;

/// Observables A_a = cos φ_a σ_z + sin φ_a σ_x, φ_a = (n−1)π(a−1)/n.
pub fn ring_observables(n: usize) -> Vec<ComplexMatrix> {
    (1..=n)
        .map(|a| spin_observable((n - 1) as f64 * PI * (a - 1) as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone)]
pub struct BellOperatorSpec {
    pub n: usize,
    pub alice: Vec<ComplexMatrix>,
    pub bob: Vec<ComplexMatrix>,
    /// Σ_a A_aB_a − Σ_{b=a⊕1} A_aB_b − Σ_{a=b⊕1} A_aB_b on ℂ²⊗ℂ².
    pub operator: ComplexMatrix,
    /// λ_a = 1 − 2cos(2πa/n), a = 1..n.
    pub lambdas: Vec<f64>,
    pub omega: C64,
}

impl BellOperatorSpec {
    pub fn new(n: usize) -> Result<Self> {
        require_odd(n, 3)?;
        let id = ComplexMatrix::identity(2);
        let obs = ring_observables(n);
        for o in &obs {
            if (&(o * o) - &id).max_abs() >= STRUCT_TOL {
                return Err(Error::verify("ring observable does not square to 𝟙"));
            }
        }
        let alice: Vec<ComplexMatrix> = obs.iter().map(|o| tensor(o, &id)).collect();
        let bob: Vec<ComplexMatrix> = obs.iter().map(|o| tensor(&id, o)).collect();
        let mut operator = ComplexMatrix::zeros(4, 4);
        for a in 0..n {
            let next = (a + 1) % n;
            operator = &operator + &(&alice[a] * &bob[a]);
            operator = &operator - &(&alice[a] * &bob[next]);
            operator = &operator - &(&alice[next] * &bob[a]);
        }
        let lambdas = (1..=n)
            .map(|a| 1.0 - 2.0 * (2.0 * PI * a as f64 / n as f64).cos())
            .collect();
        let omega = C64::from_polar(1.0, -2.0 * PI / n as f64);
        Ok(BellOperatorSpec {
            n,
            alice,
            bob,
            operator,
            lambdas,
            omega,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MerminValue {
    pub r: f64,
    /// S_n = 6n(R_n − ½)
    pub s: f64,
}

/// 1/3 + (2/3)cos²(π/2n)
pub fn mermin_closed_form(n: usize) -> f64 {
    1.0 / 3.0 + 2.0 / 3.0 * (PI / (2.0 * n as f64)).cos().powi(2)
}

pub fn mermin_value(n: usize) -> Result<MerminValue> {
    require_odd(n, 3)?;
    let obs = ring_observables(n);
    let state = phi_plus();
    let r = TwoWingGame::os_ring(n)?.evaluate(|a, b| pair_distribution(&state, &obs[a], &obs[b]));
    let closed = mermin_closed_form(n);
    if (r - closed).abs() > 1e-10 {
        return Err(Error::verify(format!("R_{n} = {r}, closed form {closed}")));
    }
    Ok(MerminValue {
        r,
        s: 6.0 * n as f64 * (r - 0.5),
    })
}

/// Born table on the constrained ring cells (b = a, a⊕1, a⊖1).
pub fn mermin_table(n: usize) -> Result<CorrelationTable> {
    require_odd(n, 3)?;
    let obs = ring_observables(n);
    let pairs: Vec<(usize, usize)> = TwoWingGame::os_ring(n)?
        .cells
        .iter()
        .map(|c| (c.a, c.b))
        .collect();
    bipartite_born_table(&phi_plus(), &obs, &obs, &pairs)
}

/// Check n λ_{(n+1)/2} 𝟙 − B = ½Σ_a[(λ* + λ_a)v_{a−}†v_{a−} + (λ* − λ_a)v_{a+}†v_{a+}]
///   + ½λ*{Σ(𝟙 − A_a²) + Σ(𝟙 − B_b²)}
/// with v_{a±} = (2n)^{−½} Σ_k ω^{ak}(A_k ± B_k).
pub fn sos_certificate_bell(n: usize) -> Result<SosCertificate> {
    let spec = BellOperatorSpec::new(n)?;
    let nf = n as f64;
    let id = ComplexMatrix::identity(4);
    let lam_star = spec.lambdas[(n + 1) / 2 - 1];
    let lam_max = spec
        .lambdas
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let closed = 4.0 * (PI / (2.0 * nf)).cos().powi(2) - 1.0;
    if (lam_star - lam_max).abs() > STRUCT_TOL || (lam_star - closed).abs() > STRUCT_TOL {
        return Err(Error::verify(format!(
            "λ_(n+1)/2 = {lam_star}, max λ = {lam_max}, expected {closed}"
        )));
    }

    let lhs = &id.scale_real(nf * lam_star) - &spec.operator;
    let mut rhs = ComplexMatrix::zeros(4, 4);
    let mut min_coef = f64::INFINITY;
    let norm = 1.0 / (2.0 * nf).sqrt();
    for a in 1..=n {
        let mut vm = ComplexMatrix::zeros(4, 4);
        let mut vp = ComplexMatrix::zeros(4, 4);
        for k in 1..=n {
            let w = spec.omega.powi((a * k) as i32) * norm;
            vm = &vm + &(&spec.alice[k - 1] - &spec.bob[k - 1]).scale(w);
            vp = &vp + &(&spec.alice[k - 1] + &spec.bob[k - 1]).scale(w);
        }
        let lam = spec.lambdas[a - 1];
        min_coef = min_coef.min(lam_star + lam).min(lam_star - lam);
        rhs = &rhs + &(&vm.dagger() * &vm).scale_real(0.5 * (lam_star + lam));
        rhs = &rhs + &(&vp.dagger() * &vp).scale_real(0.5 * (lam_star - lam));
    }
    let mut squares = ComplexMatrix::zeros(4, 4);
    for o in spec.alice.iter().chain(&spec.bob) {
        squares = &squares + &(&id - &(o * o));
    }
    rhs = &rhs + &squares.scale_real(0.5 * lam_star);

    let residual = (&lhs - &rhs).frobenius_norm();
    let bound = nf * closed;
    let extremum = eig_extrema(&spec.operator)?.max;
    let passed =
        residual < SOS_TOL && min_coef >= -STRUCT_TOL && (extremum - bound).abs() < SOS_TOL;
    Ok(SosCertificate {
        n,
        residual,
        min_coefficient: min_coef,
        certified_bound: bound,
        extremum,
        passed,
    })
}

/// Bob's observables rotated by π/2n on the Bloch circle (π/4n in Hilbert
/// space) relative to Alice's.
fn odd_cycle_bob(n: usize) -> Vec<ComplexMatrix> {
    let shift = PI / (2.0 * n as f64);
    (1..=n)
        .map(|b| spin_observable((n - 1) as f64 * PI * (b - 1) as f64 / n as f64 + shift))
        .collect()
}

pub fn odd_cycle_game_value(n: usize) -> Result<f64> {
    require_odd(n, 3)?;
    let alice = ring_observables(n);
    let bob = odd_cycle_bob(n);
    let state = phi_plus();
    let r =
        TwoWingGame::odd_cycle(n)?.evaluate(|a, b| pair_distribution(&state, &alice[a], &bob[b]));
    let closed = (PI / (4.0 * n as f64)).cos().powi(2);
    if (r - closed).abs() > 1e-10 {
        return Err(Error::verify(format!(
            "odd cycle value {r}, closed form {closed}"
        )));
    }
    Ok(r)
}

pub fn odd_cycle_table(n: usize) -> Result<CorrelationTable> {
    require_odd(n, 3)?;
    let pairs: Vec<(usize, usize)> = TwoWingGame::odd_cycle(n)?
        .cells
        .iter()
        .map(|c| (c.a, c.b))
        .collect();
    bipartite_born_table(&phi_plus(), &ring_observables(n), &odd_cycle_bob(n), &pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiachronicValue {
    pub r: f64,
    /// max_{t,t′} trace distance between the b-averaged preparations.
    pub obliviousness_defect: f64,
    /// Worst success over y = t contexts.
    pub same_setting: f64,
    /// Worst success over y ≠ t contexts.
    pub cross_setting: f64,
    /// success[t][b][y]
    pub success: Vec<Vec<Vec<f64>>>,
}

/// Preparations |φ_{t,b}⟩: the (−1)^b eigenstate of the trine observable
/// A_t; measurement M_y reads A_y.
pub fn diachronic_quantum() -> Result<DiachronicValue> {
    let trine = ring_observables(3);
    let states: Vec<Vec<ComplexMatrix>> = trine
        .iter()
        .map(|o| (0..2u8).map(|b| outcome_projector(o, b)).collect())
        .collect();

    let mut success = vec![vec![vec![0.0; 3]; 2]; 3];
    let mut total = 0.0;
    let (mut same, mut cross) = (f64::INFINITY, f64::INFINITY);
    for t in 0..3 {
        for b in 0..2u8 {
            let rho = &states[t][b as usize];
            for y in 0..3 {
                let target = diachronic_target(t, b, y);
                let p = (&outcome_projector(&trine[y], target) * rho).trace().re;
                success[t][b as usize][y] = p;
                total += p;
                if y == t {
                    same = same.min(p);
                } else {
                    cross = cross.min(p);
                }
            }
        }
    }
    let mixtures: Vec<ComplexMatrix> = states
        .iter()
        .map(|s| (&s[0] + &s[1]).scale_real(0.5))
        .collect();
    let mut defect: f64 = 0.0;
    for t in 0..3 {
        for u in t + 1..3 {
            defect = defect.max(trace_distance(&mixtures[t], &mixtures[u])?);
        }
    }
    Ok(DiachronicValue {
        r: total / 18.0,
        obliviousness_defect: defect,
        same_setting: same,
        cross_setting: cross,
        success,
    })
}
