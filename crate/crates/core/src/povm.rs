//! Unsharp qubit spin observables E^k_± = 𝟙/2 ± (η/2) σ⃗·n̂_k: joint
//! measurability thresholds, the simulating POVM that saturates the
//! sufficient one, state-independent anti-correlation, and the bound a
//! generalized-noncontextual model places on that anti-correlation.
//!
//! Sign tuples (X₁,…,X_N) are indexed by t ∈ [0, 2^N) with X_k = +1 when bit
//! N−1−k of t is clear, so t = 0 is (+,…,+).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkit::vec3::{self, V3};
use crate::numkit::{is_psd, spin_along, ComplexMatrix, STRUCT_TOL};

pub const MAX_AXES: usize = 8;
/// Completeness / marginal tolerance for simulating POVMs.
pub const POVM_TOL: f64 = 1e-10;
/// States used to confirm state independence.
pub const STATE_SAMPLES: usize = 20;
const STATE_SEED: u64 = 0x5eed_b10c;

fn check_axes(axes: &[V3]) -> Result<()> {
    if axes.is_empty() || axes.len() > MAX_AXES {
        return Err(Error::arg(format!(
            "need 1..={MAX_AXES} axes, got {}",
            axes.len()
        )));
    }
    for (k, a) in axes.iter().enumerate() {
        if a.iter().any(|x| !x.is_finite()) || (vec3::norm(*a) - 1.0).abs() > STRUCT_TOL {
            return Err(Error::arg(format!(
                "axis {} is not a unit vector: {a:?}",
                k + 1
            )));
        }
    }
    Ok(())
}

fn sign_of(t: usize, k: usize, n: usize) -> i8 {
    if (t >> (n - 1 - k)) & 1 == 0 {
        1
    } else {
        -1
    }
}

pub fn label_string(signs: &[i8]) -> String {
    signs
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisPreset {
    Orthogonal2,
    Orthogonal3,
    Trine2,
    Trine3,
}

impl AxisPreset {
    pub const ALL: [AxisPreset; 4] = [
        Self::Orthogonal2,
        Self::Orthogonal3,
        Self::Trine2,
        Self::Trine3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Orthogonal2 => "orthogonal2",
            Self::Orthogonal3 => "orthogonal3",
            Self::Trine2 => "trine2",
            Self::Trine3 => "trine3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// ẑ, x̂, ŷ for the orthogonal family; the planar trine
    /// (0,0,1), (√3/2,0,−½), (−√3/2,0,−½). The trine pair is n̂₁, n̂₃.
    pub fn axes(self) -> Vec<V3> {
        let h = 3f64.sqrt() / 2.0;
        let trine = [[0.0, 0.0, 1.0], [h, 0.0, -0.5], [-h, 0.0, -0.5]];
        match self {
            Self::Orthogonal2 => vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
            Self::Orthogonal3 => vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            Self::Trine2 => vec![trine[0], trine[2]],
            Self::Trine3 => trine.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoisySpinSet {
    axes: Vec<V3>,
    eta: f64,
}

impl NoisySpinSet {
    pub fn new(axes: Vec<V3>, eta: f64) -> Result<Self> {
        check_axes(&axes)?;
        if !(-STRUCT_TOL..=1.0 + STRUCT_TOL).contains(&eta) {
            return Err(Error::arg(format!(
                "sharpness must lie in [0,1], got {eta}"
            )));
        }
        Ok(NoisySpinSet {
            axes,
            eta: eta.clamp(0.0, 1.0),
        })
    }

    pub fn axes(&self) -> &[V3] {
        &self.axes
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// E^k_x for x = ±1.
    pub fn effect(&self, k: usize, x: i8) -> ComplexMatrix {
        let s = if x > 0 { 0.5 } else { -0.5 } * self.eta;
        &ComplexMatrix::identity(2).scale_real(0.5) + &spin_along(self.axes[k]).scale_real(s)
    }
}

/// m⃗ = Σ_{k∈subset} X_k n̂_k for every sign tuple on `subset`.
pub fn m_vectors(axes: &[V3], subset: &[usize]) -> Result<Vec<(Vec<i8>, V3)>> {
    check_axes(axes)?;
    if subset.is_empty() {
        return Err(Error::arg("subset must be nonempty"));
    }
    if let Some(&k) = subset.iter().find(|&&k| k >= axes.len()) {
        return Err(Error::arg(format!("axis index {} out of range", k + 1)));
    }
    let n = subset.len();
    Ok((0..1usize << n)
        .map(|t| {
            let signs: Vec<i8> = (0..n).map(|k| sign_of(t, k, n)).collect();
            let m = subset.iter().zip(&signs).fold([0.0; 3], |acc, (&k, &x)| {
                vec3::add(acc, vec3::scale(axes[k], x as f64))
            });
            (signs, m)
        })
        .collect())
}

fn all_m(axes: &[V3]) -> Result<Vec<(Vec<i8>, V3)>> {
    m_vectors(axes, &(0..axes.len()).collect::<Vec<_>>())
}

/// (Σ|m⃗|²) / (N Σ|m⃗|): joint measurability of all N requires η at most this.
pub fn eta_necessary(axes: &[V3]) -> Result<f64> {
    let ms = all_m(axes)?;
    let sum: f64 = ms.iter().map(|(_, m)| vec3::norm(*m)).sum();
    let sq: f64 = ms.iter().map(|(_, m)| vec3::dot(*m, *m)).sum();
    Ok(sq / (axes.len() as f64 * sum))
}

/// 2^N / Σ|m⃗|: the simulating POVM exists up to this η.
pub fn eta_sufficient(axes: &[V3]) -> Result<f64> {
    let ms = all_m(axes)?;
    let sum: f64 = ms.iter().map(|(_, m)| vec3::norm(*m)).sum();
    Ok(ms.len() as f64 / sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    JointlyMeasurable,
    NotJointlyMeasurable,
    /// Between the sufficient and the necessary threshold.
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::JointlyMeasurable => "jointly measurable",
            Verdict::NotJointlyMeasurable => "not jointly measurable",
            Verdict::Indeterminate => "indeterminate by these criteria",
        }
    }
}

pub fn joint_measurability(axes: &[V3], eta: f64) -> Result<Verdict> {
    let (suf, nec) = (eta_sufficient(axes)?, eta_necessary(axes)?);
    Ok(if eta <= suf + STRUCT_TOL {
        Verdict::JointlyMeasurable
    } else if eta > nec + STRUCT_TOL {
        Verdict::NotJointlyMeasurable
    } else {
        Verdict::Indeterminate
    })
}

#[derive(Debug, Clone)]
pub struct JointPovm {
    pub labels: Vec<Vec<i8>>,
    pub effects: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
    /// Sharpness of the marginals.
    pub eta: f64,
}

impl JointPovm {
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .effects
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, e| &acc + e);
        (&sum - &ComplexMatrix::identity(2)).max_abs()
    }

    /// Σ over tuples with X_k = x.
    pub fn marginal(&self, k: usize, x: i8) -> ComplexMatrix {
        self.labels
            .iter()
            .zip(&self.effects)
            .filter(|(l, _)| l[k] == x)
            .fold(ComplexMatrix::zeros(2, 2), |acc, (_, e)| &acc + e)
    }

    /// Largest deviation of any marginal from the noisy spin effect it should
    /// reproduce.
    pub fn marginal_defect(&self, target: &NoisySpinSet) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..target.axes().len() {
            for x in [1i8, -1] {
                worst = worst.max((&self.marginal(k, x) - &target.effect(k, x)).max_abs());
            }
        }
        worst
    }

    /// Sum of the effects whose labels satisfy `pred`.
    pub fn coarse_grain(&self, pred: impl Fn(&[i8]) -> bool) -> ComplexMatrix {
        self.labels
            .iter()
            .zip(&self.effects)
            .filter(|(l, _)| pred(l))
            .fold(ComplexMatrix::zeros(2, 2), |acc, (_, e)| &acc + e)
    }
}

/// F_X = (2|m⃗_X| / Σ|m⃗|)(𝟙/2 + σ⃗·m̂_X/2), the zero effect where m⃗_X = 0.
pub fn simulating_povm(axes: &[V3]) -> Result<JointPovm> {
    let ms = all_m(axes)?;
    let total: f64 = ms.iter().map(|(_, m)| vec3::norm(*m)).sum();
    if total < STRUCT_TOL {
        return Err(Error::arg("every m-vector vanishes"));
    }
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let mut labels = Vec::with_capacity(ms.len());
    let mut effects = Vec::with_capacity(ms.len());
    let mut weights = Vec::with_capacity(ms.len());
    for (signs, m) in ms {
        let len = vec3::norm(m);
        let w = 2.0 * len / total;
        let effect = match vec3::unit(m) {
            Some(u) if len > STRUCT_TOL => (&half + &spin_along(u).scale_real(0.5)).scale_real(w),
            _ => ComplexMatrix::zeros(2, 2),
        };
        labels.push(signs);
        effects.push(effect);
        weights.push(w);
    }
    let povm = JointPovm {
        labels,
        effects,
        weights,
        eta: eta_sufficient(axes)?,
    };
    let completeness = povm.completeness_defect();
    if completeness > POVM_TOL {
        return Err(Error::verify(format!(
            "simulating POVM incomplete (defect {completeness:.3e})"
        )));
    }
    for e in &povm.effects {
        if !is_psd(e)? {
            return Err(Error::verify("simulating POVM has a non-PSD effect"));
        }
    }
    let target = NoisySpinSet::new(axes.to_vec(), povm.eta)?;
    let marg = povm.marginal_defect(&target);
    if marg > POVM_TOL {
        return Err(Error::verify(format!(
            "simulating POVM marginals off by {marg:.3e}"
        )));
    }
    Ok(povm)
}

/// Density matrices with Bloch vectors drawn uniformly from the unit ball.
pub fn random_qubit_states(count: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    (0..count)
        .map(|_| loop {
            let v: V3 = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if vec3::dot(v, v) <= 1.0 {
                break &half + &spin_along(v).scale_real(0.5);
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Anticorrelation {
    /// R averaged uniformly over pairs.
    pub value: f64,
    pub per_pair: Vec<((usize, usize), f64)>,
    /// Sharpness at which each pair is jointly measured.
    pub pair_etas: Vec<f64>,
    /// max − min of R over the sampled states.
    pub spread: f64,
}

/// Probability that a jointly measured pair disagrees, averaged over all
/// pairs, with each pair measured by its simulating POVM.
pub fn anticorrelation_value(axes: &[V3]) -> Result<Anticorrelation> {
    check_axes(axes)?;
    if axes.len() < 2 {
        return Err(Error::arg("anti-correlation needs at least two axes"));
    }
    let mut anti_ops = Vec::new();
    let mut pair_etas = Vec::new();
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            let povm = simulating_povm(&[axes[i], axes[j]])?;
            anti_ops.push(((i, j), povm.coarse_grain(|l| l[0] != l[1])));
            pair_etas.push(povm.eta);
        }
    }
    let states = random_qubit_states(STATE_SAMPLES, STATE_SEED);
    let npairs = anti_ops.len() as f64;
    let values: Vec<f64> = states
        .iter()
        .map(|rho| {
            anti_ops
                .iter()
                .map(|(_, a)| (rho * a).trace().re)
                .sum::<f64>()
                / npairs
        })
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // State independence means each coarse-grained operator is c·𝟙; read c off
    // the trace.
    let per_pair = anti_ops
        .iter()
        .map(|&(p, ref a)| (p, 0.5 * a.trace().re))
        .collect::<Vec<_>>();
    let value = per_pair.iter().map(|(_, v)| v).sum::<f64>() / npairs;
    Ok(Anticorrelation {
        value,
        per_pair,
        pair_etas,
        spread: hi - lo,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcBound {
    pub eta: f64,
    /// 1 − η/3
    pub bound: f64,
    /// Maximum over the (β, δ) grid and all deterministic triples.
    pub grid_max: f64,
    pub grid_points: usize,
    /// Maximum over the vertices of the feasible (β, δ) polygon.
    pub vertex_max: f64,
}

/// Pair response p(X_i,X_j|λ) = α[X_i][X_j] + β[X_i]·u + γ·u[X_j] + δ·(equal
/// noise) + ε·(opposite noise) with u uniform, β = γ, α + β = η and
/// β + δ + ε = 1 − η. Returns R averaged over the three pairs of the triple
/// `assignment` (bit k = X_k).
fn response_r3(eta: f64, beta: f64, delta: f64, assignment: u8) -> f64 {
    let alpha = eta - beta;
    let eps = 1.0 - eta - beta - delta;
    let bit = |k: u8| (assignment >> k) & 1;
    let disagreements = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter(|&&(i, j)| bit(i) != bit(j))
        .count() as f64;
    // Per pair: α·d + (β + γ)/2 + ε, δ never anti-correlates.
    (alpha * disagreements + 3.0 * (beta + eps)) / 3.0
}

pub fn nc_bound_noisy(eta: f64) -> Result<NcBound> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::arg(format!(
            "sharpness must lie in [0,1], got {eta}"
        )));
    }
    let bound = 1.0 - eta / 3.0;
    let step = 1e-3;
    let beta_max = eta.min(1.0 - eta);
    let mut grid_max = f64::NEG_INFINITY;
    let mut grid_points = 0usize;
    let nb = (beta_max / step).floor() as usize;
    for ib in 0..=nb {
        let beta = ib as f64 * step;
        let nd = ((1.0 - eta - beta).max(0.0) / step).floor() as usize;
        for id in 0..=nd {
            let delta = id as f64 * step;
            for x in 0..8u8 {
                grid_max = grid_max.max(response_r3(eta, beta, delta, x));
            }
            grid_points += 1;
        }
    }
    let vertices = [
        (0.0, 0.0),
        (beta_max, 0.0),
        (0.0, 1.0 - eta),
        (beta_max, 1.0 - eta - beta_max),
    ];
    let vertex_max = vertices
        .iter()
        .flat_map(|&(b, d)| (0..8u8).map(move |x| response_r3(eta, b, d, x)))
        .fold(f64::NEG_INFINITY, f64::max);
    if grid_max > bound + STRUCT_TOL || (vertex_max - bound).abs() > STRUCT_TOL {
        return Err(Error::verify(format!(
            "response-function search disagrees with 1 − η/3: grid {grid_max}, vertices {vertex_max}, bound {bound}"
        )));
    }
    Ok(NcBound {
        eta,
        bound,
        grid_max,
        grid_points,
        vertex_max,
    })
}
