//! Hermitian eigenproblems via the real-symmetric embedding
//!
//! ```text
//!   H = A + iB   ↦   S = [[A, −B], [B, A]]
//! ```
//!
//! Every eigenvalue of H appears twice in S, and an S-eigenvector (x, y) maps
//! to the H-eigenvector x + iy. Within a degenerate cluster the 2k real
//! columns span (over ℂ) the k-dimensional eigenspace; pivoted Gram–Schmidt
//! picks an orthonormal basis out of them.

use super::{c, r, symmetric_eigen, ComplexMatrix, Ket, C64, MAX_DIM, PSD_TOL, STRUCT_TOL};
use crate::error::{Error, Result};

/// Eigenvalues closer than this (relative to the spectral scale) are treated
/// as one degenerate cluster when recovering complex eigenvectors.
const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal, phase-canonicalized; `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Ket>,
}

#[derive(Debug, Clone)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    pub max_vec: Ket,
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > MAX_DIM {
        return Err(Error::TooLarge(format!(
            "dimension {} exceeds {MAX_DIM}",
            m.rows()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect >= STRUCT_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let d = m.rows();
    let embed: Vec<Vec<f64>> = (0..2 * d)
        .map(|i| {
            (0..2 * d)
                .map(|j| {
                    let z = m[(i % d, j % d)];
                    match (i < d, j < d) {
                        (true, true) | (false, false) => z.re,
                        (true, false) => -z.im,
                        (false, true) => z.im,
                    }
                })
                .collect()
        })
        .collect();
    let (svals, svecs) = symmetric_eigen(&embed);

    let scale = svals.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<Ket> = Vec::with_capacity(d);
    let mut start = 0;
    while start < 2 * d {
        let mut end = start + 1;
        while end < 2 * d && svals[end] - svals[end - 1] <= CLUSTER_TOL * scale {
            end += 1;
        }
        let k = ((end - start) + 1) / 2;
        let candidates: Vec<Ket> = (start..end)
            .map(|col| {
                Ket::new(
                    (0..d)
                        .map(|i| c(svecs[col][i], svecs[col][i + d]))
                        .collect(),
                )
            })
            .collect();
        let picked = pivoted_gram_schmidt(&candidates, &vectors, k.min(d - vectors.len()));
        // S-eigenvalues of a cluster come in pairs; average each pair.
        for (n, v) in picked.into_iter().enumerate() {
            let lo = start + 2 * n;
            let hi = (lo + 1).min(end - 1);
            values.push(0.5 * (svals[lo] + svals[hi]));
            vectors.push(v.with_canonical_phase());
        }
        start = end;
    }
    if vectors.len() != d {
        return Err(Error::verify(format!(
            "eigenvector recovery found {} of {d} vectors",
            vectors.len()
        )));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Greedily take the candidate with the largest residual after projecting out
/// everything already chosen (including `prior`, earlier clusters).
fn pivoted_gram_schmidt(candidates: &[Ket], prior: &[Ket], k: usize) -> Vec<Ket> {
    let mut chosen: Vec<Ket> = Vec::with_capacity(k);
    for _ in 0..k {
        let best = candidates
            .iter()
            .map(|cand| {
                let mut v = cand.clone();
                for b in prior.iter().chain(&chosen) {
                    let ov: C64 = dot(b, &v);
                    v = v.sub(&b.scale(ov));
                }
                v
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()));
        match best {
            Some(v) if v.norm() > 1e-6 => chosen.push(v.scale(r(1.0 / v.norm()))),
            _ => break,
        }
    }
    chosen
}

fn dot(a: &Ket, b: &Ket) -> C64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

pub fn eig_extrema(m: &ComplexMatrix) -> Result<Extrema> {
    let e = hermitian_eigen(m)?;
    let last = e.values.len() - 1;
    Ok(Extrema {
        min: e.values[0],
        max: e.values[last],
        max_vec: e.vectors[last].clone(),
    })
}

/// Minimum eigenvalue ≥ −PSD_TOL.
pub fn is_psd(m: &ComplexMatrix) -> Result<bool> {
    Ok(hermitian_eigen(m)?.values[0] > -PSD_TOL)
}

/// Principal square root of a PSD matrix; eigenvalues within PSD_TOL below
/// zero are clamped.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eigen(m)?;
    if e.values[0] < -PSD_TOL {
        return Err(Error::arg(format!(
            "matrix is not PSD (min eigenvalue {:.3e})",
            e.values[0]
        )));
    }
    let d = m.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (lam, v) in e.values.iter().zip(&e.vectors) {
        out = &out + &v.projector().scale_real(lam.max(0.0).sqrt());
    }
    Ok(out)
}
