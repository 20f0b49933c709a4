//! Dense complex linear algebra for the small Hilbert spaces used throughout
//! the crate (dimension ≤ 16).
//!
//! Everything here is a pure function of its inputs. Eigenproblems are solved
//! by cyclic Jacobi on the real-symmetric embedding, see [`eigen`].

mod eigen;
mod matrix;
mod real;

pub use eigen::{eig_extrema, hermitian_eigen, hermitian_sqrt, is_psd, Extrema, HermitianEigen};
pub use matrix::{pauli_x, pauli_y, pauli_z, spin_along, tensor, ComplexMatrix};
pub use real::{rank, singular_values, solve, symmetric_eigen};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Structural identities (orthogonality, normalization, operator identities
/// that hold exactly in exact arithmetic).
pub const STRUCT_TOL: f64 = 1e-12;
/// Results of eigen-solves and optimizations.
pub const NUM_TOL: f64 = 1e-9;
/// Slack allowed below zero before a matrix stops counting as PSD.
pub const PSD_TOL: f64 = 1e-10;
/// Largest Hilbert-space dimension the solvers accept.
pub const MAX_DIM: usize = 16;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(!amps.is_empty(), "a ket needs at least one amplitude");
        Ket { amps }
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Ket::new(xs.iter().map(|&x| r(x)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![C64::default(); dim];
        amps[k] = r(1.0);
        Ket::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < STRUCT_TOL
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Ket> {
        let n = self.norm();
        if n < STRUCT_TOL {
            return Err(Error::arg("cannot normalize a zero ket"));
        }
        Ok(self.scale(r(1.0 / n)))
    }

    pub fn scale(&self, s: C64) -> Ket {
        Ket::new(self.amps.iter().map(|a| a * s).collect())
    }

    pub fn conj(&self) -> Ket {
        Ket::new(self.amps.iter().map(|a| a.conj()).collect())
    }

    pub fn add(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket::new(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket::new(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// |ψ⟩⟨ψ| (not renormalized).
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                out.push(a * b);
            }
        }
        Ket::new(out)
    }

    /// Rotate the global phase so the largest-magnitude amplitude is real and
    /// positive (first such index on near-ties).
    pub fn with_canonical_phase(&self) -> Ket {
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let pivot = self
            .amps
            .iter()
            .find(|a| a.norm() >= max - STRUCT_TOL)
            .copied()
            .unwrap();
        self.scale(pivot.conj() / pivot.norm())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }
}

pub fn inner_product(a: &Ket, b: &Ket) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("⟨{}|{}⟩", a.dim(), b.dim())));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Real 3-vector helpers for the Bloch-sphere and star-polygon geometry.
pub mod vec3 {
    pub type V3 = [f64; 3];

    pub fn dot(a: V3, b: V3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn cross(a: V3, b: V3) -> V3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn norm(a: V3) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn scale(a: V3, s: f64) -> V3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn add(a: V3, b: V3) -> V3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn unit(a: V3) -> Option<V3> {
        let n = norm(a);
        (n > super::STRUCT_TOL).then(|| scale(a, 1.0 / n))
    }
}
