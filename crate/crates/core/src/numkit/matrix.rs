use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::{r, Ket, C64, STRUCT_TOL};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { r(1.0) } else { r(0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_real(rows: usize, cols: usize, xs: &[f64]) -> Self {
        assert_eq!(xs.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| r(xs[i * cols + j]))
    }

    pub fn diag(xs: &[f64]) -> Self {
        Self::from_fn(
            xs.len(),
            xs.len(),
            |i, j| if i == j { r(xs[i]) } else { r(0.0) },
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * s).collect(),
            ..*self
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// max_ij |M_ij − conj(M_ji)|; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < STRUCT_TOL
    }

    /// Max-entry distance to the identity of U U†.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&(self * &self.dagger()) - &Self::identity(self.rows)).max_abs()
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        assert_eq!(self.cols, k.dim(), "matrix-ket dimension mismatch");
        let a = k.amplitudes();
        Ket::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * a[j]).sum())
                .collect(),
        )
    }

    /// ⟨ψ|M|ψ⟩.
    pub fn expectation(&self, k: &Ket) -> C64 {
        let mk = self.apply(k);
        k.amplitudes()
            .iter()
            .zip(mk.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ‖AB − BA‖_F.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (&(self * other) - &(other * self)).frobenius_norm()
    }

    pub fn pow(&self, n: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in +"
        );
        ComplexMatrix {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..*self
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in -"
        );
        ComplexMatrix {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
            ..*self
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in *");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Kronecker product; the left factor's index varies slowest.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![r(0.0), C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 1.0), r(0.0)],
    ])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

/// σ⃗·n for an arbitrary (not necessarily unit) real 3-vector.
pub fn spin_along(n: [f64; 3]) -> ComplexMatrix {
    &(&pauli_x().scale_real(n[0]) + &pauli_y().scale_real(n[1])) + &pauli_z().scale_real(n[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn left_factor_varies_slowest() {
        let m = tensor(&pauli_z(), &ComplexMatrix::identity(2));
        assert_eq!(m, ComplexMatrix::diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn zz_stabilizes_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_real(&[s, 0.0, 0.0, s]);
        let zz = tensor(&pauli_z(), &pauli_z());
        let out = zz.apply(&bell);
        assert!(out.sub(&bell).norm() < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let xy = &pauli_x() * &pauli_y();
        assert!((&xy - &pauli_z().scale(C64::new(0.0, 1.0))).max_abs() < 1e-15);
        assert!(pauli_y().is_hermitian());
        assert!((pauli_x().commutator_norm(&pauli_z()) - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spin_along_squares_to_identity_for_unit_axis() {
        let n = [0.6, 0.0, 0.8];
        let s = spin_along(n);
        assert!((&(&s * &s) - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }
}
