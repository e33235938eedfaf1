use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex square matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix<const N: usize>(#[serde(with = "serde_arrays")] pub [[C64; N]; N]);

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub const fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Hilbert-Schmidt inner product `Tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..N {
            for j in 0..N {
                acc += self.0[i][j].conj() * other.0[i][j];
            }
        }
        acc
    }

    /// `‖M†M − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).frobenius_norm()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Matrix<2> {
    pub fn determinant(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Kronecker product `self ⊗ other`; `self` acts on the first (most significant) qubit.
    pub fn kron(&self, other: &Matrix<2>) -> Matrix<4> {
        Matrix::<4>::from_fn(|r, c| self.0[r / 2][c / 2] * other.0[r % 2][c % 2])
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

/// Pauli matrices.
pub mod pauli {
    use super::{Matrix2, I, ONE, ZERO};

    pub const ID: Matrix2 = Matrix2::new_const([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Matrix2 = Matrix2::new_const([[ZERO, ONE], [ONE, ZERO]]);
    pub const Y: Matrix2 = Matrix2::new_const([[ZERO, super::C64::new(0.0, -1.0)], [I, ZERO]]);
    pub const Z: Matrix2 = Matrix2::new_const([[ONE, ZERO], [ZERO, super::C64::new(-1.0, 0.0)]]);

    /// `[X, Y, Z]`, indexed by axis.
    pub const XYZ: [Matrix2; 3] = [X, Y, Z];
}

impl Matrix<2> {
    pub const fn new_const(entries: [[C64; 2]; 2]) -> Self {
        Matrix(entries)
    }
}

/// Tolerance on `‖U†U − I‖_F` accepted by [`Unitary::new`].
pub const UNITARITY_TOL: f64 = 1e-9;

/// A matrix known to be unitary.
///
/// Products of unitaries stay unitary; the only fallible constructor is
/// [`Unitary::new`], which checks the defect.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix<N>", into = "Matrix<N>")]
pub struct Unitary<const N: usize>(Matrix<N>);

pub type Unitary2 = Unitary<2>;
pub type Unitary4 = Unitary<4>;

impl<const N: usize> Unitary<N> {
    pub fn new(m: Matrix<N>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        let defect = m.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::invalid(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Unitary(m))
    }

    pub(crate) fn new_unchecked(m: Matrix<N>) -> Self {
        Unitary(m)
    }

    pub fn identity() -> Self {
        Unitary(Matrix::identity())
    }

    pub fn matrix(&self) -> &Matrix<N> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    /// Multiply by a global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        Unitary(self.0.scale(C64::from_polar(1.0, phi)))
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.0.unitarity_defect()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).frobenius_norm()
    }
}

impl Unitary<2> {
    pub fn kron(&self, other: &Unitary<2>) -> Unitary<4> {
        Unitary(self.0.kron(&other.0))
    }
}

impl<const N: usize> Mul for Unitary<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Unitary(self.0 * rhs.0)
    }
}

impl<const N: usize> TryFrom<Matrix<N>> for Unitary<N> {
    type Error = Error;

    fn try_from(m: Matrix<N>) -> Result<Self> {
        Unitary::new(m)
    }
}

impl<const N: usize> From<Unitary<N>> for Matrix<N> {
    fn from(u: Unitary<N>) -> Self {
        u.0
    }
}

/// Serialize `[[C64; N]; N]` as nested sequences of `[re, im]` pairs.
mod serde_arrays {
    use super::C64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(
        m: &[[C64; N]; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = m
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[[C64; N]; N], D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        if rows.len() != N || rows.iter().any(|r| r.len() != N) {
            return Err(D::Error::custom(format!("expected a {N}x{N} matrix")));
        }
        let mut out = [[C64::new(0.0, 0.0); N]; N];
        for (i, row) in rows.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                out[i][j] = C64::new(z[0], z[1]);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        use pauli::*;
        assert_eq!(X * Y, Z.scale(I));
        assert_eq!(Y * Z, X.scale(I));
        assert_eq!(Z * X, Y.scale(I));
        for p in XYZ {
            assert_eq!(p * p, ID);
            assert_eq!(p.trace(), ZERO);
        }
    }

    #[test]
    fn kron_ordering() {
        let zi = pauli::Z.kron(&pauli::ID);
        let diag: Vec<f64> = (0..4).map(|i| zi.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = pauli::X.scale_real(1.1);
        assert!(matches!(Unitary::new(m), Err(Error::InvalidArgument(_))));
        assert!(Unitary::new(pauli::Y).is_ok());
    }
}
