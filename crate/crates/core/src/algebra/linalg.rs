//! Small dense eigen- and singular-value routines built on Jacobi rotations.
//!
//! Everything here works on fixed-size matrices (N ≤ 4 in practice), where
//! cyclic Jacobi converges in a handful of sweeps and is accurate to the last
//! few ulps.

use super::matrix::{Matrix, Unitary, C64, ZERO};

/// Off-diagonal Frobenius norm at which the cyclic sweep stops, relative to `‖A‖_F`.
pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix, `A = V diag(λ) V†`.
#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    /// Eigenvectors as columns.
    pub vectors: Matrix<N>,
}

fn off_diagonal_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                acc += a.0[i][j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi. The input is assumed Hermitian; only its Hermitian
/// part is effectively used.
pub fn hermitian_eigen<const N: usize>(m: &Matrix<N>) -> HermitianEigen<N> {
    let mut a = *m;
    let mut v = Matrix::<N>::identity();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let mag = apq.norm();
                if mag <= f64::EPSILON * 1e-3 * scale {
                    continue;
                }
                // Phase rotation makes a_pq real, then a real Jacobi rotation zeroes it.
                let phase = apq / mag;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = D·P with D = diag(.., 1 @p, .., e^{-iφ} @q, ..), P the real rotation.
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A ← A G
                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * g_pp + akq * g_qp;
                    a.0[k][q] = akp * g_pq + akq * g_qq;
                }
                // A ← G† A
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
                a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
                // V ← V G
                for k in 0..N {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * g_pp + vkq * g_qp;
                    v.0[k][q] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut values = [0.0; N];
    for (i, val) in values.iter_mut().enumerate() {
        *val = a.0[i][i].re;
    }
    HermitianEigen { values, vectors: v }
}

impl<const N: usize> HermitianEigen<N> {
    /// `V diag(f(λ)) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> Matrix<N> {
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        Matrix::from_fn(|i, j| {
            let mut acc = ZERO;
            for k in 0..N {
                acc += v.0[i][k] * fv[k] * v.0[j][k].conj();
            }
            acc
        })
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.vectors.0[i][k];
        }
        out
    }
}

/// Singular value decomposition `A = U diag(σ) V†`, σ sorted descending.
#[derive(Clone, Copy, Debug)]
pub struct Svd<const N: usize> {
    pub u: Matrix<N>,
    pub singular_values: [f64; N],
    pub v: Matrix<N>,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Orthogonalizes columns directly, so small singular values are accurate to
/// `ε·‖A‖` rather than `√ε·‖A‖` as they would be through `A†A`.
pub fn svd<const N: usize>(m: &Matrix<N>) -> Svd<N> {
    let mut a = *m;
    let mut v = Matrix::<N>::identity();
    let col_dot = |a: &Matrix<N>, p: usize, q: usize| -> C64 {
        let mut acc = ZERO;
        for k in 0..N {
            acc += a.0[k][p].conj() * a.0[k][q];
        }
        acc
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let alpha = col_dot(&a, p, p).re;
                let beta = col_dot(&a, q, q).re;
                let gamma = col_dot(&a, p, q);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // a_q is first rephased by e^{-iφ} so that a_p† a_q is real.
                let rot = |x: &mut Matrix<N>| {
                    for k in 0..N {
                        let xp = x.0[k][p];
                        let xq = x.0[k][q] * phase.conj();
                        x.0[k][p] = xp * c - xq * s;
                        x.0[k][q] = xp * s + xq * c;
                    }
                };
                rot(&mut a);
                rot(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    let norms: Vec<f64> = (0..N).map(|j| col_dot(&a, j, j).re.sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Matrix::<N>::zeros();
    let mut vs = Matrix::<N>::zeros();
    let mut sv = [0.0; N];
    for (dst, &src) in order.iter().enumerate() {
        sv[dst] = norms[src];
        for k in 0..N {
            vs.0[k][dst] = v.0[k][src];
            u.0[k][dst] = if norms[src] > 0.0 {
                a.0[k][src] / norms[src]
            } else {
                ZERO
            };
        }
    }
    Svd {
        u,
        singular_values: sv,
        v: vs,
    }
}

/// Nearest unitary in Frobenius norm (unitary polar factor `M (M†M)^{-1/2}`).
///
/// Returns `None` when `M` is singular to working precision.
pub fn polar_unitary<const N: usize>(m: &Matrix<N>) -> Option<Unitary<N>> {
    let gram = m.adjoint() * *m;
    let eig = hermitian_eigen(&gram);
    let floor = eig.values.iter().cloned().fold(0.0, f64::max) * 1e-24;
    if eig.values.iter().any(|&l| l <= floor) {
        return None;
    }
    let inv_sqrt = eig.apply(|l| C64::new(1.0 / l.sqrt(), 0.0));
    Some(Unitary::new_unchecked(*m * inv_sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::pauli;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian<const N: usize>(rng: &mut ChaCha8Rng) -> Matrix<N> {
        let m = Matrix::<N>::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (m + m.adjoint()).scale_real(0.5)
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = random_hermitian::<4>(&mut rng);
            let eig = hermitian_eigen(&h);
            let back = eig.apply(|l| C64::new(l, 0.0));
            assert!((back - h).frobenius_norm() < 1e-12);
            assert!(eig.vectors.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn eigen_of_diagonal_and_degenerate() {
        let h = pauli::Z.kron(&pauli::Z);
        let eig = hermitian_eigen(&h);
        let mut vals = eig.values.to_vec();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![-1.0, -1.0, 1.0, 1.0]);
        let zero = hermitian_eigen(&Matrix::<4>::zeros());
        assert_eq!(zero.values, [0.0; 4]);
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = Matrix::<4>::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let d = svd(&m);
            let s = Matrix::<4>::from_fn(|i, j| if i == j { C64::new(d.singular_values[i], 0.0) } else { ZERO });
            let back = d.u * s * d.v.adjoint();
            assert!((back - m).frobenius_norm() < 1e-12);
            assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_rank_one_small_singular_values() {
        let a = Matrix::<4>::from_fn(|i, _| C64::new(1.0 + i as f64, 0.5));
        let b = Matrix::<4>::from_fn(|i, j| if j == 0 { C64::new(0.3 * i as f64 - 0.2, -0.7) } else { ZERO });
        let outer = a * b.adjoint();
        let d = svd(&outer);
        assert!(d.singular_values[1] <= 1e-14 * d.singular_values[0]);
    }

    #[test]
    fn polar_projects_scaled_unitary() {
        let m = pauli::Y.scale_real(3.0);
        let u = polar_unitary(&m).unwrap();
        assert!((*u.matrix() - pauli::Y).frobenius_norm() < 1e-14);
        assert!(polar_unitary(&Matrix::<2>::zeros()).is_none());
    }
}
