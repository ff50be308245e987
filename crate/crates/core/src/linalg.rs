//! Dense real-symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Everything downstream (propagators, Fock blocks) reduces to
//! diagonalizing a real symmetric matrix; Jacobi is exact to round-off
//! for the sizes involved here (a few hundred at most).

use alloc::vec;
use alloc::vec::Vec;

/// Real symmetric matrix with full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Set both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn add_diagonal(&mut self, c: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += c;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Largest |a_ij - a_ji|; zero for anything built through `set`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let d = libm::fabs(self.get(i, j) - self.get(j, i));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Eigendecomposition A = V diag(values) V^T with orthonormal V.
///
/// Eigenvectors are stored column-wise: `vectors[i * dim + k]` is
/// component `i` of eigenvector `k`. Eigenvalues ascend.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl Eigen {
    #[inline]
    pub fn vector_component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim + k]
    }
}

/// Cyclic Jacobi rotations until the off-diagonal weight is negligible.
pub fn sym_eigen(m: &SymMatrix) -> Eigen {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro = m.frobenius_norm();
    let tol = if fro > 0.0 { fro * 1e-15 } else { 0.0 };
    const MAX_SWEEPS: usize = 64;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if libm::sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                // Rotate rows/columns p and q of A.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                // Accumulate the rotation into V.
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();

    // Sort eigenpairs ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            sorted_vectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    values = sorted_values;

    Eigen { dim: n, values, vectors: sorted_vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &Eigen) -> SymMatrix {
        let n = e.dim;
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += e.vector_component(i, k) * e.values[k] * e.vector_component(j, k);
                }
                m.set(i, j, s);
            }
        }
        m
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let mut m = SymMatrix::zeros(3);
        m.set(0, 0, 3.0);
        m.set(1, 1, -1.0);
        m.set(2, 2, 7.0);
        let e = sym_eigen(&m);
        assert_eq!(e.values, vec![-1.0, 3.0, 7.0]);
    }

    #[test]
    fn two_by_two_analytic() {
        // [[0, g], [g, 0]] has eigenvalues -g, +g.
        let mut m = SymMatrix::zeros(2);
        m.set(0, 1, 5.0);
        let e = sym_eigen(&m);
        assert!((e.values[0] + 5.0).abs() < 1e-14);
        assert!((e.values[1] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_round_trip() {
        let n = 9;
        let mut m = SymMatrix::zeros(n);
        // Deterministic pseudo-random symmetric fill.
        let mut x = 1u64;
        for i in 0..n {
            for j in i..n {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let r = ((x >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
                m.set(i, j, 100.0 * r);
            }
        }
        let e = sym_eigen(&m);
        let r = reconstruct(&e);
        for i in 0..n {
            for j in 0..n {
                assert!((m.get(i, j) - r.get(i, j)).abs() < 1e-10);
            }
        }
        // Orthonormality.
        for k in 0..n {
            for l in 0..n {
                let dot: f64 = (0..n)
                    .map(|i| e.vector_component(i, k) * e.vector_component(i, l))
                    .sum();
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }
}
