//! Eigen-solvers and a compressed sparse operator used by the simulator and the references.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::QubitOperator;

/// Dimension at and above which [`lowest_eigenpair`] switches to Lanczos.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Eigenvalues ascending with matching eigenvector columns.
pub fn eigh(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(m.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Ascending eigenvalues of a complex Hermitian matrix.
pub fn eigvalsh_complex(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenpairs of a complex Hermitian matrix, ascending.
pub fn eigh_complex(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Lowest eigenpair of a real symmetric matrix: dense below [`DENSE_EIGEN_LIMIT`], Lanczos above.
pub fn lowest_eigenpair(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    if m.nrows() < DENSE_EIGEN_LIMIT {
        let (vals, vecs) = eigh(m);
        Ok((vals[0], vecs.column(0).into_owned()))
    } else {
        lanczos_lowest(|v| m * v, m.nrows(), 1e-10, 500)
    }
}

/// Lanczos with full reorthogonalization for the lowest eigenpair of a symmetric operator.
///
/// Deterministic: the start vector is fixed. Converges when the Ritz residual
/// norm drops below `tol`; otherwise returns [`Error::Numerical`].
pub fn lanczos_lowest(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    dim: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, DVector<f64>)> {
    if dim == 0 {
        return Err(Error::Dimension("empty operator".into()));
    }
    let mut start = DVector::from_fn(dim, |k, _| 1.0 + 0.01 * ((k * 7919) % 101) as f64);
    start /= start.norm();
    let mut basis: Vec<DVector<f64>> = vec![start];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_iter = max_iter.min(dim);
    for k in 0..max_iter {
        let mut w = apply(&basis[k]);
        let a = basis[k].dot(&w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&w);
                w.axpy(-proj, b, 1.0);
            }
        }
        let b = w.norm();
        // Ritz pair of the current tridiagonal.
        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (vals, vecs) = eigh(&t);
        let residual = (b * vecs[(m - 1, 0)]).abs();
        if residual < tol || b < 1e-14 || m == dim {
            let mut v = DVector::zeros(dim);
            for (i, q) in basis.iter().enumerate() {
                v.axpy(vecs[(i, 0)], q, 1.0);
            }
            v /= v.norm();
            return Ok((vals[0], v));
        }
        beta.push(b);
        basis.push(w / b);
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge in {max_iter} iterations"
    )))
}

/// Complex operator in compressed-sparse-row form.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    /// Compiles a qubit operator; terms sharing an X-mask share one sparsity slot per row.
    pub fn from_qubit_operator(op: &QubitOperator) -> Self {
        let n = op.num_qubits();
        let dim = 1usize << n;
        let mut groups: std::collections::BTreeMap<u64, Vec<(u64, Complex64)>> = Default::default();
        for t in op.iter() {
            let phase = crate::pauli::i_pow(t.string.y_count());
            groups
                .entry(t.string.x_mask())
                .or_default()
                .push((t.string.z_mask(), t.coeff * phase));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * groups.len());
        let mut vals = Vec::with_capacity(dim * groups.len());
        row_ptr.push(0);
        for r in 0..dim {
            for (&x, zs) in &groups {
                let c = r ^ x as usize;
                let mut v = Complex64::new(0.0, 0.0);
                for &(z, coeff) in zs {
                    if (z & c as u64).count_ones() % 2 == 1 {
                        v -= coeff;
                    } else {
                        v += coeff;
                    }
                }
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let dim = m.nrows();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..dim {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * psi[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(psi, &mut out);
        out
    }

    /// `<psi|A|psi>` without normalization.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * psi[self.cols[k]];
            }
            acc += psi[r].conj() * row;
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// Real part as a dense matrix, for operators known to be real symmetric.
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        self.to_dense().map(|c| c.re)
    }
}

/// Lowest eigenvalue of a Hermitian qubit operator, by dense diagonalization when small
/// and by Lanczos on the real part otherwise (molecular operators are real symmetric).
pub fn ground_energy(op: &QubitOperator) -> Result<f64> {
    let sparse = SparseOperator::from_qubit_operator(op);
    if sparse.dim() < DENSE_EIGEN_LIMIT {
        Ok(eigvalsh_complex(&sparse.to_dense())[0])
    } else {
        let apply = |v: &DVector<f64>| {
            let psi: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            DVector::from_iterator(v.len(), sparse.apply(&psi).into_iter().map(|c| c.re))
        };
        Ok(lanczos_lowest(apply, sparse.dim(), 1e-10, 1000)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lanczos_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 60;
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a + a.transpose();
        let (dense, _) = eigh(&m);
        let (lz, v) = lanczos_lowest(|v| &m * v, n, 1e-11, 200).unwrap();
        assert!((dense[0] - lz).abs() < 1e-9);
        assert!(((&m * &v) - &v * lz).norm() < 1e-8);
    }

    #[test]
    fn sparse_matches_dense_realization() {
        let op = QubitOperator::from_labels(&[(0.3, "XYZ"), (-1.2, "ZZI"), (0.5, "XIX"), (0.7, "III")])
            .unwrap();
        let dense = op.to_matrix().unwrap();
        let sparse = SparseOperator::from_qubit_operator(&op).to_dense();
        assert!((dense - sparse).norm() < 1e-14);
    }

    #[test]
    fn eigh_sorts_ascending() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = eigh(&m);
        assert_eq!(vals.as_slice(), &[-1.0, 2.0]);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }
}
