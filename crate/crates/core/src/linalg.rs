//! Dense Hermitian eigensolver (cyclic Jacobi) and a few helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix rows must all have length n".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn off_diagonal_norm2(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s
    }

    fn frobenius2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues ascending, eigenvectors as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.n).map(|i| self.vectors[(i, k)]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the classical real rotation, so the combined
/// 2×2 unitary is `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.n;
    for i in 0..n {
        for j in 0..i {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > 1e-10 * (1.0 + a[(i, j)].norm()) {
                return Err(Error::Domain(format!("matrix is not Hermitian at ({i},{j})")));
            }
        }
    }
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius2().max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_SWEEPS {
        if m.off_diagonal_norm2() <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let gabs = g.norm();
                if gabs <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if gabs <= 1e-18 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = Complex64::new(0.0, 0.0);
                    m[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = g / gabs;
                let theta = (aqq - app) / (2.0 * gabs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e = phase.conj();
                let (vpp, vpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (vqp, vqq) = (-e * s, e * c);
                // columns: M ← M V
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * vpp + akq * vqp;
                    m[(k, q)] = akp * vpq + akq * vqq;
                    let xkp = v[(k, p)];
                    let xkq = v[(k, q)];
                    v[(k, p)] = xkp * vpp + xkq * vqp;
                    v[(k, q)] = xkp * vpq + xkq * vqq;
                }
                // rows: M ← V^H M
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    m[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
            }
        }
    }
    if m.off_diagonal_norm2() > 1e-20 * scale {
        return Err(Error::Accuracy("Jacobi sweeps did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Largest eigenvalue of a positive semidefinite Hermitian matrix by power
/// iteration. Used as an independent cross-check of [`hermitian_eigen`].
pub fn power_iteration_max(a: &CMatrix, iters: usize) -> f64 {
    let n = a.n;
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.01 * i as f64, 0.3)).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let y = a.mul_vec(&x);
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        lambda = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / xn;
        x = y.into_iter().map(|z| z / norm).collect();
    }
    lambda
}

/// Solve a small dense real system by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
pub fn solve_real(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        // Gram-Schmidt on random complex columns
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        while cols.len() < n {
            let mut v: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            for c in &cols {
                let ip: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= ip * ci;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        let mut u = CMatrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                u[(i, j)] = c[i];
            }
        }
        u
    }

    #[test]
    fn recovers_known_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spectrum = [-2.5, 0.125, 1.0, 3.75, 9.0];
        let u = random_unitary(5, &mut rng);
        let mut d = CMatrix::zeros(5);
        for (i, &s) in spectrum.iter().enumerate() {
            d[(i, i)] = Complex64::new(s, 0.0);
        }
        let a = u.mul(&d).mul(&u.adjoint());
        let eig = hermitian_eigen(&a).unwrap();
        for (got, want) in eig.values.iter().zip(spectrum) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        // A v = λ v
        for k in 0..5 {
            let v = eig.vector(k);
            let av = a.mul_vec(&v);
            for (x, y) in av.iter().zip(&v) {
                assert!((x - y * eig.values[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn power_iteration_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(12, &mut rng);
        let mut d = CMatrix::zeros(12);
        for i in 0..12 {
            d[(i, i)] = Complex64::new(i as f64 * 0.5, 0.0);
        }
        let a = u.mul(&d).mul(&u.adjoint());
        let pi = power_iteration_max(&a, 2000);
        assert!((pi - hermitian_eigen(&a).unwrap().max()).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = CMatrix::identity(2);
        a[(0, 1)] = Complex64::new(1.0, 1.0);
        a[(1, 0)] = Complex64::new(1.0, 1.0);
        assert!(hermitian_eigen(&a).is_err());
    }

    #[test]
    fn small_real_system() {
        let x = solve_real(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve_real(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }
}
