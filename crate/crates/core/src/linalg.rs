//! Small dense matrices and Householder QR with a nonnegative-diagonal
//! convention on `R`.

use std::fmt;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Rows `from..` as a new matrix.
    pub fn drop_rows(&self, from: usize) -> Self {
        Self::from_row_major(
            self.rows - from,
            self.cols,
            self.data[from * self.cols..].to_vec(),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |A^T A - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let gram = self.transpose().matmul(self);
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    /// Singular values via one-sided Jacobi sweeps; adequate for the small
    /// matrices used to check column rank.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut a = self.clone();
        let n = a.cols;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for i in 0..a.rows {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    if gamma == 0.0 {
                        continue;
                    }
                    off = off.max(gamma.abs() / (alpha * beta).sqrt().max(f64::MIN_POSITIVE));
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..a.rows {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        a[(i, p)] = c * x - s * y;
                        a[(i, q)] = s * x + c * y;
                    }
                }
            }
            if off < 1e-15 {
                break;
            }
        }
        let mut sv: Vec<f64> = (0..n)
            .map(|j| (0..a.rows).map(|i| a[(i, j)].powi(2)).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        sv
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A Householder reflector `I - 2 v v^T` acting on coordinates `start..`,
/// with `v` of unit length.
#[derive(Clone, Debug, PartialEq)]
struct Reflector {
    start: usize,
    v: Vec<f64>,
}

impl Reflector {
    #[inline]
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.start..];
        let dot: f64 = tail.iter().zip(&self.v).map(|(a, b)| a * b).sum();
        let s = 2.0 * dot;
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= s * v;
        }
    }
}

/// Full QR factorization `A = Q R` of a `p x r` matrix, `Q` stored as
/// reflectors followed by a diagonal sign fix so that `diag(R) >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    n: usize,
    reflectors: Vec<Reflector>,
    signs: Vec<f64>,
    r: Matrix,
}

impl QrFactors {
    pub fn new(a: &Matrix) -> Self {
        let p = a.rows;
        let r_cols = a.cols;
        let mut work = a.clone();
        let mut reflectors = Vec::new();
        for j in 0..r_cols.min(p) {
            let x: Vec<f64> = (j..p).map(|i| work[(i, j)]).collect();
            let tail_norm2: f64 = x[1..].iter().map(|v| v * v).sum();
            if tail_norm2 == 0.0 {
                continue;
            }
            let norm = (x[0] * x[0] + tail_norm2).sqrt();
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            v.iter_mut().for_each(|t| *t /= vnorm);
            let h = Reflector { start: j, v };
            for c in j..r_cols {
                let mut col: Vec<f64> = (0..p).map(|i| work[(i, c)]).collect();
                h.apply(&mut col);
                for i in j..p {
                    work[(i, c)] = col[i];
                }
            }
            for i in j + 1..p {
                work[(i, j)] = 0.0;
            }
            reflectors.push(h);
        }
        let mut signs = vec![1.0; p];
        for (j, s) in signs.iter_mut().enumerate().take(r_cols.min(p)) {
            if work[(j, j)] < 0.0 {
                *s = -1.0;
                for c in 0..r_cols {
                    work[(j, c)] = -work[(j, c)];
                }
            }
        }
        Self {
            n: p,
            reflectors,
            signs,
            r: work,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `x <- Q x`.
    pub fn apply_q(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (t, s) in x.iter_mut().zip(&self.signs) {
            *t *= s;
        }
        for h in self.reflectors.iter().rev() {
            h.apply(x);
        }
    }

    pub fn q(&self) -> Matrix {
        let mut q = Matrix::zeros(self.n, self.n);
        let mut e = vec![0.0; self.n];
        for j in 0..self.n {
            e.iter_mut().for_each(|t| *t = 0.0);
            e[j] = 1.0;
            self.apply_q(&mut e);
            for i in 0..self.n {
                q[(i, j)] = e[i];
            }
        }
        q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qr_of_canonical_column_is_identity() {
        let mut e1 = vec![0.0; 5];
        e1[0] = 1.0;
        let f = QrFactors::new(&Matrix::from_columns(&[e1]));
        assert_eq!(f.q(), Matrix::identity(5));
    }

    #[test]
    fn sign_convention_on_scalar() {
        let f = QrFactors::new(&Matrix::from_columns(&[vec![-3.0]]));
        assert_eq!(f.q()[(0, 0)], -1.0);
        assert_eq!(f.r()[(0, 0)], 3.0);
    }

    #[test]
    fn wide_matrix_factorizes() {
        let a = Matrix::from_row_major(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let f = QrFactors::new(&a);
        let qr = f.q().matmul(f.r());
        assert!(qr.max_abs_diff(&a) < 1e-12);
        assert!(f.r()[(0, 0)] >= 0.0 && f.r()[(1, 1)] >= 0.0);
        assert!(f.r()[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = Matrix::from_row_major(3, 2, vec![3.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        let sv = a.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 0.5).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn qr_reconstructs_and_is_orthogonal(
            p in 1usize..9,
            r in 1usize..5,
            seed in prop::collection::vec(-2.0f64..2.0, 64),
        ) {
            let data: Vec<f64> = (0..p * r).map(|k| seed[k % seed.len()] + 0.01 * k as f64).collect();
            let a = Matrix::from_row_major(p, r, data);
            let f = QrFactors::new(&a);
            let q = f.q();
            prop_assert!(q.orthogonality_defect() < 1e-12);
            prop_assert!(q.matmul(f.r()).max_abs_diff(&a) < 1e-11);
            for i in 0..p {
                for j in 0..r.min(i) {
                    prop_assert!(f.r()[(i, j)].abs() < 1e-12);
                }
                if i < r {
                    prop_assert!(f.r()[(i, i)] >= 0.0);
                }
            }
        }
    }
}
