use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
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

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}x{cols} entries"),
                found: format!("{}", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major data.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation from Hermiticity, max |m_ij - conj(m_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// (m + m†) / 2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// [a, b] = ab - ba
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// {a, b} = ab + ba
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    /// ⟨v|m|v⟩
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Column-stacking vectorization: vec(m)[j*rows + i] = m[i, j].
    pub fn vec_columns(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vec_columns`] for a square `dim`×`dim` matrix.
    pub fn unvec_columns(v: &[C64], dim: usize) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", dim * dim),
                found: format!("{}", v.len()),
            });
        }
        Ok(Self::from_fn(dim, dim, |i, j| v[j * dim + i]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise dimension mismatch"
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; `a` is the leftmost (most significant) factor.
///
/// `(a⊗b)[i*P + k, j*Q + l] = a[i,j] * b[k,l]` where `b` is `P`×`Q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Solves `a x = b` for square `a` by LU with partial pivoting.
pub(crate) fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = a.rows;
    assert!(a.is_square() && b.rows == n);
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| {
                lu[(r1, col)]
                    .norm()
                    .partial_cmp(&lu[(r2, col)].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if lu[(pivot, col)].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                lu.data.swap(pivot * n + j, col * n + j);
            }
            for j in 0..m {
                x.data.swap(pivot * m + j, col * m + j);
            }
        }
        let inv = ONE / lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] * inv;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..m {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = ONE / lu[(col, col)];
        for j in 0..m {
            let mut acc = x[(col, j)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = acc * inv;
        }
    }
    Some(x)
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_places_left_factor_most_significant() {
        let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let zi = kron(&z, &ComplexMatrix::identity(2));
        assert_eq!(zi, ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn xx_squares_to_identity() {
        let xx = kron(&sigma_x(), &sigma_x());
        assert_eq!(xx.matmul(&xx), ComplexMatrix::identity(4));
    }

    #[test]
    fn vec_unvec_follows_column_stacking() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = m.vec_columns();
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(ComplexMatrix::unvec_columns(&v, 2).unwrap(), m);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(2.0, 1.0), C64::new(1.0, 0.0), C64::new(3.0, 0.0)],
        )
        .unwrap();
        let x = ComplexMatrix::from_vec(2, 1, vec![C64::new(1.0, -1.0), C64::new(0.5, 2.0)]).unwrap();
        let b = a.matmul(&x);
        let solved = solve(&a, &b).unwrap();
        assert!(solved.max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
    }
}
