//! Small dense linear algebra generic over [`Scalar`], so that every map built
//! from it can be evaluated on complex-perturbed inputs.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<S = f64>(pub [S; 3]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<S = f64>(pub [[S; 3]; 3]);

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([S::zero(); 3])
    }

    pub fn unit(k: usize) -> Self {
        let mut v = Self::zero();
        v.0[k] = S::one();
        v
    }

    pub fn from_f64(v: Vec3<f64>) -> Self {
        Vec3(v.0.map(S::from_f64))
    }

    pub fn re(&self) -> Vec3<f64> {
        Vec3(self.0.map(|c| c.re()))
    }

    pub fn dot(&self, o: &Self) -> S {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn norm(&self) -> S {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, k: S) -> Self {
        Vec3(self.0.map(|c| c * k))
    }

    pub fn normalized(&self) -> Self {
        self.scale(S::one() / self.norm())
    }

    pub fn outer(&self, o: &Self) -> Mat3<S> {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i] * o.0[j];
            }
        }
        m
    }

    pub fn x(&self) -> S {
        self.0[0]
    }
    pub fn y(&self) -> S {
        self.0[1]
    }
    pub fn z(&self) -> S {
        self.0[2]
    }
}

impl Vec3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3(self.0.map(|c| -c))
    }
}

impl<S: Scalar> AddAssign for Vec3<S> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> SubAssign for Vec3<S> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> Index<usize> for Vec3<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: Scalar> IndexMut<usize> for Vec3<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S: Scalar> Mat3<S> {
    pub fn zero() -> Self {
        Mat3([[S::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = S::one();
        }
        m
    }

    pub fn from_f64(m: Mat3<f64>) -> Self {
        Mat3(m.0.map(|r| r.map(S::from_f64)))
    }

    pub fn re(&self) -> Mat3<f64> {
        Mat3(self.0.map(|r| r.map(|c| c.re())))
    }

    pub fn from_cols(a: Vec3<S>, b: Vec3<S>, c: Vec3<S>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][0] = a.0[i];
            m.0[i][1] = b.0[i];
            m.0[i][2] = c.0[i];
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec3<S> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> Vec3<S> {
        Vec3(self.0[i])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &Vec3<S>) -> Vec3<S> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `selfᵀ v`
    pub fn tr_mul_vec(&self, v: &Vec3<S>) -> Vec3<S> {
        Vec3([self.col(0).dot(v), self.col(1).dot(v), self.col(2).dot(v)])
    }

    pub fn scale(&self, k: S) -> Self {
        Mat3(self.0.map(|r| r.map(|c| c * k)))
    }

    pub fn trace(&self) -> S {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> S {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Cofactor matrix; `cof(M) = det(M)·M⁻ᵀ`.
    pub fn cofactor(&self) -> Self {
        let m = &self.0;
        let mut c = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                c.0[i][j] = m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
            }
        }
        c
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.re() == 0.0 || !d.re().is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.cofactor().transpose().scale(S::one() / d))
    }

    pub fn frob_sq(&self) -> S {
        let mut s = S::zero();
        for r in &self.0 {
            for c in r {
                s += *c * *c;
            }
        }
        s
    }
}

impl Mat3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frob(&self) -> f64 {
        self.frob_sq().sqrt()
    }
}

impl<S: Scalar> Mul for Mat3<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        m
    }
}

impl<S: Scalar> Add for Mat3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl<S: Scalar> Sub for Mat3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl<S: Scalar> Neg for Mat3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-S::one())
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat<S = f64> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_row_slice(rows: usize, cols: usize, v: &[S]) -> Self {
        assert_eq!(v.len(), rows * cols);
        DMat { rows, cols, data: v.to_vec() }
    }

    pub fn diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_f64(m: &DMat<f64>) -> Self {
        DMat { rows: m.rows, cols: m.cols, data: m.data.iter().map(|&v| S::from_f64(v)).collect() }
    }

    pub fn re(&self) -> DMat<f64> {
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.re()).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> DMat<T> {
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[S]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    s += *a * *b;
                }
                s
            })
            .collect()
    }

    /// `selfᵀ v`
    pub fn tr_mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += *a * vi;
            }
        }
        out
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matmul");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                let orow = o.row(k);
                let mrow = &mut m.data[i * o.cols..(i + 1) * o.cols];
                for (x, b) in mrow.iter_mut().zip(orow) {
                    *x += a * *b;
                }
            }
        }
        m
    }

    pub fn scale(&self, k: S) -> Self {
        self.map(|v| v * k)
    }

    pub fn sym_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]).scale(0.5))
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Gauss-Jordan inverse with partial pivoting on the real part.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.re().abs()));
        if scale == 0.0 {
            return Err(Error::SingularMatrix);
        }
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if a[(r, c)].re().abs() > a[(p, c)].re().abs() {
                    p = r;
                }
            }
            if a[(p, c)].re().abs() <= 1e-14 * scale {
                return Err(Error::SingularMatrix);
            }
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let d = S::one() / a[(c, c)];
            for j in 0..n {
                a[(c, j)] *= d;
                inv[(c, j)] *= d;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f == S::zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(c, j)];
                    let ic = inv[(c, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl DMat<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frob(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<S: Scalar> Index<(usize, usize)> for DMat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for DMat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Add for &DMat<S> {
    type Output = DMat<S>;
    fn add(self, o: &DMat<S>) -> DMat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<S: Scalar> Sub for &DMat<S> {
    type Output = DMat<S>;
    fn sub(self, o: &DMat<S>) -> DMat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }
}

impl<S: Scalar> Mul for &DMat<S> {
    type Output = DMat<S>;
    fn mul(self, o: &DMat<S>) -> DMat<S> {
        self.matmul(o)
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
