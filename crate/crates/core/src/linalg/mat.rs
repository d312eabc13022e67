use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::{Error, Field, Result, Ring};

/// Dense row-major matrix over a [`Ring`] backend.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceOut {
    First,
    Second,
}

fn shape_err(what: &str, a: (usize, usize), b: (usize, usize)) -> Error {
    Error::Shape(format!("{what}: {}x{} vs {}x{}", a.0, a.1, b.0, b.1))
}

impl<T: Ring> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: (0..rows * cols).map(|_| T::zero()).collect() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape(format!("ragged rows in a {r}-row matrix")));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix unit |e_i⟩⟨e_j| of size n (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, T::one());
        m
    }

    pub fn diag(entries: Vec<T>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (k, e) in entries.into_iter().enumerate() {
            m.set(k, k, e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(shape_err("mul", self.shape(), o.shape()));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        out.data[idx] = out.data[idx].plus(&a.times(b));
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, o: &Self, what: &str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(shape_err(what, self.shape(), o.shape()));
        }
        Ok(Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip(o, "add", |a, b| a.plus(b))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, "sub", |a, b| a.minus(b))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.times(c))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        self.map(Ring::conj)
    }

    pub fn trace(&self) -> Result<T> {
        if !self.is_square() {
            return Err(shape_err("trace", self.shape(), self.shape()));
        }
        Ok((0..self.rows).fold(T::zero(), |acc, k| acc.plus(self.get(k, k))))
    }

    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            let a = self.get(i / o.rows, j / o.cols);
            if a.is_zero() {
                T::zero()
            } else {
                a.times(o.get(i % o.rows, j % o.cols))
            }
        })
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| match (i < self.rows, j < self.cols) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => o.get(i - self.rows, j - self.cols).clone(),
            _ => T::zero(),
        })
    }

    /// Hilbert–Schmidt inner product Tr(A·B*) = Σ a_ij·conj(b_ij).
    pub fn hs_inner(&self, o: &Self) -> Result<T> {
        if self.shape() != o.shape() {
            return Err(shape_err("hs_inner", self.shape(), o.shape()));
        }
        Ok(self
            .data
            .iter()
            .zip(&o.data)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(T::zero(), |acc, (a, b)| acc.plus(&a.times(&b.conj()))))
    }

    /// Row-major vectorization as a 1×(rows·cols) matrix.
    pub fn vec_row(&self) -> Self {
        Mat { rows: 1, cols: self.rows * self.cols, data: self.data.clone() }
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(shape_err("pow", self.shape(), self.shape()));
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    /// Partial trace of a (p·q)×(p·q) matrix on C^p ⊗ C^q, index i⊗j ↦ i·q + j.
    pub fn partial_trace(&self, p: usize, q: usize, out: TraceOut) -> Result<Self> {
        if self.rows != p * q || self.cols != p * q {
            return Err(shape_err("partial_trace", self.shape(), (p * q, p * q)));
        }
        Ok(match out {
            TraceOut::Second => Self::from_fn(p, p, |i, k| (0..q).fold(T::zero(), |acc, j| acc.plus(self.get(i * q + j, k * q + j)))),
            TraceOut::First => Self::from_fn(q, q, |j, l| (0..p).fold(T::zero(), |acc, i| acc.plus(self.get(i * q + j, i * q + l)))),
        })
    }

    /// Block (r, c) of size h×w.
    pub fn block(&self, r: usize, c: usize, h: usize, w: usize) -> Self {
        Self::from_fn(h, w, |i, j| self.get(r * h + i, c * w + j).clone())
    }

    /// Assembles a block matrix from a square grid of equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<Self>]) -> Result<Self> {
        let n = blocks.len();
        let (h, w) = blocks.first().and_then(|r| r.first()).map_or((0, 0), Mat::shape);
        if blocks.iter().any(|r| r.len() != n || r.iter().any(|b| b.shape() != (h, w))) {
            return Err(Error::Shape(format!("irregular {n}x{n} block grid")));
        }
        Ok(Self::from_fn(n * h, n * w, |i, j| blocks[i / h][j / w].get(i % h, j % w).clone()))
    }

    /// Largest entry of self − other measured by `norm`.
    pub fn max_defect(&self, o: &Self, norm: impl Fn(&T) -> f64) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| norm(&a.minus(b))).fold(0.0, f64::max)
    }
}

impl<T: Field> Mat<T> {
    /// Inverse by Gauss–Jordan; `DivideByZero` when singular.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(shape_err("inverse", self.shape(), self.shape()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::DivideByZero)?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let f = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).times(&f));
                inv.set(col, j, inv.get(col, j).times(&f));
            }
            for r in 0..n {
                let g = a.get(r, col).clone();
                if r == col || g.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j).minus(&g.times(a.get(col, j))));
                    inv.set(r, j, inv.get(r, j).minus(&g.times(inv.get(col, j))));
                }
            }
        }
        Ok(inv)
    }
}

impl<T> Mat<T> {
    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; the `try_*`/`matmul` forms return errors.
impl<T: Ring> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, o: &Mat<T>) -> Mat<T> {
        self.matmul(o).expect("matrix product shapes")
    }
}

impl<T: Ring> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, o: &Mat<T>) -> Mat<T> {
        self.try_add(o).expect("matrix sum shapes")
    }
}

impl<T: Ring> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, o: &Mat<T>) -> Mat<T> {
        self.try_sub(o).expect("matrix difference shapes")
    }
}

impl<T: Ring> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(Ring::negated)
    }
}

impl<T: Ring> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        f.write_str("]")
    }
}
