//! Exact dense linear algebra over the rationals and prime fields.
//!
//! Matrices act on column vectors. Subspaces are stored as the rows of a
//! reduced row-echelon matrix, which makes them canonical: two subspaces are
//! equal exactly when their stored bases are equal.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{}", p),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Arithmetic of an exact field. The field value carries any runtime data
/// (the modulus for prime fields), elements are plain values.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type E: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    /// `n / d`, or `None` when `d` vanishes in the field.
    fn from_ratio(&self, n: i64, d: i64) -> Option<Self::E>;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Panics on zero.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// `a -= f * b`
    fn sub_mul(&self, a: &mut Self::E, f: &Self::E, b: &Self::E);
    /// `a += f * b`
    fn add_mul(&self, a: &mut Self::E, f: &Self::E, b: &Self::E);
    fn render(&self, a: &Self::E) -> String;
    /// `(numerator, denominator)` when both fit in an i64.
    fn to_ratio(&self, a: &Self::E) -> Option<(i64, i64)>;
    /// A random element; small numerators for the rationals.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::E;
    /// A random nonzero element.
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::E {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(&self, n: i64, d: i64) -> Option<BigRational> {
        if d == 0 {
            None
        } else {
            Some(BigRational::new(BigInt::from(n), BigInt::from(d)))
        }
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub_mul(&self, a: &mut BigRational, f: &BigRational, b: &BigRational) {
        if f.is_one() {
            *a -= b;
        } else {
            *a -= f * b;
        }
    }
    fn add_mul(&self, a: &mut BigRational, f: &BigRational, b: &BigRational) {
        if f.is_one() {
            *a += b;
        } else {
            *a += f * b;
        }
    }
    fn render(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else if a.is_negative() {
            format!("-{}/{}", a.numer().abs(), a.denom())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn to_ratio(&self, a: &BigRational) -> Option<(i64, i64)> {
        use num_traits::ToPrimitive;
        Some((a.numer().to_i64()?, a.denom().to_i64()?))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-3..=3))
    }
}

/// The prime field F_p with p < 2^32, so products fit in a u64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, LaError> {
        if p >= (1 << 32) || !is_prime(p) {
            return Err(LaError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % self.p;
            }
            a = a * a % self.p;
            e >>= 1;
        }
        r
    }
}

impl Field for PrimeField {
    type E = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_ratio(&self, n: i64, d: i64) -> Option<u64> {
        let d = self.from_i64(d);
        if d == 0 {
            None
        } else {
            Some(self.from_i64(n) * self.inv(&d) % self.p)
        }
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn sub_mul(&self, a: &mut u64, f: &u64, b: &u64) {
        let t = f * b % self.p;
        *a = if *a >= t { *a - t } else { *a + self.p - t };
    }
    #[inline]
    fn add_mul(&self, a: &mut u64, f: &u64, b: &u64) {
        *a = (*a + f * b % self.p) % self.p;
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn to_ratio(&self, a: &u64) -> Option<(i64, i64)> {
        Some((*a as i64, 1))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// Dense row-major matrix.
#[derive(Clone)]
pub struct Matrix<K: Field> {
    k: K,
    rows: usize,
    cols: usize,
    data: Vec<K::E>,
}

impl<K: Field> PartialEq for Matrix<K> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<K: Field> Eq for Matrix<K> {}

impl<K: Field> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| self.k.render(x)).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl<K: Field> Matrix<K> {
    pub fn zeros(k: &K, rows: usize, cols: usize) -> Self {
        Matrix { k: k.clone(), rows, cols, data: vec![k.zero(); rows * cols] }
    }

    pub fn identity(k: &K, n: usize) -> Self {
        let mut m = Self::zeros(k, n, n);
        for i in 0..n {
            m.data[i * n + i] = k.one();
        }
        m
    }

    pub fn from_fn(k: &K, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K::E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { k: k.clone(), rows, cols, data }
    }

    pub fn from_i64(k: &K, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { k: k.clone(), rows, cols, data: entries.iter().map(|&v| k.from_i64(v)).collect() }
    }

    pub fn from_rows(k: &K, cols: usize, rows: Vec<Vec<K::E>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        Matrix { k: k.clone(), rows: n, cols, data }
    }

    pub fn random<R: Rng + ?Sized>(k: &K, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| k.random(rng)).collect();
        Matrix { k: k.clone(), rows, cols, data }
    }

    pub fn field(&self) -> &K {
        &self.k
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &K::E {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: K::E) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[K::E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_mut(&mut self, i: usize) -> &mut [K::E] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }
    pub fn row_vecs(&self) -> Vec<Vec<K::E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn col(&self, j: usize) -> Vec<K::E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn push_row(&mut self, row: &[K::E]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.k.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(&self.k, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(&self.k, self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if self.k.is_zero(a) {
                    continue;
                }
                let a = a.clone();
                for j in 0..n {
                    let b = &other.data[t * n + j];
                    if !self.k.is_zero(b) {
                        self.k.add_mul(&mut out.data[i * n + j], &a, b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K::E]) -> Vec<K::E> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.k.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !self.k.is_zero(a) && !self.k.is_zero(b) {
                        self.k.add_mul(&mut acc, a, b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.k.add(a, b)).collect();
        Matrix { k: self.k.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.k.sub(a, b)).collect();
        Matrix { k: self.k.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &K::E) -> Self {
        let data = self.data.iter().map(|a| self.k.mul(a, c)).collect();
        Matrix { k: self.k.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(&self.k, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// `[a | b | ...]` for blocks with `rows` rows each.
    pub fn hstack_many(k: &K, rows: usize, blocks: &[&Self]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                assert_eq!(b.rows, rows, "hstack row mismatch");
                data.extend_from_slice(b.row(i));
            }
        }
        Matrix { k: k.clone(), rows, cols, data }
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { k: self.k.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        Matrix::from_fn(&self.k, self.rows + other.rows, self.cols + other.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                self.k.zero()
            }
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { k: self.k.clone(), rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(&self.k, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// Gauss-Jordan elimination in place; drops zero rows and returns the
    /// pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let k = self.k.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !k.is_zero(&self.data[i * cols + c])) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = k.inv(&self.data[r * cols + c]);
            let mut piv: Vec<(usize, K::E)> = Vec::new();
            for j in c..cols {
                let x = &mut self.data[r * cols + j];
                if !k.is_zero(x) {
                    *x = k.mul(x, &inv);
                    piv.push((j, x.clone()));
                }
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c].clone();
                if k.is_zero(&f) {
                    continue;
                }
                let row = &mut self.data[i * cols..(i + 1) * cols];
                for (j, b) in &piv {
                    k.sub_mul(&mut row[*j], &f, b);
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.data.truncate(r * cols);
        self.rows = r;
        pivots
    }

    /// Reduced row-echelon form with zero rows removed, and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        if self.rows <= self.cols {
            self.rref().1.len()
        } else {
            self.transpose().rref().1.len()
        }
    }

    /// Right null space. The basis has one row per free column, with a 1
    /// there and zeros at the other free columns.
    pub fn kernel(&self) -> Subspace<K> {
        let (r, pivots) = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&f| !is_pivot[f]).collect();
        let mut basis = Matrix::zeros(&self.k, free.len(), n);
        for (row, &f) in free.iter().enumerate() {
            basis.set(row, f, self.k.one());
            for (i, &p) in pivots.iter().enumerate() {
                let x = r.get(i, f);
                if !self.k.is_zero(x) {
                    basis.set(row, p, self.k.neg(x));
                }
            }
        }
        Subspace { basis, pivots: free }
    }

    /// Column space.
    pub fn image(&self) -> Subspace<K> {
        Subspace::from_rows(&self.transpose())
    }

    pub fn row_space(&self) -> Subspace<K> {
        Subspace::from_rows(self)
    }

    /// Some `x` with `self * x = b`, or `None`.
    pub fn solve(&self, b: &[K::E]) -> Result<Option<Vec<K::E>>, LaError> {
        if b.len() != self.rows {
            return Err(LaError::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(&self.k, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.k.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }
}

/// A subspace of `K^n`. Basis row `i` has a 1 in column `pivots[i]` and
/// zeros in the other pivot columns; rows from [`Matrix::rref`] are also in
/// echelon order.
#[derive(Clone)]
pub struct Subspace<K: Field> {
    basis: Matrix<K>,
    pivots: Vec<usize>,
}

impl<K: Field> PartialEq for Subspace<K> {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim() == other.ambient_dim() && self.dim() == other.dim() && self.contains_subspace(other)
    }
}

impl<K: Field> Eq for Subspace<K> {}

impl<K: Field> fmt::Debug for Subspace<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: {:?})", self.dim(), self.ambient_dim(), self.basis)
    }
}

/// A quotient `K^n / W` with a complement spanned by standard basis vectors.
#[derive(Clone, Debug)]
pub struct Quotient<K: Field> {
    pub dim: usize,
    /// `dim x n`, kills `W`.
    pub projection: Matrix<K>,
    /// `n x dim`, `projection * section = identity`.
    pub section: Matrix<K>,
    /// The standard basis vectors spanning the complement, i.e. the columns
    /// picked out by `section`.
    pub complement: Vec<usize>,
}

impl<K: Field> Subspace<K> {
    pub fn zero(k: &K, n: usize) -> Self {
        Subspace { basis: Matrix::zeros(k, 0, n), pivots: Vec::new() }
    }

    pub fn full(k: &K, n: usize) -> Self {
        Subspace { basis: Matrix::identity(k, n), pivots: (0..n).collect() }
    }

    /// The span of the rows of `m`.
    pub fn from_rows(m: &Matrix<K>) -> Self {
        let (basis, pivots) = m.rref();
        Subspace { basis, pivots }
    }

    pub fn from_vectors(k: &K, n: usize, vs: Vec<Vec<K::E>>) -> Self {
        Self::from_rows(&Matrix::from_rows(k, n, vs))
    }

    pub fn field(&self) -> &K {
        self.basis.field()
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn basis(&self) -> &Matrix<K> {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its component along the basis; zero exactly when `v` lies in
    /// the subspace.
    pub fn reduce(&self, v: &[K::E]) -> Vec<K::E> {
        let k = self.field();
        let mut out = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let f = v[p].clone();
            if k.is_zero(&f) {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(i)) {
                if !k.is_zero(b) {
                    k.sub_mul(o, &f, b);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[K::E]) -> bool {
        let k = self.field();
        self.reduce(v).iter().all(|x| k.is_zero(x))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[K::E]) -> Option<Vec<K::E>> {
        if self.contains(v) {
            Some(self.coords_unchecked(v))
        } else {
            None
        }
    }

    /// Coordinates read off at the pivot columns; meaningful only for members.
    pub fn coords_unchecked(&self, v: &[K::E]) -> Vec<K::E> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::from_rows(&self.basis.vstack(&other.basis))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let k = self.field().clone();
        let n = self.ambient_dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(&k, n);
        }
        // c * [A; -B] = 0 gives c_A * A in both.
        let neg_b = other.basis.scale(&k.neg(&k.one()));
        let stacked = self.basis.vstack(&neg_b);
        let ker = stacked.transpose().kernel();
        let a_part = ker.basis.select_cols(&(0..self.dim()).collect::<Vec<_>>());
        Self::from_rows(&a_part.mul(&self.basis))
    }

    pub fn quotient(&self) -> Quotient<K> {
        let k = self.field().clone();
        let n = self.ambient_dim();
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let comp: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let q = comp.len();
        let mut projection = Matrix::zeros(&k, q, n);
        let mut section = Matrix::zeros(&k, n, q);
        for (t, &c) in comp.iter().enumerate() {
            projection.set(t, c, k.one());
            section.set(c, t, k.one());
            for (i, &p) in self.pivots.iter().enumerate() {
                let b = self.basis.get(i, c);
                if !k.is_zero(b) {
                    projection.set(t, p, k.neg(b));
                }
            }
        }
        Quotient { dim: q, projection, section, complement: comp }
    }
}

/// Row echelon basis grown one vector at a time. Each stored row has a
/// leading 1 at its pivot and zeros at the pivots of earlier rows.
#[derive(Clone, Debug)]
pub struct Echelon<K: Field> {
    k: K,
    n: usize,
    rows: Vec<Vec<K::E>>,
    pivots: Vec<usize>,
}

impl<K: Field> Echelon<K> {
    pub fn new(k: &K, n: usize) -> Self {
        Echelon { k: k.clone(), n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_subspace(s: &Subspace<K>) -> Self {
        Echelon { k: s.field().clone(), n: s.ambient_dim(), rows: s.basis.row_vecs(), pivots: s.pivots.clone() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    /// Adds `v` to the span. Returns the new basis row, or `None` if `v`
    /// was already in the span.
    pub fn insert(&mut self, mut v: Vec<K::E>) -> Option<&[K::E]> {
        let k = &self.k;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if k.is_zero(&v[p]) {
                continue;
            }
            let f = v[p].clone();
            for (o, b) in v.iter_mut().zip(row) {
                if !k.is_zero(b) {
                    k.sub_mul(o, &f, b);
                }
            }
        }
        let p = v.iter().position(|e| !k.is_zero(e))?;
        let inv = k.inv(&v[p]);
        for e in v.iter_mut() {
            if !k.is_zero(e) {
                *e = k.mul(e, &inv);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        self.rows.last().map(|r| r.as_slice())
    }

    pub fn into_rows(self) -> Vec<Vec<K::E>> {
        self.rows
    }

    pub fn into_subspace(self) -> Subspace<K> {
        if self.is_full() {
            return Subspace::full(&self.k, self.n);
        }
        Subspace::from_vectors(&self.k, self.n, self.rows)
    }
}

pub fn rref<K: Field>(m: &Matrix<K>) -> (Matrix<K>, Vec<usize>) {
    m.rref()
}

pub fn kernel<K: Field>(m: &Matrix<K>) -> Subspace<K> {
    m.kernel()
}

pub fn image<K: Field>(m: &Matrix<K>) -> Subspace<K> {
    m.image()
}

pub fn solve<K: Field>(m: &Matrix<K>, b: &[K::E]) -> Result<Option<Vec<K::E>>, LaError> {
    m.solve(b)
}

pub fn quotient<K: Field>(ambient_dim: usize, sub: &Subspace<K>) -> Result<Quotient<K>, LaError> {
    if sub.ambient_dim() != ambient_dim {
        return Err(LaError::Dimension(format!(
            "subspace lives in dimension {}, expected {}",
            sub.ambient_dim(),
            ambient_dim
        )));
    }
    Ok(sub.quotient())
}

/// Sparse matrix stored by columns: column `j` lists the nonzero entries of
/// the image of the `j`-th basis vector. Used for module actions.
#[derive(Clone)]
pub struct SparseMatrix<K: Field> {
    k: K,
    rows: usize,
    cols: Vec<Vec<(u32, K::E)>>,
}

impl<K: Field> fmt::Debug for SparseMatrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_dense())
    }
}

impl<K: Field> PartialEq for SparseMatrix<K> {
    fn eq(&self, other: &Self) -> bool {
        self.to_dense() == other.to_dense()
    }
}

impl<K: Field> SparseMatrix<K> {
    pub fn zeros(k: &K, rows: usize, cols: usize) -> Self {
        SparseMatrix { k: k.clone(), rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(k: &K, n: usize) -> Self {
        SparseMatrix { k: k.clone(), rows: n, cols: (0..n).map(|i| vec![(i as u32, k.one())]).collect() }
    }

    pub fn from_columns(k: &K, rows: usize, cols: Vec<Vec<(u32, K::E)>>) -> Self {
        let mut cols = cols;
        for c in cols.iter_mut() {
            c.retain(|(_, x)| !k.is_zero(x));
            c.sort_by_key(|(i, _)| *i);
            debug_assert!(c.iter().all(|(i, _)| (*i as usize) < rows));
        }
        SparseMatrix { k: k.clone(), rows, cols }
    }

    pub fn from_dense(m: &Matrix<K>) -> Self {
        let k = m.field();
        let cols = (0..m.cols())
            .map(|j| {
                (0..m.rows())
                    .filter(|&i| !k.is_zero(m.get(i, j)))
                    .map(|i| (i as u32, m.get(i, j).clone()))
                    .collect()
            })
            .collect();
        SparseMatrix { k: k.clone(), rows: m.rows(), cols }
    }

    pub fn to_dense(&self) -> Matrix<K> {
        let mut m = Matrix::zeros(&self.k, self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                m.set(*i as usize, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &K {
        &self.k
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols.len()
    }
    pub fn column(&self, j: usize) -> &[(u32, K::E)] {
        &self.cols[j]
    }
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn apply(&self, v: &[K::E]) -> Vec<K::E> {
        assert_eq!(v.len(), self.cols.len(), "sparse apply dimension mismatch");
        let mut out = vec![self.k.zero(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            let x = &v[j];
            if self.k.is_zero(x) {
                continue;
            }
            for (i, a) in c {
                self.k.add_mul(&mut out[*i as usize], a, x);
            }
        }
        out
    }

    /// Applies the map to every row of `m`, returning the images as rows.
    pub fn apply_rows(&self, m: &Matrix<K>) -> Matrix<K> {
        let rows: Vec<Vec<K::E>> = (0..m.rows()).map(|i| self.apply(m.row(i))).collect();
        Matrix::from_rows(&self.k, self.rows, rows)
    }

    /// `self * inner`
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(inner.rows, self.cols.len(), "sparse compose dimension mismatch");
        let cols = inner
            .cols
            .iter()
            .map(|c| {
                let mut acc: Vec<(u32, K::E)> = Vec::new();
                for (t, b) in c {
                    for (i, a) in &self.cols[*t as usize] {
                        acc.push((*i, self.k.mul(a, b)));
                    }
                }
                acc.sort_by_key(|(i, _)| *i);
                let mut merged: Vec<(u32, K::E)> = Vec::with_capacity(acc.len());
                for (i, x) in acc {
                    match merged.last_mut() {
                        Some((j, y)) if *j == i => *y = self.k.add(y, &x),
                        _ => merged.push((i, x)),
                    }
                }
                merged.retain(|(_, x)| !self.k.is_zero(x));
                merged
            })
            .collect();
        SparseMatrix { k: self.k.clone(), rows: self.rows, cols }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(entries: &[i64], r: usize, c: usize) -> Matrix<Rationals> {
        Matrix::from_i64(&Rationals, r, c, entries)
    }

    #[test]
    fn rref_of_rank_one_rational_matrix() {
        let (r, p) = q(&[2, 4, 1, 2], 2, 2).rref();
        assert_eq!(r, q(&[1, 2], 1, 2));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_of_empty_matrix() {
        let (r, p) = q(&[], 0, 0).rref();
        assert_eq!((r.rows(), r.cols()), (0, 0));
        assert!(p.is_empty());
    }

    #[test]
    fn rref_mod_two() {
        // Over F_2, R2 - R1 = (0,1), then R1 - R2 = (1,0).
        let f2 = PrimeField::new(2).unwrap();
        let (r, p) = Matrix::from_i64(&f2, 2, 2, &[1, 1, 1, 2]).rref();
        assert_eq!(r, Matrix::identity(&f2, 2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(&Rationals, 3).kernel().dim(), 0);
        let k = q(&[1, 1], 1, 2).kernel();
        assert_eq!(k, Subspace::from_rows(&q(&[1, -1], 1, 2)));
        assert!(q(&[1, 1], 1, 2).mul(&k.basis().transpose()).is_zero());
    }

    #[test]
    fn rank_nullity_on_deficient_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::random(&Rationals, 4, 2, &mut rng);
        let b = Matrix::random(&Rationals, 2, 6, &mut rng);
        let m = a.mul(&b);
        let ker = m.kernel();
        assert!(m.rank() <= 2);
        assert_eq!(ker.dim(), 6 - m.rank());
        for i in 0..ker.dim() {
            assert!(m.mul_vec(ker.basis().row(i)).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn quotient_examples() {
        let sub = Subspace::from_rows(&q(&[1, 0], 1, 2));
        let qt = quotient(2, &sub).unwrap();
        assert_eq!(qt.dim, 1);
        assert!(qt.projection.mul_vec(&[Rationals.one(), Rationals.zero()])[0].is_zero());
        let z = Subspace::zero(&Rationals, 3);
        let qz = quotient(3, &z).unwrap();
        assert_eq!(qz.projection, Matrix::identity(&Rationals, 3));
        assert!(quotient(4, &z).is_err());
    }

    #[test]
    fn solve_identity() {
        let b: Vec<_> = [3, -1, 2].iter().map(|&v| Rationals.from_i64(v)).collect();
        assert_eq!(solve(&Matrix::identity(&Rationals, 3), &b).unwrap(), Some(b.clone()));
        assert_eq!(solve(&q(&[1, 1], 1, 2).transpose(), &b[..2]).unwrap(), None);
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::from_rows(&q(&[1, 0, 0, 0, 1, 0], 2, 3));
        let b = Subspace::from_rows(&q(&[0, 1, 0, 0, 0, 1], 2, 3));
        let i = a.intersect(&b);
        assert_eq!(i.basis(), &q(&[0, 1, 0], 1, 3));
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
        assert!(PrimeField::new(9).is_err());
        assert_eq!(f.from_ratio(1, 2), Some(4));
    }

    #[test]
    fn sparse_round_trip_and_compose() {
        let a = q(&[1, 2, 0, 0, 0, 3], 2, 3);
        let b = q(&[1, 0, 0, 1, 1, 1], 3, 2);
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        assert_eq!(sa.to_dense(), a);
        assert_eq!(sa.compose(&sb).to_dense(), a.mul(&b));
        let v: Vec<_> = [1, -1, 2].iter().map(|&x| Rationals.from_i64(x)).collect();
        assert_eq!(sa.apply(&v), a.mul_vec(&v));
    }
}
