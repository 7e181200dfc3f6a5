//! Dense complex matrices, Kronecker products and chain embeddings.
//!
//! Index conventions used everywhere in the crate:
//! * flat index 0 of a site is its highest label;
//! * `kron` is leftmost-most-significant (`row = i1 * b.rows + i2`);
//! * element `(r, c)` maps input state `c` to output state `r`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GybeError, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(GybeError::Dimension(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(GybeError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GybeError::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    /// Row-major real entries.
    pub fn from_real(rows: usize, cols: usize, vals: &[f64]) -> Result<Self> {
        Self::new(rows, cols, vals.iter().map(|&x| re(x)).collect())
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(GybeError::Dimension("ragged rows".into()));
        }
        Self::new(n, m, rows.concat())
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        Self { rows: 1, cols: 1, data: vec![z] }
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(GybeError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * z).collect() }
    }

    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn row(&self, r: usize) -> Vec<Complex64> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn powi(&self, n: u32) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(GybeError::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = CMatrix::identity(self.rows);
        for _ in 0..n {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &CMatrix) -> Result<CMatrix> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Positions of entries with modulus above `tol`.
    pub fn support(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self[(r, c)].norm() > tol {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// True when every entry off the diagonal and the anti-diagonal vanishes.
    pub fn is_x_shaped(&self, tol: f64) -> bool {
        let n = self.rows;
        self.is_square() && self.support(tol).into_iter().all(|(r, c)| r == c || r + c == n - 1)
    }

    /// Conjugate by a permutation: `out[perm[r], perm[c]] = self[r, c]`.
    pub fn permute(&self, perm: &[usize]) -> Result<CMatrix> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(GybeError::Dimension("permutation length mismatch".into()));
        }
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(perm[r], perm[c])] = self[(r, c)];
            }
        }
        Ok(out)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(GybeError::Dimension("inverse of a non-square matrix".into()));
        }
        self.to_nalgebra()
            .try_inverse()
            .map(|m| CMatrix::from_nalgebra(&m))
            .ok_or_else(|| GybeError::Singular("matrix is not invertible".into()))
    }

    /// 2-norm condition number from singular values.
    pub fn condition_number(&self) -> f64 {
        let sv = self.to_nalgebra().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Eigenvalues from the diagonal of a complex Schur form.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(GybeError::Dimension("eigenvalues of a non-square matrix".into()));
        }
        let schur = nalgebra::linalg::Schur::try_new(self.to_nalgebra(), f64::EPSILON, 10_000)
            .ok_or_else(|| GybeError::Singular("Schur iteration did not converge".into()))?;
        let (_, t) = schur.unpack();
        Ok(t.diagonal().iter().cloned().collect())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        &mut self.data[r * self.cols + c]
    }
}

fn zip_with(a: &CMatrix, b: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    CMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect() }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

/// Panics on shape mismatch; use [`CMatrix::matmul`] for a fallible product.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re/im length mismatch"));
        }
        let data = j.re.iter().zip(&j.im).map(|(&a, &b)| c(a, b)).collect();
        CMatrix::new(j.rows, j.cols, data).map_err(serde::de::Error::custom)
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, col| a[(r / br, col / bc)] * b[(r % br, col % bc)])
}

pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1), |acc, f| kron(&acc, f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteDims(pub Vec<usize>);

impl SiteDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(GybeError::Dimension(format!("invalid site dims {dims:?}")));
        }
        Ok(Self(dims))
    }

    pub fn uniform(d: usize, sites: usize) -> Self {
        Self(vec![d; sites])
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn span_dim(&self, start: usize, len: usize) -> usize {
        self.0[start..start + len].iter().product()
    }
}

/// `I ⊗ op ⊗ I` with `op` covering the sites `start..start+s`, where `s` is
/// found from the operator dimension.
pub fn embed_operator(op: &CMatrix, dims: &SiteDims, start: usize) -> Result<CMatrix> {
    if !op.is_square() {
        return Err(GybeError::Dimension("embedded operator must be square".into()));
    }
    if start >= dims.len() {
        return Err(GybeError::Dimension(format!("start site {start} outside {} sites", dims.len())));
    }
    let mut acc = 1;
    let mut end = start;
    while end < dims.len() && acc < op.rows() {
        acc *= dims.0[end];
        end += 1;
    }
    if acc != op.rows() {
        return Err(GybeError::Dimension(format!(
            "operator of dimension {} does not factor over sites from {start} of {:?}",
            op.rows(),
            dims.0
        )));
    }
    let left = CMatrix::identity(dims.0[..start].iter().product());
    let right = CMatrix::identity(dims.0[end..].iter().product());
    Ok(kron(&kron(&left, op), &right))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max_abs: f64,
    pub frobenius: f64,
}

impl Residual {
    pub fn zero() -> Self {
        Self { max_abs: 0.0, frobenius: 0.0 }
    }

    pub fn max(self, other: Residual) -> Residual {
        Residual { max_abs: self.max_abs.max(other.max_abs), frobenius: self.frobenius.max(other.frobenius) }
    }
}

pub fn residual_norm(a: &CMatrix, b: &CMatrix) -> Result<Residual> {
    if a.shape() != b.shape() {
        return Err(GybeError::Dimension(format!("residual of {:?} vs {:?}", a.shape(), b.shape())));
    }
    let d = a - b;
    Ok(Residual { max_abs: d.max_abs(), frobenius: d.frobenius() })
}

pub mod pauli {
    use super::*;

    pub fn id2() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn sx() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn sy() -> CMatrix {
        CMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn sz() -> CMatrix {
        CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Pauli string from a word over `I x y z`, e.g. `"zyIx"`.
    pub fn string(word: &str) -> CMatrix {
        let ops: Vec<CMatrix> = word
            .chars()
            .map(|ch| match ch {
                'I' | 'i' => id2(),
                'x' => sx(),
                'y' => sy(),
                'z' => sz(),
                other => panic!("unknown Pauli letter {other}"),
            })
            .collect();
        kron_all(&ops.iter().collect::<Vec<_>>())
    }
}
