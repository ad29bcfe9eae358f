//! Dense complex matrices for registers of at most four qubits.
//!
//! Basis ordering: subsystems are listed left to right (A, B, C, D for the
//! four-qubit register) and the first subsystem is the most significant
//! digit of the flat index. For qubits this means basis index `i3 i2 i1 i0`
//! with A = `i3`. Every function in the crate uses this single convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k / dim, k % dim));
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from rows. Panics on ragged input; meant for literals.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "ragged matrix literal");
            data.extend_from_slice(row);
        }
        Self::new(dim, data).expect("invalid matrix literal")
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `a * b`, checked.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, other.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `u * self * u^dag`
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dag|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `max |U^dag U - I|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.adjoint().matmul(self).expect("same dimension");
        prod.max_abs_diff(&Self::identity(self.dim))
    }

    /// `[a, b] = ab - ba`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Spectral norm of a Hermitian matrix (largest absolute eigenvalue).
    pub fn hermitian_op_norm(&self) -> Result<f64> {
        let eig = hermitian_eig(self)?;
        Ok(eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix add on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sub on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix multiply on mismatched dimensions")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({0}x{0}) [", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: `out[i*db + k, j*db + l] = a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Ordered subsystem dimensions together with the subsystems on the first
/// side of a cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    dims: Vec<usize>,
    cut: Vec<usize>,
}

impl Bipartition {
    pub fn new(dims: Vec<usize>, cut: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidBipartition("subsystem dimensions must be positive".into()));
        }
        let mut sorted = cut.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cut.len() {
            return Err(Error::InvalidBipartition("cut lists a subsystem twice".into()));
        }
        if sorted.iter().any(|&k| k >= dims.len()) {
            return Err(Error::InvalidBipartition(format!(
                "cut {cut:?} references a subsystem outside 0..{}",
                dims.len()
            )));
        }
        if sorted.is_empty() || sorted.len() == dims.len() {
            return Err(Error::InvalidBipartition(
                "cut must be a nonempty proper subset of the subsystems".into(),
            ));
        }
        Ok(Self { dims, cut: sorted })
    }

    /// All subsystems are qubits.
    pub fn qubits(n: usize, cut: &[usize]) -> Result<Self> {
        Self::new(vec![2; n], cut.to_vec())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cut(&self) -> &[usize] {
        &self.cut
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if self.total_dim() != m.dim {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dims {:?} multiply to {}, matrix is {}x{}",
                self.dims,
                self.total_dim(),
                m.dim,
                m.dim
            )));
        }
        Ok(())
    }
}

/// Digits of a flat index in the mixed radix given by `dims`, most
/// significant first.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn flat(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Transposes the indices of the subsystems in `part.cut()`.
pub fn partial_transpose(rho: &ComplexMatrix, part: &Bipartition) -> Result<ComplexMatrix> {
    part.check(rho)?;
    let dims = part.dims();
    let n = rho.dim;
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut out = ComplexMatrix::zeros(n);
    for row in 0..n {
        digits(row, dims, &mut rd);
        for col in 0..n {
            digits(col, dims, &mut cd);
            let (mut r2, mut c2) = (rd.clone(), cd.clone());
            for &k in part.cut() {
                std::mem::swap(&mut r2[k], &mut c2[k]);
            }
            out[(flat(&r2, dims), flat(&c2, dims))] = rho[(row, col)];
        }
    }
    Ok(out)
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order.
pub fn partial_trace(rho: &ComplexMatrix, part: &Bipartition, keep: &[usize]) -> Result<ComplexMatrix> {
    part.check(rho)?;
    let dims = part.dims();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {keep:?} must be a nonempty subset of 0..{}",
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let n = rho.dim;
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut out = ComplexMatrix::zeros(out_dim);
    for row in 0..n {
        digits(row, dims, &mut rd);
        for col in 0..n {
            digits(col, dims, &mut cd);
            let traced_match = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| rd[k] == cd[k]);
            if !traced_match {
                continue;
            }
            let r: Vec<usize> = keep.iter().map(|&k| rd[k]).collect();
            let c: Vec<usize> = keep.iter().map(|&k| cd[k]).collect();
            out[(flat(&r, &kept_dims), flat(&c, &kept_dims))] += rho[(row, col)];
        }
    }
    Ok(out)
}

/// Eigenvalues in ascending order with eigenvectors stored as the matching
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `a[p,q]` and then
/// applies the real Jacobi rotation that zeroes it.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let herr = a.hermiticity_error();
    if herr > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herr));
    }
    let n = a.dim;
    // symmetrize so round-off in the input does not leak into the rotations
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)].conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag phase on q, then real rotation: columns p, q of J
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -s * phase.conj();
                let jqq = c * phase.conj();
                rotate(&mut m, &mut v, p, q, [jpp, jpq, jqp, jqq]);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// `m <- J^dag m J`, `v <- v J` for the 2x2 block `j = [jpp, jpq, jqp, jqq]`
/// embedded at rows/columns `p`, `q`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, j: [Complex64; 4]) {
    let [jpp, jpq, jqp, jqq] = j;
    let n = m.dim;
    for k in 0..n {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mp * jpp + mq * jqp;
        m[(k, q)] = mp * jpq + mq * jqq;
        let (vp, vq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vp * jpp + vq * jqp;
        v[(k, q)] = vp * jpq + vq * jqq;
    }
    for k in 0..n {
        let (mp, mq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = jpp.conj() * mp + jqp.conj() * mq;
        m[(q, k)] = jpq.conj() * mp + jqq.conj() * mq;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}
