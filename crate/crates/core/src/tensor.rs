//! Dense complex matrices with subsystem-aware operations.
//!
//! Composite systems are addressed left to right: subsystem 0 is the most
//! significant digit of a flat index, so `kron(a, b)` places `a` on
//! subsystem 0 and `b` on subsystem 1.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Absolute Frobenius-norm threshold used for every approximate equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(abs_eps: f64) -> Result<Self> {
        if abs_eps.is_nan() || abs_eps < 0.0 || !abs_eps.is_finite() {
            return Err(Error::Argument(format!(
                "tolerance must be a finite nonnegative number, got {abs_eps}"
            )));
        }
        Ok(Tolerance { abs_eps })
    }

    pub fn accepts(&self, residual: f64) -> bool {
        residual <= self.abs_eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: Self::DEFAULT_EPS,
        }
    }
}

/// Ordered list of subsystem dimensions. The empty list is the trivial system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SystemDims(Vec<usize>);

impl SystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Dimension(format!("subsystem {pos} has dimension 0")));
        }
        let sys = SystemDims(dims);
        sys.checked_total()?;
        Ok(sys)
    }

    /// Panicking constructor for literal dimensions in examples and tests.
    pub fn of(dims: &[usize]) -> Self {
        Self::new(dims.to_vec()).expect("valid system dimensions")
    }

    pub fn trivial() -> Self {
        SystemDims(Vec::new())
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    fn checked_total(&self) -> Result<usize> {
        self.0
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Dimension(format!("system {self} is too large")))
    }

    pub fn concat(&self, other: &SystemDims) -> SystemDims {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        SystemDims(dims)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> SystemDims {
        SystemDims(self.0[range].to_vec())
    }

    pub fn select(&self, indices: &[usize]) -> SystemDims {
        SystemDims(indices.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for SystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl From<SystemDims> for Vec<usize> {
    fn from(s: SystemDims) -> Self {
        s.0
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
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
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Real-entry matrix from nested rows; convenient for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|` for a column vector ψ.
    pub fn outer(ket: &[C64]) -> Self {
        Self::from_fn(ket.len(), ket.len(), |i, j| ket[i] * ket[j].conj())
    }

    /// Matrix unit `|i⟩⟨j|` of size n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
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

    pub fn iter_rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise `self + s * other`.
    pub fn add_scaled(&self, other: &ComplexMatrix, s: C64) -> Result<Self> {
        self.same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        })
    }

    /// Frobenius inner product `Tr(self† other)`.
    pub fn inner(&self, other: &ComplexMatrix) -> Result<C64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigenvalues of the Hermitian part `(m + m†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Dimension("eigenvalues need a square matrix".into()));
        }
        let h = self.add_scaled(&self.adjoint(), ONE)?.scale_real(0.5);
        let eig = nalgebra::SymmetricEigen::new(h.to_nalgebra());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        Ok(vals)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, ONE).expect("matrix shapes agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, -ONE).expect("matrix shapes agree")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions agree")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product; `a` occupies the leading subsystem.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or_else(|| Error::Dimension("kron row count overflows".into()))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or_else(|| Error::Dimension("kron column count overflows".into()))?;
    rows.checked_mul(cols)
        .ok_or_else(|| Error::Dimension("kron size overflows".into()))?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let dst = (ar * b.rows + br) * cols + ac * b.cols;
                let src = &b.data[br * b.cols..(br + 1) * b.cols];
                for (d, &y) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *d = x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    ms.into_iter()
        .try_fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

fn check_square_on(m: &ComplexMatrix, sys: &SystemDims) -> Result<()> {
    if !m.is_square() || m.rows != sys.total() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but system {sys} has total dimension {}",
            m.rows,
            m.cols,
            sys.total()
        )));
    }
    Ok(())
}

/// Row-major strides of a system.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets in the full index space for every combined index over `subset`.
fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offs = vec![0usize];
    for &k in subset {
        let mut next = Vec::with_capacity(offs.len() * dims[k]);
        for &o in &offs {
            for v in 0..dims[k] {
                next.push(o + v * st[k]);
            }
        }
        offs = next;
    }
    offs
}

fn normalize_subset(sys: &SystemDims, keep: &[usize]) -> Result<Vec<usize>> {
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() {
        return Err(Error::Argument(format!("duplicate subsystem in {keep:?}")));
    }
    if let Some(&bad) = k.iter().find(|&&i| i >= sys.len()) {
        return Err(Error::Argument(format!(
            "subsystem {bad} out of range for system {sys}"
        )));
    }
    Ok(k)
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// ascending order.
pub fn partial_trace(m: &ComplexMatrix, sys: &SystemDims, keep: &[usize]) -> Result<ComplexMatrix> {
    check_square_on(m, sys)?;
    let keep = normalize_subset(sys, keep)?;
    let traced: Vec<usize> = (0..sys.len()).filter(|i| !keep.contains(i)).collect();
    let keep_off = subset_offsets(sys.dims(), &keep);
    let tr_off = subset_offsets(sys.dims(), &traced);
    let n = keep_off.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (r0, c0) = (keep_off[r], keep_off[c]);
        tr_off.iter().map(|&t| m[(r0 + t, c0 + t)]).sum()
    }))
}

/// Traces out the listed subsystems.
pub fn trace_out(m: &ComplexMatrix, sys: &SystemDims, traced: &[usize]) -> Result<ComplexMatrix> {
    let traced = normalize_subset(sys, traced)?;
    let keep: Vec<usize> = (0..sys.len()).filter(|i| !traced.contains(i)).collect();
    partial_trace(m, sys, &keep)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Argument(format!(
            "permutation {perm:?} has length {} but the system has {n} subsystems",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Argument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// For each flat index of the permuted system, the flat index it came from.
fn permutation_map(sys: &SystemDims, perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&p| sys.dims()[p]).collect();
    let old_strides = strides(sys.dims());
    let moved: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let mut map = vec![0usize; sys.total()];
    let mut digits = vec![0usize; new_dims.len()];
    for slot in map.iter_mut() {
        *slot = digits.iter().zip(&moved).map(|(d, s)| d * s).sum();
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// Reorders subsystems: new subsystem `k` is old subsystem `perm[k]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    sys: &SystemDims,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    check_square_on(m, sys)?;
    check_permutation(perm, sys.len())?;
    let map = permutation_map(sys, perm);
    let n = map.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| m[(map[r], map[c])]))
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

pub fn is_hermitian(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension("hermiticity needs a square matrix".into()));
    }
    Ok(frobenius_distance(m, &m.adjoint())? <= tol.abs_eps)
}

/// Hermitian within `tol` with no eigenvalue below `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    if !is_hermitian(m, tol)? {
        return Ok(false);
    }
    Ok(min_eigenvalue(m)? >= -tol.abs_eps)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(m.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0))
}

/// Contracts the trailing `q` block of `x` (on P ⊗ Q) against the leading
/// block of `f` (on Q ⊗ R), giving an operator on P ⊗ R:
/// `out[(p,r),(p',r')] = Σ x[(p,q),(p',q')] f[(q,r),(q',r')]`.
pub(crate) fn link(
    x: &ComplexMatrix,
    p: usize,
    q: usize,
    f: &ComplexMatrix,
    r: usize,
) -> Result<ComplexMatrix> {
    if x.rows != p * q || !x.is_square() || f.rows != q * r || !f.is_square() {
        return Err(Error::Dimension(format!(
            "link contraction: {}x{} on {p}*{q} against {}x{} on {q}*{r}",
            x.rows, x.cols, f.rows, f.cols
        )));
    }
    let n = p * r;
    let mut out = ComplexMatrix::zeros(n, n);
    for pr in 0..p {
        for pc in 0..p {
            for qr in 0..q {
                for qc in 0..q {
                    let xv = x[(pr * q + qr, pc * q + qc)];
                    if xv == ZERO {
                        continue;
                    }
                    for rr in 0..r {
                        let src = &f.data[(qr * r + rr) * f.cols + qc * r..][..r];
                        let dst = &mut out.data[(pr * r + rr) * n + pc * r..][..r];
                        for (d, &fv) in dst.iter_mut().zip(src) {
                            *d += xv * fv;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Replaces the listed subsystems by their maximally mixed reduction:
/// `m ↦ (I_X / d_X) ⊗ Tr_X m`, placed back in the original positions.
pub fn depolarize_subsystems(
    m: &ComplexMatrix,
    sys: &SystemDims,
    which: &[usize],
) -> Result<ComplexMatrix> {
    let which = normalize_subset(sys, which)?;
    let reduced = trace_out(m, sys, &which)?;
    let d: usize = which.iter().map(|&i| sys.dims()[i]).product();
    let rest: Vec<usize> = (0..sys.len()).filter(|i| !which.contains(i)).collect();
    // kron(reduced, I_X) lives on (rest..., which...); move factors home.
    let joint = kron(&reduced, &ComplexMatrix::identity(d))?.scale_real(1.0 / d as f64);
    let order: Vec<usize> = rest.iter().chain(which.iter()).copied().collect();
    let joint_sys = sys.select(&order);
    let mut inverse = vec![0usize; order.len()];
    for (pos, &orig) in order.iter().enumerate() {
        inverse[orig] = pos;
    }
    permute_subsystems(&joint, &joint_sys, &inverse)
}
