use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{r, C64, CMP_TOL, EIG_FLOOR, HERMITIAN_TOL, NORM_TOL, TRACE_TOL};
use crate::error::{arg, Error, Result};

fn check_dims(len: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return arg(format!("factor dimensions {dims:?} must be non-empty and positive"));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return arg(format!(
            "factor dimensions {dims:?} multiply to {prod}, expected {len}"
        ));
    }
    Ok(())
}

/// A ket over a (possibly composite) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(amps.len(), &dims)?;
        Ok(Self { amps: DVector::from_vec(amps), dims })
    }

    /// Single-factor vector.
    pub fn from_amps(amps: Vec<C64>) -> Self {
        let n = amps.len();
        Self { amps: DVector::from_vec(amps), dims: vec![n] }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::from_amps(amps.iter().map(|&x| r(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amps: DVector::zeros(dim), dims: vec![dim] }
    }

    /// Computational basis vector `|index⟩` of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut v = Self::zeros(dim);
        v.amps[index] = r(1.0);
        v
    }

    pub(crate) fn from_dvector(amps: DVector<C64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(amps.len(), dims.iter().product::<usize>());
        Self { amps, dims }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= f64::EPSILON {
            return Err(Error::Argument("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(r(1.0 / n)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: &self.amps * s, dims: self.dims.clone() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    /// Sum of two vectors with identical factor structure.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return arg(format!("cannot add vectors with dims {:?} and {:?}", self.dims, other.dims));
        }
        Ok(Self { amps: &self.amps + &other.amps, dims: self.dims.clone() })
    }

    /// `|v⟩⟨v|`.
    pub fn projector(&self) -> Operator {
        Operator {
            mat: &self.amps * self.amps.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Contiguous block `[start, start + len)` as a single-factor vector.
    /// With a `T ⊗ E` layout, block `t` of length `d_E` is `(⟨t| ⊗ I)|v⟩`.
    pub fn block(&self, start: usize, len: usize) -> Self {
        Self::from_dvector(self.amps.rows(start, len).into_owned(), vec![len])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner(x: &StateVector, y: &StateVector) -> Result<C64> {
    if x.len() != y.len() {
        return arg(format!("inner product of vectors of length {} and {}", x.len(), y.len()));
    }
    Ok(x.amps.dotc(&y.amps))
}

/// Kronecker composition with the left factor most significant.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

pub fn tensor<T: Tensor>(x: &T, y: &T) -> T {
    x.tensor(y)
}

fn concat_dims(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            amps: self.amps.kronecker(&other.amps),
            dims: concat_dims(&self.dims, &other.dims),
        }
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
            dims: concat_dims(&self.dims, &other.dims),
        }
    }
}

/// Square operator over a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(mat: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if !mat.is_square() {
            return arg(format!("operator must be square, got {}x{}", mat.nrows(), mat.ncols()));
        }
        check_dims(mat.nrows(), &dims)?;
        Ok(Self { mat, dims })
    }

    /// Single-factor operator from a square matrix.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    /// Row-major real entries.
    pub fn from_real_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return arg(format!("expected {} entries, got {}", n * n, rows.len()));
        }
        Self::from_matrix(DMatrix::from_row_iterator(n, n, rows.iter().map(|&x| r(x))))
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim), dims: vec![dim] }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self { mat: DMatrix::zeros(n, n), dims }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let d = DVector::from_iterator(n, values.iter().map(|&x| r(x)));
        Self { mat: DMatrix::from_diagonal(&d), dims: vec![n] }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Same matrix, reinterpreted with a different factorization.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.mat, dims)
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), dims: self.dims.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return arg(format!("cannot multiply {}-dim and {}-dim operators", self.dim(), other.dim()));
        }
        Ok(Self { mat: &self.mat * &other.mat, dims: self.dims.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return arg(format!("cannot add {}-dim and {}-dim operators", self.dim(), other.dim()));
        }
        Ok(Self { mat: &self.mat + &other.mat, dims: self.dims.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(r(-1.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { mat: &self.mat * s, dims: self.dims.clone() }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.dim() != v.len() {
            return arg(format!("cannot apply {}-dim operator to {}-dim vector", self.dim(), v.len()));
        }
        Ok(StateVector::from_dvector(&self.mat * v.as_dvector(), self.dims.clone()))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry of `|M - M†|`.
    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= HERMITIAN_TOL
    }

    /// Max entry of `|U†U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        prod.iter()
            .enumerate()
            .map(|(k, z)| {
                let (i, j) = (k % n, k / n);
                let id = if i == j { 1.0 } else { 0.0 };
                (z - r(id)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Density-operator check: Hermitian, PSD up to [`EIG_FLOOR`] and unit
    /// trace up to [`TRACE_TOL`].
    pub fn check_density(&self) -> Result<()> {
        let h = self.hermitian_residual();
        if h > CMP_TOL {
            return Err(Error::Validity(format!("density operator not Hermitian (residual {h:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validity(format!("density operator has trace {tr}")));
        }
        let eig = eig_hermitian(self)?;
        let min = eig.values[0];
        if min < -EIG_FLOOR {
            return Err(Error::Validity(format!("density operator has eigenvalue {min:e}")));
        }
        Ok(())
    }
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Partial trace keeping the listed factors (in ascending factor order).
pub fn partial_trace(rho: &Operator, keep: &[usize]) -> Result<Operator> {
    let dims = rho.dims();
    let nf = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return arg(format!("duplicate factor index in {keep:?}"));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= nf) {
        return arg(format!("factor index {bad} out of range for {nf} factors"));
    }
    if kept.is_empty() {
        return arg("partial trace must keep at least one factor");
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let n = rho.dim();
    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    let mut di = vec![0; nf];
    let mut dj = vec![0; nf];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            // traced factors must agree
            let traced_match = (0..nf)
                .filter(|k| !kept.contains(k))
                .all(|k| di[k] == dj[k]);
            if !traced_match {
                continue;
            }
            let (mut oi, mut oj) = (0, 0);
            for &k in &kept {
                oi = oi * dims[k] + di[k];
                oj = oj * dims[k] + dj[k];
            }
            out[(oi, oj)] += rho.mat[(i, j)];
        }
    }
    Operator::new(out, kept_dims)
}

/// Eigendecomposition of a Hermitian operator; eigenvalues ascending, columns
/// of `vectors` are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigen {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&x| r(x)));
        &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &Operator) -> Result<Eigen> {
    let h = m.hermitian_residual();
    if h > CMP_TOL {
        return arg(format!("eig_hermitian: operator not Hermitian (residual {h:e})"));
    }
    let sym = (&m.mat + m.mat.adjoint()) * r(0.5);
    let se = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |i, j| se.eigenvectors[(i, order[j])]);
    Ok(Eigen { values, vectors })
}
