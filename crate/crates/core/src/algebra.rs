//! Finite-dimensional W*-algebras `A = M_{k₁}(ℂ) ⊕ … ⊕ M_{k_m}(ℂ)`.
//!
//! Every finite-dimensional W*-algebra is of this form. Elements are stored as
//! one dense complex matrix per block; the product, adjoint, order and
//! functional calculus all act blockwise.

use std::fmt;

use num_complex::Complex64;

use crate::eigen::{eig_hermitian, max_abs, CMatrix, HermitianEig};
use crate::error::{Error, Result};

/// Relative merge tolerance used by [`AlgebraElement::spectral_decomposition`].
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;
/// Relative cutoff below which eigenvalues count as zero in [`AlgebraElement::sqrt_pinv`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Relative tolerance for positivity and order tests.
pub const DEFAULT_ORDER_TOL: f64 = 1e-10;

/// Tolerance handed to the eigensolver for matrices that are Hermitian by construction.
const INTERNAL_EIG_TOL: f64 = 1e-8;

/// Block sizes `k₁, …, k_m` of a direct sum of full matrix algebras.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    block_sizes: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidShape("an algebra needs at least one block".into()));
        }
        if let Some(pos) = block_sizes.iter().position(|&k| k == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has size 0")));
        }
        Ok(AlgebraShape { block_sizes })
    }

    /// `M_k(ℂ)`.
    pub fn full_matrix(k: usize) -> Result<Self> {
        Self::new(vec![k])
    }

    /// `ℂ^m`, i.e. `m` blocks of size one.
    pub fn commutative(m: usize) -> Result<Self> {
        Self::new(vec![1; m])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Complex dimension `Σ kⱼ²`.
    pub fn dimension(&self) -> usize {
        self.block_sizes.iter().map(|k| k * k).sum()
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "algebra blocks {:?} vs {:?}",
                self.block_sizes, other.block_sizes
            )));
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .block_sizes
            .iter()
            .map(|&k| if k == 1 { "C".to_string() } else { format!("M{k}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// An element of `A`, one complex `kⱼ×kⱼ` matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

/// `a = Σ λᵢ Pᵢ` with real `λᵢ` strictly decreasing and `Pᵢ` orthogonal projections summing to `1_A`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<AlgebraElement>,
}

impl SpectralDecomposition {
    /// `Σ λᵢ Pᵢ`.
    pub fn reassemble(&self, shape: &AlgebraShape) -> AlgebraElement {
        self.eigenvalues
            .iter()
            .zip(&self.projections)
            .fold(AlgebraElement::zero(shape), |acc, (&l, p)| {
                acc.add(&p.scale_real(l)).expect("projections share the shape")
            })
    }
}

impl AlgebraElement {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (j, (b, &k)) in blocks.iter().zip(shape.block_sizes()).enumerate() {
            if b.nrows() != k || b.ncols() != k {
                return Err(Error::ShapeMismatch(format!(
                    "block {j} is {}x{}, expected {k}x{k}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("algebra element"));
            }
        }
        Ok(AlgebraElement { shape, blocks })
    }

    pub(crate) fn from_blocks_unchecked(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Self {
        debug_assert_eq!(blocks.len(), shape.num_blocks());
        AlgebraElement { shape, blocks }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_sizes().iter().map(|&k| CMatrix::zeros(k, k)).collect();
        Self::from_blocks_unchecked(shape.clone(), blocks)
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::scalar(shape, Complex64::new(1.0, 0.0))
    }

    /// `c·1_A`.
    pub fn scalar(shape: &AlgebraShape, c: Complex64) -> Self {
        let blocks = shape
            .block_sizes()
            .iter()
            .map(|&k| CMatrix::identity(k, k) * c)
            .collect();
        Self::from_blocks_unchecked(shape.clone(), blocks)
    }

    /// Central element taking the value `values[j]·I` on block `j`.
    pub fn central(shape: &AlgebraShape, values: &[Complex64]) -> Result<Self> {
        if values.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} central values, got {}",
                shape.num_blocks(),
                values.len()
            )));
        }
        let blocks = shape
            .block_sizes()
            .iter()
            .zip(values)
            .map(|(&k, &c)| CMatrix::identity(k, k) * c)
            .collect();
        Ok(Self::from_blocks_unchecked(shape.clone(), blocks))
    }

    /// Diagonal element with real entries, `diagonals[j]` filling block `j`.
    pub fn real_diagonal(shape: &AlgebraShape, diagonals: &[&[f64]]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = diagonals
            .iter()
            .map(|d| d.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::diagonal(shape, &complex)
    }

    pub fn diagonal(shape: &AlgebraShape, diagonals: &[Vec<Complex64>]) -> Result<Self> {
        if diagonals.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} diagonals, got {}",
                shape.num_blocks(),
                diagonals.len()
            )));
        }
        let blocks = diagonals
            .iter()
            .map(|d| CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
            .collect();
        Self::new(shape.clone(), blocks)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &CMatrix {
        &self.blocks[j]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self::from_blocks_unchecked(self.shape.clone(), blocks))
    }

    fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self::from_blocks_unchecked(self.shape.clone(), self.blocks.iter().map(f).collect())
    }

    /// Algebra product, blockwise matrix multiplication.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|a| a * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map_blocks(|a| a.scale(c))
    }

    /// The involution: blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map_blocks(|a| a.adjoint())
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let gram = b.adjoint() * b;
                let top = hermitian_eig(&gram).values.first().copied().unwrap_or(0.0);
                top.max(0.0).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry difference; a cheap entrywise distance.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// `‖a − a*‖`.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.sub(&self.adjoint()).expect("same shape").norm()
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_defect() <= tol
    }

    /// `‖a − a*‖ ≤ tol` and `‖a² − a‖ ≤ tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.projection_defect() <= tol
    }

    /// `max(‖a − a*‖, ‖a² − a‖)`.
    pub fn projection_defect(&self) -> f64 {
        let square = self.mul(self).expect("same shape");
        let idem = square.sub(self).expect("same shape").norm();
        self.self_adjoint_defect().max(idem)
    }

    /// True iff `a` commutes with `A`, i.e. every block is a multiple of the identity.
    pub fn is_central(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| {
            let k = b.nrows();
            let mean = b.trace() / k as f64;
            max_abs(&(b - CMatrix::identity(k, k) * mean)) <= tol
        })
    }

    /// Smallest eigenvalue over all blocks of a self-adjoint element.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| hermitian_eig(&hermitian_part(b)).values.last().copied().unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Positivity: self-adjoint with every eigenvalue `≥ −tol`.
    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        let allowed = tol.max(DEFAULT_ORDER_TOL * (1.0 + self.norm()));
        let defect = self.self_adjoint_defect();
        if defect > allowed {
            return Err(Error::NotSelfAdjoint { defect, allowed });
        }
        Ok(self.min_eigenvalue() >= -tol)
    }

    /// Loewner order `self ≤ other`: `other − self` is positive semidefinite in every block.
    pub fn leq(&self, other: &Self, tol: f64) -> Result<bool> {
        for x in [self, other] {
            let allowed = tol.max(DEFAULT_ORDER_TOL * (1.0 + x.norm()));
            let defect = x.self_adjoint_defect();
            if defect > allowed {
                return Err(Error::NotSelfAdjoint { defect, allowed });
            }
        }
        other.sub(self)?.is_positive(tol)
    }

    /// [`leq`](Self::leq) with tolerance `1e-10·(1 + ‖other − self‖)`.
    pub fn leq_default(&self, other: &Self) -> Result<bool> {
        let scale = other.sub(self)?.norm();
        self.leq(other, DEFAULT_ORDER_TOL * (1.0 + scale))
    }

    /// Center-valued trace: `(tr(aⱼ)/kⱼ)·I` on each block.
    pub fn center_valued_trace(&self) -> Self {
        self.map_blocks(|b| {
            let k = b.nrows();
            CMatrix::identity(k, k) * (b.trace() / k as f64)
        })
    }

    /// Spectral decomposition of a self-adjoint element.
    ///
    /// Scalar eigenvalues across all blocks that lie within `tol·‖a‖` of their
    /// neighbour are merged into one spectral projection.
    pub fn spectral_decomposition(&self, tol: f64) -> Result<SpectralDecomposition> {
        let norm = self.norm();
        let defect = self.self_adjoint_defect();
        let allowed = tol * (1.0 + norm);
        if defect > allowed {
            return Err(Error::NotSelfAdjoint { defect, allowed });
        }
        let eigs: Vec<HermitianEig> = self.blocks.iter().map(|b| hermitian_eig(&hermitian_part(b))).collect();

        // (value, block, row)
        let mut scalars: Vec<(f64, usize, usize)> = eigs
            .iter()
            .enumerate()
            .flat_map(|(j, e)| e.values.iter().enumerate().map(move |(r, &v)| (v, j, r)))
            .collect();
        scalars.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

        let merge = tol * norm;
        let mut clusters: Vec<Vec<(f64, usize, usize)>> = Vec::new();
        for s in scalars {
            match clusters.last_mut() {
                Some(c) if c.last().map(|l| l.0 - s.0 <= merge).unwrap_or(false) => c.push(s),
                _ => clusters.push(vec![s]),
            }
        }

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut projections = Vec::with_capacity(clusters.len());
        for cluster in clusters {
            let mean = cluster.iter().map(|s| s.0).sum::<f64>() / cluster.len() as f64;
            let mut p = AlgebraElement::zero(&self.shape);
            for &(_, j, r) in &cluster {
                let row = eigs[j].vectors.row(r);
                p.blocks[j] += row.adjoint() * row;
            }
            eigenvalues.push(mean);
            projections.push(p);
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            projections,
        })
    }

    /// Pseudo-inverse square root and support projection of a positive element.
    ///
    /// Returns `(s, q)` with `s·a·s = q`. Eigenvalues below `rank_tol·‖a‖` are
    /// treated as zero.
    pub fn sqrt_pinv(&self, rank_tol: f64) -> Result<(Self, Self)> {
        let norm = self.norm();
        let allowed = DEFAULT_ORDER_TOL * (1.0 + norm);
        let defect = self.self_adjoint_defect();
        if defect > allowed {
            return Err(Error::NotSelfAdjoint { defect, allowed });
        }
        let cutoff = rank_tol * norm;
        let mut s_blocks = Vec::with_capacity(self.blocks.len());
        let mut q_blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let k = b.nrows();
            let eig = hermitian_eig(&hermitian_part(b));
            let mut s = CMatrix::zeros(k, k);
            let mut q = CMatrix::zeros(k, k);
            for (r, &lambda) in eig.values.iter().enumerate() {
                if lambda < -(allowed.max(cutoff)) {
                    return Err(Error::NotPositive { min_eigenvalue: lambda });
                }
                if lambda > cutoff && lambda > 0.0 {
                    let row = eig.vectors.row(r);
                    let proj = row.adjoint() * row;
                    s += proj.scale(1.0 / lambda.sqrt());
                    q += proj;
                }
            }
            s_blocks.push(s);
            q_blocks.push(q);
        }
        Ok((
            Self::from_blocks_unchecked(self.shape.clone(), s_blocks),
            Self::from_blocks_unchecked(self.shape.clone(), q_blocks),
        ))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(format_block).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

fn format_scalar(z: &Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

fn format_block(b: &CMatrix) -> String {
    let rows: Vec<String> = (0..b.nrows())
        .map(|i| {
            (0..b.ncols())
                .map(|j| format_scalar(&b[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("({})", rows.join("; "))
}

pub(crate) fn hermitian_part(b: &CMatrix) -> CMatrix {
    (b + b.adjoint()).scale(0.5)
}

/// Eigensolver call for matrices that are Hermitian by construction.
pub(crate) fn hermitian_eig(h: &CMatrix) -> HermitianEig {
    eig_hermitian(h, INTERNAL_EIG_TOL).expect("Hermitian input to the Jacobi solver")
}
