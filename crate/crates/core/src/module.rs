//! The free Hilbert A-module `Aⁿ` with inner product `⟨x, y⟩ = Σᵢ xᵢ·yᵢ*`.
//!
//! On block `j` of the algebra a module element is a `kⱼ × (n·kⱼ)` complex
//! matrix whose `i`-th `kⱼ`-column strip is the coordinate `xᵢ`. In that
//! picture the left action of `A` is left multiplication, the inner product is
//! `X·Y*`, and module operators act by right multiplication.

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, AlgebraShape, DEFAULT_RANK_TOL};
use crate::eigen::CMatrix;
use crate::error::{Error, Result};

/// `Aⁿ` for a given algebra shape and rank `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertModule {
    shape: AlgebraShape,
    rank: usize,
}

impl HilbertModule {
    pub fn new(shape: AlgebraShape, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidShape("module rank must be at least 1".into()));
        }
        Ok(HilbertModule { shape, rank })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Standard basis vector `eᵢ` (zero-based index).
    pub fn basis(&self, i: usize) -> ModuleElement {
        assert!(i < self.rank, "basis index {i} out of range for rank {}", self.rank);
        let coords = (0..self.rank)
            .map(|c| {
                if c == i {
                    AlgebraElement::identity(&self.shape)
                } else {
                    AlgebraElement::zero(&self.shape)
                }
            })
            .collect();
        ModuleElement {
            module: self.clone(),
            coords,
        }
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement {
            module: self.clone(),
            coords: vec![AlgebraElement::zero(&self.shape); self.rank],
        }
    }

    pub(crate) fn ensure_same(&self, other: &HilbertModule) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "module {}^{} vs {}^{}",
                self.shape, self.rank, other.shape, other.rank
            )));
        }
        Ok(())
    }
}

/// An element `(x₁, …, xₙ)` of `Aⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement {
    module: HilbertModule,
    coords: Vec<AlgebraElement>,
}

impl ModuleElement {
    pub fn new(module: HilbertModule, coords: Vec<AlgebraElement>) -> Result<Self> {
        if coords.len() != module.rank {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                module.rank,
                coords.len()
            )));
        }
        for c in &coords {
            module.shape.ensure_same(c.shape())?;
        }
        Ok(ModuleElement { module, coords })
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn coords(&self) -> &[AlgebraElement] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &AlgebraElement {
        &self.coords[i]
    }

    /// The `k × n·k` row matrix of block `j`.
    pub fn block_rows(&self, j: usize) -> CMatrix {
        let k = self.module.shape.block_sizes()[j];
        let n = self.module.rank;
        let mut out = CMatrix::zeros(k, n * k);
        for (i, c) in self.coords.iter().enumerate() {
            out.view_mut((0, i * k), (k, k)).copy_from(c.block(j));
        }
        out
    }

    /// Inverse of [`block_rows`](Self::block_rows): one `k × n·k` matrix per block.
    pub fn from_block_rows(module: &HilbertModule, rows: &[CMatrix]) -> Result<Self> {
        let shape = module.shape();
        if rows.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} block row matrices, got {}",
                shape.num_blocks(),
                rows.len()
            )));
        }
        let n = module.rank;
        for (j, (r, &k)) in rows.iter().zip(shape.block_sizes()).enumerate() {
            if r.nrows() != k || r.ncols() != n * k {
                return Err(Error::ShapeMismatch(format!(
                    "block {j} rows are {}x{}, expected {k}x{}",
                    r.nrows(),
                    r.ncols(),
                    n * k
                )));
            }
        }
        let coords = (0..n)
            .map(|i| {
                let blocks = rows
                    .iter()
                    .zip(shape.block_sizes())
                    .map(|(r, &k)| r.view((0, i * k), (k, k)).into_owned())
                    .collect();
                AlgebraElement::new(shape.clone(), blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: module.clone(),
            coords,
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&AlgebraElement, &AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<Self> {
        self.module.ensure_same(&other.module)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: self.module.clone(),
            coords,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ModuleElement {
            module: self.module.clone(),
            coords: self.coords.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `⟨x, y⟩ = Σᵢ xᵢ·yᵢ*`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.module.ensure_same(&other.module)?;
        let mut acc = AlgebraElement::zero(&self.module.shape);
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc = acc.add(&a.mul(&b.adjoint())?)?;
        }
        Ok(acc)
    }

    /// `a·x = (a·x₁, …, a·xₙ)`.
    pub fn left_action(&self, a: &AlgebraElement) -> Result<Self> {
        self.module.shape.ensure_same(a.shape())?;
        let coords = self.coords.iter().map(|c| a.mul(c)).collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: self.module.clone(),
            coords,
        })
    }

    /// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_product(self).expect("same module").norm().sqrt()
    }

    /// Rescale `x` so that `⟨x', x'⟩` is the support projection of `⟨x, x⟩`.
    ///
    /// Returns `(x', q)` with `x' = s·x`, where `s` is the pseudo-inverse square
    /// root of `⟨x, x⟩` and `q` its support projection. `rank_tol` is relative
    /// to `‖⟨x, x⟩‖`.
    pub fn normalize_to_projection(&self, rank_tol: f64) -> Result<(Self, AlgebraElement)> {
        let gram = self.inner_product(self)?;
        if gram.norm() == 0.0 {
            return Err(Error::ZeroElement);
        }
        let (s, q) = gram.sqrt_pinv(rank_tol)?;
        Ok((self.left_action(&s)?, q))
    }

    /// [`normalize_to_projection`](Self::normalize_to_projection) with the default rank tolerance.
    pub fn normalize(&self) -> Result<(Self, AlgebraElement)> {
        self.normalize_to_projection(DEFAULT_RANK_TOL)
    }
}

/// Smallest singular value of `z ↦ (⟨z, xᵢ⟩)ᵢ`, flattened to a complex-linear map.
///
/// On block `j` the map sends each row of `z` to its inner products with all
/// rows of all `xᵢ`, so its singular values are those of the stacked row
/// matrix of the `xᵢ`.
pub fn complement_singular_value(xs: &[ModuleElement]) -> Result<f64> {
    let first = xs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty eigenvector list".into()))?;
    let module = first.module().clone();
    for x in xs {
        module.ensure_same(x.module())?;
    }
    let n = module.rank();
    let mut smallest = f64::INFINITY;
    for (j, &k) in module.shape().block_sizes().iter().enumerate() {
        let dim = n * k;
        let stacked_rows = xs.len() * k;
        if stacked_rows < dim {
            return Ok(0.0);
        }
        let mut g = CMatrix::zeros(stacked_rows, dim);
        for (i, x) in xs.iter().enumerate() {
            g.view_mut((i * k, 0), (k, dim)).copy_from(&x.block_rows(j));
        }
        // Direct SVD: going through the eigenvalues of G*G would square the
        // condition number and lose half the digits near zero.
        let low = g.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
        smallest = smallest.min(low);
    }
    Ok(smallest)
}

/// True iff the submodule generated by `xs` has trivial orthogonal complement,
/// i.e. the smallest singular value of the flattened map exceeds `tol`.
pub fn orthogonal_complement_trivial(xs: &[ModuleElement], tol: f64) -> bool {
    complement_singular_value(xs).map(|s| s > tol).unwrap_or(false)
}
