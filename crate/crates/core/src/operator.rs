//! A-linear operators on `Aⁿ`.
//!
//! An operator is an `n×n` array of algebra elements acting from the right,
//! `T(x)ⱼ = Σᵢ xᵢ·Tᵢⱼ`. Left multiplication by `A` commutes with this action
//! structurally, so every `ModuleOperator` is A-linear by construction.
//!
//! On a finitely generated module every bounded module operator is a finite
//! sum of θ-operators, so the "compact" operators are all of them; there is no
//! separate compactness flag.

use num_complex::Complex64;

use crate::algebra::{hermitian_eig, AlgebraElement};
use crate::eigen::{max_abs, CMatrix};
use crate::error::{Error, Result};
use crate::module::{HilbertModule, ModuleElement};

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleOperator {
    module: HilbertModule,
    // row-major n×n
    entries: Vec<AlgebraElement>,
}

impl ModuleOperator {
    /// Operator from its `n×n` entries; `entries[i][j]` is `Tᵢⱼ`.
    pub fn new(module: HilbertModule, entries: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let n = module.rank();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "operator entries must form an {n}x{n} array"
            )));
        }
        let flat: Vec<AlgebraElement> = entries.into_iter().flatten().collect();
        for e in &flat {
            module.shape().ensure_same(e.shape())?;
        }
        Ok(ModuleOperator { module, entries: flat })
    }

    pub fn zero(module: &HilbertModule) -> Self {
        let n = module.rank();
        ModuleOperator {
            module: module.clone(),
            entries: vec![AlgebraElement::zero(module.shape()); n * n],
        }
    }

    pub fn identity(module: &HilbertModule) -> Self {
        let n = module.rank();
        let mut op = Self::zero(module);
        for i in 0..n {
            op.entries[i * n + i] = AlgebraElement::identity(module.shape());
        }
        op
    }

    /// Coordinatewise right multiplication `x ↦ (x₁·a, …, xₙ·a)`.
    pub fn right_multiplication(module: &HilbertModule, a: &AlgebraElement) -> Result<Self> {
        module.shape().ensure_same(a.shape())?;
        let n = module.rank();
        let mut op = Self::zero(module);
        for i in 0..n {
            op.entries[i * n + i] = a.clone();
        }
        Ok(op)
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.module.rank() + j]
    }

    pub fn entries(&self) -> Vec<Vec<AlgebraElement>> {
        self.entries
            .chunks(self.module.rank())
            .map(|row| row.to_vec())
            .collect()
    }

    /// The rank-one operator `θ_{x,y}(z) = ⟨z, x⟩·y`, with entries `xᵢ*·yⱼ`.
    pub fn theta(x: &ModuleElement, y: &ModuleElement) -> Result<Self> {
        x.module().ensure_same(y.module())?;
        let n = x.module().rank();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            let xi_adj = x.coord(i).adjoint();
            for j in 0..n {
                entries.push(xi_adj.mul(y.coord(j))?);
            }
        }
        Ok(ModuleOperator {
            module: x.module().clone(),
            entries,
        })
    }

    /// `(T*)ᵢⱼ = (Tⱼᵢ)*`.
    pub fn adjoint(&self) -> Self {
        let n = self.module.rank();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.entry(j, i).adjoint());
            }
        }
        ModuleOperator {
            module: self.module.clone(),
            entries,
        }
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.module.ensure_same(x.module())?;
        let n = self.module.rank();
        let shape = self.module.shape();
        let coords = (0..n)
            .map(|j| {
                (0..n).try_fold(AlgebraElement::zero(shape), |acc, i| {
                    acc.add(&x.coord(i).mul(self.entry(i, j))?)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ModuleElement::new(self.module.clone(), coords)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.module.ensure_same(&other.module)?;
        let n = self.module.rank();
        let shape = self.module.shape();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for l in 0..n {
                let e = (0..n).try_fold(AlgebraElement::zero(shape), |acc, j| {
                    acc.add(&other.entry(i, j).mul(self.entry(j, l))?)
                })?;
                entries.push(e);
            }
        }
        Ok(ModuleOperator {
            module: self.module.clone(),
            entries,
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&AlgebraElement, &AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<Self> {
        self.module.ensure_same(&other.module)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleOperator {
            module: self.module.clone(),
            entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ModuleOperator {
            module: self.module.clone(),
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// The Hermitian `n·k × n·k` matrix of block `j`: its `(i, l)` sub-block is `Tᵢₗ` on block `j`.
    ///
    /// A module element acts on it through its block row matrix: `T(x)` has rows `X·M`.
    pub fn flatten_block(&self, j: usize) -> CMatrix {
        let k = self.module.shape().block_sizes()[j];
        let n = self.module.rank();
        let mut m = CMatrix::zeros(n * k, n * k);
        for i in 0..n {
            for l in 0..n {
                m.view_mut((i * k, l * k), (k, k)).copy_from(self.entry(i, l).block(j));
            }
        }
        m
    }

    /// Inverse of [`flatten_block`](Self::flatten_block), one matrix per algebra block.
    pub fn from_flattened_blocks(module: &HilbertModule, mats: &[CMatrix]) -> Result<Self> {
        let shape = module.shape();
        let n = module.rank();
        if mats.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} flattened blocks, got {}",
                shape.num_blocks(),
                mats.len()
            )));
        }
        for (j, (m, &k)) in mats.iter().zip(shape.block_sizes()).enumerate() {
            if m.nrows() != n * k || m.ncols() != n * k {
                return Err(Error::ShapeMismatch(format!("flattened block {j} has wrong size")));
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for l in 0..n {
                let blocks = mats
                    .iter()
                    .zip(shape.block_sizes())
                    .map(|(m, &k)| m.view((i * k, l * k), (k, k)).into_owned())
                    .collect();
                entries.push(AlgebraElement::new(shape.clone(), blocks)?);
            }
        }
        Ok(ModuleOperator {
            module: module.clone(),
            entries,
        })
    }

    /// Operator norm: the largest singular value over the flattened blocks.
    pub fn norm(&self) -> f64 {
        (0..self.module.shape().num_blocks())
            .map(|j| {
                let m = self.flatten_block(j);
                let gram = m.adjoint() * &m;
                let gram = (&gram + gram.adjoint()).scale(0.5);
                hermitian_eig(&gram)
                    .values
                    .first()
                    .copied()
                    .unwrap_or(0.0)
                    .max(0.0)
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.module.ensure_same(&other.module)?;
        self.entries
            .iter()
            .zip(&other.entries)
            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(a.max_abs_diff(b)?)))
    }

    /// `max |(T − T*)ᵢⱼ|` over all entries.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).expect("same module")
    }

    /// `max |(T·T* − T*·T)ᵢⱼ|` over all flattened entries.
    pub fn normal_defect(&self) -> f64 {
        (0..self.module.shape().num_blocks())
            .map(|j| {
                let m = self.flatten_block(j);
                let a = m.adjoint();
                max_abs(&(&m * &a - &a * &m))
            })
            .fold(0.0, f64::max)
    }

    /// Splits `T = p·T ⊕ (1 − p)·T` along a central projection `p`.
    pub fn central_decompose(&self, p: &AlgebraElement, tol: f64) -> Result<(Self, Self)> {
        self.module.shape().ensure_same(p.shape())?;
        if !p.is_central(tol) || !p.is_projection(tol) {
            return Err(Error::NotCentralProjection);
        }
        let complement = AlgebraElement::identity(p.shape()).sub(p)?;
        let left = ModuleOperator {
            module: self.module.clone(),
            entries: self.entries.iter().map(|e| p.mul(e)).collect::<Result<_>>()?,
        };
        let right = ModuleOperator {
            module: self.module.clone(),
            entries: self.entries.iter().map(|e| complement.mul(e)).collect::<Result<_>>()?,
        };
        Ok((left, right))
    }
}
