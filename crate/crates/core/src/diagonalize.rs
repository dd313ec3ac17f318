//! Algebra-valued diagonalization of self-adjoint and normal module operators.
//!
//! A diagonalization is a list of eigenpairs `(xᵢ, Λᵢ, pᵢ)` with
//!
//! 1. `K(xᵢ) = Λᵢ·xᵢ`,
//! 2. the submodule generated by the `xᵢ` has trivial orthogonal complement,
//! 3. the `xᵢ` are pairwise orthogonal and `pᵢ = ⟨xᵢ, xᵢ⟩` is a projection,
//! 4. `Λᵢ·pᵢ = Λᵢ`.
//!
//! For self-adjoint operators the eigenvalues are additionally arranged in the
//! chain `Λ₂ ≤ Λ₄ ≤ … ≤ 0 ≤ … ≤ Λ₃ ≤ Λ₁`: positive-class eigenvalues carry odd
//! labels and decrease, negative-class eigenvalues carry even labels and
//! increase towards zero. Kernel-only slots get labels after both chains.
//!
//! Construction, per algebra block `j` of size `k`:
//!
//! * flatten `K` to a Hermitian `n·k × n·k` matrix and diagonalize it;
//! * split the scalar spectrum into positives (descending), negatives
//!   (ascending) and zeros (`|λ| ≤ tol·‖K‖`);
//! * cut positives and negatives into runs of `k`, one run per slot;
//! * fill the trailing rows of signed slots with kernel vectors, then put
//!   the remaining kernel vectors into zero slots.
//!
//! Slots are then glued across blocks by index. A slot row left without a
//! scalar eigenvector stays zero, so its support `pᵢ` drops that row. When
//! every block's sign counts fit the same number of full slots this yields
//! exactly `n` unit eigenvectors; otherwise some slots have proper projections
//! as supports, which keeps every `Λᵢ` comparable with zero.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, DEFAULT_ORDER_TOL};
use crate::eigen::{eig_hermitian, eig_normal, CMatrix};
use crate::error::{Error, Result};
use crate::module::{HilbertModule, ModuleElement};
use crate::operator::ModuleOperator;

/// Sign class of an eigenvalue slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotClass {
    Positive,
    Negative,
    Zero,
    /// Normal-operator output; no ordering is claimed.
    Unordered,
}

impl SlotClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotClass::Positive => "positive",
            SlotClass::Negative => "negative",
            SlotClass::Zero => "zero",
            SlotClass::Unordered => "unordered",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "positive" => Some(SlotClass::Positive),
            "negative" => Some(SlotClass::Negative),
            "zero" => Some(SlotClass::Zero),
            "unordered" => Some(SlotClass::Unordered),
            _ => None,
        }
    }
}

/// One eigenpair `(xᵢ, Λᵢ, pᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    /// Position in the eigenvalue chain (1-based).
    pub label: usize,
    pub class: SlotClass,
    pub vector: ModuleElement,
    pub value: AlgebraElement,
    /// `⟨xᵢ, xᵢ⟩`.
    pub support: AlgebraElement,
}

impl EigenPair {
    /// Pair with `support` computed as `⟨vector, vector⟩`.
    pub fn new(label: usize, class: SlotClass, vector: ModuleElement, value: AlgebraElement) -> Result<Self> {
        vector.module().shape().ensure_same(value.shape())?;
        let support = vector.inner_product(&vector)?;
        Ok(EigenPair {
            label,
            class,
            vector,
            value,
            support,
        })
    }
}

/// A term of the eigenvalue chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainTerm {
    Eigenvalue(usize),
    Zero,
}

impl fmt::Display for ChainTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainTerm::Eigenvalue(l) => write!(f, "Λ_{l}"),
            ChainTerm::Zero => write!(f, "0"),
        }
    }
}

/// The relation `lower ≤ upper` in the Loewner order of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderRelation {
    pub lower: ChainTerm,
    pub upper: ChainTerm,
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≤ {}", self.lower, self.upper)
    }
}

/// Eigenpairs of a module operator, sorted by label.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalizationResult {
    pub module: HilbertModule,
    pub pairs: Vec<EigenPair>,
    /// Adjacent relations of the eigenvalue chain; empty for unordered results.
    pub ordering_certificate: Vec<OrderRelation>,
    pub tolerance_used: f64,
    pub ordered: bool,
}

impl DiagonalizationResult {
    /// Wraps a list of pairs, deriving the chain from their classes when `ordered`.
    pub fn from_pairs(
        module: HilbertModule,
        mut pairs: Vec<EigenPair>,
        tolerance_used: f64,
        ordered: bool,
    ) -> Result<Self> {
        for p in &pairs {
            module.ensure_same(p.vector.module())?;
            module.shape().ensure_same(p.value.shape())?;
            module.shape().ensure_same(p.support.shape())?;
        }
        pairs.sort_by_key(|p| p.label);
        let ordering_certificate = if ordered { ordering_chain(&pairs) } else { Vec::new() };
        Ok(DiagonalizationResult {
            module,
            pairs,
            ordering_certificate,
            tolerance_used,
            ordered,
        })
    }

    pub fn vectors(&self) -> Vec<ModuleElement> {
        self.pairs.iter().map(|p| p.vector.clone()).collect()
    }

    pub fn pair(&self, label: usize) -> Option<&EigenPair> {
        self.pairs.iter().find(|p| p.label == label)
    }

    /// Per algebra block, the diagonal entries of every `Λᵢ` on rows where `pᵢ` is nonzero.
    ///
    /// Assumes diagonal eigenvalues and supports, as produced by the diagonalizers.
    pub fn block_spectra(&self) -> Vec<Vec<Complex64>> {
        let shape = self.module.shape();
        (0..shape.num_blocks())
            .map(|j| {
                let mut out = Vec::new();
                for p in &self.pairs {
                    let value = p.value.block(j);
                    let support = p.support.block(j);
                    for r in 0..value.nrows() {
                        if support[(r, r)].re > 0.5 {
                            out.push(value[(r, r)]);
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// `Σᵢ θ_{xᵢ, Λᵢ·xᵢ}`; equals `K` for a complete system of eigenvectors.
    pub fn reconstruct(&self) -> Result<ModuleOperator> {
        let mut acc = ModuleOperator::zero(&self.module);
        for p in &self.pairs {
            let image = p.vector.left_action(&p.value)?;
            acc = acc.add(&ModuleOperator::theta(&p.vector, &image)?)?;
        }
        Ok(acc)
    }
}

/// Adjacent relations of `Λ₂ ≤ Λ₄ ≤ … ≤ 0 ≤ … ≤ Λ₃ ≤ Λ₁` for the classes present in `pairs`.
pub fn ordering_chain(pairs: &[EigenPair]) -> Vec<OrderRelation> {
    let labels = |class: SlotClass| {
        let mut v: Vec<usize> = pairs.iter().filter(|p| p.class == class).map(|p| p.label).collect();
        v.sort_unstable();
        v
    };
    let mut out = Vec::new();
    let negatives = labels(SlotClass::Negative);
    for w in negatives.windows(2) {
        out.push(OrderRelation {
            lower: ChainTerm::Eigenvalue(w[0]),
            upper: ChainTerm::Eigenvalue(w[1]),
        });
    }
    if let Some(&last) = negatives.last() {
        out.push(OrderRelation {
            lower: ChainTerm::Eigenvalue(last),
            upper: ChainTerm::Zero,
        });
    }
    for l in labels(SlotClass::Zero) {
        out.push(OrderRelation {
            lower: ChainTerm::Eigenvalue(l),
            upper: ChainTerm::Zero,
        });
        out.push(OrderRelation {
            lower: ChainTerm::Zero,
            upper: ChainTerm::Eigenvalue(l),
        });
    }
    let positives = labels(SlotClass::Positive);
    if let Some(&last) = positives.last() {
        out.push(OrderRelation {
            lower: ChainTerm::Zero,
            upper: ChainTerm::Eigenvalue(last),
        });
    }
    for w in positives.windows(2).rev() {
        out.push(OrderRelation {
            lower: ChainTerm::Eigenvalue(w[1]),
            upper: ChainTerm::Eigenvalue(w[0]),
        });
    }
    out
}

/// Slot layout over all algebra blocks: `rows[j][r]` is the index of the scalar
/// eigenvalue of block `j` placed on row `r`, or `None` for an empty row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPlan {
    pub label: usize,
    pub class: SlotClass,
    pub rows: Vec<Vec<Option<usize>>>,
}

/// Single-block slot with its diagonal eigenvalue entries (empty rows read as zero).
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedSlot {
    pub label: usize,
    pub class: SlotClass,
    pub diagonal: Vec<f64>,
    pub filled: Vec<bool>,
}

/// Orders the scalar spectrum of one `k×k` block into chain slots.
pub fn order_eigenvalues(scalars: &[f64], k: usize, zero_tol: f64) -> Vec<OrderedSlot> {
    plan_slots(&[scalars.to_vec()], &[k], zero_tol)
        .into_iter()
        .map(|plan| {
            let rows = &plan.rows[0];
            OrderedSlot {
                label: plan.label,
                class: plan.class,
                diagonal: rows.iter().map(|r| r.map(|i| scalars[i]).unwrap_or(0.0)).collect(),
                filled: rows.iter().map(Option::is_some).collect(),
            }
        })
        .collect()
}

/// Assigns the scalar spectra of all blocks to chain slots, sorted by label.
///
/// `spectra[j]` is the scalar spectrum of block `j` (any order), `block_sizes[j]`
/// its size `k`. Values with `|λ| ≤ zero_tol` are classified as zero.
pub fn plan_slots(spectra: &[Vec<f64>], block_sizes: &[usize], zero_tol: f64) -> Vec<SlotPlan> {
    assert_eq!(spectra.len(), block_sizes.len());

    struct Split {
        pos: Vec<usize>,
        neg: Vec<usize>,
        zero: Vec<usize>,
    }
    let splits: Vec<Split> = spectra
        .iter()
        .map(|v| {
            let mut pos: Vec<usize> = (0..v.len()).filter(|&i| v[i] > zero_tol).collect();
            let mut neg: Vec<usize> = (0..v.len()).filter(|&i| v[i] < -zero_tol).collect();
            let mut zero: Vec<usize> = (0..v.len()).filter(|&i| v[i].abs() <= zero_tol).collect();
            let desc = |a: &usize, b: &usize| v[*b].partial_cmp(&v[*a]).unwrap_or(std::cmp::Ordering::Equal);
            pos.sort_by(desc);
            neg.sort_by(|a, b| desc(b, a));
            zero.sort_by(desc);
            Split { pos, neg, zero }
        })
        .collect();

    let slots_for = |count: usize, k: usize| count.div_ceil(k);
    let n_pos = splits
        .iter()
        .zip(block_sizes)
        .map(|(s, &k)| slots_for(s.pos.len(), k))
        .max()
        .unwrap_or(0);
    let n_neg = splits
        .iter()
        .zip(block_sizes)
        .map(|(s, &k)| slots_for(s.neg.len(), k))
        .max()
        .unwrap_or(0);

    let mut plans: Vec<SlotPlan> = Vec::new();
    for s in 0..n_pos {
        plans.push(SlotPlan {
            label: 2 * s + 1,
            class: SlotClass::Positive,
            rows: splits
                .iter()
                .zip(block_sizes)
                .map(|(sp, &k)| (0..k).map(|r| sp.pos.get(s * k + r).copied()).collect())
                .collect(),
        });
    }
    for s in 0..n_neg {
        plans.push(SlotPlan {
            label: 2 * s + 2,
            class: SlotClass::Negative,
            rows: splits
                .iter()
                .zip(block_sizes)
                .map(|(sp, &k)| (0..k).map(|r| sp.neg.get(s * k + r).copied()).collect())
                .collect(),
        });
    }

    // Kernel vectors first pad the signed slots, then form their own slots.
    let mut kernels: Vec<std::vec::IntoIter<usize>> = splits.into_iter().map(|s| s.zero.into_iter()).collect();
    for plan in plans.iter_mut() {
        for (j, rows) in plan.rows.iter_mut().enumerate() {
            for row in rows.iter_mut().filter(|r| r.is_none()) {
                *row = kernels[j].next();
            }
        }
    }
    let remaining: Vec<Vec<usize>> = kernels.into_iter().map(|it| it.collect()).collect();
    let n_zero = remaining
        .iter()
        .zip(block_sizes)
        .map(|(z, &k)| slots_for(z.len(), k))
        .max()
        .unwrap_or(0);
    let first_zero_label = (2 * n_pos).saturating_sub(1).max(2 * n_neg) + 1;
    for t in 0..n_zero {
        plans.push(SlotPlan {
            label: first_zero_label + t,
            class: SlotClass::Zero,
            rows: remaining
                .iter()
                .zip(block_sizes)
                .map(|(z, &k)| (0..k).map(|r| z.get(t * k + r).copied()).collect())
                .collect(),
        });
    }
    plans.sort_by_key(|p| p.label);
    plans
}

/// Builds the module eigenvector and diagonal eigenvalue of one slot.
fn assemble_slot(
    module: &HilbertModule,
    rows_per_block: &[Vec<Option<usize>>],
    vectors: &[CMatrix],
    values: &[Vec<Complex64>],
) -> Result<(ModuleElement, AlgebraElement)> {
    let n = module.rank();
    let mut block_rows = Vec::with_capacity(rows_per_block.len());
    let mut diagonals = Vec::with_capacity(rows_per_block.len());
    for (j, rows) in rows_per_block.iter().enumerate() {
        let k = rows.len();
        let mut x = CMatrix::zeros(k, n * k);
        let mut diag = vec![Complex64::new(0.0, 0.0); k];
        for (r, slot) in rows.iter().enumerate() {
            if let Some(idx) = *slot {
                x.set_row(r, &vectors[j].row(idx));
                diag[r] = values[j][idx];
            }
        }
        block_rows.push(x);
        diagonals.push(diag);
    }
    let vector = ModuleElement::from_block_rows(module, &block_rows)?;
    let value = AlgebraElement::diagonal(module.shape(), &diagonals)?;
    Ok((vector, value))
}

/// Diagonalizes a self-adjoint module operator with the eigenvalue chain ordering.
///
/// `tol` bounds the accepted self-adjointness defect (`tol·(1 + ‖K‖)`) and
/// sets the zero threshold `tol·‖K‖` for sign classification.
pub fn diagonalize_selfadjoint(k: &ModuleOperator, tol: f64) -> Result<DiagonalizationResult> {
    let module = k.module().clone();
    let norm = k.norm();
    let defect = k.self_adjoint_defect();
    let allowed = tol * (1.0 + norm);
    if defect > allowed {
        return Err(Error::NotSelfAdjoint { defect, allowed });
    }
    let shape = module.shape();
    let mut spectra = Vec::with_capacity(shape.num_blocks());
    let mut vectors = Vec::with_capacity(shape.num_blocks());
    for j in 0..shape.num_blocks() {
        let m = k.flatten_block(j);
        let m = (&m + m.adjoint()).scale(0.5);
        let eig = eig_hermitian(&m, tol.max(DEFAULT_ORDER_TOL))?;
        spectra.push(eig.values);
        vectors.push(eig.vectors);
    }
    let zero_tol = tol * norm;
    let plans = plan_slots(&spectra, shape.block_sizes(), zero_tol);
    let complex_spectra: Vec<Vec<Complex64>> = spectra
        .iter()
        .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let pairs = plans
        .iter()
        .map(|plan| {
            let (vector, value) = assemble_slot(&module, &plan.rows, &vectors, &complex_spectra)?;
            EigenPair::new(plan.label, plan.class, vector, value)
        })
        .collect::<Result<Vec<_>>>()?;
    DiagonalizationResult::from_pairs(module, pairs, tol, true)
}

/// Diagonalizes a normal module operator; eigenvalues are complex and unordered.
///
/// Every block's `n·k` eigenvectors are cut into `n` consecutive runs of `k`,
/// so the result always has `n` unit eigenvectors.
pub fn diagonalize_normal(k: &ModuleOperator, tol: f64) -> Result<DiagonalizationResult> {
    let module = k.module().clone();
    let norm = k.norm();
    let defect = k.normal_defect();
    let allowed = tol * (1.0 + norm * norm);
    if defect > allowed {
        return Err(Error::NotNormal { defect, allowed });
    }
    let shape = module.shape();
    let n = module.rank();
    let mut spectra = Vec::with_capacity(shape.num_blocks());
    let mut vectors = Vec::with_capacity(shape.num_blocks());
    for j in 0..shape.num_blocks() {
        let eig = eig_normal(&k.flatten_block(j), tol.max(DEFAULT_ORDER_TOL))?;
        spectra.push(eig.values);
        vectors.push(eig.vectors);
    }
    let pairs = (0..n)
        .map(|i| {
            let rows: Vec<Vec<Option<usize>>> = shape
                .block_sizes()
                .iter()
                .map(|&kj| (0..kj).map(|r| Some(i * kj + r)).collect())
                .collect();
            let (vector, value) = assemble_slot(&module, &rows, &vectors, &spectra)?;
            EigenPair::new(i + 1, SlotClass::Unordered, vector, value)
        })
        .collect::<Result<Vec<_>>>()?;
    DiagonalizationResult::from_pairs(module, pairs, tol, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;

    #[test]
    fn order_example8_spectrum() {
        let slots = order_eigenvalues(&[1.0, 4.0, 9.0, 4.0], 2, 1e-12);
        assert_eq!(slots.len(), 2);
        assert_eq!((slots[0].label, slots[0].class), (1, SlotClass::Positive));
        assert_eq!(slots[0].diagonal, vec![9.0, 4.0]);
        assert_eq!((slots[1].label, slots[1].class), (3, SlotClass::Positive));
        assert_eq!(slots[1].diagonal, vec![4.0, 1.0]);
    }

    #[test]
    fn order_signed_pair() {
        let slots = order_eigenvalues(&[-1.0, 1.0], 1, 1e-12);
        assert_eq!(slots[0].label, 1);
        assert_eq!(slots[0].diagonal, vec![1.0]);
        assert_eq!(slots[1].label, 2);
        assert_eq!(slots[1].diagonal, vec![-1.0]);
    }

    #[test]
    fn order_all_zero() {
        let slots = order_eigenvalues(&[0.0; 4], 2, 1e-12);
        assert_eq!(slots.len(), 2);
        assert!(slots
            .iter()
            .all(|s| s.class == SlotClass::Zero && s.diagonal == vec![0.0, 0.0]));
        assert_eq!(slots[0].label, 1);
    }

    #[test]
    fn order_pads_with_kernel_then_leaves_gaps() {
        // k = 2: one positive, one negative, two zeros -> two full slots
        let slots = order_eigenvalues(&[5.0, 0.0, -3.0, 0.0], 2, 1e-12);
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].diagonal, vec![5.0, 0.0]);
        assert_eq!(slots[1].diagonal, vec![-3.0, 0.0]);
        assert!(slots.iter().all(|s| s.filled.iter().all(|&f| f)));
        // k = 2, spectrum {1, -1}: mixing signs in one slot would break the chain
        let slots = order_eigenvalues(&[1.0, -1.0], 2, 1e-12);
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].filled, vec![true, false]);
        assert_eq!(slots[1].diagonal, vec![-1.0, 0.0]);
    }

    #[test]
    fn zero_operator() {
        let module = HilbertModule::new(AlgebraShape::full_matrix(2).unwrap(), 2).unwrap();
        let res = diagonalize_selfadjoint(&ModuleOperator::zero(&module), 1e-9).unwrap();
        assert_eq!(res.pairs.len(), 2);
        let one = AlgebraElement::identity(module.shape());
        let zero = AlgebraElement::zero(module.shape());
        for p in &res.pairs {
            assert_eq!(p.value, zero);
            assert_eq!(p.support, one);
        }
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let module = HilbertModule::new(AlgebraShape::full_matrix(1).unwrap(), 2).unwrap();
        let op = ModuleOperator::theta(&module.basis(0), &module.basis(1)).unwrap();
        assert!(matches!(
            diagonalize_selfadjoint(&op, 1e-9),
            Err(Error::NotSelfAdjoint { .. })
        ));
        // nilpotent: not normal either
        assert!(matches!(diagonalize_normal(&op, 1e-9), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn scalar_imaginary_unit() {
        let module = HilbertModule::new(AlgebraShape::new(vec![2, 1]).unwrap(), 2).unwrap();
        let op = ModuleOperator::identity(&module).scale(Complex64::new(0.0, 1.0));
        let res = diagonalize_normal(&op, 1e-9).unwrap();
        let expected = AlgebraElement::scalar(module.shape(), Complex64::new(0.0, 1.0));
        assert_eq!(res.pairs.len(), 2);
        for p in &res.pairs {
            assert!(p.value.max_abs_diff(&expected).unwrap() < 1e-14);
        }
        assert!(res.ordering_certificate.is_empty());
    }

    #[test]
    fn chain_layout() {
        let module = HilbertModule::new(AlgebraShape::commutative(1).unwrap(), 1).unwrap();
        let mk =
            |label, class| EigenPair::new(label, class, module.basis(0), AlgebraElement::zero(module.shape())).unwrap();
        let pairs = vec![
            mk(1, SlotClass::Positive),
            mk(2, SlotClass::Negative),
            mk(3, SlotClass::Positive),
            mk(4, SlotClass::Negative),
            mk(5, SlotClass::Zero),
        ];
        let chain: Vec<String> = ordering_chain(&pairs).iter().map(|r| r.to_string()).collect();
        assert_eq!(
            chain,
            vec!["Λ_2 ≤ Λ_4", "Λ_4 ≤ 0", "Λ_5 ≤ 0", "0 ≤ Λ_5", "0 ≤ Λ_3", "Λ_3 ≤ Λ_1"]
        );
    }
}
