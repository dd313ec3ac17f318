//! Worked constructions with known eigenpairs.
//!
//! * [`construct_example8`]: `K = θ_{x,x} + θ_{y,y}` on `M₂(ℂ)²`, with three
//!   families of eigenvectors.
//! * [`construct_prop4`]: the operator `K(e₁) = Σ αₙ pₙ eₙ`, `K(eⱼ) = αⱼ pⱼ e₁`
//!   on `(ℂᴺ)ᴺ`, whose natural eigenvalues `αₙpₙ` are pairwise incomparable.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::diagonalize::{DiagonalizationResult, EigenPair, SlotClass};
use crate::error::{Error, Result};
use crate::module::{HilbertModule, ModuleElement};
use crate::operator::ModuleOperator;

/// A named vector with the algebra element it is expected to be an eigenvector for.
#[derive(Clone, Debug)]
pub struct ExpectedPair {
    pub name: String,
    pub vector: ModuleElement,
    pub value: AlgebraElement,
}

/// The `M₂(ℂ)` example with its three eigenvector families.
#[derive(Clone, Debug)]
pub struct Example8 {
    pub module: HilbertModule,
    pub operator: ModuleOperator,
    /// `x, y` with `Λ_x = diag(1,9)`, `Λ_y = diag(4,4)`: valid eigenvectors whose
    /// Gram elements are not projections and whose eigenvalues are incomparable.
    pub generators: Vec<ExpectedPair>,
    /// `x₁, x₂` with `⟨xᵢ, xᵢ⟩ = 1` and `Λ₁ = diag(1,4) ≤ Λ₂ = diag(4,9)`.
    pub units: Vec<ExpectedPair>,
    /// Vectors spanning K-invariant submodules with the same `Λ₁, Λ₂`.
    ///
    /// They satisfy `K(xᵢ) = xᵢ·Λᵢ` (eigenvalue acting from the right), not the
    /// left relation `K(xᵢ) = Λᵢ·xᵢ`, and `⟨xᵢ, xᵢ⟩` is not a projection.
    pub invariant: Vec<ExpectedPair>,
}

impl Example8 {
    /// The unit family as a chain-ordered diagonalization: `Λ₃ = diag(1,4) ≤ Λ₁ = diag(4,9)`.
    pub fn unit_solution(&self) -> Result<DiagonalizationResult> {
        let pairs = vec![
            EigenPair::new(
                1,
                SlotClass::Positive,
                self.units[1].vector.clone(),
                self.units[1].value.clone(),
            )?,
            EigenPair::new(
                3,
                SlotClass::Positive,
                self.units[0].vector.clone(),
                self.units[0].value.clone(),
            )?,
        ];
        DiagonalizationResult::from_pairs(self.module.clone(), pairs, 0.0, true)
    }

    /// The `(x, y)` family as an unordered candidate diagonalization.
    pub fn generator_solution(&self) -> Result<DiagonalizationResult> {
        let pairs = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, p)| EigenPair::new(i + 1, SlotClass::Unordered, p.vector.clone(), p.value.clone()))
            .collect::<Result<Vec<_>>>()?;
        DiagonalizationResult::from_pairs(self.module.clone(), pairs, 0.0, false)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn m2(shape: &AlgebraShape, rows: [[f64; 2]; 2]) -> AlgebraElement {
    let block =
        crate::eigen::CMatrix::from_row_slice(2, 2, &[c(rows[0][0]), c(rows[0][1]), c(rows[1][0]), c(rows[1][1])]);
    AlgebraElement::new(shape.clone(), vec![block]).expect("2x2 block")
}

fn pair(module: &HilbertModule, name: &str, coords: Vec<AlgebraElement>, value: AlgebraElement) -> ExpectedPair {
    ExpectedPair {
        name: name.to_string(),
        vector: ModuleElement::new(module.clone(), coords).expect("coordinates match module"),
        value,
    }
}

pub fn construct_example8() -> Example8 {
    let shape = AlgebraShape::full_matrix(2).expect("valid shape");
    let module = HilbertModule::new(shape.clone(), 2).expect("valid rank");
    let zero = AlgebraElement::zero(&shape);
    let x = ModuleElement::new(module.clone(), vec![m2(&shape, [[1.0, 0.0], [0.0, 3.0]]), zero.clone()]).expect("x");
    let y = ModuleElement::new(module.clone(), vec![zero.clone(), m2(&shape, [[2.0, 0.0], [0.0, 2.0]])]).expect("y");
    let operator = ModuleOperator::theta(&x, &x)
        .and_then(|a| a.add(&ModuleOperator::theta(&y, &y)?))
        .expect("same module");

    let lambda_x = m2(&shape, [[1.0, 0.0], [0.0, 9.0]]);
    let lambda_y = m2(&shape, [[4.0, 0.0], [0.0, 4.0]]);
    let lambda_1 = m2(&shape, [[1.0, 0.0], [0.0, 4.0]]);
    let lambda_2 = m2(&shape, [[4.0, 0.0], [0.0, 9.0]]);

    let generators = vec![
        ExpectedPair {
            name: "x".into(),
            vector: x.clone(),
            value: lambda_x,
        },
        ExpectedPair {
            name: "y".into(),
            vector: y.clone(),
            value: lambda_y,
        },
    ];
    let units = vec![
        pair(
            &module,
            "x1",
            vec![
                m2(&shape, [[1.0, 0.0], [0.0, 0.0]]),
                m2(&shape, [[0.0, 0.0], [0.0, 1.0]]),
            ],
            lambda_1.clone(),
        ),
        pair(
            &module,
            "x2",
            vec![
                m2(&shape, [[0.0, 0.0], [0.0, 1.0]]),
                m2(&shape, [[1.0, 0.0], [0.0, 0.0]]),
            ],
            lambda_2.clone(),
        ),
    ];
    let invariant = vec![
        pair(
            &module,
            "x1'",
            vec![
                m2(&shape, [[1.0, 0.0], [1.0, 0.0]]),
                m2(&shape, [[0.0, 1.0], [0.0, 1.0]]),
            ],
            lambda_1,
        ),
        pair(
            &module,
            "x2'",
            vec![
                m2(&shape, [[0.0, 1.0], [0.0, 1.0]]),
                m2(&shape, [[1.0, 0.0], [1.0, 0.0]]),
            ],
            lambda_2,
        ),
    ];
    Example8 {
        module,
        operator,
        generators,
        units,
        invariant,
    }
}

/// The commutative construction on `(ℂᴺ)ᴺ` and the eigenpairs listed for it.
#[derive(Clone, Debug)]
pub struct Prop4 {
    pub module: HilbertModule,
    pub operator: ModuleOperator,
    pub alphas: Vec<f64>,
    /// `pₙ`, the `n`-th coordinate projection of `ℂᴺ` (zero-based storage).
    pub projections: Vec<AlgebraElement>,
    /// `p₁e₁; pₙ(e₁+eₙ)/√2; (1−pₙ)eₙ for n ≥ 2; pₙ(e₁−eₙ)/√2` in that order.
    pub expected: Vec<ExpectedPair>,
}

impl Prop4 {
    /// The listed eigenpairs as a candidate diagonalization (their eigenvalues are not chain-comparable).
    pub fn expected_solution(&self) -> Result<DiagonalizationResult> {
        let pairs = self
            .expected
            .iter()
            .enumerate()
            .map(|(i, p)| EigenPair::new(i + 1, SlotClass::Unordered, p.vector.clone(), p.value.clone()))
            .collect::<Result<Vec<_>>>()?;
        DiagonalizationResult::from_pairs(self.module.clone(), pairs, 0.0, false)
    }
}

#[allow(clippy::needless_range_loop)] // m is the coordinate index in several arrays at once
pub fn construct_prop4(n: usize, alphas: &[f64]) -> Result<Prop4> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 central projections, got {n}"
        )));
    }
    if alphas.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} alphas, got {}",
            alphas.len()
        )));
    }
    if alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
        return Err(Error::InvalidArgument("alphas must be positive and finite".into()));
    }
    if alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("alphas must be strictly decreasing".into()));
    }

    let shape = AlgebraShape::commutative(n)?;
    let module = HilbertModule::new(shape.clone(), n)?;
    let projections: Vec<AlgebraElement> = (0..n)
        .map(|m| {
            let values: Vec<Complex64> = (0..n).map(|l| c(if l == m { 1.0 } else { 0.0 })).collect();
            AlgebraElement::central(&shape, &values)
        })
        .collect::<Result<_>>()?;
    let one = AlgebraElement::identity(&shape);
    let zero = AlgebraElement::zero(&shape);

    // K(e₁) = Σ αₙ pₙ eₙ and K(eⱼ) = αⱼ pⱼ e₁: row i of the entry array is K(eᵢ).
    let mut entries = vec![vec![zero.clone(); n]; n];
    for (slot, (p, &a)) in entries[0].iter_mut().zip(projections.iter().zip(alphas)) {
        *slot = p.scale_real(a);
    }
    for j in 1..n {
        entries[j][0] = projections[j].scale_real(alphas[j]);
    }
    let operator = ModuleOperator::new(module.clone(), entries)?;

    let e = |i: usize| module.basis(i);
    let mut expected = vec![ExpectedPair {
        name: "p1 e1".into(),
        vector: e(0).left_action(&projections[0])?,
        value: projections[0].scale_real(alphas[0]),
    }];
    for m in 1..n {
        expected.push(ExpectedPair {
            name: format!("p{0}(e1+e{0})/sqrt2", m + 1),
            vector: e(0).add(&e(m))?.left_action(&projections[m])?.scale(c(FRAC_1_SQRT_2)),
            value: projections[m].scale_real(alphas[m]),
        });
    }
    for m in 1..n {
        expected.push(ExpectedPair {
            name: format!("(1-p{0})e{0}", m + 1),
            vector: e(m).left_action(&one.sub(&projections[m])?)?,
            value: zero.clone(),
        });
    }
    for m in (1..n).rev() {
        expected.push(ExpectedPair {
            name: format!("p{0}(e1-e{0})/sqrt2", m + 1),
            vector: e(0).sub(&e(m))?.left_action(&projections[m])?.scale(c(FRAC_1_SQRT_2)),
            value: projections[m].scale_real(-alphas[m]),
        });
    }

    Ok(Prop4 {
        module,
        operator,
        alphas: alphas.to_vec(),
        projections,
        expected,
    })
}
