//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use hilbert_diag::{AlgebraElement, AlgebraShape, CMatrix, HilbertModule, ModuleElement, ModuleOperator};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The algebras exercised by the random suites: M2, M2⊕M3, C⁴, M2⊕C⊕M3.
pub fn suite_shapes() -> Vec<AlgebraShape> {
    vec![
        AlgebraShape::full_matrix(2).unwrap(),
        AlgebraShape::new(vec![2, 3]).unwrap(),
        AlgebraShape::commutative(4).unwrap(),
        AlgebraShape::new(vec![2, 1, 3]).unwrap(),
    ]
}

pub fn random_shape(rng: &mut ChaCha8Rng) -> AlgebraShape {
    let shapes = suite_shapes();
    shapes[rng.gen_range(0..shapes.len())].clone()
}

pub fn random_module(rng: &mut ChaCha8Rng) -> HilbertModule {
    let shape = random_shape(rng);
    let n = rng.gen_range(1..=4);
    HilbertModule::new(shape, n).unwrap()
}

pub fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| complex(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let m = random_matrix(rng, d, d);
    (&m + m.adjoint()).scale(0.5)
}

/// Haar-ish unitary from the QR factor of a random matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    random_matrix(rng, d, d).qr().q()
}

pub fn random_element(rng: &mut ChaCha8Rng, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape.block_sizes().iter().map(|&k| random_matrix(rng, k, k)).collect();
    AlgebraElement::new(shape.clone(), blocks).unwrap()
}

pub fn random_self_adjoint_element(rng: &mut ChaCha8Rng, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape.block_sizes().iter().map(|&k| random_hermitian(rng, k)).collect();
    AlgebraElement::new(shape.clone(), blocks).unwrap()
}

pub fn random_positive_element(rng: &mut ChaCha8Rng, shape: &AlgebraShape) -> AlgebraElement {
    let b = random_element(rng, shape);
    b.mul(&b.adjoint()).unwrap()
}

pub fn random_unitary_element(rng: &mut ChaCha8Rng, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape.block_sizes().iter().map(|&k| random_unitary(rng, k)).collect();
    AlgebraElement::new(shape.clone(), blocks).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, module: &HilbertModule) -> ModuleElement {
    let coords = (0..module.rank())
        .map(|_| random_element(rng, module.shape()))
        .collect();
    ModuleElement::new(module.clone(), coords).unwrap()
}

pub fn random_operator(rng: &mut ChaCha8Rng, module: &HilbertModule) -> ModuleOperator {
    let n = module.rank();
    let entries = (0..n)
        .map(|_| (0..n).map(|_| random_element(rng, module.shape())).collect())
        .collect();
    ModuleOperator::new(module.clone(), entries).unwrap()
}

fn from_blocks(module: &HilbertModule, f: impl FnMut(usize) -> CMatrix) -> ModuleOperator {
    let mats: Vec<CMatrix> = module
        .shape()
        .block_sizes()
        .iter()
        .map(|&k| k * module.rank())
        .map(f)
        .collect();
    ModuleOperator::from_flattened_blocks(module, &mats).unwrap()
}

/// Random self-adjoint operator with Frobenius norm at most one on every block.
pub fn random_self_adjoint(rng: &mut ChaCha8Rng, module: &HilbertModule) -> ModuleOperator {
    from_blocks(module, |d| {
        let h = random_hermitian(rng, d);
        let s = h.norm();
        if s > 0.0 {
            h.unscale(s)
        } else {
            h
        }
    })
}

/// Positive definite operator with spectrum in roughly `[0.1, 2.1]`.
pub fn random_positive_definite(rng: &mut ChaCha8Rng, module: &HilbertModule) -> ModuleOperator {
    from_blocks(module, |d| {
        let b = random_matrix(rng, d, d);
        let b = b.unscale(b.norm());
        &b * b.adjoint() * Complex64::new(2.0, 0.0) + CMatrix::identity(d, d).scale(0.1)
    })
}

/// Normal operator `U·D·U*` with a random complex diagonal `D`.
pub fn random_normal(rng: &mut ChaCha8Rng, module: &HilbertModule) -> ModuleOperator {
    from_blocks(module, |d| {
        let u = random_unitary(rng, d);
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| complex(rng)));
        &u * diag * u.adjoint()
    })
}

/// Random matrix with the given Hermitian spectrum.
pub fn hermitian_with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> CMatrix {
    let d = values.len();
    let u = random_unitary(rng, d);
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |i, _| Complex64::new(values[i], 0.0)));
    &u * diag * u.adjoint()
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Per-block spectra of the flattened operator computed by an independent
/// dense routine (nalgebra's symmetric eigen solver), ascending.
pub fn reference_spectra(k: &ModuleOperator) -> Vec<Vec<f64>> {
    (0..k.module().shape().num_blocks())
        .map(|j| {
            let m = k.flatten_block(j);
            let h = (&m + m.adjoint()).scale(0.5);
            sorted(h.symmetric_eigenvalues().iter().copied().collect())
        })
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset sizes differ: {a:?} vs {b:?}");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Real parts of `block_spectra`, ascending per block.
pub fn result_spectra(res: &hilbert_diag::DiagonalizationResult) -> Vec<Vec<f64>> {
    res.block_spectra()
        .into_iter()
        .map(|v| sorted(v.into_iter().map(|z| z.re).collect()))
        .collect()
}
