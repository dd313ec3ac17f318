//! Dense complex Hermitian and normal eigensolvers.
//!
//! The Hermitian solver is a cyclic Jacobi iteration with complex plane
//! rotations. Every spectral operation of the crate goes through it, so the
//! output is made deterministic: eigenvalues are sorted descending and each
//! eigenvector is rescaled so that its first non-negligible component is real
//! and positive.
//!
//! Eigenvectors are returned as the *rows* of a unitary matrix `V`, so that
//! `V·H·V* = diag(values)` and each row `v` satisfies `v·H = λ·v`. Row
//! eigenvectors are what the module layer needs: a module element restricted
//! to one matrix block is a stack of row vectors acted on from the right.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Upper bound on the number of full Jacobi sweeps.
pub const MAX_SWEEPS: usize = 60;

/// Components smaller than this (on a unit vector) are skipped when picking
/// the phase anchor.
const PHASE_ANCHOR_EPS: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Unitary matrix; row `r` is the eigenvector of `values[r]`.
    pub vectors: CMatrix,
}

/// Eigendecomposition of a normal matrix.
#[derive(Clone, Debug)]
pub struct NormalEig {
    /// Eigenvalues, sorted by real part descending then imaginary part descending.
    pub values: Vec<Complex64>,
    /// Unitary matrix; row `r` is the eigenvector of `values[r]`.
    pub vectors: CMatrix,
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("eigensolver input"));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// `tol` bounds the accepted Hermitian defect, `‖H − H*‖_max ≤ tol·(1 + ‖H‖_F)`,
/// and the off-diagonal mass tolerated if the sweep limit is hit.
pub fn eig_hermitian(h: &CMatrix, tol: f64) -> Result<HermitianEig> {
    check_square(h)?;
    let d = h.nrows();
    let scale = frobenius(h);
    let defect = max_abs(&(h - h.adjoint()));
    let allowed = tol * (1.0 + scale);
    if defect > allowed {
        return Err(Error::NotSelfAdjoint { defect, allowed });
    }

    // Work on the exactly Hermitian part.
    let mut a: CMatrix = (h + h.adjoint()).scale(0.5);
    for i in 0..d {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(d, d);

    let target = f64::EPSILON * scale;
    let mut converged = d < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..d - 1 {
            for q in p + 1..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let off = off_diagonal_norm(&a);
    if !converged && off > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence {
            sweeps,
            off_diagonal: off,
        });
    }

    let mut order: Vec<(f64, CMatrix)> = (0..d)
        .map(|r| {
            let mut row = CMatrix::from_iterator(1, d, v.column(r).iter().map(|z| z.conj()));
            normalize_phase(&mut row);
            (a[(r, r)].re, row)
        })
        .collect();
    order.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| phase_anchor(&x.1).cmp(&phase_anchor(&y.1)))
    });

    let mut vectors = CMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (r, (value, row)) in order.into_iter().enumerate() {
        values.push(value);
        vectors.set_row(r, &row.row(0));
    }
    Ok(HermitianEig { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s·phase], [−s·conj(phase), c]].
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = phase * s;
    let u_qp = -phase.conj() * s;
    let u_qq = Complex64::new(c, 0.0);

    let d = a.nrows();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn phase_anchor(row: &CMatrix) -> usize {
    row.iter()
        .position(|z| z.norm() > PHASE_ANCHOR_EPS)
        .unwrap_or(usize::MAX)
}

/// Rescale a unit row so that its first non-negligible entry is real positive.
fn normalize_phase(row: &mut CMatrix) {
    let anchor = row.iter().copied().find(|z| z.norm() > PHASE_ANCHOR_EPS);
    if let Some(z) = anchor {
        let rot = z.conj() / z.norm();
        for entry in row.iter_mut() {
            *entry *= rot;
        }
    }
}

/// Unitary diagonalization of a normal matrix.
///
/// Diagonalizes the Hermitian part `(N + N*)/2`, then the skew part
/// `(N − N*)/(2i)` inside each numerically degenerate eigenspace of the
/// Hermitian part. The two parts commute, so the combined rows diagonalize `N`.
pub fn eig_normal(n: &CMatrix, tol: f64) -> Result<NormalEig> {
    check_square(n)?;
    let d = n.nrows();
    let scale = frobenius(n);
    let adj = n.adjoint();
    let defect = max_abs(&(n * &adj - &adj * n));
    let allowed = tol * (1.0 + scale * scale);
    if defect > allowed {
        return Err(Error::NotNormal { defect, allowed });
    }

    let herm: CMatrix = (n + &adj).scale(0.5);
    let skew: CMatrix = (n - &adj) * Complex64::new(0.0, -0.5);
    let outer = eig_hermitian(&herm, tol.max(1e-12))?;

    let cluster_tol = tol.max(1e-12) * (1.0 + scale);
    let mut rows = CMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && outer.values[end - 1] - outer.values[end] <= cluster_tol {
            end += 1;
        }
        let basis = outer.vectors.rows(start, end - start).into_owned();
        if end - start == 1 {
            rows.set_row(start, &basis.row(0));
        } else {
            let restricted = &basis * &skew * basis.adjoint();
            let restricted = (&restricted + restricted.adjoint()).scale(0.5);
            let inner = eig_hermitian(&restricted, 1e-6)?;
            let rotated = &inner.vectors * &basis;
            for r in 0..end - start {
                rows.set_row(start + r, &rotated.row(r));
            }
        }
        start = end;
    }

    let mut pairs: Vec<(Complex64, CMatrix)> = (0..d)
        .map(|r| {
            let mut row = CMatrix::from_iterator(1, d, rows.row(r).iter().copied());
            normalize_phase(&mut row);
            let mu = (&row * n * row.adjoint())[(0, 0)];
            (mu, row)
        })
        .collect();
    pairs.sort_by(|x, y| {
        y.0.re
            .partial_cmp(&x.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| y.0.im.partial_cmp(&x.0.im).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| phase_anchor(&x.1).cmp(&phase_anchor(&y.1)))
    });

    let mut vectors = CMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (r, (mu, row)) in pairs.into_iter().enumerate() {
        values.push(mu);
        vectors.set_row(r, &row.row(0));
    }
    Ok(NormalEig { values, vectors })
}
