//! Checks a candidate diagonalization clause by clause, plus a trace-moment
//! oracle that never calls the eigensolver.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::diagonalize::{ordering_chain, ChainTerm, DiagonalizationResult};
use crate::eigen::{frobenius, CMatrix};
use crate::error::{Error, Result};
use crate::module::complement_singular_value;
use crate::operator::ModuleOperator;

/// Default absolute tolerance for residuals.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default relative tolerance for trace moments.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-7;
/// Default highest moment compared by the oracle.
pub const DEFAULT_MAX_MOMENT: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckedRelation {
    pub relation: String,
    pub holds: bool,
}

/// Residuals and flags for every diagonalization condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max ‖K(xᵢ) − Λᵢxᵢ‖`.
    pub condition_i_residual: f64,
    pub condition_ii: bool,
    /// Smallest singular value of `z ↦ (⟨z, xᵢ⟩)ᵢ`.
    pub condition_ii_min_singular_value: f64,
    /// `max_{i≠j} ‖⟨xᵢ, xⱼ⟩‖`.
    pub orthogonality_residual: f64,
    /// `max` projection defect of `⟨xᵢ, xᵢ⟩`, including its distance to the stored support.
    pub projection_defect: f64,
    /// `max ‖Λᵢpᵢ − Λᵢ‖`.
    pub condition_iv_residual: f64,
    pub ordering_checked: bool,
    pub ordering_ok: bool,
    pub ordering_certificate: Vec<CheckedRelation>,
    pub oracle_ok: bool,
    pub oracle_max_deviation: f64,
    pub tolerance: f64,
    pub oracle_tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn condition_i(&self) -> bool {
        self.condition_i_residual <= self.tolerance
    }

    pub fn condition_iii(&self) -> bool {
        self.orthogonality_residual <= self.tolerance && self.projection_defect <= self.tolerance
    }

    pub fn condition_iv(&self) -> bool {
        self.condition_iv_residual <= self.tolerance
    }

    /// One human-readable line per check.
    pub fn lines(&self) -> Vec<String> {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut out = vec![
            format!(
                "{} (i)   eigen-relation residual {:.3e}",
                mark(self.condition_i()),
                self.condition_i_residual
            ),
            format!(
                "{} (ii)  trivial orthogonal complement, min singular value {:.3e}",
                mark(self.condition_ii),
                self.condition_ii_min_singular_value
            ),
            format!(
                "{} (iii) orthogonality {:.3e}, projection defect {:.3e}",
                mark(self.condition_iii()),
                self.orthogonality_residual,
                self.projection_defect
            ),
            format!(
                "{} (iv)  support residual {:.3e}",
                mark(self.condition_iv()),
                self.condition_iv_residual
            ),
        ];
        if self.ordering_checked {
            let chain: Vec<&str> = self.ordering_certificate.iter().map(|r| r.relation.as_str()).collect();
            out.push(format!("{} ordering [{}]", mark(self.ordering_ok), chain.join(", ")));
        } else {
            out.push("SKIP ordering (unordered result)".to_string());
        }
        out.push(format!(
            "{} moment oracle, max deviation {:.3e}",
            mark(self.oracle_ok),
            self.oracle_max_deviation
        ));
        out
    }
}

fn chain_value(result: &DiagonalizationResult, term: ChainTerm) -> Result<AlgebraElement> {
    match term {
        ChainTerm::Zero => Ok(AlgebraElement::zero(result.module.shape())),
        ChainTerm::Eigenvalue(l) => result
            .pair(l)
            .map(|p| p.value.clone())
            .ok_or_else(|| Error::InvalidArgument(format!("ordering refers to missing label {l}"))),
    }
}

/// Verifies all diagonalization conditions at absolute tolerance `tol`, with
/// the default moment oracle settings.
pub fn verify_definition2(k: &ModuleOperator, result: &DiagonalizationResult, tol: f64) -> Result<VerificationReport> {
    verify_with(k, result, tol, DEFAULT_MAX_MOMENT, DEFAULT_MOMENT_TOL)
}

pub fn verify_with(
    k: &ModuleOperator,
    result: &DiagonalizationResult,
    tol: f64,
    max_moment: u32,
    moment_tol: f64,
) -> Result<VerificationReport> {
    k.module().ensure_same(&result.module)?;
    let pairs = &result.pairs;

    let mut condition_i_residual: f64 = 0.0;
    let mut projection_defect: f64 = 0.0;
    let mut condition_iv_residual: f64 = 0.0;
    let mut grams = Vec::with_capacity(pairs.len());
    for p in pairs {
        let image = k.apply(&p.vector)?;
        let expected = p.vector.left_action(&p.value)?;
        condition_i_residual = condition_i_residual.max(image.sub(&expected)?.norm());

        let gram = p.vector.inner_product(&p.vector)?;
        projection_defect = projection_defect
            .max(gram.projection_defect())
            .max(gram.sub(&p.support)?.norm());
        condition_iv_residual = condition_iv_residual.max(p.value.mul(&gram)?.sub(&p.value)?.norm());
        grams.push(gram);
    }

    let mut orthogonality_residual: f64 = 0.0;
    for (a, pa) in pairs.iter().enumerate() {
        for pb in pairs.iter().skip(a + 1) {
            orthogonality_residual = orthogonality_residual.max(pa.vector.inner_product(&pb.vector)?.norm());
        }
    }

    let min_sv = if pairs.is_empty() {
        0.0
    } else {
        complement_singular_value(&result.vectors())?
    };
    let condition_ii = min_sv > tol;

    let (ordering_checked, ordering_ok, ordering_certificate) = if result.ordered {
        let order_tol = 2.0 * tol * k.norm().max(1.0);
        let mut all = true;
        let mut checked = Vec::new();
        for rel in ordering_chain(pairs) {
            let lower = chain_value(result, rel.lower)?;
            let upper = chain_value(result, rel.upper)?;
            let holds = lower.leq(&upper, order_tol).unwrap_or(false);
            all &= holds;
            checked.push(CheckedRelation {
                relation: rel.to_string(),
                holds,
            });
        }
        (true, all, checked)
    } else {
        (false, true, Vec::new())
    };

    let oracle_max_deviation = moment_deviation(k, result, max_moment)?;
    let oracle_ok = oracle_max_deviation <= moment_tol;

    let passed = condition_i_residual <= tol
        && condition_ii
        && orthogonality_residual <= tol
        && projection_defect <= tol
        && condition_iv_residual <= tol
        && ordering_ok
        && oracle_ok;

    Ok(VerificationReport {
        condition_i_residual,
        condition_ii,
        condition_ii_min_singular_value: min_sv,
        orthogonality_residual,
        projection_defect,
        condition_iv_residual,
        ordering_checked,
        ordering_ok,
        ordering_certificate,
        oracle_ok,
        oracle_max_deviation,
        tolerance: tol,
        oracle_tolerance: moment_tol,
        passed,
    })
}

/// Largest relative deviation between `tr(Mⱼᵐ)` of each flattened block `Mⱼ`
/// and `Σᵢ tr((pᵢΛᵢpᵢ)ᵐ)` on that block, for `m = 1..=max_moment`.
///
/// Deviations are scaled by `‖Mⱼ‖_F^m`. Only matrix products and traces are
/// used, so this is independent of the eigensolver.
pub fn moment_deviation(k: &ModuleOperator, result: &DiagonalizationResult, max_moment: u32) -> Result<f64> {
    k.module().ensure_same(&result.module)?;
    let mut worst: f64 = 0.0;
    for j in 0..k.module().shape().num_blocks() {
        let m = k.flatten_block(j);
        let dim = m.nrows();
        let scale = frobenius(&m);
        let compressed: Vec<CMatrix> = result
            .pairs
            .iter()
            .map(|p| {
                let gram = p.vector.inner_product(&p.vector)?;
                let proj = gram.block(j);
                Ok(proj * p.value.block(j) * proj)
            })
            .collect::<Result<_>>()?;
        let mut power = CMatrix::identity(dim, dim);
        let mut pair_powers: Vec<CMatrix> = compressed
            .iter()
            .map(|c| CMatrix::identity(c.nrows(), c.ncols()))
            .collect();
        for exp in 1..=max_moment {
            power = &power * &m;
            let lhs = power.trace();
            let mut rhs = Complex64::new(0.0, 0.0);
            for (acc, c) in pair_powers.iter_mut().zip(&compressed) {
                *acc = &*acc * c;
                rhs += acc.trace();
            }
            let denom = scale.powi(exp as i32).max(f64::MIN_POSITIVE);
            worst = worst.max((lhs - rhs).norm() / denom);
        }
    }
    Ok(worst)
}

/// True iff every moment deviation is at most `tol`.
pub fn moment_oracle(k: &ModuleOperator, result: &DiagonalizationResult, max_moment: u32, tol: f64) -> Result<bool> {
    Ok(moment_deviation(k, result, max_moment)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construct_example8;
    use crate::diagonalize::diagonalize_selfadjoint;

    #[test]
    fn unit_family_passes() {
        let ex = construct_example8();
        let sol = ex.unit_solution().unwrap();
        let report = verify_definition2(&ex.operator, &sol, DEFAULT_TOL).unwrap();
        assert!(report.passed, "{:#?}", report);
        assert_eq!(report.condition_i_residual, 0.0);
        assert_eq!(report.ordering_certificate.len(), 2);
    }

    #[test]
    fn generator_family_fails_projection_clause() {
        let ex = construct_example8();
        let sol = ex.generator_solution().unwrap();
        let report = verify_definition2(&ex.operator, &sol, DEFAULT_TOL).unwrap();
        assert!(!report.passed);
        assert!(report.condition_i());
        assert!(report.condition_ii);
        assert!(!report.condition_iii());
        assert!(report.orthogonality_residual == 0.0);
        // ⟨x,x⟩ = diag(1,9): idempotency defect ‖diag(0,72)‖
        assert!((report.projection_defect - 72.0).abs() < 1e-12);
    }

    #[test]
    fn moment_traces_example8() {
        let ex = construct_example8();
        let res = diagonalize_selfadjoint(&ex.operator, DEFAULT_TOL).unwrap();
        assert!((ex.operator.flatten_block(0).trace().re - 18.0).abs() < 1e-12);
        assert!(moment_oracle(&ex.operator, &res, 6, 1e-12).unwrap());
    }

    #[test]
    fn zero_operator_moments() {
        let module =
            crate::module::HilbertModule::new(crate::algebra::AlgebraShape::new(vec![2, 1]).unwrap(), 3).unwrap();
        let k = ModuleOperator::zero(&module);
        let res = diagonalize_selfadjoint(&k, DEFAULT_TOL).unwrap();
        assert_eq!(moment_deviation(&k, &res, 6).unwrap(), 0.0);
        assert!(verify_definition2(&k, &res, DEFAULT_TOL).unwrap().passed);
    }

    #[test]
    fn perturbed_eigenvalue_is_detected() {
        let ex = construct_example8();
        let mut res = diagonalize_selfadjoint(&ex.operator, DEFAULT_TOL).unwrap();
        let tol = DEFAULT_TOL;
        let shape = ex.module.shape().clone();
        let bump = AlgebraElement::real_diagonal(&shape, &[&[2.0 * tol, 0.0]]).unwrap();
        res.pairs[0].value = res.pairs[0].value.add(&bump).unwrap();
        let report = verify_definition2(&ex.operator, &res, tol).unwrap();
        assert!(!report.condition_i());
        assert!((report.condition_i_residual - 2.0 * tol).abs() < 1e-3 * tol);
        assert!(report.condition_ii && report.condition_iii() && report.condition_iv());
    }
}
