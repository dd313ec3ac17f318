//! JSON problem, solution and report files (schema version 1).
//!
//! Complex numbers are `[re, im]` pairs; a `k×k` block is a row-major array of
//! `k²` pairs; an algebra element is an array of blocks. Problem files:
//!
//! ```json
//! {"schema": 1, "algebra": {"blocks": [2]}, "module_rank": 2,
//!  "operator": [[[[[1,0],[0,0],[0,0],[9,0]]], ...], ...]}
//! ```
//!
//! `operator[i][j]` is the entry `Tᵢⱼ`. Files written by this module are
//! canonical: parsing and re-serializing them reproduces the same bytes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::diagonalize::{DiagonalizationResult, EigenPair, SlotClass};
use crate::eigen::CMatrix;
use crate::error::{Error, Result};
use crate::module::{HilbertModule, ModuleElement};
use crate::operator::ModuleOperator;
use crate::verify::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

pub type WireBlock = Vec<[f64; 2]>;
pub type WireElement = Vec<WireBlock>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub algebra: AlgebraSpec,
    pub module_rank: usize,
    pub operator: Vec<Vec<WireElement>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub label: usize,
    pub class: String,
    pub vector: Vec<WireElement>,
    pub value: WireElement,
    pub support: WireElement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema: u32,
    pub algebra: AlgebraSpec,
    pub module_rank: usize,
    pub ordered: bool,
    pub tolerance_used: f64,
    pub ordering_certificate: Vec<String>,
    pub pairs: Vec<PairFile>,
}

/// Output of `diagonalize`: the solution and its verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema: u32,
    pub solution: SolutionFile,
    pub report: VerificationReport,
}

fn input_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Input {
        path: path.into(),
        message: message.into(),
    }
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(input_err(
            "schema",
            format!("unsupported schema {schema}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

fn block_to_wire(b: &CMatrix) -> WireBlock {
    let k = b.nrows();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let z = b[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn element_to_wire(a: &AlgebraElement) -> WireElement {
    a.blocks().iter().map(block_to_wire).collect()
}

pub fn element_from_wire(shape: &AlgebraShape, wire: &WireElement, path: &str) -> Result<AlgebraElement> {
    if wire.len() != shape.num_blocks() {
        return Err(input_err(
            path,
            format!("expected {} blocks, found {}", shape.num_blocks(), wire.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(wire.len());
    for (j, (block, &k)) in wire.iter().zip(shape.block_sizes()).enumerate() {
        if block.len() != k * k {
            return Err(input_err(
                format!("{path}[{j}]"),
                format!("expected {} entries for a {k}x{k} block, found {}", k * k, block.len()),
            ));
        }
        if let Some(pos) = block.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
            return Err(input_err(format!("{path}[{j}][{pos}]"), "non-finite entry"));
        }
        let entries: Vec<Complex64> = block.iter().map(|z| Complex64::new(z[0], z[1])).collect();
        blocks.push(CMatrix::from_row_slice(k, k, &entries));
    }
    AlgebraElement::new(shape.clone(), blocks)
}

fn shape_from_spec(spec: &AlgebraSpec) -> Result<AlgebraShape> {
    AlgebraShape::new(spec.blocks.clone()).map_err(|e| input_err("algebra.blocks", e.to_string()))
}

fn module_from(spec: &AlgebraSpec, rank: usize) -> Result<HilbertModule> {
    let shape = shape_from_spec(spec)?;
    HilbertModule::new(shape, rank).map_err(|e| input_err("module_rank", e.to_string()))
}

impl ProblemFile {
    pub fn from_operator(k: &ModuleOperator) -> Self {
        let module = k.module();
        ProblemFile {
            schema: SCHEMA_VERSION,
            algebra: AlgebraSpec {
                blocks: module.shape().block_sizes().to_vec(),
            },
            module_rank: module.rank(),
            operator: k
                .entries()
                .iter()
                .map(|row| row.iter().map(element_to_wire).collect())
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<ModuleOperator> {
        check_schema(self.schema)?;
        let module = module_from(&self.algebra, self.module_rank)?;
        let n = self.module_rank;
        if self.operator.len() != n {
            return Err(input_err(
                "operator",
                format!("expected {n} rows, found {}", self.operator.len()),
            ));
        }
        let mut entries = Vec::with_capacity(n);
        for (i, row) in self.operator.iter().enumerate() {
            if row.len() != n {
                return Err(input_err(
                    format!("operator[{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, w)| element_from_wire(module.shape(), w, &format!("operator[{i}][{j}]")))
                .collect::<Result<Vec<_>>>()?;
            entries.push(parsed);
        }
        ModuleOperator::new(module, entries)
    }
}

impl SolutionFile {
    pub fn from_result(res: &DiagonalizationResult) -> Self {
        SolutionFile {
            schema: SCHEMA_VERSION,
            algebra: AlgebraSpec {
                blocks: res.module.shape().block_sizes().to_vec(),
            },
            module_rank: res.module.rank(),
            ordered: res.ordered,
            tolerance_used: res.tolerance_used,
            ordering_certificate: res.ordering_certificate.iter().map(|r| r.to_string()).collect(),
            pairs: res
                .pairs
                .iter()
                .map(|p| PairFile {
                    label: p.label,
                    class: p.class.as_str().to_string(),
                    vector: p.vector.coords().iter().map(element_to_wire).collect(),
                    value: element_to_wire(&p.value),
                    support: element_to_wire(&p.support),
                })
                .collect(),
        }
    }

    /// Rebuilds the result; the ordering certificate is re-derived from the pair classes.
    pub fn to_result(&self) -> Result<DiagonalizationResult> {
        check_schema(self.schema)?;
        let module = module_from(&self.algebra, self.module_rank)?;
        let shape = module.shape();
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for (idx, p) in self.pairs.iter().enumerate() {
            let path = format!("pairs[{idx}]");
            let class = SlotClass::parse(&p.class)
                .ok_or_else(|| input_err(format!("{path}.class"), format!("unknown class {:?}", p.class)))?;
            if p.vector.len() != module.rank() {
                return Err(input_err(
                    format!("{path}.vector"),
                    format!("expected {} coordinates, found {}", module.rank(), p.vector.len()),
                ));
            }
            let coords = p
                .vector
                .iter()
                .enumerate()
                .map(|(i, w)| element_from_wire(shape, w, &format!("{path}.vector[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let vector = ModuleElement::new(module.clone(), coords)?;
            let value = element_from_wire(shape, &p.value, &format!("{path}.value"))?;
            let support = element_from_wire(shape, &p.support, &format!("{path}.support"))?;
            pairs.push(EigenPair {
                label: p.label,
                class,
                vector,
                value,
                support,
            });
        }
        DiagonalizationResult::from_pairs(module, pairs, self.tolerance_used, self.ordered)
    }
}

/// Pretty JSON with a trailing newline; the canonical on-disk form.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_problem(text: &str) -> Result<ModuleOperator> {
    if text.trim().is_empty() {
        return Err(input_err("<file>", "empty input"));
    }
    let file: ProblemFile = serde_json::from_str(text)?;
    file.to_operator()
}

/// Accepts either a bare solution file or a `diagonalize` report containing one.
pub fn parse_solution(text: &str) -> Result<DiagonalizationResult> {
    if text.trim().is_empty() {
        return Err(input_err("<file>", "empty input"));
    }
    let value: serde_json::Value = serde_json::from_str(text)?;
    let file: SolutionFile = if value.get("solution").is_some() {
        serde_json::from_value::<ReportFile>(value)?.solution
    } else {
        serde_json::from_value(value)?
    };
    file.to_result()
}
