//! JSON Lines catalog of verified results.
//!
//! Each line is one [`CatalogRecord`] with its keys in sorted order, so
//! identical inputs give byte-identical files. Records re-verify on load.

use std::io::{BufRead, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::mub::{assemble_triple, unbiasedness_residual, Basis};
use crate::rational::{DiagonalValue, Rational};
use crate::ringzm::ZmGenerator;
use crate::search::{canonical_key, Solution};
use crate::spectral::{gram_residual, is_hermitian, verify_conditions, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Complex,
    Quaternary,
    Zm,
    Mub,
}

/// Complex generators as `[re, im]` pairs, `Z_m` generators as residues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorData {
    Residues(Vec<u64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub schema_version: u32,
    pub kind: RecordKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub d_squared: Rational,
    pub generator: GeneratorData,
    pub residuals: VerificationReport<f64>,
    pub provenance: String,
    pub canonical_key: String,
    /// `I`, `F` and `C/√n`, each column-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<[f64; 2]>>>,
}

fn pairs(g: &CirculantGenerator<f64>) -> Vec<[f64; 2]> {
    g.entries().iter().map(|z| [z.re, z.im]).collect()
}

fn zm_key(g: &ZmGenerator) -> String {
    std::iter::once(g.m())
        .chain(g.entries())
        .flat_map(u64::to_be_bytes)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Residual report for a unitary-up-to-scale generator with a unimodular
/// diagonal that need not be real.
fn mub_report(g: &CirculantGenerator<f64>, tol: f64) -> Result<VerificationReport<f64>> {
    let (_, f, c) = assemble_triple(g)?;
    let n = g.n() as f64;
    let gram = gram_residual(g, n);
    let unimodular = g
        .entries()
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let bias = unbiasedness_residual(&f, &c)?;
    Ok(VerificationReport {
        gram_residual: gram,
        unimodularity_residual: unimodular,
        diagonal_residual: bias,
        hermitian: is_hermitian(g, tol),
        passes: gram <= tol && unimodular <= tol && bias <= tol,
        tol,
    })
}

impl CatalogRecord {
    /// Verifies `g` against `d` at `tol` and records the result; fails if
    /// verification does not pass.
    pub fn complex(
        kind: RecordKind,
        g: &CirculantGenerator<f64>,
        d: &DiagonalValue,
        tol: f64,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if !matches!(kind, RecordKind::Complex | RecordKind::Quaternary) {
            return Err(CircError::domain(format!(
                "{kind:?} is not a complex record kind"
            )));
        }
        let residuals = verify_conditions(g, d, tol)?;
        if !residuals.passes {
            return Err(CircError::Verification(format!("{g}: {residuals:?}")));
        }
        Ok(CatalogRecord {
            schema_version: SCHEMA_VERSION,
            kind,
            n: g.n(),
            m: None,
            d_squared: d.d_squared().clone(),
            generator: GeneratorData::Complex(pairs(g)),
            residuals,
            provenance: provenance.into(),
            canonical_key: canonical_key(g, tol).to_hex(),
            bases: None,
        })
    }

    pub fn from_solution(s: &Solution, provenance: impl Into<String>) -> Self {
        CatalogRecord {
            schema_version: SCHEMA_VERSION,
            kind: RecordKind::Complex,
            n: s.generator.n(),
            m: None,
            d_squared: s.d.d_squared().clone(),
            generator: GeneratorData::Complex(pairs(&s.generator)),
            residuals: s.residuals.clone(),
            provenance: provenance.into(),
            canonical_key: s.canonical_key.to_hex(),
            bases: None,
        }
    }

    pub fn zm(g: &ZmGenerator, provenance: impl Into<String>) -> Result<Self> {
        let violations = g.violations() as f64;
        if violations > 0.0 {
            return Err(CircError::Verification(format!("{g} fails mod {}", g.m())));
        }
        Ok(CatalogRecord {
            schema_version: SCHEMA_VERSION,
            kind: RecordKind::Zm,
            n: g.n(),
            m: Some(g.m()),
            d_squared: Rational::integer(g.d() * g.d()),
            generator: GeneratorData::Residues(g.entries()),
            residuals: VerificationReport {
                gram_residual: violations,
                unimodularity_residual: 0.0,
                diagonal_residual: 0.0,
                hermitian: g.is_symmetric(),
                passes: true,
                tol: 0.0,
            },
            provenance: provenance.into(),
            canonical_key: zm_key(g),
            bases: None,
        })
    }

    /// Assembles and checks the triple `(I, F, C/√n)`. In a MUB record the
    /// `diagonal_residual` field holds the `F`–`C` unbiasedness residual.
    pub fn mub(
        g: &CirculantGenerator<f64>,
        tol: f64,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let residuals = mub_report(g, tol)?;
        if !residuals.passes {
            return Err(CircError::Verification(format!("{g}: {residuals:?}")));
        }
        let (i, f, c) = assemble_triple(g)?;
        Ok(CatalogRecord {
            schema_version: SCHEMA_VERSION,
            kind: RecordKind::Mub,
            n: g.n(),
            m: None,
            d_squared: Rational::one(),
            generator: GeneratorData::Complex(pairs(g)),
            residuals,
            provenance: provenance.into(),
            canonical_key: canonical_key(g, tol).to_hex(),
            bases: Some(vec![
                i.to_column_major(),
                f.to_column_major(),
                c.to_column_major(),
            ]),
        })
    }

    pub fn complex_generator(&self) -> Result<CirculantGenerator<f64>> {
        match &self.generator {
            GeneratorData::Complex(p) => {
                let entries = p.iter().map(|&[re, im]| Complex::new(re, im)).collect();
                CirculantGenerator::with_order(self.n, entries)
            }
            GeneratorData::Residues(_) => Err(CircError::domain(
                "record holds residues, not complex entries",
            )),
        }
    }

    pub fn zm_generator(&self) -> Result<ZmGenerator> {
        let (Some(m), GeneratorData::Residues(r)) = (self.m, &self.generator) else {
            return Err(CircError::domain("record is not a Z_m generator"));
        };
        if r.len() != self.n {
            return Err(CircError::Structural {
                expected: self.n,
                found: r.len(),
            });
        }
        let off: Vec<i64> = r[1..].iter().map(|&v| v as i64).collect();
        ZmGenerator::new(m, r[0] as i64, &off)
    }

    /// Recomputes the residuals at the recorded tolerance.
    pub fn reverify(&self) -> Result<VerificationReport<f64>> {
        self.reverify_at(self.residuals.tol)
    }

    /// Recomputes the residuals at `tol`; `Z_m` records are exact and ignore it.
    pub fn reverify_at(&self, tol: f64) -> Result<VerificationReport<f64>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CircError::domain(format!(
                "unknown schema version {}",
                self.schema_version
            )));
        }
        match self.kind {
            RecordKind::Complex | RecordKind::Quaternary => {
                let d = DiagonalValue::from_squared(self.d_squared.clone())?;
                verify_conditions(&self.complex_generator()?, &d, tol)
            }
            RecordKind::Mub => {
                let g = self.complex_generator()?;
                let report = mub_report(&g, tol)?;
                if let Some(bases) = &self.bases {
                    for data in bases {
                        Basis::<f64>::from_column_major(self.n, data)?;
                    }
                }
                Ok(report)
            }
            RecordKind::Zm => {
                let g = self.zm_generator()?;
                let violations = g.violations();
                Ok(VerificationReport {
                    gram_residual: violations as f64,
                    unimodularity_residual: 0.0,
                    diagonal_residual: 0.0,
                    hermitian: g.is_symmetric(),
                    passes: violations == 0,
                    tol: 0.0,
                })
            }
        }
    }

    /// One JSON object with sorted keys, no trailing newline.
    pub fn to_json_line(&self) -> String {
        // `Value` keeps object keys in a BTreeMap, which sorts them.
        let value = serde_json::to_value(self).expect("records serialize");
        serde_json::to_string(&value).expect("values serialize")
    }
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[CatalogRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    out.flush()
}

/// Parses every non-blank line; errors carry 1-based line numbers.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<CatalogRecord>> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CircError::parse(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(&line).map_err(|e| CircError::parse(i + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}
