//! Run-length model of the constructed set S: an ordered list of disjoint
//! blocks of consecutive integers, with budget accounting and persistence.
//!
//! Blocks are never merged or normalized — the k-indexed construction
//! history is audited block by block, so the representation preserves it.
//! All numerals in the JSON document are decimal strings: block starts and
//! lengths are unbounded integers, and floats round-trip exactly through
//! their shortest decimal form.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certified::{Certified, CertifiedReal, CertifiedSum};
use crate::powersum::BigStart;

#[derive(Debug, Error)]
pub enum SetError {
    #[error("block [{new_start}, +{new_len}) overlaps block [{prev_start}, +{prev_len})")]
    Overlap {
        prev_start: BigStart,
        prev_len: BigStart,
        new_start: BigStart,
        new_len: BigStart,
    },
    #[error("block start {start} is below 2")]
    StartBelowTwo { start: BigStart },
    #[error("block length must be positive")]
    EmptyBlock,
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("field {field} is not a finite number: {value}")]
    NonFinite { field: &'static str, value: String },
    #[error("field {field} carries a negative error bound")]
    NegativeErr { field: &'static str },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A run [start, start+len) of consecutive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    start: BigStart,
    len: BigStart,
}

impl Block {
    pub fn new(start: BigStart, len: BigStart) -> Result<Block, SetError> {
        if start < BigUint::from(2u32) {
            return Err(SetError::StartBelowTwo { start });
        }
        if len == BigUint::default() {
            return Err(SetError::EmptyBlock);
        }
        Ok(Block { start, len })
    }

    pub fn start(&self) -> &BigStart {
        &self.start
    }

    pub fn len(&self) -> &BigStart {
        &self.len
    }

    /// First integer past the block.
    pub fn end(&self) -> BigStart {
        &self.start + &self.len
    }
}

/// The constructed set S = ∪_k S_k as ordered disjoint blocks, together with
/// incrementally maintained certified totals Σ 1/n and Σ n^{-1-it}.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSet {
    t: f64,
    blocks: Vec<Block>,
    total_mass: CertifiedReal,
    total_sum: CertifiedSum,
}

impl BlockSet {
    pub fn new(t: f64) -> Self {
        BlockSet {
            t,
            blocks: Vec::new(),
            total_mass: CertifiedReal::zero(),
            total_sum: CertifiedSum::zero(),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn total_mass(&self) -> CertifiedReal {
        self.total_mass
    }

    pub fn total_sum(&self) -> CertifiedSum {
        self.total_sum
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// First integer past the last block, if any.
    pub fn last_end(&self) -> Option<BigStart> {
        self.blocks.last().map(Block::end)
    }

    /// Number of elements of S: Σ len over the blocks, exact at any size.
    pub fn element_count(&self) -> BigStart {
        self.blocks
            .iter()
            .fold(BigUint::default(), |acc, b| acc + &b.len)
    }

    /// Append a block past everything already present, folding its certified
    /// sum and mass into the totals. Rejects any overlap or ordering
    /// violation, naming both blocks.
    pub fn append_block(
        &mut self,
        block: Block,
        sum: CertifiedSum,
        mass: CertifiedReal,
    ) -> Result<(), SetError> {
        if let Some(prev) = self.blocks.last() {
            if block.start < prev.end() {
                return Err(SetError::Overlap {
                    prev_start: prev.start.clone(),
                    prev_len: prev.len.clone(),
                    new_start: block.start,
                    new_len: block.len,
                });
            }
        }
        self.total_sum = self.total_sum.add(&sum);
        self.total_mass = self.total_mass.add(&mass);
        self.blocks.push(block);
        Ok(())
    }

    /// Serialize to the canonical JSON document. Identical sets produce
    /// byte-identical documents.
    pub fn to_json(&self) -> String {
        let doc = BlockSetDoc {
            t: fmt_f64(self.t),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    start: b.start.to_string(),
                    len: b.len.to_string(),
                })
                .collect(),
            total_mass: RealDoc {
                value: fmt_f64(self.total_mass.value),
                err: fmt_f64(self.total_mass.err),
            },
            total_sum: ComplexDoc {
                re: fmt_f64(self.total_sum.value.re),
                im: fmt_f64(self.total_sum.value.im),
                err: fmt_f64(self.total_sum.err),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    /// Parse and validate a document produced by `to_json`.
    pub fn from_json(s: &str) -> Result<Self, SetError> {
        let doc: BlockSetDoc =
            serde_json::from_str(s).map_err(|e| SetError::Malformed(e.to_string()))?;
        let t = parse_f64("t", &doc.t)?;
        let mut set = BlockSet::new(t);
        for b in &doc.blocks {
            let start = parse_biguint("start", &b.start)?;
            let len = parse_biguint("len", &b.len)?;
            let block = Block::new(start, len)?;
            // totals are restored from the document below; feed zeros here
            set.append_block(block, CertifiedSum::zero(), CertifiedReal::zero())?;
        }
        let mass_err = parse_f64("total_mass.err", &doc.total_mass.err)?;
        let sum_err = parse_f64("total_sum.err", &doc.total_sum.err)?;
        if mass_err < 0.0 {
            return Err(SetError::NegativeErr {
                field: "total_mass",
            });
        }
        if sum_err < 0.0 {
            return Err(SetError::NegativeErr { field: "total_sum" });
        }
        set.total_mass = Certified::new(
            parse_f64("total_mass.value", &doc.total_mass.value)?,
            mass_err,
        );
        set.total_sum = Certified::new(
            Complex64::new(
                parse_f64("total_sum.re", &doc.total_sum.re)?,
                parse_f64("total_sum.im", &doc.total_sum.im)?,
            ),
            sum_err,
        );
        Ok(set)
    }

    pub fn save(&self, path: &Path) -> Result<(), SetError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SetError> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json(&s)
    }
}

fn fmt_f64(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x}").expect("write to string");
    s
}

fn parse_f64(field: &'static str, s: &str) -> Result<f64, SetError> {
    let v: f64 = s.parse().map_err(|_| SetError::NonFinite {
        field,
        value: s.to_owned(),
    })?;
    if !v.is_finite() {
        return Err(SetError::NonFinite {
            field,
            value: s.to_owned(),
        });
    }
    Ok(v)
}

fn parse_biguint(field: &'static str, s: &str) -> Result<BigUint, SetError> {
    BigUint::from_str(s).map_err(|_| SetError::Malformed(format!("{field}: bad integer {s:?}")))
}

#[derive(Serialize, Deserialize)]
struct BlockSetDoc {
    t: String,
    blocks: Vec<BlockDoc>,
    total_mass: RealDoc,
    total_sum: ComplexDoc,
}

#[derive(Serialize, Deserialize)]
struct BlockDoc {
    start: String,
    len: String,
}

#[derive(Serialize, Deserialize)]
struct RealDoc {
    value: String,
    err: String,
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    re: String,
    im: String,
    err: String,
}
