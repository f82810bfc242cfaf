//! Instance and report documents. Instances carry a block signature, a
//! 1-based ideal block list, and named elements with row-major [re, im]
//! entries; reports carry targets, achieved values, oracle results, and
//! named checks. Both serialize as JSON, round-tripping doubles exactly.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSignature, IdealSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub block_dims: Vec<usize>,
    /// 1-based block indices forming the ideal.
    #[serde(default)]
    pub ideal_blocks: Vec<usize>,
    pub elements: Vec<NamedElement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedElement {
    pub name: String,
    /// One row-major [re, im] list per block.
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn ideal(&self) -> Result<IdealSpec> {
        let signature = AlgebraSignature::new(self.block_dims.clone())?;
        let mut blocks = std::collections::BTreeSet::new();
        for &b in &self.ideal_blocks {
            if b == 0 || b > self.block_dims.len() {
                return Err(Error::Parse(format!(
                    "ideal block index {b} out of range (1..={})",
                    self.block_dims.len()
                )));
            }
            blocks.insert(b - 1);
        }
        IdealSpec::new(signature, blocks)
    }

    pub fn element(&self, name: &str) -> Result<AlgebraElement> {
        let named = self
            .elements
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Parse(format!("no element named {name}")))?;
        self.decode_element(named)
    }

    pub fn all_elements(&self) -> Result<Vec<(String, AlgebraElement)>> {
        self.elements
            .iter()
            .map(|n| Ok((n.name.clone(), self.decode_element(n)?)))
            .collect()
    }

    fn decode_element(&self, named: &NamedElement) -> Result<AlgebraElement> {
        if named.blocks.len() != self.block_dims.len() {
            return Err(Error::Parse(format!(
                "element {} has {} blocks, signature has {}",
                named.name,
                named.blocks.len(),
                self.block_dims.len()
            )));
        }
        let mut blocks = Vec::with_capacity(named.blocks.len());
        for (b, entries) in named.blocks.iter().enumerate() {
            let d = self.block_dims[b];
            if entries.len() != d * d {
                return Err(Error::Parse(format!(
                    "element {} block {} has {} entries, expected {}",
                    named.name,
                    b + 1,
                    entries.len(),
                    d * d
                )));
            }
            let m = Array2::from_shape_fn((d, d), |(i, j)| {
                let [re, im] = entries[i * d + j];
                Complex64::new(re, im)
            });
            blocks.push(m);
        }
        let signature = AlgebraSignature::new(self.block_dims.clone())?;
        AlgebraElement::new(signature, blocks)
    }

    pub fn from_elements(ideal: &IdealSpec, elements: &[(String, AlgebraElement)]) -> Self {
        InstanceFile {
            block_dims: ideal.signature.block_dims.clone(),
            ideal_blocks: ideal.ideal_blocks.iter().map(|&b| b + 1).collect(),
            elements: elements
                .iter()
                .map(|(name, el)| NamedElement {
                    name: name.clone(),
                    blocks: el
                        .blocks
                        .iter()
                        .map(|m| m.iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// One pass/fail line of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The bound the value was checked against.
    pub bound: f64,
    pub value: f64,
    pub pass: bool,
}

impl Check {
    pub fn upper(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            bound,
            value,
            pass: value <= bound,
        }
    }

    pub fn lower(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            bound,
            value,
            pass: value >= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSection {
    pub best_value: f64,
    pub evaluations: usize,
    pub starts: usize,
    pub audit_min_margin: Option<f64>,
}

/// Machine-readable experiment report. Deterministic given (config, seed);
/// wall-clock timing is reported on standard output only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub instance: InstanceFile,
    pub targets: Vec<f64>,
    pub achieved: Vec<f64>,
    pub oracle: Option<OracleSection>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub experiment: String,
    pub seed: u64,
}

impl Report {
    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_commuting_family;

    #[test]
    fn instance_round_trip_is_exact() {
        let sig = AlgebraSignature::new(vec![2, 3]).unwrap();
        let ideal = IdealSpec::new(sig, [0].into()).unwrap();
        let fam = random_commuting_family(&ideal, 2, 77, 0.3, Some(0.7)).unwrap();
        let named: Vec<_> = fam
            .iter()
            .enumerate()
            .map(|(i, el)| (format!("a{}", i + 1), el.clone()))
            .collect();
        let file = InstanceFile::from_elements(&ideal, &named);
        let text = file.to_string_pretty();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back.ideal().unwrap(), ideal);
        for (name, el) in &named {
            let decoded = back.element(name).unwrap();
            // serde_json prints doubles with round-trip precision
            assert_eq!(decoded.sub(el).unwrap().op_norm().unwrap(), 0.0);
        }
    }

    #[test]
    fn parse_rejects_bad_ideal_index() {
        let text = r#"{"block_dims":[2],"ideal_blocks":[3],"elements":[]}"#;
        let file = InstanceFile::parse(text).unwrap();
        assert!(matches!(file.ideal(), Err(Error::Parse(_))));
    }

    #[test]
    fn parse_rejects_wrong_entry_count() {
        let text = r#"{"block_dims":[2],"ideal_blocks":[],
            "elements":[{"name":"a","blocks":[[[1.0,0.0]]]}]}"#;
        let file = InstanceFile::parse(text).unwrap();
        assert!(matches!(file.element("a"), Err(Error::Parse(_))));
    }

    #[test]
    fn parse_rejects_malformed_json() {
        assert!(matches!(
            InstanceFile::parse("{not json"),
            Err(Error::Parse(_))
        ));
    }
}

