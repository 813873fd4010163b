//! On-disk formats: codebook JSON, channel-output JSON, and the declarative
//! plot description emitted next to sweep CSVs.

use std::fmt;

use serde::{Deserialize, Serialize};

use beeid_core::bits::{Bits, ErasedWord};
use beeid_core::codes::Codebook;

#[derive(Debug)]
pub enum FormatError {
    Json(serde_json::Error),
    /// Structurally valid JSON describing an invalid object.
    Invalid(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Json(e) => write!(f, "{e}"),
            FormatError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

/// Codebook file: codewords as bit-strings (leftmost character = position
/// 1), generator rows as arrays of "0"/"1" cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodebookFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub codewords: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<Vec<String>>>,
    pub name: String,
}

impl CodebookFile {
    pub fn from_codebook(cb: &Codebook, name: &str) -> Self {
        CodebookFile {
            n: cb.block_len(),
            m: cb.size(),
            codewords: cb.codewords().iter().map(Bits::to_bit_string).collect(),
            generator: cb.generator().map(|rows| {
                rows.iter()
                    .map(|r| r.iter().map(|b| if b { "1".into() } else { "0".into() }).collect())
                    .collect()
            }),
            name: name.to_string(),
        }
    }

    pub fn to_codebook(&self) -> Result<Codebook, FormatError> {
        if self.codewords.len() != self.m {
            return Err(FormatError::Invalid(format!(
                "file declares M={} but lists {} codewords",
                self.m,
                self.codewords.len()
            )));
        }
        let codewords: Vec<Bits> = self
            .codewords
            .iter()
            .map(|s| Bits::parse(s).map_err(|e| FormatError::Invalid(format!("codeword {s:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if codewords.iter().any(|w| w.len() != self.n) {
            return Err(FormatError::Invalid("codeword length differs from n".into()));
        }
        let generator = self
            .generator
            .as_ref()
            .map(|rows| {
                rows.iter()
                    .map(|row| {
                        let mut bits = Bits::zeros(row.len());
                        for (i, cell) in row.iter().enumerate() {
                            match cell.as_str() {
                                "0" => {}
                                "1" => bits.set(i, true),
                                other => {
                                    return Err(FormatError::Invalid(format!(
                                        "generator cell {other:?} is not \"0\" or \"1\""
                                    )))
                                }
                            }
                        }
                        Ok(bits)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Codebook::from_codewords(codewords, generator)
            .map_err(|e| FormatError::Invalid(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Channel-output file: BEC words over {0,1,?}, BSC words over {0,1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputsFile {
    pub channel: String,
    pub outputs: Vec<String>,
}

/// Parsed output set, split by channel family.
#[derive(Debug, Clone)]
pub enum ParsedOutputs {
    Bec(Vec<ErasedWord>),
    Bsc(Vec<Bits>),
}

impl OutputsFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_parsed(&self) -> Result<ParsedOutputs, FormatError> {
        match self.channel.as_str() {
            "bec" => Ok(ParsedOutputs::Bec(
                self.outputs
                    .iter()
                    .map(|s| {
                        ErasedWord::parse(s)
                            .map_err(|e| FormatError::Invalid(format!("output {s:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?,
            )),
            "bsc" => Ok(ParsedOutputs::Bsc(
                self.outputs
                    .iter()
                    .map(|s| {
                        Bits::parse(s)
                            .map_err(|e| FormatError::Invalid(format!("output {s:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?,
            )),
            other => Err(FormatError::Invalid(format!(
                "channel must be \"bec\" or \"bsc\", got {other:?}"
            ))),
        }
    }

    pub fn from_bec(outputs: &[ErasedWord]) -> Self {
        OutputsFile {
            channel: "bec".into(),
            outputs: outputs.iter().map(ErasedWord::to_symbol_string).collect(),
        }
    }

    pub fn from_bsc(outputs: &[Bits]) -> Self {
        OutputsFile {
            channel: "bsc".into(),
            outputs: outputs.iter().map(Bits::to_bit_string).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Declarative plot description for a sweep CSV; any plotting tool can
/// render it (scripts/plot_sweep.py is one such renderer).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlotSpec {
    pub x: String,
    pub series: Vec<String>,
    pub scale: String,
    pub csv: String,
    pub title: String,
}

impl PlotSpec {
    pub fn for_sweep(csv_name: &str, title: &str) -> Self {
        PlotSpec {
            x: "p".into(),
            series: vec!["rate".into(), "bound_upper".into(), "bound_lower".into()],
            scale: "log-y".into(),
            csv: csv_name.into(),
            title: title.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}
