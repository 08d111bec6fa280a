//! Built-in code catalog.
//!
//! The manifest (`data/catalog.json`) lists every code with its constructor
//! parameters and the `(n, k)` it must produce. Building an entry checks the
//! constructed code against those numbers and refuses a mismatch; the listed
//! distance is a label only.

use serde::{Deserialize, Serialize};

use super::{bb_code, gb_code, hgp, parse_code_text, steane_css, surface_code, CssCode, StabilizerCode};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

const MANIFEST: &str = include_str!("../../data/catalog.json");

fn data_file(name: &str) -> Option<&'static str> {
    match name {
        "color19.css" => Some(include_str!("../../data/color19.css")),
        "color37.css" => Some(include_str!("../../data/color37.css")),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub n: usize,
    pub k: usize,
    /// Distance as reported by the code's source; never computed here.
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Construction {
    Steane,
    Surface { d: usize },
    Bb { l: usize, m: usize, a: Vec<(usize, usize)>, b: Vec<(usize, usize)> },
    Gb { l: usize, a: Vec<usize>, b: Vec<usize> },
    Hgp { h1: Vec<String>, h2: Vec<String> },
    File { file: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(flatten)]
    pub construction: Construction,
    pub expected: Expected,
    pub source: String,
}

impl CatalogEntry {
    /// Constructs the code and checks `(n, k)` against the manifest.
    pub fn build(&self) -> Result<CssCode> {
        let code = match &self.construction {
            Construction::Steane => steane_css(),
            Construction::Surface { d } => surface_code(*d)?,
            Construction::Bb { l, m, a, b } => bb_code(*l, *m, a, b)?,
            Construction::Gb { l, a, b } => gb_code(*l, a, b)?,
            Construction::Hgp { h1, h2 } => {
                let to_m = |rows: &Vec<String>| {
                    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
                    BitMatrix::from_strs(&refs)
                };
                hgp(&to_m(h1), &to_m(h2))?
            }
            Construction::File { file } => {
                let text = data_file(file)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown catalog data file {file}")))?;
                super::parse_css(text)?
            }
        }
        .with_name(self.name.clone());
        let (n, k) = code.parameters();
        if (n, k) != (self.expected.n, self.expected.k) {
            return Err(Error::Validation(format!(
                "{} built as [[{n},{k}]] but the catalog expects [[{},{}]]",
                self.name, self.expected.n, self.expected.k
            )));
        }
        Ok(code)
    }
}

/// All catalog entries in manifest order.
pub fn catalog() -> Vec<CatalogEntry> {
    serde_json::from_str(MANIFEST).expect("embedded catalog manifest is valid JSON")
}

/// Resolves a code source: a catalog name, `surface:d=<odd>`, or a path to a BSF/CSS file.
pub fn resolve(source: &str) -> Result<StabilizerCode> {
    if let Some(entry) = catalog().into_iter().find(|e| e.name == source) {
        return Ok(entry.build()?.to_bsf());
    }
    if let Some(d) = source.strip_prefix("surface:d=") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad surface distance in {source:?}")))?;
        return Ok(surface_code(d)?.to_bsf());
    }
    let text = std::fs::read_to_string(source)?;
    let name = std::path::Path::new(source)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(source)
        .to_string();
    Ok(parse_code_text(&text)?.with_name(name))
}
