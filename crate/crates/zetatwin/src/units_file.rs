//! TOML unit-data files.
//!
//! ```toml
//! a = -240
//! symbol = "b"                      # optional, defaults to "x"
//! generators = [
//!     "-1",
//!     "(b^6 + 2*b^4 - 4*b^2 - 56)/16",
//!     ["1/2", "0", "0", "0", "0", "0", "0", "0"],
//! ]
//! primes = "3:0,19:8,23:9,47:16"    # optional
//! ```
//!
//! `a` may be an integer or a decimal string (for values beyond 64 bits).
//! A generator is either an expression in `symbol` or the list of its 8
//! coefficients on `1, x, ..., x^7` as `"num/den"` strings. There are no
//! floats anywhere.

use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use zetatwin_core::field::{FieldElement, NumberField, UnitData, DEGREE};
use zetatwin_core::modp::parse_prime_list;
use zetatwin_core::parse::{coefficient_strings, parse_element, parse_rational};

const BUNDLED_A15: &str = include_str!("../data/units_a-15.toml");
const BUNDLED_A240: &str = include_str!("../data/units_a-240.toml");

#[derive(Debug, thiserror::Error)]
pub enum UnitFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed unit file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("`a` is not an integer: {0:?}")]
    BadInteger(String),
    #[error("generator {index}: expected 8 coefficients, found {len}")]
    WrongLength { index: usize, len: usize },
    #[error("generator {index}: {source}")]
    Generator {
        index: usize,
        source: zetatwin_core::Error,
    },
    #[error("primes: {0}")]
    Primes(zetatwin_core::Error),
    #[error(transparent)]
    Core(#[from] zetatwin_core::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    a: RawInt,
    symbol: Option<String>,
    generators: Vec<RawElement>,
    primes: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawElement {
    Expr(String),
    Coeffs(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitFile {
    pub units: UnitData,
    /// Validated `(p, r)` pairs, if the file lists any.
    pub primes: Option<Vec<(u64, u64)>>,
}

impl UnitFile {
    pub fn field(&self) -> &NumberField {
        self.units.field()
    }

    /// SHA-256 over a canonical rendering of `a` and the generator
    /// coefficients, independent of how the file spelled them.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("a={}\n", self.field().a()));
        for g in self.units.generators() {
            h.update(coefficient_strings(g).join(","));
            h.update("\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_unit_file(text: &str) -> Result<UnitFile, UnitFileError> {
    let raw: RawFile = toml::from_str(text)?;
    let a = match raw.a {
        RawInt::Int(n) => BigInt::from(n),
        RawInt::Text(s) => s
            .trim()
            .parse()
            .map_err(|_| UnitFileError::BadInteger(s.clone()))?,
    };
    let field = NumberField::with_symbol(a, raw.symbol.as_deref().unwrap_or("x"))?;
    let generators = raw
        .generators
        .iter()
        .enumerate()
        .map(|(index, g)| element(&field, index, g))
        .collect::<Result<Vec<_>, _>>()?;
    let primes = raw
        .primes
        .map(|s| {
            parse_prime_list(&s, &field)
                .map(|v| v.iter().map(|c| (c.p(), c.r())).collect())
                .map_err(UnitFileError::Primes)
        })
        .transpose()?;
    Ok(UnitFile {
        units: UnitData::new(field, generators)?,
        primes,
    })
}

fn element(field: &NumberField, index: usize, raw: &RawElement) -> Result<FieldElement, UnitFileError> {
    let wrap = |source| UnitFileError::Generator { index, source };
    match raw {
        RawElement::Expr(s) => parse_element(s, field).map_err(wrap),
        RawElement::Coeffs(v) => {
            if v.len() != DEGREE {
                return Err(UnitFileError::WrongLength { index, len: v.len() });
            }
            let coeffs = v
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(wrap)?;
            Ok(field.element(coeffs.try_into().expect("length checked")))
        }
    }
}

pub fn load_unit_file(path: &Path) -> Result<UnitFile, UnitFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| UnitFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_unit_file(&text)
}

/// Text of the bundled data file for `a`, if there is one.
pub fn bundled_text(a: &BigInt) -> Option<&'static str> {
    match i64::try_from(a).ok()? {
        -15 => Some(BUNDLED_A15),
        -240 => Some(BUNDLED_A240),
        _ => None,
    }
}

pub fn bundled(a: &BigInt) -> Option<UnitFile> {
    bundled_text(a).map(|t| parse_unit_file(t).expect("bundled data parses"))
}
