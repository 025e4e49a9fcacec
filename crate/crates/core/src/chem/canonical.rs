//! Canonical complex JSON: a lossless, versioned serialization of
//! `ComplexStructure` used for fixtures and pose files that must carry
//! ligand topology alongside coordinates. Floating-point values survive the
//! round trip bit-for-bit (shortest-representation encoding).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::ComplexStructure;

/// Format tag stamped into every file; bump on breaking schema change.
pub const COMPLEX_FORMAT_TAG: &str = "complex.v1";

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    structure: ComplexStructure,
}

pub fn write_complex_json(complex: &ComplexStructure) -> String {
    let env = Envelope {
        format: COMPLEX_FORMAT_TAG.to_string(),
        structure: complex.clone(),
    };
    serde_json::to_string_pretty(&env).expect("complex serialization cannot fail")
}

pub fn read_complex_json(text: &str) -> Result<ComplexStructure> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.format != COMPLEX_FORMAT_TAG {
        return Err(Error::Config(format!(
            "unsupported complex format tag '{}', expected '{COMPLEX_FORMAT_TAG}'",
            env.format
        )));
    }
    env.structure.validate()?;
    Ok(env.structure)
}

pub fn save_complex(path: &Path, complex: &ComplexStructure) -> Result<()> {
    std::fs::write(path, write_complex_json(complex)).map_err(|e| Error::io(path, e))
}
