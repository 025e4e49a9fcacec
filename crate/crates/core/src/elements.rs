//! Embedded periodic table plus covalent and van der Waals radii.
//!
//! Radii are shipped as versioned data files under `data/` and compiled in
//! with `include_str!`. Elements absent from a table get a conservative
//! fallback (0.75 A covalent, 1.50 A vdW) so an exotic element never aborts
//! a benchmark run.

use std::collections::HashMap;
use std::fmt;

use once_cell::sync::Lazy;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const COVALENT_RADIUS_FALLBACK: f64 = 0.75;
pub const VDW_RADIUS_FALLBACK: f64 = 1.50;

const SYMBOLS: [&str; 103] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr",
];

static BY_SYMBOL: Lazy<HashMap<String, u8>> = Lazy::new(|| {
    SYMBOLS
        .iter()
        .enumerate()
        .map(|(i, s)| (s.to_ascii_uppercase(), (i + 1) as u8))
        .collect()
});

fn parse_radii(table: &str) -> HashMap<u8, f64> {
    let mut out = HashMap::new();
    for line in table.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let sym = parts.next().expect("radius row has a symbol");
        let r: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .expect("radius row has a numeric value");
        let el = Element::from_symbol(sym).expect("radius table uses known symbols");
        out.insert(el.atomic_number(), r);
    }
    out
}

static COVALENT: Lazy<HashMap<u8, f64>> =
    Lazy::new(|| parse_radii(include_str!("../data/covalent_radii.tsv")));
static VDW: Lazy<HashMap<u8, f64>> =
    Lazy::new(|| parse_radii(include_str!("../data/vdw_radii.tsv")));

/// A chemical element, stored by atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);

    /// Look up an element by symbol, case-insensitively ("FE" and "Fe" both work).
    pub fn from_symbol(sym: &str) -> Result<Element> {
        let key = sym.trim().to_ascii_uppercase();
        BY_SYMBOL
            .get(&key)
            .map(|&z| Element(z))
            .ok_or_else(|| Error::UnknownElement(sym.trim().to_string()))
    }

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (1..=SYMBOLS.len() as u8).contains(&z).then_some(Element(z))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[(self.0 - 1) as usize]
    }

    pub fn is_hydrogen(self) -> bool {
        self.0 == 1
    }

    pub fn is_carbon(self) -> bool {
        self.0 == 6
    }

    pub fn covalent_radius(self) -> f64 {
        COVALENT
            .get(&self.0)
            .copied()
            .unwrap_or(COVALENT_RADIUS_FALLBACK)
    }

    pub fn vdw_radius(self) -> f64 {
        VDW.get(&self.0).copied().unwrap_or(VDW_RADIUS_FALLBACK)
    }

    /// Default valence used by the sanitization check and implicit-H count.
    /// Unlisted elements return None, which exempts them from valence checks.
    pub fn default_valence(self) -> Option<u8> {
        Some(match self.symbol() {
            "H" | "F" | "Cl" | "Br" | "I" => 1,
            "O" | "S" | "Se" => 2,
            "B" | "N" | "P" | "As" => 3,
            "C" | "Si" => 4,
            _ => return None,
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Element::from_symbol(&s).map_err(D::Error::custom)
    }
}
