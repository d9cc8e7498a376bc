//! Serde adapters that store floating point numbers as decimal strings.
//!
//! Rust's `Display` for `f64` prints the shortest string that parses back to
//! the same value, so a write/read cycle is bit-exact on every platform.

use nalgebra::DVector;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn format(x: f64) -> String {
    format!("{x}")
}

pub fn parse(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("invalid decimal {s:?}: {e}"))
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse(s).map_err(D::Error::custom)).collect()
    }
}

pub mod point {
    use super::*;

    pub fn serialize<S: Serializer>(x: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        vec::serialize(x.as_slice(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        vec::deserialize(d).map(DVector::from_vec)
    }
}

pub mod opt_point {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<DVector<f64>>, s: S) -> Result<S::Ok, S::Error> {
        let raw: Option<Vec<String>> = x.as_ref().map(|x| x.iter().map(|v| format(*v)).collect());
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DVector<f64>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|row| row.iter().map(|s| parse(s).map_err(D::Error::custom)).collect::<Result<Vec<_>, _>>().map(DVector::from_vec))
            .transpose()
    }
}

pub mod points {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[DVector<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            let row: Vec<String> = x.iter().map(|v| format(*v)).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DVector<f64>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse(s).map_err(D::Error::custom))
                    .collect::<Result<Vec<_>, _>>()
                    .map(DVector::from_vec)
            })
            .collect()
    }
}
