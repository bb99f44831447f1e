//! Serde helpers that write floating-point numbers with 17 significant
//! digits, which is enough for every `f64` to round-trip exactly.

use serde::ser::{SerializeSeq, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits in exponent notation.
pub fn format(x: f64) -> String {
    debug_assert!(x.is_finite(), "non-finite value in report: {x}");
    format!("{x:.16e}")
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format(x)).expect("formatted float is valid JSON")
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&raw(*x), s)
}

pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    <f64 as serde::Deserialize>::deserialize(d)
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&raw(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        <Option<f64> as serde::Deserialize>::deserialize(d)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&raw(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        <Vec<f64> as serde::Deserialize>::deserialize(d)
    }
}

pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[[f64; 2]], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for [re, im] in xs {
            seq.serialize_element(&[raw(*re), raw(*im)])?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<[f64; 2]>, D::Error> {
        <Vec<[f64; 2]> as serde::Deserialize>::deserialize(d)
    }
}
