//! Serde adapters that keep non-finite floats intact in formats (like JSON)
//! with no representation for them: finite values stay numbers, the others
//! become the strings `"inf"`, `"-inf"` and `"NaN"`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr<'a> {
    Number(f64),
    Text(&'a str),
    Owned(String),
}

fn to_repr(x: f64) -> Repr<'static> {
    if x.is_finite() {
        Repr::Number(x)
    } else if x.is_nan() {
        Repr::Text("NaN")
    } else if x > 0.0 {
        Repr::Text("inf")
    } else {
        Repr::Text("-inf")
    }
}

fn from_text<E: de::Error>(text: &str) -> Result<f64, E> {
    match text {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "NaN" => Ok(f64::NAN),
        other => Err(E::custom(alloc::format!("expected a number, inf, -inf or NaN, got {other:?}"))),
    }
}

fn from_repr<E: de::Error>(repr: Repr<'_>) -> Result<f64, E> {
    match repr {
        Repr::Number(x) => Ok(x),
        Repr::Text(t) => from_text(t),
        Repr::Owned(t) => from_text(&t),
    }
}

pub fn serialize<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    to_repr(*x).serialize(serializer)
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
    from_repr(Repr::deserialize(deserializer)?)
}

/// The same encoding for named values `[(name, value), ...]`.
pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(pairs: &[(String, f64)], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(pairs.len()))?;
        for (name, value) in pairs {
            seq.serialize_element(&(name, to_repr(*value)))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<(String, f64)>, D::Error> {
        let raw: Vec<(String, Repr<'de>)> = Vec::deserialize(deserializer)?;
        raw.into_iter().map(|(n, r)| Ok((n, from_repr(r)?))).collect()
    }
}

/// The same encoding for a sequence of floats.
pub mod seq {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&to_repr(*v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
        let raw: Vec<Repr<'de>> = Vec::deserialize(deserializer)?;
        raw.into_iter().map(from_repr).collect()
    }
}

/// The same encoding for an optional float.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
        value.map(to_repr).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr<'de>>::deserialize(deserializer)?.map(from_repr).transpose()
    }
}
