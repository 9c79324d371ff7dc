//! Extended integer weights: the min-plus carrier `Z ∪ {+∞}`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// An integer weight extended with `+∞`.
///
/// `INF` is absorbing under addition and neutral under `min`, which makes
/// `(ExtWeight, min, +)` a semiring. `−∞` is deliberately unrepresentable:
/// pipelines reject inputs whose distance products would need it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtWeight {
    Finite(i64),
    Inf,
}

pub use ExtWeight::{Finite, Inf};

impl ExtWeight {
    pub const ZERO: ExtWeight = Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            Finite(v) => Some(v),
            Inf => None,
        }
    }

    /// Semiring addition (`+` with absorbing `INF`). Fails instead of
    /// wrapping on i64 overflow.
    #[allow(clippy::should_implement_trait)] // fallible, unlike std ops
    pub fn add(self, other: ExtWeight) -> Result<ExtWeight, GraphError> {
        match (self, other) {
            (Finite(a), Finite(b)) => a
                .checked_add(b)
                .map(Finite)
                .ok_or(GraphError::WeightOverflow { a, b }),
            _ => Ok(Inf),
        }
    }

    /// Semiring "sum" (`min`; `INF` is the identity).
    pub fn min(self, other: ExtWeight) -> ExtWeight {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), Inf) | (Inf, Finite(a)) => Finite(a),
            (Inf, Inf) => Inf,
        }
    }

    pub fn magnitude(self) -> i64 {
        match self {
            Finite(v) => v.abs(),
            Inf => 0,
        }
    }
}

impl fmt::Display for ExtWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => write!(f, "{v}"),
            Inf => write!(f, "INF"),
        }
    }
}

impl From<i64> for ExtWeight {
    fn from(v: i64) -> Self {
        Finite(v)
    }
}

// JSON form: a plain number, or the string "INF".
impl Serialize for ExtWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => serializer.serialize_i64(*v),
            Inf => serializer.serialize_str("INF"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ExtWeight;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or the string \"INF\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtWeight, E> {
                Ok(Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtWeight, E> {
                i64::try_from(v)
                    .map(Finite)
                    .map_err(|_| E::custom("weight out of i64 range"))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<ExtWeight, E> {
                if s == "INF" {
                    Ok(Inf)
                } else {
                    Err(E::custom(format!("unexpected weight string {s:?}")))
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}
