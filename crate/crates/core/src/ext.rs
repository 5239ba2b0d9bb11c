//! Extended-real values in `R ∪ {+inf, -inf}` with the two arithmetic
//! conventions the cost calculus needs.
//!
//! Infimum-type expressions (c-transforms, the forward semigroup) use
//! `-inf + inf := +inf`: an unreachable term must not win the infimum.
//! Supremum-type expressions (c-convex envelopes, the backward semigroup)
//! use `±inf ∓ inf := -inf` for the same reason. The two operations are
//! exposed separately; plain `f64` arithmetic would produce NaN here.

use crate::Real;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Extended-real cost value. Never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtendedCost(f64);

pub const POS_INF: ExtendedCost = ExtendedCost(f64::INFINITY);
pub const NEG_INF: ExtendedCost = ExtendedCost(f64::NEG_INFINITY);

impl ExtendedCost {
    pub fn finite(v: Real) -> Self {
        assert!(!v.is_nan(), "ExtendedCost must not be NaN");
        ExtendedCost(v)
    }

    pub fn pos_inf() -> Self {
        POS_INF
    }

    pub fn neg_inf() -> Self {
        NEG_INF
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Raw value, `±inf` included.
    pub fn value(self) -> Real {
        self.0
    }

    /// Finite value or `None`.
    pub fn as_finite(self) -> Option<Real> {
        self.is_finite().then_some(self.0)
    }

    /// `a + b` with the infimum convention `-inf + inf := +inf`.
    pub fn add_inf(self, rhs: ExtendedCost) -> ExtendedCost {
        if self.is_pos_inf() || rhs.is_pos_inf() {
            POS_INF
        } else {
            ExtendedCost(self.0 + rhs.0)
        }
    }

    /// `a - b` with the supremum convention `±inf ∓ inf := -inf`.
    pub fn sub_sup(self, rhs: ExtendedCost) -> ExtendedCost {
        if self.is_neg_inf() || rhs.is_pos_inf() {
            NEG_INF
        } else if self.is_pos_inf() || rhs.is_neg_inf() {
            POS_INF
        } else {
            ExtendedCost(self.0 - rhs.0)
        }
    }

    pub fn min(self, rhs: ExtendedCost) -> ExtendedCost {
        if rhs.0 < self.0 {
            rhs
        } else {
            self
        }
    }

    pub fn max(self, rhs: ExtendedCost) -> ExtendedCost {
        if rhs.0 > self.0 {
            rhs
        } else {
            self
        }
    }

    /// Scale by a finite positive factor (fixed points of `±inf`).
    pub fn scale(self, factor: Real) -> ExtendedCost {
        assert!(factor.is_finite() && factor > 0.0);
        ExtendedCost(self.0 * factor)
    }
}

impl From<Real> for ExtendedCost {
    fn from(v: Real) -> Self {
        ExtendedCost::finite(v)
    }
}

impl std::fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_pos_inf() {
            write!(f, "inf")
        } else if self.is_neg_inf() {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

// JSON has no infinities; the published schema uses "inf"/"-inf" sentinels.
impl Serialize for ExtendedCost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_pos_inf() {
            serializer.serialize_str("inf")
        } else if self.is_neg_inf() {
            serializer.serialize_str("-inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) if v.is_nan() => Err(D::Error::custom("NaN is not an extended cost")),
            Repr::Num(v) => Ok(ExtendedCost(v)),
            Repr::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(POS_INF),
                "-inf" => Ok(NEG_INF),
                other => Err(D::Error::custom(format!(
                    "expected a number, \"inf\" or \"-inf\", got {other:?}"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(NEG_INF.add_inf(POS_INF), POS_INF);
        assert_eq!(POS_INF.add_inf(NEG_INF), POS_INF);
        assert_eq!(NEG_INF.add_inf(ExtendedCost::finite(3.0)), NEG_INF);
        assert_eq!(
            ExtendedCost::finite(1.0).add_inf(ExtendedCost::finite(2.0)),
            ExtendedCost::finite(3.0)
        );

        assert_eq!(POS_INF.sub_sup(POS_INF), NEG_INF);
        assert_eq!(NEG_INF.sub_sup(NEG_INF), NEG_INF);
        assert_eq!(POS_INF.sub_sup(ExtendedCost::finite(1.0)), POS_INF);
        assert_eq!(ExtendedCost::finite(1.0).sub_sup(NEG_INF), POS_INF);
        assert_eq!(ExtendedCost::finite(1.0).sub_sup(POS_INF), NEG_INF);
    }

    #[test]
    fn json_sentinels() {
        let vals = vec![ExtendedCost::finite(1.5), POS_INF, NEG_INF];
        let s = serde_json::to_string(&vals).unwrap();
        assert_eq!(s, r#"[1.5,"inf","-inf"]"#);
        let back: Vec<ExtendedCost> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vals);
    }
}
