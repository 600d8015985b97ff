//! Small numeric helpers shared across modules.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Natural log of an exact big integer. Returns `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        if let Some(v) = x.to_f64() {
            if v.is_finite() {
                return v.ln();
            }
        }
    }
    // keep the top 64 bits as mantissa
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Ratio `num / den` of two big integers as f64, accurate for large operands.
pub fn ratio_biguint(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    (ln_biguint(num) - ln_biguint(den)).exp()
}

/// Serde adapter for reals that may be `±inf` or `NaN`. Finite values are
/// plain JSON numbers; non-finite values become the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod ext_f64 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&format_ext(*v))
        }
    }

    pub fn format_ext(v: f64) -> String {
        if v.is_nan() {
            "nan".into()
        } else if v == f64::INFINITY {
            "inf".into()
        } else if v == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            format!("{v}")
        }
    }

    pub fn parse_ext(s: &str) -> Option<f64> {
        match s {
            "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
            "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            other => other.parse().ok(),
        }
    }

    struct ExtVisitor;

    impl Visitor<'_> for ExtVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            parse_ext(v).ok_or_else(|| E::custom(format!("bad real `{v}`")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtVisitor)
    }

    /// Same adapter for `Option<f64>`.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn ln_of_huge_integer() {
        let x = BigUint::from(3u32).pow(2000);
        let expected = 2000.0 * 3f64.ln();
        assert!((ln_biguint(&x) - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let s: NeumaierSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn ext_f64_round_trip() {
        #[derive(serde::Serialize, serde::Deserialize)]
        struct T {
            #[serde(with = "ext_f64")]
            a: f64,
            #[serde(with = "ext_f64")]
            b: f64,
        }
        let s = serde_json::to_string(&T { a: f64::INFINITY, b: 0.5 }).unwrap();
        assert_eq!(s, r#"{"a":"inf","b":0.5}"#);
        let t: T = serde_json::from_str(&s).unwrap();
        assert!(t.a.is_infinite() && t.b == 0.5);
    }
}
