//! Fixed-format float rendering for every file this crate writes.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        // Collapse -0.0 so outputs do not depend on the sign of zero.
        return "0.0000000000000000e0".to_string();
    }
    format!("{:.16e}", x)
}

/// JSON number wrapper that serializes with [`sig17`]; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

pub fn sig17_opt(x: Option<f64>) -> Option<Sig17> {
    x.map(Sig17)
}

/// `serialize_with` adapter for an `f64` field.
pub fn ser<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    Sig17(*x).serialize(s)
}

/// `serialize_with` adapter for an `Option<f64>` field.
pub fn ser_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    sig17_opt(*x).serialize(s)
}

/// `serialize_with` adapter for a `Vec<f64>` field.
pub fn ser_vec<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|&v| Sig17(v)))
}

/// `serialize_with` adapter for a map of `f64` values.
pub fn ser_map<S: Serializer>(x: &std::collections::BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(x.iter().map(|(k, &v)| (k, Sig17(v))))
}

/// `re+imi` with twelve decimals, as used by the character-table CSV.
pub fn complex12(re: f64, im: f64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    let (re, im) = (clean(re), clean(im));
    format!("{:.12}{}{:.12}i", re, if im < 0.0 { "-" } else { "+" }, im.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for &x in &[1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI, -0.0] {
            let parsed: f64 = sig17(x).parse().unwrap();
            assert_eq!(parsed, if x == 0.0 { 0.0 } else { x });
        }
    }

    #[test]
    fn raw_json_number() {
        let s = serde_json::to_string(&vec![Sig17(0.5), Sig17(f64::NAN)]).unwrap();
        assert_eq!(s, "[5.0000000000000000e-1,null]");
    }

    #[test]
    fn complex_format() {
        assert_eq!(complex12(-1.0, 0.0), "-1.000000000000+0.000000000000i");
        assert_eq!(complex12(-0.5, -0.8660254037844386), "-0.500000000000-0.866025403784i");
        assert_eq!(complex12(-1e-15, 1e-14), "0.000000000000+0.000000000000i");
    }
}
