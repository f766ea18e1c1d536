//! Numeric formatting shared by every artifact writer.
//!
//! Result files print floats with a fixed 15 significant digits in
//! exponent form. That many digits recovers the IEEE double on parse
//! (within one ulp), the fixed width keeps diffs stable, and the form is a
//! valid JSON number, so the same string is reused in CSV and JSON output.

/// `x` with 15 significant digits, e.g. `-2.83623999999999e0`.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

/// An f64 that serializes through [`sig15`] so JSON artifacts carry the same
/// digit discipline as CSV ones. Deserializes like a plain number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct F64(pub f64);

impl From<f64> for F64 {
    fn from(x: f64) -> Self {
        F64(x)
    }
}

impl serde::Serialize for F64 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            // JSON has no inf/nan literals; fail loudly instead of nulling.
            return Err(serde::ser::Error::custom("non-finite value in artifact"));
        }
        let raw = serde_json::value::RawValue::from_string(sig15(self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for F64 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(F64)
    }
}
