//! Serialization helpers shared by the report types.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex number serialized as `{re, im}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: c.re, im: c.im }
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}
