//! JSON coefficient files: `{"band_limit": M, "modes": [{"k", "re", "im"}, ...]}`
//! listing only `k ≥ 0`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CircleFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub band_limit: usize,
    pub modes: Vec<ModeEntry>,
}

impl CoefficientFile {
    pub fn from_function(f: &CircleFunction) -> Self {
        let modes = f
            .nonnegative()
            .iter()
            .enumerate()
            .map(|(k, c)| ModeEntry {
                k: k as i64,
                re: c.re,
                im: c.im,
            })
            .collect();
        CoefficientFile {
            band_limit: f.band_limit(),
            modes,
        }
    }

    pub fn to_function(&self) -> Result<CircleFunction> {
        let m = self.band_limit;
        let mut half = vec![Complex64::new(0.0, 0.0); m + 1];
        let mut seen = vec![false; m + 1];
        for e in &self.modes {
            if e.k < 0 || e.k as usize > m {
                return Err(Error::Format(format!("mode k={} outside 0..={m}", e.k)));
            }
            let k = e.k as usize;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Format(format!("duplicate mode k={k}")));
            }
            half[k] = Complex64::new(e.re, e.im);
        }
        CircleFunction::try_from_nonnegative(&half)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl CircleFunction {
    pub fn to_json(&self) -> Result<String> {
        CoefficientFile::from_function(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        CoefficientFile::from_json(text)?.to_function()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_rough;
    use proptest::prelude::*;

    #[test]
    fn rejects_malformed_files() {
        let dup = r#"{"band_limit":1,"modes":[{"k":1,"re":1.0,"im":0.0},{"k":1,"re":1.0,"im":0.0}]}"#;
        assert!(CircleFunction::from_json(dup).is_err());
        let neg = r#"{"band_limit":1,"modes":[{"k":-1,"re":1.0,"im":0.0}]}"#;
        assert!(CircleFunction::from_json(neg).is_err());
        let imag_mean = r#"{"band_limit":1,"modes":[{"k":0,"re":1.0,"im":0.5}]}"#;
        assert!(CircleFunction::from_json(imag_mean).is_err());
        assert!(CircleFunction::from_json("{").is_err());
    }

    #[test]
    fn missing_modes_are_zero() {
        let f = CircleFunction::from_json(r#"{"band_limit":3,"modes":[{"k":2,"re":0.5,"im":-0.25}]}"#).unwrap();
        assert_eq!(f.band_limit(), 3);
        assert_eq!(f.coeff(-2), Complex64::new(0.5, 0.25));
        assert_eq!(f.coeff(1), Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(seed in any::<u64>(), band in 1usize..40, amp in 1e-6f64..1e6) {
            let f = random_rough(-0.3, seed, band, amp).unwrap();
            let back = CircleFunction::from_json(&f.to_json().unwrap()).unwrap();
            for (a, b) in f.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}
