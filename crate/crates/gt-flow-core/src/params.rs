//! Global model parameters (p, z′, w′) and the arithmetic mode.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which number system carries the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithmeticMode {
    /// Arbitrary-precision rationals; requires integer z′, w′.
    Exact,
    /// `f64` with log-space weights where magnitudes demand it.
    Float,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("p must be positive")]
    NonPositiveP,
    #[error("zPrime must exceed p − 1 (got z' = {z_prime}, p = {p})")]
    ZPrimeTooSmall { z_prime: f64, p: usize },
    #[error("wPrime must exceed −1 (got w' = {w_prime})")]
    WPrimeTooSmall { w_prime: f64 },
    #[error("exact mode requires integer zPrime and wPrime (got {z_prime}, {w_prime})")]
    ExactNeedsIntegers { z_prime: f64, w_prime: f64 },
    #[error("parameters are not finite")]
    NonFinite,
}

/// Parameter record for the measures P_N^{p,z′,w′} and their limits:
/// p particles, z′ > p − 1, w′ > −1.
///
/// In exact mode z′ and w′ must be integers so that every Γ factor in the
/// weights is a factorial and all probabilities are rationals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    p: usize,
    z_prime: f64,
    w_prime: f64,
    mode: ArithmeticMode,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawParams {
    p: usize,
    z_prime: f64,
    w_prime: f64,
    mode: ArithmeticMode,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ParamsError;
    fn try_from(raw: RawParams) -> Result<Self, ParamsError> {
        ModelParams::new(raw.p, raw.z_prime, raw.w_prime, raw.mode)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> RawParams {
        RawParams {
            p: p.p,
            z_prime: p.z_prime,
            w_prime: p.w_prime,
            mode: p.mode,
        }
    }
}

impl ModelParams {
    pub fn new(
        p: usize,
        z_prime: f64,
        w_prime: f64,
        mode: ArithmeticMode,
    ) -> Result<Self, ParamsError> {
        if p == 0 {
            return Err(ParamsError::NonPositiveP);
        }
        if !z_prime.is_finite() || !w_prime.is_finite() {
            return Err(ParamsError::NonFinite);
        }
        if z_prime <= p as f64 - 1.0 {
            return Err(ParamsError::ZPrimeTooSmall { z_prime, p });
        }
        if w_prime <= -1.0 {
            return Err(ParamsError::WPrimeTooSmall { w_prime });
        }
        if mode == ArithmeticMode::Exact
            && (z_prime.fract() != 0.0 || w_prime.fract() != 0.0)
        {
            return Err(ParamsError::ExactNeedsIntegers { z_prime, w_prime });
        }
        Ok(ModelParams {
            p,
            z_prime,
            w_prime,
            mode,
        })
    }

    /// Exact-rational parameters with integer z′, w′.
    pub fn exact(p: usize, z_prime: i64, w_prime: i64) -> Result<Self, ParamsError> {
        Self::new(p, z_prime as f64, w_prime as f64, ArithmeticMode::Exact)
    }

    /// Floating-point parameters.
    pub fn float(p: usize, z_prime: f64, w_prime: f64) -> Result<Self, ParamsError> {
        Self::new(p, z_prime, w_prime, ArithmeticMode::Float)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn z_prime(&self) -> f64 {
        self.z_prime
    }

    pub fn w_prime(&self) -> f64 {
        self.w_prime
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    /// z′ as an integer; only meaningful in exact mode.
    ///
    /// Panics when z′ is not integral (impossible for params constructed in
    /// exact mode).
    pub fn z_int(&self) -> i64 {
        assert!(self.z_prime.fract() == 0.0, "z' is not integral");
        self.z_prime as i64
    }

    /// w′ as an integer; only meaningful in exact mode.
    pub fn w_int(&self) -> i64 {
        assert!(self.w_prime.fract() == 0.0, "w' is not integral");
        self.w_prime as i64
    }

    /// Whether both z′ and w′ are integers (the exact path is available).
    pub fn is_integral(&self) -> bool {
        self.z_prime.fract() == 0.0 && self.w_prime.fract() == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ranges() {
        assert!(ModelParams::float(2, 1.5, 0.0).is_ok());
        assert_eq!(
            ModelParams::float(2, 1.0, 0.0),
            Err(ParamsError::ZPrimeTooSmall { z_prime: 1.0, p: 2 })
        );
        assert_eq!(
            ModelParams::float(1, 1.0, -1.0),
            Err(ParamsError::WPrimeTooSmall { w_prime: -1.0 })
        );
        assert!(ModelParams::new(1, 1.5, 0.0, ArithmeticMode::Exact).is_err());
        assert!(ModelParams::exact(2, 3, 1).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = ModelParams::exact(2, 3, 1).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("zPrime"));
        let back: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        // invariants enforced on deserialization too
        let bad = r#"{"p":2,"zPrime":1.0,"wPrime":0.0,"mode":"exact"}"#;
        assert!(serde_json::from_str::<ModelParams>(bad).is_err());
    }
}
