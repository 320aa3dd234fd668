//! Densities on chart parameter boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub c: f64,
    pub powers: Vec<u32>,
}

/// Density `psi` in the chart parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `amplitude * prod_i exp(-1 / (1 - r_i^2))`, `r_i = (s_i - center_i) / half_width_i`.
    Bump {
        center: Vec<f64>,
        half_width: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Polynomial { terms: Vec<Monomial> },
}

impl Default for Density {
    fn default() -> Self {
        Density::Constant { value: 1.0 }
    }
}

/// Product bump `prod_i exp(-1 / (1 - r_i^2))`, zero outside the box.
pub fn bump(u: &[f64], center: &[f64], half_width: &[f64]) -> f64 {
    let mut v = 1.0;
    for ((u, c), h) in u.iter().zip(center).zip(half_width) {
        let r = (u - c) / h;
        if r.abs() >= 1.0 {
            return 0.0;
        }
        v *= (-1.0 / (1.0 - r * r)).exp();
    }
    v
}

impl Density {
    /// Checks shapes against the parameter box; bump support must lie inside it.
    pub fn validate(&self, domain: &[(f64, f64)]) -> Result<()> {
        let m = domain.len();
        match self {
            Density::Constant { value } if !value.is_finite() => Err(Error::NonFinite("constant density".into())),
            Density::Constant { .. } => Ok(()),
            Density::Bump { center, half_width, amplitude } => {
                if center.len() != m || half_width.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, found: center.len().max(half_width.len()) });
                }
                if !amplitude.is_finite() {
                    return Err(Error::NonFinite("bump amplitude".into()));
                }
                for ((&c, &h), &(lo, hi)) in center.iter().zip(half_width).zip(domain) {
                    if !(h > 0.0) || !c.is_finite() || c - h < lo || c + h > hi {
                        return Err(Error::InvalidArgument(format!(
                            "bump support [{}, {}] not inside the parameter interval [{lo}, {hi}]",
                            c - h,
                            c + h
                        )));
                    }
                }
                Ok(())
            }
            Density::Polynomial { terms } => {
                for t in terms {
                    if t.powers.len() != m {
                        return Err(Error::DimensionMismatch { expected: m, found: t.powers.len() });
                    }
                    if !t.c.is_finite() {
                        return Err(Error::NonFinite("polynomial density coefficient".into()));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, s: &[f64]) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::Bump { center, half_width, amplitude } => amplitude * bump(s, center, half_width),
            Density::Polynomial { terms } => terms
                .iter()
                .map(|t| t.c * t.powers.iter().zip(s).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
                .sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_peak() {
        let d = Density::Bump { center: vec![1.0], half_width: vec![0.5], amplitude: 2.0 };
        d.validate(&[(0.0, 2.0)]).unwrap();
        assert!((d.eval(&[1.0]) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(d.eval(&[1.5]), 0.0);
        assert!(d.validate(&[(0.8, 2.0)]).is_err());
    }

    #[test]
    fn polynomial_terms() {
        let d = Density::Polynomial { terms: vec![Monomial { c: 2.0, powers: vec![2] }, Monomial { c: 1.0, powers: vec![0] }] };
        assert_eq!(d.eval(&[3.0]), 19.0);
        assert!(d.validate(&[(0.0, 1.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let d: Density = serde_json::from_str(r#"{"kind":"constant"}"#).unwrap();
        assert_eq!(d, Density::default());
        assert!(serde_json::from_str::<Density>(r#"{"kind":"constant","vale":2}"#).is_err());
    }
}
