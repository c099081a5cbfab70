//! Generalized power series: finite sums of `c * s^beta` with real
//! exponents `beta > -1`, the domain on which termwise Riemann-Liouville
//! fractional calculus (base point 0) is closed.

use std::cmp::Ordering;
use std::fmt;

use crate::comb::{falling_product, rising_product};
use crate::error::{Error, Result};
use crate::gamma::gamma_ratio;
use crate::jet::Jet;
use crate::scalar::{require_same_backend, Backend, Scalar};

fn exp_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.partial_cmp(b).expect("exponents are ordered within one backend")
}

/// Finite sum of `c * s^beta` terms, exponents strictly increasing,
/// all `beta > -1`, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GenPowerSeries {
    backend: Backend,
    terms: Vec<(Scalar, Scalar)>, // (exponent, coefficient)
}

impl GenPowerSeries {
    pub fn zero(backend: Backend) -> GenPowerSeries {
        GenPowerSeries {
            backend,
            terms: Vec::new(),
        }
    }

    pub fn monomial(coeff: Scalar, exponent: Scalar) -> Result<GenPowerSeries> {
        let backend = coeff.backend();
        GenPowerSeries::from_terms(backend, vec![(exponent, coeff)])
    }

    pub fn constant(value: Scalar) -> GenPowerSeries {
        let backend = value.backend();
        GenPowerSeries::monomial(value, Scalar::zero(backend))
            .expect("exponent 0 is in range")
    }

    pub fn from_terms(
        backend: Backend,
        terms: impl IntoIterator<Item = (Scalar, Scalar)>,
    ) -> Result<GenPowerSeries> {
        let minus_one = Scalar::from_i64(-1, backend);
        let mut collected: Vec<(Scalar, Scalar)> = Vec::new();
        for (exp, coeff) in terms {
            require_same_backend(exp.backend(), backend)?;
            require_same_backend(coeff.backend(), backend)?;
            if coeff.is_zero() {
                continue;
            }
            if exp_cmp(&exp, &minus_one) != Ordering::Greater {
                return Err(Error::ExponentOutOfRange {
                    exponent: exp.to_string(),
                });
            }
            collected.push((exp, coeff));
        }
        collected.sort_by(|a, b| exp_cmp(&a.0, &b.0));
        let mut merged: Vec<(Scalar, Scalar)> = Vec::new();
        for (exp, coeff) in collected {
            match merged.last_mut() {
                Some((last_exp, last_coeff)) if exp_cmp(last_exp, &exp) == Ordering::Equal => {
                    *last_coeff = last_coeff.clone() + coeff;
                    if last_coeff.is_zero() {
                        merged.pop();
                    }
                }
                _ => merged.push((exp, coeff)),
            }
        }
        Ok(GenPowerSeries {
            backend,
            terms: merged,
        })
    }

    /// A polynomial jet about base point 0, reread as a power series in `s`.
    pub fn from_jet(jet: &Jet) -> Result<GenPowerSeries> {
        if !jet.base().is_zero() {
            return Err(Error::NonzeroBasePoint {
                base: jet.base().to_string(),
            });
        }
        let backend = jet.backend();
        GenPowerSeries::from_terms(
            backend,
            jet.coeffs()
                .iter()
                .enumerate()
                .map(|(m, c)| (Scalar::from_i64(m as i64, backend), c.clone())),
        )
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Scalar, Scalar)] {
        &self.terms
    }

    pub fn add(&self, other: &GenPowerSeries) -> Result<GenPowerSeries> {
        require_same_backend(self.backend, other.backend)?;
        GenPowerSeries::from_terms(
            self.backend,
            self.terms.iter().chain(&other.terms).cloned(),
        )
    }

    pub fn sub(&self, other: &GenPowerSeries) -> Result<GenPowerSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GenPowerSeries {
        GenPowerSeries {
            backend: self.backend,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Result<GenPowerSeries> {
        require_same_backend(self.backend, factor.backend())?;
        if factor.is_zero() {
            return Ok(GenPowerSeries::zero(self.backend));
        }
        Ok(GenPowerSeries {
            backend: self.backend,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        })
    }

    pub fn mul(&self, other: &GenPowerSeries) -> Result<GenPowerSeries> {
        require_same_backend(self.backend, other.backend)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                terms.push((ea + eb, ca * cb));
            }
        }
        GenPowerSeries::from_terms(self.backend, terms)
    }

    /// Termwise Riemann-Liouville derivative of order `alpha` (base 0):
    /// `c s^beta  ->  c Gamma(beta+1)/Gamma(beta-alpha+1) s^(beta-alpha)`.
    ///
    /// Terms whose denominator Gamma argument is a nonpositive integer
    /// vanish. Negative `alpha` integrates from 0. Non-integer `alpha`
    /// needs the float backend.
    pub fn frac_diff(&self, alpha: &Scalar) -> Result<GenPowerSeries> {
        require_same_backend(self.backend, alpha.backend())?;
        if let Some(k) = alpha.as_integer() {
            return self.int_order_diff(k);
        }
        if self.backend != Backend::Float64 {
            return Err(Error::NonIntegerOrderRequiresFloat {
                order: alpha.to_string(),
            });
        }
        let a = alpha.to_f64();
        let mut terms = Vec::new();
        for (exp, coeff) in &self.terms {
            let beta = exp.to_f64();
            let den_arg = beta - a + 1.0;
            if den_arg <= 0.0 && den_arg.fract() == 0.0 {
                continue; // Gamma pole in the denominator
            }
            let new_exp = beta - a;
            if new_exp <= -1.0 {
                return Err(Error::ExponentOutOfRange {
                    exponent: new_exp.to_string(),
                });
            }
            let ratio = gamma_ratio(beta + 1.0, den_arg);
            terms.push((Scalar::Float(new_exp), Scalar::Float(ratio) * coeff.clone()));
        }
        GenPowerSeries::from_terms(self.backend, terms)
    }

    fn int_order_diff(&self, k: i64) -> Result<GenPowerSeries> {
        let backend = self.backend;
        let mut terms = Vec::new();
        for (exp, coeff) in &self.terms {
            let (multiplier, new_exp) = if k >= 0 {
                let m = falling_product(exp, k as usize);
                (m, exp.clone() - Scalar::from_i64(k, backend))
            } else {
                let steps = (-k) as usize;
                let one = Scalar::one(backend);
                let denom = rising_product(&(exp.clone() + one.clone()), steps);
                (one.checked_div(&denom)?, exp.clone() - Scalar::from_i64(k, backend))
            };
            if multiplier.is_zero() {
                continue;
            }
            let minus_one = Scalar::from_i64(-1, backend);
            if exp_cmp(&new_exp, &minus_one) != Ordering::Greater {
                return Err(Error::ExponentOutOfRange {
                    exponent: new_exp.to_string(),
                });
            }
            terms.push((new_exp, coeff * &multiplier));
        }
        GenPowerSeries::from_terms(backend, terms)
    }

    /// Ordinary derivative (fractional order 1).
    pub fn diff(&self) -> Result<GenPowerSeries> {
        self.int_order_diff(1)
    }

    /// Integral from 0 (fractional order -1).
    pub fn integrate(&self) -> Result<GenPowerSeries> {
        self.int_order_diff(-1)
    }

    pub fn to_float_backend(&self) -> GenPowerSeries {
        match self.backend {
            Backend::Float64 => self.clone(),
            Backend::Rational => GenPowerSeries {
                backend: Backend::Float64,
                terms: self
                    .terms
                    .iter()
                    .map(|(e, c)| (e.to_float_backend(), c.to_float_backend()))
                    .collect(),
            },
        }
    }

    /// Evaluates at `s >= 0` in floating point.
    pub fn eval_f64(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (exp, coeff) in &self.terms {
            let power = match exp.as_integer() {
                Some(k) if (-20..=60).contains(&k) => s.powi(k as i32),
                _ => s.powf(exp.to_f64()),
            };
            acc += coeff.to_f64() * power;
        }
        acc
    }

    /// Largest absolute coefficient, as the series' own scalar type.
    pub fn max_abs_coeff(&self) -> Scalar {
        let mut best = Scalar::zero(self.backend);
        for (_, c) in &self.terms {
            let a = c.abs();
            if a.partial_cmp(&best) == Some(Ordering::Greater) {
                best = a;
            }
        }
        best
    }
}

impl fmt::Display for GenPowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*s^{e}")?;
        }
        Ok(())
    }
}
