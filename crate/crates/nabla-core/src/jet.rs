//! Truncated power series (jets) in one variable, and square matrices of them.
//!
//! A jet of order `K` stores the raw coefficients `c_0 .. c_K` of
//! `f(s) = sum c_m (s - s0)^m` about a base point `s0`. Differentiation
//! spends one order of truncation; products and sums hold the minimum of
//! the operand orders. Nothing here extrapolates: once the budget is gone,
//! asking for another derivative is an error.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{require_same_backend, Backend, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Scalar>,
    base: Scalar,
}

impl Jet {
    /// Builds a jet from raw coefficients `c_0 ..= c_K` about `base`.
    pub fn new(coeffs: Vec<Scalar>, base: Scalar) -> Result<Jet> {
        if coeffs.is_empty() {
            return Err(Error::Parse("jet needs at least one coefficient".into()));
        }
        for c in &coeffs {
            require_same_backend(c.backend(), base.backend())?;
        }
        Ok(Jet { coeffs, base })
    }

    pub fn constant(value: Scalar, order: usize, base: Scalar) -> Result<Jet> {
        require_same_backend(value.backend(), base.backend())?;
        let backend = value.backend();
        let mut coeffs = vec![Scalar::zero(backend); order + 1];
        coeffs[0] = value;
        Ok(Jet { coeffs, base })
    }

    pub fn zero(order: usize, base: Scalar) -> Jet {
        let backend = base.backend();
        Jet {
            coeffs: vec![Scalar::zero(backend); order + 1],
            base,
        }
    }

    /// The jet of the coordinate function `s` itself (about `base`).
    pub fn variable(order: usize, base: Scalar) -> Jet {
        let backend = base.backend();
        let mut jet = Jet::zero(order, base.clone());
        jet.coeffs[0] = base;
        if order >= 1 {
            jet.coeffs[1] = Scalar::one(backend);
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.base.backend()
    }

    pub fn base(&self) -> &Scalar {
        &self.base
    }

    /// The value at the base point (`c_0`).
    pub fn value(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub fn coeff(&self, m: usize) -> &Scalar {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        require_same_backend(self.backend(), other.backend())?;
        if self.base != other.base {
            return Err(Error::BasePointMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|m| &self.coeffs[m] + &other.coeffs[m])
            .collect();
        Ok(Jet {
            coeffs,
            base: self.base.clone(),
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|m| &self.coeffs[m] - &other.coeffs[m])
            .collect();
        Ok(Jet {
            coeffs,
            base: self.base.clone(),
        })
    }

    /// Cauchy product, truncated to the smaller operand order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let order = self.order().min(other.order());
        let backend = self.backend();
        let mut coeffs = vec![Scalar::zero(backend); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(&self.coeffs[i] * &other.coeffs[j]);
            }
        }
        Ok(Jet {
            coeffs,
            base: self.base.clone(),
        })
    }

    /// Derivative with respect to `s`; spends one order of truncation.
    pub fn diff(&self) -> Result<Jet> {
        if self.order() == 0 {
            return Err(Error::OrderExhausted {
                needed: 1,
                available: 0,
            });
        }
        let backend = self.backend();
        let coeffs = (1..=self.order())
            .map(|m| Scalar::from_i64(m as i64, backend) * self.coeffs[m].clone())
            .collect();
        Ok(Jet {
            coeffs,
            base: self.base.clone(),
        })
    }

    pub fn neg(&self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            base: self.base.clone(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Result<Jet> {
        require_same_backend(self.backend(), factor.backend())?;
        Ok(Jet {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            base: self.base.clone(),
        })
    }

    /// Drops coefficients above `order` (no-op if already at or below it).
    pub fn truncate(&self, order: usize) -> Jet {
        let keep = order.min(self.order());
        Jet {
            coeffs: self.coeffs[..=keep].to_vec(),
            base: self.base.clone(),
        }
    }

    pub fn to_float_backend(&self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(Scalar::to_float_backend).collect(),
            base: self.base.to_float_backend(),
        }
    }

    /// Evaluates the truncated polynomial at `s` by Horner's rule.
    pub fn eval(&self, s: &Scalar) -> Result<Scalar> {
        require_same_backend(self.backend(), s.backend())?;
        let t = s.clone() - self.base.clone();
        let mut acc = Scalar::zero(self.backend());
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        Ok(acc)
    }

    /// Largest absolute value among the coefficients.
    pub fn max_abs_coeff(&self) -> Scalar {
        let mut best = Scalar::zero(self.backend());
        for c in &self.coeffs {
            let a = c.abs();
            if a.partial_cmp(&best) == Some(std::cmp::Ordering::Greater) {
                best = a;
            }
        }
        best
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "jet@{}[", self.base)?;
        for (m, c) in self.coeffs.iter().enumerate() {
            if m > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Square matrix of jets sharing one order, base point, and backend.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMatrix {
    n: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_entries(n: usize, entries: Vec<Jet>) -> Result<JetMatrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                location: "jet matrix entries".into(),
                expected: n * n,
                got: entries.len(),
            });
        }
        let first = &entries[0];
        for e in &entries[1..] {
            first.check_compatible(e)?;
            if e.order() != first.order() {
                return Err(Error::OrderExhausted {
                    needed: first.order(),
                    available: e.order(),
                });
            }
        }
        Ok(JetMatrix { n, entries })
    }

    pub fn zero(n: usize, order: usize, base: Scalar) -> JetMatrix {
        let entries = vec![Jet::zero(order, base); n * n];
        JetMatrix { n, entries }
    }

    pub fn identity(n: usize, order: usize, base: Scalar) -> JetMatrix {
        let backend = base.backend();
        let mut m = JetMatrix::zero(n, order, base.clone());
        for i in 0..n {
            m.entries[i * n + i] =
                Jet::constant(Scalar::one(backend), order, base.clone()).unwrap();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn base(&self) -> &Scalar {
        self.entries[0].base()
    }

    pub fn backend(&self) -> Backend {
        self.entries[0].backend()
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, jet: Jet) {
        self.entries[i * self.n + j] = jet;
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    fn check_shape(&self, other: &JetMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                location: "jet matrix addition".into(),
                expected: self.n,
                got: other.n,
            });
        }
        self.entries[0].check_compatible(&other.entries[0])
    }

    pub fn add(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn sub(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn mul(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.check_shape(other)?;
        let order = self.order().min(other.order());
        let base = self.base().clone();
        let mut out = JetMatrix::zero(self.n, order, base);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = Jet::zero(order, self.base().clone());
                for k in 0..self.n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Entrywise derivative; spends one order of truncation.
    pub fn diff(&self) -> Result<JetMatrix> {
        let entries = self
            .entries
            .iter()
            .map(Jet::diff)
            .collect::<Result<Vec<_>>>()?;
        Ok(JetMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn neg(&self) -> JetMatrix {
        JetMatrix {
            n: self.n,
            entries: self.entries.iter().map(Jet::neg).collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Result<JetMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.scale(factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn truncate(&self, order: usize) -> JetMatrix {
        JetMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.truncate(order)).collect(),
        }
    }

    pub fn to_float_backend(&self) -> JetMatrix {
        JetMatrix {
            n: self.n,
            entries: self.entries.iter().map(Jet::to_float_backend).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    pub fn max_abs_coeff(&self) -> Scalar {
        let mut best = Scalar::zero(self.backend());
        for e in &self.entries {
            let a = e.max_abs_coeff();
            if a.partial_cmp(&best) == Some(std::cmp::Ordering::Greater) {
                best = a;
            }
        }
        best
    }
}
