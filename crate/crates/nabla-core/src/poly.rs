//! Multivariate polynomials over either scalar backend.
//!
//! These carry the static input data: Christoffel symbols as polynomials
//! in the coordinates, and chart-transition maps. Evaluation on jets turns
//! them into functions of the curve parameter.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{require_same_backend, Backend, Scalar};

/// Polynomial in `arity` variables; term map from exponent vector to
/// nonzero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    arity: usize,
    backend: Backend,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl MultiPoly {
    pub fn zero(arity: usize, backend: Backend) -> MultiPoly {
        MultiPoly {
            arity,
            backend,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, value: Scalar) -> MultiPoly {
        let backend = value.backend();
        let mut p = MultiPoly::zero(arity, backend);
        if !value.is_zero() {
            p.terms.insert(vec![0; arity], value);
        }
        p
    }

    /// The coordinate monomial `x_var`.
    pub fn variable(arity: usize, var: usize, backend: Backend) -> MultiPoly {
        assert!(var < arity, "variable index out of range");
        let mut exps = vec![0u32; arity];
        exps[var] = 1;
        let mut p = MultiPoly::zero(arity, backend);
        p.terms.insert(exps, Scalar::one(backend));
        p
    }

    pub fn from_terms(
        arity: usize,
        backend: Backend,
        terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>,
    ) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(arity, backend);
        for (exps, coeff) in terms {
            if exps.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: exps.len(),
                });
            }
            require_same_backend(coeff.backend(), backend)?;
            p.add_term(exps, coeff);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                let sum = c.clone() + coeff;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(exps, coeff);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Scalar)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn check_arity(&self, other: &MultiPoly) -> Result<()> {
        require_same_backend(self.backend, other.backend)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            arity: self.arity,
            backend: self.backend,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Result<MultiPoly> {
        require_same_backend(self.backend, factor.backend())?;
        if factor.is_zero() {
            return Ok(MultiPoly::zero(self.arity, self.backend));
        }
        Ok(MultiPoly {
            arity: self.arity,
            backend: self.backend,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        })
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(other)?;
        let mut out = MultiPoly::zero(self.arity, self.backend);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut out = MultiPoly::constant(self.arity, Scalar::one(self.backend));
        for _ in 0..k {
            out = out.mul(self).expect("same arity by construction");
        }
        out
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        assert!(var < self.arity, "variable index out of range");
        let mut out = MultiPoly::zero(self.arity, self.backend);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] -= 1;
            let factor = Scalar::from_i64(e[var] as i64, self.backend);
            out.add_term(exps, c * &factor);
        }
        out
    }

    /// Substitutes one polynomial per variable.
    pub fn compose(&self, args: &[MultiPoly]) -> Result<MultiPoly> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        let out_arity = args.first().map_or(0, MultiPoly::arity);
        for a in args {
            require_same_backend(a.backend, self.backend)?;
            if a.arity != out_arity {
                return Err(Error::ArityMismatch {
                    expected: out_arity,
                    got: a.arity,
                });
            }
        }
        let mut out = MultiPoly::zero(out_arity, self.backend);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(out_arity, c.clone());
            for (v, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&args[v].pow(exp))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Evaluates at a point.
    pub fn eval_scalars(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        for x in point {
            require_same_backend(x.backend(), self.backend)?;
        }
        let mut acc = Scalar::zero(self.backend);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term = term * point[v].clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Substitutes one jet per variable: the jet of `p(x_1(s), ..., x_n(s))`.
    pub fn eval_jets(&self, args: &[Jet]) -> Result<Jet> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        let (order, base) = match args.first() {
            Some(j) => (j.order(), j.base().clone()),
            None => {
                // Zero variables: the polynomial is a constant.
                let value = self
                    .terms
                    .get(&vec![])
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(self.backend));
                return Jet::constant(value, 0, Scalar::zero(self.backend));
            }
        };
        let mut acc = Jet::zero(order, base.clone());
        for (e, c) in &self.terms {
            let mut term = Jet::constant(c.clone(), order, base.clone())?;
            for (v, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term = term.mul(&args[v])?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for MultiPoly {
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
            write!(f, "{c}")?;
            for (v, &exp) in e.iter().enumerate() {
                if exp == 1 {
                    write!(f, "*x{}", v + 1)?;
                } else if exp > 1 {
                    write!(f, "*x{}^{}", v + 1, exp)?;
                }
            }
        }
        Ok(())
    }
}
