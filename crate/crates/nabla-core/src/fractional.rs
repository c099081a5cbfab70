//! Real-order covariant derivatives on generalized power series, the
//! algebraic property checks, and the divergence bookkeeping.
//!
//! The order-alpha derivative is the multinomial formula with the
//! binomial-style weight `falling(alpha, a) / (prod m! prod l!)` and the
//! fractional derivative `d^(alpha-a)` in place of the integer one. For
//! nonnegative integer alpha the falling product kills every `a > alpha`
//! and the sum terminates; otherwise it is truncated at `N` and the tail
//! is watched for growth.

use crate::comb::{factorial, falling_product};
use crate::covariant::enumerate_compositions;
use crate::error::{Error, Result};
use crate::geometry::TensorFieldJet;
use crate::jet::JetMatrix;
use crate::pq::PqTable;
use crate::scalar::{require_same_backend, Backend, Scalar};
use crate::series::GenPowerSeries;
use num_bigint::BigInt;
use num_traits::One;

/// Square matrix of generalized power series (P/Q table levels reread as
/// series in `s`).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    n: usize,
    entries: Vec<GenPowerSeries>,
}

impl SeriesMatrix {
    pub fn from_jet_matrix(m: &JetMatrix) -> Result<SeriesMatrix> {
        let entries = m
            .entries()
            .iter()
            .map(GenPowerSeries::from_jet)
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesMatrix { n: m.dim(), entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &GenPowerSeries {
        &self.entries[i * self.n + j]
    }
}

/// Tensor of type `(p, q)` with generalized-power-series components,
/// upper indices first, dense over all index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSeries {
    dim: usize,
    p: usize,
    q: usize,
    backend: Backend,
    comp: Vec<GenPowerSeries>,
}

impl TensorSeries {
    pub fn zero(dim: usize, p: usize, q: usize, backend: Backend) -> TensorSeries {
        let count = dim.pow((p + q) as u32);
        TensorSeries {
            dim,
            p,
            q,
            backend,
            comp: vec![GenPowerSeries::zero(backend); count],
        }
    }

    pub fn from_components(
        dim: usize,
        p: usize,
        q: usize,
        comp: Vec<GenPowerSeries>,
    ) -> Result<TensorSeries> {
        let count = dim.pow((p + q) as u32);
        if comp.len() != count {
            return Err(Error::DimensionMismatch {
                location: "tensor series components".into(),
                expected: count,
                got: comp.len(),
            });
        }
        let backend = comp[0].backend();
        for c in &comp[1..] {
            require_same_backend(c.backend(), backend)?;
        }
        Ok(TensorSeries { dim, p, q, backend, comp })
    }

    /// Rereads a polynomial tensor jet (base point 0) as series.
    pub fn from_jets(t: &TensorFieldJet) -> Result<TensorSeries> {
        let comp = t
            .components()
            .iter()
            .map(GenPowerSeries::from_jet)
            .collect::<Result<Vec<_>>>()?;
        let (p, q) = t.valence();
        TensorSeries::from_components(t.dim(), p, q, comp)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn rank(&self) -> usize {
        self.p + self.q
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn components(&self) -> &[GenPowerSeries] {
        &self.comp
    }

    pub fn flat_index(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.rank());
        indices.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let rank = self.rank();
        let mut out = vec![0; rank];
        for slot in (0..rank).rev() {
            out[slot] = flat % self.dim;
            flat /= self.dim;
        }
        out
    }

    pub fn get(&self, indices: &[usize]) -> &GenPowerSeries {
        &self.comp[self.flat_index(indices)]
    }

    pub fn set(&mut self, indices: &[usize], value: GenPowerSeries) {
        let at = self.flat_index(indices);
        self.comp[at] = value;
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_shape(other)?;
        let comp = self
            .comp
            .iter()
            .zip(&other.comp)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorSeries { comp, ..self.shape() })
    }

    pub fn sub(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_shape(other)?;
        let comp = self
            .comp
            .iter()
            .zip(&other.comp)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorSeries { comp, ..self.shape() })
    }

    pub fn scale(&self, factor: &Scalar) -> Result<TensorSeries> {
        let comp = self
            .comp
            .iter()
            .map(|c| c.scale(factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorSeries { comp, ..self.shape() })
    }

    /// Componentwise fractional derivative.
    pub fn frac_diff(&self, alpha: &Scalar) -> Result<TensorSeries> {
        let comp = self
            .comp
            .iter()
            .map(|c| c.frac_diff(alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorSeries { comp, ..self.shape() })
    }

    fn shape(&self) -> TensorSeries {
        TensorSeries {
            dim: self.dim,
            p: self.p,
            q: self.q,
            backend: self.backend,
            comp: Vec::new(),
        }
    }

    fn check_shape(&self, other: &TensorSeries) -> Result<()> {
        if self.dim != other.dim || self.p != other.p || self.q != other.q {
            return Err(Error::DimensionMismatch {
                location: "tensor series shapes".into(),
                expected: self.comp.len(),
                got: other.comp.len(),
            });
        }
        require_same_backend(self.backend, other.backend)
    }

    pub fn apply_upper(&self, slot: usize, m: &SeriesMatrix) -> Result<TensorSeries> {
        assert!(slot < self.p, "upper slot out of range");
        self.apply_at(slot, m, false)
    }

    pub fn apply_lower(&self, slot: usize, m: &SeriesMatrix) -> Result<TensorSeries> {
        assert!(slot < self.q, "lower slot out of range");
        self.apply_at(self.p + slot, m, true)
    }

    fn apply_at(&self, pos: usize, m: &SeriesMatrix, transposed: bool) -> Result<TensorSeries> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                location: "series slot application".into(),
                expected: self.dim,
                got: m.dim(),
            });
        }
        let mut out = TensorSeries::zero(self.dim, self.p, self.q, self.backend);
        for flat in 0..out.comp.len() {
            let mut idx = out.unflatten(flat);
            let new_i = idx[pos];
            let mut acc = GenPowerSeries::zero(self.backend);
            for u in 0..self.dim {
                idx[pos] = u;
                let entry = if transposed {
                    m.get(u, new_i)
                } else {
                    m.get(new_i, u)
                };
                if entry.is_zero() {
                    continue;
                }
                acc = acc.add(&entry.mul(self.get(&idx))?)?;
            }
            out.comp[flat] = acc;
        }
        Ok(out)
    }

    pub fn contract(&self, u_slot: usize, l_slot: usize) -> Result<TensorSeries> {
        assert!(u_slot < self.p && l_slot < self.q, "contraction slots out of range");
        let mut out = TensorSeries::zero(self.dim, self.p - 1, self.q - 1, self.backend);
        let l_pos = self.p + l_slot;
        for flat in 0..out.comp.len() {
            let small = out.unflatten(flat);
            let mut full = Vec::with_capacity(self.rank());
            let mut it = small.iter();
            for pos in 0..self.rank() {
                if pos == u_slot || pos == l_pos {
                    full.push(0);
                } else {
                    full.push(*it.next().expect("index arity"));
                }
            }
            let mut acc = GenPowerSeries::zero(self.backend);
            for u in 0..self.dim {
                full[u_slot] = u;
                full[l_pos] = u;
                acc = acc.add(self.get(&full))?;
            }
            out.comp[flat] = acc;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.comp.iter().all(GenPowerSeries::is_zero)
    }

    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.comp
            .iter()
            .map(|c| c.max_abs_coeff().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn to_float_backend(&self) -> TensorSeries {
        TensorSeries {
            dim: self.dim,
            p: self.p,
            q: self.q,
            backend: Backend::Float64,
            comp: self.comp.iter().map(GenPowerSeries::to_float_backend).collect(),
        }
    }
}

/// Outcome of a truncated order-alpha derivative: the value, how far the
/// outer sum ran, the per-component magnitude of the last retained term,
/// and the growth flag.
#[derive(Debug, Clone, PartialEq)]
pub struct FracResult {
    pub value: TensorSeries,
    pub truncation_n: usize,
    pub tail_report: Vec<f64>,
    pub diverging: bool,
}

/// Ratio test over the trailing window: diverging when the last five term
/// norms exist and every consecutive ratio exceeds 1.
fn diverging_by_ratio(norms: &[f64]) -> bool {
    if norms.len() < 5 {
        return false;
    }
    let tail = &norms[norms.len() - 5..];
    tail.windows(2).all(|w| w[0] > 0.0 && w[1] > w[0])
}

/// The order-alpha covariant derivative, truncated at `n_trunc` outer
/// terms. For nonnegative integer alpha the sum terminates on its own and
/// the result is exact (matching the integer-order formula).
pub fn frac_covariant(
    a: &TensorSeries,
    p_table: &PqTable,
    q_table: &PqTable,
    alpha: &Scalar,
    n_trunc: usize,
) -> Result<FracResult> {
    require_same_backend(a.backend(), alpha.backend())?;
    let backend = a.backend();
    let (p, q) = a.valence();

    let a_max = match alpha.as_integer() {
        Some(k) if k >= 0 => n_trunc.min(k as usize),
        _ => n_trunc,
    };

    // Table levels as series, converted once. Levels must sit at base 0.
    let mut p_levels = Vec::with_capacity(a_max + 1);
    let mut q_levels = Vec::with_capacity(a_max + 1);
    for lvl in 0..=a_max {
        p_levels.push(SeriesMatrix::from_jet_matrix(p_table.level(lvl)?)?);
        q_levels.push(SeriesMatrix::from_jet_matrix(q_table.level(lvl)?)?);
    }

    let mut value = TensorSeries::zero(a.dim(), p, q, backend);
    let mut term_norms = Vec::with_capacity(a_max + 1);
    let mut last_term = TensorSeries::zero(a.dim(), p, q, backend);
    for a_ord in 0..=a_max {
        let w_falling = falling_product(alpha, a_ord);
        if w_falling.is_zero() && a_ord > 0 {
            break;
        }
        let order = alpha.clone() - Scalar::from_i64(a_ord as i64, backend);
        let derivative = a.frac_diff(&order)?;
        let mut term = TensorSeries::zero(a.dim(), p, q, backend);
        for comp in enumerate_compositions(p, q, a_ord) {
            let mut piece = derivative.clone();
            for (t, &m_t) in comp.m.iter().enumerate() {
                if m_t > 0 {
                    piece = piece.apply_upper(t, &p_levels[m_t])?;
                }
            }
            for (s, &l_s) in comp.l.iter().enumerate() {
                if l_s > 0 {
                    piece = piece.apply_lower(s, &q_levels[l_s])?;
                }
            }
            let mut denom = BigInt::one();
            for part in comp.m.iter().chain(&comp.l) {
                denom *= factorial(*part);
            }
            let weight = w_falling.checked_div(&Scalar::from_bigint(&denom, backend))?;
            piece = piece.scale(&weight)?;
            term = term.add(&piece)?;
        }
        term_norms.push(term.max_abs_coeff_f64());
        value = value.add(&term)?;
        last_term = term;
    }

    let tail_report = last_term
        .components()
        .iter()
        .map(|c| c.max_abs_coeff().to_f64().abs())
        .collect();
    Ok(FracResult {
        value,
        truncation_n: a_max,
        tail_report,
        diverging: diverging_by_ratio(&term_norms),
    })
}

/// Residual of the composition law: `D^beta(D^alpha A) - D^(alpha+beta) A`
/// with both sides truncated at the same outer length.
pub fn check_semigroup(
    a: &TensorSeries,
    p_table: &PqTable,
    q_table: &PqTable,
    alpha: &Scalar,
    beta: &Scalar,
    n_trunc: usize,
) -> Result<TensorSeries> {
    let inner = frac_covariant(a, p_table, q_table, alpha, n_trunc)?;
    let lhs = frac_covariant(&inner.value, p_table, q_table, beta, n_trunc)?;
    let total = alpha.clone() + beta.clone();
    let rhs = frac_covariant(a, p_table, q_table, &total, n_trunc)?;
    lhs.value.sub(&rhs.value)
}

/// Residual of contraction-commutation on the last upper/lower slot pair:
/// contract then derive, minus derive then contract.
pub fn check_contraction_commutes(
    a: &TensorSeries,
    p_table: &PqTable,
    q_table: &PqTable,
    alpha: &Scalar,
    n_trunc: usize,
) -> Result<TensorSeries> {
    let (p, q) = a.valence();
    assert!(p >= 1 && q >= 1, "contraction needs mixed valence");
    let contracted_first = a.contract(p - 1, q - 1)?;
    let lhs = frac_covariant(&contracted_first, p_table, q_table, alpha, n_trunc)?;
    let derived = frac_covariant(a, p_table, q_table, alpha, n_trunc)?;
    let rhs = derived.value.contract(p - 1, q - 1)?;
    lhs.value.sub(&rhs)
}

/// Both sides of the falling-product multinomial identity: the split sum
/// on the left, the single falling product on the right. Equal as
/// polynomials in alpha and beta.
pub fn vandermonde_multinomial_check(
    alpha: &Scalar,
    beta: &Scalar,
    k: &[usize],
    l: &[usize],
) -> Result<(Scalar, Scalar)> {
    require_same_backend(alpha.backend(), beta.backend())?;
    let backend = alpha.backend();
    let fact = |n: usize| Scalar::from_bigint(&factorial(n), backend);

    let all: Vec<usize> = k.iter().chain(l).copied().collect();
    let total: usize = all.iter().sum();

    // Right side.
    let mut denom = Scalar::one(backend);
    for &part in &all {
        denom = denom * fact(part);
    }
    let rhs = falling_product(&(alpha.clone() + beta.clone()), total).checked_div(&denom)?;

    // Left side: every way to split each slot value into an alpha part and
    // a beta part.
    let mut lhs = Scalar::zero(backend);
    let mut split = vec![0usize; all.len()];
    loop {
        let alpha_total: usize = split.iter().sum();
        let beta_total = total - alpha_total;
        let mut alpha_denom = Scalar::one(backend);
        let mut beta_denom = Scalar::one(backend);
        for (slot, &s) in split.iter().enumerate() {
            alpha_denom = alpha_denom * fact(s);
            beta_denom = beta_denom * fact(all[slot] - s);
        }
        let term = falling_product(beta, beta_total)
            .checked_div(&beta_denom)?
            * falling_product(alpha, alpha_total).checked_div(&alpha_denom)?;
        lhs = lhs + term;

        // Mixed-radix increment of the split vector.
        let mut slot = 0;
        loop {
            if slot == split.len() {
                return Ok((lhs, rhs));
            }
            if split[slot] < all[slot] {
                split[slot] += 1;
                break;
            }
            split[slot] = 0;
            slot += 1;
        }
    }
}
