//! Series solutions of linear ODE systems via negative-order covariant
//! derivatives.
//!
//! First order: `dY/ds + f Y = g` becomes `DY = g` once the level-1 symbol
//! is set to `f`, so `Y = D^(-1) g`. Second order: `D^2 Y = g` expands to
//! `Y'' + 2 f Y' + (f' + f^2) Y = g`, solved by `Y = D^(-2) g`. Both give
//! the particular solution with zero initial data at `s = 0`; homogeneous
//! solutions are never produced.

use crate::error::{Error, Result};
use crate::fractional::{frac_covariant, FracResult, SeriesMatrix, TensorSeries};
use crate::jet::JetMatrix;
use crate::pq::{PqKind, PqTable};
use crate::scalar::{require_same_backend, Backend, Scalar};
use crate::series::GenPowerSeries;

/// Evenly spaced sample points for reporting solution and residual values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SampleGrid {
    pub fn points(&self) -> Vec<f64> {
        assert!(self.step > 0.0, "grid step must be positive");
        let mut out = Vec::new();
        let mut s = self.start;
        // Half-step slack so the endpoint survives rounding.
        while s <= self.stop + self.step * 0.5 {
            out.push(s);
            s += self.step;
        }
        out
    }
}

/// The system `dY/ds + f Y = g` (order 1) or the second-order system whose
/// coefficients are derived from the same `f`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    dim: usize,
    order_of_system: u8,
    f: JetMatrix,
    g: Vec<GenPowerSeries>,
    grid: SampleGrid,
}

impl LinearSystem {
    pub fn new(
        order_of_system: u8,
        f: JetMatrix,
        g: Vec<GenPowerSeries>,
        grid: SampleGrid,
    ) -> Result<LinearSystem> {
        if order_of_system != 1 && order_of_system != 2 {
            return Err(Error::manifest(
                "order_of_system",
                "must be 1 or 2".to_string(),
            ));
        }
        let dim = f.dim();
        if g.len() != dim {
            return Err(Error::DimensionMismatch {
                location: "right-hand side".into(),
                expected: dim,
                got: g.len(),
            });
        }
        if !f.base().is_zero() {
            return Err(Error::NonzeroBasePoint {
                base: f.base().to_string(),
            });
        }
        for gi in &g {
            require_same_backend(gi.backend(), f.backend())?;
        }
        Ok(LinearSystem {
            dim,
            order_of_system,
            f,
            g,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order_of_system(&self) -> u8 {
        self.order_of_system
    }

    pub fn backend(&self) -> Backend {
        self.f.backend()
    }

    pub fn coefficients(&self) -> &JetMatrix {
        &self.f
    }

    pub fn right_side(&self) -> &[GenPowerSeries] {
        &self.g
    }

    pub fn grid(&self) -> SampleGrid {
        self.grid
    }

    pub fn to_float_backend(&self) -> LinearSystem {
        LinearSystem {
            dim: self.dim,
            order_of_system: self.order_of_system,
            f: self.f.to_float_backend(),
            g: self.g.iter().map(GenPowerSeries::to_float_backend).collect(),
            grid: self.grid,
        }
    }
}

/// Solver output: the truncated series solution plus the substitution
/// residual and its sampled magnitudes.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: FracResult,
    pub residual: Vec<GenPowerSeries>,
    /// Largest `|residual_i(s)|` over the sample grid, per component.
    pub residual_norms: Vec<f64>,
    /// `(s, Y(s))` rows over the sample grid.
    pub samples: Vec<(f64, Vec<f64>)>,
}

fn tables_from_coefficients(f: &JetMatrix, levels: usize) -> Result<(PqTable, PqTable)> {
    Ok((
        PqTable::from_level1(PqKind::P, f.clone(), levels)?,
        PqTable::from_level1(PqKind::Q, f.clone(), levels)?,
    ))
}

fn finish(
    sys: &LinearSystem,
    solution: FracResult,
    residual: Vec<GenPowerSeries>,
) -> SolveOutcome {
    let points = sys.grid.points();
    let residual_norms = residual
        .iter()
        .map(|r| {
            points
                .iter()
                .map(|&s| r.eval_f64(s).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let samples = points
        .iter()
        .map(|&s| {
            let row = solution
                .value
                .components()
                .iter()
                .map(|c| c.eval_f64(s))
                .collect();
            (s, row)
        })
        .collect();
    SolveOutcome {
        solution,
        residual,
        residual_norms,
        samples,
    }
}

/// Solves `dY/ds + f Y = g` as `Y = D^(-1) g` truncated at `n_trunc` outer
/// terms. The residual is `dY/ds + f Y - g` on the truncated series.
pub fn solve_first_order(sys: &LinearSystem, n_trunc: usize) -> Result<SolveOutcome> {
    if sys.order_of_system != 1 {
        return Err(Error::manifest(
            "order_of_system",
            "first-order solver needs order 1".to_string(),
        ));
    }
    let backend = sys.backend();
    let (p, q) = tables_from_coefficients(&sys.f, n_trunc)?;
    let g = TensorSeries::from_components(sys.dim, 1, 0, sys.g.clone())?;
    let solution = frac_covariant(&g, &p, &q, &Scalar::from_i64(-1, backend), n_trunc)?;

    let f_series = SeriesMatrix::from_jet_matrix(&sys.f)?;
    let mut residual = Vec::with_capacity(sys.dim);
    for i in 0..sys.dim {
        let mut r = solution.value.components()[i].diff()?;
        for j in 0..sys.dim {
            let entry = f_series.get(i, j);
            if entry.is_zero() {
                continue;
            }
            r = r.add(&entry.mul(&solution.value.components()[j])?)?;
        }
        residual.push(r.sub(&sys.g[i])?);
    }
    Ok(finish(sys, solution, residual))
}

/// Solves `Y'' + 2 f Y' + (f' + f^2) Y = g` as `Y = D^(-2) g` truncated at
/// `n_trunc` outer terms, with the direct-substitution residual.
pub fn solve_second_order(sys: &LinearSystem, n_trunc: usize) -> Result<SolveOutcome> {
    if sys.order_of_system != 2 {
        return Err(Error::manifest(
            "order_of_system",
            "second-order solver needs order 2".to_string(),
        ));
    }
    let backend = sys.backend();
    let (p, q) = tables_from_coefficients(&sys.f, n_trunc)?;
    let g = TensorSeries::from_components(sys.dim, 1, 0, sys.g.clone())?;
    let solution = frac_covariant(&g, &p, &q, &Scalar::from_i64(-2, backend), n_trunc)?;

    let f_series = SeriesMatrix::from_jet_matrix(&sys.f)?;
    let shifted = sys
        .f
        .diff()?
        .add(&sys.f.mul(&sys.f)?.truncate(sys.f.order() - 1))?;
    let zero_series = SeriesMatrix::from_jet_matrix(&shifted)?;

    let mut residual = Vec::with_capacity(sys.dim);
    let two = Scalar::from_i64(2, backend);
    for i in 0..sys.dim {
        let y_i = &solution.value.components()[i];
        let mut r = y_i.diff()?.diff()?;
        for j in 0..sys.dim {
            let y_j = &solution.value.components()[j];
            let f_ij = f_series.get(i, j);
            if !f_ij.is_zero() {
                r = r.add(&f_ij.mul(&y_j.diff()?)?.scale(&two)?)?;
            }
            let c_ij = zero_series.get(i, j);
            if !c_ij.is_zero() {
                r = r.add(&c_ij.mul(y_j)?)?;
            }
        }
        residual.push(r.sub(&sys.g[i])?);
    }
    Ok(finish(sys, solution, residual))
}
