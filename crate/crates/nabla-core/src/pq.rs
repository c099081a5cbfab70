//! P and Q symbol tables and the identities that tie them together.
//!
//! Level 0 is the identity, level 1 is the connection contracted with the
//! curve velocity, and each further level applies
//! `P_(k+1) = P_k' + P_1 P_k` or `Q_(k+1) = Q_k' + Q_k Q_1` (note the
//! opposite composition sides). Every recursion step spends one jet order,
//! so level k retains order K - k; residual checks automatically truncate
//! to the valid common prefix.

use crate::comb::binomial_scalar;
use crate::error::{Error, Result};
use crate::geometry::{
    jacobian_along_curve, pushforward_curve, transform_connection, JacobianDirection, Scene,
};
use crate::jet::JetMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqKind {
    P,
    Q,
}

/// Which of the two derivative-expansion identities to check: PQ expands
/// derivatives of P levels, QP those of Q levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionVariant {
    PQ,
    QP,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqTable {
    kind: PqKind,
    levels: Vec<JetMatrix>,
}

impl PqTable {
    /// Builds levels 0..=k_max from a given level-1 matrix. For the P
    /// table pass the symbol matrix itself; the Q table starts from its
    /// negative and composes on the right.
    pub fn from_level1(kind: PqKind, level1: JetMatrix, k_max: usize) -> Result<PqTable> {
        if k_max >= 1 && level1.order() + 1 < k_max {
            return Err(Error::OrderExhausted {
                needed: k_max,
                available: level1.order() + 1,
            });
        }
        let n = level1.dim();
        let base = level1.base().clone();
        let order0 = level1.order() + 1;
        let mut levels = vec![JetMatrix::identity(n, order0, base)];
        if k_max >= 1 {
            let first = match kind {
                PqKind::P => level1,
                PqKind::Q => level1.neg(),
            };
            levels.push(first);
            for _ in 1..k_max {
                let prev = levels.last().expect("nonempty");
                let step = levels[1].clone();
                let next = match kind {
                    PqKind::P => prev.diff()?.add(&step.mul(prev)?)?,
                    PqKind::Q => prev.diff()?.add(&prev.mul(&step)?)?,
                };
                levels.push(next);
            }
        }
        Ok(PqTable { kind, levels })
    }

    /// Builds the table for a scene's connection and curve.
    pub fn build(kind: PqKind, scene: &Scene, k_max: usize) -> Result<PqTable> {
        if k_max > scene.order {
            return Err(Error::OrderExhausted {
                needed: k_max,
                available: scene.order,
            });
        }
        let level1 = scene.connection.level1_along(&scene.curve)?;
        PqTable::from_level1(kind, level1, k_max)
    }

    pub fn kind(&self) -> PqKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.levels[0].dim()
    }

    pub fn k_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> Result<&JetMatrix> {
        self.levels.get(k).ok_or(Error::LevelUnderflow {
            needed: k,
            available: self.k_max(),
        })
    }
}

/// Residual of the orthogonality identity at order k:
/// `sum_r C(k,r) P_(k-r) Q_r - [k = 0] I`. Zero on all valid jet orders.
pub fn check_orthogonality(p: &PqTable, q: &PqTable, k: usize) -> Result<JetMatrix> {
    let n = p.dim();
    let base = p.level(0)?.base().clone();
    let backend = p.level(0)?.backend();
    let mut acc = JetMatrix::zero(n, p.level(0)?.order(), base.clone());
    for r in 0..=k {
        let term = p.level(k - r)?.mul(q.level(r)?)?;
        acc = acc.add(&term.scale(&binomial_scalar(k, r, backend))?)?;
    }
    if k == 0 {
        let id = JetMatrix::identity(n, acc.order(), base);
        acc = acc.sub(&id)?;
    }
    Ok(acc)
}

/// Residual of the derivative-expansion identities: the k-th derivative of
/// level l minus its expansion in table products,
/// `d^k P_l = sum_i C(k,i) Q_i P_(l+k-i)` for the PQ variant and
/// `d^k Q_l = sum_i C(k,i) Q_(l+k-i) P_i` for the QP variant.
pub fn check_derivative_expansion(
    p: &PqTable,
    q: &PqTable,
    l: usize,
    k: usize,
    variant: ExpansionVariant,
) -> Result<JetMatrix> {
    let backend = p.level(0)?.backend();
    let mut lhs = match variant {
        ExpansionVariant::PQ => p.level(l)?.clone(),
        ExpansionVariant::QP => q.level(l)?.clone(),
    };
    for _ in 0..k {
        lhs = lhs.diff()?;
    }
    let n = p.dim();
    let base = p.level(0)?.base().clone();
    let mut rhs = JetMatrix::zero(n, lhs.order(), base);
    for i in 0..=k {
        let term = match variant {
            ExpansionVariant::PQ => q.level(i)?.mul(p.level(l + k - i)?)?,
            ExpansionVariant::QP => q.level(l + k - i)?.mul(p.level(i)?)?,
        };
        rhs = rhs.add(&term.scale(&binomial_scalar(k, i, backend))?)?;
    }
    lhs.sub(&rhs)
}

/// Residual of the chart transformation law at level l. The primed table
/// is rebuilt from first principles: transformed connection, pushed-forward
/// curve, and the recursion run in the primed chart. For the P law the
/// right side is `sum_p C(l,p) Jinv P'_p d^(l-p)(Jfwd)`; for the Q law it
/// is `sum_p C(l,p) d^(l-p)(Jinv) Q'_p Jfwd`.
pub fn check_transformation_law(scene: &Scene, l: usize, kind: PqKind) -> Result<JetMatrix> {
    let transition = scene.transition.as_ref().ok_or_else(|| {
        Error::manifest("transition", "transformation-law check needs a transition")
    })?;
    let table = PqTable::build(kind, scene, l)?;
    let lhs = table.level(l)?;

    let conn_primed = transform_connection(transition, &scene.connection)?;
    let curve_primed = pushforward_curve(transition, &scene.curve)?;
    let level1_primed = conn_primed.level1_along(&curve_primed)?;
    let primed = PqTable::from_level1(kind, level1_primed, l)?;

    let j_fwd = jacobian_along_curve(transition, &scene.curve, JacobianDirection::Forward)?;
    let j_inv = jacobian_along_curve(transition, &scene.curve, JacobianDirection::Inverse)?;

    let n = scene.dim();
    let backend = scene.backend;
    let mut rhs = JetMatrix::zero(n, lhs.order(), scene.base_point.clone());
    for p_idx in 0..=l {
        let weight = binomial_scalar(l, p_idx, backend);
        let term = match kind {
            PqKind::P => {
                let mut d_fwd = j_fwd.clone();
                for _ in 0..(l - p_idx) {
                    d_fwd = d_fwd.diff()?;
                }
                j_inv.mul(primed.level(p_idx)?)?.mul(&d_fwd)?
            }
            PqKind::Q => {
                let mut d_inv = j_inv.clone();
                for _ in 0..(l - p_idx) {
                    d_inv = d_inv.diff()?;
                }
                d_inv.mul(primed.level(p_idx)?)?.mul(&j_fwd)?
            }
        };
        rhs = rhs.add(&term.scale(&weight)?)?;
    }
    lhs.sub(&rhs)
}
