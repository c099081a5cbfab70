//! The geometric scene: connection, curve, tensor field along the curve,
//! and optional chart transitions.

use crate::error::{Error, Result};
use crate::jet::{Jet, JetMatrix};
use crate::poly::MultiPoly;
use crate::scalar::{require_same_backend, Backend, Scalar};

/// Affine connection with polynomial Christoffel symbols
/// `gamma(i, j, l)` in the `dim` coordinates. No symmetry in `(j, l)`
/// is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    backend: Backend,
    gamma: Vec<MultiPoly>, // (i*dim + j)*dim + l
}

impl Connection {
    pub fn flat(dim: usize, backend: Backend) -> Connection {
        Connection {
            dim,
            backend,
            gamma: vec![MultiPoly::zero(dim, backend); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn gamma(&self, i: usize, j: usize, l: usize) -> &MultiPoly {
        &self.gamma[(i * self.dim + j) * self.dim + l]
    }

    pub fn set_gamma(&mut self, i: usize, j: usize, l: usize, poly: MultiPoly) -> Result<()> {
        require_same_backend(poly.backend(), self.backend)?;
        if poly.arity() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                got: poly.arity(),
            });
        }
        self.gamma[(i * self.dim + j) * self.dim + l] = poly;
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(MultiPoly::is_zero)
    }

    pub fn max_degree(&self) -> usize {
        self.gamma.iter().map(MultiPoly::total_degree).max().unwrap_or(0)
    }

    /// Level-1 symbol matrix along the curve: entry `(i, j)` is the jet of
    /// `sum_l gamma(i, j, l)(x(s)) * dx^l/ds`. One jet order is spent on
    /// the velocity.
    pub fn level1_along(&self, curve: &Curve) -> Result<JetMatrix> {
        if curve.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                location: "connection vs curve".into(),
                expected: self.dim,
                got: curve.dim(),
            });
        }
        let velocity = curve.velocity()?;
        let order = curve.order() - 1;
        let base = curve.base().clone();
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Jet::zero(order, base.clone());
                for (l, vel) in velocity.iter().enumerate() {
                    let g = self.gamma(i, j, l);
                    if g.is_zero() {
                        continue;
                    }
                    let g_jet = g.eval_jets(curve.coords())?;
                    acc = acc.add(&g_jet.mul(vel)?)?;
                }
                entries.push(acc);
            }
        }
        JetMatrix::from_entries(self.dim, entries)
    }
}

/// Curve on the manifold, one coordinate jet per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coords: Vec<Jet>,
}

impl Curve {
    pub fn new(coords: Vec<Jet>) -> Result<Curve> {
        if coords.is_empty() {
            return Err(Error::Parse("curve needs at least one coordinate".into()));
        }
        let first = &coords[0];
        for c in &coords[1..] {
            require_same_backend(c.backend(), first.backend())?;
            if c.base() != first.base() {
                return Err(Error::BasePointMismatch);
            }
            if c.order() != first.order() {
                return Err(Error::OrderExhausted {
                    needed: first.order(),
                    available: c.order(),
                });
            }
        }
        Ok(Curve { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn order(&self) -> usize {
        self.coords[0].order()
    }

    pub fn backend(&self) -> Backend {
        self.coords[0].backend()
    }

    pub fn base(&self) -> &Scalar {
        self.coords[0].base()
    }

    pub fn coords(&self) -> &[Jet] {
        &self.coords
    }

    pub fn velocity(&self) -> Result<Vec<Jet>> {
        self.coords.iter().map(Jet::diff).collect()
    }
}

/// Tensor field of type `(p, q)` along the curve, components as jets in
/// the curve parameter. Dense storage over all `dim^(p+q)` index tuples,
/// upper indices first.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFieldJet {
    dim: usize,
    p: usize,
    q: usize,
    comp: Vec<Jet>,
}

impl TensorFieldJet {
    pub fn zero(dim: usize, p: usize, q: usize, order: usize, base: Scalar) -> TensorFieldJet {
        let count = dim.pow((p + q) as u32);
        TensorFieldJet {
            dim,
            p,
            q,
            comp: vec![Jet::zero(order, base); count],
        }
    }

    pub fn from_components(dim: usize, p: usize, q: usize, comp: Vec<Jet>) -> Result<TensorFieldJet> {
        let count = dim.pow((p + q) as u32);
        if comp.len() != count {
            return Err(Error::DimensionMismatch {
                location: "tensor components".into(),
                expected: count,
                got: comp.len(),
            });
        }
        let first = &comp[0];
        for c in &comp[1..] {
            require_same_backend(c.backend(), first.backend())?;
            if c.base() != first.base() {
                return Err(Error::BasePointMismatch);
            }
            if c.order() != first.order() {
                return Err(Error::OrderExhausted {
                    needed: first.order(),
                    available: c.order(),
                });
            }
        }
        Ok(TensorFieldJet { dim, p, q, comp })
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

    pub fn order(&self) -> usize {
        self.comp[0].order()
    }

    pub fn backend(&self) -> Backend {
        self.comp[0].backend()
    }

    pub fn base(&self) -> &Scalar {
        self.comp[0].base()
    }

    pub fn components(&self) -> &[Jet] {
        &self.comp
    }

    /// Flat offset of a multi-index (upper indices first).
    pub fn flat_index(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.rank());
        indices.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Inverse of `flat_index`.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let rank = self.rank();
        let mut out = vec![0; rank];
        for slot in (0..rank).rev() {
            out[slot] = flat % self.dim;
            flat /= self.dim;
        }
        out
    }

    pub fn get(&self, indices: &[usize]) -> &Jet {
        &self.comp[self.flat_index(indices)]
    }

    pub fn set(&mut self, indices: &[usize], jet: Jet) {
        let at = self.flat_index(indices);
        self.comp[at] = jet;
    }

    pub fn add(&self, other: &TensorFieldJet) -> Result<TensorFieldJet> {
        self.check_shape(other)?;
        let comp = self
            .comp
            .iter()
            .zip(&other.comp)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorFieldJet { comp, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &TensorFieldJet) -> Result<TensorFieldJet> {
        self.check_shape(other)?;
        let comp = self
            .comp
            .iter()
            .zip(&other.comp)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorFieldJet { comp, ..self.clone_shape() })
    }

    pub fn scale(&self, factor: &Scalar) -> Result<TensorFieldJet> {
        let comp = self
            .comp
            .iter()
            .map(|c| c.scale(factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorFieldJet { comp, ..self.clone_shape() })
    }

    /// Componentwise derivative in the curve parameter.
    pub fn diff(&self) -> Result<TensorFieldJet> {
        let comp = self.comp.iter().map(Jet::diff).collect::<Result<Vec<_>>>()?;
        Ok(TensorFieldJet { comp, ..self.clone_shape() })
    }

    pub fn truncate(&self, order: usize) -> TensorFieldJet {
        TensorFieldJet {
            comp: self.comp.iter().map(|c| c.truncate(order)).collect(),
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> TensorFieldJet {
        TensorFieldJet {
            dim: self.dim,
            p: self.p,
            q: self.q,
            comp: Vec::new(),
        }
    }

    fn check_shape(&self, other: &TensorFieldJet) -> Result<()> {
        if self.dim != other.dim || self.p != other.p || self.q != other.q {
            return Err(Error::DimensionMismatch {
                location: "tensor shapes".into(),
                expected: self.comp.len(),
                got: other.comp.len(),
            });
        }
        Ok(())
    }

    /// Applies `m` to the upper slot `slot`:
    /// `new[.., a, ..] = sum_u m[a][u] * old[.., u, ..]`.
    pub fn apply_upper(&self, slot: usize, m: &JetMatrix) -> Result<TensorFieldJet> {
        assert!(slot < self.p, "upper slot out of range");
        self.apply_at(slot, m, false)
    }

    /// Applies `m` to the lower slot `slot` with the transformation-law
    /// index placement: `new[.., b, ..] = sum_v m[v][b] * old[.., v, ..]`.
    pub fn apply_lower(&self, slot: usize, m: &JetMatrix) -> Result<TensorFieldJet> {
        assert!(slot < self.q, "lower slot out of range");
        self.apply_at(self.p + slot, m, true)
    }

    fn apply_at(&self, pos: usize, m: &JetMatrix, transposed: bool) -> Result<TensorFieldJet> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                location: "slot application".into(),
                expected: self.dim,
                got: m.dim(),
            });
        }
        let order = self.order().min(m.order());
        let base = self.base().clone();
        let mut out = TensorFieldJet::zero(self.dim, self.p, self.q, order, base.clone());
        for flat in 0..out.comp.len() {
            let mut idx = out.unflatten(flat);
            let new_i = idx[pos];
            let mut acc = Jet::zero(order, base.clone());
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

    /// Contracts upper slot `u_slot` against lower slot `l_slot`.
    pub fn contract(&self, u_slot: usize, l_slot: usize) -> Result<TensorFieldJet> {
        assert!(u_slot < self.p && l_slot < self.q, "contraction slots out of range");
        let mut out = TensorFieldJet::zero(
            self.dim,
            self.p - 1,
            self.q - 1,
            self.order(),
            self.base().clone(),
        );
        let l_pos = self.p + l_slot;
        for flat in 0..out.comp.len() {
            let small = out.unflatten(flat);
            // Rebuild the full index with the two contracted slots inserted.
            let mut full = Vec::with_capacity(self.rank());
            let mut it = small.iter();
            for pos in 0..self.rank() {
                if pos == u_slot || pos == l_pos {
                    full.push(0);
                } else {
                    full.push(*it.next().expect("index arity"));
                }
            }
            let mut acc = Jet::zero(self.order(), self.base().clone());
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
        self.comp.iter().all(Jet::is_zero)
    }

    pub fn max_abs_coeff(&self) -> Scalar {
        let mut best = Scalar::zero(self.backend());
        for c in &self.comp {
            let a = c.max_abs_coeff();
            if a.partial_cmp(&best) == Some(std::cmp::Ordering::Greater) {
                best = a;
            }
        }
        best
    }
}

/// Polynomial chart change with an explicitly supplied polynomial inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartTransition {
    dim: usize,
    forward: Vec<MultiPoly>,
    inverse: Vec<MultiPoly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianDirection {
    Forward,
    Inverse,
}

impl ChartTransition {
    pub fn new(forward: Vec<MultiPoly>, inverse: Vec<MultiPoly>) -> Result<ChartTransition> {
        let dim = forward.len();
        if dim == 0 || inverse.len() != dim {
            return Err(Error::DimensionMismatch {
                location: "chart transition maps".into(),
                expected: dim,
                got: inverse.len(),
            });
        }
        for m in forward.iter().chain(&inverse) {
            if m.arity() != dim {
                return Err(Error::ArityMismatch {
                    expected: dim,
                    got: m.arity(),
                });
            }
            require_same_backend(m.backend(), forward[0].backend())?;
        }
        Ok(ChartTransition { dim, forward, inverse })
    }

    pub fn identity(dim: usize, backend: Backend) -> ChartTransition {
        let vars: Vec<MultiPoly> = (0..dim)
            .map(|v| MultiPoly::variable(dim, v, backend))
            .collect();
        ChartTransition {
            dim,
            forward: vars.clone(),
            inverse: vars,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.forward[0].backend()
    }

    pub fn forward(&self) -> &[MultiPoly] {
        &self.forward
    }

    pub fn inverse(&self) -> &[MultiPoly] {
        &self.inverse
    }

    /// True when forward and inverse compose to the identity exactly, as
    /// polynomials, in both directions.
    pub fn is_exact_inverse_pair(&self) -> Result<bool> {
        for i in 0..self.dim {
            let var = MultiPoly::variable(self.dim, i, self.backend());
            if self.inverse[i].compose(&self.forward)? != var
                || self.forward[i].compose(&self.inverse)? != var
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Validates that inverse(forward(x(s))) reproduces the curve's
    /// coordinate jets exactly, up to the truncation order.
    pub fn validate_along(&self, curve: &Curve) -> Result<()> {
        if curve.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                location: "transition vs curve".into(),
                expected: self.dim,
                got: curve.dim(),
            });
        }
        let pushed = pushforward_curve(self, curve)?;
        for (j, coord) in curve.coords().iter().enumerate() {
            let back = self.inverse[j].eval_jets(pushed.coords())?;
            if &back != coord {
                return Err(Error::NonPolynomialTransform);
            }
        }
        Ok(())
    }
}

/// The curve expressed in the primed chart: `x'(s) = forward(x(s))`.
pub fn pushforward_curve(t: &ChartTransition, c: &Curve) -> Result<Curve> {
    if c.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            location: "pushforward".into(),
            expected: t.dim(),
            got: c.dim(),
        });
    }
    let coords = t
        .forward
        .iter()
        .map(|f| f.eval_jets(c.coords()))
        .collect::<Result<Vec<_>>>()?;
    Curve::new(coords)
}

/// Jacobian entries along the curve as jets: forward gives
/// `(q, r) = d x'^q / d x^r` along `x(s)`; inverse gives
/// `(j, i) = d x^j / d x'^i` along `x'(s)`.
pub fn jacobian_along_curve(
    t: &ChartTransition,
    c: &Curve,
    direction: JacobianDirection,
) -> Result<JetMatrix> {
    if c.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            location: "jacobian".into(),
            expected: t.dim(),
            got: c.dim(),
        });
    }
    let n = t.dim();
    let (maps, eval_curve) = match direction {
        JacobianDirection::Forward => (&t.forward, c.clone()),
        JacobianDirection::Inverse => (&t.inverse, pushforward_curve(t, c)?),
    };
    let mut entries = Vec::with_capacity(n * n);
    for map in maps {
        for col in 0..n {
            entries.push(map.partial(col).eval_jets(eval_curve.coords())?);
        }
    }
    JetMatrix::from_entries(n, entries)
}

/// Transformed Christoffel symbols, as polynomials in the primed
/// coordinates:
/// `G'^a_bc = (dx'^a/dx^i)(dx^j/dx'^b)(dx^k/dx'^c) G^i_jk + (dx'^a/dx^i)(d2x^i/dx'^b dx'^c)`.
///
/// Requires the transition to be an exact polynomial inverse pair; the
/// one-sided jet validation at load is not enough for this computation to
/// be meaningful.
pub fn transform_connection(t: &ChartTransition, conn: &Connection) -> Result<Connection> {
    if conn.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            location: "transform connection".into(),
            expected: t.dim(),
            got: conn.dim(),
        });
    }
    if !t.is_exact_inverse_pair()? {
        return Err(Error::NonPolynomialTransform);
    }
    let n = t.dim();
    let backend = conn.backend();

    // dx'^a/dx^i, composed with the inverse so it lives in primed coords.
    let mut fwd_jac = Vec::with_capacity(n * n);
    for a in 0..n {
        for i in 0..n {
            fwd_jac.push(t.forward[a].partial(i).compose(&t.inverse)?);
        }
    }
    // dx^j/dx'^b, already in primed coords.
    let mut inv_jac = Vec::with_capacity(n * n);
    for j in 0..n {
        for b in 0..n {
            inv_jac.push(t.inverse[j].partial(b));
        }
    }
    // Christoffel symbols pulled to primed coords.
    let mut gamma_primed_arg = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma_primed_arg.push(conn.gamma(i, j, k).compose(&t.inverse)?);
            }
        }
    }

    let mut out = Connection::flat(n, backend);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = MultiPoly::zero(n, backend);
                for i in 0..n {
                    let f_ai = &fwd_jac[a * n + i];
                    if f_ai.is_zero() {
                        continue;
                    }
                    // Connection term.
                    for j in 0..n {
                        let inv_jb = &inv_jac[j * n + b];
                        if inv_jb.is_zero() {
                            continue;
                        }
                        for k in 0..n {
                            let g = &gamma_primed_arg[(i * n + j) * n + k];
                            if g.is_zero() {
                                continue;
                            }
                            let inv_kc = &inv_jac[k * n + c];
                            if inv_kc.is_zero() {
                                continue;
                            }
                            acc = acc.add(&f_ai.mul(inv_jb)?.mul(inv_kc)?.mul(g)?)?;
                        }
                    }
                    // Inhomogeneous second-derivative term.
                    let second = t.inverse[i].partial(b).partial(c);
                    if !second.is_zero() {
                        acc = acc.add(&f_ai.mul(&second)?)?;
                    }
                }
                out.set_gamma(a, b, c, acc)?;
            }
        }
    }
    Ok(out)
}

/// Everything a computation needs: connection, curve, optional tensor
/// field and chart transition, plus the shared truncation order, backend,
/// and base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub connection: Connection,
    pub curve: Curve,
    pub field: Option<TensorFieldJet>,
    pub transition: Option<ChartTransition>,
    pub order: usize,
    pub backend: Backend,
    pub base_point: Scalar,
}

impl Scene {
    pub fn dim(&self) -> usize {
        self.curve.dim()
    }

    /// Cross-checks every invariant that ties the parts together.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.connection.dim() != n {
            return Err(Error::DimensionMismatch {
                location: "connection".into(),
                expected: n,
                got: self.connection.dim(),
            });
        }
        if self.curve.order() != self.order {
            return Err(Error::OrderExhausted {
                needed: self.order,
                available: self.curve.order(),
            });
        }
        require_same_backend(self.curve.backend(), self.backend)?;
        if self.curve.base() != &self.base_point {
            return Err(Error::BasePointMismatch);
        }
        if let Some(field) = &self.field {
            if field.dim() != n {
                return Err(Error::DimensionMismatch {
                    location: "field".into(),
                    expected: n,
                    got: field.dim(),
                });
            }
            require_same_backend(field.backend(), self.backend)?;
            if field.base() != &self.base_point {
                return Err(Error::BasePointMismatch);
            }
            if field.order() != self.order {
                return Err(Error::OrderExhausted {
                    needed: self.order,
                    available: field.order(),
                });
            }
        }
        if let Some(t) = &self.transition {
            require_same_backend(t.backend(), self.backend)?;
            t.validate_along(&self.curve)?;
        }
        Ok(())
    }
}
