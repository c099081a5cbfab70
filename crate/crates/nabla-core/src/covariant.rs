//! The k-th covariant derivative along the curve: closed multinomial
//! formula over P/Q table levels, plus the independent oracle that folds
//! the single covariant derivative k times.

use crate::comb::multinomial;
use crate::error::{Error, Result};
use crate::geometry::TensorFieldJet;
use crate::jet::JetMatrix;
use crate::pq::PqTable;
use crate::scalar::Scalar;

/// One term index of the multinomial formula: upper-slot orders `m`,
/// lower-slot orders `l`, with `a = sum(m) + sum(l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionIndex {
    pub m: Vec<usize>,
    pub l: Vec<usize>,
}

impl CompositionIndex {
    pub fn total(&self) -> usize {
        self.m.iter().sum::<usize>() + self.l.iter().sum::<usize>()
    }

    fn parts(&self) -> Vec<usize> {
        self.m.iter().chain(&self.l).copied().collect()
    }
}

/// All `(p + q)`-tuples of nonnegative integers with sum `a`, in
/// lexicographic order. With zero slots the only case is the empty tuple
/// at `a = 0`.
pub fn enumerate_compositions(p: usize, q: usize, a: usize) -> Vec<CompositionIndex> {
    let slots = p + q;
    let mut out = Vec::new();
    if slots == 0 {
        if a == 0 {
            out.push(CompositionIndex { m: vec![], l: vec![] });
        }
        return out;
    }
    let mut current = vec![0usize; slots];
    fill(&mut out, &mut current, 0, a, p);
    out
}

fn fill(
    out: &mut Vec<CompositionIndex>,
    current: &mut Vec<usize>,
    slot: usize,
    remaining: usize,
    p: usize,
) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(CompositionIndex {
            m: current[..p].to_vec(),
            l: current[p..].to_vec(),
        });
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        fill(out, current, slot + 1, remaining - v, p);
    }
}

/// The single covariant derivative along the curve:
/// `dA/ds + sum over upper slots of P_1 applied - sum over lower slots of
/// P_1 applied` (the lower-slot sign is carried by using `-P_1 = Q_1`).
/// Spends one jet order.
pub fn covariant_derivative_once(
    a: &TensorFieldJet,
    level1: &JetMatrix,
) -> Result<TensorFieldJet> {
    let (p, q) = a.valence();
    let mut out = a.diff()?;
    for t in 0..p {
        out = out.add(&a.apply_upper(t, level1)?)?;
    }
    for s in 0..q {
        out = out.sub(&a.apply_lower(s, level1)?)?;
    }
    Ok(out)
}

/// `covariant_derivative_once` folded k times; touches only level 1, so it
/// is an independent oracle for the closed formula.
pub fn iterate_covariant_oracle(
    a: &TensorFieldJet,
    level1: &JetMatrix,
    k: usize,
) -> Result<TensorFieldJet> {
    let mut acc = a.clone();
    for _ in 0..k {
        acc = covariant_derivative_once(&acc, level1)?;
    }
    Ok(acc)
}

/// The closed formula for the k-th covariant derivative: over all
/// `a <= k` and all slot-order compositions, apply `P_(m_t)` to each upper
/// slot and `Q_(l_s)` to each lower slot of `d^(k-a)A/ds^(k-a)`, weighted
/// by `k! / ((k-a)! prod m! prod l!)`.
pub fn covariant_derivative_k(
    a: &TensorFieldJet,
    p_table: &PqTable,
    q_table: &PqTable,
    k: usize,
) -> Result<TensorFieldJet> {
    if a.order() < k {
        return Err(Error::OrderExhausted {
            needed: k,
            available: a.order(),
        });
    }
    let (p, q) = a.valence();
    let backend = a.backend();
    let out_order = a.order() - k;
    let mut out = TensorFieldJet::zero(a.dim(), p, q, out_order, a.base().clone());

    for total in 0..=k {
        // d^(k-total) A, shared by every composition of this total order.
        let mut derivative = a.clone();
        for _ in 0..(k - total) {
            derivative = derivative.diff()?;
        }
        for comp in enumerate_compositions(p, q, total) {
            let weight = multinomial(k, &comp.parts())?;
            let mut term = derivative.clone();
            for (t, &m_t) in comp.m.iter().enumerate() {
                if m_t > 0 {
                    term = term.apply_upper(t, p_table.level(m_t)?)?;
                }
            }
            for (s, &l_s) in comp.l.iter().enumerate() {
                if l_s > 0 {
                    term = term.apply_lower(s, q_table.level(l_s)?)?;
                }
            }
            let term = term.scale(&Scalar::from_bigint(&weight, backend))?;
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Connection, Curve, Scene};
    use crate::jet::Jet;
    use crate::poly::MultiPoly;
    use crate::pq::PqKind;
    use crate::scalar::Backend;

    fn r(n: i64) -> Scalar {
        Scalar::from_i64(n, Backend::Rational)
    }

    fn unit_scene(order: usize) -> Scene {
        let mut conn = Connection::flat(1, Backend::Rational);
        conn.set_gamma(0, 0, 0, MultiPoly::constant(1, r(1))).unwrap();
        Scene {
            connection: conn,
            curve: Curve::new(vec![Jet::variable(order, r(0))]).unwrap(),
            field: None,
            transition: None,
            order,
            backend: Backend::Rational,
            base_point: r(0),
        }
    }

    #[test]
    fn composition_enumeration_matches_stars_and_bars() {
        let got = enumerate_compositions(1, 1, 2);
        let want = vec![
            CompositionIndex { m: vec![0], l: vec![2] },
            CompositionIndex { m: vec![1], l: vec![1] },
            CompositionIndex { m: vec![2], l: vec![0] },
        ];
        assert_eq!(got, want);
        assert_eq!(enumerate_compositions(1, 0, 3).len(), 1);
        assert_eq!(enumerate_compositions(0, 0, 0).len(), 1);
        assert_eq!(enumerate_compositions(0, 0, 2).len(), 0);
        // count = C(a + slots - 1, a)
        for (p, q, a, want) in [(2usize, 1usize, 3usize, 10usize), (2, 2, 4, 35), (1, 2, 5, 21)] {
            assert_eq!(enumerate_compositions(p, q, a).len(), want, "({p},{q},{a})");
        }
    }

    #[test]
    fn single_derivative_hand_case() {
        // dim 1, gamma = 1, x = s, A^1 = s: dA/ds + P1 A = 1 + s.
        let scene = unit_scene(4);
        let level1 = scene.connection.level1_along(&scene.curve).unwrap();
        let a = TensorFieldJet::from_components(1, 1, 0, vec![Jet::variable(4, r(0))]).unwrap();
        let got = covariant_derivative_once(&a, &level1).unwrap();
        assert_eq!(got.get(&[0]).coeffs(), &[r(1), r(1), r(0), r(0)]);
    }

    #[test]
    fn scalar_field_reduces_to_plain_derivatives() {
        let scene = unit_scene(6);
        let p = PqTable::build(PqKind::P, &scene, 4).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 4).unwrap();
        // f = s^3 as a (0,0) tensor.
        let s = Jet::variable(6, r(0));
        let f = TensorFieldJet::from_components(1, 0, 0, vec![s.mul(&s).unwrap().mul(&s).unwrap()])
            .unwrap();
        let got = covariant_derivative_k(&f, &p, &q, 3).unwrap();
        assert_eq!(got.get(&[]).coeffs(), &[r(6), r(0), r(0), r(0)]);
    }

    #[test]
    fn theorem_formula_hand_case() {
        // dim 1, gamma = 1, x = s, A^1 = s, k = 2: terms 0 + 2*1*1 + 1*s = s + 2.
        let scene = unit_scene(5);
        let p = PqTable::build(PqKind::P, &scene, 2).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 2).unwrap();
        let a = TensorFieldJet::from_components(1, 1, 0, vec![Jet::variable(5, r(0))]).unwrap();
        let got = covariant_derivative_k(&a, &p, &q, 2).unwrap();
        assert_eq!(got.get(&[0]).coeffs(), &[r(2), r(1), r(0), r(0)]);
    }

    #[test]
    fn zeroth_derivative_is_identity() {
        let scene = unit_scene(4);
        let p = PqTable::build(PqKind::P, &scene, 0).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 0).unwrap();
        let a = TensorFieldJet::from_components(1, 0, 1, vec![Jet::variable(4, r(0))]).unwrap();
        let got = covariant_derivative_k(&a, &p, &q, 0).unwrap();
        assert_eq!(&got, &a);
    }

    #[test]
    fn closed_formula_matches_iterated_oracle() {
        // Nontrivial dim-2 scene, (1,1) tensor, k up to 3.
        let be = Backend::Rational;
        let x = MultiPoly::variable(2, 0, be);
        let y = MultiPoly::variable(2, 1, be);
        let mut conn = Connection::flat(2, be);
        conn.set_gamma(0, 0, 0, x.clone()).unwrap();
        conn.set_gamma(0, 1, 0, MultiPoly::constant(2, r(2))).unwrap();
        conn.set_gamma(1, 0, 1, y.clone()).unwrap();
        conn.set_gamma(1, 1, 1, x.mul(&y).unwrap()).unwrap();
        let order = 8;
        let s = Jet::variable(order, r(0));
        let curve = Curve::new(vec![s.clone(), s.mul(&s).unwrap()]).unwrap();
        let level1 = conn.level1_along(&curve).unwrap();
        let scene = Scene {
            connection: conn,
            curve,
            field: None,
            transition: None,
            order,
            backend: be,
            base_point: r(0),
        };
        let p = PqTable::build(PqKind::P, &scene, 3).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 3).unwrap();

        let mut comp = Vec::new();
        for i in 0..4i64 {
            let c = Jet::variable(order, r(0)).scale(&r(i + 1)).unwrap();
            comp.push(c.add(&Jet::constant(r(i), order, r(0)).unwrap()).unwrap());
        }
        let a = TensorFieldJet::from_components(2, 1, 1, comp).unwrap();

        for k in 0..=3usize {
            let closed = covariant_derivative_k(&a, &p, &q, k).unwrap();
            let oracle = iterate_covariant_oracle(&a, &level1, k).unwrap();
            let ord = closed.order().min(oracle.order());
            assert_eq!(closed.truncate(ord), oracle.truncate(ord), "k = {k}");
        }
    }

    #[test]
    fn linearity() {
        let scene = unit_scene(6);
        let p = PqTable::build(PqKind::P, &scene, 2).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 2).unwrap();
        let s = Jet::variable(6, r(0));
        let a = TensorFieldJet::from_components(1, 1, 0, vec![s.clone()]).unwrap();
        let b = TensorFieldJet::from_components(1, 1, 0, vec![s.mul(&s).unwrap()]).unwrap();
        let combo = a.scale(&r(3)).unwrap().add(&b.scale(&r(-2)).unwrap()).unwrap();
        let lhs = covariant_derivative_k(&combo, &p, &q, 2).unwrap();
        let rhs = covariant_derivative_k(&a, &p, &q, 2)
            .unwrap()
            .scale(&r(3))
            .unwrap()
            .add(&covariant_derivative_k(&b, &p, &q, 2).unwrap().scale(&r(-2)).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_exhaustion_reported() {
        let scene = unit_scene(2);
        let p = PqTable::build(PqKind::P, &scene, 2).unwrap();
        let q = PqTable::build(PqKind::Q, &scene, 2).unwrap();
        let a = TensorFieldJet::from_components(1, 1, 0, vec![Jet::variable(2, r(0))]).unwrap();
        assert_eq!(
            covariant_derivative_k(&a, &p, &q, 3).err(),
            Some(Error::OrderExhausted {
                needed: 3,
                available: 2
            })
        );
    }
}
