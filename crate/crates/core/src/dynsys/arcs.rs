//! Finite unions of arcs on ℝ/ℤ with explicit endpoint ownership.
//!
//! A set is stored as a cyclic list of breakpoints. Each breakpoint records
//! whether the point itself belongs to the set (`at`) and whether the open
//! gap up to the next breakpoint does (`after`). The first breakpoint is
//! always the origin; every other breakpoint is genuine (membership changes
//! there). This form is canonical, so structural equality is set equality.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::fixed::{self, circ_dist};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Breakpoint {
    pos: u128,
    at: bool,
    after: bool,
}

/// A finite union of arcs, points, or the whole circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSet {
    bps: Vec<Breakpoint>,
}

/// One connected component of an [`ArcSet`], running counter-clockwise from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub a: u128,
    pub b: u128,
    pub left_closed: bool,
    pub right_closed: bool,
    /// Set for the whole circle, where `a == b` carries no information.
    pub full: bool,
}

impl Arc {
    /// Length in fixed-point units; the full circle reports `u128::MAX`.
    pub fn length_units(&self) -> u128 {
        if self.full {
            u128::MAX
        } else {
            self.b.wrapping_sub(self.a)
        }
    }

    pub fn is_point(&self) -> bool {
        !self.full && self.a == self.b
    }

    pub fn describe(&self) -> ArcDescription {
        ArcDescription {
            a: fixed::to_decimal(self.a),
            b: fixed::to_decimal(self.b),
            a_approx: fixed::to_f64(self.a),
            b_approx: fixed::to_f64(self.b),
            left_closed: self.left_closed,
            right_closed: self.right_closed,
            full: self.full,
        }
    }
}

/// Serializable arc: endpoints as exact decimals plus double approximations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDescription {
    pub a: String,
    pub b: String,
    pub a_approx: f64,
    pub b_approx: f64,
    pub left_closed: bool,
    pub right_closed: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub full: bool,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { bps: vec![Breakpoint { pos: 0, at: false, after: false }] }
    }

    pub fn full() -> Self {
        ArcSet { bps: vec![Breakpoint { pos: 0, at: true, after: true }] }
    }

    pub fn point(p: u128) -> Self {
        Self::arc(p, p, true, true)
    }

    /// The arc from `a` counter-clockwise to `b`. `a == b` gives a single point
    /// when both ends are closed and the empty set otherwise.
    pub fn arc(a: u128, b: u128, left_closed: bool, right_closed: bool) -> Self {
        let len = b.wrapping_sub(a);
        let base = if len == 0 {
            let at = left_closed && right_closed;
            ArcSet::normalized(vec![Breakpoint { pos: 0, at, after: false }])
        } else {
            ArcSet::normalized(vec![
                Breakpoint { pos: 0, at: left_closed, after: true },
                Breakpoint { pos: len, at: right_closed, after: false },
            ])
        };
        base.translate(a)
    }

    fn normalized(mut raw: Vec<Breakpoint>) -> Self {
        raw.sort_by_key(|b| b.pos);
        if raw.first().map(|b| b.pos) != Some(0) {
            let carry = raw.last().map(|b| b.after).unwrap_or(false);
            raw.insert(0, Breakpoint { pos: 0, at: carry, after: carry });
        }
        let mut out: Vec<Breakpoint> = Vec::with_capacity(raw.len());
        for bp in raw {
            if let Some(prev) = out.last() {
                if bp.at == prev.after && bp.after == prev.after {
                    continue;
                }
            }
            out.push(bp);
        }
        ArcSet { bps: out }
    }

    fn locate(&self, p: u128) -> (bool, bool) {
        // (membership of p, membership just after p)
        let idx = match self.bps.binary_search_by_key(&p, |b| b.pos) {
            Ok(i) => return (self.bps[i].at, self.bps[i].after),
            Err(i) => i - 1,
        };
        let a = self.bps[idx].after;
        (a, a)
    }

    fn before(&self, i: usize) -> bool {
        if i == 0 {
            self.bps.last().unwrap().after
        } else {
            self.bps[i - 1].after
        }
    }

    pub fn contains(&self, p: u128) -> bool {
        self.locate(p).0
    }

    pub fn is_empty(&self) -> bool {
        self.bps.iter().all(|b| !b.at && !b.after)
    }

    pub fn is_full(&self) -> bool {
        self.bps.iter().all(|b| b.at && b.after)
    }

    fn combine(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        let mut positions: Vec<u128> = self.bps.iter().chain(other.bps.iter()).map(|b| b.pos).collect();
        positions.sort_unstable();
        positions.dedup();
        let raw = positions
            .into_iter()
            .map(|pos| {
                let (a_at, a_after) = self.locate(pos);
                let (b_at, b_after) = other.locate(pos);
                Breakpoint { pos, at: f(a_at, b_at), after: f(a_after, b_after) }
            })
            .collect();
        ArcSet::normalized(raw)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        ArcSet::normalized(
            self.bps.iter().map(|b| Breakpoint { pos: b.pos, at: !b.at, after: !b.after }).collect(),
        )
    }

    pub fn closure(&self) -> Self {
        let raw = (0..self.bps.len())
            .map(|i| {
                let b = self.bps[i];
                Breakpoint { pos: b.pos, at: b.at || b.after || self.before(i), after: b.after }
            })
            .collect();
        ArcSet::normalized(raw)
    }

    pub fn interior(&self) -> Self {
        let raw = (0..self.bps.len())
            .map(|i| {
                let b = self.bps[i];
                Breakpoint { pos: b.pos, at: b.at && b.after && self.before(i), after: b.after }
            })
            .collect();
        ArcSet::normalized(raw)
    }

    /// Rotation by `t` (wrapping addition of every breakpoint).
    pub fn translate(&self, t: u128) -> Self {
        if t == 0 {
            return self.clone();
        }
        let raw = self
            .bps
            .iter()
            .map(|b| Breakpoint { pos: b.pos.wrapping_add(t), ..*b })
            .collect();
        ArcSet::normalized(raw)
    }

    /// Exact Lebesgue measure as a rational number.
    pub fn measure(&self) -> BigRational {
        let mut total = BigUint::zero();
        for (i, b) in self.bps.iter().enumerate() {
            if !b.after {
                continue;
            }
            let len = match self.bps.get(i + 1) {
                Some(next) => BigUint::from(next.pos - b.pos),
                None => (BigUint::from(1u8) << 128u32) - BigUint::from(b.pos),
            };
            total += len;
        }
        BigRational::new(total.into(), (BigUint::from(1u8) << 128u32).into())
    }

    /// Measure in fixed-point units, saturating at `u128::MAX` for full measure.
    pub fn measure_units(&self) -> u128 {
        let mut total: u128 = 0;
        for (i, b) in self.bps.iter().enumerate() {
            if !b.after {
                continue;
            }
            let len = match self.bps.get(i + 1) {
                Some(next) => next.pos - b.pos,
                None => 0u128.wrapping_sub(b.pos),
            };
            if len == 0 {
                return u128::MAX;
            }
            total = total.saturating_add(len);
        }
        total
    }

    /// Positions where membership actually changes.
    pub fn endpoints(&self) -> Vec<u128> {
        (0..self.bps.len())
            .filter(|&i| {
                let b = self.bps[i];
                !(b.at == b.after && b.after == self.before(i))
            })
            .map(|i| self.bps[i].pos)
            .collect()
    }

    /// Distance from `p` to the nearest genuine endpoint (`None` if there is none).
    pub fn endpoint_distance(&self, p: u128) -> Option<u128> {
        self.endpoints().into_iter().map(|e| circ_dist(e, p)).min()
    }

    /// Distance from `p` to the closure of the set (`None` for the empty set).
    pub fn distance_to(&self, p: u128) -> Option<u128> {
        if self.is_empty() {
            return None;
        }
        if self.closure().contains(p) {
            return Some(0);
        }
        self.endpoint_distance(p)
    }

    /// Connected components, counter-clockwise starting after the origin.
    pub fn components(&self) -> Vec<Arc> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.is_full() {
            return vec![Arc { a: 0, b: 0, left_closed: true, right_closed: true, full: true }];
        }
        // Items alternate point, gap, point, gap, ... Start right after an excluded item.
        let n = self.bps.len();
        let item_in = |k: usize| -> bool {
            let b = self.bps[(k / 2) % n];
            if k.is_multiple_of(2) {
                b.at
            } else {
                b.after
            }
        };
        let total = 2 * n;
        let start = (0..total).find(|&k| !item_in(k)).expect("not full");
        let mut out = Vec::new();
        let mut k = 1;
        while k <= total {
            let idx = (start + k) % total;
            if !item_in(idx) {
                k += 1;
                continue;
            }
            let first = idx;
            let mut last = idx;
            let mut j = k + 1;
            while j < total + 1 {
                let jdx = (start + j) % total;
                if !item_in(jdx) {
                    break;
                }
                last = jdx;
                j += 1;
            }
            let a_bp = self.bps[(first / 2) % n];
            let (a, left_closed) = if first.is_multiple_of(2) {
                (a_bp.pos, true)
            } else {
                (a_bp.pos, false)
            };
            let (b, right_closed) = if last.is_multiple_of(2) {
                (self.bps[(last / 2) % n].pos, true)
            } else {
                let next = self.bps[((last / 2) + 1) % n];
                (next.pos, false)
            };
            out.push(Arc { a, b, left_closed, right_closed, full: false });
            k = j;
        }
        out.sort_by_key(|arc| arc.a);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::fixed::{parse_decimal, to_f64};

    fn x(s: &str) -> u128 {
        parse_decimal(s).unwrap()
    }

    fn meas(s: &ArcSet) -> f64 {
        to_f64(s.measure_units())
    }

    #[test]
    fn closed_arcs_meet_in_a_point() {
        let a = ArcSet::arc(x("0"), x("0.5"), true, true);
        let b = ArcSet::arc(x("0.5"), 0, true, false);
        let i = a.intersect(&b);
        assert_eq!(i, ArcSet::point(x("0.5")));
        let comps = i.components();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].is_point());
    }

    #[test]
    fn closure_and_interior_flip_flags() {
        let a = ArcSet::arc(x("0.1"), x("0.2"), true, false);
        assert_eq!(a.closure(), ArcSet::arc(x("0.1"), x("0.2"), true, true));
        assert_eq!(a.interior(), ArcSet::arc(x("0.1"), x("0.2"), false, false));
    }

    #[test]
    fn measure_ignores_flags() {
        let s = ArcSet::arc(0, x("0.3"), true, false).union(&ArcSet::arc(x("0.6"), x("0.9"), true, false));
        assert!((meas(&s) - 0.6).abs() < 1e-15);
        assert_eq!(ArcSet::full().measure(), BigRational::from_integer(1.into()));
        let punctured = ArcSet::full().difference(&ArcSet::point(x("0.3")));
        assert_eq!(punctured.measure(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn wrapping_arc_components() {
        let s = ArcSet::arc(x("0.8"), x("0.1"), false, true);
        let comps = s.components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].a, x("0.8"));
        assert_eq!(comps[0].b, x("0.1"));
        assert!(!comps[0].left_closed && comps[0].right_closed);
        assert!(s.contains(0));
        assert!(!s.contains(x("0.8")));
    }

    #[test]
    fn translation_is_exact() {
        let s = ArcSet::arc(x("0.7"), x("0.95"), true, false);
        let t = x("0.6180339887498948482");
        assert_eq!(s.translate(t).translate(0u128.wrapping_sub(t)), s);
        assert_eq!(s.translate(t).measure(), s.measure());
    }

    #[test]
    fn complement_is_involutive() {
        let s = ArcSet::arc(x("0.2"), x("0.4"), true, false).union(&ArcSet::point(x("0.9")));
        assert_eq!(s.complement().complement(), s);
        assert!(s.union(&s.complement()).is_full());
    }

    #[test]
    fn distance_to_closed_set() {
        let s = ArcSet::arc(0, x("0.5"), true, true);
        assert_eq!(s.distance_to(x("0.25")), Some(0));
        let d = to_f64(s.distance_to(x("0.9")).unwrap());
        assert!((d - 0.1).abs() < 1e-15);
    }
}
