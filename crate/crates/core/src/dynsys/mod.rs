//! Minimal systems: irrational rotations of the circle and mixed-radix odometers.
//!
//! Everything geometric here is exact. Circle coordinates are 128-bit fixed
//! point and the rotation is wrapping addition; odometer regions are cylinder
//! sets acted on by modular addition. Approximation enters only when a point
//! is compared against an endpoint closer than the comparison tolerance.

pub mod arcs;
pub mod cylinders;
pub mod fixed;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use arcs::{Arc, ArcDescription, ArcSet};
pub use cylinders::{CylinderDescription, CylinderSet};

use crate::error::{Error, Result};

/// Default comparison tolerance `2^-80`, in fixed-point units.
pub const DEFAULT_EPS_CMP_BITS: u32 = 80;
pub const DEFAULT_MAX_RETURN: u32 = 10_000;
pub const DEFAULT_EPS_ALG: f64 = 1e-9;

/// Tolerances and iteration budget shared by every computation on a system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Geometric comparison tolerance in fixed-point units (`2^-bits`).
    pub eps_cmp: u128,
    /// Tolerance for matrix identities after rounding to double.
    pub eps_alg: f64,
    pub max_return: u32,
}

impl Tolerances {
    pub fn with_eps_cmp_bits(bits: u32) -> u128 {
        1u128 << (fixed::FRACTION_BITS - bits.clamp(1, fixed::FRACTION_BITS))
    }

    pub fn eps_cmp_f64(&self) -> f64 {
        fixed::to_f64(self.eps_cmp)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_cmp: Self::with_eps_cmp_bits(DEFAULT_EPS_CMP_BITS),
            eps_alg: DEFAULT_EPS_ALG,
            max_return: DEFAULT_MAX_RETURN,
        }
    }
}

/// JSON description of the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SystemConfig {
    Rotation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_cf: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision_bits: Option<u32>,
    },
    Odometer {
        radices: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dynamics {
    Rotation { theta: u128, precision_bits: u32 },
    /// `radices` is already expanded to `depth` entries.
    Odometer { radices: Vec<u32> },
}

/// A concrete minimal homeomorphism together with its tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub dynamics: Dynamics,
    pub tol: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Circle(u128),
    Odometer(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Arcs(ArcSet),
    Cylinders(CylinderSet),
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(2))?;
        match self {
            Point::Circle(x) => {
                map.serialize_entry("x", &fixed::to_decimal(*x))?;
                map.serialize_entry("x_approx", &fixed::to_f64(*x))?;
            }
            Point::Odometer(d) => {
                let shown = d.len().min(16);
                map.serialize_entry("digits", &d[..shown])?;
                map.serialize_entry("depth", &d.len())?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Intersect,
    Union,
    Difference,
}

/// Serializable region: arcs on the circle or digit prefixes on the odometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionDescription {
    Arcs(Vec<ArcDescription>),
    Cylinders(Vec<CylinderDescription>),
}

impl System {
    /// Rotation by `theta` (fixed point), rejecting rotation numbers with a
    /// period at most `max_return` up to the comparison tolerance.
    pub fn rotation(theta: u128, precision_bits: u32, tol: Tolerances) -> Result<Self> {
        if !(96..=fixed::FRACTION_BITS).contains(&precision_bits) {
            return Err(Error::Config(format!(
                "precision_bits must lie in 96..=128, got {precision_bits}"
            )));
        }
        let theta = fixed::round_to_bits(theta, precision_bits);
        if theta == 0 {
            return Err(Error::Config("theta must lie strictly inside (0,1)".into()));
        }
        let mut acc = 0u128;
        for n in 1..=tol.max_return {
            acc = acc.wrapping_add(theta);
            if fixed::circ_dist(acc, 0) <= tol.eps_cmp {
                return Err(Error::Config(format!(
                    "theta has period {n} within the comparison tolerance (horizon {})",
                    tol.max_return
                )));
            }
        }
        Ok(System { dynamics: Dynamics::Rotation { theta, precision_bits }, tol })
    }

    /// Rotation from a decimal string, skipping the periodicity screen.
    /// Used for small rational test rotations.
    pub fn rotation_unchecked(theta: u128, tol: Tolerances) -> Self {
        System { dynamics: Dynamics::Rotation { theta, precision_bits: 128 }, tol }
    }

    /// Odometer whose radices repeat cyclically out to `depth` digits.
    pub fn odometer(radices: &[u32], depth: usize, tol: Tolerances) -> Result<Self> {
        if radices.is_empty() || radices.iter().any(|&m| m < 2) {
            return Err(Error::Config("odometer radices must be integers >= 2".into()));
        }
        if depth == 0 {
            return Err(Error::Config("odometer depth must be positive".into()));
        }
        let expanded = (0..depth).map(|i| radices[i % radices.len()]).collect();
        Ok(System { dynamics: Dynamics::Odometer { radices: expanded }, tol })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.dynamics, Dynamics::Rotation { .. })
    }

    pub fn theta(&self) -> Option<u128> {
        match self.dynamics {
            Dynamics::Rotation { theta, .. } => Some(theta),
            Dynamics::Odometer { .. } => None,
        }
    }

    pub fn radices(&self) -> &[u32] {
        match &self.dynamics {
            Dynamics::Odometer { radices } => radices,
            Dynamics::Rotation { .. } => &[],
        }
    }

    pub fn depth(&self) -> usize {
        self.radices().len()
    }

    fn check_budget(&self, n: i64) -> Result<()> {
        let budget = 2 * self.tol.max_return as i64;
        if n.abs() > budget {
            return Err(Error::BudgetExceeded { requested: n, budget });
        }
        Ok(())
    }

    /// `α^n(p)`.
    pub fn apply(&self, p: &Point, n: i64) -> Result<Point> {
        self.check_budget(n)?;
        match (&self.dynamics, p) {
            (Dynamics::Rotation { theta, .. }, Point::Circle(x)) => {
                let step = theta.wrapping_mul(n.unsigned_abs() as u128);
                Ok(Point::Circle(if n >= 0 { x.wrapping_add(step) } else { x.wrapping_sub(step) }))
            }
            (Dynamics::Odometer { radices }, Point::Odometer(digits)) => {
                odometer_add(radices, digits, n).map(Point::Odometer)
            }
            _ => Err(Error::Precondition("point does not belong to this system".into())),
        }
    }

    /// `α^n(R)`.
    pub fn region_map(&self, r: &Region, n: i64) -> Result<Region> {
        self.check_budget(n)?;
        match (&self.dynamics, r) {
            (Dynamics::Rotation { theta, .. }, Region::Arcs(s)) => {
                let step = theta.wrapping_mul(n.unsigned_abs() as u128);
                Ok(Region::Arcs(s.translate(if n >= 0 { step } else { 0u128.wrapping_sub(step) })))
            }
            (Dynamics::Odometer { radices }, Region::Cylinders(c)) => {
                Ok(Region::Cylinders(c.shift(n, radices)?))
            }
            _ => Err(Error::Precondition("region does not belong to this system".into())),
        }
    }

    pub fn empty_region(&self) -> Region {
        match self.dynamics {
            Dynamics::Rotation { .. } => Region::Arcs(ArcSet::empty()),
            Dynamics::Odometer { .. } => Region::Cylinders(CylinderSet::empty()),
        }
    }

    pub fn full_region(&self) -> Region {
        match self.dynamics {
            Dynamics::Rotation { .. } => Region::Arcs(ArcSet::full()),
            Dynamics::Odometer { .. } => Region::Cylinders(CylinderSet::full()),
        }
    }

    pub fn region_boolean(&self, a: &Region, b: &Region, op: SetOp) -> Region {
        match (a, b) {
            (Region::Arcs(x), Region::Arcs(y)) => Region::Arcs(match op {
                SetOp::Intersect => x.intersect(y),
                SetOp::Union => x.union(y),
                SetOp::Difference => x.difference(y),
            }),
            (Region::Cylinders(x), Region::Cylinders(y)) => {
                let r = self.radices();
                Region::Cylinders(
                    match op {
                        SetOp::Intersect => x.intersect(y, r),
                        SetOp::Union => x.union(y, r),
                        SetOp::Difference => x.difference(y, r),
                    }
                    .expect("cylinder levels were validated at construction"),
                )
            }
            _ => panic!("regions from different systems"),
        }
    }

    pub fn intersect(&self, a: &Region, b: &Region) -> Region {
        self.region_boolean(a, b, SetOp::Intersect)
    }

    pub fn union(&self, a: &Region, b: &Region) -> Region {
        self.region_boolean(a, b, SetOp::Union)
    }

    pub fn difference(&self, a: &Region, b: &Region) -> Region {
        self.region_boolean(a, b, SetOp::Difference)
    }

    pub fn complement(&self, a: &Region) -> Region {
        self.difference(&self.full_region(), a)
    }

    pub fn closure(&self, a: &Region) -> Region {
        match a {
            Region::Arcs(s) => Region::Arcs(s.closure()),
            Region::Cylinders(_) => a.clone(),
        }
    }

    pub fn interior(&self, a: &Region) -> Region {
        match a {
            Region::Arcs(s) => Region::Arcs(s.interior()),
            Region::Cylinders(_) => a.clone(),
        }
    }

    pub fn measure(&self, a: &Region) -> BigRational {
        match a {
            Region::Arcs(s) => s.measure(),
            Region::Cylinders(c) => c.measure(self.radices()),
        }
    }

    pub fn measure_f64(&self, a: &Region) -> f64 {
        self.measure(a).to_f64().unwrap_or(f64::NAN)
    }

    /// Exact membership (endpoint flags decide boundary points).
    pub fn contains(&self, r: &Region, p: &Point) -> bool {
        match (r, p) {
            (Region::Arcs(s), Point::Circle(x)) => s.contains(*x),
            (Region::Cylinders(c), Point::Odometer(d)) => c.contains(self.radices(), d),
            _ => false,
        }
    }

    /// Membership decided only when `p` is farther than `eps` from every endpoint.
    pub fn membership(&self, r: &Region, p: &Point, eps: u128) -> Membership {
        match (r, p) {
            (Region::Arcs(s), Point::Circle(x)) => {
                if let Some(d) = s.endpoint_distance(*x) {
                    if d <= eps {
                        return Membership::Ambiguous;
                    }
                }
                if s.contains(*x) {
                    Membership::In
                } else {
                    Membership::Out
                }
            }
            (Region::Cylinders(c), Point::Odometer(d)) => {
                if c.contains(self.radices(), d) {
                    Membership::In
                } else {
                    Membership::Out
                }
            }
            _ => Membership::Out,
        }
    }

    /// Exact membership when `p` sits exactly on an endpoint or clearly away
    /// from all of them; `BoundaryAmbiguous` when it is within the comparison
    /// tolerance of an endpoint without coinciding with it.
    pub fn resolve(&self, r: &Region, p: &Point) -> Result<bool> {
        if let (Region::Arcs(s), Point::Circle(x)) = (r, p) {
            if let Some(d) = s.endpoint_distance(*x) {
                if d != 0 && d <= self.tol.eps_cmp {
                    return Err(Error::BoundaryAmbiguous {
                        context: format!("point {} is {:e} from an endpoint", fixed::to_decimal(*x), fixed::to_f64(d)),
                    });
                }
            }
        }
        Ok(self.contains(r, p))
    }

    /// Distance from `p` to the closure of `r`: arc length on the circle; on
    /// the odometer regions are clopen and the distance is 0 inside, 1 outside.
    pub fn distance_to(&self, r: &Region, p: &Point) -> f64 {
        match (r, p) {
            (Region::Arcs(s), Point::Circle(x)) => {
                s.distance_to(*x).map(fixed::to_f64).unwrap_or(f64::INFINITY)
            }
            (Region::Cylinders(c), Point::Odometer(d)) => {
                if c.contains(self.radices(), d) {
                    0.0
                } else {
                    1.0
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Real coordinate used by closed-form functions: the circle parameter in
    /// `[0,1)`, or `Σ d_i / (m_0 ... m_i)` on the odometer.
    pub fn coordinate(&self, p: &Point) -> f64 {
        match p {
            Point::Circle(x) => fixed::to_f64(*x),
            Point::Odometer(d) => {
                let mut scale = 1.0;
                let mut t = 0.0;
                for (digit, m) in d.iter().zip(self.radices()) {
                    scale /= *m as f64;
                    t += *digit as f64 * scale;
                    if scale < 1e-18 {
                        break;
                    }
                }
                t
            }
        }
    }

    pub fn describe(&self, r: &Region) -> RegionDescription {
        match r {
            Region::Arcs(s) => RegionDescription::Arcs(s.components().iter().map(Arc::describe).collect()),
            Region::Cylinders(c) => RegionDescription::Cylinders(c.describe(self.radices())),
        }
    }

    /// Genuine endpoints of a circle region (empty on the odometer).
    pub fn endpoints(&self, r: &Region) -> Vec<Point> {
        match r {
            Region::Arcs(s) => s.endpoints().into_iter().map(Point::Circle).collect(),
            Region::Cylinders(_) => Vec::new(),
        }
    }

    pub fn is_empty(&self, r: &Region) -> bool {
        match r {
            Region::Arcs(s) => s.is_empty(),
            Region::Cylinders(c) => c.is_empty(),
        }
    }

    /// Deterministic stratified sample of `count` points of `r`, each at
    /// distance more than the comparison tolerance from every endpoint.
    /// Odometer samples keep a zero guard in their last digit so that no
    /// budgeted iteration carries past the stored depth.
    pub fn sample(&self, r: &Region, count: usize, seed: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match r {
            Region::Arcs(s) => {
                let comps: Vec<Arc> = s.components().into_iter().filter(|c| !c.is_point()).collect();
                if comps.is_empty() {
                    return Err(Error::EmptyRegion);
                }
                let lengths: Vec<f64> = comps.iter().map(|c| fixed::to_f64(c.length_units()).max(0.0)).collect();
                let total: f64 = lengths.iter().sum();
                let full = comps.len() == 1 && comps[0].full;
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let mut placed = None;
                    for _attempt in 0..64 {
                        let u = (i as f64 + rng.random::<f64>()) / count as f64 * total;
                        let mut acc = 0.0;
                        let mut chosen = comps.len() - 1;
                        for (j, len) in lengths.iter().enumerate() {
                            if u < acc + len {
                                chosen = j;
                                break;
                            }
                            acc += len;
                        }
                        let offset = fixed::from_f64(((u - acc) / lengths[chosen]).clamp(0.0, 1.0 - 1e-17) * lengths[chosen]);
                        let x = comps[chosen].a.wrapping_add(offset);
                        let p = Point::Circle(x);
                        if full || self.membership(r, &p, self.tol.eps_cmp) == Membership::In {
                            placed = Some(p);
                            break;
                        }
                    }
                    if let Some(p) = placed {
                        out.push(p);
                    }
                }
                if out.is_empty() {
                    return Err(Error::EmptyRegion);
                }
                Ok(out)
            }
            Region::Cylinders(c) => {
                if c.is_empty() {
                    return Err(Error::EmptyRegion);
                }
                let radices = self.radices();
                let prefixes = c.prefixes(radices);
                let level = c.level();
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let u = (i as f64 + rng.random::<f64>()) / count as f64;
                    let idx = ((u * prefixes.len() as f64) as usize).min(prefixes.len() - 1);
                    let mut digits = prefixes[idx].clone();
                    for &m in &radices[level..] {
                        digits.push(rng.random_range(0..m));
                    }
                    if radices.len() > level {
                        *digits.last_mut().unwrap() = 0;
                    }
                    out.push(Point::Odometer(digits));
                }
                Ok(out)
            }
        }
    }

    /// Parses an arc list `[(a, b, left_closed, right_closed)]` given as decimals.
    pub fn arcs_from_decimals(&self, arcs: &[(String, String, bool, bool)]) -> Result<Region> {
        let mut set = ArcSet::empty();
        for (a, b, lc, rc) in arcs {
            let (a, b) = (fixed::parse_decimal(a)?, fixed::parse_decimal(b)?);
            let arc = if a == b && *lc && *rc && arcs.len() == 1 && set.is_empty() {
                ArcSet::point(a)
            } else {
                ArcSet::arc(a, b, *lc, *rc)
            };
            set = set.union(&arc);
        }
        Ok(Region::Arcs(set))
    }

    pub fn cylinders(&self, prefixes: &[Vec<u32>]) -> Result<Region> {
        let radices = self.radices();
        let mut set = CylinderSet::empty();
        for p in prefixes {
            set = set.union(&CylinderSet::cylinder(radices, p)?, radices)?;
        }
        Ok(Region::Cylinders(set))
    }
}

fn odometer_add(radices: &[u32], digits: &[u32], n: i64) -> Result<Vec<u32>> {
    let mut out = digits.to_vec();
    let mut carry = n.unsigned_abs();
    let negative = n < 0;
    for (d, &m) in out.iter_mut().zip(radices) {
        if carry == 0 {
            break;
        }
        let m = m as u64;
        if negative {
            let take = carry % m;
            let borrow = carry / m;
            let cur = *d as u64;
            if cur >= take {
                *d = (cur - take) as u32;
                carry = borrow;
            } else {
                *d = (cur + m - take) as u32;
                carry = borrow + 1;
            }
        } else {
            let s = *d as u64 + carry;
            *d = (s % m) as u32;
            carry = s / m;
        }
    }
    if carry != 0 {
        return Err(Error::DepthExhausted { depth: radices.len() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fixed::parse_decimal;

    fn quarter_rotation() -> System {
        System::rotation_unchecked(parse_decimal("0.25").unwrap(), Tolerances::default())
    }

    #[test]
    fn rational_rotation_steps() {
        let sys = quarter_rotation();
        let p = Point::Circle(parse_decimal("0.5").unwrap());
        assert_eq!(sys.apply(&p, 2).unwrap(), Point::Circle(0));
    }

    #[test]
    fn odometer_carries() {
        let sys = System::odometer(&[2, 3], 6, Tolerances::default()).unwrap();
        let p = Point::Odometer(vec![1, 2, 0, 1, 0, 0]);
        assert_eq!(sys.apply(&p, 1).unwrap(), Point::Odometer(vec![0, 0, 1, 1, 0, 0]));
        assert_eq!(sys.apply(&sys.apply(&p, 17).unwrap(), -17).unwrap(), p);
        let top = Point::Odometer(vec![1, 2, 1, 2, 1, 2]);
        assert_eq!(sys.apply(&top, 1), Err(Error::DepthExhausted { depth: 6 }));
    }

    #[test]
    fn budget_is_enforced() {
        let tol = Tolerances { max_return: 10, ..Tolerances::default() };
        let sys = System::rotation_unchecked(parse_decimal("0.25").unwrap(), tol);
        assert!(matches!(sys.apply(&Point::Circle(0), 21), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn translation_of_arcs() {
        let sys = quarter_rotation();
        let r = sys.arcs_from_decimals(&[("0".into(), "0.1".into(), true, true)]).unwrap();
        let img = sys.region_map(&r, 1).unwrap();
        let expect = sys.arcs_from_decimals(&[("0.25".into(), "0.35".into(), true, true)]).unwrap();
        assert_eq!(img, expect);
        assert_eq!(sys.region_map(&sys.full_region(), 5).unwrap(), sys.full_region());
    }

    #[test]
    fn odometer_region_shift_matches_point_enumeration() {
        let sys = System::odometer(&[2, 3], 2, Tolerances::default()).unwrap();
        let y = sys.cylinders(&[vec![0]]).unwrap();
        let img = sys.region_map(&y, 1).unwrap();
        // enumerate the six depth-2 points
        for d0 in 0..2 {
            for d1 in 0..3 {
                let p = Point::Odometer(vec![d0, d1]);
                if d0 == 1 && d1 == 2 {
                    continue; // carry leaves the stored digits
                }
                let q = sys.apply(&p, 1).unwrap();
                assert_eq!(sys.contains(&y, &p), sys.contains(&img, &q));
            }
        }
        assert_eq!(img, sys.cylinders(&[vec![1]]).unwrap());
    }

    #[test]
    fn membership_bands() {
        let sys = quarter_rotation();
        let r = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let eps = Tolerances::with_eps_cmp_bits(40);
        assert_eq!(sys.membership(&r, &Point::Circle(parse_decimal("0.25").unwrap()), eps), Membership::In);
        let near = parse_decimal("0.5").unwrap() + (1u128 << 60);
        assert_eq!(sys.membership(&r, &Point::Circle(near), eps), Membership::Ambiguous);
        let odo = System::odometer(&[2, 3], 4, Tolerances::default()).unwrap();
        let c = odo.cylinders(&[vec![0]]).unwrap();
        assert_eq!(odo.membership(&c, &Point::Odometer(vec![0, 2, 0, 0]), 0), Membership::In);
    }

    #[test]
    fn degenerate_intersection_and_measure() {
        let sys = quarter_rotation();
        let a = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let b = sys.arcs_from_decimals(&[("0.5".into(), "1".into(), true, false)]).unwrap();
        let i = sys.intersect(&a, &b);
        assert_eq!(i, Region::Arcs(ArcSet::point(parse_decimal("0.5").unwrap())));
        let u = sys.arcs_from_decimals(&[
            ("0".into(), "0.3".into(), true, false),
            ("0.6".into(), "0.9".into(), true, false),
        ]).unwrap();
        assert!((sys.measure_f64(&u) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sampling_contract() {
        let sys = quarter_rotation();
        let full = sys.full_region();
        let pts = sys.sample(&full, 4, 7).unwrap();
        assert_eq!(pts.len(), 4);
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert_eq!(sys.sample(&sys.empty_region(), 3, 1), Err(Error::EmptyRegion));
        let odo = System::odometer(&[2, 3], 8, Tolerances::default()).unwrap();
        let c = odo.cylinders(&[vec![1]]).unwrap();
        for p in odo.sample(&c, 3, 5).unwrap() {
            let Point::Odometer(d) = p else { unreachable!() };
            assert_eq!(d[0], 1);
        }
    }

    #[test]
    fn periodic_rotation_rejected() {
        let tol = Tolerances { max_return: 100, ..Tolerances::default() };
        assert!(System::rotation(parse_decimal("0.125").unwrap(), 128, tol).is_err());
        assert!(System::rotation(parse_decimal("0.6180339887498948482045868343656381177203").unwrap(), 128, tol).is_ok());
    }
}
