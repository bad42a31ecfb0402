//! Closed-form scalar functions on the base space.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::bundle::{smoothstep, LineBundle, C64};
use crate::dynsys::{fixed, Point, Region};
use crate::error::Result;

pub type PointFn = dyn Fn(&Point) -> Result<C64> + Send + Sync;

/// Expression tree for a complex-valued continuous function.
#[derive(Clone)]
pub enum ScalarFn {
    Const(C64),
    /// The real coordinate of the point.
    Coord,
    /// `exp(2πi (c + d t))`.
    Phase { c: f64, d: f64 },
    /// Partition-of-unity weight `γ_j`.
    Partition(usize),
    /// `γ_j^{1/2}`.
    SqrtPartition(usize),
    /// 0 on the closure of `region`, 1 at distance `≥ delta`, smoothstep between.
    Cutoff { region: Arc<Region>, delta: f64 },
    /// Smooth bump of height 1 at `center`, vanishing beyond `radius` (circle only).
    Bump { center: u128, radius: f64 },
    /// `f ∘ α^n`.
    Shift(i64, Arc<ScalarFn>),
    Add(Arc<ScalarFn>, Arc<ScalarFn>),
    Mul(Arc<ScalarFn>, Arc<ScalarFn>),
    Conj(Arc<ScalarFn>),
    Custom(Arc<PointFn>),
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Const(c) => write!(f, "Const({c})"),
            ScalarFn::Coord => write!(f, "Coord"),
            ScalarFn::Phase { c, d } => write!(f, "Phase({c}, {d})"),
            ScalarFn::Partition(j) => write!(f, "Partition({j})"),
            ScalarFn::SqrtPartition(j) => write!(f, "SqrtPartition({j})"),
            ScalarFn::Cutoff { delta, .. } => write!(f, "Cutoff(delta={delta})"),
            ScalarFn::Bump { center, radius } => write!(f, "Bump({}, {radius})", fixed::to_f64(*center)),
            ScalarFn::Shift(n, g) => write!(f, "Shift({n}, {g:?})"),
            ScalarFn::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            ScalarFn::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            ScalarFn::Conj(a) => write!(f, "conj({a:?})"),
            ScalarFn::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl ScalarFn {
    pub fn constant(re: f64) -> Self {
        ScalarFn::Const(C64::new(re, 0.0))
    }

    pub fn custom(f: impl Fn(&Point) -> Result<C64> + Send + Sync + 'static) -> Self {
        ScalarFn::Custom(Arc::new(f))
    }

    pub fn cutoff(region: Region, delta: f64) -> Self {
        ScalarFn::Cutoff { region: Arc::new(region), delta }
    }

    pub fn shift(self, n: i64) -> Self {
        if n == 0 {
            self
        } else {
            ScalarFn::Shift(n, Arc::new(self))
        }
    }

    pub fn conj(self) -> Self {
        ScalarFn::Conj(Arc::new(self))
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, ScalarFn::Const(c) if *c == C64::new(0.0, 0.0))
    }

    pub fn eval(&self, b: &LineBundle, p: &Point) -> Result<C64> {
        let sys = &b.system;
        Ok(match self {
            ScalarFn::Const(c) => *c,
            ScalarFn::Coord => C64::new(sys.coordinate(p), 0.0),
            ScalarFn::Phase { c, d } => C64::from_polar(1.0, TAU * (c + d * sys.coordinate(p))),
            ScalarFn::Partition(j) => C64::new(b.partition(*j, p), 0.0),
            ScalarFn::SqrtPartition(j) => C64::new(b.partition(*j, p).sqrt(), 0.0),
            ScalarFn::Cutoff { region, delta } => {
                let d = sys.distance_to(region, p);
                C64::new(if d >= *delta { 1.0 } else { smoothstep(d / delta) }, 0.0)
            }
            ScalarFn::Bump { center, radius } => match p {
                Point::Circle(x) => {
                    let d = fixed::to_f64(fixed::circ_dist(*x, *center));
                    C64::new(smoothstep(1.0 - d / radius), 0.0)
                }
                Point::Odometer(_) => C64::new(0.0, 0.0),
            },
            ScalarFn::Shift(n, g) => g.eval(b, &sys.apply(p, *n)?)?,
            ScalarFn::Add(l, r) => l.eval(b, p)? + r.eval(b, p)?,
            ScalarFn::Mul(l, r) => {
                let lv = l.eval(b, p)?;
                if lv == C64::new(0.0, 0.0) {
                    lv
                } else {
                    lv * r.eval(b, p)?
                }
            }
            ScalarFn::Conj(g) => g.eval(b, p)?.conj(),
            ScalarFn::Custom(f) => f(p)?,
        })
    }
}

impl std::ops::Add for ScalarFn {
    type Output = ScalarFn;
    fn add(self, rhs: ScalarFn) -> ScalarFn {
        ScalarFn::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Mul for ScalarFn {
    type Output = ScalarFn;
    fn mul(self, rhs: ScalarFn) -> ScalarFn {
        ScalarFn::Mul(Arc::new(self), Arc::new(rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Cover;
    use crate::dynsys::{System, Tolerances};

    #[test]
    fn shifts_compose_with_rotation() {
        let sys = System::rotation_unchecked(fixed::parse_decimal("0.25").unwrap(), Tolerances::default());
        let b = LineBundle::trivial(sys, Cover::circle_default());
        let f = ScalarFn::Coord.shift(1);
        let v = f.eval(&b, &Point::Circle(fixed::parse_decimal("0.5").unwrap())).unwrap();
        assert!((v.re - 0.75).abs() < 1e-15);
        let g = (ScalarFn::Coord * ScalarFn::constant(2.0)) + ScalarFn::constant(1.0);
        assert!((g.eval(&b, &Point::Circle(0)).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_profile() {
        let sys = System::rotation_unchecked(fixed::parse_decimal("0.25").unwrap(), Tolerances::default());
        let y = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let b = LineBundle::trivial(sys, Cover::circle_default());
        let c = ScalarFn::cutoff(y, 0.1);
        let at = |s: &str| c.eval(&b, &Point::Circle(fixed::parse_decimal(s).unwrap())).unwrap().re;
        assert_eq!(at("0.3"), 0.0);
        assert_eq!(at("0.7"), 1.0);
        assert!((at("0.55") - 0.5).abs() < 1e-12);
    }
}
