//! Sections of the tensor powers `𝒱^{(n)}`, the ψ map from elementary
//! tensors, Hilbert-module inner products and orbit breaking.

pub mod scalar;

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

pub use scalar::ScalarFn;

use crate::bundle::{LineBundle, C64};
use crate::dynsys::{Point, Region};
use crate::error::{Error, Result};
use crate::par::Exec;

pub type CoefFn = dyn Fn(&Point, &[usize]) -> Result<C64> + Send + Sync;

#[derive(Clone)]
enum Repr {
    Zero,
    /// Terms `(T, f_T)` with `f_T` supported inside the domain of `T`.
    Local(Vec<(Vec<usize>, ScalarFn)>),
    Sum(Arc<Section>, Arc<Section>),
    Scale(C64, Arc<Section>),
    /// Right module action `s · f`.
    RightMul(Arc<Section>, ScalarFn),
    /// Coefficient in a given tuple, supplied directly.
    Custom(Arc<CoefFn>),
}

/// A continuous section of `𝒱^{(level)}`.
#[derive(Clone)]
pub struct Section {
    level: usize,
    repr: Repr,
}

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Zero => "zero".to_string(),
            Repr::Local(t) => format!("local[{}]", t.len()),
            Repr::Sum(..) => "sum".into(),
            Repr::Scale(c, _) => format!("scale({c})"),
            Repr::RightMul(_, g) => format!("rightmul({g:?})"),
            Repr::Custom(_) => "custom".into(),
        };
        write!(f, "Section(level={}, {kind})", self.level)
    }
}

impl Section {
    pub fn zero(level: usize) -> Self {
        Section { level, repr: Repr::Zero }
    }

    /// A level-0 section, i.e. a continuous function.
    pub fn function(f: ScalarFn) -> Self {
        Section { level: 0, repr: Repr::Local(vec![(Vec::new(), f)]) }
    }

    pub fn local(level: usize, terms: Vec<(Vec<usize>, ScalarFn)>) -> Result<Self> {
        if let Some((t, _)) = terms.iter().find(|(t, _)| t.len() != level) {
            return Err(Error::LevelMismatch { left: t.len(), right: level });
        }
        Ok(Section { level, repr: Repr::Local(terms) })
    }

    /// Generator `η_j`: chart-`j` coefficient `γ_j^{1/2}`, zero off `U_j`.
    pub fn generator(j: usize) -> Self {
        Section { level: 1, repr: Repr::Local(vec![(vec![j], ScalarFn::SqrtPartition(j))]) }
    }

    /// Level-1 section `Σ_j γ_j f_j` glued from one local function per chart.
    pub fn glued(b: &LineBundle, per_chart: impl Fn(usize) -> ScalarFn) -> Self {
        let terms = (0..b.charts()).map(|j| (vec![j], ScalarFn::Partition(j) * per_chart(j))).collect();
        Section { level: 1, repr: Repr::Local(terms) }
    }

    pub fn custom(level: usize, f: impl Fn(&Point, &[usize]) -> Result<C64> + Send + Sync + 'static) -> Self {
        Section { level, repr: Repr::Custom(Arc::new(f)) }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(Section { level: self.level, repr: Repr::Sum(Arc::new(self.clone()), Arc::new(other.clone())) })
    }

    pub fn scale(&self, c: C64) -> Section {
        Section { level: self.level, repr: Repr::Scale(c, Arc::new(self.clone())) }
    }

    /// Right action `s · f`.
    pub fn right_mul(&self, f: ScalarFn) -> Section {
        Section { level: self.level, repr: Repr::RightMul(Arc::new(self.clone()), f) }
    }

    /// Left action `f · s = s · (f ∘ α^{level})`.
    pub fn left_mul(&self, f: ScalarFn) -> Section {
        self.right_mul(f.shift(self.level as i64))
    }

    /// Coefficient of `s(x)` against the frame `v^{(level)}_U(x)`.
    pub fn eval(&self, b: &LineBundle, p: &Point, u: &[usize]) -> Result<C64> {
        if u.len() < self.level {
            return Err(Error::Precondition(format!(
                "chart tuple of length {} is shorter than level {}",
                u.len(),
                self.level
            )));
        }
        let u = &u[..self.level];
        if !b.tuple_contains(u, p)? {
            return Err(Error::PointOutsideDomain { tuple: u.to_vec() });
        }
        self.eval_unchecked(b, p, u)
    }

    fn eval_unchecked(&self, b: &LineBundle, p: &Point, u: &[usize]) -> Result<C64> {
        Ok(match &self.repr {
            Repr::Zero => C64::new(0.0, 0.0),
            Repr::Local(terms) => {
                let mut acc = C64::new(0.0, 0.0);
                for (t, f) in terms {
                    if self.level == 0 {
                        acc += f.eval(b, p)?;
                    } else if b.tuple_contains(t, p)? {
                        let v = f.eval(b, p)?;
                        if v != C64::new(0.0, 0.0) {
                            acc += b.tensor_transition(self.level, u, t, p)? * v;
                        }
                    }
                }
                acc
            }
            Repr::Sum(l, r) => l.eval_unchecked(b, p, u)? + r.eval_unchecked(b, p, u)?,
            Repr::Scale(c, s) => c * s.eval_unchecked(b, p, u)?,
            Repr::RightMul(s, f) => {
                let fv = f.eval(b, p)?;
                if fv == C64::new(0.0, 0.0) {
                    fv
                } else {
                    s.eval_unchecked(b, p, u)? * fv
                }
            }
            Repr::Custom(f) => f(p, u)?,
        })
    }

    /// Coefficient in the selected chart tuple at `x`.
    pub fn eval_auto(&self, b: &LineBundle, p: &Point) -> Result<C64> {
        let u = b.select_tuple(p, self.level)?;
        self.eval_unchecked(b, p, &u)
    }

    /// Max chart-covariance defect `|s_V − g^{(n)}_{VU} s_U|` over tuples
    /// containing each sample point.
    pub fn covariance_defect(&self, b: &LineBundle, points: &[Point], exec: Exec) -> Result<f64> {
        let defects = exec.try_map(points, |p| -> Result<f64> {
            let tuples = tuples_at(b, p, self.level, false)?;
            let mut worst: f64 = 0.0;
            if let Some((u, _)) = tuples.first() {
                let su = self.eval(b, p, u)?;
                for (v, _) in &tuples[1..] {
                    let sv = self.eval(b, p, v)?;
                    worst = worst.max((sv - b.tensor_transition(self.level, v, u, p)? * su).norm());
                }
            }
            Ok(worst)
        })?;
        Ok(defects.into_iter().fold(0.0, crate::par::fmax))
    }
}

/// Tuples of length `level` whose domain contains `x`, with their partition
/// weights `∏_j γ_{T_j}(α^j x)`; zero-weight tuples are skipped when `weighted`.
pub fn tuples_at(b: &LineBundle, p: &Point, level: usize, weighted: bool) -> Result<Vec<(Vec<usize>, f64)>> {
    let mut out = vec![(Vec::new(), 1.0)];
    for j in 0..level {
        let q = b.system.apply(p, j as i64)?;
        let charts: Vec<(usize, f64)> = b
            .charts_containing(&q)
            .into_iter()
            .map(|c| (c, b.partition(c, &q)))
            .filter(|&(_, w)| !weighted || w > 0.0)
            .collect();
        let mut next = Vec::with_capacity(out.len() * charts.len());
        for (t, w) in &out {
            for &(c, wc) in &charts {
                let mut t2 = t.clone();
                t2.push(c);
                next.push((t2, w * wc));
            }
        }
        out = next;
    }
    Ok(out)
}

/// `ξ_1 ⊗ ... ⊗ ξ_m` of level-1 sections, or a function for `m = 0`.
#[derive(Debug, Clone)]
pub enum ElementaryTensor {
    Function(ScalarFn),
    Product(Vec<Section>),
}

impl ElementaryTensor {
    pub fn product(factors: Vec<Section>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Precondition("an elementary tensor needs at least one factor".into()));
        }
        if let Some(s) = factors.iter().find(|s| s.level() != 1) {
            return Err(Error::LevelMismatch { left: s.level(), right: 1 });
        }
        Ok(ElementaryTensor::Product(factors))
    }

    pub fn len(&self) -> usize {
        match self {
            ElementaryTensor::Function(_) => 0,
            ElementaryTensor::Product(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The left action `f · t`, acting on the first factor.
    pub fn left_mul(&self, f: ScalarFn) -> Self {
        match self {
            ElementaryTensor::Function(g) => ElementaryTensor::Function(f * g.clone()),
            ElementaryTensor::Product(fs) => {
                let mut fs = fs.clone();
                fs[0] = fs[0].left_mul(f);
                ElementaryTensor::Product(fs)
            }
        }
    }
}

/// `ψ(ξ_1 ⊗ ... ⊗ ξ_m)(x) = ∏_i ξ_i(α^{m−i} x)` in chart tuple `U`.
pub fn psi_eval(b: &LineBundle, t: &ElementaryTensor, p: &Point, u: &[usize]) -> Result<C64> {
    match t {
        ElementaryTensor::Function(f) => f.eval(b, p),
        ElementaryTensor::Product(factors) => {
            let m = factors.len();
            if u.len() < m {
                return Err(Error::Precondition(format!("chart tuple shorter than tensor length {m}")));
            }
            if !b.tuple_contains(&u[..m], p)? {
                return Err(Error::PointOutsideDomain { tuple: u[..m].to_vec() });
            }
            let mut acc = C64::new(1.0, 0.0);
            for (i, xi) in factors.iter().enumerate() {
                let pos = m - 1 - i;
                let q = b.system.apply(p, pos as i64)?;
                acc *= xi.eval_unchecked(b, &q, &u[pos..pos + 1])?;
                if acc == C64::new(0.0, 0.0) {
                    break;
                }
            }
            Ok(acc)
        }
    }
}

/// `ψ(t)` as a section of `𝒱^{(m)}` bound to a bundle.
pub fn psi_section(b: &LineBundle, t: &ElementaryTensor) -> Section {
    match t {
        ElementaryTensor::Function(f) => Section::function(f.clone()),
        ElementaryTensor::Product(_) => {
            let b = b.clone();
            let t = t.clone();
            Section::custom(t.len(), move |p, u| psi_eval(&b, &t, p, u))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Right inner product `Σ_T w_T conj(s_T) t_T`, or the left one
/// `⟨t, s⟩ ∘ α^{−level}`.
pub fn inner_product(b: &LineBundle, s: &Section, t: &Section, p: &Point, side: Side) -> Result<C64> {
    if s.level() != t.level() {
        return Err(Error::LevelMismatch { left: s.level(), right: t.level() });
    }
    match side {
        Side::Right => {
            if s.level() == 0 {
                return Ok(s.eval_unchecked(b, p, &[])?.conj() * t.eval_unchecked(b, p, &[])?);
            }
            let mut acc = C64::new(0.0, 0.0);
            for (u, w) in tuples_at(b, p, s.level(), true)? {
                acc += w * s.eval_unchecked(b, p, &u)?.conj() * t.eval_unchecked(b, p, &u)?;
            }
            Ok(acc)
        }
        Side::Left => {
            let q = b.system.apply(p, -(s.level() as i64))?;
            inner_product(b, t, s, &q, Side::Right)
        }
    }
}

/// `⟨s_1 ⊗ ... ⊗ s_m, t_1 ⊗ ... ⊗ t_m⟩(x) = ⟨s_m,t_m⟩(x) ⟨s_{m−1},t_{m−1}⟩(αx) ⋯`.
pub fn tensor_inner_product(b: &LineBundle, s: &ElementaryTensor, t: &ElementaryTensor, p: &Point) -> Result<C64> {
    match (s, t) {
        (ElementaryTensor::Function(f), ElementaryTensor::Function(g)) => Ok(f.eval(b, p)?.conj() * g.eval(b, p)?),
        (ElementaryTensor::Product(fs), ElementaryTensor::Product(gs)) => {
            if fs.len() != gs.len() {
                return Err(Error::LevelMismatch { left: fs.len(), right: gs.len() });
            }
            let m = fs.len();
            let mut acc = C64::new(1.0, 0.0);
            for i in 0..m {
                let q = b.system.apply(p, (m - 1 - i) as i64)?;
                acc *= inner_product(b, &fs[i], &gs[i], &q, Side::Right)?;
            }
            Ok(acc)
        }
        _ => Err(Error::LevelMismatch { left: s.len(), right: t.len() }),
    }
}

/// Default cutoff width `min(0.05, μ(Y)/4)`.
pub fn default_delta_cut(b: &LineBundle, y: &Region) -> f64 {
    (b.system.measure(y).to_f64().unwrap_or(0.0) / 4.0).min(0.05)
}

/// Canonical cutoff `c` with `c = 0` on `Y`, `c = 1` at distance `≥ δ`.
pub fn cutoff(y: &Region, delta: f64) -> ScalarFn {
    ScalarFn::cutoff(y.clone(), delta)
}

/// `c · s` under the left action, i.e. `s · (c ∘ α)`; vanishes on `α^{-1}(Y)`.
pub fn orbit_breaking_project(s: &Section, y: &Region, delta: f64) -> Section {
    if s.is_zero() {
        return s.clone();
    }
    s.left_mul(cutoff(y, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub max_residual: f64,
    pub samples: usize,
}

/// Samples `α^{-1}(Y) ∪ ... ∪ α^{-m}(Y)` and reports `max |ψ(t)|`.
pub fn orbit_breaking_test(
    b: &LineBundle,
    t: &ElementaryTensor,
    y: &Region,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<MembershipReport> {
    let sys = &b.system;
    if sys.is_empty(&sys.interior(y)) {
        return Err(Error::Precondition("Y requires non-empty interior".into()));
    }
    let m = t.len();
    if m == 0 {
        return Err(Error::Precondition("orbit-breaking test needs a tensor of length at least 1".into()));
    }
    let mut points = Vec::new();
    for i in 1..=m {
        let pre = sys.region_map(y, -(i as i64))?;
        points.extend(sys.sample(&pre, samples.div_ceil(m).max(1), seed.wrapping_add(i as u64))?);
    }
    let residuals = exec.try_map(&points, |p| -> Result<f64> {
        let u = b.select_tuple(p, m)?;
        Ok(psi_eval(b, t, p, &u)?.norm())
    })?;
    let max_residual = residuals.into_iter().fold(0.0, crate::par::fmax);
    Ok(MembershipReport { member: max_residual < sys.tol.eps_alg, max_residual, samples: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Cover;
    use crate::dynsys::{fixed, System, Tolerances};

    fn golden() -> System {
        let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
        System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap()
    }

    fn half(sys: &System) -> Region {
        sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap()
    }

    fn at(s: &str) -> Point {
        Point::Circle(fixed::parse_decimal(s).unwrap())
    }

    #[test]
    fn generator_values() {
        let b = LineBundle::circle_degree(golden(), Cover::circle_default(), 1).unwrap();
        let eta0 = Section::generator(0);
        let eta1 = Section::generator(1);
        assert!((eta0.eval(&b, &at("0.5"), &[0]).unwrap().re - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(eta1.eval(&b, &at("0.2"), &[0]).unwrap(), C64::new(0.0, 0.0));
        assert!((eta0.eval(&b, &at("0.2"), &[0]).unwrap().re - 1.0).abs() < 1e-15);
        assert!(Section::zero(1).eval(&b, &at("0.3"), &[0]).unwrap() == C64::new(0.0, 0.0));
    }

    #[test]
    fn generators_are_normalized() {
        let b = LineBundle::circle_degree(golden(), Cover::circle_default(), 1).unwrap();
        for p in b.random_points(200, 3).unwrap() {
            let total: C64 = (0..2)
                .map(|j| inner_product(&b, &Section::generator(j), &Section::generator(j), &p, Side::Right).unwrap())
                .sum();
            assert!((total - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_of_constants_on_trivial_bundle() {
        let b = LineBundle::trivial(golden(), Cover::circle_default());
        let c1 = Section::glued(&b, |_| ScalarFn::Const(C64::new(2.0, 1.0)));
        let c2 = Section::glued(&b, |_| ScalarFn::constant(-3.0));
        let t = ElementaryTensor::product(vec![c1, c2.clone()]).unwrap();
        for p in b.random_points(50, 5).unwrap() {
            let u = b.select_tuple(&p, 2).unwrap();
            let v = psi_eval(&b, &t, &p, &u).unwrap();
            assert!((v - C64::new(-6.0, -3.0)).norm() < 1e-12);
        }
        let z = ElementaryTensor::product(vec![Section::zero(1), c2]).unwrap();
        assert_eq!(psi_eval(&b, &z, &at("0.3"), &[0, 0]).unwrap().norm(), 0.0);
    }

    #[test]
    fn projection_vanishes_and_keeps_plateau() {
        let sys = golden();
        let b = LineBundle::circle_degree(sys.clone(), Cover::circle_default(), 1).unwrap();
        let y = half(&sys);
        let s = Section::generator(0);
        let p = orbit_breaking_project(&s, &y, 0.05);
        let t = ElementaryTensor::product(vec![p.clone()]).unwrap();
        let rep = orbit_breaking_test(&b, &t, &y, 200, 1, Exec::Sequential).unwrap();
        assert!(rep.member && rep.max_residual < 1e-9);
        // α(x) = 0.75 is 0.25 from Y, so the section is unchanged there
        let x = sys.apply(&at("0.75"), -1).unwrap();
        let u = b.select_tuple(&x, 1).unwrap();
        assert!((p.eval(&b, &x, &u).unwrap() - s.eval(&b, &x, &u).unwrap()).norm() < 1e-15);
        let raw = ElementaryTensor::product(vec![Section::generator(0), Section::generator(1)]).unwrap();
        assert!(!orbit_breaking_test(&b, &raw, &y, 100, 1, Exec::Sequential).unwrap().member);
        assert!(orbit_breaking_test(&b, &raw, &sys.empty_region(), 10, 1, Exec::Sequential).is_err());
    }

    #[test]
    fn chart_covariance_of_generators() {
        let b = LineBundle::circle_degree(golden(), Cover::circle_default(), 2).unwrap();
        let pts = b.random_points(300, 9).unwrap();
        for s in [Section::generator(0), Section::generator(1)] {
            assert!(s.covariance_defect(&b, &pts, Exec::Sequential).unwrap() < 1e-12);
        }
    }
}
