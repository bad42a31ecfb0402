//! Line bundles over the base space as Čech cocycles on a finite open cover.
//!
//! Coefficients change by `coef_V = g_{VU}(x) · coef_U`. Tensor powers use
//! chart tuples `U = (U_0, ..., U_{n-1})` with domain `∩ α^{-j}(U_j)` and
//! product transitions `g^{(l)}_{VU}(x) = ∏_{j<l} g_{V_j U_j}(α^j x)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynsys::{fixed, ArcSet, Point, Region, System};
use crate::error::{Error, Result};
use crate::par::Exec;

pub type C64 = Complex64;

/// `3t² − 2t³` on `[0,1]`, clamped outside.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

#[derive(Debug, Clone, PartialEq)]
struct Ramp {
    a: u128,
    b: u128,
    full: bool,
    left: f64,
    right: f64,
}

/// A finite open cover by arcs (circle) or the single full chart (odometer).
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub charts: Vec<Region>,
    pub ids: Vec<String>,
    ramps: Vec<Ramp>,
}

impl Cover {
    /// Open arcs `(a, b)` running counterclockwise from `a` to `b`.
    /// An arc with `a == b` is the full circle.
    pub fn circle(arcs: &[(u128, u128)]) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::Config("atlas needs at least one chart".into()));
        }
        let sets: Vec<ArcSet> = arcs
            .iter()
            .map(|&(a, b)| if a == b { ArcSet::full() } else { ArcSet::arc(a, b, false, false) })
            .collect();
        let union = sets.iter().fold(ArcSet::empty(), |acc, s| acc.union(s));
        if !union.is_full() {
            return Err(Error::Config("atlas charts do not cover the circle".into()));
        }
        let mut ramps = Vec::with_capacity(arcs.len());
        for (c, &(a, b)) in arcs.iter().enumerate() {
            if a == b {
                ramps.push(Ramp { a, b, full: true, left: 1.0, right: 1.0 });
                continue;
            }
            let others = sets
                .iter()
                .enumerate()
                .filter(|(o, _)| *o != c)
                .fold(ArcSet::empty(), |acc, (_, s)| acc.union(s));
            let overlap = sets[c].intersect(&others).components();
            let chart_len = fixed::to_f64(b.wrapping_sub(a));
            let width = |at_left: bool| {
                overlap
                    .iter()
                    .find(|arc| if at_left { arc.a == a } else { arc.b == b })
                    .map(|arc| fixed::to_f64(arc.length_units()))
                    .unwrap_or(chart_len / 2.0)
            };
            ramps.push(Ramp { a, b, full: false, left: width(true), right: width(false) });
        }
        Ok(Cover {
            charts: sets.into_iter().map(Region::Arcs).collect(),
            ids: (0..arcs.len()).map(|i| format!("U{i}")).collect(),
            ramps,
        })
    }

    /// The default two-chart atlas `U_0 = (0.8, 0.55)`, `U_1 = (0.45, 0.05)`.
    pub fn circle_default() -> Self {
        let p = |s: &str| fixed::parse_decimal(s).expect("literal");
        Cover::circle(&[(p("0.8"), p("0.55")), (p("0.45"), p("0.05"))]).expect("default atlas covers")
    }

    /// The single full chart of the odometer.
    pub fn single(system: &System) -> Self {
        Cover {
            charts: vec![system.full_region()],
            ids: vec!["U0".into()],
            ramps: vec![Ramp { a: 0, b: 0, full: true, left: 1.0, right: 1.0 }],
        }
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    fn bump(&self, c: usize, p: &Point) -> f64 {
        let r = &self.ramps[c];
        if r.full {
            return 1.0;
        }
        let Point::Circle(x) = *p else { return 0.0 };
        let dl = x.wrapping_sub(r.a);
        let dr = r.b.wrapping_sub(x);
        if dl == 0 || dr == 0 || dl > r.b.wrapping_sub(r.a) {
            return 0.0;
        }
        smoothstep(fixed::to_f64(dl) / r.left) * smoothstep(fixed::to_f64(dr) / r.right)
    }
}

/// `amp · exp(2πi (c + d t))` on one overlap component.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePiece {
    pub region: Region,
    pub amp: f64,
    pub c: f64,
    pub d: f64,
}

/// Opaque frame `v^{(l)}_U(x)` of the `l`-th tensor power over a tuple domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub tuple: Vec<usize>,
    pub level: usize,
}

/// A chart tuple of the induced cover together with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartTuple {
    pub entries: Vec<usize>,
    pub domain: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CocycleReport {
    pub max_violation: f64,
    pub samples: usize,
}

/// A line bundle over a minimal system.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBundle {
    pub system: System,
    pub cover: Cover,
    /// `transitions[i][j]` describes `g_{ij}` on `U_i ∩ U_j`.
    pub transitions: Vec<Vec<Vec<PhasePiece>>>,
    pub degree: i64,
}

impl LineBundle {
    /// All transitions identically 1.
    pub fn trivial(system: System, cover: Cover) -> Self {
        let n = cover.len();
        let mut transitions = vec![vec![Vec::new(); n]; n];
        for (i, row) in transitions.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    let ov = system.intersect(&cover.charts[i], &cover.charts[j]);
                    if !system.is_empty(&ov) {
                        cell.push(PhasePiece { region: ov, amp: 1.0, c: 0.0, d: 0.0 });
                    }
                }
            }
        }
        LineBundle { system, cover, transitions, degree: 0 }
    }

    /// Two-chart clutching of degree `d`: `g_{10} = exp(2πi d t)` on the overlap
    /// component through 0 (or the first one) and 1 on the other.
    pub fn circle_degree(system: System, cover: Cover, d: i64) -> Result<Self> {
        if d == 0 {
            return Ok(Self::trivial(system, cover));
        }
        if !system.is_circle() {
            return Err(Error::Config("bundles over the odometer must be trivial".into()));
        }
        if cover.len() != 2 {
            return Err(Error::Config("a degree-d circle bundle needs exactly two charts".into()));
        }
        let (Region::Arcs(u0), Region::Arcs(u1)) = (&cover.charts[0], &cover.charts[1]) else {
            unreachable!("circle charts are arcs")
        };
        let comps = u0.intersect(u1).components();
        if comps.len() != 2 {
            return Err(Error::Config(format!(
                "clutching needs a two-component overlap, found {}",
                comps.len()
            )));
        }
        let twisted = comps.iter().position(|c| ArcSet::arc(c.a, c.b, false, false).contains(0)).unwrap_or(0);
        let mut transitions = vec![vec![Vec::new(); 2]; 2];
        for (idx, comp) in comps.iter().enumerate() {
            let region = Region::Arcs(ArcSet::arc(comp.a, comp.b, false, false));
            let dd = if idx == twisted { d as f64 } else { 0.0 };
            transitions[1][0].push(PhasePiece { region: region.clone(), amp: 1.0, c: 0.0, d: dd });
            transitions[0][1].push(PhasePiece { region, amp: 1.0, c: 0.0, d: -dd });
        }
        Ok(LineBundle { system, cover, transitions, degree: d })
    }

    /// Scales every piece of `g_{ij}` by `amp` (defect injection).
    pub fn corrupted(mut self, i: usize, j: usize, amp: f64) -> Self {
        for piece in &mut self.transitions[i][j] {
            piece.amp *= amp;
        }
        self
    }

    pub fn charts(&self) -> usize {
        self.cover.len()
    }

    pub fn in_chart(&self, c: usize, p: &Point) -> bool {
        self.system.contains(&self.cover.charts[c], p)
    }

    /// `g_{ij}(x)`.
    pub fn transition(&self, i: usize, j: usize, p: &Point) -> Result<C64> {
        if !self.in_chart(i, p) || !self.in_chart(j, p) {
            return Err(Error::PointOutsideDomain { tuple: vec![i, j] });
        }
        if i == j {
            return Ok(C64::new(1.0, 0.0));
        }
        let t = self.system.coordinate(p);
        self.transitions[i][j]
            .iter()
            .find(|piece| self.system.contains(&piece.region, p))
            .map(|piece| C64::from_polar(piece.amp, TAU * (piece.c + piece.d * t)))
            .ok_or(Error::PointOutsideDomain { tuple: vec![i, j] })
    }

    /// Whether `α^j(x) ∈ U_j` for every entry of `tuple`.
    pub fn tuple_contains(&self, tuple: &[usize], p: &Point) -> Result<bool> {
        for (j, &c) in tuple.iter().enumerate() {
            if !self.in_chart(c, &self.system.apply(p, j as i64)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn tuple_domain(&self, tuple: &[usize]) -> Result<Region> {
        let mut dom = self.system.full_region();
        for (j, &c) in tuple.iter().enumerate() {
            let pulled = self.system.region_map(&self.cover.charts[c], -(j as i64))?;
            dom = self.system.intersect(&dom, &pulled);
        }
        Ok(dom)
    }

    /// `g^{(l)}_{VU}(x) = ∏_{j<l} g_{V_j U_j}(α^j x)`.
    pub fn tensor_transition(&self, l: usize, v: &[usize], u: &[usize], p: &Point) -> Result<C64> {
        if v.len() < l || u.len() < l {
            return Err(Error::Precondition(format!("tuples shorter than level {l}")));
        }
        let mut acc = C64::new(1.0, 0.0);
        for j in 0..l {
            let q = self.system.apply(p, j as i64)?;
            acc *= self.transition(v[j], u[j], &q).map_err(|_| Error::PointOutsideDomain {
                tuple: u[..l].to_vec(),
            })?;
        }
        Ok(acc)
    }

    /// The frame `v^{(l)}_U(x)`; coefficients against two frames at a common
    /// point differ by `tensor_transition`.
    pub fn frame(&self, u: &[usize], l: usize, p: &Point) -> Result<Frame> {
        if u.len() < l {
            return Err(Error::Precondition(format!("tuple shorter than level {l}")));
        }
        if !self.tuple_contains(&u[..l], p)? {
            return Err(Error::PointOutsideDomain { tuple: u[..l].to_vec() });
        }
        Ok(Frame { tuple: u[..l].to_vec(), level: l })
    }

    /// Coefficient multiplier from frame `from` to frame `to` at `x`.
    pub fn frame_change(&self, to: &Frame, from: &Frame, p: &Point) -> Result<C64> {
        if to.level != from.level {
            return Err(Error::LevelMismatch { left: to.level, right: from.level });
        }
        self.tensor_transition(to.level, &to.tuple, &from.tuple, p)
    }

    /// All level-`n` chart tuples with nonempty domain, in lexicographic order.
    pub fn tuple_cover(&self, n: usize) -> Result<Vec<ChartTuple>> {
        if n == 0 {
            return Err(Error::Precondition("tuple length must be at least 1".into()));
        }
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self.system.full_region())];
        // depth-first in reverse so that output is lexicographic
        while let Some((prefix, dom)) = stack.pop() {
            if prefix.len() == n {
                out.push(ChartTuple { entries: prefix, domain: dom });
                continue;
            }
            let j = prefix.len() as i64;
            for c in (0..self.charts()).rev() {
                let pulled = self.system.region_map(&self.cover.charts[c], -j)?;
                let next = self.system.intersect(&dom, &pulled);
                if !self.system.is_empty(&next) {
                    let mut t = prefix.clone();
                    t.push(c);
                    stack.push((t, next));
                }
            }
        }
        Ok(out)
    }

    /// Charts containing `p` at distance more than the comparison tolerance
    /// from their boundary.
    fn chart_with_margin(&self, c: usize, p: &Point) -> bool {
        match (&self.cover.charts[c], p) {
            (Region::Arcs(s), Point::Circle(x)) => {
                s.contains(*x) && s.endpoint_distance(*x).is_none_or(|d| d > self.system.tol.eps_cmp)
            }
            _ => self.in_chart(c, p),
        }
    }

    /// The lexicographically first tuple of length `len` whose domain contains
    /// `x` with margin; falls back to exact containment.
    pub fn select_tuple(&self, p: &Point, len: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let q = self.system.apply(p, j as i64)?;
            let c = (0..self.charts())
                .find(|&c| self.chart_with_margin(c, &q))
                .or_else(|| (0..self.charts()).find(|&c| self.in_chart(c, &q)))
                .ok_or(Error::NoChartCoversPoint)?;
            out.push(c);
        }
        Ok(out)
    }

    pub fn charts_containing(&self, p: &Point) -> Vec<usize> {
        (0..self.charts()).filter(|&c| self.in_chart(c, p)).collect()
    }

    /// Partition-of-unity weight `γ_c(x)`.
    pub fn partition(&self, c: usize, p: &Point) -> f64 {
        let total: f64 = (0..self.charts()).map(|i| self.cover.bump(i, p)).sum();
        if total <= 0.0 {
            return 0.0;
        }
        self.cover.bump(c, p) / total
    }

    /// Maximum violation of `g_ii = 1`, `g_ij g_ji = 1`, `g_ik = g_ij g_jk`.
    pub fn cocycle_check(&self, samples_per_overlap: usize, seed: u64, exec: Exec) -> Result<CocycleReport> {
        let sys = &self.system;
        let n = self.charts();
        let mut points: Vec<(Vec<usize>, Point)> = Vec::new();
        let mut salt = 0u64;
        let mut push_samples = |charts: Vec<usize>, region: &Region| -> Result<()> {
            salt += 1;
            if sys.is_empty(&sys.interior(region)) {
                return Ok(());
            }
            for p in sys.sample(region, samples_per_overlap, seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))? {
                points.push((charts.clone(), p));
            }
            Ok(())
        };
        for i in 0..n {
            push_samples(vec![i], &self.cover.charts[i])?;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let ij = sys.intersect(&self.cover.charts[i], &self.cover.charts[j]);
                push_samples(vec![i, j], &ij)?;
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let ijk = sys.intersect(&ij, &self.cover.charts[k]);
                    push_samples(vec![i, j, k], &ijk)?;
                }
            }
        }
        let one = C64::new(1.0, 0.0);
        let violations = exec.try_map(&points, |(charts, p)| -> Result<f64> {
            Ok(match charts.as_slice() {
                [i] => (self.transition(*i, *i, p)? - one).norm(),
                [i, j] => (self.transition(*i, *j, p)? * self.transition(*j, *i, p)? - one).norm(),
                [i, j, k] => {
                    (self.transition(*i, *k, p)? - self.transition(*i, *j, p)? * self.transition(*j, *k, p)?).norm()
                }
                _ => 0.0,
            })
        })?;
        Ok(CocycleReport {
            max_violation: violations.into_iter().fold(0.0, crate::par::fmax),
            samples: points.len(),
        })
    }

    /// Random points for property checks, drawn uniformly from the base space.
    pub fn random_points(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full = self.system.full_region();
        let mut pts = self.system.sample(&full, count, rng.random())?;
        // decorrelate stratification order from index
        for i in (1..pts.len()).rev() {
            pts.swap(i, rng.random_range(0..=i));
        }
        Ok(pts)
    }
}
