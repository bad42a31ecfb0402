//! The covariant representation `(π_k, τ_k)` on towers, words in the
//! generators of the orbit-breaking algebra, and the checks built on them.

pub mod corpus;
pub mod lift;
pub mod rsh;

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use crate::bundle::{LineBundle, C64};
use crate::dynsys::{Point, Region, System};
use crate::endo::{op_norm, Mat, MatrixField};
use crate::error::{Error, Result};
use crate::par::{fmax, Exec};
use crate::sections::{default_delta_cut, inner_product, ElementaryTensor, ScalarFn, Section, Side};
use crate::towers::{boundary_itinerary, first_return_partition, BoundaryItinerary, TowerDecomposition};

/// Everything a representation computation needs: bundle (with its
/// system), the closed set `Y`, its towers and the cutoff width.
#[derive(Debug, Clone)]
pub struct Model {
    pub bundle: LineBundle,
    pub y: Region,
    pub towers: TowerDecomposition,
    pub delta_cut: f64,
}

impl Model {
    pub fn new(bundle: LineBundle, y: Region) -> Result<Self> {
        let towers = first_return_partition(&bundle.system, &y)?;
        let delta_cut = default_delta_cut(&bundle, &y);
        Ok(Model { bundle, y, towers, delta_cut })
    }

    pub fn with_delta_cut(mut self, delta: f64) -> Self {
        self.delta_cut = delta;
        self
    }

    pub fn sys(&self) -> &System {
        &self.bundle.system
    }

    pub fn r(&self, k: usize) -> Result<usize> {
        Ok(self.towers.r(k)? as usize)
    }

    pub fn towers_k(&self) -> usize {
        self.towers.K()
    }

    /// Orbit-breaking projection of a level-1 section into `ℰ_Y`.
    pub fn project(&self, s: &Section) -> Section {
        crate::sections::orbit_breaking_project(s, &self.y, self.delta_cut)
    }

    /// Sample points of `closure(Y_k)` together with its exact glue points.
    pub fn stage_points(&self, k: usize, samples: usize, seed: u64) -> Result<Vec<Point>> {
        let level = self.towers.level(k)?;
        let mut pts = self.sys().sample(&level.base_closure, samples, seed)?;
        pts.extend(self.towers.glue_points(self.sys(), k, 4, seed)?);
        Ok(pts)
    }

    /// Tuple for stage `k` at `x`.
    pub fn tuple(&self, k: usize, p: &Point) -> Result<Vec<usize>> {
        self.bundle.select_tuple(p, self.r(k)?)
    }
}

/// A formal element of the `*`-algebra generated by functions and `ℰ_Y`.
#[derive(Clone)]
pub enum Word {
    Fn(Section),
    Gen(Section),
    Sum(Arc<Word>, Arc<Word>),
    Prod(Arc<Word>, Arc<Word>),
    Adj(Arc<Word>),
    Scale(C64, Arc<Word>),
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Fn(_) => write!(f, "F"),
            Word::Gen(_) => write!(f, "G"),
            Word::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            Word::Prod(a, b) => write!(f, "{a:?}{b:?}"),
            Word::Adj(a) => write!(f, "({a:?})*"),
            Word::Scale(c, a) => write!(f, "{c}·{a:?}"),
        }
    }
}

impl Word {
    pub fn func(f: ScalarFn) -> Word {
        Word::Fn(Section::function(f))
    }

    pub fn zero() -> Word {
        Word::Fn(Section::zero(0))
    }

    pub fn function(s: Section) -> Result<Word> {
        if s.level() != 0 {
            return Err(Error::LevelMismatch { left: s.level(), right: 0 });
        }
        Ok(Word::Fn(s))
    }

    pub fn gen(s: Section) -> Result<Word> {
        if s.level() != 1 {
            return Err(Error::LevelMismatch { left: s.level(), right: 1 });
        }
        Ok(Word::Gen(s))
    }

    pub fn adj(&self) -> Word {
        Word::Adj(Arc::new(self.clone()))
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::Prod(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    pub fn add(&self, other: &Word) -> Word {
        Word::Sum(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    pub fn scale(&self, c: C64) -> Word {
        Word::Scale(c, Arc::new(self.clone()))
    }

    pub fn pow(&self, n: usize) -> Word {
        (1..n).fold(self.clone(), |acc, _| acc.mul(self))
    }

    /// Structural `ℤ`-degree; `None` for inhomogeneous sums.
    pub fn degree(&self) -> Option<i64> {
        match self {
            Word::Fn(_) => Some(0),
            Word::Gen(_) => Some(1),
            Word::Adj(a) => a.degree().map(|d| -d),
            Word::Scale(_, a) => a.degree(),
            Word::Prod(a, b) => Some(a.degree()? + b.degree()?),
            Word::Sum(a, b) => match (a.degree()?, b.degree()?) {
                (x, y) if x == y => Some(x),
                _ => None,
            },
        }
    }
}

impl Model {
    fn check_stage(&self, k: usize, p: &Point, u: &[usize]) -> Result<usize> {
        let r = self.r(k)?;
        if u.len() < r {
            return Err(Error::Precondition(format!("chart tuple of length {} is shorter than r_{k} = {r}", u.len())));
        }
        if !self.bundle.tuple_contains(&u[..r], p)? {
            return Err(Error::PointOutsideDomain { tuple: u[..r].to_vec() });
        }
        Ok(r)
    }

    /// `π_k(f)(x) = diag(f(x), f(αx), ..., f(α^{r_k−1}x))`.
    pub fn pi_eval(&self, f: &Section, p: &Point, k: usize, u: &[usize]) -> Result<Mat> {
        if f.level() != 0 {
            return Err(Error::LevelMismatch { left: f.level(), right: 0 });
        }
        let r = self.check_stage(k, p, u)?;
        self.pi_unchecked(f, p, r)
    }

    fn pi_unchecked(&self, f: &Section, p: &Point, r: usize) -> Result<Mat> {
        let mut d = Vec::with_capacity(r);
        for j in 0..r {
            d.push(f.eval(&self.bundle, &self.sys().apply(p, j as i64)?, &[])?);
        }
        Ok(Mat::from_diagonal(&DVector::from_vec(d)))
    }

    /// `τ_k(ξ)(x)`: entry `(j+1, j)` is `ξ(α^j x)` in chart `U_j`.
    pub fn tau_eval(&self, xi: &Section, p: &Point, k: usize, u: &[usize]) -> Result<Mat> {
        if xi.level() != 1 {
            return Err(Error::LevelMismatch { left: xi.level(), right: 1 });
        }
        let r = self.check_stage(k, p, u)?;
        self.tau_unchecked(xi, p, r, u)
    }

    fn tau_unchecked(&self, xi: &Section, p: &Point, r: usize, u: &[usize]) -> Result<Mat> {
        let mut m = Mat::zeros(r, r);
        for j in 0..r.saturating_sub(1) {
            let q = self.sys().apply(p, j as i64)?;
            m[(j + 1, j)] = xi.eval(&self.bundle, &q, &u[j..j + 1])?;
        }
        Ok(m)
    }

    /// Homomorphic evaluation of a word at stage `k`.
    pub fn evaluate_word(&self, w: &Word, p: &Point, k: usize, u: &[usize]) -> Result<Mat> {
        let r = self.check_stage(k, p, u)?;
        self.eval_rec(w, p, r, u)
    }

    fn eval_rec(&self, w: &Word, p: &Point, r: usize, u: &[usize]) -> Result<Mat> {
        Ok(match w {
            Word::Fn(f) => self.pi_unchecked(f, p, r)?,
            Word::Gen(xi) => self.tau_unchecked(xi, p, r, u)?,
            Word::Sum(a, b) => self.eval_rec(a, p, r, u)? + self.eval_rec(b, p, r, u)?,
            Word::Prod(a, b) => {
                let lhs = self.eval_rec(a, p, r, u)?;
                if lhs.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    lhs
                } else {
                    lhs * self.eval_rec(b, p, r, u)?
                }
            }
            Word::Adj(a) => self.eval_rec(a, p, r, u)?.adjoint(),
            Word::Scale(c, a) => self.eval_rec(a, p, r, u)? * *c,
        })
    }

    /// Evaluation in the selected tuple.
    pub fn evaluate_auto(&self, w: &Word, p: &Point, k: usize) -> Result<Mat> {
        let u = self.tuple(k, p)?;
        self.evaluate_word(w, p, k, &u)
    }

    /// The word's image at stage `k` as a matrix field over `closure(Y_k)`.
    pub fn word_field(&self, w: &Word, k: usize) -> Result<MatrixField> {
        let level = self.towers.level(k)?;
        let me = self.clone();
        let w = w.clone();
        Ok(MatrixField::new(level.r as usize, level.base_closure.clone(), move |p, u| me.evaluate_word(&w, p, k, u)))
    }

    /// `‖U_z M U_z^* − z^n M‖` with `U_z = diag(1, z, ..., z^{r_k−1})`.
    pub fn gauge_check(&self, w: &Word, z: C64, p: &Point, k: usize, u: &[usize]) -> Result<f64> {
        let n = w.degree().ok_or(Error::InhomogeneousWord)?;
        let m = self.evaluate_word(w, p, k, u)?;
        let r = m.nrows();
        let zs: Vec<C64> = (0..r).map(|i| z.powi(i as i32)).collect();
        let conj = Mat::from_fn(r, r, |i, j| zs[i] * m[(i, j)] * zs[j].conj());
        Ok(op_norm(&(conj - m * z.powi(n as i32))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceReport {
    /// `π(⟨ξ,η⟩) = τ(ξ)^* τ(η)`.
    pub inner: f64,
    /// `τ(f·ξ) = π(f) τ(ξ)`.
    pub left_action: f64,
    /// `τ(f·ξ) = τ(ξ) π(f∘α)`.
    pub right_action: f64,
    /// `π(⟨η,ξ⟩∘α^{-1}) = τ(ξ) τ(η)^*`.
    pub left_inner: f64,
    pub samples: usize,
}

impl CovarianceReport {
    pub fn max(&self) -> f64 {
        [self.inner, self.left_action, self.right_action, self.left_inner].into_iter().fold(0.0, fmax)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub k: usize,
    pub x: Point,
    pub entry: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityWitness {
    pub is_zero: bool,
    pub witness: Option<WitnessEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdpReport {
    pub block_residual: f64,
    pub offblock: f64,
    pub itinerary: BoundaryItinerary,
}

impl BdpReport {
    pub fn residual(&self) -> f64 {
        fmax(self.block_residual, self.offblock)
    }
}

fn inner_fn(b: &LineBundle, s: &Section, t: &Section, side: Side) -> Section {
    let (b, s, t) = (b.clone(), s.clone(), t.clone());
    Section::function(ScalarFn::custom(move |p| inner_product(&b, &s, &t, p, side)))
}

impl Model {
    /// Identities relating `π` and `τ`, maximised over stages
    /// and samples of `closure(Y_k)`.
    pub fn covariance_suite(
        &self,
        xi: &Section,
        eta: &Section,
        f: &ScalarFn,
        samples: usize,
        seed: u64,
        exec: Exec,
    ) -> Result<CovarianceReport> {
        let b = &self.bundle;
        let right = inner_fn(b, xi, eta, Side::Right);
        let left = inner_fn(b, xi, eta, Side::Left);
        let fs = Section::function(f.clone());
        let fa = Section::function(f.clone().shift(1));
        let f_xi = xi.left_mul(f.clone());
        let mut jobs = Vec::new();
        for k in 1..=self.towers_k() {
            for p in self.stage_points(k, samples, seed.wrapping_add(k as u64))? {
                jobs.push((k, p));
            }
        }
        let rows = exec.try_map(&jobs, |(k, p)| -> Result<[f64; 4]> {
            let u = self.tuple(*k, p)?;
            let tx = self.tau_eval(xi, p, *k, &u)?;
            let te = self.tau_eval(eta, p, *k, &u)?;
            let tfx = self.tau_eval(&f_xi, p, *k, &u)?;
            Ok([
                op_norm(&(self.pi_eval(&right, p, *k, &u)? - tx.adjoint() * &te)),
                op_norm(&(&tfx - self.pi_eval(&fs, p, *k, &u)? * &tx)),
                op_norm(&(&tfx - &tx * self.pi_eval(&fa, p, *k, &u)?)),
                op_norm(&(self.pi_eval(&left, p, *k, &u)? - &tx * te.adjoint())),
            ])
        })?;
        let col = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, fmax);
        Ok(CovarianceReport {
            inner: col(0),
            left_action: col(1),
            right_action: col(2),
            left_inner: col(3),
            samples: rows.len(),
        })
    }

    /// Finds a stage, point and diagonal entry where `π(f)` is visibly nonzero.
    pub fn injectivity_witness(&self, f: &Section, samples: usize, seed: u64, exec: Exec) -> Result<InjectivityWitness> {
        let sys = self.sys();
        let pts = sys.sample(&sys.full_region(), samples, seed)?;
        let values = exec.try_map(&pts, |p| Ok::<_, Error>(f.eval(&self.bundle, p, &[])?.norm()))?;
        let best = values.iter().copied().fold(0.0, fmax);
        if best <= sys.tol.eps_alg {
            return Ok(InjectivityWitness { is_zero: true, witness: None });
        }
        let mut found: Option<WitnessEntry> = None;
        for (p, v) in pts.iter().zip(&values) {
            if *v < best * (1.0 - 1e-12) {
                continue;
            }
            if let Some((k, i, x)) = self.locate(p)? {
                if found.as_ref().is_none_or(|w| i < w.entry) {
                    found = Some(WitnessEntry { k, x, entry: i, value: *v });
                }
            }
        }
        Ok(InjectivityWitness { is_zero: false, witness: found })
    }

    /// `(k, i, x)` with `x ∈ Y_k` and `α^i(x) = p`, `0 ≤ i < r_k`.
    pub fn locate(&self, p: &Point) -> Result<Option<(usize, usize, Point)>> {
        let sys = self.sys();
        for i in 0..self.towers.max_height() as usize {
            let x = sys.apply(p, -(i as i64))?;
            if let Some(k) = self.towers.tower_of(sys, &x)? {
                if i < self.r(k)? {
                    return Ok(Some((k, i, x)));
                }
            }
        }
        Ok(None)
    }

    /// Block comparison of a word's stage-`k` image at `x ∈ closure(Y_k)`
    /// against earlier stages along the itinerary of `x`.
    pub fn boundary_decomposition_check(&self, w: &Word, k: usize, p: &Point) -> Result<BdpReport> {
        let sys = self.sys();
        let it = boundary_itinerary(sys, &self.towers, k, p)?;
        let u = self.tuple(k, p)?;
        let m = self.evaluate_word(w, p, k, &u)?;
        let r = m.nrows();
        let mut owner = vec![usize::MAX; r];
        let mut block_residual: f64 = 0.0;
        for (s, &t) in it.mu.iter().enumerate() {
            let off = it.partial_sums[s] as usize;
            let rt = self.r(t)?;
            let q = sys.apply(p, off as i64)?;
            let sub = self.evaluate_word(w, &q, t, &u[off..off + rt])?;
            let blk = m.view((off, off), (rt, rt)).into_owned();
            block_residual = fmax(block_residual, op_norm(&(blk - sub)));
            owner[off..off + rt].fill(s);
        }
        let mut offblock: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                if owner[i] != owner[j] {
                    offblock = fmax(offblock, m[(i, j)].norm());
                }
            }
        }
        Ok(BdpReport { block_residual, offblock, itinerary: it })
    }
}

/// `ψ` inner-product preservation: `⟨ψ(s), ψ(t)⟩(x)` against the iterated
/// contraction, maximised over points.
pub fn psi_inner_product_defect(
    b: &LineBundle,
    s: &ElementaryTensor,
    t: &ElementaryTensor,
    points: &[Point],
    exec: Exec,
) -> Result<f64> {
    let ps = crate::sections::psi_section(b, s);
    let pt = crate::sections::psi_section(b, t);
    let rows = exec.try_map(points, |p| -> Result<f64> {
        let lhs = inner_product(b, &ps, &pt, p, Side::Right)?;
        let rhs = crate::sections::tensor_inner_product(b, s, t, p)?;
        Ok((lhs - rhs).norm())
    })?;
    Ok(rows.into_iter().fold(0.0, fmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Cover;
    use crate::dynsys::{fixed, Tolerances};

    fn golden_model(degree: i64) -> Model {
        let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
        let sys = System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap();
        let y = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let b = LineBundle::circle_degree(sys, Cover::circle_default(), degree).unwrap();
        Model::new(b, y).unwrap()
    }

    #[test]
    fn pi_of_coordinate() {
        let m = golden_model(1);
        let x = Point::Circle(fixed::parse_decimal("0.1").unwrap());
        let u = m.tuple(2, &x).unwrap();
        let d = m.pi_eval(&Section::function(ScalarFn::Coord), &x, 2, &u).unwrap();
        let theta = fixed::to_f64(m.sys().theta().unwrap());
        assert!((d[(0, 0)].re - 0.1).abs() < 1e-15);
        assert!((d[(1, 1)].re - (0.1 + theta).fract()).abs() < 1e-15);
        assert_eq!(d[(0, 1)], C64::new(0.0, 0.0));
        let one = m.evaluate_auto(&Word::func(ScalarFn::constant(1.0)), &x, 2).unwrap();
        assert_eq!(one, Mat::identity(2, 2));
    }

    #[test]
    fn tau_shapes_and_nilpotency() {
        let m = golden_model(1);
        let xi = m.project(&Section::generator(0));
        let g = Word::gen(xi).unwrap();
        let y1 = Point::Circle(fixed::parse_decimal("0.45").unwrap());
        assert_eq!(m.evaluate_auto(&g, &y1, 1).unwrap(), Mat::zeros(1, 1));
        let x3 = Point::Circle(fixed::parse_decimal("0.3").unwrap());
        assert_eq!(m.evaluate_auto(&g.pow(3), &x3, 3).unwrap(), Mat::zeros(3, 3));
        assert_eq!(g.adj().mul(&g).degree(), Some(0));
        assert_eq!(g.add(&Word::zero()).degree(), None);
    }

    #[test]
    fn glue_point_bdp_for_functions() {
        let m = golden_model(1);
        let theta = m.sys().theta().unwrap();
        let x = Point::Circle(0u128.wrapping_sub(theta));
        let w = Word::func(ScalarFn::Coord * ScalarFn::Coord + ScalarFn::Phase { c: 0.1, d: 2.0 });
        let rep = m.boundary_decomposition_check(&w, 3, &x).unwrap();
        assert_eq!(rep.itinerary.mu, vec![1, 2]);
        assert!(rep.residual() < 1e-12);
        let g = Word::gen(m.project(&Section::generator(1))).unwrap();
        let rep = m.boundary_decomposition_check(&g, 3, &x).unwrap();
        assert!(rep.residual() < 1e-12, "{rep:?}");
    }

    #[test]
    fn gauge_degrees() {
        let m = golden_model(1);
        let g = Word::gen(m.project(&Section::generator(0))).unwrap();
        let x = Point::Circle(fixed::parse_decimal("0.3").unwrap());
        let u = m.tuple(3, &x).unwrap();
        let i = C64::new(0.0, 1.0);
        assert!(m.gauge_check(&g, i, &x, 3, &u).unwrap() < 1e-12);
        assert!(m.gauge_check(&g.adj().mul(&g), i, &x, 3, &u).unwrap() < 1e-12);
        assert_eq!(m.gauge_check(&g.add(&Word::zero()), i, &x, 3, &u), Err(Error::InhomogeneousWord));
    }

    #[test]
    fn zero_function_has_no_witness() {
        let m = golden_model(0);
        let w = m.injectivity_witness(&Section::zero(0), 100, 1, Exec::Sequential).unwrap();
        assert!(w.is_zero);
        let one = m.injectivity_witness(&Section::function(ScalarFn::constant(1.0)), 100, 1, Exec::Sequential).unwrap();
        assert_eq!(one.witness.unwrap().entry, 0);
    }
}
