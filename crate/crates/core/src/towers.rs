//! First-return towers over a closed subset `Y`.
//!
//! Tower indices `k` are 1-based throughout, matching `r_1 < ... < r_K`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dynsys::{fixed, Point, Region, RegionDescription, System};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub r: u32,
    pub base: Region,
    pub base_closure: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerDecomposition {
    pub levels: Vec<TowerLevel>,
    /// `|Σ r_k μ(Y_k) − 1|`, exact.
    pub covering_residual: BigRational,
    pub horizon: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryItinerary {
    pub k: usize,
    pub x: Point,
    pub mu: Vec<usize>,
    pub partial_sums: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimplicityCertificate {
    pub empty_up_to: u32,
    pub first_hit: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerValidation {
    pub disjointness_violation: f64,
    pub covering_residual: f64,
    pub covering_residual_exact: String,
    pub partition_residual: f64,
    pub bases_in_y: bool,
    pub returns_in_y: bool,
    pub prefix_unions_closed: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDescription {
    pub r: u32,
    pub base: RegionDescription,
    pub base_closure: RegionDescription,
    pub measure: String,
    pub measure_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowersDescription {
    #[serde(rename = "K")]
    pub k: usize,
    pub levels: Vec<LevelDescription>,
    pub covering_residual: f64,
    pub covering_residual_exact: String,
    pub horizon: u32,
}

/// Per-level intervals `α^i(Y_k)` for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRow {
    pub k: usize,
    pub i: u32,
    pub region: RegionDescription,
}

fn eps_rational(sys: &System) -> BigRational {
    BigRational::new(BigInt::from(sys.tol.eps_cmp), BigInt::from(1u8) << 128u32)
}

fn rational_string(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rejects regions whose distinct endpoints nearly coincide.
fn check_separation(sys: &System, regions: &[&Region], context: &str) -> Result<()> {
    let mut ends: Vec<u128> = regions
        .iter()
        .flat_map(|r| sys.endpoints(r))
        .filter_map(|p| match p {
            Point::Circle(x) => Some(x),
            Point::Odometer(_) => None,
        })
        .collect();
    if ends.len() < 2 {
        return Ok(());
    }
    ends.sort_unstable();
    ends.dedup();
    for w in 0..ends.len() {
        let a = ends[w];
        let b = ends[(w + 1) % ends.len()];
        let d = fixed::circ_dist(a, b);
        if d != 0 && d <= sys.tol.eps_cmp {
            return Err(Error::BoundaryAmbiguous {
                context: format!("{context}: endpoints {} and {} are {:e} apart", fixed::to_decimal(a), fixed::to_decimal(b), fixed::to_f64(d)),
            });
        }
    }
    Ok(())
}

/// Validates that `Y` is closed with nonempty interior.
pub fn validate_y(sys: &System, y: &Region) -> Result<()> {
    if sys.is_empty(&sys.interior(y)) || sys.measure(y).is_zero() {
        return Err(Error::Config("Y requires non-empty interior".into()));
    }
    if &sys.closure(y) != y {
        return Err(Error::Config("Y must be closed".into()));
    }
    Ok(())
}

/// Computes `R_n = Y ∩ α^{-n}(Y) \ ∪_{0<j<n} α^{-j}(Y)` for `n = 1, 2, ...`
/// until the remainder of `Y` is empty.
pub fn first_return_partition(sys: &System, y: &Region) -> Result<TowerDecomposition> {
    validate_y(sys, y)?;
    let mut remaining = y.clone();
    let mut levels = Vec::new();
    for n in 1..=sys.tol.max_return {
        let pulled = sys.region_map(y, -(n as i64))?;
        check_separation(sys, &[&remaining, &pulled], &format!("return step {n}"))?;
        let hit = sys.intersect(&remaining, &pulled);
        if !sys.is_empty(&hit) {
            remaining = sys.difference(&remaining, &pulled);
            levels.push(TowerLevel { r: n, base_closure: sys.closure(&hit), base: hit });
        }
        if sys.is_empty(&remaining) {
            let total = levels.iter().fold(BigRational::zero(), |acc, l| {
                acc + sys.measure(&l.base) * BigRational::from_integer(l.r.into())
            });
            let covering_residual = (total - BigRational::from_integer(1.into())).abs();
            return Ok(TowerDecomposition { levels, covering_residual, horizon: sys.tol.max_return });
        }
    }
    Err(Error::MaxReturnExceeded { horizon: sys.tol.max_return })
}

impl TowerDecomposition {
    #[allow(non_snake_case)]
    pub fn K(&self) -> usize {
        self.levels.len()
    }

    pub fn heights(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.r).collect()
    }

    /// Level `k` (1-based).
    pub fn level(&self, k: usize) -> Result<&TowerLevel> {
        k.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .ok_or_else(|| Error::Precondition(format!("tower index {k} out of range 1..={}", self.levels.len())))
    }

    pub fn r(&self, k: usize) -> Result<u32> {
        Ok(self.level(k)?.r)
    }

    pub fn max_height(&self) -> u32 {
        self.levels.iter().map(|l| l.r).max().unwrap_or(0)
    }

    /// `closure(Y_k) \ Y_k`.
    pub fn glue_boundary(&self, sys: &System, k: usize) -> Result<Region> {
        let l = self.level(k)?;
        Ok(sys.difference(&l.base_closure, &l.base))
    }

    /// Points of the glue boundary; isolated points are returned exactly,
    /// positive-length parts are sampled.
    pub fn glue_points(&self, sys: &System, k: usize, samples: usize, seed: u64) -> Result<Vec<Point>> {
        let g = self.glue_boundary(sys, k)?;
        let Region::Arcs(set) = &g else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for c in set.components() {
            if c.is_point() {
                out.push(Point::Circle(c.a));
            } else {
                let piece = Region::Arcs(crate::dynsys::ArcSet::arc(c.a, c.b, c.left_closed, c.right_closed));
                out.extend(sys.sample(&piece, samples.max(1), seed)?);
            }
        }
        Ok(out)
    }

    /// The tower whose base contains `x`, if any.
    pub fn tower_of(&self, sys: &System, p: &Point) -> Result<Option<usize>> {
        for (i, l) in self.levels.iter().enumerate() {
            if sys.resolve(&l.base, p)? {
                return Ok(Some(i + 1));
            }
        }
        Ok(None)
    }

    pub fn describe(&self, sys: &System) -> TowersDescription {
        TowersDescription {
            k: self.K(),
            levels: self
                .levels
                .iter()
                .map(|l| {
                    let m = sys.measure(&l.base);
                    LevelDescription {
                        r: l.r,
                        base: sys.describe(&l.base),
                        base_closure: sys.describe(&l.base_closure),
                        measure_approx: m.to_f64().unwrap_or(f64::NAN),
                        measure: rational_string(&m),
                    }
                })
                .collect(),
            covering_residual: self.covering_residual.to_f64().unwrap_or(f64::NAN),
            covering_residual_exact: rational_string(&self.covering_residual),
            horizon: self.horizon,
        }
    }

    pub fn intervals(&self, sys: &System) -> Result<Vec<IntervalRow>> {
        let mut out = Vec::new();
        for (idx, l) in self.levels.iter().enumerate() {
            for i in 0..l.r {
                out.push(IntervalRow { k: idx + 1, i, region: sys.describe(&sys.region_map(&l.base, i as i64)?) });
            }
        }
        Ok(out)
    }
}

/// Checks disjointness and covering of the tower levels `α^i(Y_k)`, the
/// partition of `Y`, and `α^{r_k}(closure(Y_k)) ⊂ Y`.
pub fn validate_towers(sys: &System, y: &Region, d: &TowerDecomposition) -> Result<TowerValidation> {
    let mut union = sys.empty_region();
    let mut sum = BigRational::zero();
    let mut bases = sys.empty_region();
    let mut base_sum = BigRational::zero();
    let mut bases_in_y = true;
    let mut returns_in_y = true;
    let mut prefix_unions_closed = true;
    for l in &d.levels {
        let mu = sys.measure(&l.base);
        base_sum += mu.clone();
        bases = sys.union(&bases, &l.base);
        prefix_unions_closed &= sys.closure(&bases) == bases;
        bases_in_y &= sys.is_empty(&sys.difference(&l.base, y));
        let ret = sys.region_map(&l.base_closure, l.r as i64)?;
        returns_in_y &= sys.is_empty(&sys.difference(&ret, y));
        for i in 0..l.r {
            let img = sys.region_map(&l.base, i as i64)?;
            sum += mu.clone();
            union = sys.union(&union, &img);
        }
    }
    let disjoint = sum.clone() - sys.measure(&union);
    let covering = (sum - BigRational::from_integer(1.into())).abs();
    let partition = (base_sum - sys.measure(y)).abs() + (sys.measure(y) - sys.measure(&bases)).abs();
    let eps = eps_rational(sys);
    let passed = disjoint < eps && covering < eps && partition < eps && bases_in_y && returns_in_y;
    Ok(TowerValidation {
        disjointness_violation: disjoint.to_f64().unwrap_or(f64::NAN),
        covering_residual: covering.to_f64().unwrap_or(f64::NAN),
        covering_residual_exact: rational_string(&covering),
        partition_residual: partition.to_f64().unwrap_or(f64::NAN),
        bases_in_y,
        returns_in_y,
        prefix_unions_closed,
        passed,
    })
}

/// Pointwise oracle: iterate `α` until the orbit re-enters `Y`.
pub fn first_return_time(sys: &System, y: &Region, p: &Point) -> Result<u32> {
    let mut q = p.clone();
    for n in 1..=sys.tol.max_return {
        q = sys.apply(&q, 1)?;
        if sys.resolve(y, &q)? {
            return Ok(n);
        }
    }
    Err(Error::MaxReturnExceeded { horizon: sys.tol.max_return })
}

/// Successive first returns from `x ∈ closure(Y_k)` until they add up to `r_k`.
pub fn boundary_itinerary(sys: &System, d: &TowerDecomposition, k: usize, p: &Point) -> Result<BoundaryItinerary> {
    let level = d.level(k)?;
    if !sys.resolve(&level.base_closure, p)? {
        return Err(Error::Precondition(format!("point is not in the closure of Y_{k}")));
    }
    let rk = level.r;
    if sys.resolve(&level.base, p)? {
        return Ok(BoundaryItinerary { k, x: p.clone(), mu: vec![k], partial_sums: vec![0, rk] });
    }
    let mut mu = Vec::new();
    let mut sums = vec![0u32];
    let mut q = p.clone();
    let mut acc = 0u32;
    while acc < rk {
        let t = d.tower_of(sys, &q)?.ok_or_else(|| Error::BoundaryAmbiguous {
            context: format!("itinerary point at offset {acc} lies in no base"),
        })?;
        let rt = d.r(t)?;
        acc += rt;
        if acc > rk {
            return Err(Error::ItinerarySumMismatch { sum: acc, height: rk });
        }
        mu.push(t);
        sums.push(acc);
        q = sys.apply(&q, rt as i64)?;
    }
    Ok(BoundaryItinerary { k, x: p.clone(), mu, partial_sums: sums })
}

/// Smallest `1 ≤ n ≤ N` with `μ(Y ∩ α^n(Y)) > eps_cmp`, if any.
pub fn simplicity_certificate(sys: &System, y: &Region, n: u32) -> Result<SimplicityCertificate> {
    if n > sys.tol.max_return {
        return Err(Error::Precondition(format!("N = {n} exceeds the horizon {}", sys.tol.max_return)));
    }
    let eps = eps_rational(sys);
    for j in 1..=n {
        let img = sys.region_map(y, j as i64)?;
        if sys.measure(&sys.intersect(y, &img)) > eps {
            return Ok(SimplicityCertificate { empty_up_to: j - 1, first_hit: Some(j) });
        }
    }
    Ok(SimplicityCertificate { empty_up_to: n, first_hit: None })
}
