//! Sections of the endomorphism bundles `ℳ^{(n)} = End(𝒱^{(0)} ⊕ ... ⊕ 𝒱^{(n−1)})`
//! as matrix fields expressed in chart tuples.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::{LineBundle, C64};
use crate::dynsys::{Point, Region};
use crate::error::{Error, Result};
use crate::par::{fmax, Exec};
use crate::sections::tuples_at;

pub type Mat = DMatrix<C64>;
pub type FieldFn = dyn Fn(&Point, &[usize]) -> Result<Mat> + Send + Sync;

/// An `n × n` matrix field over a region, evaluated in a chart tuple.
#[derive(Clone)]
pub struct MatrixField {
    pub size: usize,
    pub domain: Region,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixField({}x{})", self.size, self.size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Structure {
    Diagonal,
    Subdiagonal(usize),
    Superdiagonal(usize),
    General,
}

impl Structure {
    /// Row-minus-column offset of the occupied diagonal.
    pub fn offset(&self) -> Option<i64> {
        match *self {
            Structure::Diagonal => Some(0),
            Structure::Subdiagonal(m) => Some(m as i64),
            Structure::Superdiagonal(m) => Some(-(m as i64)),
            Structure::General => None,
        }
    }

    fn from_offset(o: i64) -> Self {
        match o {
            0 => Structure::Diagonal,
            o if o > 0 => Structure::Subdiagonal(o as usize),
            o => Structure::Superdiagonal((-o) as usize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureReport {
    pub kind: Structure,
    pub max_offstructure: f64,
    pub chart_independent: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartReport {
    pub chart_change_residual: f64,
    pub diagonal_residual: f64,
    pub overlap_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub lipschitz_estimate: f64,
    pub max_excess: f64,
    pub pairs: usize,
}

impl MatrixField {
    pub fn new(size: usize, domain: Region, f: impl Fn(&Point, &[usize]) -> Result<Mat> + Send + Sync + 'static) -> Self {
        MatrixField { size, domain, eval: Arc::new(f) }
    }

    pub fn identity(size: usize, domain: Region) -> Self {
        MatrixField::new(size, domain, move |_, _| Ok(Mat::identity(size, size)))
    }

    pub fn eval(&self, b: &LineBundle, p: &Point, u: &[usize]) -> Result<Mat> {
        if u.len() < self.size {
            return Err(Error::Precondition(format!("chart tuple shorter than matrix size {}", self.size)));
        }
        if !b.tuple_contains(&u[..self.size], p)? {
            return Err(Error::PointOutsideDomain { tuple: u[..self.size].to_vec() });
        }
        let m = (self.eval)(p, u)?;
        if m.nrows() != self.size || m.ncols() != self.size {
            return Err(Error::SizeMismatch { left: m.nrows(), right: self.size });
        }
        Ok(m)
    }

    pub fn eval_auto(&self, b: &LineBundle, p: &Point) -> Result<Mat> {
        let u = b.select_tuple(p, self.size)?;
        self.eval(b, p, &u)
    }

    fn compatible(&self, other: &MatrixField) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch { left: self.size, right: other.size });
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        self.compatible(other)?;
        let (a, c) = (self.eval.clone(), other.eval.clone());
        Ok(MatrixField::new(self.size, self.domain.clone(), move |p, u| Ok(a(p, u)? + c(p, u)?)))
    }

    pub fn mul(&self, other: &MatrixField) -> Result<MatrixField> {
        self.compatible(other)?;
        let (a, c) = (self.eval.clone(), other.eval.clone());
        Ok(MatrixField::new(self.size, self.domain.clone(), move |p, u| Ok(a(p, u)? * c(p, u)?)))
    }

    pub fn adjoint(&self) -> MatrixField {
        let a = self.eval.clone();
        MatrixField::new(self.size, self.domain.clone(), move |p, u| Ok(a(p, u)?.adjoint()))
    }

    pub fn scale(&self, c: C64) -> MatrixField {
        let a = self.eval.clone();
        MatrixField::new(self.size, self.domain.clone(), move |p, u| Ok(a(p, u)? * c))
    }

    /// Sampled sup of the operator norm.
    pub fn supnorm(&self, b: &LineBundle, points: &[Point], exec: Exec) -> Result<f64> {
        let norms = exec.try_map(points, |p| Ok::<_, Error>(op_norm(&self.eval_auto(b, p)?)))?;
        Ok(norms.into_iter().fold(0.0, fmax))
    }
}

/// Largest singular value.
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, fmax)
}

/// Entries `(1, g^{(1)}_{VU}(x), ..., g^{(n−1)}_{VU}(x))` of `u_{VU}(x)`.
pub fn transition_unitary(b: &LineBundle, p: &Point, u: &[usize], v: &[usize], n: usize) -> Result<Vec<C64>> {
    if u.len() < n || v.len() < n {
        return Err(Error::Precondition(format!("chart tuples shorter than {n}")));
    }
    if !b.tuple_contains(&u[..n], p)? {
        return Err(Error::PointOutsideDomain { tuple: u[..n].to_vec() });
    }
    if !b.tuple_contains(&v[..n], p)? {
        return Err(Error::PointOutsideDomain { tuple: v[..n].to_vec() });
    }
    let mut out = Vec::with_capacity(n);
    let mut acc = C64::new(1.0, 0.0);
    for l in 0..n {
        out.push(acc);
        if l + 1 < n {
            let q = b.system.apply(p, l as i64)?;
            acc *= b.transition(v[l], u[l], &q)?;
        }
    }
    Ok(out)
}

/// `u_{VU}(x) M u_{VU}(x)^*`.
pub fn change_chart(b: &LineBundle, m: &Mat, p: &Point, u: &[usize], v: &[usize]) -> Result<Mat> {
    let n = m.nrows();
    let d = transition_unitary(b, p, u, v, n)?;
    Ok(Mat::from_fn(n, n, |i, j| d[i] * m[(i, j)] * d[j].conj()))
}

/// Offsets (row minus column) of diagonals carrying an entry of modulus `≥ eps`,
/// with the largest modulus seen on each.
fn occupied(m: &Mat, eps: f64) -> Vec<(i64, f64)> {
    let mut out: Vec<(i64, f64)> = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let a = m[(i, j)].norm();
            if a >= eps || a.is_nan() {
                let o = i as i64 - j as i64;
                match out.iter_mut().find(|(k, _)| *k == o) {
                    Some(e) => e.1 = fmax(e.1, a),
                    None => out.push((o, a)),
                }
            }
        }
    }
    out
}

/// Largest entry off the diagonal with the given offset.
pub fn offstructure(m: &Mat, offset: i64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i as i64 - j as i64 != offset {
                worst = fmax(worst, m[(i, j)].norm());
            }
        }
    }
    worst
}

fn sample_field_points(b: &LineBundle, f: &MatrixField, samples: usize, seed: u64) -> Result<Vec<Point>> {
    b.system.sample(&f.domain, samples, seed)
}

/// Classifies a field as diagonal, `m`-th sub/superdiagonal, or general.
pub fn classify_structure(b: &LineBundle, f: &MatrixField, samples: usize, seed: u64, exec: Exec) -> Result<StructureReport> {
    let eps = b.system.tol.eps_alg;
    let points = sample_field_points(b, f, samples, seed)?;
    let per_point = exec.try_map(&points, |p| -> Result<(Mat, bool)> {
        let base = f.eval_auto(b, p)?;
        let mut same = true;
        let pattern: Vec<i64> = occupied(&base, eps).into_iter().map(|(o, _)| o).collect();
        for (t, _) in tuples_at(b, p, f.size, false)? {
            let m = f.eval(b, p, &t)?;
            let mut other: Vec<i64> = occupied(&m, eps).into_iter().map(|(o, _)| o).collect();
            other.sort_unstable();
            let mut mine = pattern.clone();
            mine.sort_unstable();
            same &= mine == other;
        }
        Ok((base, same))
    })?;
    let mut mass: Vec<(i64, f64)> = Vec::new();
    for (m, _) in &per_point {
        for (o, a) in occupied(m, eps) {
            match mass.iter_mut().find(|(k, _)| *k == o) {
                Some(e) => e.1 = fmax(e.1, a),
                None => mass.push((o, a)),
            }
        }
    }
    let chart_independent = per_point.iter().all(|(_, s)| *s);
    let (kind, offset) = match mass.as_slice() {
        [] => (Structure::Diagonal, 0),
        [(o, _)] => (Structure::from_offset(*o), *o),
        _ => {
            let (o, _) = mass.iter().copied().fold((0, -1.0), |best, e| if e.1 > best.1 { e } else { best });
            (Structure::General, o)
        }
    };
    let max_offstructure = per_point.iter().map(|(m, _)| offstructure(m, offset)).fold(0.0, fmax);
    Ok(StructureReport { kind, max_offstructure, chart_independent, samples: points.len() })
}

/// Chart-change law and diagonal invariance at points lying in several tuples.
pub fn chart_report(b: &LineBundle, f: &MatrixField, points: &[Point], exec: Exec) -> Result<ChartReport> {
    let rows = exec.try_map(points, |p| -> Result<(f64, f64, bool)> {
        let tuples = tuples_at(b, p, f.size, false)?;
        let Some((u, _)) = tuples.first() else { return Ok((0.0, 0.0, false)) };
        let mu = f.eval(b, p, u)?;
        let mut law: f64 = 0.0;
        let mut diag: f64 = 0.0;
        for (v, _) in &tuples[1..] {
            let mv = f.eval(b, p, v)?;
            law = fmax(law, op_norm(&(&mv - change_chart(b, &mu, p, u, v)?)));
            for i in 0..f.size {
                diag = fmax(diag, (mv[(i, i)] - mu[(i, i)]).norm());
            }
        }
        Ok((law, diag, tuples.len() > 1))
    })?;
    Ok(ChartReport {
        chart_change_residual: rows.iter().map(|r| r.0).fold(0.0, fmax),
        diagonal_residual: rows.iter().map(|r| r.1).fold(0.0, fmax),
        overlap_samples: rows.iter().filter(|r| r.2).count(),
    })
}

/// Advisory continuity probe on nearby sample pairs (same chart tuple).
pub fn continuity_probe(b: &LineBundle, f: &MatrixField, samples: usize, seed: u64) -> Result<ContinuityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_field_points(b, f, samples, rng.random())?;
    let mut ratios = Vec::new();
    let mut pairs = Vec::new();
    for p in &points {
        let Point::Circle(x) = p else { continue };
        let step = 1u128 << (100 + rng.random_range(0..16));
        let q = Point::Circle(x.wrapping_add(step));
        if b.system.membership(&f.domain, &q, b.system.tol.eps_cmp) != crate::dynsys::Membership::In {
            continue;
        }
        let u = b.select_tuple(p, f.size)?;
        if !b.tuple_contains(&u[..f.size], &q)? {
            continue;
        }
        let jump = op_norm(&(f.eval(b, p, &u)? - f.eval(b, &q, &u)?));
        let dist = crate::dynsys::fixed::to_f64(step);
        ratios.push(jump / dist);
        pairs.push((jump, dist));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let l = sorted.get(sorted.len() * 9 / 10).copied().unwrap_or(0.0);
    let eps = b.system.tol.eps_alg;
    let max_excess = pairs.iter().map(|(j, d)| (j - l * d - eps).max(0.0)).fold(0.0, fmax);
    Ok(ContinuityReport { lipschitz_estimate: l, max_excess, pairs: pairs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Cover;
    use crate::dynsys::{fixed, System, Tolerances};

    fn setup() -> LineBundle {
        let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
        let sys = System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap();
        LineBundle::circle_degree(sys, Cover::circle_default(), 1).unwrap()
    }

    fn at(s: &str) -> Point {
        Point::Circle(fixed::parse_decimal(s).unwrap())
    }

    #[test]
    fn unitary_shapes() {
        let b = setup();
        let x = at("0.9");
        assert_eq!(transition_unitary(&b, &x, &[0], &[1], 1).unwrap(), vec![C64::new(1.0, 0.0)]);
        let d = transition_unitary(&b, &x, &[0, 0, 0], &[1, 1, 0], 3).unwrap();
        let g1 = b.tensor_transition(1, &[1, 1, 0], &[0, 0, 0], &x).unwrap();
        let g2 = b.tensor_transition(2, &[1, 1, 0], &[0, 0, 0], &x).unwrap();
        assert_eq!(d[0], C64::new(1.0, 0.0));
        assert!((d[1] - g1).norm() < 1e-15 && (d[2] - g2).norm() < 1e-15);
        assert!(d.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn conjugation_rules() {
        let b = setup();
        let x = at("0.9");
        let u = [0, 0];
        let v = [1, 1];
        let diag = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.0, 3.0)]));
        assert!((change_chart(&b, &diag, &x, &u, &v).unwrap() - &diag).norm() < 1e-15);
        let mut e10 = Mat::zeros(2, 2);
        e10[(1, 0)] = C64::new(1.0, 0.0);
        let c = change_chart(&b, &e10, &x, &u, &v).unwrap();
        let g1 = b.transition(1, 0, &x).unwrap();
        assert!((c[(1, 0)] - g1).norm() < 1e-15);
        assert_eq!(offstructure(&c, 1), 0.0);
        let back = change_chart(&b, &c, &x, &v, &u).unwrap();
        assert!((back - e10).norm() < 1e-12);
    }

    #[test]
    fn norms() {
        let b = setup();
        let id = MatrixField::identity(3, b.system.full_region());
        let pts = b.random_points(10, 1).unwrap();
        assert!((id.supnorm(&b, &pts, Exec::Sequential).unwrap() - 1.0).abs() < 1e-12);
        let m = Mat::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let mm = m.adjoint() * &m;
        assert!((op_norm(&mm) - op_norm(&m).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn classification() {
        let b = setup();
        let dom = b.system.full_region();
        let sub = MatrixField::new(3, dom.clone(), |p, _| {
            let Point::Circle(x) = p else { unreachable!() };
            let mut m = Mat::zeros(3, 3);
            m[(1, 0)] = C64::new(1.0 + fixed::to_f64(*x), 0.0);
            m[(2, 1)] = C64::new(0.5, 0.0);
            Ok(m)
        });
        let rep = classify_structure(&b, &sub, 50, 2, Exec::Sequential).unwrap();
        assert_eq!(rep.kind, Structure::Subdiagonal(1));
        let diag = MatrixField::identity(3, dom);
        assert_eq!(classify_structure(&b, &diag, 20, 2, Exec::Sequential).unwrap().kind, Structure::Diagonal);
        let mixed = sub.add(&diag).unwrap();
        assert_eq!(classify_structure(&b, &mixed, 20, 2, Exec::Sequential).unwrap().kind, Structure::General);
        assert_eq!(sub.add(&MatrixField::identity(2, b.system.full_region())).unwrap_err(), Error::SizeMismatch { left: 3, right: 2 });
    }
}
