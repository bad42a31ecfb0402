//! Lifting structured fields over `closure(Y_k)` to words in the generators.
//!
//! A diagonal or `m`-th subdiagonal target determines a section `G` of
//! `𝒱^{(m)}` on the levels `α^i(closure(Y_k))`, `i < r_k − m`. `G` is set to
//! zero on `α^{-1}(Y) ∪ ... ∪ α^{-m}(Y)` and on the lower towers, and extended
//! across the remaining gaps by a smoothstep decay from the nearest anchor.
//! The word is then `Σ_I Gen(η_{i_1} s_1) ⋯ Gen(η_{i_m} s_m)` with
//! `f_I = ⟨ψ(η_I), G⟩`, `s_l = |f_I ∘ α^{-(m−l)}|^{1/m}` for `l < m` and
//! `s_m = f_I |f_I|^{-(m−1)/m}`.

use std::sync::Arc;

use serde::Serialize;

use super::{Model, Word};
use crate::bundle::{smoothstep, C64};
use crate::dynsys::{fixed, ArcSet, Point, Region};
use crate::endo::{classify_structure, op_norm, MatrixField, Structure};
use crate::error::{Error, Result};
use crate::par::{fmax, Exec};
use crate::sections::{psi_eval, tuples_at, ElementaryTensor, ScalarFn, Section};

#[derive(Debug, Clone)]
pub struct Lift {
    pub word: Word,
    pub report: LiftReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftReport {
    pub round_trip: f64,
    pub earlier_stages: f64,
    pub samples: usize,
}

/// Value of `G` at a gap endpoint: coefficient `s` in tuple `tuple`, and the
/// decay length `delta`.
#[derive(Debug, Clone)]
struct EndValue {
    tuple: Vec<usize>,
    s: C64,
    delta: f64,
}

#[derive(Debug, Clone)]
struct Gap {
    set: ArcSet,
    a: u128,
    b: u128,
    ends: [Option<EndValue>; 2],
}

/// The glued section `G` of `𝒱^{(m)}`.
#[derive(Clone)]
struct Glued {
    model: Model,
    m: usize,
    r: usize,
    target: MatrixField,
    zero_set: Region,
    anchors: Vec<Region>,
    gaps: Vec<Gap>,
}

impl Glued {
    fn new(model: &Model, k: usize, m: usize, target: &MatrixField) -> Result<Self> {
        let sys = model.sys();
        let r = model.r(k)?;
        let mut zero_set = sys.empty_region();
        for l in 1..=m {
            zero_set = sys.union(&zero_set, &sys.region_map(&model.y, -(l as i64))?);
        }
        for t in 1..k {
            let lv = model.towers.level(t)?;
            for j in 0..lv.r {
                zero_set = sys.union(&zero_set, &sys.region_map(&lv.base_closure, j as i64)?);
            }
        }
        let closure_k = &model.towers.level(k)?.base_closure;
        let anchors = (0..r - m).map(|i| sys.region_map(closure_k, i as i64)).collect::<Result<Vec<_>>>()?;
        let mut g = Glued { model: model.clone(), m, r, target: target.clone(), zero_set, anchors, gaps: Vec::new() };
        g.gaps = g.build_gaps()?;
        Ok(g)
    }

    fn build_gaps(&self) -> Result<Vec<Gap>> {
        let sys = self.model.sys();
        let known = self.anchors.iter().fold(self.zero_set.clone(), |acc, a| sys.union(&acc, a));
        let Region::Arcs(rest) = sys.complement(&known) else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for c in rest.components() {
            if c.is_point() {
                continue;
            }
            let len = fixed::to_f64(c.length_units());
            let set = ArcSet::arc(c.a, c.b, c.left_closed, c.right_closed);
            let ends = [self.end_value(c.a, len)?, self.end_value(c.b, len)?];
            out.push(Gap { set, a: c.a, b: c.b, ends });
        }
        Ok(out)
    }

    fn end_value(&self, e: u128, gap_len: f64) -> Result<Option<EndValue>> {
        let b = &self.model.bundle;
        let p = Point::Circle(e);
        let Some((tuple, s)) = self.anchor_value(&p, None)? else { return Ok(None) };
        if s == C64::new(0.0, 0.0) {
            return Ok(None);
        }
        // widest tuple around e
        let mut best = (tuple.clone(), s, 0.0f64);
        for (t, _) in tuples_at(b, &p, self.m, false)? {
            let dom = b.tuple_domain(&t)?;
            let margin = b.system.distance_to(&b.system.complement(&dom), &p);
            if margin > best.2 {
                let st = if self.m == 0 { s } else { b.tensor_transition(self.m, &t, &tuple, &p)? * s };
                best = (t, st, margin);
            }
        }
        if self.m == 0 {
            best.2 = f64::INFINITY;
        }
        Ok(Some(EndValue { tuple: best.0, s: best.1, delta: (gap_len / 2.0).min(best.2) }))
    }

    /// Zero set first, then the anchor levels; `None` when the point lies in a gap.
    /// The coefficient is returned in `v` if given, else in the anchor's own tuple.
    fn anchor_value(&self, z: &Point, v: Option<&[usize]>) -> Result<Option<(Vec<usize>, C64)>> {
        let sys = self.model.sys();
        let b = &self.model.bundle;
        if sys.contains(&self.zero_set, z) {
            return Ok(Some((v.map(<[usize]>::to_vec).unwrap_or_default(), C64::new(0.0, 0.0))));
        }
        for (i, a) in self.anchors.iter().enumerate() {
            if !sys.contains(a, z) {
                continue;
            }
            let x = sys.apply(z, -(i as i64))?;
            let ux = b.select_tuple(&x, self.r)?;
            let s = self.target.eval(b, &x, &ux)?[(i + self.m, i)];
            let own = ux[i..i + self.m].to_vec();
            return Ok(Some(match v {
                Some(v) if self.m > 0 => (v.to_vec(), b.tensor_transition(self.m, v, &own, z)? * s),
                _ => (own, s),
            }));
        }
        Ok(None)
    }

    fn eval(&self, z: &Point, v: &[usize]) -> Result<C64> {
        if let Some((_, s)) = self.anchor_value(z, Some(v))? {
            return Ok(s);
        }
        let Point::Circle(x) = *z else { return Ok(C64::new(0.0, 0.0)) };
        let b = &self.model.bundle;
        let Some(gap) = self.gaps.iter().find(|g| g.set.contains(x)) else { return Ok(C64::new(0.0, 0.0)) };
        let da = fixed::to_f64(x.wrapping_sub(gap.a));
        let db = fixed::to_f64(gap.b.wrapping_sub(x));
        let (d, end) = if da <= db { (da, &gap.ends[0]) } else { (db, &gap.ends[1]) };
        let Some(end) = end else { return Ok(C64::new(0.0, 0.0)) };
        if d >= end.delta {
            return Ok(C64::new(0.0, 0.0));
        }
        let decay = smoothstep(1.0 - d / end.delta);
        let g = if self.m == 0 { C64::new(1.0, 0.0) } else { b.tensor_transition(self.m, v, &end.tuple, z)? };
        Ok(g * end.s * decay)
    }
}

fn max_entry(model: &Model, f: &MatrixField, points: &[Point], exec: Exec) -> Result<f64> {
    let b = &model.bundle;
    let vals = exec.try_map(points, |p| -> Result<f64> {
        let m = f.eval_auto(b, p)?;
        Ok(m.iter().map(|z| z.norm()).fold(0.0, fmax))
    })?;
    Ok(vals.into_iter().fold(0.0, fmax))
}

/// Lifts a diagonal (`m = 0`) or `m`-th subdiagonal field over
/// `closure(Y_k)` to a word, and verifies the round trip.
pub fn lift_section(
    model: &Model,
    k: usize,
    target: &MatrixField,
    m: usize,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Lift> {
    let sys = model.sys();
    let r = model.r(k)?;
    let eps = sys.tol.eps_alg;
    if target.size != r {
        return Err(Error::SizeMismatch { left: target.size, right: r });
    }
    let stage_pts = model.stage_points(k, samples, seed)?;
    let is_zero = max_entry(model, target, &stage_pts, exec)? < eps;
    let word = if is_zero || m >= r {
        if !is_zero {
            return Err(Error::StructureMismatch(format!("a degree-{m} field at stage {k} must vanish (r_k = {r})")));
        }
        Word::zero()
    } else {
        let rep = classify_structure(&model.bundle, target, samples, seed, exec)?;
        let expected = if m == 0 { Structure::Diagonal } else { Structure::Subdiagonal(m) };
        if rep.kind != expected {
            return Err(Error::StructureMismatch(format!("expected {expected:?}, found {:?}", rep.kind)));
        }
        if k > 1 {
            let glue = model.towers.glue_points(sys, k, samples.min(64), seed)?;
            let residual = max_entry(model, target, &glue, exec)?;
            if residual > eps {
                return Err(Error::VanishingPreconditionViolated { residual });
            }
        }
        build_word(model, k, m, target)?
    };
    let round_trip = exec
        .try_map(&stage_pts, |p| -> Result<f64> {
            let u = model.tuple(k, p)?;
            Ok(op_norm(&(model.evaluate_word(&word, p, k, &u)? - target.eval(&model.bundle, p, &u)?)))
        })?
        .into_iter()
        .fold(0.0, fmax);
    let mut earlier: f64 = 0.0;
    let mut count = stage_pts.len();
    for t in 1..k {
        let pts = model.stage_points(t, samples, seed.wrapping_add(t as u64))?;
        count += pts.len();
        let worst = exec
            .try_map(&pts, |p| Ok::<_, Error>(op_norm(&model.evaluate_auto(&word, p, t)?)))?
            .into_iter()
            .fold(0.0, fmax);
        earlier = fmax(earlier, worst);
    }
    Ok(Lift { word, report: LiftReport { round_trip, earlier_stages: earlier, samples: count } })
}

fn build_word(model: &Model, k: usize, m: usize, target: &MatrixField) -> Result<Word> {
    let g = Arc::new(Glued::new(model, k, m, target)?);
    if m == 0 {
        let gg = g.clone();
        return Ok(Word::func(ScalarFn::custom(move |p| gg.eval(p, &[]))));
    }
    let level = m;
    let section = {
        let gg = g.clone();
        Section::custom(level, move |p, v| gg.eval(p, v))
    };
    if m == 1 {
        return Word::gen(section);
    }
    let b = &model.bundle;
    let n = b.charts();
    let mut total: Option<Word> = None;
    for idx in 0..n.pow(m as u32) {
        let multi: Vec<usize> = (0..m).map(|l| (idx / n.pow((m - 1 - l) as u32)) % n).collect();
        let eta = ElementaryTensor::product(multi.iter().map(|&j| Section::generator(j)).collect())?;
        let f_i = {
            let (b, g, eta) = (b.clone(), g.clone(), eta.clone());
            Arc::new(move |p: &Point| -> Result<C64> {
                let v = b.select_tuple(p, m)?;
                let e = psi_eval(&b, &eta, p, &v)?;
                if e == C64::new(0.0, 0.0) {
                    return Ok(e);
                }
                Ok(e.conj() * g.eval(p, &v)?)
            })
        };
        let mut product: Option<Word> = None;
        for (l, &j) in multi.iter().enumerate() {
            let l1 = l + 1;
            let back = -((m - l1) as i64);
            let f_i = f_i.clone();
            let sys = model.sys().clone();
            let s = ScalarFn::custom(move |z| {
                let f = f_i(&sys.apply(z, back)?)?;
                let a = f.norm();
                if a == 0.0 {
                    return Ok(C64::new(0.0, 0.0));
                }
                Ok(if l1 < m { C64::new(a.powf(1.0 / m as f64), 0.0) } else { f * a.powf(-((m - 1) as f64) / m as f64) })
            });
            let atom = Word::Gen(Section::generator(j).right_mul(s));
            product = Some(match product {
                None => atom,
                Some(w) => w.mul(&atom),
            });
        }
        let product = product.expect("m >= 2");
        total = Some(match total {
            None => product,
            Some(w) => w.add(&product),
        });
    }
    Ok(total.expect("at least one chart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Cover, LineBundle};
    use crate::dynsys::{System, Tolerances};
    use crate::rep::corpus;

    fn golden_model(degree: i64) -> Model {
        let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
        let sys = System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap();
        let y = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let b = LineBundle::circle_degree(sys, Cover::circle_default(), degree).unwrap();
        Model::new(b, y).unwrap()
    }

    #[test]
    fn zero_target_gives_zero_word() {
        let m = golden_model(1);
        let zero = MatrixField::new(3, m.towers.level(3).unwrap().base_closure.clone(), |_, _| Ok(crate::endo::Mat::zeros(3, 3)));
        let lift = lift_section(&m, 3, &zero, 1, 20, 1, Exec::Sequential).unwrap();
        assert!(lift.report.round_trip == 0.0);
    }

    #[test]
    fn diagonal_round_trip_on_first_tower() {
        let m = golden_model(1);
        let f = ScalarFn::Phase { c: 0.2, d: 1.0 } + ScalarFn::constant(0.3);
        let target = corpus::diagonal_of(&m, 1, f.clone()).unwrap();
        let lift = lift_section(&m, 1, &target, 0, 50, 3, Exec::Sequential).unwrap();
        assert!(lift.report.round_trip < 1e-9, "{:?}", lift.report);
        let Word::Fn(g) = &lift.word else { panic!("expected a function") };
        let x = Point::Circle(fixed::parse_decimal("0.45").unwrap());
        assert!((g.eval(&m.bundle, &x, &[]).unwrap() - f.eval(&m.bundle, &x).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn subdiagonal_round_trips() {
        let m = golden_model(1);
        for (k, deg) in [(2, 1), (3, 1), (3, 2), (3, 0)] {
            let target = corpus::random_target(&m, k, deg, 11 + k as u64).unwrap();
            let lift = lift_section(&m, k, &target, deg, 60, 5, Exec::Parallel).unwrap();
            assert!(lift.report.round_trip < 1e-9, "k={k} m={deg} {:?}", lift.report);
            assert!(lift.report.earlier_stages < 1e-9, "k={k} m={deg} {:?}", lift.report);
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let m = golden_model(1);
        let id = MatrixField::identity(3, m.towers.level(3).unwrap().base_closure.clone());
        assert!(matches!(lift_section(&m, 3, &id, 0, 20, 1, Exec::Sequential), Err(Error::VanishingPreconditionViolated { .. })));
        assert!(matches!(lift_section(&m, 3, &id, 1, 20, 1, Exec::Sequential), Err(Error::StructureMismatch(_))));
    }
}
