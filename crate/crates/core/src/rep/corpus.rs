//! Seeded corpora of atoms, words and target fields.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Model, Word};
use crate::bundle::C64;
use crate::dynsys::Region;
use crate::endo::{Mat, MatrixField};
use crate::error::Result;
use crate::sections::{psi_eval, ElementaryTensor, ScalarFn, Section};

/// A short random trigonometric polynomial `Σ c_n e^{2πi(φ_n + n t)}`.
pub fn random_trig(rng: &mut impl Rng, terms: usize) -> ScalarFn {
    let mut f = ScalarFn::Const(C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    for _ in 0..terms {
        let d = rng.random_range(-3i32..=3) as f64;
        let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.5;
        f = f + ScalarFn::Const(c) * ScalarFn::Phase { c: rng.random(), d };
    }
    f
}

/// Level-1 sections before projection: the generators `η_j` and glued
/// phase sections.
pub fn raw_generators(model: &Model) -> Vec<Section> {
    let b = &model.bundle;
    let mut out: Vec<Section> = (0..b.charts()).map(Section::generator).collect();
    out.push(Section::glued(b, |_| ScalarFn::constant(1.0)));
    out.push(Section::glued(b, |j| ScalarFn::Phase { c: 0.25 * j as f64, d: 1.0 }));
    out.push(Section::glued(b, |j| ScalarFn::Phase { c: 0.1, d: -2.0 } * ScalarFn::constant(0.5 + j as f64)));
    out
}

/// Projected generators, elements of `ℰ_Y`.
pub fn generators(model: &Model) -> Vec<Section> {
    raw_generators(model).iter().map(|s| model.project(s)).collect()
}

/// Continuous test functions.
pub fn functions() -> Vec<ScalarFn> {
    vec![
        ScalarFn::constant(1.0),
        ScalarFn::Phase { c: 0.0, d: 1.0 },
        ScalarFn::Phase { c: 0.3, d: -2.0 } + ScalarFn::constant(0.5),
        ScalarFn::Phase { c: 0.1, d: 3.0 } * ScalarFn::Phase { c: 0.7, d: 1.0 }.conj(),
    ]
}

/// Generator pairs for the covariance suite.
pub fn generator_pairs(model: &Model) -> Vec<(Section, Section)> {
    let g = generators(model);
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i..g.len() {
            if (i + j) % 2 == 0 || i == j {
                out.push((g[i].clone(), g[j].clone()));
            }
        }
    }
    out
}

/// Atom words: functions and projected generators.
pub fn atoms(model: &Model) -> (Vec<Word>, Vec<Word>) {
    let fns = functions().into_iter().map(Word::func).collect();
    let gens = generators(model).into_iter().map(Word::Gen).collect();
    (fns, gens)
}

/// A random homogeneous word of the given degree, interleaving generators,
/// adjoint generators and functions.
pub fn homogeneous_word(model: &Model, degree: i64, rng: &mut impl Rng) -> Word {
    let (fns, gens) = atoms(model);
    let extra = rng.random_range(0..=1usize);
    let ups = degree.max(0) as usize + extra;
    let downs = (-degree).max(0) as usize + extra;
    let mut factors: Vec<Word> = Vec::new();
    for _ in 0..ups {
        factors.push(gens.choose(rng).expect("nonempty").clone());
    }
    for _ in 0..downs {
        factors.push(gens.choose(rng).expect("nonempty").adj());
    }
    for _ in 0..rng.random_range(0..=2usize) {
        factors.push(fns.choose(rng).expect("nonempty").clone());
    }
    if factors.is_empty() {
        factors.push(fns.choose(rng).expect("nonempty").clone());
    }
    for i in (1..factors.len()).rev() {
        factors.swap(i, rng.random_range(0..=i));
    }
    let scale = C64::new(rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5));
    factors[1..].iter().fold(factors[0].clone(), |acc, w| acc.mul(w)).scale(scale)
}

/// `count` seeded words, mixing homogeneous products and inhomogeneous sums.
pub fn random_words(model: &Model, count: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let d = rng.random_range(-2i64..=3);
            let w = homogeneous_word(model, d, &mut rng);
            if i % 3 == 2 {
                let d2 = rng.random_range(-1i64..=2);
                w.add(&homogeneous_word(model, d2, &mut rng))
            } else {
                w
            }
        })
        .collect()
}

/// A random `m`-th subdiagonal (diagonal for `m = 0`) section of `ℳ_k` over
/// `closure(Y_k)`, vanishing on the glue boundary. Entry `(i+m, i)` is
/// `h_i(x) σ(α^i x)` for a fixed section `σ` of `𝒱^{(m)}` and independent
/// scalar functions `h_i`.
pub fn random_target(model: &Model, k: usize, m: usize, seed: u64) -> Result<MatrixField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = model.towers.level(k)?.clone();
    let r = level.r as usize;
    let hs: Vec<ScalarFn> = (0..r).map(|_| random_trig(&mut rng, 2)).collect();
    let raw = raw_generators(model);
    let sigma = if m == 0 {
        None
    } else {
        let factors = (0..m).map(|_| raw.choose(&mut rng).expect("nonempty").clone()).collect();
        Some(ElementaryTensor::product(factors)?)
    };
    let glue = model.towers.glue_boundary(model.sys(), k)?;
    let vanish = if model.sys().is_empty(&glue) {
        ScalarFn::constant(1.0)
    } else {
        ScalarFn::cutoff(glue, 0.02)
    };
    let me = model.clone();
    Ok(MatrixField::new(r, level.base_closure, move |p, u| {
        let mut out = Mat::zeros(r, r);
        let v = vanish.eval(&me.bundle, p)?;
        if v == C64::new(0.0, 0.0) || m >= r {
            return Ok(out);
        }
        for i in 0..r - m {
            let q = me.sys().apply(p, i as i64)?;
            let s = match &sigma {
                None => C64::new(1.0, 0.0),
                Some(t) => psi_eval(&me.bundle, t, &q, &u[i..i + m])?,
            };
            out[(i + m, i)] = hs[i].eval(&me.bundle, p)? * s * v;
        }
        Ok(out)
    }))
}

/// A diagonal target `diag(f(x), f(αx), ...)` along tower `k`.
pub fn diagonal_of(model: &Model, k: usize, f: ScalarFn) -> Result<MatrixField> {
    let level = model.towers.level(k)?.clone();
    let r = level.r as usize;
    let me = model.clone();
    Ok(MatrixField::new(r, level.base_closure, move |p, _| {
        let mut out = Mat::zeros(r, r);
        for i in 0..r {
            out[(i, i)] = f.eval(&me.bundle, &me.sys().apply(p, i as i64)?)?;
        }
        Ok(out)
    }))
}

/// Sample points of the whole base space, for global checks.
pub fn full_points(model: &Model, count: usize, seed: u64) -> Result<Vec<crate::dynsys::Point>> {
    let full: Region = model.sys().full_region();
    model.sys().sample(&full, count, seed)
}
