//! Assembly of the recursive subhomogeneous decomposition.

use serde::Serialize;

use super::{Model, Word};
use crate::dynsys::RegionDescription;
use crate::error::Result;
use crate::par::{fmax, Exec};

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub k: usize,
    pub r: usize,
    pub base: RegionDescription,
    pub glue_boundary: RegionDescription,
    pub boundary_points: usize,
    pub pullback_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Rsh {
    pub length: usize,
    pub matrix_sizes: Vec<usize>,
    pub base_spaces: Vec<RegionDescription>,
    pub stages: Vec<Stage>,
    pub max_pullback_residual: f64,
}

/// Stage data `(closure(Y_k), r_k, ∂)` and, for each word, the largest
/// pullback residual at the glue points of each stage.
pub fn assemble_rsh(model: &Model, words: &[Word], glue_samples: usize, seed: u64, exec: Exec) -> Result<Rsh> {
    let sys = model.sys();
    let mut stages = Vec::new();
    for k in 1..=model.towers_k() {
        let level = model.towers.level(k)?;
        let glue = model.towers.glue_boundary(sys, k)?;
        let pts = model.towers.glue_points(sys, k, glue_samples, seed)?;
        let jobs: Vec<(usize, usize)> = (0..words.len()).flat_map(|w| (0..pts.len()).map(move |p| (w, p))).collect();
        let res = exec.try_map(&jobs, |&(w, p)| -> Result<f64> {
            Ok(model.boundary_decomposition_check(&words[w], k, &pts[p])?.residual())
        })?;
        stages.push(Stage {
            k,
            r: level.r as usize,
            base: sys.describe(&level.base_closure),
            glue_boundary: sys.describe(&glue),
            boundary_points: pts.len(),
            pullback_residual: res.into_iter().fold(0.0, fmax),
        });
    }
    Ok(Rsh {
        length: stages.len(),
        matrix_sizes: stages.iter().map(|s| s.r).collect(),
        base_spaces: stages.iter().map(|s| s.base.clone()).collect(),
        max_pullback_residual: stages.iter().map(|s| s.pullback_residual).fold(0.0, fmax),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Cover, LineBundle};
    use crate::dynsys::{fixed, System, Tolerances};
    use crate::rep::corpus;

    #[test]
    fn golden_sizes_and_pullbacks() {
        let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
        let sys = System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap();
        let y = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
        let b = LineBundle::circle_degree(sys, Cover::circle_default(), 1).unwrap();
        let m = Model::new(b, y).unwrap();
        let words = corpus::random_words(&m, 6, 2);
        let rsh = assemble_rsh(&m, &words, 4, 1, Exec::Parallel).unwrap();
        assert_eq!(rsh.matrix_sizes, vec![1, 2, 3]);
        assert!(rsh.max_pullback_residual < 1e-9, "{}", rsh.max_pullback_residual);
    }
}
