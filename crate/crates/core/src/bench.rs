//! Timing of the naive and reduced `ε·ε` contraction paths.

use std::time::Instant;

use crate::analysis::{curvature_with, Curvature};
use crate::embedding::Surface;
use crate::error::GeometryError;
use crate::poisson::DensityChoice;
use crate::tensor::{Contraction, TensorError};

/// Largest allowed relative disagreement between the two paths.
pub const AGREEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub m: usize,
    pub points: usize,
    pub repetitions: usize,
    pub naive_ns: f64,
    pub reduced_ns: f64,
    /// Terms visited per `ε·ε` evaluation.
    pub naive_work: u64,
    pub reduced_work: u64,
    pub max_disagreement: f64,
}

impl BenchReport {
    /// `naive / reduced`; above 1 when the reduced path is faster.
    pub fn ratio(&self) -> f64 {
        self.naive_ns / self.reduced_ns
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Cap(#[from] TensorError),
    #[error("at (u, v) = ({}, {}): {source}", at[0], at[1])]
    Geometry { at: [f64; 2], source: GeometryError },
    #[error("contraction paths disagree at (u, v) = ({}, {}): relative difference {diff:e}", at[0], at[1])]
    Mismatch { at: [f64; 2], diff: f64 },
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Checks both paths agree at every point, then reports the median (over
/// repetitions) time per point of each. Runs single-threaded.
pub fn run_bench(
    surface: &Surface,
    points: &[[f64; 2]],
    density: &DensityChoice,
    cap: usize,
    repetitions: usize,
) -> Result<BenchReport, BenchError> {
    let m = surface.sig.dim();
    Contraction::Naive.check_cap(m, cap)?;
    let mut embs = Vec::with_capacity(points.len());
    let mut max_disagreement = 0.0f64;
    for &at in points {
        let geo = |source| BenchError::Geometry { at, source };
        let emb = surface.eval(at).map_err(geo)?;
        let naive: Curvature<f64> = curvature_with(&emb, density, Contraction::Naive, cap).map_err(geo)?;
        let reduced = curvature_with(&emb, density, Contraction::Reduced, cap).map_err(geo)?;
        let diff = naive.distance(&reduced);
        if !(diff <= AGREEMENT_TOL) {
            return Err(BenchError::Mismatch { at, diff });
        }
        max_disagreement = max_disagreement.max(diff);
        embs.push(emb);
    }

    let repetitions = repetitions.max(1);
    let time = |c: Contraction| -> Vec<f64> {
        (0..repetitions)
            .map(|_| {
                let start = Instant::now();
                for emb in &embs {
                    std::hint::black_box(curvature_with(emb, density, c, cap).ok());
                }
                start.elapsed().as_nanos() as f64 / embs.len().max(1) as f64
            })
            .collect()
    };
    let naive_ns = median(time(Contraction::Naive));
    let reduced_ns = median(time(Contraction::Reduced));
    Ok(BenchReport {
        m,
        points: points.len(),
        repetitions,
        naive_ns,
        reduced_ns,
        naive_work: Contraction::Naive.work_per_call(m),
        reduced_work: Contraction::Reduced.work_per_call(m),
        max_disagreement,
    })
}
