//! Gram–Schmidt for diagonal indefinite metrics, over order-1 jets.
//!
//! The pivot choice at each step is made on the values only. With the pivots
//! fixed, the output is a smooth function of the inputs near the evaluation
//! point, so the jet gradients are the exact parameter derivatives of a local
//! pseudo-orthonormal frame.

use crate::jets::Jet1;
use crate::scalar::Real;

pub(crate) type JetVec<T> = Vec<Jet1<T>>;

pub(crate) fn inner<T: Real>(metric: &[i8], a: &[Jet1<T>], b: &[Jet1<T>]) -> Jet1<T> {
    metric
        .iter()
        .zip(a.iter().zip(b))
        .map(|(s, (x, y))| (*x * *y).scale(T::sign_of(*s)))
        .sum()
}

pub(crate) fn values<T: Real>(v: &[Jet1<T>]) -> Vec<T> {
    v.iter().map(|j| j.value).collect()
}

fn euclid_sq<T: Real>(v: &[Jet1<T>]) -> T {
    v.iter().map(|j| j.value * j.value).sum()
}

fn axpy<T: Real>(y: &mut [Jet1<T>], k: Jet1<T>, x: &[Jet1<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + k * *xi;
    }
}

pub(crate) struct GsOutcome<T> {
    pub vectors: Vec<JetVec<T>>,
    pub signs: Vec<i8>,
    /// Step at which no admissible pivot remained, if the run stopped early.
    pub stalled_at: Option<usize>,
}

struct Pivot<T> {
    ratio: T,
    vector: JetVec<T>,
    norm: Jet1<T>,
}

/// Removes the components along the accepted vectors (twice, for stability).
fn project_out<T: Real>(metric: &[i8], c: &[Jet1<T>], basis: &[JetVec<T>], signs: &[i8]) -> JetVec<T> {
    let mut w = c.to_vec();
    for _ in 0..2 {
        for (n, s) in basis.iter().zip(signs) {
            let k = -inner(metric, &w, n).scale(T::sign_of(*s));
            axpy(&mut w, k, n);
        }
    }
    w
}

fn score<T: Real>(metric: &[i8], w: JetVec<T>, reference: T, null_tol: T) -> Option<Pivot<T>> {
    let e2 = euclid_sq(&w);
    // vanished under projection: not a new direction
    if !(e2 > T::lit(1e-14) * reference) {
        return None;
    }
    let norm = inner(metric, &w, &w);
    let ratio = norm.value.abs() / e2;
    (ratio > null_tol).then_some(Pivot {
        ratio,
        vector: w,
        norm,
    })
}

fn better<T: Real>(best: Option<Pivot<T>>, cand: Option<Pivot<T>>) -> Option<Pivot<T>> {
    match (best, cand) {
        (Some(b), Some(c)) if c.ratio > b.ratio => Some(c),
        (b @ Some(_), _) => b,
        (None, c) => c,
    }
}

/// Greedy pivoted Gram–Schmidt.
///
/// At each step every candidate is projected orthogonally to the vectors
/// accepted so far and the one with the largest `|⟨w,w⟩| / ‖w‖²` is accepted
/// if that ratio exceeds `null_tol`. When every single candidate is (near)
/// null, sums and differences of candidate pairs are tried before giving up.
pub(crate) fn pivoted_gram_schmidt<T: Real>(
    metric: &[i8],
    candidates: &[JetVec<T>],
    max: usize,
    null_tol: T,
) -> GsOutcome<T> {
    let mut vectors: Vec<JetVec<T>> = Vec::with_capacity(max);
    let mut signs = Vec::with_capacity(max);
    let reference = candidates
        .iter()
        .map(|c| euclid_sq(c))
        .fold(T::zero(), T::max);
    for step in 0..max {
        let projected: Vec<JetVec<T>> = candidates
            .iter()
            .map(|c| project_out(metric, c, &vectors, &signs))
            .collect();
        let mut best = None;
        for w in &projected {
            best = better(best, score(metric, w.clone(), reference, null_tol));
        }
        if best.is_none() {
            for a in 0..projected.len() {
                for b in a + 1..projected.len() {
                    for k in [T::one(), -T::one()] {
                        let mut w = projected[a].clone();
                        axpy(&mut w, Jet1::constant(k), &projected[b]);
                        let w = project_out(metric, &w, &vectors, &signs);
                        best = better(best, score(metric, w, reference, null_tol));
                    }
                }
            }
        }
        let Some(p) = best else {
            return GsOutcome {
                vectors,
                signs,
                stalled_at: Some(step),
            };
        };
        let sign: i8 = if p.norm.value < T::zero() { -1 } else { 1 };
        let len = p.norm.abs().sqrt().expect("pivot norm is positive").recip().expect("pivot norm is positive");
        vectors.push(p.vector.into_iter().map(|x| x * len).collect());
        signs.push(sign);
    }
    GsOutcome {
        vectors,
        signs,
        stalled_at: None,
    }
}
