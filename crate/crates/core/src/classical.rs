//! Classical fundamental-form geometry, used as the independent oracle.
//!
//! The ambient space is flat, so the ambient connection is the coordinate
//! derivative and the ambient curvature term vanishes:
//!
//! * `h_{A,ab} = ḡ(∂_a ∂_b x, N_A)`
//! * `K = (1/g) Σ_A σ_A det(h_A)`
//! * `H = ½ Σ_A σ_A (g^{ab} h_{A,ab}) N_A`

use crate::embedding::EmbeddingEval;
use crate::error::GeometryError;
use crate::jets::Jet1;
use crate::pseudo_gs::{inner, pivoted_gram_schmidt, values, JetVec};
use crate::scalar::Real;
use crate::tensor::AmbientSignature;

/// Relative threshold on `|det g|` below which a point is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Null-pivot threshold for the normal-frame Gram–Schmidt.
pub const FRAME_NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InducedMetric<T> {
    pub gab: [[T; 2]; 2],
    pub det: T,
    /// Number of negative eigenvalues of `gab`.
    pub ind: usize,
    pub inv: [[T; 2]; 2],
}

/// `g_ab` with its parameter derivatives.
pub(crate) fn metric_jets<T: Real>(emb: &EmbeddingEval<T>) -> [[Jet1<T>; 2]; 2] {
    let signs = emb.sig.signs();
    let e = [emb.tangent_jet(0), emb.tangent_jet(1)];
    let g01 = inner(signs, &e[0], &e[1]);
    [
        [inner(signs, &e[0], &e[0]), g01],
        [g01, inner(signs, &e[1], &e[1])],
    ]
}

pub(crate) fn det_jet<T: Real>(g: &[[Jet1<T>; 2]; 2]) -> Jet1<T> {
    g[0][0] * g[1][1] - g[0][1] * g[0][1]
}

pub fn induced_metric<T: Real>(emb: &EmbeddingEval<T>) -> Result<InducedMetric<T>, GeometryError> {
    let signs = emb.sig.signs();
    let e0 = emb.tangent(0);
    let e1 = emb.tangent(1);
    let g00 = emb.sig.inner(&e0, &e0);
    let g01 = emb.sig.inner(&e0, &e1);
    let g11 = emb.sig.inner(&e1, &e1);
    debug_assert_eq!(signs.len(), e0.len());
    let det = g00 * g11 - g01 * g01;
    let scale = g00.abs().max(g01.abs()).max(g11.abs()).max(T::one());
    if !(det.abs() >= T::lit(DEGENERACY_TOL) * scale * scale) {
        return Err(GeometryError::DegenerateMetric {
            det: det.to_f64_lossy(),
            scale: scale.to_f64_lossy(),
        });
    }
    let ind = if det < T::zero() {
        1
    } else if g00 + g11 < T::zero() {
        2
    } else {
        0
    };
    Ok(InducedMetric {
        gab: [[g00, g01], [g01, g11]],
        det,
        ind,
        inv: [[g11 / det, -g01 / det], [-g01 / det, g00 / det]],
    })
}

/// Pseudo-orthonormal frame `N_A` of the normal space, with signs
/// `σ_A = ḡ(N_A, N_A)` and exact first parameter derivatives.
#[derive(Debug, Clone)]
pub struct NormalFrame<T> {
    normals: Vec<JetVec<T>>,
    signs: Vec<i8>,
}

impl<T: Real> NormalFrame<T> {
    pub(crate) fn new(normals: Vec<JetVec<T>>, signs: Vec<i8>) -> Self {
        Self { normals, signs }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normal(&self, a: usize) -> Vec<T> {
        values(&self.normals[a])
    }

    /// `N_A` together with `∂_u N_A`, `∂_v N_A`.
    pub fn normal_jet(&self, a: usize) -> &[Jet1<T>] {
        &self.normals[a]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, a: usize) -> T {
        T::sign_of(self.signs[a])
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    /// The ḡ-orthogonal projector onto the normal space, `Π^i_j = Σ_A σ_A N_A^i N_A^j ḡ_j`,
    /// row-major `m x m`.
    pub fn projector(&self, sig: &AmbientSignature) -> Vec<T> {
        let m = sig.dim();
        let mut out = vec![T::zero(); m * m];
        for a in 0..self.len() {
            let n = self.normal(a);
            let s = self.sign(a);
            for i in 0..m {
                for j in 0..m {
                    out[i * m + j] = out[i * m + j] + s * n[i] * n[j] * sig.g::<T>(j);
                }
            }
        }
        out
    }

    /// Largest deviation of `ḡ(N_A, N_B)` from `δ_AB σ_A`.
    pub fn orthonormality_residual(&self, sig: &AmbientSignature) -> T {
        let mut worst = T::zero();
        for a in 0..self.len() {
            for b in 0..self.len() {
                let ip = sig.inner(&self.normal(a), &self.normal(b));
                let want = if a == b { self.sign(a) } else { T::zero() };
                worst = worst.max((ip - want).abs());
            }
        }
        worst
    }
}

/// Normal frame from the ambient coordinate basis.
pub fn classical_normal_frame<T: Real>(
    emb: &EmbeddingEval<T>,
    met: &InducedMetric<T>,
) -> Result<NormalFrame<T>, GeometryError> {
    let m = emb.dim();
    let seeds: Vec<Vec<T>> = (0..m)
        .map(|k| (0..m).map(|i| if i == k { T::one() } else { T::zero() }).collect())
        .collect();
    classical_normal_frame_seeded(emb, met, &seeds)
}

/// Normal frame built from an arbitrary spanning seed set: each seed is
/// projected onto the normal space and the projections are run through
/// pivoted indefinite Gram–Schmidt.
pub fn classical_normal_frame_seeded<T: Real>(
    emb: &EmbeddingEval<T>,
    _met: &InducedMetric<T>,
    seeds: &[Vec<T>],
) -> Result<NormalFrame<T>, GeometryError> {
    let signs = emb.sig.signs();
    let e = [emb.tangent_jet(0), emb.tangent_jet(1)];
    let g = metric_jets(emb);
    let det = det_jet(&g);
    let ginv = [
        [g[1][1].try_div(det)?, (-g[0][1]).try_div(det)?],
        [(-g[0][1]).try_div(det)?, g[0][0].try_div(det)?],
    ];
    let candidates: Vec<JetVec<T>> = seeds
        .iter()
        .map(|s| {
            let s: JetVec<T> = s.iter().map(|&x| Jet1::constant(x)).collect();
            let proj = [inner(signs, &e[0], &s), inner(signs, &e[1], &s)];
            let mut w = s;
            for a in 0..2 {
                let coeff = ginv[a][0] * proj[0] + ginv[a][1] * proj[1];
                for (wi, ei) in w.iter_mut().zip(&e[a]) {
                    *wi = *wi - coeff * *ei;
                }
            }
            w
        })
        .collect();
    let p = emb.sig.codim();
    let out = pivoted_gram_schmidt(signs, &candidates, p, T::lit(FRAME_NULL_TOL));
    if let Some(step) = out.stalled_at {
        return Err(GeometryError::FrameConstruction { step });
    }
    Ok(NormalFrame::new(out.vectors, out.signs))
}

/// `h_{A,ab} = ḡ(∂_a ∂_b x, N_A)`, symmetric in `(a, b)` by construction.
pub fn second_fundamental<T: Real>(emb: &EmbeddingEval<T>, frame: &NormalFrame<T>) -> Vec<[[T; 2]; 2]> {
    let xdd = [emb.second(0, 0), emb.second(0, 1), emb.second(1, 1)];
    (0..frame.len())
        .map(|a| {
            let n = frame.normal(a);
            let h00 = emb.sig.inner(&xdd[0], &n);
            let h01 = emb.sig.inner(&xdd[1], &n);
            let h11 = emb.sig.inner(&xdd[2], &n);
            [[h00, h01], [h01, h11]]
        })
        .collect()
}

pub fn classical_gauss<T: Real>(met: &InducedMetric<T>, frame: &NormalFrame<T>, h: &[[[T; 2]; 2]]) -> T {
    let sum: T = h
        .iter()
        .enumerate()
        .map(|(a, ha)| frame.sign(a) * (ha[0][0] * ha[1][1] - ha[0][1] * ha[1][0]))
        .sum();
    sum / met.det
}

/// `tr W_A = g^{ab} h_{A,ab}`.
pub fn weingarten_trace<T: Real>(met: &InducedMetric<T>, ha: &[[T; 2]; 2]) -> T {
    let mut t = T::zero();
    for a in 0..2 {
        for b in 0..2 {
            t = t + met.inv[a][b] * ha[a][b];
        }
    }
    t
}

pub fn classical_mean<T: Real>(met: &InducedMetric<T>, frame: &NormalFrame<T>, h: &[[[T; 2]; 2]]) -> Vec<T> {
    let m = frame.normal_jet(0).len();
    let mut out = vec![T::zero(); m];
    for (a, ha) in h.iter().enumerate() {
        let c = T::lit(0.5) * frame.sign(a) * weingarten_trace(met, ha);
        for (o, n) in out.iter_mut().zip(frame.normal(a)) {
            *o = *o + c * n;
        }
    }
    out
}

/// Max-norm of `Σ_ab g^{ab} e_a^k e_b^l + Σ_A σ_A N_A^k N_A^l - ḡ^{kl}`.
pub fn completeness_residual<T: Real>(emb: &EmbeddingEval<T>, met: &InducedMetric<T>, frame: &NormalFrame<T>) -> T {
    let m = emb.dim();
    let e = [emb.tangent(0), emb.tangent(1)];
    let normals: Vec<Vec<T>> = (0..frame.len()).map(|a| frame.normal(a)).collect();
    let mut worst = T::zero();
    for k in 0..m {
        for l in 0..m {
            let mut s = T::zero();
            for a in 0..2 {
                for b in 0..2 {
                    s = s + met.inv[a][b] * e[a][k] * e[b][l];
                }
            }
            for (a, n) in normals.iter().enumerate() {
                s = s + frame.sign(a) * n[k] * n[l];
            }
            let want = if k == l { emb.sig.g::<T>(k) } else { T::zero() };
            worst = worst.max((s - want).abs());
        }
    }
    worst
}

/// Max over `A, a` of `|ḡ(N_A, e_a)|`.
pub fn tangency_residual<T: Real>(emb: &EmbeddingEval<T>, frame: &NormalFrame<T>) -> T {
    let mut worst = T::zero();
    for a in 0..frame.len() {
        let n = frame.normal(a);
        for t in 0..2 {
            worst = worst.max(emb.sig.inner(&n, &emb.tangent(t)).abs());
        }
    }
    worst
}
