//! Per-point evaluation: curvature from the bracket formulas, the classical
//! oracle, and the residuals of every identity tying the two together.

use crate::classical::{
    classical_gauss, classical_mean, classical_normal_frame, completeness_residual, induced_metric,
    second_fundamental, NormalFrame,
};
use crate::embedding::{EmbeddingEval, Surface};
use crate::error::GeometryError;
use crate::exprlang::{parse_expr, Ast};
use crate::poisson::{
    build_bracket_table, build_z, double_trace_check, gauss_full, gauss_via_frame, mean_full, mean_via_frame,
    normal_frame_from_z, trace_identities, zmap_invariants, DensityChoice,
};
use crate::scalar::Real;
use crate::tensor::{AmbientSignature, Contraction};

/// Alternative density used by the ρ-independence check alongside `1` and `√|g|`.
pub const PROBE_DENSITY: &str = "1+0.3*sin(u)";

/// `(f, h)` pairs for the double-trace check.
pub const DOUBLE_TRACE_PAIRS: [(&str, &str); 3] = [("u", "sin(v)+2"), ("exp(0.3*u)", "1+u*v"), ("cos(u)+2", "v^2+1")];

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub density: DensityChoice,
    pub contraction: Contraction,
    /// Largest ambient dimension allowed for the naive contraction.
    pub cap: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            density: DensityChoice::SqrtAbsG,
            contraction: Contraction::Reduced,
            cap: crate::tensor::DEFAULT_MAX_M,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curvature<T> {
    pub k: T,
    pub h: Vec<T>,
}

fn rel<T: Real>(a: T, b: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(T::one())
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

fn rel_vec<T: Real>(a: &[T], b: &[T]) -> T {
    let d: Vec<T> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    norm(&d) / norm(a).max(norm(b)).max(T::one())
}

impl<T: Real> Curvature<T> {
    /// Relative distance, the larger of the K and H discrepancies.
    pub fn distance(&self, other: &Self) -> T {
        rel(self.k, other.k).max(rel_vec(&self.h, &other.h))
    }
}

/// `K` and `H` from the frame-free bracket formulas.
pub fn curvature_with<T: Real>(
    emb: &EmbeddingEval<T>,
    density: &DensityChoice,
    contraction: Contraction,
    cap: usize,
) -> Result<Curvature<T>, GeometryError> {
    let met = induced_metric(emb)?;
    let table = build_bracket_table(emb, density)?;
    Ok(Curvature {
        k: gauss_full(emb, &table, &met, contraction, cap)?,
        h: mean_full(emb, &table, &met, contraction, cap)?,
    })
}

pub fn curvature_at<T: Real>(
    surface: &Surface,
    at: [T; 2],
    opts: &AnalysisOptions,
) -> Result<Curvature<T>, GeometryError> {
    let emb = surface.eval(at)?;
    curvature_with(&emb, &opts.density, opts.contraction, opts.cap)
}

/// Classical fundamental-form curvature.
pub fn oracle_at<T: Real>(emb: &EmbeddingEval<T>) -> Result<(Curvature<T>, NormalFrame<T>), GeometryError> {
    let met = induced_metric(emb)?;
    let frame = classical_normal_frame(emb, &met)?;
    let h = second_fundamental(emb, &frame);
    Ok((
        Curvature {
            k: classical_gauss(&met, &frame, &h),
            h: classical_mean(&met, &frame, &h),
        },
        frame,
    ))
}

/// Identity residuals at one point, each relative to its local scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residuals<T> {
    pub p2_trace: T,
    pub sa_trace: T,
    pub ba_trace: T,
    pub double_trace: T,
    pub z_idempotence: T,
    pub z_trace: T,
    pub z_self_adjoint: T,
    pub z_sum: T,
    pub z_orthogonality: T,
    /// Mutual projector residual between the classical and the `𝒵`-derived frames.
    pub z_projector: T,
    pub completeness: T,
    pub orthonormality: T,
    /// Largest pairwise discrepancy of `(K, H)` across the densities.
    pub rho_independence: T,
    /// Frame-free formulas against the bracket formulas on the classical frame.
    pub frame_path: T,
    pub oracle_k: T,
    pub oracle_h: T,
}

/// Index bookkeeping at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SignData {
    pub ind_ambient: usize,
    pub ind_g: usize,
    pub delta: i64,
    pub classical_signs: Vec<i8>,
    pub z_signs: Vec<i8>,
    pub image_rank: usize,
}

impl SignData {
    /// Same sign multiset in both frames, and the timelike normal count equals `δ`.
    pub fn consistent(&self, codim: usize) -> bool {
        let mut a = self.classical_signs.clone();
        let mut b = self.z_signs.clone();
        a.sort_unstable();
        b.sort_unstable();
        let negatives = a.iter().filter(|&&s| s < 0).count() as i64;
        a == b && negatives == self.delta && self.image_rank == codim
    }
}

#[derive(Debug, Clone)]
pub struct PointAnalysis<T> {
    pub at: [T; 2],
    pub full: Curvature<T>,
    pub frame: Curvature<T>,
    pub oracle: Curvature<T>,
    pub signs: SignData,
    pub residuals: Residuals<T>,
}

fn projector_distance<T: Real>(sig: &AmbientSignature, a: &NormalFrame<T>, b: &NormalFrame<T>) -> T {
    let pa = a.projector(sig);
    let pb = b.projector(sig);
    let scale = pa.iter().chain(&pb).fold(T::one(), |s, x| s.max(x.abs()));
    pa.iter().zip(&pb).fold(T::zero(), |w, (x, y)| w.max((*x - *y).abs())) / scale
}

fn parsed(src: &str) -> Ast {
    parse_expr(src).expect("built-in expression parses")
}

/// Everything at one point: curvature three ways plus all identity residuals.
pub fn analyze_point<T: Real>(
    surface: &Surface,
    at: [T; 2],
    opts: &AnalysisOptions,
) -> Result<PointAnalysis<T>, GeometryError> {
    let emb = surface.eval(at)?;
    let sig = &emb.sig;
    let met = induced_metric(&emb)?;
    let (oracle, cframe) = oracle_at(&emb)?;
    let h = second_fundamental(&emb, &cframe);

    let table = build_bracket_table(&emb, &opts.density)?;
    let full = Curvature {
        k: gauss_full(&emb, &table, &met, opts.contraction, opts.cap)?,
        h: mean_full(&emb, &table, &met, opts.contraction, opts.cap)?,
    };
    let frame = Curvature {
        k: gauss_via_frame(&table, &emb, &met, &cframe),
        h: mean_via_frame(&table, &emb, &met, &cframe),
    };

    let traces = trace_identities(&table, &emb, &met, &cframe, &h);
    let p = cframe.len();
    let mut double_trace = T::zero();
    for (idx, (f, g)) in DOUBLE_TRACE_PAIRS.iter().enumerate() {
        // mix diagonal and off-diagonal normal pairs when p > 1
        let (a, b) = [(0, 0), (0, p - 1), (p - 1, p - 1)][idx];
        double_trace = double_trace.max(double_trace_check(&emb, &table, &cframe, a, b, &parsed(f), &parsed(g))?);
    }

    let zd = build_z(&table, &emb, &met, opts.cap)?;
    let zres = zmap_invariants(&zd, &emb);
    let zframe = normal_frame_from_z(&zd)?;

    let mut rho_independence = T::zero();
    let densities = [
        DensityChoice::Unit,
        DensityChoice::SqrtAbsG,
        DensityChoice::Expression(parsed(PROBE_DENSITY)),
    ];
    let mut variants = vec![full.clone()];
    for d in &densities {
        variants.push(curvature_with(&emb, d, opts.contraction, opts.cap)?);
    }
    for (i, a) in variants.iter().enumerate() {
        for b in &variants[i + 1..] {
            rho_independence = rho_independence.max(a.distance(b));
        }
    }

    let residuals = Residuals {
        p2_trace: traces.p2,
        sa_trace: traces.worst_sa(),
        ba_trace: traces.worst_ba(),
        double_trace,
        z_idempotence: zres.idempotence,
        z_trace: zres.trace,
        z_self_adjoint: zres.self_adjoint,
        z_sum: zres.zsum,
        z_orthogonality: zres.orthogonality,
        z_projector: projector_distance(sig, &cframe, &zframe.frame),
        completeness: completeness_residual(&emb, &met, &cframe),
        orthonormality: cframe.orthonormality_residual(sig).max(zframe.frame.orthonormality_residual(sig)),
        rho_independence,
        frame_path: full.distance(&frame),
        oracle_k: rel(full.k, oracle.k),
        oracle_h: rel_vec(&full.h, &oracle.h),
    };
    let signs = SignData {
        ind_ambient: sig.nu(),
        ind_g: met.ind,
        delta: zd.delta,
        classical_signs: cframe.signs().to_vec(),
        z_signs: zframe.frame.signs().to_vec(),
        image_rank: zframe.image_rank,
    };
    Ok(PointAnalysis {
        at,
        full,
        frame,
        oracle,
        signs,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn prepared(name: &str) -> crate::config::PreparedSpec {
        catalog::lookup(name).unwrap().prepare().unwrap()
    }

    #[test]
    fn sphere_point_is_consistent() {
        let s = prepared("sphere");
        let a = analyze_point::<f64>(&s.surface, [1.0, 0.3], &AnalysisOptions::default()).unwrap();
        assert!((a.full.k - 1.0).abs() < 1e-12);
        assert!(a.residuals.oracle_h < 1e-12);
        assert!(a.signs.consistent(1));
        assert_eq!(a.signs.delta, 0);
    }

    #[test]
    fn de_sitter_signs() {
        let s = prepared("de-sitter");
        let a = analyze_point::<f64>(&s.surface, [0.4, 0.3], &AnalysisOptions::default()).unwrap();
        assert_eq!((a.signs.ind_ambient, a.signs.ind_g, a.signs.delta), (1, 1, 0));
        assert_eq!(a.signs.classical_signs, vec![1]);
        assert!((a.full.k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_signature_has_timelike_normals() {
        let s = prepared("mixed-r52");
        let a = analyze_point::<f64>(&s.surface, [0.3, -0.7], &AnalysisOptions::default()).unwrap();
        assert_eq!((a.signs.ind_g, a.signs.delta), (0, 2));
        assert!(a.signs.consistent(3));
        assert!(a.residuals.z_projector < 1e-8);
    }

    #[test]
    fn f32_curvature_smoke() {
        let s = prepared("sphere");
        let c: Curvature<f32> = curvature_at(&s.surface, [1.0f32, 0.3], &AnalysisOptions::default()).unwrap();
        assert!((c.k - 1.0).abs() < 1e-3, "{}", c.k);
    }
}
