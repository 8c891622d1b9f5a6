//! Curvature of embedded surfaces from Poisson brackets of the embedding coordinates.
//!
//! With the symplectic form `ω = ρ du¹∧du²` the bracket of two functions is
//! `{f, g} = (1/ρ) (∂_u f ∂_v g - ∂_v f ∂_u g)`. Everything here is built from
//!
//! * `𝒫^{ij} = {x^i, x^j}`,
//! * `𝒮_A^{ij} = {x^i, N_A^j}` (flat ambient: no Christoffel term),
//! * the multi-index family of normal vectors
//!   `Z_J = ρ / (2 √(|g| (p-1)!)) ḡ^{ij} ε_{jklJ} 𝒫^{kl} ∂_i` and the induced
//!   projection `𝒵^{IJ} = (-1)^δ ḡ(Z^I, Z^J)`, `δ = ind ḡ - ind g`.
//!
//! Jet orders are consumed one per bracket level: coordinates are order-2
//! jets, `𝒫^{kl}` is an order-1 jet and `{x^i, 𝒫^{kl}}` is a plain value. No
//! third derivatives are ever required.
//!
//! [`gauss_full`] and [`mean_full`] evaluate the closed formulas in which the
//! normal frame has been eliminated:
//!
//! ```text
//! K = -ρ⁴/(8 g² (p-1)!) Σ_L ḡ_i ḡ_r ḡ_n ε_{jklL} ε_{irnL} {x^i,{x^k,x^l}} {x^j,{x^r,x^n}}
//! H =  ρ⁴/(8 g² (p-1)!) Σ_{L,k'} ḡ_j ḡ_k ḡ_l ε_{irnL} ε_{k'klL} {x^i,x^j} {x^j,{x^r,x^n}} {x^k,x^l} ∂_{k'}
//! ```

use crate::classical::{det_jet, metric_jets, weingarten_trace, InducedMetric, NormalFrame};
use crate::embedding::EmbeddingEval;
use crate::error::GeometryError;
use crate::exprlang::{eval_jet, Ast};
use crate::jets::{Jet1, Jet2, DIV_FLOOR};
use crate::pseudo_gs::{inner, pivoted_gram_schmidt, JetVec};
use crate::scalar::Real;
use crate::tensor::{distinct_triples, factorial, AmbientSignature, Contraction, MultiIndexSpace, TensorError};

/// Null-pivot threshold when extracting the image of `𝒵`.
pub const IMAGE_NULL_TOL: f64 = 1e-8;

/// The density `ρ` of the symplectic form.
#[derive(Debug, Clone, Default)]
pub enum DensityChoice {
    Unit,
    /// `ρ = √|g|`.
    #[default]
    SqrtAbsG,
    Expression(Ast),
}

impl DensityChoice {
    pub fn eval<T: Real>(&self, emb: &EmbeddingEval<T>) -> Result<Jet1<T>, GeometryError> {
        let rho = match self {
            DensityChoice::Unit => Jet1::constant(T::one()),
            DensityChoice::SqrtAbsG => {
                let det = det_jet(&metric_jets(emb)).abs();
                det.sqrt().map_err(|_| GeometryError::ZeroDensity {
                    value: det.value.to_f64_lossy(),
                })?
            }
            DensityChoice::Expression(ast) => eval_jet(ast, emb.at)?.truncate(),
        };
        if !(rho.value.abs() > T::lit(DIV_FLOOR)) || !rho.value.is_finite() {
            return Err(GeometryError::ZeroDensity {
                value: rho.value.to_f64_lossy(),
            });
        }
        Ok(rho)
    }
}

/// `{f, g}` for order-2 jets `f`, `g`; the result keeps one derivative order.
pub fn poisson_bracket<T: Real>(f: &Jet2<T>, g: &Jet2<T>, rho: &Jet1<T>) -> Result<Jet1<T>, GeometryError> {
    let num = f.partial(0) * g.partial(1) - f.partial(1) * g.partial(0);
    num.try_div(*rho).map_err(|_| GeometryError::ZeroDensity {
        value: rho.value.to_f64_lossy(),
    })
}

/// Value of `{f, g}` given only the gradients of `f` and `g`.
#[inline]
pub fn bracket_value<T: Real>(fgrad: [T; 2], ggrad: [T; 2], rho: T) -> T {
    (fgrad[0] * ggrad[1] - fgrad[1] * ggrad[0]) / rho
}

/// `𝒫^{ij}` with gradients, and the density used to build them.
#[derive(Debug, Clone)]
pub struct BracketTable<T> {
    m: usize,
    pub rho: Jet1<T>,
    p: Vec<Jet1<T>>,
}

impl<T: Real> BracketTable<T> {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Jet1<T> {
        self.p[i * self.m + j]
    }

    /// `𝒫` values as a row-major `m x m` matrix.
    pub fn values(&self) -> Vec<T> {
        self.p.iter().map(|j| j.value).collect()
    }

    /// `{x^i, 𝒫^{kl}}`.
    pub fn nested(&self, emb: &EmbeddingEval<T>, i: usize, k: usize, l: usize) -> T {
        bracket_value(emb.x[i].grad, self.get(k, l).grad, self.rho.value)
    }

    /// All nested brackets, indexed `[i][k][l]` flattened row-major.
    pub fn nested_all(&self, emb: &EmbeddingEval<T>) -> Vec<T> {
        let m = self.m;
        let mut q = vec![T::zero(); m * m * m];
        for i in 0..m {
            for k in 0..m {
                for l in (k + 1)..m {
                    let v = self.nested(emb, i, k, l);
                    q[(i * m + k) * m + l] = v;
                    q[(i * m + l) * m + k] = -v;
                }
            }
        }
        q
    }
}

pub fn build_bracket_table<T: Real>(
    emb: &EmbeddingEval<T>,
    rho: &DensityChoice,
) -> Result<BracketTable<T>, GeometryError> {
    let rho = rho.eval(emb)?;
    let m = emb.dim();
    let mut p = vec![Jet1::zero(); m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let b = poisson_bracket(&emb.x[i], &emb.x[j], &rho)?;
            p[i * m + j] = b;
            p[j * m + i] = -b;
        }
    }
    Ok(BracketTable { m, rho, p })
}

/// `tr(A B)` for the endomorphisms `A^i_j = A^{ij} ḡ_j`, `B^i_j = B^{ij} ḡ_j`:
/// `Σ_{ij} ḡ_i ḡ_j A^{ij} B^{ji}`.
pub fn trace_product<T: Real>(sig: &AmbientSignature, a: &[T], b: &[T]) -> T {
    let m = sig.dim();
    let mut t = T::zero();
    for i in 0..m {
        for j in 0..m {
            t = t + sig.g::<T>(i) * sig.g::<T>(j) * a[i * m + j] * b[j * m + i];
        }
    }
    t
}

/// `𝒮^{ij} = {x^i, N^j}` for a vector field `N` given with its parameter derivatives.
pub fn s_operator<T: Real>(table: &BracketTable<T>, emb: &EmbeddingEval<T>, n: &[Jet1<T>]) -> Vec<T> {
    let m = emb.dim();
    let mut s = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            s[i * m + j] = bracket_value(emb.x[i].grad, n[j].grad, table.rho.value);
        }
    }
    s
}

/// `K = -(ρ²/2g) Σ_A σ_A ḡ_i ḡ_j {x^i, N_A^j}{x^j, N_A^i}` for a given normal frame.
pub fn gauss_via_frame<T: Real>(
    table: &BracketTable<T>,
    emb: &EmbeddingEval<T>,
    met: &InducedMetric<T>,
    frame: &NormalFrame<T>,
) -> T {
    let sum: T = (0..frame.len())
        .map(|a| {
            let s = s_operator(table, emb, frame.normal_jet(a));
            frame.sign(a) * trace_product(&emb.sig, &s, &s)
        })
        .sum();
    let rho = table.rho.value;
    -rho * rho / (T::lit(2.0) * met.det) * sum
}

/// `H = (ρ²/2g) Σ_A σ_A tr(𝒫 𝒮_A) N_A` for a given normal frame.
pub fn mean_via_frame<T: Real>(
    table: &BracketTable<T>,
    emb: &EmbeddingEval<T>,
    met: &InducedMetric<T>,
    frame: &NormalFrame<T>,
) -> Vec<T> {
    let pv = table.values();
    let rho = table.rho.value;
    let pref = rho * rho / (T::lit(2.0) * met.det);
    let mut out = vec![T::zero(); emb.dim()];
    for a in 0..frame.len() {
        let s = s_operator(table, emb, frame.normal_jet(a));
        let c = pref * frame.sign(a) * trace_product(&emb.sig, &pv, &s);
        for (o, n) in out.iter_mut().zip(frame.normal(a)) {
            *o = *o + c * n;
        }
    }
    out
}

/// Residuals of the trace identities relating brackets to the fundamental forms.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResiduals<T> {
    /// `|tr 𝒫² + 2g/ρ²|`, relative to `max(1, |2g/ρ²|)`.
    pub p2: T,
    /// Per normal: `|tr 𝒮_A² + (2/ρ²) det h_A|`, relative.
    pub sa: Vec<T>,
    /// Per normal: `|tr ℬ_A - (g/ρ²) tr W_A|`, relative.
    pub ba: Vec<T>,
}

impl<T: Real> TraceResiduals<T> {
    pub fn worst_sa(&self) -> T {
        self.sa.iter().copied().fold(T::zero(), T::max)
    }
    pub fn worst_ba(&self) -> T {
        self.ba.iter().copied().fold(T::zero(), T::max)
    }
}

fn rel<T: Real>(lhs: T, rhs: T) -> T {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(T::one())
}

pub fn trace_identities<T: Real>(
    table: &BracketTable<T>,
    emb: &EmbeddingEval<T>,
    met: &InducedMetric<T>,
    frame: &NormalFrame<T>,
    h: &[[[T; 2]; 2]],
) -> TraceResiduals<T> {
    let rho2 = table.rho.value * table.rho.value;
    let pv = table.values();
    let p2 = rel(trace_product(&emb.sig, &pv, &pv), -T::lit(2.0) * met.det / rho2);
    let mut sa = Vec::new();
    let mut ba = Vec::new();
    for (a, ha) in h.iter().enumerate() {
        let s = s_operator(table, emb, frame.normal_jet(a));
        let deth = ha[0][0] * ha[1][1] - ha[0][1] * ha[1][0];
        sa.push(rel(trace_product(&emb.sig, &s, &s), -T::lit(2.0) * deth / rho2));
        ba.push(rel(
            trace_product(&emb.sig, &pv, &s),
            met.det / rho2 * weingarten_trace(met, ha),
        ));
    }
    TraceResiduals { p2, sa, ba }
}

/// `|ḡ_i ḡ_j {x^i, f N^j}{x^j, h N'^i} - f h ḡ_i ḡ_j {x^i, N^j}{x^j, N'^i}|`,
/// relative to `max(1, |rhs|)`, for normals `A` and `B` of `frame`.
#[allow(clippy::too_many_arguments)]
pub fn double_trace_check<T: Real>(
    emb: &EmbeddingEval<T>,
    table: &BracketTable<T>,
    frame: &NormalFrame<T>,
    a: usize,
    b: usize,
    f: &Ast,
    h: &Ast,
) -> Result<T, GeometryError> {
    let fj = eval_jet(f, emb.at)?.truncate();
    let hj = eval_jet(h, emb.at)?.truncate();
    let n = frame.normal_jet(a);
    let n2 = frame.normal_jet(b);
    let fn_: JetVec<T> = n.iter().map(|x| fj * *x).collect();
    let hn: JetVec<T> = n2.iter().map(|x| hj * *x).collect();
    let lhs = trace_product(&emb.sig, &s_operator(table, emb, &fn_), &s_operator(table, emb, &hn));
    let rhs = fj.value
        * hj.value
        * trace_product(&emb.sig, &s_operator(table, emb, n), &s_operator(table, emb, n2));
    Ok(rel(lhs, rhs))
}

/// `(-1)^k` as a scalar.
fn parity<T: Real>(k: usize) -> T {
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Z-tensor data at one point.
#[derive(Debug, Clone)]
pub struct ZData<T> {
    pub sig: AmbientSignature,
    pub space: MultiIndexSpace,
    /// `Z_K^i`, one row of length `m` per multi-index `K`.
    pub z_lower: Vec<JetVec<T>>,
    /// `Z^{Ki} = ḡ^{KK} Z_K^i`.
    pub z_upper: Vec<JetVec<T>>,
    /// `𝒵^I_J`, row `I`, column `J`, row-major.
    pub zmat: Vec<Jet1<T>>,
    /// `ḡ^{KK}` per multi-index.
    pub multi_signs: Vec<i8>,
    pub ind_g: usize,
    /// `δ = ind ḡ - ind g` (may be negative).
    pub delta: i64,
    pub delta_sign: T,
    pub p_values: Vec<T>,
    pub rho: T,
    pub det_g: T,
}

impl<T: Real> ZData<T> {
    pub fn count(&self) -> usize {
        self.space.count()
    }

    pub fn codim(&self) -> usize {
        self.sig.codim()
    }

    pub fn zmat_values(&self) -> Vec<T> {
        self.zmat.iter().map(|j| j.value).collect()
    }
}

pub fn build_z<T: Real>(
    table: &BracketTable<T>,
    emb: &EmbeddingEval<T>,
    met: &InducedMetric<T>,
    cap: usize,
) -> Result<ZData<T>, GeometryError> {
    let sig = emb.sig.clone();
    let m = sig.dim();
    if m > cap {
        return Err(TensorError::DimensionCap { m, cap }.into());
    }
    let p = sig.codim();
    let space = MultiIndexSpace::new(m, p - 1);
    let n = space.count();

    let abs_det = det_jet(&metric_jets(emb)).abs();
    let denom = (abs_det.scale(T::lit(factorial(p - 1) as f64)))
        .sqrt()?
        .scale(T::lit(2.0));
    let c = table.rho.try_div(denom)?;

    let mut idx = vec![0usize; m];
    let mut z_lower = Vec::with_capacity(n);
    let mut z_upper = Vec::with_capacity(n);
    let mut multi_signs = Vec::with_capacity(n);
    for k in 0..n {
        let kk = space.decode(k);
        let ks = sig.multi_sign(&kk);
        idx[3..].copy_from_slice(&kk);
        let mut z = vec![Jet1::zero(); m];
        for (i, zi) in z.iter_mut().enumerate() {
            let mut acc = Jet1::zero();
            for a in 0..m {
                for b in 0..m {
                    idx[0] = i;
                    idx[1] = a;
                    idx[2] = b;
                    let e = crate::tensor::eps_symbol(&idx, m)?;
                    if e != 0 {
                        acc = acc + table.get(a, b).scale(T::sign_of(e));
                    }
                }
            }
            *zi = (c * acc).scale(sig.g::<T>(i));
        }
        z_upper.push(z.iter().map(|x| x.scale(T::sign_of(ks))).collect::<JetVec<T>>());
        z_lower.push(z);
        multi_signs.push(ks);
    }

    let delta = sig.nu() as i64 - met.ind as i64;
    let delta_sign = parity::<T>(delta.unsigned_abs() as usize);
    let mut zmat = vec![Jet1::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            // 𝒵^{IJ}, then lower J
            let zij = inner(sig.signs(), &z_upper[i], &z_upper[j]).scale(delta_sign);
            zmat[i * n + j] = zij.scale(T::sign_of(multi_signs[j]));
            zmat[j * n + i] = zij.scale(T::sign_of(multi_signs[i]));
        }
    }

    Ok(ZData {
        sig,
        space,
        z_lower,
        z_upper,
        zmat,
        multi_signs,
        ind_g: met.ind,
        delta,
        delta_sign,
        p_values: table.values(),
        rho: table.rho.value,
        det_g: met.det,
    })
}

/// Max-norm residuals of the algebraic properties of `𝒵`, each divided by a
/// local scale so that `1e-9` is a meaningful bound for any parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZResiduals<T> {
    /// `‖𝒵² - 𝒵‖`.
    pub idempotence: T,
    /// `|Tr 𝒵 - p|`.
    pub trace: T,
    /// `‖ĝ⊗ 𝒵 - (ĝ⊗ 𝒵)ᵀ‖` in the row/column convention of [`ZData::zmat`].
    pub self_adjoint: T,
    /// `‖Z_K^i Z^{Kj} - (-1)^δ (ḡ^{ij} + (ρ²/g)(𝒫²)^{ij})‖`.
    pub zsum: T,
    /// `‖ḡ(Z_J, e_a)‖` over all `J`, `a`.
    pub orthogonality: T,
}

pub fn zmap_invariants<T: Real>(zd: &ZData<T>, emb: &EmbeddingEval<T>) -> ZResiduals<T> {
    let n = zd.count();
    let m = zd.sig.dim();
    let z = zd.zmat_values();

    let zscale = z.iter().fold(T::one(), |a, x| a.max(x.abs()));

    let mut idempotence = T::zero();
    for i in 0..n {
        for j in 0..n {
            let sq: T = (0..n).map(|k| z[i * n + k] * z[k * n + j]).sum();
            idempotence = idempotence.max((sq - z[i * n + j]).abs());
        }
    }
    let idempotence = idempotence / (zscale * zscale);
    let tr: T = (0..n).map(|i| z[i * n + i]).sum();
    let trace = (tr - T::lit(zd.codim() as f64)).abs() / zscale;

    let mut self_adjoint = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a = z[i * n + j] * T::sign_of(zd.multi_signs[j]);
            let b = z[j * n + i] * T::sign_of(zd.multi_signs[i]);
            self_adjoint = self_adjoint.max((a - b).abs());
        }
    }
    let self_adjoint = self_adjoint / zscale;

    let pv = &zd.p_values;
    let k = zd.rho * zd.rho / zd.det_g;
    let mut zsum = T::zero();
    let mut zsum_scale = T::one();
    for i in 0..m {
        for j in 0..m {
            let lhs: T = (0..n)
                .map(|kk| zd.z_lower[kk][i].value * zd.z_upper[kk][j].value)
                .sum();
            let p2: T = (0..m).map(|l| pv[i * m + l] * zd.sig.g::<T>(l) * pv[l * m + j]).sum();
            let gij = if i == j { zd.sig.g::<T>(i) } else { T::zero() };
            let rhs = zd.delta_sign * (gij + k * p2);
            zsum = zsum.max((lhs - rhs).abs());
            zsum_scale = zsum_scale.max(lhs.abs()).max(rhs.abs());
        }
    }
    let zsum = zsum / zsum_scale;

    let e = [emb.tangent(0), emb.tangent(1)];
    let mut orthogonality = T::zero();
    for zk in &zd.z_lower {
        let zv: Vec<T> = zk.iter().map(|x| x.value).collect();
        let zn = zv.iter().map(|x| *x * *x).sum::<T>().sqrt();
        for t in &e {
            let tn = t.iter().map(|x| *x * *x).sum::<T>().sqrt();
            let scale = (zn * tn).max(T::one());
            orthogonality = orthogonality.max(zd.sig.inner(&zv, t).abs() / scale);
        }
    }

    ZResiduals {
        idempotence,
        trace,
        self_adjoint,
        zsum,
        orthogonality,
    }
}

/// Normal frame extracted from the image of `𝒵`, plus the rank found.
#[derive(Debug, Clone)]
pub struct ZFrame<T> {
    pub frame: NormalFrame<T>,
    pub image_rank: usize,
}

/// Pseudo-orthonormal eigenvalue-1 eigenvectors `E^I` of `𝒵` are obtained by
/// Gram–Schmidt (under `ḡ⊗`) on the images `𝒵 dx^K` of the basis covectors;
/// the normals are `N̂ = Z^J E_J`.
pub fn normal_frame_from_z<T: Real>(zd: &ZData<T>) -> Result<ZFrame<T>, GeometryError> {
    let n = zd.count();
    let m = zd.sig.dim();
    let p = zd.codim();
    let rows: Vec<JetVec<T>> = (0..n).map(|k| zd.zmat[k * n..(k + 1) * n].to_vec()).collect();
    let out = pivoted_gram_schmidt(&zd.multi_signs, &rows, (p + 1).min(n), T::lit(IMAGE_NULL_TOL));
    let image_rank = out.vectors.len();
    if image_rank < p {
        return Err(GeometryError::RankDeficiency {
            found: image_rank,
            expected: p,
        });
    }
    let mut normals = Vec::with_capacity(p);
    let mut signs = Vec::with_capacity(p);
    for ev in out.vectors.iter().take(p) {
        let mut nv = vec![Jet1::zero(); m];
        for (j, ej) in ev.iter().enumerate() {
            for (i, slot) in nv.iter_mut().enumerate() {
                *slot = *slot + zd.z_upper[j][i] * *ej;
            }
        }
        let norm = inner(zd.sig.signs(), &nv, &nv).value;
        signs.push(if norm < T::zero() { -1 } else { 1 });
        normals.push(nv);
    }
    Ok(ZFrame {
        frame: NormalFrame::new(normals, signs),
        image_rank,
    })
}

/// Common prefactor `ρ⁴ / (8 g² (p-1)!)`.
fn theorem_prefactor<T: Real>(sig: &AmbientSignature, rho: T, det_g: T) -> T {
    let r2 = rho * rho;
    r2 * r2 / (T::lit(8.0) * det_g * det_g * T::lit(factorial(sig.codim() - 1) as f64))
}

/// Gauss curvature from nested brackets alone, no normal frame.
pub fn gauss_full<T: Real>(
    emb: &EmbeddingEval<T>,
    table: &BracketTable<T>,
    met: &InducedMetric<T>,
    contraction: Contraction,
    cap: usize,
) -> Result<T, GeometryError> {
    let sig = &emb.sig;
    let m = sig.dim();
    contraction.check_cap(m, cap)?;
    let q = table.nested_all(emb);
    let qa = |i: usize, k: usize, l: usize| q[(i * m + k) * m + l];
    let triples = distinct_triples(m);

    // Σ_L ε_{jklL} ε_{irnL}: only distinct triples can contribute
    let mut sum = T::zero();
    for jkl in &triples {
        let [j, k, l] = *jkl;
        for irn in &triples {
            let c = contraction.eval(*jkl, *irn, m);
            if c == 0 {
                continue;
            }
            let [i, r, n] = *irn;
            let w = sig.g::<T>(i) * sig.g::<T>(r) * sig.g::<T>(n);
            sum = sum + T::lit(c as f64) * w * qa(i, k, l) * qa(j, r, n);
        }
    }
    // (-1)^{ind ḡ + 1} from the ε·ε contraction with raised indices, times
    // det(ḡ)^{-1} from lowering ε^{irnL}; the ν-dependence cancels.
    let sign = -parity::<T>(sig.nu()) * T::sign_of(sig.det_sign());
    Ok(sign * theorem_prefactor(sig, table.rho.value, met.det) * sum)
}

/// Mean-curvature vector from brackets alone, no normal frame.
pub fn mean_full<T: Real>(
    emb: &EmbeddingEval<T>,
    table: &BracketTable<T>,
    met: &InducedMetric<T>,
    contraction: Contraction,
    cap: usize,
) -> Result<Vec<T>, GeometryError> {
    let sig = &emb.sig;
    let m = sig.dim();
    contraction.check_cap(m, cap)?;
    let q = table.nested_all(emb);
    let pv = table.values();
    // V^{i;rn} = Σ_j ḡ_j {x^i,x^j}{x^j,{x^r,x^n}}
    let mut v = vec![T::zero(); m * m * m];
    for i in 0..m {
        for r in 0..m {
            for n in 0..m {
                v[(i * m + r) * m + n] = (0..m)
                    .map(|j| sig.g::<T>(j) * pv[i * m + j] * q[(j * m + r) * m + n])
                    .sum();
            }
        }
    }
    let triples = distinct_triples(m);
    let mut out = vec![T::zero(); m];
    for irn in &triples {
        let [i, r, n] = *irn;
        let vi = v[(i * m + r) * m + n];
        if vi == T::zero() {
            continue;
        }
        for kkl in &triples {
            let c = contraction.eval(*irn, *kkl, m);
            if c == 0 {
                continue;
            }
            let [kp, k, l] = *kkl;
            let w = sig.g::<T>(k) * sig.g::<T>(l);
            out[kp] = out[kp] + T::lit(c as f64) * w * vi * pv[k * m + l];
        }
    }
    // (-1)^{ind ḡ} times det(ḡ)^{-1}, as for K but without the extra minus
    let sign = parity::<T>(sig.nu()) * T::sign_of(sig.det_sign());
    let pref = sign * theorem_prefactor(sig, table.rho.value, met.det);
    Ok(out.into_iter().map(|x| pref * x).collect())
}
