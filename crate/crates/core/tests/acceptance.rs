//! Acceptance suite. Runs every criterion over the full catalog, prints one
//! PASS/FAIL line per criterion and exits non-zero if any failed.
//!
//! Run alone with `cargo test -p pbcurv --test acceptance`.

use std::process::ExitCode;

use rand::{rngs::StdRng, Rng, SeedableRng};

use pbcurv::analysis::{analyze_point, curvature_at, AnalysisOptions, Curvature, PointAnalysis};
use pbcurv::bench::run_bench;
use pbcurv::catalog::{catalog, lookup};
use pbcurv::config::PreparedSpec;
use pbcurv::exprlang::{eval_jet, eval_value, parse_expr};
use pbcurv::tensor::{distinct_triples, eps_contract_naive, eps_contract_naive_counted, eps_contract_reduced};
use pbcurv::{Contraction, DensityChoice, Jet2, Surface};

struct Outcome {
    id: u8,
    name: &'static str,
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn prepared_catalog() -> Vec<PreparedSpec> {
    catalog().into_iter().map(|s| s.prepare().expect("catalog entry")).collect()
}

/// Full analysis at every grid point of every surface, in catalog order.
type Analyses = Vec<Vec<([f64; 2], Result<PointAnalysis<f64>, String>)>>;

fn analyze_all(specs: &[PreparedSpec]) -> Analyses {
    let opts = AnalysisOptions::default();
    specs
        .iter()
        .map(|p| {
            p.points()
                .into_iter()
                .map(|at| (at, analyze_point(&p.surface, at, &opts).map_err(|e| e.to_string())))
                .collect()
        })
        .collect()
}

fn inner(nu: usize, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| if i < nu { -x * y } else { x * y })
        .sum()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn coordinate_jets(surface: &Surface, at: [f64; 2]) -> Vec<Jet2<f64>> {
    surface.coords.iter().map(|c| eval_jet(c, at).unwrap()).collect()
}

/// Frame-free classical curvature: the second fundamental form is the normal
/// part of `∂_a ∂_b x`, `K = (ḡ(II₁₁, II₂₂) - ḡ(II₁₂, II₁₂)) / g` and
/// `H = ½ g^{ab} II_ab`.
fn projected_oracle(surface: &Surface, nu: usize, at: [f64; 2]) -> (f64, Vec<f64>) {
    let x = coordinate_jets(surface, at);
    let e: [Vec<f64>; 2] = [0, 1].map(|a| x.iter().map(|j| j.grad[a]).collect());
    let g = [
        [inner(nu, &e[0], &e[0]), inner(nu, &e[0], &e[1])],
        [inner(nu, &e[1], &e[0]), inner(nu, &e[1], &e[1])],
    ];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let second = |a: usize, b: usize| -> Vec<f64> {
        let xab: Vec<f64> = x.iter().map(|j| j.hess[a][b]).collect();
        let c = [inner(nu, &xab, &e[0]), inner(nu, &xab, &e[1])];
        let mut out = xab.clone();
        for p in 0..2 {
            for q in 0..2 {
                for (o, t) in out.iter_mut().zip(&e[q]) {
                    *o -= c[p] * ginv[p][q] * t;
                }
            }
        }
        out
    };
    let (ii11, ii12, ii22) = (second(0, 0), second(0, 1), second(1, 1));
    let k = (inner(nu, &ii11, &ii22) - inner(nu, &ii12, &ii12)) / det;
    let h = (0..x.len())
        .map(|i| 0.5 * (ginv[0][0] * ii11[i] + 2.0 * ginv[0][1] * ii12[i] + ginv[1][1] * ii22[i]))
        .collect();
    (k, h)
}

fn criterion_1(specs: &[PreparedSpec], all: &Analyses) -> Outcome {
    let mut o = Outcome::new(1, "oracle equivalence, 8x8 grid, all catalog surfaces");
    let opts = AnalysisOptions::default();
    let mut worst = 0.0f64;
    let mut points = 0;
    for (p, samples) in specs.iter().zip(all) {
        for (at, a) in samples {
            let at = *at;
            points += 1;
            let a = match a {
                Ok(a) => a,
                Err(e) => {
                    o.failures.push(format!("{} at {at:?}: {e}", p.spec.name));
                    continue;
                }
            };
            let (kt, ht) = projected_oracle(&p.surface, p.spec.nu, at);
            for (label, k, h) in [("library oracle", a.oracle.k, &a.oracle.h), ("projected oracle", kt, &ht)] {
                let ek = (a.full.k - k).abs() / k.abs().max(1.0);
                let eh = diff_norm(&a.full.h, h) / norm(h).max(1.0);
                worst = worst.max(ek).max(eh);
                o.check(ek <= 1e-8 && eh <= 1e-8, || {
                    format!("{} at {at:?} vs {label}: K err {ek:e}, H err {eh:e}", p.spec.name)
                });
            }
        }
    }

    // closed-form anchors
    let full = |name: &str, at: [f64; 2]| -> Curvature<f64> {
        let p = lookup(name).unwrap().prepare().unwrap();
        curvature_at(&p.surface, at, &opts).unwrap()
    };
    let anchor_points = |name: &str| lookup(name).unwrap().grid_points();
    let mut anchor = |name: &str, want: &dyn Fn([f64; 2]) -> f64, what: &str, got: &dyn Fn(&Curvature<f64>) -> f64| {
        for at in anchor_points(name) {
            let c = full(name, at);
            let (g, w) = (got(&c), want(at));
            let err = (g - w).abs() / w.abs().max(1.0);
            worst = worst.max(err);
            o.check(err <= 1e-8, || format!("{name} at {at:?}: {what} = {g}, expected {w}"));
        }
    };
    let k = |c: &Curvature<f64>| c.k;
    anchor("sphere", &|_| 1.0, "K", &k);
    anchor("sphere-r2", &|_| 0.25, "K", &k);
    anchor("hyperbolic-plane", &|_| -1.0, "K", &k);
    anchor("de-sitter", &|_| 1.0, "K", &k);
    anchor("helicoid", &|at| -1.0 / (1.0 + at[0] * at[0]).powi(2), "K", &k);
    anchor("catenoid", &|_| 0.0, "|H|", &|c| norm(&c.h));
    anchor("flat-torus-r4", &|_| 0.0, "K", &k);
    anchor("flat-torus-r4", &|_| 0.5, "g(H,H)", &|c| inner(0, &c.h, &c.h));
    o.summary = format!("{points} points, worst relative error {worst:.1e} (tol 1e-8)");
    o
}

fn criterion_2(specs: &[PreparedSpec], all: &Analyses) -> Outcome {
    let mut o = Outcome::new(2, "trace, Z-map, Z-sum and double-trace identities");
    let mut worst = 0.0f64;
    for (p, samples) in specs.iter().zip(all) {
        for (at, a) in samples {
            let at = *at;
            let Ok(a) = a else {
                o.failures.push(format!("{} at {at:?}: evaluation failed", p.spec.name));
                continue;
            };
            let r = &a.residuals;
            for (name, v) in [
                ("P2trace", r.p2_trace),
                ("SAtrace", r.sa_trace),
                ("B-trace", r.ba_trace),
                ("Zsum", r.z_sum),
                ("Z idempotence", r.z_idempotence),
                ("Z trace", r.z_trace),
                ("Z self-adjointness", r.z_self_adjoint),
                ("double trace", r.double_trace),
            ] {
                worst = worst.max(v);
                o.check(v <= 1e-9, || format!("{} at {at:?}: {name} residual {v:e}", p.spec.name));
            }
        }
    }
    o.summary = format!("worst residual {worst:.1e} (tol 1e-9)");
    o
}

fn criterion_3(specs: &[PreparedSpec], all: &Analyses) -> Outcome {
    let mut o = Outcome::new(3, "Z image rank, spanned normal space, sign structure");
    let mut worst = 0.0f64;
    for (p, samples) in specs.iter().zip(all) {
        let codim = p.spec.m - 2;
        for (at, a) in samples {
            let at = *at;
            let Ok(a) = a else {
                o.failures.push(format!("{} at {at:?}: evaluation failed", p.spec.name));
                continue;
            };
            let s = &a.signs;
            o.check(s.image_rank == codim, || {
                format!("{} at {at:?}: rank {} != {codim}", p.spec.name, s.image_rank)
            });
            worst = worst.max(a.residuals.z_projector);
            o.check(a.residuals.z_projector <= 1e-8, || {
                format!("{} at {at:?}: projector residual {:e}", p.spec.name, a.residuals.z_projector)
            });
            let mut zs = s.z_signs.clone();
            let mut cs = s.classical_signs.clone();
            zs.sort_unstable();
            cs.sort_unstable();
            let timelike = zs.iter().filter(|&&x| x < 0).count() as i64;
            let delta = p.spec.nu as i64 - s.ind_g as i64;
            o.check(zs == cs && timelike == delta, || {
                format!(
                    "{} at {at:?}: signs {:?} vs {:?}, {timelike} timelike normals, ind gbar - ind g = {delta}",
                    p.spec.name, s.z_signs, s.classical_signs
                )
            });
        }
    }
    o.summary = format!("worst projector residual {worst:.1e} (tol 1e-8)");
    o
}

fn criterion_4(specs: &[PreparedSpec]) -> Outcome {
    let mut o = Outcome::new(4, "density independence (1, sqrt|g|, 1+0.3*sin(u))");
    let densities = [
        DensityChoice::Unit,
        DensityChoice::SqrtAbsG,
        DensityChoice::Expression(parse_expr("1+0.3*sin(u)").unwrap()),
    ];
    let mut worst = 0.0f64;
    for p in specs {
        for at in p.points() {
            let results: Vec<Curvature<f64>> = densities
                .iter()
                .map(|d| {
                    let opts = AnalysisOptions {
                        density: d.clone(),
                        ..AnalysisOptions::default()
                    };
                    curvature_at(&p.surface, at, &opts).unwrap()
                })
                .collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (&results[i], &results[j]);
                    let ek = (a.k - b.k).abs() / a.k.abs().max(b.k.abs()).max(1.0);
                    let eh = diff_norm(&a.h, &b.h) / norm(&a.h).max(norm(&b.h)).max(1.0);
                    worst = worst.max(ek).max(eh);
                    o.check(ek <= 1e-7 && eh <= 1e-7, || {
                        format!("{} at {at:?}: densities {i} vs {j}: K {ek:e}, H {eh:e}", p.spec.name)
                    });
                }
            }
        }
    }
    o.summary = format!("worst pairwise relative difference {worst:.1e} (tol 1e-7)");
    o
}

fn criterion_5(specs: &[PreparedSpec]) -> Outcome {
    let mut o = Outcome::new(5, "naive vs reduced epsilon contraction");
    let mut tuples = 0u64;
    for m in 3..=6 {
        let all: Vec<[usize; 3]> = (0..m * m * m).map(|f| [f / (m * m), (f / m) % m, f % m]).collect();
        for jkl in &all {
            for irn in &all {
                tuples += 1;
                let (n, r) = (eps_contract_naive(*jkl, *irn, m), eps_contract_reduced(*jkl, *irn, m));
                o.check(n == r, || format!("m={m} {jkl:?} {irn:?}: naive {n}, reduced {r}"));
            }
        }
    }

    // structural: naive visits m^(m-3) terms, reduced a fixed number for every m
    for m in 3..=8 {
        let (_, visited) = eps_contract_naive_counted([0, 1, 2], [0, 1, 2], m);
        o.check(visited == Contraction::Naive.work_per_call(m), || {
            format!("m={m}: naive visited {visited} terms")
        });
        o.check(Contraction::Reduced.work_per_call(m) == Contraction::Reduced.work_per_call(3), || {
            format!("m={m}: reduced work grows with m")
        });
        o.check(distinct_triples(m).len() == m * (m - 1) * (m - 2), || format!("m={m}: triple count"));
    }

    let mut worst = 0.0f64;
    let naive = AnalysisOptions {
        contraction: Contraction::Naive,
        ..AnalysisOptions::default()
    };
    let reduced = AnalysisOptions::default();
    for p in specs {
        for at in p.points() {
            let a = curvature_at(&p.surface, at, &naive).unwrap();
            let b = curvature_at(&p.surface, at, &reduced).unwrap();
            let d = a.distance(&b);
            worst = worst.max(d);
            o.check(d <= 1e-12, || format!("{} at {at:?}: naive vs reduced {d:e}", p.spec.name));
        }
    }

    let r5 = lookup("r5-graph").unwrap().prepare().unwrap();
    match run_bench(&r5.surface, &r5.points()[..8], &r5.density, 8, 3) {
        Ok(b) => {
            o.summary = format!(
                "{tuples} integer tuples exact, assembled worst {worst:.1e} (tol 1e-12), m=5 work/call {} vs {}, timing ratio {:.2}",
                b.naive_work,
                b.reduced_work,
                b.ratio()
            )
        }
        Err(e) => o.failures.push(format!("bench: {e}")),
    }
    o
}

/// `{f, g}` with `ρ = √g`, from first derivatives of `f` and `g`.
fn canonical_bracket(fg: [f64; 2], gg: [f64; 2], sqrt_g: f64) -> f64 {
    (fg[0] * gg[1] - fg[1] * gg[0]) / sqrt_g
}

fn perm_sign(idx: &[usize]) -> i64 {
    let mut s = 1;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] == idx[b] {
                return 0;
            }
            if idx[a] > idx[b] {
                s = -s;
            }
        }
    }
    s
}

/// `Σ_L ε_{jklL} ε_{irnL}` for every `(jkl, irn)`, by brute force over all `L`.
fn epsilon_products(m: usize) -> Vec<i64> {
    let tail = m - 3;
    let total = m.pow(tail as u32);
    let tails: Vec<Vec<usize>> = (0..total)
        .map(|mut f| {
            (0..tail)
                .map(|_| {
                    let d = f % m;
                    f /= m;
                    d
                })
                .collect()
        })
        .collect();
    let m3 = m * m * m;
    let triple = |t: usize| [t / (m * m), (t / m) % m, t % m];
    let mut out = vec![0i64; m3 * m3];
    for a in 0..m3 {
        for b in 0..m3 {
            out[a * m3 + b] = tails
                .iter()
                .map(|ls| {
                    let x: Vec<usize> = triple(a).iter().chain(ls).copied().collect();
                    let y: Vec<usize> = triple(b).iter().chain(ls).copied().collect();
                    perm_sign(&x) * perm_sign(&y)
                })
                .sum();
        }
    }
    out
}

/// The Euclidean formula `K = -1/(8(m-3)!) Σ_L ε_{jklL} ε_{irnL} {x^i,{x^k,x^l}} {x^j,{x^r,x^n}}`
/// for the canonical bracket, evaluated by direct summation over every index.
fn euclidean_bracket_gauss(surface: &Surface, at: [f64; 2], eps: &[i64]) -> f64 {
    let x = coordinate_jets(surface, at);
    let m = x.len();
    let e: [Vec<f64>; 2] = [0, 1].map(|a| x.iter().map(|j| j.grad[a]).collect());
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let (e00, e01, e11) = (dot(&e[0], &e[0]), dot(&e[0], &e[1]), dot(&e[1], &e[1]));
    let g = e00 * e11 - e01 * e01;
    // ∂_c g from ∂_c e_a = hess[a][c]
    let de = |a: usize, c: usize| -> Vec<f64> { x.iter().map(|j| j.hess[a][c]).collect() };
    let dg: Vec<f64> = (0..2)
        .map(|c| {
            let d00 = 2.0 * dot(&de(0, c), &e[0]);
            let d11 = 2.0 * dot(&de(1, c), &e[1]);
            let d01 = dot(&de(0, c), &e[1]) + dot(&e[0], &de(1, c));
            d00 * e11 + e00 * d11 - 2.0 * e01 * d01
        })
        .collect();
    let s = g.sqrt();
    let ds = [dg[0] / (2.0 * s), dg[1] / (2.0 * s)];
    // P^{kl} and its gradient
    let mut p_grad = vec![[0.0; 2]; m * m];
    for k in 0..m {
        for l in 0..m {
            let num = x[k].grad[0] * x[l].grad[1] - x[k].grad[1] * x[l].grad[0];
            for c in 0..2 {
                let dnum = x[k].hess[0][c] * x[l].grad[1] + x[k].grad[0] * x[l].hess[1][c]
                    - x[k].hess[1][c] * x[l].grad[0]
                    - x[k].grad[1] * x[l].hess[0][c];
                p_grad[k * m + l][c] = (dnum * s - num * ds[c]) / g;
            }
        }
    }
    let nested = |i: usize, k: usize, l: usize| canonical_bracket(x[i].grad, p_grad[k * m + l], s);
    let idx = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
    let mut sum = 0.0;
    for j in 0..m {
        for k in 0..m {
            for l in 0..m {
                for i in 0..m {
                    for r in 0..m {
                        for n in 0..m {
                            let c = eps[idx(j, k, l) * m * m * m + idx(i, r, n)];
                            if c != 0 {
                                sum += c as f64 * nested(i, k, l) * nested(j, r, n);
                            }
                        }
                    }
                }
            }
        }
    }
    let tail = m - 3;
    let fact: f64 = (1..=tail).map(|x| x as f64).product();
    -sum / (8.0 * fact)
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(6, "Euclidean specialization matches the Riemannian bracket formula");
    let closed: [(&str, fn([f64; 2]) -> f64); 4] = [
        ("sphere", |_| 1.0),
        ("torus", |at| at[0].cos() / (2.0 + at[0].cos())),
        ("catenoid", |at| -1.0 / at[0].cosh().powi(4)),
        ("helicoid", |at| -1.0 / (1.0 + at[0] * at[0]).powi(2)),
    ];
    let opts = AnalysisOptions::default();
    let eps: Vec<Vec<i64>> = (0..=5).map(|m| if m < 3 { Vec::new() } else { epsilon_products(m) }).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, want) in closed {
        let p = lookup(name).unwrap().prepare().unwrap();
        assert_eq!(p.spec.nu, 0);
        for at in p.points() {
            let k_full = curvature_at(&p.surface, at, &opts).unwrap().k;
            let k_euclid = euclidean_bracket_gauss(&p.surface, at, &eps[p.spec.m]);
            let w = want(at);
            for (label, v) in [("gauss_full", k_full), ("Euclidean bracket formula", k_euclid)] {
                let err = (v - w).abs() / w.abs().max(1.0);
                worst = worst.max(err);
                o.check(err <= 1e-8, || format!("{name} at {at:?}: {label} {v}, closed form {w}"));
            }
            count += 1;
        }
    }
    for name in ["flat-torus-r4", "graph-surface-r4", "r5-product", "r5-graph"] {
        let p = lookup(name).unwrap().prepare().unwrap();
        for at in p.points().into_iter().step_by(4) {
            let k_full = curvature_at(&p.surface, at, &opts).unwrap().k;
            let k_euclid = euclidean_bracket_gauss(&p.surface, at, &eps[p.spec.m]);
            let err = (k_full - k_euclid).abs() / k_euclid.abs().max(1.0);
            worst = worst.max(err);
            o.check(err <= 1e-8, || format!("{name} at {at:?}: gauss_full {k_full}, Euclidean {k_euclid}"));
            count += 1;
        }
    }
    o.summary = format!("{count} points, worst relative error {worst:.1e} (tol 1e-8)");
    o
}

fn criterion_7(specs: &[PreparedSpec]) -> Outcome {
    let mut o = Outcome::new(7, "jet derivatives vs finite differences");
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (hg, hh) = (1e-5, 1e-4);
    let mut worst_g = 0.0f64;
    let mut worst_h = 0.0f64;
    let mut exprs = 0;
    for p in specs {
        let [u0, u1, v0, v1] = p.spec.domain;
        for (ci, ast) in p.surface.coords.iter().enumerate() {
            exprs += 1;
            for _ in 0..25 {
                let at = [rng.gen_range(u0..u1), rng.gen_range(v0..v1)];
                let j = eval_jet::<f64>(ast, at).unwrap();
                let f = |du: f64, dv: f64| eval_value(ast, [at[0] + du, at[1] + dv]);
                let fd_grad = [
                    (f(hg, 0.0) - f(-hg, 0.0)) / (2.0 * hg),
                    (f(0.0, hg) - f(0.0, -hg)) / (2.0 * hg),
                ];
                let f0 = f(0.0, 0.0);
                let fd_hess = [
                    [
                        (f(hh, 0.0) - 2.0 * f0 + f(-hh, 0.0)) / (hh * hh),
                        (f(hh, hh) - f(hh, -hh) - f(-hh, hh) + f(-hh, -hh)) / (4.0 * hh * hh),
                    ],
                    [0.0, (f(0.0, hh) - 2.0 * f0 + f(0.0, -hh)) / (hh * hh)],
                ];
                for a in 0..2 {
                    let e = (j.grad[a] - fd_grad[a]).abs() / j.grad[a].abs().max(1.0);
                    worst_g = worst_g.max(e);
                    o.check(e <= 1e-6, || {
                        format!("{} coord {ci} at {at:?}: d{a} jet {} fd {}", p.spec.name, j.grad[a], fd_grad[a])
                    });
                }
                for (a, b) in [(0, 0), (0, 1), (1, 1)] {
                    let e = (j.hess[a][b] - fd_hess[a][b]).abs() / j.hess[a][b].abs().max(1.0);
                    worst_h = worst_h.max(e);
                    o.check(e <= 1e-4, || {
                        format!(
                            "{} coord {ci} at {at:?}: d{a}d{b} jet {} fd {}",
                            p.spec.name, j.hess[a][b], fd_hess[a][b]
                        )
                    });
                }
            }
        }
    }
    o.summary = format!(
        "{exprs} expressions x 25 points, worst gradient {worst_g:.1e} (tol 1e-6), Hessian {worst_h:.1e} (tol 1e-4)"
    );
    o
}

fn main() -> ExitCode {
    let specs = prepared_catalog();
    assert!(specs.iter().all(|p| p.spec.grid == [8, 8]));
    let all = analyze_all(&specs);
    let outcomes = [
        criterion_1(&specs, &all),
        criterion_2(&specs, &all),
        criterion_3(&specs, &all),
        criterion_4(&specs),
        criterion_5(&specs),
        criterion_6(),
        criterion_7(&specs),
    ];
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {} -- {}", o.id, o.name, o.summary);
        for f in o.failures.iter().take(5) {
            println!("       {f}");
        }
        if o.failures.len() > 5 {
            println!("       ... {} more", o.failures.len() - 5);
        }
        failed += usize::from(!o.failures.is_empty());
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", outcomes.len());
        ExitCode::FAILURE
    }
}
