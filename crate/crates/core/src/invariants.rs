//! Grid-wide summary of identity residuals and index bookkeeping.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::PointAnalysis;

/// One identity: its worst residual over the grid and the bound it must meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Points sharing one index configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignRow {
    pub ind_ambient: usize,
    pub ind_g: usize,
    pub delta: i64,
    /// Sorted normal signs of the classical frame.
    pub signs: Vec<i8>,
    pub points: usize,
    /// Points where the `𝒵` frame disagrees (rank, sign multiset, or timelike count).
    pub inconsistent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub points: usize,
    pub skipped: usize,
    pub identities: Vec<IdentityRow>,
    pub signs: Vec<SignRow>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed) && self.signs.iter().all(|s| s.inconsistent == 0)
    }
}

/// Default bounds, all relative to a local scale.
pub const TOLERANCES: [(&str, f64); 16] = [
    ("P2trace", 1e-9),
    ("SAtrace", 1e-9),
    ("B-trace", 1e-9),
    ("double trace", 1e-9),
    ("Z idempotence", 1e-9),
    ("Z trace", 1e-9),
    ("Z self-adjoint", 1e-9),
    ("Zsum", 1e-9),
    ("Z orthogonality", 1e-9),
    ("Z projector", 1e-8),
    ("completeness", 1e-9),
    ("orthonormality", 1e-9),
    ("rho independence", 1e-8),
    ("frame path", 1e-6),
    ("oracle K", 1e-8),
    ("oracle H", 1e-8),
];

/// Summarizes per-point analyses. `tolerance` replaces every default bound.
pub fn summarize(analyses: &[PointAnalysis<f64>], skipped: usize, codim: usize, tolerance: Option<f64>) -> InvariantReport {
    let mut worst = [0.0f64; 16];
    let mut signs: BTreeMap<(usize, usize, i64, Vec<i8>), (usize, usize)> = BTreeMap::new();
    for a in analyses {
        let r = &a.residuals;
        let vals = [
            r.p2_trace,
            r.sa_trace,
            r.ba_trace,
            r.double_trace,
            r.z_idempotence,
            r.z_trace,
            r.z_self_adjoint,
            r.z_sum,
            r.z_orthogonality,
            r.z_projector,
            r.completeness,
            r.orthonormality,
            r.rho_independence,
            r.frame_path,
            r.oracle_k,
            r.oracle_h,
        ];
        for (w, v) in worst.iter_mut().zip(vals) {
            // NaN must count as a failure
            *w = if v.is_nan() || w.is_nan() { f64::NAN } else { w.max(v) };
        }
        let s = &a.signs;
        let mut sorted = s.classical_signs.clone();
        sorted.sort_unstable();
        let e = signs.entry((s.ind_ambient, s.ind_g, s.delta, sorted)).or_default();
        e.0 += 1;
        e.1 += usize::from(!s.consistent(codim));
    }
    let identities = TOLERANCES
        .iter()
        .zip(worst)
        .map(|(&(name, tol), max_residual)| {
            let tolerance = tolerance.unwrap_or(tol);
            IdentityRow {
                name,
                max_residual,
                tolerance,
                passed: max_residual <= tolerance,
            }
        })
        .collect();
    let signs = signs
        .into_iter()
        .map(|((ind_ambient, ind_g, delta, signs), (points, inconsistent))| SignRow {
            ind_ambient,
            ind_g,
            delta,
            signs,
            points,
            inconsistent,
        })
        .collect();
    InvariantReport {
        points: analyses.len(),
        skipped,
        identities,
        signs,
    }
}

impl std::fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<18} {:>12} {:>10}  result", "identity", "max residual", "tolerance")?;
        for r in &self.identities {
            let tag = if r.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{:<18} {:>12.3e} {:>10.0e}  {tag}", r.name, r.max_residual, r.tolerance)?;
        }
        writeln!(f)?;
        writeln!(f, "{:>9} {:>6} {:>6}  {:<14} {:>6}  frame check", "ind gbar", "ind g", "delta", "normal signs", "points")?;
        for s in &self.signs {
            let signs: Vec<&str> = s.signs.iter().map(|&x| if x < 0 { "-" } else { "+" }).collect();
            let tag = if s.inconsistent == 0 {
                "PASS".to_string()
            } else {
                format!("FAIL ({} points)", s.inconsistent)
            };
            writeln!(
                f,
                "{:>9} {:>6} {:>6}  {:<14} {:>6}  {tag}",
                s.ind_ambient,
                s.ind_g,
                s.delta,
                signs.join(" "),
                s.points
            )?;
        }
        writeln!(f)?;
        write!(f, "{} points evaluated", self.points)?;
        if self.skipped > 0 {
            write!(f, ", {} degenerate points skipped", self.skipped)?;
        }
        writeln!(f)
    }
}
