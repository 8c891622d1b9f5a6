//! Grid evaluation over a worker pool, and the curvature report encodings.
//!
//! Workers share only the immutable surface and options; results come back in
//! input order, so reports are byte-identical for any thread count.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{analyze_point, curvature_at, AnalysisOptions, PointAnalysis};
use crate::embedding::Surface;
use crate::error::GeometryError;

/// Maps `f` over `points` on `threads` workers (rayon's default pool when
/// `None`), preserving order.
pub fn evaluate_grid<R, F>(points: &[[f64; 2]], threads: Option<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn([f64; 2]) -> R + Sync + Send,
{
    match threads {
        None => points.par_iter().map(|p| f(*p)).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(|| points.par_iter().map(|p| f(*p)).collect()),
    }
}

/// Residual subset carried by curvature records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordResiduals {
    #[serde(rename = "P2trace")]
    pub p2_trace: f64,
    #[serde(rename = "SAtrace")]
    pub sa_trace: f64,
    #[serde(rename = "Zproj")]
    pub z_projector: f64,
    #[serde(rename = "Ztrace")]
    pub z_trace: f64,
    #[serde(rename = "Zsum")]
    pub z_sum: f64,
    pub rho_independence: f64,
}

impl RecordResiduals {
    const NAMES: [&'static str; 6] = ["P2trace", "SAtrace", "Zproj", "Ztrace", "Zsum", "rho_independence"];

    fn values(&self) -> [f64; 6] {
        [
            self.p2_trace,
            self.sa_trace,
            self.z_projector,
            self.z_trace,
            self.z_sum,
            self.rho_independence,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureRecord {
    pub u: f64,
    pub v: f64,
    /// `ok`, or `skipped` for a degenerate point under `--skip-degenerate`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(rename = "K_full")]
    pub k_full: Option<f64>,
    #[serde(rename = "H_full")]
    pub h_full: Option<Vec<f64>>,
    #[serde(rename = "K_frame", skip_serializing_if = "Option::is_none")]
    pub k_frame: Option<f64>,
    #[serde(rename = "K_oracle", skip_serializing_if = "Option::is_none")]
    pub k_oracle: Option<f64>,
    #[serde(rename = "H_oracle", skip_serializing_if = "Option::is_none")]
    pub h_oracle: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<RecordResiduals>,
}

impl CurvatureRecord {
    fn empty(at: [f64; 2]) -> Self {
        Self {
            u: at[0],
            v: at[1],
            status: String::new(),
            message: None,
            k_full: None,
            h_full: None,
            k_frame: None,
            k_oracle: None,
            h_oracle: None,
            residuals: None,
        }
    }

    pub fn skipped(at: [f64; 2], err: &GeometryError) -> Self {
        Self {
            status: "skipped".into(),
            message: Some(err.to_string()),
            ..Self::empty(at)
        }
    }

    fn from_analysis(a: &PointAnalysis<f64>) -> Self {
        let r = &a.residuals;
        Self {
            u: a.at[0],
            v: a.at[1],
            status: "ok".into(),
            message: None,
            k_full: Some(a.full.k),
            h_full: Some(a.full.h.clone()),
            k_frame: Some(a.frame.k),
            k_oracle: Some(a.oracle.k),
            h_oracle: Some(a.oracle.h.clone()),
            residuals: Some(RecordResiduals {
                p2_trace: r.p2_trace,
                sa_trace: r.sa_trace,
                z_projector: r.z_projector,
                z_trace: r.z_trace,
                z_sum: r.z_sum,
                rho_independence: r.rho_independence,
            }),
        }
    }
}

/// A point that could not be evaluated.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("at (u, v) = ({u}, {v}): {source}")]
pub struct PointError {
    pub u: f64,
    pub v: f64,
    #[source]
    pub source: GeometryError,
}

/// Evaluates one record per grid point. With `compare`, the oracle values and
/// residuals are filled in as well. With `skip_degenerate`, failing points
/// become `skipped` records; otherwise the first failure in row-major order is
/// returned.
pub fn curvature_records(
    surface: &Surface,
    points: &[[f64; 2]],
    opts: &AnalysisOptions,
    compare: bool,
    skip_degenerate: bool,
    threads: Option<usize>,
) -> Result<Vec<CurvatureRecord>, PointError> {
    let results = evaluate_grid(points, threads, |at| -> Result<CurvatureRecord, GeometryError> {
        if compare {
            analyze_point(surface, at, opts).map(|a| CurvatureRecord::from_analysis(&a))
        } else {
            let c = curvature_at(surface, at, opts)?;
            Ok(CurvatureRecord {
                status: "ok".into(),
                message: None,
                k_full: Some(c.k),
                h_full: Some(c.h),
                ..CurvatureRecord::empty(at)
            })
        }
    });
    results
        .into_iter()
        .zip(points)
        .map(|(r, at)| match r {
            Ok(rec) => Ok(rec),
            Err(e) if skip_degenerate => Ok(CurvatureRecord::skipped(*at, &e)),
            Err(source) => Err(PointError {
                u: at[0],
                v: at[1],
                source,
            }),
        })
        .collect()
}

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records as CSV with a header row. `m` is the ambient dimension; the
/// vector columns are `H_full_0 .. H_full_{m-1}`.
pub fn write_csv<W: Write>(out: W, records: &[CurvatureRecord], m: usize, compare: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["u".into(), "v".into(), "status".into(), "K_full".into()];
    header.extend((0..m).map(|i| format!("H_full_{i}")));
    if compare {
        header.push("K_frame".into());
        header.push("K_oracle".into());
        header.extend((0..m).map(|i| format!("H_oracle_{i}")));
        header.extend(RecordResiduals::NAMES.iter().map(|s| s.to_string()));
    }
    header.push("message".into());
    w.write_record(&header)?;

    let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    let cols = |v: &Option<Vec<f64>>| -> Vec<String> {
        match v {
            Some(v) => v.iter().map(|x| fmt17(*x)).collect(),
            None => vec![String::new(); m],
        }
    };
    for r in records {
        let mut row = vec![fmt17(r.u), fmt17(r.v), r.status.clone(), opt(r.k_full)];
        row.extend(cols(&r.h_full));
        if compare {
            row.push(opt(r.k_frame));
            row.push(opt(r.k_oracle));
            row.extend(cols(&r.h_oracle));
            match &r.residuals {
                Some(res) => row.extend(res.values().iter().map(|x| fmt17(*x))),
                None => row.extend(std::iter::repeat(String::new()).take(RecordResiduals::NAMES.len())),
            }
        }
        row.push(r.message.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, records: &[CurvatureRecord]) -> serde_json::Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)
}
