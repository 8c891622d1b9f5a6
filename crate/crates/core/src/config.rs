//! Surface specifications: the config-file format, validation, and grid layout.
//!
//! A spec file is TOML whose keys are exactly the fields of [`SurfaceSpec`]:
//!
//! ```toml
//! name = "saddle"
//! m = 3
//! nu = 0
//! coords = ["u", "v", "u*v"]
//! domain = [-1.0, 1.0, -1.0, 1.0]   # u_min, u_max, v_min, v_max
//! grid = [8, 8]                     # n_u, n_v
//! rho = "sqrt_abs_g"                # or "unit", or an expression in u, v
//! excluded_margins = 0.05           # optional, fraction of each side
//! ```
//!
//! Domain bounds may also be constant expressions such as `"pi - 0.2"`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::catalog;
use crate::embedding::Surface;
use crate::exprlang::{eval_constant, parse_expr, Ast};
use crate::poisson::DensityChoice;
use crate::tensor::AmbientSignature;

#[derive(Debug, Clone, PartialEq)]
pub enum RhoSpec {
    Unit,
    SqrtAbsG,
    Expression(String),
}

impl Default for RhoSpec {
    fn default() -> Self {
        RhoSpec::SqrtAbsG
    }
}

impl FromStr for RhoSpec {
    type Err = std::convert::Infallible;

    /// `unit`, `sqrtg` / `sqrt_abs_g`, `expr:<s>`; anything else is taken as an expression.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Ok(match t {
            "unit" => RhoSpec::Unit,
            "sqrtg" | "sqrt_abs_g" => RhoSpec::SqrtAbsG,
            _ => RhoSpec::Expression(t.strip_prefix("expr:").unwrap_or(t).to_string()),
        })
    }
}

impl fmt::Display for RhoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoSpec::Unit => f.write_str("unit"),
            RhoSpec::SqrtAbsG => f.write_str("sqrt_abs_g"),
            RhoSpec::Expression(s) => write!(f, "expr:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub m: usize,
    pub nu: usize,
    pub coords: Vec<String>,
    /// `[u_min, u_max, v_min, v_max]`.
    pub domain: [f64; 4],
    /// `[n_u, n_v]`.
    pub grid: [usize; 2],
    pub rho: RhoSpec,
    /// Fraction of each side of the domain left out before sampling.
    pub excluded_margins: f64,
}

/// A validation failure tied to one spec field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl FieldError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

/// A spec that failed to load, with enough context to locate the problem.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    /// File path or `catalog:<name>`.
    pub origin: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// A validated spec with its expressions parsed.
#[derive(Debug, Clone)]
pub struct PreparedSpec {
    pub spec: SurfaceSpec,
    pub surface: Surface,
    pub density: DensityChoice,
}

impl SurfaceSpec {
    pub fn prepare(&self) -> Result<PreparedSpec, FieldError> {
        if self.m < 3 {
            return Err(FieldError::new("m", format!("ambient dimension must be at least 3, got {}", self.m)));
        }
        if self.nu > self.m {
            return Err(FieldError::new("nu", format!("nu = {} exceeds m = {}", self.nu, self.m)));
        }
        if self.coords.len() != self.m {
            return Err(FieldError::new(
                "coords",
                format!("expected {} coordinate expressions, got {}", self.m, self.coords.len()),
            ));
        }
        let sig = AmbientSignature::new(self.m, self.nu).map_err(|e| FieldError::new("m", e.to_string()))?;
        let coords: Vec<&str> = self.coords.iter().map(String::as_str).collect();
        let surface = Surface::parse(sig, &coords)
            .map_err(|(i, e)| FieldError::new("coords", format!("coordinate {i} (\"{}\"): {e}", coords[i])))?;

        let [u0, u1, v0, v1] = self.domain;
        if !self.domain.iter().all(|x| x.is_finite()) || !(u0 < u1) || !(v0 < v1) {
            return Err(FieldError::new(
                "domain",
                "expected finite bounds with u_min < u_max and v_min < v_max",
            ));
        }
        if self.grid.iter().any(|&n| n < 2) {
            return Err(FieldError::new("grid", "sample counts must be at least 2"));
        }
        if !(0.0..0.5).contains(&self.excluded_margins) {
            return Err(FieldError::new("excluded_margins", "must lie in [0, 0.5)"));
        }
        let density = match &self.rho {
            RhoSpec::Unit => DensityChoice::Unit,
            RhoSpec::SqrtAbsG => DensityChoice::SqrtAbsG,
            RhoSpec::Expression(s) => DensityChoice::Expression(
                parse_expr(s).map_err(|e| FieldError::new("rho", format!("\"{s}\": {e}")))?,
            ),
        };
        Ok(PreparedSpec {
            spec: self.clone(),
            surface,
            density,
        })
    }

    /// Sample points, row-major in `(u, v)`: `u` outer, `v` inner.
    pub fn grid_points(&self) -> Vec<[f64; 2]> {
        let [u0, u1, v0, v1] = self.domain;
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            let inset = self.excluded_margins * (hi - lo);
            let (a, b) = (lo + inset, hi - inset);
            (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
        };
        let us = axis(u0, u1, self.grid[0]);
        let vs = axis(v0, v1, self.grid[1]);
        us.iter().flat_map(|&u| vs.iter().map(move |&v| [u, v])).collect()
    }
}

impl PreparedSpec {
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.spec.grid_points()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Expr(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    m: usize,
    nu: usize,
    coords: Vec<String>,
    domain: Vec<Bound>,
    grid: Vec<usize>,
    #[serde(default)]
    rho: Option<String>,
    #[serde(default)]
    excluded_margins: Option<f64>,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        l.trim_start()
            .strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn parse_bound(b: &Bound) -> Result<f64, FieldError> {
    match b {
        Bound::Number(x) => Ok(*x),
        Bound::Expr(s) => {
            let ast: Ast = parse_expr(s).map_err(|e| FieldError::new("domain", format!("\"{s}\": {e}")))?;
            eval_constant(&ast).ok_or_else(|| FieldError::new("domain", format!("\"{s}\" is not a constant")))
        }
    }
}

fn from_raw(raw: RawSpec) -> Result<SurfaceSpec, FieldError> {
    let domain: [Bound; 4] = raw
        .domain
        .try_into()
        .map_err(|_| FieldError::new("domain", "expected [u_min, u_max, v_min, v_max]"))?;
    let grid: [usize; 2] = raw
        .grid
        .try_into()
        .map_err(|_| FieldError::new("grid", "expected [n_u, n_v]"))?;
    let mut bounds = [0.0; 4];
    for (slot, b) in bounds.iter_mut().zip(&domain) {
        *slot = parse_bound(b)?;
    }
    Ok(SurfaceSpec {
        name: raw.name,
        m: raw.m,
        nu: raw.nu,
        coords: raw.coords,
        domain: bounds,
        grid,
        rho: raw.rho.map(|s| s.parse().unwrap()).unwrap_or_default(),
        excluded_margins: raw.excluded_margins.unwrap_or(0.0),
    })
}

/// Parses and validates spec text.
pub fn parse_config(text: &str, origin: &str) -> Result<PreparedSpec, ConfigError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| ConfigError {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of_offset(text, s.start)),
        field: None,
        message: e.message().to_string(),
    })?;
    let field_err = |e: FieldError| ConfigError {
        origin: origin.to_string(),
        line: line_of_key(text, e.field),
        field: Some(e.field.to_string()),
        message: e.message,
    };
    from_raw(raw).map_err(field_err)?.prepare().map_err(field_err)
}

/// Loads a spec from a file path, or from the built-in catalog when no such file exists.
pub fn load_spec(arg: &str) -> Result<PreparedSpec, ConfigError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: arg.to_string(),
            line: None,
            field: None,
            message: e.to_string(),
        })?;
        return parse_config(&text, arg);
    }
    let origin = format!("catalog:{arg}");
    let spec = catalog::lookup(arg).ok_or_else(|| ConfigError {
        origin: origin.clone(),
        line: None,
        field: None,
        message: format!(
            "no such file and no built-in surface of that name (known: {})",
            catalog::names().join(", ")
        ),
    })?;
    spec.prepare().map_err(|e| ConfigError {
        origin,
        line: None,
        field: Some(e.field.to_string()),
        message: e.message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SADDLE: &str = r#"
name = "saddle"
m = 3
nu = 0
coords = ["u", "v", "u*v"]
domain = [-1.0, 1.0, "-pi/4", "pi/4"]
grid = [3, 4]
"#;

    #[test]
    fn parses_minimal_file() {
        let p = parse_config(SADDLE, "saddle.toml").unwrap();
        assert_eq!(p.spec.m, 3);
        assert_eq!(p.spec.rho, RhoSpec::SqrtAbsG);
        assert!((p.spec.domain[3] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(p.points().len(), 12);
    }

    #[test]
    fn grid_is_row_major_and_inset() {
        let mut spec = parse_config(SADDLE, "x").unwrap().spec;
        spec.domain = [0.0, 1.0, 0.0, 10.0];
        spec.excluded_margins = 0.1;
        let pts = spec.grid_points();
        assert_eq!(pts[0], [0.1, 1.0]);
        assert_eq!(pts[1][0], 0.1);
        assert!((pts[3][1] - 9.0).abs() < 1e-12);
        assert!((pts[4][0] - 0.5).abs() < 1e-12);
        assert!((pts[11][0] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn nu_above_m_is_rejected_with_line() {
        let text = SADDLE.replace("nu = 0", "nu = 4");
        let err = parse_config(&text, "f.toml").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("nu"));
        assert_eq!(err.line, Some(4));
    }

    #[test]
    fn bad_coordinate_cites_position() {
        let text = SADDLE.replace("\"u*v\"", "\"u*(v\"");
        let err = parse_config(&text, "f.toml").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("coords"));
        assert!(err.message.contains("coordinate 2"), "{err}");
        assert!(err.message.contains("offset 4"), "{err}");
    }

    #[test]
    fn unknown_key_and_syntax_errors_carry_lines() {
        let err = parse_config(&format!("{SADDLE}colour = 3\n"), "f.toml").unwrap_err();
        assert!(err.line.is_some());
        assert!(err.message.contains("colour"), "{err}");
        let err = parse_config("name = \n", "f.toml").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn small_grids_and_dimensions_rejected() {
        let err = parse_config(&SADDLE.replace("[3, 4]", "[1, 4]"), "f").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("grid"));
        let text = SADDLE.replace("m = 3", "m = 2").replace(", \"u*v\"", "");
        let err = parse_config(&text, "f").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("m"));
    }

    #[test]
    fn rho_forms() {
        assert_eq!("unit".parse::<RhoSpec>().unwrap(), RhoSpec::Unit);
        assert_eq!("sqrtg".parse::<RhoSpec>().unwrap(), RhoSpec::SqrtAbsG);
        assert_eq!(
            "expr:1+u".parse::<RhoSpec>().unwrap(),
            RhoSpec::Expression("1+u".into())
        );
        let text = format!("{SADDLE}rho = \"1+*u\"\n");
        let err = parse_config(&text, "f").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("rho"));
    }

    #[test]
    fn catalog_names_resolve() {
        let p = load_spec("sphere").unwrap();
        assert_eq!(p.spec.coords, ["sin(u)*cos(v)", "sin(u)*sin(v)", "cos(u)"]);
        assert!(load_spec("no-such-surface").is_err());
    }
}
