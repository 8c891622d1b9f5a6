//! Built-in surfaces.

use std::f64::consts::PI;

use crate::config::{RhoSpec, SurfaceSpec};

const TAU: f64 = 2.0 * PI;

fn entry(name: &str, m: usize, nu: usize, coords: &[&str], domain: [f64; 4]) -> SurfaceSpec {
    SurfaceSpec {
        name: name.to_string(),
        m,
        nu,
        coords: coords.iter().map(|s| s.to_string()).collect(),
        domain,
        grid: [8, 8],
        rho: RhoSpec::SqrtAbsG,
        excluded_margins: 0.05,
    }
}

/// Every built-in surface, in a fixed order.
pub fn catalog() -> Vec<SurfaceSpec> {
    vec![
        entry("plane", 3, 0, &["u", "v", "0"], [-1.0, 1.0, -1.0, 1.0]),
        entry(
            "sphere",
            3,
            0,
            &["sin(u)*cos(v)", "sin(u)*sin(v)", "cos(u)"],
            [0.2, PI - 0.2, 0.0, TAU],
        ),
        entry(
            "sphere-r2",
            3,
            0,
            &["2*sin(u)*cos(v)", "2*sin(u)*sin(v)", "2*cos(u)"],
            [0.2, PI - 0.2, 0.0, TAU],
        ),
        entry("cylinder", 3, 0, &["cos(u)", "sin(u)", "v"], [0.0, TAU, -1.0, 1.0]),
        entry(
            "catenoid",
            3,
            0,
            &["cosh(u)*cos(v)", "cosh(u)*sin(v)", "u"],
            [-1.0, 1.0, 0.0, TAU],
        ),
        entry("helicoid", 3, 0, &["u*cos(v)", "u*sin(v)", "v"], [-1.0, 1.0, 0.0, TAU]),
        entry(
            "torus",
            3,
            0,
            &["(2+cos(u))*cos(v)", "(2+cos(u))*sin(v)", "sin(u)"],
            [0.0, TAU, 0.0, TAU],
        ),
        entry(
            "hyperbolic-plane",
            3,
            1,
            &["cosh(u)", "sinh(u)*cos(v)", "sinh(u)*sin(v)"],
            [0.2, 1.5, 0.0, TAU],
        ),
        entry(
            "de-sitter",
            3,
            1,
            &["sinh(u)", "cosh(u)*cos(v)", "cosh(u)*sin(v)"],
            [-1.0, 1.0, 0.0, TAU],
        ),
        entry(
            "flat-torus-r4",
            4,
            0,
            &["cos(u)", "sin(u)", "cos(v)", "sin(v)"],
            [0.0, TAU, 0.0, TAU],
        ),
        entry("graph-surface-r4", 4, 0, &["u", "v", "u*v", "u^2-v^2"], [-1.0, 1.0, -1.0, 1.0]),
        entry(
            "lorentz-graph-r41",
            4,
            1,
            &["0.3*(u^2-v^2)", "u", "v", "u*v"],
            [-1.0, 1.0, -1.0, 1.0],
        ),
        entry(
            "timelike-r41",
            4,
            1,
            &["2*u+0.2*v^2", "u", "v", "0.3*u*v"],
            [-1.0, 1.0, -1.0, 1.0],
        ),
        // unit circle times a helix: a product of curves, so flat, with p - 1 = 2
        entry(
            "r5-product",
            5,
            0,
            &["cos(u)", "sin(u)", "0.5*cos(v)", "0.5*sin(v)", "0.3*v"],
            [0.0, TAU, 0.0, TAU],
        ),
        entry(
            "r5-graph",
            5,
            0,
            &["u", "v", "u*v", "0.5*(u^2-v^2)", "sin(u+v)"],
            [-1.0, 1.0, -1.0, 1.0],
        ),
        entry(
            "mixed-r52",
            5,
            2,
            &["0.3*u*v", "0.2*u^2", "u", "v", "sin(u+v)"],
            [-1.0, 1.0, -1.0, 1.0],
        ),
    ]
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

pub fn lookup(name: &str) -> Option<SurfaceSpec> {
    catalog().into_iter().find(|s| s.name == name)
}
