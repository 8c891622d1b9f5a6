//! Gauss curvature and mean-curvature vectors of parametrized surfaces in flat
//! pseudo-Euclidean space `R^m_ν`, computed from Poisson brackets of the
//! embedding coordinates and checked against classical fundamental forms.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

pub mod analysis;
pub mod bench;
pub mod catalog;
pub mod classical;
pub mod config;
pub mod embedding;
pub mod error;
pub mod exprlang;
pub mod grid;
pub mod invariants;
pub mod jets;
pub mod poisson;
mod pseudo_gs;
pub mod scalar;
pub mod tensor;

pub use classical::{
    classical_gauss, classical_mean, classical_normal_frame, induced_metric, second_fundamental,
    InducedMetric, NormalFrame,
};
pub use embedding::{EmbeddingEval, Surface};
pub use error::GeometryError;
pub use jets::{Jet1, Jet2, JetError, Param};
pub use poisson::{
    build_bracket_table, build_z, gauss_full, mean_full, normal_frame_from_z, BracketTable,
    DensityChoice, ZData,
};
pub use scalar::Real;
pub use tensor::{AmbientSignature, Contraction};

pub type Jet2f = Jet2<f64>;
pub type Jet1f = Jet1<f64>;
pub type EmbeddingEvalf = EmbeddingEval<f64>;
pub type InducedMetricf = InducedMetric<f64>;
pub type NormalFramef = NormalFrame<f64>;
pub type BracketTablef = BracketTable<f64>;
pub type ZDataf = ZData<f64>;
