//! Parametrized surfaces `x: (u, v) -> R^m_ν` and their jets at a point.

use crate::error::GeometryError;
use crate::exprlang::{eval_jet, parse_expr, Ast, ExprError};
use crate::jets::{Jet1, Jet2};
use crate::scalar::Real;
use crate::tensor::AmbientSignature;

/// Coordinate expressions together with the ambient signature.
#[derive(Debug, Clone)]
pub struct Surface {
    pub sig: AmbientSignature,
    pub coords: Vec<Ast>,
}

impl Surface {
    /// Panics if the number of coordinates differs from the ambient dimension.
    pub fn new(sig: AmbientSignature, coords: Vec<Ast>) -> Self {
        assert_eq!(sig.dim(), coords.len(), "one coordinate expression per ambient axis");
        Self { sig, coords }
    }

    /// Parses one expression per coordinate. On failure returns the offending
    /// coordinate index and the error.
    pub fn parse(sig: AmbientSignature, coords: &[&str]) -> Result<Self, (usize, ExprError)> {
        let asts = coords
            .iter()
            .enumerate()
            .map(|(i, s)| parse_expr(s).map_err(|e| (i, e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(sig, asts))
    }

    pub fn eval<T: Real>(&self, at: [T; 2]) -> Result<EmbeddingEval<T>, GeometryError> {
        let x = self
            .coords
            .iter()
            .map(|c| eval_jet(c, at))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EmbeddingEval {
            sig: self.sig.clone(),
            at,
            x,
        })
    }
}

/// The coordinate jets `x^i` at one parameter point.
///
/// Tangent vectors `e_a^i = ∂_a x^i` and second partials `∂_a ∂_b x^i` are read
/// directly from the jets, so they are consistent by construction.
#[derive(Debug, Clone)]
pub struct EmbeddingEval<T> {
    pub sig: AmbientSignature,
    pub at: [T; 2],
    pub x: Vec<Jet2<T>>,
}

impl<T: Real> EmbeddingEval<T> {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `e_a`, the `a`-th coordinate tangent vector.
    pub fn tangent(&self, a: usize) -> Vec<T> {
        self.x.iter().map(|j| j.grad[a]).collect()
    }

    /// `e_a` with its parameter derivatives.
    pub fn tangent_jet(&self, a: usize) -> Vec<Jet1<T>> {
        self.x.iter().map(|j| j.partial(a)).collect()
    }

    /// `∂_a ∂_b x^i` for all `i`.
    pub fn second(&self, a: usize, b: usize) -> Vec<T> {
        self.x.iter().map(|j| j.hess[a][b]).collect()
    }

    pub fn position(&self) -> Vec<T> {
        self.x.iter().map(|j| j.value).collect()
    }
}
