//! Ambient signature, multi-indices and Levi-Civita contractions.
//!
//! All indices are 0-based. The ambient metric of `R^m_ν` is diagonal with the
//! first `ν` entries `-1` and the rest `+1`, so `|det ḡ| = 1` and the covariant
//! Levi-Civita tensor coincides with the permutation symbol. The `(-1)^ν` that
//! appears when raising all of its indices is tracked by
//! [`AmbientSignature::det_sign`].

use thiserror::Error;

use crate::scalar::Real;

/// Default ceiling on the ambient dimension for paths that enumerate `m^(m-3)` terms.
pub const DEFAULT_MAX_M: usize = 8;

/// Environment variable overriding [`DEFAULT_MAX_M`].
pub const MAX_M_ENV: &str = "PBCURV_MAX_M";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("ambient dimension m = {m} must be at least 3")]
    DimensionTooSmall { m: usize },
    #[error("index nu = {nu} exceeds the dimension m = {m}")]
    NuOutOfRange { m: usize, nu: usize },
    #[error("index {index} out of range for dimension {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("expected {expected} indices, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("ambient dimension m = {m} exceeds the configured cap {cap}")]
    DimensionCap { m: usize, cap: usize },
}

/// Reads the dimension cap from `PBCURV_MAX_M`, falling back to the default.
pub fn max_m_from_env() -> usize {
    std::env::var(MAX_M_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_M)
}

/// Flat pseudo-Euclidean space `R^m_ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientSignature {
    m: usize,
    nu: usize,
    signs: Vec<i8>,
}

impl AmbientSignature {
    pub fn new(m: usize, nu: usize) -> Result<Self, TensorError> {
        if m < 3 {
            return Err(TensorError::DimensionTooSmall { m });
        }
        if nu > m {
            return Err(TensorError::NuOutOfRange { m, nu });
        }
        let signs = (0..m).map(|j| if j < nu { -1 } else { 1 }).collect();
        Ok(Self { m, nu, signs })
    }

    pub fn euclidean(m: usize) -> Result<Self, TensorError> {
        Self::new(m, 0)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Number of negative metric entries, `ind ḡ`.
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Codimension `p = m - 2` of a surface.
    pub fn codim(&self) -> usize {
        self.m - 2
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `ḡ_j`; equal to `ḡ^j` because every entry is ±1.
    #[inline]
    pub fn g<T: Real>(&self, j: usize) -> T {
        T::sign_of(self.signs[j])
    }

    /// `det ḡ = (-1)^ν`.
    pub fn det_sign(&self) -> i8 {
        if self.nu % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn inner<T: Real>(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), self.m);
        a.iter()
            .zip(b)
            .zip(&self.signs)
            .map(|((x, y), s)| T::sign_of(*s) * *x * *y)
            .sum()
    }

    /// `ḡ^{JJ}` for a multi-index: the product of the metric entries.
    pub fn multi_sign(&self, entries: &[usize]) -> i8 {
        entries.iter().map(|&j| self.signs[j]).product()
    }
}

/// The set `{0, …, m-1}^len` of multi-indices, enumerated in lexicographic
/// order (the last entry varies fastest).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiIndexSpace {
    pub m: usize,
    pub len: usize,
}

impl MultiIndexSpace {
    pub fn new(m: usize, len: usize) -> Self {
        Self { m, len }
    }

    /// `m^len`.
    pub fn count(&self) -> usize {
        self.m.pow(self.len as u32)
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.len];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.m;
            flat /= self.m;
        }
        out
    }

    pub fn encode(&self, entries: &[usize]) -> usize {
        entries.iter().fold(0, |acc, &e| acc * self.m + e)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count()).map(move |f| self.decode(f))
    }
}

/// Sign of the permutation `indices` of `0..m`, or 0 on a repeated entry.
pub fn eps_symbol(indices: &[usize], m: usize) -> Result<i8, TensorError> {
    if indices.len() != m {
        return Err(TensorError::WrongLength {
            expected: m,
            got: indices.len(),
        });
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= m) {
        return Err(TensorError::IndexOutOfRange { index: bad, m });
    }
    Ok(perm_sign(indices))
}

/// Unchecked permutation sign; entries must be `< 64`.
fn perm_sign(indices: &[usize]) -> i8 {
    let mut seen = 0u64;
    for &i in indices {
        let bit = 1u64 << i;
        if seen & bit != 0 {
            return 0;
        }
        seen |= bit;
    }
    let mut inversions = 0usize;
    for a in 0..indices.len() {
        for b in a + 1..indices.len() {
            if indices[a] > indices[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `Σ_L ε_{jkl L} ε_{irn L}` by literal enumeration of all `m^(m-3)` multi-indices `L`.
pub fn eps_contract_naive(jkl: [usize; 3], irn: [usize; 3], m: usize) -> i64 {
    eps_contract_naive_counted(jkl, irn, m).0
}

/// As [`eps_contract_naive`], also returning the number of `L` visited.
pub fn eps_contract_naive_counted(jkl: [usize; 3], irn: [usize; 3], m: usize) -> (i64, u64) {
    assert!((3..=64).contains(&m), "naive contraction supports 3 <= m <= 64");
    let len = m - 3;
    // fixed buffers keep the hot loop allocation-free
    let mut a = [0usize; 64];
    let mut b = [0usize; 64];
    a[..3].copy_from_slice(&jkl);
    b[..3].copy_from_slice(&irn);
    let mut sum = 0i64;
    let mut visited = 0u64;
    // odometer over L in {0..m}^len, stored in place at a[3..m] and mirrored into b
    loop {
        b[3..m].copy_from_slice(&a[3..m]);
        sum += i64::from(perm_sign(&a[..m])) * i64::from(perm_sign(&b[..m]));
        visited += 1;
        let mut pos = len;
        loop {
            if pos == 0 {
                return (sum, visited);
            }
            pos -= 1;
            a[3 + pos] += 1;
            if a[3 + pos] < m {
                break;
            }
            a[3 + pos] = 0;
        }
    }
}

/// Number of index pairings evaluated per call by [`eps_contract_reduced`].
pub const REDUCED_TERMS_PER_CALL: u64 = 6;

/// `Σ_L ε_{jkl L} ε_{irn L}` via the generalized Kronecker delta:
/// `(m-3)!` times the determinant of the 3x3 matrix `δ(jkl[a], irn[b])`,
/// i.e. the signed sum over the six pairings of `{j,k,l}` with `{i,r,n}`.
pub fn eps_contract_reduced(jkl: [usize; 3], irn: [usize; 3], m: usize) -> i64 {
    let d = |a: usize, b: usize| i64::from(jkl[a] == irn[b]);
    let det = d(0, 0) * (d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1))
        - d(0, 1) * (d(1, 0) * d(2, 2) - d(1, 2) * d(2, 0))
        + d(0, 2) * (d(1, 0) * d(2, 1) - d(1, 1) * d(2, 0));
    if det == 0 {
        return 0;
    }
    det * factorial(m - 3) as i64
}

/// How `Σ_L ε ε` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Contraction {
    Naive,
    #[default]
    Reduced,
}

impl Contraction {
    pub fn eval(self, jkl: [usize; 3], irn: [usize; 3], m: usize) -> i64 {
        match self {
            Contraction::Naive => eps_contract_naive(jkl, irn, m),
            Contraction::Reduced => eps_contract_reduced(jkl, irn, m),
        }
    }

    /// Terms visited per call: `m^(m-3)` for the naive path, constant otherwise.
    pub fn work_per_call(self, m: usize) -> u64 {
        match self {
            Contraction::Naive => (m as u64).pow((m - 3) as u32),
            Contraction::Reduced => REDUCED_TERMS_PER_CALL,
        }
    }

    /// The naive path refuses dimensions above `cap`.
    pub fn check_cap(self, m: usize, cap: usize) -> Result<(), TensorError> {
        match self {
            Contraction::Naive if m > cap => Err(TensorError::DimensionCap { m, cap }),
            _ => Ok(()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Contraction::Naive => "naive",
            Contraction::Reduced => "reduced",
        }
    }
}

impl std::str::FromStr for Contraction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Contraction::Naive),
            "reduced" => Ok(Contraction::Reduced),
            _ => Err(format!("unknown contraction '{s}' (expected naive|reduced)")),
        }
    }
}

/// All ordered triples of pairwise distinct indices below `m`.
pub fn distinct_triples(m: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(m * (m - 1) * (m - 2));
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}
