//! Chain configuration: qubit count, transverse scale, coupling profile and
//! longitudinal field.
//!
//! Couplings are stored in dimensionless form, `lambda_j = J_j / (2 Gamma)`.

use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on `|sum lambda_j - 1|` for the `critical` flag.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Explicit,
    /// `lambda_j = c / j`, normalized to unit sum.
    LinearDecay,
    /// `lambda_j = c * exp(-j)`, normalized to unit sum.
    ExponentialDecay,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileKind::Explicit => "explicit",
            ProfileKind::LinearDecay => "linear",
            ProfileKind::ExponentialDecay => "exponential",
        })
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(ProfileKind::Explicit),
            "linear" => Ok(ProfileKind::LinearDecay),
            "exponential" | "exp" => Ok(ProfileKind::ExponentialDecay),
            other => Err(Error::InvalidProfile(format!("unknown profile kind `{other}`"))),
        }
    }
}

/// The sequence `lambda_1 .. lambda_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    kind: ProfileKind,
    lambdas: Vec<f64>,
}

impl CouplingProfile {
    /// Arbitrary finite couplings. An empty vector is the uncoupled chain.
    pub fn explicit(lambdas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidProfile(format!("non-finite coupling {bad}")));
        }
        Ok(Self { kind: ProfileKind::Explicit, lambdas })
    }

    /// The uncoupled chain (`M = 0`).
    pub fn none() -> Self {
        Self { kind: ProfileKind::Explicit, lambdas: Vec::new() }
    }

    pub fn linear_decay(m: usize) -> Result<Self> {
        Self::normalized(ProfileKind::LinearDecay, m, |j| 1.0 / j as f64)
    }

    pub fn exponential_decay(m: usize) -> Result<Self> {
        Self::normalized(ProfileKind::ExponentialDecay, m, |j| (-(j as f64)).exp())
    }

    /// Builds a normalized decaying profile of the given kind.
    pub fn decaying(kind: ProfileKind, m: usize) -> Result<Self> {
        match kind {
            ProfileKind::LinearDecay => Self::linear_decay(m),
            ProfileKind::ExponentialDecay => Self::exponential_decay(m),
            ProfileKind::Explicit => Err(Error::InvalidProfile(
                "explicit profiles need their coupling values".into(),
            )),
        }
    }

    fn normalized(kind: ProfileKind, m: usize, weight: impl Fn(usize) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidProfile("a decaying profile needs M >= 1".into()));
        }
        let raw: Vec<f64> = (1..=m).map(weight).collect();
        let total: f64 = raw.iter().sum();
        Ok(Self { kind, lambdas: raw.into_iter().map(|w| w / total).collect() })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Number of neighbours `M`.
    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `lambda_j` for 1-based `j`; zero beyond `M`.
    pub fn lambda(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        self.lambdas.get(j - 1).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// `sum_j j * lambda_j`, the moment that sets the minimum gap.
    pub fn m_tilde(&self) -> f64 {
        self.lambdas.iter().enumerate().map(|(j, l)| (j + 1) as f64 * l).sum()
    }

    pub fn is_critical(&self) -> bool {
        (self.sum() - 1.0).abs() <= CRITICAL_TOL
    }
}

/// Field along x, in the same energy units as `Gamma`.
#[derive(Debug, Clone, PartialEq)]
pub enum LongitudinalField {
    Uniform(f64),
    /// One value per site, site 1 first.
    SiteDependent(Vec<f64>),
}

impl LongitudinalField {
    /// Field on 1-based site `i`.
    pub fn at(&self, i: usize) -> f64 {
        match self {
            LongitudinalField::Uniform(h) => *h,
            LongitudinalField::SiteDependent(hs) => hs[i - 1],
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            LongitudinalField::Uniform(h) => h.abs(),
            LongitudinalField::SiteDependent(hs) => hs.iter().fold(0.0, |m, h| m.max(h.abs())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// The same field with every value negated.
    pub fn negated(&self) -> Self {
        match self {
            LongitudinalField::Uniform(h) => LongitudinalField::Uniform(-h),
            LongitudinalField::SiteDependent(hs) => {
                LongitudinalField::SiteDependent(hs.iter().map(|h| -h).collect())
            }
        }
    }
}

impl Default for LongitudinalField {
    fn default() -> Self {
        LongitudinalField::Uniform(0.0)
    }
}

/// A validated chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_qubits: usize,
    gamma: f64,
    profile: CouplingProfile,
    field: LongitudinalField,
}

impl ChainSpec {
    /// Chain with zero longitudinal field.
    ///
    /// Requires `N >= 3`, `Gamma > 0` and `2M < N`.
    pub fn new(n_qubits: usize, gamma: f64, profile: CouplingProfile) -> Result<Self> {
        if n_qubits < 3 {
            return Err(Error::InvalidChain(format!("N must be at least 3, got {n_qubits}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidChain(format!("Gamma must be positive, got {gamma}")));
        }
        if 2 * profile.m() >= n_qubits {
            return Err(Error::InvalidChain(format!(
                "M={} neighbours must stay below N/2={}",
                profile.m(),
                n_qubits as f64 / 2.0
            )));
        }
        Ok(Self { n_qubits, gamma, profile, field: LongitudinalField::default() })
    }

    pub fn with_field(mut self, field: LongitudinalField) -> Result<Self> {
        match &field {
            LongitudinalField::Uniform(h) if !h.is_finite() => {
                return Err(Error::InvalidChain(format!("non-finite field {h}")));
            }
            LongitudinalField::SiteDependent(hs) => {
                if hs.len() != self.n_qubits {
                    return Err(Error::InvalidChain(format!(
                        "site field has {} entries for N={}",
                        hs.len(),
                        self.n_qubits
                    )));
                }
                if hs.iter().any(|h| !h.is_finite()) {
                    return Err(Error::InvalidChain("non-finite site field".into()));
                }
            }
            _ => {}
        }
        self.field = field;
        Ok(self)
    }

    pub fn with_uniform_field(self, h: f64) -> Result<Self> {
        self.with_field(LongitudinalField::Uniform(h))
    }

    pub fn n(&self) -> usize {
        self.n_qubits
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn field(&self) -> &LongitudinalField {
        &self.field
    }

    /// Physical coupling `J_j = 2 Gamma lambda_j`.
    pub fn coupling(&self, j: usize) -> f64 {
        2.0 * self.gamma * self.profile.lambda(j)
    }
}
