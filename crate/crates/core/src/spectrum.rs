//! Free-fermion spectrum of the extended Ising chain at zero longitudinal
//! field.
//!
//! The single-fermion energies (in units of `Gamma`) are
//!
//! ```text
//! Lambda_k^2 = [1 + sum_j (-1)^(j+1) lambda_j cos(2 pi j k / N)]^2
//!            + [    sum_j (-1)^(j+1) lambda_j sin(2 pi j k / N)]^2
//! ```
//!
//! over the integer momentum grid returned by [`momentum_indices`].

use std::f64::consts::PI;

use crate::chain::{ChainSpec, CouplingProfile};
use crate::error::{Error, Result};

/// `min_k Lambda_k` at or below this counts as a degenerate ground state.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Two `Lambda_k` closer than this are treated as tied for the minimum.
pub const TIE_TOL: f64 = 1e-12;

/// Tolerance on `|sum lambda_j - 1|` accepted by [`min_gap_at_criticality`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Momentum grid: `-N/2 ..= (N-2)/2` for even `N`, `(1-N)/2 ..= (N-1)/2` for odd `N`.
pub fn momentum_indices(n: usize) -> Result<Vec<i64>> {
    if n < 3 {
        return Err(Error::InvalidChain(format!("N must be at least 3, got {n}")));
    }
    let n = n as i64;
    let (lo, hi) = if n % 2 == 0 { (-n / 2, (n - 2) / 2) } else { ((1 - n) / 2, (n - 1) / 2) };
    Ok((lo..=hi).collect())
}

pub(crate) fn k_range(n: usize) -> (i64, i64) {
    let n = n as i64;
    if n % 2 == 0 {
        (-n / 2, (n - 2) / 2)
    } else {
        ((1 - n) / 2, (n - 1) / 2)
    }
}

pub(crate) fn check_k(n: usize, k: i64) -> Result<()> {
    let (lo, hi) = k_range(n);
    if k < lo || k > hi {
        return Err(Error::MomentumOutOfRange { k, n });
    }
    Ok(())
}

/// `(cos, sin)` of `2 pi num / n`, with the integer reduction done first so
/// that quarter turns come out exact.
pub(crate) fn phase(num: i64, n: usize) -> (f64, f64) {
    let n = n as i64;
    let r = num.rem_euclid(n);
    if r == 0 {
        return (1.0, 0.0);
    }
    if 2 * r == n {
        return (-1.0, 0.0);
    }
    if 4 * r == n {
        return (0.0, 1.0);
    }
    if 4 * r == 3 * n {
        return (0.0, -1.0);
    }
    let r = if 2 * r > n { r - n } else { r };
    let angle = 2.0 * PI * r as f64 / n as f64;
    (angle.cos(), angle.sin())
}

/// The two bracketed sums entering `Lambda_k` and `psi_ki`.
pub(crate) fn dispersion_parts(profile: &CouplingProfile, n: usize, k: i64) -> (f64, f64) {
    let mut re = 1.0;
    let mut im = 0.0;
    for (idx, &l) in profile.lambdas().iter().enumerate() {
        let j = idx as i64 + 1;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let (c, s) = phase(j * k, n);
        re += sign * l * c;
        im += sign * l * s;
    }
    (re, im)
}

pub(crate) fn lambda_unchecked(profile: &CouplingProfile, n: usize, k: i64) -> f64 {
    let (re, im) = dispersion_parts(profile, n, k);
    re.hypot(im)
}

/// `Lambda_k` in units of `Gamma`.
pub fn lambda_k(spec: &ChainSpec, k: i64) -> Result<f64> {
    check_k(spec.n(), k)?;
    Ok(lambda_unchecked(spec.profile(), spec.n(), k))
}

/// Zero-field spectrum of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub gamma: f64,
    pub k_values: Vec<i64>,
    /// `Lambda_k` per entry of `k_values`, in units of `Gamma`.
    pub lambda_k: Vec<f64>,
    /// Ground-state energy `-(Gamma/2) sum_k Lambda_k` (raw energy units).
    pub e_ground: f64,
    /// Minimizing momentum; the positive one when `+k` and `-k` tie.
    pub gap_index: i64,
    /// Every momentum tied for the minimum, ascending.
    pub gap_indices: Vec<i64>,
    /// `Gamma * min_k Lambda_k` (raw energy units).
    pub gap: f64,
    pub degenerate: bool,
}

impl SpectrumResult {
    pub fn e_ground_over_gamma(&self) -> f64 {
        self.e_ground / self.gamma
    }

    pub fn gap_over_gamma(&self) -> f64 {
        self.gap / self.gamma
    }

    pub fn lambda_at(&self, k: i64) -> Option<f64> {
        let offset = k - *self.k_values.first()?;
        usize::try_from(offset).ok().and_then(|i| self.lambda_k.get(i).copied())
    }
}

pub fn spectrum(spec: &ChainSpec) -> SpectrumResult {
    let n = spec.n();
    let (lo, hi) = k_range(n);
    let k_values: Vec<i64> = (lo..=hi).collect();
    let lambda_k: Vec<f64> =
        k_values.iter().map(|&k| lambda_unchecked(spec.profile(), n, k)).collect();

    let min = lambda_k.iter().copied().fold(f64::INFINITY, f64::min);
    let gap_indices: Vec<i64> = k_values
        .iter()
        .zip(&lambda_k)
        .filter(|(_, &l)| l - min <= TIE_TOL)
        .map(|(&k, _)| k)
        .collect();
    let gap_index = *gap_indices.iter().max().expect("momentum grid is never empty");

    let total: f64 = lambda_k.iter().sum();
    SpectrumResult {
        gamma: spec.gamma(),
        e_ground: -0.5 * spec.gamma() * total,
        gap: spec.gamma() * min,
        degenerate: min <= DEGENERACY_TOL,
        gap_index,
        gap_indices,
        k_values,
        lambda_k,
    }
}

/// `phi_ki` for any integer `k` and 1-based site `i`.
pub fn phi(n: usize, k: i64, i: usize) -> f64 {
    let norm = (2.0 / n as f64).sqrt();
    let (c, s) = phase(i as i64 * k, n);
    if k > 0 {
        norm * s
    } else {
        norm * c
    }
}

/// `(phi_ki, psi_ki)` for momentum `k` and 1-based site `i`.
pub fn eigenvector_components(spec: &ChainSpec, k: i64, i: usize) -> Result<(f64, f64)> {
    let n = spec.n();
    check_k(n, k)?;
    if i == 0 || i > n {
        return Err(Error::SiteOutOfRange { i, n });
    }
    let (re, im) = dispersion_parts(spec.profile(), n, k);
    let lambda = re.hypot(im);
    if lambda <= DEGENERACY_TOL {
        return Err(Error::DegenerateMode { k, lambda });
    }
    let phi_k = phi(n, k, i);
    let psi = -(re * phi_k + im * phi(n, -k, i)) / lambda;
    Ok((phi_k, psi))
}

/// Nearest/next-nearest-neighbour gap at the edge of the zone, raw energy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormGap {
    /// Square-root form, equal to `Gamma * Lambda_{(N-1)/2}`.
    pub exact: f64,
    /// Large-`N` expansion of `exact`.
    pub asymptotic: f64,
}

/// Closed-form gap for `M <= 2`, odd `N` and `lambda_2 < 1`.
pub fn gap_closed_form(spec: &ChainSpec) -> Result<ClosedFormGap> {
    let n = spec.n();
    let profile = spec.profile();
    if profile.m() > 2 {
        return Err(Error::Domain(format!(
            "closed-form gap covers M <= 2, got M={}",
            profile.m()
        )));
    }
    if n % 2 == 0 {
        return Err(Error::Domain(format!("closed-form gap needs odd N, got {n}")));
    }
    let (l1, l2) = (profile.lambda(1), profile.lambda(2));
    if l2 >= 1.0 {
        return Err(Error::UnsupportedRegime {
            reason: format!("lambda2 = {l2} >= 1"),
            minimizer: 0,
        });
    }
    let x = PI / n as f64;
    let exact_sq = 1.0 + l1 * l1 + l2 * l2
        - 2.0 * l1 * (1.0 - l2) * x.cos()
        - 2.0 * l2 * (2.0 * x).cos();
    let detuning = l1 + l2 - 1.0;
    let asym_sq = detuning * detuning + (l1 - l1 * l2 + 4.0 * l2) * x * x;
    Ok(ClosedFormGap {
        exact: spec.gamma() * exact_sq.max(0.0).sqrt(),
        asymptotic: spec.gamma() * asym_sq.max(0.0).sqrt(),
    })
}

/// `(pi Gamma / N) sum_j j lambda_j` for a normalized profile (raw energy units).
pub fn min_gap_at_criticality(profile: &CouplingProfile, gamma: f64, n: usize) -> Result<f64> {
    let sum = profile.sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotCritical { sum });
    }
    if n % 2 == 0 {
        return Err(Error::Domain(format!("minimum-gap formula needs odd N, got {n}")));
    }
    if 2 * profile.m() >= n {
        return Err(Error::InvalidChain(format!(
            "M={} neighbours must stay below N/2",
            profile.m()
        )));
    }
    Ok(PI * gamma / n as f64 * profile.m_tilde())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize, lambdas: &[f64]) -> ChainSpec {
        ChainSpec::new(n, 1.0, CouplingProfile::explicit(lambdas.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn momentum_grids() {
        assert_eq!(momentum_indices(4).unwrap(), vec![-2, -1, 0, 1]);
        assert_eq!(momentum_indices(3).unwrap(), vec![-1, 0, 1]);
        let ks = momentum_indices(51).unwrap();
        assert_eq!(ks.len(), 51);
        assert_eq!((ks[0], ks[50]), (-25, 25));
        assert!(momentum_indices(2).is_err());
    }

    #[test]
    fn uncoupled_modes_are_unit() {
        let spec = chain(7, &[]);
        for k in -3..=3 {
            assert_eq!(lambda_k(&spec, k).unwrap(), 1.0);
        }
        assert!(matches!(lambda_k(&spec, 4), Err(Error::MomentumOutOfRange { .. })));
    }

    #[test]
    fn zone_edge_vanishes_at_criticality_for_even_n() {
        for n in [6usize, 8, 10, 50] {
            let spec = chain(n, &[0.7, 0.3]);
            let l = lambda_k(&spec, -(n as i64) / 2).unwrap();
            assert!(l <= 1e-12, "N={n}: {l}");
        }
        let spec = chain(4, &[1.0]);
        let s = spectrum(&spec);
        assert!(s.degenerate);
        assert_eq!(s.gap_index, -2);
    }

    #[test]
    fn known_edge_value() {
        // Dispersion evaluated with 40-digit arithmetic.
        let spec = chain(51, &[0.9, 0.1]);
        let l = lambda_k(&spec, 25).unwrap();
        assert!((l - 0.067_738_508_336_111_46).abs() < 1e-12, "{l}");
    }

    #[test]
    fn uncoupled_three_site_spectrum() {
        let s = spectrum(&chain(3, &[]));
        assert_eq!(s.e_ground, -1.5);
        assert_eq!(s.gap, 1.0);
        assert!(!s.degenerate);
    }

    #[test]
    fn tie_break_prefers_positive_momentum() {
        let s = spectrum(&chain(51, &[0.9, 0.1]));
        assert_eq!(s.gap_index, 25);
        assert_eq!(s.gap_indices, vec![-25, 25]);
        assert!((s.gap - 0.067_738_508_336_111_46).abs() < 1e-12);
        assert_eq!(s.lambda_at(25), Some(s.lambda_k[50]));
    }

    #[test]
    fn eigenvector_examples() {
        let spec = chain(5, &[0.4]);
        for i in 1..=5 {
            let (phi0, _) = eigenvector_components(&spec, 0, i).unwrap();
            assert!((phi0 - (2.0f64 / 5.0).sqrt()).abs() < 1e-15);
        }
        let free = chain(5, &[]);
        for k in -2..=2 {
            for i in 1..=5 {
                let (phi, psi) = eigenvector_components(&free, k, i).unwrap();
                assert!((psi + phi).abs() < 1e-15);
            }
        }
        let (phi, _) = eigenvector_components(&chain(3, &[]), 1, 1).unwrap();
        assert!((phi - (2.0f64 / 3.0).sqrt() * (2.0 * PI / 3.0).sin()).abs() < 1e-15);
        assert!(matches!(
            eigenvector_components(&chain(4, &[1.0]), -2, 1),
            Err(Error::DegenerateMode { k: -2, .. })
        ));
        assert!(eigenvector_components(&free, 0, 6).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let g = gap_closed_form(&chain(51, &[1.0])).unwrap();
        assert!((g.exact - 0.061_590_117_112_340_71).abs() < 1e-14);
        // pi/51 from the large-N line.
        assert!((g.asymptotic - 0.061_599_855_952_741_04).abs() < 1e-14);

        assert_eq!(gap_closed_form(&chain(11, &[])).unwrap().exact, 1.0);

        assert!(matches!(
            gap_closed_form(&chain(11, &[0.2, 1.5])),
            Err(Error::UnsupportedRegime { minimizer: 0, .. })
        ));
        assert!(gap_closed_form(&chain(10, &[0.5])).is_err());
    }

    #[test]
    fn closed_form_large_n_limit() {
        for l2 in [0.0, 0.1, 0.3, 0.6] {
            let spec = chain(100_001, &[1.0 - l2, l2]);
            let g = gap_closed_form(&spec).unwrap();
            let limit = PI / 100_001.0 * (1.0 + l2);
            assert!((g.exact / limit - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn critical_min_gap_examples() {
        let one = CouplingProfile::explicit(vec![1.0]).unwrap();
        assert!((min_gap_at_criticality(&one, 1.0, 51).unwrap() - PI / 51.0).abs() < 1e-15);
        let halves = CouplingProfile::explicit(vec![0.5, 0.5]).unwrap();
        let g = min_gap_at_criticality(&halves, 1.0, 51).unwrap();
        assert!((g - 0.092_399_783_929_111_57).abs() < 1e-15);
        let lin = CouplingProfile::linear_decay(3).unwrap();
        let g = min_gap_at_criticality(&lin, 1.0, 51).unwrap();
        assert!((g - 0.100_799_764_286_303_53).abs() < 1e-15);

        let off = CouplingProfile::explicit(vec![0.5, 0.4]).unwrap();
        assert!(matches!(min_gap_at_criticality(&off, 1.0, 51), Err(Error::NotCritical { .. })));
    }

    #[test]
    fn appending_a_neighbour_adds_pi_lambda_m_over_n() {
        let gamma = 1.3;
        let n = 51;
        for m in 2..=14 {
            let prev: Vec<f64> = CouplingProfile::linear_decay(m).unwrap().lambdas()[..m - 1].to_vec();
            let lambda_m = 1.0 - prev.iter().sum::<f64>();
            let mut full = prev.clone();
            full.push(lambda_m);
            // Same leading couplings, with the remainder moved onto the new neighbour.
            let mut shorter = prev;
            *shorter.last_mut().unwrap() += lambda_m;
            let a = min_gap_at_criticality(&CouplingProfile::explicit(full).unwrap(), gamma, n).unwrap();
            let b = min_gap_at_criticality(&CouplingProfile::explicit(shorter).unwrap(), gamma, n)
                .unwrap();
            let step = PI * gamma * lambda_m / n as f64;
            assert!(a > b);
            assert!(((a - b) - step).abs() < 1e-14, "M={m}");
        }
    }
}
