//! Exact diagonalization of the spin Hamiltonian on the full `2^N` basis.
//!
//! Basis state bit `i - 1` set means site `i` has `sigma_z = +1`. The
//! Hamiltonian is
//!
//! ```text
//! H = Gamma sum S_z^i + J_1 sum S_x^i S_x^{i+1}
//!   + J_2 sum S_x^i sigma_z^{i+1} S_x^{i+2} + sum h_i S_x^i
//! ```
//!
//! with `S = sigma / 2`. This is the normalization whose fermion image has
//! transverse term `Gamma (1/2 - n_i)` and hopping `J_j / 4`, so that the
//! free-fermion modes come out in units of `Gamma`.

use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::linalg::{lowest_eigenpairs, SymMatrix};
use crate::numeric::power_law_exponent;
use crate::spectrum::spectrum;

pub const MAX_QUBITS: usize = 16;
pub const MAX_NEIGHBOURS: usize = 2;
pub const SYMMETRY_TOL: f64 = 1e-14;
/// Tolerance for the `+h` and `-h` spectra to count as equal.
pub const EVENNESS_TOL: f64 = 1e-12;
pub const CONVENTION_TAG: &str = "spin-half-endpoints/pauli-z-string";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    pub n_qubits: usize,
    pub boundary: Boundary,
    pub convention_tag: &'static str,
    pub matrix: SymMatrix,
}

impl DenseHamiltonian {
    pub fn dimension(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn build_hamiltonian(spec: &ChainSpec, boundary: Boundary) -> Result<DenseHamiltonian> {
    let n = spec.n();
    if n > MAX_QUBITS {
        return Err(Error::Capacity { n, max: MAX_QUBITS });
    }
    let m = spec.profile().m();
    if m > MAX_NEIGHBOURS {
        return Err(Error::UnsupportedInteraction { m });
    }
    let dim = 1usize << n;
    let gamma = spec.gamma();
    let (j1, j2) = (spec.coupling(1), spec.coupling(2));
    let mut h = SymMatrix::zeros(dim);

    let bonds = |range: usize| -> usize {
        match boundary {
            Boundary::Periodic => n,
            Boundary::Open => n - range,
        }
    };
    let z = |state: usize, site: usize| if state >> site & 1 == 1 { 1.0 } else { -1.0 };

    for s in 0..dim {
        let diag: f64 = (0..n).map(|i| z(s, i)).sum::<f64>() * gamma / 2.0;
        h.add(s, s, diag);
        for i in 0..n {
            let hi = spec.field().at(i + 1);
            if hi != 0.0 {
                h.add(s ^ (1 << i), s, hi / 2.0);
            }
        }
        if j1 != 0.0 {
            for i in 0..bonds(1) {
                let k = (i + 1) % n;
                h.add(s ^ (1 << i) ^ (1 << k), s, j1 / 4.0);
            }
        }
        if j2 != 0.0 {
            for i in 0..bonds(2) {
                let (mid, k) = ((i + 1) % n, (i + 2) % n);
                h.add(s ^ (1 << i) ^ (1 << k), s, j2 / 4.0 * z(s, mid));
            }
        }
    }

    let asym = h.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::Solver(format!("assembled Hamiltonian is asymmetric by {asym:e}")));
    }
    Ok(DenseHamiltonian { n_qubits: n, boundary, convention_tag: CONVENTION_TAG, matrix: h })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    /// Lowest levels, ascending.
    pub eigenvalues: Vec<f64>,
    /// `E_1 - E_0`.
    pub gap: f64,
    /// Largest `||H v - E v||` over the reported levels.
    pub max_residual: f64,
    /// Whether the spectrum at `-h` matched; set by [`oracle_spectrum_checked`].
    pub parity_even_in_h: Option<bool>,
}

pub fn oracle_spectrum(h: &DenseHamiltonian, n_levels: usize) -> Result<OracleSpectrum> {
    let n_levels = n_levels.max(2);
    let pairs = lowest_eigenpairs(&h.matrix, n_levels)?;
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let max_residual = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(OracleSpectrum {
        gap: eigenvalues[1] - eigenvalues[0],
        eigenvalues,
        max_residual,
        parity_even_in_h: None,
    })
}

/// Spectrum of `spec`, with the evenness diagnostic filled in by also
/// diagonalizing the chain at the opposite field.
pub fn oracle_spectrum_checked(
    spec: &ChainSpec,
    boundary: Boundary,
    n_levels: usize,
) -> Result<OracleSpectrum> {
    let plus = oracle_spectrum(&build_hamiltonian(spec, boundary)?, n_levels)?;
    let flipped = spec.clone().with_field(spec.field().negated())?;
    let minus = oracle_spectrum(&build_hamiltonian(&flipped, boundary)?, n_levels)?;
    let even = plus
        .eigenvalues
        .iter()
        .zip(&minus.eigenvalues)
        .all(|(a, b)| (a - b).abs() <= EVENNESS_TOL);
    Ok(OracleSpectrum { parity_even_in_h: Some(even), ..plus })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub n: usize,
    pub gap_oracle: f64,
    pub gap_analytic: f64,
    /// `|gap_oracle - gap_analytic|`.
    pub discrepancy: f64,
    /// `N * discrepancy / Gamma`.
    pub scaled: f64,
}

/// Oracle gap against the free-fermion gap `Gamma * min_k Lambda_k`, with
/// periodic spin boundary.
pub fn compare_to_analytic(spec: &ChainSpec) -> Result<Discrepancy> {
    let oracle = oracle_spectrum(&build_hamiltonian(spec, Boundary::Periodic)?, 2)?;
    let gap_analytic = spectrum(spec).gap;
    let discrepancy = (oracle.gap - gap_analytic).abs();
    Ok(Discrepancy {
        n: spec.n(),
        gap_oracle: oracle.gap,
        gap_analytic,
        discrepancy,
        scaled: spec.n() as f64 * discrepancy / spec.gamma(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSweep {
    pub gap_zero: f64,
    pub fields: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Fitted `p` in `gap(h) - gap(0) ~ h^p`.
    pub exponent: f64,
}

/// Oracle gap at zero field and at each uniform field in `fields`
/// (all nonzero), and the power-law exponent of the gap shift.
pub fn field_sweep(spec: &ChainSpec, fields: &[f64]) -> Result<FieldSweep> {
    let gap_at = |h: f64| -> Result<f64> {
        let s = spec.clone().with_uniform_field(h)?;
        Ok(oracle_spectrum(&build_hamiltonian(&s, Boundary::Periodic)?, 2)?.gap)
    };
    let gap_zero = gap_at(0.0)?;
    let gaps = fields.par_iter().map(|&h| gap_at(h)).collect::<Result<Vec<_>>>()?;
    let shifts: Vec<f64> = gaps.iter().map(|g| g - gap_zero).collect();
    let abs_fields: Vec<f64> = fields.iter().map(|h| h.abs()).collect();
    Ok(FieldSweep {
        gap_zero,
        fields: fields.to_vec(),
        exponent: power_law_exponent(&abs_fields, &shifts),
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::CouplingProfile;

    fn chain(n: usize, lambdas: Vec<f64>) -> ChainSpec {
        ChainSpec::new(n, 1.0, CouplingProfile::explicit(lambdas).unwrap()).unwrap()
    }

    #[test]
    fn uncoupled_chain_is_diagonal() {
        let spec = ChainSpec::new(4, 2.5, CouplingProfile::none()).unwrap();
        let h = build_hamiltonian(&spec, Boundary::Periodic).unwrap();
        assert_eq!(h.dimension(), 16);
        let s = oracle_spectrum(&h, 8).unwrap();
        assert_eq!(s.eigenvalues[0], -2.0 * 2.5);
        assert_eq!(s.gap, 2.5);
        // Four single flips share the first excited level.
        assert_eq!(&s.eigenvalues[1..5], &[-2.5; 4]);
    }

    #[test]
    fn limits_are_enforced() {
        let big = ChainSpec::new(17, 1.0, CouplingProfile::none()).unwrap();
        assert!(matches!(build_hamiltonian(&big, Boundary::Periodic), Err(Error::Capacity { .. })));
        let three = chain(9, vec![0.5, 0.3, 0.2]);
        assert!(matches!(
            build_hamiltonian(&three, Boundary::Periodic),
            Err(Error::UnsupportedInteraction { m: 3 })
        ));
    }

    #[test]
    fn hamiltonian_is_symmetric_with_field() {
        let spec = chain(5, vec![0.7, 0.3]).with_uniform_field(0.2).unwrap();
        for b in [Boundary::Periodic, Boundary::Open] {
            assert_eq!(build_hamiltonian(&spec, b).unwrap().matrix.max_asymmetry(), 0.0);
        }
    }

    #[test]
    fn three_site_gap_tends_to_one_as_coupling_vanishes() {
        let mut prev = f64::INFINITY;
        for l in [0.1, 0.01, 0.001] {
            let h = build_hamiltonian(&chain(3, vec![l]), Boundary::Periodic).unwrap();
            let dev = (oracle_spectrum(&h, 2).unwrap().gap - 1.0).abs();
            assert!(dev < prev && dev < 2.0 * l);
            prev = dev;
        }
    }

    #[test]
    fn spectrum_is_even_in_field() {
        let spec = chain(7, vec![0.8, 0.2]).with_uniform_field(0.05).unwrap();
        let s = oracle_spectrum_checked(&spec, Boundary::Periodic, 8).unwrap();
        assert_eq!(s.parity_even_in_h, Some(true));
    }

    #[test]
    fn uncoupled_discrepancy_is_zero() {
        let spec = ChainSpec::new(9, 1.0, CouplingProfile::none()).unwrap();
        let d = compare_to_analytic(&spec).unwrap();
        assert_eq!(d.discrepancy, 0.0);
    }

    #[test]
    fn free_fermion_gap_at_n9_half_coupling() {
        // Reference value from an independent numpy diagonalization.
        let d = compare_to_analytic(&chain(9, vec![0.5])).unwrap();
        assert!((d.gap_oracle - 0.556712).abs() < 2e-6, "{}", d.gap_oracle);
    }
}
