use ising_chain::linalg::eigenvalues;
use ising_chain::oracle::{build_hamiltonian, compare_to_analytic, field_sweep, oracle_spectrum, Boundary};
use ising_chain::perturb::second_order_ground;
use ising_chain::{ChainSpec, CouplingProfile, LongitudinalField};
use proptest::prelude::*;

fn chain(n: usize, lambdas: Vec<f64>) -> ChainSpec {
    ChainSpec::new(n, 1.0, CouplingProfile::explicit(lambdas).unwrap()).unwrap()
}

fn gap(spec: &ChainSpec) -> f64 {
    oracle_spectrum(&build_hamiltonian(spec, Boundary::Periodic).unwrap(), 2).unwrap().gap
}

fn ground(spec: &ChainSpec) -> f64 {
    oracle_spectrum(&build_hamiltonian(spec, Boundary::Periodic).unwrap(), 2).unwrap().eigenvalues[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_spectrum_is_even_in_field(
        n in 5usize..9,
        l1 in 0.0f64..1.2,
        l2 in 0.0f64..0.6,
        fields in prop::collection::vec(-0.3f64..0.3, 8),
        open in any::<bool>(),
    ) {
        let boundary = if open { Boundary::Open } else { Boundary::Periodic };
        let spec = chain(n, vec![l1, l2])
            .with_field(LongitudinalField::SiteDependent(fields[..n].to_vec()))
            .unwrap();
        let flipped = spec.clone().with_field(spec.field().negated()).unwrap();
        let plus = build_hamiltonian(&spec, boundary).unwrap();
        let minus = build_hamiltonian(&flipped, boundary).unwrap();
        prop_assert_eq!(plus.matrix.max_asymmetry(), 0.0);
        let (a, b) = (eigenvalues(&plus.matrix).unwrap(), eigenvalues(&minus.matrix).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn uncoupled_gap_is_exactly_gamma(n in 3usize..11, gamma in 0.1f64..10.0) {
        let spec = ChainSpec::new(n, gamma, CouplingProfile::none()).unwrap();
        let s = oracle_spectrum(&build_hamiltonian(&spec, Boundary::Periodic).unwrap(), 2).unwrap();
        // Exact for power-of-two gamma; otherwise a few ulps from E1 - E0.
        prop_assert!((s.gap - gamma).abs() <= 8.0 * f64::EPSILON * gamma * n as f64);
        prop_assert!((s.eigenvalues[0] + n as f64 * gamma / 2.0).abs() <= 8.0 * f64::EPSILON * gamma * n as f64);
    }
}

#[test]
fn even_chain_gap_closes_and_field_reopens_it() {
    let gaps: Vec<f64> = [6, 8, 10].iter().map(|&n| gap(&chain(n, vec![1.0]))).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    for n in [8, 10] {
        let with_field = chain(n, vec![1.0]).with_uniform_field(0.05).unwrap();
        assert!(gap(&with_field) > gap(&chain(n, vec![1.0])));
    }
}

#[test]
fn discrepancy_shrinks_faster_than_one_over_n() {
    let scaled: Vec<f64> =
        [7, 9, 11].iter().map(|&n| compare_to_analytic(&chain(n, vec![0.5])).unwrap().scaled).collect();
    assert!(scaled.windows(2).all(|w| w[1] <= w[0]), "{scaled:?}");
}

#[test]
fn gap_shift_is_quadratic_in_field() {
    let sweep = field_sweep(&chain(9, vec![1.0]), &[0.005, 0.01, 0.02]).unwrap();
    assert!((sweep.exponent - 2.0).abs() < 0.1, "{}", sweep.exponent);
}

#[test]
fn ground_shift_agrees_with_perturbation_theory_in_sign_and_order() {
    // Only sign and h^2 scaling are compared; see the ledger for the size.
    let base = chain(9, vec![1.0]);
    let e0 = ground(&base);
    let shift = |h: f64| ground(&base.clone().with_uniform_field(h).unwrap()) - e0;
    let (a, b) = (shift(0.01), shift(0.02));
    assert!(a < 0.0 && b < 0.0);
    assert!((b / a - 4.0).abs() < 0.05, "ratio {}", b / a);
    let pt = second_order_ground(&base.with_uniform_field(0.01).unwrap()).unwrap();
    assert!(pt < 0.0);
}
