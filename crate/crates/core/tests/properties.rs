//! Cross-module invariants.

use proptest::prelude::*;

use ricecap::bounds::{capacity_upper_bound, new_scheme_lower_bound, new_scheme_upper_bound};
use ricecap::channel::{upsilon, ChannelConfig, CovarianceScheme};
use ricecap::estimators::{mc_ergodic_capacity, mc_new_scheme_capacity, MonteCarloSpec};
use ricecap::linalg::hermitian_eigen;
use ricecap::special::QuadratureRule;

fn spec(samples: usize, seed: u64) -> MonteCarloSpec {
    MonteCarloSpec::new(samples, seed, 4, 0.95).unwrap()
}

#[test]
fn jensen_bound_dominates_isotropic_capacity() {
    let mut seed = 0;
    for &k in &[0.0, 1.0, 10.0] {
        for &(nt, nr) in &[(1usize, 1usize), (1, 4), (2, 2), (4, 1), (4, 3), (8, 2)] {
            for &p in &[1.0, 10.0] {
                seed += 1;
                let c = ChannelConfig::new(nt, nr, k, p).unwrap();
                let est = mc_ergodic_capacity(
                    &c,
                    &CovarianceScheme::scaled_identity(&c),
                    &spec(20_000, seed),
                )
                .unwrap();
                let ub = capacity_upper_bound(&c).nats;
                assert!(
                    est.nats <= ub + 3.0 * est.std_error,
                    "{c:?}: {} > {ub}",
                    est.nats
                );
            }
        }
    }
}

#[test]
fn rician_weighting_beats_isotropic_for_single_receiver() {
    let mut seed = 100;
    for &k in &[1.0, 3.0, 10.0] {
        for &nt in &[2usize, 4, 8] {
            for &p in &[1.0, 10.0] {
                seed += 1;
                let c = ChannelConfig::new(nt, 1, k, p).unwrap();
                let new = mc_new_scheme_capacity(&c, &spec(20_000, seed)).unwrap();
                let iso = mc_ergodic_capacity(
                    &c,
                    &CovarianceScheme::scaled_identity(&c),
                    &spec(20_000, seed),
                )
                .unwrap();
                assert!(new.nats >= iso.nats - 3.0 * iso.std_error.hypot(new.std_error));
            }
        }
    }
}

#[test]
fn rician_scheme_estimate_matches_general_logdet() {
    // with N_R = 1, ln det(1 + h Q hᴴ) is exactly the scalar form
    let c = ChannelConfig::new(5, 1, 2.0, 3.0).unwrap();
    let s = spec(5_000, 7);
    let a = mc_new_scheme_capacity(&c, &s).unwrap();
    let b = mc_ergodic_capacity(&c, &CovarianceScheme::rician_weighted(&c), &s).unwrap();
    assert!((a.nats - b.nats).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn upsilon_spectrum(n_t in 1usize..10, k in 0.0f64..100.0) {
        let c = ChannelConfig::new(n_t, 1, k, 1.0).unwrap();
        let e = hermitian_eigen(&upsilon(&c)).unwrap();
        prop_assert!((e.values[0] - (1.0 + n_t as f64 * k) / (1.0 + k)).abs() < 1e-10);
        for v in &e.values[1..] {
            prop_assert!((v - 1.0 / (1.0 + k)).abs() < 1e-10);
        }
    }

    #[test]
    fn rician_weighted_trace_is_power(n_t in 1usize..16, k in 0.0f64..1e4, p in 0.0f64..1e3) {
        let c = ChannelConfig::new(n_t, 2, k, p).unwrap();
        let q = CovarianceScheme::rician_weighted(&c);
        prop_assert!((q.matrix().trace() - p).abs() <= 1e-12 * p.max(1.0));
    }

    #[test]
    fn bound_ordering_single_receiver(n_t in 1usize..16, k in 0.0f64..50.0, p_db in -10.0f64..20.0) {
        let c = ChannelConfig::from_snr_db(n_t, 1, k, p_db).unwrap();
        let lb = new_scheme_lower_bound(&c, &QuadratureRule::default()).unwrap();
        let ub = new_scheme_upper_bound(&c).unwrap().nats;
        prop_assert!(lb.nats >= 0.0);
        prop_assert!(lb.nats <= ub + 1e-8);
        prop_assert!(ub <= capacity_upper_bound(&c).nats + 1e-8);
    }

    #[test]
    fn monte_carlo_reproducible(seed in any::<u64>(), shards in 1usize..6) {
        let c = ChannelConfig::new(2, 3, 1.0, 2.0).unwrap();
        let s = MonteCarloSpec::new(300, seed, shards, 0.9).unwrap();
        let q = CovarianceScheme::rician_weighted(&c);
        let a = mc_ergodic_capacity(&c, &q, &s).unwrap();
        let b = mc_ergodic_capacity(&c, &q, &s).unwrap();
        prop_assert_eq!(a.nats.to_bits(), b.nats.to_bits());
        prop_assert!(a.uncertainty > a.std_error);
    }
}
