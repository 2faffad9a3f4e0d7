//! Cross-module checks through the public API only.

use flycat::field::LossProfile;
use flycat::netstates::{tetra_fidelity_sampled, tetra_prepare_exact, TetraConfig};
use flycat::paritycheck::{apply_dephasing, run_check_exact, Basis, ParityCheckConfig};
use flycat::qcore::{haar_state, DensityMatrix};
use flycat::rng::shot_rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn check_output_is_a_state(
        seed in any::<u64>(),
        alpha in 0.1f64..3.0,
        etas in prop::collection::vec(0.0f64..0.3, 2..4),
        x_basis in any::<bool>(),
    ) {
        let n = etas.len();
        let basis = if x_basis { Basis::X } else { Basis::Z };
        let cfg = ParityCheckConfig::new(alpha, LossProfile::new(etas).unwrap(), basis).unwrap();
        let rho = DensityMatrix::from_pure(&haar_state::<f64, _>(n, &mut shot_rng(seed, 0)).unwrap());

        let out = apply_dephasing(&rho, &cfg).unwrap();
        prop_assert!(out.validate().is_ok());
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);

        let pre = run_check_exact(&rho, &cfg).unwrap();
        prop_assert!(pre.validate().is_ok());
        prop_assert!((pre.qubit_state().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tetra_preparation_is_normalized(alpha in 0.3f64..2.5, eta in 0.0f64..0.1) {
        let ex = tetra_prepare_exact(&TetraConfig::<f64>::uniform(alpha, eta).unwrap()).unwrap();
        prop_assert!(ex.state.validate().is_ok());
        let total: f64 = ex.syndromes.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn sampled_tetra_fidelity_is_seed_deterministic() {
    let cfg = TetraConfig::uniform(1.2, 0.01).unwrap();
    let a = tetra_fidelity_sampled(&cfg, 2_000, 8).unwrap();
    assert_eq!(a, tetra_fidelity_sampled(&cfg, 2_000, 8).unwrap());
    assert_ne!(a, tetra_fidelity_sampled(&cfg, 2_000, 9).unwrap());
}
