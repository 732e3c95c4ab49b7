mod common;

use common::{bloch_state, coupled_channel_apply, random_channel, random_state, seal_coupling, unitarity_error};
use proptest::prelude::*;
use qseal::qubit::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn builtin_channels() -> Vec<KrausChannel> {
    let mut v = vec![identity_channel(), dephasing_channel()];
    for i in 0..=10 {
        let t = f64::from(i) / 10.0;
        v.push(seal_example_channel(t).unwrap());
        v.push(depolarizing_channel(t).unwrap());
    }
    v
}

fn state_strategy() -> impl Strategy<Value = DensityMatrix> {
    (0.0..=1.0f64, 0.0..=std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, theta, phi)| bloch_state(r, theta, phi))
}

#[test]
fn cptp_closure_on_sampled_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let channels = builtin_channels();
    for _ in 0..1000 {
        let rho = random_state(&mut rng);
        for ch in &channels {
            let out = apply_channel(ch, &rho).unwrap();
            // Re-validate from the raw matrix.
            DensityMatrix::new(*out.matrix()).unwrap();
        }
    }
}

#[test]
fn chaotic_state_is_uniform_mixture_of_protocol_states() {
    let sum = ProtocolPureState::ALL
        .iter()
        .map(|s| *s.density().matrix())
        .fold(Mat2::zero(), |a, m| a + m)
        .scale_real(0.25);
    assert_eq!(sum, *DensityMatrix::chaotic().matrix());
}

#[test]
fn seal_kraus_form_matches_unitary_coupling() {
    for variant in [0, 1] {
        for i in 0..=20 {
            let x = f64::from(i) / 20.0;
            let cp = seal_coupling(x, variant);
            assert!(unitarity_error(&cp.u) < 1e-12);
            let ch = seal_example_channel(x).unwrap();
            for s in ProtocolPureState::ALL {
                let kraus = apply_channel(&ch, &s.density()).unwrap();
                let oracle = coupled_channel_apply(&cp, s.density().matrix());
                assert!(
                    kraus.matrix().max_abs_diff(&oracle) < 1e-12,
                    "variant {variant} x={x} state {s:?}"
                );
            }
        }
    }
}

#[test]
fn unitary_completions_differ_but_agree_on_channel() {
    let a = seal_coupling(0.4, 0);
    let b = seal_coupling(0.4, 1);
    let diff = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (a.u[i][j] - b.u[i][j]).norm())
        .fold(0.0, f64::max);
    assert!(diff > 0.1);
    let rho = bloch_state(0.7, 1.1, 2.3);
    let da = coupled_channel_apply(&a, rho.matrix());
    let db = coupled_channel_apply(&b, rho.matrix());
    assert!(da.max_abs_diff(&db) < 1e-12);
}

#[test]
fn pure_image_rigidity() {
    // Channels whose chaotic image is pure send every protocol state to it.
    let mut candidates = builtin_channels();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    candidates.extend((0..200).map(|i| random_channel(&mut rng, &format!("r{i}"))));
    let mut seen_pure = 0;
    for ch in &candidates {
        let report = validate_channel(ch);
        let Some(image) = report.chaotic_image else { continue };
        if (image.lambda() - 1.0).abs() > 1e-12 {
            continue;
        }
        seen_pure += 1;
        let target = density_from_bloch(&image);
        for s in ProtocolPureState::ALL {
            let out = apply_channel(ch, &s.density()).unwrap();
            assert!(out.matrix().max_abs_diff(target.matrix()) < 1e-10);
        }
    }
    assert!(seen_pure >= 1, "seal(1) should have a pure chaotic image");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bloch_round_trip(rho in state_strategy()) {
        let back = density_from_bloch(&bloch_from_density(&rho));
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn born_normalization(rho in state_strategy()) {
        for basis in MeasurementBasis::ALL {
            let plus = measurement_prob(&rho, basis, MeasurementResult::Plus);
            let minus = measurement_prob(&rho, basis, MeasurementResult::Minus);
            prop_assert!((0.0..=1.0).contains(&plus));
            prop_assert!((plus + minus - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn convex_linearity(a in state_strategy(), b in state_strategy(), p in 0.0..=1.0f64, which in 0usize..22) {
        let ch = &builtin_channels()[which];
        let mixed = DensityMatrix::mix(p, &a, &b).unwrap();
        let lhs = apply_channel(ch, &mixed).unwrap();
        let ea = apply_channel(ch, &a).unwrap();
        let eb = apply_channel(ch, &b).unwrap();
        let rhs = ea.matrix().scale_real(p) + eb.matrix().scale_real(1.0 - p);
        prop_assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn random_channels_are_cptp(seed in any::<u64>(), rho in state_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(&mut rng, "random");
        let report = validate_channel(&ch);
        prop_assert!(report.passed);
        prop_assert!(apply_channel(&ch, &rho).is_ok());
    }
}
