use difforge::comb::TrigPolynomial;
use difforge::lfamily::{l_membership, l_set};
use difforge::phase::{construct, random_aperiodic_set, validate, PhaseForm};
use difforge::rational::{cis, q};
use difforge::{PointWeighting, SpectralMeasure, TemperedObject, TestFunction, Window, Q};
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn probe() -> impl Strategy<Value = TestFunction> {
    (-2.0f64..2.0, 0.4f64..2.0, -3.0f64..3.0)
        .prop_map(|(c, w, m)| TestFunction::gaussian(c, w).unwrap().modulate(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn l_is_symmetric(k in -100_000i128..100_000) {
        prop_assert_eq!(l_membership(k).member, l_membership(-k).member);
        let w = l_set().weight_at(&Q::from_integer(k)).unwrap();
        prop_assert_eq!(w.re == 1.0, l_membership(k).member);
    }

    #[test]
    fn translation_phase_shifts_the_lattice(num in -20i128..20, den in 1i128..12, f in probe()) {
        let t = q(num, den);
        let spec = SpectralMeasure::new(PointWeighting::lattice(Q::one(), Q::zero())).unwrap();
        let obj = construct(&spec, &PhaseForm::translation(t)).unwrap();
        let want = PointWeighting::lattice(Q::one(), t).pair_direct(&f, 1e-13).unwrap().value;
        let got = obj.realization.pair(&f, 1e-13).unwrap().value;
        prop_assert!((want - got).norm() < 1e-9);
    }

    #[test]
    fn double_transform_reflects(spacing in 1i128..5, off in -4i128..4, f in probe()) {
        let mut dual = PointWeighting::lattice(q(spacing, 2), q(off, 3));
        dual.extend(l_set());
        let obj = TemperedObject { direct: PointWeighting::lattice(Q::one(), q(1, 4)), dual, ..Default::default() };
        let a = obj.fourier().fourier().pair(&f, 1e-12).unwrap().value;
        let b = obj.pair(&f.reflect(), 1e-12).unwrap().value;
        prop_assert!((a - b).norm() < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn conjugate_symmetric_residues_are_valid(m in 1usize..7, seed in proptest::collection::vec(0i128..64, 7)) {
        let mut values = vec![Complex64::one(); m];
        for r in 1..m {
            if r <= m - r {
                let v = cis(&q(seed[r], 64));
                values[r] = v;
                values[m - r] = v.conj();
            }
        }
        if m % 2 == 0 && m > 1 {
            values[m / 2] = if seed[0] % 2 == 0 { Complex64::one() } else { -Complex64::one() };
        }
        let cert = validate(&PhaseForm::residue(values), &PointWeighting::lattice(Q::one(), Q::zero()), &Window::symmetric(30)).unwrap();
        prop_assert!(cert.valid, "{:?}", cert.violation);
    }

    #[test]
    fn trig_shift_matches_evaluation(freqs in proptest::collection::vec((-12i128..12, 1i128..5), 1..4), num in -10i128..10) {
        let p = TrigPolynomial::from_terms(freqs.iter().map(|&(a, b)| (q(a, b), Complex64::new(1.0, 0.5))));
        let t = q(num, 3);
        for x in -6..6 {
            let x = q(x, 2);
            prop_assert!((p.shift(&t).evaluate(&x) - p.evaluate(&(x - t))).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn random_sets_are_symmetric_indicators(seed in 0u64..1000) {
        let set = random_aperiodic_set(seed, 48).unwrap();
        prop_assert!((set.weight_at(&Q::zero()).unwrap().re - 1.0).abs() < 1e-12);
        for k in 1..=80i128 {
            let a = set.weight_at(&Q::from_integer(k)).unwrap();
            let b = set.weight_at(&Q::from_integer(-k)).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
            prop_assert!(a.norm() < 1e-12 || (a.re - 1.0).abs() < 1e-12);
            if k > 48 {
                prop_assert_eq!(a.re > 0.5, l_membership(k).member);
            }
        }
    }
}
