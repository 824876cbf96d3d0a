//! End-to-end runs across modules, mostly through the file formats.

use modelset::correlations::{correlation_measure, correlations_equal, freq_exact, Pattern};
use modelset::homometry::{cyclotomic_pair, thinned_model_set};
use modelset::io::{read_deck, read_pointset, write_deck, write_pointset};
use modelset::pointsets::{generate, Region};
use modelset::reconstruct::{
    align_up_to_translation, reconstruct_from_deck, selftest_l_half, ReconstructionOptions,
};
use modelset::schemes::{IntervalUnion, QuadInt, Scheme, Window};
use modelset::spectra::{deck_functions, diffraction, sample_indicator, DiffractionOptions};
use proptest::prelude::*;

fn two_pieces(a: f64, gap: f64, b: f64) -> IntervalUnion {
    IntervalUnion::new([
        modelset::schemes::Interval::new(0.0, a).unwrap(),
        modelset::schemes::Interval::new(a + gap, a + gap + b).unwrap(),
    ])
}

#[test]
fn file_round_trip_preserves_correlations() {
    let s = Scheme::fibonacci();
    let w = s.parse_window("fib").unwrap();
    let ps = generate(&s, &w, Region::new(-300.0, 300.0).unwrap()).unwrap();
    let back = read_pointset(&write_pointset(&ps, Some("patch"))).unwrap();
    assert_eq!(back.points(), ps.points());
    let pat = Pattern::new([QuadInt::new(0, 1)]);
    let exact = freq_exact(&s, &w, &pat).unwrap();
    let emp = modelset::correlations::freq_empirical(&back, &pat, 500.0).unwrap();
    assert!(
        (emp - exact).abs() <= 0.02 * exact + 1e-3,
        "{emp} vs {exact}"
    );
}

#[test]
fn thinned_sets_share_correlations_through_order_three() {
    let (a, b) = cyclotomic_pair();
    let s = Scheme::combined(32).unwrap();
    let wa = s.parse_window("fib x {A}").unwrap();
    let wb = s.parse_window("fib x {B}").unwrap();
    for order in [2, 3] {
        let ma = correlation_measure(&s, &wa, order, 4.0).unwrap();
        let mb = correlation_measure(&s, &wb, order, 4.0).unwrap();
        assert!(
            correlations_equal(&ma, &mb, 1e-12).unwrap().is_none(),
            "order {order}"
        );
    }
    // the thinned patches themselves are different sets
    let fib = match Scheme::fibonacci().parse_window("fib").unwrap() {
        Window::Intervals(iu) => iu,
        _ => unreachable!(),
    };
    let region = Region::new(0.0, 200.0).unwrap();
    let pa = thinned_model_set(&fib, &a, region).unwrap();
    let pb = thinned_model_set(&fib, &b, region).unwrap();
    assert_ne!(pa.points(), pb.points());
}

#[test]
fn deck_file_reconstructs_the_window() {
    let w = two_pieces(0.7, 0.3, 0.45);
    let m = 256;
    let l_half = selftest_l_half(&w).unwrap();
    let f = sample_indicator(&w, m, l_half);
    let truth: Vec<u8> = f.iter().map(|&v| v as u8).collect();
    let text = write_deck(&deck_functions(&f, m, l_half).unwrap());
    let deck = read_deck(&text, false).unwrap();
    assert!(
        deck.f().is_none(),
        "a deck read from disk carries no window"
    );
    let (rec, _) = reconstruct_from_deck(&deck, &ReconstructionOptions::default()).unwrap();
    assert!(
        align_up_to_translation(&truth, &rec.indicator)
            .unwrap()
            .mismatch
            < 0.01
    );
}

#[test]
fn fibonacci_spectrum_peaks_are_ordered_and_bounded() {
    let s = Scheme::fibonacci();
    let w = s.parse_window("fib").unwrap();
    let sp = diffraction(&s, &w, DiffractionOptions::new(3.0)).unwrap();
    let d = s.measure(&w).unwrap();
    assert!((sp.peaks[0].intensity - d * d).abs() < 1e-12);
    for pair in sp.peaks.windows(2) {
        assert!(pair[0].k.abs() <= pair[1].k.abs() + 1e-12);
    }
    assert!(sp
        .peaks
        .iter()
        .all(|p| p.k.abs() <= 3.0 && p.intensity >= 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pointset_files_round_trip(lo in -500.0f64..500.0, len in 0.0f64..300.0, n in 2u32..40, combined: bool) {
        let s = if combined { Scheme::combined(n).unwrap() } else { Scheme::periodic(n).unwrap() };
        let lit = if combined { "[-1,1/tau) x {0,1}" } else { "{0,1}" };
        let w = s.parse_window(lit).unwrap();
        let ps = generate(&s, &w, Region::new(lo, lo + len).unwrap()).unwrap();
        let text = write_pointset(&ps, None);
        prop_assert_eq!(write_pointset(&read_pointset(&text).unwrap(), None), text);
    }

    #[test]
    fn deck_power_spectrum_is_nonnegative(a in 0.1f64..1.5, gap in 0.05f64..1.0, b in 0.1f64..1.5) {
        let w = two_pieces(a, gap, b);
        let m = 128;
        let l_half = selftest_l_half(&w).unwrap();
        let deck = deck_functions(&sample_indicator(&w, m, l_half), m, l_half).unwrap();
        for z in deck.i1_hat() {
            prop_assert!(z.im.abs() < 1e-10 && z.re >= -1e-10);
        }
        prop_assert!(deck.factorization_residual(deck.f_hat().unwrap()) < 1e-8);
    }

    #[test]
    fn random_two_piece_windows_reconstruct(a in 0.2f64..1.2, gap in 0.1f64..0.8, b in 0.2f64..1.2) {
        let w = two_pieces(a, gap, b);
        let m = 256;
        let l_half = selftest_l_half(&w).unwrap();
        let f = sample_indicator(&w, m, l_half);
        let truth: Vec<u8> = f.iter().map(|&v| v as u8).collect();
        let deck = deck_functions(&f, m, l_half).unwrap();
        let (rec, _) = reconstruct_from_deck(&deck, &ReconstructionOptions::default()).unwrap();
        let al = align_up_to_translation(&truth, &rec.indicator).unwrap();
        prop_assert!(al.mismatch < 0.01, "mismatch {}", al.mismatch);
    }
}
