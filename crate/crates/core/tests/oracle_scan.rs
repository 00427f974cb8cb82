//! Cross-checker oracles: the exhaustive window scan against the flow-side
//! check on a full grid, and transference witnesses against direct failures
//! at the matched scales.

use dirichlet_lab::psi::PsiFunction;
use dirichlet_lab::scan::*;

#[test]
fn direct_and_dani_agree_on_2500_cells() {
    // a = 0.5 half of the grid invariant; the acceptance suite runs a = 0.8.
    // This window is adversarial: psi(1e4) = 1/100 exactly, which collides
    // with the rational residuals of the cell-center grid, so the knife band
    // must sit above the flow path's float noise (~1e-13 in log units at
    // t near 9) for both checkers to flag the same samples.
    let psi = PsiFunction::power_log(0.5, 0.0, 2.0).unwrap();
    let mut cfg = ScanConfig::new(psi, 1, 1, (10.0, 1.0e4), 48).unwrap();
    cfg.boundary_tol = 1e-9;
    let cells = agreement_sweep(&cfg, 1.0, 50).unwrap();
    assert_eq!(cells.len(), 2500);
    let agree = cells.iter().filter(|c| c.agrees()).count();
    assert!(agree as f64 >= 0.99 * 2500.0, "agreement {agree}/2500");
    for c in &cells {
        assert!(c.agrees() || c.boundary_flagged(), "unflagged disagreement at ({}, {})", c.a, c.b);
    }
}

#[test]
fn transference_witnesses_force_direct_failures() {
    // A with an excellent odd-denominator approximation: 325/729 plus a
    // Liouville-size tail, so x = 729 certifies non-improvability over a
    // wide range of scales.
    let a = 325.0 / 729.0 + 3.5e-12;
    let b = 0.5;
    let psi = PsiFunction::power_log(1.0, 0.0, 1.5).unwrap();
    let s_list = [4000.0, 8000.0, 16000.0];
    let found = transference_witness(&[a], &[b], 1, 1, &psi, &s_list, 10_000_000).unwrap();
    for &s in &s_list {
        assert!(
            found.iter().any(|(fs, x)| *fs == s && x[0].unsigned_abs() == 729),
            "missing witness x=729 at S={s}"
        );
    }
    // matched scale: S = psi(T)^{-1/m} means T = S for psi = 1/T
    for &s in &s_list {
        let cfg = ScanConfig::new(
            PsiFunction::power_log(1.0, 0.0, 1.5).unwrap(),
            1,
            1,
            (s * 0.999, s * 1.001),
            3,
        )
        .unwrap();
        let verdict = direct_check(&[a], &[b], &cfg).unwrap();
        assert!(
            matches!(verdict.status, ScanStatus::FailsAt(_)),
            "expected failure at matched window around T={s}, got {:?}",
            verdict.status
        );
    }
}

#[test]
fn uniform_exponent_raw_thresholds_decrease_with_window() {
    let est = uniform_exponent(&[0.0], &[0.5], 1, 1, (0.0, 0.64), 1.0e5, 2e-3).unwrap();
    assert!(est.windows.len() >= 2);
    for w in est.windows.windows(2) {
        assert!(w[1].0 > w[0].0);
        assert!(w[1].1 <= w[0].1 + 2e-3, "threshold should not grow with the window");
    }
}
