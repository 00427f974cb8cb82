//! Property tests over randomized inputs.

use dirichlet_lab::lattice::{self, Grid};
use dirichlet_lab::psi::PsiFunction;
use dirichlet_lab::scan::{dani_check, direct_check, ScanConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psi_eval_is_nonincreasing(a in 0.1f64..2.0, e in 0.0f64..1.5, lo in 1.1f64..50.0, span in 0.1f64..200.0) {
        let t0 = lo.max((e / a).exp() * 1.01);
        let psi = PsiFunction::power_log(a, e, t0).unwrap();
        let t1 = t0 + span * 0.25;
        let t2 = t1 + span;
        prop_assert!(psi.eval(t2).unwrap() <= psi.eval(t1).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn table_inverse_round_trip(scale in 1.5f64..4.0, decay in 0.2f64..0.9) {
        // strictly decreasing tabulated function: inverse(eval(T)) == T
        let knots: Vec<(f64, f64)> = (0..30)
            .map(|i| (2.0 * scale.powi(i), decay.powi(i)))
            .collect();
        let psi = PsiFunction::table(knots).unwrap();
        for i in 0..24 {
            let t = 2.5 * scale.powi(i);
            let u = psi.eval(t).unwrap();
            let back = psi.inverse(u).unwrap();
            prop_assert!((back.ln() - t.ln()).abs() < 1e-9, "t={t} back={back}");
        }
    }

    #[test]
    fn minima_2x2_path_agrees_with_generic(alpha in 0.0f64..1.0, t in 0.0f64..4.0, shear in -4i64..=4) {
        let e = t.exp();
        // flowed planar basis with an extra integer column shear
        let b = [e, e * alpha + shear as f64 * e, 0.0, (-t).exp()];
        let g = Grid::lattice(2, b.to_vec()).unwrap();
        let rep = lattice::successive_minima(&g).unwrap();
        let (l1, l2) = lattice::minima_2x2(b);
        prop_assert!((l1 - rep.lambdas[0]).abs() < 1e-9 * (1.0 + l1));
        prop_assert!((l2 - rep.lambdas[1]).abs() < 1e-9 * (1.0 + l2));
    }

    #[test]
    fn lll_preserves_determinant(alpha in 0.0f64..1.0, beta in 0.0f64..1.0, k in -50i64..=50) {
        let b = vec![1.0, alpha, k as f64 * 0.5 + beta, 1.0 + alpha * (k as f64 * 0.5 + beta)];
        // det = 1 by construction
        let red = lattice::lll_reduce(&b, 2).unwrap();
        let det = red[0] * red[3] - red[1] * red[2];
        prop_assert!((det.abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn checkers_agree_or_flag(alpha in 0.0f64..1.0, beta in 0.0f64..1.0, a in 0.45f64..0.95) {
        let psi = PsiFunction::power_log(a, 0.0, 2.0).unwrap();
        let cfg = ScanConfig::new(psi, 1, 1, (5.0, 800.0), 12).unwrap();
        let dv = direct_check(&[alpha], &[beta], &cfg).unwrap();
        let kv = dani_check(&[alpha], &[beta], &cfg, 1.0).unwrap();
        let same = dv.status.kind() == kv.status.kind();
        let flagged = dv.status.kind() == dirichlet_lab::scan::StatusKind::Boundary
            || kv.status.kind() == dirichlet_lab::scan::StatusKind::Boundary;
        prop_assert!(same || flagged);
    }
}
