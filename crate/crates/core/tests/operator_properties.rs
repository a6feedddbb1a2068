//! Property tests for truncated operators, sub-symbols and the Berezin transform.

use hardy_core::berezin::berezin_transform;
use hardy_core::circle_fourier::{
    coeffs_from_grid, evaluate_hardy_on_grid, evaluate_on_grid, multiply, CircleGrid, HardyCoeffs, LaurentSeries,
};
use hardy_core::hardy_ops::{
    adjoint, apply, diagonal_symbol_recovery, gamma_upper_triangular, is_toeplitz_algebraic, parse_matrix,
    shift_compress, toeplitz_from_symbol, write_matrix, TruncatedOperator,
};
use hardy_core::subsymbol::{
    default_probes, extension_agreement, partial_stabilization, sub_symbol, uniqueness_probe, UniquenessVerdict,
};
use hardy_core::Complex64;
use proptest::prelude::*;

fn unit_complex() -> impl Strategy<Value = Complex64> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn symbol(max_band: i64) -> impl Strategy<Value = LaurentSeries> {
    (0..=max_band, 0..=max_band).prop_flat_map(|(lo, hi)| {
        prop::collection::vec(unit_complex(), (lo + hi + 1) as usize)
            .prop_map(move |c| LaurentSeries::new(-lo, c).unwrap())
    })
}

fn analytic_symbol(max_deg: usize) -> impl Strategy<Value = LaurentSeries> {
    prop::collection::vec(unit_complex(), 1..=max_deg + 1).prop_map(|c| LaurentSeries::new(0, c).unwrap())
}

fn matrix(n: usize) -> impl Strategy<Value = TruncatedOperator> {
    prop::collection::vec(unit_complex(), n * n).prop_map(move |e| TruncatedOperator::new(n, e).unwrap())
}

/// `<P(phi z^n), z^m>` through grid multiplication and inverse transform.
fn grid_entry(phi: &LaurentSeries, m: usize, n: usize) -> Complex64 {
    let grid = CircleGrid::new(phi.width() + 2 * (m + n) + 8).unwrap();
    let z_n = LaurentSeries::monomial(n as i64, Complex64::new(1.0, 0.0));
    let product: Vec<Complex64> = evaluate_on_grid(phi, &grid)
        .iter()
        .zip(evaluate_on_grid(&z_n, &grid))
        .map(|(a, b)| a * b)
        .collect();
    coeffs_from_grid(&product, m as i64, m as i64, &grid).unwrap().coeff(m as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn toeplitz_entries_match_grid_oracle(phi in symbol(4), n in 4usize..10) {
        let t = toeplitz_from_symbol(&phi, n).unwrap();
        for m in 0..n {
            for j in 0..n {
                prop_assert!((t.entry(m, j) - grid_entry(&phi, m, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn toeplitz_invariants(phi in symbol(6), n in 4usize..24) {
        let t = toeplitz_from_symbol(&phi, n).unwrap();
        let check = is_toeplitz_algebraic(&t, 0.0);
        prop_assert!(check.is_toeplitz);
        prop_assert_eq!(check.max_deviation, 0.0);
        prop_assert_eq!(shift_compress(&t).unwrap().entries().to_vec(), toeplitz_from_symbol(&phi, n - 1).unwrap().entries().to_vec());

        let margin = n / 4;
        let rec = diagonal_symbol_recovery(&t, margin);
        for k in rec.n_min()..=rec.n_max() {
            prop_assert_eq!(rec.coeff(k), phi.coeff(k));
        }
        let adj = adjoint(&t);
        prop_assert_eq!(adj.entries(), toeplitz_from_symbol(&phi.conj_reflect(), n).unwrap().entries().to_vec());
        prop_assert_eq!(adjoint(&adj).entries().to_vec(), t.entries());
    }

    #[test]
    fn gamma_of_analytic_symbol_is_transposed_toeplitz(phi in analytic_symbol(6), n in 4usize..16) {
        let gamma: Vec<Complex64> = (0..n).map(|k| phi.coeff(k as i64)).collect();
        let g = gamma_upper_triangular(&gamma, n).unwrap();
        let t = toeplitz_from_symbol(&phi, n).unwrap();
        for m in 0..n {
            for j in 0..n {
                prop_assert_eq!(g.entry(m, j), t.entry(j, m));
            }
        }
        // entry (m, j) = gamma_{j-m} is the Toeplitz pattern of sum gamma_n conj(z)^n
        let conj_gamma: Vec<Complex64> = gamma.iter().map(|c| c.conj()).collect();
        let reflected = toeplitz_from_symbol(&phi.conj_reflect(), n).unwrap();
        prop_assert_eq!(gamma_upper_triangular(&conj_gamma, n).unwrap().entries().to_vec(), reflected.entries());
    }

    #[test]
    fn apply_is_linear(
        t in matrix(8),
        u in prop::collection::vec(unit_complex(), 8),
        v in prop::collection::vec(unit_complex(), 8),
        alpha in unit_complex(),
        beta in unit_complex(),
    ) {
        let uh = HardyCoeffs::new(u.clone()).unwrap();
        let vh = HardyCoeffs::new(v.clone()).unwrap();
        let combo = HardyCoeffs::new(u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect()).unwrap();
        let lhs = apply(&t, &combo);
        let (tu, tv) = (apply(&t, &uh), apply(&t, &vh));
        for m in 0..8 {
            prop_assert!((lhs.coeff(m) - (alpha * tu.coeff(m) + beta * tv.coeff(m))).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_file_round_trip_is_exact(t in matrix(5)) {
        prop_assert_eq!(parse_matrix(&write_matrix(&t)).unwrap().entries().to_vec(), t.entries());
    }

    #[test]
    fn sub_symbol_recovers_symbol(phi in symbol(5)) {
        let n = 48;
        let t = toeplitz_from_symbol(&phi, n).unwrap();
        let grid = CircleGrid::new(128).unwrap();
        let phi_vals = evaluate_on_grid(&phi, &grid);
        for probe in default_probes(None) {
            let s = sub_symbol(&t, &probe.f, &grid, 8, None).unwrap();
            prop_assert!(s.h_complete);
            let phi_on = evaluate_on_grid(&phi, &s.grid);
            for (r, p) in s.r_values.iter().zip(&phi_on) {
                if let Some(r) = r {
                    prop_assert!((r - p).norm() < 1e-9);
                }
            }
            // the numerator is phi f on its band
            let phif = multiply(&phi, &LaurentSeries::from(&probe.f));
            prop_assert!(s.h.max_deviation(&phif) < 1e-12);
        }
        let adj = sub_symbol(&adjoint(&t), &HardyCoeffs::one(), &grid, 8, None).unwrap();
        for (r, p) in adj.r_values.iter().zip(&phi_vals) {
            prop_assert!((r.unwrap() - p.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn uniqueness_for_toeplitz(phi in symbol(8)) {
        let t = toeplitz_from_symbol(&phi, 64).unwrap();
        let grid = CircleGrid::new(256).unwrap();
        let rep = uniqueness_probe(&t, &default_probes(None), &grid, 16, 1e-9).unwrap();
        prop_assert_eq!(rep.verdict, UniquenessVerdict::Unique);
        prop_assert!(rep.max_deviation() <= 1e-9);
    }

    #[test]
    fn extension_and_stabilization(phi in symbol(4), outer in 2.0f64..4.0, deg in 0usize..=6) {
        let n = 48;
        let t = toeplitz_from_symbol(&phi, n).unwrap();
        let f = HardyCoeffs::from_real(&[outer, 1.0]).unwrap();
        let polys: Vec<HardyCoeffs> = (0..=deg).map(HardyCoeffs::monomial).collect();
        let grid = CircleGrid::new(256).unwrap();
        let rep = extension_agreement(&t, &f, &polys, &grid, 8, 1e-8).unwrap();
        prop_assert!(rep.all_passed(), "{:?}", rep.rows);

        let p = HardyCoeffs::new((0..=deg).map(|k| Complex64::new(1.0 + k as f64, 0.5)).collect()).unwrap();
        let st = partial_stabilization(&t, &f, &p, 0..=20, 1e-12).unwrap();
        prop_assert!(st.n_star <= deg + 1);
        prop_assert!(st.matches_apply);
    }

    #[test]
    fn berezin_recovers_analytic_symbol(phi in analytic_symbol(5), r in 0.0f64..0.7, t in 0.0f64..6.28) {
        let w = Complex64::from_polar(r, t);
        let op = toeplitz_from_symbol(&phi, 64).unwrap();
        let b = berezin_transform(&op, w).unwrap();
        prop_assert!((b.value - phi.eval_at(w)).norm() < 1e-12);
    }
}

#[test]
fn berezin_of_conjugate_symbol() {
    let phi = LaurentSeries::from_pairs(&[(-2, Complex64::new(0.3, 0.1)), (0, Complex64::new(1.0, 0.0))]).unwrap();
    let op = toeplitz_from_symbol(&phi, 64).unwrap();
    let w = Complex64::new(0.4, -0.2);
    // B(w) = phi_hat(0) + phi_hat(-2) conj(w)^2
    let expect = Complex64::new(1.0, 0.0) + Complex64::new(0.3, 0.1) * w.conj() * w.conj();
    assert!((berezin_transform(&op, w).unwrap().value - expect).norm() < 1e-12);
}

#[test]
fn probe_values_on_grid() {
    let f = HardyCoeffs::from_real(&[2.0, 1.0]).unwrap();
    let grid = CircleGrid::new(8).unwrap();
    let v = evaluate_hardy_on_grid(&f, &grid);
    assert!((v[0] - Complex64::new(3.0, 0.0)).norm() < 1e-15);
    assert!((v[4] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}
