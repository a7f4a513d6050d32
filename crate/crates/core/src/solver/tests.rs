use super::*;
use crate::spectral::{
    heat_propagate, pointwise_map, sup_norm, FrequencyLattice, Mode, PointwiseFn,
    PointwiseOptions, SpectralField,
};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn lat1(l: i64, k: i64) -> FrequencyLattice {
    FrequencyLattice::new(1, l, k).unwrap()
}

fn rel_sup_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    let diff = a.add_scaled(b, Complex64::new(-1.0, 0.0)).unwrap();
    sup_norm(&diff) / sup_norm(b).max(f64::MIN_POSITIVE)
}

fn cfg_t(t: f64) -> SolverConfig {
    SolverConfig { t_final: t, ..Default::default() }
}

#[test]
fn cole_hopf_fixes_zero_and_constants() {
    let lat = lat1(1, 16);
    let zero = SpectralField::zero_dense(lat, 8).unwrap();
    let out = cole_hopf_solve(&zero, 0.7, &cfg_t(0.7)).unwrap();
    assert!(sup_norm(&out) < 1e-13);

    let c = SpectralField::constant(lat, Complex64::new(1.3, 0.0)).to_dense(8).unwrap();
    let out = cole_hopf_solve(&c, 2.5, &cfg_t(2.5)).unwrap();
    assert!((out.coeff(Mode::zero()).re - 1.3).abs() < 1e-12);
    let osc: f64 = out
        .iter_coeffs()
        .filter(|(k, _)| *k != Mode::zero())
        .map(|(_, v)| v.norm())
        .sum();
    assert!(osc < 1e-12);
}

#[test]
fn cole_hopf_matches_the_heat_multiplier_oracle() {
    // u0 = log(1 + 0.5cos(k̃x)) solves to log(1 + 0.5e^{-|k̃|²t}cos(k̃x)).
    let lat = lat1(1, 64);
    let k = 3i64;
    let w0 = SpectralField::from_modes(
        lat,
        [
            (Mode::zero(), Complex64::new(1.0, 0.0)),
            (Mode([k, 0, 0]), Complex64::new(0.25, 0.0)),
            (Mode([-k, 0, 0]), Complex64::new(0.25, 0.0)),
        ],
        true,
    )
    .unwrap()
    .to_dense(48)
    .unwrap();
    let opts = PointwiseOptions { trunc_tol: 1e-12, ..Default::default() };
    let (u0, _) = pointwise_map(&w0, PointwiseFn::Log, &opts).unwrap();
    let u0 = u0.truncated(48).unwrap();

    let t = 0.2;
    let got = cole_hopf_solve(&u0, t, &cfg_t(t)).unwrap();

    let wt = heat_propagate(&w0, t).unwrap();
    let (want, _) = pointwise_map(&wt, PointwiseFn::Log, &opts).unwrap();
    let want = want.truncated(48).unwrap();
    let gap = rel_sup_gap(&got, &want);
    assert!(gap <= 1e-10, "oracle gap {gap:.2e}");
}

#[test]
fn mild_fixes_zero_and_constants() {
    let lat = lat1(1, 16);
    let cfg = SolverConfig { t_final: 0.3, steps: 16, ..Default::default() };
    let zero = SpectralField::zero_dense(lat, 8).unwrap();
    let snaps = mild_solve(&zero, &cfg).unwrap();
    assert!(snaps.iter().all(|(_, u)| sup_norm(u) == 0.0));

    let c = SpectralField::constant(lat, Complex64::new(0.9, 0.0)).to_dense(8).unwrap();
    let snaps = mild_solve(&c, &cfg).unwrap();
    for (_, u) in &snaps {
        assert!((u.coeff(Mode::zero()).re - 0.9).abs() < 1e-13);
    }
}

#[test]
fn mild_agrees_with_cole_hopf_and_halving_improves() {
    // u0 = 0.3cos(x), T = 0.1: relative sup gap ≤ 1e-6 at 256 steps and the
    // gap shrinks by ≥ 3.5 when the step is halved.
    let lat = lat1(1, 40);
    let u0 = SpectralField::cosine(lat, [1, 0, 0], 0.3).unwrap().to_dense(24).unwrap();
    let cfg = SolverConfig { t_final: 0.1, steps: 256, trunc_tol: 1e-12, ..Default::default() };
    let oracle = cole_hopf_solve(&u0, 0.1, &cfg).unwrap().truncated(24).unwrap();

    let end = |steps: usize| {
        let c = SolverConfig { steps, ..cfg.clone() };
        mild_solve(&u0, &c).unwrap().pop().unwrap().1.truncated(24).unwrap()
    };
    let gap_256 = rel_sup_gap(&end(256), &oracle);
    let gap_512 = rel_sup_gap(&end(512), &oracle);
    assert!(gap_256 <= 1e-6, "gap at 256 steps: {gap_256:.2e}");
    let factor = gap_256 / gap_512;
    assert!(factor >= 3.5, "halving factor {factor:.2}");
}

#[test]
fn picard_first_iterate_is_the_heat_flow() {
    let lat = lat1(2, 32);
    let f = SpectralField::cosine(lat, [5, 0, 0], 0.4).unwrap();
    let a1 = picard_a(&f, 1, 0.37, &cfg_t(1.0)).unwrap();
    let want = heat_propagate(&f, 0.37).unwrap();
    assert_eq!(a1.coeff_max_diff(&want), 0.0);
}

#[test]
fn picard_higher_iterates_vanish_at_time_zero() {
    let lat = lat1(1, 32);
    let f = SpectralField::cosine(lat, [3, 0, 0], 0.5).unwrap();
    for n in 2..=3 {
        let a = picard_a(&f, n, 0.0, &cfg_t(1.0)).unwrap();
        assert_eq!(a.coeff_l1(), 0.0);
    }
}

#[test]
fn picard_second_iterate_is_quadratically_homogeneous() {
    let lat = lat1(1, 64);
    let f = SpectralField::cosine(lat, [2, 0, 0], 0.3).unwrap();
    let t = 0.05;
    let cfg = cfg_t(1.0);
    let a2 = picard_a(&f, 2, t, &cfg).unwrap();
    let a2_scaled = picard_a(&f.scale(Complex64::new(0.5, 0.0)), 2, t, &cfg).unwrap();
    let want = a2.scale(Complex64::new(0.25, 0.0));
    let rel = a2_scaled.coeff_l1_diff(&want) / want.coeff_l1();
    assert!(rel <= 1e-12, "homogeneity defect {rel:.2e}");
}

#[test]
fn a2_exact_at_time_zero_is_zero() {
    let lat = lat1(1, 16);
    let f = SpectralField::cosine(lat, [2, 0, 0], 0.7).unwrap();
    let a2 = a2_exact(&f, 0.0).unwrap();
    assert_eq!(a2.coeff_l1(), 0.0);
}

#[test]
fn a2_exact_single_pair_support_and_quadrature_match() {
    let lat = lat1(1, 64);
    let f = SpectralField::cosine(lat, [4, 0, 0], 0.6).unwrap();
    let t = 0.08;
    let a2 = a2_exact(&f, t).unwrap();
    for (k, c) in a2.iter_coeffs() {
        let kk = k.0[0];
        assert!(kk == 0 || kk == 8 || kk == -8, "unexpected support at {kk}");
        assert!(c.im.abs() < 1e-15);
    }
    let quad = picard_a(&f, 2, t, &cfg_t(1.0)).unwrap();
    let rel = a2.coeff_l1_diff(&quad) / a2.coeff_l1();
    assert!(rel <= 1e-10, "kernel vs quadrature {rel:.2e}");
}

#[test]
fn a2_exact_matches_quadrature_on_random_sparse_fields() {
    let lat = lat1(2, 256);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for trial in 0..3 {
        let mut entries = Vec::new();
        for _ in 0..10 {
            let k = rng.gen_range(1..=200i64);
            let c = Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            entries.push((Mode([k, 0, 0]), c));
            entries.push((Mode([-k, 0, 0]), c.conj()));
        }
        let f = SpectralField::from_modes(lat, entries, true).unwrap();
        let t = 0.003;
        let a2 = a2_exact(&f, t).unwrap();
        let quad = picard_a(&f, 2, t, &cfg_t(1.0)).unwrap();
        let rel = a2.coeff_l1_diff(&quad) / a2.coeff_l1();
        assert!(rel <= 1e-10, "trial {trial}: kernel vs quadrature {rel:.2e}");
    }
}

#[test]
fn a2_exact_is_exactly_bilinear() {
    let lat = lat1(1, 64);
    let f = SpectralField::cosine(lat, [5, 0, 0], 0.8).unwrap();
    let t = 0.02;
    let a = a2_exact(&f.scale(Complex64::new(0.5, 0.0)), t).unwrap();
    let b = a2_exact(&f, t).unwrap().scale(Complex64::new(0.25, 0.0));
    assert_eq!(a.coeff_max_diff(&b), 0.0);
}

#[test]
fn oracle_triangle_and_quartic_remainder() {
    // cole_hopf vs Σ_{n≤3}A_n: the gap is quartic in the amplitude, so
    // halving the amplitude shrinks it by ≥ 14.
    let lat = lat1(1, 48);
    let t = 0.05;
    let cfg = SolverConfig { t_final: t, steps: 256, trunc_tol: 1e-12, ..Default::default() };
    let gap_for = |amp: f64| {
        let u0 = SpectralField::cosine(lat, [1, 0, 0], amp).unwrap().to_dense(24).unwrap();
        let oracle = cole_hopf_solve(&u0, t, &cfg).unwrap().truncated(16).unwrap();
        let series = PicardSeries::new(&u0, &cfg);
        let sum = series.partial_sum(3, t).unwrap().truncated(16).unwrap();
        let diff = sum.add_scaled(&oracle, Complex64::new(-1.0, 0.0)).unwrap();
        sup_norm(&diff)
    };
    let g1 = gap_for(0.2);
    let g2 = gap_for(0.1);
    assert!(g1 / g2 >= 14.0, "quartic scaling violated: {g1:.3e}/{g2:.3e} = {:.2}", g1 / g2);
}

#[test]
fn lowband_route_matches_dense_cole_hopf() {
    // Sparse oscillatory data at moderate frequency, both routes feasible.
    let lat = lat1(8, 4096);
    let mut entries = Vec::new();
    for j in 4..=6i64 {
        let center = (1i64 << j) * 8;
        for off in -3..=3i64 {
            let c = Complex64::new(0.02 * (1.0 - off.abs() as f64 / 4.0), 0.0);
            entries.push((Mode([center + off, 0, 0]), c));
            entries.push((Mode([-center - off, 0, 0]), c));
        }
    }
    let f = SpectralField::from_modes(lat, entries, true).unwrap();
    let t = 1.0 / 64.0;
    let cfg = SolverConfig { t_final: t, trunc_tol: 1e-11, ..Default::default() };

    let snaps = cole_hopf_snapshots_lowband(&f, &[t], &cfg).unwrap();
    let (_, fast) = &snaps[0];

    let dense = f.to_dense(f.band()).unwrap();
    let slow = cole_hopf_solve(&dense, t, &cfg).unwrap();
    let slow = slow.truncated(fast.band()).unwrap();
    let gap = rel_sup_gap(fast, &slow);
    assert!(gap <= 1e-9, "lowband vs dense gap {gap:.2e}");
}

#[test]
fn monitor_on_trivial_solutions() {
    let lat = lat1(1, 16);
    let zero = SpectralField::zero_dense(lat, 8).unwrap();
    let snaps: Vec<(f64, SpectralField)> =
        (0..5).map(|i| (0.1 * i as f64, zero.clone())).collect();
    let rep = hs_energy_monitor(&snaps, 2.1, 1e6).unwrap();
    assert!(rep.rows.iter().all(|r| r.hs == 0.0
        && r.grad_sup_sq_integral == 0.0
        && r.grad_besov_sq_integral == 0.0
        && !r.flagged));

    let c = SpectralField::constant(lat, Complex64::new(2.0, 0.0)).to_dense(4).unwrap();
    let snaps: Vec<(f64, SpectralField)> = (0..5).map(|i| (0.1 * i as f64, c.clone())).collect();
    let rep = hs_energy_monitor(&snaps, 2.1, 1e6).unwrap();
    let h0 = rep.rows[0].hs;
    assert!(rep.rows.iter().all(|r| (r.hs - h0).abs() < 1e-13 && r.grad_sup_sq_integral == 0.0));
}

#[test]
fn monitor_sees_pure_decay() {
    // Small smooth data decays in H^s.
    let lat = lat1(1, 64);
    let u0 = SpectralField::cosine(lat, [1, 0, 0], 0.2).unwrap().to_dense(32).unwrap();
    let t_final = 0.5;
    let cfg = SolverConfig { t_final, trunc_tol: 1e-12, ..Default::default() };
    let mut snaps = Vec::new();
    for i in 0..12 {
        let t = t_final * (i as f64 + 1.0) / 12.0;
        snaps.push((t, cole_hopf_solve(&u0, t, &cfg).unwrap()));
    }
    let rep = hs_energy_monitor(&snaps, 2.1, 1e6).unwrap();
    for w in rep.rows.windows(2) {
        assert!(
            w[1].hs <= w[0].hs * (1.0 + 1e-8),
            "H^s not decaying: {} -> {}",
            w[0].hs,
            w[1].hs
        );
    }
    assert!(!rep.s_below_threshold);
}

#[test]
fn small_data_persists_to_time_one() {
    // ‖u0‖_{H^s} ≤ 0.1, s = 2.1: the solution runs to T = 1 with
    // ‖u(t)‖_{H^s} ≤ 2‖u0‖_{H^s}.
    let lat = lat1(1, 64);
    let u0 = SpectralField::cosine(lat, [1, 0, 0], 0.05).unwrap().to_dense(32).unwrap();
    let s = 2.1;
    let h0 = crate::lp::sobolev_norm(&u0, s);
    assert!(h0 <= 0.1, "test data too large: {h0}");
    let cfg = SolverConfig { t_final: 1.0, trunc_tol: 1e-12, ..Default::default() };
    for i in 1..=8 {
        let t = i as f64 / 8.0;
        let u = cole_hopf_solve(&u0, t, &cfg).unwrap();
        let h = crate::lp::sobolev_norm(&u, s);
        assert!(h <= 2.0 * h0, "H^s grew at t = {t}: {h} > 2·{h0}");
    }
}
