use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::group::ContinuousPoint;

fn random_point(rng: &mut ChaCha8Rng) -> ContinuousPoint {
    let u = |rng: &mut ChaCha8Rng, h: f64| h * (2.0 * rng.gen::<f64>() - 1.0);
    ContinuousPoint::new(u(rng, 4.0), u(rng, 4.0), u(rng, 4.0), u(rng, 4.0), u(rng, 16.0))
}

fn x2_axis(t: f64) -> ContinuousPoint {
    ContinuousPoint::new(0.0, t, 0.0, 0.0, 0.0)
}

fn y2_axis(t: f64) -> ContinuousPoint {
    ContinuousPoint::new(0.0, 0.0, 0.0, t, 0.0)
}

#[test]
fn slice_decomposition_reconstructs_the_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20_000 {
        let u = random_point(&mut rng);
        let (chi, h, xi) = slice_point(u);
        assert_eq!(h.x2, 0.0);
        assert_eq!(h.y2, 0.0);
        let back = y2_axis(chi).mul(h).mul(x2_axis(xi));
        for (got, want) in [
            (back.x1, u.x1),
            (back.x2, u.x2),
            (back.y1, u.y1),
            (back.y2, u.y2),
            (back.z, u.z),
        ] {
            assert!((got - want).abs() <= 1e-12, "coordinate {got} drifted from {want}");
        }
    }
}

#[test]
fn slice_point_matches_the_named_cases() {
    let z = ContinuousPoint::new(0.0, 0.0, 0.0, 0.0, 1.0);
    let (chi, h, xi) = slice_point(z);
    assert_eq!((chi, xi), (0.0, 0.0));
    assert_eq!((h.x1, h.y1, h.z), (0.0, 0.0, 1.0));

    let (chi, h, xi) = slice_point(x2_axis(1.0));
    assert_eq!((chi, xi), (0.0, 1.0));
    assert_eq!((h.x1, h.y1, h.z), (0.0, 0.0, 0.0));
}

#[test]
fn graph_points_carry_the_expected_coordinates() {
    let one = IntrinsicGraphFn::new(GraphFamily::Constant { value: 1.0 }).unwrap();
    let w = gamma_point(&one, [0.0, 0.0, 1.0, 0.0]);
    assert_eq!((w.x1, w.x2, w.y1, w.y2, w.z), (0.0, 1.0, 0.0, 1.0, -0.5));

    // The graph point is the V-point right-translated along X2 by the value.
    let f = IntrinsicGraphFn::new(GraphFamily::Bump { amplitude: 0.7, width: 1.3 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let v = [
            2.0 * rng.gen::<f64>() - 1.0,
            2.0 * rng.gen::<f64>() - 1.0,
            2.0 * rng.gen::<f64>() - 1.0,
            4.0 * rng.gen::<f64>() - 2.0,
        ];
        let t = f.eval(v[0], v[1], v[2], v[3]);
        let base = ContinuousPoint::new(v[0], 0.0, v[1], v[2], v[3]);
        let w = gamma_point(&f, v);
        let direct = base.mul(x2_axis(t));
        assert!((w.x1 - direct.x1).abs() <= 1e-15);
        assert!((w.x2 - direct.x2).abs() <= 1e-15);
        assert!((w.z - direct.z).abs() <= 1e-12);
    }
}

#[test]
fn half_space_membership_is_strict_above_the_graph() {
    let f = IntrinsicGraphFn::new(GraphFamily::Constant { value: 0.7 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..2_000 {
        let v = [
            4.0 * rng.gen::<f64>() - 2.0,
            4.0 * rng.gen::<f64>() - 2.0,
            4.0 * rng.gen::<f64>() - 2.0,
            8.0 * rng.gen::<f64>() - 4.0,
        ];
        let on_graph = gamma_point(&f, v);
        assert!(!in_half_space(&f, on_graph));
        assert!(in_half_space(&f, on_graph.mul(x2_axis(1e-6))));
        assert!(!in_half_space(&f, on_graph.mul(x2_axis(-1e-6))));
    }

    // For the zero graph the half space is exactly {x2 > 0}.
    let zero = IntrinsicGraphFn::zero();
    for _ in 0..2_000 {
        let u = random_point(&mut rng);
        assert_eq!(in_half_space(&zero, u), u.x2 > 0.0);
    }
}

#[test]
fn half_space_criterion_commutes_with_central_translation() {
    // h(u Z^a) = h(u) Z^a, so membership of u Z^a only moves the slice
    // argument along the center.
    let f = IntrinsicGraphFn::new(GraphFamily::Bump { amplitude: 0.5, width: 1.0 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..2_000 {
        let u = random_point(&mut rng);
        let a = 8.0 * rng.gen::<f64>() - 4.0;
        let (chi, h, xi) = slice_point(u);
        let (chi2, h2, xi2) = slice_point(u.z_translate(a));
        assert!((chi2 - chi).abs() <= 1e-12);
        assert!((xi2 - xi).abs() <= 1e-12);
        assert!((h2.z - (h.z + a)).abs() <= 1e-12);
        assert_eq!(h2.x1, h.x1);
        assert_eq!(h2.y1, h.y1);
        let via_slice =
            xi > slice_value(&f, chi, ContinuousPoint::new(h.x1, 0.0, h.y1, 0.0, h.z + a));
        assert_eq!(in_half_space(&f, u.z_translate(a)), via_slice);
    }
}

#[test]
fn lipschitz_estimates_recover_known_constants() {
    let domain = VBox::standard();
    let zero = IntrinsicGraphFn::zero();
    assert_eq!(intrinsic_lip_estimate(&zero, &domain, 5_000, 1).unwrap(), 0.0);

    let constant = IntrinsicGraphFn::new(GraphFamily::Constant { value: 3.0 }).unwrap();
    assert_eq!(intrinsic_lip_estimate(&constant, &domain, 5_000, 1).unwrap(), 0.0);

    // For f = k*a the difference quotient is k|da| / (|da| + k|da| + ...),
    // so the supremum is exactly k/(1+k), approached along pairs that agree
    // in the other coordinates.
    let kappa = 0.3;
    let linear =
        IntrinsicGraphFn::new(GraphFamily::Linear { a: kappa, c: 0.0, d: 0.0, e: 0.0 }).unwrap();
    let est = intrinsic_lip_estimate(&linear, &domain, 60_000, 2).unwrap();
    let limit = kappa / (1.0 + kappa);
    assert!(est <= limit + 1e-12, "estimate {est} exceeds the exact supremum {limit}");
    assert!(est >= 0.8 * limit, "estimate {est} far below the exact supremum {limit}");
}

#[test]
fn sinusoid_calibration_hits_the_target() {
    let domain = VBox::standard();
    let f = sinusoid_with_lambda(0.3, 2.0, &domain, 20_000, 7).unwrap();
    let got = f.lambda_hat().unwrap();
    assert!((got - 0.3).abs() <= 2e-3, "calibrated estimate {got}");
    assert!(f.inflated_lambda().unwrap() < 1.0);
    match f.family() {
        GraphFamily::Sinusoid { amplitude, .. } => assert!(amplitude > 0.0),
        other => panic!("unexpected family {other:?}"),
    }
}

#[test]
fn region_samples_stay_inside_and_volumes_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ball = Region::Ball { radius: 2.0 };
    let ball3 = Region::BallH3 { radius: 2.0 };
    let boxy = Region::Box { half: [1.0, 0.5, 2.0, 1.5, 3.0] };
    for _ in 0..5_000 {
        let u = ball.sample(&mut rng);
        assert!(u.quasi_norm() <= 2.0 + 1e-9);
        let h = ball3.sample(&mut rng);
        assert_eq!((h.x2, h.y2), (0.0, 0.0));
        assert!(h.quasi_norm() <= 2.0 + 1e-9);
        let b = boxy.sample(&mut rng);
        assert!(b.x1.abs() <= 1.0 && b.x2.abs() <= 0.5 && b.y1.abs() <= 2.0);
        assert!(b.y2.abs() <= 1.5 && b.z.abs() <= 3.0);
    }
    assert!((boxy.volume() - 32.0 * 4.5).abs() < 1e-12);
    assert!((ball.volume() - 64.0 / 180.0).abs() < 1e-15);
    assert!((ball3.volume() - 16.0 / 24.0).abs() < 1e-15);

    // Radial density check: the sub-ball of half the radius carries exactly
    // 2^-6 (resp. 2^-4) of the mass.
    let sampler = RegionSampler::new(|_| true, ball, 200_000, 9).unwrap();
    let (mean, sem) = sampler.stratified_mean(0, |u| f64::from(u.quasi_norm() < 1.0));
    assert!(
        (mean - 1.0 / 64.0).abs() <= 5.0 * sem + 1e-4,
        "five-dimensional radial mass {mean} (sem {sem})"
    );
    let sampler3 = RegionSampler::new(|_| true, ball3, 200_000, 9).unwrap();
    let (mean3, sem3) = sampler3.stratified_mean(0, |h| f64::from(h.quasi_norm() < 1.0));
    assert!(
        (mean3 - 1.0 / 16.0).abs() <= 5.0 * sem3 + 1e-4,
        "three-dimensional radial mass {mean3} (sem {sem3})"
    );
}

#[test]
fn slab_overlap_matches_the_closed_form() {
    // E = {z > 0} inside a box: translating by t flips exactly the slab
    // 0 < z <= t, of measure 16 * min(t, 2), so
    // vbar(s) = 2^-s * 16 * min(2^(2s), 2).
    let region = Region::Box { half: [1.0, 1.0, 1.0, 1.0, 2.0] };
    let sampler = RegionSampler::new(|u: ContinuousPoint| u.z > 0.0, region, 60_000, 21).unwrap();
    for s in [-2.0, -0.75, 0.0, 0.5, 1.0] {
        let (est, sem) = sampler.vbar(s).unwrap();
        let oracle = (-s).exp2() * 16.0 * (2.0 * s).exp2().min(2.0);
        assert!(
            (est - oracle).abs() <= 5.0 * sem + 1e-9,
            "s={s}: estimate {est}, oracle {oracle}, sem {sem}"
        );
        assert!(est <= region.volume() / s.exp2() * (1.0 + 1e-12));
    }
}

#[test]
fn zero_graph_has_identically_zero_perimeter() {
    let zero = IntrinsicGraphFn::zero();
    let sampler = RegionSampler::new(
        move |u| in_half_space(&zero, u),
        Region::Ball { radius: 1.0 },
        2_000,
        4,
    )
    .unwrap();
    let curve = vbar_l2(&sampler, 1.0, &CurveGrid::default()).unwrap();
    assert!(curve.vbar.iter().all(|v| *v == 0.0));
    assert!(curve.stderr.iter().all(|e| *e == 0.0));
    assert_eq!(curve.l2, curve.tail.sqrt());
}

#[test]
fn perimeter_curve_respects_bounds_and_serializes() {
    let f = IntrinsicGraphFn::new(GraphFamily::Bump { amplitude: 0.4, width: 0.8 }).unwrap();
    let sampler = RegionSampler::new(
        move |u| in_half_space(&f, u),
        Region::Ball { radius: 1.0 },
        4_000,
        31,
    )
    .unwrap();
    let curve = vbar_l2(&sampler, 1.0, &CurveGrid::default()).unwrap();
    assert!(curve.respects_trivial_bound());
    assert!(curve.l2 > 0.0 && curve.tail > 0.0);
    assert!(curve.s[0] == -10.0 && *curve.s.last().unwrap() >= curve.s_max);
    let peak = curve.vbar.iter().cloned().fold(0.0f64, f64::max);
    assert!(peak > 0.0);
    // The lower cutoff is justified: the curve has decayed to noise there.
    assert!(curve.vbar[0] <= 0.05 * peak);

    let csv = curve.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,vbar,stderr,trivial_bound");
    assert_eq!(csv.lines().count(), curve.s.len() + 1);

    let json = serde_json::to_value(&curve).unwrap();
    assert!(json.get("l2").is_some() && json.get("tail").is_some());
    assert!(json.get("seed").is_some() && json.get("comparability").is_some());
}

#[test]
fn curve_budget_exhaustion_reports_the_partial_curve() {
    let zero = IntrinsicGraphFn::zero();
    let sampler = RegionSampler::new(
        move |u| in_half_space(&zero, u),
        Region::Ball { radius: 1.0 },
        2_000,
        4,
    )
    .unwrap();
    let grid = CurveGrid { total_budget: Some(10_000), ..CurveGrid::default() };
    match vbar_l2(&sampler, 1.0, &grid) {
        Err(ContinuousError::BudgetExhausted { computed, requested, partial }) => {
            assert_eq!(computed, 5);
            assert!(requested > computed);
            assert_eq!(partial.s.len(), 5);
            assert!(partial.l2.is_finite());
        }
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
}

#[test]
fn estimator_inputs_are_validated() {
    let zero = IntrinsicGraphFn::zero();
    assert!(matches!(
        RegionSampler::new(|_| true, Region::Ball { radius: -1.0 }, 2_000, 0),
        Err(ContinuousError::BadRegion(_))
    ));
    assert!(matches!(
        RegionSampler::new(|_| true, Region::Ball { radius: 1.0 }, 10, 0),
        Err(ContinuousError::BudgetTooSmall { .. })
    ));
    let small = RegionSampler::with_streams(|_| true, Region::Ball { radius: 1.0 }, 200, 0, 8)
        .unwrap();
    assert!(matches!(small.vbar(0.0), Err(ContinuousError::BudgetTooSmall { .. })));

    let sampler =
        RegionSampler::new(|_| true, Region::Ball { radius: 1.0 }, 2_000, 0).unwrap();
    let bad_step = CurveGrid { step: 0.3, ..CurveGrid::default() };
    assert!(matches!(vbar_l2(&sampler, 1.0, &bad_step), Err(ContinuousError::BadGrid(_))));
    let bad_cut = CurveGrid { s_min: 3.0, ..CurveGrid::default() };
    assert!(matches!(vbar_l2(&sampler, 1.0, &bad_cut), Err(ContinuousError::BadGrid(_))));

    assert!(matches!(
        intrinsic_lip_estimate(&zero, &VBox::standard(), 4, 0),
        Err(ContinuousError::BudgetTooSmall { .. })
    ));
    assert!(IntrinsicGraphFn::new(GraphFamily::Bump { amplitude: 1.0, width: 0.0 }).is_err());
    assert!(VBox::new(1.0, 1.0, -1.0, 1.0).is_err());

    let unset = IntrinsicGraphFn::new(GraphFamily::Sinusoid { amplitude: 0.5, frequency: 1.0 })
        .unwrap();
    assert!(matches!(unset.inflated_lambda(), Err(ContinuousError::LambdaUnset)));
    let mut hot = unset;
    hot.set_lambda_hat(0.95);
    assert!(matches!(hot.inflated_lambda(), Err(ContinuousError::LambdaTooLarge(_))));
}

#[test]
fn doubling_the_budget_shrinks_the_error_bar_like_root_two() {
    let set = |u: ContinuousPoint| u.quasi_norm() < 1.0;
    let region = Region::Ball { radius: 1.5 };
    let coarse = RegionSampler::new(set, region, 40_000, 13).unwrap();
    let fine = RegionSampler::new(set, region, 80_000, 13).unwrap();
    let (_, sem_coarse) = coarse.vbar(-2.5).unwrap();
    let (_, sem_fine) = fine.vbar(-2.5).unwrap();
    let ratio = sem_coarse / sem_fine;
    assert!(
        (1.2..=1.7).contains(&ratio),
        "error bar ratio {ratio} (coarse {sem_coarse}, fine {sem_fine})"
    );
}

#[test]
fn perimeter_scales_like_the_fifth_power_under_dilation() {
    // With E_theta = s_theta(E) and U = B_r a quasi-ball, the substitution
    // u -> s_theta(u) sends E triangle E Z^t to its dilate with t' = theta^2 t
    // and multiplies the volume by theta^6, so
    // vbar_{B_(theta r)}(E_theta)(s + log2 theta) = theta^5 vbar_{B_r}(E)(s).
    let base_set = |u: ContinuousPoint| u.quasi_norm() < 1.0;
    let base = RegionSampler::new(base_set, Region::Ball { radius: 1.0 }, 150_000, 37).unwrap();
    for (theta, seed) in [(2.0f64, 41u64), (0.5, 43)] {
        let dilated_set = move |u: ContinuousPoint| u.scale(1.0 / theta).quasi_norm() < 1.0;
        let dilated = RegionSampler::new(
            dilated_set,
            Region::Ball { radius: theta },
            150_000,
            seed,
        )
        .unwrap();
        for s in [-3.0, -2.5, -2.0] {
            let (v1, e1) = base.vbar(s).unwrap();
            let (v2, e2) = dilated.vbar(s + theta.log2()).unwrap();
            let scale = theta.powi(5);
            let combined = (e2 * e2 + scale * scale * e1 * e1).sqrt();
            assert!(
                (v2 - scale * v1).abs() <= 3.0 * combined + 1e-12,
                "theta={theta}, s={s}: dilated {v2} vs scaled {v1} * {scale} (sigma {combined})"
            );
            assert!(v1 > 0.0, "base perimeter should be nontrivial at s={s}");
        }
    }
}

#[test]
fn slice_functions_obey_the_lipschitz_bound() {
    let domain = VBox::standard();
    let mut f =
        IntrinsicGraphFn::new(GraphFamily::Linear { a: 0.3, c: 0.1, d: 0.0, e: 0.0 }).unwrap();
    estimate_lambda(&mut f, &domain, 30_000, 3).unwrap();
    for chi in [-1.0, 0.0, 0.5] {
        let report = slice_lip_check(&f, chi, 1.0, DEFAULT_COMPARABILITY, 30_000, 5).unwrap();
        assert!(report.within_bound, "chi={chi}: {report:?}");
        assert!(report.sup_ratio > 0.0);
        assert!(report.bound > 0.0 && report.comparability == DEFAULT_COMPARABILITY);
    }
}

#[test]
fn vertical_energy_matches_the_exact_center_integrand() {
    // For psi = z the difference over Z^-t is exactly t, so the energy is
    // volume * rho^2 on the nose.
    let rho = 1.0;
    let report = psi_energy(|h| h.z, rho, 120_000, 19).unwrap();
    let volume = Region::BallH3 { radius: rho }.volume();
    let exact = volume * rho * rho;
    assert!(
        (report.lhs - exact).abs() <= 5.0 * report.stderr + 1e-9,
        "energy {} vs exact {exact} (sigma {})",
        report.lhs,
        report.stderr
    );
    assert!(report.small_t > 0.0 && report.small_t < 1e-4);
    assert!(report.lip > 0.0 && report.ratio.is_finite());
}

#[test]
fn vertical_energy_vanishes_on_horizontal_and_constant_functions() {
    let linear = psi_energy(|h| 2.0 * h.x1 - 0.5 * h.y1, 1.0, 5_000, 2).unwrap();
    assert_eq!(linear.lhs, 0.0);
    assert_eq!(linear.ratio, 0.0);
    assert!(linear.lip > 0.0);

    let constant = psi_energy(|_| 4.2, 1.0, 5_000, 2).unwrap();
    assert_eq!(constant.lhs, 0.0);
    assert_eq!(constant.ratio, 0.0);
    assert_eq!(constant.lip, 0.0);
}

#[test]
fn vertical_energy_ratio_is_stable_for_a_smooth_bump() {
    let psi = |h: ContinuousPoint| (-(h.x1 * h.x1 + h.y1 * h.y1) - h.z * h.z).exp();
    let a = psi_energy(psi, 1.0, 80_000, 23).unwrap();
    let b = psi_energy(psi, 2.0, 80_000, 23).unwrap();
    assert!(a.ratio > 0.0 && b.ratio > 0.0);
    let spread = (a.ratio / b.ratio).max(b.ratio / a.ratio);
    assert!(spread <= 4.0, "ratio spread {spread} ({} vs {})", a.ratio, b.ratio);
}

#[test]
fn sampling_is_deterministic_and_thread_independent() {
    let set = |u: ContinuousPoint| u.quasi_norm() < 1.0;
    let region = Region::Ball { radius: 1.5 };
    let mk = || RegionSampler::new(set, region, 20_000, 99).unwrap();
    let (v1, e1) = mk().vbar(-2.0).unwrap();
    let (v2, e2) = mk().vbar(-2.0).unwrap();
    assert_eq!(v1.to_bits(), v2.to_bits());
    assert_eq!(e1.to_bits(), e2.to_bits());

    // A single-thread pool must reproduce the default pool bit for bit.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (v3, e3) = pool.install(|| mk().vbar(-2.0).unwrap());
    assert_eq!(v1.to_bits(), v3.to_bits());
    assert_eq!(e1.to_bits(), e3.to_bits());

    // A different stream count is a different (legitimate) estimator.
    let other = RegionSampler::with_streams(set, region, 20_000, 99, 32).unwrap();
    let (v4, _) = other.vbar(-2.0).unwrap();
    assert_ne!(v1.to_bits(), v4.to_bits());
}
