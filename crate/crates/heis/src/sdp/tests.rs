use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::embed;

fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Instance {
    let mut capacity = vec![vec![0.0; n]; n];
    let mut demand = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c: f64 = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.05..1.0) };
            let d: f64 = rng.gen_range(0.05..1.0);
            capacity[i][j] = c;
            capacity[j][i] = c;
            demand[i][j] = d;
            demand[j][i] = d;
        }
    }
    Instance::new(capacity, demand).unwrap()
}

/// Deliberately naive second opinion: walks both orientations of every
/// subset with plain summation.
fn brute_force_ratio(inst: &Instance) -> f64 {
    let n = inst.n();
    let mut best = f64::INFINITY;
    for mask in 1..(1u64 << n) - 1 {
        let mut cap = 0.0;
        let mut dem = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i < j && ((mask >> i) & 1) != ((mask >> j) & 1) {
                    cap += inst.cap(i, j);
                    dem += inst.dem(i, j);
                }
            }
        }
        if dem > 0.0 {
            best = best.min(cap / dem);
        }
    }
    best
}

fn cycle_adjacency(n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        let j = (i + 1) % n;
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    a
}

fn complete_adjacency(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect()
}

#[test]
fn instance_validation_catches_each_defect() {
    let good = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    assert!(Instance::new(good.clone(), good.clone()).is_ok());

    let short = vec![vec![0.0, 1.0], vec![1.0]];
    assert!(matches!(
        Instance::new(short, good.clone()),
        Err(SdpError::BadShape { row: 1, len: 1, n: 2 })
    ));
    let nan = vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]];
    assert!(matches!(Instance::new(nan, good.clone()), Err(SdpError::NonFinite { .. })));
    let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
    assert!(matches!(Instance::new(asym, good.clone()), Err(SdpError::Asymmetric { .. })));
    let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
    assert!(matches!(Instance::new(neg, good.clone()), Err(SdpError::Negative { .. })));
    let diag = vec![vec![3.0, 1.0], vec![1.0, 0.0]];
    assert!(matches!(Instance::new(diag, good.clone()), Err(SdpError::NonzeroDiagonal { i: 0 })));
    let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
    assert!(matches!(Instance::new(good.clone(), zero), Err(SdpError::ZeroDemand)));

    let fractional = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
    assert!(matches!(
        uniform_instance(&fractional),
        Err(SdpError::NotAdjacency { value, .. }) if value == 0.5
    ));
}

#[test]
fn instance_text_round_trips() {
    let mut rng = StdRng::seed_from_u64(11);
    let inst = random_instance(&mut rng, 5);
    let text = inst.to_text();
    let back = Instance::from_text(&text).unwrap();
    assert_eq!(inst, back);

    assert!(matches!(Instance::from_text(""), Err(SdpError::Parse(_))));
    assert!(matches!(Instance::from_text("2\n0 1\n1 0\n\n0 1"), Err(SdpError::Parse(_))));
    let trailing = format!("{text} 7");
    assert!(matches!(Instance::from_text(&trailing), Err(SdpError::Parse(_))));
}

#[test]
fn exact_optimum_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(2024);
    for trial in 0..20 {
        let n = 2 + (trial % 5);
        let inst = random_instance(&mut rng, n);
        let (value, mask) = opt_exact(&inst).unwrap();
        let oracle = brute_force_ratio(&inst);
        assert!(
            (value - oracle).abs() <= 1e-12 * oracle.max(1.0),
            "n={n} trial={trial}: enumeration {value} vs oracle {oracle}"
        );
        // The reported mask must achieve the reported value.
        let mut cap = 0.0;
        let mut dem = 0.0;
        for (i, j) in inst.pairs() {
            if (mask >> i) & 1 != (mask >> j) & 1 {
                cap += inst.cap(i, j);
                dem += inst.dem(i, j);
            }
        }
        assert!((cap / dem - value).abs() <= 1e-12 * value.max(1.0));
        assert_eq!(mask >> (n - 1), 0, "point n-1 stays outside the reported cut");
    }

    let pair = Instance::new(
        vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        vec![vec![0.0, 2.0], vec![2.0, 0.0]],
    )
    .unwrap();
    assert_eq!(opt_exact(&pair).unwrap(), (1.5, 1));
}

#[test]
fn exact_optimum_is_homogeneous() {
    let mut rng = StdRng::seed_from_u64(7);
    let inst = random_instance(&mut rng, 6);
    let (value, _) = opt_exact(&inst).unwrap();
    for kappa in [0.25, 3.0, 1e6] {
        let scaled_cap: Vec<Vec<f64>> = inst
            .capacity()
            .iter()
            .map(|r| r.iter().map(|v| kappa * v).collect())
            .collect();
        let up = Instance::new(scaled_cap, inst.demand().to_vec()).unwrap();
        let (scaled, _) = opt_exact(&up).unwrap();
        assert!((scaled - kappa * value).abs() <= 1e-12 * kappa * value);

        let scaled_dem: Vec<Vec<f64>> = inst
            .demand()
            .iter()
            .map(|r| r.iter().map(|v| kappa * v).collect())
            .collect();
        let down = Instance::new(inst.capacity().to_vec(), scaled_dem).unwrap();
        let (scaled, _) = opt_exact(&down).unwrap();
        assert!((scaled - value / kappa).abs() <= 1e-12 * value / kappa);
    }
}

#[test]
fn metric_lp_agrees_on_closed_forms() {
    // Two points: the normalization pins the single distance.
    let pair = Instance::new(
        vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        vec![vec![0.0, 2.0], vec![2.0, 0.0]],
    )
    .unwrap();
    assert!((lp_metric(&pair).unwrap() - 1.5).abs() <= 1e-9);

    // Complete graphs have capacity equal to demand, so every feasible
    // metric scores exactly 1.
    for n in [3, 4, 6] {
        let inst = uniform_instance(&complete_adjacency(n)).unwrap();
        assert!((lp_metric(&inst).unwrap() - 1.0).abs() <= 1e-9);
    }

    // The four-cycle is small enough that cut metrics exhaust the metric
    // cone, so the relaxation is tight.
    let c4 = uniform_instance(&cycle_adjacency(4)).unwrap();
    assert!((lp_metric(&c4).unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn metric_lp_lower_bounds_the_optimum() {
    let mut rng = StdRng::seed_from_u64(31);
    for trial in 0..20 {
        let n = 3 + (trial % 5);
        let inst = random_instance(&mut rng, n);
        let lp = lp_metric(&inst).unwrap();
        let (opt, _) = opt_exact(&inst).unwrap();
        assert!(lp <= opt + 1e-6, "trial {trial}: lp {lp} above opt {opt}");
        assert!(lp >= 0.0);
    }
}

#[test]
fn metric_lp_row_generation_handles_larger_instances() {
    // Past 16 points the solver switches to violated-row generation.
    let mut rng = StdRng::seed_from_u64(59);
    let inst = random_instance(&mut rng, 17);
    let lp = lp_metric(&inst).unwrap();
    let (opt, _) = opt_exact(&inst).unwrap();
    assert!(lp <= opt + 1e-6);
    assert!(lp > 0.0);

    // Doubling capacities leaves the feasible set alone, so the generated
    // rows and the vertex repeat and the value doubles.
    let doubled_cap: Vec<Vec<f64>> = inst
        .capacity()
        .iter()
        .map(|r| r.iter().map(|v| 2.0 * v).collect())
        .collect();
    let doubled = Instance::new(doubled_cap, inst.demand().to_vec()).unwrap();
    assert!((lp_metric(&doubled).unwrap() - 2.0 * lp).abs() <= 1e-9 * lp);

    // Equal capacities and demands force value 1 through the degenerate
    // case where every feasible point is optimal and only feasibility
    // drives the row generation.
    let weights = random_instance(&mut rng, 17);
    let tied = Instance::new(weights.demand().to_vec(), weights.demand().to_vec()).unwrap();
    assert!((lp_metric(&tied).unwrap() - 1.0).abs() <= 1e-8);
}

fn assert_feasible(residuals: &Residuals) {
    assert!(residuals.psd_violation <= SDP_RESIDUAL_TOL, "psd {:e}", residuals.psd_violation);
    assert!(
        residuals.triangle_violation <= SDP_RESIDUAL_TOL,
        "triangle {:e}",
        residuals.triangle_violation
    );
    assert!(
        residuals.normalization_error <= SDP_RESIDUAL_TOL,
        "normalization {:e}",
        residuals.normalization_error
    );
}

#[test]
fn sdp_matches_closed_forms() {
    let pair = Instance::new(
        vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        vec![vec![0.0, 2.0], vec![2.0, 0.0]],
    )
    .unwrap();
    let sol = sdp_neg(&pair).unwrap();
    assert!((sol.objective - 1.5).abs() <= 1e-6, "objective {}", sol.objective);
    assert_feasible(&sol.residuals);

    let triangle = uniform_instance(&complete_adjacency(3)).unwrap();
    let sol = sdp_neg(&triangle).unwrap();
    assert!((sol.objective - 1.0).abs() <= 1e-5);
    assert_feasible(&sol.residuals);
}

#[test]
fn sdp_solution_reports_match_fresh_evaluation() {
    let mut rng = StdRng::seed_from_u64(101);
    let inst = random_instance(&mut rng, 5);
    let sol = sdp_neg(&inst).unwrap();

    // The reported pieces must agree with recomputation from the Gram
    // matrix alone.
    let d = gram_distances(&sol.gram);
    for (i, j) in inst.pairs() {
        assert!((d[i][j] - sol.distances[i][j]).abs() <= 1e-15);
    }
    let objective: f64 = inst.pairs().map(|(i, j)| inst.cap(i, j) * d[i][j]).sum();
    assert!((objective - sol.objective).abs() <= 1e-12 * objective.max(1.0));
    assert!((psd_violation(&sol.gram) - sol.residuals.psd_violation).abs() <= 1e-15);

    // And the evaluators must notice planted defects.
    let mut bad = sol.gram.clone();
    bad[0][0] -= 1.0;
    assert!(psd_violation(&bad) > 0.1);
    let spike = vec![
        vec![0.0, 5.0, 1.0],
        vec![5.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ];
    assert!((max_triangle_violation(&spike) - 3.0).abs() <= 1e-15);
    assert!(normalization_error(&inst, &vec![vec![0.0; 5]; 5]) == 1.0);
}

#[test]
fn sdp_sits_between_lp_and_exact() {
    let mut rng = StdRng::seed_from_u64(303);
    for trial in 0..10 {
        let n = 3 + (trial % 5);
        let inst = random_instance(&mut rng, n);
        let lp = lp_metric(&inst).unwrap();
        let (opt, _) = opt_exact(&inst).unwrap();
        let sol = sdp_neg(&inst).unwrap();
        assert!(
            lp - 1e-5 <= sol.objective && sol.objective <= opt + 1e-5,
            "trial {trial} n={n}: lp {lp}, sdp {}, opt {opt} after {} iterations",
            sol.objective,
            sol.iterations
        );
        assert_feasible(&sol.residuals);
    }
}

#[test]
fn sdp_is_bounded_by_feasible_negative_type_metrics() {
    // Any negative-type semimetric, rescaled to demand 1, is feasible, so
    // its capacity total upper-bounds the relaxation value.
    let mut rng = StdRng::seed_from_u64(404);
    for n in [4, 6] {
        let metric = embed::random_negative_type(n, &mut rng).unwrap();
        let inst = random_instance(&mut rng, n);
        let total_dem: f64 = inst.pairs().map(|(i, j)| inst.dem(i, j) * metric.d(i, j)).sum();
        let total_cap: f64 = inst.pairs().map(|(i, j)| inst.cap(i, j) * metric.d(i, j)).sum();
        let upper = total_cap / total_dem;
        let sol = sdp_neg(&inst).unwrap();
        assert!(
            sol.objective <= upper + 1e-5,
            "n={n}: sdp {} above feasible value {upper}",
            sol.objective
        );
    }
}

#[test]
fn sdp_objective_is_permutation_invariant() {
    let mut rng = StdRng::seed_from_u64(505);
    let inst = random_instance(&mut rng, 6);
    let base = sdp_neg(&inst).unwrap().objective;
    for perm in [vec![5, 4, 3, 2, 1, 0], vec![2, 0, 4, 1, 5, 3]] {
        let permuted = inst.permuted(&perm).unwrap();
        let other = sdp_neg(&permuted).unwrap().objective;
        assert!(
            (base - other).abs() <= 1e-8,
            "permutation changed the objective: {base} vs {other}"
        );
    }
}

#[test]
fn gap_reports_cohere_and_serialize() {
    let pair = Instance::new(
        vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        vec![vec![0.0, 2.0], vec![2.0, 0.0]],
    )
    .unwrap();
    let report = integrality_gap(&pair).unwrap();
    assert_eq!(report.n, 2);
    assert_eq!(report.optimal_cut_mask, 1);
    assert!((report.gap - 1.0).abs() <= 1e-5);

    let c4 = uniform_instance(&cycle_adjacency(4)).unwrap();
    let report = integrality_gap(&c4).unwrap();
    assert_eq!(report.opt, 0.5);
    assert!(report.lp <= report.sdp + 1e-5 && report.sdp <= report.opt + 1e-5);
    assert!(report.gap >= 1.0 - 1e-5);

    let json = serde_json::to_value(&report).unwrap();
    let obj = json.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["gap", "lp", "n", "opt", "optimal_cut_mask", "residuals", "sdp"]);
    let res: Vec<_> = obj["residuals"].as_object().unwrap().keys().cloned().collect();
    for key in ["psdViolation", "triangleViolation", "normalizationError", "stationarityProxy"] {
        assert!(res.iter().any(|k| k == key), "missing residual key {key}");
    }
}

#[test]
fn empty_graph_collapses_the_whole_ladder() {
    let empty = vec![vec![0.0; 4]; 4];
    let inst = uniform_instance(&empty).unwrap();
    let report = integrality_gap(&inst).unwrap();
    assert_eq!(report.opt, 0.0);
    assert!(report.lp.abs() <= 1e-9);
    assert!(report.sdp.abs() <= 1e-6);
    assert_eq!(report.gap, 1.0);
}

#[test]
fn certificate_instances_replay_the_distortion_bound() {
    let mut rng = StdRng::seed_from_u64(606);
    for n in [4, 6] {
        let metric = embed::random_negative_type(n, &mut rng).unwrap();
        let cert = embed::gap_certificate(&metric).unwrap();
        let inst = Instance::new(cert.capacity.clone(), cert.demand.clone()).unwrap();

        // Replaying the dual instance through the exact solver must
        // reproduce at least the certified gap.
        let (opt, _) = opt_exact(&inst).unwrap();
        let cap_d: f64 = inst.pairs().map(|(i, j)| inst.cap(i, j) * metric.d(i, j)).sum();
        let dem_d: f64 = inst.pairs().map(|(i, j)| inst.dem(i, j) * metric.d(i, j)).sum();
        let relaxation = cap_d / dem_d;
        assert!(
            opt / relaxation >= cert.c1 - 1e-4,
            "n={n}: replayed gap {} below certified {}",
            opt / relaxation,
            cert.c1
        );

        // The metric itself is feasible for the relaxation, so the solver
        // cannot exceed its ratio.
        let sol = sdp_neg(&inst).unwrap();
        assert!(sol.objective <= relaxation + 1e-5);
    }
}

#[test]
fn heis_ball_reports_are_locked() {
    // Radius-1 balls are stars: the origin plus one point per signed
    // generator, at mutual distance 2. That is an isometric copy of
    // signed unit vectors in l1, so the distortion is exactly 1.
    let h3 = heis_instance(Lattice::H3, 1, Transform::Raw).unwrap();
    assert_eq!(h3.metric.n(), 5);
    assert!(h3.negative_type);
    assert!(h3.witness_value.is_none());
    assert!((h3.c1.unwrap() - 1.0).abs() <= 1e-9);
    let gap = h3.gap.as_ref().expect("five points fit every solver");
    assert!(gap.gap >= 1.0 - 1e-5);

    let h5 = heis_instance(Lattice::H5, 1, Transform::Raw).unwrap();
    assert_eq!(h5.metric.n(), 9);
    assert!(h5.negative_type);
    assert!((h5.c1.unwrap() - 1.0).abs() <= 1e-9);
    assert!(h5.instance.is_some());

    // The square-root transform keeps radius-1 balls inside negative type.
    let sqrt = heis_instance(Lattice::H3, 1, Transform::Sqrt).unwrap();
    assert!(sqrt.negative_type);
    assert!(sqrt.c1.unwrap() >= 1.0 - 1e-9);
}

#[test]
fn heis_report_stages_respect_caps_and_verdicts() {
    let report = heis_instance(Lattice::H3, 2, Transform::Raw).unwrap();
    assert_eq!(report.metric.n() > SDP_POINT_CAP, report.gap.is_none() && report.negative_type);
    assert_eq!(report.negative_type, report.witness_value.is_none());
    if let Some(c1) = report.c1 {
        assert!(c1 >= 1.0 - 1e-9);
    }
    assert_eq!(
        report.instance.is_some(),
        report.negative_type && report.metric.n() <= embed::C1_POINT_CAP
    );
}

#[test]
fn oversized_instances_are_refused() {
    let n = SDP_POINT_CAP + 1;
    let mut rng = StdRng::seed_from_u64(808);
    let inst = random_instance(&mut rng, n);
    assert!(matches!(
        sdp_neg(&inst),
        Err(SdpError::TooManyPoints { op: "sdp_neg", .. })
    ));
    let mut rng = StdRng::seed_from_u64(809);
    let big = random_instance(&mut rng, LP_POINT_CAP + 1);
    assert!(matches!(lp_metric(&big), Err(SdpError::TooManyPoints { op: "lp_metric", .. })));
    assert!(matches!(opt_exact(&big), Err(SdpError::TooManyPoints { op: "opt_exact", .. })));
}
