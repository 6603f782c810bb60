use heis::sdp::{integrality_gap, lp_metric, opt_exact, sdp_neg, Instance};

fn cycle_instance(n: usize) -> Instance {
    // Unit capacities around a cycle, unit demand between antipodes.
    let mut cap = vec![vec![0.0; n]; n];
    let mut dem = vec![vec![0.0; n]; n];
    for i in 0..n {
        let j = (i + 1) % n;
        cap[i][j] = 1.0;
        cap[j][i] = 1.0;
        let k = (i + n / 2) % n;
        dem[i][k] = 1.0;
        dem[k][i] = 1.0;
    }
    Instance::new(cap, dem).unwrap()
}

fn main() {
    // Three relaxations of sparsest cut on one instance. The LP optimizes
    // over all metrics, the SDP over negative-type metrics, the exact
    // optimum over cuts, so lp <= sdp <= opt up to solver tolerance.
    for n in [4, 6, 8] {
        let inst = cycle_instance(n);
        let lp = lp_metric(&inst).unwrap();
        let sol = sdp_neg(&inst).unwrap();
        let (opt, mask) = opt_exact(&inst).unwrap();
        println!(
            "cycle n={n}: lp={lp:.6} sdp={:.6} opt={opt:.6} cut mask {mask:#x}",
            sol.objective
        );
    }

    let inst = cycle_instance(6);
    let report = integrality_gap(&inst).unwrap();
    println!(
        "ladder on the 6-cycle: gap = opt/sdp = {:.6}, residuals psd {:.1e} triangle {:.1e}",
        report.gap, report.residuals.psd_violation, report.residuals.triangle_violation
    );

    // Relabeling the vertices must not move any value.
    let perm = [3, 0, 5, 1, 4, 2];
    let permuted = integrality_gap(&inst.permuted(&perm).unwrap()).unwrap();
    println!(
        "permuted instance: |gap difference| = {:.3e}",
        (report.gap - permuted.gap).abs()
    );
}
