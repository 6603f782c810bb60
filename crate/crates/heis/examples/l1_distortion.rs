use heis::embed::{c1_exact, FiniteMetric};

fn k23() -> FiniteMetric {
    // Path metric of the complete bipartite graph on parts {0,1} and {2,3,4}.
    let mut d = vec![vec![2.0; 5]; 5];
    for i in 0..5 {
        d[i][i] = 0.0;
    }
    for i in 0..2 {
        for j in 2..5 {
            d[i][j] = 1.0;
            d[j][i] = 1.0;
        }
    }
    FiniteMetric::new(d).unwrap()
}

fn main() {
    // Cut-cone linear program: c1 is exact, with a primal cut measure and a
    // dual capacity/demand pair certifying optimality from both sides.
    let cert = c1_exact(&k23()).unwrap();
    println!("K_2,3: c1 = {:.12}  (4/3 = {:.12})", cert.c1, 4.0 / 3.0);
    println!("       cuts in the measure: {}", cert.cuts.cuts().len());
    cert.verify(&k23()).unwrap();
    println!("       primal and dual certificates verify");

    // The 4-cycle embeds isometrically: two coordinate cuts.
    let cycle = FiniteMetric::new(vec![
        vec![0.0, 1.0, 2.0, 1.0],
        vec![1.0, 0.0, 1.0, 2.0],
        vec![2.0, 1.0, 0.0, 1.0],
        vec![1.0, 2.0, 1.0, 0.0],
    ])
    .unwrap();
    let cert = c1_exact(&cycle).unwrap();
    println!("4-cycle: c1 = {:.12}", cert.c1);

    // Distortion is scale-invariant; the certificate simply rescales.
    let scaled = k23().scale(7.5).unwrap();
    let cert = c1_exact(&scaled).unwrap();
    println!("7.5 * K_2,3: c1 = {:.12}", cert.c1);

    // Any L1 point set comes back with distortion exactly 1.
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.5, 2.0],
        vec![3.0, 1.0],
        vec![2.0, 2.0],
    ];
    let m = FiniteMetric::from_points_l1(&pts).unwrap();
    let cert = c1_exact(&m).unwrap();
    println!("5 points in the plane with the l1 metric: c1 = {:.12}", cert.c1);
}
