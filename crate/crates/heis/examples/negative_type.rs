use heis::embed::{is_negative_type, random_negative_type, sqrt_embed, FiniteMetric, NegativeType};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // Random negative-type metrics come from squared Euclidean distances, so
    // Schoenberg's eigenvalue test accepts them and the square-root embedding
    // reproduces every distance as a squared norm.
    let m = random_negative_type(7, &mut rng).unwrap();
    match is_negative_type(&m) {
        NegativeType::Yes => println!("random 7-point metric: negative type"),
        NegativeType::No { value, .. } => panic!("unexpected witness {value}"),
    }
    let points = sqrt_embed(&m).unwrap();
    let mut max_err: f64 = 0.0;
    for (i, j) in m.pairs() {
        let sq: f64 =
            points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        max_err = max_err.max((sq - m.d(i, j)).abs());
    }
    println!("sqrt embedding reproduces distances up to {max_err:.3e}");

    // The K_2,3 path metric is the smallest classical failure: the witness
    // is a mean-zero vector whose quadratic form comes out positive.
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
    let k23 = FiniteMetric::new(d).unwrap();
    match is_negative_type(&k23) {
        NegativeType::No { witness, value } => {
            println!("K_2,3: not negative type, witness form value {value:.6}");
            println!("       witness {witness:?}");
            println!("       witness coordinate sum {:.2e}", witness.iter().sum::<f64>());
        }
        NegativeType::Yes => panic!("K_2,3 must fail"),
    }

    // Snowflaking repairs it: every metric raised to the 1/2 power is of
    // negative type.
    let repaired = k23.snowflake(0.5).unwrap();
    match is_negative_type(&repaired) {
        NegativeType::Yes => println!("sqrt(K_2,3): negative type"),
        NegativeType::No { value, .. } => panic!("unexpected witness {value}"),
    }
}
