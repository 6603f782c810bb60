use heis::group::{growth_exponent, word_ball, word_dist, DiscretePoint, DiscretePoint3, WordBand};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let ball = word_ball::<DiscretePoint>(12, 200_000_000).unwrap();
    println!("ball R=12 in {:?}", t0.elapsed());
    for (r, s) in ball.sizes.iter().enumerate() {
        println!("|B_{r}| = {s}");
    }
    let pts: Vec<(u32, u64)> = (6..=12).map(|r| (r, ball.sizes[r as usize])).collect();
    println!("growth exponent over [6,12]: {:.4}", growth_exponent(&pts));

    let t1 = Instant::now();
    let band = WordBand::measure(&[1, 4, 9, 16, 25, 36, 49, 64], 200_000_000).unwrap();
    println!("band in {:?}", t1.elapsed());
    for (n, d, ratio) in &band.samples {
        println!("d(0, Z^{n}) = {d}   ratio {ratio:.4}");
    }
    println!("beta={:.4} gamma={:.4} gamma/beta={:.4}", band.beta, band.gamma, band.gamma / band.beta);

    let b3 = word_ball::<DiscretePoint3>(12, 200_000_000).unwrap();
    println!("H3 sizes: {:?}", b3.sizes);
    println!("d3(0,Z)={}", word_dist(DiscretePoint3::Z, 1 << 22).unwrap());
}
