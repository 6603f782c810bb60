use heis::group::{word_ball, DiscretePoint, LatticePoint};
use heis::poincare::{self, compression_check, CutEmbedding, Modulus, VectorEmbedding};

fn main() {
    let ball = word_ball::<DiscretePoint>(4, 50_000_000).unwrap();
    let domain = ball.members_within(4);

    // Horizontal coordinates are 1-Lipschitz, so the vertical-difference sum
    // on the left stays far below the horizontal gradient sum on the right.
    let phi = VectorEmbedding::from_fn(domain.clone(), |p| {
        vec![p.a as f64, p.b as f64, p.c as f64, p.d as f64]
    })
    .unwrap();
    let rep = poincare::report(&phi, 4.0).unwrap();
    println!(
        "horizontal coords: lhs=[{:.4}, {:.4}] rhs={:.1} ratio={:.6}",
        rep.lhs_lo,
        rep.lhs_hi,
        rep.rhs,
        rep.ratio.unwrap()
    );

    // The central coordinate is the opposite extreme: it only moves along
    // vertical edges, which the left-hand side is built to see.
    let psi =
        VectorEmbedding::from_fn(domain.clone(), |p| vec![p.e as f64]).unwrap();
    let rep = poincare::report(&psi, 4.0).unwrap();
    println!(
        "central coord:     lhs=[{:.4}, {:.4}] rhs={:.1} ratio={:.6}",
        rep.lhs_lo,
        rep.lhs_hi,
        rep.rhs,
        rep.ratio.unwrap()
    );

    // A compression-rate audit. The Frechet embedding on anchor set B_2,
    // scaled by 1/|B_2|, is 1-Lipschitz and expands every checked pair by at
    // least d/|B_2| (the anchor at one endpoint already contributes d), so
    // it passes the audit at omega(s) = s/49. No coordinate projection
    // could: pairs differing only centrally collapse, and a nondecreasing
    // modulus cannot vanish there without vanishing below that scale too.
    let big = word_ball::<DiscretePoint>(5, 50_000_000).unwrap();
    let lookup = word_ball::<DiscretePoint>(7, 200_000_000).unwrap();
    let anchors = ball.members_within(2);
    let frechet = VectorEmbedding::from_fn(big.members_within(5), |p| {
        anchors
            .iter()
            .map(|&q| lookup.dist(p.inverse().compose(q)).unwrap() as f64 / 49.0)
            .collect()
    })
    .unwrap();
    let cut = CutEmbedding::from_vectors(&frechet);
    let omega = Modulus::linear(49.0).unwrap();
    let audit = compression_check(&cut, &omega, 2, 2.0).unwrap();
    println!(
        "compression audit: pairs={} max_upper_violation={:.3e} min_lower_ratio={:.3}",
        audit.pairs, audit.max_upper_violation, audit.min_lower_ratio
    );
    // The pass-to-integral replay block inside the report activates once the
    // radius clears 1 + gamma (about 5), where a scale n >= 1 exists.
    assert!(audit.replay.is_none());
}
