use heis::group::{word_ball, DiscretePoint};
use heis::perimeter::corpus::{corpus, scan, CorpusSpec};
use heis::perimeter::LatticeSet;

fn main() {
    // The singleton has 8 horizontal boundary edges and vertical perimeter
    // 2*pi/sqrt(6), the closed form of the depth series for one cell.
    let single = LatticeSet::from_points([DiscretePoint::IDENTITY]);
    let rep = single.report().unwrap();
    println!(
        "singleton: h={} v=[{:.8}, {:.8}]  (2pi/sqrt6 = {:.8})",
        rep.h_count,
        rep.v_perimeter.lo,
        rep.v_perimeter.hi,
        2.0 * std::f64::consts::PI / 6f64.sqrt()
    );

    for r in 1..=4 {
        let ball = word_ball::<DiscretePoint>(r, 50_000_000).unwrap();
        let set = LatticeSet::from_points(ball.members_within(r));
        let rep = set.report().unwrap();
        println!(
            "ball R={r}: size={:>4} h={:>5} v=[{:.2}, {:.2}] iso_ratio<= {:.4} sup_rate {} at depth {}",
            rep.size,
            rep.h_count,
            rep.v_perimeter.lo,
            rep.v_perimeter.hi,
            rep.iso_ratio.hi,
            rep.sup_rate,
            rep.sup_rate_depth
        );
    }

    // Scan the built-in corpus: balls, boxes, segments, random cellular
    // unions, tilted planes. Vertical-dominated sets keep the ratio bounded.
    let items = corpus(&CorpusSpec::default()).unwrap();
    let rows = scan(&items);
    let worst = rows
        .iter()
        .max_by(|a, b| a.ratio_hi.total_cmp(&b.ratio_hi))
        .unwrap();
    println!(
        "corpus: {} sets, max iso ratio {:.4} ({} {})",
        rows.len(),
        worst.ratio_hi,
        worst.family,
        worst.params
    );
}
