use heis::continuous::{vbar_l2, CurveGrid, Region, RegionSampler};
use heis::group::ContinuousPoint;

fn main() {
    // Vertical perimeter of the upper half-space {z > 0} seen through a
    // quasi-norm ball: overlap of the set with its own vertical translate,
    // one dyadic scale per grid point.
    let sampler = RegionSampler::new(
        |u: ContinuousPoint| u.z > 0.0,
        Region::Ball { radius: 1.0 },
        20_000,
        7,
    )
    .unwrap();
    for s in [-6.0, -4.0, -2.0, 0.0, 1.0] {
        let (v, err) = sampler.vbar(s).unwrap();
        println!("s={s:>4}: vbar={v:.6} +- {err:.6}");
    }

    let grid = CurveGrid { s_min: -8.0, ..CurveGrid::default() };
    let curve = vbar_l2(&sampler, 1.0, &grid).unwrap();
    println!(
        "curve: {} points on [{}, {}], l2={:.6} +- {:.6}, closed-form tail {:.3e}",
        curve.s.len(),
        curve.s[0],
        curve.s_max,
        curve.l2,
        curve.l2_stderr,
        curve.tail
    );
    assert!(curve.respects_trivial_bound());

    // Dilation acts on sets by scaling horizontals by theta and the center
    // by theta^2; vertical perimeter picks up theta^5 with a shift of the
    // scale parameter by log2(theta).
    let theta: f64 = 2.0;
    let small = RegionSampler::new(
        |u: ContinuousPoint| u.quasi_norm() < 0.8,
        Region::Ball { radius: 1.0 },
        400_000,
        11,
    )
    .unwrap();
    let big = RegionSampler::new(
        move |u: ContinuousPoint| u.scale(1.0 / theta).quasi_norm() < 0.8,
        Region::Ball { radius: 2.0 },
        400_000,
        11,
    )
    .unwrap();
    let s = -2.0;
    let (v1, e1) = small.vbar(s).unwrap();
    let (v2, e2) = big.vbar(s + theta.log2()).unwrap();
    println!(
        "dilation by {theta}: vbar ratio {:.4} (exact 32), errors {:.1e} / {:.1e}",
        v2 / v1,
        e1,
        e2
    );
}
