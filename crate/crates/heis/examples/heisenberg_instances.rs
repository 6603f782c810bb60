use heis::sdp::{heis_instance, Lattice, Transform};

fn main() {
    // Word-ball pipeline: build the ball metric, test negative type, then
    // run as much of the distortion / relaxation ladder as the caps allow.
    let cases = [
        (Lattice::H3, 1, Transform::Raw),
        (Lattice::H5, 1, Transform::Raw),
        (Lattice::H3, 2, Transform::Raw),
        (Lattice::H3, 1, Transform::Sqrt),
        (Lattice::H5, 1, Transform::Sqrt),
        (Lattice::H3, 2, Transform::Snowflake(0.7)),
    ];
    for (lattice, radius, transform) in cases {
        let rep = heis_instance(lattice, radius, transform).unwrap();
        print!(
            "{:?} R={radius} {:?}: n={} negative_type={}",
            lattice,
            transform,
            rep.metric.n(),
            rep.negative_type
        );
        if let Some(w) = rep.witness_value {
            print!(" witness={w:.4}");
        }
        if let Some(c1) = rep.c1 {
            print!(" c1={c1:.6}");
        }
        if let Some(gap) = &rep.gap {
            print!(" lp={:.4} sdp={:.4} opt={:.4} gap={:.4}", gap.lp, gap.sdp, gap.opt, gap.gap);
        }
        println!();
    }
    // Radius-1 balls are stars: one center, the rest equidistant leaves.
    // Stars embed in l1 isometrically, so c1 = 1 and the gap collapses.
    // Larger raw balls are still negative type at these radii; the witness
    // hunt belongs to the snowflaked and scaled-up regimes.
}
