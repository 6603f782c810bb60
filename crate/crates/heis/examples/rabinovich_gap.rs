use heis::embed::{c1_exact, gap_certificate, random_negative_type};
use heis::sdp::{integrality_gap, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // Duality route from distortion to integrality gaps: a negative-type
    // metric with c1 > 1 yields a capacity/demand pair whose sparsest-cut
    // relaxation ladder has gap at least the certified lower bound.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..5 {
        let m = random_negative_type(7, &mut rng).unwrap();
        let c1 = c1_exact(&m).unwrap().c1;
        let cert = gap_certificate(&m).unwrap();
        println!(
            "trial {trial}: c1 = {:.6}, certified gap lower bound = {:.6}",
            c1, cert.gap_lower_bound
        );

        let inst = Instance::new(cert.capacity.clone(), cert.demand.clone()).unwrap();
        let ladder = integrality_gap(&inst).unwrap();
        println!(
            "         ladder: lp={:.6} sdp={:.6} opt={:.6} gap={:.6}",
            ladder.lp, ladder.sdp, ladder.opt, ladder.gap
        );
        assert!(
            ladder.gap >= cert.gap_lower_bound - 1e-6,
            "the realized gap must dominate the certificate"
        );
    }
}
