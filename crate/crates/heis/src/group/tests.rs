use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_point(r: &mut ChaCha8Rng, bound: i64) -> DiscretePoint {
    DiscretePoint::new(
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
    )
}

// ── oracle: word balls by plain word enumeration ────────────────────────────
//
// Independent of the BFS and of `DiscretePoint::mul`: the group law is
// restated inline from the defining formula.

fn oracle_mul(p: [i64; 5], q: [i64; 5]) -> [i64; 5] {
    [
        p[0] + q[0],
        p[1] + q[1],
        p[2] + q[2],
        p[3] + q[3],
        p[4] + q[4] + p[0] * q[2] + p[1] * q[3],
    ]
}

fn oracle_generators() -> Vec<[i64; 5]> {
    let mut gens = Vec::new();
    for i in 0..4 {
        for s in [1i64, -1] {
            let mut g = [0i64; 5];
            g[i] = s;
            gens.push(g);
        }
    }
    gens
}

/// All products of at most `len` generators, deduplicated.
fn oracle_ball(len: usize) -> HashSet<[i64; 5]> {
    let mut reached = HashSet::new();
    reached.insert([0i64; 5]);
    let mut frontier: Vec<[i64; 5]> = vec![[0; 5]];
    for _ in 0..len {
        let mut next = Vec::new();
        for &p in &frontier {
            for &g in &oracle_generators() {
                let q = oracle_mul(p, g);
                if reached.insert(q) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    reached
}

#[test]
fn ball_matches_word_enumeration_oracle() {
    let ball = word_ball::<DiscretePoint>(3, 1 << 20).unwrap();
    for r in 0..=3usize {
        let oracle = oracle_ball(r);
        assert_eq!(ball.sizes[r] as usize, oracle.len(), "|B_{r}| mismatch");
        // Same point sets, not just same counts.
        for &[a, b, c, d, e] in &oracle {
            let p = DiscretePoint::new(a, b, c, d, e);
            assert!(ball.dist(p).unwrap() as usize <= r);
        }
    }
}

#[test]
fn ball_one_has_nine_points() {
    let ball = word_ball::<DiscretePoint>(1, 1 << 10).unwrap();
    assert_eq!(ball.len(), 9);
    assert_eq!(ball.sizes, vec![1, 9]);
}

// ── group axioms ────────────────────────────────────────────────────────────

#[test]
fn axioms_on_random_triples() {
    let mut r = rng(1);
    for _ in 0..20_000 {
        let p = rand_point(&mut r, 1_000_000);
        let q = rand_point(&mut r, 1_000_000);
        let s = rand_point(&mut r, 1_000_000);
        assert_eq!(p.mul(q).mul(s), p.mul(q.mul(s)));
        assert_eq!(p.mul(DiscretePoint::IDENTITY), p);
        assert_eq!(DiscretePoint::IDENTITY.mul(p), p);
        assert_eq!(p.mul(p.inv()), DiscretePoint::IDENTITY);
        assert_eq!(p.inv().mul(p), DiscretePoint::IDENTITY);
    }
}

#[test]
fn subgroup_law_matches_embedding() {
    let mut r = rng(2);
    for _ in 0..10_000 {
        let p = DiscretePoint3::new(
            r.gen_range(-1000..=1000),
            r.gen_range(-1000..=1000),
            r.gen_range(-1000..=1000),
        );
        let q = DiscretePoint3::new(
            r.gen_range(-1000..=1000),
            r.gen_range(-1000..=1000),
            r.gen_range(-1000..=1000),
        );
        assert_eq!(p.mul(q).embed(), p.embed().mul(q.embed()));
        assert_eq!(p.inv().embed(), p.embed().inv());
    }
}

#[test]
fn commutator_table() {
    use DiscretePoint as P;
    assert_eq!(P::X1.commutator(P::Y1), P::Z);
    assert_eq!(P::X2.commutator(P::Y2), P::Z);
    for (g, h) in [
        (P::X1, P::X2),
        (P::X1, P::Y2),
        (P::X2, P::Y1),
        (P::Y1, P::Y2),
        (P::X1, P::Z),
        (P::X2, P::Z),
        (P::Y1, P::Z),
        (P::Y2, P::Z),
    ] {
        assert_eq!(g.commutator(h), P::IDENTITY, "{g:?} and {h:?} should commute");
    }
}

#[test]
fn pow_matches_repeated_product() {
    let mut r = rng(3);
    for _ in 0..200 {
        let p = rand_point(&mut r, 50);
        let n = r.gen_range(-20i64..=20);
        let mut acc = DiscretePoint::IDENTITY;
        for _ in 0..n.abs() {
            acc = acc.mul(if n >= 0 { p } else { p.inv() });
        }
        assert_eq!(p.pow(n), acc);
    }
}

#[test]
#[should_panic(expected = "integer overflow")]
fn product_overflow_is_a_hard_error() {
    let p = DiscretePoint::new(i64::MAX / 2, 0, 0, 0, 0);
    let q = DiscretePoint::new(0, 0, i64::MAX / 2, 0, 0);
    let _ = p.mul(q);
}

// ── word metric ─────────────────────────────────────────────────────────────

#[test]
fn center_generator_is_four_steps_away() {
    assert_eq!(word_dist(DiscretePoint::Z, 1 << 20).unwrap(), 4);
}

#[test]
fn word_dist_agrees_with_ball_distances() {
    let ball = word_ball::<DiscretePoint>(4, 1 << 22).unwrap();
    let mut members = ball.members_sorted();
    members.truncate(600);
    for (p, d) in members {
        assert_eq!(word_dist(p, 1 << 22).unwrap(), d, "at {p:?}");
    }
}

#[test]
fn ball_is_symmetric_under_inverse() {
    let ball = word_ball::<DiscretePoint>(4, 1 << 22).unwrap();
    for (p, d) in ball.iter() {
        assert_eq!(ball.dist(p.inv()), Some(d));
    }
}

#[test]
fn node_budget_is_enforced() {
    match word_ball::<DiscretePoint>(10, 100) {
        Err(GroupError::NodeBudget { budget: 100, .. }) => {}
        other => panic!("expected node-budget error, got {:?}", other.map(|b| b.len())),
    }
}

#[test]
fn subgroup_ball_one_has_five_points() {
    let ball = word_ball::<DiscretePoint3>(1, 1 << 10).unwrap();
    assert_eq!(ball.len(), 5);
}

// ── packing ─────────────────────────────────────────────────────────────────

#[test]
fn pack_roundtrips() {
    let mut r = rng(4);
    for _ in 0..20_000 {
        let p = DiscretePoint::new(
            r.gen_range(-511..=511),
            r.gen_range(-511..=511),
            r.gen_range(-511..=511),
            r.gen_range(-511..=511),
            r.gen_range(-(1 << 22)..=(1 << 22)),
        );
        assert_eq!(DiscretePoint::unpack(p.pack().unwrap()), p);
        let q = DiscretePoint3::new(
            r.gen_range(-30_000..=30_000),
            r.gen_range(-30_000..=30_000),
            r.gen_range(-(1 << 30)..=(1 << 30)),
        );
        assert_eq!(DiscretePoint3::unpack(q.pack().unwrap()), q);
    }
    assert!(DiscretePoint::new(512, 0, 0, 0, 0).pack().is_err());
    assert!(DiscretePoint::new(0, 0, 0, 0, 1 << 23).pack().is_err());
}

// ── continuous model ────────────────────────────────────────────────────────

fn rand_cont(r: &mut ChaCha8Rng) -> ContinuousPoint {
    ContinuousPoint::new(
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
    )
}

#[test]
fn continuous_axioms() {
    let mut r = rng(5);
    for _ in 0..10_000 {
        let u = rand_cont(&mut r);
        let v = rand_cont(&mut r);
        let w = rand_cont(&mut r);
        let lhs = u.mul(v).mul(w);
        let rhs = u.mul(v.mul(w));
        assert!((lhs.z - rhs.z).abs() <= 1e-9 * (1.0 + lhs.z.abs()));
        assert_eq!(u.mul(ContinuousPoint::IDENTITY), u);
        let id = u.mul(u.inv());
        assert!(id.z.abs() < 1e-12 && id.x1.abs() < 1e-12);
    }
}

#[test]
fn scaling_is_an_automorphism() {
    let mut r = rng(6);
    for _ in 0..5_000 {
        let u = rand_cont(&mut r);
        let v = rand_cont(&mut r);
        let t = r.gen_range(0.1..4.0);
        let lhs = u.scale(t).mul(v.scale(t));
        let rhs = u.mul(v).scale(t);
        assert!((lhs.z - rhs.z).abs() <= 1e-9 * (1.0 + rhs.z.abs()));
        assert!((lhs.x1 - rhs.x1).abs() <= 1e-12);
        // Quasi-norm is homogeneous of degree one under the scaling.
        assert!((u.scale(t).quasi_norm() - t * u.quasi_norm()).abs() <= 1e-9);
    }
}

#[test]
fn quasi_norm_basics() {
    assert_eq!(ContinuousPoint::new(0.0, 0.0, 0.0, 0.0, 1.0).quasi_norm(), 4.0);
    assert_eq!(ContinuousPoint::IDENTITY.quasi_norm(), 0.0);
    let mut r = rng(7);
    for _ in 0..5_000 {
        let u = rand_cont(&mut r);
        let v = rand_cont(&mut r);
        // Symmetry of the quasi-distance (the quasi-norm is even).
        assert!((u.quasi_dist(v) - v.quasi_dist(u)).abs() <= 1e-9);
    }
}

#[test]
fn polarized_to_symmetric_is_a_homomorphism() {
    let mut r = rng(8);
    for _ in 0..20_000 {
        let p = rand_point(&mut r, 1_000_000);
        let q = rand_point(&mut r, 1_000_000);
        let lhs = polarized_to_symmetric(p.mul(q));
        let rhs = polarized_to_symmetric(p).mul(polarized_to_symmetric(q));
        // Integer and half-integer values in range: equality is exact.
        assert_eq!(lhs, rhs);
        assert_eq!(
            polarized_to_symmetric(p.inv()),
            polarized_to_symmetric(p).inv()
        );
    }
}

#[test]
fn try_new_rejects_non_finite() {
    assert!(ContinuousPoint::try_new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    assert!(ContinuousPoint::try_new(0.0, f64::INFINITY, 0.0, 0.0, 0.0).is_err());
    assert!(ContinuousPoint::try_new(1.0, 2.0, 3.0, 4.0, 5.0).is_ok());
}
