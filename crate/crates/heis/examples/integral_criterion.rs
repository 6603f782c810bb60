use heis::poincare::{integral_criterion, integral_criterion_limit, Modulus};

fn main() {
    // omega(s) = s integrates to ln(c R): grows without bound, so the
    // identity modulus cannot be a compression rate at every scale.
    let id = Modulus::linear(1.0).unwrap();
    for r in [std::f64::consts::E / 0.25, 100.0, 1e6] {
        let v = integral_criterion(&id, r, 0.25).unwrap();
        println!("omega(s)=s     R={r:<12.4e} integral={v:.8}");
    }
    println!(
        "omega(s)=s     limit: {:?}",
        integral_criterion_limit(&id, 1e-9).map(|i| (i.lo, i.hi))
    );

    // Any polynomial loss omega(s) = s^(1-eps) converges to 1/(2 eps).
    for eps in [0.1, 0.25, 0.5] {
        let omega = Modulus::power(eps, 1.0).unwrap();
        let lim = integral_criterion_limit(&omega, 1e-9).unwrap();
        println!(
            "omega(s)=s^{:.2} limit=[{:.8}, {:.8}]  (1/(2eps) = {:.8})",
            1.0 - eps,
            lim.lo,
            lim.hi,
            1.0 / (2.0 * eps)
        );
    }

    // Scaled linear moduli pick up the 1/D^2 factor.
    for d in [2.0, 4.0] {
        let omega = Modulus::linear(d).unwrap();
        let v = integral_criterion(&omega, 100.0, 0.25).unwrap();
        println!(
            "omega(s)=s/{d}   R=100 integral={v:.8}  (ln(25)/D^2 = {:.8})",
            (25f64).ln() / (d * d)
        );
    }
}
