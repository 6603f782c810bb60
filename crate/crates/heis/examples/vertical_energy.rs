use heis::continuous::psi_energy;
use heis::group::ContinuousPoint;

fn main() {
    // Vertical Sobolev energy of a function on the 3-dimensional subgroup:
    // squared central difference quotients, integrated over dyadic vertical
    // scales against dt/t. For psi = z the inner integrand is exactly t, so
    // the energy is volume * rho^2.
    let rho = 1.0;
    let report = psi_energy(|h: ContinuousPoint| h.z, rho, 200_000, 7).unwrap();
    let exact = rho.powi(4) / 24.0 * rho * rho;
    println!(
        "psi = z:      energy {:.6e} +- {:.1e}  (exact {:.6e})",
        report.lhs, report.stderr, exact
    );
    println!(
        "              sampled lip {:.4}, energy/bound ratio {:.4}",
        report.lip, report.ratio
    );

    // Horizontal functions are blind to central translation: zero energy.
    let report = psi_energy(|h: ContinuousPoint| 2.0 * h.x1 - h.y1, rho, 200_000, 7).unwrap();
    println!("psi = 2a - c: energy {:.6e} (identically zero)", report.lhs);

    // A smooth bump stays well inside its Lipschitz-square bound.
    for rho in [1.0, 2.0] {
        let report = psi_energy(
            |h: ContinuousPoint| (-(h.x1 * h.x1 + h.y1 * h.y1)).exp(),
            rho,
            200_000,
            7,
        )
        .unwrap();
        println!(
            "gaussian bump, rho={rho}: energy {:.4e} bound {:.4e} ratio {:.4}",
            report.lhs, report.bound, report.ratio
        );
    }
}
