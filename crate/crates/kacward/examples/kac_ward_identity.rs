//! The determinant identities against brute-force enumeration: the squared
//! partition function equals a prefactor times det(Id - Lambda), with the
//! high-temperature weights on the graph for free boundary conditions and
//! the low-temperature weights on the dual subtiling for plus boundary
//! conditions.

use kacward::ising::{
    partition_bruteforce, partition_free_kw, partition_plus_kw, BoundaryCondition, CouplingSystem,
};
use kacward::isoradial::square_patch;
use num_complex::Complex64;

fn main() {
    let patch = square_patch(2);
    let sub = patch.subtiling();
    let j = CouplingSystem::constant(sub.graph(), 1.0).expect("positive couplings");

    println!("2x2 square patch, J = 1, free boundary conditions");
    println!(
        "{:>24} {:>24} {:>12}",
        "Z^2 brute", "Z^2 determinant", "rel err"
    );
    for &beta in &[
        Complex64::new(0.3, 0.0),
        Complex64::new(0.8, 0.0),
        Complex64::new(0.6, 0.25),
        Complex64::new(1.4, -0.2),
    ] {
        let z = partition_bruteforce(&sub, &j, beta, BoundaryCondition::Free).unwrap();
        let z2 = partition_free_kw(&sub, &j, beta).unwrap();
        let rel = (z * z - z2).norm() / z2.norm();
        println!(
            "beta = {beta:>10}: {:>24.12e} {:>24.12e} {rel:>12.2e}",
            (z * z).norm(),
            z2.norm()
        );
        assert!(rel < 1e-9);
    }

    println!("\nsame patch, plus boundary conditions (dual subtiling route)");
    for &beta in &[Complex64::new(1.2, 0.0), Complex64::new(0.4, 0.1)] {
        let z = partition_bruteforce(&sub, &j, beta, BoundaryCondition::Plus).unwrap();
        let z2 = partition_plus_kw(&sub, patch.dual(), &j, beta).unwrap();
        let rel = (z * z - z2).norm() / z2.norm();
        println!(
            "beta = {beta:>10}: {:>24.12e} {:>24.12e} {rel:>12.2e}",
            (z * z).norm(),
            z2.norm()
        );
        assert!(rel < 1e-9);
    }
    println!("\nboth identities hold to machine precision at desk scale");
}
