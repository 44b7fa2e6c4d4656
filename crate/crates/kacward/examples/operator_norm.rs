//! The closed-form operator norm of the conjugated transition matrix:
//! max_z xi^z, where xi^z solves sum arctan(|x->|^2 / s) = pi/2, checked
//! against dense singular values.

use kacward::isoradial::square_patch;
use kacward::operator::conjugated_transition_matrix;
use kacward::spectral::{largest_singular_value, operator_norm_conjugated, xi, XiQuery};
use kacward::weights::DirectedWeights;
use num_complex::Complex64;

fn main() {
    println!("xi for a degree-2 vertex with squared moduli (a, b) is sqrt(ab):");
    for (a, b) in [(1.0, 1.0), (0.3, 2.5), (4.0, 0.01)] {
        let s = xi(&XiQuery::new(0, vec![a, b]));
        println!(
            "  a = {a:<4} b = {b:<4}: xi = {s:.12}  sqrt(ab) = {:.12}",
            (a * b).sqrt()
        );
    }

    println!("\nxi for a degree-4 vertex with equal squared moduli w is w (1 + sqrt 2):");
    for w in [0.25, 1.0, 2.0] {
        let s = xi(&XiQuery::new(0, vec![w; 4]));
        println!(
            "  w = {w:<4}: xi = {s:.12}  closed form = {:.12}",
            w * (1.0 + 2.0f64.sqrt())
        );
    }

    // On a weighted patch, max_z xi^z equals the largest singular value of
    // the conjugated transition matrix.
    let patch = square_patch(2);
    let g = patch.graph();
    println!("\n2x2 square patch with synthetic directed weights:");
    for seed in 0..3u64 {
        let xd = DirectedWeights::from_fn(g, |d| {
            let k = (d as u64 + 11 * seed) as f64;
            Complex64::from_polar(0.3 + 0.05 * (k % 9.0), 0.7 * (k % 6.0) - 2.0)
        })
        .unwrap();
        let closed = operator_norm_conjugated(g, &xd).unwrap();
        let lambda = conjugated_transition_matrix(g, &xd).unwrap();
        let sv = largest_singular_value(lambda.data()).unwrap();
        println!("  draw {seed}: max_z xi^z = {closed:.12}, largest singular value = {sv:.12}");
        assert!((closed - sv).abs() < 1e-9 * closed.max(1.0));
    }

    // Unit weights on the square lattice: every interior vertex gives the
    // degree-4 closed form, so the norm is 1 + sqrt 2.
    let ones = DirectedWeights::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    let norm = operator_norm_conjugated(g, &ones).unwrap();
    println!(
        "\nunit weights on the 2x2 patch: norm = {norm:.12} (1 + sqrt 2 = {:.12})",
        1.0 + 2.0f64.sqrt()
    );
}
