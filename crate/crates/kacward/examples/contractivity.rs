//! Contractivity reports: the arctan inequality per vertex, its slack, and
//! the Z-invariant equality case on both the graph and its dual.

use kacward::isoradial::{hexagonal_patch, square_patch, triangular_patch};
use kacward::spectral::is_contractive;
use kacward::weights::DirectedWeights;
use num_complex::Complex64;

fn main() {
    for (name, patch) in [
        ("square 3x3", square_patch(3)),
        ("triangular n=2", triangular_patch(2)),
        ("hexagonal 2x2", hexagonal_patch(2)),
    ] {
        let g = patch.graph();
        let report = is_contractive(g, &patch.zinvariant_factorization()).unwrap();
        let interior_slacks: Vec<f64> = (0..g.vertex_count())
            .filter(|&v| g.is_surrounded(v))
            .map(|v| report.slack(v))
            .collect();
        println!(
            "{name}: contractive = {}, min slack = {:.3e}, interior slacks all within {:.1e} of zero",
            report.contractive(),
            report.min_slack(),
            interior_slacks
                .iter()
                .fold(0.0f64, |acc, s| acc.max(s.abs()))
        );

        let dual_graph = patch.dual().graph();
        let dual_report =
            is_contractive(dual_graph, &patch.zinvariant_dual_factorization()).unwrap();
        println!(
            "  dual side: contractive = {}, min slack = {:.3e}",
            dual_report.contractive(),
            dual_report.min_slack()
        );
    }

    // Unit weights at a degree-4 vertex break the inequality:
    // 4 arctan(1) = pi > pi/2.
    let patch = square_patch(2);
    let g = patch.graph();
    let ones = DirectedWeights::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    let report = is_contractive(g, &ones).unwrap();
    println!(
        "\nunit weights on the square patch: contractive = {}, worst slack = {:.6}",
        report.contractive(),
        report.min_slack()
    );
}
