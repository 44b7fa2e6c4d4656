//! Scan a complex inverse-temperature grid: regime membership, envelopes,
//! the certified norm bound, and the exact spectral radius on a small patch.
//!
//! With the self-dual square-lattice coupling the certified bound crosses
//! one exactly at beta = 1 on the real axis.

use kacward::isoradial::square_patch;
use kacward::regimes::{regime_scan, ScanContext, ScanRow, Side};
use num_complex::Complex64;

fn main() {
    let patch = square_patch(2);
    let j = patch.zinvariant_couplings().unwrap();
    let base = patch.zinvariant_factorization();
    let m = j.lower_bound();
    let ctx = ScanContext {
        graph: patch.graph(),
        couplings: &j,
        base: &base,
        side: Side::High,
    };

    let mut betas = Vec::new();
    for k in 0..=12 {
        let re = 0.2 + 1.0 * k as f64 / 12.0;
        for im in [-0.15, 0.0, 0.15] {
            betas.push(Complex64::new(re, im));
        }
    }

    let rows = regime_scan(&betas, m, m, Some(&ctx));
    println!("{}", ScanRow::csv_header());
    for row in &rows {
        println!("{}", row.csv_row());
    }

    // Along the real axis the bound is exactly the tanh ratio and hits one
    // at the self-dual point.
    let at_one = regime_scan(&[Complex64::new(1.0, 0.0)], m, m, Some(&ctx));
    eprintln!(
        "\ncertified bound at beta = 1: {:.15} (equality case)",
        at_one[0].certified_bound.unwrap()
    );
}
