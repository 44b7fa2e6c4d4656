//! Closed-form operator norms, the xi root, contractivity, and dense
//! reference spectra.
//!
//! The operator norm of the conjugated transition matrix is `max_z xi^z`,
//! where `xi^z` is the unique nonnegative solution of
//! `sum_{e in Out(z)} arctan(|x->_e|^2 / s) = pi/2`; it also equals the
//! spectral radius of the Hermitian block `B^z`. Dense eigenvalue and
//! singular-value computations (LAPACK) serve as the independent reference
//! route everywhere a closed form is claimed.

use ndarray::Array2;
use ndarray_linalg::{EigVals, EigValsh, SVD, UPLO};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::operator::KacWardMatrix;
use crate::weights::DirectedWeights;

/// Absolute tolerance of the xi bisection.
pub const XI_TOL: f64 = 1e-12;

/// Slack below which a vertex still counts as contractive; absorbs the
/// rounding of the exact equality case of Z-invariant weights.
pub const CONTRACTIVITY_TOL: f64 = 1e-12;

/// Squared directed-weight moduli over the out-edges of one vertex.
#[derive(Debug, Clone)]
pub struct XiQuery {
    pub vertex: usize,
    squared_moduli: Vec<f64>,
}

impl XiQuery {
    /// Panics unless the list is nonempty with finite positive entries;
    /// those are type invariants, not runtime conditions.
    pub fn new(vertex: usize, squared_moduli: Vec<f64>) -> Self {
        assert!(
            !squared_moduli.is_empty(),
            "xi query needs at least one edge"
        );
        assert!(
            squared_moduli.iter().all(|&a| a.is_finite() && a > 0.0),
            "squared moduli must be finite and positive"
        );
        XiQuery {
            vertex,
            squared_moduli,
        }
    }

    /// The query for vertex `z` under the weight system `x`.
    pub fn at_vertex(graph: &EmbeddedGraph, x: &DirectedWeights, z: usize) -> Result<Self> {
        if z >= graph.vertex_count() {
            return Err(Error::UnknownVertex(z));
        }
        x.check_cover(graph)?;
        Ok(Self::new(z, x.squared_moduli_at(graph, z)))
    }

    pub fn squared_moduli(&self) -> &[f64] {
        &self.squared_moduli
    }
}

/// `Re prod_{e in Out(z)} (t + i |x->_e|^2)`, which equals the
/// characteristic polynomial `det(t Id - B^z)` of the Hermitian block.
pub fn charpoly_bz(graph: &EmbeddedGraph, x: &DirectedWeights, z: usize, t: f64) -> Result<f64> {
    let q = XiQuery::at_vertex(graph, x, z)?;
    Ok(charpoly_from_moduli(q.squared_moduli(), t))
}

/// The same characteristic polynomial from raw squared moduli.
pub fn charpoly_from_moduli(squared_moduli: &[f64], t: f64) -> f64 {
    let mut p = Complex64::new(1.0, 0.0);
    for &a in squared_moduli {
        p *= Complex64::new(t, a);
    }
    p.re
}

/// The unique `s >= 0` with `sum arctan(a_i / s) = pi/2`.
///
/// The left side decreases strictly in `s` from `d * pi/2` at zero towards
/// zero, so bisection on `[0, sum a_i]` is unconditionally convergent; the
/// bracket is validated by a sign check at run time. A single edge reaches
/// `pi/2` only in the limit `s -> 0`, so degree one returns zero exactly.
pub fn xi(query: &XiQuery) -> f64 {
    let a = query.squared_moduli();
    if a.len() == 1 {
        return 0.0;
    }
    let sum_at = |s: f64| a.iter().map(|&ai| (ai / s).atan()).sum::<f64>();
    let mut lo = 0.0f64;
    let mut hi: f64 = a.iter().sum();
    debug_assert!(sum_at(lo) > FRAC_PI_2);
    assert!(
        sum_at(hi) <= FRAC_PI_2,
        "bisection bracket violated; non-finite moduli?"
    );
    let mut iterations = 0;
    while hi - lo > XI_TOL && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if sum_at(mid) > FRAC_PI_2 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    0.5 * (lo + hi)
}

/// `xi^z` for a specific vertex of a weighted graph.
pub fn xi_at_vertex(graph: &EmbeddedGraph, x: &DirectedWeights, z: usize) -> Result<f64> {
    Ok(xi(&XiQuery::at_vertex(graph, x, z)?))
}

/// The operator norm of the conjugated transition matrix,
/// `max_z xi^z(x->)`. Depends on the moduli of the weights only.
pub fn operator_norm_conjugated(graph: &EmbeddedGraph, x: &DirectedWeights) -> Result<f64> {
    x.check_cover(graph)?;
    let mut norm = 0.0f64;
    for z in 0..graph.vertex_count() {
        norm = norm.max(xi(&XiQuery::new(z, x.squared_moduli_at(graph, z))));
    }
    Ok(norm)
}

/// Per-vertex contractivity report: `slack_z = pi/2 - sum arctan |x->_e|^2`.
#[derive(Debug, Clone)]
pub struct ContractivityReport {
    slacks: Vec<f64>,
}

impl ContractivityReport {
    pub fn slacks(&self) -> &[f64] {
        &self.slacks
    }

    pub fn slack(&self, vertex: usize) -> f64 {
        self.slacks[vertex]
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when every vertex satisfies the arctan inequality, up to
    /// [`CONTRACTIVITY_TOL`] to absorb rounding in the equality case.
    pub fn contractive(&self) -> bool {
        self.min_slack() >= -CONTRACTIVITY_TOL
    }

    /// The first vertex violating the inequality beyond tolerance, if any.
    pub fn first_violation(&self) -> Option<usize> {
        self.slacks.iter().position(|&s| s < -CONTRACTIVITY_TOL)
    }
}

/// Evaluate the contractivity condition `sum arctan |x->_e|^2 <= pi/2` at
/// every vertex; equivalent to the operator norm of the conjugated
/// transition matrix being at most one.
pub fn is_contractive(graph: &EmbeddedGraph, x: &DirectedWeights) -> Result<ContractivityReport> {
    x.check_cover(graph)?;
    let slacks = (0..graph.vertex_count())
        .map(|z| {
            let sum: f64 = x
                .squared_moduli_at(graph, z)
                .iter()
                .map(|&a| a.atan())
                .sum();
            FRAC_PI_2 - sum
        })
        .collect();
    Ok(ContractivityReport { slacks })
}

/// All eigenvalues of a dense complex matrix.
pub fn eigenvalues(m: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let vals = m
        .eigvals()
        .map_err(|e| Error::NoConvergence(e.to_string()))?;
    Ok(vals.to_vec())
}

/// Spectral radius `max |lambda|` of a dense complex matrix.
pub fn spectral_radius_dense(m: &Array2<Complex64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Spectral radius of a Kac-Ward matrix.
pub fn spectral_radius(m: &KacWardMatrix) -> Result<f64> {
    spectral_radius_dense(m.data())
}

/// Largest singular value of a dense complex matrix; the reference route
/// for operator norms.
pub fn largest_singular_value(m: &Array2<Complex64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let (_, s, _) = m
        .svd(false, false)
        .map_err(|e| Error::NoConvergence(e.to_string()))?;
    Ok(s.iter().copied().fold(0.0, f64::max))
}

/// Real spectrum of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Array2<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let vals = m
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::NoConvergence(e.to_string()))?;
    Ok(vals.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::grid;
    use crate::operator::{b_block, b_matrix, conjugated_transition_matrix, det_lu};
    use crate::weights::UndirectedWeights;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn xi_degree_one_is_zero() {
        assert_eq!(xi(&XiQuery::new(0, vec![3.7])), 0.0);
    }

    #[test]
    fn xi_degree_two_is_geometric_mean() {
        // arctan(u) + arctan(1/u) = pi/2, so s = sqrt(a b).
        for &(a, b) in &[(1.0, 1.0), (0.3, 2.5), (4.0, 0.01)] {
            let s = xi(&XiQuery::new(0, vec![a, b]));
            assert_abs_diff_eq!(s, (a * b).sqrt(), epsilon = 1e-11);
        }
    }

    #[test]
    fn xi_degree_four_equal_moduli_closed_form() {
        // 4 arctan(w/s) = pi/2 gives s = w / tan(pi/8) = w (1 + sqrt 2).
        for &w in &[0.2, 1.0, 3.5] {
            let s = xi(&XiQuery::new(0, vec![w; 4]));
            assert_abs_diff_eq!(s, w * (1.0 + 2.0f64.sqrt()), epsilon = 1e-10);
        }
    }

    #[test]
    fn xi_scales_linearly_in_squared_moduli() {
        let a = vec![0.4, 1.1, 0.7];
        let s = xi(&XiQuery::new(0, a.clone()));
        let scaled: Vec<f64> = a.iter().map(|v| 2.5 * v).collect();
        assert_abs_diff_eq!(xi(&XiQuery::new(0, scaled)), 2.5 * s, epsilon = 1e-9);
    }

    #[test]
    fn charpoly_degree_two_closed_form() {
        // Re((t + ia)(t + ib)) = t^2 - ab.
        let val = charpoly_from_moduli(&[0.7, 1.3], 2.0);
        assert_abs_diff_eq!(val, 4.0 - 0.91, epsilon = 1e-14);
    }

    #[test]
    fn charpoly_matches_block_determinant() {
        let g = grid(2);
        let x = UndirectedWeights::from_fn(&g, |e| c(0.5 + 0.07 * e as f64, 0.12)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let center = g.vertex_by_label(4).unwrap();
        assert_eq!(g.degree(center), 4);
        for &t in &[0.0, 0.4, -1.2, 2.0] {
            let closed = charpoly_bz(&g, &xd, center, t).unwrap();
            let block = b_block(&g, &xd, center).unwrap();
            let mut shifted = -block;
            for i in 0..shifted.nrows() {
                shifted[(i, i)] += Complex64::new(t, 0.0);
            }
            let det = det_lu(shifted);
            assert_abs_diff_eq!(closed, det.re, epsilon = 1e-10);
            assert_abs_diff_eq!(det.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn xi_is_spectral_radius_of_block() {
        let g = grid(3);
        let x = UndirectedWeights::from_fn(&g, |e| c(0.3 + 0.04 * e as f64, -0.2)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        for z in 0..g.vertex_count() {
            let s = xi_at_vertex(&g, &xd, z).unwrap();
            let block = b_block(&g, &xd, z).unwrap();
            let rho = hermitian_eigenvalues(&block)
                .unwrap()
                .iter()
                .map(|v| v.abs())
                .fold(0.0f64, f64::max);
            assert_abs_diff_eq!(s, rho, epsilon = 1e-9);
        }
    }

    #[test]
    fn norm_equals_largest_singular_value() {
        let g = grid(2);
        let x = UndirectedWeights::from_fn(&g, |e| c(0.45, 0.1 + 0.03 * e as f64)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let closed = operator_norm_conjugated(&g, &xd).unwrap();
        let lambda = conjugated_transition_matrix(&g, &xd).unwrap();
        let sv = largest_singular_value(lambda.data()).unwrap();
        assert_abs_diff_eq!(closed, sv, epsilon = 1e-9 * closed.max(1.0));
    }

    #[test]
    fn norm_equals_b_matrix_norm() {
        let g = grid(2);
        let x = UndirectedWeights::from_fn(&g, |e| c(0.6 - 0.02 * e as f64, 0.25)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let lambda = conjugated_transition_matrix(&g, &xd).unwrap();
        let b = b_matrix(&g, &xd).unwrap();
        let n1 = largest_singular_value(lambda.data()).unwrap();
        let n2 = largest_singular_value(b.data()).unwrap();
        assert_abs_diff_eq!(n1, n2, epsilon = 1e-9 * n1.max(1.0));
        // Hermitian: norm equals spectral radius.
        let rho = spectral_radius_dense(b.data()).unwrap();
        assert_abs_diff_eq!(n2, rho, epsilon = 1e-9 * n2.max(1.0));
    }

    #[test]
    fn zero_matrix_has_zero_radius() {
        let m: Array2<Complex64> = Array2::zeros((4, 4));
        assert_eq!(spectral_radius_dense(&m).unwrap(), 0.0);
    }

    #[test]
    fn degree_four_unit_weights_not_contractive() {
        let g = grid(2);
        let x = UndirectedWeights::constant(&g, c(1.0, 0.0)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let report = is_contractive(&g, &xd).unwrap();
        assert!(!report.contractive());
        assert!(report.first_violation().is_some());
        let center = g.vertex_by_label(4).unwrap();
        // 4 arctan(1) = pi, slack = -pi/2.
        assert_abs_diff_eq!(report.slack(center), -FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn degree_two_unit_weights_exactly_contractive() {
        let g = crate::graph::tests::unit_square();
        let x = UndirectedWeights::constant(&g, c(1.0, 0.0)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let report = is_contractive(&g, &xd).unwrap();
        assert!(report.contractive());
        for z in 0..4 {
            assert_abs_diff_eq!(report.slack(z), 0.0, epsilon = 1e-12);
        }
    }
}
