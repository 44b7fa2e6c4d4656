//! Complex weight systems on undirected and directed edges.
//!
//! An undirected system `x` factorizes to a directed system `x->` when
//! `x_e = x->_e * x->_{-e}` on every edge. The default factorization is the
//! symmetric one through the principal square root; non-symmetric
//! factorizations matter because the spectral-radius bound depends on the
//! directed moduli only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;

/// Nonzero complex weights on the undirected edges of a graph, aligned with
/// the graph's edge order.
#[derive(Debug, Clone)]
pub struct UndirectedWeights {
    values: Vec<Complex64>,
}

impl UndirectedWeights {
    /// Weights from a per-edge function.
    pub fn from_fn(graph: &EmbeddedGraph, mut f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        let values: Vec<Complex64> = (0..graph.edge_count()).map(&mut f).collect();
        Self::from_values(graph, values)
    }

    /// Weights from an explicit vector in the graph's edge order.
    pub fn from_values(graph: &EmbeddedGraph, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::MissingWeight {
                expected: graph.edge_count(),
                got: values.len(),
            });
        }
        for (e, v) in values.iter().enumerate() {
            if v.norm() == 0.0 {
                return Err(Error::ZeroWeight(graph.edge_labels(e)));
            }
        }
        Ok(UndirectedWeights { values })
    }

    /// The same weight on every edge.
    pub fn constant(graph: &EmbeddedGraph, value: Complex64) -> Result<Self> {
        Self::from_values(graph, vec![value; graph.edge_count()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, edge: usize) -> Complex64 {
        self.values[edge]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Check that this system covers the edges of `graph`.
    pub fn check_cover(&self, graph: &EmbeddedGraph) -> Result<()> {
        if self.values.len() != graph.edge_count() {
            return Err(Error::MissingWeight {
                expected: graph.edge_count(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// The symmetric factorization: both orientations carry the principal
    /// square root of the edge weight, so the product reproduces the edge
    /// weight exactly.
    pub fn factorize_symmetric(&self, graph: &EmbeddedGraph) -> Result<DirectedWeights> {
        self.check_cover(graph)?;
        let values: Vec<Complex64> = (0..graph.dir_edge_count())
            .map(|d| self.values[graph.edge_of_dir(d)].sqrt())
            .collect();
        DirectedWeights::from_values(graph, values)
    }
}

/// Nonzero complex weights on the directed edges of a graph, aligned with
/// the canonical directed-edge order.
#[derive(Debug, Clone)]
pub struct DirectedWeights {
    values: Vec<Complex64>,
}

impl DirectedWeights {
    pub fn from_fn(graph: &EmbeddedGraph, mut f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        let values: Vec<Complex64> = (0..graph.dir_edge_count()).map(&mut f).collect();
        Self::from_values(graph, values)
    }

    pub fn from_values(graph: &EmbeddedGraph, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != graph.dir_edge_count() {
            return Err(Error::MissingWeight {
                expected: graph.dir_edge_count(),
                got: values.len(),
            });
        }
        for (d, v) in values.iter().enumerate() {
            if v.norm() == 0.0 {
                let e = graph.dir_edge(d);
                return Err(Error::ZeroWeight((
                    graph.label(e.tail),
                    graph.label(e.head),
                )));
            }
        }
        Ok(DirectedWeights { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, dir_edge: usize) -> Complex64 {
        self.values[dir_edge]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn check_cover(&self, graph: &EmbeddedGraph) -> Result<()> {
        if self.values.len() != graph.dir_edge_count() {
            return Err(Error::MissingWeight {
                expected: graph.dir_edge_count(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// The undirected system this factorization induces:
    /// `x_e = x->_e * x->_{-e}`.
    pub fn induced_undirected(&self, graph: &EmbeddedGraph) -> Result<UndirectedWeights> {
        self.check_cover(graph)?;
        let mut values = vec![Complex64::new(0.0, 0.0); graph.edge_count()];
        for d in 0..graph.dir_edge_count() {
            let e = graph.edge_of_dir(d);
            let de = graph.dir_edge(d);
            if de.tail < de.head {
                values[e] = self.values[d] * self.values[graph.reversed(d)];
            }
        }
        UndirectedWeights::from_values(graph, values)
    }

    /// Squared moduli `|x->|^2` over `Out(z)`, in canonical order.
    pub fn squared_moduli_at(&self, graph: &EmbeddedGraph, z: usize) -> Vec<f64> {
        graph
            .out_range(z)
            .map(|d| self.values[d].norm_sqr())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EmbeddedGraph;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_edge() -> EmbeddedGraph {
        EmbeddedGraph::build(&[(0, c(0.0, 0.0)), (1, c(1.0, 0.0))], &[(0, 1)], &[]).unwrap()
    }

    #[test]
    fn zero_weight_rejected() {
        let g = single_edge();
        let r = UndirectedWeights::constant(&g, c(0.0, 0.0));
        assert!(matches!(r, Err(Error::ZeroWeight(_))));
    }

    #[test]
    fn symmetric_factorization_of_positive_weight() {
        let g = single_edge();
        let x = UndirectedWeights::constant(&g, c(4.0, 0.0)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        assert_abs_diff_eq!(xd.get(0).re, 2.0);
        assert_abs_diff_eq!(xd.get(0).im, 0.0);
        assert_abs_diff_eq!(xd.get(1).re, 2.0);
    }

    #[test]
    fn symmetric_factorization_of_negative_weight_uses_principal_branch() {
        let g = single_edge();
        let x = UndirectedWeights::constant(&g, c(-1.0, 0.0)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        // Principal square root of -1 is +i on both orientations.
        assert_abs_diff_eq!(xd.get(0).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xd.get(0).im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xd.get(1).im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn factorization_of_tangent_value() {
        let g = single_edge();
        let t = (std::f64::consts::PI / 8.0).tan();
        let x = UndirectedWeights::constant(&g, c(t, 0.0)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        assert_abs_diff_eq!(xd.get(0).re, 0.643594252905582, epsilon = 1e-12);
    }

    #[test]
    fn induced_undirected_recovers_original() {
        let g = crate::graph::tests::grid(2);
        let x = UndirectedWeights::from_fn(&g, |e| c(0.3 + 0.05 * e as f64, 0.1)).unwrap();
        let xd = x.factorize_symmetric(&g).unwrap();
        let back = xd.induced_undirected(&g).unwrap();
        for e in 0..g.edge_count() {
            assert_abs_diff_eq!(back.get(e).re, x.get(e).re, epsilon = 1e-15);
            assert_abs_diff_eq!(back.get(e).im, x.get(e).im, epsilon = 1e-15);
        }
    }

    #[test]
    fn wrong_length_is_missing_weight() {
        let g = single_edge();
        let r = UndirectedWeights::from_values(&g, vec![]);
        assert!(matches!(r, Err(Error::MissingWeight { .. })));
    }
}
