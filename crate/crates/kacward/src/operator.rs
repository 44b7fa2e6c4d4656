//! The Kac-Ward transition matrices and determinant.
//!
//! All matrices are dense, complex, of dimension `2|E|`, and indexed by the
//! canonical directed-edge order of the underlying graph. Desk-scale graphs
//! keep cubic elimination cheap; sparsity is not exploited.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::Result;
use crate::graph::EmbeddedGraph;
use crate::weights::{DirectedWeights, UndirectedWeights};

/// Which matrix a [`KacWardMatrix`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Transition matrix for an undirected weight system.
    Lambda,
    /// Transition matrix conjugated by the diagonal of a factorization;
    /// similar to `Lambda` of the induced undirected system.
    ConjugatedLambda,
    /// Hermitian block matrix with one block per tail vertex; same operator
    /// norm as the conjugated transition matrix.
    BlockHermitian,
    /// The Kac-Ward operator `T = Id - Lambda`.
    Operator,
}

/// A dense complex matrix indexed by directed edges in canonical order.
#[derive(Debug, Clone)]
pub struct KacWardMatrix {
    kind: MatrixKind,
    data: Array2<Complex64>,
}

impl KacWardMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_inner(self) -> Array2<Complex64> {
        self.data
    }

    /// Plain-text dump, row major, one row per line, entries as "re im"
    /// pairs, for cross-checking with external tools.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for row in self.data.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{} {}", v.re, v.im));
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

fn half_angle_phase(graph: &EmbeddedGraph, e: usize, g: usize) -> Complex64 {
    let angle = graph
        .turning_angle(graph.dir_edge(e), graph.dir_edge(g))
        .expect("graph edges have positive length");
    Complex64::from_polar(1.0, 0.5 * angle)
}

/// The transition matrix: entry `(e, g)` equals `x_e e^{(i/2) angle(e, g)}`
/// on allowed non-backtracking transitions (`h(e) = t(g)`, `g != -e`), zero
/// elsewhere.
pub fn transition_matrix(graph: &EmbeddedGraph, x: &UndirectedWeights) -> Result<KacWardMatrix> {
    x.check_cover(graph)?;
    let n = graph.dir_edge_count();
    let mut data = Array2::zeros((n, n));
    for e in 0..n {
        let w = x.get(graph.edge_of_dir(e));
        let head = graph.dir_edge(e).head;
        let rev = graph.reversed(e);
        for g in graph.out_range(head) {
            if g == rev {
                continue;
            }
            data[(e, g)] = w * half_angle_phase(graph, e, g);
        }
    }
    Ok(KacWardMatrix {
        kind: MatrixKind::Lambda,
        data,
    })
}

/// The conjugated transition matrix for a directed weight system: entry
/// `(e, g)` equals `x->_{-e} x->_g e^{(i/2) angle(e, g)}` on allowed
/// transitions. Similar to [`transition_matrix`] of the induced undirected
/// system, so it has the same spectrum.
pub fn conjugated_transition_matrix(
    graph: &EmbeddedGraph,
    x: &DirectedWeights,
) -> Result<KacWardMatrix> {
    x.check_cover(graph)?;
    let n = graph.dir_edge_count();
    let mut data = Array2::zeros((n, n));
    for e in 0..n {
        let rev = graph.reversed(e);
        let w_rev = x.get(rev);
        let head = graph.dir_edge(e).head;
        for g in graph.out_range(head) {
            if g == rev {
                continue;
            }
            data[(e, g)] = w_rev * x.get(g) * half_angle_phase(graph, e, g);
        }
    }
    Ok(KacWardMatrix {
        kind: MatrixKind::ConjugatedLambda,
        data,
    })
}

/// The Hermitian matrix `B`: entry `(e, g)` equals
/// `|x->_e x->_g| e^{(i/2) angle(-e, g)}` for distinct directed edges with a
/// common tail, zero elsewhere. Block-diagonal over tail vertices in the
/// canonical order; its operator norm equals that of the conjugated
/// transition matrix.
///
/// Each unordered pair is computed once and mirrored by conjugation, so
/// Hermiticity holds exactly.
pub fn b_matrix(graph: &EmbeddedGraph, x: &DirectedWeights) -> Result<KacWardMatrix> {
    x.check_cover(graph)?;
    let n = graph.dir_edge_count();
    let mut data = Array2::zeros((n, n));
    for z in 0..graph.vertex_count() {
        let range = graph.out_range(z);
        for e in range.clone() {
            for g in (e + 1)..range.end {
                let modulus = (x.get(e) * x.get(g)).norm();
                let angle = graph
                    .turning_angle(graph.dir_edge(e).reversed(), graph.dir_edge(g))
                    .expect("graph edges have positive length");
                let value = modulus * Complex64::from_polar(1.0, 0.5 * angle);
                data[(e, g)] = value;
                data[(g, e)] = value.conj();
            }
        }
    }
    Ok(KacWardMatrix {
        kind: MatrixKind::BlockHermitian,
        data,
    })
}

/// The single block `B^z` of the Hermitian matrix for the tail vertex `z`,
/// as a dense `deg(z) x deg(z)` matrix in the canonical out-edge order.
pub fn b_block(graph: &EmbeddedGraph, x: &DirectedWeights, z: usize) -> Result<Array2<Complex64>> {
    x.check_cover(graph)?;
    let range = graph.out_range(z);
    let d = range.len();
    let mut block = Array2::zeros((d, d));
    for (i, e) in range.clone().enumerate() {
        for (j, g) in range.clone().enumerate().skip(i + 1) {
            let modulus = (x.get(e) * x.get(g)).norm();
            let angle = graph
                .turning_angle(graph.dir_edge(e).reversed(), graph.dir_edge(g))
                .expect("graph edges have positive length");
            let value = modulus * Complex64::from_polar(1.0, 0.5 * angle);
            block[(i, j)] = value;
            block[(j, i)] = value.conj();
        }
    }
    Ok(block)
}

/// The Kac-Ward operator `T = Id - Lambda(x)`.
pub fn kac_ward_operator(graph: &EmbeddedGraph, x: &UndirectedWeights) -> Result<KacWardMatrix> {
    let lambda = transition_matrix(graph, x)?;
    let mut data = -lambda.data;
    for i in 0..data.nrows() {
        data[(i, i)] += Complex64::new(1.0, 0.0);
    }
    Ok(KacWardMatrix {
        kind: MatrixKind::Operator,
        data,
    })
}

/// `det(Id - Lambda(x))` by pivoted elimination on the dense matrix.
pub fn kac_ward_determinant(graph: &EmbeddedGraph, x: &UndirectedWeights) -> Result<Complex64> {
    let t = kac_ward_operator(graph, x)?;
    Ok(det_lu(t.into_inner()))
}

/// Determinant of a dense complex matrix via LU elimination with partial
/// pivoting by modulus; the result is the signed product of the pivots.
pub fn det_lu(mut a: Array2<Complex64>) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant of a non-square matrix");
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot_row = k;
        let mut best = a[(k, k)].norm();
        for i in (k + 1)..n {
            let m = a[(i, k)].norm();
            if m > best {
                best = m;
                pivot_row = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != k {
            for j in 0..n {
                a.swap((k, j), (pivot_row, j));
            }
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for i in (k + 1)..n {
            let factor = a[(i, k)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let sub = factor * a[(k, j)];
                a[(i, j)] -= sub;
            }
        }
    }
    det
}

/// Log-magnitude and unit phase of a determinant computed by pivoted
/// elimination: returns `(sum of ln|pivot|, product of pivot phases)`.
/// Avoids overflow when the determinant itself would not fit in an `f64`.
pub fn ln_det_lu(mut a: Array2<Complex64>) -> (f64, Complex64) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant of a non-square matrix");
    let mut log_abs = 0.0f64;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot_row = k;
        let mut best = a[(k, k)].norm();
        for i in (k + 1)..n {
            let m = a[(i, k)].norm();
            if m > best {
                best = m;
                pivot_row = i;
            }
        }
        if best == 0.0 {
            return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        }
        if pivot_row != k {
            for j in 0..n {
                a.swap((k, j), (pivot_row, j));
            }
            phase = -phase;
        }
        let pivot = a[(k, k)];
        log_abs += pivot.norm().ln();
        phase *= pivot / pivot.norm();
        for i in (k + 1)..n {
            let factor = a[(i, k)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let sub = factor * a[(k, j)];
                a[(i, j)] -= sub;
            }
        }
    }
    (log_abs, phase)
}
