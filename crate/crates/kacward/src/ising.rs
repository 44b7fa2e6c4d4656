//! Ising partition functions and free energy densities.
//!
//! Three routes to the same numbers, kept deliberately independent so they
//! can cross-check each other at desk scale:
//!
//! * brute-force enumeration over spin configurations,
//! * determinant identities through the Kac-Ward operator, for free
//!   boundary conditions on the graph itself and for plus boundary
//!   conditions on the dual subtiling,
//! * the trace power series of `ln det(Id - Lambda)`, valid whenever the
//!   transition matrix is certified to have norm below one, which is what
//!   extends the free energy analytically to complex inverse temperature.

use ndarray::Array2;
use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{dual_subtiling, DualEmbedding, EmbeddedGraph, Subtiling};
use crate::numeric::{cosh_right_half_plane, ln_cosh_principal, tanh_c};
use crate::operator::{det_lu, kac_ward_determinant, kac_ward_operator, transition_matrix};
use crate::spectral::operator_norm_conjugated;
use crate::weights::UndirectedWeights;

/// Largest number of free spins enumerated by the brute-force oracle.
pub const BRUTE_FORCE_SPIN_LIMIT: usize = 24;

/// Largest cycle-space dimension enumerated by the even-subgraph oracle.
pub const CYCLE_SPACE_LIMIT: usize = 24;

/// Ferromagnetic coupling constants on the edges of a graph, together with
/// bounds `0 < m <= J_e <= M`.
#[derive(Debug, Clone)]
pub struct CouplingSystem {
    values: Vec<f64>,
    lower: f64,
    upper: f64,
}

impl CouplingSystem {
    /// Couplings from explicit per-edge values; the bounds are the observed
    /// minimum and maximum.
    pub fn from_values(graph: &EmbeddedGraph, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::CouplingBounds("graph has no edges".into()));
        }
        if values.len() != graph.edge_count() {
            return Err(Error::MissingWeight {
                expected: graph.edge_count(),
                got: values.len(),
            });
        }
        if let Some(e) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::CouplingBounds(format!(
                "coupling on edge ({}, {}) is {}, not a positive real",
                graph.edge_labels(e).0,
                graph.edge_labels(e).1,
                values[e]
            )));
        }
        let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = values.iter().copied().fold(0.0f64, f64::max);
        Ok(CouplingSystem {
            values,
            lower,
            upper,
        })
    }

    /// Couplings with explicitly declared bounds, validated against the values.
    pub fn with_bounds(
        graph: &EmbeddedGraph,
        values: Vec<f64>,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let mut system = Self::from_values(graph, values)?;
        if !(lower > 0.0 && lower <= system.lower && system.upper <= upper) {
            return Err(Error::CouplingBounds(format!(
                "declared bounds [{lower}, {upper}] do not contain the values [{}, {}]",
                system.lower, system.upper
            )));
        }
        system.lower = lower;
        system.upper = upper;
        Ok(system)
    }

    pub fn constant(graph: &EmbeddedGraph, j: f64) -> Result<Self> {
        Self::from_values(graph, vec![j; graph.edge_count()])
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The lower coupling bound `m`.
    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    /// The upper coupling bound `M`.
    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Boundary conditions for the Ising measure on a subtiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Free,
    Plus,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Free => write!(f, "free"),
            BoundaryCondition::Plus => write!(f, "plus"),
        }
    }
}

/// An assignment of +/-1 spins to the vertices of a graph.
#[derive(Debug, Clone)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfiguration { spins }
    }

    pub fn spin(&self, v: usize) -> i8 {
        self.spins[v]
    }

    /// True when every boundary vertex of `sub` carries spin +1.
    pub fn satisfies_plus_bc(&self, sub: &Subtiling) -> bool {
        (0..self.spins.len()).all(|v| !sub.is_boundary(v) || self.spins[v] == 1)
    }

    /// The interaction energy `sum_e J_e sigma_a sigma_b`.
    pub fn energy(&self, graph: &EmbeddedGraph, j: &CouplingSystem) -> f64 {
        (0..graph.edge_count())
            .map(|e| {
                let (a, b) = graph.edge_endpoints(e);
                j.get(e) * f64::from(self.spins[a] * self.spins[b])
            })
            .sum()
    }
}

/// The high-temperature weight system `tanh(beta J_e)` on the edges of a graph.
pub fn high_temperature_weights(
    graph: &EmbeddedGraph,
    j: &CouplingSystem,
    beta: Complex64,
) -> Result<UndirectedWeights> {
    if beta.re <= 0.0 {
        return Err(Error::InvalidBeta {
            beta,
            reason: "tanh(beta J) weights need Re beta > 0",
        });
    }
    UndirectedWeights::from_fn(graph, |e| tanh_c(beta * j.get(e)))
}

/// The low-temperature weight system `exp(-2 beta J_e)` on the dual
/// subtiling of `sub`: the weight of a dual edge is taken from its paired
/// primal edge of the subtiling.
pub fn low_temperature_weights(
    sub: &Subtiling,
    dual: &DualEmbedding,
    dual_sub: &Subtiling,
    j: &CouplingSystem,
    beta: Complex64,
) -> Result<UndirectedWeights> {
    UndirectedWeights::from_fn(dual_sub.graph(), |e| {
        let amb_dual = dual_sub.ambient_edge(e);
        let primal_amb = dual.primal_edge_of_dual(amb_dual);
        let local = sub
            .local_edge_of_ambient(primal_amb)
            .expect("dual subtiling edges pair with subtiling edges");
        (-2.0 * beta * j.get(local)).exp()
    })
}

/// Partition function by direct enumeration: the sum over spin
/// configurations of `prod_e exp(beta J_e sigma_a sigma_b)`.
///
/// Free boundary conditions sum over all `2^|V|` configurations; plus
/// boundary conditions pin the boundary of `sub` to +1 and sum over the
/// interior. The sum is entire in `beta`.
pub fn partition_bruteforce(
    sub: &Subtiling,
    j: &CouplingSystem,
    beta: Complex64,
    bc: BoundaryCondition,
) -> Result<Complex64> {
    let graph = sub.graph();
    if j.values().len() != graph.edge_count() {
        return Err(Error::MissingWeight {
            expected: graph.edge_count(),
            got: j.values().len(),
        });
    }

    // Map each free vertex to a bit; pinned vertices contribute +1.
    let mut bit_of_vertex: Vec<Option<u32>> = vec![None; graph.vertex_count()];
    let mut free_count = 0u32;
    for v in 0..graph.vertex_count() {
        let pinned = bc == BoundaryCondition::Plus && sub.is_boundary(v);
        if !pinned {
            bit_of_vertex[v] = Some(free_count);
            free_count += 1;
        }
    }
    if free_count as usize > BRUTE_FORCE_SPIN_LIMIT {
        return Err(Error::TooLarge {
            what: "free spins",
            limit: BRUTE_FORCE_SPIN_LIMIT,
            got: free_count as usize,
        });
    }

    let edges: Vec<(Option<u32>, Option<u32>, f64)> = (0..graph.edge_count())
        .map(|e| {
            let (a, b) = graph.edge_endpoints(e);
            (bit_of_vertex[a], bit_of_vertex[b], j.get(e))
        })
        .collect();

    let mut z = Complex64::new(0.0, 0.0);
    for config in 0u64..(1u64 << free_count) {
        let spin = |bit: Option<u32>| -> f64 {
            match bit {
                Some(k) => 1.0 - 2.0 * ((config >> k) & 1) as f64,
                None => 1.0,
            }
        };
        let mut energy = 0.0;
        for &(a, b, coupling) in &edges {
            energy += coupling * spin(a) * spin(b);
        }
        z += (beta * energy).exp();
    }
    Ok(z)
}

/// The even-subgraph generating function: the sum over all even edge
/// subsets of the product of their weights, enumerated through a
/// cycle-space basis so the work is `2^(|E| - |V| + c)` instead of `2^|E|`.
pub fn even_subgraph_gf(graph: &EmbeddedGraph, w: &UndirectedWeights) -> Result<Complex64> {
    w.check_cover(graph)?;
    if graph.edge_count() > 128 {
        return Err(Error::TooLarge {
            what: "edges (bitmask enumeration)",
            limit: 128,
            got: graph.edge_count(),
        });
    }
    let basis = cycle_space_basis(graph);
    if basis.len() > CYCLE_SPACE_LIMIT {
        return Err(Error::TooLarge {
            what: "cycle-space dimension",
            limit: CYCLE_SPACE_LIMIT,
            got: basis.len(),
        });
    }

    let mut gf = Complex64::new(1.0, 0.0); // the empty subgraph
    let mut mask: u128 = 0;
    let mut prev_gray = 0u32;
    for k in 1u32..(1u32 << basis.len()) {
        let gray = k ^ (k >> 1);
        let toggled = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        mask ^= basis[toggled];
        let mut product = Complex64::new(1.0, 0.0);
        let mut bits = mask;
        while bits != 0 {
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            product *= w.get(e);
        }
        gf += product;
    }
    Ok(gf)
}

/// Fundamental cycles of a spanning forest, as edge bitmasks.
fn cycle_space_basis(graph: &EmbeddedGraph) -> Vec<u128> {
    let n = graph.vertex_count();
    let mut visited = vec![false; n];
    let mut depth = vec![0usize; n];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (vertex, edge)
    let mut tree_edge = vec![false; graph.edge_count()];

    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for e in graph.out_edges(v).expect("valid vertex") {
                let w = e.head;
                if visited[w] {
                    continue;
                }
                let edge = graph.edge_index_of(v, w).expect("edge exists");
                visited[w] = true;
                depth[w] = depth[v] + 1;
                parent[w] = Some((v, edge));
                tree_edge[edge] = true;
                queue.push_back(w);
            }
        }
    }

    let mut basis = Vec::new();
    for e in 0..graph.edge_count() {
        if tree_edge[e] {
            continue;
        }
        let (mut a, mut b) = graph.edge_endpoints(e);
        let mut mask: u128 = 1u128 << e;
        while depth[a] > depth[b] {
            let (p, pe) = parent[a].expect("non-root has a parent");
            mask ^= 1u128 << pe;
            a = p;
        }
        while depth[b] > depth[a] {
            let (p, pe) = parent[b].expect("non-root has a parent");
            mask ^= 1u128 << pe;
            b = p;
        }
        while a != b {
            let (pa, pea) = parent[a].expect("non-root has a parent");
            let (pb, peb) = parent[b].expect("non-root has a parent");
            mask ^= 1u128 << pea;
            mask ^= 1u128 << peb;
            a = pa;
            b = pb;
        }
        basis.push(mask);
    }
    basis
}

/// The squared free-boundary partition function through the Kac-Ward
/// determinant:
/// `Z^2 = 2^{2|V|} prod_e cosh^2(beta J_e) det(Id - Lambda(tanh beta J))`.
///
/// Only the square is determined; see [`partition_free_z`] for the positive
/// root at real `beta`.
pub fn partition_free_kw(
    sub: &Subtiling,
    j: &CouplingSystem,
    beta: Complex64,
) -> Result<Complex64> {
    let graph = sub.graph();
    let weights = high_temperature_weights(graph, j, beta)?;
    let det = kac_ward_determinant(graph, &weights)?;
    let mut prefactor = Complex64::new(2.0f64.powi(2 * graph.vertex_count() as i32), 0.0);
    for e in 0..graph.edge_count() {
        let ch = (beta * j.get(e)).cosh();
        prefactor *= ch * ch;
    }
    Ok(prefactor * det)
}

/// The free-boundary partition function itself at real `beta > 0`, i.e. the
/// positive square root of [`partition_free_kw`].
pub fn partition_free_z(sub: &Subtiling, j: &CouplingSystem, beta: f64) -> Result<f64> {
    let z2 = partition_free_kw(sub, j, Complex64::new(beta, 0.0))?;
    debug_assert!(z2.re > 0.0, "squared partition function must be positive");
    Ok(z2.re.sqrt())
}

/// The squared plus-boundary partition function through the dual subtiling:
/// `Z+^2 = exp(2 beta sum_e J_e) det(Id - Lambda_{G*}(exp(-2 beta J)))`.
///
/// Errors with [`Error::EmptyInterior`] when the subtiling has no interior
/// vertices, in which case the determinant factor would be trivially one.
pub fn partition_plus_kw(
    sub: &Subtiling,
    dual: &DualEmbedding,
    j: &CouplingSystem,
    beta: Complex64,
) -> Result<Complex64> {
    let dual_sub = dual_subtiling(sub, dual)?;
    if dual_sub.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let weights = low_temperature_weights(sub, dual, &dual_sub, j, beta)?;
    let det = kac_ward_determinant(dual_sub.graph(), &weights)?;
    let prefactor = (2.0 * beta * j.total()).exp();
    Ok(prefactor * det)
}

/// How a free energy value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeEnergyMethod {
    Brute,
    Determinant,
    TraceSeries,
}

impl fmt::Display for FreeEnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeEnergyMethod::Brute => write!(f, "brute"),
            FreeEnergyMethod::Determinant => write!(f, "determinant"),
            FreeEnergyMethod::TraceSeries => write!(f, "trace-series"),
        }
    }
}

/// A free energy density value `f = -ln Z / (beta |V|)` with provenance.
#[derive(Debug, Clone)]
pub struct FreeEnergyResult {
    pub beta: Complex64,
    pub value: Complex64,
    pub method: FreeEnergyMethod,
    /// Bound on the truncated tail of the `ln det` trace series; present
    /// exactly when `method` is [`FreeEnergyMethod::TraceSeries`].
    pub truncation_error: Option<f64>,
}

impl FreeEnergyResult {
    pub fn csv_header() -> &'static str {
        "graph_id,n_vertices,n_edges,bc,re_beta,im_beta,method,re_f,im_f,tail_bound"
    }

    pub fn csv_row(
        &self,
        graph_id: &str,
        n_vertices: usize,
        n_edges: usize,
        bc: BoundaryCondition,
    ) -> String {
        let tail = self
            .truncation_error
            .map(|t| t.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            graph_id,
            n_vertices,
            n_edges,
            bc,
            self.beta.re,
            self.beta.im,
            self.method,
            self.value.re,
            self.value.im,
            tail
        )
    }
}

/// Result of summing the trace power series for `ln det(Id - Lambda)`.
#[derive(Debug, Clone)]
pub struct TraceSeriesLnDet {
    pub value: Complex64,
    pub tail_bound: f64,
    pub cutoff: usize,
}

/// `ln det(Id - Lambda) = -sum_{r>=1} tr(Lambda^r) / r`, truncated once the
/// tail bound `2|E| s^{R+1} / ((R+1)(1 - s))` drops below `tol`, where `s`
/// is a certified bound on the operator norm of `Lambda`.
///
/// This is the analytic branch that tends to zero with the weights; its
/// imaginary part is free to leave the principal interval.
pub fn trace_series_ln_det(
    lambda: &Array2<Complex64>,
    norm_bound: f64,
    tol: f64,
) -> Result<TraceSeriesLnDet> {
    if !(norm_bound < 1.0) {
        return Err(Error::NotInRegime { norm: norm_bound });
    }
    let n = lambda.nrows() as f64;
    let tail =
        |r: usize| n * norm_bound.powi(r as i32 + 1) / ((r as f64 + 1.0) * (1.0 - norm_bound));
    let mut power = lambda.clone();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut r = 1usize;
    loop {
        let trace = power.diag().sum();
        acc -= trace / r as f64;
        if tail(r) < tol {
            break;
        }
        if r > 100_000 {
            return Err(Error::NoConvergence(format!(
                "trace series still above tolerance after {r} terms at norm bound {norm_bound}"
            )));
        }
        power = power.dot(lambda);
        r += 1;
    }
    Ok(TraceSeriesLnDet {
        value: acc,
        tail_bound: tail(r),
        cutoff: r,
    })
}

/// The same series summed to a fixed cutoff, with no tolerance logic.
pub fn trace_series_ln_det_fixed(lambda: &Array2<Complex64>, cutoff: usize) -> Complex64 {
    let mut power = lambda.clone();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 1..=cutoff {
        acc -= power.diag().sum() / r as f64;
        if r < cutoff {
            power = power.dot(lambda);
        }
    }
    acc
}

/// The free energy density `f = -ln Z / (beta |V|)` of `sub`, by the
/// requested method.
///
/// * `Brute` needs real `beta` and a graph within the enumeration limit.
/// * `Determinant` needs real `beta > 0`; plus boundary conditions also
///   need the dual embedding.
/// * `TraceSeries` works on complex `beta`; it certifies the operator norm
///   of the transition matrix through the symmetric factorization and
///   refuses with [`Error::NotInRegime`] when the certificate is not below
///   one. The principal `ln cosh` branch is checked edge by edge.
pub fn free_energy_density(
    sub: &Subtiling,
    dual: Option<&DualEmbedding>,
    j: &CouplingSystem,
    beta: Complex64,
    bc: BoundaryCondition,
    method: FreeEnergyMethod,
    series_tol: f64,
) -> Result<FreeEnergyResult> {
    if beta.norm() == 0.0 {
        return Err(Error::InvalidBeta {
            beta,
            reason: "free energy density divides by beta",
        });
    }
    let graph = sub.graph();
    let volume = graph.vertex_count() as f64;
    let need_dual = || dual.ok_or(Error::MissingDual);

    let (ln_z, tail): (Complex64, Option<f64>) = match method {
        FreeEnergyMethod::Brute => {
            if beta.im != 0.0 {
                return Err(Error::InvalidBeta {
                    beta,
                    reason: "brute-force free energy needs real beta",
                });
            }
            let z = partition_bruteforce(sub, j, beta, bc)?;
            (Complex64::new(z.re.ln(), 0.0), None)
        }
        FreeEnergyMethod::Determinant => {
            if beta.im != 0.0 || beta.re <= 0.0 {
                return Err(Error::InvalidBeta {
                    beta,
                    reason: "determinant free energy needs real beta > 0",
                });
            }
            let ln_z2 = match bc {
                BoundaryCondition::Free => {
                    let weights = high_temperature_weights(graph, j, beta)?;
                    let t = kac_ward_operator(graph, &weights)?;
                    let (log_abs, phase) = crate::operator::ln_det_lu(t.into_inner());
                    let mut acc = Complex64::new(log_abs, 0.0) + phase.ln();
                    acc += 2.0 * volume * std::f64::consts::LN_2;
                    for e in 0..graph.edge_count() {
                        acc += 2.0 * ln_cosh_principal(beta * j.get(e));
                    }
                    acc
                }
                BoundaryCondition::Plus => {
                    let dual = need_dual()?;
                    let dual_sub = dual_subtiling(sub, dual)?;
                    if dual_sub.is_empty() {
                        return Err(Error::EmptyInterior);
                    }
                    let weights = low_temperature_weights(sub, dual, &dual_sub, j, beta)?;
                    let t = kac_ward_operator(dual_sub.graph(), &weights)?;
                    let (log_abs, phase) = crate::operator::ln_det_lu(t.into_inner());
                    Complex64::new(log_abs, 0.0) + phase.ln() + 2.0 * beta * j.total()
                }
            };
            (0.5 * ln_z2, None)
        }
        FreeEnergyMethod::TraceSeries => match bc {
            BoundaryCondition::Free => {
                let weights = high_temperature_weights(graph, j, beta)?;
                for e in 0..graph.edge_count() {
                    if !cosh_right_half_plane(beta * j.get(e)) {
                        return Err(Error::BranchFailure(graph.edge_labels(e)));
                    }
                }
                let factorization = weights.factorize_symmetric(graph)?;
                let norm = operator_norm_conjugated(graph, &factorization)?;
                let lambda = transition_matrix(graph, &weights)?;
                let series = trace_series_ln_det(lambda.data(), norm, series_tol)?;
                let mut ln_z2 = series.value + 2.0 * volume * std::f64::consts::LN_2;
                for e in 0..graph.edge_count() {
                    ln_z2 += 2.0 * ln_cosh_principal(beta * j.get(e));
                }
                (0.5 * ln_z2, Some(series.tail_bound))
            }
            BoundaryCondition::Plus => {
                let dual = need_dual()?;
                let dual_sub = dual_subtiling(sub, dual)?;
                if dual_sub.is_empty() {
                    return Err(Error::EmptyInterior);
                }
                let weights = low_temperature_weights(sub, dual, &dual_sub, j, beta)?;
                let factorization = weights.factorize_symmetric(dual_sub.graph())?;
                let norm = operator_norm_conjugated(dual_sub.graph(), &factorization)?;
                let lambda = transition_matrix(dual_sub.graph(), &weights)?;
                let series = trace_series_ln_det(lambda.data(), norm, series_tol)?;
                let ln_z2 = series.value + 2.0 * beta * j.total();
                (0.5 * ln_z2, Some(series.tail_bound))
            }
        },
    };

    Ok(FreeEnergyResult {
        beta,
        value: -ln_z / (beta * volume),
        method,
        truncation_error: tail,
    })
}

/// `det(Id - Lambda)` recomputed from pivoted elimination, for comparison
/// against [`trace_series_ln_det`] (the two must agree after exponentiation).
pub fn kac_ward_determinant_direct(
    graph: &EmbeddedGraph,
    w: &UndirectedWeights,
) -> Result<Complex64> {
    let t = kac_ward_operator(graph, w)?;
    Ok(det_lu(t.into_inner()))
}
