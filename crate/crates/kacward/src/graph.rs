//! Embedded planar graphs, subtilings, boundaries and duals.
//!
//! An [`EmbeddedGraph`] is a simple planar graph drawn with straight,
//! mutually non-crossing segments, together with an explicit list of its
//! bounded faces as counterclockwise vertex cycles. The face list is part of
//! the input and is validated against the embedding rather than recomputed.
//!
//! Directed edges are kept in a canonical order: sorted by tail vertex, then
//! by direction angle in `(-pi, pi]`. Every matrix in this crate is indexed
//! by that order.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry;

/// A directed edge, stored as internal vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub tail: usize,
    pub head: usize,
}

impl DirectedEdge {
    /// The reversed edge; an involution.
    pub fn reversed(self) -> Self {
        DirectedEdge {
            tail: self.head,
            head: self.tail,
        }
    }
}

/// A finite simple graph embedded in the plane with straight edges.
#[derive(Debug, Clone)]
pub struct EmbeddedGraph {
    labels: Vec<u64>,
    positions: Vec<Complex64>,
    label_index: HashMap<u64, usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    faces: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    dir_edges: Vec<DirectedEdge>,
    dir_index: HashMap<(usize, usize), usize>,
    out_offsets: Vec<usize>,
    reversal: Vec<usize>,
    face_of_dir: Vec<Option<usize>>,
}

impl EmbeddedGraph {
    /// Build and validate a graph from labelled vertices, undirected edges
    /// and counterclockwise bounded-face cycles (all referring to labels).
    ///
    /// Checks: distinct labels and positions, no loops or multi-edges, no
    /// segment crossings away from shared endpoints, no isolated vertices,
    /// and face cycles that walk along existing edges counterclockwise with
    /// each directed edge used by at most one bounded face.
    pub fn build(
        vertices: &[(u64, Complex64)],
        edges: &[(u64, u64)],
        faces: &[Vec<u64>],
    ) -> Result<Self> {
        // Vertices, sorted by label so the canonical order survives serialization.
        let mut sorted: Vec<(u64, Complex64)> = vertices.to_vec();
        sorted.sort_by_key(|(l, _)| *l);
        let mut label_index = HashMap::with_capacity(sorted.len());
        for (i, (l, _)) in sorted.iter().enumerate() {
            if label_index.insert(*l, i).is_some() {
                return Err(Error::DuplicateVertex(*l));
            }
        }
        let labels: Vec<u64> = sorted.iter().map(|(l, _)| *l).collect();
        let positions: Vec<Complex64> = sorted.iter().map(|(_, p)| *p).collect();

        // Distinct positions.
        let mut by_pos: Vec<usize> = (0..positions.len()).collect();
        by_pos.sort_by(|&a, &b| {
            (positions[a].re, positions[a].im)
                .partial_cmp(&(positions[b].re, positions[b].im))
                .unwrap()
        });
        for w in by_pos.windows(2) {
            if positions[w[0]] == positions[w[1]] {
                return Err(Error::DuplicatePosition(labels[w[0]], labels[w[1]]));
            }
        }

        // Edges: resolve labels, normalize, reject loops and duplicates.
        let resolve = |l: u64| label_index.get(&l).copied().ok_or(Error::DanglingEdge(l));
        let mut edge_list: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(la, lb) in edges {
            let a = resolve(la)?;
            let b = resolve(lb)?;
            if a == b {
                return Err(Error::NotSimple(format!("loop at vertex {la}")));
            }
            edge_list.push((a.min(b), a.max(b)));
        }
        edge_list.sort_unstable();
        for w in edge_list.windows(2) {
            if w[0] == w[1] {
                return Err(Error::NotSimple(format!(
                    "duplicate edge ({}, {})",
                    labels[w[0].0], labels[w[0].1]
                )));
            }
        }
        let edge_index: HashMap<(usize, usize), usize> =
            edge_list.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        // Degrees; isolated vertices are rejected.
        let mut degrees = vec![0usize; labels.len()];
        for &(a, b) in &edge_list {
            degrees[a] += 1;
            degrees[b] += 1;
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::ZeroDegree(labels[v]));
        }

        // Pairwise segment crossing test.
        for i in 0..edge_list.len() {
            for j in (i + 1)..edge_list.len() {
                let (a1, b1) = edge_list[i];
                let (a2, b2) = edge_list[j];
                let shared = [a1, b1].iter().filter(|v| **v == a2 || **v == b2).count();
                if geometry::segments_cross(
                    positions[a1],
                    positions[b1],
                    positions[a2],
                    positions[b2],
                    shared,
                ) {
                    return Err(Error::CrossingEdges(
                        (labels[a1], labels[b1]),
                        (labels[a2], labels[b2]),
                    ));
                }
            }
        }

        // Canonical directed-edge order: by tail, then direction angle.
        let mut out_lists: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
        for &(a, b) in &edge_list {
            out_lists[a].push(b);
            out_lists[b].push(a);
        }
        let mut dir_edges = Vec::with_capacity(2 * edge_list.len());
        let mut out_offsets = Vec::with_capacity(labels.len() + 1);
        out_offsets.push(0);
        for (v, heads) in out_lists.iter_mut().enumerate() {
            heads.sort_by(|&p, &q| {
                let ap = (positions[p] - positions[v]).arg();
                let aq = (positions[q] - positions[v]).arg();
                ap.total_cmp(&aq)
            });
            for &h in heads.iter() {
                dir_edges.push(DirectedEdge { tail: v, head: h });
            }
            out_offsets.push(dir_edges.len());
        }
        let dir_index: HashMap<(usize, usize), usize> = dir_edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.tail, e.head), i))
            .collect();
        let reversal: Vec<usize> = dir_edges
            .iter()
            .map(|e| dir_index[&(e.head, e.tail)])
            .collect();

        // Validate faces and record which bounded face each directed edge lies on.
        let mut face_cycles: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
        let mut face_of_dir: Vec<Option<usize>> = vec![None; dir_edges.len()];
        for (fi, cycle) in faces.iter().enumerate() {
            if cycle.len() < 3 {
                return Err(Error::InvalidFace {
                    index: fi,
                    reason: "cycle has fewer than three vertices".into(),
                });
            }
            let mut ids = Vec::with_capacity(cycle.len());
            for &l in cycle {
                ids.push(resolve(l)?);
            }
            let mut seen = ids.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFace {
                    index: fi,
                    reason: "cycle repeats a vertex".into(),
                });
            }
            let pts: Vec<Complex64> = ids.iter().map(|&v| positions[v]).collect();
            if geometry::signed_area_doubled(&pts) <= 0.0 {
                return Err(Error::InvalidFace {
                    index: fi,
                    reason: "cycle is not counterclockwise".into(),
                });
            }
            for k in 0..ids.len() {
                let a = ids[k];
                let b = ids[(k + 1) % ids.len()];
                let Some(&d) = dir_index.get(&(a, b)) else {
                    return Err(Error::InvalidFace {
                        index: fi,
                        reason: format!("({}, {}) is not an edge", labels[a], labels[b]),
                    });
                };
                if face_of_dir[d].is_some() {
                    return Err(Error::InvalidFace {
                        index: fi,
                        reason: format!(
                            "directed edge ({}, {}) lies on more than one bounded face",
                            labels[a], labels[b]
                        ),
                    });
                }
                face_of_dir[d] = Some(fi);
            }
            face_cycles.push(ids);
        }

        Ok(EmbeddedGraph {
            labels,
            positions,
            label_index,
            edges: edge_list,
            edge_index,
            faces: face_cycles,
            degrees,
            dir_edges,
            dir_index,
            out_offsets,
            reversal,
            face_of_dir,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of directed edges, `2 |E|`; the dimension of every Kac-Ward matrix.
    pub fn dir_edge_count(&self) -> usize {
        self.dir_edges.len()
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn position(&self, v: usize) -> Complex64 {
        self.positions[v]
    }

    pub fn vertex_by_label(&self, label: u64) -> Option<usize> {
        self.label_index.get(&label).copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Endpoints of undirected edge `e` as internal indices, tail < head.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Endpoints of undirected edge `e` as labels.
    pub fn edge_labels(&self, e: usize) -> (u64, u64) {
        let (a, b) = self.edges[e];
        (self.labels[a], self.labels[b])
    }

    pub fn edge_index_of(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn face_positions(&self, f: usize) -> Vec<Complex64> {
        self.faces[f].iter().map(|&v| self.positions[v]).collect()
    }

    /// Directed edges in canonical order.
    pub fn dir_edges(&self) -> &[DirectedEdge] {
        &self.dir_edges
    }

    pub fn dir_edge(&self, idx: usize) -> DirectedEdge {
        self.dir_edges[idx]
    }

    pub fn dir_edge_index(&self, e: DirectedEdge) -> Option<usize> {
        self.dir_index.get(&(e.tail, e.head)).copied()
    }

    /// Canonical index of the reversed directed edge.
    pub fn reversed(&self, idx: usize) -> usize {
        self.reversal[idx]
    }

    /// Undirected edge underlying the directed edge at canonical index `idx`.
    pub fn edge_of_dir(&self, idx: usize) -> usize {
        let e = self.dir_edges[idx];
        self.edge_index[&(e.tail.min(e.head), e.tail.max(e.head))]
    }

    /// Edges emanating from `z`, counterclockwise by direction angle starting
    /// from the angle closest above `-pi`.
    pub fn out_edges(&self, z: usize) -> Result<&[DirectedEdge]> {
        if z >= self.labels.len() {
            return Err(Error::UnknownVertex(z));
        }
        Ok(&self.dir_edges[self.out_offsets[z]..self.out_offsets[z + 1]])
    }

    /// Range of canonical indices covering `Out(z)`.
    pub fn out_range(&self, z: usize) -> std::ops::Range<usize> {
        self.out_offsets[z]..self.out_offsets[z + 1]
    }

    /// Turning angle from directed edge `e` to `g`, in `(-pi, pi]`.
    pub fn turning_angle(&self, e: DirectedEdge, g: DirectedEdge) -> Result<f64> {
        geometry::turning_angle(
            self.positions[e.tail],
            self.positions[e.head],
            self.positions[g.tail],
            self.positions[g.head],
        )
    }

    /// The bounded face containing the directed edge `(a, b)` on its left,
    /// if any; the other side of the segment belongs to `(b, a)`.
    pub fn bounded_face_of(&self, e: DirectedEdge) -> Option<usize> {
        self.dir_index
            .get(&(e.tail, e.head))
            .and_then(|&d| self.face_of_dir[d])
    }

    /// True when every corner around `v` belongs to a bounded face, i.e. `v`
    /// does not touch the unbounded face.
    pub fn is_surrounded(&self, v: usize) -> bool {
        self.out_range(v).all(|d| self.face_of_dir[d].is_some())
    }

    /// A copy of the graph with every position multiplied by `e^{i a}`.
    pub fn rotated(&self, angle: f64) -> Result<EmbeddedGraph> {
        let rot = Complex64::from_polar(1.0, angle);
        let vertices: Vec<(u64, Complex64)> = self
            .labels
            .iter()
            .zip(&self.positions)
            .map(|(&l, &p)| (l, rot * p))
            .collect();
        let edges: Vec<(u64, u64)> = (0..self.edge_count())
            .map(|e| self.edge_labels(e))
            .collect();
        let faces: Vec<Vec<u64>> = self
            .faces
            .iter()
            .map(|c| c.iter().map(|&v| self.labels[v]).collect())
            .collect();
        EmbeddedGraph::build(&vertices, &edges, &faces)
    }
}

/// A face-induced subgraph of an ambient graph, with its boundary vertex set.
///
/// The boundary consists of the vertices that touch at least one face not in
/// the defining collection, the unbounded face included.
#[derive(Debug, Clone)]
pub struct Subtiling {
    ambient: Arc<EmbeddedGraph>,
    face_ids: Vec<usize>,
    graph: EmbeddedGraph,
    boundary: Vec<bool>,
    to_ambient_vertex: Vec<usize>,
    to_ambient_edge: Vec<usize>,
    ambient_edge_to_local: HashMap<usize, usize>,
}

impl Subtiling {
    /// The subtiling of `ambient` induced by the given nonempty face collection.
    pub fn new(ambient: Arc<EmbeddedGraph>, face_ids: &[usize]) -> Result<Self> {
        if face_ids.is_empty() {
            return Err(Error::UnknownFace(usize::MAX));
        }
        let mut ids: Vec<usize> = face_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if let Some(&bad) = ids.iter().find(|&&f| f >= ambient.face_count()) {
            return Err(Error::UnknownFace(bad));
        }

        // Edges bounding the selected faces.
        let mut amb_edges: Vec<usize> = Vec::new();
        for &f in &ids {
            let cycle = ambient.face(f);
            for k in 0..cycle.len() {
                let a = cycle[k];
                let b = cycle[(k + 1) % cycle.len()];
                amb_edges.push(ambient.edge_index_of(a, b).expect("validated face edge"));
            }
        }
        amb_edges.sort_unstable();
        amb_edges.dedup();

        let mut amb_vertices: Vec<usize> = amb_edges
            .iter()
            .flat_map(|&e| {
                let (a, b) = ambient.edge_endpoints(e);
                [a, b]
            })
            .collect();
        amb_vertices.sort_unstable();
        amb_vertices.dedup();

        let vertices: Vec<(u64, Complex64)> = amb_vertices
            .iter()
            .map(|&v| (ambient.label(v), ambient.position(v)))
            .collect();
        let edges: Vec<(u64, u64)> = amb_edges.iter().map(|&e| ambient.edge_labels(e)).collect();
        let faces: Vec<Vec<u64>> = ids
            .iter()
            .map(|&f| ambient.face(f).iter().map(|&v| ambient.label(v)).collect())
            .collect();
        let graph = EmbeddedGraph::build(&vertices, &edges, &faces)?;

        Self::assemble(ambient, ids, graph)
    }

    /// Treat a whole graph as a subtiling of itself: every bounded face is
    /// selected and every edge is kept, including edges that bound no face.
    pub fn whole(graph: EmbeddedGraph) -> Self {
        Self::whole_arc(Arc::new(graph))
    }

    /// [`Subtiling::whole`] over an existing shared graph, so the subtiling
    /// recognizes a [`DualEmbedding`] built from the same `Arc`.
    pub fn whole_arc(ambient: Arc<EmbeddedGraph>) -> Self {
        let ids: Vec<usize> = (0..ambient.face_count()).collect();
        let graph = (*ambient).clone();
        Self::assemble(ambient, ids, graph).expect("a graph is a subtiling of itself")
    }

    fn assemble(
        ambient: Arc<EmbeddedGraph>,
        face_ids: Vec<usize>,
        graph: EmbeddedGraph,
    ) -> Result<Self> {
        let to_ambient_vertex: Vec<usize> = (0..graph.vertex_count())
            .map(|v| {
                ambient
                    .vertex_by_label(graph.label(v))
                    .expect("induced vertex exists in ambient")
            })
            .collect();
        let to_ambient_edge: Vec<usize> = (0..graph.edge_count())
            .map(|e| {
                let (a, b) = graph.edge_endpoints(e);
                ambient
                    .edge_index_of(to_ambient_vertex[a], to_ambient_vertex[b])
                    .expect("induced edge exists in ambient")
            })
            .collect();
        let ambient_edge_to_local: HashMap<usize, usize> = to_ambient_edge
            .iter()
            .enumerate()
            .map(|(l, &a)| (a, l))
            .collect();

        // A vertex is interior exactly when all of its ambient corners are
        // selected faces: each corner of the fan around v holds one face,
        // so the count of selected incident faces must reach the degree.
        let mut incident_selected = vec![0usize; ambient.vertex_count()];
        for &f in &face_ids {
            for &v in ambient.face(f) {
                incident_selected[v] += 1;
            }
        }
        let boundary: Vec<bool> = to_ambient_vertex
            .iter()
            .map(|&av| incident_selected[av] < ambient.degree(av))
            .collect();

        Ok(Subtiling {
            ambient,
            face_ids,
            graph,
            boundary,
            to_ambient_vertex,
            to_ambient_edge,
            ambient_edge_to_local,
        })
    }

    fn empty(ambient: Arc<EmbeddedGraph>) -> Self {
        let graph = EmbeddedGraph {
            labels: Vec::new(),
            positions: Vec::new(),
            label_index: HashMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            faces: Vec::new(),
            degrees: Vec::new(),
            dir_edges: Vec::new(),
            dir_index: HashMap::new(),
            out_offsets: vec![0],
            reversal: Vec::new(),
            face_of_dir: Vec::new(),
        };
        Subtiling {
            ambient,
            face_ids: Vec::new(),
            graph,
            boundary: Vec::new(),
            to_ambient_vertex: Vec::new(),
            to_ambient_edge: Vec::new(),
            ambient_edge_to_local: HashMap::new(),
        }
    }

    pub fn ambient(&self) -> &Arc<EmbeddedGraph> {
        &self.ambient
    }

    pub fn graph(&self) -> &EmbeddedGraph {
        &self.graph
    }

    pub fn face_ids(&self) -> &[usize] {
        &self.face_ids
    }

    /// True for the empty subtiling produced when a dual has no interior.
    pub fn is_empty(&self) -> bool {
        self.graph.vertex_count() == 0
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn interior_count(&self) -> usize {
        self.graph.vertex_count() - self.boundary_count()
    }

    /// Interior vertices `V(G) \ boundary`, as indices into the induced graph.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|&v| !self.boundary[v])
            .collect()
    }

    /// `|boundary| / |V|`, the quantity controlling how much boundary
    /// conditions matter for the free energy density.
    pub fn boundary_ratio(&self) -> f64 {
        if self.graph.vertex_count() == 0 {
            return 0.0;
        }
        self.boundary_count() as f64 / self.graph.vertex_count() as f64
    }

    pub fn ambient_vertex(&self, v: usize) -> usize {
        self.to_ambient_vertex[v]
    }

    pub fn ambient_edge(&self, e: usize) -> usize {
        self.to_ambient_edge[e]
    }

    pub fn local_edge_of_ambient(&self, amb_edge: usize) -> Option<usize> {
        self.ambient_edge_to_local.get(&amb_edge).copied()
    }
}

/// A planar dual for an embedded graph: one dual vertex per bounded face,
/// dual edges pairing primal edges that separate two bounded faces, and dual
/// faces around primal vertices that are fully surrounded by bounded faces.
#[derive(Debug, Clone)]
pub struct DualEmbedding {
    primal: Arc<EmbeddedGraph>,
    graph: Arc<EmbeddedGraph>,
    face_centers: Vec<Complex64>,
    dual_vertex_of_face: Vec<Option<usize>>,
    face_of_dual_vertex: Vec<usize>,
    primal_edge_of_dual: Vec<usize>,
    dual_edge_of_primal: Vec<Option<usize>>,
    dual_face_of_vertex: Vec<Option<usize>>,
    primal_vertex_of_dual_face: Vec<usize>,
}

impl DualEmbedding {
    /// Build the dual from per-face vertex positions. Each position must lie
    /// strictly inside its primal face. Primal faces that touch no other
    /// bounded face yield isolated dual vertices, which are kept out of the
    /// dual graph but retain their positions.
    pub fn build(primal: Arc<EmbeddedGraph>, face_centers: Vec<Complex64>) -> Result<Self> {
        if face_centers.len() != primal.face_count() {
            return Err(Error::InvalidFace {
                index: face_centers.len().min(primal.face_count()),
                reason: format!(
                    "expected {} dual vertex positions, got {}",
                    primal.face_count(),
                    face_centers.len()
                ),
            });
        }
        for (f, &c) in face_centers.iter().enumerate() {
            if !geometry::point_in_polygon(&primal.face_positions(f), c) {
                return Err(Error::InvalidFace {
                    index: f,
                    reason: "dual vertex does not lie inside the face".into(),
                });
            }
        }

        // Dual edges: primal edges whose two sides are both bounded faces.
        let mut primal_edge_of_dual = Vec::new();
        let mut dual_edge_of_primal = vec![None; primal.edge_count()];
        let mut dual_edge_faces: Vec<(usize, usize)> = Vec::new();
        for e in 0..primal.edge_count() {
            let (a, b) = primal.edge_endpoints(e);
            let f_ab = primal.bounded_face_of(DirectedEdge { tail: a, head: b });
            let f_ba = primal.bounded_face_of(DirectedEdge { tail: b, head: a });
            if let (Some(f1), Some(f2)) = (f_ab, f_ba) {
                dual_edge_of_primal[e] = Some(primal_edge_of_dual.len());
                primal_edge_of_dual.push(e);
                dual_edge_faces.push((f1, f2));
            }
        }

        // Dual faces around fully surrounded primal vertices: the corner
        // between consecutive out-edges e_i, e_{i+1} holds the bounded face
        // containing the directed edge e_i, so walking the out-edges
        // counterclockwise lists the surrounding faces counterclockwise.
        let mut dual_face_of_vertex = vec![None; primal.vertex_count()];
        let mut primal_vertex_of_dual_face = Vec::new();
        let mut dual_faces: Vec<Vec<usize>> = Vec::new();
        for v in 0..primal.vertex_count() {
            if !primal.is_surrounded(v) {
                continue;
            }
            let cycle: Vec<usize> = primal
                .out_edges(v)?
                .iter()
                .map(|&e| primal.bounded_face_of(e).expect("surrounded vertex"))
                .collect();
            dual_face_of_vertex[v] = Some(dual_faces.len());
            primal_vertex_of_dual_face.push(v);
            dual_faces.push(cycle);
        }

        // Assemble the dual graph over the faces that carry dual edges.
        let mut used: Vec<bool> = vec![false; primal.face_count()];
        for &(f1, f2) in &dual_edge_faces {
            used[f1] = true;
            used[f2] = true;
        }
        let vertices: Vec<(u64, Complex64)> = (0..primal.face_count())
            .filter(|&f| used[f])
            .map(|f| (f as u64, face_centers[f]))
            .collect();
        let edges: Vec<(u64, u64)> = dual_edge_faces
            .iter()
            .map(|&(f1, f2)| (f1 as u64, f2 as u64))
            .collect();
        let faces: Vec<Vec<u64>> = dual_faces
            .iter()
            .map(|c| c.iter().map(|&f| f as u64).collect())
            .collect();
        let graph = if vertices.is_empty() {
            // No two bounded faces are adjacent; the dual graph is empty.
            Arc::new(EmbeddedGraph::build(&[], &[], &[])?)
        } else {
            Arc::new(EmbeddedGraph::build(&vertices, &edges, &faces)?)
        };

        let dual_vertex_of_face: Vec<Option<usize>> = (0..primal.face_count())
            .map(|f| graph.vertex_by_label(f as u64))
            .collect();
        let face_of_dual_vertex: Vec<usize> = (0..graph.vertex_count())
            .map(|v| graph.label(v) as usize)
            .collect();

        // Reindex dual edges to the dual graph's own edge order.
        let mut primal_of_dual_sorted = vec![0usize; primal_edge_of_dual.len()];
        let mut dual_of_primal_sorted = vec![None; primal.edge_count()];
        for (k, &pe) in primal_edge_of_dual.iter().enumerate() {
            let (f1, f2) = dual_edge_faces[k];
            let a = graph.vertex_by_label(f1 as u64).expect("dual vertex");
            let b = graph.vertex_by_label(f2 as u64).expect("dual vertex");
            let de = graph.edge_index_of(a, b).expect("dual edge");
            primal_of_dual_sorted[de] = pe;
            dual_of_primal_sorted[pe] = Some(de);
        }

        Ok(DualEmbedding {
            primal,
            graph,
            face_centers,
            dual_vertex_of_face,
            face_of_dual_vertex,
            primal_edge_of_dual: primal_of_dual_sorted,
            dual_edge_of_primal: dual_of_primal_sorted,
            dual_face_of_vertex,
            primal_vertex_of_dual_face,
        })
    }

    pub fn primal(&self) -> &Arc<EmbeddedGraph> {
        &self.primal
    }

    /// The dual graph; empty when no two bounded faces share an edge.
    pub fn graph(&self) -> &Arc<EmbeddedGraph> {
        &self.graph
    }

    pub fn face_center(&self, f: usize) -> Complex64 {
        self.face_centers[f]
    }

    pub fn face_centers(&self) -> &[Complex64] {
        &self.face_centers
    }

    pub fn dual_vertex_of_face(&self, f: usize) -> Option<usize> {
        self.dual_vertex_of_face[f]
    }

    pub fn face_of_dual_vertex(&self, v: usize) -> usize {
        self.face_of_dual_vertex[v]
    }

    /// The primal edge paired with dual edge `e*`.
    pub fn primal_edge_of_dual(&self, dual_edge: usize) -> usize {
        self.primal_edge_of_dual[dual_edge]
    }

    /// The dual edge paired with primal edge `e`, when both sides of `e`
    /// are bounded faces.
    pub fn dual_edge_of_primal(&self, primal_edge: usize) -> Option<usize> {
        self.dual_edge_of_primal[primal_edge]
    }

    /// The dual face sitting around primal vertex `v`, when `v` is fully
    /// surrounded by bounded faces.
    pub fn dual_face_of_vertex(&self, v: usize) -> Option<usize> {
        self.dual_face_of_vertex[v]
    }

    pub fn primal_vertex_of_dual_face(&self, f: usize) -> usize {
        self.primal_vertex_of_dual_face[f]
    }
}

/// The dual subtiling of `sub`: the subtiling of the dual graph whose edges
/// are the duals of primal edges with at least one endpoint in the interior
/// of `sub`, equivalently the subtiling defined by the dual faces of the
/// interior vertices.
///
/// When the interior is empty the returned subtiling is empty and flagged
/// via [`Subtiling::is_empty`]; the corresponding Kac-Ward determinant
/// factor is trivially one.
pub fn dual_subtiling(sub: &Subtiling, dual: &DualEmbedding) -> Result<Subtiling> {
    assert!(
        Arc::ptr_eq(sub.ambient(), dual.primal()),
        "dual embedding belongs to a different ambient graph"
    );
    let interior: Vec<usize> = sub
        .interior_vertices()
        .iter()
        .map(|&v| sub.ambient_vertex(v))
        .collect();
    if interior.is_empty() {
        return Ok(Subtiling::empty(dual.graph().clone()));
    }
    let face_ids: Vec<usize> = interior
        .iter()
        .map(|&v| {
            dual.dual_face_of_vertex(v)
                .expect("interior vertices are surrounded by bounded faces")
        })
        .collect();
    Subtiling::new(dual.graph().clone(), &face_ids)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Unit-spacing square lattice with n x n faces, labels row-major.
    pub(crate) fn grid(n: usize) -> EmbeddedGraph {
        let side = n + 1;
        let idx = |i: usize, j: usize| (j * side + i) as u64;
        let mut vertices = Vec::new();
        for j in 0..side {
            for i in 0..side {
                vertices.push((idx(i, j), c(i as f64, j as f64)));
            }
        }
        let mut edges = Vec::new();
        for j in 0..side {
            for i in 0..side {
                if i + 1 < side {
                    edges.push((idx(i, j), idx(i + 1, j)));
                }
                if j + 1 < side {
                    edges.push((idx(i, j), idx(i, j + 1)));
                }
            }
        }
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..n {
                faces.push(vec![
                    idx(i, j),
                    idx(i + 1, j),
                    idx(i + 1, j + 1),
                    idx(i, j + 1),
                ]);
            }
        }
        EmbeddedGraph::build(&vertices, &edges, &faces).unwrap()
    }

    pub(crate) fn unit_square() -> EmbeddedGraph {
        grid(1)
    }

    #[test]
    fn unit_square_builds_with_degree_two() {
        let g = unit_square();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.face_count(), 1);
        for v in 0..4 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn crossing_edges_rejected() {
        let vertices = [
            (0u64, c(0.0, 0.0)),
            (1, c(1.0, 0.0)),
            (2, c(0.0, 1.0)),
            (3, c(1.0, 1.0)),
        ];
        // The two diagonals cross at (0.5, 0.5).
        let edges = [(0, 3), (1, 2), (0, 1), (2, 3)];
        let r = EmbeddedGraph::build(&vertices, &edges, &[]);
        assert!(matches!(r, Err(Error::CrossingEdges(_, _))));
    }

    #[test]
    fn loops_rejected() {
        let vertices = [(0u64, c(0.0, 0.0)), (1, c(1.0, 0.0))];
        let r = EmbeddedGraph::build(&vertices, &[(0, 0), (0, 1)], &[]);
        assert!(matches!(r, Err(Error::NotSimple(_))));
    }

    #[test]
    fn duplicate_edges_rejected() {
        let vertices = [(0u64, c(0.0, 0.0)), (1, c(1.0, 0.0))];
        let r = EmbeddedGraph::build(&vertices, &[(0, 1), (1, 0)], &[]);
        assert!(matches!(r, Err(Error::NotSimple(_))));
    }

    #[test]
    fn dangling_edge_rejected() {
        let vertices = [(0u64, c(0.0, 0.0)), (1, c(1.0, 0.0))];
        let r = EmbeddedGraph::build(&vertices, &[(0, 7)], &[]);
        assert!(matches!(r, Err(Error::DanglingEdge(7))));
    }

    #[test]
    fn isolated_vertex_rejected() {
        let vertices = [(0u64, c(0.0, 0.0)), (1, c(1.0, 0.0)), (2, c(2.0, 0.0))];
        let r = EmbeddedGraph::build(&vertices, &[(0, 1)], &[]);
        assert!(matches!(r, Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn clockwise_face_rejected() {
        let vertices = [
            (0u64, c(0.0, 0.0)),
            (1, c(1.0, 0.0)),
            (2, c(1.0, 1.0)),
            (3, c(0.0, 1.0)),
        ];
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let r = EmbeddedGraph::build(&vertices, &edges, &[vec![0, 3, 2, 1]]);
        assert!(matches!(r, Err(Error::InvalidFace { .. })));
    }

    #[test]
    fn out_edges_ccw_from_east() {
        let g = grid(2);
        let center = g.vertex_by_label(4).unwrap();
        assert_eq!(g.degree(center), 4);
        let out = g.out_edges(center).unwrap();
        let angles: Vec<f64> = out
            .iter()
            .map(|e| (g.position(e.head) - g.position(e.tail)).arg())
            .collect();
        // Ascending in (-pi, pi]: south, east, north, west.
        assert_abs_diff_eq!(angles[0], -FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(angles[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(angles[2], FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(angles[3], PI, epsilon = 1e-15);
    }

    #[test]
    fn out_edges_unknown_vertex() {
        let g = unit_square();
        assert!(matches!(g.out_edges(99), Err(Error::UnknownVertex(99))));
    }

    #[test]
    fn subtiling_full_3x3_counts() {
        let g = Arc::new(grid(3));
        let sub = Subtiling::new(g, &[0, 1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        assert_eq!(sub.graph().vertex_count(), 16);
        assert_eq!(sub.graph().edge_count(), 24);
        assert_eq!(sub.boundary_count(), 12);
        assert_eq!(sub.interior_count(), 4);
    }

    #[test]
    fn subtiling_single_square_all_boundary() {
        let sub = Subtiling::whole(unit_square());
        assert_eq!(sub.boundary_count(), 4);
        assert_eq!(sub.interior_count(), 0);
    }

    #[test]
    fn subtiling_2x2_center_interior() {
        let sub = Subtiling::whole(grid(2));
        assert_eq!(sub.interior_count(), 1);
        let interior = sub.interior_vertices();
        assert_eq!(interior.len(), 1);
        assert_eq!(sub.graph().label(interior[0]), 4);
    }

    #[test]
    fn subtiling_unknown_face() {
        let g = Arc::new(unit_square());
        assert!(matches!(
            Subtiling::new(g, &[5]),
            Err(Error::UnknownFace(5))
        ));
    }

    #[test]
    fn subtiling_of_larger_ambient() {
        // Select the 2x2 lower-left block of a 3x3 ambient lattice.
        let g = Arc::new(grid(3));
        let sub = Subtiling::new(g, &[0, 1, 3, 4]).unwrap();
        assert_eq!(sub.graph().vertex_count(), 9);
        assert_eq!(sub.graph().edge_count(), 12);
        assert_eq!(sub.interior_count(), 1);
    }

    fn grid_dual(n: usize) -> (Arc<EmbeddedGraph>, DualEmbedding) {
        let g = Arc::new(grid(n));
        let centers: Vec<Complex64> = (0..g.face_count())
            .map(|f| {
                let pts = g.face_positions(f);
                pts.iter().sum::<Complex64>() / pts.len() as f64
            })
            .collect();
        let dual = DualEmbedding::build(g.clone(), centers).unwrap();
        (g, dual)
    }

    #[test]
    fn dual_of_3x3_grid() {
        let (_, dual) = grid_dual(3);
        assert_eq!(dual.graph().vertex_count(), 9);
        assert_eq!(dual.graph().edge_count(), 12);
        // Dual faces exist exactly around the four surrounded vertices.
        assert_eq!(dual.graph().face_count(), 4);
    }

    #[test]
    fn dual_subtiling_of_3x3() {
        let (g, dual) = grid_dual(3);
        let sub = Subtiling::new(g, &(0..9).collect::<Vec<_>>()).unwrap();
        let ds = dual_subtiling(&sub, &dual).unwrap();
        assert!(!ds.is_empty());
        assert_eq!(ds.face_ids().len(), 4);
        assert_eq!(ds.graph().edge_count(), 12);
    }

    #[test]
    fn dual_subtiling_of_single_square_is_empty() {
        let g = Arc::new(unit_square());
        let centers = vec![c(0.5, 0.5)];
        let dual = DualEmbedding::build(g.clone(), centers).unwrap();
        let sub = Subtiling::new(g, &[0]).unwrap();
        let ds = dual_subtiling(&sub, &dual).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn dual_subtiling_of_2x2_is_cycle_around_center() {
        let (g, dual) = grid_dual(2);
        let sub = Subtiling::new(g, &[0, 1, 2, 3]).unwrap();
        let ds = dual_subtiling(&sub, &dual).unwrap();
        assert_eq!(ds.graph().vertex_count(), 4);
        assert_eq!(ds.graph().edge_count(), 4);
        assert_eq!(ds.face_ids().len(), 1);
    }

    #[test]
    fn dual_interior_shrinks_by_one_ring() {
        // Full n x n block: interior of the dual subtiling is the dual
        // (n-1) x (n-1) block's interior pattern.
        for n in 2..5usize {
            let (g, dual) = grid_dual(n);
            let sub = Subtiling::new(g, &(0..n * n).collect::<Vec<_>>()).unwrap();
            let ds = dual_subtiling(&sub, &dual).unwrap();
            assert_eq!(ds.graph().vertex_count(), n * n);
            assert_eq!(ds.face_ids().len(), (n - 1) * (n - 1));
            let expected_interior = if n >= 3 { (n - 2) * (n - 2) } else { 0 };
            assert_eq!(ds.interior_count(), expected_interior);
        }
    }

    #[test]
    fn turning_angle_same_edge_is_zero() {
        let g = grid(2);
        for &e in g.dir_edges() {
            assert_eq!(g.turning_angle(e, e).unwrap(), 0.0);
        }
    }

    #[test]
    fn angle_reflection_antisymmetry_on_lattice() {
        // angle(-e, g) = -angle(-g, e) for distinct e, g with the same tail.
        let g = grid(3);
        for v in 0..g.vertex_count() {
            let out = g.out_edges(v).unwrap();
            for &e in out {
                for &h in out {
                    if e == h {
                        continue;
                    }
                    let lhs = g.turning_angle(e.reversed(), h).unwrap();
                    let rhs = g.turning_angle(h.reversed(), e).unwrap();
                    assert_abs_diff_eq!(lhs, -rhs, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn dual_positions_outside_face_rejected() {
        let g = Arc::new(unit_square());
        let r = DualEmbedding::build(g, vec![c(2.0, 2.0)]);
        assert!(matches!(r, Err(Error::InvalidFace { .. })));
    }
}
