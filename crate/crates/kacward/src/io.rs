//! The plain-text graph file format.
//!
//! Line oriented, with `#` comments and blank lines ignored. Four sections,
//! introduced by a bare keyword line:
//!
//! ```text
//! vertices        # id re im
//! 0 0 0
//! 1 1.4142135623730951 0
//! edges           # id_a id_b
//! 0 1
//! faces           # cycle of vertex ids, counterclockwise
//! 0 1 2 3
//! dual_vertices   # face_index re im     (optional)
//! 0 0.7071067811865476 0.7071067811865476
//! theta           # id_a id_b angle      (optional, isoradial annotation)
//! 0 1 0.7853981633974483
//! ```
//!
//! Serialization prints floats in Rust's shortest round-trip form, so a
//! parse-render cycle is byte-stable.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{DualEmbedding, EmbeddedGraph};

/// Parsed contents of a graph file.
#[derive(Debug, Clone, Default)]
pub struct GraphFile {
    pub vertices: Vec<(u64, Complex64)>,
    pub edges: Vec<(u64, u64)>,
    pub faces: Vec<Vec<u64>>,
    /// `(face index, position)` pairs; empty when the section is absent.
    pub dual_vertices: Vec<(usize, Complex64)>,
    /// `(id_a, id_b, angle)` rhombus half-angle annotations.
    pub theta: Vec<(u64, u64, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Vertices,
    Edges,
    Faces,
    DualVertices,
    Theta,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = GraphFile::default();
        let mut section = Section::None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "vertices" => {
                    section = Section::Vertices;
                    continue;
                }
                "edges" => {
                    section = Section::Edges;
                    continue;
                }
                "faces" => {
                    section = Section::Faces;
                    continue;
                }
                "dual_vertices" => {
                    section = Section::DualVertices;
                    continue;
                }
                "theta" => {
                    section = Section::Theta;
                    continue;
                }
                _ => {}
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            match section {
                Section::None => {
                    return Err(parse_err(format!("data before any section header: {line}")))
                }
                Section::Vertices => {
                    if fields.len() != 3 {
                        return Err(parse_err("vertex line needs: id re im".into()));
                    }
                    let id = parse_u64(fields[0], line_no)?;
                    let re = parse_f64(fields[1], line_no)?;
                    let im = parse_f64(fields[2], line_no)?;
                    file.vertices.push((id, Complex64::new(re, im)));
                }
                Section::Edges => {
                    if fields.len() != 2 {
                        return Err(parse_err("edge line needs: id_a id_b".into()));
                    }
                    file.edges.push((
                        parse_u64(fields[0], line_no)?,
                        parse_u64(fields[1], line_no)?,
                    ));
                }
                Section::Faces => {
                    let cycle = fields
                        .iter()
                        .map(|f| parse_u64(f, line_no))
                        .collect::<Result<Vec<u64>>>()?;
                    file.faces.push(cycle);
                }
                Section::DualVertices => {
                    if fields.len() != 3 {
                        return Err(parse_err("dual vertex line needs: face_index re im".into()));
                    }
                    let f = parse_u64(fields[0], line_no)? as usize;
                    let re = parse_f64(fields[1], line_no)?;
                    let im = parse_f64(fields[2], line_no)?;
                    file.dual_vertices.push((f, Complex64::new(re, im)));
                }
                Section::Theta => {
                    if fields.len() != 3 {
                        return Err(parse_err("theta line needs: id_a id_b angle".into()));
                    }
                    file.theta.push((
                        parse_u64(fields[0], line_no)?,
                        parse_u64(fields[1], line_no)?,
                        parse_f64(fields[2], line_no)?,
                    ));
                }
            }
        }
        Ok(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Render in the canonical section order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("vertices\n");
        for &(id, p) in &self.vertices {
            out.push_str(&format!("{} {} {}\n", id, p.re, p.im));
        }
        out.push_str("edges\n");
        for &(a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        if !self.faces.is_empty() {
            out.push_str("faces\n");
            for cycle in &self.faces {
                let ids: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
                out.push_str(&ids.join(" "));
                out.push('\n');
            }
        }
        if !self.dual_vertices.is_empty() {
            out.push_str("dual_vertices\n");
            for &(f, p) in &self.dual_vertices {
                out.push_str(&format!("{} {} {}\n", f, p.re, p.im));
            }
        }
        if !self.theta.is_empty() {
            out.push_str("theta\n");
            for &(a, b, t) in &self.theta {
                out.push_str(&format!("{a} {b} {t}\n"));
            }
        }
        out
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    /// Build and validate the embedded graph described by this file.
    pub fn build_graph(&self) -> Result<EmbeddedGraph> {
        EmbeddedGraph::build(&self.vertices, &self.edges, &self.faces)
    }

    /// Dual vertex positions indexed by face, when the section covers every
    /// face exactly once; `None` when the section is absent.
    pub fn dual_centers(&self, graph: &EmbeddedGraph) -> Result<Option<Vec<Complex64>>> {
        if self.dual_vertices.is_empty() {
            return Ok(None);
        }
        let mut centers = vec![None; graph.face_count()];
        for &(f, p) in &self.dual_vertices {
            if f >= graph.face_count() {
                return Err(Error::UnknownFace(f));
            }
            if centers[f].replace(p).is_some() {
                return Err(Error::InvalidFace {
                    index: f,
                    reason: "duplicate dual vertex".into(),
                });
            }
        }
        let mut out = Vec::with_capacity(centers.len());
        for (f, c) in centers.into_iter().enumerate() {
            match c {
                Some(p) => out.push(p),
                None => {
                    return Err(Error::InvalidFace {
                        index: f,
                        reason: "missing dual vertex".into(),
                    })
                }
            }
        }
        Ok(Some(out))
    }

    /// Per-edge theta annotations aligned with the graph's edge order, when
    /// the section covers every edge; `None` when absent.
    pub fn theta_by_edge(&self, graph: &EmbeddedGraph) -> Result<Option<Vec<f64>>> {
        if self.theta.is_empty() {
            return Ok(None);
        }
        let mut by_edge = vec![None; graph.edge_count()];
        for &(la, lb, t) in &self.theta {
            let a = graph.vertex_by_label(la).ok_or(Error::DanglingEdge(la))?;
            let b = graph.vertex_by_label(lb).ok_or(Error::DanglingEdge(lb))?;
            let e = graph.edge_index_of(a, b).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("theta annotation on missing edge ({la}, {lb})"),
            })?;
            by_edge[e] = Some(t);
        }
        if let Some(e) = by_edge.iter().position(|t| t.is_none()) {
            let (a, b) = graph.edge_labels(e);
            return Err(Error::Parse {
                line: 0,
                message: format!("edge ({a}, {b}) has no theta annotation"),
            });
        }
        Ok(Some(by_edge.into_iter().map(|t| t.unwrap()).collect()))
    }

    /// Snapshot a graph (and optionally its dual positions and per-edge
    /// angles) into a file structure.
    pub fn from_graph(
        graph: &EmbeddedGraph,
        dual: Option<&DualEmbedding>,
        theta: Option<&[f64]>,
    ) -> Self {
        let vertices: Vec<(u64, Complex64)> = (0..graph.vertex_count())
            .map(|v| (graph.label(v), graph.position(v)))
            .collect();
        let edges: Vec<(u64, u64)> = (0..graph.edge_count())
            .map(|e| graph.edge_labels(e))
            .collect();
        let faces: Vec<Vec<u64>> = (0..graph.face_count())
            .map(|f| graph.face(f).iter().map(|&v| graph.label(v)).collect())
            .collect();
        let dual_vertices: Vec<(usize, Complex64)> = dual
            .map(|d| {
                (0..graph.face_count())
                    .map(|f| (f, d.face_center(f)))
                    .collect()
            })
            .unwrap_or_default();
        let theta = theta
            .map(|ts| {
                ts.iter()
                    .enumerate()
                    .map(|(e, &t)| {
                        let (a, b) = graph.edge_labels(e);
                        (a, b, t)
                    })
                    .collect()
            })
            .unwrap_or_default();
        GraphFile {
            vertices,
            edges,
            faces,
            dual_vertices,
            theta,
        }
    }
}

fn parse_u64(s: &str, line: usize) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an integer id, got {s:?}"),
    })
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got {s:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "\
# the unit square
vertices
0 0 0
1 1 0
2 1 1
3 0 1
edges
0 1
1 2
2 3
3 0
faces
0 1 2 3
dual_vertices
0 0.5 0.5
";

    #[test]
    fn parse_and_build_square() {
        let file = GraphFile::parse(SQUARE).unwrap();
        let g = file.build_graph().unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.face_count(), 1);
        let centers = file.dual_centers(&g).unwrap().unwrap();
        assert_eq!(centers.len(), 1);
        assert_eq!(centers[0], Complex64::new(0.5, 0.5));
    }

    #[test]
    fn render_parse_is_stable() {
        let file = GraphFile::parse(SQUARE).unwrap();
        let rendered = file.render();
        let reparsed = GraphFile::parse(&rendered).unwrap();
        assert_eq!(rendered, reparsed.render());
    }

    #[test]
    fn data_before_section_is_an_error() {
        let r = GraphFile::parse("0 1 2\nvertices\n");
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn malformed_vertex_line() {
        let r = GraphFile::parse("vertices\n0 1\n");
        assert!(matches!(r, Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn missing_dual_vertex_detected() {
        let truncated = SQUARE.replace("dual_vertices\n0 0.5 0.5\n", "");
        let file = GraphFile::parse(&truncated).unwrap();
        let g = file.build_graph().unwrap();
        assert!(file.dual_centers(&g).unwrap().is_none());
    }
}
