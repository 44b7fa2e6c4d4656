//! Build and validate embedded graphs, and round-trip the file format.

use kacward::graph::EmbeddedGraph;
use kacward::io::GraphFile;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    // The unit square, built by hand.
    let vertices = [
        (0u64, c(0.0, 0.0)),
        (1, c(1.0, 0.0)),
        (2, c(1.0, 1.0)),
        (3, c(0.0, 1.0)),
    ];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
    let faces = [vec![0, 1, 2, 3]];
    let square = EmbeddedGraph::build(&vertices, &edges, &faces).expect("valid square");
    println!(
        "square: {} vertices, {} edges, {} face, max degree {}",
        square.vertex_count(),
        square.edge_count(),
        square.face_count(),
        square.max_degree()
    );

    // Crossing segments are rejected with the offending pair named.
    let crossing = EmbeddedGraph::build(&vertices, &[(0, 2), (1, 3)], &[]);
    println!("diagonals of the square: {}", crossing.unwrap_err());

    // Loops are rejected.
    let looped = EmbeddedGraph::build(&vertices, &[(0, 0)], &[]);
    println!("loop edge: {}", looped.unwrap_err());

    // Serialize, reparse, rebuild: the render is byte-stable.
    let file = GraphFile::from_graph(&square, None, None);
    let text = file.render();
    let reparsed = GraphFile::parse(&text).expect("own render parses");
    assert_eq!(text, reparsed.render());
    let rebuilt = reparsed.build_graph().expect("rebuilds");
    assert_eq!(rebuilt.vertex_count(), square.vertex_count());
    println!("\nfile format round-trip is stable; rendered form:\n{text}");
}
