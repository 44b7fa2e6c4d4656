//! Even-subgraph generating functions through a cycle-space basis, and the
//! identity det(Id - Lambda(w)) = GF(w)^2.

use kacward::graph::EmbeddedGraph;
use kacward::ising::even_subgraph_gf;
use kacward::operator::kac_ward_determinant;
use kacward::weights::UndirectedWeights;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_squares() -> EmbeddedGraph {
    let mut vertices = Vec::new();
    for j in 0..2u64 {
        for i in 0..3u64 {
            vertices.push((j * 3 + i, c(i as f64, j as f64)));
        }
    }
    let edges = [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)];
    EmbeddedGraph::build(&vertices, &edges, &[vec![0, 1, 4, 3], vec![1, 2, 5, 4]]).unwrap()
}

fn main() {
    // A path graph is a tree: only the empty subgraph is even.
    let path = EmbeddedGraph::build(
        &[(0, c(0.0, 0.0)), (1, c(1.0, 0.0)), (2, c(2.0, 0.0))],
        &[(0, 1), (1, 2)],
        &[],
    )
    .unwrap();
    let w = UndirectedWeights::constant(&path, c(0.7, 0.1)).unwrap();
    println!("tree: GF = {}", even_subgraph_gf(&path, &w).unwrap());

    // The square: empty set and the 4-cycle, GF = 1 + t^4.
    let square = EmbeddedGraph::build(
        &[
            (0, c(0.0, 0.0)),
            (1, c(1.0, 0.0)),
            (2, c(1.0, 1.0)),
            (3, c(0.0, 1.0)),
        ],
        &[(0, 1), (1, 2), (2, 3), (3, 0)],
        &[vec![0, 1, 2, 3]],
    )
    .unwrap();
    let t = 0.6;
    let w = UndirectedWeights::constant(&square, c(t, 0.0)).unwrap();
    let gf = even_subgraph_gf(&square, &w).unwrap();
    println!(
        "square at t = {t}: GF = {}, 1 + t^4 = {}",
        gf.re,
        1.0 + t.powi(4)
    );

    // Two squares sharing an edge: GF = 1 + 2 t^4 + t^6.
    let g = two_squares();
    let w = UndirectedWeights::constant(&g, c(t, 0.0)).unwrap();
    let gf = even_subgraph_gf(&g, &w).unwrap();
    println!(
        "two squares at t = {t}: GF = {}, closed form = {}",
        gf.re,
        1.0 + 2.0 * t.powi(4) + t.powi(6)
    );

    // The determinant is the square of the generating function, for any
    // complex weights.
    println!("\ndet(Id - Lambda) vs GF^2 with complex weights:");
    for seed in 0..4u64 {
        let w = UndirectedWeights::from_fn(&g, |e| {
            let k = (e as u64 + 7 * seed) as f64;
            Complex64::from_polar(0.2 + 0.08 * (k % 7.0), 0.9 * (k % 5.0) - 2.0)
        })
        .unwrap();
        let det = kac_ward_determinant(&g, &w).unwrap();
        let gf = even_subgraph_gf(&g, &w).unwrap();
        let rel = (det - gf * gf).norm() / (gf * gf).norm();
        println!("  draw {seed}: relative error {rel:.2e}");
        assert!(rel < 1e-10);
    }
}
