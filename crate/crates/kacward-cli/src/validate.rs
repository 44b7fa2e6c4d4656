//! `kacward validate`: parse a graph file, run the embedding checks, and
//! report degree statistics and dual consistency.

use std::path::Path;
use std::sync::Arc;

use kacward::graph::DualEmbedding;
use kacward::io::GraphFile;

use crate::common::{EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFY_FAILED};

pub fn run(file: &Path, need_dual: bool) -> i32 {
    let parsed = match GraphFile::from_path(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return EXIT_INPUT_ERROR;
        }
    };
    let graph = match parsed.build_graph() {
        Ok(g) => Arc::new(g),
        Err(e) => {
            eprintln!("invalid: {e}");
            return EXIT_VERIFY_FAILED;
        }
    };
    println!(
        "{} vertices, {} edges, max degree {}, {} bounded faces",
        graph.vertex_count(),
        graph.edge_count(),
        graph.max_degree(),
        graph.face_count()
    );

    let centers = match parsed.dual_centers(&graph) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid: dual vertices: {e}");
            return EXIT_VERIFY_FAILED;
        }
    };
    match centers {
        Some(centers) => match DualEmbedding::build(graph.clone(), centers) {
            Ok(dual) => {
                println!(
                    "dual: {} vertices, {} edges, {} dual faces",
                    dual.graph().vertex_count(),
                    dual.graph().edge_count(),
                    dual.graph().face_count()
                );
            }
            Err(e) => {
                eprintln!("invalid: dual embedding: {e}");
                return EXIT_VERIFY_FAILED;
            }
        },
        None if need_dual => {
            eprintln!("invalid: --need-dual given but the file has no dual_vertices section");
            return EXIT_VERIFY_FAILED;
        }
        None => println!("dual: absent"),
    }

    if let Some(theta) = parsed.theta_by_edge(&graph).unwrap_or(None) {
        let k = theta.iter().copied().fold(f64::INFINITY, f64::min);
        let kk = theta.iter().copied().fold(0.0f64, f64::max);
        println!("theta: annotated, range [{k}, {kk}]");
    }

    println!("ok");
    EXIT_OK
}
