//! `kacward verify`: run the oracle identity suites against a graph file
//! with seeded randomness and report the worst relative errors.
//!
//! Checks, in order: the free-boundary determinant identity against brute
//! force, the plus-boundary identity on the dual (when a dual embedding and
//! a nonempty interior are available), the determinant against the squared
//! even-subgraph generating function, the block characteristic polynomial,
//! the closed-form operator norm against singular values, and the
//! spectral-radius bound over random factorizations. Brute-force checks are
//! skipped (with a note) when the graph exceeds the enumeration limits.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kacward::graph::Subtiling;
use kacward::ising::{
    even_subgraph_gf, partition_bruteforce, partition_free_kw, partition_plus_kw,
    BoundaryCondition, CouplingSystem, BRUTE_FORCE_SPIN_LIMIT, CYCLE_SPACE_LIMIT,
};
use kacward::operator::{
    b_block, conjugated_transition_matrix, det_lu, kac_ward_determinant, transition_matrix,
};
use kacward::spectral::{
    charpoly_from_moduli, largest_singular_value, operator_norm_conjugated, spectral_radius_dense,
};
use kacward::weights::{DirectedWeights, UndirectedWeights};

use crate::common::{load_graph, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFY_FAILED};

struct CheckOutcome {
    name: &'static str,
    max_error: f64,
    tolerance: f64,
}

impl CheckOutcome {
    fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

pub fn run(file: &Path, seed: u64, trials: usize, tol: f64) -> i32 {
    let loaded = match load_graph(file) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    if trials == 0 {
        println!("warning: trials = 0, nothing verified (vacuous pass)");
        return EXIT_OK;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = loaded.graph.clone();
    let sub = Subtiling::whole_arc(graph.clone());
    let mut outcomes: Vec<CheckOutcome> = Vec::new();

    // Free-boundary Kac-Ward identity against brute force.
    if graph.vertex_count() <= BRUTE_FORCE_SPIN_LIMIT {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let j = random_couplings(&mut rng, &graph);
            let beta = random_beta(&mut rng);
            let z = partition_bruteforce(&sub, &j, beta, BoundaryCondition::Free)
                .expect("within limits");
            let z2 = partition_free_kw(&sub, &j, beta).expect("Re beta > 0");
            worst = worst.max((z * z - z2).norm() / z2.norm());
        }
        outcomes.push(CheckOutcome {
            name: "free-boundary determinant identity",
            max_error: worst,
            tolerance: tol,
        });
    } else {
        println!(
            "note: {} spins exceed the brute-force limit {}; skipping partition identities",
            graph.vertex_count(),
            BRUTE_FORCE_SPIN_LIMIT
        );
    }

    // Plus-boundary identity on the dual subtiling.
    if let Some(dual) = &loaded.dual {
        let interior = sub.interior_count();
        if interior > 0 && interior <= BRUTE_FORCE_SPIN_LIMIT {
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let j = random_couplings(&mut rng, &graph);
                let beta = random_beta(&mut rng);
                let z = partition_bruteforce(&sub, &j, beta, BoundaryCondition::Plus)
                    .expect("within limits");
                let z2 = partition_plus_kw(&sub, dual, &j, beta).expect("nonempty interior");
                worst = worst.max((z * z - z2).norm() / z2.norm());
            }
            outcomes.push(CheckOutcome {
                name: "plus-boundary determinant identity",
                max_error: worst,
                tolerance: tol,
            });
        } else if interior == 0 {
            println!("note: empty interior; skipping the plus-boundary identity");
        }
    } else {
        println!("note: no dual_vertices section; skipping the plus-boundary identity");
    }

    // Determinant vs squared even-subgraph generating function.
    {
        let mut worst = 0.0f64;
        let mut skipped = false;
        for _ in 0..trials {
            let w = random_weights(&mut rng, &graph, 0.9);
            match even_subgraph_gf(&graph, &w) {
                Ok(gf) => {
                    let det = kac_ward_determinant(&graph, &w).expect("weights cover the graph");
                    let gf2 = gf * gf;
                    worst = worst.max((det - gf2).norm() / gf2.norm().max(1e-30));
                }
                Err(kacward::Error::TooLarge { .. }) => {
                    skipped = true;
                    break;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT_ERROR;
                }
            }
        }
        if skipped {
            println!(
                "note: cycle space above {CYCLE_SPACE_LIMIT}; skipping the generating-function identity"
            );
        } else {
            outcomes.push(CheckOutcome {
                name: "determinant = squared generating function",
                max_error: worst,
                tolerance: tol,
            });
        }
    }

    // Block characteristic polynomial at random weights and shifts.
    {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let xd = random_directed_weights(&mut rng, &graph);
            for z in 0..graph.vertex_count() {
                let t = rng.gen_range(-3.0..3.0);
                let moduli: Vec<f64> = xd.squared_moduli_at(&graph, z);
                let closed = charpoly_from_moduli(&moduli, t);
                let block = b_block(&graph, &xd, z).expect("weights cover the graph");
                let mut shifted = -block;
                for i in 0..shifted.nrows() {
                    shifted[(i, i)] += Complex64::new(t, 0.0);
                }
                let det = det_lu(shifted);
                worst = worst.max((closed - det.re).abs() / (1.0 + closed.abs()));
            }
        }
        outcomes.push(CheckOutcome {
            name: "block characteristic polynomial",
            max_error: worst,
            tolerance: tol.min(1e-9),
        });
    }

    // Closed-form operator norm vs the largest singular value.
    {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let xd = random_directed_weights(&mut rng, &graph);
            let closed = operator_norm_conjugated(&graph, &xd).expect("covered");
            let lambda = conjugated_transition_matrix(&graph, &xd).expect("covered");
            let sv = largest_singular_value(lambda.data()).expect("svd converges");
            worst = worst.max((closed - sv).abs() / closed.max(1.0));
        }
        outcomes.push(CheckOutcome {
            name: "operator norm closed form",
            max_error: worst,
            tolerance: tol.min(1e-9),
        });
    }

    // Spectral radius bounded by max xi over random factorizations.
    {
        let mut worst_excess = 0.0f64;
        for _ in 0..trials {
            let x = random_weights(&mut rng, &graph, 1.0);
            let lambda = transition_matrix(&graph, &x).expect("covered");
            let rho = spectral_radius_dense(lambda.data()).expect("eig converges");
            let xd = random_factorization(&mut rng, &graph, &x);
            let bound = operator_norm_conjugated(&graph, &xd).expect("covered");
            worst_excess = worst_excess.max(rho - bound);
        }
        outcomes.push(CheckOutcome {
            name: "spectral radius within the xi bound",
            max_error: worst_excess.max(0.0),
            tolerance: 1e-10,
        });
    }

    let mut first_failure: Option<&str> = None;
    for outcome in &outcomes {
        let status = if outcome.passed() { "pass" } else { "FAIL" };
        println!(
            "{status}: {} (max error {:e}, tolerance {:e}, {trials} trials)",
            outcome.name, outcome.max_error, outcome.tolerance
        );
        if !outcome.passed() && first_failure.is_none() {
            first_failure = Some(outcome.name);
        }
    }
    match first_failure {
        Some(name) => {
            eprintln!("verification failed: {name}");
            EXIT_VERIFY_FAILED
        }
        None => EXIT_OK,
    }
}

fn random_couplings(rng: &mut ChaCha8Rng, g: &kacward::EmbeddedGraph) -> CouplingSystem {
    let values: Vec<f64> = (0..g.edge_count())
        .map(|_| rng.gen_range(0.5..1.5))
        .collect();
    CouplingSystem::from_values(g, values).expect("positive couplings")
}

fn random_beta(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(0.1..2.0), rng.gen_range(-0.3..0.3))
}

fn random_weights(
    rng: &mut ChaCha8Rng,
    g: &kacward::EmbeddedGraph,
    max_mod: f64,
) -> UndirectedWeights {
    UndirectedWeights::from_fn(g, |_| {
        Complex64::from_polar(
            rng.gen_range(0.05..max_mod),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        )
    })
    .expect("nonzero weights")
}

fn random_directed_weights(rng: &mut ChaCha8Rng, g: &kacward::EmbeddedGraph) -> DirectedWeights {
    DirectedWeights::from_fn(g, |_| {
        Complex64::from_polar(
            rng.gen_range(0.1..1.2),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        )
    })
    .expect("nonzero weights")
}

fn random_factorization(
    rng: &mut ChaCha8Rng,
    g: &kacward::EmbeddedGraph,
    x: &UndirectedWeights,
) -> DirectedWeights {
    let mut values = vec![Complex64::new(0.0, 0.0); g.dir_edge_count()];
    for d in 0..g.dir_edge_count() {
        let de = g.dir_edge(d);
        if de.tail < de.head {
            let root = x.get(g.edge_of_dir(d)).sqrt();
            let scale = Complex64::from_polar(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            );
            values[d] = root * scale;
            values[g.reversed(d)] = root / scale;
        }
    }
    DirectedWeights::from_values(g, values).expect("nonzero weights")
}
