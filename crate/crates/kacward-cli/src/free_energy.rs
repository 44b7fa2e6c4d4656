//! `kacward free-energy`: sweep free energy densities over a beta grid and
//! a growing family of subtilings, one CSV row per applicable method.
//!
//! Rows carry the core columns of the library's CSV schema plus the
//! boundary-to-volume ratio and a status column; out-of-regime trace-series
//! points are flagged, not fatal.

use std::path::Path;

use num_complex::Complex64;

use kacward::graph::{DualEmbedding, Subtiling};
use kacward::ising::{
    free_energy_density, BoundaryCondition, CouplingSystem, FreeEnergyMethod, FreeEnergyResult,
    BRUTE_FORCE_SPIN_LIMIT,
};
use kacward::isoradial::{hexagonal_patch, square_patch, triangular_patch, IsoradialGraph};
use kacward::Error;

use crate::common::{
    beta_grid, load_graph, parse_grid, write_output, CouplingSpec, EXIT_INPUT_ERROR, EXIT_OK,
};

pub struct FreeEnergyArgs<'a> {
    pub family: &'a str,
    pub n_max: usize,
    pub bc: BoundaryCondition,
    pub couplings: &'a str,
    pub re: &'a str,
    pub im: &'a str,
    pub graph: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub tol: f64,
}

struct Job {
    id: String,
    sub: Subtiling,
    dual: Option<DualEmbedding>,
    couplings: CouplingSystem,
}

pub fn run(args: FreeEnergyArgs) -> i32 {
    let (re, im) = match (parse_grid(args.re), parse_grid(args.im)) {
        (Ok(re), Ok(im)) => (re, im),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let betas = beta_grid(&re, &im);
    let jobs = match build_jobs(&args) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };

    let mut csv = String::from(FreeEnergyResult::csv_header());
    csv.push_str(",boundary_ratio,status\n");
    for job in &jobs {
        let graph = job.sub.graph();
        let ratio = job.sub.boundary_ratio();
        for &beta in &betas {
            for method in [
                FreeEnergyMethod::Brute,
                FreeEnergyMethod::Determinant,
                FreeEnergyMethod::TraceSeries,
            ] {
                if !method_applicable(method, beta, &job.sub, args.bc) {
                    continue;
                }
                let result = free_energy_density(
                    &job.sub,
                    job.dual.as_ref(),
                    &job.couplings,
                    beta,
                    args.bc,
                    method,
                    args.tol,
                );
                match result {
                    Ok(r) => {
                        csv.push_str(&r.csv_row(
                            &job.id,
                            graph.vertex_count(),
                            graph.edge_count(),
                            args.bc,
                        ));
                        csv.push_str(&format!(",{ratio},ok\n"));
                    }
                    Err(Error::NotInRegime { norm }) => {
                        csv.push_str(&empty_row(&job.id, graph, args.bc, beta, method));
                        csv.push_str(&format!(",{ratio},not-in-regime(norm={norm})\n"));
                    }
                    Err(Error::BranchFailure(edge)) => {
                        csv.push_str(&empty_row(&job.id, graph, args.bc, beta, method));
                        csv.push_str(&format!(
                            ",{ratio},branch-failure(edge=({}-{}))\n",
                            edge.0, edge.1
                        ));
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT_ERROR;
                    }
                }
            }
        }
    }

    let meta = serde_json::json!({
        "command": "free-energy",
        "version": env!("CARGO_PKG_VERSION"),
        "graph_family": args.family,
        "n_max": args.n_max,
        "bc": args.bc.to_string(),
        "couplings": args.couplings,
        "re": args.re,
        "im": args.im,
        "graph": args.graph.map(|p| p.display().to_string()),
        "tol": args.tol,
    });
    if let Err(e) = write_output(args.out, &csv, meta) {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    EXIT_OK
}

fn empty_row(
    id: &str,
    graph: &kacward::EmbeddedGraph,
    bc: BoundaryCondition,
    beta: Complex64,
    method: FreeEnergyMethod,
) -> String {
    format!(
        "{},{},{},{},{},{},{},,,",
        id,
        graph.vertex_count(),
        graph.edge_count(),
        bc,
        beta.re,
        beta.im,
        method
    )
}

fn method_applicable(
    method: FreeEnergyMethod,
    beta: Complex64,
    sub: &Subtiling,
    bc: BoundaryCondition,
) -> bool {
    if beta.norm() == 0.0 {
        return false;
    }
    let free_spins = match bc {
        BoundaryCondition::Free => sub.graph().vertex_count(),
        BoundaryCondition::Plus => sub.interior_count(),
    };
    if bc == BoundaryCondition::Plus && sub.interior_count() == 0 {
        return false;
    }
    match method {
        FreeEnergyMethod::Brute => beta.im == 0.0 && free_spins <= BRUTE_FORCE_SPIN_LIMIT,
        FreeEnergyMethod::Determinant => beta.im == 0.0 && beta.re > 0.0,
        FreeEnergyMethod::TraceSeries => beta.re > 0.0,
    }
}

fn build_jobs(args: &FreeEnergyArgs) -> Result<Vec<Job>, String> {
    let spec = CouplingSpec::parse(args.couplings)?;
    match args.family {
        "square" | "tri" | "hex" => {
            if args.n_max == 0 {
                return Err("n-max must be at least 1".into());
            }
            let mut jobs = Vec::new();
            for n in 1..=args.n_max {
                let patch: IsoradialGraph = match args.family {
                    "square" => square_patch(n),
                    "tri" => triangular_patch(n),
                    _ => hexagonal_patch(n),
                };
                let couplings = match &spec {
                    CouplingSpec::ZInvariant => {
                        patch.zinvariant_couplings().map_err(|e| e.to_string())?
                    }
                    CouplingSpec::Constant(j) => {
                        CouplingSystem::constant(patch.graph(), *j).map_err(|e| e.to_string())?
                    }
                    CouplingSpec::File(_) => {
                        return Err(
                            "coupling files apply to --graph-family file, not generators".into(),
                        )
                    }
                };
                jobs.push(Job {
                    id: format!("{}-{n}", args.family),
                    sub: patch.subtiling(),
                    dual: Some(patch.dual().clone()),
                    couplings,
                });
            }
            Ok(jobs)
        }
        "file" => {
            let path = args
                .graph
                .ok_or("--graph-family file needs --graph <path>")?;
            let loaded = load_graph(path)?;
            let couplings = spec.resolve(&loaded)?;
            Ok(vec![Job {
                id: path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "graph".into()),
                sub: Subtiling::whole_arc(loaded.graph.clone()),
                dual: loaded.dual,
                couplings,
            }])
        }
        other => Err(format!(
            "unknown graph family '{other}' (square, tri, hex or file)"
        )),
    }
}
