//! `kacward scan-regimes`: tabulate regime membership, envelopes, and
//! (given a graph) certified norm bounds and exact spectral radii over a
//! complex inverse-temperature grid.

use std::path::Path;
use std::sync::Arc;

use kacward::graph::{DualEmbedding, EmbeddedGraph};
use kacward::ising::CouplingSystem;
use kacward::regimes::{regime_scan, ScanContext, ScanRow, Side};
use kacward::weights::DirectedWeights;
use num_complex::Complex64;

use crate::common::{
    beta_grid, load_graph, parse_grid, write_output, CouplingSpec, EXIT_INPUT_ERROR, EXIT_OK,
};

pub struct ScanArgs<'a> {
    pub lower: f64,
    pub upper: f64,
    pub re: &'a str,
    pub im: &'a str,
    pub graph: Option<&'a Path>,
    pub couplings: Option<&'a str>,
    pub side: Side,
    pub out: Option<&'a Path>,
}

/// Everything the scan context borrows, kept alive in one place.
struct ContextData {
    graph: Arc<EmbeddedGraph>,
    couplings: CouplingSystem,
    base: DirectedWeights,
}

pub fn run(args: ScanArgs) -> i32 {
    let (re, im) = match (parse_grid(args.re), parse_grid(args.im)) {
        (Ok(re), Ok(im)) => (re, im),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    if args.lower <= 0.0 || args.lower > args.upper {
        eprintln!("error: coupling bounds need 0 < m <= M");
        return EXIT_INPUT_ERROR;
    }
    let betas = beta_grid(&re, &im);

    let ctx_data = match build_context(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let ctx = ctx_data.as_ref().map(|d| ScanContext {
        graph: &d.graph,
        couplings: &d.couplings,
        base: &d.base,
        side: args.side,
    });

    let rows = regime_scan(&betas, args.lower, args.upper, ctx.as_ref());
    let mut csv = String::from(ScanRow::csv_header());
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }

    let meta = serde_json::json!({
        "command": "scan-regimes",
        "version": env!("CARGO_PKG_VERSION"),
        "m": args.lower,
        "M": args.upper,
        "re": args.re,
        "im": args.im,
        "graph": args.graph.map(|p| p.display().to_string()),
        "couplings": args.couplings,
        "side": args.side.to_string(),
        "rows": rows.len(),
    });
    if let Err(e) = write_output(args.out, &csv, meta) {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    EXIT_OK
}

fn build_context(args: &ScanArgs) -> Result<Option<ContextData>, String> {
    let Some(path) = args.graph else {
        return Ok(None);
    };
    let spec = CouplingSpec::parse(args.couplings.unwrap_or("zinvariant"))?;
    let loaded = load_graph(path)?;
    let j = spec.resolve(&loaded)?;

    match args.side {
        Side::High => {
            let base = spec.high_base(&loaded, &j)?;
            Ok(Some(ContextData {
                graph: loaded.graph.clone(),
                couplings: j,
                base,
            }))
        }
        Side::Low => {
            let dual: &DualEmbedding = loaded
                .dual
                .as_ref()
                .ok_or("side = low needs a dual_vertices section in the graph file")?;
            let dual_graph = dual.graph().clone();
            // Couplings transported to the dual edges via the pairing.
            let values: Vec<f64> = (0..dual_graph.edge_count())
                .map(|d| j.get(dual.primal_edge_of_dual(d)))
                .collect();
            let dual_j =
                CouplingSystem::from_values(&dual_graph, values).map_err(|e| e.to_string())?;
            // Contractive base for exp(-2J): z-invariant complement when
            // theta is annotated, symmetric square root otherwise.
            let base = match (&spec, &loaded.theta) {
                (CouplingSpec::ZInvariant, Some(theta)) => {
                    DirectedWeights::from_fn(&dual_graph, |d| {
                        let e = dual_graph.edge_of_dir(d);
                        let t = std::f64::consts::FRAC_PI_2 - theta[dual.primal_edge_of_dual(e)];
                        Complex64::new((t / 2.0).tan().sqrt(), 0.0)
                    })
                    .map_err(|e| e.to_string())?
                }
                _ => DirectedWeights::from_fn(&dual_graph, |d| {
                    let e = dual_graph.edge_of_dir(d);
                    Complex64::new((-dual_j.get(e)).exp(), 0.0)
                })
                .map_err(|e| e.to_string())?,
            };
            Ok(Some(ContextData {
                graph: dual_graph,
                couplings: dual_j,
                base,
            }))
        }
    }
}
