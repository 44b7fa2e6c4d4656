//! Shared plumbing for the subcommands: grid parsing, coupling
//! specifications, graph loading, and deterministic output writing.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use kacward::graph::{DualEmbedding, EmbeddedGraph};
use kacward::io::GraphFile;
use kacward::ising::CouplingSystem;
use kacward::weights::DirectedWeights;

/// Exit codes: 0 success, 1 verification failure, 2 input error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

/// Parse a `start:end:count` grid specification into inclusive sample points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{spec}' is not of the form start:end:count"));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid start '{}'", parts[0]))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid end '{}'", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect())
}

/// The complex grid, imaginary axis fastest, in deterministic order.
pub fn beta_grid(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(re.len() * im.len());
    for &r in re {
        for &i in im {
            out.push(Complex64::new(r, i));
        }
    }
    out
}

/// A loaded graph file together with the optional dual embedding and
/// per-edge theta annotations.
pub struct LoadedGraph {
    pub graph: Arc<EmbeddedGraph>,
    pub dual: Option<DualEmbedding>,
    pub theta: Option<Vec<f64>>,
}

pub fn load_graph(path: &Path) -> Result<LoadedGraph, String> {
    let file = GraphFile::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let graph = Arc::new(
        file.build_graph()
            .map_err(|e| format!("{}: {e}", path.display()))?,
    );
    let dual = match file
        .dual_centers(&graph)
        .map_err(|e| format!("{}: {e}", path.display()))?
    {
        Some(centers) => Some(
            DualEmbedding::build(graph.clone(), centers)
                .map_err(|e| format!("{}: dual: {e}", path.display()))?,
        ),
        None => None,
    };
    let theta = file
        .theta_by_edge(&graph)
        .map_err(|e| format!("{}: theta: {e}", path.display()))?;
    Ok(LoadedGraph { graph, dual, theta })
}

/// A coupling specification: `zinvariant`, `const:J`, or `file:PATH`.
#[derive(Debug, Clone)]
pub enum CouplingSpec {
    ZInvariant,
    Constant(f64),
    File(PathBuf),
}

impl CouplingSpec {
    pub fn parse(spec: &str) -> Result<Self, String> {
        if spec == "zinvariant" {
            return Ok(CouplingSpec::ZInvariant);
        }
        if let Some(j) = spec.strip_prefix("const:") {
            let j: f64 = j.parse().map_err(|_| format!("bad coupling value '{j}'"))?;
            if !(j > 0.0) {
                return Err("couplings must be positive".into());
            }
            return Ok(CouplingSpec::Constant(j));
        }
        if let Some(path) = spec.strip_prefix("file:") {
            return Ok(CouplingSpec::File(PathBuf::from(path)));
        }
        Err(format!(
            "coupling spec '{spec}' is not zinvariant, const:J or file:PATH"
        ))
    }

    /// Resolve against a loaded graph. Z-invariant couplings need theta
    /// annotations; coupling files list `id_a id_b J` lines.
    pub fn resolve(&self, loaded: &LoadedGraph) -> Result<CouplingSystem, String> {
        let graph = &loaded.graph;
        match self {
            CouplingSpec::Constant(j) => {
                CouplingSystem::constant(graph, *j).map_err(|e| e.to_string())
            }
            CouplingSpec::ZInvariant => {
                let theta = loaded
                    .theta
                    .as_ref()
                    .ok_or("zinvariant couplings need theta annotations in the graph file")?;
                let mut values = Vec::with_capacity(theta.len());
                for (e, &t) in theta.iter().enumerate() {
                    if t >= std::f64::consts::FRAC_PI_2 {
                        let (a, b) = graph.edge_labels(e);
                        return Err(format!("theta = {t} on edge ({a}, {b}) needs tanh J >= 1"));
                    }
                    values.push((t / 2.0).tan().atanh());
                }
                CouplingSystem::from_values(graph, values).map_err(|e| e.to_string())
            }
            CouplingSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let mut values = vec![None; graph.edge_count()];
                for (idx, raw) in text.lines().enumerate() {
                    let line = raw.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 3 {
                        return Err(format!("{}:{}: need id_a id_b J", path.display(), idx + 1));
                    }
                    let la: u64 = fields[0].parse().map_err(|_| "bad id".to_string())?;
                    let lb: u64 = fields[1].parse().map_err(|_| "bad id".to_string())?;
                    let j: f64 = fields[2].parse().map_err(|_| "bad coupling".to_string())?;
                    let a = graph
                        .vertex_by_label(la)
                        .ok_or(format!("unknown vertex {la}"))?;
                    let b = graph
                        .vertex_by_label(lb)
                        .ok_or(format!("unknown vertex {lb}"))?;
                    let e = graph
                        .edge_index_of(a, b)
                        .ok_or(format!("({la}, {lb}) is not an edge"))?;
                    values[e] = Some(j);
                }
                let values: Vec<f64> = values
                    .into_iter()
                    .enumerate()
                    .map(|(e, v)| {
                        v.ok_or_else(|| {
                            let (a, b) = graph.edge_labels(e);
                            format!("edge ({a}, {b}) has no coupling in {}", path.display())
                        })
                    })
                    .collect::<Result<_, String>>()?;
                CouplingSystem::from_values(graph, values).map_err(|e| e.to_string())
            }
        }
    }

    /// A contractive base factorization of `tanh J` for the high side, when
    /// one is available: the z-invariant weights if theta is annotated,
    /// otherwise the symmetric square root (checked later for contractivity).
    pub fn high_base(
        &self,
        loaded: &LoadedGraph,
        j: &CouplingSystem,
    ) -> Result<DirectedWeights, String> {
        let graph = &loaded.graph;
        match (self, &loaded.theta) {
            (CouplingSpec::ZInvariant, Some(theta)) => DirectedWeights::from_fn(graph, |d| {
                let t = theta[graph.edge_of_dir(d)];
                Complex64::new((t / 2.0).tan().sqrt(), 0.0)
            })
            .map_err(|e| e.to_string()),
            _ => {
                let tanh_j = kacward::weights::UndirectedWeights::from_fn(graph, |e| {
                    Complex64::new(j.get(e).tanh(), 0.0)
                })
                .map_err(|e| e.to_string())?;
                tanh_j.factorize_symmetric(graph).map_err(|e| e.to_string())
            }
        }
    }
}

/// Write `content` to `out` or stdout; alongside a file, also write a JSON
/// metadata sidecar (`<out>.meta.json`) echoing the run configuration.
pub fn write_output(
    out: Option<&Path>,
    content: &str,
    meta: serde_json::Value,
) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))?;
            let meta_path = sidecar_path(path);
            let rendered = serde_json::to_string_pretty(&meta).expect("metadata serializes");
            std::fs::write(&meta_path, rendered)
                .map_err(|e| format!("{}: {e}", meta_path.display()))?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}
