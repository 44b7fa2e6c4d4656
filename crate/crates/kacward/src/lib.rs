//! Kac-Ward operators for the planar Ising model.
//!
//! The crate builds embedded planar graphs, assembles the Kac-Ward
//! transition matrices over their directed edges, and uses them for three
//! things: exact partition functions through determinant identities,
//! closed-form operator norms and spectral-radius bounds, and certified
//! regions of complex inverse temperature where free energy densities stay
//! analytic. Brute-force oracles (spin enumeration, even-subgraph
//! expansion, dense spectra) verify every identity at desk scale.
//!
//! # Modules
//!
//! - [`graph`]: embedded graphs, subtilings, boundaries, duals.
//! - [`weights`]: complex edge weight systems and factorizations.
//! - [`operator`]: transition matrices, the Hermitian block matrix, and
//!   the Kac-Ward determinant.
//! - [`spectral`]: the xi root, operator norms, contractivity, dense
//!   reference spectra.
//! - [`ising`]: partition functions, even-subgraph generating functions,
//!   free energy densities including the complex trace-series route.
//! - [`regimes`]: high/low-temperature regime membership, envelopes, and
//!   certified norm bounds over complex inverse temperature.
//! - [`isoradial`]: isoradial patch generators, rhombic tiling input, and
//!   the self-dual Z-invariant couplings.
//! - [`io`]: the plain-text graph file format.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p kacward --example build_graph        # construction and validation
//! cargo run -p kacward --example kac_ward_identity  # determinant vs enumeration
//! cargo run -p kacward --example even_subgraphs     # cycle-space expansion
//! cargo run -p kacward --example operator_norm      # xi closed form vs SVD
//! cargo run -p kacward --example contractivity      # per-vertex slack reports
//! cargo run -p kacward --example isoradial_patches  # generators and couplings
//! cargo run -p kacward --example regime_scan        # complex-beta scan as CSV
//! cargo run -p kacward --example free_energy        # growing-patch sweeps
//! ```
//!
//! # Quick start
//!
//! ```
//! use kacward::isoradial::square_patch;
//! use kacward::ising::{partition_bruteforce, partition_free_kw, BoundaryCondition};
//! use num_complex::Complex64;
//!
//! let patch = square_patch(2);
//! let sub = patch.subtiling();
//! let j = patch.zinvariant_couplings().unwrap();
//! let beta = Complex64::new(0.8, 0.1);
//!
//! let z = partition_bruteforce(&sub, &j, beta, BoundaryCondition::Free).unwrap();
//! let z2 = partition_free_kw(&sub, &j, beta).unwrap();
//! assert!((z * z - z2).norm() <= 1e-9 * z2.norm());
//! ```

pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod ising;
pub mod isoradial;
pub mod numeric;
pub mod operator;
pub mod regimes;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use graph::{dual_subtiling, DirectedEdge, DualEmbedding, EmbeddedGraph, Subtiling};
pub use operator::{KacWardMatrix, MatrixKind};
pub use weights::{DirectedWeights, UndirectedWeights};
