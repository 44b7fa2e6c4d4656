//! High and low-temperature regimes of complex inverse temperature, the
//! envelope functions that bound the transition-matrix norm over them, and
//! certified norm bounds for concrete weighted graphs.
//!
//! Both regime sets are open: boundary points do not belong to them.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::ising::CouplingSystem;
use crate::numeric::abs_tanh;
use crate::spectral::{is_contractive, spectral_radius_dense, xi, XiQuery};
use crate::weights::DirectedWeights;

/// Whether a query concerns the high-temperature weights `tanh(beta J)` on
/// the primal graph or the low-temperature weights `exp(-2 beta J)` on the
/// dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    High,
    Low,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::High => write!(f, "high"),
            Side::Low => write!(f, "low"),
        }
    }
}

/// A membership / envelope query: complex inverse temperature together with
/// the coupling bounds `0 < m <= M` and the temperature side.
#[derive(Debug, Clone, Copy)]
pub struct RegimeQuery {
    pub beta: Complex64,
    pub lower: f64,
    pub upper: f64,
    pub side: Side,
}

impl RegimeQuery {
    pub fn new(beta: Complex64, lower: f64, upper: f64, side: Side) -> Self {
        assert!(
            lower > 0.0 && lower <= upper && upper.is_finite(),
            "coupling bounds must satisfy 0 < m <= M < infinity"
        );
        RegimeQuery {
            beta,
            lower,
            upper,
            side,
        }
    }

    /// Membership of `beta` in the regime selected by `side`.
    pub fn in_regime(&self) -> bool {
        match self.side {
            Side::High => in_high_regime(self),
            Side::Low => in_low_regime(self),
        }
    }
}

/// The open high-temperature regime:
/// `0 < Re beta < 1`, `2M |Im beta| < pi/2` and
/// `cosh(2m Re beta) / (cosh(2m) cos(2M Im beta)) < 1`.
pub fn in_high_regime(q: &RegimeQuery) -> bool {
    debug_assert_eq!(q.side, Side::High);
    let re = q.beta.re;
    let im = q.beta.im;
    if !(re > 0.0 && re < 1.0) {
        return false;
    }
    if !(2.0 * q.upper * im.abs() < FRAC_PI_2) {
        return false;
    }
    let ratio = (2.0 * q.lower * re).cosh() / ((2.0 * q.lower).cosh() * (2.0 * q.upper * im).cos());
    ratio < 1.0
}

/// The open low-temperature regime: `Re beta > 1`.
pub fn in_low_regime(q: &RegimeQuery) -> bool {
    debug_assert_eq!(q.side, Side::Low);
    q.beta.re > 1.0
}

/// The high-temperature envelope
/// `L(beta) = sup_{j in [m, M]} |tanh(beta j)| / tanh(j)`,
/// evaluated by a 2048-point grid followed by golden-section refinement.
/// The supremum bounds the scaled weight moduli uniformly in the edge.
pub fn envelope_high(beta: Complex64, lower: f64, upper: f64) -> f64 {
    let f = |j: f64| abs_tanh(beta * j) / j.tanh();
    if lower == upper {
        return f(lower);
    }
    const GRID: usize = 2048;
    let step = (upper - lower) / GRID as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_j = lower;
    for i in 0..=GRID {
        let j = lower + step * i as f64;
        let v = f(j);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let refined = golden_section_max(&f, (best_j - step).max(lower), (best_j + step).min(upper));
    best.max(refined)
}

/// The low-temperature envelope
/// `L*(beta) = sup_{j in [m, M]} |exp(-2 beta j)| / exp(-2 j)
///           = exp(-2 j* (Re beta - 1))`
/// with the supremum at `j* = m` for `Re beta >= 1` and `j* = M` otherwise.
pub fn envelope_low(beta: Complex64, lower: f64, upper: f64) -> f64 {
    let j = if beta.re >= 1.0 { lower } else { upper };
    (-2.0 * j * (beta.re - 1.0)).exp()
}

fn golden_section_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// A certified upper bound on the spectral radius of the transition matrix
/// with the high- or low-temperature weights at complex `beta`.
///
/// `base` must be a contractive factorization of the weights at `beta = 1`
/// (`tanh J` on the primal for the high side, `exp(-2J)` on the dual for
/// the low side); the scaled moduli
/// `|x->(beta)| = sqrt(|w(beta)| / w(1)) |x->|` then factorize the weights
/// at `beta`, and the returned `max_z xi^z` dominates the spectral radius.
pub fn certified_norm_bound(
    graph: &EmbeddedGraph,
    j: &CouplingSystem,
    beta: Complex64,
    side: Side,
    base: &DirectedWeights,
) -> Result<f64> {
    base.check_cover(graph)?;
    if j.values().len() != graph.edge_count() {
        return Err(Error::MissingWeight {
            expected: graph.edge_count(),
            got: j.values().len(),
        });
    }
    if side == Side::High && beta.re <= 0.0 {
        return Err(Error::InvalidBeta {
            beta,
            reason: "high-temperature weights need Re beta > 0",
        });
    }
    let report = is_contractive(graph, base)?;
    if let Some(v) = report.first_violation() {
        return Err(Error::NotContractive {
            vertex: graph.label(v),
            sum: FRAC_PI_2 - report.slack(v),
        });
    }

    let ratio = |edge: usize| -> f64 {
        let jv = j.get(edge);
        match side {
            Side::High => abs_tanh(beta * jv) / jv.tanh(),
            Side::Low => (-2.0 * jv * (beta.re - 1.0)).exp(),
        }
    };

    let mut bound = 0.0f64;
    for z in 0..graph.vertex_count() {
        let moduli: Vec<f64> = graph
            .out_range(z)
            .map(|d| ratio(graph.edge_of_dir(d)) * base.get(d).norm_sqr())
            .collect();
        bound = bound.max(xi(&XiQuery::new(z, moduli)));
    }
    Ok(bound)
}

/// Graph context for [`regime_scan`]: the graph carrying the weights for
/// the chosen side (the dual graph for the low side), couplings aligned to
/// its edges, and a contractive base factorization.
pub struct ScanContext<'a> {
    pub graph: &'a EmbeddedGraph,
    pub couplings: &'a CouplingSystem,
    pub base: &'a DirectedWeights,
    pub side: Side,
}

/// Exact spectral radii are only computed for matrices up to this dimension.
pub const EXACT_RADIUS_DIR_EDGE_LIMIT: usize = 300;

/// One row of a regime scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub beta: Complex64,
    pub in_high: bool,
    pub in_low: bool,
    pub envelope_high: f64,
    pub envelope_low: f64,
    pub certified_bound: Option<f64>,
    pub spectral_radius: Option<f64>,
}

impl ScanRow {
    pub fn csv_header() -> &'static str {
        "re_beta,im_beta,in_high,in_low,l_high,l_low,cert_bound,rho_exact"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.beta.re,
            self.beta.im,
            self.in_high,
            self.in_low,
            self.envelope_high,
            self.envelope_low,
            opt(self.certified_bound),
            opt(self.spectral_radius)
        )
    }
}

/// Evaluate memberships and envelopes over a grid of `beta` values; with a
/// [`ScanContext`], also the certified norm bound and (for small matrices)
/// the exact spectral radius of the corresponding transition matrix.
pub fn regime_scan(
    betas: &[Complex64],
    lower: f64,
    upper: f64,
    ctx: Option<&ScanContext>,
) -> Vec<ScanRow> {
    betas
        .iter()
        .map(|&beta| {
            let in_high = in_high_regime(&RegimeQuery::new(beta, lower, upper, Side::High));
            let in_low = in_low_regime(&RegimeQuery::new(beta, lower, upper, Side::Low));
            let mut row = ScanRow {
                beta,
                in_high,
                in_low,
                envelope_high: envelope_high(beta, lower, upper),
                envelope_low: envelope_low(beta, lower, upper),
                certified_bound: None,
                spectral_radius: None,
            };
            if let Some(ctx) = ctx {
                row.certified_bound =
                    certified_norm_bound(ctx.graph, ctx.couplings, beta, ctx.side, ctx.base).ok();
                if ctx.graph.dir_edge_count() <= EXACT_RADIUS_DIR_EDGE_LIMIT {
                    row.spectral_radius = exact_radius(ctx, beta);
                }
            }
            row
        })
        .collect()
}

fn exact_radius(ctx: &ScanContext, beta: Complex64) -> Option<f64> {
    let weights = match ctx.side {
        Side::High => {
            crate::ising::high_temperature_weights(ctx.graph, ctx.couplings, beta).ok()?
        }
        Side::Low => crate::weights::UndirectedWeights::from_fn(ctx.graph, |e| {
            (-2.0 * beta * ctx.couplings.get(e)).exp()
        })
        .ok()?,
    };
    let lambda = crate::operator::transition_matrix(ctx.graph, &weights).ok()?;
    spectral_radius_dense(lambda.data()).ok()
}
