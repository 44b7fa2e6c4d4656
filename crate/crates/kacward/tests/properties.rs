//! Property tests for the angle identities and the xi root.

use kacward::graph::EmbeddedGraph;
use kacward::spectral::{charpoly_from_moduli, xi, XiQuery};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

/// A star graph: one center vertex with rays at the given angles.
fn star(angles: &[f64]) -> EmbeddedGraph {
    let mut vertices = vec![(0u64, Complex64::new(0.0, 0.0))];
    let mut edges = Vec::new();
    for (k, &a) in angles.iter().enumerate() {
        vertices.push(((k + 1) as u64, Complex64::from_polar(1.0, a)));
        edges.push((0u64, (k + 1) as u64));
    }
    EmbeddedGraph::build(&vertices, &edges, &[]).unwrap()
}

/// Distinct ray angles with a minimal gap, so no two rays overlap.
fn ray_angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI + 1e-3..PI - 1e-3, n).prop_filter_map(
        "rays must be separated",
        |mut v| {
            v.sort_by(f64::total_cmp);
            let ok = v.windows(2).all(|w| w[1] - w[0] > 1e-2);
            ok.then_some(v)
        },
    )
}

fn angle_mod_2pi_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    if d < -PI {
        d += 2.0 * PI;
    }
    d.abs()
}

proptest! {
    /// angle(-e, g) = -angle(-g, e) for distinct edges out of one vertex.
    #[test]
    fn angle_reflection_on_random_stars(angles in ray_angles(5)) {
        let g = star(&angles);
        let out: Vec<_> = g.out_edges(0).unwrap().to_vec();
        for &e in &out {
            for &h in &out {
                if e == h {
                    continue;
                }
                let lhs = g.turning_angle(e.reversed(), h).unwrap();
                let rhs = g.turning_angle(h.reversed(), e).unwrap();
                prop_assert!((lhs + rhs).abs() < 1e-12);
            }
        }
    }

    /// angle(-e1, g) = angle(-e2, g) + angle(-e1, e2) + pi  (mod 2 pi)
    /// for three distinct edges out of one vertex.
    #[test]
    fn three_edge_angle_identity_on_random_stars(angles in ray_angles(4)) {
        let g = star(&angles);
        let out: Vec<_> = g.out_edges(0).unwrap().to_vec();
        for &e1 in &out {
            for &e2 in &out {
                for &h in &out {
                    if e1 == e2 || e1 == h || e2 == h {
                        continue;
                    }
                    let lhs = g.turning_angle(e1.reversed(), h).unwrap();
                    let rhs = g.turning_angle(e2.reversed(), h).unwrap()
                        + g.turning_angle(e1.reversed(), e2).unwrap()
                        + PI;
                    prop_assert!(angle_mod_2pi_distance(lhs, rhs) < 1e-12);
                }
            }
        }
    }

    /// The xi equation's left side decreases strictly in s.
    #[test]
    fn arctan_sum_is_strictly_decreasing(
        moduli in prop::collection::vec(1e-3..10.0f64, 2..8),
        s1 in 1e-3..20.0f64,
        ds in 1e-3..5.0f64,
    ) {
        let sum = |s: f64| moduli.iter().map(|&a| (a / s).atan()).sum::<f64>();
        prop_assert!(sum(s1) > sum(s1 + ds));
    }

    /// xi solves its defining equation and increases in every coordinate.
    #[test]
    fn xi_solves_and_is_monotone(
        moduli in prop::collection::vec(1e-3..10.0f64, 2..8),
        bump_idx in 0usize..8,
        bump in 0.05..2.0f64,
    ) {
        let s = xi(&XiQuery::new(0, moduli.clone()));
        let residual: f64 = moduli.iter().map(|&a| (a / s).atan()).sum::<f64>() - FRAC_PI_2;
        prop_assert!(residual.abs() < 1e-9, "residual {residual} at s = {s}");

        let mut bumped = moduli.clone();
        let idx = bump_idx % bumped.len();
        bumped[idx] += bump;
        let s2 = xi(&XiQuery::new(0, bumped));
        prop_assert!(s2 > s, "xi must increase: {s2} <= {s}");
    }

    /// xi is the largest root of the block characteristic polynomial:
    /// the polynomial vanishes there and keeps a fixed sign beyond it.
    #[test]
    fn xi_is_largest_charpoly_root(
        moduli in prop::collection::vec(1e-2..5.0f64, 2..7),
    ) {
        let s = xi(&XiQuery::new(0, moduli.clone()));
        let at_root = charpoly_from_moduli(&moduli, s);
        // Scale sanity: the polynomial has degree d and leading term t^d.
        let scale = s.max(1.0).powi(moduli.len() as i32);
        prop_assert!(at_root.abs() < 1e-8 * scale);
        for k in 1..=4 {
            let t = s * (1.0 + 0.2 * k as f64) + 0.1;
            prop_assert!(charpoly_from_moduli(&moduli, t) > 0.0);
        }
    }
}
