//! Isoradial patch generators, the classical Z-invariant couplings, and
//! graph-file emission (including a rhombic round trip).

use kacward::isoradial::{
    hexagonal_patch, rhombic_from_str, square_patch, triangular_patch, RhombicFile,
};

fn main() {
    for (name, patch, closed_form) in [
        ("square", square_patch(2), 2.0f64.sqrt() - 1.0),
        ("triangular", triangular_patch(2), 2.0 - 3.0f64.sqrt()),
        ("hexagonal", hexagonal_patch(2), 1.0 / 3.0f64.sqrt()),
    ] {
        let g = patch.graph();
        let (k, kk) = patch.angle_bounds();
        let j = patch.zinvariant_couplings().unwrap();
        println!(
            "{name}: {} vertices, {} edges, {} faces, theta in [{k:.6}, {kk:.6}]",
            g.vertex_count(),
            g.edge_count(),
            g.face_count()
        );
        println!(
            "  tanh J = {:.12} (closed form {:.12}), J = {:.12}",
            j.get(0).tanh(),
            closed_form,
            j.get(0)
        );
    }

    // Emit a patch as a graph file with dual vertices and theta annotations.
    let patch = square_patch(3);
    let out = std::env::temp_dir().join("square-3.graph");
    patch.to_graph_file().write_path(&out).unwrap();
    println!(
        "\nwrote {} ({} edges)",
        out.display(),
        patch.graph().edge_count()
    );
    println!("try: kacward validate {}", out.display());

    // A rhombic tiling with two alternating angles parses into a valid
    // isoradial graph with angle sums pi around interior vertices.
    let strip = two_angle_strip(5, 3);
    let rhombic_path = std::env::temp_dir().join("two-angle-strip.rhombi");
    std::fs::write(&rhombic_path, &strip).unwrap();
    let iso = rhombic_from_str(&strip).unwrap();
    let (k, kk) = iso.angle_bounds();
    println!(
        "\ntwo-angle strip from {}: {} vertices, {} edges, {} faces, theta in [{k:.6}, {kk:.6}]",
        rhombic_path.display(),
        iso.graph().vertex_count(),
        iso.graph().edge_count(),
        iso.graph().face_count()
    );
}

/// A quadrilateral lattice with unit horizontal steps and row steps
/// alternating between 2 pi/3 and pi/3, two-colored so the primal diagonals
/// carry angles pi/6 and pi/3.
fn two_angle_strip(width: usize, height: usize) -> String {
    use num_complex::Complex64;
    use std::f64::consts::PI;
    let beta_row = |l: usize| if l % 2 == 0 { 2.0 * PI / 3.0 } else { PI / 3.0 };
    let point = |i: usize, j: usize| {
        let mut p = Complex64::new(i as f64, 0.0);
        for l in 0..j {
            p += Complex64::from_polar(1.0, beta_row(l));
        }
        p
    };
    let mut file = RhombicFile::default();
    for j in 0..height {
        for i in 0..width {
            let quad = [
                point(i, j),
                point(i + 1, j),
                point(i + 1, j + 1),
                point(i, j + 1),
            ];
            let rhombus = if (i + j) % 2 == 0 {
                quad
            } else {
                [quad[1], quad[2], quad[3], quad[0]]
            };
            file.rhombi.push(rhombus);
        }
    }
    file.render()
}
