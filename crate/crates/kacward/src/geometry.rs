//! Planar geometry primitives: turning angles, orientation predicates,
//! segment intersection and point-in-polygon tests.
//!
//! All predicates work on `f64` coordinates with a fixed collinearity
//! tolerance; inputs are analytic lattice coordinates, not adversarial data.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used by the orientation predicate to decide collinearity.
pub const COLLINEAR_EPS: f64 = 1e-12;

/// Direction angle of the segment `tail -> head` in `(-pi, pi]`.
pub fn direction_angle(tail: Complex64, head: Complex64) -> Result<f64> {
    let d = head - tail;
    if d.norm() == 0.0 {
        return Err(Error::DegenerateEdge);
    }
    Ok(d.arg())
}

/// Turning angle from the segment `a_tail -> a_head` to `b_tail -> b_head`,
/// i.e. the principal argument of the ratio of the two direction vectors,
/// normalized to `(-pi, pi]`.
pub fn turning_angle(
    a_tail: Complex64,
    a_head: Complex64,
    b_tail: Complex64,
    b_head: Complex64,
) -> Result<f64> {
    let a = direction_angle(a_tail, a_head)?;
    let b = direction_angle(b_tail, b_head)?;
    Ok(normalize_angle(b - a))
}

/// Reduce an angle to the principal interval `(-pi, pi]`.
pub fn normalize_angle(mut theta: f64) -> f64 {
    while theta > std::f64::consts::PI {
        theta -= 2.0 * std::f64::consts::PI;
    }
    while theta <= -std::f64::consts::PI {
        theta += 2.0 * std::f64::consts::PI;
    }
    theta
}

/// Orientation of the triple (a, b, c): positive for counterclockwise,
/// negative for clockwise, zero when collinear within tolerance.
///
/// The cross product is compared against `COLLINEAR_EPS` scaled by the
/// magnitude of the operands so the predicate is invariant under scaling.
pub fn orient(a: Complex64, b: Complex64, c: Complex64) -> i8 {
    let u = b - a;
    let v = c - a;
    let cross = u.re * v.im - u.im * v.re;
    let scale = u.norm() * v.norm();
    if cross.abs() <= COLLINEAR_EPS * scale.max(1.0) {
        0
    } else if cross > 0.0 {
        1
    } else {
        -1
    }
}

/// True when `p` lies on the closed segment `a..b`, assuming collinearity.
fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) - COLLINEAR_EPS
        && p.re <= a.re.max(b.re) + COLLINEAR_EPS
        && p.im >= a.im.min(b.im) - COLLINEAR_EPS
        && p.im <= a.im.max(b.im) + COLLINEAR_EPS
}

/// True when `p` lies strictly inside the open segment `a..b` (collinear assumed).
fn strictly_inside_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    let len = (b - a).norm();
    let da = (p - a).norm();
    let db = (p - b).norm();
    da > COLLINEAR_EPS * len.max(1.0) && db > COLLINEAR_EPS * len.max(1.0) && on_segment(a, b, p)
}

/// True when the closed segments `p1..p2` and `q1..q2` intersect at any
/// point other than a shared endpoint.
///
/// `shared` lists how many endpoints the two segments have in common as
/// vertices of the graph (0, 1 or 2); segments sharing an endpoint are
/// still rejected if they overlap collinearly beyond the shared point.
pub fn segments_cross(
    p1: Complex64,
    p2: Complex64,
    q1: Complex64,
    q2: Complex64,
    shared: usize,
) -> bool {
    if shared >= 2 {
        // Same undirected segment; duplicate edges are caught elsewhere.
        return false;
    }
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);

    if shared == 1 {
        // Touching at the common endpoint is fine; a collinear overlap is not.
        if o1 == 0 && strictly_inside_segment(p1, p2, q1) {
            return true;
        }
        if o2 == 0 && strictly_inside_segment(p1, p2, q2) {
            return true;
        }
        if o3 == 0 && strictly_inside_segment(q1, q2, p1) {
            return true;
        }
        if o4 == 0 && strictly_inside_segment(q1, q2, p2) {
            return true;
        }
        return false;
    }

    // Proper crossing: the endpoints of each segment straddle the other.
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    // Degenerate contacts: an endpoint on the other segment, or collinear overlap.
    (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, p2, q2))
        || (o3 == 0 && on_segment(q1, q2, p1))
        || (o4 == 0 && on_segment(q1, q2, p2))
}

/// Twice the signed area of the polygon `cycle` (positive for counterclockwise).
pub fn signed_area_doubled(cycle: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for (i, &a) in cycle.iter().enumerate() {
        let b = cycle[(i + 1) % cycle.len()];
        acc += a.re * b.im - b.re * a.im;
    }
    acc
}

/// True when `p` lies strictly inside the simple polygon `cycle`.
pub fn point_in_polygon(cycle: &[Complex64], p: Complex64) -> bool {
    // Ray casting toward +x; boundary points count as outside.
    let mut inside = false;
    for (i, &a) in cycle.iter().enumerate() {
        let b = cycle[(i + 1) % cycle.len()];
        if orient(a, b, p) == 0 && on_segment(a, b, p) {
            return false;
        }
        if (a.im > p.im) != (b.im > p.im) {
            let x_cross = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if p.re < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}
