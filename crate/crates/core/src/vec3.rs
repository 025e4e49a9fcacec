//! Minimal 3-vector helpers over `[f64; 3]`.
//!
//! Coordinates are plain arrays so they serialize compactly and stay
//! trivially copyable; the handful of operations the metrics need live here.

pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn dist_sq(a: Vec3, b: Vec3) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

#[inline]
pub fn centroid(points: &[Vec3]) -> Vec3 {
    let mut c = [0.0; 3];
    for p in points {
        c = add(c, *p);
    }
    scale(c, 1.0 / points.len() as f64)
}

/// Angle at `b` formed by `a-b-c`, in degrees.
pub fn angle_deg(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let u = sub(a, b);
    let v = sub(c, b);
    let cos = dot(u, v) / (norm(u) * norm(v));
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Signed dihedral angle a-b-c-d in degrees, in (-180, 180].
pub fn dihedral_deg(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    let b1 = sub(b, a);
    let b2 = sub(c, b);
    let b3 = sub(d, c);
    let n1 = cross(b1, b2);
    let n2 = cross(b2, b3);
    let m1 = cross(n1, scale(b2, 1.0 / norm(b2)));
    let x = dot(n1, n2);
    let y = dot(m1, n2);
    y.atan2(x).to_degrees()
}

/// Orientation sign of four points: the sign of det[p1-p4, p2-p4, p3-p4].
///
/// Used as the tetrahedral-parity convention: for a centre with four
/// neighbours pass the neighbours sorted by atom index; for three neighbours
/// pass them followed by the centre itself as the fourth point. Returns
/// `None` when the points are degenerate (near-coplanar relative to their
/// spread), in which case no parity should be asserted.
pub fn parity_sign(points: &[Vec3; 4]) -> Option<i8> {
    let u = sub(points[0], points[3]);
    let v = sub(points[1], points[3]);
    let w = sub(points[2], points[3]);
    let det = dot(u, cross(v, w));
    let scale = norm(u) * norm(v) * norm(w);
    if scale == 0.0 || det.abs() < 1e-4 * scale {
        return None;
    }
    Some(if det > 0.0 { 1 } else { -1 })
}

/// Apply a rotation matrix (row-major) and translation to a point.
#[inline]
pub fn transform(rot: &[[f64; 3]; 3], trans: Vec3, p: Vec3) -> Vec3 {
    [
        rot[0][0] * p[0] + rot[0][1] * p[1] + rot[0][2] * p[2] + trans[0],
        rot[1][0] * p[0] + rot[1][1] * p[1] + rot[1][2] * p[2] + trans[1],
        rot[2][0] * p[0] + rot[2][1] * p[1] + rot[2][2] * p[2] + trans[2],
    ]
}
