//! Optimal rigid superposition (Kabsch algorithm) via 3x3 SVD.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// A proper rigid motion fitted by `kabsch`, mapping the first point set
/// onto the second: `apply(p) = rotation * p + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    /// Row-major proper rotation (orthogonal, det = +1).
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
    /// Weighted RMSD of the fitted points under this motion, in Å.
    pub rmsd: f64,
}

impl Superposition {
    #[inline]
    pub fn apply(&self, p: Vec3) -> Vec3 {
        vec3::transform(&self.rotation, self.translation, p)
    }
}

/// Relative spread below which the point cloud counts as collinear.
const COLLINEAR_REL_TOL: f64 = 1e-9;

/// Fit the proper rotation and translation minimizing the weighted RMSD of
/// `from` mapped onto `to` (so for `to = R*from + t`, the fit recovers `R`
/// and `t`). Reflections are excluded by sign-correcting the smallest
/// singular vector. Weights default to uniform.
pub fn kabsch(from: &[Vec3], to: &[Vec3], weights: Option<&[f64]>) -> Result<Superposition> {
    let n = from.len();
    if n != to.len() {
        return Err(Error::InvalidParameter(format!(
            "point counts differ: {} vs {}",
            n,
            to.len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "superposition needs at least 3 points, got {n}"
        )));
    }
    let uniform = vec![1.0; n];
    let w: &[f64] = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} weights for {} points",
                    w.len(),
                    n
                )));
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(Error::InvalidParameter(
                    "weights must be finite and positive".into(),
                ));
            }
            w
        }
        None => &uniform,
    };
    let w_total: f64 = w.iter().sum();

    let mut mu_from = [0.0; 3];
    let mut mu_to = [0.0; 3];
    for i in 0..n {
        mu_from = vec3::add(mu_from, vec3::scale(from[i], w[i]));
        mu_to = vec3::add(mu_to, vec3::scale(to[i], w[i]));
    }
    mu_from = vec3::scale(mu_from, 1.0 / w_total);
    mu_to = vec3::scale(mu_to, 1.0 / w_total);

    // Weighted cross-covariance H = sum_i w_i * (from_i - mu_from)(to_i - mu_to)^T;
    // maximizing tr(R H) over proper rotations gives the optimal R.
    let mut h = Matrix3::zeros();
    for i in 0..n {
        let a = vec3::sub(from[i], mu_from);
        let b = vec3::sub(to[i], mu_to);
        for r in 0..3 {
            for c in 0..3 {
                h[(r, c)] += w[i] * a[r] * b[c];
            }
        }
    }

    let svd = h.svd(true, true);
    let u: Matrix3<f64> = svd
        .u
        .ok_or_else(|| Error::DegenerateGeometry("SVD failed to converge".into()))?;
    let v_t: Matrix3<f64> = svd
        .v_t
        .ok_or_else(|| Error::DegenerateGeometry("SVD failed to converge".into()))?;
    let s = svd.singular_values; // sorted descending
    if s[0] <= 0.0 || s[1] < COLLINEAR_REL_TOL * s[0] {
        return Err(Error::DegenerateGeometry(
            "point set is coincident or collinear; rotation is not determined".into(),
        ));
    }

    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant();
    let sign = if d < 0.0 { -1.0 } else { 1.0 };
    let diag = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, sign));
    let r = v * diag * u.transpose();

    let mut rotation = [[0.0; 3]; 3];
    for (row, rot_row) in rotation.iter_mut().enumerate() {
        for (col, v) in rot_row.iter_mut().enumerate() {
            *v = r[(row, col)];
        }
    }
    let translation = vec3::sub(mu_to, vec3::transform(&rotation, [0.0; 3], mu_from));

    let mut ss = 0.0;
    for i in 0..n {
        let moved = vec3::transform(&rotation, translation, from[i]);
        ss += w[i] * vec3::dist_sq(moved, to[i]);
    }
    let rmsd = (ss / w_total).sqrt();

    Ok(Superposition {
        rotation,
        translation,
        rmsd,
    })
}
