use nalgebra::{Matrix3, SymmetricEigen};

use crate::geom::{Transform, Vec3};
use crate::mesh::SolidMesh;
use crate::sampling::sample_surface;

/// Principal axes of the surface, as a rotation whose columns are the
/// covariance eigenvectors in descending eigenvalue order.
///
/// Each column is signed so its largest-magnitude entry is positive; if that
/// leaves a reflection, the last column is negated.
pub fn pca_axes(mesh: &SolidMesh, density: f64, seed: u64) -> Transform {
    let samples = sample_surface(mesh, density, seed).points;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<Vec3>() / n;
    let mut cov = Matrix3::zeros();
    for p in &samples {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut r = Matrix3::zeros();
    for (col, &k) in order.iter().enumerate() {
        let mut v: Vec3 = eig.eigenvectors.column(k).into();
        let big = (0..3).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        if v[big] < 0.0 {
            v = -v;
        }
        r.set_column(col, &v);
    }
    if r.determinant() < 0.0 {
        let last: Vec3 = -r.column(2);
        r.set_column(2, &last);
    }
    Transform {
        scale: 1.0,
        rotation: r,
        translation: Vec3::zeros(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{box_mesh, icosphere};

    fn degrees_between(a: &Vec3, b: &Vec3) -> f64 {
        a.normalize().dot(&b.normalize()).abs().min(1.0).acos().to_degrees()
    }

    #[test]
    fn axis_aligned_box() {
        let b = box_mesh(Vec3::zeros(), Vec3::new(4.0, 2.0, 1.0));
        let t = pca_axes(&b, 300.0, 0);
        assert!(t.is_orthonormal(1e-9));
        for (col, axis) in [Vec3::x(), Vec3::y(), Vec3::z()].iter().enumerate() {
            assert!(degrees_between(&t.rotation.column(col).into(), axis) < 1.0);
        }
    }

    #[test]
    fn rotated_box_recovers_long_axis() {
        let a = 30f64.to_radians();
        let rot = Matrix3::new(a.cos(), -a.sin(), 0.0, a.sin(), a.cos(), 0.0, 0.0, 0.0, 1.0);
        let b = box_mesh(Vec3::zeros(), Vec3::new(4.0, 2.0, 1.0)).transformed(&Transform {
            scale: 1.0,
            rotation: rot,
            translation: Vec3::new(1.0, -2.0, 0.5),
        });
        let t = pca_axes(&b, 300.0, 4);
        let long = rot * Vec3::x();
        assert!(degrees_between(&t.rotation.column(0).into(), &long) < 1.0);
    }

    #[test]
    fn sphere_is_deterministic_and_orthonormal() {
        let s = icosphere(1.0, 2);
        let a = pca_axes(&s, 3000.0, 11);
        assert!(a.is_orthonormal(1e-9));
        assert!(a.rotation.determinant() > 0.0);
        assert_eq!(a, pca_axes(&s, 3000.0, 11));
    }
}
