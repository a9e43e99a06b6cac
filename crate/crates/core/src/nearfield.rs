//! Array response vectors of a uniform linear array and distance-domain
//! orthogonality of near-field users.
//!
//! Elements sit on the x axis, centered at the origin. A user at distance `r`
//! and angle `θ` from broadside is placed at `(-r sinθ, r cosθ)`, which makes
//! the near-field vector tend to the far-field vector `exp(-jk x_n sinθ)` up
//! to a global phase as `r` grows.

use rayon::prelude::*;

use crate::{Error, Result, C64};

/// Uniform linear array centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformLinearArray {
    n_elements: usize,
    spacing: f64,
}

impl UniformLinearArray {
    pub fn new(n_elements: usize, spacing: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidArgument(
                "array needs at least one element".into(),
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "spacing must be > 0, got {spacing}"
            )));
        }
        Ok(Self {
            n_elements,
            spacing,
        })
    }

    /// Array with λ/2 spacing.
    pub fn half_wavelength(n_elements: usize, wavelength: f64) -> Result<Self> {
        Self::new(n_elements, wavelength / 2.0)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Element x coordinates.
    pub fn positions(&self) -> Vec<f64> {
        let mid = (self.n_elements as f64 - 1.0) / 2.0;
        (0..self.n_elements)
            .map(|n| (n as f64 - mid) * self.spacing)
            .collect()
    }

    /// Physical length `N d`.
    pub fn aperture(&self) -> f64 {
        self.n_elements as f64 * self.spacing
    }

    /// Rayleigh distance `2 D²/λ` of the aperture.
    pub fn rayleigh_distance(&self, wavelength: f64) -> f64 {
        2.0 * self.aperture().powi(2) / wavelength
    }
}

/// User location in polar coordinates about the array center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldUser {
    pub distance: f64,
    pub angle: f64,
}

impl NearFieldUser {
    pub fn new(distance: f64, angle: f64) -> Self {
        Self { distance, angle }
    }

    /// Cartesian position in the array plane.
    pub fn position(&self) -> [f64; 2] {
        [
            -self.distance * self.angle.sin(),
            self.distance * self.angle.cos(),
        ]
    }
}

/// Phase model of the near-field response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseModel {
    /// Exact element-to-user distance.
    #[default]
    Exact,
    /// Second-order expansion `r + x sinθ + x² cos²θ / (2r)`.
    Fresnel,
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be > 0, got {k}"
        )));
    }
    Ok(())
}

/// Planar-wave response: element `n` gets `exp(-jk x_n sinθ)/√N`.
pub fn farfield_steering(array: &UniformLinearArray, k: f64, angle: f64) -> Result<Vec<C64>> {
    check_k(k)?;
    if !(angle.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!(
            "|θ| must be < π/2, got {angle}"
        )));
    }
    let norm = 1.0 / (array.n_elements as f64).sqrt();
    let s = angle.sin();
    Ok(array
        .positions()
        .iter()
        .map(|x| C64::from_polar(norm, -k * x * s))
        .collect())
}

/// Spherical-wave response with the exact distance phase.
pub fn nearfield_steering(
    array: &UniformLinearArray,
    k: f64,
    user: NearFieldUser,
) -> Result<Vec<C64>> {
    nearfield_steering_with(array, k, user, PhaseModel::Exact)
}

/// Spherical-wave response: element `n` gets `exp(-jk d_n)/√N`.
pub fn nearfield_steering_with(
    array: &UniformLinearArray,
    k: f64,
    user: NearFieldUser,
    model: PhaseModel,
) -> Result<Vec<C64>> {
    check_k(k)?;
    let r = user.distance;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "user distance must be > 0, got {r}"
        )));
    }
    if !user.angle.is_finite() {
        return Err(Error::InvalidArgument("user angle must be finite".into()));
    }
    let [ux, uy] = user.position();
    let (s, c) = user.angle.sin_cos();
    let norm = 1.0 / (array.n_elements as f64).sqrt();
    array
        .positions()
        .iter()
        .map(|&x| {
            let exact = (ux - x).hypot(uy);
            if exact <= 1e-12 * r.max(array.spacing) {
                return Err(Error::Geometry(format!(
                    "user at ({ux}, {uy}) coincides with the element at x = {x}"
                )));
            }
            let d = match model {
                PhaseModel::Exact => exact,
                PhaseModel::Fresnel => r + x * s + x * x * c * c / (2.0 * r),
            };
            Ok(C64::from_polar(norm, -k * d))
        })
        .collect()
}

/// `|v1^H v2| / (‖v1‖ ‖v2‖)`.
pub fn beam_correlation(v1: &[C64], v2: &[C64]) -> Result<f64> {
    if v1.len() != v2.len() {
        return Err(Error::InvalidArgument(format!(
            "vector lengths differ: {} vs {}",
            v1.len(),
            v2.len()
        )));
    }
    let n1 = v1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n2 = v2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::InvalidArgument(
            "correlation of a zero vector".into(),
        ));
    }
    let inner: C64 = v1.iter().zip(v2).map(|(a, b)| a.conj() * b).sum();
    Ok((inner.norm() / (n1 * n2)).min(1.0))
}

/// One array size of an LDMA sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdmaPoint {
    pub n_elements: usize,
    /// Near-field correlation of the two users.
    pub correlation: f64,
    /// Far-field correlation of the same users; distance-blind, so always 1.
    pub farfield_correlation: f64,
    /// Both users lie inside the array's Rayleigh distance.
    pub within_rayleigh: bool,
}

/// Correlation between two users at the same angle and distances `r1`,
/// `r2`, for λ/2-spaced arrays of each size.
pub fn ldma_sweep(sizes: &[usize], k: f64, angle: f64, r1: f64, r2: f64) -> Result<Vec<LdmaPoint>> {
    check_k(k)?;
    let wavelength = 2.0 * std::f64::consts::PI / k;
    sizes
        .par_iter()
        .map(|&n| {
            let array = UniformLinearArray::half_wavelength(n, wavelength)?;
            let a = nearfield_steering(&array, k, NearFieldUser::new(r1, angle))?;
            let b = nearfield_steering(&array, k, NearFieldUser::new(r2, angle))?;
            let ff = farfield_steering(&array, k, angle)?;
            let rd = array.rayleigh_distance(wavelength);
            Ok(LdmaPoint {
                n_elements: n,
                correlation: beam_correlation(&a, &b)?,
                farfield_correlation: beam_correlation(&ff, &ff)?,
                within_rayleigh: r1 < rd && r2 < rd,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const LAMBDA: f64 = 0.01;

    fn k() -> f64 {
        2.0 * PI / LAMBDA
    }

    #[test]
    fn broadside_is_uniform() {
        let a = UniformLinearArray::half_wavelength(16, LAMBDA).unwrap();
        let v = farfield_steering(&a, k(), 0.0).unwrap();
        assert!(v.iter().all(|z| (z - C64::new(0.25, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn nyquist_angles_are_orthogonal() {
        let a = UniformLinearArray::half_wavelength(64, LAMBDA).unwrap();
        let v1 = farfield_steering(&a, k(), 0.0).unwrap();
        let v2 = farfield_steering(&a, k(), (2.0f64 / 64.0).asin()).unwrap();
        assert!(beam_correlation(&v1, &v2).unwrap() < 1e-10);
    }

    #[test]
    fn farfield_matches_phase_oracle() {
        let a = UniformLinearArray::half_wavelength(8, LAMBDA).unwrap();
        let th = PI / 6.0;
        let v = farfield_steering(&a, k(), th).unwrap();
        for (n, z) in v.iter().enumerate() {
            let x = (n as f64 - 3.5) * LAMBDA / 2.0;
            let phase = -k() * x * 0.5;
            let want = C64::new(phase.cos(), phase.sin()) / 8f64.sqrt();
            assert!((z - want).norm() < 1e-12);
        }
    }

    #[test]
    fn endfire_rejected() {
        let a = UniformLinearArray::half_wavelength(4, LAMBDA).unwrap();
        assert!(farfield_steering(&a, k(), PI / 2.0).is_err());
    }

    #[test]
    fn nearfield_tends_to_farfield() {
        let a = UniformLinearArray::half_wavelength(32, LAMBDA).unwrap();
        let th = 0.3;
        let ff = farfield_steering(&a, k(), th).unwrap();
        let nf = nearfield_steering(&a, k(), NearFieldUser::new(1e6 * LAMBDA, th)).unwrap();
        assert!(beam_correlation(&ff, &nf).unwrap() >= 0.999);
    }

    #[test]
    fn vectors_are_unit_norm() {
        let a = UniformLinearArray::half_wavelength(100, LAMBDA).unwrap();
        let v = nearfield_steering(&a, k(), NearFieldUser::new(2.0, -0.4)).unwrap();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collocated_user_is_a_geometry_error() {
        let a = UniformLinearArray::new(3, 1.0).unwrap();
        // Element at x = 1 corresponds to r = 1, θ = -π/2.
        let r = nearfield_steering(&a, k(), NearFieldUser::new(1.0, -PI / 2.0));
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn fresnel_close_to_exact_far_out() {
        let a = UniformLinearArray::half_wavelength(64, LAMBDA).unwrap();
        let u = NearFieldUser::new(10.0, 0.2);
        let e = nearfield_steering(&a, k(), u).unwrap();
        let f = nearfield_steering_with(&a, k(), u, PhaseModel::Fresnel).unwrap();
        assert!(beam_correlation(&e, &f).unwrap() > 0.9999);
    }

    #[test]
    fn correlation_basics() {
        let v = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.1)];
        assert!((beam_correlation(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        let e1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let e2 = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        assert_eq!(beam_correlation(&e1, &e2).unwrap(), 0.0);
        let z = vec![C64::new(0.0, 0.0); 2];
        assert!(beam_correlation(&z, &e1).is_err());
        assert!(beam_correlation(&e1, &v[..1]).is_err());
    }

    #[test]
    fn single_element_and_equal_distances() {
        let pts = ldma_sweep(&[1, 64, 1024], k(), 0.0, 5.0, 5.0).unwrap();
        assert!(pts.iter().all(|p| (p.correlation - 1.0).abs() < 1e-12));
        let pts = ldma_sweep(&[1], k(), 0.0, 5.0, 20.0).unwrap();
        assert!((pts[0].correlation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn larger_arrays_separate_distances() {
        let pts = ldma_sweep(&[64, 1024], k(), 0.0, 5.0, 20.0).unwrap();
        assert!(pts[1].correlation < pts[0].correlation);
        assert!(pts.iter().all(|p| p.within_rayleigh));
        assert!(pts
            .iter()
            .all(|p| (p.farfield_correlation - 1.0).abs() < 1e-12));
    }
}
