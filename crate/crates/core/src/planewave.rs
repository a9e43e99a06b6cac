//! Random channel fields built from plane waves.
//!
//! A realization is `h(r) = M^{-1/2} Σ a_m exp(j κ_m·r)` with circular
//! complex Gaussian `a_m` of unit variance and wavevectors drawn uniformly on
//! the sphere `|κ| = k0`. Every term solves the Helmholtz equation, so every
//! realization does, and the field is a Gaussian random field in the limit
//! of many waves with correlation `sin(k0 D)/(k0 D)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use rayon::prelude::*;

use crate::geometry::Quadrature;
use crate::kernels::sinc_unnormalized;
use crate::{Error, Point, Result, C64};

/// One sampled realization on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanewaveField {
    pub grid: Quadrature,
    pub values: Vec<C64>,
    pub k0: f64,
    pub n_waves: usize,
    pub seed: u64,
}

fn realization_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_waves<R: Rng>(k0: f64, n_waves: usize, rng: &mut R) -> Vec<([f64; 3], C64)> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..n_waves)
        .map(|_| {
            let d: [f64; 3] = UnitSphere.sample(rng);
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (
                [k0 * d[0], k0 * d[1], k0 * d[2]],
                C64::new(re * scale, im * scale),
            )
        })
        .collect()
}

fn evaluate(waves: &[([f64; 3], C64)], p: &Point) -> C64 {
    let norm = 1.0 / (waves.len() as f64).sqrt();
    waves
        .iter()
        .map(|(kv, a)| a * C64::from_polar(1.0, kv[0] * p[0] + kv[1] * p[1] + kv[2] * p[2]))
        .sum::<C64>()
        * norm
}

fn check_params(k0: f64, n_waves: usize) -> Result<()> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::InvalidArgument(format!("k0 must be > 0, got {k0}")));
    }
    if n_waves == 0 {
        return Err(Error::InvalidArgument("n_waves must be >= 1".into()));
    }
    Ok(())
}

/// Realization number `stream` of the ensemble fixed by `seed`.
///
/// Realizations come from independent ChaCha streams, so a Monte-Carlo run
/// gives the same numbers however it is split across threads.
pub fn sample_planewave_realization(
    grid: &Quadrature,
    k0: f64,
    n_waves: usize,
    seed: u64,
    stream: u64,
) -> Result<PlanewaveField> {
    check_params(k0, n_waves)?;
    let waves = draw_waves(k0, n_waves, &mut realization_rng(seed, stream));
    let values = grid
        .points()
        .par_iter()
        .map(|p| evaluate(&waves, p))
        .collect();
    Ok(PlanewaveField {
        grid: grid.clone(),
        values,
        k0,
        n_waves,
        seed,
    })
}

/// Samples one realization; identical seeds give bit-identical fields.
pub fn sample_planewave_field(
    grid: &Quadrature,
    k0: f64,
    n_waves: usize,
    seed: u64,
) -> Result<PlanewaveField> {
    sample_planewave_realization(grid, k0, n_waves, seed, 0)
}

/// Three independent scalar components of a vector field, from streams
/// 1, 2 and 3 of `seed`.
pub fn sample_vector_field(
    grid: &Quadrature,
    k0: f64,
    n_waves: usize,
    seed: u64,
) -> Result<[PlanewaveField; 3]> {
    Ok([
        sample_planewave_realization(grid, k0, n_waves, seed, 1)?,
        sample_planewave_realization(grid, k0, n_waves, seed, 2)?,
        sample_planewave_realization(grid, k0, n_waves, seed, 3)?,
    ])
}

/// Correlation `sin(k0 D)/(k0 D)` of the isotropic ensemble.
pub fn isotropic_correlation(k0: f64, distance: f64) -> f64 {
    sinc_unnormalized(k0 * distance)
}

/// Monte-Carlo estimate of `E[h(r) h*(s)]` over `realizations` draws.
pub fn empirical_correlation(
    r: &Point,
    s: &Point,
    k0: f64,
    n_waves: usize,
    realizations: usize,
    seed: u64,
) -> Result<C64> {
    check_params(k0, n_waves)?;
    if realizations == 0 {
        return Err(Error::InvalidArgument("realizations must be >= 1".into()));
    }
    let products: Vec<C64> = (0..realizations as u64)
        .into_par_iter()
        .map(|i| {
            let waves = draw_waves(k0, n_waves, &mut realization_rng(seed, i));
            evaluate(&waves, r) * evaluate(&waves, s).conj()
        })
        .collect();
    // Summed in index order so the estimate does not depend on thread count.
    Ok(products.iter().sum::<C64>() / realizations as f64)
}

/// Lattice shape `(nx, ny, nz)` of an x-fastest grid with the given spacing.
fn lattice_shape(points: &[Point], spacing: f64) -> Result<[usize; 3]> {
    let not_lattice =
        || Error::InvalidArgument("field is not sampled on a uniform 3D lattice".into());
    let first = *points.first().ok_or_else(not_lattice)?;
    let tol = 1e-6 * spacing;
    let same = |a: f64, b: f64| (a - b).abs() <= tol;
    let nx = points
        .iter()
        .take_while(|p| same(p[1], first[1]) && same(p[2], first[2]))
        .count();
    let nxy = points.iter().take_while(|p| same(p[2], first[2])).count();
    if nx == 0 || !nxy.is_multiple_of(nx) || !points.len().is_multiple_of(nxy) {
        return Err(not_lattice());
    }
    let shape = [nx, nxy / nx, points.len() / nxy];
    for (idx, p) in points.iter().enumerate() {
        let ijk = [idx % nx, (idx / nx) % shape[1], idx / nxy];
        for a in 0..3 {
            if !same(p[a], first[a] + ijk[a] as f64 * spacing) {
                return Err(not_lattice());
            }
        }
    }
    if shape.iter().any(|&n| n < 3) {
        return Err(Error::InvalidArgument(
            "lattice needs at least 3 points per axis for an interior".into(),
        ));
    }
    Ok(shape)
}

/// Relative Helmholtz residual `‖∇²h + k0²h‖ / ‖k0²h‖` over interior lattice
/// points, with the 7-point finite-difference Laplacian.
///
/// The grid must be an x-fastest 3D lattice of the given spacing, and the
/// spacing at most λ/8.
pub fn helmholtz_residual(field: &PlanewaveField, spacing: f64) -> Result<f64> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    if !(field.k0.is_finite() && field.k0 > 0.0) {
        return Err(Error::InvalidArgument("k0 must be > 0".into()));
    }
    let lambda = 2.0 * std::f64::consts::PI / field.k0;
    if spacing > lambda / 8.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "spacing {spacing} exceeds λ/8 = {}",
            lambda / 8.0
        )));
    }
    if field.values.len() != field.grid.len() {
        return Err(Error::InvalidArgument(
            "field values do not match the grid".into(),
        ));
    }
    let [nx, ny, nz] = lattice_shape(field.grid.points(), spacing)?;
    let h = &field.values;
    let at = |i: usize, j: usize, l: usize| h[i + nx * (j + ny * l)];
    let k2 = field.k0 * field.k0;
    let inv_h2 = 1.0 / (spacing * spacing);
    let (mut num, mut den) = (0.0, 0.0);
    for l in 1..nz - 1 {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let c = at(i, j, l);
                let lap = (at(i + 1, j, l)
                    + at(i - 1, j, l)
                    + at(i, j + 1, l)
                    + at(i, j - 1, l)
                    + at(i, j, l + 1)
                    + at(i, j, l - 1)
                    - c * 6.0)
                    * inv_h2;
                num += (lap + c * k2).norm_sqr();
                den += (c * k2).norm_sqr();
            }
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument(
            "field vanishes on the interior".into(),
        ));
    }
    Ok((num / den).sqrt())
}
