//! Degrees of freedom.
//!
//! Functional DoF counts the eigenvalues of a concentration operator above a
//! relative cut-off; channel DoF counts the significant singular values of a
//! channel operator. Both use the same relative threshold rule: a value is
//! significant when it is at least `threshold × max`.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;

use crate::geometry::{uniform_grid, Quadrature, Region};
use crate::kernels::{scalar_green, KernelSpec, WaveParams};
use crate::operators::{discretize, eig_hermitian, singular_values, svd_operator, SpectralResult};
use crate::{CMatrix, Error, Point, Result, C64};

/// Relative cut-off used when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Outcome of a degree-of-freedom count.
#[derive(Debug, Clone)]
pub struct DofReport {
    pub count: usize,
    pub threshold: f64,
    pub spectrum: SpectralResult,
    /// Analytic reference value, when one exists (2WT, area product, ...).
    pub prediction: Option<f64>,
}

fn check_threshold(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {eps}"
        )))
    }
}

/// Number of values at least `eps × max(values)`.
pub fn count_significant(values: &[f64], eps: f64) -> Result<usize> {
    check_threshold(eps)?;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !(max > 0.0) {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(values.iter().filter(|&&v| v >= eps * max).count())
}

/// Functional DoF: eigenvalues at or above `eps` times the largest.
pub fn functional_dof(spectrum: SpectralResult, eps: f64) -> Result<DofReport> {
    let count = count_significant(&spectrum.values, eps)?;
    Ok(DofReport {
        count,
        threshold: eps,
        spectrum,
        prediction: None,
    })
}

/// Eigen-decomposition of the time-limited, band-limited operator on
/// `[-T/2, T/2]` with bandwidth `W`.
///
/// Eigenvalues are energy concentration ratios in `[0, 1]`. Mode vectors are
/// in weighted coordinates; divide entry `i` by `√(T/grid_n)` for samples of
/// the L²-normalized prolate spheroidal wave functions.
pub fn pswf_modes(t: f64, w: f64, grid_n: usize) -> Result<SpectralResult> {
    for (name, v) in [("T", t), ("W", w)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    if grid_n < 64 {
        return Err(Error::InvalidArgument(format!(
            "grid must have at least 64 points, got {grid_n}"
        )));
    }
    let shannon = 2.0 * w * t;
    if (grid_n as f64) < 2.0 * shannon {
        return Err(Error::Resolution(format!(
            "{grid_n} points cannot resolve 2WT = {shannon}; need at least {}",
            (2.0 * shannon).ceil()
        )));
    }
    let q = uniform_grid(&Region::interval(t)?.centered_at([0.0; 3]), &[grid_n])?;
    let op = discretize(&KernelSpec::SincBandlimit { bandwidth: w }, &q, &q)?;
    eig_hermitian(&op)
}

/// Upper bound `√2 β a` on the spatial bandwidth of fields radiated by
/// sources inside a sphere of radius `a`.
pub fn spatial_bandwidth_bound(beta: f64, a: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0 && a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta and a must be > 0, got beta={beta}, a={a}"
        )));
    }
    Ok(SQRT_2 * beta * a)
}

/// Settings for the line-of-sight aperture DoF computation.
#[derive(Debug, Clone, PartialEq)]
pub struct LosOptions {
    /// Samples per half wavelength along each aperture axis (at least 4).
    pub points_per_half_wavelength: usize,
    pub threshold: f64,
    /// Use the 3×3 dyadic kernel instead of the scalar one.
    pub dyadic: bool,
}

impl Default for LosOptions {
    fn default() -> Self {
        Self {
            points_per_half_wavelength: 4,
            threshold: DEFAULT_THRESHOLD,
            dyadic: false,
        }
    }
}

/// Per-axis sample counts giving `per_half` points per λ/2.
pub fn samples_per_axis(region: &Region, wavelength: f64, per_half: usize) -> Vec<usize> {
    region
        .extents()
        .iter()
        .map(|l| {
            let n = l / (0.5 * wavelength) * per_half as f64;
            ((n * (1.0 - 1e-12)).ceil() as usize).max(1)
        })
        .collect()
}

/// Paraxial coupling estimate `μ(V_T) μ(V_R) / (λ D)^d` for d-dimensional
/// apertures (area product for squares, length product for segments).
pub fn paraxial_dof_prediction(tx: &Region, rx: &Region, separation: f64, wavelength: f64) -> f64 {
    let d = tx.dim().min(rx.dim()) as i32;
    tx.measure() * rx.measure() / (wavelength * separation).powi(d)
}

/// Channel DoF between two coaxial, parallel apertures `separation` apart.
///
/// The transmitter is centered at the origin and the receiver at
/// `(0, 0, separation)`. The Green's operator is sampled on both apertures,
/// decomposed by SVD, and singular values at or above `threshold × σ_0` are
/// counted.
pub fn los_channel_dof(
    tx: &Region,
    rx: &Region,
    separation: f64,
    wave: &WaveParams,
    opts: &LosOptions,
) -> Result<DofReport> {
    check_threshold(opts.threshold)?;
    if tx.dim() > 2 || rx.dim() > 2 {
        return Err(Error::Geometry(
            "apertures must be intervals or rectangles".into(),
        ));
    }
    let min_gap = 1e-3 * tx.max_extent().max(rx.max_extent());
    if !(separation.is_finite() && separation > min_gap) {
        return Err(Error::Geometry(format!(
            "apertures overlap: separation {separation} must exceed {min_gap}"
        )));
    }
    if opts.points_per_half_wavelength < 4 {
        return Err(Error::Resolution(format!(
            "need at least 4 points per half wavelength, got {}",
            opts.points_per_half_wavelength
        )));
    }
    let lambda = wave.wavelength();
    let tx_region = tx.clone().centered_at([0.0, 0.0, 0.0]);
    let rx_region = rx.clone().centered_at([0.0, 0.0, separation]);
    let tx_q = uniform_grid(
        &tx_region,
        &samples_per_axis(&tx_region, lambda, opts.points_per_half_wavelength),
    )?;
    let rx_q = uniform_grid(
        &rx_region,
        &samples_per_axis(&rx_region, lambda, opts.points_per_half_wavelength),
    )?;
    let kernel = if opts.dyadic {
        KernelSpec::DyadicGreen {
            k: wave.wavenumber(),
        }
    } else {
        KernelSpec::ScalarGreen {
            k: wave.wavenumber(),
        }
    };
    let op = discretize(&kernel, &rx_q, &tx_q)?;
    let spectrum = svd_operator(&op)?;
    let count = count_significant(&spectrum.values, opts.threshold)?;
    Ok(DofReport {
        count,
        threshold: opts.threshold,
        spectrum,
        prediction: Some(paraxial_dof_prediction(tx, rx, separation, lambda)),
    })
}

/// Scatterer cluster whose directions follow a von Mises–Fisher law.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfScatterers {
    mean_direction: [f64; 3],
    kappa: f64,
    cluster_count: usize,
}

impl VmfScatterers {
    /// `mean_direction` is normalized; it must be nonzero.
    pub fn new(mean_direction: [f64; 3], kappa: f64, cluster_count: usize) -> Result<Self> {
        let norm = mean_direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument(
                "mean direction must be nonzero".into(),
            ));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be >= 0, got {kappa}"
            )));
        }
        if cluster_count == 0 {
            return Err(Error::InvalidArgument("cluster_count must be >= 1".into()));
        }
        Ok(Self {
            mean_direction: mean_direction.map(|c| c / norm),
            kappa,
            cluster_count,
        })
    }

    pub fn mean_direction(&self) -> [f64; 3] {
        self.mean_direction
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }
}

/// Expected mean resultant length `coth κ - 1/κ` of a vMF law on the sphere.
pub fn vmf_mean_resultant_length(kappa: f64) -> f64 {
    if kappa < 1e-4 {
        // Series of the Langevin function.
        kappa / 3.0 - kappa.powi(3) / 45.0
    } else {
        1.0 / kappa.tanh() - 1.0 / kappa
    }
}

fn orthonormal_frame(mu: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if mu[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot = helper[0] * mu[0] + helper[1] * mu[1] + helper[2] * mu[2];
    let mut e1 = [
        helper[0] - dot * mu[0],
        helper[1] - dot * mu[1],
        helper[2] - dot * mu[2],
    ];
    let n1 = e1.iter().map(|c| c * c).sum::<f64>().sqrt();
    e1.iter_mut().for_each(|c| *c /= n1);
    let e2 = [
        mu[1] * e1[2] - mu[2] * e1[1],
        mu[2] * e1[0] - mu[0] * e1[2],
        mu[0] * e1[1] - mu[1] * e1[0],
    ];
    (e1, e2)
}

/// One vMF draw on the unit sphere using Wood's rejection scheme for the
/// cosine to the mean direction.
pub fn sample_vmf<R: Rng + ?Sized>(mu: [f64; 3], kappa: f64, rng: &mut R) -> [f64; 3] {
    if kappa == 0.0 {
        return UnitSphere.sample(rng);
    }
    // Dimension-3 constants; b written to avoid cancellation at large kappa.
    let b = 2.0 / (2.0 * kappa + (4.0 * kappa * kappa + 4.0).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + 2.0 * (1.0 - x0 * x0).ln();
    let w = loop {
        let z: f64 = rng.random();
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + 2.0 * (1.0 - x0 * w).ln() - c >= u.ln() {
            break w;
        }
    };
    let phi = 2.0 * PI * rng.random::<f64>();
    let (e1, e2) = orthonormal_frame(mu);
    let s = (1.0 - w * w).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = w * mu[i] + s * (cp * e1[i] + sp * e2[i]);
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

/// `n` i.i.d. directions from the scatterers' vMF law.
pub fn vmf_sample(scatterers: &VmfScatterers, n: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| sample_vmf(scatterers.mean_direction, scatterers.kappa, &mut rng))
        .collect())
}

/// Geometry and sampling for the scattered (NLoS) channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NlosOptions {
    /// Distance from the receiver center to every scatterer, in wavelengths.
    pub scatterer_distance_wavelengths: f64,
    pub points_per_half_wavelength: usize,
    pub threshold: f64,
}

impl Default for NlosOptions {
    fn default() -> Self {
        Self {
            scatterer_distance_wavelengths: 20.0,
            points_per_half_wavelength: 2,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Per-trial generator derived from the master seed; independent of how
/// trials are scheduled across workers.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// DoF of a single scattered-channel realization.
///
/// The receiver is centered at the origin, scatterers sit at
/// `ρ · d_m` for vMF directions `d_m`, and the transmitter is centered at
/// `2ρ · μ` beyond the cluster. The channel is the two-hop composition
/// `G(rx, sc) · G(sc, tx)` with unit scatterer gains.
pub fn nlos_trial_dof(
    directions: &[[f64; 3]],
    scatterers: &VmfScatterers,
    tx: &Region,
    rx: &Region,
    wave: &WaveParams,
    opts: &NlosOptions,
) -> Result<usize> {
    let lambda = wave.wavelength();
    let k = wave.wavenumber();
    let rho = opts.scatterer_distance_wavelengths * lambda;
    if !(rho > 0.5 * tx.max_extent().max(rx.max_extent()) * SQRT_2) {
        return Err(Error::Geometry(format!(
            "scatterer distance {rho} m does not clear the apertures"
        )));
    }
    let mu = scatterers.mean_direction;
    let rx_region = rx.clone().centered_at([0.0; 3]);
    let tx_region =
        tx.clone()
            .centered_at([2.0 * rho * mu[0], 2.0 * rho * mu[1], 2.0 * rho * mu[2]]);
    let ppl = opts.points_per_half_wavelength.max(1);
    let rx_q = uniform_grid(&rx_region, &samples_per_axis(&rx_region, lambda, ppl))?;
    let tx_q = uniform_grid(&tx_region, &samples_per_axis(&tx_region, lambda, ppl))?;
    let sc: Vec<Point> = directions
        .iter()
        .map(|d| [rho * d[0], rho * d[1], rho * d[2]])
        .collect();

    let hop = |q: &Quadrature| -> Result<CMatrix> {
        let mut m = CMatrix::zeros(q.len(), sc.len());
        for (i, (p, w)) in q.points().iter().zip(q.weights()).enumerate() {
            for (j, s) in sc.iter().enumerate() {
                m[(i, j)] = scalar_green(k, p, s)? * w.sqrt();
            }
        }
        Ok(m)
    };
    let a_rx = hop(&rx_q)?;
    let a_tx = hop(&tx_q)?;
    let h = a_rx.as_ref() * a_tx.transpose();
    let values = singular_values(&crate::operators::DiscretizedOperator::from_matrix(h))?;
    count_significant(&values, opts.threshold)
}

/// Expected NLoS channel DoF averaged over `trials` scatterer realizations.
pub fn nlos_dof_mc(
    scatterers: &VmfScatterers,
    tx: &Region,
    rx: &Region,
    wave: &WaveParams,
    trials: usize,
    opts: &NlosOptions,
    seed: u64,
) -> Result<f64> {
    Ok(
        nlos_dof_trials(scatterers, tx, rx, wave, trials, opts, seed)?
            .iter()
            .sum::<usize>() as f64
            / trials as f64,
    )
}

/// Per-trial DoF counts behind [`nlos_dof_mc`], in trial order.
pub fn nlos_dof_trials(
    scatterers: &VmfScatterers,
    tx: &Region,
    rx: &Region,
    wave: &WaveParams,
    trials: usize,
    opts: &NlosOptions,
    seed: u64,
) -> Result<Vec<usize>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    check_threshold(opts.threshold)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let dirs: Vec<[f64; 3]> = (0..scatterers.cluster_count)
                .map(|_| sample_vmf(scatterers.mean_direction, scatterers.kappa, &mut rng))
                .collect();
            nlos_trial_dof(&dirs, scatterers, tx, rx, wave, opts)
        })
        .collect()
}

/// Converts weighted mode entries back to function samples on `q`.
pub fn mode_samples(mode: impl Iterator<Item = C64>, q: &Quadrature) -> Vec<C64> {
    mode.zip(q.weights()).map(|(v, w)| v / w.sqrt()).collect()
}
