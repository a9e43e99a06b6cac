//! Mutual information between Gaussian random fields, MIMO mutual
//! information, water-filling, and the two sampling experiments:
//!
//! - [`mi_convergence_experiment`]: MI of `N` point antennas in the receive
//!   aperture approaching the Fredholm value of the continuous aperture;
//! - [`noise_divergence_experiment`]: the same sweep under per-antenna white
//!   noise (diverges) and under correlated noise (saturates).
//!
//! The correlated noise field is the isotropic diffuse-field correlation
//! `σ² sin(kD)/(kD)` plus a weak white floor of spectral density `n0/2`.
//! A point antenna of cell measure `w` sees the floor with variance
//! `(n0/2)/w`. The floor keeps the noise operator boundedly invertible; the
//! sinc part alone is compact and its inverse is unbounded.

use std::f64::consts::LN_2;

use faer::MatRef;
use rayon::prelude::*;

use crate::geometry::{halfwavelength_count, uniform_grid, Quadrature, Region};
use crate::kernels::{KernelSpec, WaveParams};
use crate::operators::{
    discretize, fredholm_logdet, hermitian_defect, hermitian_eigenvalues, logdet_ratio_bits,
    DiscretizedOperator, HERMITIAN_TOL,
};
use crate::{CMatrix, Error, Result, C64};

/// Largest antenna or grid count an experiment will assemble.
pub const MAX_SAMPLES: usize = 4096;

/// Covariance of the transmit current.
#[derive(Debug, Clone)]
pub enum SourceCovariance {
    /// Kernel sampled on the channel's transmit quadrature.
    Kernel(KernelSpec),
    /// Explicit covariance in weighted coordinates of the transmit quadrature.
    Matrix(CMatrix),
}

/// Source current, channel operator and noise field, all Gaussian.
///
/// The source covariance is `power × source`. Noise kernels are summed.
#[derive(Debug, Clone)]
pub struct GaussianSignalModel {
    pub source: SourceCovariance,
    pub channel: DiscretizedOperator,
    pub noise: Vec<KernelSpec>,
    pub power: f64,
    pub wave: WaveParams,
}

/// Result of [`eit_mi`].
#[derive(Debug, Clone, PartialEq)]
pub struct EitMi {
    pub bits: f64,
    /// Set when the receive grid samples the field coarser than λ/4.
    pub resolution_warning: Option<String>,
}

/// The matrices of the equivalent point-antenna MIMO link.
#[derive(Debug, Clone)]
pub struct MimoMatrices {
    pub h: CMatrix,
    pub rx: CMatrix,
    pub rn: CMatrix,
}

fn kron_identity3(m: MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(3 * m.nrows(), 3 * m.ncols(), |r, c| {
        if r % 3 == c % 3 {
            m[(r / 3, c / 3)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Polarization multiplicity of an operator side: 1 (scalar) or 3 (dyadic).
fn multiplicity(dim: usize, points: usize) -> Result<usize> {
    if dim == points {
        Ok(1)
    } else if dim == 3 * points {
        Ok(3)
    } else {
        Err(Error::InvalidArgument(format!(
            "operator dimension {dim} does not match {points} quadrature points"
        )))
    }
}

fn check_psd(name: &str, m: MatRef<'_, C64>) -> Result<()> {
    let d = hermitian_defect(m);
    if d > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "{name} is not Hermitian (relative defect {d:e})"
        )));
    }
    let ev = hermitian_eigenvalues(m)?;
    let max = ev.first().copied().unwrap_or(0.0).max(0.0);
    let min = ev.last().copied().unwrap_or(0.0);
    if min < -1e-10 * max.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!(
            "{name} is not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(())
}

impl GaussianSignalModel {
    fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "power must be > 0, got {}",
                self.power
            )));
        }
        if self.noise.is_empty() {
            return Err(Error::InvalidArgument("noise model is empty".into()));
        }
        for n in &self.noise {
            if !matches!(
                n,
                KernelSpec::NoiseWhite { .. } | KernelSpec::NoiseSinc { .. }
            ) {
                return Err(Error::InvalidArgument(format!(
                    "{n:?} is not a noise model"
                )));
            }
            n.validate()?;
        }
        Ok(())
    }

    /// Source covariance in weighted transmit coordinates, power included,
    /// expanded per polarization when the channel is dyadic.
    pub fn source_operator(&self) -> Result<CMatrix> {
        let ncols = self.channel.ncols();
        let base = match &self.source {
            SourceCovariance::Matrix(m) => m.clone(),
            SourceCovariance::Kernel(k) => {
                let q = self.channel.col_quadrature().ok_or_else(|| {
                    Error::InvalidArgument(
                        "kernel source needs a channel with a transmit quadrature".into(),
                    )
                })?;
                discretize(k, q, q)?.into_matrix()
            }
        };
        let base = match multiplicity(ncols, base.nrows())? {
            1 => base,
            _ => kron_identity3(base.as_ref()),
        };
        if base.ncols() != ncols {
            return Err(Error::InvalidArgument(
                "source covariance is not square".into(),
            ));
        }
        check_psd("source covariance", base.as_ref())?;
        Ok(CMatrix::from_fn(ncols, ncols, |i, j| {
            base[(i, j)] * self.power
        }))
    }

    /// Summed noise operator on `rx`, expanded per polarization as needed.
    pub fn noise_operator(&self, rx: &Quadrature) -> Result<CMatrix> {
        let mut total: Option<DiscretizedOperator> = None;
        for n in &self.noise {
            let op = discretize(n, rx, rx)?;
            total = Some(match total {
                None => op,
                Some(t) => t.sum(&op)?,
            });
        }
        let m = total
            .ok_or_else(|| Error::InvalidArgument("noise model is empty".into()))?
            .into_matrix();
        Ok(match multiplicity(self.channel.nrows(), rx.len())? {
            1 => m,
            _ => kron_identity3(m.as_ref()),
        })
    }
}

fn check_rx_grid(model: &GaussianSignalModel, rx: &Quadrature) -> Result<()> {
    if let Some(q) = model.channel.row_quadrature() {
        if q != rx {
            return Err(Error::InvalidArgument(
                "receive quadrature differs from the channel's".into(),
            ));
        }
    }
    multiplicity(model.channel.nrows(), rx.len()).map(|_| ())
}

/// Largest nearest-neighbour distance on the grid.
fn coarsest_spacing(q: &Quadrature) -> f64 {
    let pts = q.points();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    pts.par_iter()
        .enumerate()
        .map(|(i, p)| {
            pts.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| {
                    ((p[0] - s[0]).powi(2) + (p[1] - s[1]).powi(2) + (p[2] - s[2]).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Continuous-aperture mutual information `log2 det(I + T_E T_N^{-1})` with
/// `T_E = T R_J T^H` the received-field autocorrelation on `rx`.
pub fn eit_mi(model: &GaussianSignalModel, rx: &Quadrature) -> Result<EitMi> {
    model.validate()?;
    check_rx_grid(model, rx)?;
    let t = model.channel.matrix();
    let cj = model.source_operator()?;
    let t_e = t.as_ref() * cj.as_ref() * t.adjoint();
    let t_n = model.noise_operator(rx)?;
    let bits = fredholm_logdet(
        &DiscretizedOperator::from_matrix(t_e),
        &DiscretizedOperator::from_matrix(t_n),
    )?;
    let spacing = coarsest_spacing(rx);
    let limit = model.wave.wavelength() / 4.0;
    let resolution_warning = (rx.len() > 1 && spacing > limit * (1.0 + 1e-9)).then(|| {
        format!("receive grid spacing {spacing:.4e} m is coarser than λ/4 = {limit:.4e} m")
    });
    Ok(EitMi {
        bits,
        resolution_warning,
    })
}

/// The point-antenna MIMO link equivalent to `model` sampled on `rx`:
/// `H = W^{-1/2} T`, `R_x = R_J`, `R_n = W^{-1/2} T_N W^{-1/2}` with `W` the
/// receive weights. [`mimo_mi`] on these equals [`eit_mi`] on the model.
pub fn mimo_equivalent(model: &GaussianSignalModel, rx: &Quadrature) -> Result<MimoMatrices> {
    model.validate()?;
    check_rx_grid(model, rx)?;
    let mult = multiplicity(model.channel.nrows(), rx.len())?;
    let inv_sw: Vec<f64> = rx
        .weights()
        .iter()
        .flat_map(|w| std::iter::repeat_n(1.0 / w.sqrt(), mult))
        .collect();
    let t = model.channel.matrix();
    let h = CMatrix::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * inv_sw[i]);
    let t_n = model.noise_operator(rx)?;
    let rn = CMatrix::from_fn(t_n.nrows(), t_n.ncols(), |i, j| {
        t_n[(i, j)] * (inv_sw[i] * inv_sw[j])
    });
    Ok(MimoMatrices {
        h,
        rx: model.source_operator()?,
        rn,
    })
}

/// `log2 det(I + R_n^{-1/2} H R_x H^H R_n^{-1/2})` in bits.
pub fn mimo_mi(h: MatRef<'_, C64>, rx: MatRef<'_, C64>, rn: MatRef<'_, C64>) -> Result<f64> {
    if rx.nrows() != h.ncols() || rx.ncols() != h.ncols() || rn.nrows() != h.nrows() {
        return Err(Error::InvalidArgument(format!(
            "H is {}x{}, R_x {}x{}, R_n {}x{}",
            h.nrows(),
            h.ncols(),
            rx.nrows(),
            rx.ncols(),
            rn.nrows(),
            rn.ncols()
        )));
    }
    let d = hermitian_defect(rx);
    if d > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "R_x is not Hermitian (relative defect {d:e})"
        )));
    }
    let signal = h * rx * h.adjoint();
    // Round-off leaves H R_x H^H a hair off Hermitian.
    let signal = CMatrix::from_fn(signal.nrows(), signal.ncols(), |i, j| {
        (signal[(i, j)] + signal[(j, i)].conj()) * 0.5
    });
    logdet_ratio_bits(signal.as_ref(), rn)
}

/// Power allocation over parallel Gaussian subchannels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFilling {
    pub allocation: Vec<f64>,
    pub capacity_bits: f64,
    pub water_level: f64,
}

/// Water-filling: `p_n = max(0, μ - ν_n/σ_n²)` with `Σ p_n = P`.
pub fn waterfill(gains: &[f64], noise_powers: &[f64], power: f64) -> Result<WaterFilling> {
    if gains.len() != noise_powers.len() || gains.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} gains but {} noise powers",
            gains.len(),
            noise_powers.len()
        )));
    }
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power must be > 0, got {power}"
        )));
    }
    if gains.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::InvalidArgument(
            "gains must be finite and >= 0".into(),
        ));
    }
    if noise_powers.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(Error::InvalidArgument("noise powers must be > 0".into()));
    }
    // Floor of each vessel: ν/σ², infinite for dead channels.
    let floors: Vec<f64> = gains
        .iter()
        .zip(noise_powers)
        .map(|(g, n)| if *g > 0.0 { n / (g * g) } else { f64::INFINITY })
        .collect();
    let mut order: Vec<usize> = (0..floors.len())
        .filter(|&i| floors[i].is_finite())
        .collect();
    if order.is_empty() {
        return Err(Error::NoChannel);
    }
    order.sort_by(|&a, &b| floors[a].total_cmp(&floors[b]));

    let mut level = 0.0;
    let mut sum = 0.0;
    for (m, &idx) in order.iter().enumerate() {
        sum += floors[idx];
        let candidate = (power + sum) / (m + 1) as f64;
        let next = order.get(m + 1).map(|&i| floors[i]);
        level = candidate;
        if next.is_none_or(|f| candidate <= f) {
            break;
        }
    }
    let allocation: Vec<f64> = floors.iter().map(|f| (level - f).max(0.0)).collect();
    let capacity_bits = allocation
        .iter()
        .zip(&floors)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, f)| (p / f).ln_1p())
        .sum::<f64>()
        / LN_2;
    Ok(WaterFilling {
        allocation,
        capacity_bits,
        water_level: level,
    })
}

/// MI against antenna count, plus the dense-grid reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub sample_counts: Vec<usize>,
    pub mi_values: Vec<f64>,
    /// Fredholm value of the continuous aperture; `None` when the noise model
    /// has no continuum limit.
    pub reference_mi: Option<f64>,
}

/// Two parallel segments along x, transmitter centered at the origin and
/// receiver at `(0, 0, separation)`, with a sinc-correlated source current.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub wavelength: f64,
    pub tx_length_wavelengths: f64,
    pub rx_length_wavelengths: f64,
    pub separation_wavelengths: f64,
    pub source_power: f64,
    /// SNR at a single antenna at the receiver center, correlated noise only.
    pub snr_db: f64,
    /// White floor relative to the correlated variance, as seen by an antenna
    /// of λ/2 extent.
    pub noise_floor_ratio: f64,
    /// Transmit quadrature size; `None` picks 8× the half-wavelength count.
    pub tx_points: Option<usize>,
    /// Receive grid of the reference, as a multiple of the half-wavelength count.
    pub reference_factor: usize,
    pub sweep: Vec<usize>,
    /// Use the dyadic Green's function with independent polarizations.
    pub polarized: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            wavelength: 1.0,
            tx_length_wavelengths: 2.0,
            rx_length_wavelengths: 4.0,
            separation_wavelengths: 16.0,
            source_power: 1.0,
            snr_db: 10.0,
            noise_floor_ratio: 0.1,
            tx_points: None,
            reference_factor: 8,
            sweep: (1..=9).map(|p| 1usize << p).collect(),
            polarized: false,
        }
    }
}

/// Fully assembled scenario: transmit side, channel kernel and noise levels.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub wave: WaveParams,
    pub tx: Quadrature,
    pub rx_region: Region,
    /// Source covariance in weighted transmit coordinates, power included.
    pub source: CMatrix,
    pub channel_kernel: KernelSpec,
    /// Variance of the correlated noise component.
    pub noise_variance: f64,
    /// Spectral density of the white floor.
    pub floor_density: f64,
}

impl ScenarioConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("tx_length", self.tx_length_wavelengths),
            ("rx_length", self.rx_length_wavelengths),
            ("separation", self.separation_wavelengths),
            ("power", self.source_power),
            ("noise_floor", self.noise_floor_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidArgument("snr_db must be finite".into()));
        }
        if self.reference_factor == 0 {
            return Err(Error::InvalidArgument(
                "reference_factor must be >= 1".into(),
            ));
        }
        if self.sweep.is_empty() || self.sweep[0] == 0 {
            return Err(Error::InvalidArgument(
                "sweep must hold positive antenna counts".into(),
            ));
        }
        if self.sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "sweep must be strictly increasing".into(),
            ));
        }
        if let Some(&n) = self.sweep.iter().find(|&&n| n > MAX_SAMPLES) {
            return Err(Error::Size {
                requested: n,
                cap: MAX_SAMPLES,
            });
        }
        Ok(())
    }

    /// Builds the transmit side and calibrates the noise to the target SNR.
    pub fn build(&self) -> Result<Scenario> {
        self.validate()?;
        let lambda = self.wavelength;
        let wave = WaveParams::new(lambda)?;
        let k = wave.wavenumber();
        let tx_region =
            Region::interval(self.tx_length_wavelengths * lambda)?.centered_at([0.0; 3]);
        let rx_region = Region::interval(self.rx_length_wavelengths * lambda)?.centered_at([
            0.0,
            0.0,
            self.separation_wavelengths * lambda,
        ]);
        let tx_n = match self.tx_points {
            Some(n) => n,
            None => 8 * halfwavelength_count(&tx_region, lambda)?,
        };
        if tx_n > MAX_SAMPLES {
            return Err(Error::Size {
                requested: tx_n,
                cap: MAX_SAMPLES,
            });
        }
        let tx = uniform_grid(&tx_region, &[tx_n])?;
        let source_kernel = KernelSpec::NoiseSinc {
            k,
            variance: self.source_power,
        };
        let mut source = discretize(&source_kernel, &tx, &tx)?.into_matrix();
        let channel_kernel = if self.polarized {
            source = kron_identity3(source.as_ref());
            KernelSpec::DyadicGreen { k }
        } else {
            KernelSpec::ScalarGreen { k }
        };

        let probe = Quadrature::new(vec![rx_region.center()], vec![1.0])?;
        let a = discretize(&channel_kernel, &probe, &tx)?.into_matrix();
        let received = a.as_ref() * source.as_ref() * a.adjoint();
        let per_component = (0..received.nrows())
            .map(|i| received[(i, i)].re)
            .sum::<f64>()
            / received.nrows() as f64;
        let noise_variance = per_component / 10f64.powf(self.snr_db / 10.0);
        let floor_density = self.noise_floor_ratio * noise_variance * lambda / 2.0;
        Ok(Scenario {
            wave,
            tx,
            rx_region,
            source,
            channel_kernel,
            noise_variance,
            floor_density,
        })
    }
}

impl Scenario {
    pub fn correlated_noise(&self) -> Vec<KernelSpec> {
        vec![
            KernelSpec::NoiseSinc {
                k: self.wave.wavenumber(),
                variance: self.noise_variance,
            },
            KernelSpec::NoiseWhite {
                n0_half: self.floor_density,
            },
        ]
    }

    /// Uniform receive grid with `n` antennas.
    pub fn rx_grid(&self, n: usize) -> Result<Quadrature> {
        uniform_grid(&self.rx_region, &[n])
    }

    /// Signal model with the channel sampled on `rx`.
    pub fn model(&self, rx: &Quadrature) -> Result<GaussianSignalModel> {
        Ok(GaussianSignalModel {
            source: SourceCovariance::Matrix(self.source.clone()),
            channel: discretize(&self.channel_kernel, rx, &self.tx)?,
            noise: self.correlated_noise(),
            power: 1.0,
            wave: self.wave,
        })
    }

    /// Noise variance a single antenna spanning the whole receive segment
    /// sees under the correlated model.
    pub fn single_antenna_noise(&self) -> f64 {
        self.noise_variance + self.floor_density / self.rx_region.measure()
    }

    /// Reference MI on a grid `factor` times denser than λ/2 sampling.
    pub fn reference_mi(&self, factor: usize) -> Result<f64> {
        let n = factor * halfwavelength_count(&self.rx_region, self.wave.wavelength())?;
        if n > MAX_SAMPLES {
            return Err(Error::Size {
                requested: n,
                cap: MAX_SAMPLES,
            });
        }
        let rx = self.rx_grid(n)?;
        Ok(eit_mi(&self.model(&rx)?, &rx)?.bits)
    }

    /// MI of `n` point antennas under the correlated noise model.
    pub fn correlated_mi(&self, n: usize) -> Result<f64> {
        let rx = self.rx_grid(n)?;
        let m = mimo_equivalent(&self.model(&rx)?, &rx)?;
        mimo_mi(m.h.as_ref(), m.rx.as_ref(), m.rn.as_ref())
    }

    /// MI of `n` point antennas with i.i.d. noise of fixed variance `nu`.
    pub fn white_mi(&self, n: usize, nu: f64) -> Result<f64> {
        let rx = self.rx_grid(n)?;
        let m = mimo_equivalent(&self.model(&rx)?, &rx)?;
        let dim = m.h.nrows();
        let rn = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(nu, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        mimo_mi(m.h.as_ref(), m.rx.as_ref(), rn.as_ref())
    }
}

fn sweep<F>(counts: &[usize], f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    counts.par_iter().map(|&n| f(n)).collect()
}

/// Discrete MIMO MI over the antenna-count sweep against the Fredholm MI of
/// the continuous receive aperture.
pub fn mi_convergence_experiment(cfg: &ScenarioConfig) -> Result<ConvergenceCurve> {
    let sc = cfg.build()?;
    let reference = sc.reference_mi(cfg.reference_factor)?;
    let mi_values = sweep(&cfg.sweep, |n| sc.correlated_mi(n))?;
    Ok(ConvergenceCurve {
        sample_counts: cfg.sweep.clone(),
        mi_values,
        reference_mi: Some(reference),
    })
}

/// White and correlated noise curves over the same antenna sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDivergence {
    pub white: ConvergenceCurve,
    pub correlated: ConvergenceCurve,
    /// Per-antenna variance of the white model.
    pub white_variance: f64,
}

/// Capacity under per-antenna i.i.d. noise versus correlated noise as the
/// number of antennas in a fixed aperture grows.
///
/// The white variance is held fixed at the value a single full-aperture
/// antenna sees under the correlated model, so both curves start together.
pub fn noise_divergence_experiment(cfg: &ScenarioConfig) -> Result<NoiseDivergence> {
    let sc = cfg.build()?;
    let nu = sc.single_antenna_noise();
    let reference = sc.reference_mi(cfg.reference_factor)?;
    let white = sweep(&cfg.sweep, |n| sc.white_mi(n, nu))?;
    let correlated = sweep(&cfg.sweep, |n| sc.correlated_mi(n))?;
    Ok(NoiseDivergence {
        white: ConvergenceCurve {
            sample_counts: cfg.sweep.clone(),
            mi_values: white,
            reference_mi: None,
        },
        correlated: ConvergenceCurve {
            sample_counts: cfg.sweep.clone(),
            mi_values: correlated,
            reference_mi: Some(reference),
        },
        white_variance: nu,
    })
}
