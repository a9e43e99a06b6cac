//! Two-point kernels: free-space Green's functions, the bandlimiting sinc
//! kernel, and noise correlation kernels.
//!
//! Time-harmonic fields use the `exp(+jωt)` convention, so the outgoing
//! scalar Green's function is `exp(-jkR) / (4πR)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Point, Result, C64};

/// Wavelength and the matching wavenumber (propagation constant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    wavelength: f64,
    wavenumber: f64,
}

impl WaveParams {
    pub fn new(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavelength must be > 0, got {wavelength}"
            )));
        }
        Ok(Self {
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
        })
    }

    pub fn from_wavenumber(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be > 0, got {k}"
            )));
        }
        Ok(Self {
            wavelength: 2.0 * PI / k,
            wavenumber: k,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Propagation constant; equal to the wavenumber in free space.
    pub fn beta(&self) -> f64 {
        self.wavenumber
    }
}

/// User-supplied autocorrelation `R(x, x')`.
type KernelFn = dyn Fn(&Point, &Point) -> C64 + Send + Sync;

#[derive(Clone)]
pub struct CustomKernel {
    name: String,
    f: Arc<KernelFn>,
}

impl CustomKernel {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&Point, &Point) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &Point, y: &Point) -> C64 {
        (self.f)(x, y)
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .finish()
    }
}

/// A two-point kernel `K(x, x')`.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// `sin(2πW(t-t'))/(π(t-t'))`, evaluated on the x coordinate (the time axis).
    SincBandlimit {
        bandwidth: f64,
    },
    /// `exp(-jkR)/(4πR)`.
    ScalarGreen {
        k: f64,
    },
    /// 3×3 free-space dyadic Green's function.
    DyadicGreen {
        k: f64,
    },
    /// White noise of spectral density `n0_half`; only defined once discretized.
    NoiseWhite {
        n0_half: f64,
    },
    /// Isotropic diffuse-field correlation `variance · sin(kD)/(kD)`.
    NoiseSinc {
        k: f64,
        variance: f64,
    },
    CustomAutocorrelation(CustomKernel),
}

impl KernelSpec {
    /// 1 for scalar kernels, 3 for the dyadic Green's function.
    pub fn output_rank(&self) -> usize {
        match self {
            KernelSpec::DyadicGreen { .. } => 3,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be > 0, got {v}"
                )))
            }
        };
        match self {
            KernelSpec::SincBandlimit { bandwidth } => positive("W", *bandwidth),
            KernelSpec::ScalarGreen { k } | KernelSpec::DyadicGreen { k } => positive("k", *k),
            KernelSpec::NoiseWhite { n0_half } => positive("n0/2", *n0_half),
            KernelSpec::NoiseSinc { k, variance } => {
                positive("k", *k)?;
                positive("variance", *variance)
            }
            KernelSpec::CustomAutocorrelation(_) => Ok(()),
        }
    }

    /// Pointwise value of a rank-1 kernel.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<C64> {
        match self {
            KernelSpec::SincBandlimit { bandwidth } => {
                Ok(C64::new(sinc_kernel(*bandwidth, x[0], y[0]), 0.0))
            }
            KernelSpec::ScalarGreen { k } => scalar_green(*k, x, y),
            KernelSpec::DyadicGreen { .. } => Err(Error::UnsupportedOperation(
                "dyadic kernel has no scalar value; use eval_dyadic".into(),
            )),
            KernelSpec::NoiseWhite { .. } | KernelSpec::NoiseSinc { .. } => {
                noise_kernel(self, x, y).map(|v| C64::new(v, 0.0))
            }
            KernelSpec::CustomAutocorrelation(c) => Ok(c.eval(x, y)),
        }
    }

    /// True when `K(x, x') = conj(K(x', x))` by construction.
    pub fn is_self_adjoint(&self) -> bool {
        matches!(
            self,
            KernelSpec::SincBandlimit { .. }
                | KernelSpec::NoiseWhite { .. }
                | KernelSpec::NoiseSinc { .. }
        )
    }
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc_unnormalized(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Kernel of the ideal low-pass filter of bandwidth `w` Hz.
pub fn sinc_kernel(w: f64, t: f64, t_prime: f64) -> f64 {
    let dt = t - t_prime;
    if dt == 0.0 {
        2.0 * w
    } else {
        (2.0 * PI * w * dt).sin() / (PI * dt)
    }
}

fn distance(r: &Point, s: &Point) -> f64 {
    let dx = r[0] - s[0];
    let dy = r[1] - s[1];
    let dz = r[2] - s[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn coincident(r: &Point) -> Error {
    Error::Singularity(format!(
        "Green's function evaluated at coincident points {r:?}"
    ))
}

/// Scalar free-space Green's function `exp(-jkR)/(4πR)`.
pub fn scalar_green(k: f64, r: &Point, s: &Point) -> Result<C64> {
    let dist = distance(r, s);
    if dist == 0.0 {
        return Err(coincident(r));
    }
    Ok(C64::from_polar(1.0 / (4.0 * PI * dist), -k * dist))
}

/// Dyadic Green's function `(I + ∇∇/k²) g(R)` in closed form:
/// `g · [a(kR) I + b(kR) R̂R̂ᵀ]` with `a(x) = 1 - j/x - 1/x²` and
/// `b(x) = -1 + 3j/x + 3/x²`.
pub fn dyadic_green(k: f64, r: &Point, s: &Point) -> Result<[[C64; 3]; 3]> {
    let d = [r[0] - s[0], r[1] - s[1], r[2] - s[2]];
    let dist = distance(r, s);
    if dist == 0.0 {
        return Err(coincident(r));
    }
    let g = C64::from_polar(1.0 / (4.0 * PI * dist), -k * dist);
    let x = k * dist;
    let inv = 1.0 / x;
    let a = C64::new(1.0 - inv * inv, -inv);
    let b = C64::new(-1.0 + 3.0 * inv * inv, 3.0 * inv);
    let unit = [d[0] / dist, d[1] / dist, d[2] / dist];
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let diag = if i == j { a } else { C64::new(0.0, 0.0) };
            *v = g * (diag + b * (unit[i] * unit[j]));
        }
    }
    Ok(out)
}

/// Pointwise noise correlation. White noise is distributional and refuses
/// pointwise evaluation; it only exists after discretization.
pub fn noise_kernel(model: &KernelSpec, r: &Point, r_prime: &Point) -> Result<f64> {
    match model {
        KernelSpec::NoiseSinc { k, variance } => {
            Ok(variance * sinc_unnormalized(k * distance(r, r_prime)))
        }
        KernelSpec::NoiseWhite { .. } => Err(Error::UnsupportedOperation(
            "white noise has no pointwise correlation value".into(),
        )),
        other => Err(Error::InvalidArgument(format!(
            "{other:?} is not a noise model"
        ))),
    }
}
