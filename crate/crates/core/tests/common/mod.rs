//! Helpers shared by the integration tests: seeded random matrices and
//! small dense linear algebra written independently of faer.

#![allow(dead_code)]

use eit::geometry::{uniform_grid, Quadrature, Region};
use eit::kernels::{KernelSpec, WaveParams};
use eit::mutual_info::{waterfill, GaussianSignalModel, SourceCovariance};
use eit::operators::discretize;
use eit::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss<R: Rng>(r: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    C64::new(re, im)
}

pub fn random_matrix<R: Rng>(r: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = cgauss(r);
        }
    }
    m
}

pub fn random_hermitian<R: Rng>(r: &mut R, n: usize) -> CMatrix {
    let a = random_matrix(r, n, n);
    CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// `B B^H` plus `shift·I`: positive semidefinite, definite for `shift > 0`.
pub fn random_psd<R: Rng>(r: &mut R, n: usize, rank: usize, shift: f64) -> CMatrix {
    let b = random_matrix(r, n, rank);
    let mut m = b.as_ref() * b.adjoint();
    for i in 0..n {
        m[(i, i)] += shift;
    }
    hermitize(&m)
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    })
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(a: &[Vec<C64>]) -> C64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut total = C64::new(0.0, 0.0);
    for c in 0..n {
        let minor: Vec<Vec<C64>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        total += a[0][c] * det_cofactor(&minor) * sign;
    }
    total
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let mut m: Vec<Vec<C64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn matmul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Characteristic polynomial coefficients `c_0..c_n` of `det(λI - A)`,
/// leading coefficient last, by the Faddeev-LeVerrier recursion.
pub fn char_poly(a: &[Vec<C64>]) -> Vec<C64> {
    let n = a.len();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let am = matmul(a, &m);
        for i in 0..n {
            for j in 0..n {
                m[i][j] = am[i][j]
                    + if i == j {
                        coeffs[n - k + 1]
                    } else {
                        C64::new(0.0, 0.0)
                    };
            }
        }
        let amk = matmul(a, &m);
        let tr: C64 = (0..n).map(|i| amk[i][i]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |z: C64| {
        coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let scale = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|i| seed.powu(i as u32) * scale).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * scale {
            break;
        }
    }
    z
}

/// Inner product magnitude of two vectors normalized to unit length.
pub fn overlap(a: &[C64], b: &[C64]) -> f64 {
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm() / (na * nb)
}

/// Checks the KKT conditions and compares against an independent
/// bisection on the water level.
pub fn check_waterfill(gains: &[f64], noise: &[f64], power: f64) -> Result<(), String> {
    let wf = waterfill(gains, noise, power).map_err(|e| e.to_string())?;
    let total: f64 = wf.allocation.iter().sum();
    if (total - power).abs() > 1e-9 * power {
        return Err(format!("budget {total} vs {power}"));
    }
    let floors: Vec<f64> = gains
        .iter()
        .zip(noise)
        .map(|(g, n)| if *g > 0.0 { n / (g * g) } else { f64::INFINITY })
        .collect();
    for (p, f) in wf.allocation.iter().zip(&floors) {
        let ok = if *p > 0.0 {
            (f + p - wf.water_level).abs() <= 1e-9 * wf.water_level.max(1.0)
        } else {
            *f >= wf.water_level - 1e-9
        };
        if !ok {
            return Err(format!(
                "KKT violated: floor {f}, power {p}, level {}",
                wf.water_level
            ));
        }
    }
    let used = |mu: f64| floors.iter().map(|f| (mu - f).max(0.0)).sum::<f64>();
    let floor_min = floors.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (0.0, power + floor_min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) < power {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let cap: f64 = floors
        .iter()
        .filter(|f| f.is_finite())
        .map(|f| (1.0 + (mu - f).max(0.0) / f).log2())
        .sum();
    if (mu - wf.water_level).abs() > 1e-9 * mu.max(1.0) {
        return Err(format!("water level {} vs bisection {mu}", wf.water_level));
    }
    if (cap - wf.capacity_bits).abs() > 1e-9 {
        return Err(format!("capacity {} vs bisection {cap}", wf.capacity_bits));
    }
    Ok(())
}

/// Two random parallel segments with a sinc-correlated source and
/// correlated-plus-floor noise.
pub fn random_segment_model(
    seed: u64,
    n_tx: usize,
    n_rx: usize,
) -> (GaussianSignalModel, Quadrature) {
    let mut r = rng(seed);
    let lambda = 1.0;
    let wave = WaveParams::new(lambda).unwrap();
    let k = wave.wavenumber();
    let lt = 0.5 + 2.0 * r.random::<f64>();
    let lr = 0.5 + 3.0 * r.random::<f64>();
    let d = 3.0 + 10.0 * r.random::<f64>();
    let tx = uniform_grid(
        &Region::interval(lt).unwrap().centered_at([0.0; 3]),
        &[n_tx],
    )
    .unwrap();
    let rx = uniform_grid(
        &Region::interval(lr).unwrap().centered_at([0.0, 0.3, d]),
        &[n_rx],
    )
    .unwrap();
    let model = GaussianSignalModel {
        source: SourceCovariance::Kernel(KernelSpec::NoiseSinc { k, variance: 1.0 }),
        channel: discretize(&KernelSpec::ScalarGreen { k }, &rx, &tx).unwrap(),
        noise: vec![
            KernelSpec::NoiseSinc {
                k,
                variance: 1e-4 * (0.5 + r.random::<f64>()),
            },
            KernelSpec::NoiseWhite {
                n0_half: 1e-5 * (0.5 + r.random::<f64>()),
            },
        ],
        power: 0.5 + r.random::<f64>(),
        wave,
    };
    (model, rx)
}
