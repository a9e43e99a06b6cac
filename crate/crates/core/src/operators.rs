//! Nyström discretization of kernels and the spectral machinery built on it.
//!
//! Operators live in symmetric-weighted coordinates,
//! `A_ij = √w_i · K(x_i, x_j) · √w_j`, so the L² inner product of two sampled
//! functions is the ordinary dot product of their weighted samples. Dyadic
//! kernels are flattened into 3×3 blocks per point pair with polarization
//! varying fastest (row `3 i + a`).

use faer::{MatRef, Side};
use rayon::prelude::*;

use crate::geometry::Quadrature;
use crate::kernels::{dyadic_green, KernelSpec};
use crate::{CMatrix, Error, Result, C64};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Smallest admissible noise eigenvalue relative to the largest.
pub const NOISE_CONDITION_FLOOR: f64 = 1e-12;

/// A kernel sampled on row and column quadratures.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    matrix: CMatrix,
    rows: Option<Quadrature>,
    cols: Option<Quadrature>,
}

impl DiscretizedOperator {
    /// Wraps an explicit matrix already expressed in weighted coordinates.
    pub fn from_matrix(matrix: CMatrix) -> Self {
        Self {
            matrix,
            rows: None,
            cols: None,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn row_quadrature(&self) -> Option<&Quadrature> {
        self.rows.as_ref()
    }

    pub fn col_quadrature(&self) -> Option<&Quadrature> {
        self.cols.as_ref()
    }

    /// Always true: every operator is stored in symmetric-weighted coordinates.
    pub fn weighted(&self) -> bool {
        true
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            matrix: CMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
                self.matrix[(i, j)] * alpha
            }),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
        }
    }

    /// Entry-wise sum of two operators of equal shape.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::InvalidArgument(format!(
                "cannot add {}x{} and {}x{} operators",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(Self {
            matrix: CMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
                self.matrix[(i, j)] + other.matrix[(i, j)]
            }),
            rows: self.rows.clone().or_else(|| other.rows.clone()),
            cols: self.cols.clone().or_else(|| other.cols.clone()),
        })
    }

    /// Largest `|A - A^H|` entry relative to the largest `|A|` entry.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(self.matrix.as_ref())
    }
}

/// Eigen- or singular-value decomposition with values sorted descending.
///
/// For Hermitian decompositions both mode sets are the eigenvectors. For an
/// SVD `A = U Σ V^H`, `left_modes` is `U` (receive side) and `right_modes` is
/// `V` (transmit side).
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub values: Vec<f64>,
    pub left_modes: CMatrix,
    pub right_modes: CMatrix,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub(crate) fn hermitian_defect(m: MatRef<'_, C64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut scale = 0.0f64;
    let mut defect = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(m[(i, j)].norm());
            if i >= j {
                defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        defect / scale
    }
}

fn symmetrized(m: MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    })
}

/// Eigenpairs of a Hermitian matrix, values descending.
pub(crate) fn hermitian_eigen(m: MatRef<'_, C64>) -> Result<(Vec<f64>, CMatrix)> {
    let sym = symmetrized(m);
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let n = sym.nrows();
    let s = evd.S().column_vector();
    let u = evd.U();
    // faer sorts ascending.
    let values = (0..n).rev().map(|i| s[i].re).collect();
    let modes = CMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok((values, modes))
}

pub(crate) fn hermitian_eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    let sym = symmetrized(m);
    let mut values = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    values.reverse();
    Ok(values)
}

fn sample_rows<F>(rows: &Quadrature, cols: &Quadrature, f: F) -> Result<CMatrix>
where
    F: Fn(usize, usize) -> Result<C64> + Sync,
{
    let (n, m) = (rows.len(), cols.len());
    let data: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..m).map(|j| f(i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_fn(n, m, |i, j| data[i][j]))
}

/// Nyström matrix `√w_i K(x_i, x_j) √w_j` of `kernel` between two quadratures.
///
/// White noise materializes as `(n0/2)·I` and needs `rows == cols`.
pub fn discretize(
    kernel: &KernelSpec,
    rows: &Quadrature,
    cols: &Quadrature,
) -> Result<DiscretizedOperator> {
    kernel.validate()?;
    let same_grid = rows == cols;
    let sw_r: Vec<f64> = rows.weights().iter().map(|w| w.sqrt()).collect();
    let sw_c: Vec<f64> = cols.weights().iter().map(|w| w.sqrt()).collect();

    let matrix = match kernel {
        KernelSpec::NoiseWhite { n0_half } => {
            if !same_grid {
                return Err(Error::InvalidArgument(
                    "white noise is only defined on a single quadrature".into(),
                ));
            }
            let n = rows.len();
            CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(*n0_half, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
        KernelSpec::DyadicGreen { k } => {
            let (n, m) = (rows.len(), cols.len());
            let blocks: Vec<Vec<[[C64; 3]; 3]>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..m)
                        .map(|j| dyadic_green(*k, &rows.points()[i], &cols.points()[j]))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            CMatrix::from_fn(3 * n, 3 * m, |r, c| {
                let (i, a) = (r / 3, r % 3);
                let (j, b) = (c / 3, c % 3);
                blocks[i][j][a][b] * (sw_r[i] * sw_c[j])
            })
        }
        _ if same_grid && kernel.is_self_adjoint() => {
            // Lower triangle only, mirrored, so the matrix is exactly Hermitian.
            let mut a = sample_rows(rows, cols, |i, j| {
                if j <= i {
                    kernel
                        .eval(&rows.points()[i], &cols.points()[j])
                        .map(|v| v * (sw_r[i] * sw_c[j]))
                } else {
                    Ok(C64::new(0.0, 0.0))
                }
            })?;
            for i in 0..a.nrows() {
                for j in (i + 1)..a.ncols() {
                    a[(i, j)] = a[(j, i)].conj();
                }
            }
            a
        }
        _ => sample_rows(rows, cols, |i, j| {
            kernel
                .eval(&rows.points()[i], &cols.points()[j])
                .map(|v| v * (sw_r[i] * sw_c[j]))
        })?,
    };
    Ok(DiscretizedOperator {
        matrix,
        rows: Some(rows.clone()),
        cols: Some(cols.clone()),
    })
}

/// Full Hermitian eigendecomposition, eigenvalues descending.
pub fn eig_hermitian(op: &DiscretizedOperator) -> Result<SpectralResult> {
    if op.nrows() != op.ncols() {
        return Err(Error::InvalidArgument(format!(
            "eigendecomposition needs a square operator, got {}x{}",
            op.nrows(),
            op.ncols()
        )));
    }
    let defect = op.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "operator is not Hermitian (relative defect {defect:e})"
        )));
    }
    let (values, modes) = hermitian_eigen(op.matrix.as_ref())?;
    Ok(SpectralResult {
        values,
        left_modes: modes.clone(),
        right_modes: modes,
    })
}

/// Thin SVD `A = U Σ V^H`, singular values descending.
pub fn svd_operator(op: &DiscretizedOperator) -> Result<SpectralResult> {
    let svd = op
        .matrix
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok(SpectralResult {
        values,
        left_modes: svd.U().to_owned(),
        right_modes: svd.V().to_owned(),
    })
}

/// Singular values only, descending.
pub fn singular_values(op: &DiscretizedOperator) -> Result<Vec<f64>> {
    op.matrix
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Matrix channel `H_qp = ⟨rx_q | A | tx_p⟩` seen through antenna modes.
pub fn project_operator(
    op: &DiscretizedOperator,
    rx_modes: MatRef<'_, C64>,
    tx_modes: MatRef<'_, C64>,
) -> Result<CMatrix> {
    if rx_modes.nrows() != op.nrows() || tx_modes.nrows() != op.ncols() {
        return Err(Error::InvalidArgument(format!(
            "modes of length {}/{} do not fit a {}x{} operator",
            rx_modes.nrows(),
            tx_modes.nrows(),
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(rx_modes.adjoint() * op.matrix.as_ref() * tx_modes)
}

/// `log2 det(I + S^{-1/2} X S^{-1/2})` for Hermitian PSD `X` and Hermitian
/// positive definite `S`, via the eigenvalues of the symmetrized product.
pub(crate) fn logdet_ratio_bits(signal: MatRef<'_, C64>, noise: MatRef<'_, C64>) -> Result<f64> {
    let n = noise.nrows();
    if noise.ncols() != n || signal.nrows() != n || signal.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "signal {}x{} and noise {}x{} must be square and equal in size",
            signal.nrows(),
            signal.ncols(),
            noise.nrows(),
            noise.ncols()
        )));
    }
    for (name, m) in [("signal", signal), ("noise", noise)] {
        let d = hermitian_defect(m);
        if d > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "{name} covariance is not Hermitian (relative defect {d:e})"
            )));
        }
    }
    let (lam, v) = hermitian_eigen(noise)?;
    let max = lam[0];
    let min = lam[n - 1];
    if !(max > 0.0) || min <= NOISE_CONDITION_FLOOR * max {
        return Err(Error::IllConditionedNoise { min, max });
    }
    let whiten = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * (1.0 / lam[j].sqrt()));
    let m = whiten.adjoint() * signal * whiten.as_ref();
    let mu = hermitian_eigenvalues(m.as_ref())?;
    Ok(mu.iter().map(|&x| x.max(0.0).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Fredholm log-determinant `log2 det(I + T_E T_N^{-1})` in bits, computed as
/// `Σ log2(1 + μ_n)` over the eigenvalues of `T_N^{-1/2} T_E T_N^{-1/2}`.
pub fn fredholm_logdet(t_e: &DiscretizedOperator, t_n: &DiscretizedOperator) -> Result<f64> {
    if let (Some(a), Some(b)) = (t_e.row_quadrature(), t_n.row_quadrature()) {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(
                "signal and noise operators live on different quadratures".into(),
            ));
        }
    }
    logdet_ratio_bits(t_e.matrix.as_ref(), t_n.matrix.as_ref())
}
