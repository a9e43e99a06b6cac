//! Sample grids with quadrature weights over intervals, rectangular apertures
//! and boxes.
//!
//! Regions are axis-aligned: an interval lies along x, a rectangle in the xy
//! plane, a box fills xyz. Each spans `[origin, origin + extent]` per axis.

use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Interval,
    Rectangle,
    Box,
}

impl RegionKind {
    pub fn dim(self) -> usize {
        match self {
            RegionKind::Interval => 1,
            RegionKind::Rectangle => 2,
            RegionKind::Box => 3,
        }
    }
}

/// An axis-aligned transmitter or receiver region.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    kind: RegionKind,
    extents: Vec<f64>,
    origin: Point,
}

impl Region {
    pub fn new(kind: RegionKind, extents: &[f64], origin: Point) -> Result<Self> {
        if extents.len() != kind.dim() {
            return Err(Error::InvalidArgument(format!(
                "{:?} needs {} extents, got {}",
                kind,
                kind.dim(),
                extents.len()
            )));
        }
        if let Some(bad) = extents.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "region extents must be > 0, got {bad}"
            )));
        }
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "region origin must be finite".into(),
            ));
        }
        Ok(Self {
            kind,
            extents: extents.to_vec(),
            origin,
        })
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(RegionKind::Interval, &[length], [0.0; 3])
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        Self::new(RegionKind::Rectangle, &[lx, ly], [0.0; 3])
    }

    pub fn cuboid(lx: f64, ly: f64, lz: f64) -> Result<Self> {
        Self::new(RegionKind::Box, &[lx, ly, lz], [0.0; 3])
    }

    /// Same shape, moved so that its center sits at `center`.
    pub fn centered_at(mut self, center: Point) -> Self {
        self.origin = center;
        for (axis, e) in self.extents.iter().enumerate() {
            self.origin[axis] -= 0.5 * e;
        }
        self
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Length, area or volume.
    pub fn measure(&self) -> f64 {
        self.extents.iter().product()
    }

    pub fn center(&self) -> Point {
        let mut c = self.origin;
        for (axis, e) in self.extents.iter().enumerate() {
            c[axis] += 0.5 * e;
        }
        c
    }

    pub fn max_extent(&self) -> f64 {
        self.extents.iter().cloned().fold(0.0, f64::max)
    }

    /// Point-in-region test with an absolute slack `tol` on every axis.
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        (0..3).all(|axis| {
            let lo = self.origin[axis];
            let hi = lo + self.extents.get(axis).copied().unwrap_or(0.0);
            p[axis] >= lo - tol && p[axis] <= hi + tol
        })
    }
}

/// Sample points with positive weights representing a region's measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("quadrature has no points".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument(
                "quadrature weights must be > 0".into(),
            ));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        // Neumaier summation keeps the measure identity at 1e-12 for big grids.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &w in &self.weights {
            let t = sum + w;
            if sum.abs() >= w.abs() {
                comp += (sum - t) + w;
            } else {
                comp += (w - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

/// Midpoint-rule tensor grid on `region` with `counts[axis]` cells per axis.
///
/// Every point carries the measure of its cell. Points are ordered with x
/// varying fastest, then y, then z.
pub fn uniform_grid(region: &Region, counts: &[usize]) -> Result<Quadrature> {
    let dim = region.dim();
    if counts.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected {dim} per-axis counts, got {}",
            counts.len()
        )));
    }
    if counts.contains(&0) {
        return Err(Error::InvalidArgument("grid counts must be >= 1".into()));
    }
    let steps: Vec<f64> = region
        .extents
        .iter()
        .zip(counts)
        .map(|(e, &c)| e / c as f64)
        .collect();
    let cell: f64 = steps.iter().product();
    let total: usize = counts.iter().product();

    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let mut p = region.origin;
        for axis in 0..dim {
            p[axis] += (idx[axis] as f64 + 0.5) * steps[axis];
        }
        points.push(p);
        for axis in 0..dim {
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    Ok(Quadrature {
        points,
        weights: vec![cell; total],
    })
}

/// Number of λ/2-spaced grid points covering `region`, endpoints included:
/// the product over axes of `floor(2 L / λ) + 1`.
pub fn halfwavelength_count(region: &Region, wavelength: f64) -> Result<usize> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    Ok(region
        .extents
        .iter()
        .map(|l| {
            let steps = 2.0 * l / wavelength;
            // Exact multiples of λ/2 must not lose a step to rounding.
            (steps * (1.0 + 1e-12)).floor() as usize + 1
        })
        .product())
}
