//! Axis-aligned tensor-product meshes.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Relative tolerance for geometric containment and clamping.
pub const GEOMETRIC_TOLERANCE: f64 = 1e-12;

/// An axis-aligned box `[lo, hi]` in `D` dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<const D: usize> {
    pub lo: [f64; D],
    pub hi: [f64; D],
}

impl<const D: usize> Aabb<D> {
    pub fn new(lo: [f64; D], hi: [f64; D]) -> Result<Self> {
        for axis in 0..D {
            if !(lo[axis] < hi[axis]) || !lo[axis].is_finite() || !hi[axis].is_finite() {
                return Err(Error::DegenerateBox { axis, lo: lo[axis], hi: hi[axis] });
            }
        }
        Ok(Self { lo, hi })
    }

    /// The reference box `[-1, 1]^D`.
    pub fn reference() -> Self {
        Self { lo: [-1.0; D], hi: [1.0; D] }
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn max_extent(&self) -> f64 {
        (0..D).map(|a| self.extent(a)).fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        (0..D).map(|a| self.extent(a)).product()
    }

    pub fn center(&self) -> [f64; D] {
        core::array::from_fn(|a| 0.5 * (self.lo[a] + self.hi[a]))
    }

    /// Absolute tolerance derived from [`GEOMETRIC_TOLERANCE`].
    pub fn tolerance(&self) -> f64 {
        GEOMETRIC_TOLERANCE * self.max_extent()
    }

    pub fn contains(&self, x: &[f64; D], tol: f64) -> bool {
        (0..D).all(|a| x[a] >= self.lo[a] - tol && x[a] <= self.hi[a] + tol)
    }

    pub fn contains_box(&self, other: &Aabb<D>, tol: f64) -> bool {
        (0..D).all(|a| other.lo[a] >= self.lo[a] - tol && other.hi[a] <= self.hi[a] + tol)
    }

    pub fn intersection(&self, other: &Aabb<D>) -> Option<Aabb<D>> {
        let lo = core::array::from_fn(|a| self.lo[a].max(other.lo[a]));
        let hi = core::array::from_fn(|a| self.hi[a].min(other.hi[a]));
        Aabb::new(lo, hi).ok()
    }

    /// Maps a point from `[-1, 1]^D` into this box.
    pub fn map_from_reference(&self, xi: &[f64; D]) -> [f64; D] {
        core::array::from_fn(|a| {
            0.5 * (self.lo[a] + self.hi[a]) + 0.5 * self.extent(a) * xi[a]
        })
    }

    /// Maps a point of this box into `[-1, 1]^D`.
    pub fn map_to_reference(&self, x: &[f64; D]) -> [f64; D] {
        core::array::from_fn(|a| (2.0 * x[a] - self.lo[a] - self.hi[a]) / self.extent(a))
    }
}

/// Expresses `sub` in the reference coordinates of `element`.
///
/// `tol` is an absolute slack on how far `sub` may poke out of `element`;
/// coordinates within it are clamped to `±1`.
pub fn to_local_with_tolerance<const D: usize>(
    element: &Aabb<D>,
    sub: &Aabb<D>,
    tol: f64,
) -> Result<Aabb<D>> {
    let mut lo = [0.0; D];
    let mut hi = [0.0; D];
    for axis in 0..D {
        if sub.lo[axis] < element.lo[axis] - tol || sub.hi[axis] > element.hi[axis] + tol {
            return Err(Error::SubBoxOutsideElement { axis });
        }
        let h = element.extent(axis);
        let map = |x: f64| ((2.0 * x - element.lo[axis] - element.hi[axis]) / h).clamp(-1.0, 1.0);
        lo[axis] = map(sub.lo[axis]);
        hi[axis] = map(sub.hi[axis]);
    }
    Aabb::new(lo, hi)
}

/// [`to_local_with_tolerance`] with the default geometric tolerance.
pub fn to_local<const D: usize>(element: &Aabb<D>, sub: &Aabb<D>) -> Result<Aabb<D>> {
    to_local_with_tolerance(element, sub, element.tolerance())
}

/// Tensor-product grid given by strictly increasing breakpoints per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianMesh<const D: usize> {
    breakpoints: [Vec<f64>; D],
}

impl<const D: usize> CartesianMesh<D> {
    pub fn new(breakpoints: [Vec<f64>; D]) -> Result<Self> {
        for axis_points in &breakpoints {
            if axis_points.len() < 2 {
                return Err(Error::InvalidMesh("every axis needs at least two breakpoints"));
            }
            if axis_points.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMesh("breakpoints must be finite"));
            }
            if axis_points.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidMesh("breakpoints must be strictly increasing"));
            }
        }
        Ok(Self { breakpoints })
    }

    /// Equispaced mesh of `counts[i]` elements per axis.
    pub fn uniform(bounds: &Aabb<D>, counts: [usize; D]) -> Result<Self> {
        Aabb::new(bounds.lo, bounds.hi)?;
        if counts.contains(&0) {
            return Err(Error::InvalidMesh("element counts must be positive"));
        }
        let breakpoints = core::array::from_fn(|axis| {
            let n = counts[axis];
            let (lo, hi) = (bounds.lo[axis], bounds.hi[axis]);
            (0..=n)
                .map(|j| match j {
                    0 => lo,
                    j if j == n => hi,
                    j => lo + j as f64 * (hi - lo) / n as f64,
                })
                .collect()
        });
        Self::new(breakpoints)
    }

    pub fn breakpoints(&self, axis: usize) -> &[f64] {
        &self.breakpoints[axis]
    }

    pub fn counts(&self) -> [usize; D] {
        core::array::from_fn(|a| self.breakpoints[a].len() - 1)
    }

    pub fn num_elements(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn bounds(&self) -> Aabb<D> {
        Aabb {
            lo: core::array::from_fn(|a| self.breakpoints[a][0]),
            hi: core::array::from_fn(|a| *self.breakpoints[a].last().unwrap()),
        }
    }

    /// Row-major linear index (axis 0 varies slowest).
    pub fn linear_index(&self, idx: &[usize; D]) -> usize {
        let counts = self.counts();
        idx.iter().zip(counts.iter()).fold(0, |acc, (&j, &n)| acc * n + j)
    }

    pub fn multi_index(&self, mut linear: usize) -> [usize; D] {
        let counts = self.counts();
        let mut idx = [0; D];
        for axis in (0..D).rev() {
            idx[axis] = linear % counts[axis];
            linear /= counts[axis];
        }
        idx
    }

    pub fn element_box(&self, idx: &[usize; D]) -> Result<Aabb<D>> {
        let counts = self.counts();
        if (0..D).any(|a| idx[a] >= counts[a]) {
            return Err(Error::ElementOutOfRange);
        }
        Ok(Aabb {
            lo: core::array::from_fn(|a| self.breakpoints[a][idx[a]]),
            hi: core::array::from_fn(|a| self.breakpoints[a][idx[a] + 1]),
        })
    }

    /// Element whose closed box contains `x`. A point exactly on an interior
    /// breakpoint belongs to the element with the lower index.
    pub fn locate(&self, x: &[f64; D]) -> Option<[usize; D]> {
        let mut idx = [0; D];
        for axis in 0..D {
            let bp = &self.breakpoints[axis];
            let first_not_below = bp.partition_point(|&b| b < x[axis]);
            idx[axis] = match first_not_below {
                0 if x[axis] == bp[0] => 0,
                0 => return None,
                i if i == bp.len() => return None,
                i => i - 1,
            };
        }
        Some(idx)
    }

    /// Iterator over all element multi-indices in row-major order.
    pub fn elements(&self) -> impl Iterator<Item = [usize; D]> + '_ {
        (0..self.num_elements()).map(move |i| self.multi_index(i))
    }
}
