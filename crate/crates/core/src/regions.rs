//! Integration regions for superposed axis-aligned meshes.
//!
//! All breakpoints of all meshes are pooled per axis, sorted and merged when
//! closer than a tolerance. The Cartesian product of the resulting intervals
//! gives candidate boxes; each is classified by the elements containing its
//! midpoint. A box whose interior crosses no breakpoint of any mesh sees only
//! C∞ integrands, so Gauss rules on it are accurate.

use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::{to_local_with_tolerance, Aabb, CartesianMesh, GEOMETRIC_TOLERANCE};
use crate::quadrature::GaussTable;
use crate::{Error, Result};

/// Default relative merge tolerance (times the smallest element extent of
/// each axis).
pub const MERGE_TOLERANCE: f64 = 1e-10;

/// Which candidate boxes to keep, given the meshes that cover them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionCriterion {
    /// Covered by at least one mesh.
    AtLeastOne,
    /// Covered by every listed mesh (others may be present too).
    AllOf(Vec<usize>),
    /// Covered by exactly the listed meshes.
    Exactly(Vec<usize>),
}

impl RegionCriterion {
    /// `present` is sorted ascending.
    pub fn accepts(&self, present: &[usize]) -> bool {
        match self {
            RegionCriterion::AtLeastOne => !present.is_empty(),
            RegionCriterion::AllOf(required) => required.iter().all(|m| present.contains(m)),
            RegionCriterion::Exactly(set) => {
                let mut set = set.clone();
                set.sort_unstable();
                set.dedup();
                set == present
            }
        }
    }
}

/// One element overlapping a region, with the region expressed in the
/// element's reference coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Contributor<const D: usize> {
    pub mesh: usize,
    pub element: [usize; D],
    pub local: Aabb<D>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationRegion<const D: usize> {
    pub bounds: Aabb<D>,
    pub contributors: Vec<Contributor<D>>,
}

/// Per-axis merge tolerance `MERGE_TOLERANCE * h_min`, with `h_min` the
/// smallest element extent of the pooled meshes on that axis. Scaling with
/// the finest element keeps deep overlay ladders resolvable.
pub fn default_merge_tolerance<const D: usize>(meshes: &[&CartesianMesh<D>]) -> [f64; D] {
    core::array::from_fn(|a| {
        let h_min = meshes
            .iter()
            .flat_map(|m| m.breakpoints(a).windows(2).map(|w| w[1] - w[0]))
            .fold(f64::INFINITY, f64::min);
        MERGE_TOLERANCE * h_min
    })
}

/// Sorted, merged coordinates of all breakpoints on one axis.
pub fn pooled_coordinates<const D: usize>(meshes: &[&CartesianMesh<D>], axis: usize, eps: f64) -> Vec<f64> {
    let mut all: Vec<f64> = meshes.iter().flat_map(|m| m.breakpoints(axis).iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        match merged.last() {
            Some(&last) if x - last <= eps => {}
            _ => merged.push(x),
        }
    }
    merged
}

/// Partitions the pooled meshes into admissible integration regions.
///
/// Output is ordered lexicographically by interval multi-index (axis 0
/// slowest); contributors are ordered by mesh index.
pub fn compute_regions<const D: usize>(
    meshes: &[&CartesianMesh<D>],
    criterion: &RegionCriterion,
    eps: [f64; D],
) -> Result<Vec<IntegrationRegion<D>>> {
    if meshes.is_empty() {
        return Err(Error::InvalidInput("at least one mesh is required"));
    }
    if eps.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::InvalidInput("merge tolerance must be non-negative"));
    }
    let coords: [Vec<f64>; D] = core::array::from_fn(|a| pooled_coordinates(meshes, a, eps[a]));
    let intervals: [usize; D] = core::array::from_fn(|a| coords[a].len().saturating_sub(1));
    let total: usize = intervals.iter().product();
    let scale = (0..D)
        .map(|a| coords[a].last().unwrap() - coords[a][0])
        .fold(0.0, f64::max);
    let clamp_tol = 2.0 * eps.iter().copied().fold(0.0, f64::max) + GEOMETRIC_TOLERANCE * scale;

    let mut regions = Vec::new();
    let mut present = Vec::with_capacity(meshes.len());
    let mut found: Vec<(usize, [usize; D])> = Vec::with_capacity(meshes.len());
    for flat in 0..total {
        let mut idx = [0; D];
        let mut rem = flat;
        for a in (0..D).rev() {
            idx[a] = rem % intervals[a];
            rem /= intervals[a];
        }
        let bounds = Aabb {
            lo: core::array::from_fn(|a| coords[a][idx[a]]),
            hi: core::array::from_fn(|a| coords[a][idx[a] + 1]),
        };
        let mid = bounds.center();
        present.clear();
        found.clear();
        for (m, mesh) in meshes.iter().enumerate() {
            if let Some(e) = mesh.locate(&mid) {
                present.push(m);
                found.push((m, e));
            }
        }
        if !criterion.accepts(&present) {
            continue;
        }
        let mut contributors = Vec::with_capacity(found.len());
        for &(m, e) in &found {
            let element_box = meshes[m].element_box(&e)?;
            let local = to_local_with_tolerance(&element_box, &bounds, clamp_tol)?;
            contributors.push(Contributor { mesh: m, element: e, local });
        }
        regions.push(IntegrationRegion { bounds, contributors });
    }
    Ok(regions)
}

/// Tensor-product Gauss rule on a region, with the abscissae of every
/// contributor's reference coordinates.
#[derive(Debug, Clone)]
pub struct RegionRule<const D: usize> {
    /// Global coordinates per axis.
    pub points: [Vec<f64>; D],
    /// Global weights per axis (already scaled by the half-width).
    pub weights: [Vec<f64>; D],
    /// Per contributor, reference coordinates per axis.
    pub local: Vec<[Vec<f64>; D]>,
}

impl<const D: usize> RegionRule<D> {
    pub fn new(region: &IntegrationRegion<D>, counts: [usize; D], table: &mut GaussTable) -> Result<Self> {
        let mut points: [Vec<f64>; D] = core::array::from_fn(|_| Vec::new());
        let mut weights: [Vec<f64>; D] = core::array::from_fn(|_| Vec::new());
        let mut local = vec![core::array::from_fn(|_| Vec::new()); region.contributors.len()];
        for a in 0..D {
            let (xi, w) = table.get(counts[a])?;
            let (lo, hi) = (region.bounds.lo[a], region.bounds.hi[a]);
            points[a] = xi.iter().map(|t| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t).collect();
            weights[a] = w.iter().map(|w| 0.5 * (hi - lo) * w).collect();
            for (c, contributor) in region.contributors.iter().enumerate() {
                let (l, h) = (contributor.local.lo[a], contributor.local.hi[a]);
                local[c][a] = xi.iter().map(|t| 0.5 * (l + h) + 0.5 * (h - l) * t).collect();
            }
        }
        Ok(Self { points, weights, local })
    }

    pub fn counts(&self) -> [usize; D] {
        core::array::from_fn(|a| self.points[a].len())
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of the flat point `q` (axis 0 slowest).
    pub fn split(&self, mut q: usize) -> [usize; D] {
        let counts = self.counts();
        let mut idx = [0; D];
        for a in (0..D).rev() {
            idx[a] = q % counts[a];
            q /= counts[a];
        }
        idx
    }

    pub fn point(&self, q: usize) -> [f64; D] {
        let idx = self.split(q);
        core::array::from_fn(|a| self.points[a][idx[a]])
    }

    pub fn weight(&self, q: usize) -> f64 {
        let idx = self.split(q);
        (0..D).map(|a| self.weights[a][idx[a]]).product()
    }
}

/// One quadrature point of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePoint<const D: usize> {
    pub x: [f64; D],
    pub weight: f64,
    /// Reference coordinates in each contributor's element, in contributor order.
    pub reference: Vec<[f64; D]>,
}

/// Flattened tensor Gauss rule with `counts[a]` points per axis.
pub fn region_quadrature<const D: usize>(
    region: &IntegrationRegion<D>,
    counts: [usize; D],
) -> Result<Vec<QuadraturePoint<D>>> {
    let mut table = GaussTable::new();
    let rule = RegionRule::new(region, counts, &mut table)?;
    Ok((0..rule.len())
        .map(|q| {
            let idx = rule.split(q);
            QuadraturePoint {
                x: rule.point(q),
                weight: rule.weight(q),
                reference: rule
                    .local
                    .iter()
                    .map(|l| core::array::from_fn(|a| l[a][idx[a]]))
                    .collect(),
            }
        })
        .collect())
}
