//! Evaluation of superposed solutions, energies and field sampling.

use alloc::vec::Vec;

use crate::assembly::{AuxiliaryElement, Coefficient, MeshLayout};
use crate::math::{norm, sqrt};
use crate::quadrature::GaussTable;
use crate::regions::IntegrationRegion;
use crate::space::MultiLevelSpace;
use crate::{Error, Result};

/// Coefficients in the full numbering of a space: unknowns followed by the
/// prescribed values. Removed functions have no entry and count as zero.
#[derive(Debug, Clone)]
pub struct FieldSolution<const D: usize> {
    pub space: MultiLevelSpace<D>,
    pub coefficients: Vec<f64>,
}

impl<const D: usize> FieldSolution<D> {
    pub fn new(space: MultiLevelSpace<D>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.num_full() {
            return Err(Error::DimensionMismatch { expected: space.num_full(), got: coefficients.len() });
        }
        Ok(Self { space, coefficients })
    }

    /// Zero unknowns with the space's prescribed values.
    pub fn lift(space: MultiLevelSpace<D>) -> Self {
        let coefficients = space.dirichlet_lift();
        Self { space, coefficients }
    }

    /// Value and global gradient, summed over every level covering `x`.
    pub fn evaluate(&self, x: &[f64; D]) -> Result<(f64, [f64; D])> {
        let domain = self.space.domain();
        if !domain.contains(x, domain.tolerance()) {
            return Err(Error::OutsideDomain);
        }
        let mut value = 0.0;
        let mut grad = [0.0; D];
        for level in self.space.levels() {
            let coefficient = |s| self.space.full_index(s).map_or(0.0, |i| self.coefficients[i]);
            if let Some((v, g)) = level.evaluate_with(x, coefficient) {
                value += v;
                for a in 0..D {
                    grad[a] += g[a];
                }
            }
        }
        Ok((value, grad))
    }

    /// Value and gradient at every point of an auxiliary element's rule.
    pub fn evaluate_on(&self, aux: &AuxiliaryElement<D>) -> Vec<(f64, [f64; D])> {
        (0..aux.rule.len())
            .map(|q| {
                let idx = aux.rule.split(q);
                let mut value = 0.0;
                let mut grad = [0.0; D];
                for (f, func) in aux.functions.iter().enumerate() {
                    let c = self.coefficients[func.full];
                    if c == 0.0 {
                        continue;
                    }
                    value += c * aux.value(f, &idx);
                    let g = aux.gradient(f, &idx);
                    for a in 0..D {
                        grad[a] += c * g[a];
                    }
                }
                (value, grad)
            })
            .collect()
    }
}

/// `∫ κ ∇u_h·∇u_h` integrated over `regions` (meshes = levels of the space)
/// with `p + 1` Gauss points per axis.
pub fn compute_energy<const D: usize>(
    sol: &FieldSolution<D>,
    regions: &[IntegrationRegion<D>],
    kappa: &Coefficient<'_, D>,
) -> Result<f64> {
    let layout = MeshLayout::of_space(&sol.space);
    let mut gauss = GaussTable::new();
    let mut energy = 0.0;
    for region in regions {
        let aux = AuxiliaryElement::new(&sol.space, &layout, region, layout.point_count(region)?, &mut gauss)?;
        for (q, (_, g)) in sol.evaluate_on(&aux).into_iter().enumerate() {
            let k = match kappa {
                Coefficient::Constant(c) => *c,
                Coefficient::Function(f) => f(&aux.rule.point(q)),
            };
            energy += aux.rule.weight(q) * k * g.iter().map(|v| v * v).sum::<f64>();
        }
    }
    Ok(energy)
}

/// `sqrt(|a_exact - a_num| / |a_exact|) * 100`, in percent.
pub fn relative_energy_error(a_exact: f64, a_num: f64) -> f64 {
    sqrt((a_exact - a_num).abs() / a_exact.abs()) * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub gradient: [f64; D],
}

/// Samples on `resolution[a] + 1` equispaced points per axis including the
/// domain corners; axis 0 varies slowest.
pub fn sample_grid<const D: usize>(sol: &FieldSolution<D>, resolution: [usize; D]) -> Result<Vec<GridSample<D>>> {
    if resolution.contains(&0) {
        return Err(Error::InvalidInput("resolution must be positive"));
    }
    let domain = *sol.space.domain();
    let points: [usize; D] = core::array::from_fn(|a| resolution[a] + 1);
    let total: usize = points.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut x = [0.0; D];
        for a in (0..D).rev() {
            let j = rem % points[a];
            rem /= points[a];
            x[a] = if j == resolution[a] {
                domain.hi[a]
            } else {
                domain.lo[a] + j as f64 * domain.extent(a) / resolution[a] as f64
            };
        }
        let (value, gradient) = sol.evaluate(&x)?;
        out.push(GridSample { x, value, gradient });
    }
    Ok(out)
}

/// Value and gradient magnitude at a point at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord {
    pub t: f64,
    pub value: f64,
    pub gradient_magnitude: f64,
}

pub fn probe<const D: usize>(sol: &FieldSolution<D>, x: &[f64; D], t: f64) -> Result<ProbeRecord> {
    let (value, gradient) = sol.evaluate(x)?;
    Ok(ProbeRecord { t, value, gradient_magnitude: norm(&gradient) })
}
