//! Conditioning of a base mesh with a slightly shifted overlay.
//!
//! The base is a 3×3 mesh on `[0, 3]²`, the overlay a 2×2 mesh on
//! `[η, η + 2]²` with the same degree. As `η → 0` the overlay elements
//! approach base elements and the superposed basis approaches linear
//! dependence.

use mlhp_core::assembly::{apply_constraints, assemble, stiffness_factor, WeakForm};
use mlhp_core::basis::BasisSpec;
use mlhp_core::mesh::{Aabb, CartesianMesh};
use mlhp_core::solvers::{condition_number_factored, pcg_jacobi};
use mlhp_core::space::{Face, LevelSpec, MultiLevelSpace};

use crate::{space_regions, Error, Result};

pub const PCG_TOLERANCE: f64 = 1e-10;

/// `count` logarithmically equispaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapConfig {
    pub offsets: Vec<f64>,
    pub p_max: usize,
}

impl Default for OverlapConfig {
    fn default() -> Self {
        Self { offsets: log_grid(1e-6, 0.5, 13), p_max: 8 }
    }
}

/// Iterations of one PCG run; `converged` is false when the iteration
/// limit was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcgCount {
    pub iterations: usize,
    pub converged: bool,
}

/// Results for one offset and degree. A failed measurement holds the error
/// message instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapCell {
    pub offset: f64,
    pub p: usize,
    pub unknowns: usize,
    pub condition: Result<f64, String>,
    pub pcg: Result<PcgCount, String>,
}

pub fn overlap_space(offset: f64, p: usize) -> Result<MultiLevelSpace<2>> {
    if !(offset > 0.0 && offset < 1.0) {
        return Err(Error::Config(format!("overlap offset must lie in (0, 1), got {offset}")));
    }
    let domain = Aabb::new([0.0; 2], [3.0; 2])?;
    let overlay = Aabb::new([offset; 2], [offset + 2.0; 2])?;
    let levels = vec![
        LevelSpec::new(CartesianMesh::uniform(&domain, [3, 3])?, BasisSpec::trunk(p)),
        LevelSpec::new(CartesianMesh::uniform(&overlay, [2, 2])?, BasisSpec::trunk(p)),
    ];
    let space = MultiLevelSpace::build(levels, domain)?;
    Ok(space.set_dirichlet(&Face::all::<2>(), &|_| 0.0)?)
}

/// Condition number of the reduced Laplace stiffness and the Jacobi PCG
/// iterations for a unit source from a zero initial guess, with at most
/// `10 N` iterations.
///
/// The condition number is taken from the singular values of the gradient
/// factor `B` with `K = BᵀB`; near-coincident overlays push `κ(K)` beyond
/// what an eigensolver applied to `K` can resolve.
pub fn overlap_cell(offset: f64, p: usize) -> Result<OverlapCell> {
    let space = overlap_space(offset, p)?;
    let regions = space_regions(&space)?;
    let unit = |_: &[f64; 2]| 1.0;
    let system = assemble(&space, &regions, &WeakForm::laplace().with_source(&unit), 1)?;
    let reduced = apply_constraints(&system, &space);
    let n = reduced.size();
    let (b, rows) = stiffness_factor(&space, &regions)?;
    let condition = condition_number_factored(&b, rows, n).map_err(|e| e.to_string());
    let pcg = pcg_jacobi(&reduced.k, &reduced.f, PCG_TOLERANCE, 10 * n)
        .map(|r| PcgCount { iterations: r.iterations, converged: r.converged })
        .map_err(|e| e.to_string());
    Ok(OverlapCell { offset, p, unknowns: n, condition, pcg })
}

/// Cells ordered by offset, then degree `1..=p_max`.
pub fn run_overlap(config: &OverlapConfig) -> Result<Vec<OverlapCell>> {
    if config.offsets.is_empty() || config.p_max == 0 {
        return Err(Error::Config("at least one offset and degree are required".into()));
    }
    let mut cells = Vec::with_capacity(config.offsets.len() * config.p_max);
    for &offset in &config.offsets {
        for p in 1..=config.p_max {
            cells.push(overlap_cell(offset, p)?);
        }
    }
    Ok(cells)
}
