//! Benchmark studies for unfitted multi-level *hp* finite elements.
//!
//! Four studies are provided: a 1D bar with a strain jump, a 2D corner
//! singularity, the conditioning of small base/overlay overlaps, and a
//! transient heat problem with a traveling source. Each study returns plain
//! records; [`output`] writes them as CSV.

pub mod bar;
pub mod corner;
pub mod heat;
pub mod ladder;
pub mod output;
pub mod overlap;

use mlhp_core::assembly::{apply_constraints, assemble, Coefficient, WeakForm};
use mlhp_core::postproc::{compute_energy, FieldSolution};
use mlhp_core::regions::{compute_regions, default_merge_tolerance, IntegrationRegion, RegionCriterion};
use mlhp_core::solvers::solve_semidefinite;
use mlhp_core::space::MultiLevelSpace;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] mlhp_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Regions covering the union of all levels of a space.
pub fn space_regions<const D: usize>(space: &MultiLevelSpace<D>) -> Result<Vec<IntegrationRegion<D>>> {
    let meshes = space.meshes();
    Ok(compute_regions(&meshes, &RegionCriterion::AtLeastOne, default_merge_tolerance(&meshes))?)
}

/// Solution of a stationary problem together with its energy `a(u_h, u_h)`.
#[derive(Debug, Clone)]
pub struct StaticSolution<const D: usize> {
    pub solution: FieldSolution<D>,
    pub unknowns: usize,
    /// Pivots regularized as numerically dependent.
    pub dependent: usize,
    pub energy: f64,
}

/// Relative pivot size below which an unknown is treated as numerically
/// dependent. Deep overlay ladders superpose high-order polynomials that
/// nearly reproduce each other, which drives the smallest eigenvalue of the
/// stiffness matrix to round-off level.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-11;

/// Assembles, eliminates the prescribed functions, solves directly and
/// integrates the energy of the result (`κ = 1`).
pub fn solve_static<const D: usize>(
    space: MultiLevelSpace<D>,
    form: &WeakForm<'_, D>,
    over_integration: usize,
) -> Result<StaticSolution<D>> {
    let regions = space_regions(&space)?;
    let system = assemble(&space, &regions, form, over_integration)?;
    let reduced = apply_constraints(&system, &space);
    let (x, dependent) = solve_semidefinite(&reduced.k, &reduced.f, DEPENDENCE_TOLERANCE)?;
    let unknowns = reduced.size();
    let solution = FieldSolution::new(space, reduced.expand(&x))?;
    let energy = compute_energy(&solution, &regions, &Coefficient::Constant(1.0))?;
    Ok(StaticSolution { solution, unknowns, dependent, energy })
}
