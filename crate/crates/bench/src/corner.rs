//! Poisson problem on the unit square with a gradient singularity at the
//! origin.
//!
//! `∇²u = s` with `u = √ρ` and `s = ρ^(-3/2) / 4`, flux free on the faces
//! through the origin and `u = √ρ` on the faces `x = 1` and `y = 1`.

use mlhp_core::assembly::WeakForm;
use mlhp_core::basis::BasisSpec;
use mlhp_core::mesh::{Aabb, CartesianMesh};
use mlhp_core::postproc::relative_energy_error;
use mlhp_core::space::{bisect_inside, Face, LevelSpec, MultiLevelSpace};

use crate::ladder::{ConvergenceRecord, Strategy};
use crate::{solve_static, Error, Result, StaticSolution};

/// Smallest admissible unfitted overlay; below it the singular source
/// overflows at quadrature points.
pub const MIN_OVERLAY_SIZE: f64 = 1e-100;

/// Exact solution `√ρ` and source `s = ρ^(-3/2) / 4`.
pub fn corner_exact(x: &[f64; 2]) -> (f64, f64) {
    let rho = x[0].hypot(x[1]);
    (rho.sqrt(), 0.25 / (rho * rho.sqrt()))
}

/// `a(u, u) = ∫ 1/(4ρ) = ln[(√2 + 2) / (2 − √2)] / 4`.
pub fn corner_exact_energy() -> f64 {
    let s = std::f64::consts::SQRT_2;
    0.25 * ((s + 2.0) / (2.0 - s)).ln()
}

fn domain() -> Aabb<2> {
    Aabb { lo: [0.0; 2], hi: [1.0; 2] }
}

/// Levels of refinement cycle `p`: the base element has degree `p` and
/// level `k` degree `p - k`. Fitted levels are 2×2 meshes on
/// `[0, 2^(1-k)]²`; unfitted levels are single elements on `[0, α^k]²`.
pub fn corner_levels(strategy: Strategy, alpha: f64, p: usize) -> Result<Vec<LevelSpec<2>>> {
    let domain = domain();
    let mut levels = vec![LevelSpec::new(CartesianMesh::uniform(&domain, [1, 1])?, BasisSpec::trunk(p))];
    for k in 1..p {
        let mesh = match strategy {
            Strategy::Fitted => {
                let parent = &levels[k - 1].mesh;
                let e = parent.locate(&[0.0, 0.0]).expect("origin inside the domain");
                bisect_inside(parent, &parent.element_box(&e)?)?
            }
            Strategy::Unfitted => {
                let size = alpha.powi(k as i32);
                if size < MIN_OVERLAY_SIZE {
                    return Err(Error::Config(format!("overlay {k} of size {size:e} is too small to resolve")));
                }
                CartesianMesh::uniform(&Aabb::new([0.0; 2], [size; 2])?, [1, 1])?
            }
        };
        levels.push(LevelSpec::new(mesh, BasisSpec::trunk(p - k)));
    }
    Ok(levels)
}

pub fn corner_space(strategy: Strategy, alpha: f64, p: usize) -> Result<MultiLevelSpace<2>> {
    let mut space = MultiLevelSpace::build(corner_levels(strategy, alpha, p)?, domain())?;
    if strategy == Strategy::Fitted {
        space = space.apply_fitted_deactivation()?;
    }
    let g = |x: &[f64; 2]| corner_exact(x).0;
    Ok(space.set_dirichlet(&[Face::upper(0), Face::upper(1)], &g)?)
}

pub fn solve_corner(space: MultiLevelSpace<2>, over_integration: usize) -> Result<StaticSolution<2>> {
    // weak form of -∇²u = -s
    let source = |x: &[f64; 2]| -corner_exact(x).1;
    let form = WeakForm::laplace().with_source(&source);
    solve_static(space, &form, over_integration)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerConfig {
    pub strategy: Strategy,
    pub alpha: f64,
    pub p_max: usize,
    pub over_integration: usize,
}

/// Runs cycles `p = 1..=p_max`; cycle `p` uses `p` levels.
pub fn run_corner(config: &CornerConfig) -> Result<Vec<ConvergenceRecord>> {
    if config.strategy == Strategy::Unfitted && !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    if config.over_integration == 0 {
        return Err(Error::Config("over-integration must be at least 1".into()));
    }
    let exact = corner_exact_energy();
    (1..=config.p_max)
        .map(|p| {
            let space = corner_space(config.strategy, config.alpha, p)?;
            let sol = solve_corner(space, config.over_integration)?;
            Ok(ConvergenceRecord {
                cycle: p - 1,
                p,
                unknowns: sol.unknowns,
                error: relative_energy_error(exact, sol.energy),
            })
        })
        .collect()
}
