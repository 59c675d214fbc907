//! Clamped elastic bar under `q(x) = sin(8x)` with a point load at `x = 2/3`.
//!
//! `-(EA u')' = q` on `[0, L]`, `u(0) = 0`, traction free at `L`, with
//! `L = EA = 1` and a point load `f = 1/5`. The strain jumps by `f` at the
//! load, which limits the convergence of smooth high-order bases.

use mlhp_core::assembly::WeakForm;
use mlhp_core::basis::BasisSpec;
use mlhp_core::mesh::{Aabb, CartesianMesh};
use mlhp_core::postproc::relative_energy_error;
use mlhp_core::space::{bisect_inside, Face, LevelSpec, MultiLevelSpace};

use crate::ladder::{ConvergenceRecord, Strategy};
use crate::{solve_static, Error, Result, StaticSolution};

pub const POINT_LOAD: f64 = 0.2;
pub const LOAD_POSITION: f64 = 2.0 / 3.0;

/// Largest admissible overlay size factor: the first overlay then just
/// reaches the free end.
pub const ALPHA_MAX: f64 = 2.0 / 3.0;

pub fn distributed_load(x: f64) -> f64 {
    (8.0 * x).sin()
}

/// Exact displacement and strain.
pub fn bar_exact(x: f64) -> (f64, f64) {
    let c = 8.0f64.cos();
    let smooth_u = ((8.0 * x).sin() / 8.0 - x * c) / 8.0;
    let smooth_du = ((8.0 * x).cos() - c) / 8.0;
    if x <= LOAD_POSITION {
        (smooth_u + POINT_LOAD * x, smooth_du + POINT_LOAD)
    } else {
        (smooth_u + POINT_LOAD * LOAD_POSITION, smooth_du)
    }
}

/// `a(u, u) = ∫ (u')²` of the exact solution, in closed form.
pub fn bar_exact_energy() -> f64 {
    let c = 8.0f64.cos();
    let smooth = 0.5 + 16.0f64.sin() / 32.0 - 2.0 * c * 8.0f64.sin() / 8.0 + c * c;
    let cross = (8.0 * LOAD_POSITION).sin() / 8.0 - c * LOAD_POSITION;
    smooth / 64.0 + POINT_LOAD / 4.0 * cross + POINT_LOAD * POINT_LOAD * LOAD_POSITION
}

fn domain() -> Aabb<1> {
    Aabb { lo: [0.0], hi: [1.0] }
}

/// Levels of refinement cycle `p`: the base element has degree `p` and
/// level `k` degree `p - k`.
pub fn bar_levels(strategy: Strategy, alpha: f64, p: usize) -> Result<Vec<LevelSpec<1>>> {
    let domain = domain();
    let mut levels = vec![LevelSpec::new(CartesianMesh::uniform(&domain, [1])?, BasisSpec::tensor(p))];
    for k in 1..p {
        let mesh = match strategy {
            Strategy::Fitted => {
                let parent = &levels[k - 1].mesh;
                let e = parent.locate(&[LOAD_POSITION]).expect("load inside the domain");
                bisect_inside(parent, &parent.element_box(&e)?)?
            }
            Strategy::Unfitted => {
                let half = 0.5 * alpha.powi(k as i32);
                let (lo, hi) = (LOAD_POSITION - half, LOAD_POSITION + half);
                let tol = domain.tolerance();
                if lo < -tol || hi > 1.0 + tol {
                    return Err(Error::Config(format!("overlay {k} of size {} leaves the bar", 2.0 * half)));
                }
                if lo >= LOAD_POSITION || hi <= LOAD_POSITION {
                    return Err(Error::Config(format!("overlay {k} is too small to resolve")));
                }
                CartesianMesh::new([vec![lo.max(0.0), LOAD_POSITION, hi.min(1.0)]])?
            }
        };
        levels.push(LevelSpec::new(mesh, BasisSpec::tensor(p - k)));
    }
    Ok(levels)
}

pub fn bar_space(strategy: Strategy, alpha: f64, p: usize) -> Result<MultiLevelSpace<1>> {
    let mut space = MultiLevelSpace::build(bar_levels(strategy, alpha, p)?, domain())?;
    if strategy == Strategy::Fitted {
        space = space.apply_fitted_deactivation()?;
    }
    Ok(space.set_dirichlet(&[Face::lower(0)], &|_| 0.0)?)
}

pub fn solve_bar(space: MultiLevelSpace<1>) -> Result<StaticSolution<1>> {
    let load = |x: &[f64; 1]| distributed_load(x[0]);
    let form = WeakForm::laplace().with_source(&load).with_point_load([LOAD_POSITION], POINT_LOAD);
    solve_static(space, &form, 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarConfig {
    pub strategy: Strategy,
    pub alpha: f64,
    pub p_max: usize,
}

/// Runs cycles `p = 1..=p_max`; cycle `p` uses `p` levels.
pub fn run_bar(config: &BarConfig) -> Result<Vec<ConvergenceRecord>> {
    if config.strategy == Strategy::Unfitted && !(config.alpha > 0.0 && config.alpha <= ALPHA_MAX + 1e-12) {
        return Err(Error::Config(format!("alpha must lie in (0, 2/3], got {}", config.alpha)));
    }
    let exact = bar_exact_energy();
    (1..=config.p_max)
        .map(|p| {
            let sol = solve_bar(bar_space(config.strategy, config.alpha, p)?)?;
            Ok(ConvergenceRecord {
                cycle: p - 1,
                p,
                unknowns: sol.unknowns,
                error: relative_energy_error(exact, sol.energy),
            })
        })
        .collect()
}
