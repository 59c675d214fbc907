//! Transient heat conduction with a small heat source traveling on a circle.
//!
//! `∂T/∂t = ∇·(κ∇T) + s` on `[-5, 5]²` with `κ = 1`, `T = 0` on the boundary
//! and at `t = 0`. Three discretizations are compared: a fine linear
//! reference mesh, a coarse high-order mesh and the coarse mesh with three
//! overlays that follow the source.

use std::fmt;
use std::str::FromStr;

use mlhp_core::assembly::{apply_constraints, assemble, assemble_load, MeshLayout, ReducedSystem, WeakForm};
use mlhp_core::basis::BasisSpec;
use mlhp_core::mesh::{Aabb, CartesianMesh};
use mlhp_core::postproc::{probe, sample_grid, FieldSolution, GridSample, ProbeRecord};
use mlhp_core::regions::IntegrationRegion;
use mlhp_core::space::{Face, LevelSpec, MultiLevelSpace};
use mlhp_core::transient::{advance_overlays, l2_project, MovingSource, OverlaySpec, StepSolver, ThetaScheme, ThetaStepper};

use crate::{space_regions, Error, Result};

pub const HALF_WIDTH: f64 = 5.0;
pub const PROBE: [f64; 2] = [0.0, 2.5];
pub const SNAPSHOT_TIME: f64 = 2.134;
pub const T_MAX: f64 = 4.0;
pub const BASE_ELEMENTS: usize = 11;
pub const BASE_DEGREE: usize = 4;
pub const REFERENCE_ELEMENTS: usize = 501;
/// Smaller reference mesh for quick runs.
pub const REFERENCE_ELEMENTS_FALLBACK: usize = 251;
/// Relative residual of the reference model's conjugate gradient solves.
pub const REFERENCE_PCG_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_DT: f64 = 0.01;
/// Time between overlay moves. The source travels about 0.2 per move, so
/// its support stays well inside the finest overlay (side 0.625).
pub const DEFAULT_MOTION_INTERVAL: f64 = 0.05;

pub fn heat_source() -> MovingSource {
    MovingSource {
        path_radius: 2.5,
        radius: 0.1,
        intensity: 10.0,
        phase: -std::f64::consts::FRAC_PI_2,
        angular_velocity: std::f64::consts::FRAC_PI_2,
    }
}

/// Overlays of sides 2.5, 1.25 and 0.625, each meshed 11×11, with degrees
/// 3, 2 and 1.
pub fn heat_overlays() -> Vec<OverlaySpec> {
    (1..=3)
        .map(|k| OverlaySpec {
            size: 2.5 / f64::from(1 << (k - 1)),
            counts: BASE_ELEMENTS,
            basis: BasisSpec::trunk(BASE_DEGREE - k),
        })
        .collect()
}

fn domain() -> Aabb<2> {
    Aabb { lo: [-HALF_WIDTH; 2], hi: [HALF_WIDTH; 2] }
}

fn uniform_level(elements: usize, degree: usize) -> Result<LevelSpec<2>> {
    Ok(LevelSpec::new(CartesianMesh::uniform(&domain(), [elements; 2])?, BasisSpec::trunk(degree)))
}

fn constrained(levels: Vec<LevelSpec<2>>) -> Result<MultiLevelSpace<2>> {
    let space = MultiLevelSpace::build(levels, domain())?;
    Ok(space.set_dirichlet(&Face::all::<2>(), &|_| 0.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatModel {
    /// Fine linear mesh.
    Reference,
    /// Coarse high-order mesh without refinement.
    Unrefined,
    /// Coarse high-order mesh with overlays following the source.
    Refined,
}

impl HeatModel {
    pub const ALL: [HeatModel; 3] = [HeatModel::Reference, HeatModel::Unrefined, HeatModel::Refined];
}

impl FromStr for HeatModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(HeatModel::Reference),
            "unrefined" => Ok(HeatModel::Unrefined),
            "refined" => Ok(HeatModel::Refined),
            other => Err(Error::Config(format!("unknown heat model `{other}`"))),
        }
    }
}

impl fmt::Display for HeatModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeatModel::Reference => "reference",
            HeatModel::Unrefined => "unrefined",
            HeatModel::Refined => "refined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatConfig {
    /// Time step of the θ-method.
    pub dt: f64,
    /// Time between overlay moves of the refined model.
    pub motion_interval: f64,
    pub t_max: f64,
    /// Elements per axis of the reference mesh.
    pub reference_elements: usize,
    /// Load quadrature multiplier of the unrefined model.
    pub over_integration: usize,
    /// Intervals per axis of the exported field snapshot.
    pub snapshot_resolution: usize,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            motion_interval: DEFAULT_MOTION_INTERVAL,
            t_max: T_MAX,
            reference_elements: REFERENCE_ELEMENTS,
            over_integration: 5,
            snapshot_resolution: 200,
        }
    }
}

impl HeatConfig {
    fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.motion_interval > 0.0) {
            return Err(Error::Config("time step, motion interval and end time must be positive".into()));
        }
        if self.over_integration == 0 || self.snapshot_resolution == 0 {
            return Err(Error::Config("over-integration and snapshot resolution must be positive".into()));
        }
        Ok((self.t_max / self.dt - 1e-9).ceil() as usize)
    }

    fn snapshot_step(&self) -> usize {
        (SNAPSHOT_TIME / self.dt).round() as usize
    }

    /// Time steps between overlay moves.
    fn steps_per_move(&self) -> usize {
        ((self.motion_interval / self.dt).round() as usize).max(1)
    }
}

/// Probe history and field snapshot of one model.
#[derive(Debug, Clone)]
pub struct HeatRun {
    pub model: HeatModel,
    pub unknowns: usize,
    /// One record per step, starting with the initial state.
    pub probes: Vec<ProbeRecord>,
    pub snapshot_time: f64,
    pub snapshot: Vec<GridSample<2>>,
}

impl HeatRun {
    pub fn max_temperature(&self) -> f64 {
        self.probes.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_gradient(&self) -> f64 {
        self.probes.iter().map(|r| r.gradient_magnitude).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn model_space(model: HeatModel, config: &HeatConfig, center: &[f64; 2]) -> Result<MultiLevelSpace<2>> {
    match model {
        HeatModel::Reference => constrained(vec![uniform_level(config.reference_elements, 1)?]),
        HeatModel::Unrefined => constrained(vec![uniform_level(BASE_ELEMENTS, BASE_DEGREE)?]),
        HeatModel::Refined => {
            let base = uniform_level(BASE_ELEMENTS, BASE_DEGREE)?;
            constrained(advance_overlays(&base, center, &heat_overlays())?)
        }
    }
}

/// Matrices and time stepper of one mesh configuration.
struct Configuration {
    regions: Vec<IntegrationRegion<2>>,
    layout: MeshLayout,
    stepper: ThetaStepper,
    over_integration: usize,
}

impl Configuration {
    fn new(model: HeatModel, space: &MultiLevelSpace<2>, config: &HeatConfig) -> Result<Self> {
        let regions = space_regions(space)?;
        let layout = MeshLayout::of_space(space);
        let system = assemble(space, &regions, &WeakForm::laplace().with_mass(), 1)?;
        let ReducedSystem { k, m, .. } = apply_constraints(&system, space);
        let m = m.expect("mass requested");
        let n = k.nrows();
        let (solver, over_integration) = match model {
            HeatModel::Reference => (StepSolver::Pcg { rel_tol: REFERENCE_PCG_TOLERANCE, max_iter: 10 * n }, 1),
            HeatModel::Unrefined => (StepSolver::Direct, config.over_integration),
            HeatModel::Refined => (StepSolver::Direct, 1),
        };
        let stepper = ThetaStepper::new(m, k, ThetaScheme::crank_nicolson(config.dt)?, solver)?;
        Ok(Self { regions, layout, stepper, over_integration })
    }

    /// Reduced load at time `t`; the prescribed values are zero, so the
    /// load needs no lifting.
    fn load(&self, space: &MultiLevelSpace<2>, t: f64) -> Result<Vec<f64>> {
        let src = heat_source();
        let s = |x: &[f64; 2]| src.value(x, t);
        let support = src.support(t);
        let mut f = assemble_load(space, &self.regions, &self.layout, &s, self.over_integration, Some(&support))?;
        f.truncate(space.count_active());
        Ok(f)
    }
}

/// Runs one model with Crank-Nicolson steps of `config.dt`. The refined
/// model moves its overlays every `config.motion_interval`, centered on the
/// source position halfway through the interval so that the source stays
/// inside the finest overlay, and carries the state over by L2 projection.
/// The other models keep one mesh and factorize (or precondition) once.
pub fn run_heat_model(model: HeatModel, config: &HeatConfig) -> Result<HeatRun> {
    let steps = config.steps()?;
    let moving = model == HeatModel::Refined;
    let per_move = if moving { config.steps_per_move() } else { usize::MAX };
    let snapshot_step = config.snapshot_step();
    let source = heat_source();

    let mut field = FieldSolution::lift(model_space(model, config, &source.center(0.5 * config.motion_interval))?);
    let mut current = Configuration::new(model, &field.space, config)?;
    let mut f_n = current.load(&field.space, 0.0)?;
    let mut probes = vec![probe(&field, &PROBE, 0.0)?];
    let mut snapshot = (0.0, Vec::new());
    for step in 1..=steps {
        let t_n = (step - 1) as f64 * config.dt;
        let t = step as f64 * config.dt;
        if step > 1 && (step - 1) % per_move == 0 {
            let center = source.center(t_n + 0.5 * config.motion_interval);
            field = l2_project(&field, model_space(model, config, &center)?)?;
            current = Configuration::new(model, &field.space, config)?;
            f_n = current.load(&field.space, t_n)?;
        }
        let n = field.space.count_active();
        let f_next = current.load(&field.space, t)?;
        let state = current.stepper.step(&f_n, &f_next, &field.coefficients[..n])?;
        f_n = f_next;
        field.coefficients[..n].copy_from_slice(&state);
        probes.push(probe(&field, &PROBE, t)?);
        if step == snapshot_step {
            snapshot = (t, sample_grid(&field, [config.snapshot_resolution; 2])?);
        }
    }
    Ok(HeatRun {
        model,
        unknowns: field.space.count_active(),
        probes,
        snapshot_time: snapshot.0,
        snapshot: snapshot.1,
    })
}

/// Unknown counts of the three models, without time stepping.
pub fn heat_unknowns(config: &HeatConfig) -> Result<[usize; 3]> {
    let center = heat_source().center(0.0);
    let mut out = [0; 3];
    for (o, model) in out.iter_mut().zip(HeatModel::ALL) {
        *o = model_space(model, config, &center)?.count_active();
    }
    Ok(out)
}
