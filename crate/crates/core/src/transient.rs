//! θ-method time stepping, L2 transfer between spaces and moving overlays.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{apply_constraints, assemble_with_layout, AuxiliaryElement, MeshLayout, SparseSystem, WeakForm};
use crate::basis::BasisSpec;
use crate::math::{cos, sin};
use crate::mesh::{Aabb, CartesianMesh};
use crate::postproc::FieldSolution;
use crate::quadrature::GaussTable;
use crate::regions::{compute_regions, default_merge_tolerance, RegionCriterion};
use crate::solvers::{pcg_jacobi_from, SkylineCholesky};
use crate::space::{LevelSpec, MultiLevelSpace};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaScheme {
    pub theta: f64,
    pub dt: f64,
}

impl ThetaScheme {
    pub fn new(theta: f64, dt: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidInput("theta must lie in [0, 1]"));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        Ok(Self { theta, dt })
    }

    pub fn crank_nicolson(dt: f64) -> Result<Self> {
        Self::new(0.5, dt)
    }

    /// `M/Δt + θK`.
    pub fn lhs(&self, m: &CsrMatrix, k: &CsrMatrix) -> CsrMatrix {
        m.linear_combination(1.0 / self.dt, k, self.theta)
    }

    /// `[M/Δt − (1−θ)K] T_n + θF_{n+1} + (1−θ)F_n`.
    pub fn rhs(&self, m: &CsrMatrix, k: &CsrMatrix, f_n: &[f64], f_next: &[f64], t_n: &[f64]) -> Vec<f64> {
        let mt = m.mul_vec(t_n);
        let kt = k.mul_vec(t_n);
        (0..t_n.len())
            .map(|i| mt[i] / self.dt - (1.0 - self.theta) * kt[i] + self.theta * f_next[i] + (1.0 - self.theta) * f_n[i])
            .collect()
    }
}

/// One θ-step with a direct solve.
pub fn theta_step(
    m: &CsrMatrix,
    k: &CsrMatrix,
    f_n: &[f64],
    f_next: &[f64],
    t_n: &[f64],
    scheme: &ThetaScheme,
) -> Result<Vec<f64>> {
    let n = m.nrows();
    for len in [k.nrows(), f_n.len(), f_next.len(), t_n.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let lhs = scheme.lhs(m, k);
    Ok(SkylineCholesky::factor(&lhs)?.solve(&scheme.rhs(m, k, f_n, f_next, t_n)))
}

/// Linear solver used by [`ThetaStepper`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSolver {
    Direct,
    /// Jacobi-preconditioned CG warm-started from the previous state.
    Pcg { rel_tol: f64, max_iter: usize },
}

enum Factor {
    Direct(SkylineCholesky),
    Pcg { rel_tol: f64, max_iter: usize },
}

/// θ-stepping on fixed matrices, factorizing the left-hand side once.
pub struct ThetaStepper {
    m: CsrMatrix,
    k: CsrMatrix,
    lhs: CsrMatrix,
    scheme: ThetaScheme,
    factor: Factor,
}

impl ThetaStepper {
    pub fn new(m: CsrMatrix, k: CsrMatrix, scheme: ThetaScheme, solver: StepSolver) -> Result<Self> {
        let lhs = scheme.lhs(&m, &k);
        let factor = match solver {
            StepSolver::Direct => Factor::Direct(SkylineCholesky::factor(&lhs)?),
            StepSolver::Pcg { rel_tol, max_iter } => Factor::Pcg { rel_tol, max_iter },
        };
        Ok(Self { m, k, lhs, scheme, factor })
    }

    pub fn step(&self, f_n: &[f64], f_next: &[f64], t_n: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.scheme.rhs(&self.m, &self.k, f_n, f_next, t_n);
        match &self.factor {
            Factor::Direct(c) => Ok(c.solve(&rhs)),
            Factor::Pcg { rel_tol, max_iter } => {
                let report = pcg_jacobi_from(&self.lhs, &rhs, t_n.to_vec(), *rel_tol, *max_iter)?;
                if !report.converged {
                    return Err(Error::InvalidInput("conjugate gradients did not converge"));
                }
                Ok(report.solution)
            }
        }
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.k
    }
}

/// Uniform indicator source moving on a circle:
/// `s(x, t) = λ` if `|x − c(t)| ≤ R`, with `c(t) = r (cos φ(t), sin φ(t))`
/// and `φ(t) = φ₀ + φ̇ t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingSource {
    pub path_radius: f64,
    pub radius: f64,
    pub intensity: f64,
    pub phase: f64,
    pub angular_velocity: f64,
}

impl MovingSource {
    pub fn center(&self, t: f64) -> [f64; 2] {
        let phi = self.phase + self.angular_velocity * t;
        [self.path_radius * cos(phi), self.path_radius * sin(phi)]
    }

    pub fn value(&self, x: &[f64; 2], t: f64) -> f64 {
        let c = self.center(t);
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        if dx * dx + dy * dy <= self.radius * self.radius {
            self.intensity
        } else {
            0.0
        }
    }

    /// Bounding box of the heated disk at time `t`.
    pub fn support(&self, t: f64) -> Aabb<2> {
        let c = self.center(t);
        Aabb { lo: [c[0] - self.radius, c[1] - self.radius], hi: [c[0] + self.radius, c[1] + self.radius] }
    }
}

/// A square (cube) overlay of side `size` meshed with `counts` elements per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlaySpec {
    pub size: f64,
    pub counts: usize,
    pub basis: BasisSpec,
}

/// Base level followed by the overlays centered at `center`, clipped to the
/// base mesh box.
pub fn advance_overlays<const D: usize>(
    base: &LevelSpec<D>,
    center: &[f64; D],
    overlays: &[OverlaySpec],
) -> Result<Vec<LevelSpec<D>>> {
    let domain = base.mesh.bounds();
    let mut levels = vec![base.clone()];
    for o in overlays {
        let square = Aabb {
            lo: core::array::from_fn(|a| center[a] - 0.5 * o.size),
            hi: core::array::from_fn(|a| center[a] + 0.5 * o.size),
        };
        let clipped = domain.intersection(&square).ok_or(Error::InvalidInput("overlay lies outside the domain"))?;
        let clipped = Aabb::new(clipped.lo, clipped.hi)?;
        levels.push(LevelSpec::new(CartesianMesh::uniform(&clipped, [o.counts; D])?, o.basis));
    }
    Ok(levels)
}

/// L2 projection of `source` onto `target`: solves `M c = ∫ T_s φ` on the
/// unknowns of `target`, keeping its prescribed values and moving their
/// contribution to the right-hand side. Both spaces are tabulated on the
/// same rule over the regions of their combined meshes.
pub fn l2_project<const D: usize>(source: &FieldSolution<D>, target: MultiLevelSpace<D>) -> Result<FieldSolution<D>> {
    let mut meshes = source.space.meshes();
    meshes.extend(target.meshes());
    let regions = compute_regions(&meshes, &RegionCriterion::AtLeastOne, default_merge_tolerance(&meshes))?;
    let source_degrees: Vec<usize> = source.space.levels().iter().map(|l| l.degree()).collect();
    let target_degrees: Vec<usize> = target.levels().iter().map(|l| l.degree()).collect();
    let target_layout = MeshLayout::with_leading(&source_degrees, &target);
    let source_layout = MeshLayout::with_trailing(&source.space, &target_degrees);
    let system = assemble_with_layout(&target, &regions, &target_layout, &WeakForm::new().with_mass(), 1)?;
    let mut f = vec![0.0; target.num_full()];
    let mut gauss = GaussTable::new();
    for region in &regions {
        let points = target_layout.point_count(region)?;
        let aux_t = AuxiliaryElement::new(&target, &target_layout, region, points, &mut gauss)?;
        if aux_t.is_empty() {
            continue;
        }
        let aux_s = AuxiliaryElement::new(&source.space, &source_layout, region, points, &mut gauss)?;
        for (q, (value, _)) in source.evaluate_on(&aux_s).into_iter().enumerate() {
            let wv = aux_t.rule.weight(q) * value;
            if wv == 0.0 {
                continue;
            }
            let idx = aux_t.rule.split(q);
            for (i, func) in aux_t.functions.iter().enumerate() {
                f[func.full] += wv * aux_t.value(i, &idx);
            }
        }
    }
    let mass = SparseSystem { k: system.m.expect("mass requested"), m: None, f };
    let reduced = apply_constraints(&mass, &target);
    let c = if reduced.size() == 0 {
        Vec::new()
    } else {
        SkylineCholesky::factor(&reduced.k)?.solve(&reduced.f)
    };
    FieldSolution::new(target, reduced.expand(&c))
}
