//! Multi-level approximation spaces.
//!
//! Each level owns a Cartesian mesh and a basis. Within a level, functions
//! sharing a mesh entity get one level-local id, so every level is C0 by
//! itself. Functions are never identified across levels; an overlay function
//! whose trace on the overlay boundary inside the domain is not identically
//! zero is constrained to zero instead.
//!
//! Entities are addressed through the *doubled grid* of a mesh: on an axis
//! with `n` elements, even positions `0, 2, .., 2n` are breakpoints and odd
//! positions are element interiors. An entity's free axes are the odd ones.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{integrated_legendre_into, BasisSpec, ElementBasis};
use crate::mesh::{Aabb, CartesianMesh};
use crate::quadrature::gauss_rule;
use crate::solvers::dense_cholesky_solve;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpec<const D: usize> {
    pub mesh: CartesianMesh<D>,
    pub basis: BasisSpec,
}

impl<const D: usize> LevelSpec<D> {
    pub fn new(mesh: CartesianMesh<D>, basis: BasisSpec) -> Self {
        Self { mesh, basis }
    }
}

/// Status of a level-local function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofStatus {
    /// Unknown with the given global id in `0..N`.
    Active(usize),
    /// Removed from the space (overlay boundary or fitted deactivation).
    Zero,
    /// Prescribed coefficient; `id` numbers the prescribed functions densely.
    Dirichlet { id: usize, value: f64 },
}

/// A face of the domain: `x_axis = lo` (`upper = false`) or `x_axis = hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub axis: usize,
    pub upper: bool,
}

impl Face {
    pub fn lower(axis: usize) -> Self {
        Self { axis, upper: false }
    }

    pub fn upper(axis: usize) -> Self {
        Self { axis, upper: true }
    }

    /// All `2 * D` faces of a box.
    pub fn all<const D: usize>() -> Vec<Face> {
        (0..D).flat_map(|a| [Face::lower(a), Face::upper(a)]).collect()
    }
}

/// Per-level numbering of entities and functions.
#[derive(Debug, Clone)]
pub struct Level<const D: usize> {
    spec: LevelSpec<D>,
    basis: ElementBasis<D>,
    /// Mode tuples per free-axis mask.
    entity_modes: Vec<Vec<[usize; D]>>,
    /// Doubled-grid extents `2 n_i + 1`.
    grid: [usize; D],
    /// Prefix sum of function counts over the doubled grid (row-major).
    entity_start: Vec<usize>,
    status: Vec<DofStatus>,
}

impl<const D: usize> Level<D> {
    fn new(spec: LevelSpec<D>) -> Result<Self> {
        let basis = ElementBasis::new(spec.basis)?;
        let entity_modes: Vec<Vec<[usize; D]>> =
            (0u32..(1 << D)).map(|free| spec.basis.entity_modes::<D>(free)).collect();
        let counts = spec.mesh.counts();
        let grid: [usize; D] = core::array::from_fn(|a| 2 * counts[a] + 1);
        let total: usize = grid.iter().product();
        let mut entity_start = Vec::with_capacity(total + 1);
        let mut acc = 0;
        let mut g = [0usize; D];
        for flat in 0..total {
            unflatten(flat, &grid, &mut g);
            entity_start.push(acc);
            acc += entity_modes[free_mask(&g) as usize].len();
        }
        entity_start.push(acc);
        Ok(Self {
            spec,
            basis,
            entity_modes,
            grid,
            entity_start,
            status: vec![DofStatus::Active(0); acc],
        })
    }

    pub fn mesh(&self) -> &CartesianMesh<D> {
        &self.spec.mesh
    }

    pub fn spec(&self) -> &LevelSpec<D> {
        &self.spec
    }

    pub fn basis(&self) -> &ElementBasis<D> {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.spec.basis.degree
    }

    pub fn num_functions(&self) -> usize {
        self.status.len()
    }

    pub fn status(&self) -> &[DofStatus] {
        &self.status
    }

    fn num_entities(&self) -> usize {
        self.entity_start.len() - 1
    }

    /// Level-local id of element mode `mode` (index into the basis ordering).
    pub fn function_id(&self, element: &[usize; D], mode: usize) -> usize {
        let info = &self.basis.modes()[mode];
        let off = info.entity_offset();
        let mut flat = 0;
        for a in 0..D {
            flat = flat * self.grid[a] + 2 * element[a] + off[a];
        }
        self.entity_start[flat] + info.slot
    }

    /// Entity (doubled-grid index) and mode tuple of a level-local function.
    fn function_entity(&self, id: usize) -> ([usize; D], [usize; D]) {
        let flat = self.entity_start.partition_point(|&s| s <= id) - 1;
        let mut g = [0; D];
        unflatten(flat, &self.grid, &mut g);
        let slot = id - self.entity_start[flat];
        (g, self.entity_modes[free_mask(&g) as usize][slot])
    }

    fn entity_functions(&self, flat: usize) -> core::ops::Range<usize> {
        self.entity_start[flat]..self.entity_start[flat + 1]
    }

    /// Fixed coordinate (even positions) or interval (odd positions) per axis.
    fn entity_extent(&self, g: &[usize; D]) -> Aabb<D> {
        let mesh = &self.spec.mesh;
        Aabb {
            lo: core::array::from_fn(|a| mesh.breakpoints(a)[g[a] / 2]),
            hi: core::array::from_fn(|a| mesh.breakpoints(a)[g[a].div_ceil(2)]),
        }
    }

    /// Some element adjacent to the entity, and the entity's position in
    /// that element's doubled grid (0, 1 or 2 per axis).
    fn adjacent_element(&self, g: &[usize; D]) -> ([usize; D], [usize; D]) {
        let mut e = [0; D];
        let mut off = [0; D];
        for a in 0..D {
            let n = (self.grid[a] - 1) / 2;
            if g[a] == 2 * n {
                e[a] = n - 1;
                off[a] = 2;
            } else {
                e[a] = g[a] / 2;
                off[a] = g[a] % 2;
            }
        }
        (e, off)
    }

    /// Sum of `coefficient(status) * phi(x)` over the functions of the element
    /// containing `x`. Returns `None` if `x` is outside the level's mesh.
    pub fn evaluate_with(
        &self,
        x: &[f64; D],
        coefficient: impl Fn(DofStatus) -> f64,
    ) -> Option<(f64, [f64; D])> {
        let e = self.spec.mesh.locate(x)?;
        let b = self.spec.mesh.element_box(&e).ok()?;
        let xi = b.map_to_reference(x).map(|c| c.clamp(-1.0, 1.0));
        let (values, grads) = self.basis.eval(&xi);
        let mut value = 0.0;
        let mut grad = [0.0; D];
        for (mode, (v, gr)) in values.iter().zip(grads.iter()).enumerate() {
            let c = coefficient(self.status[self.function_id(&e, mode)]);
            if c != 0.0 {
                value += c * v;
                for a in 0..D {
                    grad[a] += c * gr[a] * 2.0 / b.extent(a);
                }
            }
        }
        Some((value, grad))
    }
}

fn unflatten<const D: usize>(mut flat: usize, grid: &[usize; D], out: &mut [usize; D]) {
    for a in (0..D).rev() {
        out[a] = flat % grid[a];
        flat /= grid[a];
    }
}

fn free_mask<const D: usize>(g: &[usize; D]) -> u32 {
    (0..D).filter(|&a| g[a] % 2 == 1).fold(0, |m, a| m | (1 << a))
}

#[derive(Debug, Clone)]
pub struct MultiLevelSpace<const D: usize> {
    domain: Aabb<D>,
    levels: Vec<Level<D>>,
    num_active: usize,
    num_dirichlet: usize,
}

impl<const D: usize> MultiLevelSpace<D> {
    /// Builds the superposed space and applies the overlay boundary
    /// constraints. Level 0 must span `domain`; all other levels must lie
    /// inside it.
    pub fn build(levels: Vec<LevelSpec<D>>, domain: Aabb<D>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidLevels("at least one level is required"));
        }
        let tol = domain.tolerance();
        let base = levels[0].mesh.bounds();
        if !(base.contains_box(&domain, tol) && domain.contains_box(&base, tol)) {
            return Err(Error::InvalidLevels("level 0 must cover exactly the domain"));
        }
        for (k, level) in levels.iter().enumerate().skip(1) {
            if !domain.contains_box(&level.mesh.bounds(), tol) {
                return Err(Error::OverlayOutsideDomain(k));
            }
        }
        let levels = levels.into_iter().map(Level::new).collect::<Result<Vec<_>>>()?;
        let mut space = Self { domain, levels, num_active: 0, num_dirichlet: 0 };
        for k in 1..space.levels.len() {
            let open_faces = space.overlay_faces_inside(k);
            let level = &mut space.levels[k];
            let mut g = [0; D];
            for flat in 0..level.num_entities() {
                unflatten(flat, &level.grid, &mut g);
                let on_open_face = open_faces.iter().any(|f| {
                    let extreme = if f.upper { level.grid[f.axis] - 1 } else { 0 };
                    g[f.axis] == extreme
                });
                if on_open_face {
                    for id in level.entity_functions(flat) {
                        level.status[id] = DofStatus::Zero;
                    }
                }
            }
        }
        space.renumber();
        Ok(space)
    }

    /// Faces of level `k`'s box that do not lie on the domain boundary.
    fn overlay_faces_inside(&self, k: usize) -> Vec<Face> {
        let b = self.levels[k].mesh().bounds();
        let tol = self.domain.tolerance();
        Face::all::<D>()
            .into_iter()
            .filter(|f| {
                let (own, outer) = if f.upper {
                    (b.hi[f.axis], self.domain.hi[f.axis])
                } else {
                    (b.lo[f.axis], self.domain.lo[f.axis])
                };
                (own - outer).abs() > tol
            })
            .collect()
    }

    /// Fitted multi-level deactivation for nested dyadic ladders: a function
    /// of level `k` is removed when its entity is refined by level `k + 1`
    /// and the refined entity is not constrained by the overlay boundary of
    /// level `k + 1`. Covered elements therefore lose their internal modes.
    pub fn apply_fitted_deactivation(mut self) -> Result<Self> {
        for k in 1..self.levels.len() {
            check_nested(self.levels[k - 1].mesh(), self.levels[k].mesh(), self.domain.tolerance())
                .map_err(|_| Error::NonNested(k))?;
        }
        let tol = self.domain.tolerance();
        for k in (0..self.levels.len().saturating_sub(1)).rev() {
            let open_faces = self.overlay_faces_inside(k + 1);
            let (coarse, fine) = self.levels.split_at_mut(k + 1);
            let coarse = &mut coarse[k];
            let fine = &fine[0];
            let fine_box = fine.mesh().bounds();
            let mut g = [0; D];
            for flat in 0..coarse.num_entities() {
                unflatten(flat, &coarse.grid, &mut g);
                let extent = coarse.entity_extent(&g);
                if !fine_box.contains_box(&extent, tol) {
                    continue;
                }
                let mut refined = true;
                let mut constrained = false;
                for a in (0..D).filter(|&a| g[a] % 2 == 0) {
                    let c = extent.lo[a];
                    let bp = fine.mesh().breakpoints(a);
                    if !bp.iter().any(|&b| (b - c).abs() <= tol) {
                        refined = false;
                        break;
                    }
                    constrained |= open_faces.iter().any(|f| {
                        f.axis == a && {
                            let face = if f.upper { fine_box.hi[a] } else { fine_box.lo[a] };
                            (face - c).abs() <= tol
                        }
                    });
                }
                if refined && !constrained {
                    for id in coarse.entity_functions(flat) {
                        coarse.status[id] = DofStatus::Zero;
                    }
                }
            }
        }
        self.renumber();
        Ok(self)
    }

    /// Prescribes boundary values `g` on the listed domain faces.
    ///
    /// Levels are processed from coarse to fine. Each level takes over the
    /// part of `g` not yet represented by the prescribed functions of coarser
    /// levels: vertex coefficients interpolate it, edge modes are its L2
    /// projection (minus the vertex lift) onto the edge bubbles.
    pub fn set_dirichlet(mut self, faces: &[Face], g: &dyn Fn(&[f64; D]) -> f64) -> Result<Self> {
        for f in faces {
            if f.axis >= D {
                return Err(Error::FaceNotOnBoundary { axis: f.axis, upper: f.upper });
            }
        }
        let tol = self.domain.tolerance();
        for k in 0..self.levels.len() {
            let bounds = self.levels[k].mesh().bounds();
            let level_faces: Vec<Face> = faces
                .iter()
                .copied()
                .filter(|f| {
                    let (own, outer) = if f.upper {
                        (bounds.hi[f.axis], self.domain.hi[f.axis])
                    } else {
                        (bounds.lo[f.axis], self.domain.lo[f.axis])
                    };
                    (own - outer).abs() <= tol
                })
                .collect();
            if level_faces.is_empty() {
                continue;
            }
            let residual = |x: &[f64; D]| -> f64 {
                let mut r = g(x);
                for lower in &self.levels[..k] {
                    if let Some((v, _)) = lower.evaluate_with(x, |s| match s {
                        DofStatus::Dirichlet { value, .. } => value,
                        _ => 0.0,
                    }) {
                        r -= v;
                    }
                }
                r
            };
            let level = &self.levels[k];
            let mut updates: Vec<(usize, f64)> = Vec::new();
            let on_face = |g: &[usize; D]| {
                level_faces.iter().any(|f| {
                    let extreme = if f.upper { level.grid[f.axis] - 1 } else { 0 };
                    g[f.axis] == extreme
                })
            };
            // vertices
            let mut gi = [0; D];
            for flat in 0..level.num_entities() {
                unflatten(flat, &level.grid, &mut gi);
                if free_mask(&gi) != 0 || !on_face(&gi) {
                    continue;
                }
                for id in level.entity_functions(flat) {
                    if let DofStatus::Active(_) = level.status[id] {
                        let x = level.entity_extent(&gi).lo;
                        updates.push((id, residual(&x)));
                    }
                }
            }
            let vertex_value = |id: usize, updates: &[(usize, f64)]| -> f64 {
                updates.iter().find(|(i, _)| *i == id).map_or(0.0, |(_, v)| *v)
            };
            // edges and higher-dimensional entities
            let n_vertex_updates = updates.len();
            for flat in 0..level.num_entities() {
                unflatten(flat, &level.grid, &mut gi);
                let free = free_mask(&gi);
                if free == 0 || !on_face(&gi) {
                    continue;
                }
                let range = level.entity_functions(flat);
                if range.is_empty() || !range.clone().any(|id| matches!(level.status[id], DofStatus::Active(_))) {
                    continue;
                }
                if free.count_ones() > 1 {
                    return Err(Error::UnsupportedBasis("Dirichlet data on faces of dimension > 1"));
                }
                let axis = free.trailing_zeros() as usize;
                let extent = level.entity_extent(&gi);
                // coefficients of the two end vertices of this edge
                let mut ends = [0.0; 2];
                for (side, end) in ends.iter_mut().enumerate() {
                    let mut gv = gi;
                    gv[axis] = gi[axis] - 1 + 2 * side;
                    let mut fv = 0;
                    for a in 0..D {
                        fv = fv * level.grid[a] + gv[a];
                    }
                    let vid = level.entity_start[fv];
                    *end = match level.status[vid] {
                        DofStatus::Dirichlet { value, .. } => value,
                        DofStatus::Active(_) => vertex_value(vid, &updates[..n_vertex_updates]),
                        DofStatus::Zero => 0.0,
                    };
                }
                let p = level.degree();
                let nb = p - 1;
                let (pts, wts) = gauss_rule((2 * p + 10).min(64))?;
                let mut gram = vec![0.0; nb * nb];
                let mut rhs = vec![0.0; nb];
                let mut vals = vec![0.0; p + 1];
                let mut ders = vec![0.0; p + 1];
                for (&xi, &w) in pts.iter().zip(wts.iter()) {
                    integrated_legendre_into(p, xi, &mut vals, &mut ders);
                    let mut x = extent.lo;
                    x[axis] = 0.5 * (extent.lo[axis] + extent.hi[axis])
                        + 0.5 * (extent.hi[axis] - extent.lo[axis]) * xi;
                    let r = residual(&x) - ends[0] * vals[0] - ends[1] * vals[1];
                    for i in 0..nb {
                        rhs[i] += w * r * vals[i + 2];
                        for j in 0..nb {
                            gram[i * nb + j] += w * vals[i + 2] * vals[j + 2];
                        }
                    }
                }
                let coeffs = dense_cholesky_solve(&gram, &rhs, nb)?;
                let modes = &level.entity_modes[free as usize];
                for (slot, id) in range.enumerate() {
                    if let DofStatus::Active(_) = level.status[id] {
                        updates.push((id, coeffs[modes[slot][axis] - 2]));
                    }
                }
            }
            let level = &mut self.levels[k];
            for (id, value) in updates {
                level.status[id] = DofStatus::Dirichlet { id: 0, value };
            }
            self.renumber();
        }
        Ok(self)
    }

    fn renumber(&mut self) {
        let mut active = 0;
        let mut dirichlet = 0;
        for level in &mut self.levels {
            for s in &mut level.status {
                match s {
                    DofStatus::Active(id) => {
                        *id = active;
                        active += 1;
                    }
                    DofStatus::Dirichlet { id, .. } => {
                        *id = dirichlet;
                        dirichlet += 1;
                    }
                    DofStatus::Zero => {}
                }
            }
        }
        self.num_active = active;
        self.num_dirichlet = dirichlet;
    }

    pub fn domain(&self) -> &Aabb<D> {
        &self.domain
    }

    pub fn levels(&self) -> &[Level<D>] {
        &self.levels
    }

    pub fn meshes(&self) -> Vec<&CartesianMesh<D>> {
        self.levels.iter().map(|l| l.mesh()).collect()
    }

    /// Number of unknowns `N`.
    pub fn count_active(&self) -> usize {
        self.num_active
    }

    pub fn num_dirichlet(&self) -> usize {
        self.num_dirichlet
    }

    /// Size of the full numbering: active ids, then prescribed ids.
    pub fn num_full(&self) -> usize {
        self.num_active + self.num_dirichlet
    }

    /// Index in the full numbering, `None` for removed functions.
    pub fn full_index(&self, status: DofStatus) -> Option<usize> {
        match status {
            DofStatus::Active(id) => Some(id),
            DofStatus::Dirichlet { id, .. } => Some(self.num_active + id),
            DofStatus::Zero => None,
        }
    }

    /// Prescribed coefficients indexed by Dirichlet id.
    pub fn dirichlet_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_dirichlet];
        for level in &self.levels {
            for s in &level.status {
                if let DofStatus::Dirichlet { id, value } = *s {
                    out[id] = value;
                }
            }
        }
        out
    }

    /// Full-numbering vector with zero unknowns and the prescribed values.
    pub fn dirichlet_lift(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_full()];
        out[self.num_active..].copy_from_slice(&self.dirichlet_values());
        out
    }

    /// Pushes `(mode, full index)` of every non-removed function of an element.
    pub fn element_functions(&self, level: usize, element: &[usize; D], out: &mut Vec<(usize, usize)>) {
        let lvl = &self.levels[level];
        for mode in 0..lvl.basis.len() {
            let id = lvl.function_id(element, mode);
            if let Some(full) = self.full_index(lvl.status[id]) {
                out.push((mode, full));
            }
        }
    }

    /// Level and level-local id of every function in the full numbering.
    pub fn full_index_owners(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.num_full()];
        for (k, level) in self.levels.iter().enumerate() {
            for (id, s) in level.status.iter().enumerate() {
                if let Some(full) = self.full_index(*s) {
                    out[full] = (k, id);
                }
            }
        }
        out
    }

    /// Entity position (doubled grid) and mode tuple of a level-local function.
    pub fn describe_function(&self, level: usize, id: usize) -> ([usize; D], [usize; D]) {
        self.levels[level].function_entity(id)
    }

    /// Element adjacent to the entity of a level-local function and the
    /// element mode index representing it there.
    pub fn function_support_element(&self, level: usize, id: usize) -> ([usize; D], usize) {
        let lvl = &self.levels[level];
        let (g, k) = lvl.function_entity(id);
        let (e, off) = lvl.adjacent_element(&g);
        let k_elem: [usize; D] = core::array::from_fn(|a| match off[a] {
            0 => 0,
            2 => 1,
            _ => k[a],
        });
        let mode = lvl.basis.modes().iter().position(|m| m.k == k_elem).expect("mode exists");
        debug_assert_eq!(lvl.function_id(&e, mode), id);
        (e, mode)
    }
}

/// Checks that `fine` refines a union of `coarse` elements by bisection.
fn check_nested<const D: usize>(coarse: &CartesianMesh<D>, fine: &CartesianMesh<D>, tol: f64) -> Result<()> {
    let fb = fine.bounds();
    for a in 0..D {
        let cbp = coarse.breakpoints(a);
        let mut expected = Vec::new();
        for w in cbp.windows(2) {
            if w[0] >= fb.lo[a] - tol && w[1] <= fb.hi[a] + tol {
                if expected.is_empty() {
                    expected.push(w[0]);
                }
                expected.push(0.5 * (w[0] + w[1]));
                expected.push(w[1]);
            }
        }
        let fbp = fine.breakpoints(a);
        if expected.len() != fbp.len()
            || expected.iter().zip(fbp.iter()).any(|(e, f)| (e - f).abs() > tol)
        {
            return Err(Error::NonNested(0));
        }
    }
    Ok(())
}

/// Mesh that halves every element of `parent` lying inside `region`.
pub fn bisect_inside<const D: usize>(parent: &CartesianMesh<D>, region: &Aabb<D>) -> Result<CartesianMesh<D>> {
    let tol = region.tolerance();
    let breakpoints: [Vec<f64>; D] = core::array::from_fn(|a| {
        let mut out = Vec::new();
        for w in parent.breakpoints(a).windows(2) {
            if w[0] >= region.lo[a] - tol && w[1] <= region.hi[a] + tol {
                if out.is_empty() {
                    out.push(w[0]);
                }
                out.push(0.5 * (w[0] + w[1]));
                out.push(w[1]);
            }
        }
        out
    });
    CartesianMesh::new(breakpoints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use alloc::vec;

    fn interval(lo: f64, hi: f64) -> Aabb<1> {
        Aabb::new([lo], [hi]).unwrap()
    }

    #[test]
    fn single_level_has_no_constraints() {
        let domain = Aabb::new([0.0; 2], [1.0; 2]).unwrap();
        let mesh = CartesianMesh::uniform(&domain, [2, 3]).unwrap();
        let space = MultiLevelSpace::build(vec![LevelSpec::new(mesh, BasisSpec::trunk(3))], domain).unwrap();
        // 12 vertices, 17 edges * 2 modes, 6 * 0 internal
        assert_eq!(space.count_active(), 12 + 17 * 2);
    }

    #[test]
    fn overlay_boundary_rule_1d() {
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let overlay = CartesianMesh::new([vec![1.0 / 3.0, 2.0 / 3.0, 1.0]]).unwrap();
        let space = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::tensor(1)), LevelSpec::new(overlay, BasisSpec::tensor(1))],
            domain,
        )
        .unwrap();
        let st = space.levels()[1].status();
        assert_eq!(st[0], DofStatus::Zero);
        assert!(matches!(st[1], DofStatus::Active(_)));
        assert!(matches!(st[2], DofStatus::Active(_)));
        assert_eq!(space.count_active(), 4);
    }

    #[test]
    fn overlay_boundary_rule_2d_corner() {
        let domain = Aabb::new([0.0; 2], [1.0; 2]).unwrap();
        let base = CartesianMesh::uniform(&domain, [1, 1]).unwrap();
        let overlay = CartesianMesh::uniform(&Aabb::new([0.0; 2], [0.5; 2]).unwrap(), [1, 1]).unwrap();
        let space = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::trunk(3)), LevelSpec::new(overlay, BasisSpec::trunk(2))],
            domain,
        )
        .unwrap();
        let active_overlay = space.levels()[1]
            .status()
            .iter()
            .filter(|s| matches!(s, DofStatus::Active(_)))
            .count();
        assert_eq!(active_overlay, 3);
        assert_eq!(space.count_active(), 4 + 4 * 2 + 3);
    }

    #[test]
    fn overlay_outside_domain_rejected() {
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let overlay = CartesianMesh::new([vec![0.5, 1.5]]).unwrap();
        let r = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::tensor(1)), LevelSpec::new(overlay, BasisSpec::tensor(1))],
            domain,
        );
        assert_eq!(r.unwrap_err(), Error::OverlayOutsideDomain(1));
        assert!(MultiLevelSpace::<1>::build(vec![], domain).is_err());
    }

    #[test]
    fn fitted_one_bisection() {
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let fine = bisect_inside(&base, &domain).unwrap();
        let space = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::tensor(2)), LevelSpec::new(fine, BasisSpec::tensor(1))],
            domain,
        )
        .unwrap()
        .apply_fitted_deactivation()
        .unwrap();
        assert!(space.levels()[0].status().iter().all(|s| *s == DofStatus::Zero));
        assert_eq!(space.count_active(), 3);
    }

    #[test]
    fn fitted_without_overlays_is_unchanged() {
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let space = MultiLevelSpace::build(vec![LevelSpec::new(base, BasisSpec::tensor(4))], domain).unwrap();
        let n = space.count_active();
        assert_eq!(space.apply_fitted_deactivation().unwrap().count_active(), n);
    }

    #[test]
    fn fitted_rejects_unaligned_overlay() {
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let overlay = CartesianMesh::new([vec![1.0 / 3.0, 2.0 / 3.0, 1.0]]).unwrap();
        let r = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::tensor(2)), LevelSpec::new(overlay, BasisSpec::tensor(1))],
            domain,
        )
        .unwrap()
        .apply_fitted_deactivation();
        assert_eq!(r.unwrap_err(), Error::NonNested(1));
    }

    #[test]
    fn homogeneous_dirichlet_counts() {
        let domain = Aabb::new([-5.0; 2], [5.0; 2]).unwrap();
        let mesh = CartesianMesh::uniform(&domain, [11, 11]).unwrap();
        let space = MultiLevelSpace::build(vec![LevelSpec::new(mesh, BasisSpec::trunk(4))], domain)
            .unwrap()
            .set_dirichlet(&Face::all::<2>(), &|_| 0.0)
            .unwrap();
        assert_eq!(space.count_active(), 881);
        assert_eq!(space.num_dirichlet(), 1057 - 881);
        assert!(space.dirichlet_values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_dirichlet_data_reproduced_by_vertices() {
        let domain = Aabb::new([0.0; 2], [1.0; 2]).unwrap();
        let mesh = CartesianMesh::uniform(&domain, [2, 2]).unwrap();
        let g = |x: &[f64; 2]| 1.0 + 2.0 * x[0] - 3.0 * x[1];
        let space = MultiLevelSpace::build(vec![LevelSpec::new(mesh, BasisSpec::trunk(4))], domain)
            .unwrap()
            .set_dirichlet(&Face::all::<2>(), &g)
            .unwrap();
        let level = &space.levels()[0];
        for (id, s) in level.status().iter().enumerate() {
            if let DofStatus::Dirichlet { value, .. } = *s {
                let (g_idx, _) = space.describe_function(0, id);
                if free_mask(&g_idx) == 0 {
                    let x = level.entity_extent(&g_idx).lo;
                    assert!((value - g(&x)).abs() < 1e-14);
                } else {
                    assert!(value.abs() < 1e-13, "edge mode coefficient {value}");
                }
            }
        }
    }

    #[test]
    fn dirichlet_is_inherited_by_overlay_on_boundary() {
        // overlay touching the Dirichlet face only picks up what the base
        // level cannot represent
        let domain = interval(0.0, 1.0);
        let base = CartesianMesh::new([vec![0.0, 1.0]]).unwrap();
        let overlay = CartesianMesh::new([vec![0.0, 0.25, 0.5]]).unwrap();
        let space = MultiLevelSpace::build(
            vec![LevelSpec::new(base, BasisSpec::tensor(2)), LevelSpec::new(overlay, BasisSpec::tensor(1))],
            domain,
        )
        .unwrap()
        .set_dirichlet(&[Face::lower(0)], &|_| 2.0)
        .unwrap();
        assert_eq!(space.levels()[0].status()[0], DofStatus::Dirichlet { id: 0, value: 2.0 });
        assert_eq!(space.levels()[1].status()[0], DofStatus::Dirichlet { id: 1, value: 0.0 });
    }
}
