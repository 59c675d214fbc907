//! Coupled assembly over integration regions.
//!
//! Every region is turned into an auxiliary element whose shape functions are
//! the concatenation of the non-removed functions of all contributing
//! elements, across levels. Its local matrices are scattered into a sparse
//! system in the space's full numbering (unknowns first, then prescribed
//! functions); [`apply_constraints`] then eliminates the prescribed part.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::integrated_legendre_into;
use crate::math::sqrt;
use crate::mesh::Aabb;
use crate::quadrature::{GaussTable, MAX_GAUSS_POINTS};
use crate::regions::{IntegrationRegion, RegionRule};
use crate::space::MultiLevelSpace;
use crate::sparse::{CsrMatrix, PatternBuilder};
use crate::{Error, Result};

/// Diffusion coefficient of the stiffness term.
#[derive(Clone, Copy)]
pub enum Coefficient<'a, const D: usize> {
    Constant(f64),
    Function(&'a dyn Fn(&[f64; D]) -> f64),
}

impl<const D: usize> Coefficient<'_, D> {
    fn at(&self, x: &[f64; D]) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(x),
        }
    }
}

/// Terms of `a(u, v) = ∫ κ ∇u·∇v (+ ∫ u v)` and `ℓ(v) = ∫ s v + Σ f v(x₀)`.
#[derive(Clone, Default)]
pub struct WeakForm<'a, const D: usize> {
    pub stiffness: Option<Coefficient<'a, D>>,
    pub mass: bool,
    pub source: Option<&'a dyn Fn(&[f64; D]) -> f64>,
    pub point_loads: Vec<([f64; D], f64)>,
}

impl<'a, const D: usize> WeakForm<'a, D> {
    pub fn new() -> Self {
        Self { stiffness: None, mass: false, source: None, point_loads: Vec::new() }
    }

    /// Stiffness with `κ = 1`.
    pub fn laplace() -> Self {
        Self::new().with_stiffness(Coefficient::Constant(1.0))
    }

    pub fn with_stiffness(mut self, kappa: Coefficient<'a, D>) -> Self {
        self.stiffness = Some(kappa);
        self
    }

    pub fn with_mass(mut self) -> Self {
        self.mass = true;
        self
    }

    pub fn with_source(mut self, source: &'a dyn Fn(&[f64; D]) -> f64) -> Self {
        self.source = Some(source);
        self
    }

    pub fn with_point_load(mut self, x: [f64; D], magnitude: f64) -> Self {
        self.point_loads.push((x, magnitude));
        self
    }
}

/// Matrices and load vector in the full numbering of a space.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub k: CsrMatrix,
    pub m: Option<CsrMatrix>,
    pub f: Vec<f64>,
}

/// How the meshes referenced by region contributors relate to the levels of
/// a space.
///
/// Meshes that are not levels of the space are skipped during scattering but
/// still raise the quadrature order of the regions they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshLayout {
    levels: Vec<Option<usize>>,
    degrees: Vec<usize>,
}

impl MeshLayout {
    /// Region meshes are exactly the levels of `space`, in order.
    pub fn of_space<const D: usize>(space: &MultiLevelSpace<D>) -> Self {
        Self::with_leading(&[], space)
    }

    /// Region meshes are foreign meshes of the given degrees followed by the
    /// levels of `space`.
    pub fn with_leading<const D: usize>(foreign_degrees: &[usize], space: &MultiLevelSpace<D>) -> Self {
        let mut levels = vec![None; foreign_degrees.len()];
        let mut degrees = foreign_degrees.to_vec();
        for (k, level) in space.levels().iter().enumerate() {
            levels.push(Some(k));
            degrees.push(level.degree());
        }
        Self { levels, degrees }
    }

    /// Region meshes are the levels of `space` followed by foreign meshes of
    /// the given degrees.
    pub fn with_trailing<const D: usize>(space: &MultiLevelSpace<D>, foreign_degrees: &[usize]) -> Self {
        let mut layout = Self::of_space(space);
        layout.levels.extend(core::iter::repeat_n(None, foreign_degrees.len()));
        layout.degrees.extend_from_slice(foreign_degrees);
        layout
    }

    fn level(&self, mesh: usize) -> Result<Option<usize>> {
        self.levels.get(mesh).copied().ok_or(Error::UnknownMesh(mesh))
    }

    /// Gauss points per axis for a region: highest covering degree plus one.
    pub fn point_count<const D: usize>(&self, region: &IntegrationRegion<D>) -> Result<usize> {
        let mut p = 0;
        for c in &region.contributors {
            p = p.max(*self.degrees.get(c.mesh).ok_or(Error::UnknownMesh(c.mesh))?);
        }
        Ok(p + 1)
    }
}

/// One shape function of an auxiliary element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxFunction<const D: usize> {
    /// Index in the full numbering.
    pub full: usize,
    /// Position of the owning contributor in the region.
    pub contributor: usize,
    /// 1D mode per axis.
    pub k: [usize; D],
}

/// Shape functions of all contributors of a region, tabulated on a Gauss
/// rule over the region.
#[derive(Debug, Clone)]
pub struct AuxiliaryElement<const D: usize> {
    /// Sorted by full index.
    pub functions: Vec<AuxFunction<D>>,
    pub rule: RegionRule<D>,
    /// Per contributor and axis: `(values, derivatives)` with entry
    /// `k * n_axis + i`; derivatives are taken in global coordinates.
    tables: Vec<[(Vec<f64>, Vec<f64>); D]>,
    /// Offset of each contributor's 1D modes in the per-axis mode list.
    offsets: Vec<usize>,
    modes_1d: usize,
}

impl<const D: usize> AuxiliaryElement<D> {
    pub fn new(
        space: &MultiLevelSpace<D>,
        layout: &MeshLayout,
        region: &IntegrationRegion<D>,
        points: usize,
        gauss: &mut GaussTable,
    ) -> Result<Self> {
        let rule = RegionRule::new(region, [points; D], gauss)?;
        let mut tables = Vec::with_capacity(region.contributors.len());
        let mut offsets = Vec::with_capacity(region.contributors.len());
        let mut functions = Vec::new();
        let mut modes_1d = 0;
        let mut buffer = Vec::new();
        for (c, contributor) in region.contributors.iter().enumerate() {
            offsets.push(modes_1d);
            let Some(level) = layout.level(contributor.mesh)? else {
                tables.push(core::array::from_fn(|_| (Vec::new(), Vec::new())));
                continue;
            };
            let lvl = &space.levels()[level];
            let p = lvl.degree();
            let element = lvl.mesh().element_box(&contributor.element)?;
            let mut v = vec![0.0; p + 1];
            let mut d = vec![0.0; p + 1];
            tables.push(core::array::from_fn(|a| {
                let xi = &rule.local[c][a];
                let n = xi.len();
                let scale = 2.0 / element.extent(a);
                let mut values = vec![0.0; (p + 1) * n];
                let mut derivatives = vec![0.0; (p + 1) * n];
                for (i, &x) in xi.iter().enumerate() {
                    integrated_legendre_into(p, x, &mut v, &mut d);
                    for k in 0..=p {
                        values[k * n + i] = v[k];
                        derivatives[k * n + i] = d[k] * scale;
                    }
                }
                (values, derivatives)
            }));
            modes_1d += p + 1;
            buffer.clear();
            space.element_functions(level, &contributor.element, &mut buffer);
            let modes = lvl.basis().modes();
            functions.extend(buffer.iter().map(|&(mode, full)| AuxFunction { full, contributor: c, k: modes[mode].k }));
        }
        functions.sort_by_key(|f| f.full);
        Ok(Self { functions, rule, tables, offsets, modes_1d })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Full indices of the functions, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.functions.iter().map(|f| f.full).collect()
    }

    /// Value of function `f` at the point with per-axis indices `idx`.
    pub fn value(&self, f: usize, idx: &[usize; D]) -> f64 {
        let func = &self.functions[f];
        let t = &self.tables[func.contributor];
        (0..D).map(|a| t[a].0[func.k[a] * self.rule.points[a].len() + idx[a]]).product()
    }

    /// Global gradient of function `f` at the point with per-axis indices `idx`.
    pub fn gradient(&self, f: usize, idx: &[usize; D]) -> [f64; D] {
        let func = &self.functions[f];
        let t = &self.tables[func.contributor];
        core::array::from_fn(|a| {
            (0..D)
                .map(|b| {
                    let j = func.k[b] * self.rule.points[b].len() + idx[b];
                    if a == b { t[b].1[j] } else { t[b].0[j] }
                })
                .product()
        })
    }

    /// Per-axis 1D integrals `(∫ N_u N_v, ∫ N_u' N_v')` over the region for
    /// all pairs of contributor modes, row-major in the per-axis mode list.
    fn axis_integrals(&self, a: usize) -> (Vec<f64>, Vec<f64>) {
        let s = self.modes_1d;
        let n = self.rule.points[a].len();
        let w = &self.rule.weights[a];
        let mut mass = vec![0.0; s * s];
        let mut diff = vec![0.0; s * s];
        // flatten the per-contributor tables into one list of 1D modes
        let mut vals: Vec<&[f64]> = Vec::with_capacity(s);
        let mut ders: Vec<&[f64]> = Vec::with_capacity(s);
        for t in &self.tables {
            let (v, d) = &t[a];
            for k in 0..v.len() / n.max(1) {
                vals.push(&v[k * n..(k + 1) * n]);
                ders.push(&d[k * n..(k + 1) * n]);
            }
        }
        for u in 0..vals.len() {
            for v in u..vals.len() {
                let mut m = 0.0;
                let mut d = 0.0;
                for i in 0..n {
                    m += w[i] * vals[u][i] * vals[v][i];
                    d += w[i] * ders[u][i] * ders[v][i];
                }
                mass[u * s + v] = m;
                mass[v * s + u] = m;
                diff[u * s + v] = d;
                diff[v * s + u] = d;
            }
        }
        (mass, diff)
    }

    /// Local stiffness (`κ` constant) and mass matrices from products of 1D
    /// integrals; exact for the separable integrands on a tensor rule.
    pub fn separable_matrices(&self, kappa: Option<f64>, mass: bool) -> (Option<Vec<f64>>, Option<Vec<f64>>) {
        let n = self.len();
        let s = self.modes_1d;
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..D).map(|a| self.axis_integrals(a)).collect();
        let ids: Vec<[usize; D]> = self
            .functions
            .iter()
            .map(|f| core::array::from_fn(|a| self.offsets[f.contributor] + f.k[a]))
            .collect();
        let mut k_local = kappa.map(|_| vec![0.0; n * n]);
        let mut m_local = if mass { Some(vec![0.0; n * n]) } else { None };
        for f in 0..n {
            for g in f..n {
                let mut m1 = [0.0; D];
                let mut d1 = [0.0; D];
                for a in 0..D {
                    let j = ids[f][a] * s + ids[g][a];
                    m1[a] = axes[a].0[j];
                    d1[a] = axes[a].1[j];
                }
                if let (Some(k), Some(kappa)) = (k_local.as_mut(), kappa) {
                    let mut sum = 0.0;
                    for a in 0..D {
                        let mut term = d1[a];
                        for b in 0..D {
                            if b != a {
                                term *= m1[b];
                            }
                        }
                        sum += term;
                    }
                    k[f * n + g] = kappa * sum;
                    k[g * n + f] = kappa * sum;
                }
                if let Some(m) = m_local.as_mut() {
                    let v: f64 = m1.iter().product();
                    m[f * n + g] = v;
                    m[g * n + f] = v;
                }
            }
        }
        (k_local, m_local)
    }

    /// Local stiffness matrix with a coefficient evaluated per quadrature point.
    pub fn stiffness_matrix(&self, kappa: &Coefficient<'_, D>) -> Vec<f64> {
        let n = self.len();
        let nq = self.rule.len();
        let mut grads = vec![[0.0; D]; n * nq];
        let mut scaled = vec![0.0; nq];
        for q in 0..nq {
            let idx = self.rule.split(q);
            scaled[q] = self.rule.weight(q) * kappa.at(&self.rule.point(q));
            for f in 0..n {
                grads[f * nq + q] = self.gradient(f, &idx);
            }
        }
        let mut k = vec![0.0; n * n];
        for f in 0..n {
            for g in f..n {
                let mut sum = 0.0;
                for q in 0..nq {
                    let (gf, gg) = (&grads[f * nq + q], &grads[g * nq + q]);
                    sum += scaled[q] * (0..D).map(|a| gf[a] * gg[a]).sum::<f64>();
                }
                k[f * n + g] = sum;
                k[g * n + f] = sum;
            }
        }
        k
    }

    /// `∫ s φ_f` for every function; `s` is called once per quadrature point.
    pub fn load_vector(&self, source: &dyn Fn(&[f64; D]) -> f64) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for q in 0..self.rule.len() {
            let ws = self.rule.weight(q) * source(&self.rule.point(q));
            if ws == 0.0 {
                continue;
            }
            let idx = self.rule.split(q);
            for (f, o) in out.iter_mut().enumerate() {
                *o += ws * self.value(f, &idx);
            }
        }
        out
    }
}

fn scaled_points(points: usize, multiplier: usize) -> Result<usize> {
    let n = points * multiplier.max(1);
    if n > MAX_GAUSS_POINTS {
        return Err(Error::GaussPoints(n));
    }
    Ok(n)
}

/// Assembles `form` over `regions`, whose meshes are the levels of `space`.
///
/// Stiffness and mass use `p + 1` Gauss points per axis (`p` the highest
/// degree covering the region); the distributed load uses
/// `over_integration` times as many.
pub fn assemble<const D: usize>(
    space: &MultiLevelSpace<D>,
    regions: &[IntegrationRegion<D>],
    form: &WeakForm<'_, D>,
    over_integration: usize,
) -> Result<SparseSystem> {
    assemble_with_layout(space, regions, &MeshLayout::of_space(space), form, over_integration)
}

/// [`assemble`] for regions whose meshes relate to the space via `layout`.
pub fn assemble_with_layout<const D: usize>(
    space: &MultiLevelSpace<D>,
    regions: &[IntegrationRegion<D>],
    layout: &MeshLayout,
    form: &WeakForm<'_, D>,
    over_integration: usize,
) -> Result<SparseSystem> {
    let n = space.num_full();
    let mut gauss = GaussTable::new();

    let mut pattern = PatternBuilder::new(n);
    let mut buffer = Vec::new();
    for region in regions {
        let mut block = Vec::new();
        for c in &region.contributors {
            if let Some(level) = layout.level(c.mesh)? {
                buffer.clear();
                space.element_functions(level, &c.element, &mut buffer);
                block.extend(buffer.iter().map(|&(_, full)| full));
            }
        }
        pattern.add_block(block);
    }
    let template = pattern.build();
    let mut k = template.clone();
    let mut m = if form.mass { Some(template) } else { None };
    let mut f = vec![0.0; n];

    let constant_kappa = match form.stiffness {
        Some(Coefficient::Constant(c)) => Some(c),
        _ => None,
    };
    for region in regions {
        let points = layout.point_count(region)?;
        let aux = AuxiliaryElement::new(space, layout, region, points, &mut gauss)?;
        if aux.is_empty() {
            continue;
        }
        let rows = aux.indices();
        let (k_sep, m_local) = aux.separable_matrices(constant_kappa, form.mass);
        let k_local = match (&form.stiffness, k_sep) {
            (Some(Coefficient::Function(_)), _) => Some(aux.stiffness_matrix(form.stiffness.as_ref().unwrap())),
            (_, k) => k,
        };
        if let Some(local) = k_local {
            k.add_dense_block(&rows, &local);
        }
        if let (Some(m), Some(local)) = (m.as_mut(), m_local) {
            m.add_dense_block(&rows, &local);
        }
        if let Some(source) = form.source {
            let local = if over_integration <= 1 {
                aux.load_vector(source)
            } else {
                let load_points = scaled_points(points, over_integration)?;
                AuxiliaryElement::new(space, layout, region, load_points, &mut gauss)?.load_vector(source)
            };
            for (&i, v) in rows.iter().zip(&local) {
                f[i] += v;
            }
        }
    }
    for &(x, magnitude) in &form.point_loads {
        add_point_load(space, &x, magnitude, &mut f)?;
    }
    Ok(SparseSystem { k, m, f })
}

/// Dense factor `B` of the reduced Laplace stiffness, `K = BᵀB`: one row
/// `sqrt(w) ∂φ/∂x_a` per quadrature point and axis, one column per unknown.
/// Returns `B` row-major with its row count.
pub fn stiffness_factor<const D: usize>(
    space: &MultiLevelSpace<D>,
    regions: &[IntegrationRegion<D>],
) -> Result<(Vec<f64>, usize)> {
    let layout = MeshLayout::of_space(space);
    let n = space.count_active();
    let mut gauss = GaussTable::new();
    let mut b = Vec::new();
    let mut rows = 0;
    for region in regions {
        let aux = AuxiliaryElement::new(space, &layout, region, layout.point_count(region)?, &mut gauss)?;
        let unknowns: Vec<usize> = (0..aux.len()).filter(|&f| aux.functions[f].full < n).collect();
        if unknowns.is_empty() {
            continue;
        }
        for q in 0..aux.rule.len() {
            let idx = aux.rule.split(q);
            let sw = sqrt(aux.rule.weight(q));
            let start = b.len();
            b.resize(start + D * n, 0.0);
            for &f in &unknowns {
                let g = aux.gradient(f, &idx);
                for a in 0..D {
                    b[start + a * n + aux.functions[f].full] = sw * g[a];
                }
            }
            rows += D;
        }
    }
    Ok((b, rows))
}

/// Distributed load `∫ s φ` in the full numbering, visiting only regions
/// that intersect `support` (all regions when `None`).
pub fn assemble_load<const D: usize>(
    space: &MultiLevelSpace<D>,
    regions: &[IntegrationRegion<D>],
    layout: &MeshLayout,
    source: &dyn Fn(&[f64; D]) -> f64,
    over_integration: usize,
    support: Option<&Aabb<D>>,
) -> Result<Vec<f64>> {
    let mut gauss = GaussTable::new();
    let mut f = vec![0.0; space.num_full()];
    for region in regions {
        if let Some(s) = support {
            if s.intersection(&region.bounds).is_none() {
                continue;
            }
        }
        let points = scaled_points(layout.point_count(region)?, over_integration)?;
        let aux = AuxiliaryElement::new(space, layout, region, points, &mut gauss)?;
        for (func, v) in aux.functions.iter().zip(aux.load_vector(source)) {
            f[func.full] += v;
        }
    }
    Ok(f)
}

/// Adds `magnitude * φ(x)` for every non-removed function of every level.
pub fn add_point_load<const D: usize>(
    space: &MultiLevelSpace<D>,
    x: &[f64; D],
    magnitude: f64,
    f: &mut [f64],
) -> Result<()> {
    if !space.domain().contains(x, space.domain().tolerance()) {
        return Err(Error::OutsideDomain);
    }
    for level in space.levels() {
        let Some(e) = level.mesh().locate(x) else { continue };
        let element = level.mesh().element_box(&e)?;
        let xi = element.map_to_reference(x).map(|c| c.clamp(-1.0, 1.0));
        let (values, _) = level.basis().eval(&xi);
        for (mode, v) in values.iter().enumerate() {
            if let Some(full) = space.full_index(level.status()[level.function_id(&e, mode)]) {
                f[full] += magnitude * v;
            }
        }
    }
    Ok(())
}

/// System restricted to the unknowns, with prescribed values moved to the
/// right-hand side.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: CsrMatrix,
    pub m: Option<CsrMatrix>,
    pub f: Vec<f64>,
    prescribed: Vec<f64>,
}

impl ReducedSystem {
    pub fn size(&self) -> usize {
        self.f.len()
    }

    /// Full coefficient vector: the unknowns followed by the prescribed values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len() + self.prescribed.len());
        out.extend_from_slice(x);
        out.extend_from_slice(&self.prescribed);
        out
    }
}

/// Eliminates the prescribed functions: `F_a -= Σ_j K_aj g_j`.
pub fn apply_constraints<const D: usize>(system: &SparseSystem, space: &MultiLevelSpace<D>) -> ReducedSystem {
    let n = space.count_active();
    let full = space.num_full();
    let g = space.dirichlet_values();
    let mut f = system.f[..n].to_vec();
    if g.iter().any(|&v| v != 0.0) {
        let coupling = system.k.block(0..n, n..full);
        for (fi, c) in f.iter_mut().zip(coupling.mul_vec(&g)) {
            *fi -= c;
        }
    }
    ReducedSystem {
        k: system.k.block(0..n, 0..n),
        m: system.m.as_ref().map(|m| m.block(0..n, 0..n)),
        f,
        prescribed: g,
    }
}
