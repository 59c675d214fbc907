//! Hierarchical integrated Legendre shape functions.
//!
//! In 1D, mode 0 is the left hat `(1 - ξ)/2`, mode 1 the right hat
//! `(1 + ξ)/2`, and every mode `k >= 2` is
//! `(P_k(ξ) - P_{k-2}(ξ)) / sqrt(4k - 2)`, which vanishes at both ends.
//!
//! Multi-dimensional functions are products of 1D modes, one per axis. The
//! axes carrying a mode `>= 2` are the function's *free* axes; together with
//! the end (0 or 1) chosen on the other axes they identify the topological
//! entity (vertex, edge, face, ...) the function belongs to.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// Evaluates all integrated Legendre modes up to degree `p` at `xi`.
///
/// `values` and `derivatives` must hold at least `p + 1` entries.
pub fn integrated_legendre_into(p: usize, xi: f64, values: &mut [f64], derivatives: &mut [f64]) {
    values[0] = 0.5 * (1.0 - xi);
    values[1] = 0.5 * (1.0 + xi);
    derivatives[0] = -0.5;
    derivatives[1] = 0.5;
    if p < 2 {
        return;
    }
    // Legendre recurrence: P_{n+1} = ((2n+1) ξ P_n - n P_{n-1}) / (n+1)
    let mut p_nm2 = 1.0; // P_{k-2}
    let mut p_nm1 = xi; // P_{k-1}
    for k in 2..=p {
        let n = (k - 1) as f64;
        let p_k = ((2.0 * n + 1.0) * xi * p_nm1 - n * p_nm2) / (n + 1.0);
        let kf = k as f64;
        values[k] = (p_k - p_nm2) / sqrt(4.0 * kf - 2.0);
        // P_k' - P_{k-2}' = (2k - 1) P_{k-1}
        derivatives[k] = sqrt((2.0 * kf - 1.0) / 2.0) * p_nm1;
        p_nm2 = p_nm1;
        p_nm1 = p_k;
    }
}

/// Values and derivatives of the `p + 1` integrated Legendre modes at `xi`.
pub fn eval_legendre_1d(p: usize, xi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if p == 0 {
        return Err(Error::UnsupportedDegree(0));
    }
    let mut values = vec![0.0; p + 1];
    let mut derivatives = vec![0.0; p + 1];
    integrated_legendre_into(p, xi, &mut values, &mut derivatives);
    Ok((values, derivatives))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// All multi-indices with every component `<= p`.
    Tensor,
    /// Vertex and edge modes of the tensor space plus internal modes whose
    /// free-axis indices sum to at most `p`.
    Trunk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    pub degree: usize,
    pub kind: SpaceKind,
}

impl BasisSpec {
    pub fn tensor(degree: usize) -> Self {
        Self { degree, kind: SpaceKind::Tensor }
    }

    pub fn trunk(degree: usize) -> Self {
        Self { degree, kind: SpaceKind::Trunk }
    }

    pub fn validate<const D: usize>(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::UnsupportedDegree(0));
        }
        if D == 0 {
            return Err(Error::UnsupportedBasis("zero-dimensional basis"));
        }
        if self.kind == SpaceKind::Trunk && D > 2 {
            return Err(Error::UnsupportedBasis("trunk space is only available for d <= 2"));
        }
        Ok(())
    }

    /// Whether the free-axis mode tuple belongs to this space.
    fn admits(&self, free_modes: &[usize]) -> bool {
        match self.kind {
            SpaceKind::Tensor => true,
            SpaceKind::Trunk => free_modes.len() < 2 || free_modes.iter().sum::<usize>() <= self.degree,
        }
    }

    /// Canonical list of mode tuples for an entity whose free axes are given
    /// by the bit mask `free`. Entries on fixed axes are zero.
    pub fn entity_modes<const D: usize>(&self, free: u32) -> Vec<[usize; D]> {
        let axes: Vec<usize> = (0..D).filter(|a| free & (1 << a) != 0).collect();
        let mut out = Vec::new();
        if self.degree < 2 && !axes.is_empty() {
            return out;
        }
        let mut k = [0usize; D];
        for &a in &axes {
            k[a] = 2;
        }
        loop {
            let free_modes: Vec<usize> = axes.iter().map(|&a| k[a]).collect();
            if self.admits(&free_modes) {
                out.push(k);
            }
            // lexicographic increment over the free axes, last axis fastest
            let mut carry = true;
            for &a in axes.iter().rev() {
                if k[a] < self.degree {
                    k[a] += 1;
                    carry = false;
                    break;
                }
                k[a] = 2;
            }
            if carry {
                break;
            }
        }
        out
    }
}

/// Position of one shape function inside the element-local ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeInfo<const D: usize> {
    /// 1D mode per axis.
    pub k: [usize; D],
    /// Bit mask of axes with `k >= 2`.
    pub free: u32,
    /// Index of this mode within [`BasisSpec::entity_modes`] for `free`.
    pub slot: usize,
}

impl<const D: usize> ModeInfo<D> {
    /// Offset of the owning entity in the doubled grid of the element:
    /// 0 at the lower end, 1 inside, 2 at the upper end.
    pub fn entity_offset(&self) -> [usize; D] {
        core::array::from_fn(|a| match self.k[a] {
            0 => 0,
            1 => 2,
            _ => 1,
        })
    }

    /// Whether the trace on the face `xi_axis = -1` (`upper = false`) or
    /// `xi_axis = +1` (`upper = true`) is not identically zero.
    pub fn touches_face(&self, axis: usize, upper: bool) -> bool {
        self.k[axis] == if upper { 1 } else { 0 }
    }
}

/// Element shape functions in a stable order: vertices first, then edges,
/// then faces and so on; inside a group by free-axis mask, then by the side
/// pattern on the fixed axes, then by mode.
#[derive(Debug, Clone)]
pub struct ElementBasis<const D: usize> {
    spec: BasisSpec,
    modes: Vec<ModeInfo<D>>,
}

impl<const D: usize> ElementBasis<D> {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        spec.validate::<D>()?;
        let mut modes = Vec::new();
        for dim in 0..=D {
            for free in 0u32..(1 << D) {
                if free.count_ones() as usize != dim {
                    continue;
                }
                let entity_modes = spec.entity_modes::<D>(free);
                let fixed: Vec<usize> = (0..D).filter(|a| free & (1 << a) == 0).collect();
                for sides in 0u32..(1 << fixed.len()) {
                    for (slot, km) in entity_modes.iter().enumerate() {
                        let mut k = *km;
                        for (i, &a) in fixed.iter().enumerate() {
                            // first fixed axis is the most significant bit
                            let bit = fixed.len() - 1 - i;
                            k[a] = ((sides >> bit) & 1) as usize;
                        }
                        modes.push(ModeInfo { k, free, slot });
                    }
                }
            }
        }
        Ok(Self { spec, modes })
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn degree(&self) -> usize {
        self.spec.degree
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeInfo<D>] {
        &self.modes
    }

    /// Values and reference-coordinate gradients of every shape function.
    pub fn eval(&self, xi: &[f64; D]) -> (Vec<f64>, Vec<[f64; D]>) {
        let p = self.spec.degree;
        let mut val1d = vec![[0.0; D]; p + 1];
        let mut der1d = vec![[0.0; D]; p + 1];
        let mut v = vec![0.0; p + 1];
        let mut d = vec![0.0; p + 1];
        for axis in 0..D {
            integrated_legendre_into(p, xi[axis], &mut v, &mut d);
            for k in 0..=p {
                val1d[k][axis] = v[k];
                der1d[k][axis] = d[k];
            }
        }
        let mut values = Vec::with_capacity(self.len());
        let mut gradients = Vec::with_capacity(self.len());
        for mode in &self.modes {
            let mut value = 1.0;
            let mut grad = [1.0; D];
            for axis in 0..D {
                let f = val1d[mode.k[axis]][axis];
                let df = der1d[mode.k[axis]][axis];
                value *= f;
                for (g, gaxis) in grad.iter_mut().zip(0..D) {
                    *g *= if gaxis == axis { df } else { f };
                }
            }
            values.push(value);
            gradients.push(grad);
        }
        (values, gradients)
    }
}

/// Values and reference gradients of all functions of `spec` at `xi`.
pub fn eval_basis<const D: usize>(spec: BasisSpec, xi: &[f64; D]) -> Result<(Vec<f64>, Vec<[f64; D]>)> {
    Ok(ElementBasis::new(spec)?.eval(xi))
}

/// Number of trunk-space functions on a quadrilateral of degree `p`.
pub fn trunk_count_2d(p: usize) -> usize {
    let internal = if p >= 3 { (p - 2) * (p - 3) / 2 } else { 0 };
    4 + 4 * (p - 1) + internal
}
