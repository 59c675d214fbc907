//! Linear solvers and spectral condition numbers for SPD systems.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, hypot, sqrt};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Solves a small dense SPD system (row-major `a`, size `n`) by Cholesky.
pub fn dense_cholesky_solve(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Ok(y)
}

/// Reverse Cuthill–McKee ordering of a structurally symmetric matrix.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut neighbours = Vec::new();
    while order.len() < n {
        // start each component from an unvisited node of minimum degree
        let start = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        visited[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            neighbours.clear();
            neighbours.extend(a.row(i).0.iter().copied().filter(|&j| !visited[j]));
            neighbours.sort_by_key(|&j| (degree[j], j));
            for &j in &neighbours {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factorization `P A P^T = L L^T`.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// First column of the envelope of each (permuted) row.
    first: Vec<usize>,
    /// Start of each row's envelope in `values`.
    start: Vec<usize>,
    values: Vec<f64>,
    num_regularized: usize,
}

impl SkylineCholesky {
    /// Factorizes with a reverse Cuthill–McKee ordering.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        Self::factor_impl(a, perm, None)
    }

    /// Factorizes a matrix that is positive definite in exact arithmetic but
    /// may be singular to working precision. A pivot below `rel_tol` times
    /// its diagonal entry marks a row that is numerically dependent on the
    /// preceding ones; it is raised to that bound, which perturbs the matrix
    /// only along the dependent direction.
    pub fn factor_semidefinite(a: &CsrMatrix, rel_tol: f64) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::factor_impl(a, perm, Some(rel_tol))
    }

    fn factor_impl(a: &CsrMatrix, perm: Vec<usize>, drop_tol: Option<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || perm.len() != n {
            return Err(Error::InvalidInput("matrix must be square"));
        }
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            first[new] = a.row(old).0.iter().map(|&j| inv[j]).filter(|&j| j <= new).min().unwrap_or(new);
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&j, &v) in cols.iter().zip(vals) {
                let jn = inv[j];
                if jn <= new {
                    values[start[new] + jn - first[new]] += v;
                }
            }
        }
        let mut num_regularized = 0;
        for i in 0..n {
            let fi = first[i];
            let diagonal = values[start[i] + i - fi];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_i = &values[start[i] + k0 - fi..start[i] + j - fi];
                let row_j = &values[start[j] + k0 - fj..start[j] + j - fj];
                let dot: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
                let idx = start[i] + j - fi;
                let s = values[idx] - dot;
                if i == j {
                    if let Some(tol) = drop_tol {
                        if !(s > tol * diagonal.abs()) && diagonal > 0.0 {
                            num_regularized += 1;
                            values[idx] = sqrt(tol * diagonal);
                            continue;
                        }
                    }
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { row: perm[i], pivot: s });
                    }
                    values[idx] = sqrt(s);
                } else {
                    values[idx] = s / values[start[j] + j - fj];
                }
            }
        }
        Ok(Self { n, perm, first, start, values, num_regularized })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, y)| l * y).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// Number of pivots raised by [`SkylineCholesky::factor_semidefinite`].
    pub fn num_regularized(&self) -> usize {
        self.num_regularized
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }
}

/// Direct solution of an SPD system.
pub fn solve_direct(k: &CsrMatrix, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != k.nrows() {
        return Err(Error::DimensionMismatch { expected: k.nrows(), got: f.len() });
    }
    Ok(SkylineCholesky::factor(k)?.solve(f))
}

/// Direct solution of a system that may be singular to working precision
/// (see [`SkylineCholesky::factor_semidefinite`]). Returns the solution and
/// the number of regularized pivots.
pub fn solve_semidefinite(k: &CsrMatrix, f: &[f64], rel_tol: f64) -> Result<(Vec<f64>, usize)> {
    if f.len() != k.nrows() {
        return Err(Error::DimensionMismatch { expected: k.nrows(), got: f.len() });
    }
    let factor = SkylineCholesky::factor_semidefinite(k, rel_tol)?;
    Ok((factor.solve(f), factor.num_regularized()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgReport {
    pub solution: Vec<f64>,
    /// Number of matrix-vector products with `K`.
    pub iterations: usize,
    /// `||F - K x||_2 / ||F||_2` tracked by the recurrence.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Conjugate gradients with the inverse diagonal as preconditioner, from a
/// zero initial guess.
pub fn pcg_jacobi(k: &CsrMatrix, f: &[f64], rel_tol: f64, max_iter: usize) -> Result<PcgReport> {
    pcg_jacobi_from(k, f, vec![0.0; f.len()], rel_tol, max_iter)
}

/// [`pcg_jacobi`] starting from `x0`.
pub fn pcg_jacobi_from(
    k: &CsrMatrix,
    f: &[f64],
    x0: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<PcgReport> {
    let n = k.nrows();
    if f.len() != n || x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len().min(x0.len()) });
    }
    let inv_diag: Vec<f64> = k
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(row, d)| if d > 0.0 { Ok(1.0 / d) } else { Err(Error::NotPositiveDefinite { row, pivot: d }) })
        .collect::<Result<_>>()?;
    let norm_f = sqrt(f.iter().map(|v| v * v).sum());
    let mut x = x0;
    if norm_f == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(PcgReport { solution: x, iterations: 0, relative_residual: 0.0, converged: true });
    }
    let mut iterations = 0;
    let mut r: Vec<f64> = if x.iter().any(|&v| v != 0.0) {
        let kx = k.mul_vec(&x);
        iterations += 1;
        f.iter().zip(&kx).map(|(a, b)| a - b).collect()
    } else {
        f.to_vec()
    };
    let mut rel = sqrt(r.iter().map(|v| v * v).sum()) / norm_f;
    if rel <= rel_tol {
        return Ok(PcgReport { solution: x, iterations, relative_residual: rel, converged: true });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut q = vec![0.0; n];
    while iterations < max_iter {
        k.mul_vec_into(&p, &mut q);
        iterations += 1;
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if !(pq > 0.0) {
            return Err(Error::NotPositiveDefinite { row: 0, pivot: pq });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rel = sqrt(r.iter().map(|v| v * v).sum()) / norm_f;
        if rel <= rel_tol {
            return Ok(PcgReport { solution: x, iterations, relative_residual: rel, converged: true });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok(PcgReport { solution: x, iterations, relative_residual: rel, converged: false })
}

/// Eigenvalues (ascending) of a dense symmetric matrix, by Householder
/// tridiagonalization followed by implicit QL iterations.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: a.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, n, &mut d, &mut e);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

fn tridiagonalize(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| abs(a[idx(i, k)])).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[idx(i, i)];
    }
    // shift the off-diagonal so that e[i] couples d[i] and d[i + 1]
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = abs(d[m]) + abs(d[m + 1]);
                if abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::InvalidInput("QL iteration did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { abs(r) } else { -abs(r) });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Singular values (ascending) of a dense `m × n` row-major matrix with
/// `m >= n`: Householder QR followed by one-sided Jacobi rotations on the
/// triangular factor.
pub fn singular_values(a: &[f64], m: usize, n: usize) -> Result<Vec<f64>> {
    if a.len() != m * n {
        return Err(Error::DimensionMismatch { expected: m * n, got: a.len() });
    }
    if m < n {
        return Err(Error::InvalidInput("singular values need at least as many rows as columns"));
    }
    // column-major copy
    let mut c = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            c[j * m + i] = a[i * n + j];
        }
    }
    for k in 0..n {
        let (done, rest) = c.split_at_mut((k + 1) * m);
        let col = &mut done[k * m..];
        let norm_x = sqrt(col[k..].iter().map(|v| v * v).sum::<f64>());
        if norm_x == 0.0 {
            continue;
        }
        let alpha = if col[k] > 0.0 { -norm_x } else { norm_x };
        col[k] -= alpha;
        let vnorm2: f64 = col[k..].iter().map(|v| v * v).sum();
        for other in rest.chunks_mut(m) {
            let dot: f64 = col[k..].iter().zip(&other[k..]).map(|(v, x)| v * x).sum();
            let f = 2.0 * dot / vnorm2;
            for (x, v) in other[k..].iter_mut().zip(&col[k..]) {
                *x -= f * v;
            }
        }
        col[k] = alpha;
        for v in col[k + 1..].iter_mut() {
            *v = 0.0;
        }
    }
    // upper triangle of R, column-major n × n
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        r[j * n..j * n + j + 1].copy_from_slice(&c[j * m..j * m + j + 1]);
    }
    let mut rotated = true;
    let mut sweeps = 0;
    while rotated {
        rotated = false;
        sweeps += 1;
        if sweeps > 60 {
            return Err(Error::InvalidInput("Jacobi sweeps did not converge"));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (left, right) = r.split_at_mut(j * n);
                let (ci, cj) = (&mut left[i * n..(i + 1) * n], &mut right[..n]);
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for t in 0..n {
                    alpha += ci[t] * ci[t];
                    beta += cj[t] * cj[t];
                    gamma += ci[t] * cj[t];
                }
                if abs(gamma) <= f64::EPSILON * sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (abs(zeta) + sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / sqrt(1.0 + t * t);
                let sn = cs * t;
                for k in 0..n {
                    let (x, y) = (ci[k], cj[k]);
                    ci[k] = cs * x - sn * y;
                    cj[k] = sn * x + cs * y;
                }
            }
        }
    }
    let mut sigma: Vec<f64> = r.chunks(n).map(|col| sqrt(col.iter().map(|v| v * v).sum::<f64>())).collect();
    sigma.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(sigma)
}

/// Condition number `(σ_max / σ_min)²` of `K = BᵀB` from its dense `m × n`
/// factor `B`. Working on `B` resolves `κ(K)` up to about `1/ε²` instead of
/// the `1/ε` reachable from `K` itself.
pub fn condition_number_factored(b: &[f64], m: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix must be non-empty"));
    }
    let sigma = singular_values(b, m, n)?;
    let (smin, smax) = (sigma[0], sigma[n - 1]);
    if !(smin > 0.0) {
        return Err(Error::NotPositiveDefinite { row: 0, pivot: smin * smin });
    }
    Ok((smax / smin) * (smax / smin))
}

/// Spectral condition number `λ_max / λ_min` of an SPD matrix.
pub fn condition_number_spd(k: &CsrMatrix) -> Result<f64> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(Error::InvalidInput("matrix must be square and non-empty"));
    }
    let eig = symmetric_eigenvalues(&k.to_dense(), n)?;
    let (lmin, lmax) = (eig[0], eig[n - 1]);
    if !(lmin > 0.0) {
        return Err(Error::NotPositiveDefinite { row: 0, pivot: lmin });
    }
    Ok(lmax / lmin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn direct_examples() {
        let x = solve_direct(&CsrMatrix::identity(3), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
        let x = solve_direct(&laplace_1d(2), &[1.0, 0.0]).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn direct_rejects_indefinite() {
        let k = CsrMatrix::from_dense(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(solve_direct(&k, &[1.0, 1.0]), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn semidefinite_handles_dependent_rows() {
        // second row duplicates the first; the right-hand side is consistent
        let k = CsrMatrix::from_dense(3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert!(solve_direct(&k, &[1.0, 1.0, 2.0]).is_err());
        let (x, regularized) = solve_semidefinite(&k, &[1.0, 1.0, 2.0], 1e-12).unwrap();
        assert_eq!(regularized, 1);
        let r = k.mul_vec(&x);
        for (a, b) in r.iter().zip([1.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        // well-conditioned input is untouched
        let (x, regularized) = solve_semidefinite(&laplace_1d(2), &[1.0, 0.0], 1e-12).unwrap();
        assert_eq!(regularized, 0);
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pcg_examples() {
        let k = CsrMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 5.0), (2, 2, 0.5)]);
        let r = pcg_jacobi(&k, &[1.0, 2.0, 3.0], 1e-12, 100).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        let r = pcg_jacobi(&CsrMatrix::identity(4), &[1.0, -2.0, 3.0, 0.5], 1e-12, 100).unwrap();
        assert_eq!(r.iterations, 1);
        let r = pcg_jacobi(&laplace_1d(10), &[1.0; 10], 1e-10, 100).unwrap();
        assert!(r.converged && r.iterations <= 10, "{} iterations", r.iterations);
    }

    #[test]
    fn pcg_flags_iteration_limit() {
        let r = pcg_jacobi(&laplace_1d(50), &[1.0; 50], 1e-14, 3).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn condition_examples() {
        assert!((condition_number_spd(&CsrMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-14);
        let k = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 10.0)]);
        assert!((condition_number_spd(&k).unwrap() - 10.0).abs() < 1e-13);
        assert!((condition_number_spd(&laplace_1d(2)).unwrap() - 3.0).abs() < 1e-13);
        let k = CsrMatrix::from_dense(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(condition_number_spd(&k).is_err());
    }

    #[test]
    fn tridiagonal_laplace_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1): 2 - 2 cos(k π / (n + 1))
        let n = 12;
        let eig = symmetric_eigenvalues(&laplace_1d(n).to_dense(), n).unwrap();
        for (k, l) in eig.iter().enumerate() {
            let exact = 2.0 - 2.0 * libm::cos((k + 1) as f64 * core::f64::consts::PI / (n + 1) as f64);
            assert!((l - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn skyline_matches_natural_ordering() {
        let k = laplace_1d(30);
        let f: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let a = SkylineCholesky::factor(&k).unwrap().solve(&f);
        let b = SkylineCholesky::factor_with_ordering(&k, (0..30).collect()).unwrap().solve(&f);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
