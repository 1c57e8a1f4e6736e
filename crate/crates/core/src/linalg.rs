//! Dense real symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form, implicit QL for the
//! eigenvalues, inverse iteration on the tridiagonal matrix for the few
//! eigenvectors that are asked for, and back-transformation through the
//! stored reflectors. Matrices that are block diagonal in the given basis
//! are split into their connected blocks first.

use crate::error::{Error, Result};

/// Row-major square matrix, assumed symmetric by the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// Maximum absolute row sum; bounds the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        let m = idx.len();
        let mut out = SymMatrix::zeros(m);
        for (a, &i) in idx.iter().enumerate() {
            let row = self.row(i);
            let dst = &mut out.data[a * m..(a + 1) * m];
            for (b, &j) in idx.iter().enumerate() {
                dst[b] = row[j];
            }
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the loop vectorize.
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Returns `row . x` and adds `alpha * row` to `y` in the same sweep.
#[inline]
fn dot_axpy(row: &[f64], x: &[f64], y: &mut [f64], alpha: f64) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = row.len() / 4;
    for c in 0..chunks {
        let base = 4 * c;
        let (r, xs, ys) = (&row[base..base + 4], &x[base..base + 4], &mut y[base..base + 4]);
        for l in 0..4 {
            acc[l] += r[l] * xs[l];
            ys[l] += r[l] * alpha;
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..row.len() {
        s += row[i] * x[i];
        y[i] += row[i] * alpha;
    }
    s
}

/// `row -= a * w + b * v`.
#[inline]
fn rank2_update(row: &mut [f64], v: &[f64], w: &[f64], a: f64, b: f64) {
    let mut rows = row.chunks_exact_mut(4);
    let mut vs = v.chunks_exact(4);
    let mut ws = w.chunks_exact(4);
    for ((r, x), y) in (&mut rows).zip(&mut vs).zip(&mut ws) {
        for l in 0..4 {
            r[l] -= a * y[l] + b * x[l];
        }
    }
    for ((r, x), y) in rows.into_remainder().iter_mut().zip(vs.remainder()).zip(ws.remainder()) {
        *r -= a * y + b * x;
    }
}

/// Index sets of the connected components of the nonzero pattern, each
/// sorted, ordered by their smallest index.
pub fn connected_blocks(a: &SymMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        let row = a.row(i);
        for (j, &v) in row.iter().enumerate().take(i) {
            if v != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

/// Tridiagonal form `Q^T A Q` together with the reflectors defining `Q`.
struct Tridiagonalization {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
    /// Reflector `k` acts on indices `k+1..n`, stored in row `k` above the diagonal.
    reflectors: SymMatrix,
    betas: Vec<f64>,
}

impl Tridiagonalization {
    /// Householder reduction working on the lower triangle of `a`.
    fn new(mut a: SymMatrix) -> Self {
        let n = a.n;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut betas = vec![0.0; n.saturating_sub(1)];
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];

        for k in 0..n.saturating_sub(2) {
            let s = k + 1;
            diag[k] = a.get(k, k);
            for i in s..n {
                v[i] = a.get(i, k);
            }
            let tail: f64 = v[s + 1..n].iter().map(|x| x * x).sum();
            if tail == 0.0 {
                off[k] = v[s];
                continue;
            }
            let norm = (v[s] * v[s] + tail).sqrt();
            let alpha = if v[s] > 0.0 { -norm } else { norm };
            v[s] -= alpha;
            let beta = 2.0 / (v[s] * v[s] + tail);
            off[k] = alpha;
            betas[k] = beta;

            // p = beta * B v over the lower triangle of the trailing block.
            p[s..n].iter_mut().for_each(|x| *x = 0.0);
            for i in s..n {
                let row = &a.data[i * n + s..i * n + i];
                let vi = v[i];
                let acc = dot_axpy(row, &v[s..i], &mut p[s..i], vi);
                p[i] += acc + a.data[i * n + i] * vi;
            }
            for x in &mut p[s..n] {
                *x *= beta;
            }
            let kappa = 0.5 * beta * dot(&p[s..n], &v[s..n]);
            for i in s..n {
                p[i] -= kappa * v[i];
            }
            // B -= v w^T + w v^T with w = p.
            for i in s..n {
                let row = &mut a.data[i * n + s..i * n + i + 1];
                rank2_update(row, &v[s..=i], &p[s..=i], v[i], p[i]);
            }
            a.data[k * n + s..k * n + n].copy_from_slice(&v[s..n]);
        }
        if n >= 2 {
            diag[n - 2] = a.get(n - 2, n - 2);
            off[n - 2] = a.get(n - 1, n - 2);
        }
        if n >= 1 {
            diag[n - 1] = a.get(n - 1, n - 1);
        }
        Self { diag, off, reflectors: a, betas }
    }

    /// Applies `Q` to a vector expressed in the tridiagonal basis.
    fn back_transform(&self, z: &mut [f64]) {
        let n = z.len();
        for k in (0..n.saturating_sub(2)).rev() {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let s = k + 1;
            let v = &self.reflectors.data[k * n + s..k * n + n];
            let t = beta * dot(v, &z[s..]);
            for (zi, vi) in z[s..].iter_mut().zip(v) {
                *zi -= t * vi;
            }
        }
    }
}

/// All eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts, in ascending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    const MAX_ITER: usize = 60;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    // Absolute deflation floor: clusters near zero otherwise stall on
    // couplings that are already at roundoff level.
    let norm = d.iter().chain(&e).fold(0.0f64, |m, x| m.max(x.abs()));
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd.max(norm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::Solver(format!(
                    "QL failed to converge for eigenvalue {l} after {MAX_ITER} sweeps (residual coupling {:e})",
                    e[l].abs()
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
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
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Solves `(T - shift) x = b` in place by Gaussian elimination with
/// partial pivoting. Zero pivots are replaced by `tiny`.
fn shifted_tridiagonal_solve(diag: &[f64], off: &[f64], shift: f64, tiny: f64, b: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let piv = diag[0] - shift;
        b[0] /= if piv == 0.0 { tiny } else { piv };
        return;
    }
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut mult = vec![0.0; n - 1];
    let mut swapped = vec![false; n - 1];

    let mut cur_b = diag[0] - shift;
    let mut cur_c = off[0];
    for i in 0..n - 1 {
        let a = off[i];
        let nb = diag[i + 1] - shift;
        let nc = if i + 2 < n { off[i + 1] } else { 0.0 };
        if a.abs() > cur_b.abs() {
            swapped[i] = true;
            u0[i] = a;
            u1[i] = nb;
            u2[i] = nc;
            let m = cur_b / a;
            mult[i] = m;
            cur_b = cur_c - m * nb;
            cur_c = -m * nc;
        } else {
            let piv = if cur_b == 0.0 { tiny } else { cur_b };
            u0[i] = piv;
            u1[i] = cur_c;
            u2[i] = 0.0;
            let m = a / piv;
            mult[i] = m;
            cur_b = nb - m * cur_c;
            cur_c = nc;
        }
    }
    u0[n - 1] = if cur_b == 0.0 { tiny } else { cur_b };

    for i in 0..n - 1 {
        if swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= mult[i] * b[i];
    }
    b[n - 1] /= u0[n - 1];
    b[n - 2] = (b[n - 2] - u1[n - 2] * b[n - 1]) / u0[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - u1[i] * b[i + 1] - u2[i] * b[i + 2]) / u0[i];
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Eigenvectors of the tridiagonal matrix for the given (ascending)
/// eigenvalues, by inverse iteration. Vectors whose eigenvalues form a
/// cluster are orthogonalized against each other.
fn tridiagonal_eigenvectors(diag: &[f64], off: &[f64], values: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let scale = diag
        .iter()
        .map(|d| d.abs())
        .chain(off.iter().map(|e| 2.0 * e.abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let cluster_tol = 1e-3 * scale;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (idx, &lambda) in values.iter().enumerate() {
        // Fixed pseudo-random start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let h = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (idx as u64 * 0xBF58_476D);
                0.5 + (h >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        normalize(&mut x);
        let partners: Vec<usize> =
            (0..idx).filter(|&j| (values[j] - lambda).abs() <= cluster_tol).collect();
        for _ in 0..4 {
            shifted_tridiagonal_solve(diag, off, lambda, tiny, &mut x);
            for &j in &partners {
                let proj = dot(&out[j], &x);
                for (xi, oj) in x.iter_mut().zip(&out[j]) {
                    *xi -= proj * oj;
                }
            }
            normalize(&mut x);
        }
        out.push(x);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A v - value v||` for the unit vector `v`.
    pub residual: f64,
}

/// Relative residual bound `||A v - lambda v|| <= RESIDUAL_TOL * ||A||`.
pub const RESIDUAL_TOL: f64 = 1e-9;

struct Candidate {
    value: f64,
    block: usize,
    local: Vec<f64>,
}

/// Lowest `count` eigenpairs of `a`, ascending, with eigenvectors verified
/// against `a` itself.
pub fn lowest_eigenpairs(a: &SymMatrix, count: usize) -> Result<Vec<EigenPair>> {
    let dim = a.dim();
    if count > dim {
        return Err(Error::Solver(format!("requested {count} levels from a {dim}x{dim} matrix")));
    }
    let blocks = connected_blocks(a);
    let mut candidates: Vec<Candidate> = Vec::new();
    for (b, idx) in blocks.iter().enumerate() {
        let take = count.min(idx.len());
        let tri = Tridiagonalization::new(a.submatrix(idx));
        let values = tridiagonal_eigenvalues(&tri.diag, &tri.off)?;
        let values = &values[..take];
        for (value, mut z) in
            values.iter().zip(tridiagonal_eigenvectors(&tri.diag, &tri.off, values))
        {
            tri.back_transform(&mut z);
            normalize(&mut z);
            candidates.push(Candidate { value: *value, block: b, local: z });
        }
        // Keep memory bounded when there are many tiny blocks.
        if candidates.len() > 4 * count.max(1) {
            prune(&mut candidates, count);
        }
    }
    prune(&mut candidates, count);

    let norm = a.norm_inf();
    candidates
        .into_iter()
        .map(|c| {
            let mut vector = vec![0.0; dim];
            for (&i, &x) in blocks[c.block].iter().zip(&c.local) {
                vector[i] = x;
            }
            let av = a.matvec(&vector);
            let residual =
                av.iter().zip(&vector).map(|(y, x)| (y - c.value * x).powi(2)).sum::<f64>().sqrt();
            if residual > RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE) {
                return Err(Error::Solver(format!(
                    "eigenpair {} has residual {residual:e} against norm {norm:e}",
                    c.value
                )));
            }
            Ok(EigenPair { value: c.value, vector, residual })
        })
        .collect()
}

fn prune(candidates: &mut Vec<Candidate>, count: usize) {
    candidates.sort_by(|x, y| x.value.total_cmp(&y.value).then(x.block.cmp(&y.block)));
    candidates.truncate(count);
}

/// Every eigenvalue of `a`, ascending.
pub fn eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    let mut all = Vec::with_capacity(a.dim());
    for idx in connected_blocks(a) {
        let tri = Tridiagonalization::new(a.submatrix(&idx));
        all.extend(tridiagonal_eigenvalues(&tri.diag, &tri.off)?);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}
