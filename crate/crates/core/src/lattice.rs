//! Sup-norm lattice and grid geometry in R^d: the grids Λ_{A,b} attached to an
//! affine form, the diagonal flow a_t, basis reduction, exact shortest vectors
//! and successive minima by enumeration, dual lattices, and the Mahler
//! inequality oracle.
//!
//! Bases are stored row-major with the *columns* generating the lattice.
//! Reduction is floating point; the unimodular transform between the
//! original and reduced bases is tracked exactly in integers, and all
//! minima claims are certified by exhaustive enumeration over a coefficient
//! box derived from the reduced basis.

use crate::error::{Error, Result};
use crate::num::sup_norm;
use serde::{Deserialize, Serialize};

const DET_TOL: f64 = 1e-9;
const LLL_DELTA: f64 = 0.99;
/// Hard cap on points visited by one enumeration call.
pub const ENUM_BUDGET: u64 = 40_000_000;

/// A unimodular lattice in R^d, optionally shifted: {basis·k + shift : k ∈ Z^d}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    /// Row-major d×d matrix; column j is the j-th generator.
    pub basis: Vec<f64>,
    pub shift: Vec<f64>,
}

/// Diagonal flow parameters: a_t expands the first m coordinates by e^{t/m}
/// and contracts the last n by e^{−t/n}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowParams {
    pub m: u32,
    pub n: u32,
    pub t: f64,
}

/// Log of the sup-norm of the shortest grid point; −∞ when the grid
/// contains the zero vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Delta {
    NegInfinity,
    Finite(f64),
}

impl Delta {
    pub fn as_f64(&self) -> f64 {
        match self {
            Delta::NegInfinity => f64::NEG_INFINITY,
            Delta::Finite(v) => *v,
        }
    }
}

/// Sup-norm successive minima with independent integer witnesses
/// (coefficients with respect to the grid's stored basis).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimaReport {
    pub lambdas: Vec<f64>,
    pub witnesses: Vec<Vec<i64>>,
}

// ---------------------------------------------------------------------------
// small dense linear algebra

fn mat_get(a: &[f64], d: usize, i: usize, j: usize) -> f64 {
    a[i * d + j]
}

pub(crate) fn mat_vec(a: &[f64], d: usize, x: &[f64]) -> Vec<f64> {
    (0..d)
        .map(|i| (0..d).map(|j| mat_get(a, d, i, j) * x[j]).sum())
        .collect()
}

fn mat_vec_i(a: &[f64], d: usize, k: &[i64]) -> Vec<f64> {
    (0..d)
        .map(|i| (0..d).map(|j| mat_get(a, d, i, j) * k[j] as f64).sum())
        .collect()
}

#[cfg(test)]
pub(crate) fn mat_mul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}

/// LU determinant with partial pivoting.
pub(crate) fn det(a: &[f64], d: usize) -> f64 {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut out = 1.0;
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| {
            m[i * d + col].abs().partial_cmp(&m[j * d + col].abs()).unwrap()
        });
        let piv = piv.unwrap();
        if m[piv * d + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..d {
                m.swap(col * d + j, piv * d + j);
            }
            sign = -sign;
        }
        let p = m[col * d + col];
        out *= p;
        for i in col + 1..d {
            let f = m[i * d + col] / p;
            for j in col..d {
                m[i * d + j] -= f * m[col * d + j];
            }
        }
    }
    sign * out
}

/// Gauss-Jordan inverse with partial pivoting.
pub(crate) fn inverse(a: &[f64], d: usize) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| m[i * d + col].abs().partial_cmp(&m[j * d + col].abs()).unwrap())
            .unwrap();
        if m[piv * d + col].abs() < 1e-300 {
            return Err(Error::Singular);
        }
        if piv != col {
            for j in 0..d {
                m.swap(col * d + j, piv * d + j);
                inv.swap(col * d + j, piv * d + j);
            }
        }
        let p = m[col * d + col];
        for j in 0..d {
            m[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for i in 0..d {
            if i == col {
                continue;
            }
            let f = m[i * d + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..d {
                m[i * d + j] -= f * m[col * d + j];
                inv[i * d + j] -= f * inv[col * d + j];
            }
        }
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------

impl Grid {
    /// Rejects bases whose determinant is not ±1; no silent renormalization.
    pub fn new(d: usize, basis: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        if basis.len() != d * d || shift.len() != d {
            return Err(Error::Domain(format!("grid dimension mismatch for d={d}")));
        }
        let dt = det(&basis, d).abs();
        if (dt - 1.0).abs() > DET_TOL {
            return Err(Error::Degenerate(dt));
        }
        Ok(Grid { d, basis, shift })
    }

    pub fn lattice(d: usize, basis: Vec<f64>) -> Result<Self> {
        let shift = vec![0.0; d];
        Grid::new(d, basis, shift)
    }

    pub fn is_plain_lattice(&self) -> bool {
        self.shift.iter().all(|&s| s == 0.0)
    }

    /// The grid point basis·k + shift.
    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        let mut v = mat_vec_i(&self.basis, self.d, k);
        for i in 0..self.d {
            v[i] += self.shift[i];
        }
        v
    }
}

/// Λ_{A,b}: basis [[I_m, A], [0, I_n]] with shift (b, 0). `a` is the m×n
/// matrix row-major; the point set is {(Aq + b − p, q)}.
pub fn grid_from_pair(a: &[f64], m: u32, n: u32, b: &[f64]) -> Result<Grid> {
    let (m, n) = (m as usize, n as usize);
    if a.len() != m * n || b.len() != m {
        return Err(Error::Domain("grid_from_pair: A must be m×n and b length m".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain("grid_from_pair: entries must be finite".into()));
    }
    let d = m + n;
    let mut basis = vec![0.0; d * d];
    for i in 0..d {
        basis[i * d + i] = 1.0;
    }
    for i in 0..m {
        for j in 0..n {
            basis[i * d + (m + j)] = a[i * n + j];
        }
    }
    let mut shift = vec![0.0; d];
    shift[..m].copy_from_slice(b);
    Grid::new(d, basis, shift)
}

/// Apply the diagonal flow a_t coordinatewise; |det| is preserved.
pub fn apply_flow(g: &Grid, fp: FlowParams) -> Result<Grid> {
    let (m, n) = (fp.m as usize, fp.n as usize);
    if g.d != m + n {
        return Err(Error::Domain(format!("flow on d={} grid needs m+n={}", g.d, m + n)));
    }
    let up = (fp.t / m as f64).exp();
    let down = (-fp.t / n as f64).exp();
    let mut basis = g.basis.clone();
    let mut shift = g.shift.clone();
    for i in 0..g.d {
        let f = if i < m { up } else { down };
        for j in 0..g.d {
            basis[i * g.d + j] *= f;
        }
        shift[i] *= f;
    }
    Grid::new(g.d, basis, shift)
}

// ---------------------------------------------------------------------------
// LLL reduction with exact integer transform tracking

pub(crate) struct Reduced {
    /// Reduced basis, columns generating the same lattice.
    pub basis: Vec<f64>,
    /// basis = original · u  (column operations mirrored in u).
    pub u: Vec<i64>,
    /// Inverse of the reduced basis.
    pub inv: Vec<f64>,
}

pub(crate) fn lll(basis: &[f64], d: usize, delta: f64) -> Result<Reduced> {
    // columns as vectors
    let mut cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..d).map(|i| mat_get(basis, d, i, j)).collect())
        .collect();
    let mut u: Vec<Vec<i64>> = (0..d)
        .map(|j| (0..d).map(|i| i64::from(i == j)).collect())
        .collect();

    let mut mu = vec![vec![0.0; d]; d];
    let mut star = vec![vec![0.0; d]; d];
    let mut norm2 = vec![0.0; d];
    let gram = |cols: &Vec<Vec<f64>>,
                mu: &mut Vec<Vec<f64>>,
                star: &mut Vec<Vec<f64>>,
                norm2: &mut Vec<f64>|
     -> Result<()> {
        for i in 0..d {
            star[i] = cols[i].clone();
            for j in 0..i {
                let num: f64 = cols[i].iter().zip(&star[j]).map(|(a, b)| a * b).sum();
                mu[i][j] = if norm2[j] == 0.0 { 0.0 } else { num / norm2[j] };
                let muij = mu[i][j];
                let sj = star[j].clone();
                for (s, v) in star[i].iter_mut().zip(&sj) {
                    *s -= muij * v;
                }
            }
            norm2[i] = star[i].iter().map(|x| x * x).sum();
            if norm2[i] < 1e-250 {
                return Err(Error::Singular);
            }
        }
        Ok(())
    };

    gram(&cols, &mut mu, &mut star, &mut norm2)?;
    let mut k = 1usize;
    let mut guard = 0usize;
    while k < d {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Solver("LLL failed to terminate".into()));
        }
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let (cj, uj) = (cols[j].clone(), u[j].clone());
                for (x, y) in cols[k].iter_mut().zip(&cj) {
                    *x -= r * y;
                }
                let ri = r as i64;
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= ri * y;
                }
                gram(&cols, &mut mu, &mut star, &mut norm2)?;
            }
        }
        if norm2[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norm2[k - 1] {
            k += 1;
        } else {
            cols.swap(k, k - 1);
            u.swap(k, k - 1);
            gram(&cols, &mut mu, &mut star, &mut norm2)?;
            k = k.max(2) - 1;
        }
    }

    let mut out = vec![0.0; d * d];
    let mut uo = vec![0i64; d * d];
    for j in 0..d {
        for i in 0..d {
            out[i * d + j] = cols[j][i];
            uo[i * d + j] = u[j][i];
        }
    }
    let inv = inverse(&out, d)?;
    Ok(Reduced { basis: out, u: uo, inv })
}

/// LLL-reduce a basis (δ = 0.99); the result generates the same lattice.
pub fn lll_reduce(basis: &[f64], d: usize) -> Result<Vec<f64>> {
    Ok(lll(basis, d, LLL_DELTA)?.basis)
}

// ---------------------------------------------------------------------------
// exact enumeration

/// Per-coordinate coefficient bounds: any point with ‖B k + w‖ ≤ r has
/// |k_i| ≤ rowsum_i(B⁻¹)·(r + ‖w‖).
fn coeff_bounds(inv: &[f64], d: usize, radius: f64, shift_norm: f64) -> Vec<i64> {
    (0..d)
        .map(|i| {
            let rowsum: f64 = (0..d).map(|j| mat_get(inv, d, i, j).abs()).sum();
            (rowsum * (radius + shift_norm) * (1.0 + 1e-12)).floor() as i64 + 1
        })
        .collect()
}

fn box_size(bounds: &[i64]) -> u64 {
    bounds.iter().fold(1u64, |acc, &k| acc.saturating_mul((2 * k + 1) as u64))
}

/// Visit every coefficient vector in the box; `f` sees (k, point).
fn for_each_point(
    basis: &[f64],
    d: usize,
    bounds: &[i64],
    shift: &[f64],
    mut f: impl FnMut(&[i64], &[f64]),
) {
    let mut k = vec![0i64; d];
    for i in 0..d {
        k[i] = -bounds[i];
    }
    let mut v = vec![0.0; d];
    loop {
        for i in 0..d {
            v[i] = shift[i] + (0..d).map(|j| mat_get(basis, d, i, j) * k[j] as f64).sum::<f64>();
        }
        f(&k, &v);
        // odometer
        let mut idx = 0;
        loop {
            if idx == d {
                return;
            }
            k[idx] += 1;
            if k[idx] <= bounds[idx] {
                break;
            }
            k[idx] = -bounds[idx];
            idx += 1;
        }
    }
}

fn map_coeffs(u: &[i64], d: usize, k: &[i64]) -> Vec<i64> {
    (0..d)
        .map(|i| (0..d).map(|j| u[i * d + j] * k[j]).sum())
        .collect()
}

/// Sup-norm-shortest grid point over the whole grid (zero vector included),
/// with Δ = log of its norm. Exact over the enumeration box derived from the
/// reduced basis; an oversized box is an explicit error, never a truncation.
pub fn shortest_vector(g: &Grid) -> Result<(Vec<f64>, Delta)> {
    if g.d > 8 {
        return Err(Error::Domain(format!("enumeration regime is d <= 8, got {}", g.d)));
    }
    let red = lll(&g.basis, g.d, LLL_DELTA)?;
    // reduce the shift modulo the lattice so the enumeration box stays small:
    // the grid {B k + w} equals {B k + w0} for w0 = w + B·round(−B⁻¹w)
    let target = mat_vec(&red.inv, g.d, &g.shift);
    let k0: Vec<i64> = target.iter().map(|x| (-x).round() as i64).collect();
    let w0 = {
        let mut v = mat_vec_i(&red.basis, g.d, &k0);
        for i in 0..g.d {
            v[i] += g.shift[i];
        }
        v
    };
    let mut best_norm = sup_norm(&w0);
    let mut best_v = w0.clone();
    let mut best_k = vec![0i64; g.d];
    if best_norm > 0.0 {
        let bounds = coeff_bounds(&red.inv, g.d, best_norm, best_norm);
        if box_size(&bounds) > ENUM_BUDGET {
            return Err(Error::Budget(format!(
                "shortest_vector box {:?} exceeds {} points",
                bounds, ENUM_BUDGET
            )));
        }
        for_each_point(&red.basis, g.d, &bounds, &w0, |k, v| {
            let nv = sup_norm(v);
            if nv < best_norm || (nv == best_norm && k < &best_k[..]) {
                best_norm = nv;
                best_v = v.to_vec();
                best_k = k.to_vec();
            }
        });
    }
    if best_norm == 0.0 {
        return Ok((best_v, Delta::NegInfinity));
    }
    Ok((best_v, Delta::Finite(best_norm.ln())))
}

/// Exact integer rank via fraction-free elimination on i128 (coefficient
/// vectors are small after reduction, so no overflow at desk scale).
/// Rows are kept in echelon form sorted by leading position, so one
/// ascending elimination pass cannot reintroduce cleared entries.
struct IntRank {
    rows: Vec<Vec<i128>>,
}

impl IntRank {
    fn new(d: usize) -> Self {
        IntRank { rows: Vec::with_capacity(d) }
    }

    fn try_add(&mut self, k: &[i64]) -> bool {
        let mut v: Vec<i128> = k.iter().map(|&x| x as i128).collect();
        for row in &self.rows {
            let p = row.iter().position(|&x| x != 0).unwrap();
            if v[p] != 0 {
                let (a, b) = (row[p], v[p]);
                for i in 0..v.len() {
                    v[i] = v[i] * a - row[i] * b;
                }
                // keep entries small
                let g = v.iter().fold(0i128, |g, &x| gcd_i128(g, x.abs()));
                if g > 1 {
                    v.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        let lead = match v.iter().position(|&x| x != 0) {
            None => return false,
            Some(p) => p,
        };
        let at = self
            .rows
            .partition_point(|r| r.iter().position(|&x| x != 0).unwrap() < lead);
        self.rows.insert(at, v);
        true
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Exact sup-norm successive minima of a plain lattice (shift = 0), d ≤ 8:
/// enumerate every lattice point within the radius of the largest reduced
/// basis vector, then greedily select independent vectors in increasing
/// norm order.
pub fn successive_minima(g: &Grid) -> Result<MinimaReport> {
    if !g.is_plain_lattice() {
        return Err(Error::Domain("successive_minima needs shift = 0".into()));
    }
    if g.d > 8 {
        return Err(Error::Domain(format!("enumeration regime is d <= 8, got {}", g.d)));
    }
    let red = lll(&g.basis, g.d, LLL_DELTA)?;
    let radius = (0..g.d)
        .map(|j| sup_norm(&(0..g.d).map(|i| mat_get(&red.basis, g.d, i, j)).collect::<Vec<_>>()))
        .fold(0.0f64, f64::max);
    let bounds = coeff_bounds(&red.inv, g.d, radius, 0.0);
    if box_size(&bounds) > ENUM_BUDGET {
        return Err(Error::Budget(format!(
            "successive_minima box {:?} exceeds {} points",
            bounds, ENUM_BUDGET
        )));
    }
    let zero = vec![0.0; g.d];
    let mut pts: Vec<(f64, Vec<i64>)> = Vec::new();
    let rad_tol = radius * (1.0 + 1e-12);
    for_each_point(&red.basis, g.d, &bounds, &zero, |k, v| {
        if k.iter().all(|&x| x == 0) {
            return;
        }
        let nv = sup_norm(v);
        if nv <= rad_tol {
            pts.push((nv, k.to_vec()));
        }
    });
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    let mut rank = IntRank::new(g.d);
    let mut lambdas = Vec::with_capacity(g.d);
    let mut witnesses = Vec::with_capacity(g.d);
    for (nv, k) in pts {
        if rank.try_add(&k) {
            lambdas.push(nv);
            witnesses.push(map_coeffs(&red.u, g.d, &k));
            if lambdas.len() == g.d {
                break;
            }
        }
    }
    if lambdas.len() != g.d {
        return Err(Error::Solver("enumeration failed to reach full rank".into()));
    }
    Ok(MinimaReport { lambdas, witnesses })
}

/// Dual lattice: basis (B⁻¹)ᵀ; pairings ⟨v, w⟩ are integral.
pub fn dual_lattice(g: &Grid) -> Result<Grid> {
    if !g.is_plain_lattice() {
        return Err(Error::Domain("dual_lattice needs shift = 0".into()));
    }
    let inv = inverse(&g.basis, g.d)?;
    let mut dual = vec![0.0; g.d * g.d];
    for i in 0..g.d {
        for j in 0..g.d {
            dual[i * g.d + j] = inv[j * g.d + i];
        }
    }
    Grid::lattice(g.d, dual)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MahlerReport {
    /// λ₁(Λ*)·λ_d(Λ), the dual minimum taken in the polar (ℓ¹) norm
    pub lhs: f64,
    /// d!
    pub rhs: f64,
    pub ok: bool,
}

/// Shortest nonzero vector of a plain lattice in the ℓ¹ norm, found by
/// enumerating the sup-norm ball that must contain it.
pub fn l1_shortest(g: &Grid) -> Result<f64> {
    if !g.is_plain_lattice() {
        return Err(Error::Domain("l1_shortest needs shift = 0".into()));
    }
    let red = lll(&g.basis, g.d, LLL_DELTA)?;
    // the optimum's l1 norm is at most the smallest basis-column l1 norm,
    // and ‖v‖_inf <= ‖v‖_1 bounds the enumeration ball
    let radius = (0..g.d)
        .map(|j| (0..g.d).map(|i| mat_get(&red.basis, g.d, i, j).abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let bounds = coeff_bounds(&red.inv, g.d, radius, 0.0);
    if box_size(&bounds) > ENUM_BUDGET {
        return Err(Error::Budget(format!("l1_shortest box {:?} exceeds {} points", bounds, ENUM_BUDGET)));
    }
    let zero = vec![0.0; g.d];
    let mut best = f64::INFINITY;
    for_each_point(&red.basis, g.d, &bounds, &zero, |k, v| {
        if k.iter().any(|&x| x != 0) {
            let l1: f64 = v.iter().map(|x| x.abs()).sum();
            if l1 < best {
                best = l1;
            }
        }
    });
    Ok(best)
}

/// Mahler/Cassels duality oracle: 1 ≤ λ₁(Λ*)·λ_d(Λ) ≤ d! with 1e−9 slack,
/// pairing the sup norm on Λ with its polar norm (ℓ¹) on the dual side.
/// With the sup norm on both sides the lower constant would degrade to 1/d
/// (a 45°-rotated Z² attains it), so the polar pairing is the testable form.
pub fn mahler_check(g: &Grid) -> Result<MahlerReport> {
    if g.d > 6 {
        return Err(Error::Domain(format!("mahler_check regime is d <= 6, got {}", g.d)));
    }
    let lam_d = successive_minima(g)?.lambdas[g.d - 1];
    let lam1_dual = l1_shortest(&dual_lattice(g)?)?;
    let lhs = lam1_dual * lam_d;
    let rhs = (1..=g.d).product::<usize>() as f64;
    Ok(MahlerReport { lhs, rhs, ok: lhs >= 1.0 - 1e-9 && lhs <= rhs + 1e-9 })
}

// ---------------------------------------------------------------------------
// dedicated 2D path for hot loops (grid scans over millions of lattices)

/// Sup-norm Lagrange-style reduction then a tiny exact enumeration.
/// `b` is row-major 2×2, columns generating; returns (λ1, λ2).
pub fn minima_2x2(b: [f64; 4]) -> (f64, f64) {
    let mut u = [b[0], b[2]];
    let mut v = [b[1], b[3]];
    let nrm = |x: &[f64; 2]| x[0].abs().max(x[1].abs());
    // greedy reduction: norms strictly decrease, so this terminates
    for _ in 0..200 {
        if nrm(&u) > nrm(&v) {
            std::mem::swap(&mut u, &mut v);
        }
        let mut cand = Vec::with_capacity(8);
        let dot = v[0] * u[0] + v[1] * u[1];
        let uu = u[0] * u[0] + u[1] * u[1];
        let c0 = (dot / uu).round();
        cand.extend([c0 - 1.0, c0, c0 + 1.0]);
        for i in 0..2 {
            if u[i].abs() > 1e-300 {
                let r = v[i] / u[i];
                cand.extend([r.floor(), r.ceil()]);
            }
        }
        let mut best_k = 0.0;
        let mut best = nrm(&v);
        for &k in &cand {
            if k == 0.0 {
                continue;
            }
            let w = [v[0] - k * u[0], v[1] - k * u[1]];
            let nw = nrm(&w);
            if nw < best * (1.0 - 1e-15) {
                best = nw;
                best_k = k;
            }
        }
        if best_k == 0.0 {
            break;
        }
        v = [v[0] - best_k * u[0], v[1] - best_k * u[1]];
    }
    if nrm(&u) > nrm(&v) {
        std::mem::swap(&mut u, &mut v);
    }
    // certify both minima by enumeration within radius ‖v‖
    let radius = nrm(&v) * (1.0 + 1e-12);
    let det = u[0] * v[1] - u[1] * v[0];
    let (i_max, j_max) = (
        ((v[1].abs() + v[0].abs()) / det.abs() * radius + 1.0) as i64 + 1,
        ((u[1].abs() + u[0].abs()) / det.abs() * radius + 1.0) as i64 + 1,
    );
    let mut lam1 = f64::INFINITY;
    let mut k1 = (0i64, 0i64);
    let mut lam2 = f64::INFINITY;
    for i in -i_max..=i_max {
        for j in -j_max..=j_max {
            if i == 0 && j == 0 {
                continue;
            }
            let x = i as f64 * u[0] + j as f64 * v[0];
            let y = i as f64 * u[1] + j as f64 * v[1];
            let nw = x.abs().max(y.abs());
            if nw < lam1 {
                // previous shortest may become the second minimum
                if k1 != (0, 0) && (k1.0 as i128 * j as i128 != k1.1 as i128 * i as i128) && lam1 < lam2 {
                    lam2 = lam1;
                }
                lam1 = nw;
                k1 = (i, j);
            } else if nw < lam2 && (k1.0 as i128 * j as i128 != k1.1 as i128 * i as i128) {
                lam2 = nw;
            }
        }
    }
    (lam1, lam2)
}

/// λ_d of a_t Λ_A for the m = n = 1 case, allocation-free.
pub(crate) fn lambda2_flowed_1x1(alpha: f64, t: f64) -> f64 {
    let e = t.exp();
    minima_2x2([e, e * alpha, 0.0, (-t).exp()]).1
}
