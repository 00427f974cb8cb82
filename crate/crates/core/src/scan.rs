//! Three independent checkers for ψ-Dirichlet improvability of a pair (A, b)
//! over a finite T-window, plus a uniform-exponent estimator.
//!
//! `direct_check` enumerates the Dirichlet system exhaustively; `dani_check`
//! tests Δ(a_t Λ_{A,b}) against z_ψ(t) at the flow times matched to the same
//! T samples; `transference_witness` searches for dual certificates of
//! non-improvability. Away from knife-edge samples the first two are
//! algebraically the same comparison and must agree.

use crate::error::{Error, Result};
use crate::lattice::{apply_flow, grid_from_pair, shortest_vector, Delta, FlowParams};
use crate::num::{dist_to_int, log_spaced};
use crate::psi::{PsiFunction, ZProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default cap on q-box points per sampled T.
pub const Q_BUDGET: u64 = 80_000_000;

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub psi: PsiFunction,
    pub m: u32,
    pub n: u32,
    /// [T_min, T_max], T_min ≥ T0.
    pub t_window: (f64, f64),
    pub t_samples: usize,
    /// Extra margin added to heuristic search boxes (not the exact q-box).
    pub search_slack: i64,
    pub boundary_tol: f64,
    /// Strict mode for comparisons with the classical convention.
    pub exclude_q_zero: bool,
    pub q_budget: u64,
}

impl ScanConfig {
    pub fn new(psi: PsiFunction, m: u32, n: u32, t_window: (f64, f64), t_samples: usize) -> Result<Self> {
        let cfg = ScanConfig {
            psi,
            m,
            n,
            t_window,
            t_samples,
            search_slack: 0,
            boundary_tol: 1e-12,
            exclude_q_zero: false,
            q_budget: Q_BUDGET,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_window.0 < self.psi.t_start() * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "T_min={} below T0={}",
                self.t_window.0,
                self.psi.t_start()
            )));
        }
        if self.t_window.1 <= self.t_window.0 {
            return Err(Error::Domain("empty T window".into()));
        }
        if self.t_samples < 2 {
            return Err(Error::Domain("need at least 2 T samples".into()));
        }
        Ok(())
    }

    pub fn sampled_t(&self) -> Vec<f64> {
        log_spaced(self.t_window.0, self.t_window.1, self.t_samples)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Solvable,
    Fails,
    /// Within boundary_tol of the strict inequality; deliberately unresolved.
    Knife,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleRecord {
    pub t_big: f64,
    /// Best residual ‖Aq + b − p‖ over the admissible box.
    pub residual: f64,
    pub witness_q: Vec<i64>,
    pub witness_p: Vec<i64>,
    pub outcome: Outcome,
    /// dani_check only: Δ landed in the slack band [z−C0, z).
    pub near_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScanStatus {
    DirichletOnWindow,
    FailsAt(Vec<f64>),
    Boundary(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatusKind {
    Dirichlet,
    Fails,
    Boundary,
}

impl ScanStatus {
    pub fn kind(&self) -> StatusKind {
        match self {
            ScanStatus::DirichletOnWindow => StatusKind::Dirichlet,
            ScanStatus::FailsAt(_) => StatusKind::Fails,
            ScanStatus::Boundary(_) => StatusKind::Boundary,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanVerdict {
    pub status: ScanStatus,
    pub samples: Vec<SampleRecord>,
}

fn assemble(samples: Vec<SampleRecord>) -> ScanVerdict {
    let fails: Vec<f64> = samples
        .iter()
        .filter(|s| s.outcome == Outcome::Fails)
        .map(|s| s.t_big)
        .collect();
    let knives: Vec<f64> = samples
        .iter()
        .filter(|s| s.outcome == Outcome::Knife)
        .map(|s| s.t_big)
        .collect();
    let status = if !fails.is_empty() {
        ScanStatus::FailsAt(fails)
    } else if !knives.is_empty() {
        ScanStatus::Boundary(knives)
    } else {
        ScanStatus::DirichletOnWindow
    };
    ScanVerdict { status, samples }
}

/// Largest integer whose n-th power is strictly below T.
fn q_sup(t_big: f64, n: u32) -> i64 {
    let mut q = t_big.powf(1.0 / n as f64).floor() as i64;
    let below = |q: i64| (q.max(0) as f64).powi(n as i32) < t_big;
    while !below(q) {
        q -= 1;
    }
    while below(q + 1) {
        q += 1;
    }
    q.max(0)
}

/// Exhaustive check of ‖Aq + b − p‖^m < ψ(T), ‖q‖^n < T at each sampled T.
/// `a` is the m×n matrix row-major.
pub fn direct_check(a: &[f64], b: &[f64], cfg: &ScanConfig) -> Result<ScanVerdict> {
    cfg.validate()?;
    let (m, n) = (cfg.m as usize, cfg.n as usize);
    if a.len() != m * n || b.len() != m {
        return Err(Error::Domain("direct_check: A must be m×n and b length m".into()));
    }
    let mut samples = Vec::with_capacity(cfg.t_samples);
    for t_big in cfg.sampled_t() {
        let qmax = q_sup(t_big, cfg.n);
        let points = (2 * qmax as u64 + 1).pow(cfg.n);
        if points > cfg.q_budget {
            return Err(Error::Budget(format!(
                "direct_check: {points} q-points at T={t_big} exceed {}",
                cfg.q_budget
            )));
        }
        let psi_t = cfg.psi.eval(t_big)?;
        let mut best = f64::INFINITY;
        let mut best_q = vec![0i64; n];
        let mut best_p = vec![0i64; m];
        let mut q = vec![-qmax; n];
        'outer: loop {
            if !(cfg.exclude_q_zero && q.iter().all(|&x| x == 0)) {
                let mut res = 0.0f64;
                for i in 0..m {
                    let mut v = b[i];
                    for (j, &qj) in q.iter().enumerate() {
                        v += a[i * n + j] * qj as f64;
                    }
                    res = res.max(dist_to_int(v));
                }
                if res < best {
                    best = res;
                    best_q.copy_from_slice(&q);
                    for i in 0..m {
                        let mut v = b[i];
                        for (j, &qj) in q.iter().enumerate() {
                            v += a[i * n + j] * qj as f64;
                        }
                        best_p[i] = v.round() as i64;
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == n {
                    break 'outer;
                }
                q[idx] += 1;
                if q[idx] <= qmax {
                    break;
                }
                q[idx] = -qmax;
                idx += 1;
            }
        }
        let gap = best.powi(cfg.m as i32) - psi_t;
        let outcome = if gap < -cfg.boundary_tol {
            Outcome::Solvable
        } else if gap > cfg.boundary_tol {
            Outcome::Fails
        } else {
            Outcome::Knife
        };
        samples.push(SampleRecord {
            t_big,
            residual: best,
            witness_q: best_q,
            witness_p: best_p,
            outcome,
            near_band: false,
        });
    }
    Ok(assemble(samples))
}

/// Flow-side check: Δ(a_t Λ_{A,b}) vs z_ψ(t) at the flow times matched to
/// the sampled T values. Δ ≥ z fails; Δ in [z−C0, z) is additionally marked
/// as a near-band sample (the slack side of the correspondence).
pub fn dani_check(a: &[f64], b: &[f64], cfg: &ScanConfig, c0: f64) -> Result<ScanVerdict> {
    cfg.validate()?;
    let (m, n) = (cfg.m as usize, cfg.n as usize);
    if a.len() != m * n || b.len() != m {
        return Err(Error::Domain("dani_check: A must be m×n and b length m".into()));
    }
    let zp = ZProfile::new(cfg.psi.clone(), cfg.m, cfg.n);
    let grid = grid_from_pair(a, cfg.m, cfg.n, b)?;
    let mut samples = Vec::with_capacity(cfg.t_samples);
    for t_big in cfg.sampled_t() {
        let t = zp.t_of_big_t(t_big)?;
        let z = zp.z_of_big_t(t_big)?;
        let flowed = apply_flow(&grid, FlowParams { m: cfg.m, n: cfg.n, t })?;
        let (v, delta) = shortest_vector(&flowed)?;
        // recover the (p, q) witness from the flowed point
        let up = (t / m as f64).exp();
        let down = (-t / n as f64).exp();
        let witness_q: Vec<i64> = (0..n).map(|j| (v[m + j] / down).round() as i64).collect();
        let witness_p: Vec<i64> = (0..m)
            .map(|i| {
                let head = v[i] / up;
                let mut aq = b[i];
                for (j, &qj) in witness_q.iter().enumerate() {
                    aq += a[i * n + j] * qj as f64;
                }
                (aq - head).round() as i64
            })
            .collect();
        let (outcome, near_band, residual) = match delta {
            Delta::NegInfinity => (Outcome::Solvable, false, 0.0),
            Delta::Finite(dl) => {
                let diff = dl - z;
                let o = if diff > cfg.boundary_tol {
                    Outcome::Fails
                } else if diff < -cfg.boundary_tol {
                    Outcome::Solvable
                } else {
                    Outcome::Knife
                };
                (o, dl >= z - c0 && dl < z, (dl.exp() / up).min(f64::INFINITY))
            }
        };
        samples.push(SampleRecord {
            t_big,
            residual,
            witness_q,
            witness_p,
            outcome,
            near_band,
        });
    }
    Ok(assemble(samples))
}

/// Dual certificates: for each S, all x ∈ Z^m with
/// 0 < ‖x‖ < d⁻¹|b·x|_Z S and ‖ᵗA x‖_Z < d⁻¹|b·x|_Z ψ̃(S).
/// Witnesses at unboundedly many S certify non-improvability (one-way).
pub fn transference_witness(
    a: &[f64],
    b: &[f64],
    m: u32,
    n: u32,
    psi: &PsiFunction,
    s_list: &[f64],
    x_budget: u64,
) -> Result<Vec<(f64, Vec<i64>)>> {
    let (mu, nu) = (m as usize, n as usize);
    if a.len() != mu * nu || b.len() != mu {
        return Err(Error::Domain("transference_witness: A must be m×n, b length m".into()));
    }
    let d = (m + n) as f64;
    let mut found = Vec::new();
    for &s_big in s_list {
        let dual = psi.dual(m, n, s_big)?;
        // |b·x|_Z ≤ 1/2, so ‖x‖ < S/(2d) bounds the search box
        let xmax = (s_big / (2.0 * d)).floor() as i64;
        let points = (2 * xmax.max(0) as u64 + 1).pow(m);
        if points > x_budget {
            return Err(Error::Budget(format!(
                "transference_witness: {points} x-points at S={s_big} exceed {x_budget}"
            )));
        }
        let mut x = vec![-xmax; mu];
        'outer: loop {
            if x.iter().any(|&v| v != 0) {
                let bx = dist_to_int(b.iter().zip(&x).map(|(&bi, &xi)| bi * xi as f64).sum());
                let norm_x = x.iter().map(|&v| v.abs()).max().unwrap() as f64;
                if norm_x < bx * s_big / d {
                    let mut ok = true;
                    for j in 0..nu {
                        let tax: f64 = (0..mu).map(|i| a[i * nu + j] * x[i] as f64).sum();
                        if dist_to_int(tax) >= bx * dual / d {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        found.push((s_big, x.clone()));
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == mu {
                    break 'outer;
                }
                x[idx] += 1;
                if x[idx] <= xmax {
                    break;
                }
                x[idx] = -xmax;
                idx += 1;
            }
        }
    }
    Ok(found)
}

/// Result of the windowed uniform-exponent estimation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// Extrapolated estimate (∞ when the whole bracket stays solvable).
    pub estimate: f64,
    /// (window T_max, windowed threshold) per dyadic window, widest last.
    pub windows: Vec<(f64, f64)>,
    pub window_truncated: bool,
}

/// Windowed estimator of the uniform exponent ŵ(A, b).
///
/// For each of three dyadic window scales the threshold w at which the
/// system ‖Aq+b−p‖ < T^{−w}, ‖q‖ < T stops being solvable across the window
/// [T/8, T] is located by bisection. A windowed threshold carries a bias of
/// order 1/ln T (a residual floor r makes the finite-window threshold
/// ln(1/r)/ln T even when ŵ = 0), so the three thresholds are extrapolated
/// linearly in 1/ln T before reporting.
pub fn uniform_exponent(
    a: &[f64],
    b: &[f64],
    m: u32,
    n: u32,
    w_bracket: (f64, f64),
    t_max: f64,
    tol: f64,
) -> Result<ExponentEstimate> {
    if !(tol > 0.0) || !(w_bracket.1 > w_bracket.0) || w_bracket.0 < 0.0 {
        return Err(Error::Domain("uniform_exponent: need 0 <= w_lo < w_hi and tol > 0".into()));
    }
    if !(t_max >= 1024.0) {
        return Err(Error::Domain("uniform_exponent: T_max must be at least 1024".into()));
    }
    let window_ok = |w: f64, tmax: f64| -> Result<bool> {
        if w <= 0.0 {
            // ψ ≡ 1 and residuals are at most 1/2
            return Ok(true);
        }
        let psi = PsiFunction::power_log(m as f64 * w, 0.0, 1.0 + 1e-9)?;
        let cfg = ScanConfig::new(psi, m, n, (tmax / 8.0, tmax), 16)?;
        Ok(matches!(direct_check(a, b, &cfg)?.status, ScanStatus::DirichletOnWindow))
    };

    if !window_ok(w_bracket.0, t_max)? {
        return Err(Error::Bracket(format!("w_lo={} already fails", w_bracket.0)));
    }
    if window_ok(w_bracket.1, t_max)? {
        // solvable across the whole bracket at the widest window
        return Ok(ExponentEstimate {
            estimate: f64::INFINITY,
            windows: vec![],
            window_truncated: false,
        });
    }

    let mut windows = Vec::with_capacity(3);
    for scale in [64.0, 8.0, 1.0] {
        let tmax = t_max / scale;
        if !window_ok(w_bracket.0, tmax)? || window_ok(w_bracket.1, tmax)? {
            continue; // threshold not bracketed at this window scale
        }
        let (mut lo, mut hi) = w_bracket;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if window_ok(mid, tmax)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        windows.push((tmax, 0.5 * (lo + hi)));
    }
    if windows.is_empty() {
        return Err(Error::Bracket("no window scale bracketed the threshold".into()));
    }
    let estimate = if windows.len() == 1 {
        windows[0].1
    } else {
        let xs: Vec<f64> = windows.iter().map(|&(t, _)| 1.0 / t.ln()).collect();
        let ys: Vec<f64> = windows.iter().map(|&(_, w)| w).collect();
        let (_, intercept, _) = crate::num::ols(&xs, &ys);
        intercept.clamp(0.0, windows.last().unwrap().1)
    };
    Ok(ExponentEstimate { estimate, windows, window_truncated: true })
}

/// One cell of a direct-vs-dani comparison sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellAgreement {
    pub a: f64,
    pub b: f64,
    pub direct: StatusKind,
    pub dani: StatusKind,
}

impl CellAgreement {
    pub fn agrees(&self) -> bool {
        self.direct == self.dani
    }

    pub fn boundary_flagged(&self) -> bool {
        self.direct == StatusKind::Boundary || self.dani == StatusKind::Boundary
    }
}

/// m = n = 1 sweep over a grid_n × grid_n grid of cell centers in [0,1]²,
/// running both checkers per cell. Cells are processed in parallel and
/// returned in row-major order.
pub fn agreement_sweep(cfg: &ScanConfig, c0: f64, grid_n: usize) -> Result<Vec<CellAgreement>> {
    if cfg.m != 1 || cfg.n != 1 {
        return Err(Error::WrongMode("agreement_sweep is m = n = 1 only".into()));
    }
    cfg.validate()?;
    let cells: Vec<(usize, usize)> =
        (0..grid_n).flat_map(|i| (0..grid_n).map(move |j| (i, j))).collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let a = (i as f64 + 0.5) / grid_n as f64;
            let b = (j as f64 + 0.5) / grid_n as f64;
            let dv = direct_check(&[a], &[b], cfg)?;
            let kv = dani_check(&[a], &[b], cfg, c0)?;
            Ok(CellAgreement { a, b, direct: dv.status.kind(), dani: kv.status.kind() })
        })
        .collect()
}
