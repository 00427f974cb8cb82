//! Rate functions ψ and the calculus built on them: generalized inverses,
//! the transference dual ψ̃(S) = (ψ⁻¹(S⁻ᵐ))^(−1/n), the flow-time profile
//! z_ψ solving ψ(e^{t+nz}) = e^{−t+mz}, dimension formulas, and
//! series-convergence classifiers.
//!
//! All evaluation is done in log-coordinates (ln T, ln ψ) so that very large
//! scales stay well conditioned. Tabulated functions interpolate log-linearly,
//! which is exact on power laws.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute bisection tolerance for the z-profile solver.
pub const Z_TOL: f64 = 1e-10;
const Z_MAX_ITER: usize = 200;

/// A nonincreasing, positive rate function on [T0, ∞).
///
/// `PowerLog { a, e }` is T ↦ T^(−a) (ln T)^e with a > 0, e ≥ 0; its T0 must
/// sit past the hump of the log factor so the closed form is monotone.
/// `Table` interpolates log-linearly between knots and is constant beyond the
/// last knot.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum PsiFunction {
    #[serde(rename = "powerlog")]
    PowerLog { a: f64, e: f64, t0: f64 },
    #[serde(rename = "table")]
    Table { knots: Vec<(f64, f64)> },
}

impl PsiFunction {
    pub fn power_log(a: f64, e: f64, t0: f64) -> Result<Self> {
        if !(a > 0.0) || !(e >= 0.0) || !a.is_finite() || !e.is_finite() {
            return Err(Error::Domain(format!("powerlog needs a > 0, e >= 0, got a={a}, e={e}")));
        }
        if !(t0 > 1.0) {
            return Err(Error::Domain(format!("T0 must exceed 1, got {t0}")));
        }
        // ψ_{a,e} decreases only once ln T >= e/a.
        if t0.ln() < e / a {
            return Err(Error::Domain(format!(
                "powerlog not monotone from T0={t0}: need ln T0 >= e/a = {}",
                e / a
            )));
        }
        Ok(PsiFunction::PowerLog { a, e, t0 })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Domain("table needs at least two knots".into()));
        }
        if !(knots[0].0 > 1.0) {
            return Err(Error::Domain("table T0 must exceed 1".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Domain("table T values must strictly increase".into()));
            }
            if !(w[1].1 <= w[0].1) {
                return Err(Error::Domain("table psi values must be nonincreasing".into()));
            }
        }
        if knots.iter().any(|&(t, p)| !t.is_finite() || !(p > 0.0)) {
            return Err(Error::Domain("table entries must be finite with psi > 0".into()));
        }
        Ok(PsiFunction::Table { knots })
    }

    /// Left end of the domain.
    pub fn t_start(&self) -> f64 {
        match self {
            PsiFunction::PowerLog { t0, .. } => *t0,
            PsiFunction::Table { knots } => knots[0].0,
        }
    }

    /// Re-run the construction checks (useful after deserializing).
    pub fn validate(&self) -> Result<()> {
        match self {
            PsiFunction::PowerLog { a, e, t0 } => Self::power_log(*a, *e, *t0).map(|_| ()),
            PsiFunction::Table { knots } => Self::table(knots.clone()).map(|_| ()),
        }
    }

    /// ln ψ(T) as a function of ln T. Clamps to the left endpoint below T0
    /// (used only by the bracketing solver, which never reports roots there).
    pub(crate) fn ln_eval(&self, lt: f64) -> f64 {
        match self {
            PsiFunction::PowerLog { a, e, t0 } => {
                let lt = lt.max(t0.ln());
                -a * lt + if *e == 0.0 { 0.0 } else { e * lt.ln() }
            }
            PsiFunction::Table { knots } => {
                let l0 = knots[0].0.ln();
                let lt = lt.max(l0);
                let last = knots.len() - 1;
                if lt >= knots[last].0.ln() {
                    return knots[last].1.ln();
                }
                // locate segment by binary search on ln T
                let mut lo = 0;
                let mut hi = last;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if knots[mid].0.ln() <= lt {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (ta, pa) = (knots[lo].0.ln(), knots[lo].1.ln());
                let (tb, pb) = (knots[hi].0.ln(), knots[hi].1.ln());
                pa + (pb - pa) * (lt - ta) / (tb - ta)
            }
        }
    }

    /// ψ(T) for T ≥ T0.
    pub fn eval(&self, t_big: f64) -> Result<f64> {
        if !(t_big >= self.t_start() * (1.0 - 1e-12)) {
            return Err(Error::Domain(format!(
                "psi evaluated at T={t_big} below T0={}",
                self.t_start()
            )));
        }
        Ok(self.ln_eval(t_big.ln()).exp())
    }

    /// Generalized inverse: the largest T ≥ T0 with ψ(T) ≥ u, so flat
    /// stretches map to their right endpoint and ψ̃ stays nonincreasing.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("inverse needs u > 0, got {u}")));
        }
        let p0 = self.eval(self.t_start())?;
        if u > p0 * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("u={u} exceeds psi(T0)={p0}")));
        }
        let lu = u.ln();
        match self {
            PsiFunction::PowerLog { a, e, t0 } => {
                if *e == 0.0 {
                    return Ok((-lu / a).exp().max(*t0));
                }
                // solve -a x + e ln x = ln u for x = ln T, decreasing past ln T0
                let f = |x: f64| -a * x + e * x.ln() - lu;
                let mut lo = t0.ln();
                if f(lo) <= 0.0 {
                    return Ok(*t0);
                }
                let mut hi = lo.max(1.0) * 2.0;
                let mut guard = 0;
                while f(hi) > 0.0 {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 200 {
                        return Err(Error::Solver("inverse bracket expansion failed".into()));
                    }
                }
                for _ in 0..Z_MAX_ITER {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-13 * hi.abs().max(1.0) {
                        break;
                    }
                }
                Ok((0.5 * (lo + hi)).exp())
            }
            PsiFunction::Table { knots } => {
                let last = knots.len() - 1;
                if u <= knots[last].1 * (1.0 + 1e-12) {
                    return Err(Error::Unbounded(format!(
                        "u={u} at or below the table's limit value {}",
                        knots[last].1
                    )));
                }
                // rightmost index with psi >= u
                let mut j = last;
                while j > 0 && knots[j].1 < u {
                    j -= 1;
                }
                // knots[j].1 >= u > knots[j+1].1
                if knots[j].1 <= u * (1.0 + 1e-14) {
                    // exact hit: right endpoint of the (possibly flat) stretch
                    return Ok(knots[j].0);
                }
                let (ta, pa) = (knots[j].0.ln(), knots[j].1.ln());
                let (tb, pb) = (knots[j + 1].0.ln(), knots[j + 1].1.ln());
                Ok((ta + (lu - pa) * (tb - ta) / (pb - pa)).exp())
            }
        }
    }

    /// Start of the dual domain, S0 = ψ(T0)^(−1/m).
    pub fn s_start(&self, m: u32) -> f64 {
        self.ln_eval(self.t_start().ln()).exp().powf(-1.0 / m as f64)
    }

    /// Transference dual ψ̃(S) = (ψ⁻¹(S^{−m}))^{−1/n}, S ≥ S0.
    pub fn dual(&self, m: u32, n: u32, s_big: f64) -> Result<f64> {
        let s0 = self.s_start(m);
        if !(s_big >= s0 * (1.0 - 1e-12)) {
            return Err(Error::Domain(format!("dual evaluated at S={s_big} below S0={s0}")));
        }
        let u = s_big.powi(-(m as i32));
        Ok(self.inverse(u)?.powf(-1.0 / n as f64))
    }

    /// Ψ_ε(U) = d⁻¹ ε ψ̃(d ε⁻¹ U) with d = m + n and ε ∈ (0, ½).
    pub fn capital_eps(&self, m: u32, n: u32, eps: f64, u_arg: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("eps must lie in (0, 1/2), got {eps}")));
        }
        let d = (m + n) as f64;
        Ok(eps / d * self.dual(m, n, d / eps * u_arg)?)
    }
}

/// The unique profile z_ψ with t + n z(t) strictly increasing, t − m z(t)
/// nondecreasing, and ψ(e^{t+nz(t)}) = e^{−t+mz(t)} for t ≥ t0.
#[derive(Clone, Debug)]
pub struct ZProfile {
    psi: PsiFunction,
    m: u32,
    n: u32,
    t0: f64,
}

impl ZProfile {
    pub fn new(psi: PsiFunction, m: u32, n: u32) -> Self {
        let (mf, nf) = (m as f64, n as f64);
        let lt0 = psi.t_start().ln();
        let lp0 = psi.ln_eval(lt0);
        let t0 = (mf * lt0 - nf * lp0) / (mf + nf);
        ZProfile { psi, m, n, t0 }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    /// z value a given T corresponds to: z(t(T)) = (ln T + ln ψ(T)) / (m+n).
    pub fn z_of_big_t(&self, t_big: f64) -> Result<f64> {
        let lt = t_big.ln();
        if t_big < self.psi.t_start() * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("T={t_big} below T0")));
        }
        Ok((lt + self.psi.ln_eval(lt)) / (self.m + self.n) as f64)
    }

    /// Flow time a given T corresponds to: t(T) = (m ln T − n ln ψ(T)) / (m+n).
    pub fn t_of_big_t(&self, t_big: f64) -> Result<f64> {
        let lt = t_big.ln();
        if t_big < self.psi.t_start() * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("T={t_big} below T0")));
        }
        let (mf, nf) = (self.m as f64, self.n as f64);
        Ok((mf * lt - nf * self.psi.ln_eval(lt)) / (mf + nf))
    }

    /// Solve for z(t) by bracketing bisection on
    /// g(z) = ln ψ(e^{t+nz}) + t − m z, which is strictly decreasing in z.
    pub fn z(&self, t: f64) -> Result<f64> {
        self.z_tol(t, Z_TOL)
    }

    pub fn z_tol(&self, t: f64, tol: f64) -> Result<f64> {
        if t < self.t0 - 1e-12 {
            return Err(Error::Domain(format!("t={t} below t0={}", self.t0)));
        }
        let (mf, nf) = (self.m as f64, self.n as f64);
        let g = |z: f64| self.psi.ln_eval(t + nf * z) + t - mf * z;
        let lp0 = self.psi.ln_eval(self.psi.t_start().ln());
        let mut lo = -(t - self.t0) / mf - 10.0;
        let mut hi = (t - self.t0 + lp0.abs()) / nf + 10.0;
        if !(g(lo) >= 0.0 && g(hi) <= 0.0) {
            return Err(Error::Solver(format!("z bracket failed at t={t}")));
        }
        for _ in 0..Z_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < tol {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Which metric problem a formula refers to: b averaged out (doubly) or fixed
/// (singly).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricMode {
    Singly,
    Doubly,
}

/// s_a = mn − mn(1−a)/(m+na), the critical dimension for ψ_a; the doubly
/// metric problem shifts it by m.
pub fn dimension_predict(m: u32, n: u32, a: f64, mode: MetricMode) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("need 0 < a <= 1, got {a}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let s_a = mf * nf - mf * nf * (1.0 - a) / (mf + nf * a);
    Ok(match mode {
        MetricMode::Singly => s_a,
        MetricMode::Doubly => s_a + mf,
    })
}

/// Dimension of the sublevel set of the uniform exponent:
/// min{mn − (n−mw)/(1+w), mn}, plus m in the doubly metric case.
pub fn exponent_dimension(m: u32, n: u32, w: f64, mode: MetricMode) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!("need w > 0, got {w}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let shift = match mode {
        MetricMode::Singly => 0.0,
        MetricMode::Doubly => mf,
    };
    let full = mf * nf + shift;
    Ok((full - (nf - mf * w) / (1.0 + w)).min(full))
}

/// Which series is being classified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeriesVariant {
    /// Σ 1/(ψ(q)q²) (q^{1/n}/ψ(q)^{1/m})^{mn+m−s}
    Doubly,
    /// Σ 1/(ψ(q)q²) (q^{1/n}/ψ(q)^{1/m})^{mn−s}
    Singly,
    /// Σ h^{m+n−1} (Ψ_ε(h)/h)^{s−n(m−1)}
    Jarnik { eps: f64 },
}

#[derive(Clone, Debug)]
pub struct SeriesSpec {
    pub psi: PsiFunction,
    pub m: u32,
    pub n: u32,
    pub s: f64,
    pub variant: SeriesVariant,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    /// Condensation was inconclusive; carries the dyadic partial sums seen.
    Undecided(Vec<f64>),
}

const COND_BLOCKS: usize = 40;
const COND_LO: f64 = 0.9;
const COND_HI: f64 = 1.1;

impl SeriesSpec {
    pub fn new(psi: PsiFunction, m: u32, n: u32, s: f64, variant: SeriesVariant) -> Result<Self> {
        let (mf, nf) = (m as f64, n as f64);
        let s_max = match variant {
            SeriesVariant::Doubly => mf * nf + mf,
            _ => mf * nf,
        };
        if !(s >= 0.0 && s <= s_max + 1e-12) {
            return Err(Error::Domain(format!("s={s} outside [0, {s_max}]")));
        }
        if let SeriesVariant::Jarnik { eps } = variant {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::Domain(format!("Jarnik eps must lie in (0,1/2), got {eps}")));
            }
        }
        Ok(SeriesSpec { psi, m, n, s, variant })
    }

    /// For ψ = T^{−a}(ln T)^e the summand behaves like q^E (ln q)^F; returns
    /// (E, F) snapped to the nearest integer within 1e−9 so that exact
    /// boundary cases classify exactly.
    fn power_exponents(&self, a: f64, e: f64) -> (f64, f64) {
        let (mf, nf) = (self.m as f64, self.n as f64);
        let (big_e, big_f) = match self.variant {
            SeriesVariant::Doubly => {
                let x = mf * nf + mf - self.s;
                (a - 2.0 + x * (1.0 / nf + a / mf), -e * (1.0 + x / mf))
            }
            SeriesVariant::Singly => {
                let x = mf * nf - self.s;
                (a - 2.0 + x * (1.0 / nf + a / mf), -e * (1.0 + x / mf))
            }
            SeriesVariant::Jarnik { .. } => {
                // ψ̃(S) ≍ S^{−m/(an)} (ln S)^{−e/(an)} for the power-log family
                let sn = self.s - nf * (mf - 1.0);
                (mf + nf - 1.0 - sn * (1.0 + mf / (a * nf)), -sn * e / (a * nf))
            }
        };
        let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
        (snap(big_e), snap(big_f))
    }

    /// One summand, indexed by q (Doubly/Singly) or h (Jarnik). Computed in
    /// logs; returns ln of the summand.
    fn ln_summand(&self, q: f64) -> Result<f64> {
        let (mf, nf) = (self.m as f64, self.n as f64);
        let lq = q.ln();
        match self.variant {
            SeriesVariant::Doubly | SeriesVariant::Singly => {
                let x = match self.variant {
                    SeriesVariant::Doubly => mf * nf + mf - self.s,
                    _ => mf * nf - self.s,
                };
                let lp = self.psi.ln_eval(lq);
                Ok(-lp - 2.0 * lq + x * (lq / nf - lp / mf))
            }
            SeriesVariant::Jarnik { eps } => {
                let sn = self.s - nf * (mf - 1.0);
                let cap = self.psi.capital_eps(self.m, self.n, eps, q)?;
                Ok((mf + nf - 1.0) * lq + sn * (cap.ln() - lq))
            }
        }
    }

    pub fn classify(&self) -> Result<SeriesVerdict> {
        if let PsiFunction::PowerLog { a, e, .. } = self.psi {
            let (big_e, big_f) = self.power_exponents(a, e);
            // Σ q^E (ln q)^F converges iff E < −1, or E = −1 and F < −1.
            return Ok(if big_e < -1.0 || (big_e == -1.0 && big_f < -1.0) {
                SeriesVerdict::Converges
            } else {
                SeriesVerdict::Diverges
            });
        }
        self.classify_condensation()
    }

    /// Cauchy condensation: compare consecutive condensed terms 2^k f(2^k)
    /// and refuse to guess when the tail ratio sits in [0.9, 1.1].
    fn classify_condensation(&self) -> Result<SeriesVerdict> {
        let start = match self.variant {
            SeriesVariant::Jarnik { eps } => {
                let d = (self.m + self.n) as f64;
                (d / eps * self.psi.s_start(self.m)).max(2.0)
            }
            _ => self.psi.t_start().max(2.0),
        };
        let k0 = start.log2().ceil() as i32;
        let mut terms = Vec::with_capacity(COND_BLOCKS + 1);
        for k in k0..=(k0 + COND_BLOCKS as i32) {
            let q = (k as f64).exp2();
            terms.push((k as f64) * std::f64::consts::LN_2 + self.ln_summand(q)?);
        }
        let partial: Vec<f64> = terms
            .iter()
            .scan(0.0, |acc, &lt| {
                *acc += lt.exp();
                Some(*acc)
            })
            .collect();
        // geometric mean ratio over the last half of the blocks
        let half = terms.len() / 2;
        let mean_ratio = ((terms[terms.len() - 1] - terms[half])
            / (terms.len() - 1 - half) as f64)
            .exp();
        Ok(if mean_ratio < COND_LO {
            SeriesVerdict::Converges
        } else if mean_ratio > COND_HI {
            SeriesVerdict::Diverges
        } else {
            SeriesVerdict::Undecided(partial)
        })
    }
}
